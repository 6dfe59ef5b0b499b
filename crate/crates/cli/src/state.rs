// SPDX-License-Identifier: Apache-2.0

//! Textual state specifications accepted by `invariants --state`.
//!
//! | spec                          | state                                                  |
//! |-------------------------------|--------------------------------------------------------|
//! | `vacuum`                      | the empty Fock state                                   |
//! | `slater:1,3`                  | modes 1 and 3 occupied                                 |
//! | `fock:0110`                   | occupation string, mode 1 leftmost                     |
//! | `gaussian:seed=S`             | `R(U)|0>` with `U` Haar on `SO(2n)`                    |
//! | `pp-gaussian:seed=S,r=R`      | `R(U)|1..R>` with `U` Haar on `U(n)`                   |
//! | `random:seed=S[,r=R]`         | Haar vector on Fock space, or on the `R`-particle sector |
//! | `file:PATH`                   | JSON array of `[re, im]` amplitude pairs               |

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use fermicomm::gaussian_group::{sample_gaussian_unitary, sample_pp_gaussian_unitary, slater_state, substream};
use fermicomm::{StateVector, C64};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateSpec {
    Vacuum,
    Slater(Vec<usize>),
    Fock(Vec<bool>),
    Gaussian { seed: u64 },
    PpGaussian { seed: u64, r: usize },
    Random { seed: u64, r: Option<usize> },
    File(PathBuf),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn key_values(body: &str) -> Result<BTreeMap<String, u64>, CliError> {
    let mut out = BTreeMap::new();
    for item in body.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| usage(format!("expected key=value, got '{item}'")))?;
        let v: u64 = v.trim().parse().map_err(|_| usage(format!("'{v}' is not a non-negative integer")))?;
        if out.insert(k.trim().to_string(), v).is_some() {
            return Err(usage(format!("key '{k}' given twice")));
        }
    }
    Ok(out)
}

fn take_keys(
    mut kv: BTreeMap<String, u64>,
    required: &[&str],
    optional: &[&str],
) -> Result<Vec<Option<u64>>, CliError> {
    let mut out = Vec::new();
    for k in required {
        out.push(Some(kv.remove(*k).ok_or_else(|| usage(format!("missing '{k}='")))?));
    }
    for k in optional {
        out.push(kv.remove(*k));
    }
    if let Some(k) = kv.keys().next() {
        return Err(usage(format!("unknown key '{k}'")));
    }
    Ok(out)
}

impl FromStr for StateSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "vacuum" if body.is_empty() => Ok(StateSpec::Vacuum),
            "slater" => {
                let modes = body
                    .split(',')
                    .filter(|x| !x.is_empty())
                    .map(|x| x.trim().parse::<usize>().map_err(|_| usage(format!("bad mode index '{x}'"))))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(StateSpec::Slater(modes))
            }
            "fock" => {
                let bits = body
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(usage(format!("occupation string has '{other}'"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(StateSpec::Fock(bits))
            }
            "gaussian" => {
                let v = take_keys(key_values(body)?, &["seed"], &[])?;
                Ok(StateSpec::Gaussian { seed: v[0].unwrap() })
            }
            "pp-gaussian" => {
                let v = take_keys(key_values(body)?, &["seed", "r"], &[])?;
                Ok(StateSpec::PpGaussian { seed: v[0].unwrap(), r: v[1].unwrap() as usize })
            }
            "random" => {
                let v = take_keys(key_values(body)?, &["seed"], &["r"])?;
                Ok(StateSpec::Random { seed: v[0].unwrap(), r: v[1].map(|r| r as usize) })
            }
            "file" if !body.is_empty() => Ok(StateSpec::File(PathBuf::from(body))),
            _ => Err(usage(format!(
                "unknown state '{s}' (expected vacuum, slater:I,J, fock:BITS, gaussian:seed=S, \
                 pp-gaussian:seed=S,r=R, random:seed=S[,r=R], file:PATH)"
            ))),
        }
    }
}

impl StateSpec {
    pub fn seed(&self) -> Option<u64> {
        match self {
            StateSpec::Gaussian { seed } | StateSpec::PpGaussian { seed, .. } | StateSpec::Random { seed, .. } => {
                Some(*seed)
            }
            _ => None,
        }
    }

    /// Normalized state on `n` modes.
    pub fn build(&self, n: usize) -> Result<StateVector, CliError> {
        let psi = match self {
            StateSpec::Vacuum => slater_state(n, &[])?,
            StateSpec::Slater(modes) => slater_state(n, modes)?,
            StateSpec::Fock(bits) => {
                if bits.len() != n {
                    return Err(usage(format!("occupation string has {} modes, expected {n}", bits.len())));
                }
                let occupied: Vec<usize> = (1..=n).filter(|&p| bits[p - 1]).collect();
                slater_state(n, &occupied)?
            }
            StateSpec::Gaussian { seed } => {
                let (_, r) = sample_gaussian_unitary(n, &mut substream(*seed, 0))?;
                r.apply(&slater_state(n, &[])?)?
            }
            StateSpec::PpGaussian { seed, r } => {
                if *r > n {
                    return Err(usage(format!("particle number {r} exceeds {n} modes")));
                }
                let (_, u) = sample_pp_gaussian_unitary(n, &mut substream(*seed, 0))?;
                let occupied: Vec<usize> = (1..=*r).collect();
                u.apply(&slater_state(n, &occupied)?)?
            }
            StateSpec::Random { seed, r } => {
                if r.is_some_and(|r| r > n) {
                    return Err(usage(format!("particle number {} exceeds {n} modes", r.unwrap())));
                }
                let mut rng = substream(*seed, 0);
                let amps: Vec<C64> = (0..1usize << n)
                    .map(|i| {
                        let z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                        match r {
                            Some(r) if i.count_ones() as usize != *r => C64::new(0.0, 0.0),
                            _ => z,
                        }
                    })
                    .collect();
                StateVector::new(amps)?.normalized()?
            }
            StateSpec::File(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                let pairs: Vec<[f64; 2]> = serde_json::from_str(&text)
                    .map_err(|e| usage(format!("{}: expected a JSON array of [re, im] pairs ({e})", path.display())))?;
                if pairs.len() != 1usize << n {
                    return Err(usage(format!(
                        "{} holds {} amplitudes, expected {}",
                        path.display(),
                        pairs.len(),
                        1usize << n
                    )));
                }
                let psi = StateVector::new(pairs.iter().map(|[re, im]| C64::new(*re, *im)).collect())?;
                psi.require_normalized()?;
                psi
            }
        };
        Ok(psi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_form() {
        assert_eq!("vacuum".parse::<StateSpec>().unwrap(), StateSpec::Vacuum);
        assert_eq!("slater:1,2".parse::<StateSpec>().unwrap(), StateSpec::Slater(vec![1, 2]));
        assert_eq!("fock:0110".parse::<StateSpec>().unwrap(), StateSpec::Fock(vec![false, true, true, false]));
        assert_eq!("gaussian:seed=4".parse::<StateSpec>().unwrap(), StateSpec::Gaussian { seed: 4 });
        assert_eq!("pp-gaussian:seed=1,r=2".parse::<StateSpec>().unwrap(), StateSpec::PpGaussian { seed: 1, r: 2 });
        assert_eq!("random:seed=3".parse::<StateSpec>().unwrap(), StateSpec::Random { seed: 3, r: None });
        assert_eq!("random:seed=3,r=1".parse::<StateSpec>().unwrap(), StateSpec::Random { seed: 3, r: Some(1) });
        assert_eq!("file:a.json".parse::<StateSpec>().unwrap(), StateSpec::File("a.json".into()));
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "vacuum:1",
            "fock:012",
            "gaussian",
            "gaussian:seed=x",
            "random:seed=1,q=2",
            "pp-gaussian:seed=1",
            "file:",
        ] {
            assert!(bad.parse::<StateSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn fixed_particle_random_state() {
        let psi = StateSpec::Random { seed: 9, r: Some(2) }.build(4).unwrap();
        for (i, a) in psi.amplitudes().iter().enumerate() {
            if i.count_ones() != 2 {
                assert_eq!(a.norm(), 0.0);
            }
        }
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fock_matches_slater() {
        let a = StateSpec::Fock(vec![false, true, true]).build(3).unwrap();
        let b = StateSpec::Slater(vec![2, 3]).build(3).unwrap();
        assert_eq!(a, b);
    }
}
