// SPDX-License-Identifier: Apache-2.0

//! Subcommand bodies. Each returns the `result` object of the output
//! envelope plus an optional failed identity, which maps to exit code 1.

use std::path::PathBuf;

use fermicomm::dimensions::{
    brute_force_commutant_dim_capped, dim_gauss_commutant, dim_pp_commutant, Group, ORACLE_MAX_QUBITS,
};
use fermicomm::gaussian_group::{
    creation_covariance_residual, majorana_covariance_residual, sample_gaussian_unitary, sample_pp_gaussian_unitary,
    substream,
};
use fermicomm::gt_basis::{commutant_basis, gram_report, matrix_unit_residual, ParityFlag};
use fermicomm::invariants::{
    free_state_annihilation, omega_k, p_ki_spectrum, particle_number, plucker_rank, purity, spin_sector_probs,
};
use fermicomm::magic::{
    avg_gauss_s4_exact, avg_pp_s4_exact, baseline_s4, mc_average_s4, s4, to_f64, Baseline, Ensemble, McEstimate,
};
use fermicomm::multicopy::{generators, lie_closure_residuals, membership_residual, CopySpace};
use fermicomm::{SparseOperator, StateVector};
use num::{BigInt, BigRational};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{csv_err, put_exact, write_atomic};
use crate::state::StateSpec;

/// Tolerance for group-membership and covariance residuals.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Tolerance for the Lie bracket identities.
pub const BRACKET_TOL: f64 = 1e-10;
/// Tolerance for matrix-unit and orthogonality relations of a basis.
pub const BASIS_TOL: f64 = 1e-9;

pub struct Outcome {
    pub result: Value,
    /// Name and residual of the first identity that failed.
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome { result, failure: None }
    }
}

/// One checked identity in a verification report.
struct Check {
    identity: String,
    residual: f64,
    tolerance: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.residual < self.tolerance
    }

    fn to_json(&self) -> Value {
        json!({
            "identity": self.identity,
            "max_residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed(),
        })
    }
}

fn summarize(checks: &[Check]) -> (Value, Option<String>) {
    let failure = checks
        .iter()
        .find(|c| !c.passed())
        .map(|c| format!("{}: residual {:e} exceeds {:e}", c.identity, c.residual, c.tolerance));
    let worst = checks.iter().map(|c| c.residual).fold(0.0f64, f64::max);
    (json!({"checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(), "max_residual": worst}), failure)
}

pub fn closed_form_dim(group: Group, t: usize, n: usize) -> Result<BigInt, CliError> {
    Ok(match group {
        Group::Pp => dim_pp_commutant(t as u64, n as u64)?,
        Group::Gauss => dim_gauss_commutant(t as u64, n as u64)?,
    })
}

/// Human-readable closed form evaluated by `dims`.
pub fn formula(group: Group) -> &'static str {
    match group {
        Group::Pp => "prod_{j=0}^{n-1} j! (j+2t)! / ((j+t)!)^2",
        Group::Gauss => "2^{1-n} prod_{j=0}^{n-1} (2j)! (2t+2j)! / ((t+j)! (t+n+j-1)!)",
    }
}

/// `dims`, optionally cross-checked against the brute-force oracle.
pub fn dims(group: Group, t: usize, n: usize, oracle_cap: Option<usize>) -> Result<Outcome, CliError> {
    let d = closed_form_dim(group, t, n)?;
    let mut result = json!({ "group": group.to_string(), "t": t, "n": n, "formula": formula(group) });
    put_exact(&mut result, "dim", &BigRational::from_integer(d.clone()));
    let mut failure = None;
    if let Some(cap) = oracle_cap {
        let numeric = brute_force_commutant_dim_capped(n, t, group, cap)?;
        let matches = BigInt::from(numeric) == d;
        result["oracle"] = json!({ "brute_force": numeric, "match": matches });
        if !matches {
            failure = Some(format!("oracle dimension {numeric} differs from closed form {d}"));
        }
    }
    Ok(Outcome { result, failure })
}

pub fn oracle(group: Group, t: usize, n: usize, max_qubits: Option<usize>) -> Result<Outcome, CliError> {
    let cap = max_qubits.unwrap_or(ORACLE_MAX_QUBITS);
    let numeric = brute_force_commutant_dim_capped(n, t, group, cap)?;
    let closed = closed_form_dim(group, t, n)?;
    let matches = BigInt::from(numeric) == closed;
    let mut result = json!({
        "group": group.to_string(),
        "t": t,
        "n": n,
        "brute_force": numeric,
        "match": matches,
    });
    put_exact(&mut result, "closed_form", &BigRational::from_integer(closed.clone()));
    let failure = (!matches).then(|| format!("oracle dimension {numeric} differs from closed form {closed}"));
    Ok(Outcome { result, failure })
}

/// Draws one group element and compiles its Fock-space representative,
/// returning the covariance residual alongside.
fn sample_representative(group: Group, n: usize, seed: u64, index: u64) -> Result<(SparseOperator, f64), CliError> {
    let mut rng = substream(seed, index);
    Ok(match group {
        Group::Pp => {
            let (u, r) = sample_pp_gaussian_unitary(n, &mut rng)?;
            let res = creation_covariance_residual(&u, &r)?;
            (r, res)
        }
        Group::Gauss => {
            let (u, r) = sample_gaussian_unitary(n, &mut rng)?;
            let res = majorana_covariance_residual(&u, &r)?;
            (r, res)
        }
    })
}

pub fn verify(
    group: Group,
    t: usize,
    n: usize,
    samples: usize,
    seed: u64,
    include_basis: bool,
) -> Result<Outcome, CliError> {
    if samples == 0 {
        return Err(CliError::Usage("need at least one sample".into()));
    }
    let cs = CopySpace::new(n, t)?;
    let g = generators(cs)?;
    let mut named: Vec<(String, SparseOperator)> = Vec::new();
    for j in 1..=t {
        for k in 1..=t {
            match group {
                Group::Pp => named.push((format!("Omega[{j},{k}]"), g.omega(j, k).clone())),
                Group::Gauss if j < k => named.push((format!("Q[{j},{k}]"), g.qtilde(j, k).clone())),
                Group::Gauss => {}
            }
        }
    }
    let basis = if include_basis { commutant_basis(group, t, n)? } else { Vec::new() };

    let (omega_res, q_res) = lie_closure_residuals(cs)?;
    let mut checks = vec![
        Check { identity: "u(t) bracket of Omega generators".into(), residual: omega_res, tolerance: BRACKET_TOL },
        Check { identity: "so(t) bracket of Q generators".into(), residual: q_res, tolerance: BRACKET_TOL },
    ];
    let mut covariance = 0.0f64;
    let mut generator_worst = 0.0f64;
    let mut generator_name = String::new();
    let mut basis_worst = 0.0f64;
    for s in 0..samples {
        let (r, cov) = sample_representative(group, n, seed, s as u64)?;
        covariance = covariance.max(cov);
        for (name, op) in &named {
            let res = membership_residual(cs, &r, op)?;
            if res >= generator_worst {
                generator_worst = res;
                generator_name.clone_from(name);
            }
        }
        for e in &basis {
            basis_worst = basis_worst.max(membership_residual(cs, &r, &e.op)?);
        }
    }
    checks.push(Check {
        identity: "covariance of compiled unitaries".into(),
        residual: covariance,
        tolerance: MEMBERSHIP_TOL,
    });
    checks.push(Check {
        identity: format!("generator commutes with R^(x)t (worst: {generator_name})"),
        residual: generator_worst,
        tolerance: MEMBERSHIP_TOL,
    });
    if include_basis {
        checks.push(Check {
            identity: format!("{} basis elements commute with R^(x)t", basis.len()),
            residual: basis_worst,
            tolerance: MEMBERSHIP_TOL,
        });
    }
    let (mut result, failure) = summarize(&checks);
    result["group"] = json!(group.to_string());
    result["t"] = json!(t);
    result["n"] = json!(n);
    result["samples"] = json!(samples);
    result["generators"] = json!(named.len());
    Ok(Outcome { result, failure })
}

pub fn basis(group: Group, t: usize, n: usize) -> Result<Outcome, CliError> {
    let elements = commutant_basis(group, t, n)?;
    let expected = closed_form_dim(group, t, n)?;
    let units = matrix_unit_residual(&elements)?;
    let gram = gram_report(&elements)?;
    let manifest: Vec<Value> = elements
        .iter()
        .map(|e| {
            json!({
                "weight": e.weight.to_string(),
                "row": e.row.to_string(),
                "col": e.col.to_string(),
                "parity": e.parity.to_string(),
                "nnz": e.op.nnz(),
                "norm": e.op.frobenius_norm(),
            })
        })
        .collect();
    let count_ok = BigInt::from(elements.len()) == expected && gram.rank == elements.len();
    let checks = [
        Check { identity: "matrix-unit relations".into(), residual: units, tolerance: BASIS_TOL },
        Check { identity: "cross-element orthogonality".into(), residual: gram.max_overlap, tolerance: BASIS_TOL },
        Check {
            identity: "uniform norm within each block".into(),
            residual: gram.max_block_deviation,
            tolerance: BASIS_TOL,
        },
    ];
    let (mut result, mut failure) = summarize(&checks);
    if !count_ok && failure.is_none() {
        failure = Some(format!(
            "element count {} (Gram rank {}) differs from the commutant dimension {expected}",
            elements.len(),
            gram.rank
        ));
    }
    result["group"] = json!(group.to_string());
    result["t"] = json!(t);
    result["n"] = json!(n);
    result["count"] = json!(elements.len());
    result["gamma1_count"] = json!(elements.iter().filter(|e| e.parity == ParityFlag::Gamma1).count());
    put_exact(&mut result, "expected_dim", &BigRational::from_integer(expected));
    result["gram_rank"] = json!(gram.rank);
    result["elements"] = Value::Array(manifest);
    Ok(Outcome { result, failure })
}

fn report_json(rep: &fermicomm::invariants::InvariantReport) -> Value {
    json!({
        "description": rep.description,
        "t": rep.t,
        "values": rep.values,
        "residuals": rep.residuals,
    })
}

pub fn invariants(n: usize, spec: &StateSpec, max_k: usize) -> Result<Outcome, CliError> {
    let psi = spec.build(n)?;
    let spectrum = p_ki_spectrum(&psi, n)?;
    let mut result = json!({
        "n": n,
        "s4": s4(&psi, n)?,
        "majorana_spectrum": report_json(&spectrum.to_report(n, "two-copy Majorana weights p[k,i]")),
        "gaussian_witness": free_state_annihilation(&psi, n, 2, Group::Gauss)?,
    });
    match particle_number(&psi, n) {
        Ok(r) => {
            let sectors = spin_sector_probs(&psi, n, r)?;
            let pair: StateVector = psi.tensor(&psi);
            let mut purities = Vec::new();
            for k in 1..=max_k.min(r) {
                let direct = purity(&psi, n, k)?;
                let via_copies = pair.expectation(&omega_k(n, k)?)?.re;
                purities.push(json!({
                    "k": k,
                    "purity": direct,
                    "two_copy_expectation": via_copies,
                    "residual": (direct - via_copies).abs(),
                }));
            }
            result["particle_number"] = json!(r);
            result["spin_sectors"] = report_json(&sectors.to_report(n, "two-copy spin-sector weights p_j"));
            result["plucker_rank"] = json!(plucker_rank(&psi, n)?);
            result["number_preserving_witness"] = json!(free_state_annihilation(&psi, n, 2, Group::Pp)?);
            result["rdm_purities"] = Value::Array(purities);
        }
        Err(fermicomm::Error::Domain(_)) => {
            result["particle_number"] = Value::Null;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(Outcome::ok(result))
}

/// Exact ensemble average of `S_4`, where one is known.
pub fn exact_average(n: usize, ensemble: Ensemble) -> Result<BigRational, CliError> {
    let n64 = n as u64;
    Ok(match ensemble {
        // The odd sector is the image of the even one under a Clifford
        // reflection, which leaves S_4 unchanged.
        Ensemble::Gauss | Ensemble::GaussOdd => avg_gauss_s4_exact(n64)?,
        Ensemble::Pp(r) => avg_pp_s4_exact(n64, r as u64)?,
        Ensemble::Haar => baseline_s4(n64, Baseline::Haar)?,
        Ensemble::Product => baseline_s4(n64, Baseline::Product)?,
    })
}

fn particles(ensemble: Ensemble) -> Option<usize> {
    match ensemble {
        Ensemble::Pp(r) => Some(r),
        _ => None,
    }
}

fn mc_json(est: &McEstimate) -> Value {
    json!({"mean": est.mean, "stderr": est.std_error, "samples": est.samples, "seed": est.seed})
}

pub struct McRequest {
    pub samples: usize,
    pub seed: u64,
}

/// `magic exact` and `magic mc`. With `plot` set, also writes one CSV row
/// per mode count `1..=n` (rows with `r > n` are skipped).
pub fn magic(n: usize, ensemble: Ensemble, mc: Option<McRequest>, plot: Option<&PathBuf>) -> Result<Outcome, CliError> {
    let exact = exact_average(n, ensemble)?;
    let mut result = json!({
        "n": n,
        "ensemble": ensemble.to_string(),
        "r": particles(ensemble),
    });
    put_exact(&mut result, "exact", &exact);
    if let Some(req) = &mc {
        let est = mc_average_s4(n, ensemble, req.samples, req.seed)?;
        result["mc"] = mc_json(&est);
        result["sigmas_from_exact"] = json!(est.sigmas_from(to_f64(&exact)));
    }
    if let Some(path) = plot {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "r", "exact", "mc_mean", "mc_stderr", "samples", "seed"]).map_err(csv_err)?;
        for m in 1..=n {
            if particles(ensemble).is_some_and(|r| r > m) {
                continue;
            }
            let e = to_f64(&exact_average(m, ensemble)?);
            let r = particles(ensemble).map(|r| r.to_string()).unwrap_or_default();
            let row = match &mc {
                Some(req) => {
                    let est = mc_average_s4(m, ensemble, req.samples, req.seed)?;
                    [
                        m.to_string(),
                        r,
                        e.to_string(),
                        est.mean.to_string(),
                        est.std_error.to_string(),
                        est.samples.to_string(),
                        est.seed.to_string(),
                    ]
                }
                None => [m.to_string(), r, e.to_string(), String::new(), String::new(), String::new(), String::new()],
            };
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        write_atomic(path, &bytes)?;
        result["plot_data"] = json!(path.display().to_string());
    }
    Ok(Outcome::ok(result))
}
