// SPDX-License-Identifier: Apache-2.0

//! `fermicomm`: batch front end for commutant dimensions, bases, copy-space
//! invariants and stabilizer-entropy averages of free-fermion ensembles.
//!
//! Every run emits `{provenance, result}` as JSON (or flattened `key,value`
//! CSV) on stdout or into `--output`, written atomically. Exit codes: 0 ok,
//! 1 failed identity, 2 usage error, 3 resource cap.

mod commands;
mod error;
mod output;
mod state;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fermicomm::dimensions::{Group, ORACLE_MAX_QUBITS};
use fermicomm::magic::Ensemble;
use fermicomm::multicopy::{max_qubits, MAX_QUBITS_ENV};
use serde::Serialize;

use crate::commands::{McRequest, Outcome};
use crate::error::{CliError, EXIT_USAGE};
use crate::output::{envelope, render, write_atomic, Format};
use crate::state::StateSpec;

/// Default cap on the operator-space dimension `4^(n t)` for subcommands
/// that materialize operator bases.
const DEFAULT_MAX_OPERATOR_DIM: u64 = 1 << 24;

#[derive(Parser, Debug)]
#[command(name = "fermicomm", version, about = "Commutants, invariants and magic of free-fermion ensembles")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cap on total qubits `n * t` (overrides FERMICOMM_MAX_QUBITS).
    #[arg(long, global = true)]
    max_qubits: Option<usize>,
    /// Cap on the operator-space dimension `4^(n t)` for `basis`.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_OPERATOR_DIM)]
    max_operator_dim: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form commutant dimension.
    Dims(DimsArgs),
    /// Generator commutation and Lie-closure sweeps over sampled unitaries.
    Verify(VerifyArgs),
    /// Explicit commutant basis manifest with its verification residuals.
    Basis(GroupArgs),
    /// Copy-space invariants of one state.
    Invariants(InvariantArgs),
    /// Stabilizer 4-Renyi entropy averages.
    Magic {
        #[command(subcommand)]
        mode: MagicMode,
    },
    /// Brute-force commutant dimension compared with the closed form.
    Oracle(GroupArgs),
}

#[derive(Args, Debug)]
struct GroupArgs {
    #[arg(long)]
    group: Group,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    n: usize,
}

#[derive(Args, Debug)]
struct DimsArgs {
    #[command(flatten)]
    shape: GroupArgs,
    /// Also compute the dimension by brute force and compare.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    shape: GroupArgs,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    /// Also check every explicit basis element.
    #[arg(long)]
    include_basis: bool,
}

#[derive(Args, Debug)]
struct InvariantArgs {
    #[arg(long)]
    n: usize,
    /// vacuum | slater:I,J | fock:BITS | gaussian:seed=S | pp-gaussian:seed=S,r=R |
    /// random:seed=S[,r=R] | file:PATH
    #[arg(long)]
    state: String,
    /// Largest reduced-density-matrix order whose purity is reported.
    #[arg(long, default_value_t = 2)]
    k: usize,
}

#[derive(Args, Debug)]
struct EnsembleArgs {
    /// gauss | gauss-odd | pp | pp:R | haar | product
    #[arg(long)]
    ensemble: String,
    /// Particle number for the `pp` ensemble.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    n: usize,
    /// Also write the `n, r, exact, mc_mean, mc_stderr, samples, seed` table
    /// for mode counts `1..=n` to this CSV file.
    #[arg(long)]
    emit_plot_data: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum MagicMode {
    /// Exact ensemble average.
    Exact(EnsembleArgs),
    /// Monte Carlo estimate next to the exact average.
    Mc {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
}

/// Echo of the resolved configuration, written into the provenance header.
#[derive(Serialize, Default, Debug)]
struct RunConfig {
    subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ensemble: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    include_basis: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plot_data: Option<String>,
    max_qubits: usize,
    max_operator_dim: u64,
    format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
}

fn parse_ensemble(args: &EnsembleArgs) -> Result<Ensemble, CliError> {
    let name = match (args.ensemble.as_str(), args.r) {
        ("pp", Some(r)) => format!("pp:{r}"),
        ("pp", None) => return Err(CliError::Usage("the pp ensemble needs --r".into())),
        (other, Some(_)) if !other.starts_with("pp:") => {
            return Err(CliError::Usage(format!("--r does not apply to the {other} ensemble")))
        }
        (other, _) => other.to_string(),
    };
    Ok(name.parse()?)
}

fn require_qubits(qubits: usize, cap: usize) -> Result<(), CliError> {
    if qubits > cap {
        return Err(CliError::Resource(format!("{qubits} qubits exceeds the cap of {cap}")));
    }
    Ok(())
}

fn require_operator_dim(qubits: usize, cap: u64) -> Result<(), CliError> {
    if 2 * qubits >= 64 || (1u64 << (2 * qubits)) > cap {
        return Err(CliError::Resource(format!(
            "operator space of {qubits} qubits exceeds the cap of {cap} dimensions"
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    if let Some(cap) = g.max_qubits {
        // The library reads its cap from the environment; keep the two in step.
        std::env::set_var(MAX_QUBITS_ENV, cap.to_string());
    }
    let cap = max_qubits();
    let mut config = RunConfig {
        max_qubits: cap,
        max_operator_dim: g.max_operator_dim,
        format: g.format,
        output: g.output.as_ref().map(|p| p.display().to_string()),
        ..Default::default()
    };
    let shape = |config: &mut RunConfig, name: &str, a: &GroupArgs| {
        config.subcommand = name.into();
        config.group = Some(a.group.to_string());
        config.t = Some(a.t);
        config.n = Some(a.n);
    };

    let (outcome, seed) = match &cli.command {
        Command::Dims(d) => {
            let a = &d.shape;
            shape(&mut config, "dims", a);
            config.oracle = Some(d.oracle);
            let oracle_cap = d.oracle.then(|| g.max_qubits.unwrap_or(ORACLE_MAX_QUBITS));
            (commands::dims(a.group, a.t, a.n, oracle_cap), None)
        }
        Command::Verify(v) => {
            shape(&mut config, "verify", &v.shape);
            config.samples = Some(v.samples);
            config.seed = Some(v.seed);
            config.include_basis = Some(v.include_basis);
            require_qubits(v.shape.n * v.shape.t, cap)?;
            let out = commands::verify(v.shape.group, v.shape.t, v.shape.n, v.samples, v.seed, v.include_basis);
            (out, Some(v.seed))
        }
        Command::Basis(a) => {
            shape(&mut config, "basis", a);
            require_qubits(a.n * a.t, cap)?;
            require_operator_dim(a.n * a.t, g.max_operator_dim)?;
            (commands::basis(a.group, a.t, a.n), None)
        }
        Command::Invariants(a) => {
            config.subcommand = "invariants".into();
            config.n = Some(a.n);
            config.k = Some(a.k);
            config.state = Some(a.state.clone());
            let spec: StateSpec = a.state.parse()?;
            config.seed = spec.seed();
            require_qubits(2 * a.n, cap)?;
            (commands::invariants(a.n, &spec, a.k), spec.seed())
        }
        Command::Magic { mode } => {
            let (args, mc) = match mode {
                MagicMode::Exact(a) => (a, None),
                MagicMode::Mc { ensemble, samples, seed } => {
                    (ensemble, Some(McRequest { samples: *samples, seed: *seed }))
                }
            };
            let ensemble = parse_ensemble(args)?;
            config.subcommand = if mc.is_some() { "magic mc" } else { "magic exact" }.into();
            config.ensemble = Some(ensemble.to_string());
            config.n = Some(args.n);
            config.r = args.r;
            config.plot_data = args.emit_plot_data.as_ref().map(|p| p.display().to_string());
            config.samples = mc.as_ref().map(|m| m.samples);
            config.seed = mc.as_ref().map(|m| m.seed);
            if mc.is_some() {
                require_qubits(args.n, cap)?;
            }
            let seed = config.seed;
            (commands::magic(args.n, ensemble, mc, args.emit_plot_data.as_ref()), seed)
        }
        Command::Oracle(a) => {
            shape(&mut config, "oracle", a);
            (commands::oracle(a.group, a.t, a.n, g.max_qubits), None)
        }
    };
    let outcome = outcome?;
    let doc = envelope(&config, seed, outcome.result.clone());
    let bytes = render(&doc, g.format)?;
    match &g.output {
        Some(path) => write_atomic(path, &bytes)?,
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome { failure: None, .. }) => ExitCode::SUCCESS,
        Ok(Outcome { failure: Some(msg), .. }) => {
            let e = CliError::Verification(msg);
            eprintln!("fermicomm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("fermicomm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
