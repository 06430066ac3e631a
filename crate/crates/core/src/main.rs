use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use toric_periods::config::RunConfig;
use toric_periods::curve::CurveConfig;
use toric_periods::report::{run, Command};

#[derive(Parser, Debug)]
#[command(name = "toric-periods", version, about = "Toric periods, orbital distributions and their cross-checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON run configuration, or a bare curve configuration. Defaults to
    /// q = 5, lambda = 3, e1 = 0, e2 = 1, degree_bound = 4.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long = "degree-bound", global = true)]
    degree_bound: Option<u32>,
    /// Seed for the randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Tower arithmetic identities on seeded random elements.
    TowerCheck,
    /// Exhaustive double-coset census of the quaternion invariant.
    CensusInvariants,
    /// Orbital distributions by both routes.
    Orbital {
        /// Effective divisor, e.g. "2*(P1)" or "(P0) + (2,3)".
        #[arg(long = "D")]
        divisor: Option<String>,
    },
    /// Bundle census, Hecke matrices, cusp eigenforms and their periods.
    Spectral,
    /// The four-torus period identity for each eigenform.
    VerifyTheoremD,
    /// Eisenstein elements against the spectral side.
    VerifyJpi,
    /// Representations of the signed permutation group.
    Reps,
    /// The optimal embedding pair and non-optimal controls.
    Optimal,
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
            RunConfig::from_json(&text).map_err(|e| e.to_string())?
        }
        None => RunConfig::new(CurveConfig::prime(5, 3, 0, 1, 4)),
    };
    if let Some(t) = cli.tolerance {
        cfg.tolerance = t;
    }
    if let Some(d) = cli.degree_bound {
        cfg.curve.degree_bound = d;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Cmd::Orbital { divisor: Some(d) } = &cli.command {
        cfg.divisor = Some(d.clone());
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cmd = match cli.command {
        Cmd::TowerCheck => Command::TowerCheck,
        Cmd::CensusInvariants => Command::CensusInvariants,
        Cmd::Orbital { .. } => Command::Orbital,
        Cmd::Spectral => Command::Spectral,
        Cmd::VerifyTheoremD => Command::VerifyTheoremD,
        Cmd::VerifyJpi => Command::VerifyJpi,
        Cmd::Reps => Command::Reps,
        Cmd::Optimal => Command::Optimal,
    };
    let report = match run(cmd, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", cmd.name());
            return ExitCode::from(2);
        }
    };
    let text = report.to_json();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for c in report.failed_checks() {
        eprintln!("FAILED {}: {}", c.name, c.detail);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
