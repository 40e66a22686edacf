use std::path::PathBuf;
use std::process::ExitCode;

use bargmann_cli::config::Config;
use bargmann_cli::{run_and_write, Command};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bargmann",
    version,
    about = "Segal–Bargmann transform and Toeplitz checks on SU(2)"
)]
struct Cli {
    /// JSON config; every field is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,
    /// Overrides `out`, the directory for report.json and blocks.csv.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the default config and exit.
    #[arg(long)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Pin β and N(t)·c_J and check the closed forms.
    Calibrate,
    /// Heat-kernel semigroup property.
    HeatCheck,
    /// Unitarity, adjoint inversion and intertwining of C_t.
    TransformCheck,
    /// Endpoint moments, pathwise identity and radial law of the SDEs.
    SdeCheck,
    /// Multiplication-operator Toeplitz entries by Monte Carlo.
    ToeplitzMult,
    /// Differential-operator Toeplitz entries, stochastic and deterministic.
    ToeplitzDiff,
    /// Flat one-dimensional baseline.
    EuclidBaseline,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Command {
        match s {
            Sub::Calibrate => Command::Calibrate,
            Sub::HeatCheck => Command::HeatCheck,
            Sub::TransformCheck => Command::TransformCheck,
            Sub::SdeCheck => Command::SdeCheck,
            Sub::ToeplitzMult => Command::ToeplitzMult,
            Sub::ToeplitzDiff => Command::ToeplitzDiff,
            Sub::EuclidBaseline => Command::EuclidBaseline,
        }
    }
}

const CONFIG_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { CONFIG_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.print_defaults {
        println!("{}", Config::default().to_pretty_json());
        return ExitCode::SUCCESS;
    }
    let Some(sub) = cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(CONFIG_ERROR);
    };
    let mut cfg = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(CONFIG_ERROR);
            }
        },
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    let cmd = Command::from(sub);
    match run_and_write(cmd, &cfg, cli.workers.map(usize::from), &cfg.out) {
        Ok(report) => {
            let failed = report.gates.iter().filter(|g| !g.passed).count();
            eprintln!(
                "{}: {} gates, {} failed{}; report in {}",
                cmd.name(),
                report.gates.len(),
                failed,
                report
                    .error
                    .as_deref()
                    .map(|e| format!(", error: {e}"))
                    .unwrap_or_default(),
                cfg.out.display()
            );
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("cannot write report to {}: {e}", cfg.out.display());
            ExitCode::from(1)
        }
    }
}
