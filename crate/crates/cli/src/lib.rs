//! Batch runner for the `bargmann` checks: configuration, dispatch and reports.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::Path;

use config::Config;
use report::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Calibrate,
    HeatCheck,
    TransformCheck,
    SdeCheck,
    ToeplitzMult,
    ToeplitzDiff,
    EuclidBaseline,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Calibrate,
        Command::HeatCheck,
        Command::TransformCheck,
        Command::SdeCheck,
        Command::ToeplitzMult,
        Command::ToeplitzDiff,
        Command::EuclidBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Calibrate => "calibrate",
            Command::HeatCheck => "heat-check",
            Command::TransformCheck => "transform-check",
            Command::SdeCheck => "sde-check",
            Command::ToeplitzMult => "toeplitz-mult",
            Command::ToeplitzDiff => "toeplitz-diff",
            Command::EuclidBaseline => "euclid-baseline",
        }
    }

    /// The config section this command reads, keyed as in the JSON file.
    fn section(self, cfg: &Config) -> (&'static str, serde_json::Value) {
        let v = |x: serde_json::Result<serde_json::Value>| x.expect("config serialises");
        match self {
            Command::Calibrate => ("calibrate", v(serde_json::to_value(&cfg.calibrate))),
            Command::HeatCheck => ("heat_check", v(serde_json::to_value(&cfg.heat_check))),
            Command::TransformCheck => ("transform_check", v(serde_json::to_value(&cfg.transform_check))),
            Command::SdeCheck => ("sde_check", v(serde_json::to_value(&cfg.sde_check))),
            Command::ToeplitzMult => ("toeplitz_mult", v(serde_json::to_value(&cfg.toeplitz_mult))),
            Command::ToeplitzDiff => ("toeplitz_diff", v(serde_json::to_value(&cfg.toeplitz_diff))),
            Command::EuclidBaseline => ("euclid_baseline", v(serde_json::to_value(&cfg.euclid_baseline))),
        }
    }

    fn experiment(self) -> fn(&Config, &mut Report) -> bargmann::Result<()> {
        match self {
            Command::Calibrate => experiments::calibrate,
            Command::HeatCheck => experiments::heat_check,
            Command::TransformCheck => experiments::transform_check,
            Command::SdeCheck => experiments::sde_check,
            Command::ToeplitzMult => experiments::toeplitz_mult,
            Command::ToeplitzDiff => experiments::toeplitz_diff,
            Command::EuclidBaseline => experiments::euclid_baseline,
        }
    }
}

/// The part of `cfg` a run of `cmd` depends on; the output directory is left out.
pub fn config_echo(cmd: Command, cfg: &Config) -> serde_json::Value {
    let (key, section) = cmd.section(cfg);
    let mut m = serde_json::Map::new();
    m.insert("master_seed".into(), cfg.master_seed.into());
    m.insert("n_blocks".into(), cfg.n_blocks.into());
    m.insert(key.into(), section);
    m.into()
}

/// An empty report for `cmd`, for running experiment parts one at a time.
pub fn new_report(cmd: Command, cfg: &Config) -> Report {
    Report::new(cmd.name(), config_echo(cmd, cfg))
}

/// Runs `cmd` on the current rayon pool. Numerical errors end the run but keep
/// the gates recorded so far.
pub fn run(cmd: Command, cfg: &Config) -> Report {
    let mut report = new_report(cmd, cfg);
    if let Err(e) = (cmd.experiment())(cfg, &mut report) {
        report.fail(e.to_string());
    }
    report
}

/// [`run`] on a pool of `workers` threads (`None`: rayon's default).
pub fn run_with_workers(cmd: Command, cfg: &Config, workers: Option<usize>) -> Report {
    match workers {
        None => run(cmd, cfg),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(|| run(cmd, cfg)),
    }
}

/// Runs `cmd` and writes `report.json` and `blocks.csv` into `out`.
pub fn run_and_write(cmd: Command, cfg: &Config, workers: Option<usize>, out: &Path) -> std::io::Result<Report> {
    let report = run_with_workers(cmd, cfg, workers);
    report.write(out)?;
    Ok(report)
}
