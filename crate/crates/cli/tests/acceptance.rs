//! Acceptance gates, one line per criterion. Runs with the default config.

use std::process::{Command as Process, ExitCode};
use std::time::{Duration, Instant};

use bargmann_cli::config::Config;
use bargmann_cli::experiments as ex;
use bargmann_cli::report::{Gate, Report};
use bargmann_cli::{new_report, run, Command};

struct Outcome {
    passed: bool,
    detail: String,
}

fn gates_outcome(report: &Report, prefixes: &[&str]) -> Outcome {
    let gates: Vec<&Gate> = prefixes.iter().flat_map(|p| report.gates_with(p)).collect();
    let failed: Vec<&&Gate> = gates.iter().filter(|g| !g.passed).collect();
    let passed = report.error.is_none() && !gates.is_empty() && failed.is_empty();
    let mut detail = format!("{} gates", gates.len());
    if let Some(e) = &report.error {
        detail.push_str(&format!(", error: {e}"));
    }
    if gates.is_empty() {
        detail.push_str(", none recorded");
    }
    if let Some(worst) = gates.iter().max_by(|a, b| margin(a).total_cmp(&margin(b))) {
        detail.push_str(&format!(
            ", tightest {} = {:.3e} (limit {:.3e})",
            worst.id, worst.measured, worst.limit
        ));
    }
    for g in failed.iter().take(3) {
        detail.push_str(&format!("; FAILED {} = {:.3e} vs {:.3e}", g.id, g.measured, g.limit));
    }
    Outcome { passed, detail }
}

/// How close a gate is to its limit; 1 is on the limit.
fn margin(g: &Gate) -> f64 {
    use bargmann_cli::report::Relation;
    match g.relation {
        Relation::AtMost => g.measured / g.limit,
        Relation::AtLeast => g.limit / g.measured,
    }
}

fn part(cmd: Command, cfg: &Config, f: fn(&Config, &mut Report) -> bargmann::Result<()>) -> Report {
    let mut r = new_report(cmd, cfg);
    if let Err(e) = f(cfg, &mut r) {
        r.fail(e.to_string());
    }
    r
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

struct Line {
    n: u32,
    name: &'static str,
    budget: Option<Duration>,
}

fn report_line(line: Line, outcome: Outcome, elapsed: Option<Duration>) -> bool {
    let within = match (line.budget, elapsed) {
        (Some(b), Some(e)) => e <= b,
        _ => true,
    };
    let ok = outcome.passed && within;
    let timing = match (elapsed, line.budget) {
        (Some(e), Some(b)) => format!("{:.1} s of {} s", e.as_secs_f64(), b.as_secs()),
        (Some(e), None) => format!("{:.1} s", e.as_secs_f64()),
        _ => "reuses the criterion 6 run".into(),
    };
    println!(
        "criterion {:>2} {:<40} {}  [{}; {}]",
        line.n,
        line.name,
        if ok { "PASS" } else { "FAIL" },
        timing,
        outcome.detail
    );
    ok
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let cfg_path = dir.path().join("small.json");
    std::fs::write(
        &cfg_path,
        r#"{
  "n_blocks": 32,
  "sde_check": {"n_paths": 3000, "n_steps": 40, "pathwise": {"draws": 16, "steps": [20, 40]},
                "radial_ks": {"n_paths": 3000, "n_steps": 40}},
  "toeplitz_mult": {"n_paths": 3000, "n_steps": 40, "times": [0.5]},
  "toeplitz_diff": {"n_paths": 3000, "n_steps": 40, "deterministic": {"enabled": false}},
  "euclid_baseline": {"n_paths": 3000}
}"#,
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_bargmann");
    let mut compared = 0;
    for sub in ["sde-check", "toeplitz-mult", "toeplitz-diff", "euclid-baseline"] {
        let mut outputs = Vec::new();
        for workers in ["1", "3"] {
            let out = dir.path().join(format!("{sub}-{workers}"));
            let status = Process::new(bin)
                .args([sub, "--seed", "7", "--workers", workers, "--config"])
                .arg(&cfg_path)
                .arg("--out")
                .arg(&out)
                .stderr(std::process::Stdio::null())
                .status()
                .expect("run binary");
            if status.code() == Some(2) || status.code().is_none() {
                return Outcome {
                    passed: false,
                    detail: format!("{sub} exited with {status}"),
                };
            }
            outputs.push((
                std::fs::read(out.join("report.json")).unwrap(),
                std::fs::read(out.join("blocks.csv")).unwrap(),
            ));
        }
        if outputs[0] != outputs[1] {
            return Outcome {
                passed: false,
                detail: format!("{sub}: outputs differ between 1 and 3 workers"),
            };
        }
        compared += 1;
    }
    Outcome {
        passed: true,
        detail: format!("{compared} subcommands byte-identical at 1 and 3 workers"),
    }
}

fn main() -> ExitCode {
    let cfg = Config::default();
    let mut all = true;

    let (r, e) = timed(|| run(Command::Calibrate, &cfg));
    all &= report_line(
        Line {
            n: 1,
            name: "calibration consistency",
            budget: secs(60),
        },
        gates_outcome(&r, &["calibrate/"]),
        Some(e),
    );

    let (r, e) = timed(|| run(Command::HeatCheck, &cfg));
    all &= report_line(
        Line {
            n: 2,
            name: "heat semigroup",
            budget: secs(30),
        },
        gates_outcome(&r, &["semigroup/"]),
        Some(e),
    );

    let (r, e) = timed(|| part(Command::SdeCheck, &cfg, ex::sde_real_moments));
    all &= report_line(
        Line {
            n: 3,
            name: "real endpoint moments",
            budget: secs(120),
        },
        gates_outcome(&r, &["real-moment/"]),
        Some(e),
    );

    let (r, e) = timed(|| part(Command::SdeCheck, &cfg, ex::sde_complex_moments));
    all &= report_line(
        Line {
            n: 4,
            name: "complex endpoint moments",
            budget: secs(180),
        },
        gates_outcome(&r, &["complex-moment/"]),
        Some(e),
    );

    let (r, e) = timed(|| part(Command::SdeCheck, &cfg, ex::sde_pathwise));
    all &= report_line(
        Line {
            n: 5,
            name: "pathwise identity",
            budget: secs(180),
        },
        gates_outcome(&r, &["pathwise/"]),
        Some(e),
    );

    let (mult, e) = timed(|| run(Command::ToeplitzMult, &cfg));
    all &= report_line(
        Line {
            n: 6,
            name: "multiplication Toeplitz entries",
            budget: secs(600),
        },
        gates_outcome(&mult, &["entry/", "stderr/"]),
        Some(e),
    );

    let (r, e) = timed(|| part(Command::ToeplitzDiff, &cfg, ex::toeplitz_diff_stochastic));
    all &= report_line(
        Line {
            n: 7,
            name: "differential operator, stochastic",
            budget: secs(600),
        },
        gates_outcome(&r, &["entry/"]),
        Some(e),
    );

    let (r, e) = timed(|| part(Command::ToeplitzDiff, &cfg, ex::toeplitz_diff_deterministic));
    all &= report_line(
        Line {
            n: 8,
            name: "differential operator, V = 1 quadrature",
            budget: secs(120),
        },
        gates_outcome(&r, &["symbol/", "profile/"]),
        Some(e),
    );

    all &= report_line(
        Line {
            n: 9,
            name: "boundedness",
            budget: None,
        },
        gates_outcome(&mult, &["bounded/"]),
        None,
    );

    let (r, e) = timed(|| run(Command::EuclidBaseline, &cfg));
    all &= report_line(
        Line {
            n: 10,
            name: "flat baseline",
            budget: secs(60),
        },
        gates_outcome(&r, &["deterministic/", "mc/"]),
        Some(e),
    );

    let (o, e) = timed(reproducibility);
    all &= report_line(
        Line {
            n: 11,
            name: "reproducibility across worker counts",
            budget: None,
        },
        o,
        Some(e),
    );

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
