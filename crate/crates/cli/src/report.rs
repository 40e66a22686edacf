//! `report.json` and `blocks.csv`.
//!
//! Reports hold no timings or worker counts, so identical inputs give
//! byte-identical files.

use std::path::Path;

use bargmann::algebra::C64;
use serde::Serialize;

use crate::config::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One pass/fail check: `measured relation limit`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gate {
    pub id: String,
    /// The identity or property being tested.
    pub identity: String,
    pub measured: f64,
    pub relation: Relation,
    pub limit: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Estimate {
    pub id: String,
    pub identity: String,
    pub value: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    /// `|value - target| / stderr`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
}

pub fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// `|value - target| / stderr`, with agreement to round-off counted as zero.
pub fn z_score(value: C64, target: C64, stderr: f64) -> f64 {
    let diff = (value - target).norm();
    if diff <= 1e-12 * (1.0 + target.norm()) {
        0.0
    } else if stderr > 0.0 {
        diff / stderr
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub subcommand: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// The settings this run used, without the output directory.
    pub config: serde_json::Value,
    pub gates: Vec<Gate>,
    pub estimates: Vec<Estimate>,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub records: serde_json::Map<String, serde_json::Value>,
    #[serde(skip)]
    pub blocks: Vec<(String, Vec<C64>)>,
}

impl Report {
    pub fn new(subcommand: &str, config: serde_json::Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            subcommand: subcommand.into(),
            passed: true,
            error: None,
            config,
            gates: Vec::new(),
            estimates: Vec::new(),
            records: serde_json::Map::new(),
            blocks: Vec::new(),
        }
    }

    pub fn gate(
        &mut self,
        id: impl Into<String>,
        identity: impl Into<String>,
        measured: f64,
        relation: Relation,
        limit: f64,
    ) -> bool {
        let passed = match relation {
            Relation::AtMost => measured <= limit,
            Relation::AtLeast => measured >= limit,
        };
        self.passed &= passed;
        self.gates.push(Gate {
            id: id.into(),
            identity: identity.into(),
            measured,
            relation,
            limit,
            passed,
        });
        passed
    }

    pub fn at_most(&mut self, id: impl Into<String>, identity: impl Into<String>, measured: f64, limit: f64) -> bool {
        self.gate(id, identity, measured, Relation::AtMost, limit)
    }

    pub fn at_least(&mut self, id: impl Into<String>, identity: impl Into<String>, measured: f64, limit: f64) -> bool {
        self.gate(id, identity, measured, Relation::AtLeast, limit)
    }

    pub fn fail(&mut self, message: String) {
        self.passed = false;
        self.error = Some(message);
    }

    /// Gates whose id starts with `prefix`.
    pub fn gates_with(&self, prefix: &str) -> Vec<&Gate> {
        self.gates.iter().filter(|g| g.id.starts_with(prefix)).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn write_blocks_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["estimate", "block", "mean_re", "mean_im"])?;
        for (id, means) in &self.blocks {
            for (b, m) in means.iter().enumerate() {
                out.write_record([id.clone(), b.to_string(), m.re.to_string(), m.im.to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Writes `report.json` and `blocks.csv` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        let file = std::fs::File::create(dir.join("blocks.csv"))?;
        self.write_blocks_csv(std::io::BufWriter::new(file))
            .map_err(std::io::Error::other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gates_fold_into_passed() {
        let mut r = Report::new("x", serde_json::json!({}));
        assert!(r.at_most("a", "a ≤ 1", 0.5, 1.0));
        assert!(r.passed);
        assert!(!r.at_least("b", "b ≥ 1", 0.5, 1.0));
        assert!(!r.passed);
        assert_eq!(r.gates_with("a").len(), 1);
        let json = r.to_json();
        assert!(json.contains("\"relation\": \">=\""));
        assert!(!json.contains("records") && !json.contains("error"));
    }

    #[test]
    fn blocks_csv_layout() {
        let mut r = Report::new("x", serde_json::json!({}));
        r.blocks
            .push(("e".into(), vec![C64::new(1.5, -2.0), C64::new(0.0, 0.25)]));
        let mut buf = Vec::new();
        r.write_blocks_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "estimate,block,mean_re,mean_im\ne,0,1.5,-2\ne,1,0,0.25\n"
        );
    }

    #[test]
    fn z_scores() {
        let one = C64::new(1.0, 0.0);
        assert_eq!(z_score(one, one, 0.0), 0.0);
        assert_eq!(z_score(C64::new(1.3, 0.0), one, 0.1), 3.0000000000000004);
        assert!(z_score(C64::new(2.0, 0.0), one, 0.0).is_infinite());
    }
}
