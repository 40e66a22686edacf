//! Experiment configuration: one JSON document with a section per subcommand.
//!
//! Every field has a default, so `{}` is a valid config. Unknown fields are
//! rejected, and parse errors carry serde_json's line and column.

use std::path::{Path, PathBuf};

use bargmann::algebra::{GroupElementK, KcLevels, C64};
use bargmann::diffop::LeftInvariantOperator;
use bargmann::euclid::HermiteExpansion;
use bargmann::montecarlo::{McSettings, MIN_BLOCKS};
use bargmann::repr::BandLimited;
use bargmann::Spin;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

fn one() -> [f64; 2] {
    [1.0, 0.0]
}

fn c(z: [f64; 2]) -> C64 {
    C64::new(z[0], z[1])
}

/// One named basis element of `L²(K)` with a complex coefficient `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisTerm {
    Constant {
        #[serde(default = "one")]
        coef: [f64; 2],
    },
    Character {
        spin: f64,
        #[serde(default = "one")]
        coef: [f64; 2],
    },
    /// The matrix entry `D^j_{row,col}`.
    Entry {
        spin: f64,
        row: usize,
        col: usize,
        #[serde(default = "one")]
        coef: [f64; 2],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub name: String,
    pub terms: Vec<BasisTerm>,
}

impl FunctionSpec {
    fn new(name: &str, terms: Vec<BasisTerm>) -> Self {
        FunctionSpec {
            name: name.into(),
            terms,
        }
    }

    pub fn build(&self) -> bargmann::Result<BandLimited> {
        let mut f = BandLimited::zero();
        for term in &self.terms {
            let piece = match *term {
                BasisTerm::Constant { coef } => BandLimited::constant(c(coef)),
                BasisTerm::Character { spin, coef } => BandLimited::character(spin_of(spin)?)?.scale(c(coef)),
                BasisTerm::Entry { spin, row, col, coef } => {
                    BandLimited::entry(spin_of(spin)?, row, col)?.scale(c(coef))
                }
            };
            f = &f + &piece;
        }
        Ok(f)
    }
}

fn spin_of(j: f64) -> bargmann::Result<Spin> {
    Spin::from_f64(j).ok_or_else(|| bargmann::Error::ParameterDomain(format!("{j} is not a spin")))
}

/// `Σ coef · X_{w₁}⋯X_{w_k}` with indices 0, 1, 2 for `X₁, X₂, X₃`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordTerm {
    pub word: Vec<usize>,
    #[serde(default = "one")]
    pub coef: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub name: String,
    pub terms: Vec<WordTerm>,
}

impl OperatorSpec {
    pub fn build(&self) -> LeftInvariantOperator {
        LeftInvariantOperator::from_terms(self.terms.iter().map(|t| (c(t.coef), t.word.clone())).collect())
    }

    fn x3() -> Self {
        OperatorSpec {
            name: "X3".into(),
            terms: vec![WordTerm {
                word: vec![2],
                coef: one(),
            }],
        }
    }

    fn laplacian() -> Self {
        OperatorSpec {
            name: "Laplacian".into(),
            terms: (0..3)
                .map(|k| WordTerm {
                    word: vec![k, k],
                    coef: one(),
                })
                .collect(),
        }
    }
}

/// Overrides for the `K_ℂ` product rule; `null` picks levels from the spins involved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelsSpec {
    pub k_spin: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    pub n_radial: usize,
}

impl LevelsSpec {
    pub fn resolve(spec: Option<LevelsSpec>, fallback: Spin) -> bargmann::Result<KcLevels> {
        match spec {
            None => Ok(KcLevels::for_spin(fallback)),
            Some(l) => Ok(KcLevels {
                k_spin: spin_of(l.k_spin)?,
                n_theta: l.n_theta,
                n_phi: l.n_phi,
                n_radial: l.n_radial,
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub master_seed: u64,
    /// Number of Monte Carlo blocks (at least 30).
    pub n_blocks: usize,
    pub out: PathBuf,
    pub calibrate: CalibrateConfig,
    pub heat_check: HeatConfig,
    pub transform_check: TransformConfig,
    pub sde_check: SdeConfig,
    pub toeplitz_mult: ToeplitzMultConfig,
    pub toeplitz_diff: ToeplitzDiffConfig,
    pub euclid_baseline: EuclidConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            master_seed: 0,
            n_blocks: bargmann::montecarlo::DEFAULT_BLOCKS,
            out: PathBuf::from("out"),
            calibrate: Default::default(),
            heat_check: Default::default(),
            transform_check: Default::default(),
            sde_check: Default::default(),
            toeplitz_mult: Default::default(),
            toeplitz_diff: Default::default(),
            euclid_baseline: Default::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrateConfig {
    pub times: Vec<f64>,
    pub tolerance: f64,
}

impl Default for CalibrateConfig {
    fn default() -> Self {
        CalibrateConfig {
            times: vec![0.2, 0.5, 1.0],
            tolerance: 1e-5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatConfig {
    /// `(t, s)` pairs for `ρ_t ⋆ ρ_s = ρ_{t+s}`.
    pub pairs: Vec<[f64; 2]>,
    /// Points per Euler angle; the grid has this many cubed.
    pub grid_points: usize,
    pub tolerance: f64,
}

impl Default for HeatConfig {
    fn default() -> Self {
        HeatConfig {
            pairs: vec![[0.2, 0.2], [0.2, 0.5], [0.5, 0.2], [0.5, 0.5]],
            grid_points: 10,
            tolerance: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransformConfig {
    pub times: Vec<f64>,
    pub max_spin: f64,
    pub tolerance: f64,
    /// `null` uses the recommended cutoff for the largest spin.
    pub radial_cutoff: Option<f64>,
    pub quadrature: Option<LevelsSpec>,
    pub adjoint: AdjointConfig,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig {
            times: vec![0.2, 0.5, 1.0],
            max_spin: 1.5,
            tolerance: 1e-5,
            radial_cutoff: None,
            quadrature: None,
            adjoint: Default::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdjointConfig {
    pub t: f64,
    pub function: FunctionSpec,
    /// Euler angles `(α, β, γ)` of the evaluation points.
    pub points: Vec<[f64; 3]>,
    pub tolerance: f64,
    /// Stop growing the cutoff once values move by less than this.
    pub settle: f64,
}

impl Default for AdjointConfig {
    fn default() -> Self {
        AdjointConfig {
            t: 0.5,
            function: FunctionSpec::new(
                "D½01 + (0.4-0.2i)χ1 + 0.3",
                vec![
                    BasisTerm::Entry {
                        spin: 0.5,
                        row: 0,
                        col: 1,
                        coef: one(),
                    },
                    BasisTerm::Character {
                        spin: 1.0,
                        coef: [0.4, -0.2],
                    },
                    BasisTerm::Constant { coef: [0.3, 0.0] },
                ],
            ),
            points: vec![[0.0, 0.0, 0.0], [0.7, 1.2, -0.4], [2.5, 2.9, 1.0]],
            tolerance: 1e-4,
            settle: 1e-6,
        }
    }
}

impl AdjointConfig {
    pub fn elements(&self) -> Vec<GroupElementK> {
        self.points
            .iter()
            .map(|p| GroupElementK::from_euler(p[0], p[1], p[2]))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SdeConfig {
    /// Time of the `K`-valued Brownian motion for the real moments.
    pub s: f64,
    pub spins: Vec<f64>,
    /// `(s, t)` pairs for the `K_ℂ`-valued process.
    pub complex_pairs: Vec<[f64; 2]>,
    pub n_paths: usize,
    pub n_steps: usize,
    pub z_max: f64,
    pub pathwise: PathwiseConfig,
    pub radial_ks: RadialKsConfig,
}

impl Default for SdeConfig {
    fn default() -> Self {
        SdeConfig {
            s: 1.0,
            spins: vec![0.5, 1.0],
            complex_pairs: vec![[1.0, 0.5], [0.25, 0.5]],
            n_paths: 100_000,
            n_steps: 400,
            z_max: 3.0,
            pathwise: Default::default(),
            radial_ks: Default::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathwiseConfig {
    pub a_variance: f64,
    pub b_variance: f64,
    pub draws: usize,
    pub steps: Vec<usize>,
    /// Least acceptable log-log slope for Brownian driving paths.
    pub min_order: f64,
    /// Least acceptable slope for straight-line driving paths.
    pub smooth_min_order: f64,
    pub smooth_a: [f64; 3],
    pub smooth_b: [f64; 3],
}

impl Default for PathwiseConfig {
    fn default() -> Self {
        PathwiseConfig {
            a_variance: 1.0,
            b_variance: 0.5,
            draws: 200,
            steps: vec![100, 200, 400, 800],
            min_order: 0.4,
            smooth_min_order: 0.95,
            smooth_a: [0.7, -0.3, 0.5],
            smooth_b: [-0.2, 0.6, 0.4],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadialKsConfig {
    pub enabled: bool,
    pub s: f64,
    pub t: f64,
    pub n_paths: usize,
    pub n_steps: usize,
}

impl Default for RadialKsConfig {
    fn default() -> Self {
        RadialKsConfig {
            enabled: true,
            s: 8.0,
            t: 0.5,
            n_paths: 100_000,
            n_steps: 400,
        }
    }
}

fn spin_half_entries() -> Vec<FunctionSpec> {
    let mut out = Vec::new();
    for row in 0..2 {
        for col in 0..2 {
            out.push(FunctionSpec::new(
                &format!("D½{row}{col}"),
                vec![BasisTerm::Entry {
                    spin: 0.5,
                    row,
                    col,
                    coef: one(),
                }],
            ));
        }
    }
    out
}

fn unit_potential() -> FunctionSpec {
    FunctionSpec::new("1", vec![BasisTerm::Constant { coef: one() }])
}

fn character_potential(spin: f64, name: &str) -> FunctionSpec {
    FunctionSpec::new(name, vec![BasisTerm::Character { spin, coef: one() }])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToeplitzMultConfig {
    pub times: Vec<f64>,
    pub potentials: Vec<FunctionSpec>,
    /// Every ordered pair `(f₁, f₂)` is one matrix entry.
    pub functions: Vec<FunctionSpec>,
    pub n_paths: usize,
    pub n_steps: usize,
    pub z_max: f64,
    /// Largest stderr allowed, as a fraction of the largest entry magnitude.
    pub stderr_fraction: f64,
}

impl Default for ToeplitzMultConfig {
    fn default() -> Self {
        ToeplitzMultConfig {
            times: vec![0.5, 1.0],
            potentials: vec![
                unit_potential(),
                character_potential(0.5, "χ½"),
                character_potential(1.0, "χ1"),
            ],
            functions: spin_half_entries(),
            n_paths: 200_000,
            n_steps: 400,
            z_max: 3.0,
            stderr_fraction: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToeplitzDiffConfig {
    pub t: f64,
    pub operators: Vec<OperatorSpec>,
    pub potentials: Vec<FunctionSpec>,
    pub functions: Vec<FunctionSpec>,
    pub n_paths: usize,
    pub n_steps: usize,
    pub z_max: f64,
    pub deterministic: DeterministicDiffConfig,
}

impl Default for ToeplitzDiffConfig {
    fn default() -> Self {
        ToeplitzDiffConfig {
            t: 0.5,
            operators: vec![OperatorSpec::x3(), OperatorSpec::laplacian()],
            potentials: vec![unit_potential(), character_potential(0.5, "χ½")],
            functions: spin_half_entries(),
            n_paths: 200_000,
            n_steps: 400,
            z_max: 3.0,
            deterministic: Default::default(),
        }
    }
}

/// The `V = 1` route: quadrature against the symbol `φ_{1,A}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeterministicDiffConfig {
    pub enabled: bool,
    pub operators: Vec<OperatorSpec>,
    /// Relative to `|c|·‖f₁‖‖f₂‖` with `c` the largest Casimir eigenvalue involved.
    pub tolerance: f64,
    pub radial_cutoff: Option<f64>,
    pub quadrature: Option<LevelsSpec>,
    /// The Laplacian symbol profile is fitted on `[0, profile_max_radius]`.
    pub profile_max_radius: f64,
    pub profile_points: usize,
    pub profile_tolerance: f64,
}

impl Default for DeterministicDiffConfig {
    fn default() -> Self {
        DeterministicDiffConfig {
            enabled: true,
            operators: vec![OperatorSpec::laplacian()],
            tolerance: 1e-3,
            radial_cutoff: None,
            quadrature: None,
            profile_max_radius: 3.0,
            profile_points: 31,
            profile_tolerance: 1e-4,
        }
    }
}

/// A Hermite expansion given by its coefficients `[re, im]`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HermiteSpec {
    pub name: String,
    pub coefficients: Vec<[f64; 2]>,
}

impl HermiteSpec {
    pub fn build(&self) -> bargmann::Result<HermiteExpansion> {
        HermiteExpansion::new(self.coefficients.iter().map(|&z| c(z)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EuclidConfig {
    pub t: f64,
    /// Polynomial `Ṽ`, lowest degree first.
    pub potentials: Vec<Vec<f64>>,
    pub functions: Vec<HermiteSpec>,
    pub n_paths: usize,
    pub tolerance: f64,
    pub z_max: f64,
}

impl Default for EuclidConfig {
    fn default() -> Self {
        EuclidConfig {
            t: 0.2,
            potentials: vec![
                vec![1.0],
                vec![0.0, 1.0],
                vec![0.5, 0.0, 1.0],
                vec![0.0, -1.0, 0.0, 0.5],
                vec![1.0, 0.0, -0.5, 0.0, 0.25],
                vec![0.0, 0.3, 0.0, 0.0, 0.0, 0.1],
                vec![0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.05],
            ],
            functions: vec![
                HermiteSpec {
                    name: "h0".into(),
                    coefficients: vec![[1.0, 0.0]],
                },
                HermiteSpec {
                    name: "h1 + 0.5i h2".into(),
                    coefficients: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 0.5]],
                },
                HermiteSpec {
                    name: "0.3 h0 - h3".into(),
                    coefficients: vec![[0.3, 0.0], [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0]],
                },
            ],
            n_paths: 100_000,
            tolerance: 1e-8,
            z_max: 3.0,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse { source, .. } => ConfigError::Parse {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let cfg: Config = serde_json::from_str(text).map_err(|source| ConfigError::Parse {
            path: PathBuf::from("<config>"),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_pretty_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn mc(&self, n_paths: usize, n_steps: usize) -> McSettings {
        McSettings {
            n_paths,
            n_steps,
            master_seed: self.master_seed,
            n_blocks: self.n_blocks,
            check_convergence: true,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_blocks < MIN_BLOCKS {
            return Err(invalid("n_blocks", format!("must be at least {MIN_BLOCKS}")));
        }
        positive_all("calibrate.times", &self.calibrate.times)?;
        positive("calibrate.tolerance", self.calibrate.tolerance)?;

        let h = &self.heat_check;
        for (i, p) in h.pairs.iter().enumerate() {
            positive_all(&format!("heat_check.pairs[{i}]"), p)?;
        }
        if h.grid_points == 0 {
            return Err(invalid("heat_check.grid_points", "must be positive"));
        }
        positive("heat_check.tolerance", h.tolerance)?;

        let tr = &self.transform_check;
        positive_all("transform_check.times", &tr.times)?;
        spin_field("transform_check.max_spin", tr.max_spin)?;
        positive("transform_check.tolerance", tr.tolerance)?;
        optional_positive("transform_check.radial_cutoff", tr.radial_cutoff)?;
        levels_field("transform_check.quadrature", tr.quadrature)?;
        positive("transform_check.adjoint.t", tr.adjoint.t)?;
        function_field("transform_check.adjoint.function", &tr.adjoint.function)?;
        positive("transform_check.adjoint.tolerance", tr.adjoint.tolerance)?;
        positive("transform_check.adjoint.settle", tr.adjoint.settle)?;

        let sde = &self.sde_check;
        positive("sde_check.s", sde.s)?;
        for (i, &j) in sde.spins.iter().enumerate() {
            spin_field(&format!("sde_check.spins[{i}]"), j)?;
        }
        for (i, p) in sde.complex_pairs.iter().enumerate() {
            let field = format!("sde_check.complex_pairs[{i}]");
            positive_all(&field, p)?;
            if p[0] < p[1] / 2.0 {
                return Err(invalid(field, "needs s ≥ t/2"));
            }
        }
        mc_field("sde_check", sde.n_paths, sde.n_steps, self.n_blocks)?;
        positive("sde_check.z_max", sde.z_max)?;
        let pw = &sde.pathwise;
        if pw.a_variance < 0.0 || pw.b_variance < 0.0 {
            return Err(invalid("sde_check.pathwise", "variances must be non-negative"));
        }
        if pw.draws == 0 {
            return Err(invalid("sde_check.pathwise.draws", "must be positive"));
        }
        if pw.steps.len() < 2 || pw.steps.contains(&0) {
            return Err(invalid(
                "sde_check.pathwise.steps",
                "needs at least two positive step counts",
            ));
        }
        let ks = &sde.radial_ks;
        positive("sde_check.radial_ks.t", ks.t)?;
        if ks.s < ks.t / 2.0 {
            return Err(invalid("sde_check.radial_ks.s", "needs s ≥ t/2"));
        }
        mc_field("sde_check.radial_ks", ks.n_paths, ks.n_steps, self.n_blocks)?;

        let m = &self.toeplitz_mult;
        positive_all("toeplitz_mult.times", &m.times)?;
        functions_field("toeplitz_mult.potentials", &m.potentials)?;
        functions_field("toeplitz_mult.functions", &m.functions)?;
        mc_field("toeplitz_mult", m.n_paths, m.n_steps, self.n_blocks)?;
        positive("toeplitz_mult.z_max", m.z_max)?;
        positive("toeplitz_mult.stderr_fraction", m.stderr_fraction)?;

        let d = &self.toeplitz_diff;
        positive("toeplitz_diff.t", d.t)?;
        operators_field("toeplitz_diff.operators", &d.operators)?;
        functions_field("toeplitz_diff.potentials", &d.potentials)?;
        functions_field("toeplitz_diff.functions", &d.functions)?;
        mc_field("toeplitz_diff", d.n_paths, d.n_steps, self.n_blocks)?;
        positive("toeplitz_diff.z_max", d.z_max)?;
        let det = &d.deterministic;
        operators_field("toeplitz_diff.deterministic.operators", &det.operators)?;
        positive("toeplitz_diff.deterministic.tolerance", det.tolerance)?;
        optional_positive("toeplitz_diff.deterministic.radial_cutoff", det.radial_cutoff)?;
        levels_field("toeplitz_diff.deterministic.quadrature", det.quadrature)?;
        positive("toeplitz_diff.deterministic.profile_max_radius", det.profile_max_radius)?;
        if det.profile_points < 3 {
            return Err(invalid(
                "toeplitz_diff.deterministic.profile_points",
                "needs at least 3 points",
            ));
        }
        positive("toeplitz_diff.deterministic.profile_tolerance", det.profile_tolerance)?;

        let e = &self.euclid_baseline;
        if !(e.t > 0.0 && e.t < 1.0 / 3.0) {
            return Err(invalid(
                "euclid_baseline.t",
                "must lie in (0, 1/3) for a finite fourth moment",
            ));
        }
        for (i, v) in e.potentials.iter().enumerate() {
            if v.is_empty() || v.len() > bargmann::euclid::MAX_POTENTIAL_DEGREE + 1 {
                return Err(invalid(
                    format!("euclid_baseline.potentials[{i}]"),
                    format!("needs 1 to {} coefficients", bargmann::euclid::MAX_POTENTIAL_DEGREE + 1),
                ));
            }
        }
        for (i, f) in e.functions.iter().enumerate() {
            f.build()
                .map_err(|err| invalid(format!("euclid_baseline.functions[{i}]"), err.to_string()))?;
        }
        mc_field("euclid_baseline", e.n_paths, 1, self.n_blocks)?;
        positive("euclid_baseline.tolerance", e.tolerance)?;
        positive("euclid_baseline.z_max", e.z_max)?;
        Ok(())
    }
}

fn positive(field: &str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {x}")))
    }
}

fn positive_all(field: &str, xs: &[f64]) -> Result<(), ConfigError> {
    for (i, &x) in xs.iter().enumerate() {
        positive(&format!("{field}[{i}]"), x)?;
    }
    Ok(())
}

fn optional_positive(field: &str, x: Option<f64>) -> Result<(), ConfigError> {
    x.map_or(Ok(()), |x| positive(field, x))
}

fn spin_field(field: &str, j: f64) -> Result<(), ConfigError> {
    spin_of(j).map(|_| ()).map_err(|e| invalid(field, e.to_string()))
}

fn levels_field(field: &str, l: Option<LevelsSpec>) -> Result<(), ConfigError> {
    if let Some(l) = l {
        spin_field(&format!("{field}.k_spin"), l.k_spin)?;
        if l.n_theta == 0 || l.n_phi == 0 || l.n_radial == 0 {
            return Err(invalid(field, "node counts must be positive"));
        }
    }
    Ok(())
}

fn mc_field(section: &str, n_paths: usize, n_steps: usize, n_blocks: usize) -> Result<(), ConfigError> {
    if n_paths < n_blocks {
        return Err(invalid(
            format!("{section}.n_paths"),
            format!("must be at least n_blocks = {n_blocks}"),
        ));
    }
    if n_steps == 0 {
        return Err(invalid(format!("{section}.n_steps"), "must be positive"));
    }
    Ok(())
}

fn function_field(field: &str, f: &FunctionSpec) -> Result<(), ConfigError> {
    f.build().map(|_| ()).map_err(|e| invalid(field, e.to_string()))
}

fn functions_field(field: &str, fs: &[FunctionSpec]) -> Result<(), ConfigError> {
    if fs.is_empty() {
        return Err(invalid(field, "must not be empty"));
    }
    for (i, f) in fs.iter().enumerate() {
        function_field(&format!("{field}[{i}]"), f)?;
    }
    Ok(())
}

fn operators_field(field: &str, ops: &[OperatorSpec]) -> Result<(), ConfigError> {
    for (i, op) in ops.iter().enumerate() {
        for (k, term) in op.terms.iter().enumerate() {
            if term.word.len() > bargmann::diffop::MAX_FD_DEGREE {
                return Err(invalid(
                    format!("{field}[{i}].terms[{k}].word"),
                    format!("degree exceeds {}", bargmann::diffop::MAX_FD_DEGREE),
                ));
            }
            if term.word.iter().any(|&w| w > 2) {
                return Err(invalid(
                    format!("{field}[{i}].terms[{k}].word"),
                    "indices must be 0, 1 or 2",
                ));
            }
        }
    }
    Ok(())
}
