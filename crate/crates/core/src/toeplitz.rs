//! Toeplitz matrix elements `⟨F₁, T_φ F₂⟩` against exact Schrödinger-side values.
//!
//! With `F_i = C_t f_i`, the multiplication identity `C_t M_V C_t⁻¹ = T_{φ_V}`,
//! `V = e^{tΔ/4} Ṽ`, is checked through the weak form
//! `⟨F₁, T_{φ_V} F₂⟩ = ∫_K Ṽ(x) E_w[conj F₁(wx) F₂(wx)] dx`, where `w` is the
//! endpoint of the complex Itô map driven by `iB` with `Var B = t/2`. For fixed
//! `w` the inner integral is exact: `x ↦ F(wx)` is band-limited with coefficients
//! `D(w)^T C`, so it reduces to a precomputed sesquilinear form.

use rayon::prelude::*;

use crate::algebra::{
    haar_quadrature_k, kc_quadrature, GroupElementK, GroupElementKC, KcLevels, KcNode, QuadratureRuleKC, C64,
};
use crate::diffop::{complexify_apply, symbol_phi1, LeftInvariantOperator};
use crate::error::{Error, Result};
use crate::heat::{heat_flow, FlowDirection, HeatKernelKC};
pub use crate::montecarlo::McSettings;
use crate::montecarlo::{run_blocked, BlockedSums};
use crate::repr::{inner_product_k, left_derivative, wigner_matrix, BandLimited, CMatrix};
use crate::sde::sample_endpoint_kc;
use crate::spin::Spin;
use crate::transform::transform_c;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    MonteCarlo,
    Quadrature,
}

/// A Toeplitz matrix element with its uncertainty.
#[derive(Clone, Debug, PartialEq)]
pub struct ToeplitzEstimate {
    pub value: C64,
    pub stderr: f64,
    pub n_paths: usize,
    pub n_steps: usize,
    pub master_seed: u64,
    pub method: Method,
    /// Per-block means (Monte Carlo only).
    pub block_means: Vec<C64>,
    /// For quadrature: change of the value when the cutoff grows by one.
    pub cutoff_stability: Option<f64>,
}

/// One matrix element `⟨f₁, V·A f₂⟩` to estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct ToeplitzCase {
    pub v_tilde: BandLimited,
    pub op: LeftInvariantOperator,
    pub f1: BandLimited,
    pub f2: BandLimited,
}

impl ToeplitzCase {
    pub fn mult(v_tilde: BandLimited, f1: BandLimited, f2: BandLimited) -> Self {
        ToeplitzCase {
            v_tilde,
            op: LeftInvariantOperator::identity(),
            f1,
            f2,
        }
    }
}

/// `⟨f₁, M_V A f₂⟩_{L²(K)}` exactly.
pub fn schrodinger_entry(
    v: &BandLimited,
    op: &LeftInvariantOperator,
    f1: &BandLimited,
    f2: &BandLimited,
) -> Result<C64> {
    Ok(inner_product_k(f1, &v.product(&left_derivative(op, f2))?))
}

/// The Schrödinger-side target `⟨f₁, e^{tΔ/4}Ṽ · A f₂⟩`.
pub fn schrodinger_target(t: f64, case: &ToeplitzCase) -> Result<C64> {
    schrodinger_target_s(t / 2.0, case)
}

/// Flattened coefficient vector over `(spin, k, k')`.
#[derive(Clone, Debug)]
struct Layout {
    spins: Vec<Spin>,
}

impl Layout {
    fn of(f: &BandLimited) -> Self {
        Layout {
            spins: f.blocks().map(|(j, _)| j).collect(),
        }
    }

    fn basis(&self) -> Vec<BandLimited> {
        let mut out = Vec::new();
        for &j in &self.spins {
            for k in 0..j.dim() {
                for kp in 0..j.dim() {
                    out.push(BandLimited::entry(j, k, kp).expect("spin already validated"));
                }
            }
        }
        out
    }

    /// Coefficients of `x ↦ F(wx)` flattened in basis order.
    fn translated(&self, f: &BandLimited, dw: &[CMatrix]) -> Vec<C64> {
        let mut out = Vec::new();
        for (&j, d) in self.spins.iter().zip(dw) {
            let c = d.transpose() * f.block(j).expect("layout built from f");
            for k in 0..j.dim() {
                for kp in 0..j.dim() {
                    out.push(c[(k, kp)]);
                }
            }
        }
        out
    }
}

/// Precomputed pieces of one case.
struct Prepared {
    big_f1: BandLimited,
    big_f2: BandLimited,
    l1: Layout,
    l2: Layout,
    /// `q[a][b] = ⟨φ_a, Ṽ φ_b⟩`.
    q: Vec<Vec<C64>>,
}

fn prepare(t: f64, case: &ToeplitzCase) -> Result<Prepared> {
    let big_f1 = transform_c(t, &case.f1)?.0;
    let big_f2 = complexify_apply(&case.op, &transform_c(t, &case.f2)?).0;
    let l1 = Layout::of(&big_f1);
    let l2 = Layout::of(&big_f2);
    let b1 = l1.basis();
    let b2 = l2.basis();
    let mut q = Vec::with_capacity(b1.len());
    for a in &b1 {
        let mut row = Vec::with_capacity(b2.len());
        for b in &b2 {
            row.push(inner_product_k(a, &case.v_tilde.product(b)?));
        }
        q.push(row);
    }
    Ok(Prepared {
        big_f1,
        big_f2,
        l1,
        l2,
        q,
    })
}

impl Prepared {
    fn spins(&self) -> impl Iterator<Item = Spin> + '_ {
        self.l1.spins.iter().chain(&self.l2.spins).copied()
    }

    fn observe(&self, d: &std::collections::BTreeMap<Spin, CMatrix>) -> C64 {
        let dw1: Vec<CMatrix> = self.l1.spins.iter().map(|j| d[j].clone()).collect();
        let dw2: Vec<CMatrix> = self.l2.spins.iter().map(|j| d[j].clone()).collect();
        let g1 = self.l1.translated(&self.big_f1, &dw1);
        let g2 = self.l2.translated(&self.big_f2, &dw2);
        let mut acc = C64::new(0.0, 0.0);
        for (a, row) in g1.iter().zip(&self.q) {
            let mut inner = C64::new(0.0, 0.0);
            for (b, qab) in g2.iter().zip(row) {
                inner += qab * b;
            }
            acc += a.conj() * inner;
        }
        acc
    }
}

/// Endpoint `θ_ℂ(iB)_1` of path `index`, `Var B = t/2`.
pub fn subelliptic_endpoint(t: f64, n_steps: usize, master_seed: u64, index: u64) -> GroupElementKC {
    sample_endpoint_kc(0.0, t / 2.0, n_steps, master_seed, index)
}

/// Endpoint `θ_ℂ(A + iB)_1` with `Var A = s - t/2`, `Var B = t/2`, distributed as `μ_{s,t}`.
///
/// At `s = t/2` this is [`subelliptic_endpoint`] with the same seeds.
pub fn mixed_endpoint(s: f64, t: f64, n_steps: usize, master_seed: u64, index: u64) -> GroupElementKC {
    sample_endpoint_kc(s - t / 2.0, t / 2.0, n_steps, master_seed, index)
}

/// Estimates every case from one shared set of subelliptic endpoints.
pub fn toeplitz_entries_mc(t: f64, cases: &[ToeplitzCase], settings: &McSettings) -> Result<Vec<ToeplitzEstimate>> {
    entries_mc(t / 2.0, t, cases, settings)
}

/// The `s > t/2` relative of [`toeplitz_entries_mc`]: endpoints follow `μ_{s,t}`
/// and the estimates target [`schrodinger_target_s`].
///
/// As `s` decreases to `t/2` these approach the subelliptic values.
pub fn toeplitz_entries_mc_s(
    s: f64,
    t: f64,
    cases: &[ToeplitzCase],
    settings: &McSettings,
) -> Result<Vec<ToeplitzEstimate>> {
    if !(s >= t / 2.0) {
        return Err(Error::ParameterDomain(format!("need s >= t/2, got s = {s}, t = {t}")));
    }
    entries_mc(s, t, cases, settings)
}

/// `⟨f₁, e^{sΔ/2}Ṽ · A f₂⟩`.
pub fn schrodinger_target_s(s: f64, case: &ToeplitzCase) -> Result<C64> {
    let v = heat_flow(s, &case.v_tilde, FlowDirection::Forward)?;
    schrodinger_entry(&v, &case.op, &case.f1, &case.f2)
}

fn entries_mc(s: f64, t: f64, cases: &[ToeplitzCase], settings: &McSettings) -> Result<Vec<ToeplitzEstimate>> {
    if !(t > 0.0) {
        return Err(Error::ParameterDomain(format!("t must be positive, got {t}")));
    }
    for c in cases {
        if c.op.degree() > crate::diffop::MAX_FD_DEGREE {
            return Err(Error::DegreeTooLarge(c.op.degree()));
        }
    }
    let prepared = cases.iter().map(|c| prepare(t, c)).collect::<Result<Vec<_>>>()?;
    let mut spins: Vec<Spin> = prepared.iter().flat_map(|p| p.spins()).collect();
    spins.sort();
    spins.dedup();
    let sums = run_blocked(settings.n_paths, settings.n_blocks, cases.len(), |i| {
        let w = mixed_endpoint(s, t, settings.n_steps, settings.master_seed, i);
        let d: std::collections::BTreeMap<Spin, CMatrix> =
            spins.iter().map(|&j| (j, wigner_matrix(j, w.matrix()))).collect();
        prepared.iter().map(|p| p.observe(&d)).collect()
    })?;
    if settings.check_convergence {
        let all: Vec<usize> = (0..cases.len()).collect();
        sums.check_convergence(&all)?;
    }
    Ok(collect_estimates(&sums, settings))
}

fn collect_estimates(sums: &BlockedSums, settings: &McSettings) -> Vec<ToeplitzEstimate> {
    (0..sums.n_obs())
        .map(|i| {
            let e = sums.estimate(i);
            ToeplitzEstimate {
                value: e.mean,
                stderr: e.stderr,
                n_paths: settings.n_paths,
                n_steps: settings.n_steps,
                master_seed: settings.master_seed,
                method: Method::MonteCarlo,
                block_means: sums.block_means(i),
                cutoff_stability: None,
            }
        })
        .collect()
}

/// `⟨F₁, T_{φ_V} F₂⟩` for `V = e^{tΔ/4}Ṽ` by the weak Monte Carlo estimator.
pub fn toeplitz_entry_mult_mc(
    t: f64,
    v_tilde: &BandLimited,
    f1: &BandLimited,
    f2: &BandLimited,
    settings: &McSettings,
) -> Result<ToeplitzEstimate> {
    let case = ToeplitzCase::mult(v_tilde.clone(), f1.clone(), f2.clone());
    Ok(toeplitz_entries_mc(t, &[case], settings)?.remove(0))
}

/// `⟨F₁, T_{φ_{V,A}} F₂⟩`: the same estimator with `F₂` replaced by `A_ℂ F₂`.
pub fn toeplitz_entry_diff_mc(
    t: f64,
    v_tilde: &BandLimited,
    op: &LeftInvariantOperator,
    f1: &BandLimited,
    f2: &BandLimited,
    settings: &McSettings,
) -> Result<ToeplitzEstimate> {
    let case = ToeplitzCase {
        v_tilde: v_tilde.clone(),
        op: op.clone(),
        f1: f1.clone(),
        f2: f2.clone(),
    };
    Ok(toeplitz_entries_mc(t, &[case], settings)?.remove(0))
}

/// `∫ conj F₁ · φ · F₂ · ν_t dg` over a `K_ℂ` rule.
pub fn toeplitz_entry_quadrature<S>(
    t: f64,
    symbol: S,
    f1: &BandLimited,
    f2: &BandLimited,
    rule: &QuadratureRuleKC,
) -> Result<ToeplitzEstimate>
where
    S: Fn(&KcNode) -> C64 + Sync,
{
    let big_f1 = transform_c(t, f1)?;
    let big_f2 = transform_c(t, f2)?;
    let nu = HeatKernelKC::analytic(t);
    let value = rule.integrate(|n| big_f1.eval(&n.g).conj() * big_f2.eval(&n.g) * symbol(n) * nu.radial(n.radius));
    Ok(ToeplitzEstimate {
        value,
        stderr: 0.0,
        n_paths: 0,
        n_steps: 0,
        master_seed: 0,
        method: Method::Quadrature,
        block_means: Vec::new(),
        cutoff_stability: None,
    })
}

/// [`toeplitz_entry_quadrature`] at `cutoff` and `cutoff + 1`, reporting the change.
pub fn toeplitz_entry_quadrature_checked<S>(
    t: f64,
    symbol: S,
    f1: &BandLimited,
    f2: &BandLimited,
    levels: KcLevels,
    cutoff: f64,
) -> Result<ToeplitzEstimate>
where
    S: Fn(&KcNode) -> C64 + Sync,
{
    let rule = kc_quadrature(t, cutoff, levels)?;
    let wide = kc_quadrature(t, cutoff + 1.0, levels)?;
    let mut est = toeplitz_entry_quadrature(t, &symbol, f1, f2, &rule)?;
    let other = toeplitz_entry_quadrature(t, &symbol, f1, f2, &wide)?;
    est.cutoff_stability = Some((other.value - est.value).norm());
    Ok(est)
}

/// `∫ conj F₁ · φ_{1,A} · F₂ · ν_t dg`, the `V = 1` differential-operator entry.
///
/// The symbol comes from [`symbol_phi1`] at every node, so finite-difference
/// failures surface as errors.
pub fn toeplitz_entry_phi1(
    t: f64,
    op: &LeftInvariantOperator,
    f1: &BandLimited,
    f2: &BandLimited,
    rule: &QuadratureRuleKC,
) -> Result<ToeplitzEstimate> {
    let value = toeplitz_entries_phi1(t, op, &[(f1.clone(), f2.clone())], rule)?[0];
    Ok(ToeplitzEstimate {
        value,
        stderr: 0.0,
        n_paths: 0,
        n_steps: 0,
        master_seed: 0,
        method: Method::Quadrature,
        block_means: Vec::new(),
        cutoff_stability: None,
    })
}

/// [`toeplitz_entry_phi1`] for several `(f₁, f₂)` pairs sharing one evaluation of the symbol.
pub fn toeplitz_entries_phi1(
    t: f64,
    op: &LeftInvariantOperator,
    pairs: &[(BandLimited, BandLimited)],
    rule: &QuadratureRuleKC,
) -> Result<Vec<C64>> {
    let phi = phi1_on_rule(op, t, rule)?;
    let nu = HeatKernelKC::analytic(t);
    pairs
        .iter()
        .map(|(f1, f2)| {
            let big_f1 = transform_c(t, f1)?;
            let big_f2 = transform_c(t, f2)?;
            let vals: Vec<C64> = rule
                .nodes
                .par_iter()
                .zip(phi.par_iter())
                .map(|(n, p)| big_f1.eval(&n.g).conj() * big_f2.eval(&n.g) * p * (nu.radial(n.radius) * n.weight))
                .collect();
            Ok(vals.iter().sum())
        })
        .collect()
}

/// [`toeplitz_entry_phi1`] at `cutoff` and `cutoff + 1`, reporting the change.
pub fn toeplitz_entry_phi1_checked(
    t: f64,
    op: &LeftInvariantOperator,
    f1: &BandLimited,
    f2: &BandLimited,
    levels: KcLevels,
    cutoff: f64,
) -> Result<ToeplitzEstimate> {
    let mut est = toeplitz_entry_phi1(t, op, f1, f2, &kc_quadrature(t, cutoff, levels)?)?;
    let wide = toeplitz_entry_phi1(t, op, f1, f2, &kc_quadrature(t, cutoff + 1.0, levels)?)?;
    est.cutoff_stability = Some((wide.value - est.value).norm());
    Ok(est)
}

/// `φ_{1,A}` at every node of `rule`, in node order.
pub fn phi1_on_rule(op: &LeftInvariantOperator, t: f64, rule: &QuadratureRuleKC) -> Result<Vec<C64>> {
    rule.nodes.par_iter().map(|n| symbol_phi1(op, t, &n.g)).collect()
}

/// Outcome of the boundedness check `|⟨F, T_φ F⟩| ≤ sup|Ṽ| ‖f‖² + 3σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundednessReport {
    pub estimate: ToeplitzEstimate,
    pub sup_v: f64,
    pub norm_sq: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `sup_K |Ṽ|` over a dense Euler grid plus `±I`.
pub fn sup_on_k(v: &BandLimited) -> f64 {
    let rule = haar_quadrature_k(Spin::from_twice(12));
    let minus = GroupElementK::new(-crate::algebra::Mat2::identity()).expect("-I is in SU(2)");
    let extra = [GroupElementK::identity(), minus];
    rule.nodes
        .par_iter()
        .chain(extra.par_iter())
        .map(|x| v.eval(x).norm())
        .reduce(|| 0.0, f64::max)
}

pub fn boundedness_check(
    t: f64,
    v_tilde: &BandLimited,
    f: &BandLimited,
    settings: &McSettings,
) -> Result<BoundednessReport> {
    let estimate = toeplitz_entry_mult_mc(t, v_tilde, f, f, settings)?;
    Ok(bound_report(estimate, sup_on_k(v_tilde), f.norm_sqr()))
}

/// Assembles a report from an existing estimate of `⟨F, T_φ F⟩`.
pub fn bound_report(estimate: ToeplitzEstimate, sup_v: f64, norm_sq: f64) -> BoundednessReport {
    let bound = sup_v * norm_sq + 3.0 * estimate.stderr;
    // A relative slack of 1e-12 absorbs round-off when the bound saturates.
    let holds = estimate.value.norm() <= bound * (1.0 + 1e-12);
    BoundednessReport {
        estimate,
        sup_v,
        norm_sq,
        bound,
        holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::recommended_cutoff;

    fn quick(seed: u64) -> McSettings {
        McSettings {
            n_paths: 4000,
            n_steps: 50,
            master_seed: seed,
            n_blocks: 40,
            check_convergence: false,
        }
    }

    fn d(k: usize, kp: usize) -> BandLimited {
        BandLimited::entry(Spin::HALF, k, kp).unwrap()
    }

    #[test]
    fn schrodinger_side_basics() {
        let f1 = d(0, 0);
        let f2 = d(0, 0);
        let one = BandLimited::constant(C64::new(1.0, 0.0));
        let id = LeftInvariantOperator::identity();
        let v = schrodinger_entry(&one, &id, &f1, &f2).unwrap();
        assert!((v - inner_product_k(&f1, &f2)).norm() < 1e-12);
        let lap = schrodinger_entry(&one, &LeftInvariantOperator::laplacian(), &f1, &f2).unwrap();
        assert!((lap + 0.75 * inner_product_k(&f1, &f2)).norm() < 1e-12);

        let chi = BandLimited::character(Spin::HALF).unwrap();
        let rule = haar_quadrature_k(Spin::ONE);
        let q = rule.integrate(|x| f1.eval(x).conj() * chi.eval(x) * f2.eval(x));
        assert!((schrodinger_entry(&chi, &id, &f1, &f2).unwrap() - q).norm() < 1e-10);
    }

    #[test]
    fn zero_symbol_gives_exact_zero() {
        let e = toeplitz_entry_mult_mc(0.5, &BandLimited::zero(), &d(0, 0), &d(0, 0), &quick(1)).unwrap();
        assert_eq!(e.value, C64::new(0.0, 0.0));
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn diff_with_identity_matches_mult() {
        let v = BandLimited::character(Spin::ONE).unwrap();
        let a = toeplitz_entry_mult_mc(0.5, &v, &d(0, 1), &d(1, 1), &quick(2)).unwrap();
        let b = toeplitz_entry_diff_mc(
            0.5,
            &v,
            &LeftInvariantOperator::identity(),
            &d(0, 1),
            &d(1, 1),
            &quick(2),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn estimator_is_linear() {
        let t = 0.5;
        let v1 = BandLimited::character(Spin::ONE).unwrap();
        let v2 = BandLimited::entry(Spin::HALF, 0, 1).unwrap();
        let s = C64::new(0.3, -1.2);
        let cases = vec![
            ToeplitzCase::mult(v1.clone(), d(0, 0), d(1, 0)),
            ToeplitzCase::mult(v2.clone(), d(0, 0), d(1, 0)),
            ToeplitzCase::mult(&v1 + &v2.scale(s), d(0, 0), d(1, 0)),
            ToeplitzCase::mult(v1.clone(), d(0, 0).scale(s), d(1, 0).scale(s)),
        ];
        let e = toeplitz_entries_mc(t, &cases, &quick(3)).unwrap();
        let sum = e[0].value + e[1].value * s;
        assert!((e[2].value - sum).norm() < 1e-12 * (1.0 + sum.norm()));
        let scaled = e[0].value * s.conj() * s;
        assert!((e[3].value - scaled).norm() < 1e-12 * (1.0 + scaled.norm()));
    }

    #[test]
    fn constant_symbol_small_sample() {
        let f = d(0, 0);
        let e = toeplitz_entry_mult_mc(0.5, &BandLimited::constant(C64::new(1.0, 0.0)), &f, &f, &quick(4)).unwrap();
        let want = f.norm_sqr();
        assert!((e.value.re - want).abs() < 4.0 * e.stderr + 0.02 * want, "{e:?}");
    }

    #[test]
    fn quadrature_constant_symbol_is_unitarity() {
        let t = 0.5;
        let rule = kc_quadrature(t, recommended_cutoff(t, 1.0), KcLevels::for_spin(Spin::HALF)).unwrap();
        let e = toeplitz_entry_quadrature(t, |_| C64::new(1.0, 0.0), &d(0, 1), &d(0, 1), &rule).unwrap();
        assert!((e.value.re / d(0, 1).norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn real_symbol_gives_hermitian_matrix() {
        let t = 0.5;
        let rule = kc_quadrature(t, recommended_cutoff(t, 1.0), KcLevels::for_spin(Spin::HALF)).unwrap();
        let sym = |n: &KcNode| C64::new(1.0 + n.radius * n.radius + n.x.matrix()[(0, 0)].re, 0.0);
        let basis = [d(0, 0), d(0, 1), d(1, 0), d(1, 1)];
        for a in &basis {
            for b in &basis {
                let ab = toeplitz_entry_quadrature(t, sym, a, b, &rule).unwrap().value;
                let ba = toeplitz_entry_quadrature(t, sym, b, a, &rule).unwrap().value;
                assert!((ab - ba.conj()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn mixed_endpoint_reduces_to_subelliptic() {
        for i in 0..5 {
            assert_eq!(mixed_endpoint(0.25, 0.5, 20, 9, i), subelliptic_endpoint(0.5, 20, 9, i));
        }
        assert!(toeplitz_entries_mc_s(0.2, 0.5, &[], &quick(1)).is_err());
    }

    #[test]
    fn s_family_tracks_heat_flowed_target() {
        let t = 0.5;
        let case = ToeplitzCase::mult(BandLimited::character(Spin::ONE).unwrap(), d(0, 0), d(0, 0));
        let s = t / 2.0 + 0.2;
        let e = toeplitz_entries_mc_s(s, t, std::slice::from_ref(&case), &quick(6))
            .unwrap()
            .remove(0);
        let want = schrodinger_target_s(s, &case).unwrap();
        assert!(
            (e.value - want).norm() < 4.0 * e.stderr,
            "{} vs {want} ± {}",
            e.value,
            e.stderr
        );
    }

    #[test]
    fn laplacian_symbol_reproduces_casimir() {
        let t = 0.5;
        let lap = LeftInvariantOperator::laplacian();
        let levels = KcLevels::for_spin(Spin::HALF);
        let e = toeplitz_entry_phi1_checked(t, &lap, &d(0, 1), &d(0, 1), levels, recommended_cutoff(t, 1.0)).unwrap();
        let want = -0.75 * d(0, 1).norm_sqr();
        assert!((e.value.re / want - 1.0).abs() < 1e-3, "{} vs {want}", e.value);
        assert!(e.cutoff_stability.unwrap() < 1e-5 * want.abs());
        let id = toeplitz_entry_phi1(
            t,
            &LeftInvariantOperator::identity(),
            &d(0, 1),
            &d(1, 0),
            &kc_quadrature(t, recommended_cutoff(t, 1.0), levels).unwrap(),
        )
        .unwrap();
        assert!(id.value.norm() < 1e-8);
    }

    #[test]
    fn sup_of_characters() {
        assert!((sup_on_k(&BandLimited::character(Spin::ONE).unwrap()) - 3.0).abs() < 1e-12);
        let half = BandLimited::character(Spin::HALF).unwrap().scale(C64::new(0.5, 0.0));
        assert!((sup_on_k(&half) - 1.0).abs() < 1e-12);
    }
}
