//! One-dimensional Euclidean Segal–Bargmann baseline.
//!
//! Functions are finite Hermite expansions `f = P(x) e^{-x²/2}`. From the
//! generating function, heat flow for time `t` sends `H_n(x) e^{-x²/2}` to
//! `√γ e^{-γx²/2} c^{n/2} H_n(γx/√c)` with `γ = 1/(1+t)`, `c = (1-t)/(1+t)`, so
//! `C_t f(z) = √γ e^{-γz²/2} Q(z)` exactly. Both `P` and `Q` are evaluated by a
//! three-term recurrence; monomial expansions lose ~1e-8 to cancellation by
//! degree 20. All integrals are Gaussian times a polynomial and are done with
//! Gauss–Hermite rules of sufficient order.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::C64;
use crate::error::{Error, Result};
use crate::gauss::gauss_hermite;
use crate::montecarlo::{derive_seed, run_blocked, McSettings};

/// Highest Hermite degree accepted.
pub const MAX_HERMITE_DEGREE: usize = 20;

/// Highest degree of a multiplier polynomial in [`euclid_toeplitz_check`].
pub const MAX_POTENTIAL_DEGREE: usize = 6;

/// `f = Σ c_n ψ_n` in normalized Hermite functions
/// `ψ_n = (2ⁿ n! √π)^{-1/2} H_n(x) e^{-x²/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteExpansion {
    coeffs: Vec<C64>,
}

impl HermiteExpansion {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() > MAX_HERMITE_DEGREE + 1 {
            return Err(Error::DegreeCap(coeffs.len() - 1, MAX_HERMITE_DEGREE));
        }
        Ok(HermiteExpansion { coeffs })
    }

    /// The single basis function `ψ_n`.
    pub fn basis(n: usize) -> Result<Self> {
        let mut c = vec![C64::new(0.0, 0.0); n + 1];
        c[n] = C64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `‖f‖²` by Parseval.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `P(x)` where `f(x) = P(x) e^{-x²/2}`.
    pub fn poly_part(&self, x: C64) -> C64 {
        hermite_sum(&self.coeffs, x, 1.0)
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.poly_part(C64::new(x, 0.0)) * (-0.5 * x * x).exp()
    }
}

/// `Σ a_n q_n(y)` with `q_n = (2ⁿ n! √π)^{-1/2} c^{n/2} H_n(y/√c)`, via
/// `q_{n+1} = √(2/(n+1)) y q_n - c √(n/(n+1)) q_{n-1}`. Valid for any real `c`.
fn hermite_sum(a: &[C64], y: C64, c: f64) -> C64 {
    let mut prev = C64::new(0.0, 0.0);
    let mut cur = C64::new(std::f64::consts::PI.powf(-0.25), 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for (n, an) in a.iter().enumerate() {
        acc += an * cur;
        let nf = n as f64;
        let next = y * cur * (2.0 / (nf + 1.0)).sqrt() - prev * (c * (nf / (nf + 1.0)).sqrt());
        prev = cur;
        cur = next;
    }
    acc
}

fn horner<T>(p: &[T], z: C64) -> C64
where
    T: Copy + Into<C64>,
{
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c.into())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `E[Z^i]` for standard normal `Z`.
fn normal_moment(i: usize) -> f64 {
    if i % 2 == 1 {
        0.0
    } else {
        (1..i).step_by(2).map(|v| v as f64).product()
    }
}

/// `e^{τΔ/2} p = E[p(x + √τ Z)]` for a polynomial `p`, lowest degree first.
pub fn heat_flow_polynomial(tau: f64, p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len()];
    for (k, &pk) in p.iter().enumerate() {
        for i in (0..=k).step_by(2) {
            out[k - i] += pk * binomial(k, i) * tau.powi(i as i32 / 2) * normal_moment(i);
        }
    }
    out
}

/// `C_t f` on `ℂ`: `√γ e^{-γz²/2} Q(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclidTransform {
    pub t: f64,
    pub gamma: f64,
    /// Hermite coefficients of `f`.
    pub coeffs: Vec<C64>,
}

impl EuclidTransform {
    pub fn eval(&self, z: C64) -> C64 {
        self.gamma.sqrt() * (-0.5 * self.gamma * z * z).exp() * self.eval_poly(z)
    }

    /// `Q(z)`.
    pub fn eval_poly(&self, z: C64) -> C64 {
        hermite_sum(&self.coeffs, z * self.gamma, (1.0 - self.t) / (1.0 + self.t))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

pub fn euclid_transform(t: f64, f: &HermiteExpansion) -> Result<EuclidTransform> {
    if !(t > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "transform time must be positive, got {t}"
        )));
    }
    let gamma = 1.0 / (1.0 + t);
    Ok(EuclidTransform {
        t,
        gamma,
        coeffs: f.coeffs.clone(),
    })
}

/// Flat weight `ν_t(x + iy) = (πt)^{-1/2} e^{-y²/t}`.
pub fn flat_nu(t: f64, y: f64) -> f64 {
    (std::f64::consts::PI * t).sqrt().recip() * (-y * y / t).exp()
}

/// Gauss–Hermite rule for `∫ g(x) e^{-a x²} dx` with `n` nodes, as `(x_i, w_i)`.
fn scaled_rule(a: f64, n: usize) -> Vec<(f64, f64)> {
    let (u, w) = gauss_hermite(n);
    let s = a.sqrt().recip();
    u.iter().zip(&w).map(|(u, w)| (u * s, w * s)).collect()
}

fn nodes_for_degree(deg: usize) -> usize {
    deg / 2 + 2
}

/// `‖C_t f‖²` in `L²(ℂ, ν_t)` by a 2-D Gauss–Hermite rule.
pub fn bargmann_norm_sqr(t: f64, big_f: &EuclidTransform) -> f64 {
    inner_product_nu(t, big_f, big_f, &[1.0]).re
}

/// `∫ conj F₁(z) V(Re z) F₂(z) ν_t(z) d²z` for polynomial `V`, exact up to round-off.
///
/// The Gaussian part of the integrand is `γ e^{-γx²} e^{-y²/(t(1+t))}/√(πt)`.
pub fn inner_product_nu(t: f64, f1: &EuclidTransform, f2: &EuclidTransform, v: &[f64]) -> C64 {
    let g = f1.gamma;
    let deg_y = f1.degree() + f2.degree();
    let deg_x = deg_y + v.len();
    let rx = scaled_rule(g, nodes_for_degree(deg_x));
    let ry = scaled_rule(1.0 / (t * (1.0 + t)), nodes_for_degree(deg_y));
    let mut acc = C64::new(0.0, 0.0);
    for &(x, wx) in &rx {
        let vx = horner(v, C64::new(x, 0.0));
        for &(y, wy) in &ry {
            let z = C64::new(x, y);
            acc += f1.eval_poly(z).conj() * f2.eval_poly(z) * vx * (wx * wy);
        }
    }
    acc * (g / (std::f64::consts::PI * t).sqrt())
}

/// `⟨f₁, M_V f₂⟩_{L²(ℝ)}` for polynomial `V`.
pub fn schrodinger_inner(f1: &HermiteExpansion, f2: &HermiteExpansion, v: &[f64]) -> C64 {
    let rule = scaled_rule(1.0, nodes_for_degree(f1.degree() + f2.degree() + v.len()));
    rule.iter()
        .map(|&(x, w)| {
            let z = C64::new(x, 0.0);
            f1.poly_part(z).conj() * horner(v, z) * f2.poly_part(z) * w
        })
        .sum()
}

/// One flat-case matrix element to check.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclidCase {
    /// `Ṽ`, lowest degree first.
    pub v_tilde: Vec<f64>,
    pub f1: HermiteExpansion,
    pub f2: HermiteExpansion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EuclidToeplitzReport {
    /// `⟨f₁, e^{tΔ/4}Ṽ f₂⟩`.
    pub schrodinger: C64,
    /// `∫ conj F₁ Ṽ(Re z) F₂ ν_t`.
    pub bargmann: C64,
    pub deterministic_residual: f64,
    pub mc_value: C64,
    pub mc_stderr: f64,
    pub mc_block_means: Vec<C64>,
    /// `|mc - schrodinger| / stderr`, zero when they agree to round-off.
    pub mc_z: f64,
}

impl EuclidToeplitzReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.deterministic_residual <= tol && self.mc_z <= 3.0
    }
}

/// Checks `C_t M_V C_t⁻¹ = T_Ṽ`, `V = e^{tΔ/4}Ṽ`, on each case.
///
/// The Monte Carlo side samples `b ~ N(0, t/2)` and integrates
/// `x ↦ Ṽ(x) conj F₁(x+ib) F₂(x+ib)` exactly, mirroring the SU(2) weak estimator.
/// The per-path values grow like `e^{γb²}`, so their `k`-th moment is finite
/// only for `k < (1+t)/t`. The block standard error needs a finite fourth
/// moment, hence `t < 1/3`.
pub fn euclid_toeplitz_checks(
    t: f64,
    cases: &[EuclidCase],
    settings: &McSettings,
) -> Result<Vec<EuclidToeplitzReport>> {
    if !(t > 0.0 && t < 1.0 / 3.0) {
        return Err(Error::ParameterDomain(format!(
            "the flat weak estimator needs 0 < t < 1/3 for a finite fourth moment, got {t}"
        )));
    }
    for c in cases {
        if c.v_tilde.len() > MAX_POTENTIAL_DEGREE + 1 {
            return Err(Error::DegreeTooLarge(c.v_tilde.len() - 1));
        }
    }
    let transformed = cases
        .iter()
        .map(|c| Ok((euclid_transform(t, &c.f1)?, euclid_transform(t, &c.f2)?)))
        .collect::<Result<Vec<_>>>()?;
    let gamma = 1.0 / (1.0 + t);
    let max_deg = cases
        .iter()
        .map(|c| c.f1.degree() + c.f2.degree() + c.v_tilde.len())
        .max()
        .unwrap_or(0);
    let rule = scaled_rule(gamma, nodes_for_degree(max_deg));
    let sd = (t / 2.0).sqrt();
    let sums = run_blocked(settings.n_paths, settings.n_blocks, cases.len(), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(settings.master_seed, i, 2));
        let z: f64 = StandardNormal.sample(&mut rng);
        let b = sd * z;
        let pre = gamma * (gamma * b * b).exp();
        cases
            .iter()
            .zip(&transformed)
            .map(|(c, (g1, g2))| {
                let s: C64 = rule
                    .iter()
                    .map(|&(x, w)| {
                        let z = Complex::new(x, b);
                        g1.eval_poly(z).conj() * g2.eval_poly(z) * horner(&c.v_tilde, C64::new(x, 0.0)) * w
                    })
                    .sum();
                s * pre
            })
            .collect()
    })?;
    if settings.check_convergence {
        let all: Vec<usize> = (0..cases.len()).collect();
        sums.check_convergence(&all)?;
    }
    Ok(cases
        .iter()
        .zip(&transformed)
        .enumerate()
        .map(|(i, (c, (g1, g2)))| {
            let v = heat_flow_polynomial(t / 2.0, &c.v_tilde);
            let schrodinger = schrodinger_inner(&c.f1, &c.f2, &v);
            let bargmann = inner_product_nu(t, g1, g2, &c.v_tilde);
            let scale = 1.0 + schrodinger.norm();
            let e = sums.estimate(i);
            let diff = (e.mean - schrodinger).norm();
            // Differences at round-off level count as agreement even when the
            // per-path values are themselves pure round-off (odd integrands).
            EuclidToeplitzReport {
                schrodinger,
                bargmann,
                deterministic_residual: (bargmann - schrodinger).norm() / scale,
                mc_value: e.mean,
                mc_stderr: e.stderr,
                mc_block_means: sums.block_means(i),
                mc_z: if diff <= 1e-12 * scale {
                    0.0
                } else if e.stderr > 0.0 {
                    diff / e.stderr
                } else {
                    f64::INFINITY
                },
            }
        })
        .collect())
}

pub fn euclid_toeplitz_check(
    t: f64,
    v_tilde: &[f64],
    f1: &HermiteExpansion,
    f2: &HermiteExpansion,
    settings: &McSettings,
) -> Result<EuclidToeplitzReport> {
    let case = EuclidCase {
        v_tilde: v_tilde.to_vec(),
        f1: f1.clone(),
        f2: f2.clone(),
    };
    Ok(euclid_toeplitz_checks(t, &[case], settings)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn settings() -> McSettings {
        McSettings {
            n_paths: 20_000,
            n_steps: 1,
            master_seed: 5,
            n_blocks: 64,
            check_convergence: true,
        }
    }

    fn psi(n: usize) -> HermiteExpansion {
        HermiteExpansion::basis(n).unwrap()
    }

    #[test]
    fn parseval_against_quadrature() {
        let f = HermiteExpansion::new(vec![
            C64::new(0.3, 0.1),
            C64::new(-1.0, 0.0),
            C64::new(0.0, 0.7),
            C64::new(0.2, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.5, -0.5),
        ])
        .unwrap();
        let (x, w) = gauss_hermite(30);
        let q: f64 = x
            .iter()
            .zip(&w)
            .map(|(x, w)| f.eval(*x).norm_sqr() * (x * x).exp() * w)
            .sum();
        assert!((q - f.norm_sqr()).abs() < 1e-10);
        for n in [0, 7, 15, 20] {
            let f = psi(n);
            let (x, w) = gauss_hermite(25);
            let q: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| f.eval(*x).norm_sqr() * (x * x).exp() * w)
                .sum();
            assert!((q - 1.0).abs() < 1e-10, "n = {n}: {q}");
        }
    }

    #[test]
    fn degree_cap() {
        assert!(matches!(HermiteExpansion::basis(21), Err(Error::DegreeCap(21, 20))));
    }

    #[test]
    fn constant_polynomial_is_fixed_by_heat_flow() {
        assert_eq!(heat_flow_polynomial(0.7, &[2.5]), vec![2.5]);
        // e^{τΔ/2} x² = x² + τ
        assert_eq!(heat_flow_polynomial(0.7, &[0.0, 0.0, 1.0]), vec![0.7, 0.0, 1.0]);
    }

    #[test]
    fn gaussian_image_matches_closed_form() {
        // ψ₀ = π^{-1/4} e^{-x²/2}; convolving with N(0,t) gives π^{-1/4}√γ e^{-γx²/2}.
        let t = 0.8;
        let big_f = euclid_transform(t, &psi(0)).unwrap();
        let g = 1.0 / (1.0 + t);
        for z in [C64::new(0.3, -1.1), C64::new(-2.0, 0.5), C64::new(0.0, 0.0)] {
            let want = std::f64::consts::PI.powf(-0.25) * g.sqrt() * (-0.5 * g * z * z).exp();
            assert!((big_f.eval(z) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn heat_image_matches_convolution() {
        // Oracle: (e^{tΔ/2}f)(x) = E[f(x + √t Z)] by Gauss–Hermite.
        let t = 0.6;
        let f = HermiteExpansion::new(vec![
            C64::new(0.2, 0.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
            C64::new(-0.4, 0.3),
        ])
        .unwrap();
        let big_f = euclid_transform(t, &f).unwrap();
        let (u, w) = gauss_hermite(60);
        for x in [-1.5, 0.0, 0.4, 2.2] {
            let conv: C64 = u
                .iter()
                .zip(&w)
                .map(|(u, w)| f.eval(x + (2.0 * t).sqrt() * u) * *w)
                .sum::<C64>()
                / std::f64::consts::PI.sqrt();
            assert!((big_f.eval(C64::new(x, 0.0)) - conv).norm() < 1e-12, "{x}");
        }
    }

    #[test]
    fn transform_is_unitary() {
        for t in [0.3, 1.0, 2.5] {
            for n in [0, 1, 4, 12, 20] {
                let big_f = euclid_transform(t, &psi(n)).unwrap();
                let got = bargmann_norm_sqr(t, &big_f);
                assert!((got - 1.0).abs() < 1e-10, "t = {t}, n = {n}: {got}");
            }
        }
    }

    #[test]
    fn toeplitz_identity_deterministic_and_mc() {
        let t = 0.2;
        let mut cases = Vec::new();
        let potentials: Vec<Vec<f64>> = vec![
            vec![1.0],
            vec![0.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![0.5, -1.0, 0.0, 0.3],
            vec![0.0, 0.0, 0.0, 0.0, 1.0],
            vec![1.0, 0.0, -0.5, 0.0, 0.0, 0.2, 0.1],
        ];
        for v in &potentials {
            for (a, b) in [(0, 0), (0, 2), (1, 3), (2, 2)] {
                cases.push(EuclidCase {
                    v_tilde: v.clone(),
                    f1: psi(a),
                    f2: psi(b),
                });
            }
        }
        let reports = euclid_toeplitz_checks(t, &cases, &settings()).unwrap();
        for (c, r) in cases.iter().zip(&reports) {
            assert!(r.passes(1e-8), "{c:?}: {r:?}");
        }
        // Ṽ = 1 reproduces the inner product; Ṽ = x on ψ₀ vanishes by parity.
        assert!((reports[0].schrodinger.re - 1.0).abs() < 1e-12);
        assert!(reports[4].schrodinger.norm() < 1e-14 && reports[4].bargmann.norm() < 1e-14);
    }

    #[test]
    fn rejects_large_time_and_degree() {
        let s = settings();
        assert!(euclid_toeplitz_check(0.5, &[1.0], &psi(0), &psi(0), &s).is_err());
        assert!(matches!(
            euclid_toeplitz_check(0.2, &[0.0; 8], &psi(0), &psi(0), &s),
            Err(Error::DegreeTooLarge(7))
        ));
    }

    proptest! {
        #[test]
        fn schrodinger_side_is_hermitian(
            a in prop::collection::vec(-1.0f64..1.0, 1..6),
            b in prop::collection::vec(-1.0f64..1.0, 1..6),
            v in prop::collection::vec(-1.0f64..1.0, 1..7),
        ) {
            let f1 = HermiteExpansion::new(a.iter().map(|x| C64::new(*x, 0.5 * x)).collect()).unwrap();
            let f2 = HermiteExpansion::new(b.iter().map(|x| C64::new(-x, *x)).collect()).unwrap();
            let ab = schrodinger_inner(&f1, &f2, &v);
            let ba = schrodinger_inner(&f2, &f1, &v);
            prop_assert!((ab - ba.conj()).norm() < 1e-10 * (1.0 + ab.norm()));
            let g1 = euclid_transform(0.7, &f1).unwrap();
            let g2 = euclid_transform(0.7, &f2).unwrap();
            let lhs = schrodinger_inner(&f1, &f2, &heat_flow_polynomial(0.35, &v));
            let rhs = inner_product_nu(0.7, &g1, &g2, &v);
            prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()));
        }
    }
}
