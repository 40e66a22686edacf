//! Heat kernels on SU(2) and on SL(2,ℂ)/SU(2), and exact heat flow on band-limited functions.

use std::f64::consts::PI;

use crate::algebra::{
    kc_quadrature_with, polar_radius, radial_tail_fraction, recommended_cutoff, GroupElementK, GroupElementKC,
    KcLevels, RadialJacobian, C64, VOL_K,
};
use crate::error::{Error, Result};
use crate::gauss::gauss_legendre;
use crate::repr::BandLimited;
use crate::spin::Spin;

/// Largest amplification accepted by backward heat flow.
pub const AMPLIFICATION_GUARD: f64 = 1e6;

/// Default tolerance on the truncation tail of the heat series.
pub const RHO_TOL: f64 = 1e-8;

/// `ρ_t(g) = Σ_j (2j+1) e^{-t j(j+1)/2} χ_j(g) / Vol(K)` truncated at `jmax`.
#[derive(Clone, Debug)]
pub struct HeatKernelK {
    pub t: f64,
    pub twice_jmax: u32,
    coeffs: Vec<f64>,
}

/// A value of `ρ_t` with a bound on the neglected terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoValue {
    pub value: C64,
    pub tail_bound: f64,
}

fn heat_coefficient(t: f64, twice_j: u32) -> f64 {
    let j = Spin::from_twice(twice_j);
    j.dim() as f64 * (-t * j.casimir() / 2.0).exp() / VOL_K
}

/// `Σ_{j > jmax} (2j+1)² e^{-t c_j/2} e^{j r} / Vol(K)`, using `|χ_j(x e^{iY})| ≤ (2j+1) e^{j|Y|}`.
pub fn rho_tail_bound(t: f64, twice_jmax: u32, radius: f64) -> f64 {
    let mut sum = 0.0;
    let mut tj = twice_jmax + 1;
    loop {
        let j = tj as f64 / 2.0;
        let term = heat_coefficient(t, tj) * (tj + 1) as f64 * (j * radius).exp();
        sum += term;
        // Terms decay super-exponentially once past the peak of the exponent.
        if t * (j + 0.5) > radius && term <= 1e-14 * sum {
            break;
        }
        if tj > 100_000 {
            return f64::INFINITY;
        }
        tj += 1;
    }
    sum
}

impl HeatKernelK {
    /// Truncation at an explicit `2·jmax`.
    pub fn with_twice_jmax(t: f64, twice_jmax: u32) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::ParameterDomain(format!("heat time must be positive, got {t}")));
        }
        let coeffs = (0..=twice_jmax).map(|tj| heat_coefficient(t, tj)).collect();
        Ok(HeatKernelK { t, twice_jmax, coeffs })
    }

    /// Smallest truncation whose tail bound is below `tol` for all `|Y| ≤ radius`.
    pub fn for_radius(t: f64, radius: f64, tol: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::ParameterDomain(format!("heat time must be positive, got {t}")));
        }
        let mut tj = 0;
        while rho_tail_bound(t, tj, radius) > tol {
            tj += 1;
            if tj > 4000 {
                return Err(Error::Truncation {
                    tail: rho_tail_bound(t, tj, radius),
                    tol,
                    twice_jmax: tj,
                });
            }
        }
        Self::with_twice_jmax(t, tj)
    }

    pub fn tail_bound(&self, radius: f64) -> f64 {
        rho_tail_bound(self.t, self.twice_jmax, radius)
    }

    /// Series value only; the caller is responsible for the truncation region.
    pub fn eval_unchecked(&self, g: &GroupElementKC) -> C64 {
        let tau = g.matrix().trace();
        let mut prev = C64::new(0.0, 0.0);
        let mut cur = C64::new(1.0, 0.0);
        let mut sum = cur * self.coeffs[0];
        // U_{n+1} = τ U_n - U_{n-1}
        for c in &self.coeffs[1..] {
            let next = tau * cur - prev;
            prev = cur;
            cur = next;
            sum += cur * *c;
        }
        sum
    }

    /// Series value with its tail certificate; fails if the tail exceeds `tol`.
    pub fn eval(&self, g: &GroupElementKC, tol: f64) -> Result<RhoValue> {
        let tail = self.tail_bound(polar_radius(g));
        if !(tail <= tol) {
            return Err(Error::Truncation {
                tail,
                tol,
                twice_jmax: self.twice_jmax,
            });
        }
        Ok(RhoValue {
            value: self.eval_unchecked(g),
            tail_bound: tail,
        })
    }

    /// `ρ_t` on K by the image sum over geodesic windings.
    ///
    /// Write `x = exp(Y)` with `|Y| = 2φ`, `φ ∈ [0, π]`, so `tr x = 2 cos φ`. Poisson
    /// summation of the character series gives
    /// `ρ_t = e^{t/8} √(8π/t) (4/t) / (2 Vol sin φ) · Σ_k u_k e^{-2u_k²/t}`, `u_k = φ + 2πk`,
    /// a sum of positive-dominated Gaussians that stays accurate where the series
    /// cancels to round-off (near `-I` for small `t`).
    pub fn eval_on_k(&self, x: &GroupElementK) -> f64 {
        let m = x.matrix();
        let c = m[(0, 0)].re;
        let s = (m[(0, 0)].im.powi(2) + m[(0, 1)].norm_sqr()).sqrt();
        let phi = s.atan2(c);
        let t = self.t;
        let windings = 2 + (t.sqrt() * 2.0) as i32;
        let (mut val, mut der) = (0.0, 0.0);
        for k in -windings..=windings {
            let u = phi + 2.0 * PI * k as f64;
            let g = (-2.0 * u * u / t).exp();
            val += u * g;
            der += (1.0 - 4.0 * u * u / t) * g;
        }
        // Both ends of [0, π] are removable zeros of sin φ.
        let ratio = if s < 1e-6 { der / phi.cos() } else { val / s };
        (t / 8.0).exp() * (8.0 * PI / t).sqrt() * (4.0 / t) / (2.0 * VOL_K) * ratio
    }

    /// Spectral coefficient `(2j+1) e^{-t c_j/2}/Vol(K)` of spin `j`.
    pub fn coefficient(&self, j: Spin) -> f64 {
        heat_coefficient(self.t, j.twice())
    }
}

/// `ρ_t(g)` truncated at `jmax`, with tail tolerance [`RHO_TOL`].
pub fn rho(t: f64, g: &GroupElementKC, jmax: Spin) -> Result<RhoValue> {
    HeatKernelK::with_twice_jmax(t, jmax.twice())?.eval(g, RHO_TOL)
}

/// `(ρ_t ⋆ ρ_s)(x) = ∫_K ρ_t(x y⁻¹) ρ_s(y) dy` by the Euler-angle product rule.
///
/// Both factors are class functions, so `x` may be replaced by the diagonal
/// element of its class. The integrand then depends on `y = e^{αX₃}e^{βX₂}e^{γX₃}`
/// only through `(α+γ, β)`, and the equispaced sum over `(α, γ)` collapses to
/// `n` times a sum over `α+γ`. `twice_j` sets the rule as in
/// [`haar_quadrature_k`](crate::algebra::haar_quadrature_k).
pub fn rho_convolution(t: f64, s: f64, x: &GroupElementK, twice_j: u32) -> Result<f64> {
    let kt = HeatKernelK::with_twice_jmax(t, 0)?;
    let ks = HeatKernelK::with_twice_jmax(s, 0)?;
    let phi = class_angle(x);
    let diag = GroupElementK::from_euler(2.0 * phi, 0.0, 0.0);
    let n_angle = 2 * twice_j as usize + 1;
    let n_beta = twice_j as usize / 2 + 1;
    let (cos_b, w_b) = gauss_legendre(n_beta);
    let step = 4.0 * PI / n_angle as f64;
    let mut acc = 0.0;
    for (cb, wb) in cos_b.iter().zip(&w_b) {
        let beta = cb.clamp(-1.0, 1.0).acos();
        let mut row = 0.0;
        for i in 0..n_angle {
            let y = GroupElementK::from_euler(i as f64 * step, beta, 0.0);
            row += kt.eval_on_k(&(diag * y.inverse())) * ks.eval_on_k(&y);
        }
        acc += wb * row;
    }
    Ok(acc * 0.5 * step * step * n_angle as f64)
}

/// `φ ∈ [0, π]` with `tr x = 2 cos φ`.
fn class_angle(x: &GroupElementK) -> f64 {
    let m = x.matrix();
    let s = (m[(0, 0)].im.powi(2) + m[(0, 1)].norm_sqr()).sqrt();
    s.atan2(m[(0, 0)].re)
}

/// Largest rule [`semigroup_defect`] will build.
pub const MAX_SEMIGROUP_TWICE_J: u32 = 400;

/// `max_x |(ρ_t ⋆ ρ_s)(x) - ρ_{t+s}(x)|` over `grid`.
///
/// The rule resolves spins well past the point where `e^{-min(t,s) c_j/2}` drops below 1e-16,
/// which for `min(t, s)` much below 0.01 exceeds [`MAX_SEMIGROUP_TWICE_J`].
pub fn semigroup_defect(t: f64, s: f64, grid: &[GroupElementK]) -> Result<f64> {
    let tj = HeatKernelK::for_radius(t.min(s), 0.0, 1e-16)?.twice_jmax;
    if 2 * tj > MAX_SEMIGROUP_TWICE_J {
        return Err(Error::ParameterDomain(format!(
            "min(t, s) = {} needs a convolution rule for 2j = {}, above {MAX_SEMIGROUP_TWICE_J}",
            t.min(s),
            2 * tj
        )));
    }
    let target = HeatKernelK::with_twice_jmax(t + s, 0)?;
    grid.iter().try_fold(0.0f64, |m, x| {
        Ok(m.max((rho_convolution(t, s, x, 2 * tj)? - target.eval_on_k(x)).abs()))
    })
}

/// `n³` points `e^{αX₃}e^{βX₂}e^{γX₃}` on an open Euler-angle grid.
pub fn euler_grid(n: usize) -> Vec<GroupElementK> {
    let h = |i: usize, top: f64| (i as f64 + 0.5) * top / n as f64;
    let mut out = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                out.push(GroupElementK::from_euler(h(a, 4.0 * PI), h(b, PI), h(c, 4.0 * PI)));
            }
        }
    }
    out
}

/// CDF of the polar radius `|Y|` under `ν_t(g) dg / Vol(K)`: density `∝ r sinh r e^{-r²/t}`.
pub fn nu_radial_cdf(t: f64, r: f64) -> f64 {
    1.0 - radial_tail_fraction(t, r.max(0.0))
}

/// The ν_t closed form `N(t) · (β r / sinh β r) · e^{-r²/t}` with `r = |Y|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatKernelKC {
    pub t: f64,
    pub beta: f64,
    pub norm: f64,
}

impl HeatKernelKC {
    /// `β = 1`, `N(t) = (πt)^{-3/2} e^{-t/4}`: the heat kernel of curvature -1
    /// hyperbolic 3-space at time `t/4`, matched to the Jacobian `sinh² r`.
    pub fn analytic(t: f64) -> Self {
        HeatKernelKC {
            t,
            beta: 1.0,
            norm: analytic_norm(t),
        }
    }

    pub fn radial(&self, r: f64) -> f64 {
        let x = self.beta * r;
        let ratio = if x < 1e-4 { 1.0 - x * x / 6.0 } else { x / x.sinh() };
        self.norm * ratio * (-r * r / self.t).exp()
    }

    pub fn eval(&self, g: &GroupElementKC) -> f64 {
        self.radial(polar_radius(g))
    }
}

/// `(πt)^{-3/2} e^{-t/4}`.
pub fn analytic_norm(t: f64) -> f64 {
    (PI * t).powf(-1.5) * (-t / 4.0).exp()
}

/// `ν_t(g)` with the analytic constants.
pub fn nu(t: f64, g: &GroupElementKC) -> f64 {
    HeatKernelKC::analytic(t).eval(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowDirection {
    Forward,
    Backward,
}

/// `e^{±τΔ/2} f`: multiplies the spin-`j` block by `e^{∓τ c_j/2}`.
pub fn heat_flow(tau: f64, f: &BandLimited, direction: FlowDirection) -> Result<BandLimited> {
    if !(tau >= 0.0) {
        return Err(Error::ParameterDomain(format!(
            "heat flow time must be non-negative, got {tau}"
        )));
    }
    let sign = match direction {
        FlowDirection::Forward => -1.0,
        FlowDirection::Backward => {
            let amp = (tau * f.jmax().casimir() / 2.0).exp();
            if amp > AMPLIFICATION_GUARD {
                return Err(Error::IllConditioned(amp));
            }
            1.0
        }
    };
    Ok(f.map_spectrum(|j| C64::new((sign * tau * j.casimir() / 2.0).exp(), 0.0)))
}

/// Outcome of pinning the ν_t / Jacobian constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub t: f64,
    pub beta: f64,
    /// The product `N(t)·c_J`; only this combination is identifiable.
    pub norm_times_cj: f64,
    /// `(πt)^{-3/2} e^{-t/4}` for comparison.
    pub analytic_norm: f64,
    pub mass_residual: f64,
    pub unitarity_half_residual: f64,
    pub unitarity_one_residual: f64,
    pub cutoff: f64,
}

impl Calibration {
    pub fn kernel(&self) -> HeatKernelKC {
        HeatKernelKC {
            t: self.t,
            beta: self.beta,
            norm: self.norm_times_cj,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.mass_residual
            .abs()
            .max(self.unitarity_half_residual.abs())
            .max(self.unitarity_one_residual.abs())
    }
}

/// Relative residuals `(∫ν dg - Vol)/Vol` and `‖C_t D^j_{00}‖²_ν/‖D^j_{00}‖² - 1`
/// for a given `β` and `N·c_J`.
pub fn calibration_residuals(t: f64, beta: f64, norm: f64, spin: Spin, cutoff: f64) -> Result<(f64, f64)> {
    let levels = KcLevels::for_spin(spin);
    let rule = kc_quadrature_with(t, cutoff, levels, RadialJacobian { beta, c_j: 1.0 })?;
    let kernel = HeatKernelKC { t, beta, norm };
    let f = BandLimited::entry(spin, 0, 0)?;
    let big_f = heat_flow(t, &f, FlowDirection::Forward)?;
    let vals: Vec<(f64, f64)> = {
        use rayon::prelude::*;
        rule.nodes
            .par_iter()
            .map(|n| {
                let w = n.weight * kernel.radial(n.radius);
                (w, w * big_f.eval_kc(&n.g).norm_sqr())
            })
            .collect()
    };
    let mass: f64 = vals.iter().map(|v| v.0).sum();
    let norm_sq: f64 = vals.iter().map(|v| v.1).sum();
    Ok((mass / VOL_K - 1.0, norm_sq / f.norm_sqr() - 1.0))
}

/// Pins `β` by bisection on spin-1/2 unitarity, with `N·c_J` fixed by the mass
/// identity at each trial `β`; spin-1 unitarity is then an independent check.
pub fn calibrate(t: f64) -> Result<Calibration> {
    if !(t > 0.0) {
        return Err(Error::ParameterDomain(format!("heat time must be positive, got {t}")));
    }
    let cutoff = recommended_cutoff(t, 2.0);
    let half = |beta: f64| -> Result<(f64, f64)> {
        let (m, _) = calibration_residuals(t, beta, 1.0, Spin::HALF, cutoff)?;
        let norm = 1.0 / (1.0 + m);
        let (_, u) = calibration_residuals(t, beta, norm, Spin::HALF, cutoff)?;
        Ok((norm, u))
    };
    let (mut lo, mut hi) = (0.5, 1.5);
    let (_, mut u_lo) = half(lo)?;
    let (_, u_hi) = half(hi)?;
    if u_lo.signum() == u_hi.signum() {
        return Err(Error::ParameterDomain(format!(
            "calibration bracket [0.5, 1.5] does not contain a root at t = {t}"
        )));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let (_, u) = half(mid)?;
        if u.signum() == u_lo.signum() {
            lo = mid;
            u_lo = u;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let beta = 0.5 * (lo + hi);
    let (norm, _) = half(beta)?;
    let (mass_residual, unitarity_half_residual) = calibration_residuals(t, beta, norm, Spin::HALF, cutoff)?;
    let (_, unitarity_one_residual) = calibration_residuals(t, beta, norm, Spin::ONE, cutoff)?;
    Ok(Calibration {
        t,
        beta,
        norm_times_cj: norm,
        analytic_norm: analytic_norm(t),
        mass_residual,
        unitarity_half_residual,
        unitarity_one_residual,
        cutoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{exp_algebra, exp_complex, haar_quadrature_k, kc_quadrature, AlgebraVector};
    use crate::repr::character;

    #[test]
    fn rho_has_unit_mass() {
        let kernel = HeatKernelK::for_radius(0.3, 0.0, 1e-14).unwrap();
        let rule = haar_quadrature_k(Spin::from_twice(kernel.twice_jmax));
        let m = rule.integrate(|x| kernel.eval_unchecked(&x.complexify()));
        assert!((m.re - 1.0).abs() < 1e-12 && m.im.abs() < 1e-12);
    }

    #[test]
    fn rho_is_positive_on_nodes() {
        for t in [0.1, 0.5, 2.0] {
            let kernel = HeatKernelK::for_radius(t, 0.0, 1e-14).unwrap();
            let rule = haar_quadrature_k(Spin::from_twice(8));
            for x in &rule.nodes {
                let closed = kernel.eval_on_k(x);
                assert!(closed > 0.0);
                let series = kernel.eval_unchecked(&x.complexify());
                assert!((series.re - closed).abs() < 1e-13, "t = {t}: {series} vs {closed}");
            }
            let minus = GroupElementK::new(-crate::algebra::Mat2::identity()).unwrap();
            assert!(kernel.eval_on_k(&minus) > 0.0);
            let id = GroupElementK::identity();
            assert!((kernel.eval_on_k(&id) - kernel.eval_unchecked(&id.complexify()).re).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_is_certified() {
        let g = exp_complex(&AlgebraVector::new(0.0, 0.0, 3.0).times_i());
        assert!(matches!(
            rho(0.2, &g, Spin::from_twice(4)),
            Err(Error::Truncation { .. })
        ));
        let ok = rho(0.2, &g, Spin::from_twice(80)).unwrap();
        assert!(ok.tail_bound < RHO_TOL);
    }

    #[test]
    fn rho_acts_on_characters_by_heat_factor() {
        // ∫ ρ_t(g x⁻¹) χ_j(x) dx = e^{-t c_j/2} χ_j(g) for g off K.
        let t = 0.5;
        let g = exp_algebra(&AlgebraVector::new(0.3, 0.1, -0.4), 1.0)
            * exp_complex(&AlgebraVector::new(0.2, -0.5, 0.3).times_i());
        let kernel = HeatKernelK::for_radius(t, 1.0, 1e-14).unwrap();
        let rule = haar_quadrature_k(Spin::from_twice(kernel.twice_jmax));
        for j in [Spin::HALF, Spin::ONE] {
            let v = rule.integrate(|x| kernel.eval_unchecked(&(g * x.inverse())) * character(j, &x.complexify()));
            let want = character(j, &g) * (-t * j.casimir() / 2.0).exp();
            assert!((v - want).norm() < 1e-8, "{v} vs {want}");
        }
    }

    #[test]
    fn semigroup_on_a_small_grid() {
        let grid = euler_grid(3);
        for (t, s) in [(0.2, 0.2), (0.2, 0.5), (0.5, 0.5)] {
            let d = semigroup_defect(t, s, &grid).unwrap();
            assert!(d < 1e-10, "({t}, {s}): {d}");
        }
        // The collapsed rule matches the full product rule.
        let x = GroupElementK::from_euler(0.4, 1.3, -0.8);
        let rule = haar_quadrature_k(Spin::from_twice(16));
        let kt = HeatKernelK::with_twice_jmax(0.5, 0).unwrap();
        let full = rule.integrate(|y| C64::new(kt.eval_on_k(&(x * y.inverse())) * kt.eval_on_k(y), 0.0));
        assert!((full.re - rho_convolution(0.5, 0.5, &x, 16).unwrap()).abs() < 1e-13);
        assert!(matches!(
            semigroup_defect(1e-4, 0.5, &grid),
            Err(Error::ParameterDomain(_))
        ));
    }

    #[test]
    fn radial_cdf_is_monotone() {
        let mut prev = nu_radial_cdf(0.5, 0.0);
        assert!(prev.abs() < 1e-15);
        for i in 1..60 {
            let c = nu_radial_cdf(0.5, 0.1 * i as f64);
            assert!(c >= prev);
            prev = c;
        }
        assert!((prev - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nu_is_constant_on_k() {
        let t = 0.7;
        let x = GroupElementK::from_euler(0.3, 1.1, 2.0);
        assert!((nu(t, &x.complexify()) - nu(t, &GroupElementKC::identity())).abs() < 1e-15);
        assert!(nu(t, &GroupElementKC::identity()) > 0.0);
    }

    #[test]
    fn nu_has_mass_vol_k() {
        for t in [0.2, 0.5, 1.0] {
            let levels = KcLevels {
                k_spin: Spin::ZERO,
                n_theta: 1,
                n_phi: 1,
                n_radial: 96,
            };
            let rule = kc_quadrature(t, recommended_cutoff(t, 0.0), levels).unwrap();
            let m = rule.integrate(|n| C64::new(nu(t, &n.g), 0.0)).re;
            assert!((m / VOL_K - 1.0).abs() < 1e-10, "t = {t}: {m}");
        }
    }

    #[test]
    fn forward_and_backward_flow() {
        let f = &BandLimited::constant(C64::new(2.0, 0.0)) + &BandLimited::character(Spin::ONE).unwrap();
        let fwd = heat_flow(0.4, &f, FlowDirection::Forward).unwrap();
        assert_eq!(fwd.block(Spin::ZERO), f.block(Spin::ZERO));
        let ratio = fwd.block(Spin::ONE).unwrap()[(0, 0)].re;
        assert!((ratio - (-0.4f64 * 2.0 / 2.0).exp()).abs() < 1e-15);
        let back = heat_flow(0.4, &fwd, FlowDirection::Backward).unwrap();
        let diff = &back - &f;
        assert!(diff.norm_sqr().sqrt() < 1e-12);
    }

    #[test]
    fn backward_flow_guard() {
        let f = BandLimited::character(Spin::from_twice(20)).unwrap();
        assert!(matches!(
            heat_flow(1.0, &f, FlowDirection::Backward),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn calibration_recovers_analytic_constants() {
        let cal = calibrate(0.5).unwrap();
        assert!((cal.beta - 1.0).abs() < 1e-6, "beta = {}", cal.beta);
        assert!((cal.norm_times_cj / cal.analytic_norm - 1.0).abs() < 1e-6);
        assert!(cal.max_residual() < 1e-5, "{cal:?}");
    }
}
