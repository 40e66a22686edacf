//! Product quadrature rules on SU(2) and on SL(2,ℂ) in polar coordinates.

use std::f64::consts::PI;

use libm::erfc;
use rayon::prelude::*;

use super::{exp_complex, AlgebraVector, GroupElementK, GroupElementKC, C64, VOL_K};
use crate::error::{Error, Result};
use crate::gauss::{gauss_legendre, gauss_legendre_on};
use crate::spin::Spin;

/// Largest relative ν_t mass allowed outside the radial cutoff.
pub const TAIL_LIMIT: f64 = 1e-10;

/// Weighted nodes on SU(2) with total mass `Vol(K)`.
#[derive(Clone, Debug)]
pub struct QuadratureRuleK {
    pub nodes: Vec<GroupElementK>,
    pub weights: Vec<f64>,
    /// Products `D^j_{ab} · conj(D^{j'}_{cd})` are integrated exactly for `j, j' ≤ j_max`.
    pub j_max: Spin,
}

/// Euler-angle product rule `x = e^{αX_3} e^{βX_2} e^{γX_3}`.
///
/// `α, γ` run over `[0, 4π)` (a double cover, hence the factor 1/2 in the
/// weights) with `4 j_max + 1` equispaced points; `cos β` uses Gauss–Legendre.
/// The Riemannian measure is `sin β dα dβ dγ` on a single cover.
pub fn haar_quadrature_k(j_max: Spin) -> QuadratureRuleK {
    let n_angle = 2 * j_max.twice() as usize + 1;
    let n_beta = j_max.twice() as usize / 2 + 1;
    let (cos_b, w_b) = gauss_legendre(n_beta);
    let step = 4.0 * PI / n_angle as f64;
    let mut nodes = Vec::with_capacity(n_angle * n_angle * n_beta);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (cb, wb) in cos_b.iter().zip(&w_b) {
        let beta = cb.clamp(-1.0, 1.0).acos();
        for ia in 0..n_angle {
            for ig in 0..n_angle {
                let alpha = ia as f64 * step;
                let gamma = ig as f64 * step;
                nodes.push(GroupElementK::from_euler(alpha, beta, gamma));
                weights.push(0.5 * step * step * wb);
            }
        }
    }
    QuadratureRuleK { nodes, weights, j_max }
}

impl QuadratureRuleK {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `∫_K f(x) dx`. Node values are computed in parallel and summed in node order.
    pub fn integrate<F>(&self, f: F) -> C64
    where
        F: Fn(&GroupElementK) -> C64 + Sync,
    {
        let vals: Vec<C64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(x, w)| f(x) * *w)
            .collect();
        vals.iter().sum()
    }
}

/// Polar-coordinate volume density `c_J · (sinh(βr)/β)²` on `K_ℂ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialJacobian {
    pub beta: f64,
    pub c_j: f64,
}

impl RadialJacobian {
    /// `β = 1, c_J = 1`: the Riemannian volume of `K_ℂ/K ≅ H³` with curvature -1.
    pub const ANALYTIC: RadialJacobian = RadialJacobian { beta: 1.0, c_j: 1.0 };

    pub fn eval(&self, r: f64) -> f64 {
        let s = if self.beta == 0.0 {
            r
        } else {
            (self.beta * r).sinh() / self.beta
        };
        self.c_j * s * s
    }
}

impl Default for RadialJacobian {
    fn default() -> Self {
        Self::ANALYTIC
    }
}

/// Resolution of the tensor rule on `K_ℂ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KcLevels {
    /// Exactness of the K factor.
    pub k_spin: Spin,
    /// Gauss–Legendre points in `cos θ` on the sphere of directions.
    pub n_theta: usize,
    /// Equispaced azimuth points.
    pub n_phi: usize,
    /// Gauss–Legendre points on `[0, R]`.
    pub n_radial: usize,
}

impl KcLevels {
    /// Enough to integrate `|F|²`-type integrands with `F` of spin at most `j` exactly
    /// in the angular variables.
    pub fn for_spin(j: Spin) -> Self {
        let tj = j.twice() as usize;
        KcLevels {
            k_spin: j,
            n_theta: tj + 2,
            n_phi: 2 * tj + 3,
            n_radial: 96,
        }
    }
}

/// One node `g = x e^{iY}` of a `K_ℂ` rule.
#[derive(Clone, Copy, Debug)]
pub struct KcNode {
    pub x: GroupElementK,
    pub y: AlgebraVector,
    pub radius: f64,
    pub g: GroupElementKC,
    pub weight: f64,
}

/// Weighted nodes on `K_ℂ`, truncated at `|Y| ≤ cutoff`.
#[derive(Clone, Debug)]
pub struct QuadratureRuleKC {
    pub nodes: Vec<KcNode>,
    pub cutoff: f64,
    pub jacobian: RadialJacobian,
    pub levels: KcLevels,
}

impl QuadratureRuleKC {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_{|Y| ≤ R} f(g) dg`, deterministic order of summation.
    pub fn integrate<F>(&self, f: F) -> C64
    where
        F: Fn(&KcNode) -> C64 + Sync,
    {
        let vals: Vec<C64> = self.nodes.par_iter().map(|n| f(n) * n.weight).collect();
        vals.iter().sum()
    }
}

/// Fraction of the mass of the density `r sinh r e^{-r²/t}` on `[0, ∞)` lying beyond `cutoff`.
///
/// This is the radial law of `|Y|` under `ν_t(g) dg`.
pub fn radial_tail_fraction(t: f64, cutoff: f64) -> f64 {
    // ∫_R^∞ r e^{ar - r²/t} dr in closed form, for a = ±1.
    let part = |a: f64| {
        let c = cutoff - a * t / 2.0;
        (a * a * t / 4.0).exp()
            * (t / 2.0 * (-c * c / t).exp() + a * t / 2.0 * (PI * t).sqrt() / 2.0 * erfc(c / t.sqrt()))
    };
    let tail = 0.5 * (part(1.0) - part(-1.0));
    let total = 0.5 * (PI * t).sqrt() * (t / 2.0) * (t / 4.0).exp();
    (tail / total).max(0.0)
}

/// `max(4√t, 3)`.
pub fn default_cutoff(t: f64) -> f64 {
    (4.0 * t.sqrt()).max(3.0)
}

/// A cutoff for integrands `h(g) ν_t(g)` with `|h| ≲ e^{growth·|Y|}`.
///
/// The radial weight is then at most `e^{(1+growth) r - r²/t}`, whose peak sits at
/// `t(1+growth)/2`; the returned radius adds 7.7√t beyond it (e^{-59} relative).
pub fn recommended_cutoff(t: f64, growth: f64) -> f64 {
    (t * (1.0 + growth) / 2.0 + 7.7 * t.sqrt()).max(default_cutoff(t))
}

/// `kc_quadrature_with` using the analytic Jacobian.
pub fn kc_quadrature(t: f64, cutoff: f64, levels: KcLevels) -> Result<QuadratureRuleKC> {
    kc_quadrature_with(t, cutoff, levels, RadialJacobian::ANALYTIC)
}

/// Tensor rule `K × S² × [0, R]` with weights `w_K · w_S² · w_r · J(r)`.
///
/// `t` only enters the cutoff check: fails with `CutoffTooSmall` if the ν_t mass
/// beyond `cutoff` exceeds 1e-10 of the total.
pub fn kc_quadrature_with(t: f64, cutoff: f64, levels: KcLevels, jacobian: RadialJacobian) -> Result<QuadratureRuleKC> {
    if !(cutoff > 0.0) || !(t > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "need t > 0 and cutoff > 0 (got t = {t}, cutoff = {cutoff})"
        )));
    }
    let tail = radial_tail_fraction(t, cutoff);
    if tail > TAIL_LIMIT {
        return Err(Error::CutoffTooSmall { cutoff, tail });
    }
    let k_rule = haar_quadrature_k(levels.k_spin);
    let (ct, wt) = gauss_legendre(levels.n_theta);
    let (rs, wr) = gauss_legendre_on(levels.n_radial, 0.0, cutoff);
    let dphi = 2.0 * PI / levels.n_phi as f64;

    let mut dirs = Vec::with_capacity(levels.n_theta * levels.n_phi);
    for (c, w) in ct.iter().zip(&wt) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for ip in 0..levels.n_phi {
            let phi = ip as f64 * dphi;
            dirs.push((AlgebraVector::new(s * phi.cos(), s * phi.sin(), *c), w * dphi));
        }
    }

    let mut fibre = Vec::with_capacity(dirs.len() * rs.len());
    for (r, w) in rs.iter().zip(&wr) {
        let jw = w * jacobian.eval(*r);
        for (n, wd) in &dirs {
            let y = *n * *r;
            fibre.push((y, *r, exp_complex(&y.times_i()), jw * wd));
        }
    }

    let mut nodes = Vec::with_capacity(k_rule.len() * fibre.len());
    for (x, wx) in k_rule.nodes.iter().zip(&k_rule.weights) {
        for (y, r, e, w) in &fibre {
            nodes.push(KcNode {
                x: *x,
                y: *y,
                radius: *r,
                g: *x * *e,
                weight: wx * w,
            });
        }
    }
    debug_assert!((k_rule.total_mass() - VOL_K).abs() < 1e-9 * VOL_K);
    Ok(QuadratureRuleKC {
        nodes,
        cutoff,
        jacobian,
        levels,
    })
}
