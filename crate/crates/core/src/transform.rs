//! The Segal–Bargmann transforms `C_t` and `B_{s,t}` on band-limited functions.
//!
//! Both are heat flow for time `t` followed by analytic continuation, so on
//! coefficients they multiply the spin-`j` block by `e^{-t c_j/2}`.

use rayon::prelude::*;

use crate::algebra::{kc_quadrature, GroupElementK, KcLevels, QuadratureRuleKC, C64, VOL_K};
use crate::error::{Error, Result};
use crate::heat::{heat_flow, FlowDirection, HeatKernelK, HeatKernelKC};
use crate::repr::{wigner_matrix, BandLimited, CMatrix, HolomorphicObservable};
use crate::spin::Spin;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    C,
    B,
}

/// A function on K together with its transform.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformedPair {
    pub f: BandLimited,
    pub big_f: HolomorphicObservable,
    pub t: f64,
    pub s: f64,
    pub kind: TransformKind,
}

/// `C_t f`: `e^{tΔ/2} f` continued to `SL(2,ℂ)`.
pub fn transform_c(t: f64, f: &BandLimited) -> Result<HolomorphicObservable> {
    if !(t > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "transform time must be positive, got {t}"
        )));
    }
    Ok(HolomorphicObservable(heat_flow(t, f, FlowDirection::Forward)?))
}

/// `B_{s,t} f`; same coefficient map as `C_t`, defined for `s > t/2`.
pub fn transform_b(s: f64, t: f64, f: &BandLimited) -> Result<HolomorphicObservable> {
    if !(s > t / 2.0) {
        return Err(Error::ParameterDomain(format!(
            "B_(s,t) needs s > t/2, got s = {s}, t = {t}"
        )));
    }
    transform_c(t, f)
}

/// Builds the pair `(f, C_t f)` or `(f, B_{s,t} f)`.
pub fn transform_pair(kind: TransformKind, s: f64, t: f64, f: &BandLimited) -> Result<TransformedPair> {
    let big_f = match kind {
        TransformKind::C => transform_c(t, f)?,
        TransformKind::B => transform_b(s, t, f)?,
    };
    Ok(TransformedPair {
        f: f.clone(),
        big_f,
        t,
        s,
        kind,
    })
}

/// `C_t⁻¹ F` as coefficient division, guarded against amplification above 1e6.
pub fn inverse_c(t: f64, big_f: &HolomorphicObservable) -> Result<BandLimited> {
    if !(t > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "transform time must be positive, got {t}"
        )));
    }
    heat_flow(t, &big_f.0, FlowDirection::Backward)
}

/// `(C_t^* F)(x) = ∫ conj ρ_t(g x⁻¹) F(g) ν_t(g) dg` evaluated with a `K_ℂ` rule.
///
/// On the range of `C_t` this is `C_t⁻¹ F`; the integral is truncated at the
/// rule's radial cutoff. `F` must have spin at most the rule's `k_spin`: the
/// `K` integral removes every higher spin of the kernel, so it is dropped.
pub fn adjoint_integral(
    t: f64,
    big_f: &HolomorphicObservable,
    x: &GroupElementK,
    rule: &QuadratureRuleKC,
) -> Result<C64> {
    let kernel = HeatKernelK::with_twice_jmax(t, rule.levels.k_spin.twice())?;
    let nu = HeatKernelKC::analytic(t);
    let x_inv = x.inverse();
    let vals: Vec<C64> = rule
        .nodes
        .par_iter()
        .map(|n| {
            let rho = kernel.eval_unchecked(&(n.g * x_inv));
            rho.conj() * big_f.eval(&n.g) * (nu.radial(n.radius) * n.weight)
        })
        .collect();
    Ok(vals.iter().sum())
}

/// `⟨F₁, F₂⟩` in `L²(K_ℂ, ν_t)` by quadrature.
pub fn nu_inner_product(
    t: f64,
    f1: &HolomorphicObservable,
    f2: &HolomorphicObservable,
    rule: &QuadratureRuleKC,
) -> C64 {
    let nu = HeatKernelKC::analytic(t);
    rule.integrate(|n| f1.eval(&n.g).conj() * f2.eval(&n.g) * nu.radial(n.radius))
}

/// Largest entry of `|⟨C_t D_a, C_t D_b⟩_ν - ⟨D_a, D_b⟩_K|`, relative to
/// `Vol(K)/(2j_max+1)`, over all matrix entries `D_a, D_b` of spin at most `max_spin`.
pub fn unitarity_gram_defect(t: f64, max_spin: Spin, rule: &QuadratureRuleKC) -> f64 {
    let spins: Vec<Spin> = (0..=max_spin.twice()).map(Spin::from_twice).collect();
    let dims: usize = spins.iter().map(|j| j.dim() * j.dim()).sum();
    let damp: Vec<f64> = spins
        .iter()
        .flat_map(|j| std::iter::repeat_n((-t * j.casimir() / 2.0).exp(), j.dim() * j.dim()))
        .collect();
    let nu = HeatKernelKC::analytic(t);
    let gram = rule
        .nodes
        .par_chunks(1024)
        .map(|chunk| {
            let mut g = CMatrix::zeros(dims, dims);
            let mut v = nalgebra::DVector::<C64>::zeros(dims);
            for n in chunk {
                let mut i = 0;
                for &j in &spins {
                    let d = wigner_matrix(j, n.g.matrix());
                    for a in 0..j.dim() {
                        for b in 0..j.dim() {
                            v[i] = (d[(a, b)] * damp[i]).conj();
                            i += 1;
                        }
                    }
                }
                let w = n.weight * nu.radial(n.radius);
                // G[a,b] += w conj(v_a) v_b with v stored conjugated.
                g.gerc(C64::new(w, 0.0), &v, &v, C64::new(1.0, 0.0));
            }
            g
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(CMatrix::zeros(dims, dims), |acc, g| acc + g);
    let mut i = 0;
    let mut want = vec![0.0; dims];
    for j in &spins {
        for _ in 0..j.dim() * j.dim() {
            want[i] = VOL_K / j.dim() as f64;
            i += 1;
        }
    }
    let scale = VOL_K / max_spin.dim() as f64;
    let mut worst = 0.0f64;
    for a in 0..dims {
        for b in 0..dims {
            let target = if a == b { want[a] } else { 0.0 };
            worst = worst.max((gram[(a, b)] - target).norm() / scale);
        }
    }
    worst
}

/// Inverts `C_t` through [`adjoint_integral`] at each `x`, growing the cutoff from
/// `cutoff` by one until no value moves by more than `tol`.
///
/// Returns the values and the cutoff at which they settled.
pub fn adjoint_inversion(
    t: f64,
    big_f: &HolomorphicObservable,
    xs: &[GroupElementK],
    levels: KcLevels,
    cutoff: f64,
    tol: f64,
) -> Result<(Vec<C64>, f64)> {
    let eval = |r: f64| -> Result<Vec<C64>> {
        let rule = kc_quadrature(t, r, levels)?;
        xs.iter().map(|x| adjoint_integral(t, big_f, x, &rule)).collect()
    };
    let mut r = cutoff;
    let mut prev = eval(r)?;
    for _ in 0..12 {
        let next = eval(r + 1.0)?;
        let moved = prev.iter().zip(&next).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        r += 1.0;
        prev = next;
        if moved < tol {
            return Ok((prev, r));
        }
    }
    Err(Error::CutoffTooSmall {
        cutoff: r,
        tail: f64::NAN,
    })
}
