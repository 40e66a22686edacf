//! Left-invariant differential operators: words in `X_1, X_2, X_3`, their
//! transposes, and the symbols `φ_{1,A} = A_ℂ^{tr} ν_t / ν_t`.

use std::fmt;

use crate::algebra::{exp_complex, polar_radius, AlgebraVector, ComplexAlgebraVector, GroupElementKC, C64};
use crate::error::{Error, Result};
use crate::heat::HeatKernelKC;
use crate::repr::{left_derivative, HolomorphicObservable};

/// Largest word length accepted by the finite-difference symbol evaluator.
pub const MAX_FD_DEGREE: usize = 4;

/// `Σ c · X_{k_1} X_{k_2} ⋯ X_{k_N}` with `X_{k_N}` acting first; indices are 0-based.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LeftInvariantOperator {
    terms: Vec<(C64, Vec<usize>)>,
}

impl LeftInvariantOperator {
    pub fn identity() -> Self {
        Self::word(C64::new(1.0, 0.0), vec![])
    }

    /// The vector field `X_k`.
    pub fn generator(k: usize) -> Self {
        Self::word(C64::new(1.0, 0.0), vec![k])
    }

    /// `Δ_K = X_1² + X_2² + X_3²`.
    pub fn laplacian() -> Self {
        Self::from_terms((0..3).map(|k| (C64::new(1.0, 0.0), vec![k, k])).collect())
    }

    pub fn word(coef: C64, word: Vec<usize>) -> Self {
        Self::from_terms(vec![(coef, word)])
    }

    pub fn from_terms(terms: Vec<(C64, Vec<usize>)>) -> Self {
        for (_, w) in &terms {
            assert!(w.iter().all(|&k| k < 3), "word index out of range: {w:?}");
        }
        LeftInvariantOperator { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&C64, &Vec<usize>)> {
        self.terms.iter().map(|(c, w)| (c, w))
    }

    /// Longest word length.
    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, w)| w.len()).max().unwrap_or(0)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_terms(self.terms.iter().map(|(c, w)| (c * s, w.clone())).collect())
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(terms)
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, u) in &self.terms {
            for (b, v) in &other.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                terms.push((a * b, w));
            }
        }
        Self::from_terms(terms)
    }

    /// `(X_{k_1} ⋯ X_{k_N})^{tr} = (-1)^N X_{k_N} ⋯ X_{k_1}`, extended linearly.
    pub fn transpose(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(c, w)| {
                    let sign = if w.len() % 2 == 0 { 1.0 } else { -1.0 };
                    (c * sign, w.iter().rev().copied().collect())
                })
                .collect(),
        )
    }
}

impl fmt::Display for LeftInvariantOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, w)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if w.is_empty() {
                write!(f, "I")?;
            }
            for k in w {
                write!(f, "X{}", k + 1)?;
            }
        }
        Ok(())
    }
}

/// `A_ℂ F` for holomorphic `F`; on holomorphic functions this is `A` acting on
/// the coefficients of the analytic continuation.
pub fn complexify_apply(op: &LeftInvariantOperator, f: &HolomorphicObservable) -> HolomorphicObservable {
    HolomorphicObservable(left_derivative(op, &f.0))
}

/// Default finite-difference step for ν_t at time `t` and word length `degree`.
///
/// Truncation error scales like `h⁴` after extrapolation and round-off like
/// `ε/h^degree`, so longer words take larger steps.
pub fn default_step(t: f64, degree: usize) -> f64 {
    let c = if degree <= 2 { 5e-3 } else { 2e-2 };
    c * t.sqrt().min(1.0)
}

/// `(A_ℂ^{tr} ν_t)(g)` by nested central differences with Richardson extrapolation.
pub fn apply_transpose_to_nu(op: &LeftInvariantOperator, t: f64, g: &GroupElementKC) -> Result<C64> {
    apply_transpose_to_nu_with(op, &HeatKernelKC::analytic(t), g, default_step(t, op.degree()))
}

/// As [`apply_transpose_to_nu`] for an explicit kernel and base step `h`.
///
/// Each factor `X_ℂ = ½(X - iJX)` splits a word of length `N` into `2^N`
/// mixed partials `∂_{s_1} ⋯ ∂_{s_N} ν(g e^{s_1 Z_1} ⋯ e^{s_N Z_N})` with
/// `Z_i ∈ {X_k, iX_k}`, each taken by a product of central differences.
pub fn apply_transpose_to_nu_with(
    op: &LeftInvariantOperator,
    kernel: &HeatKernelKC,
    g: &GroupElementKC,
    h: f64,
) -> Result<C64> {
    let degree = op.degree();
    if degree > MAX_FD_DEGREE {
        return Err(Error::DegreeTooLarge(degree));
    }
    let floor = 1e-6 * (1.0 + polar_radius(g));
    if h / 2.0 < floor {
        return Err(Error::StepUnderflow { step: h / 2.0, floor });
    }
    let tr = op.transpose();
    let d_h = transpose_fd(&tr, kernel, g, h);
    let d_h2 = transpose_fd(&tr, kernel, g, h / 2.0);
    Ok((d_h2 * 4.0 - d_h) / 3.0)
}

fn transpose_fd(op: &LeftInvariantOperator, kernel: &HeatKernelKC, g: &GroupElementKC, h: f64) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    for (coef, word) in op.terms() {
        let n = word.len();
        for mask in 0..(1usize << n) {
            // Bit i set: direction iX_{k_i} with factor -i/2, else X_{k_i} with 1/2.
            let mut factor = *coef;
            let dirs: Vec<ComplexAlgebraVector> = word
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    let x = AlgebraVector::basis(k);
                    if mask >> i & 1 == 1 {
                        factor *= C64::new(0.0, -0.5);
                        x.times_i()
                    } else {
                        factor *= 0.5;
                        ComplexAlgebraVector::from(x)
                    }
                })
                .collect();
            total += factor * mixed_partial(kernel, g, &dirs, h);
        }
    }
    total
}

fn mixed_partial(kernel: &HeatKernelKC, g: &GroupElementKC, dirs: &[ComplexAlgebraVector], h: f64) -> f64 {
    let n = dirs.len();
    let mut sum = 0.0;
    for signs in 0..(1usize << n) {
        let mut p = *g;
        let mut parity = 1.0;
        for (i, d) in dirs.iter().enumerate() {
            let s = if signs >> i & 1 == 1 {
                parity = -parity;
                -h
            } else {
                h
            };
            p = p * exp_complex(&d.scale(C64::new(s, 0.0)));
        }
        sum += parity * kernel.eval(&p);
    }
    sum / (2.0 * h).powi(n as i32)
}

/// `φ_{1,A}(g) = (A_ℂ^{tr} ν_t)(g) / ν_t(g)`.
pub fn symbol_phi1(op: &LeftInvariantOperator, t: f64, g: &GroupElementKC) -> Result<C64> {
    let kernel = HeatKernelKC::analytic(t);
    Ok(apply_transpose_to_nu_with(op, &kernel, g, default_step(t, op.degree()))? / kernel.eval(g))
}

/// `φ_{1,A}` on the imaginary fibre `e^{i r X_3}` at each radius in `radii`.
pub fn radial_symbol_profile(op: &LeftInvariantOperator, t: f64, radii: &[f64]) -> Result<Vec<C64>> {
    radii
        .iter()
        .map(|&r| {
            let g = exp_complex(&(AlgebraVector::basis(2) * r).times_i());
            symbol_phi1(op, t, &g)
        })
        .collect()
}

/// Least-squares fit `v ≈ a + b r²`; returns `(a, b, max |residual|)`.
pub fn fit_in_r_squared(radii: &[f64], values: &[f64]) -> (f64, f64, f64) {
    let n = radii.len() as f64;
    let xs: Vec<f64> = radii.iter().map(|r| r * r).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = values.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(values).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let worst = xs
        .iter()
        .zip(values)
        .map(|(x, y)| (y - a - b * x).abs())
        .fold(0.0, f64::max);
    (a, b, worst)
}
