//! Irreducible representations of SU(2) and their holomorphic extension to SL(2,ℂ).
//!
//! The spin-`j` representation acts on homogeneous polynomials of degree
//! `n = 2j` in `(u, v)` by `(π(g)p)(w) = p(wg)`, in the orthonormal basis
//! `e_k = u^{n-k} v^k / √((n-k)! k!)`, `k = 0..=n`. Index `k` carries the
//! magnetic number `m = j - k`; this is the Condon–Shortley basis, so the usual
//! real Clebsch–Gordan coefficients decompose tensor products. The entries are
//! polynomials in the entries of `g`, which gives the analytic continuation to
//! `SL(2,ℂ)` for free.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use crate::algebra::{basis_matrix, GroupElementK, GroupElementKC, Mat2, C64, VOL_K};
use crate::diffop::LeftInvariantOperator;
use crate::error::{Error, Result};
use crate::spin::{Spin, MAX_TWICE_SPIN};

pub type CMatrix = DMatrix<C64>;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn powers(z: C64, n: u32) -> Vec<C64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..=n {
        out.push(p);
        p *= z;
    }
    out
}

/// The full spin-`j` representation matrix at an arbitrary 2×2 complex matrix.
pub fn wigner_matrix(j: Spin, g: &Mat2) -> CMatrix {
    let n = j.twice();
    let dim = j.dim();
    let (a, b, c, d) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let (pa, pb, pc, pd) = (powers(a, n), powers(b, n), powers(c, n), powers(d, n));
    let norm: Vec<f64> = (0..=n).map(|k| (factorial(n - k) * factorial(k)).sqrt()).collect();
    let mut out = CMatrix::zeros(dim, dim);
    for k in 0..=n {
        // (a + c v)^{n-k} (b + d v)^k, collected by powers of v.
        let nk = n - k;
        for i in 0..=nk {
            let left = binomial(nk, i) * pa[(nk - i) as usize] * pc[i as usize];
            for ip in 0..=k {
                let right = binomial(k, ip) * pb[(k - ip) as usize] * pd[ip as usize];
                out[((i + ip) as usize, k as usize)] += left * right;
            }
        }
        for l in 0..=n {
            out[(l as usize, k as usize)] *= norm[l as usize] / norm[k as usize];
        }
    }
    out
}

/// Entry `(k, k')` of the spin-`j` matrix; magnetic numbers are `j - k`, `j - k'`.
pub fn wigner_entry(j: Spin, k: usize, kp: usize, g: &GroupElementKC) -> Result<C64> {
    if k >= j.dim() || kp >= j.dim() {
        return Err(Error::IndexOutOfRange {
            j: j.value(),
            m: k,
            mp: kp,
        });
    }
    Ok(wigner_matrix(j, g.matrix())[(k, kp)])
}

/// Weyl character `χ_j(g) = Σ_k λ^{2j-2k}` from the eigenvalues `λ^{±1}` of `g`.
pub fn character(j: Spin, g: &GroupElementKC) -> C64 {
    let n = j.twice() as i32;
    let tau = g.matrix().trace();
    let disc = (tau * tau - 4.0).sqrt();
    let mut lam = 0.5 * (tau + disc);
    if lam.norm() < 1.0 {
        lam = 0.5 * (tau - disc);
    }
    let inv = lam.inv();
    if (lam - inv).norm() < 1e-6 {
        // λ^{-n} (1 + μ + ... + μ^n) with μ = λ², by Horner.
        let mu = lam * lam;
        let mut acc = C64::new(1.0, 0.0);
        for _ in 0..n {
            acc = acc * mu + 1.0;
        }
        acc * inv.powi(n)
    } else {
        (lam.powi(n + 1) - inv.powi(n + 1)) / (lam - inv)
    }
}

/// `χ_j` as the Chebyshev polynomial `U_{2j}(τ/2)` of the trace.
pub fn character_from_trace(twice_j: u32, tau: C64) -> C64 {
    let mut prev = C64::new(1.0, 0.0);
    if twice_j == 0 {
        return prev;
    }
    let mut cur = tau;
    for _ in 1..twice_j {
        let next = tau * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `c_j = j(j+1)`, with `Δ_K D^j = -c_j D^j`.
pub fn casimir_eigenvalue(j: Spin) -> f64 {
    j.casimir()
}

/// `dπ^j(X)` for any 2×2 matrix `X`, in the basis `e_k`.
pub fn lie_algebra_matrix(j: Spin, x: &Mat2) -> CMatrix {
    let n = j.twice() as usize;
    let (x11, x12, x21, x22) = (x[(0, 0)], x[(0, 1)], x[(1, 0)], x[(1, 1)]);
    let mut m = CMatrix::zeros(n + 1, n + 1);
    for k in 0..=n {
        m[(k, k)] = x11 * (n - k) as f64 + x22 * k as f64;
        if k < n {
            m[(k + 1, k)] = x21 * (((n - k) * (k + 1)) as f64).sqrt();
        }
        if k > 0 {
            m[(k - 1, k)] = x12 * ((k * (n - k + 1)) as f64).sqrt();
        }
    }
    m
}

/// `dπ^j` of a linear combination of words, `Σ c · M_{k_1} ⋯ M_{k_N}`.
pub fn operator_matrix(j: Spin, op: &LeftInvariantOperator) -> CMatrix {
    let dim = j.dim();
    let gens: Vec<CMatrix> = (0..3).map(|k| lie_algebra_matrix(j, &basis_matrix(k))).collect();
    let mut total = CMatrix::zeros(dim, dim);
    for (coef, word) in op.terms() {
        let mut m = CMatrix::identity(dim, dim);
        for &k in word {
            m *= &gens[k];
        }
        total += m * *coef;
    }
    total
}

/// Clebsch–Gordan coefficient `⟨j1 m1 j2 m2 | J M⟩` (Racah's formula), spins and
/// magnetic numbers given doubled.
pub fn clebsch_gordan(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tj: i32, tm: i32) -> f64 {
    if tm1 + tm2 != tm
        || tm1.abs() > tj1
        || tm2.abs() > tj2
        || tm.abs() > tj
        || tj < (tj1 - tj2).abs()
        || tj > tj1 + tj2
        || (tj1 + tj2 + tj) % 2 != 0
        || (tj1 + tm1) % 2 != 0
        || (tj2 + tm2) % 2 != 0
        || (tj + tm) % 2 != 0
    {
        return 0.0;
    }
    let f = |x: i32| factorial(x as u32);
    let (a, b, c) = ((tj1 + tj2 - tj) / 2, (tj1 - tj2 + tj) / 2, (-tj1 + tj2 + tj) / 2);
    let pre = ((tj + 1) as f64 * f(a) * f(b) * f(c) / f((tj1 + tj2 + tj) / 2 + 1)).sqrt();
    let pre = pre
        * (f((tj1 + tm1) / 2)
            * f((tj1 - tm1) / 2)
            * f((tj2 + tm2) / 2)
            * f((tj2 - tm2) / 2)
            * f((tj + tm) / 2)
            * f((tj - tm) / 2))
        .sqrt();
    let mut sum = 0.0;
    for k in 0..=(tj1 + tj2) {
        let d = [
            k,
            a - k,
            (tj1 - tm1) / 2 - k,
            (tj2 + tm2) / 2 - k,
            (tj - tj2 + tm1) / 2 + k,
            (tj - tj1 - tm2) / 2 + k,
        ];
        if d.iter().any(|&x| x < 0) {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / d.iter().map(|&x| f(x)).product::<f64>();
    }
    pre * sum
}

/// A finite sum `f = Σ_j Σ_{k,k'} C^j_{k k'} D^j_{k k'}`.
///
/// Coefficient blocks are stored per spin; missing spins are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BandLimited {
    blocks: BTreeMap<Spin, CMatrix>,
}

impl BandLimited {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        let mut f = Self::zero();
        f.blocks.insert(Spin::ZERO, CMatrix::from_element(1, 1, c));
        f
    }

    fn check_spin(j: Spin) -> Result<()> {
        if j.twice() > MAX_TWICE_SPIN {
            return Err(Error::SpinTooLarge(j.value()));
        }
        Ok(())
    }

    /// The single matrix entry `D^j_{k k'}`.
    pub fn entry(j: Spin, k: usize, kp: usize) -> Result<Self> {
        Self::check_spin(j)?;
        if k >= j.dim() || kp >= j.dim() {
            return Err(Error::IndexOutOfRange {
                j: j.value(),
                m: k,
                mp: kp,
            });
        }
        let mut block = CMatrix::zeros(j.dim(), j.dim());
        block[(k, kp)] = C64::new(1.0, 0.0);
        Self::from_block(j, block)
    }

    /// The character `χ_j = Σ_k D^j_{kk}`.
    pub fn character(j: Spin) -> Result<Self> {
        Self::check_spin(j)?;
        Self::from_block(j, CMatrix::identity(j.dim(), j.dim()))
    }

    pub fn from_block(j: Spin, block: CMatrix) -> Result<Self> {
        Self::check_spin(j)?;
        assert_eq!(block.shape(), (j.dim(), j.dim()), "block shape for spin {j}");
        let mut f = Self::zero();
        f.blocks.insert(j, block);
        Ok(f)
    }

    pub fn block(&self, j: Spin) -> Option<&CMatrix> {
        self.blocks.get(&j)
    }

    pub fn blocks(&self) -> impl Iterator<Item = (Spin, &CMatrix)> {
        self.blocks.iter().map(|(j, b)| (*j, b))
    }

    /// Largest spin with a stored block.
    pub fn jmax(&self) -> Spin {
        self.blocks.keys().next_back().copied().unwrap_or(Spin::ZERO)
    }

    /// Multiplies each block by `scale(j)`.
    pub fn map_spectrum(&self, scale: impl Fn(Spin) -> C64) -> Self {
        BandLimited {
            blocks: self.blocks.iter().map(|(j, b)| (*j, b * scale(*j))).collect(),
        }
    }

    /// Replaces each block `C` by `op(j, C)`.
    pub fn map_blocks(&self, op: impl Fn(Spin, &CMatrix) -> CMatrix) -> Self {
        BandLimited {
            blocks: self.blocks.iter().map(|(j, b)| (*j, op(*j, b))).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map_spectrum(|_| s)
    }

    /// Evaluates the holomorphic extension at any `g ∈ SL(2,ℂ)`.
    pub fn eval_kc(&self, g: &GroupElementKC) -> C64 {
        self.eval_matrix(g.matrix())
    }

    pub fn eval(&self, x: &GroupElementK) -> C64 {
        self.eval_matrix(x.matrix())
    }

    fn eval_matrix(&self, g: &Mat2) -> C64 {
        self.blocks
            .iter()
            .map(|(j, c)| c.component_mul(&wigner_matrix(*j, g)).sum())
            .sum()
    }

    /// `f(I) = Σ_j tr C^j`.
    pub fn value_at_identity(&self) -> C64 {
        self.blocks.values().map(|c| c.trace()).sum()
    }

    /// The function `x ↦ conj f(x)` on K, using
    /// `conj D^j_{k k'} = (-1)^{k'-k} D^j_{n-k, n-k'}`.
    pub fn conj_on_k(&self) -> Self {
        self.map_blocks(|j, c| {
            let n = j.twice() as usize;
            CMatrix::from_fn(n + 1, n + 1, |k, kp| {
                let sign = if (k + kp) % 2 == 0 { 1.0 } else { -1.0 };
                c[(n - k, n - kp)].conj() * sign
            })
        })
    }

    /// `Σ_j Σ |C^j|² Vol(K)/(2j+1)`.
    pub fn norm_sqr(&self) -> f64 {
        inner_product_k(self, self).re
    }

    /// Pointwise product, decomposed with Clebsch–Gordan coefficients.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (&j1, c1) in &self.blocks {
            for (&j2, c2) in &other.blocks {
                let (t1, t2) = (j1.twice() as i32, j2.twice() as i32);
                for tj in ((t1 - t2).abs()..=t1 + t2).step_by(2) {
                    let jj = Spin::from_twice(tj as u32);
                    Self::check_spin(jj)?;
                    let dim = jj.dim();
                    let mut block = CMatrix::zeros(dim, dim);
                    // D^{j1}_{ab} D^{j2}_{cd} = Σ_J ⟨ac|J M⟩⟨bd|J M'⟩ D^J_{MM'}
                    for a in 0..=t1 {
                        for b in 0..=t1 {
                            let x1 = c1[(a as usize, b as usize)];
                            if x1 == C64::new(0.0, 0.0) {
                                continue;
                            }
                            for c in 0..=t2 {
                                let tm = (t1 - 2 * a) + (t2 - 2 * c);
                                if tm.abs() > tj {
                                    continue;
                                }
                                let cg1 = clebsch_gordan(t1, t1 - 2 * a, t2, t2 - 2 * c, tj, tm);
                                if cg1 == 0.0 {
                                    continue;
                                }
                                for d in 0..=t2 {
                                    let tmp = (t1 - 2 * b) + (t2 - 2 * d);
                                    if tmp.abs() > tj {
                                        continue;
                                    }
                                    let cg2 = clebsch_gordan(t1, t1 - 2 * b, t2, t2 - 2 * d, tj, tmp);
                                    let x2 = c2[(c as usize, d as usize)];
                                    let row = ((tj - tm) / 2) as usize;
                                    let col = ((tj - tmp) / 2) as usize;
                                    block[(row, col)] += x1 * x2 * (cg1 * cg2);
                                }
                            }
                        }
                    }
                    out = &out + &Self::from_block(jj, block)?;
                }
            }
        }
        Ok(out)
    }
}

impl Add for &BandLimited {
    type Output = BandLimited;
    fn add(self, rhs: &BandLimited) -> BandLimited {
        let mut out = self.clone();
        for (j, b) in &rhs.blocks {
            out.blocks
                .entry(*j)
                .and_modify(|x| *x += b)
                .or_insert_with(|| b.clone());
        }
        out
    }
}

impl Sub for &BandLimited {
    type Output = BandLimited;
    fn sub(self, rhs: &BandLimited) -> BandLimited {
        self + &rhs.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul<C64> for &BandLimited {
    type Output = BandLimited;
    fn mul(self, rhs: C64) -> BandLimited {
        self.scale(rhs)
    }
}

/// `Af` for a left-invariant operator `A`: each block `C` becomes `C · dπ(A)^T`.
pub fn left_derivative(op: &LeftInvariantOperator, f: &BandLimited) -> BandLimited {
    f.map_blocks(|j, c| c * operator_matrix(j, op).transpose())
}

/// `⟨f₁, f₂⟩_{L²(K)} = Σ conj(c¹) c² Vol(K)/(2j+1)` by Schur orthogonality.
pub fn inner_product_k(f1: &BandLimited, f2: &BandLimited) -> C64 {
    f1.blocks
        .iter()
        .filter_map(|(j, c1)| f2.blocks.get(j).map(|c2| (j, c1, c2)))
        .map(|(j, c1, c2)| c1.dotc(c2) * (VOL_K / j.dim() as f64))
        .sum()
}

/// A band-limited function viewed through its holomorphic extension to `SL(2,ℂ)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HolomorphicObservable(pub BandLimited);

impl HolomorphicObservable {
    pub fn eval(&self, g: &GroupElementKC) -> C64 {
        self.0.eval_kc(g)
    }

    pub fn coefficients(&self) -> &BandLimited {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{exp_algebra, exp_complex, haar_quadrature_k, AlgebraVector, ComplexAlgebraVector};
    use proptest::prelude::*;

    fn random_kc(seed: [f64; 6]) -> GroupElementKC {
        let z = ComplexAlgebraVector::from_parts(
            &AlgebraVector::new(seed[0], seed[1], seed[2]),
            &AlgebraVector::new(seed[3], seed[4], seed[5]),
        );
        exp_complex(&z)
    }

    fn random_k(seed: [f64; 3]) -> GroupElementK {
        exp_algebra(&AlgebraVector(seed), 1.0)
    }

    #[test]
    fn spin_half_is_defining_representation() {
        let g = random_kc([0.3, -0.2, 0.9, 0.1, 0.4, -0.7]);
        let d = wigner_matrix(Spin::HALF, g.matrix());
        for r in 0..2 {
            for c in 0..2 {
                assert!((d[(r, c)] - g.matrix()[(r, c)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_gives_identity_matrix() {
        for tj in 0..=10 {
            let d = wigner_matrix(Spin::from_twice(tj), &Mat2::identity());
            assert_eq!(d, CMatrix::identity(tj as usize + 1, tj as usize + 1));
        }
    }

    #[test]
    fn entry_indices_are_checked() {
        let g = GroupElementKC::identity();
        assert!(matches!(
            wigner_entry(Spin::ONE, 3, 0, &g),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(BandLimited::entry(Spin::from_twice(26), 0, 0).is_err());
    }

    #[test]
    fn characters_small_spins() {
        let g = random_kc([0.5, 0.1, -0.3, 0.8, -0.2, 0.05]);
        let tr = g.matrix().trace();
        assert!((character(Spin::ZERO, &g) - 1.0).norm() < 1e-14);
        assert!((character(Spin::HALF, &g) - tr).norm() < 1e-13);
        assert!((character(Spin::ONE, &g) - (tr * tr - 1.0)).norm() < 1e-12);
        for tj in 0..8 {
            let id = character(Spin::from_twice(tj), &GroupElementKC::identity());
            assert!((id.re - (tj + 1) as f64).abs() < 1e-12 && id.im.abs() < 1e-12);
            let minus = GroupElementKC::new(-Mat2::identity()).unwrap();
            let sign = if tj % 2 == 0 { 1.0 } else { -1.0 };
            let v = character(Spin::from_twice(tj), &minus);
            assert!((v.re - sign * (tj + 1) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn character_near_degenerate_eigenvalues() {
        // Off the switch point both formulas must agree with the Chebyshev form.
        for eps in [1e-9, 3e-7, 2e-6, 1e-3] {
            let g = exp_algebra(&AlgebraVector::new(eps, 0.0, 0.0), 1.0).complexify();
            for tj in 0..=24 {
                let a = character(Spin::from_twice(tj), &g);
                let b = character_from_trace(tj, g.matrix().trace());
                assert!((a - b).norm() < 1e-8 * (tj + 1) as f64, "eps {eps} tj {tj}");
            }
        }
    }

    #[test]
    fn casimir_from_finite_differences() {
        // Σ_k d²/ds² χ_j(x e^{s X_k}) at s = 0 equals -c_j χ_j(x).
        let x = random_k([0.4, -1.1, 0.6]).complexify();
        let h = 1e-3;
        for j in [Spin::ZERO, Spin::HALF, Spin::ONE] {
            let mut lap = C64::new(0.0, 0.0);
            for k in 0..3 {
                let at = |s: f64| character(j, &(x * exp_algebra(&AlgebraVector::basis(k), s)));
                lap += (at(h) - at(0.0) * 2.0 + at(-h)) / (h * h);
            }
            let want = -casimir_eigenvalue(j) * character(j, &x);
            assert!((lap - want).norm() < 1e-5, "j = {j}: {lap} vs {want}");
        }
        assert_eq!(casimir_eigenvalue(Spin::ZERO), 0.0);
        assert_eq!(casimir_eigenvalue(Spin::HALF), 0.75);
        assert_eq!(casimir_eigenvalue(Spin::ONE), 2.0);
    }

    #[test]
    fn laplacian_acts_diagonally() {
        let lap = LeftInvariantOperator::laplacian();
        for tj in 0..=6 {
            let j = Spin::from_twice(tj);
            let m = operator_matrix(j, &lap);
            let want = CMatrix::identity(j.dim(), j.dim()) * C64::new(-j.casimir(), 0.0);
            assert!((m - want).norm() < 1e-12);
        }
        let c = BandLimited::constant(C64::new(2.0, 1.0));
        let d = left_derivative(&LeftInvariantOperator::generator(2), &c);
        assert_eq!(d.norm_sqr(), 0.0);
    }

    #[test]
    fn left_derivative_matches_finite_difference() {
        let f = &BandLimited::entry(Spin::ONE, 0, 2).unwrap() + &BandLimited::entry(Spin::from_twice(3), 1, 2).unwrap();
        let x = random_k([0.2, 0.7, -0.4]);
        for k in 0..3 {
            let df = left_derivative(&LeftInvariantOperator::generator(k), &f);
            let h = 1e-4;
            let xk = AlgebraVector::basis(k);
            let fd = (f.eval(&(x * exp_algebra(&xk, h))) - f.eval(&(x * exp_algebra(&xk, -h)))) / (2.0 * h);
            assert!((df.eval(&x) - fd).norm() < 1e-7);
        }
    }

    #[test]
    fn inner_product_matches_quadrature() {
        let rule = haar_quadrature_k(Spin::from_twice(3));
        let f1 = &BandLimited::entry(Spin::HALF, 0, 0).unwrap()
            + &BandLimited::entry(Spin::from_twice(3), 1, 2)
                .unwrap()
                .scale(C64::new(0.3, -0.4));
        let f2 = &BandLimited::character(Spin::from_twice(3)).unwrap()
            + &BandLimited::entry(Spin::HALF, 0, 0).unwrap().scale(C64::new(0.0, 2.0));
        let q = rule.integrate(|x| f1.eval(x).conj() * f2.eval(x));
        assert!((q - inner_product_k(&f1, &f2)).norm() < 1e-10);

        let d = BandLimited::entry(Spin::HALF, 0, 0).unwrap();
        assert!((inner_product_k(&d, &d).re - VOL_K / 2.0).abs() < 1e-12);
        let orth = inner_product_k(
            &BandLimited::character(Spin::ONE).unwrap(),
            &BandLimited::character(Spin::HALF).unwrap(),
        );
        assert_eq!(orth, C64::new(0.0, 0.0));
    }

    #[test]
    fn schur_orthogonality_up_to_cutoff() {
        let jmax = Spin::from_twice(4);
        let rule = haar_quadrature_k(jmax);
        let mats: Vec<Vec<CMatrix>> = (0..=jmax.twice())
            .map(|tj| {
                rule.nodes
                    .iter()
                    .map(|x| wigner_matrix(Spin::from_twice(tj), x.matrix()))
                    .collect()
            })
            .collect();
        let mut worst: f64 = 0.0;
        for t1 in 0..=jmax.twice() as usize {
            for t2 in 0..=jmax.twice() as usize {
                for (a, b) in [(0, 0), (0, t1), (t1 / 2, t1)] {
                    for (c, d) in [(0, 0), (t2, 0), (t2 / 2, t2 / 2)] {
                        let q: C64 = rule
                            .weights
                            .iter()
                            .enumerate()
                            .map(|(i, w)| mats[t1][i][(a, b)].conj() * mats[t2][i][(c, d)] * *w)
                            .sum();
                        let want = if t1 == t2 && a == c && b == d {
                            VOL_K / (t1 + 1) as f64
                        } else {
                            0.0
                        };
                        worst = worst.max((q - want).norm());
                    }
                }
            }
        }
        assert!(worst < 1e-10, "worst Schur residual {worst:e}");
    }

    #[test]
    fn conjugation_rule_on_k() {
        let x = random_k([1.3, -0.2, 0.5]);
        let f = &BandLimited::entry(Spin::from_twice(3), 0, 1).unwrap()
            + &BandLimited::entry(Spin::ONE, 2, 1).unwrap().scale(C64::new(0.5, 0.5));
        assert!((f.conj_on_k().eval(&x) - f.eval(&x).conj()).norm() < 1e-13);
    }

    #[test]
    fn product_matches_pointwise() {
        let f = &BandLimited::entry(Spin::HALF, 0, 1).unwrap()
            + &BandLimited::character(Spin::ONE).unwrap().scale(C64::new(0.2, 0.0));
        let h =
            &BandLimited::entry(Spin::from_twice(3), 2, 0).unwrap() + &BandLimited::entry(Spin::HALF, 1, 1).unwrap();
        let p = f.product(&h).unwrap();
        for seed in [[0.1, 0.2, 0.3, -0.4, 0.5, 0.1], [1.0, -0.3, 0.2, 0.0, 0.2, 0.9]] {
            let g = random_kc(seed);
            assert!((p.eval_kc(&g) - f.eval_kc(&g) * h.eval_kc(&g)).norm() < 1e-10);
        }
    }

    #[test]
    fn product_rule_for_derivatives() {
        let f = BandLimited::entry(Spin::HALF, 0, 1).unwrap();
        let h = BandLimited::entry(Spin::ONE, 2, 0).unwrap();
        let x3 = LeftInvariantOperator::generator(2);
        let lhs = left_derivative(&x3, &f.product(&h).unwrap());
        let rhs = &left_derivative(&x3, &f).product(&h).unwrap() + &f.product(&left_derivative(&x3, &h)).unwrap();
        let rule = haar_quadrature_k(Spin::from_twice(3));
        let diff = &lhs - &rhs;
        let q = rule.integrate(|x| C64::new(diff.eval(x).norm_sqr(), 0.0));
        assert!(q.re.sqrt() < 1e-10);
    }

    #[test]
    fn holomorphic_restriction_and_cauchy_riemann() {
        let f = &BandLimited::entry(Spin::ONE, 0, 1).unwrap() + &BandLimited::character(Spin::HALF).unwrap();
        let obs = HolomorphicObservable(f.clone());
        let x = random_k([0.3, 0.3, -0.9]);
        assert!((obs.eval(&x.complexify()) - f.eval(&x)).norm() < 1e-12);

        let g = random_kc([0.2, -0.5, 0.4, 0.6, 0.1, -0.3]);
        let h = 1e-5;
        for k in 0..3 {
            let xk = AlgebraVector::basis(k);
            let step = |z: ComplexAlgebraVector| obs.eval(&(g * exp_complex(&z)));
            let real = |s: f64| step(ComplexAlgebraVector::from(xk * s));
            let imag = |s: f64| step((xk * s).times_i());
            let dx = (real(h) - real(-h)) / (2.0 * h);
            let djx = (imag(h) - imag(-h)) / (2.0 * h);
            assert!((djx - C64::new(0.0, 1.0) * dx).norm() < 1e-8);
        }
    }

    proptest! {
        #[test]
        fn unitary_on_k(seed in prop::array::uniform3(-3.0f64..3.0), tj in 0u32..=12) {
            let x = random_k(seed);
            let d = wigner_matrix(Spin::from_twice(tj), x.matrix());
            let e = &d * d.adjoint() - CMatrix::identity(d.nrows(), d.nrows());
            prop_assert!(e.norm() < 1e-10);
        }

        #[test]
        fn homomorphism(a in prop::array::uniform6(-1.0f64..1.0), b in prop::array::uniform6(-1.0f64..1.0), tj in 0u32..=6) {
            let (g, h) = (random_kc(a), random_kc(b));
            let j = Spin::from_twice(tj);
            let lhs = wigner_matrix(j, (g * h).matrix());
            let rhs = wigner_matrix(j, g.matrix()) * wigner_matrix(j, h.matrix());
            prop_assert!((lhs - &rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
        }

        #[test]
        fn trace_equals_character(a in prop::array::uniform6(-1.0f64..1.0), tj in 0u32..=12) {
            let g = random_kc(a);
            let j = Spin::from_twice(tj);
            let tr = wigner_matrix(j, g.matrix()).trace();
            let ch = character(j, &g);
            prop_assert!((tr - ch).norm() < 1e-9 * (1.0 + ch.norm()));
        }
    }
}
