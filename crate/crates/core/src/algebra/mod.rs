//! Arithmetic on 𝔰𝔲(2), SU(2) and SL(2,ℂ).
//!
//! The Lie algebra basis is `X_k = -(i/2) σ_k` with the Ad-invariant inner
//! product `⟨X, Y⟩ = -2 tr(XY)`, under which the `X_k` are orthonormal. With
//! this metric the one-parameter subgroup `exp(s X_3)` closes at `s = 4π`, so
//! SU(2) is a round 3-sphere of radius 2 and has volume [`VOL_K`] = 16π².
//!
//! Group elements are plain 2×2 complex matrices. `GroupElementK` is unitary
//! with unit determinant, `GroupElementKC` only has unit determinant.

mod quadrature;

pub use quadrature::{
    default_cutoff, haar_quadrature_k, kc_quadrature, kc_quadrature_with, radial_tail_fraction, recommended_cutoff,
    KcLevels, KcNode, QuadratureRuleK, QuadratureRuleKC, RadialJacobian, TAIL_LIMIT,
};

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;

/// Riemannian volume of SU(2) for the metric `⟨X, Y⟩ = -2 tr(XY)`.
pub const VOL_K: f64 = 16.0 * PI * PI;

const I: C64 = C64::new(0.0, 1.0);

/// Matrix of the basis vector `X_k`, `k ∈ {0, 1, 2}`.
pub fn basis_matrix(k: usize) -> Mat2 {
    let z = C64::new(0.0, 0.0);
    let h = C64::new(0.0, -0.5);
    match k {
        0 => Mat2::new(z, h, h, z),
        1 => Mat2::new(z, C64::new(-0.5, 0.0), C64::new(0.5, 0.0), z),
        2 => Mat2::new(h, z, z, -h),
        _ => panic!("basis index {k} out of range 0..3"),
    }
}

/// `Σ z_k X_k` for complex coordinates.
fn combine(z: [C64; 3]) -> Mat2 {
    // -(i/2) (z_1 σ_1 + z_2 σ_2 + z_3 σ_3)
    let h = C64::new(0.0, -0.5);
    Mat2::new(h * z[2], h * (z[0] - I * z[1]), h * (z[0] + I * z[1]), -h * z[2])
}

/// An element of 𝔰𝔲(2) in the orthonormal basis `X_1, X_2, X_3`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AlgebraVector(pub [f64; 3]);

impl AlgebraVector {
    pub const ZERO: AlgebraVector = AlgebraVector([0.0; 3]);

    pub fn new(y1: f64, y2: f64, y3: f64) -> Self {
        AlgebraVector([y1, y2, y3])
    }

    /// The unit vector `X_k`, `k ∈ {0, 1, 2}`.
    pub fn basis(k: usize) -> Self {
        let mut c = [0.0; 3];
        c[k] = 1.0;
        AlgebraVector(c)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn to_matrix(&self) -> Mat2 {
        combine(self.0.map(|y| C64::new(y, 0.0)))
    }

    /// Coordinates of an anti-Hermitian traceless matrix, `y_k = ⟨X_k, M⟩`.
    pub fn from_matrix(m: &Mat2) -> Self {
        AlgebraVector(std::array::from_fn(|k| inner_product(&basis_matrix(k), m)))
    }

    /// `Y ↦ iY`, embedding 𝔨 into `i𝔨 ⊂ 𝔰𝔩(2,ℂ)`.
    pub fn times_i(&self) -> ComplexAlgebraVector {
        ComplexAlgebraVector(self.0.map(|y| C64::new(0.0, y)))
    }
}

/// `⟨A, B⟩ = -2 Re tr(AB)`.
pub fn inner_product(a: &Mat2, b: &Mat2) -> f64 {
    -2.0 * (a * b).trace().re
}

impl Add for AlgebraVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        AlgebraVector(std::array::from_fn(|k| self.0[k] + rhs.0[k]))
    }
}

impl Sub for AlgebraVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        AlgebraVector(std::array::from_fn(|k| self.0[k] - rhs.0[k]))
    }
}

impl Neg for AlgebraVector {
    type Output = Self;
    fn neg(self) -> Self {
        AlgebraVector(self.0.map(|y| -y))
    }
}

impl Mul<f64> for AlgebraVector {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        AlgebraVector(self.0.map(|y| y * rhs))
    }
}

/// An element `Σ z_k X_k` of 𝔰𝔩(2,ℂ) = 𝔨 + i𝔨.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexAlgebraVector(pub [C64; 3]);

impl ComplexAlgebraVector {
    /// `re + i·im`.
    pub fn from_parts(re: &AlgebraVector, im: &AlgebraVector) -> Self {
        ComplexAlgebraVector(std::array::from_fn(|k| C64::new(re.0[k], im.0[k])))
    }

    pub fn to_matrix(&self) -> Mat2 {
        combine(self.0)
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexAlgebraVector(self.0.map(|z| z * s))
    }
}

impl From<AlgebraVector> for ComplexAlgebraVector {
    fn from(y: AlgebraVector) -> Self {
        ComplexAlgebraVector(y.0.map(|y| C64::new(y, 0.0)))
    }
}

/// An element of SU(2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElementK(Mat2);

/// An element of SL(2,ℂ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElementKC(Mat2);

impl GroupElementK {
    pub fn identity() -> Self {
        GroupElementK(Mat2::identity())
    }

    /// Validates unitarity and determinant to 1e-12.
    pub fn new(m: Mat2) -> Result<Self> {
        let x = GroupElementK(m);
        let drift = x.unitarity_defect();
        if !(drift <= 1e-12) {
            return Err(Error::ParameterDomain(format!(
                "matrix is not in SU(2) (defect {drift:e})"
            )));
        }
        Ok(x)
    }

    /// `e^{α X_3} e^{β X_2} e^{γ X_3}`.
    pub fn from_euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        let a = exp_algebra(&AlgebraVector::basis(2), alpha);
        let b = exp_algebra(&AlgebraVector::basis(1), beta);
        let c = exp_algebra(&AlgebraVector::basis(2), gamma);
        a * b * c
    }

    /// Unit quaternion `(q0, q)` ↦ `q0 I + Σ 2 q_k X_k`, normalised.
    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let q = q.map(|v| v / n);
        let mut m = Mat2::identity() * C64::new(q[0], 0.0);
        for k in 0..3 {
            m += basis_matrix(k) * C64::new(2.0 * q[k + 1], 0.0);
        }
        GroupElementK(m)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        GroupElementK(self.0.adjoint())
    }

    /// `max(‖U†U - I‖_F, |det U - 1|)`.
    pub fn unitarity_defect(&self) -> f64 {
        let u = (self.0.adjoint() * self.0 - Mat2::identity()).norm();
        let d = (self.0.determinant() - C64::new(1.0, 0.0)).norm();
        u.max(d)
    }

    /// Nearest element of SU(2) in the quaternion parametrisation.
    pub fn reproject(&self) -> Self {
        let m = &self.0;
        let a = 0.5 * (m[(0, 0)] + m[(1, 1)].conj());
        let b = 0.5 * (m[(0, 1)] - m[(1, 0)].conj());
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / n, b / n);
        GroupElementK(Mat2::new(a, b, -b.conj(), a.conj()))
    }

    pub fn complexify(&self) -> GroupElementKC {
        GroupElementKC(self.0)
    }
}

impl GroupElementKC {
    pub fn identity() -> Self {
        GroupElementKC(Mat2::identity())
    }

    /// Validates `det = 1` to 1e-10.
    pub fn new(m: Mat2) -> Result<Self> {
        let d = m.determinant();
        if !((d - C64::new(1.0, 0.0)).norm() <= 1e-10) {
            return Err(Error::ParameterDomain(format!("matrix is not in SL(2,C) (det = {d})")));
        }
        Ok(GroupElementKC(m))
    }

    /// Wraps a matrix without checking the determinant.
    pub fn from_matrix_unchecked(m: Mat2) -> Self {
        GroupElementKC(m)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// Inverse of a determinant-one matrix (the adjugate).
    pub fn inverse(&self) -> Self {
        let m = &self.0;
        GroupElementKC(Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]))
    }

    /// Rescales by `det^{-1/2}`; removes determinant drift.
    pub fn reproject(&self) -> Self {
        let d = self.0.determinant().sqrt();
        GroupElementKC(self.0 / d)
    }

    /// `x · e^{iY}`.
    pub fn from_polar(x: &GroupElementK, y: &AlgebraVector) -> Self {
        GroupElementKC(x.0 * exp_complex(&y.times_i()).0)
    }
}

impl Mul for GroupElementK {
    type Output = GroupElementK;
    fn mul(self, rhs: Self) -> Self {
        GroupElementK(self.0 * rhs.0)
    }
}

impl Mul for GroupElementKC {
    type Output = GroupElementKC;
    fn mul(self, rhs: Self) -> Self {
        GroupElementKC(self.0 * rhs.0)
    }
}

impl Mul<GroupElementK> for GroupElementKC {
    type Output = GroupElementKC;
    fn mul(self, rhs: GroupElementK) -> Self {
        GroupElementKC(self.0 * rhs.0)
    }
}

impl Mul<GroupElementKC> for GroupElementK {
    type Output = GroupElementKC;
    fn mul(self, rhs: GroupElementKC) -> GroupElementKC {
        GroupElementKC(self.0 * rhs.0)
    }
}

impl From<GroupElementK> for GroupElementKC {
    fn from(x: GroupElementK) -> Self {
        x.complexify()
    }
}

/// `exp(scale · Y)` in closed form:
/// `cos(θ/2) I + (2 sin(θ/2)/θ) · scale·Y` with `θ = |scale·Y|`.
pub fn exp_algebra(y: &AlgebraVector, scale: f64) -> GroupElementK {
    let y = *y * scale;
    let theta = y.norm();
    let half = 0.5 * theta;
    let sinc = if half < 1e-4 {
        // sin(h)/h
        1.0 - half * half / 6.0 + half.powi(4) / 120.0
    } else {
        half.sin() / half
    };
    let m = Mat2::identity() * C64::new(half.cos(), 0.0) + y.to_matrix() * C64::new(sinc, 0.0);
    GroupElementK(m)
}

/// `exp(Z)` for `Z ∈ 𝔰𝔩(2,ℂ)`: with `q² = -det Z`, `exp Z = cosh q I + (sinh q / q) Z`.
pub fn exp_complex(z: &ComplexAlgebraVector) -> GroupElementKC {
    let m = z.to_matrix();
    let q2 = -m.determinant();
    let (ch, sh_q) = if q2.norm() < 1e-6 {
        let q4 = q2 * q2;
        (1.0 + q2 / 2.0 + q4 / 24.0, 1.0 + q2 / 6.0 + q4 / 120.0)
    } else {
        let q = q2.sqrt();
        (q.cosh(), q.sinh() / q)
    };
    GroupElementKC(Mat2::identity() * ch + m * sh_q)
}

/// Polar decomposition `g = x · e^{iY}`.
///
/// With `P = g†g = e^{2iY} = a I + v·σ`, the radius is `|Y| = asinh |v|` and the
/// direction of `Y` is `v/|v|`; then `x = g e^{-iY}`.
pub fn polar_decompose(g: &GroupElementKC) -> Result<(GroupElementK, AlgebraVector)> {
    let det = g.0.determinant();
    if !(det.norm() > 1e-12) || !det.re.is_finite() {
        return Err(Error::NonInvertible(det.norm()));
    }
    let g = g.reproject();
    let (r, dir) = polar_parts(&g.0);
    let y = dir * r;
    let x = g.0 * exp_complex(&(-y).times_i()).0;
    Ok((GroupElementK(x), y))
}

/// Radius `|Y|` of the polar decomposition of a determinant-one matrix.
pub fn polar_radius(g: &GroupElementKC) -> f64 {
    polar_parts(&g.0).0
}

fn polar_parts(g: &Mat2) -> (f64, AlgebraVector) {
    let p = g.adjoint() * g;
    let v1 = 0.5 * (p[(1, 0)].re + p[(0, 1)].re);
    let v2 = 0.5 * (p[(1, 0)].im - p[(0, 1)].im);
    let v3 = 0.5 * (p[(0, 0)].re - p[(1, 1)].re);
    let v = AlgebraVector::new(v1, v2, v3);
    let nv = v.norm();
    if nv == 0.0 {
        return (0.0, AlgebraVector::ZERO);
    }
    (nv.asinh(), v * (1.0 / nv))
}

/// `Ad_x Y = x Y x⁻¹`.
pub fn ad_action(x: &GroupElementK, y: &AlgebraVector) -> AlgebraVector {
    AlgebraVector::from_matrix(&(x.0 * y.to_matrix() * x.0.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series_exp(m: &Mat2) -> Mat2 {
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for n in 1..200 {
            term = term * m / C64::new(n as f64, 0.0);
            sum += term;
        }
        sum
    }

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn basis_is_orthonormal() {
        for k in 0..3 {
            for l in 0..3 {
                let ip = inner_product(&basis_matrix(k), &basis_matrix(l));
                let want = if k == l { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exp_zero_is_identity() {
        let e = exp_algebra(&AlgebraVector::ZERO, 1.0);
        assert_eq!(*e.matrix(), Mat2::identity());
        let e = exp_complex(&ComplexAlgebraVector::default());
        assert_eq!(*e.matrix(), Mat2::identity());
    }

    #[test]
    fn exp_periods_match_power_series() {
        let x3 = AlgebraVector::basis(2);
        let four_pi = exp_algebra(&x3, 4.0 * PI);
        let oracle = series_exp(&(x3 * (4.0 * PI)).to_matrix());
        assert!(close(four_pi.matrix(), &oracle, 1e-12));
        assert!(close(four_pi.matrix(), &Mat2::identity(), 1e-12));

        let two_pi = exp_algebra(&x3, 2.0 * PI);
        let oracle = series_exp(&(x3 * (2.0 * PI)).to_matrix());
        assert!(close(two_pi.matrix(), &oracle, 1e-12));
        assert!(close(two_pi.matrix(), &(-Mat2::identity()), 1e-12));
    }

    #[test]
    fn complex_exp_on_imaginary_axis() {
        let r = 1.7;
        let z = (AlgebraVector::basis(2) * r).times_i();
        let e = exp_complex(&z);
        let want = Mat2::new(
            C64::new((r / 2.0).exp(), 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new((-r / 2.0).exp(), 0.0),
        );
        assert!(close(e.matrix(), &want, 1e-13));
        assert!(close(e.matrix(), &series_exp(&z.to_matrix()), 1e-12));
    }

    #[test]
    fn polar_of_identity() {
        let (x, y) = polar_decompose(&GroupElementKC::identity()).unwrap();
        assert!(close(x.matrix(), &Mat2::identity(), 1e-15));
        assert_eq!(y, AlgebraVector::ZERO);
    }

    #[test]
    fn polar_of_pure_imaginary() {
        let y0 = AlgebraVector::new(0.3, -1.1, 0.7);
        let g = exp_complex(&y0.times_i());
        let (x, y) = polar_decompose(&g).unwrap();
        assert!(close(x.matrix(), &Mat2::identity(), 1e-12));
        assert!((y - y0).norm() < 1e-12);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let g = GroupElementKC::from_matrix_unchecked(Mat2::zeros());
        assert!(matches!(polar_decompose(&g), Err(Error::NonInvertible(_))));
    }

    #[test]
    fn adjoint_action_rotates_like_so3() {
        // Ad(exp(φ X_3)) rotates the (X_1, X_2) plane by φ.
        let phi = PI / 3.0;
        let x = exp_algebra(&AlgebraVector::basis(2), phi);
        let y = AlgebraVector::new(0.4, -0.9, 1.3);
        let got = ad_action(&x, &y);
        let (c, s) = (phi.cos(), phi.sin());
        let want = AlgebraVector::new(c * y.0[0] - s * y.0[1], s * y.0[0] + c * y.0[1], y.0[2]);
        assert!((got - want).norm() < 1e-14, "{got:?} vs {want:?}");
        let id = ad_action(&GroupElementK::identity(), &y);
        assert!((id - y).norm() < 1e-15);
    }

    #[test]
    fn long_products_stay_in_su2() {
        let mut x = GroupElementK::identity();
        for k in 0..10_000 {
            let y = AlgebraVector::new((k as f64).sin(), (1.3 * k as f64).cos(), 0.2);
            x = x * exp_algebra(&y, 0.37);
        }
        assert!(x.unitarity_defect() < 1e-10, "{}", x.unitarity_defect());
    }

    fn algebra_vec(max: f64) -> impl Strategy<Value = AlgebraVector> {
        prop::array::uniform3(-max..max).prop_map(AlgebraVector)
    }

    proptest! {
        #[test]
        fn polar_round_trip(q in prop::array::uniform4(-1.0f64..1.0), y in algebra_vec(1.8)) {
            prop_assume!(q.iter().map(|v| v * v).sum::<f64>() > 1e-3);
            prop_assume!(y.norm() <= 3.0);
            let x = GroupElementK::from_quaternion(q);
            let g = GroupElementKC::from_polar(&x, &y);
            let (x2, y2) = polar_decompose(&g).unwrap();
            prop_assert!((y2 - y).norm() < 1e-9);
            prop_assert!(close(x2.matrix(), x.matrix(), 1e-9));
        }

        #[test]
        fn adjoint_action_is_isometric(q in prop::array::uniform4(-1.0f64..1.0), y in algebra_vec(5.0), z in algebra_vec(5.0)) {
            prop_assume!(q.iter().map(|v| v * v).sum::<f64>() > 1e-3);
            let x = GroupElementK::from_quaternion(q);
            prop_assert!((ad_action(&x, &y).norm() - y.norm()).abs() < 1e-12);
            prop_assert!((ad_action(&x, &y).dot(&ad_action(&x, &z)) - y.dot(&z)).abs() < 1e-11);
        }

        #[test]
        fn complex_exp_inverse(a in algebra_vec(2.0), b in algebra_vec(2.0)) {
            let z = ComplexAlgebraVector::from_parts(&a, &b);
            let g = exp_complex(&z);
            let h = exp_complex(&z.scale(C64::new(-1.0, 0.0)));
            prop_assert!(close((g * h).matrix(), &Mat2::identity(), 1e-10));
            prop_assert!((g.matrix().determinant() - C64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }
}
