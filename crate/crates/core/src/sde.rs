//! Brownian paths in 𝔰𝔲(2) and the Itô maps `dx = x∘dA` on SU(2) and
//! `dg = g∘d(A + iB)` on SL(2,ℂ), integrated with the geometric Euler scheme
//! `g_{k+1} = g_k exp(ΔZ_k)` over unit time.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use rayon::prelude::*;

use crate::algebra::{
    ad_action, exp_algebra, exp_complex, polar_radius, AlgebraVector, ComplexAlgebraVector, GroupElementK,
    GroupElementKC, C64,
};
use crate::error::{Error, Result};
use crate::heat::nu_radial_cdf;
use crate::montecarlo::{derive_seed, ks_critical_1pct, ks_statistic, run_blocked, BlockedSums, McSettings};
use crate::repr::character;
use crate::spin::Spin;

/// Steps between re-projections onto the group.
pub const REPROJECT_EVERY: usize = 64;

/// A discretised Brownian motion on `[0, 1]` with covariance `σ² t I`.
#[derive(Clone, Debug, PartialEq)]
pub struct BrownianPath {
    pub variance: f64,
    pub seed: u64,
    pub increments: Vec<AlgebraVector>,
}

impl BrownianPath {
    pub fn n_steps(&self) -> usize {
        self.increments.len()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.n_steps() as f64
    }

    /// `B_1 = Σ ΔB_k`.
    pub fn endpoint(&self) -> AlgebraVector {
        self.increments.iter().fold(AlgebraVector::ZERO, |a, b| a + *b)
    }

    /// Path with every increment equal to `total / n_steps`.
    pub fn constant(total: AlgebraVector, n_steps: usize) -> Self {
        BrownianPath {
            variance: 0.0,
            seed: 0,
            increments: vec![total * (1.0 / n_steps as f64); n_steps],
        }
    }

    pub fn zero(n_steps: usize) -> Self {
        Self::constant(AlgebraVector::ZERO, n_steps)
    }
}

/// Streams Gaussian increments with standard deviation `√(σ² dt)` per coordinate.
pub struct IncrementStream {
    rng: ChaCha8Rng,
    sd: f64,
}

impl IncrementStream {
    pub fn new(variance: f64, n_steps: usize, seed: u64) -> Self {
        IncrementStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sd: (variance / n_steps as f64).sqrt(),
        }
    }

    pub fn next_increment(&mut self) -> AlgebraVector {
        let mut c = [0.0; 3];
        for v in &mut c {
            let z: f64 = StandardNormal.sample(&mut self.rng);
            *v = self.sd * z;
        }
        AlgebraVector(c)
    }
}

fn check_variance(variance: f64, n_steps: usize) -> Result<()> {
    if !(variance >= 0.0) || !variance.is_finite() || n_steps == 0 {
        return Err(Error::ParameterDomain(format!(
            "Brownian path needs variance >= 0 and n_steps >= 1 (got {variance}, {n_steps})"
        )));
    }
    Ok(())
}

/// Draws a path deterministically from `seed`.
pub fn sample_path(variance: f64, n_steps: usize, seed: u64) -> Result<BrownianPath> {
    check_variance(variance, n_steps)?;
    let mut stream = IncrementStream::new(variance, n_steps, seed);
    Ok(BrownianPath {
        variance,
        seed,
        increments: (0..n_steps).map(|_| stream.next_increment()).collect(),
    })
}

/// Endpoint of an Itô map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Endpoint {
    K(GroupElementK),
    KC(GroupElementKC),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointSample {
    pub value: Endpoint,
    pub weight: C64,
    pub seed: u64,
    pub n_steps: usize,
}

impl EndpointSample {
    pub fn as_kc(&self) -> GroupElementKC {
        match self.value {
            Endpoint::K(x) => x.complexify(),
            Endpoint::KC(g) => g,
        }
    }
}

/// Geometric Euler for `dx = x∘dA` driven by an increment source.
pub fn integrate_k(n_steps: usize, mut next: impl FnMut() -> AlgebraVector) -> GroupElementK {
    let mut x = GroupElementK::identity();
    for k in 0..n_steps {
        x = x * exp_algebra(&next(), 1.0);
        if (k + 1) % REPROJECT_EVERY == 0 {
            x = x.reproject();
        }
    }
    x.reproject()
}

/// Geometric Euler for `dg = g∘dZ`.
pub fn integrate_kc(n_steps: usize, mut next: impl FnMut() -> ComplexAlgebraVector) -> GroupElementKC {
    let mut g = GroupElementKC::identity();
    for k in 0..n_steps {
        g = g * exp_complex(&next());
        if (k + 1) % REPROJECT_EVERY == 0 {
            g = g.reproject();
        }
    }
    g.reproject()
}

/// `θ(A)_1`.
pub fn ito_map_k(a: &BrownianPath) -> EndpointSample {
    let mut it = a.increments.iter();
    let x = integrate_k(a.n_steps(), || *it.next().unwrap());
    EndpointSample {
        value: Endpoint::K(x),
        weight: C64::new(1.0, 0.0),
        seed: a.seed,
        n_steps: a.n_steps(),
    }
}

/// `θ_ℂ(A + iB)_1`.
pub fn ito_map_kc(a: &BrownianPath, b: &BrownianPath) -> Result<EndpointSample> {
    if a.n_steps() != b.n_steps() {
        return Err(Error::PathMismatch(a.n_steps(), b.n_steps()));
    }
    let mut it = a.increments.iter().zip(&b.increments);
    let g = integrate_kc(a.n_steps(), || {
        let (da, db) = it.next().unwrap();
        ComplexAlgebraVector::from_parts(da, db)
    });
    Ok(EndpointSample {
        value: Endpoint::KC(g),
        weight: C64::new(1.0, 0.0),
        seed: a.seed,
        n_steps: a.n_steps(),
    })
}

/// `ΔB'_k = Ad_{θ(A)_k} ΔB_k` with `θ(A)_k` the state before step `k`.
pub fn rotated_path(b: &BrownianPath, a: &BrownianPath) -> Result<BrownianPath> {
    if a.n_steps() != b.n_steps() {
        return Err(Error::PathMismatch(b.n_steps(), a.n_steps()));
    }
    let mut x = GroupElementK::identity();
    let mut increments = Vec::with_capacity(b.n_steps());
    for (k, (da, db)) in a.increments.iter().zip(&b.increments).enumerate() {
        increments.push(ad_action(&x, db));
        x = x * exp_algebra(da, 1.0);
        if (k + 1) % REPROJECT_EVERY == 0 {
            x = x.reproject();
        }
    }
    Ok(BrownianPath {
        variance: b.variance,
        seed: b.seed,
        increments,
    })
}

/// `‖θ_ℂ(A+iB)_1 - θ_ℂ(iB^{θ(A)})_1 · θ(A)_1‖_F`.
pub fn pathwise_identity_residual(a: &BrownianPath, b: &BrownianPath) -> Result<f64> {
    let lhs = ito_map_kc(a, b)?.as_kc();
    let rotated = rotated_path(b, a)?;
    let zero = BrownianPath::zero(a.n_steps());
    let h = ito_map_kc(&zero, &rotated)?.as_kc();
    let x = ito_map_k(a).as_kc();
    Ok((lhs.matrix() - (h * x).matrix()).norm())
}

/// `θ_ℂ(A + iB)_1` for path `index`, `Var A = a_var`, `Var B = b_var`, drawn on the fly.
///
/// `A` and `B` use separate streams, so `a_var = 0` reproduces the `B`-only endpoint.
pub fn sample_endpoint_kc(a_var: f64, b_var: f64, n_steps: usize, master_seed: u64, index: u64) -> GroupElementKC {
    let mut b = IncrementStream::new(b_var, n_steps, derive_seed(master_seed, index, 1));
    if a_var == 0.0 {
        return integrate_kc(n_steps, || b.next_increment().times_i());
    }
    let mut a = IncrementStream::new(a_var, n_steps, derive_seed(master_seed, index, 3));
    integrate_kc(n_steps, || {
        ComplexAlgebraVector::from_parts(&a.next_increment(), &b.next_increment())
    })
}

/// `θ(A)_1` for path `index`, `Var A = a_var`.
pub fn sample_endpoint_k(a_var: f64, n_steps: usize, master_seed: u64, index: u64) -> GroupElementK {
    let mut a = IncrementStream::new(a_var, n_steps, derive_seed(master_seed, index, 0));
    integrate_k(n_steps, || a.next_increment())
}

/// `(2j+1) e^{-(s-t) c_j/2}`: `E[χ_j]` under `μ_{s,t}`, and under `ρ_s` when `t = 0`.
pub fn character_moment(s: f64, t: f64, j: Spin) -> f64 {
    j.dim() as f64 * (-(s - t) * j.casimir() / 2.0).exp()
}

/// Blocked sums of `χ_j(θ(A)_1)`, `Var A = s`, one observable per spin.
pub fn character_moments_k(s: f64, spins: &[Spin], settings: &McSettings) -> Result<BlockedSums> {
    check_variance(s, settings.n_steps)?;
    run_blocked(settings.n_paths, settings.n_blocks, spins.len(), |i| {
        let x = sample_endpoint_k(s, settings.n_steps, settings.master_seed, i).complexify();
        spins.iter().map(|&j| character(j, &x)).collect()
    })
}

/// Blocked sums of `χ_j(θ_ℂ(A + iB)_1)` with `Var A = s - t/2`, `Var B = t/2`.
pub fn character_moments_kc(s: f64, t: f64, spins: &[Spin], settings: &McSettings) -> Result<BlockedSums> {
    check_variance(s - t / 2.0, settings.n_steps)?;
    check_variance(t / 2.0, settings.n_steps)?;
    run_blocked(settings.n_paths, settings.n_blocks, spins.len(), |i| {
        let g = sample_endpoint_kc(s - t / 2.0, t / 2.0, settings.n_steps, settings.master_seed, i);
        spins.iter().map(|&j| character(j, &g)).collect()
    })
}

/// Median of [`pathwise_identity_residual`] over `draws` Brownian pairs at each step count.
pub fn pathwise_medians(a_var: f64, b_var: f64, draws: usize, steps: &[usize], master_seed: u64) -> Result<Vec<f64>> {
    steps
        .iter()
        .map(|&n| {
            let mut res = (0..draws as u64)
                .into_par_iter()
                .map(|i| {
                    let a = sample_path(a_var, n, derive_seed(master_seed, i, 4))?;
                    let b = sample_path(b_var, n, derive_seed(master_seed, i, 5))?;
                    pathwise_identity_residual(&a, &b)
                })
                .collect::<Result<Vec<f64>>>()?;
            res.sort_by(|x, y| x.total_cmp(y));
            let m = res.len();
            Ok(if m % 2 == 1 {
                res[m / 2]
            } else {
                0.5 * (res[m / 2 - 1] + res[m / 2])
            })
        })
        .collect()
}

/// Residuals of the pathwise identity for constant-increment paths with the given totals.
pub fn smooth_pathwise_residuals(a_total: AlgebraVector, b_total: AlgebraVector, steps: &[usize]) -> Result<Vec<f64>> {
    steps
        .iter()
        .map(|&n| pathwise_identity_residual(&BrownianPath::constant(a_total, n), &BrownianPath::constant(b_total, n)))
        .collect()
}

/// Minus the least-squares slope of `log value` against `log n`.
pub fn convergence_order(steps: &[usize], values: &[f64]) -> f64 {
    let xs: Vec<f64> = steps.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    -sxy / sxx
}

/// Kolmogorov–Smirnov statistic of the polar radii of `θ_ℂ(A+iB)_1` endpoints
/// against the radial law of `ν_t`, with its 1% critical value.
///
/// The polar radius is invariant under left translation by K, and the K-average
/// of `μ_{s,t}` is `ν_t` for every `s ≥ t/2`, so the law is the same at any such `s`.
pub fn radial_ks(s: f64, t: f64, settings: &McSettings) -> Result<(f64, f64)> {
    check_variance(s - t / 2.0, settings.n_steps)?;
    check_variance(t / 2.0, settings.n_steps)?;
    let mut radii: Vec<f64> = (0..settings.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            polar_radius(&sample_endpoint_kc(
                s - t / 2.0,
                t / 2.0,
                settings.n_steps,
                settings.master_seed,
                i,
            ))
        })
        .collect();
    let d = ks_statistic(&mut radii, |r| nu_radial_cdf(t, r));
    Ok((d, ks_critical_1pct(settings.n_paths)))
}
