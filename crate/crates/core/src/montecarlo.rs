//! Seeded, blocked Monte Carlo with a reduction order independent of thread count.
//!
//! Paths are numbered `0..n_paths` and each draws from its own generator seeded
//! by `(master_seed, path index)`. Paths are grouped into contiguous blocks; a
//! block is summed sequentially and blocks are combined in index order, so the
//! result is bit-identical for any rayon pool size.

use rayon::prelude::*;

use crate::algebra::C64;
use crate::error::{Error, Result};

/// Default number of blocks for standard errors.
pub const DEFAULT_BLOCKS: usize = 512;

/// Minimum number of blocks accepted.
pub const MIN_BLOCKS: usize = 30;

/// splitmix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `stream` of path `index` under `master`.
pub fn derive_seed(master: u64, index: u64, stream: u64) -> u64 {
    mix(mix(mix(master) ^ index) ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: C64,
    comp: C64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: C64) {
        let re = neumaier(self.sum.re, &mut self.comp.re, x.re);
        let im = neumaier(self.sum.im, &mut self.comp.im, x.im);
        self.sum = C64::new(re, im);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, comp: &mut f64, x: f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

/// Monte Carlo controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McSettings {
    pub n_paths: usize,
    pub n_steps: usize,
    pub master_seed: u64,
    pub n_blocks: usize,
    /// Fail with `StatisticalFailure` if the standard error does not scale like `n^{-1/2}`.
    pub check_convergence: bool,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            n_paths: 200_000,
            n_steps: 400,
            master_seed: 0,
            n_blocks: DEFAULT_BLOCKS,
            check_convergence: true,
        }
    }
}

/// Per-block sums of a vector of per-path observables.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockedSums {
    pub n_paths: usize,
    /// `block_sizes[b]` paths went into block `b`.
    pub block_sizes: Vec<usize>,
    /// `sums[b][i]`: sum over block `b` of observable `i`.
    pub sums: Vec<Vec<C64>>,
}

/// Mean and standard error of one observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanEstimate {
    pub mean: C64,
    /// Standard error from the scatter of block means (real and imaginary parts pooled).
    pub stderr: f64,
}

/// Runs `observe(path_index)` for every path and sums per block.
pub fn run_blocked<F>(n_paths: usize, n_blocks: usize, n_obs: usize, observe: F) -> Result<BlockedSums>
where
    F: Fn(u64) -> Vec<C64> + Sync,
{
    if n_blocks < MIN_BLOCKS || n_paths < n_blocks {
        return Err(Error::ParameterDomain(format!(
            "need at least {MIN_BLOCKS} blocks and n_paths >= n_blocks (got {n_paths} paths, {n_blocks} blocks)"
        )));
    }
    let bounds: Vec<(usize, usize)> = (0..n_blocks)
        .map(|b| (b * n_paths / n_blocks, (b + 1) * n_paths / n_blocks))
        .collect();
    let sums: Vec<Vec<C64>> = bounds
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = vec![CompensatedSum::default(); n_obs];
            for p in lo..hi {
                let v = observe(p as u64);
                debug_assert_eq!(v.len(), n_obs);
                for (a, x) in acc.iter_mut().zip(v) {
                    a.add(x);
                }
            }
            acc.iter().map(|a| a.value()).collect()
        })
        .collect();
    Ok(BlockedSums {
        n_paths,
        block_sizes: bounds.iter().map(|(lo, hi)| hi - lo).collect(),
        sums,
    })
}

impl BlockedSums {
    pub fn n_blocks(&self) -> usize {
        self.sums.len()
    }

    pub fn n_obs(&self) -> usize {
        self.sums.first().map_or(0, |s| s.len())
    }

    /// Estimate from the first `n_blocks` blocks.
    pub fn estimate_prefix(&self, obs: usize, n_blocks: usize) -> MeanEstimate {
        let blocks = &self.sums[..n_blocks];
        let sizes = &self.block_sizes[..n_blocks];
        let n: usize = sizes.iter().sum();
        let mut total = CompensatedSum::default();
        for b in blocks {
            total.add(b[obs]);
        }
        let mean = total.value() / n as f64;
        // Weighted scatter of block means around the grand mean.
        let mut ss = 0.0;
        for (b, &m) in blocks.iter().zip(sizes) {
            let d = b[obs] / m as f64 - mean;
            ss += m as f64 * d.norm_sqr();
        }
        let nb = n_blocks as f64;
        let var_mean = ss / (n as f64) / (nb - 1.0);
        MeanEstimate {
            mean,
            stderr: var_mean.sqrt(),
        }
    }

    pub fn estimate(&self, obs: usize) -> MeanEstimate {
        self.estimate_prefix(obs, self.n_blocks())
    }

    /// Block means of observable `obs`, one per block.
    pub fn block_means(&self, obs: usize) -> Vec<C64> {
        self.sums
            .iter()
            .zip(&self.block_sizes)
            .map(|(b, &m)| b[obs] / m as f64)
            .collect()
    }

    /// `stderr(prefix)·√n(prefix) / (stderr(all)·√n)` for the prefixes holding
    /// 1/16, 1/8, 1/4, 1/2 of the blocks, pooling the variance over `obs`.
    ///
    /// Under `n^{-1/2}` convergence every ratio is near 1.
    pub fn convergence_ratios(&self, obs: &[usize]) -> Vec<f64> {
        let scaled = |nb: usize| {
            let n: usize = self.block_sizes[..nb].iter().sum();
            let var: f64 = obs.iter().map(|&i| self.estimate_prefix(i, nb).stderr.powi(2)).sum();
            (var * n as f64).sqrt()
        };
        let full = scaled(self.n_blocks());
        [16, 8, 4, 2]
            .iter()
            .map(|d| self.n_blocks() / d)
            .filter(|&nb| nb >= MIN_BLOCKS)
            .map(|nb| if full > 0.0 { scaled(nb) / full } else { 1.0 })
            .collect()
    }

    /// Fails unless every convergence ratio lies in `[1/1.5, 1.5]`.
    pub fn check_convergence(&self, obs: &[usize]) -> Result<Vec<f64>> {
        let ratios = self.convergence_ratios(obs);
        if let Some(bad) = ratios.iter().find(|r| !(**r <= 1.5 && **r >= 1.0 / 1.5)) {
            return Err(Error::StatisticalFailure(format!(
                "standard error does not scale like n^(-1/2): ratio {bad:.3} in {ratios:?}"
            )));
        }
        Ok(ratios)
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n - F|`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic, `1.6276/√n`.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform_obs(seed: u64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(9, seed, 0));
        let u: f64 = rng.random();
        vec![C64::new(u, 0.0), C64::new(0.0, u * u)]
    }

    #[test]
    fn seeds_are_distinct() {
        let mut seen: Vec<u64> = (0..1000).map(|i| derive_seed(1, i, 0)).collect();
        seen.extend((0..1000).map(|i| derive_seed(1, i, 1)));
        seen.extend((0..1000).map(|i| derive_seed(2, i, 0)));
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 3000);
    }

    #[test]
    fn blocked_mean_of_uniforms() {
        let sums = run_blocked(20_000, 64, 2, uniform_obs).unwrap();
        let e = sums.estimate(0);
        assert!((e.mean.re - 0.5).abs() < 4.0 * e.stderr);
        assert!((e.stderr - (1.0f64 / 12.0 / 20_000.0).sqrt()).abs() < 0.3 * e.stderr);
        let e2 = sums.estimate(1);
        assert!((e2.mean.im - 1.0 / 3.0).abs() < 4.0 * e2.stderr);
        sums.check_convergence(&[0, 1]).unwrap();
    }

    #[test]
    fn independent_of_thread_count() {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_blocked(5_000, 40, 2, uniform_obs).unwrap());
        let b = four.install(|| run_blocked(5_000, 40, 2, uniform_obs).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn too_few_blocks() {
        assert!(run_blocked(100, 10, 1, uniform_obs).is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(C64::new(1e16, 0.0));
        for _ in 0..1000 {
            s.add(C64::new(1.0, 0.0));
        }
        s.add(C64::new(-1e16, 0.0));
        assert_eq!(s.value().re, 1000.0);
    }

    #[test]
    fn ks_accepts_uniform_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut xs: Vec<f64> = (0..5000).map(|_| rng.random()).collect();
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!(d < ks_critical_1pct(5000));
        let mut shifted: Vec<f64> = xs.iter().map(|x| x * 0.9).collect();
        assert!(ks_statistic(&mut shifted, |x| x.clamp(0.0, 1.0)) > ks_critical_1pct(5000));
    }

    #[test]
    fn normal_cdf_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-12);
    }
}
