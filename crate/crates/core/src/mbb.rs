//! Moving block bootstrap.
//!
//! From a sample `X_1, …, X_n` and block length `b`, the `n − b + 1` overlapping
//! blocks `(X_t, …, X_{t+b−1})` are drawn uniformly with replacement and `k =
//! ⌊n/b⌋` of them are concatenated. When `b` does not divide `n` the pseudo
//! sample has length `k·b`, while block sums still run over the full sample.
//!
//! The mean of a pseudo sample only depends on the chosen block sums, so the
//! Monte Carlo engine works on precomputed block sums instead of materializing
//! each resampled series. [`resample`] consumes the random stream identically
//! and produces the concatenated series when it is needed.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ap::ComplexVal;
use crate::error::{Error, Result};
use crate::rng;

/// Values the bootstrap can average: reals and complex numbers.
pub trait BootValue:
    Copy
    + Send
    + Sync
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
{
    const ZERO: Self;
    fn is_finite_value(&self) -> bool;
}

impl BootValue for f64 {
    const ZERO: Self = 0.0;
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl BootValue for ComplexVal {
    const ZERO: Self = ComplexVal::new(0.0, 0.0);
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapPlan {
    /// Block length `b`.
    pub block: usize,
    /// Number of Monte Carlo replicates `B`.
    pub replicates: usize,
    pub seed: u64,
}

impl BootstrapPlan {
    pub fn new(block: usize, replicates: usize, seed: u64) -> Self {
        Self {
            block,
            replicates,
            seed,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        num_blocks(n, self.block)?;
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("replicate count must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapMeta {
    pub n: usize,
    pub b: usize,
    pub k: usize,
    pub replicates: usize,
    pub seed: u64,
    pub statistic: String,
}

/// Empirical law of a bootstrap root statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapDistribution<T> {
    pub meta: BootstrapMeta,
    pub samples: Vec<T>,
}

impl BootstrapDistribution<f64> {
    pub fn quantile(&self, p: f64) -> Result<f64> {
        quantile(&self.samples, p)
    }
}

impl BootstrapDistribution<ComplexVal> {
    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.re).collect()
    }

    pub fn imag_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.im).collect()
    }
}

impl<T: Serialize> BootstrapDistribution<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bootstrap distribution serializes")
    }
}

/// `k = ⌊n/b⌋`, the number of blocks in a pseudo sample.
pub fn num_blocks(n: usize, b: usize) -> Result<usize> {
    if b == 0 || b > n {
        return Err(Error::InvalidBlock { b, n });
    }
    Ok(n / b)
}

/// 0-based starts of `k` blocks drawn uniformly from `0..=n−b`.
pub fn draw_block_starts<R: Rng + ?Sized>(rng: &mut R, n: usize, b: usize, k: usize) -> Vec<usize> {
    (0..k).map(|_| rng.gen_range(0..=n - b)).collect()
}

/// One pseudo sample of length `k·b`.
pub fn resample<T: BootValue, R: Rng + ?Sized>(series: &[T], b: usize, rng: &mut R) -> Result<Vec<T>> {
    let n = series.len();
    let k = num_blocks(n, b)?;
    let mut out = Vec::with_capacity(k * b);
    for start in draw_block_starts(rng, n, b, k) {
        out.extend_from_slice(&series[start..start + b]);
    }
    Ok(out)
}

/// Block sums `Z_t = X_t + … + X_{t+b−1}` for `t = 1, …, n−b+1`.
pub fn block_sums<T: BootValue>(series: &[T], b: usize) -> Result<Vec<T>> {
    num_blocks(series.len(), b)?;
    Ok(series
        .windows(b)
        .map(|w| w.iter().fold(T::ZERO, |acc, &v| acc + v))
        .collect())
}

/// Series shifted by its first value. The bootstrap root is shift invariant,
/// and a constant series becomes exactly zero.
fn shifted<T: BootValue>(series: &[T]) -> Vec<T> {
    let x0 = series[0];
    series.iter().map(|&v| v - x0).collect()
}

fn center_of_sums<T: BootValue>(sums: &[T], b: usize) -> T {
    let total = sums.iter().fold(T::ZERO, |acc, &z| acc + z);
    total * (1.0 / (b as f64 * sums.len() as f64))
}

/// `E* X̄*_n = (1 / (b(n−b+1))) Σ_t Z_t`, in closed form.
pub fn mbb_center<T: BootValue>(series: &[T], b: usize) -> Result<T> {
    num_blocks(series.len(), b)?;
    let y = shifted(series);
    let sums = block_sums(&y, b)?;
    Ok(series[0] + center_of_sums(&sums, b))
}

/// `B` draws of `√(kb) (X̄*_n − E* X̄*_n)`.
///
/// Replicate `r` uses the stream `rng::stream(plan.seed, r)`, so the result
/// does not depend on evaluation order and replicates run in parallel.
pub fn bootstrap_root_distribution<T: BootValue>(
    series: &[T],
    plan: &BootstrapPlan,
) -> Result<BootstrapDistribution<T>> {
    let n = series.len();
    plan.validate(n)?;
    if let Some(i) = series.iter().position(|v| !v.is_finite_value()) {
        return Err(Error::NonFinite(i));
    }
    let b = plan.block;
    let k = n / b;
    let y = shifted(series);
    let sums = block_sums(&y, b)?;
    let center = center_of_sums(&sums, b);
    let len = (k * b) as f64;
    let scale = len.sqrt();

    let samples = (0..plan.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(plan.seed, r);
            let total = draw_block_starts(&mut rng, n, b, k)
                .into_iter()
                .fold(T::ZERO, |acc, s| acc + sums[s]);
            (total * (1.0 / len) - center) * scale
        })
        .collect();

    Ok(BootstrapDistribution {
        meta: BootstrapMeta {
            n,
            b,
            k,
            replicates: plan.replicates,
            seed: plan.seed,
            statistic: "mean".into(),
        },
        samples,
    })
}

/// Index (0-based) of the `⌈pB⌉`-th order statistic.
fn order_index(p: f64, len: usize) -> usize {
    // The guard keeps products such as 0.95 · 500 from rounding up past 475.
    let rank = (p * len as f64 - 1e-9).ceil().max(1.0) as usize;
    rank.min(len) - 1
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Empirical quantile: the `⌈pB⌉`-th order statistic, no interpolation.
pub fn quantile(samples: &[f64], p: f64) -> Result<f64> {
    Ok(quantiles(samples, &[p])?[0])
}

/// Several quantiles of the same sample with a single sort.
pub fn quantiles(samples: &[f64], ps: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    for &p in ps {
        check_probability(p)?;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(ps.iter().map(|&p| sorted[order_index(p, sorted.len())]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn num_blocks_examples() {
        assert_eq!(num_blocks(300, 30).unwrap(), 10);
        assert_eq!(num_blocks(17, 17).unwrap(), 1);
        assert_eq!(num_blocks(301, 30).unwrap(), 10);
        assert_eq!(num_blocks(5, 6), Err(Error::InvalidBlock { b: 6, n: 5 }));
        assert_eq!(num_blocks(5, 0), Err(Error::InvalidBlock { b: 0, n: 5 }));
    }

    #[test]
    fn resample_with_full_block_is_identity() {
        let x = [3.0, 1.0, 4.0, 1.0, 5.0];
        let mut rng = stream(1, 0);
        assert_eq!(resample(&x, 5, &mut rng).unwrap(), x.to_vec());
    }

    #[test]
    fn resample_with_unit_blocks_draws_values() {
        let x = [10.0, 20.0, 30.0, 40.0];
        let mut rng = stream(2, 0);
        let mut seen = [false; 4];
        for _ in 0..200 {
            let out = resample(&x, 1, &mut rng).unwrap();
            assert_eq!(out.len(), 4);
            for v in out {
                let i = x.iter().position(|&u| u == v).unwrap();
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn resample_truncates_to_whole_blocks() {
        let x: Vec<f64> = (1..=11).map(f64::from).collect();
        let mut rng = stream(3, 0);
        let out = resample(&x, 3, &mut rng).unwrap();
        assert_eq!(out.len(), 9);
        for block in out.chunks(3) {
            assert_eq!(block[1], block[0] + 1.0);
            assert_eq!(block[2], block[0] + 2.0);
        }
    }

    #[test]
    fn block_pair_frequencies_for_n4_b2() {
        // 3 blocks, 2 per pseudo sample: 9 equally likely ordered pairs.
        let x = [1.0, 2.0, 3.0, 4.0];
        let mut counts = [[0usize; 3]; 3];
        let reps = 9000;
        for r in 0..reps {
            let out = resample(&x, 2, &mut stream(4, r)).unwrap();
            let i = (out[0] - 1.0) as usize;
            let j = (out[2] - 1.0) as usize;
            counts[i][j] += 1;
        }
        for row in counts {
            for c in row {
                let f = c as f64 / reps as f64;
                assert!((f - 1.0 / 9.0).abs() <= 0.02, "freq {f}");
            }
        }
    }

    #[test]
    fn center_examples() {
        assert_eq!(mbb_center(&[2.5; 7], 3).unwrap(), 2.5);
        let x = [0.3, -1.2, 4.4, 2.0, 0.1];
        let mean = x.iter().sum::<f64>() / 5.0;
        assert!((mbb_center(&x, 5).unwrap() - mean).abs() < 1e-15);
        assert_eq!(mbb_center(&[1.0, 2.0, 3.0], 2).unwrap(), 2.0);
        assert!(mbb_center(&[1.0], 2).is_err());
    }

    #[test]
    fn constant_series_gives_point_mass() {
        let d = bootstrap_root_distribution(&[1.7; 40], &BootstrapPlan::new(6, 300, 5)).unwrap();
        assert!(d.samples.iter().all(|&v| v == 0.0));
        assert_eq!(d.meta.k, 6);

        let z = [ComplexVal::new(0.4, -2.0); 25];
        let d = bootstrap_root_distribution(&z, &BootstrapPlan::new(5, 50, 5)).unwrap();
        assert!(d.samples.iter().all(|&v| v == ComplexVal::new(0.0, 0.0)));
    }

    #[test]
    fn root_matches_materialized_resamples() {
        let x: Vec<f64> = (0..37).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let plan = BootstrapPlan::new(5, 64, 99);
        let d = bootstrap_root_distribution(&x, &plan).unwrap();
        let center = mbb_center(&x, 5).unwrap();
        for (r, &root) in d.samples.iter().enumerate() {
            let pseudo = resample(&x, 5, &mut stream(99, r as u64)).unwrap();
            let mean = pseudo.iter().sum::<f64>() / pseudo.len() as f64;
            let expected = (pseudo.len() as f64).sqrt() * (mean - center);
            assert!((root - expected).abs() < 1e-12, "{root} vs {expected}");
        }
    }

    #[test]
    fn zero_replicates_rejected() {
        assert!(bootstrap_root_distribution(&[1.0, 2.0], &BootstrapPlan::new(1, 0, 0)).is_err());
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.5).unwrap(), 2.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.95).unwrap(), 3.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.01).unwrap(), 1.0);
        assert_eq!(quantile(&[1.0], 0.0), Err(Error::InvalidProbability(0.0)));
        assert_eq!(quantile(&[1.0], 1.0), Err(Error::InvalidProbability(1.0)));
        assert_eq!(quantile(&[], 0.5), Err(Error::EmptyInput));

        let xs: Vec<f64> = (1..=500).map(f64::from).collect();
        assert_eq!(quantile(&xs, 0.95).unwrap(), 475.0);
        assert_eq!(quantile(&xs, 0.05).unwrap(), 25.0);
    }

    #[test]
    fn distribution_json_layout() {
        let d = bootstrap_root_distribution(&[1.0, 2.0, 3.0], &BootstrapPlan::new(1, 2, 0)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(v["meta"]["b"], 1);
        assert_eq!(v["meta"]["statistic"], "mean");
        assert_eq!(v["samples"].as_array().unwrap().len(), 2);
    }
}
