//! Monte Carlo checks of the bootstrap's large-sample behaviour.
//!
//! * [`mbb_consistency_check`] compares the bootstrap root law from one pilot
//!   series with the Monte Carlo law of `√n (X̄_n − μ)` across sample sizes.
//! * [`block_variance_study`] tracks how fast the variance of normalized block
//!   sums settles to a common value, uniformly over the block start.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mbb::{bootstrap_root_distribution, BootstrapPlan};
use crate::rng::derive_seed;
use crate::sim::Model;

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F̂_a(x) − F̂_b(x)|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(i) = a.iter().chain(b).position(|v| v.is_nan()) {
        return Err(Error::NonFinite(i));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);

    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Block length `⌈n^q⌉`, clamped to `[1, n]`.
pub fn power_block_rule(n: usize, q: f64) -> Result<usize> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "block exponent {q} must lie in (0, 1)"
        )));
    }
    // The guard keeps exact powers such as 1024^0.4 = 16 from rounding up.
    let b = ((n as f64).powf(q) - 1e-9).ceil() as usize;
    Ok(b.clamp(1, n.max(1)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub n: usize,
    pub b: usize,
    pub ks_distance: f64,
    /// Bootstrap replicates.
    pub replicates: usize,
    /// Independent Monte Carlo series for the truth sample.
    pub monte_carlo: usize,
    pub pilot_seed: u64,
    pub bootstrap_seed: u64,
    pub truth_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub model: Model,
    pub block_exponent: f64,
    pub seed: u64,
    pub rows: Vec<ConsistencyRow>,
}

impl ConsistencyReport {
    /// Whether each distance is at most the previous one plus `slack`.
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].ks_distance <= w[0].ks_distance + slack)
    }

    pub fn final_distance(&self) -> Option<f64> {
        self.rows.last().map(|r| r.ks_distance)
    }
}

/// For each `n`: the bootstrap root sample (`B` draws) from one pilot series
/// against `R` independent draws of `√n (X̄_n − μ)`, with `μ` known from the
/// model.
pub fn mbb_consistency_check(
    model: &Model,
    n_list: &[usize],
    block_exponent: f64,
    replicates: usize,
    monte_carlo: usize,
    seed: u64,
) -> Result<ConsistencyReport> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("no sample sizes given".into()));
    }
    if replicates == 0 || monte_carlo == 0 {
        return Err(Error::InvalidParameter("replicate counts must be >= 1".into()));
    }
    let mu = model.mean();
    let mut rows = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        let b = power_block_rule(n, block_exponent)?;
        let stream = 3 * i as u64;
        let pilot_seed = derive_seed(seed, stream);
        let bootstrap_seed = derive_seed(seed, stream + 1);
        let truth_seed = derive_seed(seed, stream + 2);

        let pilot = model.generate(n, pilot_seed)?;
        let plan = BootstrapPlan::new(b, replicates, bootstrap_seed);
        let boot = bootstrap_root_distribution(pilot.values(), &plan)?;

        let scale = (n as f64).sqrt();
        let truth = (0..monte_carlo as u64)
            .into_par_iter()
            .map(|r| {
                let x = model.generate(n, derive_seed(truth_seed, r))?;
                Ok(scale * (x.mean() - mu))
            })
            .collect::<Result<Vec<f64>>>()?;

        rows.push(ConsistencyRow {
            n,
            b,
            ks_distance: ks_distance(&boot.samples, &truth)?,
            replicates,
            monte_carlo,
            pilot_seed,
            bootstrap_seed,
            truth_seed,
        });
    }
    Ok(ConsistencyReport {
        model: model.clone(),
        block_exponent,
        seed,
        rows,
    })
}

/// Across-replicate variances `V̂(s)` of `b^{-1/2} Σ_{t=s}^{s+b−1} X_t` for
/// `s = 1, …, n−b+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockVarianceProfile {
    pub b: usize,
    pub variances: Vec<f64>,
}

impl BlockVarianceProfile {
    pub fn mean_variance(&self) -> f64 {
        self.variances.iter().sum::<f64>() / self.variances.len() as f64
    }

    /// `V̂(s) − σ²` for every start `s`.
    pub fn deviations(&self, sigma2: f64) -> Vec<f64> {
        self.variances.iter().map(|v| v - sigma2).collect()
    }

    /// `sup_s |V̂(s) − σ²|`.
    pub fn sup_deviation(&self, sigma2: f64) -> f64 {
        self.variances
            .iter()
            .map(|v| (v - sigma2).abs())
            .fold(0.0, f64::max)
    }
}

/// Reference value `σ²` for the deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Sigma2 {
    /// Known limit, e.g. `M_t(f²)` for a modulated i.i.d. model.
    Known(f64),
    /// Mean of `V̂(s)` over `s` at the largest block length of the study.
    Calibrated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockVarianceRow {
    pub b: usize,
    pub sup_dev: f64,
    pub mean_variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockVarianceReport {
    pub model: Model,
    pub n: usize,
    pub monte_carlo: usize,
    pub seed: u64,
    pub sigma2: f64,
    pub sigma2_source: Sigma2,
    pub rows: Vec<BlockVarianceRow>,
}

impl BlockVarianceReport {
    /// Whether each sup deviation is at most the previous one plus `slack`.
    pub fn is_decreasing(&self, slack: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_dev <= w[0].sup_dev + slack)
    }

    pub fn final_sup_dev(&self) -> Option<f64> {
        self.rows.last().map(|r| r.sup_dev)
    }
}

fn generate_replicates(model: &Model, n: usize, monte_carlo: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    (0..monte_carlo as u64)
        .into_par_iter()
        .map(|r| Ok(model.generate(n, derive_seed(seed, r))?.into_inner()))
        .collect()
}

fn profile_from(replicates: &[Vec<f64>], b: usize) -> BlockVarianceProfile {
    let n = replicates[0].len();
    let starts = n - b + 1;
    let norm = (b as f64).sqrt();
    // Normalized block sums, one row per replicate.
    let sums: Vec<Vec<f64>> = replicates
        .par_iter()
        .map(|x| x.windows(b).map(|w| w.iter().sum::<f64>() / norm).collect())
        .collect();
    let r = replicates.len() as f64;
    let variances = (0..starts)
        .into_par_iter()
        .map(|s| {
            let mean = sums.iter().map(|row| row[s]).sum::<f64>() / r;
            sums.iter().map(|row| (row[s] - mean).powi(2)).sum::<f64>() / (r - 1.0)
        })
        .collect();
    BlockVarianceProfile { b, variances }
}

fn check_profile_args(n: usize, b: usize, monte_carlo: usize) -> Result<()> {
    if monte_carlo < 2 {
        return Err(Error::InvalidParameter(
            "at least 2 Monte Carlo replicates are needed".into(),
        ));
    }
    if b == 0 || b > n {
        return Err(Error::InvalidBlock { b, n });
    }
    Ok(())
}

/// Profile of `V̂(s)` for a single block length.
pub fn block_variance_profile(
    model: &Model,
    n: usize,
    b: usize,
    monte_carlo: usize,
    seed: u64,
) -> Result<BlockVarianceProfile> {
    check_profile_args(n, b, monte_carlo)?;
    let reps = generate_replicates(model, n, monte_carlo, seed)?;
    Ok(profile_from(&reps, b))
}

/// `sup_s |V̂(s) − σ²|` for several block lengths on the same replicates.
pub fn block_variance_study(
    model: &Model,
    n: usize,
    blocks: &[usize],
    monte_carlo: usize,
    seed: u64,
    sigma2: Sigma2,
) -> Result<BlockVarianceReport> {
    if blocks.is_empty() {
        return Err(Error::InvalidParameter("no block lengths given".into()));
    }
    for &b in blocks {
        check_profile_args(n, b, monte_carlo)?;
    }
    let reps = generate_replicates(model, n, monte_carlo, seed)?;
    let profiles: Vec<BlockVarianceProfile> = blocks.iter().map(|&b| profile_from(&reps, b)).collect();

    let reference = match sigma2 {
        Sigma2::Known(v) => v,
        Sigma2::Calibrated => profiles
            .iter()
            .max_by_key(|p| p.b)
            .expect("nonempty")
            .mean_variance(),
    };
    let rows = profiles
        .iter()
        .map(|p| BlockVarianceRow {
            b: p.b,
            sup_dev: p.sup_deviation(reference),
            mean_variance: p.mean_variance(),
        })
        .collect();
    Ok(BlockVarianceReport {
        model: model.clone(),
        n,
        monte_carlo,
        seed,
        sigma2: reference,
        sigma2_source: sigma2,
        rows,
    })
}
