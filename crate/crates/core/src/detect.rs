//! Significance scan for cyclic frequencies.
//!
//! For a fixed lag `τ` the scan tests `H0: a(λ, τ) = 0` at every grid frequency
//! in `[0, π]` (the rest of the circle follows from `â(2π − λ) = conj(â(λ))`).
//! At each `λ` the moving block bootstrap gives the law of `â* − E*â*`; its
//! componentwise quantiles form a band around zero, and the raw estimate is
//! rejected when either component leaves the band.
//!
//! Pointwise bands at 0.05/0.95 reject somewhere on almost every grid under
//! `H0`. Frequencies are therefore only reported as significant when the
//! rejection is an isolated spike: a local maximum of the studentized estimate
//! that also clears a Šidák threshold for the whole grid, taken from a Student-t
//! law because the bootstrap standard errors are estimated. See
//! [`ScanResult::significant_lambdas`].

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::ap::ComplexVal;
use crate::cyclic::{root_from_w, LagProducts};
use crate::error::{Error, Result};
use crate::mbb::{quantiles, BootstrapPlan};
use crate::rng;

/// Half-width given to a band whose bootstrap spread is exactly zero.
pub const DEGENERATE_EPS: f64 = 1e-12;

/// A component's bootstrap spread counts as zero below this fraction of
/// `max_t |W_t|`.
const SPREAD_REL_TOL: f64 = 1e-9;

/// Grid points used when no grid is given: step π/150 over `[0, π]`.
pub const DEFAULT_GRID_POINTS: usize = 151;

/// `points` equally spaced frequencies from 0 to π inclusive.
pub fn default_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least 2 points, got {points}"
        )));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|j| PI * (j as f64 / last)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub tau: i64,
    pub lambda_grid: Vec<f64>,
    /// Block length `b`.
    pub block: usize,
    /// Bootstrap replicates `B` per grid point.
    pub replicates: usize,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub seed: u64,
}

impl ScanConfig {
    /// Default grid and 0.05/0.95 bands.
    pub fn new(tau: i64, block: usize, replicates: usize, seed: u64) -> Self {
        Self {
            tau,
            lambda_grid: default_grid(DEFAULT_GRID_POINTS).expect("default grid"),
            block,
            replicates,
            alpha_lo: 0.05,
            alpha_hi: 0.95,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda_grid.is_empty() {
            return Err(Error::InvalidParameter("empty frequency grid".into()));
        }
        if self
            .lambda_grid
            .iter()
            .any(|&l| !(0.0..=PI).contains(&l))
        {
            return Err(Error::InvalidParameter("grid frequencies must lie in [0, π]".into()));
        }
        if self.lambda_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("grid must be strictly increasing".into()));
        }
        for p in [self.alpha_lo, self.alpha_hi] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidProbability(p));
            }
        }
        if self.alpha_lo >= self.alpha_hi {
            return Err(Error::InvalidParameter(format!(
                "alpha_lo {} must be below alpha_hi {}",
                self.alpha_lo, self.alpha_hi
            )));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("replicate count must be >= 1".into()));
        }
        Ok(())
    }

    /// Two-sided size of one component test.
    pub fn pointwise_level(&self) -> f64 {
        self.alpha_lo + (1.0 - self.alpha_hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub lambda: f64,
    pub estimate: ComplexVal,
    pub band_re: (f64, f64),
    pub band_im: (f64, f64),
    pub reject: bool,
    /// Bootstrap standard deviations of `Re(â*)` and `Im(â*)`; zero when the
    /// spread is degenerate.
    pub sd_re: f64,
    pub sd_im: f64,
}

impl ScanPoint {
    /// `max(|Re â| / sd_re, |Im â| / sd_im)`, skipping degenerate components.
    pub fn studentized(&self) -> f64 {
        let part = |v: f64, sd: f64| if sd > 0.0 { v.abs() / sd } else { 0.0 };
        part(self.estimate.re, self.sd_re).max(part(self.estimate.im, self.sd_im))
    }
}

fn outside(v: f64, band: (f64, f64)) -> bool {
    v < band.0 || v > band.1
}

/// Componentwise band exclusion.
pub fn reject_predicate(estimate: ComplexVal, band_re: (f64, f64), band_im: (f64, f64)) -> bool {
    outside(estimate.re, band_re) || outside(estimate.im, band_im)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub config: ScanConfig,
    pub n: usize,
    pub points: Vec<ScanPoint>,
}

/// Critical value of `|Z|` that keeps the family-wise level at `alpha` over
/// `tests` independent two-sided normal tests.
pub fn sidak_threshold(alpha: f64, tests: usize) -> f64 {
    Normal::standard().inverse_cdf(1.0 - sidak_per_test(alpha, tests) / 2.0)
}

/// As [`sidak_threshold`], with a Student-t reference on `df` degrees of
/// freedom. Falls back to the normal quantile for non-finite `df`.
pub fn sidak_threshold_t(alpha: f64, tests: usize, df: f64) -> f64 {
    let p = 1.0 - sidak_per_test(alpha, tests) / 2.0;
    match StudentsT::new(0.0, 1.0, df) {
        Ok(t) if df.is_finite() => t.inverse_cdf(p),
        _ => Normal::standard().inverse_cdf(p),
    }
}

fn sidak_per_test(alpha: f64, tests: usize) -> f64 {
    1.0 - (1.0 - alpha).powf(1.0 / tests.max(1) as f64)
}

/// Effective degrees of freedom of a block bootstrap variance built from `m`
/// lag products with blocks of length `b`. The moving block variance is a
/// Bartlett-window estimate, whose relative variance is about `4b / 3m`.
pub fn bootstrap_variance_df(m: usize, b: usize) -> f64 {
    1.5 * m as f64 / b.max(1) as f64
}

impl ScanResult {
    pub fn rejected_lambdas(&self) -> Vec<f64> {
        self.points.iter().filter(|p| p.reject).map(|p| p.lambda).collect()
    }

    /// Studentized threshold for this grid: both components of every grid
    /// point form one family at the pointwise level of the bands. The bootstrap
    /// standard errors are themselves noisy, so the reference is Student-t.
    pub fn family_threshold(&self) -> f64 {
        sidak_threshold_t(
            self.config.pointwise_level(),
            2 * self.points.len(),
            self.variance_df(),
        )
    }

    /// Effective degrees of freedom of the per-point bootstrap variances.
    pub fn variance_df(&self) -> f64 {
        let m = self.n.saturating_sub(self.config.tau.unsigned_abs() as usize);
        bootstrap_variance_df(m, self.config.block)
    }

    pub fn significant_lambdas(&self) -> Vec<f64> {
        self.significant_with(self.family_threshold())
    }

    /// Grid frequencies that pass the isolated-spike filter: rejected by the
    /// band, a local maximum of the studentized estimate among grid
    /// neighbours, and at least `threshold` in studentized units.
    pub fn significant_with(&self, threshold: f64) -> Vec<f64> {
        let stats: Vec<f64> = self.points.iter().map(ScanPoint::studentized).collect();
        self.points
            .iter()
            .enumerate()
            .filter(|&(j, p)| {
                let left = j.checked_sub(1).map_or(f64::NEG_INFINITY, |i| stats[i]);
                let right = stats.get(j + 1).copied().unwrap_or(f64::NEG_INFINITY);
                p.reject && stats[j] >= threshold && stats[j] >= left && stats[j] >= right
            })
            .map(|(_, p)| p.lambda)
            .collect()
    }

    /// Estimates on the whole circle: the grid, followed by `2π − λ` with the
    /// conjugate estimate for every grid point strictly inside `(0, π)`.
    pub fn full_circle(&self) -> Vec<(f64, ComplexVal)> {
        let mut out: Vec<(f64, ComplexVal)> =
            self.points.iter().map(|p| (p.lambda, p.estimate)).collect();
        out.extend(
            self.points
                .iter()
                .rev()
                .filter(|p| p.lambda > 0.0 && p.lambda < PI)
                .map(|p| (TAU - p.lambda, p.estimate.conj())),
        );
        out
    }

    /// Tab-separated table with header
    /// `lambda re re_lo re_hi im im_lo im_hi reject` (reject as 0/1).
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "lambda\tre\tre_lo\tre_hi\tim\tim_lo\tim_hi\treject")?;
        for p in &self.points {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                p.lambda,
                p.estimate.re,
                p.band_re.0,
                p.band_re.1,
                p.estimate.im,
                p.band_im.0,
                p.band_im.1,
                u8::from(p.reject)
            )?;
        }
        Ok(())
    }
}

fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

struct ComponentBand {
    band: (f64, f64),
    sd: f64,
}

fn component_band(values: &[f64], config: &ScanConfig, scale: f64) -> Result<ComponentBand> {
    let q = quantiles(values, &[config.alpha_lo, config.alpha_hi])?;
    let sd = sample_sd(values);
    if sd <= SPREAD_REL_TOL * scale {
        let (lo, hi) = if q[1] > q[0] { (q[0], q[1]) } else { (q[0], q[0]) };
        return Ok(ComponentBand {
            band: (lo - DEGENERATE_EPS, hi + DEGENERATE_EPS),
            sd: 0.0,
        });
    }
    Ok(ComponentBand {
        band: (q[0], q[1]),
        sd,
    })
}

/// Scans the grid for frequencies with `a(λ, τ) ≠ 0`.
///
/// Grid point `j` bootstraps with seed `derive_seed(config.seed, j)`, so the
/// parallel evaluation matches a sequential one exactly.
pub fn frequency_scan(series: &[f64], config: &ScanConfig) -> Result<ScanResult> {
    config.validate()?;
    let products = LagProducts::new(series, config.tau)?;
    let m = products.len();
    if config.block == 0 || config.block > m {
        return Err(Error::BlockExceedsSample {
            b: config.block,
            m,
        });
    }
    let k = m / config.block;
    let root_scale = ((k * config.block) as f64).sqrt();

    let points = config
        .lambda_grid
        .par_iter()
        .enumerate()
        .map(|(j, &lambda)| {
            let w = products.modulate(lambda);
            let estimate = w.iter().sum::<ComplexVal>() / m as f64;
            let scale = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let plan = BootstrapPlan::new(
                config.block,
                config.replicates,
                rng::derive_seed(config.seed, j as u64),
            );
            let dist = root_from_w(&w, &plan)?;
            let re: Vec<f64> = dist.samples.iter().map(|z| z.re / root_scale).collect();
            let im: Vec<f64> = dist.samples.iter().map(|z| z.im / root_scale).collect();
            let bre = component_band(&re, config, scale)?;
            let bim = component_band(&im, config, scale)?;
            Ok(ScanPoint {
                lambda,
                estimate,
                band_re: bre.band,
                band_im: bim.band,
                reject: reject_predicate(estimate, bre.band, bim.band),
                sd_re: bre.sd,
                sd_im: bim.sd,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScanResult {
        config: config.clone(),
        n: series.len(),
        points,
    })
}

/// Smallest `T ∈ [1, t_max]` such that every frequency lies within `tol` of
/// some `2πk/T` (distances taken on the circle). An empty input carries no
/// information about a period and yields `None`.
pub fn infer_period(significant: &[f64], tol: f64, t_max: u32) -> Result<Option<u32>> {
    if t_max < 1 {
        return Err(Error::InvalidParameter("t_max must be at least 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    if significant.is_empty() {
        return Ok(None);
    }
    let fits = |lambda: f64, period: u32| {
        let step = TAU / period as f64;
        let l = lambda.rem_euclid(TAU);
        let r = l - (l / step).round() * step;
        r.abs() <= tol
    };
    Ok((1..=t_max).find(|&p| significant.iter().all(|&l| fits(l, p))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum StationarityVerdict {
    NoEvidenceOfCyclostationarity,
    SignificantFrequencies { by_tau: BTreeMap<i64, Vec<f64>> },
}

/// Runs one scan per lag and reports nonzero significant frequencies.
///
/// The spike threshold treats all lags as one family, and `λ = 0` is left out
/// because `a(0, τ)` is the average autocovariance, nonzero for most
/// stationary series too.
pub fn stationarity_diagnostic(
    series: &[f64],
    taus: &[i64],
    template: &ScanConfig,
) -> Result<StationarityVerdict> {
    if taus.is_empty() {
        return Err(Error::InvalidParameter("no lags given".into()));
    }
    let scans = taus
        .iter()
        .enumerate()
        .map(|(i, &tau)| {
            let config = ScanConfig {
                tau,
                seed: rng::derive_seed(template.seed, (1 << 32) + i as u64),
                ..template.clone()
            };
            frequency_scan(series, &config)
        })
        .collect::<Result<Vec<_>>>()?;

    let tests: usize = scans.iter().map(|s| 2 * s.points.len()).sum();
    let df = scans
        .iter()
        .map(ScanResult::variance_df)
        .fold(f64::INFINITY, f64::min);
    let threshold = sidak_threshold_t(template.pointwise_level(), tests, df);

    let mut by_tau = BTreeMap::new();
    for (scan, &tau) in scans.iter().zip(taus) {
        let found: Vec<f64> = scan
            .significant_with(threshold)
            .into_iter()
            .filter(|&l| l != 0.0)
            .collect();
        if !found.is_empty() {
            by_tau.insert(tau, found);
        }
    }
    Ok(if by_tau.is_empty() {
        StationarityVerdict::NoEvidenceOfCyclostationarity
    } else {
        StationarityVerdict::SignificantFrequencies { by_tau }
    })
}
