//! Cyclic autocorrelation estimation and its moving block bootstrap.
//!
//! For a real sample `X_1, …, X_n`, frequency `λ` and lag `τ`,
//!
//! ```text
//! â_n(λ, τ) = 1/(n − |τ|) Σ_{t = 1 − min(τ, 0)}^{n − max(τ, 0)} X_t X_{t+τ} e^{−iλt}
//! ```
//!
//! which is the sample mean of `W_t = X_t X_{t+τ} e^{−iλt}`. The bootstrap
//! resamples blocks of the complex `W` series, so real and imaginary parts of
//! a block always travel together.

use serde::{Deserialize, Serialize};

use crate::ap::{cis_int, normalize_freq, ComplexVal};
use crate::error::{Error, Result};
use crate::mbb::{self, BootstrapDistribution, BootstrapPlan};

/// Agreement required between `â(2π − λ)` and `conj(â(λ))`.
pub const CONJ_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "EstimateRow", from = "EstimateRow")]
pub struct CyclicEstimate {
    pub lambda: f64,
    pub tau: i64,
    pub value: ComplexVal,
    /// Sample size of the series the estimate was computed from.
    pub n: usize,
}

#[derive(Serialize, Deserialize)]
struct EstimateRow {
    lambda: f64,
    tau: i64,
    re: f64,
    im: f64,
    n: usize,
}

impl From<CyclicEstimate> for EstimateRow {
    fn from(e: CyclicEstimate) -> Self {
        Self {
            lambda: e.lambda,
            tau: e.tau,
            re: e.value.re,
            im: e.value.im,
            n: e.n,
        }
    }
}

impl From<EstimateRow> for CyclicEstimate {
    fn from(r: EstimateRow) -> Self {
        Self {
            lambda: r.lambda,
            tau: r.tau,
            value: ComplexVal::new(r.re, r.im),
            n: r.n,
        }
    }
}

/// Lagged products `X_t X_{t+τ}` over the estimator's summation range,
/// together with the time index of the first product.
#[derive(Debug, Clone, PartialEq)]
pub struct LagProducts {
    pub first_t: i64,
    pub products: Vec<f64>,
}

impl LagProducts {
    pub fn new(series: &[f64], tau: i64) -> Result<Self> {
        let n = series.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let lag = tau.unsigned_abs() as usize;
        if lag >= n {
            return Err(Error::LagExceedsSample { tau: tau.abs(), n });
        }
        // 0-based: t runs over [lo, n − hi) and pairs with t + τ.
        let (lo, hi) = if tau >= 0 { (0, lag) } else { (lag, 0) };
        let products = (lo..n - hi)
            .map(|i| series[i] * series[(i as i64 + tau) as usize])
            .collect();
        Ok(Self {
            first_t: lo as i64 + 1,
            products,
        })
    }

    pub fn len(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    /// `W_t = X_t X_{t+τ} e^{−iλt}` over the summation range.
    pub fn modulate(&self, lambda: f64) -> Vec<ComplexVal> {
        let lambda = normalize_freq(lambda);
        self.products
            .iter()
            .zip(self.first_t..)
            .map(|(&p, t)| cis_int(lambda, t).conj() * p)
            .collect()
    }

    /// `(1/(n − |τ|)) Σ W_t`.
    pub fn estimate(&self, lambda: f64) -> ComplexVal {
        let lambda = normalize_freq(lambda);
        let sum: ComplexVal = self
            .products
            .iter()
            .zip(self.first_t..)
            .map(|(&p, t)| cis_int(lambda, t).conj() * p)
            .sum();
        sum / self.products.len() as f64
    }
}

/// The series `W_t(λ, τ)`. Negative lags use the same index range as the
/// estimator, `t = 1 + |τ|, …, n`.
pub fn w_series(series: &[f64], lambda: f64, tau: i64) -> Result<Vec<ComplexVal>> {
    Ok(LagProducts::new(series, tau)?.modulate(lambda))
}

pub fn cyclic_estimator(series: &[f64], lambda: f64, tau: i64) -> Result<CyclicEstimate> {
    let lp = LagProducts::new(series, tau)?;
    let lambda = normalize_freq(lambda);
    Ok(CyclicEstimate {
        lambda,
        tau,
        value: lp.estimate(lambda),
        n: series.len(),
    })
}

/// `B` draws of `√(kb) (Ŵ* − E* Ŵ*)`, with `k = ⌊m/b⌋` and `m = n − |τ|`.
pub fn mbb_cyclic_root(
    series: &[f64],
    lambda: f64,
    tau: i64,
    plan: &BootstrapPlan,
) -> Result<BootstrapDistribution<ComplexVal>> {
    let w = w_series(series, lambda, tau)?;
    root_from_w(&w, plan)
}

pub(crate) fn root_from_w(
    w: &[ComplexVal],
    plan: &BootstrapPlan,
) -> Result<BootstrapDistribution<ComplexVal>> {
    if plan.block == 0 || plan.block > w.len() {
        return Err(Error::BlockExceedsSample {
            b: plan.block,
            m: w.len(),
        });
    }
    let mut dist = mbb::bootstrap_root_distribution(w, plan)?;
    dist.meta.statistic = "cyclic_autocorrelation".into();
    Ok(dist)
}

/// Whether `â(2π − λ, τ)` equals `conj(â(λ, τ))` within [`CONJ_TOL`].
pub fn conj_symmetry_check(series: &[f64], lambda: f64, tau: i64) -> Result<bool> {
    let lp = LagProducts::new(series, tau)?;
    let lambda = normalize_freq(lambda);
    let direct = lp.estimate(lambda);
    let mirrored = lp.estimate(std::f64::consts::TAU - lambda);
    Ok((mirrored - direct.conj()).norm() <= CONJ_TOL)
}
