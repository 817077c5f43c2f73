//! Almost periodic functions represented as finite trigonometric polynomials.
//!
//! A function is stored through its frequency/coefficient pairs and evaluated
//! on the integers as `f(t) = Σ a(λ) e^{iλt}`. Coefficients are recovered with
//! the opposite sign, `a(λ) = M_t(f(t) e^{-iλt})`, where `M_t` is the mean value
//! over `t`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex carrier for Fourier coefficients and cyclic autocorrelations.
pub type ComplexVal = Complex64;

/// Frequencies closer than this (in radians) are treated as the same frequency.
pub const FREQ_TOL: f64 = 1e-9;

/// Relative tolerance on the imaginary part of a real-valued evaluation.
pub const REAL_TOL: f64 = 1e-12;

/// `e^{iλt}` for integer `t`.
///
/// Frequencies above π are rotated to `λ − 2π`, which leaves the value unchanged
/// on the integers. Conjugate partners `λ` and `2π − λ` then share the same
/// phase magnitude, so their contributions cancel in the imaginary part.
/// At `λ = π` the value is exactly `(−1)^t`.
pub fn cis_int(lambda: f64, t: i64) -> ComplexVal {
    if lambda == PI {
        return ComplexVal::new(if t.rem_euclid(2) == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    let theta = if lambda > PI {
        -((TAU - lambda) * t as f64)
    } else {
        lambda * t as f64
    };
    let (s, c) = theta.sin_cos();
    ComplexVal::new(c, s)
}

/// Maps a frequency into `[0, 2π)` and snaps it so that `2π − λ` is exact.
pub fn normalize_freq(lambda: f64) -> f64 {
    let mut l = lambda.rem_euclid(TAU);
    if !l.is_nan() && !(FREQ_TOL..TAU - FREQ_TOL).contains(&l) {
        return 0.0;
    }
    if l <= PI {
        // 2π − (2π − l) is exact by Sterbenz, and so is the partner 2π − l.
        l = TAU - (TAU - l);
    }
    l
}

/// One `(λ, a(λ))` pair of a trigonometric polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub lambda: f64,
    pub coeff: ComplexVal,
}

/// A finite trigonometric polynomial on the integers.
///
/// Terms are kept sorted by frequency in `[0, 2π)`, with duplicates (within
/// [`FREQ_TOL`]) merged by summing their coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct APFunction {
    terms: Vec<Term>,
}

impl APFunction {
    pub fn new<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, ComplexVal)>,
    {
        let mut raw = Vec::new();
        for (i, (lambda, coeff)) in terms.into_iter().enumerate() {
            if !lambda.is_finite() || !coeff.re.is_finite() || !coeff.im.is_finite() {
                return Err(Error::NonFinite(i));
            }
            raw.push(Term {
                lambda: normalize_freq(lambda),
                coeff,
            });
        }
        raw.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));

        let mut terms: Vec<Term> = Vec::with_capacity(raw.len());
        for t in raw {
            match terms.last_mut() {
                Some(last) if (t.lambda - last.lambda).abs() <= FREQ_TOL => last.coeff += t.coeff,
                _ => terms.push(t),
            }
        }
        terms.retain(|t| t.coeff != ComplexVal::new(0.0, 0.0));
        Ok(Self { terms })
    }

    pub fn constant(c: f64) -> Self {
        Self::new([(0.0, ComplexVal::new(c, 0.0))]).expect("finite constant")
    }

    /// `amp · cos(λt)`, split into the conjugate pair at `λ` and `2π − λ`.
    pub fn cosine(amp: f64, lambda: f64) -> Result<Self> {
        let l = normalize_freq(lambda);
        if l == 0.0 {
            return Self::new([(0.0, ComplexVal::new(amp, 0.0))]);
        }
        let half = ComplexVal::new(amp / 2.0, 0.0);
        Self::new([(l, half), (TAU - l, half)])
    }

    /// `amp · sin(λt)`.
    pub fn sine(amp: f64, lambda: f64) -> Result<Self> {
        let l = normalize_freq(lambda);
        if l == 0.0 {
            return Ok(Self::default());
        }
        // sin(x) = (e^{ix} − e^{−ix}) / 2i
        let c = ComplexVal::new(0.0, -amp / 2.0);
        Self::new([(l, c), (TAU - l, c.conj())])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient at `lambda`, zero when the frequency is absent.
    pub fn coeff(&self, lambda: f64) -> ComplexVal {
        let l = normalize_freq(lambda);
        self.terms
            .iter()
            .find(|t| (t.lambda - l).abs() <= FREQ_TOL)
            .map(|t| t.coeff)
            .unwrap_or_default()
    }

    /// The mean value `M_t(f)`, i.e. the coefficient at frequency zero.
    pub fn mean_value(&self) -> ComplexVal {
        self.coeff(0.0)
    }

    /// Sum of all coefficient moduli; bounds `sup_t |f(t)|`.
    pub fn abs_coeff_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    pub fn is_real_valued(&self) -> bool {
        let scale = self.abs_coeff_sum().max(1.0);
        let tol = REAL_TOL * scale;
        self.terms.iter().all(|t| {
            if t.lambda == 0.0 || t.lambda == PI {
                return t.coeff.im.abs() <= tol;
            }
            let partner = self.coeff(TAU - t.lambda);
            (partner - t.coeff.conj()).norm() <= tol
        })
    }

    pub fn eval(&self, t: i64) -> ComplexVal {
        self.terms
            .iter()
            .map(|term| term.coeff * cis_int(term.lambda, t))
            .sum()
    }

    /// Values `f(start), …, f(start + len − 1)`.
    pub fn sample(&self, start: i64, len: usize) -> Vec<ComplexVal> {
        (0..len as i64).map(|j| self.eval(start + j)).collect()
    }

    /// Explicit constant `C` with `|(1/n) Σ_{t=s}^{s+n−1} f(t) − a(0)| ≤ C/n`.
    ///
    /// Each oscillating term contributes `|a| · 2/|1 − e^{iλ}| = |a| / |sin(λ/2)|`,
    /// the bound on its geometric partial sums.
    pub fn rate_constant(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.lambda != 0.0)
            .map(|t| t.coeff.norm() / (t.lambda / 2.0).sin().abs())
            .sum()
    }

    /// `Σ_{λ≠0} |a(λ)|²`, which equals `M(f²) − M(f)²` for real-valued `f`.
    pub fn oscillating_power(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.lambda != 0.0)
            .map(|t| t.coeff.norm_sqr())
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|t| (t.lambda, t.coeff)),
        )
        .expect("sum of finite terms")
    }

    /// Pointwise product; frequencies add modulo 2π.
    pub fn mul(&self, other: &Self) -> Self {
        let pairs = self.terms.iter().flat_map(|a| {
            other
                .terms
                .iter()
                .map(move |b| (a.lambda + b.lambda, a.coeff * b.coeff))
        });
        Self::new(pairs).expect("product of finite terms")
    }
}

/// `Σ_terms a · e^{iλt}`.
pub fn eval_ap(f: &APFunction, t: i64) -> ComplexVal {
    f.eval(t)
}

/// `(1/len) Σ_{j=start}^{start+len−1} samples(j)` with 1-based `start`.
pub fn mean_value_est(samples: &[ComplexVal], start: usize, len: usize) -> Result<ComplexVal> {
    if len == 0 {
        return Err(Error::EmptyWindow);
    }
    if start == 0 || start - 1 + len > samples.len() {
        return Err(Error::InvalidParameter(format!(
            "window [{start}, {}] outside samples of length {}",
            start + len - 1,
            samples.len()
        )));
    }
    let sum: ComplexVal = samples[start - 1..start - 1 + len].iter().sum();
    Ok(sum / len as f64)
}

/// Windowed mean of `f` over `t = start, …, start + len − 1`.
pub fn windowed_mean(f: &APFunction, start: i64, len: usize) -> Result<ComplexVal> {
    if len == 0 {
        return Err(Error::EmptyWindow);
    }
    let sum: ComplexVal = (0..len as i64).map(|j| f.eval(start + j)).sum();
    Ok(sum / len as f64)
}

pub fn rate_constant(f: &APFunction) -> f64 {
    f.rate_constant()
}

/// `(1/n) Σ_{t=1}^{n} x_t e^{−iλt}`.
pub fn fourier_coeff(series: &[ComplexVal], lambda: f64) -> Result<ComplexVal> {
    if series.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sum: ComplexVal = series
        .iter()
        .zip(1i64..)
        .map(|(x, t)| x * cis_int(lambda, t).conj())
        .sum();
    Ok(sum / series.len() as f64)
}
