//! Generators for the test models: periodic AR(1), amplitude-modulated noise,
//! and i.i.d. Gaussian baselines.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::ap::APFunction;
use crate::error::{Error, Result};
use crate::rng;
use crate::series::Series;

/// Stream id of the innovation sequence inside a generator's seed.
const NOISE_STREAM: u64 = 0;

/// `X_t = a_t X_{t−1} + ε_t` with `a_t = mean + amp · sin(freq · t)` and
/// `ε_t ~ N(0, noise_sd²)`.
///
/// The recursion starts from `X = 0` at `t = −burn_in` and the returned sample
/// covers `t = 1, …, n`, so the coefficient phase is tied to absolute time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Par1Spec {
    pub n: usize,
    pub coeff_mean: f64,
    pub coeff_amp: f64,
    pub coeff_freq: f64,
    pub noise_sd: f64,
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for Par1Spec {
    fn default() -> Self {
        Self {
            n: 300,
            coeff_mean: 2.0 / 3.0,
            coeff_amp: 1.0 / 3.0,
            coeff_freq: TAU / 3.0,
            noise_sd: 1.0,
            burn_in: 200,
            seed: 0,
        }
    }
}

impl Par1Spec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyInput);
        }
        let sup = self.coefficient_sup();
        if sup.is_nan() || sup >= 1.0 {
            return Err(Error::ExplosiveCoefficient(sup));
        }
        if !self.coeff_freq.is_finite() {
            return Err(Error::InvalidParameter("coefficient frequency".into()));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise sd {}",
                self.noise_sd
            )));
        }
        Ok(())
    }

    /// `sup_t |a_t|` over the integers. For a commensurate frequency this is a
    /// maximum over one period, which can be smaller than `|mean| + |amp|`:
    /// the default coefficients take only the values `2/3 ± √3/6` and `2/3`.
    pub fn coefficient_sup(&self) -> f64 {
        match self.coefficient_period() {
            Some(p) => (0..p)
                .map(|t| self.coefficient_in(Some(p), t).abs())
                .fold(0.0, f64::max),
            None => self.coeff_mean.abs() + self.coeff_amp.abs(),
        }
    }

    /// Smallest integer period of `sin(freq · t)` up to 1000, if any.
    fn coefficient_period(&self) -> Option<i64> {
        let cycles = self.coeff_freq / TAU;
        (1..=1000i64).find(|&p| {
            let k = cycles * p as f64;
            (k - k.round()).abs() < 1e-12
        })
    }

    /// `a_t`. For commensurate frequencies `t` is reduced modulo the period
    /// first, which makes the coefficient sequence exactly periodic.
    pub fn coefficient(&self, t: i64) -> f64 {
        self.coefficient_in(self.coefficient_period(), t)
    }

    fn coefficient_in(&self, period: Option<i64>, t: i64) -> f64 {
        let t = period.map_or(t, |p| t.rem_euclid(p));
        self.coeff_mean + self.coeff_amp * (self.coeff_freq * t as f64).sin()
    }
}

pub fn gen_par1(spec: &Par1Spec) -> Result<Series> {
    spec.validate()?;
    let period = spec.coefficient_period();

    let mut noise = rng::gaussian(spec.seed, NOISE_STREAM);
    let first = 1 - spec.burn_in as i64;
    let mut x = 0.0;
    let mut out = Vec::with_capacity(spec.n);
    for t in first..=spec.n as i64 {
        x = spec.coefficient_in(period, t) * x + spec.noise_sd * noise.draw();
        if t >= 1 {
            out.push(x);
        }
    }
    Series::new(out)
}

/// Base process multiplied by the envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseProcess {
    IidGaussian { sd: f64 },
    /// Stationary AR(1), started from its stationary law.
    Ar1 { phi: f64, sd: f64 },
}

/// `X_t = Re f(t) · Z_t` for a real-valued envelope `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulatedSpec {
    pub n: usize,
    pub seed: u64,
    pub envelope: APFunction,
    pub base: BaseProcess,
}

pub fn gen_modulated(spec: &ModulatedSpec) -> Result<Series> {
    if spec.n == 0 {
        return Err(Error::EmptyInput);
    }
    if !spec.envelope.is_real_valued() {
        return Err(Error::NonRealEnvelope);
    }
    let mut noise = rng::gaussian(spec.seed, NOISE_STREAM);
    let base: Vec<f64> = match spec.base {
        BaseProcess::IidGaussian { sd } => {
            check_sd(sd)?;
            (0..spec.n).map(|_| sd * noise.draw()).collect()
        }
        BaseProcess::Ar1 { phi, sd } => {
            check_sd(sd)?;
            if phi.is_nan() || phi.abs() >= 1.0 {
                return Err(Error::InvalidParameter(format!("AR(1) phi {phi}")));
            }
            let mut z = sd / (1.0 - phi * phi).sqrt() * noise.draw();
            (0..spec.n)
                .map(|_| {
                    z = phi * z + sd * noise.draw();
                    z
                })
                .collect()
        }
    };
    let values = base
        .into_iter()
        .zip(1i64..)
        .map(|(z, t)| spec.envelope.eval(t).re * z)
        .collect();
    Series::new(values)
}

/// `n` i.i.d. `N(0, sd²)` values.
pub fn gen_iid(n: usize, sd: f64, seed: u64) -> Result<Series> {
    check_sd(sd)?;
    Series::new(rng::gaussian(seed, NOISE_STREAM).fill(n).into_iter().map(|z| sd * z).collect())
}

fn check_sd(sd: f64) -> Result<()> {
    if sd >= 0.0 && sd.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("standard deviation {sd}")))
    }
}

/// A data-generating model with a known mean `μ = M_t(E X_t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Zeros,
    Iid { sd: f64 },
    /// `n` and `seed` of the template are replaced at generation time.
    Par1(Par1Spec),
    Modulated { envelope: APFunction, base: BaseProcess },
}

impl Model {
    pub fn par1_default() -> Self {
        Model::Par1(Par1Spec::default())
    }

    /// `1 + amp · cos(2πt / period)` envelope over i.i.d. `N(0, 1)`.
    pub fn modulated_cosine(amp: f64, period: f64) -> Result<Self> {
        let envelope = APFunction::constant(1.0).add(&APFunction::cosine(amp, TAU / period)?);
        Ok(Model::Modulated {
            envelope,
            base: BaseProcess::IidGaussian { sd: 1.0 },
        })
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<Series> {
        match self {
            Model::Zeros => {
                if n == 0 {
                    return Err(Error::EmptyInput);
                }
                Series::new(vec![0.0; n])
            }
            Model::Iid { sd } => gen_iid(n, *sd, seed),
            Model::Par1(template) => gen_par1(&Par1Spec {
                n,
                seed,
                ..template.clone()
            }),
            Model::Modulated { envelope, base } => gen_modulated(&ModulatedSpec {
                n,
                seed,
                envelope: envelope.clone(),
                base: *base,
            }),
        }
    }

    /// `M_t(E X_t)`. Every supported model is driven by zero-mean noise.
    pub fn mean(&self) -> f64 {
        0.0
    }
}
