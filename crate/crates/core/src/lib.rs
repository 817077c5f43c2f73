//! Detection of periodic and almost periodic second-order structure in time
//! series.
//!
//! The crate estimates cyclic autocorrelations `a(λ, τ)` and calibrates their
//! significance with the moving block bootstrap. It also ships the simulation
//! models and Monte Carlo diagnostics used to check the bootstrap.
//!
//! Module map:
//!
//! * [`ap`]: finite trigonometric polynomials, mean values and rate constants.
//! * [`sim`]: periodic AR(1), amplitude-modulated and i.i.d. generators.
//! * [`mbb`]: the moving block bootstrap engine.
//! * [`cyclic`]: the cyclic autocorrelation estimator and its bootstrap.
//! * [`detect`]: frequency scans, period inference, stationarity verdicts.
//! * [`diagnostics`]: bootstrap consistency and block-variance checks.

pub mod ap;
pub mod cyclic;
pub mod detect;
pub mod diagnostics;
pub mod error;
pub mod mbb;
pub mod rng;
pub mod series;
pub mod sim;

pub use ap::{APFunction, ComplexVal};
pub use cyclic::CyclicEstimate;
pub use detect::{ScanConfig, ScanResult, StationarityVerdict};
pub use error::{Error, Result};
pub use mbb::{BootstrapDistribution, BootstrapPlan};
pub use series::Series;
