//! Deterministic synthetic-series generators, used as round-trip oracles in
//! tests and for demo fixtures.
//!
//! Noise is applied in log space so the origin-constrained estimators stay
//! unbiased, and the reference point is always noise-free so normalization
//! never shifts a whole series.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::hyperinflation::{self, HyperinflationParams};
use crate::series::{PeriodUnit, SeriesError, TimeSeries};

/// Errors from the generators.
#[derive(Debug)]
pub enum SynthError {
    InvalidLength { needed: usize, got: usize },
    NonpositiveInitial { value: f64 },
    InvalidNoise { sigma: f64 },
    /// A generated level left the positive floating-point range.
    NumericRange { t: i64 },
    Series(SeriesError),
    Hyper(hyperinflation::HyperinflationError),
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::InvalidLength { needed, got } => {
                write!(f, "need at least {needed} points, got {got}")
            }
            SynthError::NonpositiveInitial { value } => {
                write!(f, "initial level {value} must be positive")
            }
            SynthError::InvalidNoise { sigma } => {
                write!(f, "noise sigma {sigma} must be finite and nonnegative")
            }
            SynthError::NumericRange { t } => {
                write!(f, "generated level at t = {t} left the positive floating-point range")
            }
            SynthError::Series(e) => write!(f, "{e}"),
            SynthError::Hyper(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SynthError {}

impl From<SeriesError> for SynthError {
    fn from(e: SeriesError) -> Self {
        SynthError::Series(e)
    }
}

impl From<hyperinflation::HyperinflationError> for SynthError {
    fn from(e: hyperinflation::HyperinflationError) -> Self {
        SynthError::Hyper(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    Gaussian,
}

/// Log-space noise: `value(t) = level(t) * exp(eps(t))` with
/// `eps ~ N(0, sigma^2)` drawn from a seeded stream, and `eps(0) = 0`.
/// `sigma = 0` produces exactly the same output as `NoiseKind::None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec { kind: NoiseKind::None, sigma: 0.0, seed: 0 }
    }

    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        NoiseSpec { kind: NoiseKind::Gaussian, sigma, seed }
    }

    /// Draws for t = 0..n-1; the reference draw is pinned to zero.
    fn draws(&self, n: usize) -> Result<Vec<f64>, SynthError> {
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(SynthError::InvalidNoise { sigma: self.sigma });
        }
        let mut eps = vec![0.0; n];
        if self.kind == NoiseKind::None || self.sigma == 0.0 {
            return Ok(eps);
        }
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        let normal = Normal::new(0.0, self.sigma)
            .map_err(|_| SynthError::InvalidNoise { sigma: self.sigma })?;
        for e in eps.iter_mut().skip(1) {
            *e = normal.sample(&mut rng);
        }
        Ok(eps)
    }
}

/// `value(t) = initial * exp(lambda * t + eps(t))` for `t = 0..n-1`.
/// Deterministic for a fixed seed.
pub fn generate_exponential_series(
    lambda: f64,
    initial: f64,
    n: usize,
    noise: &NoiseSpec,
) -> Result<TimeSeries, SynthError> {
    if n < 2 {
        return Err(SynthError::InvalidLength { needed: 2, got: n });
    }
    if !(initial > 0.0) || !initial.is_finite() {
        return Err(SynthError::NonpositiveInitial { value: initial });
    }
    let eps = noise.draws(n)?;
    let mut points = Vec::with_capacity(n);
    for (t, e) in eps.iter().enumerate() {
        let value = initial * (lambda * t as f64 + e).exp();
        if !value.is_finite() || value <= 0.0 {
            return Err(SynthError::NumericRange { t: t as i64 });
        }
        points.push((t as i64, value));
    }
    Ok(TimeSeries::new("synthetic-exponential", PeriodUnit::Annual, 0, points, 0)?)
}

/// `value(t) = exp(entropy(t) + eps(t))` where the entropy follows the
/// two-segment model in `params`. Deterministic for a fixed seed.
pub fn generate_double_exponential_series(
    params: &HyperinflationParams,
    n: usize,
    noise: &NoiseSpec,
) -> Result<TimeSeries, SynthError> {
    let needed = (params.t_star.max(0.0) as usize).saturating_add(3);
    if n < needed {
        return Err(SynthError::InvalidLength { needed, got: n });
    }
    let eps = noise.draws(n)?;
    let mut points = Vec::with_capacity(n);
    for (t, e) in eps.iter().enumerate() {
        let entropy = hyperinflation::info_entropy_value(t as f64, params);
        let value = (entropy + e).exp();
        if !value.is_finite() || value <= 0.0 {
            return Err(SynthError::NumericRange { t: t as i64 });
        }
        points.push((t as i64, value));
    }
    Ok(TimeSeries::new(
        "synthetic-double-exponential",
        PeriodUnit::Monthly,
        0,
        points,
        0,
    )?)
}
