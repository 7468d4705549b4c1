//! Decomposition of consumer-price growth into money-supply, output, and
//! savings components, with a residual series that closes the identity
//! exactly:
//!
//! `vCPI(t) = vBMS(t) - vGDP(t) - vSAV(t) - RES(t)`
//!
//! where each `v` is the log-relative series of the underlying index. The
//! residual is defined pointwise as the remainder, so the identity holds by
//! construction; its own fitted rate-constant measures how far the
//! three-component hypothesis is from exact.

use std::fmt;

use crate::growthfit::{self, FitError, GrowthFit};
use crate::series::{RelativeLogSeries, SeriesError, TimeSeries};

/// Errors from decomposition.
#[derive(Debug)]
pub enum DecompositionError {
    /// Input series do not share the same period unit.
    UnitMismatch,
    /// Input series do not share the same reference period.
    ReferenceMismatch,
    /// Time grids differ where they must align.
    GridMismatch { detail: String },
    Series(SeriesError),
    Fit(FitError),
}

impl fmt::Display for DecompositionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionError::UnitMismatch => {
                write!(f, "all component series must share the same period unit")
            }
            DecompositionError::ReferenceMismatch => {
                write!(f, "all component series must share the same reference period")
            }
            DecompositionError::GridMismatch { detail } => write!(f, "grid mismatch: {detail}"),
            DecompositionError::Series(e) => write!(f, "{e}"),
            DecompositionError::Fit(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DecompositionError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            DecompositionError::Series(e) => Some(e),
            DecompositionError::Fit(e) => Some(e),
            _ => None,
        }
    }
}

impl From<SeriesError> for DecompositionError {
    fn from(e: SeriesError) -> Self {
        DecompositionError::Series(e)
    }
}

impl From<FitError> for DecompositionError {
    fn from(e: FitError) -> Self {
        DecompositionError::Fit(e)
    }
}

/// Rate-constant fits for the four components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentFits {
    pub bms: GrowthFit,
    pub gdp: GrowthFit,
    pub sav: GrowthFit,
    pub cpi: GrowthFit,
}

/// Normalized log-relative series for the four components; `sav` is the
/// imputed series when the input was sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSeries {
    pub bms: RelativeLogSeries,
    pub gdp: RelativeLogSeries,
    pub sav: RelativeLogSeries,
    pub cpi: RelativeLogSeries,
}

/// Everything produced by [`decompose_cpi`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub fits: ComponentFits,
    /// `RES(t) = vBMS(t) - vGDP(t) - vSAV(t) - vCPI(t)` pointwise.
    pub residual_series: RelativeLogSeries,
    pub residual_fit: GrowthFit,
    /// Largest pointwise violation of the closed identity; zero up to
    /// floating-point noise because the residual is the remainder.
    pub identity_max_abs_error: f64,
    pub components: ComponentSeries,
    /// Savings indices filled by imputation (empty when the input was dense).
    pub sav_imputed_indices: Vec<i64>,
}

/// Qualitative outcome implied by the sign pattern of the component
/// rate-constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Negative output growth; price growth can exceed money growth.
    Recession,
    /// Savings growth strong enough to push predicted price growth negative.
    Deflation,
    /// No (or negligible) growth in output and savings; price growth tracks
    /// money growth one-for-one.
    Stagflation,
    Baseline,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Recession => write!(f, "recession"),
            Scenario::Deflation => write!(f, "deflation"),
            Scenario::Stagflation => write!(f, "stagflation"),
            Scenario::Baseline => write!(f, "baseline"),
        }
    }
}

/// A scenario classification together with the predicted CPI rate-constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioOutcome {
    pub predicted_lambda_cpi: f64,
    pub classification: Scenario,
}

/// Pointwise residual `RES(t) = vBMS(t) - vGDP(t) - vSAV(t) - vCPI(t)`.
///
/// All four inputs must share the same unit and the same time grid.
pub fn residual_series(
    vbms: &RelativeLogSeries,
    vgdp: &RelativeLogSeries,
    vsav: &RelativeLogSeries,
    vcpi: &RelativeLogSeries,
) -> Result<RelativeLogSeries, DecompositionError> {
    let unit = vbms.unit();
    for s in [vgdp, vsav, vcpi] {
        if s.unit() != unit {
            return Err(DecompositionError::UnitMismatch);
        }
        if s.len() != vbms.len() {
            return Err(DecompositionError::GridMismatch {
                detail: format!("series lengths differ ({} vs {})", vbms.len(), s.len()),
            });
        }
    }
    let mut points = Vec::with_capacity(vbms.len());
    for i in 0..vbms.len() {
        let (tb, yb) = vbms.points()[i];
        let (tg, yg) = vgdp.points()[i];
        let (ts, ys) = vsav.points()[i];
        let (tc, yc) = vcpi.points()[i];
        if tg != tb || ts != tb || tc != tb {
            return Err(DecompositionError::GridMismatch {
                detail: format!("time grids differ at position {i}"),
            });
        }
        points.push((tb, yb - yg - ys - yc));
    }
    Ok(RelativeLogSeries::new(unit, points)?)
}

/// Normalize the four component series, fit each, build and fit the residual.
///
/// The savings series may be sparse; it is imputed onto the common grid from
/// its own origin-constrained fit, and `fits.sav` is computed on the observed
/// points only so its degrees of freedom reflect the data actually measured.
pub fn decompose_cpi(
    bms: &TimeSeries,
    gdp: &TimeSeries,
    sav: &TimeSeries,
    cpi: &TimeSeries,
) -> Result<DecompositionResult, DecompositionError> {
    let unit = bms.unit();
    if [gdp.unit(), sav.unit(), cpi.unit()].iter().any(|&u| u != unit) {
        return Err(DecompositionError::UnitMismatch);
    }
    let reference_period = bms.period_of_index(bms.reference_index());
    for s in [gdp, sav, cpi] {
        if s.period_of_index(s.reference_index()) != reference_period {
            return Err(DecompositionError::ReferenceMismatch);
        }
    }

    // bms / gdp / cpi must share one grid of raw periods
    let grid: Vec<i64> = bms.points().iter().map(|p| bms.period_of_index(p.index)).collect();
    for (label, s) in [("gdp", gdp), ("cpi", cpi)] {
        let other: Vec<i64> = s.points().iter().map(|p| s.period_of_index(p.index)).collect();
        if other != grid {
            return Err(DecompositionError::GridMismatch {
                detail: format!("{label} periods differ from bms periods"),
            });
        }
    }
    // savings may be a subset of that grid
    for p in sav.points() {
        let period = sav.period_of_index(p.index);
        if !grid.contains(&period) {
            return Err(DecompositionError::GridMismatch {
                detail: format!("sav period {period} is not on the common grid"),
            });
        }
    }

    let sav_fit = growthfit::fit_rate_constant(&sav.normalize_to_reference()?)?;
    let sav_targets: Vec<i64> = grid.iter().map(|&period| period - sav.base_period()).collect();
    let sav_full = sav.impute_missing_years(&sav_targets)?;
    let sav_imputed_indices: Vec<i64> = sav_full.imputed_indices().collect();

    let vbms = bms.normalize_to_reference()?;
    let vgdp = gdp.normalize_to_reference()?;
    let vsav = sav_full.normalize_to_reference()?;
    let vcpi = cpi.normalize_to_reference()?;

    let fits = ComponentFits {
        bms: growthfit::fit_rate_constant(&vbms)?,
        gdp: growthfit::fit_rate_constant(&vgdp)?,
        sav: sav_fit,
        cpi: growthfit::fit_rate_constant(&vcpi)?,
    };

    let res = residual_series(&vbms, &vgdp, &vsav, &vcpi)?;
    let residual_fit = growthfit::fit_rate_constant(&res)?;

    let identity_max_abs_error = res
        .points()
        .iter()
        .enumerate()
        .map(|(i, &(_, r))| {
            let yb = vbms.points()[i].1;
            let yg = vgdp.points()[i].1;
            let ys = vsav.points()[i].1;
            let yc = vcpi.points()[i].1;
            (yb - yg - ys - yc - r).abs()
        })
        .fold(0.0, f64::max);

    Ok(DecompositionResult {
        fits,
        residual_series: res,
        residual_fit,
        identity_max_abs_error,
        components: ComponentSeries { bms: vbms, gdp: vgdp, sav: vsav, cpi: vcpi },
        sav_imputed_indices,
    })
}

/// Predicted CPI rate-constant from the identity:
/// `lambda_cpi = lambda_bms - lambda_gdp - lambda_sav - lambda_res`.
/// Pass `lambda_res = 0` for the pure three-component hypothesis.
pub fn predict_cpi_lambda(
    lambda_bms: f64,
    lambda_gdp: f64,
    lambda_sav: f64,
    lambda_res: f64,
) -> f64 {
    lambda_bms - lambda_gdp - lambda_sav - lambda_res
}

/// Classify the qualitative scenario implied by the component
/// rate-constants, using `tol` as the threshold for "no growth".
///
/// Precedence: recession (negative output growth) over deflation (predicted
/// price growth below `-tol`) over stagflation (both output and savings
/// growth within `tol` of zero) over baseline.
pub fn classify_scenario(
    lambda_bms: f64,
    lambda_gdp: f64,
    lambda_sav: f64,
    tol: f64,
) -> ScenarioOutcome {
    assert!(tol >= 0.0, "tolerance must be nonnegative");
    let predicted = predict_cpi_lambda(lambda_bms, lambda_gdp, lambda_sav, 0.0);
    let classification = if lambda_gdp < -tol {
        Scenario::Recession
    } else if predicted < -tol {
        Scenario::Deflation
    } else if lambda_gdp.abs() <= tol && lambda_sav.abs() <= tol {
        Scenario::Stagflation
    } else {
        Scenario::Baseline
    };
    ScenarioOutcome { predicted_lambda_cpi: predicted, classification }
}

/// Per-period rate of change of the log "velocity of money"
/// (output over money supply): `-(lambda_bms - lambda_gdp)`.
pub fn money_velocity_log_rate(lambda_bms: f64, lambda_gdp: f64) -> f64 {
    -(lambda_bms - lambda_gdp)
}
