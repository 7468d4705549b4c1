//! JSON report model.
//!
//! Reports are deterministic: identical inputs and flags serialize to
//! byte-identical documents. Key order is fixed by struct order, inputs are
//! identified by content digest rather than timestamps, and every numeric
//! field is checked finite before emission. Percent fields carry both the
//! full-precision rate and a display string rounded to 0.1 point.

use serde::Serialize;
use sha2::{Digest, Sha256};

use growthlab::{DecompositionResult, GrowthFit, HyperinflationFit, Scenario};

use crate::CliError;

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub warnings: Vec<String>,
    pub fits: Vec<FitSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyper: Option<HyperSummary>,
}

#[derive(Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct FitSummary {
    pub name: String,
    pub unit: String,
    pub n_obs: usize,
    pub lambda: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub r_squared: f64,
    pub df_residuals: usize,
    pub avg_growth_rate: f64,
    pub avg_growth_rate_display: String,
}

#[derive(Serialize)]
pub struct DecompositionSummary {
    pub residual_fit: FitSummary,
    pub identity_max_abs_error: f64,
    pub identity_holds: bool,
    pub hypothesis_residual_negligible: bool,
    pub predicted_lambda_cpi: f64,
    pub scenario: String,
    pub scenario_tol: f64,
    pub money_velocity_log_rate: f64,
    pub sav_imputed_periods: Vec<i64>,
}

#[derive(Serialize)]
pub struct HyperSummary {
    pub lambda1: f64,
    pub v0: f64,
    pub t_star: f64,
    pub lambda2: f64,
    pub constrained_intercept: f64,
    pub acceleration_rate: f64,
    pub acceleration_display: String,
    pub segment1: SegmentSummary,
    pub segment2_lambda_free: f64,
    pub segment2_sse: f64,
    pub sse_total: f64,
    pub degenerate_acceleration: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_range: Option<String>,
}

#[derive(Serialize)]
pub struct SegmentSummary {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub sse: f64,
    pub n_obs: usize,
}

/// Round a growth rate to 0.1 percentage point for display: first to 0.01
/// point (half away from zero), then to 0.1 point with ties to even. The
/// two-stage chain reproduces how rates quoted at a couple of significant
/// figures are conventionally re-rounded (0.11851 -> 11.85 -> "11.8%",
/// 0.00954 -> 0.95 -> "1.0%").
pub fn display_percent(rate: f64) -> String {
    let hundredths = (rate * 10_000.0).round() as i64;
    let tenths = round_half_even_div10(hundredths);
    format!("{:.1}%", tenths as f64 / 10.0)
}

fn round_half_even_div10(value: i64) -> i64 {
    let quotient = value.div_euclid(10);
    let remainder = value.rem_euclid(10);
    match remainder {
        0..=4 => quotient,
        6..=9 => quotient + 1,
        _ => {
            if quotient % 2 == 0 {
                quotient
            } else {
                quotient + 1
            }
        }
    }
}

pub fn fit_summary(name: &str, unit: &str, fit: &GrowthFit) -> Result<FitSummary, CliError> {
    for (label, x) in [
        ("lambda", fit.lambda),
        ("ci95_low", fit.ci_low),
        ("ci95_high", fit.ci_high),
        ("r_squared", fit.r_squared),
        ("avg_growth_rate", fit.avg_growth_rate),
    ] {
        ensure_finite(x, label)?;
    }
    Ok(FitSummary {
        name: name.to_string(),
        unit: unit.to_string(),
        n_obs: fit.n_obs,
        lambda: fit.lambda,
        ci95_low: fit.ci_low,
        ci95_high: fit.ci_high,
        r_squared: fit.r_squared,
        df_residuals: fit.df_residuals,
        avg_growth_rate: fit.avg_growth_rate,
        avg_growth_rate_display: display_percent(fit.avg_growth_rate),
    })
}

pub fn decomposition_summary(
    result: &DecompositionResult,
    scenario: Scenario,
    scenario_tol: f64,
) -> Result<DecompositionSummary, CliError> {
    let residual_fit = fit_summary("res", &result.residual_series.unit().to_string(), &result.residual_fit)?;
    let predicted = growthlab::predict_cpi_lambda(
        result.fits.bms.lambda,
        result.fits.gdp.lambda,
        result.fits.sav.lambda,
        result.residual_fit.lambda,
    );
    let velocity = growthlab::money_velocity_log_rate(result.fits.bms.lambda, result.fits.gdp.lambda);
    ensure_finite(result.identity_max_abs_error, "identity_max_abs_error")?;
    ensure_finite(predicted, "predicted_lambda_cpi")?;
    ensure_finite(velocity, "money_velocity_log_rate")?;
    Ok(DecompositionSummary {
        residual_fit,
        identity_max_abs_error: result.identity_max_abs_error,
        identity_holds: result.identity_max_abs_error <= 1e-12,
        hypothesis_residual_negligible: result.residual_fit.lambda.abs() <= 1e-9,
        predicted_lambda_cpi: predicted,
        scenario: scenario.to_string(),
        scenario_tol,
        money_velocity_log_rate: velocity,
        sav_imputed_periods: result.sav_imputed_indices.clone(),
    })
}

pub fn hyper_summary(
    fit: &HyperinflationFit,
    search_range: Option<String>,
) -> Result<HyperSummary, CliError> {
    for (label, x) in [
        ("lambda1", fit.params.lambda1),
        ("v0", fit.params.v0),
        ("t_star", fit.params.t_star),
        ("lambda2", fit.params.lambda2),
        ("constrained_intercept", fit.constrained_intercept),
        ("acceleration_rate", fit.acceleration_rate),
        ("segment2_lambda_free", fit.segment2_lambda_free),
        ("segment2_sse", fit.segment2_sse),
        ("sse_total", fit.sse_total),
        ("segment1 slope", fit.segment1.slope),
        ("segment1 intercept", fit.segment1.intercept),
        ("segment1 r_squared", fit.segment1.r_squared),
        ("segment1 sse", fit.segment1.sse),
    ] {
        ensure_finite(x, label)?;
    }
    Ok(HyperSummary {
        lambda1: fit.params.lambda1,
        v0: fit.params.v0,
        t_star: fit.params.t_star,
        lambda2: fit.params.lambda2,
        constrained_intercept: fit.constrained_intercept,
        acceleration_rate: fit.acceleration_rate,
        acceleration_display: display_percent(fit.acceleration_rate),
        segment1: SegmentSummary {
            slope: fit.segment1.slope,
            intercept: fit.segment1.intercept,
            r_squared: fit.segment1.r_squared,
            sse: fit.segment1.sse,
            n_obs: fit.segment1.n_obs,
        },
        segment2_lambda_free: fit.segment2_lambda_free,
        segment2_sse: fit.segment2_sse,
        sse_total: fit.sse_total,
        degenerate_acceleration: fit.degenerate_acceleration,
        search_range,
    })
}

pub fn digest_file(path: &str) -> Result<InputDigest, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::validation(format!("cannot read {path}: {e}")))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let sha256 = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect::<String>();
    Ok(InputDigest { path: path.to_string(), sha256 })
}

pub fn render(report: &Report) -> Result<String, CliError> {
    let mut out = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::numerical(format!("cannot serialize report: {e}")))?;
    out.push('\n');
    Ok(out)
}

fn ensure_finite(x: f64, what: &str) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::numerical(format!("non-finite {what} in report")))
    }
}
