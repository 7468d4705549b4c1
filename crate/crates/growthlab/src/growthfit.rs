//! Through-origin least-squares estimation of exponential rate-constants.
//!
//! The model is `y(t) = lambda * t` on natural-log relative series, fitted
//! without an intercept. Conventions:
//!
//! - `lambda = sum(t*y) / sum(t^2)`
//! - residual degrees of freedom `df = n - 1` (one estimated parameter);
//!   the `t = 0` observation counts toward `n` even though it contributes
//!   nothing to the sums
//! - `R^2` is the uncentered coefficient `1 - SSE / sum(y^2)`, the usual
//!   convention for regression through the origin
//! - the 95% interval is `lambda +- t(0.975, df) * SE(lambda)` with
//!   `SE = sqrt((SSE/df) / sum(t^2))`
//! - a zero-SSE fit reports `R^2 = 1` and a zero-width interval instead of
//!   failing

use std::fmt;

use statrs::distribution::{Continuous, ContinuousCDF, StudentsT};

use crate::series::RelativeLogSeries;

/// Errors from rate-constant estimation.
#[derive(Debug)]
pub enum FitError {
    /// Fewer than two observations.
    TooFewPoints { got: usize },
    /// Every observation sits at `t = 0`; the slope is unidentified.
    NoTimeVariation,
    /// `lambda_from_growth_rate` needs `r > -1`.
    GrowthRateOutOfRange { r: f64 },
    /// Invalid Student-t quantile request.
    InvalidQuantile { p: f64, df: usize },
    /// A non-finite number escaped the computation.
    NonFinite { what: &'static str },
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::TooFewPoints { got } => {
                write!(f, "need at least 2 observations to fit, got {got}")
            }
            FitError::NoTimeVariation => {
                write!(f, "all observations at t = 0; rate-constant is unidentified")
            }
            FitError::GrowthRateOutOfRange { r } => {
                write!(f, "growth rate {r} is not above -1; log(1 + r) undefined")
            }
            FitError::InvalidQuantile { p, df } => {
                write!(f, "invalid t-quantile request: p = {p}, df = {df}")
            }
            FitError::NonFinite { what } => write!(f, "non-finite {what} in fit"),
        }
    }
}

impl std::error::Error for FitError {}

/// A fitted exponential rate-constant with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    /// Per-period rate-constant (slope of the log series versus time).
    pub lambda: f64,
    /// Lower end of the two-sided 95% confidence interval.
    pub ci_low: f64,
    /// Upper end of the two-sided 95% confidence interval.
    pub ci_high: f64,
    /// Uncentered coefficient of determination, in `[0, 1]`.
    pub r_squared: f64,
    /// Residual degrees of freedom, `n_obs - 1`.
    pub df_residuals: usize,
    /// Average per-period growth rate, `exp(lambda) - 1`.
    pub avg_growth_rate: f64,
    /// Number of observations, including the reference point.
    pub n_obs: usize,
}

impl GrowthFit {
    /// Width of the 95% interval; zero for an exact fit.
    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }
}

/// Fit `y = lambda * t` by least squares through the origin.
pub fn fit_rate_constant(series: &RelativeLogSeries) -> Result<GrowthFit, FitError> {
    let points = series.points();
    let n = points.len();
    if n < 2 {
        return Err(FitError::TooFewPoints { got: n });
    }

    let mut sum_ty = 0.0;
    let mut sum_tt = 0.0;
    let mut sum_yy = 0.0;
    for &(t, y) in points {
        let t = t as f64;
        sum_ty += t * y;
        sum_tt += t * t;
        sum_yy += y * y;
    }
    if sum_tt == 0.0 {
        return Err(FitError::NoTimeVariation);
    }

    let lambda = sum_ty / sum_tt;
    let sse: f64 = points
        .iter()
        .map(|&(t, y)| {
            let e = y - lambda * t as f64;
            e * e
        })
        .sum();
    let df = n - 1;

    let r_squared = if sse == 0.0 || sum_yy == 0.0 {
        1.0
    } else {
        (1.0 - sse / sum_yy).clamp(0.0, 1.0)
    };

    let se = ((sse / df as f64) / sum_tt).sqrt();
    let half_width = if se == 0.0 { 0.0 } else { t_quantile(0.975, df)? * se };

    let fit = GrowthFit {
        lambda,
        ci_low: lambda - half_width,
        ci_high: lambda + half_width,
        r_squared,
        df_residuals: df,
        avg_growth_rate: growth_rate_from_lambda(lambda),
        n_obs: n,
    };
    if !fit.lambda.is_finite() {
        return Err(FitError::NonFinite { what: "lambda" });
    }
    if !fit.ci_low.is_finite() || !fit.ci_high.is_finite() {
        return Err(FitError::NonFinite { what: "confidence interval" });
    }
    Ok(fit)
}

/// Average per-period growth rate for a rate-constant: `r = exp(lambda) - 1`.
pub fn growth_rate_from_lambda(lambda: f64) -> f64 {
    lambda.exp_m1()
}

/// Rate-constant for an average growth rate: `lambda = ln(1 + r)`, `r > -1`.
pub fn lambda_from_growth_rate(r: f64) -> Result<f64, FitError> {
    if !(r > -1.0) {
        return Err(FitError::GrowthRateOutOfRange { r });
    }
    Ok(r.ln_1p())
}

/// Information-entropy "velocity" of an exponential process at time `t`:
/// `vG(t) = lambda * t`.
pub fn velocity_at(lambda: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0, "velocity is defined for t >= 0");
    lambda * t
}

/// Two-sided Student-t critical value: the `p` quantile at `df` degrees of
/// freedom. Accurate to well below 1e-8 against reference tables.
pub fn t_quantile(p: f64, df: usize) -> Result<f64, FitError> {
    if !(p > 0.0 && p < 1.0) || df < 1 {
        return Err(FitError::InvalidQuantile { p, df });
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let dist = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|_| FitError::InvalidQuantile { p, df })?;
    // statrs gets within ~1e-4 for extreme df; a couple of Newton steps on
    // its own CDF tightens that to ~1e-10 everywhere.
    let mut x = dist.inverse_cdf(p);
    for _ in 0..3 {
        let density = dist.pdf(x);
        if density <= 0.0 || !density.is_finite() {
            break;
        }
        let step = (dist.cdf(x) - p) / density;
        x -= step;
        if step.abs() <= 1e-14 * x.abs().max(1.0) {
            break;
        }
    }
    if !x.is_finite() {
        return Err(FitError::NonFinite { what: "t quantile" });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::PeriodUnit;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn rls(points: Vec<(i64, f64)>) -> RelativeLogSeries {
        RelativeLogSeries::new(PeriodUnit::Annual, points).unwrap()
    }

    #[test]
    fn four_point_hand_oracle() {
        // sum(t*y) = 1.39, sum(t^2) = 14; residuals 1/1400, 16/1400, -11/1400
        // give SSE = 378/1_960_000 and sum(y^2) = 0.1382.
        let series = rls(vec![(0, 0.0), (1, 0.10), (2, 0.21), (3, 0.29)]);
        let fit = fit_rate_constant(&series).unwrap();
        assert_abs_diff_eq!(fit.lambda, 1.39 / 14.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fit.lambda, 0.09928571428571429, epsilon = 1e-9);
        let oracle_r2 = 1.0 - (378.0 / 1_960_000.0) / 0.1382;
        assert_abs_diff_eq!(fit.r_squared, oracle_r2, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 0.9986045069257804, epsilon = 1e-12);
        assert_eq!(fit.df_residuals, 3);
        assert_eq!(fit.n_obs, 4);
        // SE = sqrt((SSE/3)/14), CI half-width = t(0.975, 3) * SE
        let half = fit.ci_high - fit.lambda;
        assert_relative_eq!(half, 3.182446305284263 * 0.0021428571428571429, max_relative = 1e-9);
    }

    #[test]
    fn exact_fit_has_unit_r2_and_zero_width() {
        let points: Vec<(i64, f64)> = (0..19).map(|t| (t, 0.05 * t as f64)).collect();
        let fit = fit_rate_constant(&rls(points)).unwrap();
        assert_abs_diff_eq!(fit.lambda, 0.05, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        assert!(fit.ci_width() <= 1e-12);
    }

    #[test]
    fn all_zero_series_is_degenerate_not_an_error() {
        let fit = fit_rate_constant(&rls(vec![(0, 0.0), (1, 0.0), (2, 0.0)])).unwrap();
        assert_eq!(fit.lambda, 0.0);
        assert_eq!(fit.r_squared, 1.0);
        assert_eq!(fit.ci_width(), 0.0);
    }

    #[test]
    fn rejects_underdetermined_input() {
        assert!(matches!(
            fit_rate_constant(&rls(vec![(0, 0.0)])),
            Err(FitError::TooFewPoints { got: 1 })
        ));
    }

    #[test]
    fn growth_rate_constants() {
        assert_eq!(growth_rate_from_lambda(0.0), 0.0);
        // reported as 5.7% for the broad money supply
        assert_relative_eq!(
            growth_rate_from_lambda(0.0555),
            0.05706901707242288,
            max_relative = 1e-14
        );
        // reported as 11.8% per month under hyperinflation
        assert_relative_eq!(
            growth_rate_from_lambda(0.112),
            0.11851286064504520,
            max_relative = 1e-14
        );
    }

    #[test]
    fn lambda_from_growth_rate_cases() {
        assert_eq!(lambda_from_growth_rate(0.0).unwrap(), 0.0);
        assert_relative_eq!(
            lambda_from_growth_rate(0.05706901707242288).unwrap(),
            0.0555,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            lambda_from_growth_rate(-0.5).unwrap(),
            -0.6931471805599453,
            max_relative = 1e-14
        );
        assert!(matches!(
            lambda_from_growth_rate(-1.0),
            Err(FitError::GrowthRateOutOfRange { .. })
        ));
    }

    #[test]
    fn velocity_values() {
        assert_eq!(velocity_at(0.123, 0.0), 0.0);
        assert_relative_eq!(velocity_at(0.0555, 18.0), 0.999, max_relative = 1e-12);
        assert_relative_eq!(velocity_at(0.1001, 23.0), 2.3023, max_relative = 1e-12);
    }

    #[test]
    fn t_quantile_against_reference_values() {
        // frozen from an independent statistical reference implementation
        let cases: &[(f64, usize, f64)] = &[
            (0.975, 1, 12.706204736432095),
            (0.975, 2, 4.302652729696142),
            (0.975, 3, 3.182446305284263),
            (0.975, 5, 2.570581835636314),
            (0.975, 10, 2.228138851964939),
            (0.975, 18, 2.100922040240960),
            (0.975, 30, 2.042272456301237),
            (0.975, 100, 1.983971518449633),
            (0.975, 1_000_000, 1.959966356814107),
            (0.995, 18, 2.878440472713585),
            (0.025, 18, -2.100922040240960),
            (0.05, 6, -1.9431802803927816),
        ];
        for &(p, df, want) in cases {
            let got = t_quantile(p, df).unwrap();
            assert_abs_diff_eq!(got, want, epsilon = 1e-8);
        }
        // large-df limit approaches the normal critical value 1.95996...
        assert_abs_diff_eq!(
            t_quantile(0.975, 100_000_000).unwrap(),
            1.9599639845400545,
            epsilon = 1e-6
        );
    }

    #[test]
    fn t_quantile_median_is_zero() {
        for df in [1usize, 2, 7, 31] {
            assert_eq!(t_quantile(0.5, df).unwrap(), 0.0);
        }
    }

    #[test]
    fn t_quantile_rejects_invalid_input() {
        assert!(t_quantile(0.0, 3).is_err());
        assert!(t_quantile(1.0, 3).is_err());
        assert!(t_quantile(-0.1, 3).is_err());
        assert!(t_quantile(0.975, 0).is_err());
    }

    #[test]
    fn t_quantile_decreases_in_df() {
        let mut prev = f64::INFINITY;
        for df in 1..=200 {
            let q = t_quantile(0.975, df).unwrap();
            assert!(q < prev, "t(0.975, {df}) = {q} not below {prev}");
            prev = q;
        }
    }

    proptest! {
        #[test]
        fn rate_round_trip(lambda in -1.0f64..1.0) {
            let r = growth_rate_from_lambda(lambda);
            let back = lambda_from_growth_rate(r).unwrap();
            prop_assert!((back - lambda).abs() <= 1e-12);
        }

        #[test]
        fn exact_recovery_on_noise_free_lines(lambda in -1.0f64..1.0) {
            let points: Vec<(i64, f64)> = (0..19).map(|t| (t, lambda * t as f64)).collect();
            let fit = fit_rate_constant(&rls(points)).unwrap();
            prop_assert!((fit.lambda - lambda).abs() <= 1e-10);
            prop_assert!((fit.r_squared - 1.0).abs() <= 1e-12);
            prop_assert!(fit.ci_width() <= 1e-12);
        }

        #[test]
        fn scaling_y_scales_lambda_and_keeps_r2(
            k in 0.1f64..10.0,
            ys in proptest::collection::vec(-1.0f64..1.0, 3..20),
        ) {
            let base: Vec<(i64, f64)> = std::iter::once((0, 0.0))
                .chain(ys.iter().enumerate().map(|(i, &y)| (i as i64 + 1, y)))
                .collect();
            let scaled: Vec<(i64, f64)> = base.iter().map(|&(t, y)| (t, y * k)).collect();
            let a = fit_rate_constant(&rls(base)).unwrap();
            let b = fit_rate_constant(&rls(scaled)).unwrap();
            prop_assert!((b.lambda - k * a.lambda).abs() <= 1e-10 * (k * a.lambda).abs().max(1.0));
            prop_assert!((b.r_squared - a.r_squared).abs() <= 1e-9);
        }

        #[test]
        fn confidence_interval_is_symmetric(
            ys in proptest::collection::vec(-1.0f64..1.0, 3..20),
        ) {
            let points: Vec<(i64, f64)> = std::iter::once((0, 0.0))
                .chain(ys.iter().enumerate().map(|(i, &y)| (i as i64 + 1, y)))
                .collect();
            let fit = fit_rate_constant(&rls(points)).unwrap();
            let low = fit.lambda - fit.ci_low;
            let high = fit.ci_high - fit.lambda;
            prop_assert!((low - high).abs() <= 1e-12 * low.abs().max(1.0));
            prop_assert!(fit.ci_low <= fit.lambda && fit.lambda <= fit.ci_high);
        }
    }
}
