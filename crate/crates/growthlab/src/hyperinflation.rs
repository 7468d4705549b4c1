//! Two-segment accelerating-growth (double-exponential) model.
//!
//! Before a break time `t*` the log level (entropy) of the series grows
//! linearly, `v(t) = lambda1 * t + v0`. From `t*` onward the entropy itself
//! grows exponentially:
//!
//! `v(t) = (lambda1 * t* + v0) * exp(lambda2 * (t - t*))`
//!
//! so the underlying level `exp(v(t))` is double-exponential. The two
//! branches hand off continuously at `t*` by construction. Taking logs once
//! more, the post-break entropy is affine in elapsed time:
//!
//! `ln v(t) = ln(lambda1 * t* + v0) + lambda2 * (t - t*)`
//!
//! which is what the second segment regresses, with the intercept
//! constrained to the value implied by the first segment.

use std::fmt;

use crate::series::{PeriodUnit, TimeSeries};

/// Errors from model evaluation and fitting.
#[derive(Debug)]
pub enum HyperinflationError {
    /// `exp` of the model entropy exceeds the floating-point range.
    Saturated { t: f64, entropy: f64 },
    /// A segment has too few observations to regress.
    InsufficientSegmentPoints { segment: u8, needed: usize, got: usize },
    /// Post-break entropy values must be positive (their logs are regressed).
    NonpositivePostBreakEntropy { t: i64, value: f64 },
    /// The entropy handed from segment 1 to segment 2 at `t*` must be
    /// positive for the constrained intercept to exist.
    NonpositiveBreakEntropy { value: f64 },
    /// `t*` must be finite and nonnegative.
    InvalidBreakpoint { t_star: f64 },
    /// No candidate in the search range leaves three points on each side.
    EmptySearchRange,
    /// Every feasible candidate failed to fit.
    NoViableBreakpoint,
}

impl fmt::Display for HyperinflationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperinflationError::Saturated { t, entropy } => write!(
                f,
                "sample space at t = {t} saturates the floating-point range (entropy {entropy})"
            ),
            HyperinflationError::InsufficientSegmentPoints { segment, needed, got } => write!(
                f,
                "segment {segment} needs at least {needed} observations, got {got}"
            ),
            HyperinflationError::NonpositivePostBreakEntropy { t, value } => write!(
                f,
                "post-break entropy at t = {t} is {value}; must be positive to regress its log"
            ),
            HyperinflationError::NonpositiveBreakEntropy { value } => write!(
                f,
                "entropy at the break is {value}; the constrained intercept needs it positive"
            ),
            HyperinflationError::InvalidBreakpoint { t_star } => {
                write!(f, "break time {t_star} must be finite and nonnegative")
            }
            HyperinflationError::EmptySearchRange => {
                write!(f, "no breakpoint candidate leaves three points on each side")
            }
            HyperinflationError::NoViableBreakpoint => {
                write!(f, "no breakpoint candidate produced a valid fit")
            }
        }
    }
}

impl std::error::Error for HyperinflationError {}

/// Parameters of the two-segment model. `v0` is the entropy offset at
/// `t = 0` (the natural log of the initial level); the generic model has
/// `v0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperinflationParams {
    /// Pre-break rate-constant (entropy slope per period).
    pub lambda1: f64,
    /// Entropy offset at `t = 0`.
    pub v0: f64,
    /// Break time in periods; stored real so externally supplied fractional
    /// breaks are representable, searched on the integer grid.
    pub t_star: f64,
    /// Post-break acceleration rate-constant.
    pub lambda2: f64,
}

impl HyperinflationParams {
    pub fn new(lambda1: f64, v0: f64, t_star: f64, lambda2: f64) -> Result<Self, HyperinflationError> {
        if !t_star.is_finite() || t_star < 0.0 {
            return Err(HyperinflationError::InvalidBreakpoint { t_star });
        }
        if !lambda1.is_finite() || !v0.is_finite() || !lambda2.is_finite() {
            return Err(HyperinflationError::InvalidBreakpoint { t_star });
        }
        Ok(HyperinflationParams { lambda1, v0, t_star, lambda2 })
    }

    /// Entropy handed from the first branch to the second at `t*`.
    pub fn break_entropy(&self) -> f64 {
        self.lambda1 * self.t_star + self.v0
    }
}

/// Information entropy (log level) of the process at time `t`.
///
/// Linear before the break, exponential in elapsed time after it; equals
/// `ln(sample_space_size(t))` wherever the latter is finite.
pub fn info_entropy_value(t: f64, params: &HyperinflationParams) -> f64 {
    debug_assert!(t >= 0.0, "entropy is defined for t >= 0");
    if t < params.t_star {
        params.lambda1 * t + params.v0
    } else {
        params.break_entropy() * (params.lambda2 * (t - params.t_star)).exp()
    }
}

/// Size of the expanded sample space at time `t`: `exp` of the entropy.
///
/// Double-exponential growth exceeds the floating-point range quickly, so
/// overflow is reported as a distinct saturation error instead of silently
/// returning infinity.
pub fn sample_space_size(t: f64, params: &HyperinflationParams) -> Result<f64, HyperinflationError> {
    let entropy = info_entropy_value(t, params);
    let size = entropy.exp();
    if !size.is_finite() {
        return Err(HyperinflationError::Saturated { t, entropy });
    }
    Ok(size)
}

/// Largest relative mismatch between the two branches at `t*`, for both the
/// entropy and (when finite) the sample-space value. The normalized hand-off
/// makes this zero by construction.
pub fn continuity_check(params: &HyperinflationParams) -> Result<f64, HyperinflationError> {
    let handoff = params.break_entropy();
    if !(handoff > 0.0) {
        return Err(HyperinflationError::NonpositiveBreakEntropy { value: handoff });
    }
    let pre = params.lambda1 * params.t_star + params.v0;
    let post = handoff * (params.lambda2 * 0.0).exp();
    let mut worst = relative_mismatch(pre, post);
    let (pre_space, post_space) = (pre.exp(), post.exp());
    if pre_space.is_finite() && post_space.is_finite() {
        worst = worst.max(relative_mismatch(pre_space, post_space));
    }
    Ok(worst)
}

fn relative_mismatch(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// An entropy (log-level) series: pairs `(t, v)` with `v = ln(level)`,
/// keeping the absolute level rather than normalizing it away. This is the
/// input the segmented fit works on.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropySeries {
    unit: PeriodUnit,
    points: Vec<(i64, f64)>,
}

impl EntropySeries {
    pub fn new(unit: PeriodUnit, points: Vec<(i64, f64)>) -> Result<Self, HyperinflationError> {
        if points.len() < 2 {
            return Err(HyperinflationError::InsufficientSegmentPoints {
                segment: 1,
                needed: 2,
                got: points.len(),
            });
        }
        let mut prev = i64::MIN;
        for &(t, v) in &points {
            if t <= prev || t < 0 || !v.is_finite() {
                return Err(HyperinflationError::InvalidBreakpoint { t_star: t as f64 });
            }
            prev = t;
        }
        Ok(EntropySeries { unit, points })
    }

    /// Natural log of each level of a positive-valued series.
    pub fn from_time_series(series: &TimeSeries) -> Result<Self, HyperinflationError> {
        let points = series
            .points()
            .iter()
            .map(|p| (p.index, p.value.ln()))
            .collect();
        EntropySeries::new(series.unit(), points)
    }

    pub fn unit(&self) -> PeriodUnit {
        self.unit
    }

    pub fn points(&self) -> &[(i64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Straight-line diagnostics for one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentLine {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub sse: f64,
    pub n_obs: usize,
}

/// Options for the segmented fit.
#[derive(Debug, Clone, Copy, Default)]
pub struct FitOptions {
    /// Force the pre-break intercept to zero (the generic model); by default
    /// the intercept is estimated so series with a nonunit initial level fit
    /// naturally.
    pub fix_v0_at_zero: bool,
}

/// Result of the two-segment fit.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperinflationFit {
    pub params: HyperinflationParams,
    /// `ln(lambda1 * t* + v0)`: the post-break log-entropy intercept implied
    /// by segment 1, not freely fitted.
    pub constrained_intercept: f64,
    /// Pre-break line fit in entropy space.
    pub segment1: SegmentLine,
    /// Free-intercept slope of the post-break log-entropy regression; a
    /// diagnostic for misfit of the constrained model.
    pub segment2_lambda_free: f64,
    /// Post-break sum of squared errors in log-entropy space under the
    /// constrained intercept.
    pub segment2_sse: f64,
    /// Per-period growth rate of the entropy itself: `exp(lambda2) - 1`.
    pub acceleration_rate: f64,
    /// Segment-1 SSE (entropy space) plus segment-2 SSE (log-entropy space).
    pub sse_total: f64,
    /// Set when the acceleration regime adds nothing over a straight
    /// continuation of the pre-break line: `lambda2 <= 0`, or the post-break
    /// points are no better explained by the exponential branch than by the
    /// line itself.
    pub degenerate_acceleration: bool,
}

/// Fit the two-segment model. With `t_star = None` the break is located by
/// [`detect_breakpoint`] over the full feasible range first.
pub fn fit_hyperinflation(
    series: &EntropySeries,
    t_star: Option<f64>,
    options: &FitOptions,
) -> Result<HyperinflationFit, HyperinflationError> {
    match t_star {
        Some(ts) => fit_at_breakpoint(series, ts, options),
        None => {
            let (lo, hi) = full_search_range(series);
            Ok(detect_breakpoint(series, lo, hi, options)?.fit)
        }
    }
}

/// Fit with the break fixed at `t_star`.
pub fn fit_at_breakpoint(
    series: &EntropySeries,
    t_star: f64,
    options: &FitOptions,
) -> Result<HyperinflationFit, HyperinflationError> {
    if !t_star.is_finite() || t_star < 0.0 {
        return Err(HyperinflationError::InvalidBreakpoint { t_star });
    }

    let pre: Vec<(f64, f64)> = series
        .points()
        .iter()
        .filter(|&&(t, _)| (t as f64) < t_star)
        .map(|&(t, v)| (t as f64, v))
        .collect();
    let post: Vec<(i64, f64)> = series
        .points()
        .iter()
        .filter(|&&(t, _)| (t as f64) >= t_star)
        .copied()
        .collect();
    if pre.len() < 3 {
        return Err(HyperinflationError::InsufficientSegmentPoints {
            segment: 1,
            needed: 3,
            got: pre.len(),
        });
    }
    if post.len() < 3 {
        return Err(HyperinflationError::InsufficientSegmentPoints {
            segment: 2,
            needed: 3,
            got: post.len(),
        });
    }
    for &(t, v) in &post {
        if !(v > 0.0) {
            return Err(HyperinflationError::NonpositivePostBreakEntropy { t, value: v });
        }
    }

    let segment1 = if options.fix_v0_at_zero {
        line_through_origin(&pre)
    } else {
        line_with_intercept(&pre)
    };
    let (lambda1, v0) = (segment1.slope, segment1.intercept);

    let handoff = lambda1 * t_star + v0;
    if !(handoff > 0.0) {
        return Err(HyperinflationError::NonpositiveBreakEntropy { value: handoff });
    }
    let constrained_intercept = handoff.ln();

    // constrained slope: ln(v) = c + lambda2 * (t - t*), c fixed
    let mut sxx = 0.0;
    let mut sxz = 0.0;
    for &(t, v) in &post {
        let x = t as f64 - t_star;
        let z = v.ln() - constrained_intercept;
        sxx += x * x;
        sxz += x * z;
    }
    let lambda2 = sxz / sxx;
    let segment2_sse: f64 = post
        .iter()
        .map(|&(t, v)| {
            let x = t as f64 - t_star;
            let e = v.ln() - constrained_intercept - lambda2 * x;
            e * e
        })
        .sum();

    let log_post: Vec<(f64, f64)> = post
        .iter()
        .map(|&(t, v)| (t as f64 - t_star, v.ln()))
        .collect();
    let segment2_lambda_free = line_with_intercept(&log_post).slope;

    // Does the exponential branch beat a straight continuation of the
    // pre-break line on the post-break points (entropy space)?
    let mut sse_line = 0.0;
    let mut sse_model = 0.0;
    for &(t, v) in &post {
        let tf = t as f64;
        let line = lambda1 * tf + v0;
        let model = handoff * (lambda2 * (tf - t_star)).exp();
        sse_line += (v - line) * (v - line);
        sse_model += (v - model) * (v - model);
    }
    let degenerate_acceleration = lambda2 <= 0.0 || sse_line <= sse_model;

    Ok(HyperinflationFit {
        params: HyperinflationParams { lambda1, v0, t_star, lambda2 },
        constrained_intercept,
        segment1,
        segment2_lambda_free,
        segment2_sse,
        acceleration_rate: lambda2.exp_m1(),
        sse_total: segment1.sse + segment2_sse,
        degenerate_acceleration,
    })
}

/// Result of a breakpoint grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakpointSearch {
    pub t_star: f64,
    pub sse_total: f64,
    pub fit: HyperinflationFit,
}

/// Grid search for the break over integer candidates in `[lo, hi]`.
///
/// For each feasible candidate (three points strictly before it and three at
/// or after it) the segmented fit runs and the total SSE — segment 1 in
/// entropy space plus segment 2 in log-entropy space — is compared. Ties
/// break toward the smallest candidate, so the result is deterministic
/// regardless of evaluation order.
pub fn detect_breakpoint(
    series: &EntropySeries,
    lo: i64,
    hi: i64,
    options: &FitOptions,
) -> Result<BreakpointSearch, HyperinflationError> {
    let mut best: Option<BreakpointSearch> = None;
    let mut any_feasible = false;
    for candidate in lo..=hi {
        let before = series.points().iter().filter(|&&(t, _)| t < candidate).count();
        let after = series.len() - before;
        if before < 3 || after < 3 {
            continue;
        }
        any_feasible = true;
        let fit = match fit_at_breakpoint(series, candidate as f64, options) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let sse_total = fit.sse_total;
        let better = match &best {
            None => true,
            Some(b) => sse_total < b.sse_total,
        };
        if better {
            best = Some(BreakpointSearch { t_star: candidate as f64, sse_total, fit });
        }
    }
    match best {
        Some(b) => Ok(b),
        None if any_feasible => Err(HyperinflationError::NoViableBreakpoint),
        None => Err(HyperinflationError::EmptySearchRange),
    }
}

/// Widest integer candidate range that can leave three points on each side.
pub fn full_search_range(series: &EntropySeries) -> (i64, i64) {
    let points = series.points();
    if points.len() < 6 {
        return (0, -1);
    }
    // smallest candidate with three strictly before; largest with three at or after
    (points[2].0 + 1, points[points.len() - 3].0)
}

fn line_with_intercept(points: &[(f64, f64)]) -> SegmentLine {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in points {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = points
        .iter()
        .map(|&(x, y)| {
            let e = y - slope * x - intercept;
            e * e
        })
        .sum();
    let r_squared = if sse == 0.0 || syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    SegmentLine { slope, intercept, r_squared, sse, n_obs: points.len() }
}

fn line_through_origin(points: &[(f64, f64)]) -> SegmentLine {
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in points {
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    let slope = sxy / sxx;
    let sse: f64 = points
        .iter()
        .map(|&(x, y)| {
            let e = y - slope * x;
            e * e
        })
        .sum();
    let r_squared = if sse == 0.0 || syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    SegmentLine { slope, intercept: 0.0, r_squared, sse, n_obs: points.len() }
}
