//! Estimation toolkit for exponential growth in economic time series.
//!
//! Three pieces fit together:
//!
//! - [`series`] / [`growthfit`]: positive-valued series are normalized to a
//!   reference period in log space and fitted through the origin, giving a
//!   per-period rate-constant `lambda` with a 95% interval, uncentered `R^2`,
//!   and the average growth rate `exp(lambda) - 1`.
//! - [`decomposition`]: consumer-price growth is decomposed against money
//!   supply, output, and savings, with a pointwise residual series closing
//!   the identity exactly and qualitative scenario classification.
//! - [`hyperinflation`]: a two-segment model in which the log level itself
//!   starts growing exponentially at a break time `t*` (double-exponential
//!   levels), with constrained-intercept fitting and grid-search breakpoint
//!   detection.
//!
//! [`synth`] provides deterministic generators used as round-trip oracles.

pub mod decomposition;
pub mod growthfit;
pub mod hyperinflation;
pub mod series;
pub mod synth;

pub use decomposition::{
    classify_scenario, decompose_cpi, money_velocity_log_rate, predict_cpi_lambda,
    residual_series, ComponentFits, ComponentSeries, DecompositionError, DecompositionResult,
    Scenario, ScenarioOutcome,
};
pub use growthfit::{
    fit_rate_constant, growth_rate_from_lambda, lambda_from_growth_rate, t_quantile, velocity_at,
    FitError, GrowthFit,
};
pub use hyperinflation::{
    continuity_check, detect_breakpoint, fit_at_breakpoint, fit_hyperinflation,
    full_search_range, info_entropy_value, sample_space_size, BreakpointSearch, EntropySeries,
    FitOptions, HyperinflationError, HyperinflationFit, HyperinflationParams, SegmentLine,
};
pub use series::{
    load_series, LoadOptions, Observation, PeriodUnit, RelativeLogSeries, SeriesError, TimeSeries,
};
pub use synth::{
    generate_double_exponential_series, generate_exponential_series, NoiseKind, NoiseSpec,
    SynthError,
};
