//! Benchmark-only crate; see `benches/estimators.rs`.
//!
//! Shared series builders live here so the benchmarks stay terse.

use growthlab::{
    generate_double_exponential_series, generate_exponential_series, EntropySeries,
    HyperinflationParams, NoiseSpec, RelativeLogSeries, TimeSeries,
};

/// Noisy exponential series of length `n` with a fixed seed.
pub fn exponential_fixture(n: usize) -> TimeSeries {
    generate_exponential_series(0.0555, 1.0, n, &NoiseSpec::gaussian(0.01, 7)).unwrap()
}

/// Its normalized log-relative form.
pub fn relative_log_fixture(n: usize) -> RelativeLogSeries {
    exponential_fixture(n).normalize_to_reference().unwrap()
}

/// A double-exponential entropy series with the break at `t = 23`.
pub fn hyperinflation_fixture(n: usize) -> EntropySeries {
    let params = HyperinflationParams::new(0.1001, std::f64::consts::LN_10, 23.0, 0.112).unwrap();
    let ts = generate_double_exponential_series(&params, n, &NoiseSpec::gaussian(0.02, 11)).unwrap();
    EntropySeries::from_time_series(&ts).unwrap()
}
