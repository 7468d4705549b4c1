//! Time-series data model: validated positive-valued series on an integer
//! period grid, normalization to a reference period, and regression-based
//! imputation of missing periods.
//!
//! All values must be strictly positive because every downstream estimator
//! works on natural logarithms.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use crate::growthfit;

/// Sampling period of a series. Rate-constants are always per-period; the
/// unit is carried along so reports can say which period that is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodUnit {
    Annual,
    Monthly,
}

impl fmt::Display for PeriodUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodUnit::Annual => write!(f, "annual"),
            PeriodUnit::Monthly => write!(f, "monthly"),
        }
    }
}

/// Errors from series construction, loading, and imputation.
#[derive(Debug)]
pub enum SeriesError {
    /// The input file could not be opened or read.
    Io { path: String, source: std::io::Error },
    /// A CSV row could not be parsed as `(integer period, positive value)`.
    UnparseableRow { row: usize, content: String },
    /// A value at or below zero; logarithms are undefined.
    NonpositiveValue { row: usize, period: i64, value: f64 },
    /// The same period label appears more than once.
    DuplicatePeriod { period: i64 },
    /// Fewer points than the operation requires.
    TooFewPoints { needed: usize, got: usize },
    /// Time indices are not strictly increasing.
    NonIncreasingIndex { index: i64 },
    /// The declared reference index is not among the observations.
    ReferenceNotPresent { reference: i64 },
    /// Normalization requires the reference to be the earliest observation
    /// so that relative times are nonnegative.
    ReferenceNotEarliest { reference: i64, earliest: i64 },
    /// The requested period label does not exist in the series.
    UnknownPeriod { period: i64 },
    /// Imputation targets must cover every observed index.
    TargetsMissObserved { index: i64 },
    /// A propagated regression failure.
    Fit(growthfit::FitError),
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::Io { path, source } => write!(f, "cannot read {path}: {source}"),
            SeriesError::UnparseableRow { row, content } => {
                write!(f, "row {row}: cannot parse {content:?} as `period,value`")
            }
            SeriesError::NonpositiveValue { row, period, value } => write!(
                f,
                "row {row}: period {period} has nonpositive value {value}; \
                 log-linear methods require values > 0"
            ),
            SeriesError::DuplicatePeriod { period } => {
                write!(f, "period {period} appears more than once")
            }
            SeriesError::TooFewPoints { needed, got } => {
                write!(f, "need at least {needed} observations, got {got}")
            }
            SeriesError::NonIncreasingIndex { index } => {
                write!(f, "time indices must be strictly increasing at index {index}")
            }
            SeriesError::ReferenceNotPresent { reference } => {
                write!(f, "reference index {reference} is not among the observations")
            }
            SeriesError::ReferenceNotEarliest { reference, earliest } => write!(
                f,
                "reference index {reference} must be the earliest observation ({earliest})"
            ),
            SeriesError::UnknownPeriod { period } => {
                write!(f, "period {period} does not exist in the series")
            }
            SeriesError::TargetsMissObserved { index } => {
                write!(f, "imputation targets must include observed index {index}")
            }
            SeriesError::Fit(e) => write!(f, "regression failure: {e}"),
        }
    }
}

impl std::error::Error for SeriesError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SeriesError::Io { source, .. } => Some(source),
            SeriesError::Fit(e) => Some(e),
            _ => None,
        }
    }
}

impl From<growthfit::FitError> for SeriesError {
    fn from(e: growthfit::FitError) -> Self {
        SeriesError::Fit(e)
    }
}

/// One observation: an integer period index and a strictly positive value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub index: i64,
    pub value: f64,
}

/// An ordered, positive-valued time series on an integer period grid.
///
/// Indices count periods from the earliest observation (index 0); the raw
/// period label of index 0 is kept in `base_period` so that, for example,
/// calendar year 2007 in an annual series starting 2001 maps to index 6.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    name: String,
    unit: PeriodUnit,
    base_period: i64,
    points: Vec<Observation>,
    reference_index: i64,
    imputed: BTreeSet<i64>,
}

impl TimeSeries {
    /// Build a validated series. `points` must be strictly increasing in
    /// index with all values positive, and `reference_index` must be present.
    pub fn new(
        name: impl Into<String>,
        unit: PeriodUnit,
        base_period: i64,
        points: Vec<(i64, f64)>,
        reference_index: i64,
    ) -> Result<Self, SeriesError> {
        if points.len() < 2 {
            return Err(SeriesError::TooFewPoints { needed: 2, got: points.len() });
        }
        let mut prev: Option<i64> = None;
        for &(index, value) in &points {
            if let Some(p) = prev {
                if index <= p {
                    return Err(SeriesError::NonIncreasingIndex { index });
                }
            }
            if !(value > 0.0) || !value.is_finite() {
                return Err(SeriesError::NonpositiveValue { row: 0, period: index, value });
            }
            prev = Some(index);
        }
        if !points.iter().any(|&(i, _)| i == reference_index) {
            return Err(SeriesError::ReferenceNotPresent { reference: reference_index });
        }
        Ok(TimeSeries {
            name: name.into(),
            unit,
            base_period,
            points: points
                .into_iter()
                .map(|(index, value)| Observation { index, value })
                .collect(),
            reference_index,
            imputed: BTreeSet::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> PeriodUnit {
        self.unit
    }

    /// Raw period label of index 0.
    pub fn base_period(&self) -> i64 {
        self.base_period
    }

    pub fn points(&self) -> &[Observation] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn reference_index(&self) -> i64 {
        self.reference_index
    }

    /// Period label (e.g. calendar year) of a given index.
    pub fn period_of_index(&self, index: i64) -> i64 {
        self.base_period + index
    }

    /// Index of a raw period label, if observed.
    pub fn index_of_period(&self, period: i64) -> Option<i64> {
        let index = period - self.base_period;
        self.points.iter().any(|p| p.index == index).then_some(index)
    }

    /// Indices that were filled in by [`TimeSeries::impute_missing_years`].
    pub fn imputed_indices(&self) -> impl Iterator<Item = i64> + '_ {
        self.imputed.iter().copied()
    }

    pub fn is_imputed(&self, index: i64) -> bool {
        self.imputed.contains(&index)
    }

    /// Observations that were present before any imputation.
    pub fn observed_points(&self) -> impl Iterator<Item = Observation> + '_ {
        self.points.iter().copied().filter(|p| !self.imputed.contains(&p.index))
    }

    pub fn value_at(&self, index: i64) -> Option<f64> {
        self.points.iter().find(|p| p.index == index).map(|p| p.value)
    }

    /// Re-anchor the reference on an observed raw period label.
    pub fn with_reference_period(mut self, period: i64) -> Result<Self, SeriesError> {
        let index = self
            .index_of_period(period)
            .ok_or(SeriesError::UnknownPeriod { period })?;
        self.reference_index = index;
        Ok(self)
    }

    /// Natural-log series relative to its own reference value:
    /// `y(t) = ln(value(t) / value(reference))`, so `y(0) = 0` exactly.
    ///
    /// The reference must be the earliest observation; otherwise relative
    /// times would go negative.
    pub fn normalize_to_reference(&self) -> Result<RelativeLogSeries, SeriesError> {
        let earliest = self.points[0].index;
        if self.reference_index != earliest {
            return Err(SeriesError::ReferenceNotEarliest {
                reference: self.reference_index,
                earliest,
            });
        }
        let reference_value = self
            .value_at(self.reference_index)
            .expect("reference validated at construction");
        let points = self
            .points
            .iter()
            .map(|p| {
                let t = p.index - self.reference_index;
                let y = if t == 0 { 0.0 } else { (p.value / reference_value).ln() };
                (t, y)
            })
            .collect();
        RelativeLogSeries::new(self.unit, points)
    }

    /// Fill missing target indices from the origin-constrained log-linear fit
    /// of the observed points: `value(t) = value(reference) * exp(lambda * t)`
    /// with `t` counted from the reference. Observed points are kept verbatim
    /// and newly filled indices are flagged as imputed.
    ///
    /// `target_indices` must be a superset of the observed indices.
    pub fn impute_missing_years(&self, target_indices: &[i64]) -> Result<Self, SeriesError> {
        if self.points.len() < 2 {
            return Err(SeriesError::TooFewPoints { needed: 2, got: self.points.len() });
        }
        let targets: BTreeSet<i64> = target_indices.iter().copied().collect();
        for p in &self.points {
            if !targets.contains(&p.index) {
                return Err(SeriesError::TargetsMissObserved { index: p.index });
            }
        }

        let missing: Vec<i64> = targets
            .iter()
            .copied()
            .filter(|&i| self.value_at(i).is_none())
            .collect();
        if missing.is_empty() {
            return Ok(self.clone());
        }

        let fit = growthfit::fit_rate_constant(&self.normalize_to_reference()?)?;
        let reference_value = self
            .value_at(self.reference_index)
            .expect("reference validated at construction");

        let mut points: Vec<(i64, f64)> = self.points.iter().map(|p| (p.index, p.value)).collect();
        let mut imputed = self.imputed.clone();
        for index in missing {
            let t = (index - self.reference_index) as f64;
            points.push((index, reference_value * (fit.lambda * t).exp()));
            imputed.insert(index);
        }
        points.sort_by_key(|&(i, _)| i);

        let mut out = TimeSeries::new(
            self.name.clone(),
            self.unit,
            self.base_period,
            points,
            self.reference_index,
        )?;
        out.imputed = imputed;
        Ok(out)
    }
}

/// Natural-log values relative to the reference observation: pairs `(t, y)`
/// with `t >= 0` counted in periods from the reference and `y(0) = 0`.
/// This is the substrate every regression in the crate runs on.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeLogSeries {
    unit: PeriodUnit,
    points: Vec<(i64, f64)>,
}

impl RelativeLogSeries {
    /// Build a validated relative-log series. The first point must be
    /// `(0, 0.0)` and times must be strictly increasing.
    pub fn new(unit: PeriodUnit, points: Vec<(i64, f64)>) -> Result<Self, SeriesError> {
        if points.is_empty() {
            return Err(SeriesError::TooFewPoints { needed: 1, got: 0 });
        }
        if points[0].0 != 0 || points[0].1 != 0.0 {
            return Err(SeriesError::ReferenceNotPresent { reference: 0 });
        }
        let mut prev = -1i64;
        for &(t, _) in &points {
            if t <= prev {
                return Err(SeriesError::NonIncreasingIndex { index: t });
            }
            prev = t;
        }
        Ok(RelativeLogSeries { unit, points })
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

    /// Times as a slice of `(t, y)` with `y` replaced; convenience for tests.
    pub fn y_at(&self, t: i64) -> Option<f64> {
        self.points.iter().find(|&&(pt, _)| pt == t).map(|&(_, y)| y)
    }
}

/// Column mapping and metadata for [`load_series`].
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Zero-based column holding the period label.
    pub period_column: usize,
    /// Zero-based column holding the value.
    pub value_column: usize,
    pub unit: PeriodUnit,
    /// Series name; defaults to the file stem.
    pub name: Option<String>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            period_column: 0,
            value_column: 1,
            unit: PeriodUnit::Annual,
            name: None,
        }
    }
}

/// Read a `period,value` CSV into a validated [`TimeSeries`].
///
/// The header row is optional: a first row whose mapped columns are both
/// non-numeric is skipped. Period labels are integers (calendar years for
/// annual data, month counters for monthly data) and are converted to
/// indices relative to the earliest period; the reference starts at that
/// earliest period.
pub fn load_series(path: impl AsRef<Path>, options: &LoadOptions) -> Result<TimeSeries, SeriesError> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|source| SeriesError::Io {
        path: path.display().to_string(),
        source,
    })?;

    let needed = options.period_column.max(options.value_column) + 1;
    let mut rows: Vec<(usize, i64, f64)> = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < needed {
            return Err(SeriesError::UnparseableRow { row, content: line.to_string() });
        }
        let period = fields[options.period_column].parse::<i64>();
        let value = fields[options.value_column].parse::<f64>();
        match (period, value) {
            (Ok(p), Ok(v)) => {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(SeriesError::NonpositiveValue { row, period: p, value: v });
                }
                rows.push((row, p, v));
            }
            (Err(_), Err(_)) if row == 1 => continue, // optional header
            _ => {
                return Err(SeriesError::UnparseableRow { row, content: line.to_string() });
            }
        }
    }
    if rows.len() < 2 {
        return Err(SeriesError::TooFewPoints { needed: 2, got: rows.len() });
    }

    rows.sort_by_key(|&(_, period, _)| period);
    for pair in rows.windows(2) {
        if pair[0].1 == pair[1].1 {
            return Err(SeriesError::DuplicatePeriod { period: pair[0].1 });
        }
    }

    let base_period = rows[0].1;
    let points: Vec<(i64, f64)> = rows
        .iter()
        .map(|&(_, period, value)| (period - base_period, value))
        .collect();

    let name = options.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "series".to_string())
    });
    TimeSeries::new(name, options.unit, base_period, points, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_two_row_csv() {
        let f = write_csv("2001,100\n2002,105\n");
        let ts = load_series(f.path(), &LoadOptions::default()).unwrap();
        assert_eq!(ts.base_period(), 2001);
        assert_eq!(ts.reference_index(), 0);
        assert_eq!(ts.points(), &[
            Observation { index: 0, value: 100.0 },
            Observation { index: 1, value: 105.0 },
        ]);
    }

    #[test]
    fn loads_csv_with_header() {
        let f = write_csv("period,value\n2001,100\n2002,105\n");
        let ts = load_series(f.path(), &LoadOptions::default()).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts.period_of_index(1), 2002);
    }

    #[test]
    fn rejects_nonpositive_value_naming_row() {
        let f = write_csv("2001,100\n2002,-3\n");
        match load_series(f.path(), &LoadOptions::default()) {
            Err(SeriesError::NonpositiveValue { row, value, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(value, -3.0);
            }
            other => panic!("expected nonpositive-value error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicate_period() {
        let f = write_csv("2001,100\n2001,101\n");
        match load_series(f.path(), &LoadOptions::default()) {
            Err(SeriesError::DuplicatePeriod { period }) => assert_eq!(period, 2001),
            other => panic!("expected duplicate-period error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unparseable_row() {
        let f = write_csv("2001,100\n2002,abc\n");
        match load_series(f.path(), &LoadOptions::default()) {
            Err(SeriesError::UnparseableRow { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected unparseable-row error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_missing_file() {
        let err = load_series("/nonexistent/nowhere.csv", &LoadOptions::default());
        assert!(matches!(err, Err(SeriesError::Io { .. })));
    }

    #[test]
    fn sorts_unordered_rows_by_period() {
        let f = write_csv("2003,120\n2001,100\n2002,110\n");
        let ts = load_series(f.path(), &LoadOptions::default()).unwrap();
        let idx: Vec<i64> = ts.points().iter().map(|p| p.index).collect();
        assert_eq!(idx, vec![0, 1, 2]);
        assert_eq!(ts.value_at(2), Some(120.0));
    }

    #[test]
    fn normalizes_log_ratio() {
        let ts = TimeSeries::new("x", PeriodUnit::Annual, 0, vec![(0, 200.0), (1, 210.0)], 0)
            .unwrap();
        let rls = ts.normalize_to_reference().unwrap();
        assert_eq!(rls.y_at(0), Some(0.0));
        // ln(1.05), independently computed
        assert_relative_eq!(rls.y_at(1).unwrap(), 0.048790164169432003, max_relative = 1e-14);
    }

    #[test]
    fn constant_series_normalizes_to_zero() {
        let c = 37.5;
        let ts = TimeSeries::new(
            "c",
            PeriodUnit::Annual,
            0,
            vec![(0, c), (1, c), (2, c)],
            0,
        )
        .unwrap();
        let rls = ts.normalize_to_reference().unwrap();
        assert!(rls.points().iter().all(|&(_, y)| y == 0.0));
    }

    #[test]
    fn reference_must_be_earliest_for_normalization() {
        let ts = TimeSeries::new("x", PeriodUnit::Annual, 0, vec![(0, 1.0), (1, 2.0)], 1).unwrap();
        assert!(matches!(
            ts.normalize_to_reference(),
            Err(SeriesError::ReferenceNotEarliest { .. })
        ));
    }

    #[test]
    fn rejects_duplicate_or_decreasing_indices() {
        assert!(matches!(
            TimeSeries::new("x", PeriodUnit::Annual, 0, vec![(0, 1.0), (0, 2.0)], 0),
            Err(SeriesError::NonIncreasingIndex { .. })
        ));
        assert!(matches!(
            TimeSeries::new("x", PeriodUnit::Annual, 0, vec![(1, 1.0), (0, 2.0)], 1),
            Err(SeriesError::NonIncreasingIndex { .. })
        ));
    }

    #[test]
    fn imputes_from_sparse_fit() {
        // lambda = (3 * 0.03) / 9 = 0.01 from the closed-form sums
        let ts = TimeSeries::new(
            "sparse",
            PeriodUnit::Annual,
            0,
            vec![(0, 1.0), (3, 0.03f64.exp())],
            0,
        )
        .unwrap();
        let full = ts.impute_missing_years(&[0, 1, 2, 3]).unwrap();
        assert_eq!(full.len(), 4);
        assert_relative_eq!(full.value_at(1).unwrap(), 1.0100501670841681, max_relative = 1e-12);
        // observed points survive verbatim
        assert_eq!(full.value_at(0), Some(1.0));
        assert_eq!(full.value_at(3), Some(0.03f64.exp()));
        let imputed: Vec<i64> = full.imputed_indices().collect();
        assert_eq!(imputed, vec![1, 2]);
        assert_eq!(full.observed_points().count(), 2);
    }

    #[test]
    fn imputation_is_identity_when_nothing_missing() {
        let ts = TimeSeries::new("x", PeriodUnit::Annual, 0, vec![(0, 1.0), (1, 2.0)], 0).unwrap();
        let out = ts.impute_missing_years(&[0, 1]).unwrap();
        assert_eq!(out, ts);
    }

    #[test]
    fn imputation_requires_targets_to_cover_observed() {
        let ts = TimeSeries::new("x", PeriodUnit::Annual, 0, vec![(0, 1.0), (3, 2.0)], 0).unwrap();
        assert!(matches!(
            ts.impute_missing_years(&[0, 1, 2]),
            Err(SeriesError::TargetsMissObserved { index: 3 })
        ));
    }

    #[test]
    fn sparse_savings_pattern_keeps_observed_df() {
        // observed every third year, 2001..=2019
        let lambda = 0.0095;
        let observed: Vec<(i64, f64)> =
            (0..7).map(|k| (3 * k, (lambda * (3 * k) as f64).exp())).collect();
        let ts = TimeSeries::new("sav", PeriodUnit::Annual, 2001, observed, 0).unwrap();
        let targets: Vec<i64> = (0..=18).collect();
        let full = ts.impute_missing_years(&targets).unwrap();
        assert_eq!(full.len(), 19);
        assert_eq!(full.imputed_indices().count(), 12);
        assert_eq!(full.observed_points().count(), 7);
        // a fit on the observed points alone keeps df = 7 - 1 = 6
        let observed_only: Vec<(i64, f64)> =
            full.observed_points().map(|p| (p.index, p.value)).collect();
        let obs_ts = TimeSeries::new("sav", PeriodUnit::Annual, 2001, observed_only, 0).unwrap();
        let fit = growthfit::fit_rate_constant(&obs_ts.normalize_to_reference().unwrap()).unwrap();
        assert_eq!(fit.df_residuals, 6);
    }

    #[test]
    fn relative_log_series_requires_zero_at_origin() {
        assert!(RelativeLogSeries::new(PeriodUnit::Annual, vec![(0, 0.1), (1, 0.2)]).is_err());
        assert!(RelativeLogSeries::new(PeriodUnit::Annual, vec![(1, 0.0), (2, 0.2)]).is_err());
        assert!(RelativeLogSeries::new(PeriodUnit::Annual, vec![(0, 0.0), (1, 0.2)]).is_ok());
    }

    proptest! {
        // scaling every level by k > 0 cancels in the log ratio
        #[test]
        fn normalization_is_scale_invariant(
            k in 1e-6f64..1e6,
            values in proptest::collection::vec(1e-3f64..1e3, 2..40),
        ) {
            let points: Vec<(i64, f64)> =
                values.iter().enumerate().map(|(i, &v)| (i as i64, v)).collect();
            let scaled: Vec<(i64, f64)> =
                values.iter().enumerate().map(|(i, &v)| (i as i64, v * k)).collect();
            let a = TimeSeries::new("a", PeriodUnit::Annual, 0, points, 0).unwrap()
                .normalize_to_reference().unwrap();
            let b = TimeSeries::new("b", PeriodUnit::Annual, 0, scaled, 0).unwrap()
                .normalize_to_reference().unwrap();
            for (&(ta, ya), &(tb, yb)) in a.points().iter().zip(b.points()) {
                prop_assert_eq!(ta, tb);
                prop_assert!((ya - yb).abs() <= 1e-12 * ya.abs().max(1.0));
            }
        }

        // exponentiating and rescaling by the reference reconstructs levels
        #[test]
        fn normalization_round_trips(
            values in proptest::collection::vec(1e-3f64..1e3, 2..40),
        ) {
            let points: Vec<(i64, f64)> =
                values.iter().enumerate().map(|(i, &v)| (i as i64, v)).collect();
            let ts = TimeSeries::new("a", PeriodUnit::Annual, 0, points, 0).unwrap();
            let reference = ts.value_at(0).unwrap();
            let rls = ts.normalize_to_reference().unwrap();
            for (&(t, y), p) in rls.points().iter().zip(ts.points()) {
                prop_assert_eq!(t, p.index);
                let rebuilt = reference * y.exp();
                prop_assert!((rebuilt - p.value).abs() <= 1e-12 * p.value.abs());
            }
        }
    }
}
