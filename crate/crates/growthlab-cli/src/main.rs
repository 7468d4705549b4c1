//! `growthlab` command line: fit per-period exponential rate-constants to
//! CSV time series, decompose CPI growth against money supply, output, and
//! savings, and fit the two-segment hyperinflation model.
//!
//! Every command emits a deterministic JSON report (stdout by default) plus
//! plot-data CSV sidecars. Exit codes: 0 success, 1 numerical failure,
//! 2 input or validation failure.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use growthlab::{
    classify_scenario, decompose_cpi, detect_breakpoint, fit_at_breakpoint, fit_rate_constant,
    full_search_range, load_series, sample_space_size, DecompositionError, EntropySeries,
    FitError, FitOptions, HyperinflationError, HyperinflationFit, LoadOptions, PeriodUnit,
    SeriesError, TimeSeries,
};

use report::Report;

/// A failure with its process exit code: 1 numerical, 2 validation.
#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { message: message.into(), code: 2 }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError { message: message.into(), code: 1 }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Fit(inner) => inner.into(),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::TooFewPoints { .. }
            | FitError::NoTimeVariation
            | FitError::GrowthRateOutOfRange { .. } => CliError::validation(e.to_string()),
            FitError::InvalidQuantile { .. } | FitError::NonFinite { .. } => {
                CliError::numerical(e.to_string())
            }
        }
    }
}

impl From<DecompositionError> for CliError {
    fn from(e: DecompositionError) -> Self {
        match e {
            DecompositionError::Series(inner) => inner.into(),
            DecompositionError::Fit(inner) => inner.into(),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<HyperinflationError> for CliError {
    fn from(e: HyperinflationError) -> Self {
        match e {
            HyperinflationError::InsufficientSegmentPoints { .. }
            | HyperinflationError::NonpositivePostBreakEntropy { .. }
            | HyperinflationError::InvalidBreakpoint { .. }
            | HyperinflationError::EmptySearchRange => CliError::validation(e.to_string()),
            HyperinflationError::Saturated { .. }
            | HyperinflationError::NonpositiveBreakEntropy { .. }
            | HyperinflationError::NoViableBreakpoint => CliError::numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "growthlab",
    version,
    about = "Exponential growth-rate estimation for economic time series",
    long_about = "Fits per-period exponential rate-constants to positive-valued CSV time \
                  series via through-origin log-linear regression, decomposes CPI growth \
                  into money-supply, output, and savings components with a closing residual, \
                  and fits a two-segment (double-exponential) hyperinflation model with \
                  breakpoint detection."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a per-period exponential rate-constant to one series
    Fit(FitArgs),
    /// Decompose CPI growth into money-supply, output, and savings components
    Decompose(DecomposeArgs),
    /// Fit the two-segment hyperinflation model, locating the break if needed
    Hyper(HyperArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitArg {
    Annual,
    Monthly,
}

impl From<UnitArg> for PeriodUnit {
    fn from(u: UnitArg) -> Self {
        match u {
            UnitArg::Annual => PeriodUnit::Annual,
            UnitArg::Monthly => PeriodUnit::Monthly,
        }
    }
}

#[derive(Args)]
struct FitArgs {
    /// CSV file with `period,value` rows (header optional)
    series_file: PathBuf,
    /// Reference period, e.g. a calendar year; defaults to the earliest
    #[arg(long = "ref", value_name = "PERIOD")]
    reference: Option<i64>,
    /// Period unit of the series
    #[arg(long, value_enum, default_value_t = UnitArg::Annual)]
    unit: UnitArg,
    /// Series name in the report; defaults to the file stem
    #[arg(long)]
    name: Option<String>,
    /// Write the JSON report to this file instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
    /// Plot-data CSV (`t,observed,fitted` of the log-relative series)
    #[arg(long, default_value = "fit_plot.csv")]
    plot: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Broad money supply CSV
    bms_file: PathBuf,
    /// Real output (GDP) CSV
    gdp_file: PathBuf,
    /// Savings CSV; may be sparse, missing periods are imputed
    sav_file: PathBuf,
    /// Consumer price index CSV
    cpi_file: PathBuf,
    /// Common reference period; defaults to the earliest
    #[arg(long = "ref", value_name = "PERIOD")]
    reference: Option<i64>,
    /// Period unit of all four series
    #[arg(long, value_enum, default_value_t = UnitArg::Annual)]
    unit: UnitArg,
    /// Threshold below which a component rate counts as "no growth"
    #[arg(long, default_value_t = 0.001)]
    scenario_tol: f64,
    /// Write the JSON report to this file instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
    /// Plot-data CSV (`t,observed,fitted,residual` for the CPI identity)
    #[arg(long, default_value = "decompose_plot.csv")]
    plot: PathBuf,
}

#[derive(Args)]
struct HyperArgs {
    /// CSV file of positive price levels, monthly by default
    series_file: PathBuf,
    /// Fix the break time instead of searching
    #[arg(long = "break", value_name = "T", conflicts_with = "search")]
    break_at: Option<f64>,
    /// Inclusive integer search range for the break, e.g. `5..38`
    #[arg(long, value_name = "LO..HI")]
    search: Option<String>,
    /// Constrain the pre-break intercept to zero (generic model)
    #[arg(long)]
    zero_intercept: bool,
    /// Period unit of the series
    #[arg(long, value_enum, default_value_t = UnitArg::Monthly)]
    unit: UnitArg,
    /// Series name in the report; defaults to the file stem
    #[arg(long)]
    name: Option<String>,
    /// Write the JSON report to this file instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
    /// Level plot-data CSV (`t,observed,fitted`), semi-log source data
    #[arg(long, default_value = "hyper_plot.csv")]
    plot: PathBuf,
    /// Post-break log-entropy plot-data CSV (`t,observed,fitted`)
    #[arg(long, default_value = "hyper_entropy_plot.csv")]
    entropy_plot: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => run_fit(args),
        Command::Decompose(args) => run_decompose(args),
        Command::Hyper(args) => run_hyper(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run_fit(args: FitArgs) -> Result<(), CliError> {
    let path = args.series_file.display().to_string();
    let inputs = vec![report::digest_file(&path)?];

    let options = LoadOptions {
        unit: args.unit.into(),
        name: args.name.clone(),
        ..LoadOptions::default()
    };
    let mut series = load_series(&args.series_file, &options)?;
    series = apply_reference(series, args.reference)?;

    let rls = series.normalize_to_reference()?;
    let fit = fit_rate_constant(&rls)?;

    let mut warnings = Vec::new();
    if fit.ci_width() == 0.0 {
        warnings.push(
            "zero-residual degenerate fit: confidence interval has zero width and R^2 is \
             reported as 1"
                .to_string(),
        );
    }

    let plot = plot_lines(
        "t,observed,fitted",
        rls.points().iter().map(|&(t, y)| format!("{t},{y},{}", fit.lambda * t as f64)),
    );

    let doc = Report {
        command: "fit".to_string(),
        inputs,
        warnings,
        fits: vec![report::fit_summary(series.name(), &series.unit().to_string(), &fit)?],
        decomposition: None,
        hyper: None,
    };
    let rendered = report::render(&doc)?;

    write_file(&args.plot, &plot)?;
    emit_report(args.report.as_deref(), &rendered)
}

fn run_decompose(args: DecomposeArgs) -> Result<(), CliError> {
    if !(args.scenario_tol >= 0.0) {
        return Err(CliError::validation("scenario tolerance must be nonnegative"));
    }
    let paths: Vec<String> = [&args.bms_file, &args.gdp_file, &args.sav_file, &args.cpi_file]
        .iter()
        .map(|p| p.display().to_string())
        .collect();
    let mut inputs = Vec::new();
    for p in &paths {
        inputs.push(report::digest_file(p)?);
    }

    let unit: PeriodUnit = args.unit.into();
    let load = |file: &PathBuf, name: &str| -> Result<TimeSeries, CliError> {
        let options = LoadOptions {
            unit,
            name: Some(name.to_string()),
            ..LoadOptions::default()
        };
        let series = load_series(file, &options)?;
        apply_reference(series, args.reference)
    };
    let bms = load(&args.bms_file, "bms")?;
    let gdp = load(&args.gdp_file, "gdp")?;
    let sav = load(&args.sav_file, "sav")?;
    let cpi = load(&args.cpi_file, "cpi")?;

    let result = decompose_cpi(&bms, &gdp, &sav, &cpi)?;
    let scenario = classify_scenario(
        result.fits.bms.lambda,
        result.fits.gdp.lambda,
        result.fits.sav.lambda,
        args.scenario_tol,
    );

    let mut warnings = Vec::new();
    for (name, fit) in [
        ("bms", &result.fits.bms),
        ("gdp", &result.fits.gdp),
        ("sav", &result.fits.sav),
        ("cpi", &result.fits.cpi),
    ] {
        if fit.ci_width() == 0.0 {
            warnings.push(format!("zero-residual degenerate fit for {name}"));
        }
    }

    let unit_label = unit.to_string();
    let fits = vec![
        report::fit_summary("bms", &unit_label, &result.fits.bms)?,
        report::fit_summary("gdp", &unit_label, &result.fits.gdp)?,
        report::fit_summary("sav", &unit_label, &result.fits.sav)?,
        report::fit_summary("cpi", &unit_label, &result.fits.cpi)?,
    ];
    let summary =
        report::decomposition_summary(&result, scenario.classification, args.scenario_tol)?;

    let plot = plot_lines(
        "t,observed,fitted,residual",
        (0..result.components.cpi.len()).map(|i| {
            let (t, observed) = result.components.cpi.points()[i];
            let hypothesis = result.components.bms.points()[i].1
                - result.components.gdp.points()[i].1
                - result.components.sav.points()[i].1;
            let residual = result.residual_series.points()[i].1;
            format!("{t},{observed},{hypothesis},{residual}")
        }),
    );

    let doc = Report {
        command: "decompose".to_string(),
        inputs,
        warnings,
        fits,
        decomposition: Some(summary),
        hyper: None,
    };
    let rendered = report::render(&doc)?;

    write_file(&args.plot, &plot)?;
    emit_report(args.report.as_deref(), &rendered)
}

fn run_hyper(args: HyperArgs) -> Result<(), CliError> {
    let path = args.series_file.display().to_string();
    let inputs = vec![report::digest_file(&path)?];

    let options = LoadOptions {
        unit: args.unit.into(),
        name: args.name.clone(),
        ..LoadOptions::default()
    };
    let series = load_series(&args.series_file, &options)?;
    let entropy = EntropySeries::from_time_series(&series)?;
    let fit_options = FitOptions { fix_v0_at_zero: args.zero_intercept };

    let (fit, search_label): (HyperinflationFit, Option<String>) = match args.break_at {
        Some(t_star) => (fit_at_breakpoint(&entropy, t_star, &fit_options)?, None),
        None => {
            let (lo, hi) = match &args.search {
                Some(spec) => parse_search(spec)?,
                None => full_search_range(&entropy),
            };
            let found = detect_breakpoint(&entropy, lo, hi, &fit_options)?;
            (found.fit, Some(format!("{lo}..{hi}")))
        }
    };

    let mut warnings = Vec::new();
    if fit.degenerate_acceleration {
        warnings.push(
            "degenerate acceleration: the post-break exponential regime explains the data no \
             better than a straight continuation of the pre-break line"
                .to_string(),
        );
    }

    // level plot, the semi-log source data
    let mut level_rows = Vec::with_capacity(series.len());
    for p in series.points() {
        let fitted = sample_space_size(p.index as f64, &fit.params)?;
        level_rows.push(format!("{},{},{}", p.index, p.value, fitted));
    }
    let level_plot = plot_lines("t,observed,fitted", level_rows.into_iter());

    // post-break log-entropy plot: ln v(t) against the constrained line
    let t_star = fit.params.t_star;
    let entropy_plot = plot_lines(
        "t,observed,fitted",
        entropy
            .points()
            .iter()
            .filter(|&&(t, _)| t as f64 >= t_star)
            .map(|&(t, v)| {
                let fitted = fit.constrained_intercept + fit.params.lambda2 * (t as f64 - t_star);
                format!("{t},{},{fitted}", v.ln())
            }),
    );

    let doc = Report {
        command: "hyper".to_string(),
        inputs,
        warnings,
        fits: Vec::new(),
        decomposition: None,
        hyper: Some(report::hyper_summary(&fit, search_label)?),
    };
    let rendered = report::render(&doc)?;

    write_file(&args.plot, &level_plot)?;
    write_file(&args.entropy_plot, &entropy_plot)?;
    emit_report(args.report.as_deref(), &rendered)
}

fn apply_reference(series: TimeSeries, reference: Option<i64>) -> Result<TimeSeries, CliError> {
    match reference {
        Some(period) => Ok(series.with_reference_period(period)?),
        None => Ok(series),
    }
}

fn parse_search(spec: &str) -> Result<(i64, i64), CliError> {
    let err = || {
        CliError::validation(format!(
            "cannot parse search range {spec:?}; expected `lo..hi` with integers"
        ))
    };
    let (lo, hi) = spec.split_once("..").ok_or_else(err)?;
    let lo: i64 = lo.trim().parse().map_err(|_| err())?;
    let hi: i64 = hi.trim().parse().map_err(|_| err())?;
    if lo > hi {
        return Err(CliError::validation(format!("empty search range {spec:?}")));
    }
    Ok((lo, hi))
}

fn plot_lines(header: &str, rows: impl Iterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))
}

fn emit_report(path: Option<&Path>, rendered: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, rendered),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}
