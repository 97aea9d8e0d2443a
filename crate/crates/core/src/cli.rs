//! `kwf` command line: `generate`, `forecast`, `backtest`, `report`.
//!
//! Exit codes: 0 success, 1 validation error, 2 runtime error.

use std::fs;
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{DataSource, RunConfig};
use crate::data::{generate_synthetic, write_csv, SyntheticConfig};
use crate::error::KwfError;
use crate::eval::{
    backtest, bands_for, bandwidth_for, evaluate, read_per_day, render_text, write_per_day,
    write_report, BacktestResult, DayResult,
};
use crate::forecast::{forecast_next, AnalyzedSeries, WeightSource};
use crate::intervals::PredictionBand;

#[derive(Debug, Parser)]
#[command(
    name = "kwf",
    version,
    about = "Wavelet-kernel day-ahead forecasts with simultaneous prediction bands"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic load series as `timestamp,load` CSV.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "synthetic.csv")]
        out: PathBuf,
    },
    /// Forecast one day with every configured band.
    Forecast {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        date: NaiveDate,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rolling one-day-ahead evaluation over the test period.
    Backtest {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (1 runs serially).
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Rebuild the report tables from a per-day dump.
    Report {
        #[arg(long)]
        per_day: PathBuf,
        #[arg(long, default_value = "report")]
        out: PathBuf,
        /// Level for the by-hour profiles; defaults to the smallest alpha.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
        curvewise_k: Vec<usize>,
    },
}

/// Failure classified by exit code.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<KwfError> for CliError {
    fn from(e: KwfError) -> Self {
        match e {
            KwfError::Config(_)
            | KwfError::Invalid(_)
            | KwfError::Csv { .. }
            | KwfError::MissingGroup(_)
            | KwfError::RaggedLength { .. }
            | KwfError::NonFinite { .. }
            | KwfError::InsufficientHistory { .. } => CliError::Validation(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs a parsed command, returning what it printed.
pub fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Generate { config, seed, out } => cmd_generate(&config, seed, &out),
        Command::Forecast {
            config,
            date,
            seed,
            out,
        } => cmd_forecast(&config, date, seed, out),
        Command::Backtest {
            config,
            seed,
            out,
            jobs,
        } => cmd_backtest(&config, seed, out, jobs),
        Command::Report {
            per_day,
            out,
            alpha,
            curvewise_k,
        } => cmd_report(&per_day, &out, alpha, &curvewise_k),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> CliResult<String>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Validation(e.to_string()))?;
    run(cli)
}

fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(pool.install(f))
}

pub fn cmd_generate(
    config: &std::path::Path,
    seed: Option<u64>,
    out: &std::path::Path,
) -> CliResult<String> {
    let mut cfg = SyntheticConfig::from_file(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let series = generate_synthetic(&cfg)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_csv(&series, out)?;
    Ok(format!(
        "wrote {} rows to {}\n",
        series.len() * series.h(),
        out.display()
    ))
}

fn load_run(
    config: &std::path::Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> CliResult<(RunConfig, AnalyzedSeries)> {
    let mut cfg = RunConfig::from_file(config)?;
    if let Some(s) = seed {
        cfg.backtest.forecast.seed = s;
    }
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    let series = cfg.load_series()?;
    let analyzed = AnalyzedSeries::new(series, cfg.basis.clone())?;
    Ok((cfg, analyzed))
}

#[derive(Serialize)]
struct ForecastDoc<'a> {
    date: NaiveDate,
    last_used_date: NaiveDate,
    bandwidth: f64,
    weight_source: WeightSource,
    rng_seed: u64,
    point: &'a [f64],
    smooth_part: &'a [f64],
    detail_part: &'a [f64],
    sigma: &'a [f64],
    actual: Option<&'a [f64]>,
    weights: &'a [f64],
    bands: &'a [PredictionBand],
}

pub fn cmd_forecast(
    config: &std::path::Path,
    date: NaiveDate,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> CliResult<String> {
    let (cfg, analyzed) = load_run(config, seed, out)?;
    let series = analyzed.series();
    let first = series
        .first_date()
        .ok_or_else(|| CliError::Validation("series is empty".into()))?;
    let last = series.last_date().expect("non-empty");
    if date <= first || date > last.succ_opt().expect("date in range") {
        return Err(CliError::Validation(format!(
            "{date} is outside the forecastable range {} ..= {}",
            first.succ_opt().expect("date in range"),
            last.succ_opt().expect("date in range")
        )));
    }
    let n = (date - first).num_days() as usize;
    let h = bandwidth_for(&analyzed, n, &cfg.backtest)?;
    let bundle = forecast_next(&analyzed, n, &cfg.backtest.forecast, h)?;
    let bands = bands_for(
        &bundle,
        &cfg.backtest.methods,
        &cfg.backtest.alpha_levels,
        &cfg.backtest.intervals,
    )?;
    let actual = series.segments().get(n).map(|s| s.values.as_slice());

    let day = DayResult {
        date,
        actual: actual.map(<[f64]>::to_vec),
        point: bundle.point.clone(),
        bands: bands.clone(),
        bandwidth: Some(h),
        last_used_date: Some(bundle.last_used_date),
        weight_source: Some(bundle.weight_source),
    };
    let result = BacktestResult {
        per_day: vec![day],
        methods: cfg.backtest.methods.clone(),
        alpha_levels: cfg.backtest.alpha_levels.clone(),
        h: series.h(),
    };
    let mut csv_buf = Vec::new();
    write_per_day(&result, &mut csv_buf)?;
    let doc = ForecastDoc {
        date,
        last_used_date: bundle.last_used_date,
        bandwidth: h,
        weight_source: bundle.weight_source,
        rng_seed: bundle.rng_seed,
        point: &bundle.point,
        smooth_part: &bundle.smooth_part,
        detail_part: &bundle.detail_part,
        sigma: &bundle.sigma,
        actual,
        weights: &bundle.weights.weights,
        bands: &bands,
    };
    let json = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))?;

    fs::create_dir_all(&cfg.output_dir)?;
    let csv_path = cfg.output_dir.join(format!("forecast_{date}.csv"));
    fs::write(&csv_path, csv_buf)?;
    fs::write(
        cfg.output_dir.join(format!("forecast_{date}.json")),
        json + "\n",
    )?;
    Ok(format!(
        "forecast for {date} (bandwidth {h:.4}): {} band rows written to {}\n",
        series.h() * bands.len(),
        csv_path.display()
    ))
}

pub fn cmd_backtest(
    config: &std::path::Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
    jobs: usize,
) -> CliResult<String> {
    let (cfg, analyzed) = load_run(config, seed, out)?;
    let test_start = cfg
        .test_start
        .ok_or_else(|| CliError::Validation("backtest needs test_start".into()))?;
    let result = with_jobs(jobs, || backtest(&analyzed, test_start, &cfg.backtest))??;
    let report = evaluate(&result, cfg.profile_alpha, &cfg.curvewise_k)?;

    write_report(&report, &cfg.output_dir)?;
    if cfg.dump_per_day {
        let mut buf = Vec::new();
        write_per_day(&result, &mut buf)?;
        fs::write(cfg.output_dir.join("per_day.csv"), buf)?;
    }
    let source = match &cfg.source {
        DataSource::Csv(p) => p.display().to_string(),
        DataSource::Synthetic(_) => "synthetic series".into(),
    };
    Ok(format!(
        "backtest on {source} from {test_start}\n\n{}\nreport written to {}\n",
        render_text(&report),
        cfg.output_dir.display()
    ))
}

pub fn cmd_report(
    per_day: &std::path::Path,
    out: &std::path::Path,
    alpha: Option<f64>,
    curvewise_k: &[usize],
) -> CliResult<String> {
    let result = read_per_day(fs::File::open(per_day)?)?;
    if result.per_day.is_empty() {
        return Err(CliError::Validation("per-day dump has no rows".into()));
    }
    let alpha = alpha.unwrap_or_else(|| {
        result
            .alpha_levels
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    });
    let report = evaluate(&result, alpha, curvewise_k)?;
    write_report(&report, out)?;
    Ok(format!(
        "{}\nreport written to {}\n",
        render_text(&report),
        out.display()
    ))
}
