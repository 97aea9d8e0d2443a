//! Rolling-origin backtest and the amplitude/coverage metrics.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{KwfError, Result};
use crate::forecast::{
    forecast_next, AnalyzedSeries, ForecastBundle, ForecastSettings, WeightSource, MIN_HISTORY,
};
use crate::intervals::{build_band, IntervalSettings, Method, PredictionBand};
use crate::similarity::{
    calibrate_bandwidth, calibration_history_required, default_grid, ReplaySettings,
};

/// How the kernel bandwidth is chosen for each test day.
#[derive(Debug, Clone, PartialEq)]
pub enum BandwidthPolicy {
    Fixed(f64),
    /// Grid search over replayed forecasts. Calibration happens on days
    /// whose index from the series start is a multiple of `cadence`, and
    /// each test day reuses the latest calibration at or before it.
    Calibrated {
        grid: Option<Vec<f64>>,
        window: usize,
        cadence: usize,
    },
}

impl Default for BandwidthPolicy {
    fn default() -> Self {
        BandwidthPolicy::Calibrated {
            grid: None,
            window: 28,
            cadence: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestConfig {
    pub forecast: ForecastSettings,
    pub bandwidth: BandwidthPolicy,
    pub methods: Vec<Method>,
    pub alpha_levels: Vec<f64>,
    pub intervals: IntervalSettings,
    /// Stop after this many test days; `None` runs to the end of the series.
    pub test_days: Option<usize>,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        BacktestConfig {
            forecast: ForecastSettings::default(),
            bandwidth: BandwidthPolicy::default(),
            methods: Method::ALL.to_vec(),
            alpha_levels: vec![0.20, 0.10, 0.05],
            intervals: IntervalSettings::default(),
            test_days: None,
        }
    }
}

/// Forecast and bands for one test day.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DayResult {
    pub date: NaiveDate,
    /// Observed day, when known.
    pub actual: Option<Vec<f64>>,
    pub point: Vec<f64>,
    pub bands: Vec<PredictionBand>,
    pub bandwidth: Option<f64>,
    pub last_used_date: Option<NaiveDate>,
    pub weight_source: Option<WeightSource>,
}

impl DayResult {
    pub fn band(&self, method: Method, alpha: f64) -> Option<&PredictionBand> {
        self.bands
            .iter()
            .find(|b| b.method == method && same_alpha(b.alpha, alpha))
    }
}

fn same_alpha(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestResult {
    pub per_day: Vec<DayResult>,
    pub methods: Vec<Method>,
    pub alpha_levels: Vec<f64>,
    pub h: usize,
}

/// Builds all requested bands for one forecast.
pub fn bands_for(
    bundle: &ForecastBundle,
    methods: &[Method],
    alpha_levels: &[f64],
    settings: &IntervalSettings,
) -> Result<Vec<PredictionBand>> {
    let mut bands = Vec::with_capacity(methods.len() * alpha_levels.len());
    for m in methods {
        for a in alpha_levels {
            bands.push(build_band(bundle, *m, *a, settings)?);
        }
    }
    Ok(bands)
}

fn validate(cfg: &BacktestConfig) -> Result<()> {
    if cfg.methods.is_empty() {
        return Err(KwfError::Config("no interval methods selected".into()));
    }
    if cfg.alpha_levels.is_empty() {
        return Err(KwfError::Config("no alpha levels".into()));
    }
    if let Some(a) = cfg.alpha_levels.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(KwfError::Config(format!("alpha {a} outside (0, 1)")));
    }
    if let BandwidthPolicy::Calibrated { cadence: 0, .. } = cfg.bandwidth {
        return Err(KwfError::Config(
            "calibration cadence must be positive".into(),
        ));
    }
    Ok(())
}

fn replay_settings(settings: &ForecastSettings) -> ReplaySettings {
    ReplaySettings {
        family: settings.family,
        j0: settings.j0,
        correction: settings.correction,
        group_filter: settings.group_filter,
    }
}

/// Bandwidth used for a forecast of day `target`, calibrating from the
/// days before the anchor when needed.
pub fn bandwidth_for(
    analyzed: &AnalyzedSeries,
    target: usize,
    cfg: &BacktestConfig,
) -> Result<f64> {
    match &cfg.bandwidth {
        BandwidthPolicy::Fixed(h) => Ok(*h),
        BandwidthPolicy::Calibrated {
            grid,
            window,
            cadence,
        } => {
            let anchor = target - target % cadence;
            calibrate_at(analyzed, anchor, grid.as_deref(), *window, &cfg.forecast)
        }
    }
}

fn calibrate_at(
    analyzed: &AnalyzedSeries,
    anchor: usize,
    grid: Option<&[f64]>,
    window: usize,
    settings: &ForecastSettings,
) -> Result<f64> {
    let required = calibration_history_required(window);
    if anchor < required {
        return Err(KwfError::InsufficientHistory {
            required,
            available: anchor,
        });
    }
    let grid = match grid {
        Some(g) => g.to_vec(),
        None => default_grid(analyzed, anchor, settings.j0)?,
    };
    let report = calibrate_bandwidth(analyzed, anchor, &grid, window, &replay_settings(settings))?;
    log::debug!(
        "calibrated bandwidth {} on {} days",
        report.selected,
        anchor
    );
    Ok(report.selected)
}

/// Forecasts every day from `test_start` on, each from strictly earlier
/// days only.
pub fn backtest(
    analyzed: &AnalyzedSeries,
    test_start: NaiveDate,
    cfg: &BacktestConfig,
) -> Result<BacktestResult> {
    validate(cfg)?;
    let series = analyzed.series();
    let start = series.index_of(test_start).ok_or_else(|| {
        KwfError::invalid(format!("test start {test_start} is outside the series"))
    })?;
    let end = match cfg.test_days {
        Some(n) => (start + n).min(series.len()),
        None => series.len(),
    };
    if start >= end {
        return Err(KwfError::invalid("empty test period"));
    }
    let required = match &cfg.bandwidth {
        BandwidthPolicy::Fixed(_) => MIN_HISTORY,
        BandwidthPolicy::Calibrated {
            window, cadence, ..
        } => {
            // the first test day's anchor must itself have enough history
            let need = calibration_history_required(*window);
            let anchor = start - start % cadence;
            if anchor < need {
                return Err(KwfError::InsufficientHistory {
                    required: need.div_ceil(*cadence) * cadence,
                    available: start,
                });
            }
            need
        }
    };
    if start < required {
        return Err(KwfError::InsufficientHistory {
            required,
            available: start,
        });
    }

    let bandwidths: BTreeMap<usize, f64> = match &cfg.bandwidth {
        BandwidthPolicy::Fixed(h) => (start..end).map(|t| (t, *h)).collect(),
        BandwidthPolicy::Calibrated {
            grid,
            window,
            cadence,
        } => {
            let mut anchors: Vec<usize> = (start..end).map(|t| t - t % cadence).collect();
            anchors.dedup();
            let calibrated = anchors
                .par_iter()
                .map(|a| {
                    calibrate_at(analyzed, *a, grid.as_deref(), *window, &cfg.forecast)
                        .map(|h| (*a, h))
                })
                .collect::<Result<BTreeMap<_, _>>>()?;
            (start..end)
                .map(|t| (t, calibrated[&(t - t % cadence)]))
                .collect()
        }
    };

    let per_day = (start..end)
        .into_par_iter()
        .map(|t| {
            let h = bandwidths[&t];
            let bundle = forecast_next(analyzed, t, &cfg.forecast, h)?;
            let target = &series.segments()[t];
            assert!(
                bundle.last_used_date < target.date && bundle.target_date == target.date,
                "forecast for {} used data through {}",
                target.date,
                bundle.last_used_date
            );
            Ok(DayResult {
                date: target.date,
                actual: Some(target.values.clone()),
                bands: bands_for(&bundle, &cfg.methods, &cfg.alpha_levels, &cfg.intervals)?,
                point: bundle.point,
                bandwidth: Some(h),
                last_used_date: Some(bundle.last_used_date),
                weight_source: Some(bundle.weight_source),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(BacktestResult {
        per_day,
        methods: cfg.methods.clone(),
        alpha_levels: cfg.alpha_levels.clone(),
        h: series.h(),
    })
}

/// Iterates `(band, actual)` for every day that has both.
fn scored(
    result: &BacktestResult,
    method: Method,
    alpha: f64,
) -> Result<Vec<(&PredictionBand, &[f64])>> {
    let pairs: Vec<_> = result
        .per_day
        .iter()
        .map(|d| {
            d.band(method, alpha)
                .map(|b| (b, d.actual.as_deref()))
                .ok_or_else(|| {
                    KwfError::invalid(format!(
                        "no {} band at alpha {alpha} for {}",
                        method.label(),
                        d.date
                    ))
                })
        })
        .collect::<Result<_>>()?;
    let pairs: Vec<_> = pairs
        .into_iter()
        .filter_map(|(b, a)| a.map(|a| (b, a)))
        .collect();
    if pairs.is_empty() {
        return Err(KwfError::invalid("no scored days"));
    }
    Ok(pairs)
}

/// Average band width over all days and instants.
pub fn mean_amplitude(result: &BacktestResult, method: Method, alpha: f64) -> Result<f64> {
    let pairs = scored(result, method, alpha)?;
    let (sum, count) = pairs.iter().fold((0.0, 0usize), |(s, c), (b, _)| {
        (s + b.width().iter().sum::<f64>(), c + b.lower.len())
    });
    Ok(sum / count as f64)
}

/// Percent of (day, instant) pairs inside the band, bounds included.
pub fn mean_coverage(result: &BacktestResult, method: Method, alpha: f64) -> Result<f64> {
    let pairs = scored(result, method, alpha)?;
    let (hit, count) = pairs.iter().fold((0usize, 0usize), |(h, c), (b, a)| {
        let covered = a
            .iter()
            .enumerate()
            .filter(|(i, v)| b.covers(*i, **v))
            .count();
        (h + covered, c + a.len())
    });
    Ok(100.0 * hit as f64 / count as f64)
}

/// Percent of days with at most `k_allow` instants outside the band.
pub fn curvewise_coverage(
    result: &BacktestResult,
    method: Method,
    alpha: f64,
    k_allow: usize,
) -> Result<f64> {
    let pairs = scored(result, method, alpha)?;
    let covered = pairs
        .iter()
        .filter(|(b, a)| misses(b, a) <= k_allow)
        .count();
    Ok(100.0 * covered as f64 / pairs.len() as f64)
}

fn misses(band: &PredictionBand, actual: &[f64]) -> usize {
    actual
        .iter()
        .enumerate()
        .filter(|(i, v)| !band.covers(*i, **v))
        .count()
}

/// Per-instant mean width and coverage (percent) across days.
pub fn by_hour_profiles(
    result: &BacktestResult,
    method: Method,
    alpha: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let pairs = scored(result, method, alpha)?;
    let h = result.h;
    let mut amp = vec![0.0; h];
    let mut cov = vec![0.0; h];
    for (b, a) in &pairs {
        for i in 0..h {
            amp[i] += b.upper[i] - b.lower[i];
            if b.covers(i, a[i]) {
                cov[i] += 1.0;
            }
        }
    }
    let days = pairs.len() as f64;
    Ok((
        amp.iter().map(|x| x / days).collect(),
        cov.iter().map(|x| 100.0 * x / days).collect(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ByHour {
    pub method: Method,
    pub alpha: f64,
    pub amplitude: Vec<f64>,
    pub coverage: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvewiseRow {
    pub method: Method,
    pub alpha: f64,
    pub coverage: Vec<f64>,
}

/// All summary tables of a backtest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub methods: Vec<Method>,
    pub alpha_levels: Vec<f64>,
    pub days: usize,
    /// `[method][alpha]`, series units.
    pub mean_amplitude: Vec<Vec<f64>>,
    /// `[method][alpha]`, percent.
    pub mean_coverage: Vec<Vec<f64>>,
    pub curvewise_k: Vec<usize>,
    /// One row per method and alpha, one column per entry of `curvewise_k`.
    pub curvewise: Vec<CurvewiseRow>,
    pub by_hour: Vec<ByHour>,
}

/// Summarises a backtest; by-hour profiles are taken at `profile_alpha`.
pub fn evaluate(
    result: &BacktestResult,
    profile_alpha: f64,
    curvewise_k: &[usize],
) -> Result<EvalReport> {
    let mut report = EvalReport {
        methods: result.methods.clone(),
        alpha_levels: result.alpha_levels.clone(),
        days: result.per_day.len(),
        mean_amplitude: Vec::new(),
        mean_coverage: Vec::new(),
        curvewise_k: curvewise_k.to_vec(),
        curvewise: Vec::new(),
        by_hour: Vec::new(),
    };
    for m in &result.methods {
        let mut amp = Vec::new();
        let mut cov = Vec::new();
        for a in &result.alpha_levels {
            amp.push(mean_amplitude(result, *m, *a)?);
            cov.push(mean_coverage(result, *m, *a)?);
            report.curvewise.push(CurvewiseRow {
                method: *m,
                alpha: *a,
                coverage: curvewise_k
                    .iter()
                    .map(|k| curvewise_coverage(result, *m, *a, *k))
                    .collect::<Result<_>>()?,
            });
        }
        report.mean_amplitude.push(amp);
        report.mean_coverage.push(cov);
        let (amplitude, coverage) = by_hour_profiles(result, *m, profile_alpha)?;
        report.by_hour.push(ByHour {
            method: *m,
            alpha: profile_alpha,
            amplitude,
            coverage,
        });
    }
    Ok(report)
}

fn confidence_label(alpha: f64) -> String {
    format!("{}%", fmt_num(100.0 * (1.0 - alpha), 0))
}

fn fmt_num(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Plain-text rendering of the amplitude, coverage and curve-wise tables.
pub fn render_text(report: &EvalReport) -> String {
    let mut out = String::new();
    let conf: Vec<String> = report
        .alpha_levels
        .iter()
        .map(|a| confidence_label(*a))
        .collect();
    let mut table = |title: &str, rows: &[Vec<f64>], decimals: usize| {
        let _ = writeln!(out, "{title}");
        let _ = write!(out, "{:<8}", "method");
        for c in &conf {
            let _ = write!(out, "{c:>12}");
        }
        out.push('\n');
        for (m, row) in report.methods.iter().zip(rows) {
            let _ = write!(out, "{:<8}", m.label());
            for v in row {
                let _ = write!(out, "{:>12}", fmt_num(*v, decimals));
            }
            out.push('\n');
        }
        out.push('\n');
    };
    table("Mean amplitude", &report.mean_amplitude, 1);
    table("Mean coverage (%)", &report.mean_coverage, 1);

    let _ = writeln!(out, "Curve-wise coverage (%), columns = allowed misses");
    let _ = write!(out, "{:<8}{:>8}", "method", "level");
    for k in &report.curvewise_k {
        let _ = write!(out, "{:>10}", format!("k={k}"));
    }
    out.push('\n');
    for row in &report.curvewise {
        let _ = write!(
            out,
            "{:<8}{:>8}",
            row.method.label(),
            confidence_label(row.alpha)
        );
        for v in &row.coverage {
            let _ = write!(out, "{:>10}", fmt_num(*v, 1));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "\n{} test days", report.days);
    out
}

/// Writes `amplitude.csv`, `coverage.csv`, `curvewise.csv`,
/// `by_hour_<method>.csv` and `report.json` into `dir`.
pub fn write_report(report: &EvalReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let header = |out: &mut String| {
        out.push_str("method");
        for a in &report.alpha_levels {
            let _ = write!(out, ",{a}");
        }
        out.push('\n');
    };
    for (name, rows) in [
        ("amplitude.csv", &report.mean_amplitude),
        ("coverage.csv", &report.mean_coverage),
    ] {
        let mut out = String::new();
        header(&mut out);
        for (m, row) in report.methods.iter().zip(rows) {
            out.push_str(m.key());
            for v in row {
                let _ = write!(out, ",{v:.6}");
            }
            out.push('\n');
        }
        fs::write(dir.join(name), out)?;
    }

    let mut out = String::from("method,alpha");
    for k in &report.curvewise_k {
        let _ = write!(out, ",k{k}");
    }
    out.push('\n');
    for row in &report.curvewise {
        let _ = write!(out, "{},{}", row.method.key(), row.alpha);
        for v in &row.coverage {
            let _ = write!(out, ",{v:.6}");
        }
        out.push('\n');
    }
    fs::write(dir.join("curvewise.csv"), out)?;

    for bh in &report.by_hour {
        let mut out = String::from("instant,alpha,amplitude,coverage\n");
        for (i, (a, c)) in bh.amplitude.iter().zip(&bh.coverage).enumerate() {
            let _ = writeln!(out, "{i},{},{a:.6},{c:.6}", bh.alpha);
        }
        fs::write(dir.join(format!("by_hour_{}.csv", bh.method.key())), out)?;
    }

    let json =
        serde_json::to_string_pretty(report).map_err(|e| KwfError::invalid(e.to_string()))?;
    fs::write(dir.join("report.json"), json + "\n")?;
    Ok(())
}

/// Raw per-day dump, one row per day, instant, method and alpha:
/// `date,instant,actual,point,method,alpha,lower,upper`.
pub fn write_per_day<W: Write>(result: &BacktestResult, writer: W) -> Result<()> {
    let mut out = BufWriter::new(writer);
    writeln!(out, "date,instant,actual,point,method,alpha,lower,upper")?;
    for day in &result.per_day {
        for band in &day.bands {
            for i in 0..day.point.len() {
                let actual = day
                    .actual
                    .as_ref()
                    .map(|a| a[i].to_string())
                    .unwrap_or_default();
                writeln!(
                    out,
                    "{},{i},{actual},{},{},{},{},{}",
                    day.date,
                    day.point[i],
                    band.method.key(),
                    band.alpha,
                    band.lower[i],
                    band.upper[i]
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Rebuilds a [`BacktestResult`] from a per-day dump. Band diagnostics are
/// not part of the dump and come back empty.
pub fn read_per_day<R: Read>(reader: R) -> Result<BacktestResult> {
    let mut rdr = csv::Reader::from_reader(reader);
    let expected = [
        "date", "instant", "actual", "point", "method", "alpha", "lower", "upper",
    ];
    let headers = rdr.headers().map_err(|e| KwfError::Csv {
        row: 1,
        msg: e.to_string(),
    })?;
    if headers.iter().ne(expected) {
        return Err(KwfError::Csv {
            row: 1,
            msg: format!("header must be `{}`", expected.join(",")),
        });
    }
    /// Bounds by instant for one (method, alpha bits) pair.
    type BandRows = ((Method, u64), BTreeMap<usize, (f64, f64)>);
    #[derive(Default)]
    struct DayAcc {
        actual: BTreeMap<usize, Option<f64>>,
        point: BTreeMap<usize, f64>,
        bands: Vec<BandRows>,
    }
    let mut days: BTreeMap<NaiveDate, DayAcc> = BTreeMap::new();
    let mut methods: Vec<Method> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let row = idx + 2;
        let err = |msg: String| KwfError::Csv { row, msg };
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|_| err(format!("bad number `{}`", &rec[i])))
        };
        let date =
            NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d").map_err(|e| err(e.to_string()))?;
        let instant: usize = rec[1]
            .parse()
            .map_err(|_| err(format!("bad instant `{}`", &rec[1])))?;
        let actual = if rec[2].is_empty() {
            None
        } else {
            Some(num(2)?)
        };
        let method: Method = rec[4].parse().map_err(|e: KwfError| err(e.to_string()))?;
        let alpha = num(5)?;
        if !methods.contains(&method) {
            methods.push(method);
        }
        if !alphas.iter().any(|a| same_alpha(*a, alpha)) {
            alphas.push(alpha);
        }
        let acc = days.entry(date).or_default();
        acc.actual.insert(instant, actual);
        acc.point.insert(instant, num(3)?);
        let key = (method, alpha.to_bits());
        let slot = match acc.bands.iter().position(|(k, _)| *k == key) {
            Some(p) => p,
            None => {
                acc.bands.push((key, BTreeMap::new()));
                acc.bands.len() - 1
            }
        };
        acc.bands[slot].1.insert(instant, (num(6)?, num(7)?));
    }
    let h = days.values().next().map_or(0, |d| d.point.len());
    let mut per_day = Vec::with_capacity(days.len());
    for (date, acc) in days {
        if acc.point.len() != h || acc.point.keys().copied().ne(0..h) {
            return Err(KwfError::invalid(format!(
                "day {date} does not cover instants 0..{h}"
            )));
        }
        let actual = acc.actual.values().copied().collect::<Option<Vec<f64>>>();
        let bands = acc
            .bands
            .into_iter()
            .map(|((method, bits), rows)| {
                if rows.len() != h {
                    return Err(KwfError::invalid(format!(
                        "{date}: incomplete {} band",
                        method.label()
                    )));
                }
                let (lower, upper) = rows.values().copied().unzip();
                Ok(PredictionBand {
                    lower,
                    upper,
                    method,
                    alpha: f64::from_bits(bits),
                    k_allow: 0,
                    meta: Default::default(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        per_day.push(DayResult {
            date,
            actual,
            point: acc.point.into_values().collect(),
            bands,
            bandwidth: None,
            last_used_date: None,
            weight_source: None,
        });
    }
    Ok(BacktestResult {
        per_day,
        methods,
        alpha_levels: alphas,
        h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::BandMeta;

    fn band(method: Method, alpha: f64, lower: Vec<f64>, upper: Vec<f64>) -> PredictionBand {
        PredictionBand {
            lower,
            upper,
            method,
            alpha,
            k_allow: 0,
            meta: BandMeta::default(),
        }
    }

    fn day(d: u32, actual: Vec<f64>, bands: Vec<PredictionBand>) -> DayResult {
        DayResult {
            date: NaiveDate::from_ymd_opt(2010, 1, d).unwrap(),
            point: actual.clone(),
            actual: Some(actual),
            bands,
            bandwidth: None,
            last_used_date: None,
            weight_source: None,
        }
    }

    fn result(per_day: Vec<DayResult>, h: usize) -> BacktestResult {
        BacktestResult {
            per_day,
            methods: vec![Method::Skwf],
            alpha_levels: vec![0.1],
            h,
        }
    }

    #[test]
    fn amplitude_is_mean_width() {
        let r = result(
            vec![
                day(
                    1,
                    vec![0.0; 3],
                    vec![band(Method::Skwf, 0.1, vec![-1.0; 3], vec![1.0; 3])],
                ),
                day(
                    2,
                    vec![0.0; 3],
                    vec![band(Method::Skwf, 0.1, vec![-2.0; 3], vec![2.0; 3])],
                ),
            ],
            3,
        );
        assert_eq!(mean_amplitude(&r, Method::Skwf, 0.1).unwrap(), 3.0);
        let (amp, _) = by_hour_profiles(&r, Method::Skwf, 0.1).unwrap();
        assert_eq!(amp, vec![3.0; 3]);
        assert!(mean_amplitude(&r, Method::Np, 0.1).is_err());
        assert!(mean_amplitude(&r, Method::Skwf, 0.2).is_err());
    }

    #[test]
    fn coverage_counts() {
        let actual: Vec<f64> = (0..48).map(f64::from).collect();
        // covers the first 24 instants only
        let lower = vec![0.0; 48];
        let upper = vec![23.0; 48];
        let r = result(
            vec![day(
                1,
                actual.clone(),
                vec![band(Method::Skwf, 0.1, lower, upper)],
            )],
            48,
        );
        assert_eq!(mean_coverage(&r, Method::Skwf, 0.1).unwrap(), 50.0);
        assert_eq!(curvewise_coverage(&r, Method::Skwf, 0.1, 23).unwrap(), 0.0);
        assert_eq!(
            curvewise_coverage(&r, Method::Skwf, 0.1, 24).unwrap(),
            100.0
        );
        assert_eq!(
            curvewise_coverage(&r, Method::Skwf, 0.1, 48).unwrap(),
            100.0
        );

        let wide = result(
            vec![day(
                1,
                actual.clone(),
                vec![band(Method::Skwf, 0.1, vec![-1e300; 48], vec![1e300; 48])],
            )],
            48,
        );
        assert_eq!(mean_coverage(&wide, Method::Skwf, 0.1).unwrap(), 100.0);
        let off = result(
            vec![day(
                1,
                actual,
                vec![band(Method::Skwf, 0.1, vec![-5.0; 48], vec![-5.0; 48])],
            )],
            48,
        );
        assert_eq!(mean_coverage(&off, Method::Skwf, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn boundary_counts_as_covered() {
        let r = result(
            vec![day(
                1,
                vec![1.0, 2.0],
                vec![band(Method::Skwf, 0.1, vec![1.0, 0.0], vec![3.0, 2.0])],
            )],
            2,
        );
        assert_eq!(mean_coverage(&r, Method::Skwf, 0.1).unwrap(), 100.0);
    }

    #[test]
    fn per_day_dump_round_trip() {
        let r = result(
            vec![
                day(
                    1,
                    vec![1.5, 2.25],
                    vec![band(Method::Skwf, 0.1, vec![1.0, 0.1], vec![3.0, 2.0])],
                ),
                day(
                    2,
                    vec![-1.0, 7.0],
                    vec![band(Method::Skwf, 0.1, vec![-2.0, 6.0], vec![0.0, 8.5])],
                ),
            ],
            2,
        );
        let mut buf = Vec::new();
        write_per_day(&r, &mut buf).unwrap();
        let back = read_per_day(buf.as_slice()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn text_render_has_all_tables() {
        let r = result(
            vec![day(
                1,
                vec![0.0; 2],
                vec![band(Method::Skwf, 0.1, vec![-1.0; 2], vec![1.0; 2])],
            )],
            2,
        );
        let report = evaluate(&r, 0.1, &[0, 1, 2]).unwrap();
        let text = render_text(&report);
        assert!(text.contains("Mean amplitude"));
        assert!(text.contains("S-KWF"));
        assert!(text.contains("90%"));
        assert!(text.contains("k=2"));
    }
}
