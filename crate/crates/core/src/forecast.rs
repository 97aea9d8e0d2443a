//! One-day-ahead forecasting: the weighted average of the successors of
//! similar past days, optionally with the smooth part predicted through
//! its day-to-day increments, plus weight-driven bootstrap paths.

use chrono::{Datelike, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::SegmentSeries;
use crate::error::{KwfError, Result};
use crate::similarity::{
    dissimilarity, weights_from_distances, KernelFamily, KernelSpec, WeightVector,
};
use crate::wavelet::{SegmentTransform, WaveletBasis, WaveletDecomp};

/// Fewest history days any forecast accepts.
pub const MIN_HISTORY: usize = 3;

/// How the smooth (mean-level) part of the next day is predicted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Correction {
    /// Weighted average of successor levels.
    #[default]
    None,
    /// Last observed level plus weighted average of successor increments.
    Increment,
}

impl Correction {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "none" => Ok(Correction::None),
            "increment" => Ok(Correction::Increment),
            other => Err(KwfError::Config(format!("unknown correction `{other}`"))),
        }
    }
}

/// A series with every day's wavelet decomposition and smooth/detail split
/// computed once up front.
#[derive(Debug, Clone)]
pub struct AnalyzedSeries {
    series: SegmentSeries,
    transform: SegmentTransform,
    decomps: Vec<WaveletDecomp>,
    smooth: Vec<Vec<f64>>,
    detail: Vec<Vec<f64>>,
}

impl AnalyzedSeries {
    pub fn new(series: SegmentSeries, basis: WaveletBasis) -> Result<Self> {
        let transform = SegmentTransform::new(basis, series.h())?;
        let analyzed = series
            .segments()
            .par_iter()
            .map(|seg| {
                let d = transform.analyze(&seg.values)?;
                let (s, dd) = transform.split(&d)?;
                Ok((d, s, dd))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut decomps = Vec::with_capacity(analyzed.len());
        let mut smooth = Vec::with_capacity(analyzed.len());
        let mut detail = Vec::with_capacity(analyzed.len());
        for (d, s, dd) in analyzed {
            decomps.push(d);
            smooth.push(s);
            detail.push(dd);
        }
        Ok(AnalyzedSeries {
            series,
            transform,
            decomps,
            smooth,
            detail,
        })
    }

    pub fn series(&self) -> &SegmentSeries {
        &self.series
    }

    pub fn transform(&self) -> &SegmentTransform {
        &self.transform
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn decomp(&self, i: usize) -> &WaveletDecomp {
        &self.decomps[i]
    }

    pub fn smooth(&self, i: usize) -> &[f64] {
        &self.smooth[i]
    }

    pub fn detail(&self, i: usize) -> &[f64] {
        &self.detail[i]
    }

    fn check_history(&self, n: usize) -> Result<()> {
        if n < 2 || n > self.len() {
            return Err(KwfError::InsufficientHistory {
                required: 2,
                available: n.min(self.len()),
            });
        }
        Ok(())
    }

    /// Dissimilarity of day `n - 1` to each of days `0..n-1`.
    pub fn distances_to_last(&self, n: usize, j0: usize) -> Result<Vec<f64>> {
        self.check_history(n)?;
        let current = &self.decomps[n - 1];
        self.decomps[..n - 1]
            .iter()
            .map(|p| dissimilarity(current, p, j0))
            .collect()
    }
}

/// Which rung of the degenerate-weights fallback produced the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    Kernel,
    GroupFiltered,
    /// Group filtering left no mass; unfiltered kernel weights used.
    UnfilteredFallback,
    /// Kernel weights vanished everywhere; uniform over the current group.
    UniformGroupFallback,
}

/// Kernel weights for forecasting day `n` from days `0..n`, with the
/// fallback chain filtered, unfiltered, uniform-over-group.
pub fn select_weights(
    analyzed: &AnalyzedSeries,
    n: usize,
    spec: &KernelSpec,
    j0: usize,
    group_filter: bool,
) -> Result<(WeightVector, WeightSource)> {
    let distances = analyzed.distances_to_last(n, j0)?;
    let segments = analyzed.series().segments();
    let g_now = &segments[n - 1].group;
    let in_group: Vec<bool> = segments[..n - 1]
        .iter()
        .map(|s| &s.group == g_now)
        .collect();

    if group_filter {
        match weights_from_distances(&distances, spec, Some(&in_group)) {
            Ok(w) => return Ok((w, WeightSource::GroupFiltered)),
            Err(KwfError::DegenerateWeights(why)) => {
                log::warn!(
                    "day {}: group filter degenerate ({why}), using unfiltered weights",
                    n
                );
            }
            Err(e) => return Err(e),
        }
    }
    match weights_from_distances(&distances, spec, None) {
        Ok(w) => Ok((
            w,
            if group_filter {
                WeightSource::UnfilteredFallback
            } else {
                WeightSource::Kernel
            },
        )),
        Err(KwfError::DegenerateWeights(why)) => {
            log::warn!(
                "day {}: kernel weights degenerate ({why}), using uniform group weights",
                n
            );
            let w = WeightVector::uniform_over(&in_group, spec.bandwidth, true).map_err(|_| {
                KwfError::DegenerateWeights(format!("no past day shares group {g_now}"))
            })?;
            Ok((w, WeightSource::UniformGroupFallback))
        }
        Err(e) => Err(e),
    }
}

/// Point forecast with its smooth/detail decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointForecast {
    pub point: Vec<f64>,
    pub smooth: Vec<f64>,
    pub detail: Vec<f64>,
    /// Predicted wavelet coefficients.
    pub coefficients: WaveletDecomp,
}

fn check_weights(n: usize, w: &WeightVector) -> Result<()> {
    if w.len() + 1 != n {
        return Err(KwfError::ShapeMismatch(format!(
            "{} weights for a history of {n} days",
            w.len()
        )));
    }
    Ok(())
}

/// Forecast of day `n` from days `0..n` using `w` over days `0..n-1`.
pub fn point_forecast(
    analyzed: &AnalyzedSeries,
    n: usize,
    w: &WeightVector,
    correction: Correction,
) -> Result<PointForecast> {
    analyzed.check_history(n)?;
    check_weights(n, w)?;
    if correction == Correction::Increment && n < MIN_HISTORY {
        return Err(KwfError::InsufficientHistory {
            required: MIN_HISTORY,
            available: n,
        });
    }
    let mut coefficients = analyzed.decomp(0).zeros_like();
    for (m, wm) in w.weights.iter().enumerate() {
        if *wm != 0.0 {
            coefficients.add_scaled(*wm, analyzed.decomp(m + 1));
        }
    }
    if correction == Correction::Increment {
        // Level of the last day plus weighted successor increments; only the
        // approximation coefficients carry the level.
        let mut approx = analyzed.decomp(n - 1).approx.clone();
        for (m, wm) in w.weights.iter().enumerate() {
            if *wm != 0.0 {
                let next = &analyzed.decomp(m + 1).approx;
                let prev = &analyzed.decomp(m).approx;
                for (a, (nx, pv)) in approx.iter_mut().zip(next.iter().zip(prev)) {
                    *a += wm * (nx - pv);
                }
            }
        }
        coefficients.approx = approx;
    }
    let transform = analyzed.transform();
    let (smooth, detail) = transform.split(&coefficients)?;
    let point = transform.synthesize(&coefficients)?;
    Ok(PointForecast {
        point,
        smooth,
        detail,
        coefficients,
    })
}

/// Weighted average of successor days.
pub fn forecast_stationary(
    analyzed: &AnalyzedSeries,
    n: usize,
    w: &WeightVector,
) -> Result<PointForecast> {
    point_forecast(analyzed, n, w, Correction::None)
}

/// Level predicted through increments, shape through the weighted average
/// of successor details.
pub fn forecast_corrected(
    analyzed: &AnalyzedSeries,
    n: usize,
    w: &WeightVector,
) -> Result<PointForecast> {
    point_forecast(analyzed, n, w, Correction::Increment)
}

/// `B` pseudo-realisations of the next day.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapPaths {
    pub paths: Vec<Vec<f64>>,
    pub smooth: Vec<Vec<f64>>,
    pub detail: Vec<Vec<f64>>,
    /// Past day `m` drawn for each path; the path is built from day `m + 1`.
    pub sources: Vec<usize>,
}

/// Uniform draw for path `b`: ChaCha stream `b` under key `seed`, so each
/// draw is independent of evaluation order.
fn keyed_uniform(seed: u64, b: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(b as u64);
    rng.gen::<f64>()
}

/// Inverse-CDF pick of an index with probability proportional to `weights`.
fn inverse_cdf(cumulative: &[f64], u: f64) -> usize {
    let total = *cumulative.last().expect("non-empty");
    let target = u * total;
    let idx = cumulative.partition_point(|c| *c <= target);
    if idx < cumulative.len() {
        idx
    } else {
        // u * total rounded onto the last edge: take the last atom with mass
        let mut last = cumulative.len() - 1;
        while last > 0 && cumulative[last] == cumulative[last - 1] {
            last -= 1;
        }
        last
    }
}

/// Draws `b_count` successor days with probabilities `w`. Under the
/// increment correction each path's smooth part is re-levelled onto the
/// last observed day: `S_{n-1} + S_{m+1} - S_m`.
pub fn draw_bootstrap(
    analyzed: &AnalyzedSeries,
    n: usize,
    w: &WeightVector,
    b_count: usize,
    seed: u64,
    correction: Correction,
) -> Result<BootstrapPaths> {
    analyzed.check_history(n)?;
    check_weights(n, w)?;
    if b_count == 0 {
        return Err(KwfError::invalid("bootstrap size must be at least 1"));
    }
    if let Some(bad) = w.weights.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(KwfError::DegenerateWeights(format!("invalid weight {bad}")));
    }
    let cumulative: Vec<f64> = w
        .weights
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    if cumulative.last().copied().unwrap_or(0.0) <= 0.0 {
        return Err(KwfError::DegenerateWeights("weights carry no mass".into()));
    }
    let sources: Vec<usize> = (0..b_count)
        .into_par_iter()
        .map(|b| inverse_cdf(&cumulative, keyed_uniform(seed, b)))
        .collect();

    let h = analyzed.series().h();
    let mut out = BootstrapPaths {
        paths: Vec::with_capacity(b_count),
        smooth: Vec::with_capacity(b_count),
        detail: Vec::with_capacity(b_count),
        sources: sources.clone(),
    };
    for m in sources {
        let detail = analyzed.detail(m + 1).to_vec();
        let smooth: Vec<f64> = match correction {
            Correction::None => analyzed.smooth(m + 1).to_vec(),
            Correction::Increment => (0..h)
                .map(|i| {
                    analyzed.smooth(n - 1)[i] + analyzed.smooth(m + 1)[i] - analyzed.smooth(m)[i]
                })
                .collect(),
        };
        let path = match correction {
            Correction::None => analyzed.series().segments()[m + 1].values.clone(),
            Correction::Increment => smooth.iter().zip(&detail).map(|(s, d)| s + d).collect(),
        };
        out.paths.push(path);
        out.smooth.push(smooth);
        out.detail.push(detail);
    }
    Ok(out)
}

/// Per-instant sample standard deviation across paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseSigma {
    pub values: Vec<f64>,
    /// Set when fewer than two paths make the estimate meaningless.
    pub degenerate: bool,
}

/// Sample standard deviation (divisor `B - 1`) at each instant.
pub fn pointwise_sigma(paths: &[Vec<f64>]) -> PointwiseSigma {
    let h = paths.first().map_or(0, Vec::len);
    if paths.len() < 2 {
        return PointwiseSigma {
            values: vec![0.0; h],
            degenerate: true,
        };
    }
    let b = paths.len() as f64;
    let values = (0..h)
        .map(|i| {
            // shifted by the first path so identical paths give exactly 0
            let origin = paths[0][i];
            let mean = paths.iter().map(|p| p[i] - origin).sum::<f64>() / b;
            let ss = paths
                .iter()
                .map(|p| (p[i] - origin - mean).powi(2))
                .sum::<f64>();
            (ss / (b - 1.0)).sqrt()
        })
        .collect();
    PointwiseSigma {
        values,
        degenerate: false,
    }
}

/// Settings shared by every forecast of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSettings {
    pub family: KernelFamily,
    pub j0: usize,
    pub correction: Correction,
    pub group_filter: bool,
    pub bootstrap_size: usize,
    pub seed: u64,
}

impl Default for ForecastSettings {
    fn default() -> Self {
        ForecastSettings {
            family: KernelFamily::Gaussian,
            j0: 0,
            correction: Correction::None,
            group_filter: true,
            bootstrap_size: 100,
            seed: 0,
        }
    }
}

/// Point forecast, bootstrap paths and their per-instant spread for one day.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastBundle {
    pub target_date: NaiveDate,
    /// Latest day that entered the forecast.
    pub last_used_date: NaiveDate,
    pub point: Vec<f64>,
    pub smooth_part: Vec<f64>,
    pub detail_part: Vec<f64>,
    pub boot_paths: Vec<Vec<f64>>,
    pub boot_smooth: Vec<Vec<f64>>,
    pub boot_detail: Vec<Vec<f64>>,
    pub boot_sources: Vec<usize>,
    pub sigma: Vec<f64>,
    pub sigma_degenerate: bool,
    pub weights: WeightVector,
    pub weight_source: WeightSource,
    pub rng_seed: u64,
}

impl ForecastBundle {
    /// Assembles a bundle directly from a point forecast and paths, with
    /// sigma computed from the paths. Used for hand-built bundles.
    pub fn from_paths(
        point: Vec<f64>,
        smooth_part: Vec<f64>,
        detail_part: Vec<f64>,
        boot: BootstrapPaths,
    ) -> Self {
        let sigma = pointwise_sigma(&boot.paths);
        let date = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
        ForecastBundle {
            target_date: date,
            last_used_date: date,
            point,
            smooth_part,
            detail_part,
            boot_paths: boot.paths,
            boot_smooth: boot.smooth,
            boot_detail: boot.detail,
            boot_sources: boot.sources,
            sigma: sigma.values,
            sigma_degenerate: sigma.degenerate,
            weights: WeightVector {
                weights: Vec::new(),
                bandwidth_used: 1.0,
                filtered: false,
            },
            weight_source: WeightSource::Kernel,
            rng_seed: 0,
        }
    }

    pub fn h(&self) -> usize {
        self.point.len()
    }

    pub fn b(&self) -> usize {
        self.boot_paths.len()
    }
}

/// Seed for the bootstrap of `date`, so every day's draws are fixed by the
/// run seed and the date alone.
pub fn day_seed(seed: u64, date: NaiveDate) -> u64 {
    let day = i64::from(date.num_days_from_ce()) as u64;
    splitmix64(seed ^ splitmix64(day))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Full forecast of day `n` (the day after the first `n` days) at the given
/// bandwidth.
pub fn forecast_next(
    analyzed: &AnalyzedSeries,
    n: usize,
    settings: &ForecastSettings,
    bandwidth: f64,
) -> Result<ForecastBundle> {
    if n < MIN_HISTORY || n > analyzed.len() {
        return Err(KwfError::InsufficientHistory {
            required: MIN_HISTORY,
            available: n.min(analyzed.len()),
        });
    }
    let spec = KernelSpec::new(settings.family, bandwidth)?;
    let (weights, weight_source) =
        select_weights(analyzed, n, &spec, settings.j0, settings.group_filter)?;
    let fc = point_forecast(analyzed, n, &weights, settings.correction)?;
    let last_used_date = analyzed.series().segments()[n - 1].date;
    let target_date = last_used_date.succ_opt().expect("date in range");
    let rng_seed = day_seed(settings.seed, target_date);
    let boot = draw_bootstrap(
        analyzed,
        n,
        &weights,
        settings.bootstrap_size,
        rng_seed,
        settings.correction,
    )?;
    let sigma = pointwise_sigma(&boot.paths);
    Ok(ForecastBundle {
        target_date,
        last_used_date,
        point: fc.point,
        smooth_part: fc.smooth,
        detail_part: fc.detail,
        boot_paths: boot.paths,
        boot_smooth: boot.smooth,
        boot_detail: boot.detail,
        boot_sources: boot.sources,
        sigma: sigma.values,
        sigma_degenerate: sigma.degenerate,
        weights,
        weight_source,
        rng_seed,
    })
}
