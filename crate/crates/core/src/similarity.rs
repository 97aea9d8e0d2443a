//! Wavelet-domain dissimilarity between days, kernel weights over the past,
//! day-type filtering and bandwidth selection by replayed forecasts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::GroupLabel;
use crate::error::{KwfError, Result};
use crate::forecast::{self, AnalyzedSeries, Correction};
use crate::wavelet::WaveletDecomp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    #[default]
    Gaussian,
    Epanechnikov,
}

impl KernelFamily {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "gaussian" => Ok(KernelFamily::Gaussian),
            "epanechnikov" => Ok(KernelFamily::Epanechnikov),
            other => Err(KwfError::Config(format!("unknown kernel `{other}`"))),
        }
    }

    /// Unnormalised kernel value at `u`.
    pub fn eval(self, u: f64) -> f64 {
        match self {
            KernelFamily::Gaussian => (-0.5 * u * u).exp(),
            KernelFamily::Epanechnikov => {
                if u.abs() < 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub bandwidth: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(KwfError::invalid(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        Ok(KernelSpec { family, bandwidth })
    }

    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        Self::new(KernelFamily::Gaussian, bandwidth)
    }
}

/// Probability weights over past days `m = 0..n-1` (the successor of day `m`
/// is the candidate future).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub bandwidth_used: f64,
    pub filtered: bool,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Uniform weights over the indices where `support` is true.
    pub fn uniform_over(support: &[bool], bandwidth_used: f64, filtered: bool) -> Result<Self> {
        let count = support.iter().filter(|s| **s).count();
        if count == 0 {
            return Err(KwfError::DegenerateWeights("empty support".into()));
        }
        let w = 1.0 / count as f64;
        Ok(WeightVector {
            weights: support.iter().map(|s| if *s { w } else { 0.0 }).collect(),
            bandwidth_used,
            filtered,
        })
    }
}

/// Euclidean distance between the scale-`j` detail coefficients.
pub fn scale_distance(a: &WaveletDecomp, b: &WaveletDecomp, j: usize) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(KwfError::ShapeMismatch(
            "decompositions differ in shape".into(),
        ));
    }
    let (da, db) = match (a.details.get(j), b.details.get(j)) {
        (Some(da), Some(db)) => (da, db),
        _ => {
            return Err(KwfError::ShapeMismatch(format!(
                "scale {j} out of range (depth {})",
                a.levels()
            )))
        }
    };
    Ok(da
        .iter()
        .zip(db)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// `sum_{j=j0}^{J-1} 2^{-j/2} dist_j(a, b)`.
pub fn dissimilarity(a: &WaveletDecomp, b: &WaveletDecomp, j0: usize) -> Result<f64> {
    if j0 >= a.levels() {
        return Err(KwfError::ShapeMismatch(format!(
            "j0 = {j0} exceeds depth {}",
            a.levels()
        )));
    }
    (j0..a.levels()).try_fold(0.0, |acc, j| {
        Ok(acc + 2f64.powf(-(j as f64) / 2.0) * scale_distance(a, b, j)?)
    })
}

/// Normalised kernel weights from precomputed dissimilarities, restricted
/// to `support` when given. Gaussian weights are computed relative to the
/// nearest in-support neighbour so they never underflow to all zeros.
pub fn weights_from_distances(
    distances: &[f64],
    spec: &KernelSpec,
    support: Option<&[bool]>,
) -> Result<WeightVector> {
    if distances.is_empty() {
        return Err(KwfError::invalid("no past segments to weight"));
    }
    let inside = |m: usize| support.is_none_or(|s| s[m]);
    let h = spec.bandwidth;
    let raw: Vec<f64> = match spec.family {
        KernelFamily::Gaussian => {
            let d_min = distances
                .iter()
                .enumerate()
                .filter(|(m, _)| inside(*m))
                .map(|(_, d)| *d)
                .fold(f64::INFINITY, f64::min);
            if !d_min.is_finite() {
                return Err(KwfError::DegenerateWeights("empty support".into()));
            }
            let offset = -0.5 * (d_min / h) * (d_min / h);
            distances
                .iter()
                .enumerate()
                .map(|(m, d)| {
                    if inside(m) {
                        let u = d / h;
                        (-0.5 * u * u - offset).exp()
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        KernelFamily::Epanechnikov => distances
            .iter()
            .enumerate()
            .map(|(m, d)| {
                if inside(m) {
                    spec.family.eval(d / h)
                } else {
                    0.0
                }
            })
            .collect(),
    };
    let total: f64 = raw.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(KwfError::DegenerateWeights(
            "all kernel values vanish at this bandwidth".into(),
        ));
    }
    Ok(WeightVector {
        weights: raw.iter().map(|r| r / total).collect(),
        bandwidth_used: h,
        filtered: support.is_some(),
    })
}

/// Kernel weights of each past day against `current`.
pub fn kernel_weights(
    current: &WaveletDecomp,
    past: &[WaveletDecomp],
    spec: &KernelSpec,
    j0: usize,
) -> Result<WeightVector> {
    if past.is_empty() {
        return Err(KwfError::invalid("no past segments to weight"));
    }
    let distances = past
        .iter()
        .map(|p| dissimilarity(current, p, j0))
        .collect::<Result<Vec<_>>>()?;
    weights_from_distances(&distances, spec, None)
}

/// Zeroes weights of days outside `g_now` and renormalises.
pub fn group_filter(
    w: &WeightVector,
    groups: &[GroupLabel],
    g_now: &GroupLabel,
) -> Result<WeightVector> {
    if groups.len() != w.len() {
        return Err(KwfError::ShapeMismatch(format!(
            "{} group labels for {} weights",
            groups.len(),
            w.len()
        )));
    }
    let kept: Vec<f64> = w
        .weights
        .iter()
        .zip(groups)
        .map(|(wm, g)| if g == g_now { *wm } else { 0.0 })
        .collect();
    let total: f64 = kept.iter().sum();
    if total <= 0.0 {
        return Err(KwfError::DegenerateWeights(format!(
            "no weight left in group {g_now}"
        )));
    }
    Ok(WeightVector {
        weights: kept.iter().map(|k| k / total).collect(),
        bandwidth_used: w.bandwidth_used,
        filtered: true,
    })
}

/// Forecast settings that a bandwidth replay needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplaySettings {
    pub family: KernelFamily,
    pub j0: usize,
    pub correction: Correction,
    pub group_filter: bool,
}

/// Mean squared replay error for each grid value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub grid: Vec<f64>,
    pub mse: Vec<f64>,
    pub selected: f64,
}

/// Multipliers of the median dissimilarity used when no grid is given.
pub const DEFAULT_GRID_MULTIPLIERS: [f64; 10] =
    [0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0];

/// Grid scaled by the median dissimilarity between the last of the first
/// `n` days and the days before it.
pub fn default_grid(analyzed: &AnalyzedSeries, n: usize, j0: usize) -> Result<Vec<f64>> {
    let mut d = analyzed.distances_to_last(n, j0)?;
    d.sort_by(f64::total_cmp);
    let median = d[d.len() / 2];
    let scale = if median > 0.0 { median } else { 1.0 };
    Ok(DEFAULT_GRID_MULTIPLIERS.iter().map(|m| m * scale).collect())
}

/// Minimum number of days needed to replay `window` one-day-ahead
/// forecasts.
pub fn calibration_history_required(window: usize) -> usize {
    window + forecast::MIN_HISTORY
}

/// Picks the grid value minimising the mean squared error of one-day-ahead
/// forecasts of days `n - window .. n`, each made only from the days before
/// it. Ties go to the smaller bandwidth.
pub fn calibrate_bandwidth(
    analyzed: &AnalyzedSeries,
    n: usize,
    grid: &[f64],
    window: usize,
    settings: &ReplaySettings,
) -> Result<CalibrationReport> {
    if grid.is_empty() {
        return Err(KwfError::invalid("bandwidth grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
        return Err(KwfError::invalid(format!(
            "grid value {bad} is not positive"
        )));
    }
    if window == 0 {
        return Err(KwfError::invalid("calibration window must be positive"));
    }
    let required = calibration_history_required(window);
    if n < required || n > analyzed.len() {
        return Err(KwfError::InsufficientHistory {
            required,
            available: n.min(analyzed.len()),
        });
    }
    let mse = grid
        .par_iter()
        .map(|h| replay_mse(analyzed, n, *h, window, settings))
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for i in 1..grid.len() {
        let better = mse[i] < mse[best] || (mse[i] == mse[best] && grid[i] < grid[best]);
        if better {
            best = i;
        }
    }
    Ok(CalibrationReport {
        grid: grid.to_vec(),
        selected: grid[best],
        mse,
    })
}

fn replay_mse(
    analyzed: &AnalyzedSeries,
    n: usize,
    h: f64,
    window: usize,
    settings: &ReplaySettings,
) -> Result<f64> {
    let spec = KernelSpec::new(settings.family, h)?;
    let mut sse = 0.0;
    let mut count = 0usize;
    for target in n - window..n {
        let (w, _) =
            forecast::select_weights(analyzed, target, &spec, settings.j0, settings.group_filter)?;
        let fc = forecast::point_forecast(analyzed, target, &w, settings.correction)?;
        let actual = &analyzed.series().segments()[target].values;
        sse += fc
            .point
            .iter()
            .zip(actual)
            .map(|(p, a)| (p - a) * (p - a))
            .sum::<f64>();
        count += actual.len();
    }
    Ok(sse / count as f64)
}
