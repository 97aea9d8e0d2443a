//! Prediction bands built from a [`ForecastBundle`]: symmetric Gaussian
//! (S-KWF), residual quantiles of the smooth and detail parts (NS-KWF),
//! nearest-path peeling (NP) and k-FWE control.
//!
//! All empirical quantiles use the nearest-rank rule, rank `ceil(p * B)` of
//! the ascending sample.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{KwfError, Result};
use crate::forecast::ForecastBundle;
use crate::quantile::{
    inverse_normal_cdf, nearest_rank, nearest_rank_quantile, nearest_rank_sorted,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Skwf,
    Nskwf,
    Np,
    Kfwe,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Skwf, Method::Nskwf, Method::Np, Method::Kfwe];

    /// Config / file name key.
    pub fn key(self) -> &'static str {
        match self {
            Method::Skwf => "skwf",
            Method::Nskwf => "nskwf",
            Method::Np => "np",
            Method::Kfwe => "kfwe",
        }
    }

    /// Display name used in printed tables.
    pub fn label(self) -> &'static str {
        match self {
            Method::Skwf => "S-KWF",
            Method::Nskwf => "NS-KWF",
            Method::Np => "NP",
            Method::Kfwe => "k-FWE",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Method {
    type Err = KwfError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.key() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| KwfError::Config(format!("unknown method `{s}`")))
    }
}

/// How NS-KWF combines the smooth-part residual with the detail quantile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NsKwfMode {
    /// Smooth-part residual quantiles computed on their own.
    #[default]
    Disconnected,
    /// Smooth-part residual taken from the replicate whose detail residual
    /// sits at the selected rank.
    Connected,
}

impl NsKwfMode {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "disconnected" => Ok(NsKwfMode::Disconnected),
            "connected" => Ok(NsKwfMode::Connected),
            other => Err(KwfError::Config(format!("unknown nskwf_mode `{other}`"))),
        }
    }
}

/// Diagnostics recorded alongside a band.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BandMeta {
    /// Gaussian quantile (S-KWF).
    pub z: Option<f64>,
    /// Critical value (k-FWE).
    pub d_max: Option<f64>,
    /// Path indices removed by NP, in removal order.
    pub removed: Vec<usize>,
    /// Lower and upper nearest ranks (1-based) used for empirical quantiles.
    pub quantile_ranks: Option<(usize, usize)>,
    /// Connected NS-KWF: instants where several replicates tied at the
    /// selected rank (lowest index used).
    pub rank_ties: usize,
    /// Instants where a connected lower bound exceeded its upper bound and
    /// the two were swapped.
    pub crossings: usize,
    pub warning: Option<String>,
}

/// Lower and upper bounds over the day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionBand {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub method: Method,
    /// Miscoverage level.
    pub alpha: f64,
    /// Allowed misses in the construction (k-FWE only, else 0).
    pub k_allow: usize,
    pub meta: BandMeta,
}

impl PredictionBand {
    pub fn width(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .collect()
    }

    pub fn covers(&self, i: usize, value: f64) -> bool {
        self.lower[i] <= value && value <= self.upper[i]
    }

    /// Pointwise containment of `other`.
    pub fn contains(&self, other: &PredictionBand) -> bool {
        self.lower.iter().zip(&other.lower).all(|(a, b)| a <= b)
            && self.upper.iter().zip(&other.upper).all(|(a, b)| a >= b)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(KwfError::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

fn check_bundle(bundle: &ForecastBundle) -> Result<()> {
    let h = bundle.h();
    if bundle.boot_paths.is_empty() {
        return Err(KwfError::invalid("bundle has no bootstrap paths"));
    }
    if bundle.sigma.len() != h || bundle.boot_paths.iter().any(|p| p.len() != h) {
        return Err(KwfError::ShapeMismatch(
            "bundle paths and point differ in length".into(),
        ));
    }
    Ok(())
}

fn all_zero(sigma: &[f64]) -> bool {
    sigma.iter().all(|s| *s == 0.0)
}

/// `point ± z_{1-alpha/2} sigma`.
pub fn pi_s_kwf(bundle: &ForecastBundle, alpha: f64) -> Result<PredictionBand> {
    check_alpha(alpha)?;
    check_bundle(bundle)?;
    let z = inverse_normal_cdf(1.0 - alpha / 2.0);
    let lower = bundle
        .point
        .iter()
        .zip(&bundle.sigma)
        .map(|(p, s)| p - z * s)
        .collect();
    let upper = bundle
        .point
        .iter()
        .zip(&bundle.sigma)
        .map(|(p, s)| p + z * s)
        .collect();
    Ok(PredictionBand {
        lower,
        upper,
        method: Method::Skwf,
        alpha,
        k_allow: 0,
        meta: BandMeta {
            z: Some(z),
            warning: all_zero(&bundle.sigma).then(|| "bootstrap spread is zero".to_string()),
            ..BandMeta::default()
        },
    })
}

/// Band from the `alpha` and `1 - alpha` nearest-rank quantiles of the
/// detail residuals `D_b - D̂` and smooth residuals `S_b - Ŝ`.
pub fn pi_ns_kwf(bundle: &ForecastBundle, alpha: f64, mode: NsKwfMode) -> Result<PredictionBand> {
    check_alpha(alpha)?;
    check_bundle(bundle)?;
    let b = bundle.b();
    if alpha * (b as f64) < 1.0 - 1e-9 {
        return Err(KwfError::invalid(format!(
            "{b} bootstrap paths are too few for alpha = {alpha} (need alpha * B >= 1)"
        )));
    }
    if bundle.boot_smooth.len() != b || bundle.boot_detail.len() != b {
        return Err(KwfError::ShapeMismatch(
            "bundle lacks smooth/detail paths".into(),
        ));
    }
    let (lo_p, hi_p) = (alpha, 1.0 - alpha);
    let mut meta = BandMeta {
        quantile_ranks: Some((nearest_rank(lo_p, b), nearest_rank(hi_p, b))),
        ..BandMeta::default()
    };
    let h = bundle.h();
    let mut lower = Vec::with_capacity(h);
    let mut upper = Vec::with_capacity(h);
    let mut r = vec![0.0; b];
    let mut q = vec![0.0; b];
    for i in 0..h {
        for k in 0..b {
            r[k] = bundle.boot_detail[k][i] - bundle.detail_part[i];
            q[k] = bundle.boot_smooth[k][i] - bundle.smooth_part[i];
        }
        let (l, u) = match mode {
            NsKwfMode::Disconnected => {
                let mut rs = r.clone();
                rs.sort_by(f64::total_cmp);
                let mut qs = q.clone();
                qs.sort_by(f64::total_cmp);
                (
                    nearest_rank_sorted(&rs, lo_p) + nearest_rank_sorted(&qs, lo_p),
                    nearest_rank_sorted(&rs, hi_p) + nearest_rank_sorted(&qs, hi_p),
                )
            }
            NsKwfMode::Connected => {
                let pick = |p: f64, meta: &mut BandMeta| {
                    let v = nearest_rank_quantile(&r, p);
                    let mut at = r
                        .iter()
                        .enumerate()
                        .filter(|(_, x)| **x == v)
                        .map(|(k, _)| k);
                    let first = at.next().expect("quantile is a sample value");
                    if at.any(|k| q[k] != q[first]) {
                        meta.rank_ties += 1;
                    }
                    v + q[first]
                };
                let lo = pick(lo_p, &mut meta);
                let hi = pick(hi_p, &mut meta);
                if lo > hi {
                    meta.crossings += 1;
                    (hi, lo)
                } else {
                    (lo, hi)
                }
            }
        };
        lower.push(bundle.point[i] + l.min(u));
        upper.push(bundle.point[i] + u.max(l));
    }
    Ok(PredictionBand {
        lower,
        upper,
        method: Method::Nskwf,
        alpha,
        k_allow: 0,
        meta,
    })
}

/// Peels `floor(alpha * B)` extreme paths, one per round, and returns the
/// envelope of the survivors. Each round the candidates are the paths
/// attaining some instant's minimum or maximum; the one farthest (Euclidean)
/// from the point forecast goes, lowest index on ties.
pub fn pi_np(bundle: &ForecastBundle, alpha: f64) -> Result<PredictionBand> {
    check_alpha(alpha)?;
    check_bundle(bundle)?;
    let b = bundle.b();
    let removals = (alpha * b as f64 + 1e-9).floor() as usize;
    if removals >= b {
        return Err(KwfError::invalid(format!(
            "alpha = {alpha} would remove all {b} paths"
        )));
    }
    let h = bundle.h();
    let distance: Vec<f64> = bundle
        .boot_paths
        .iter()
        .map(|p| {
            p.iter()
                .zip(&bundle.point)
                .map(|(x, z)| (x - z) * (x - z))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mut alive = vec![true; b];
    let mut removed = Vec::with_capacity(removals);
    for _ in 0..removals {
        let mut extreme = vec![false; b];
        for i in 0..h {
            let (lo, hi) = alive_range(bundle, &alive, i);
            for k in (0..b).filter(|k| alive[*k]) {
                let v = bundle.boot_paths[k][i];
                if v == lo || v == hi {
                    extreme[k] = true;
                }
            }
        }
        let victim = (0..b)
            .filter(|k| extreme[*k])
            .fold(None::<usize>, |best, k| match best {
                Some(j) if distance[j] >= distance[k] => Some(j),
                _ => Some(k),
            })
            .expect("at least one survivor is extreme");
        alive[victim] = false;
        removed.push(victim);
    }
    let (lower, upper): (Vec<f64>, Vec<f64>) =
        (0..h).map(|i| alive_range(bundle, &alive, i)).unzip();
    Ok(PredictionBand {
        lower,
        upper,
        method: Method::Np,
        alpha,
        k_allow: 0,
        meta: BandMeta {
            removed,
            ..BandMeta::default()
        },
    })
}

fn alive_range(bundle: &ForecastBundle, alive: &[bool], i: usize) -> (f64, f64) {
    bundle
        .boot_paths
        .iter()
        .zip(alive)
        .filter(|(_, a)| **a)
        .map(|(p, _)| p[i])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

/// `k`-th largest absolute standardized residual of each path. Instants
/// with zero spread contribute 0.
pub fn k_max_statistics(bundle: &ForecastBundle, k: usize) -> Vec<f64> {
    bundle
        .boot_paths
        .iter()
        .map(|path| {
            let mut s: Vec<f64> = path
                .iter()
                .zip(&bundle.point)
                .zip(&bundle.sigma)
                .map(|((x, z), sd)| if *sd > 0.0 { ((x - z) / sd).abs() } else { 0.0 })
                .collect();
            s.sort_by(|a, b| b.total_cmp(a));
            s[k - 1]
        })
        .collect()
}

/// `point ± d_max sigma`, where `d_max` is the `1 - alpha` nearest-rank
/// quantile of the per-path `k`-th largest standardized residual.
pub fn pi_kfwe(bundle: &ForecastBundle, alpha: f64, k: usize) -> Result<PredictionBand> {
    check_alpha(alpha)?;
    check_bundle(bundle)?;
    let h = bundle.h();
    if k == 0 || k > h {
        return Err(KwfError::invalid(format!("k must lie in 1..={h}, got {k}")));
    }
    let b = bundle.b();
    let mut meta = BandMeta {
        quantile_ranks: Some((nearest_rank(1.0 - alpha, b), nearest_rank(1.0 - alpha, b))),
        ..BandMeta::default()
    };
    let d_max = if all_zero(&bundle.sigma) {
        meta.warning = Some("bootstrap spread is zero".into());
        0.0
    } else {
        nearest_rank_quantile(&k_max_statistics(bundle, k), 1.0 - alpha)
    };
    meta.d_max = Some(d_max);
    let lower = bundle
        .point
        .iter()
        .zip(&bundle.sigma)
        .map(|(p, s)| p - d_max * s)
        .collect();
    let upper = bundle
        .point
        .iter()
        .zip(&bundle.sigma)
        .map(|(p, s)| p + d_max * s)
        .collect();
    Ok(PredictionBand {
        lower,
        upper,
        method: Method::Kfwe,
        alpha,
        k_allow: k,
        meta,
    })
}

/// Per-method options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalSettings {
    pub nskwf_mode: NsKwfMode,
    pub kfwe_k: usize,
}

impl Default for IntervalSettings {
    fn default() -> Self {
        IntervalSettings {
            nskwf_mode: NsKwfMode::Disconnected,
            kfwe_k: 2,
        }
    }
}

pub fn build_band(
    bundle: &ForecastBundle,
    method: Method,
    alpha: f64,
    settings: &IntervalSettings,
) -> Result<PredictionBand> {
    match method {
        Method::Skwf => pi_s_kwf(bundle, alpha),
        Method::Nskwf => pi_ns_kwf(bundle, alpha, settings.nskwf_mode),
        Method::Np => pi_np(bundle, alpha),
        Method::Kfwe => pi_kfwe(bundle, alpha, settings.kfwe_k),
    }
}
