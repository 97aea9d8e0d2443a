//! Flat key-value run configuration (TOML syntax).
//!
//! ```toml
//! synthetic_config = "synthetic.toml"   # or: input = "load.csv"
//! wavelet = "sym6"
//! kernel = "gaussian"
//! bandwidth_grid = [50.0, 100.0, 200.0] # or: bandwidth = 120.0
//! calibration_window = 28
//! j0 = 0
//! group_scheme = "dow"                  # dow | wss | map (with group_map = "groups.csv")
//! correction = "increment"
//! group_filter = "on"
//! B = 100
//! seed = 7
//! methods = ["skwf", "nskwf", "np", "kfwe"]
//! alpha_levels = [0.20, 0.10, 0.05]
//! kfwe_k = 2
//! test_start = "2006-09-01"
//! output_dir = "out"
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;

use crate::data::{generate_synthetic, read_csv, GroupScheme, SegmentSeries, SyntheticConfig};
use crate::error::{KwfError, Result};
use crate::eval::{BacktestConfig, BandwidthPolicy};
use crate::forecast::{Correction, ForecastSettings};
use crate::intervals::{IntervalSettings, Method, NsKwfMode};
use crate::similarity::KernelFamily;
use crate::wavelet::WaveletBasis;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    input: Option<PathBuf>,
    synthetic_config: Option<PathBuf>,
    wavelet: Option<String>,
    wavelet_levels: Option<usize>,
    kernel: Option<String>,
    bandwidth: Option<f64>,
    bandwidth_grid: Option<Vec<f64>>,
    calibration_window: Option<usize>,
    calibration_cadence: Option<usize>,
    j0: Option<usize>,
    group_scheme: Option<String>,
    group_map: Option<PathBuf>,
    correction: Option<String>,
    group_filter: Option<String>,
    #[serde(rename = "B")]
    b: Option<usize>,
    seed: Option<u64>,
    methods: Option<Vec<String>>,
    alpha_levels: Option<Vec<f64>>,
    kfwe_k: Option<usize>,
    nskwf_mode: Option<String>,
    test_start: Option<NaiveDate>,
    test_days: Option<usize>,
    output_dir: Option<PathBuf>,
    profile_alpha: Option<f64>,
    curvewise_k: Option<Vec<usize>>,
    dump_per_day: Option<bool>,
}

/// Where the series comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Csv(PathBuf),
    Synthetic(SyntheticConfig),
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: DataSource,
    pub basis: WaveletBasis,
    pub group_scheme: GroupScheme,
    pub backtest: BacktestConfig,
    pub test_start: Option<NaiveDate>,
    pub output_dir: PathBuf,
    pub profile_alpha: f64,
    pub curvewise_k: Vec<usize>,
    pub dump_per_day: bool,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn existing(base: &Path, p: &Path, key: &str) -> Result<PathBuf> {
    let full = resolve(base, p);
    if !full.is_file() {
        return Err(KwfError::Config(format!(
            "{key}: {} does not exist",
            full.display()
        )));
    }
    Ok(full)
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KwfError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, base)
    }

    pub fn from_toml_str(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| KwfError::Config(e.to_string()))?;

        let source = match (&raw.input, &raw.synthetic_config) {
            (Some(p), None) => DataSource::Csv(existing(base, p, "input")?),
            (None, Some(p)) => DataSource::Synthetic(SyntheticConfig::from_file(&existing(
                base,
                p,
                "synthetic_config",
            )?)?),
            _ => {
                return Err(KwfError::Config(
                    "set exactly one of `input` and `synthetic_config`".into(),
                ))
            }
        };

        let basis = WaveletBasis::by_name(raw.wavelet.as_deref().unwrap_or("sym6"))?
            .with_max_levels(raw.wavelet_levels);

        let group_scheme = match raw.group_scheme.as_deref().unwrap_or("dow") {
            "dow" => GroupScheme::DayOfWeek,
            "wss" => GroupScheme::WeekdaySatSun,
            "map" => {
                let p = raw.group_map.as_ref().ok_or_else(|| {
                    KwfError::Config("group_scheme = \"map\" needs group_map".into())
                })?;
                GroupScheme::from_map_file(&existing(base, p, "group_map")?)?
            }
            other => return Err(KwfError::Config(format!("unknown group_scheme `{other}`"))),
        };

        let bandwidth = match (raw.bandwidth, raw.bandwidth_grid) {
            (Some(_), Some(_)) => {
                return Err(KwfError::Config(
                    "set at most one of `bandwidth` and `bandwidth_grid`".into(),
                ))
            }
            (Some(h), None) => {
                if !(h > 0.0 && h.is_finite()) {
                    return Err(KwfError::Config(format!(
                        "bandwidth must be positive, got {h}"
                    )));
                }
                BandwidthPolicy::Fixed(h)
            }
            (None, grid) => {
                if let Some(g) = &grid {
                    if g.is_empty() || g.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
                        return Err(KwfError::Config(
                            "bandwidth_grid needs positive values".into(),
                        ));
                    }
                }
                BandwidthPolicy::Calibrated {
                    grid,
                    window: raw.calibration_window.unwrap_or(28),
                    cadence: raw.calibration_cadence.unwrap_or(7),
                }
            }
        };
        if let BandwidthPolicy::Calibrated {
            window, cadence, ..
        } = &bandwidth
        {
            if *window == 0 || *cadence == 0 {
                return Err(KwfError::Config(
                    "calibration_window and calibration_cadence must be positive".into(),
                ));
            }
        }

        let group_filter = match raw.group_filter.as_deref().unwrap_or("on") {
            "on" => true,
            "off" => false,
            other => {
                return Err(KwfError::Config(format!(
                    "group_filter must be on or off, got `{other}`"
                )))
            }
        };
        let b = raw.b.unwrap_or(100);
        if b == 0 {
            return Err(KwfError::Config("B must be at least 1".into()));
        }
        let forecast = ForecastSettings {
            family: KernelFamily::parse(raw.kernel.as_deref().unwrap_or("gaussian"))?,
            j0: raw.j0.unwrap_or(0),
            correction: Correction::parse(raw.correction.as_deref().unwrap_or("none"))?,
            group_filter,
            bootstrap_size: b,
            seed: raw.seed.unwrap_or(0),
        };

        let methods = match raw.methods {
            Some(names) => names
                .iter()
                .map(|n| n.parse())
                .collect::<Result<Vec<Method>>>()?,
            None => Method::ALL.to_vec(),
        };
        if methods.is_empty() {
            return Err(KwfError::Config("methods must not be empty".into()));
        }
        let alpha_levels = raw.alpha_levels.unwrap_or_else(|| vec![0.20, 0.10, 0.05]);
        if alpha_levels.is_empty() || alpha_levels.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(KwfError::Config(
                "alpha_levels must be non-empty and inside (0, 1)".into(),
            ));
        }
        let kfwe_k = raw.kfwe_k.unwrap_or(2);
        if kfwe_k == 0 {
            return Err(KwfError::Config("kfwe_k must be at least 1".into()));
        }
        let intervals = IntervalSettings {
            nskwf_mode: NsKwfMode::parse(raw.nskwf_mode.as_deref().unwrap_or("disconnected"))?,
            kfwe_k,
        };
        let profile_alpha = raw
            .profile_alpha
            .unwrap_or_else(|| alpha_levels.iter().copied().fold(f64::INFINITY, f64::min));
        if !alpha_levels
            .iter()
            .any(|a| (a - profile_alpha).abs() <= 1e-12)
        {
            return Err(KwfError::Config(format!(
                "profile_alpha {profile_alpha} is not in alpha_levels"
            )));
        }

        Ok(RunConfig {
            source,
            basis,
            group_scheme,
            backtest: BacktestConfig {
                forecast,
                bandwidth,
                methods,
                alpha_levels,
                intervals,
                test_days: raw.test_days,
            },
            test_start: raw.test_start,
            output_dir: resolve(
                base,
                &raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            ),
            profile_alpha,
            curvewise_k: raw.curvewise_k.unwrap_or_else(|| vec![0, 1, 2, 3]),
            dump_per_day: raw.dump_per_day.unwrap_or(true),
        })
    }

    /// Loads or generates the series and labels it under the configured
    /// scheme.
    pub fn load_series(&self) -> Result<SegmentSeries> {
        match &self.source {
            DataSource::Csv(path) => read_csv(std::fs::File::open(path)?, &self.group_scheme),
            DataSource::Synthetic(cfg) => generate_synthetic(cfg)?.regroup(&self.group_scheme),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir_with_synthetic() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SyntheticConfig::load_like(60, 48, 1);
        std::fs::write(dir.path().join("syn.toml"), toml::to_string(&cfg).unwrap()).unwrap();
        dir
    }

    #[test]
    fn defaults() {
        let dir = dir_with_synthetic();
        let cfg = RunConfig::from_toml_str("synthetic_config = \"syn.toml\"", dir.path()).unwrap();
        assert_eq!(cfg.backtest.methods, Method::ALL.to_vec());
        assert_eq!(cfg.backtest.alpha_levels, vec![0.2, 0.1, 0.05]);
        assert_eq!(cfg.backtest.forecast.bootstrap_size, 100);
        assert_eq!(cfg.backtest.intervals.kfwe_k, 2);
        assert_eq!(cfg.profile_alpha, 0.05);
        assert_eq!(cfg.basis.name(), "sym6");
        assert_eq!(cfg.load_series().unwrap().len(), 60);
    }

    #[test]
    fn rejects_bad_values() {
        let dir = dir_with_synthetic();
        let base = "synthetic_config = \"syn.toml\"\n";
        for extra in [
            "alpha_levels = [1.5]",
            "methods = []",
            "methods = [\"bonferroni\"]",
            "bandwidth = -1.0",
            "bandwidth = 1.0\nbandwidth_grid = [1.0]",
            "group_filter = \"maybe\"",
            "mystery_key = 1",
            "B = 0",
        ] {
            assert!(
                RunConfig::from_toml_str(&format!("{base}{extra}"), dir.path()).is_err(),
                "{extra}"
            );
        }
        assert!(RunConfig::from_toml_str("input = \"missing.csv\"", dir.path()).is_err());
        assert!(RunConfig::from_toml_str("", dir.path()).is_err());
    }
}
