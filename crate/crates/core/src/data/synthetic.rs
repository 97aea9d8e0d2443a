use std::f64::consts::PI;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{GroupScheme, Segment, SegmentSeries};
use crate::error::{KwfError, Result};

/// Additive load-like generator: linear trend, annual cosine, weekly level,
/// per-day-type daily shape and Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n_days: usize,
    #[serde(rename = "H")]
    pub h: usize,
    #[serde(default)]
    pub trend_slope: f64,
    #[serde(default)]
    pub annual_amplitude: f64,
    /// Base level per day of week, Monday first.
    pub weekly_profile: [f64; 7],
    /// One row of `H` values shared by all days, three rows
    /// (weekday, Saturday, Sunday) or seven rows (Monday..Sunday).
    pub daily_shapes: Vec<Vec<f64>>,
    #[serde(default)]
    pub noise_sd: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_start")]
    pub start_date: NaiveDate,
}

fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2005, 1, 3).expect("valid date")
}

impl SyntheticConfig {
    /// A French-load-flavoured default: night trough, morning ramp, evening
    /// peak, lower and flatter weekends.
    pub fn load_like(n_days: usize, h: usize, seed: u64) -> Self {
        let shape = |peak: f64, morning: f64| -> Vec<f64> {
            (0..h)
                .map(|i| {
                    let t = 24.0 * i as f64 / h as f64;
                    let night = -3000.0 * (-((t - 4.0) / 2.5).powi(2)).exp();
                    let am = morning * (1.0 / (1.0 + (-(t - 7.5) * 1.5).exp()) - 0.5);
                    let pm = peak * (-((t - 19.0) / 1.8).powi(2)).exp();
                    let lunch = 0.3 * peak * (-((t - 12.5) / 1.2).powi(2)).exp();
                    night + am + pm + lunch
                })
                .collect()
        };
        SyntheticConfig {
            n_days,
            h,
            trend_slope: 0.5,
            annual_amplitude: 3000.0,
            weekly_profile: [
                50_000.0, 50_300.0, 50_300.0, 50_300.0, 50_100.0, 47_000.0, 45_500.0,
            ],
            daily_shapes: vec![
                shape(4000.0, 6000.0),
                shape(3800.0, 6000.0),
                shape(3800.0, 6000.0),
                shape(3800.0, 6000.0),
                shape(3500.0, 5800.0),
                shape(3000.0, 3000.0),
                shape(3200.0, 2000.0),
            ],
            noise_sd: 400.0,
            seed,
            start_date: default_start(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SyntheticConfig =
            toml::from_str(text).map_err(|e| KwfError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KwfError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_days < 14 {
            return Err(KwfError::Config(format!(
                "n_days must be at least 14, got {}",
                self.n_days
            )));
        }
        if self.h == 0 {
            return Err(KwfError::Config("H must be positive".into()));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(KwfError::Config("noise_sd must be finite and >= 0".into()));
        }
        if ![1, 3, 7].contains(&self.daily_shapes.len()) {
            return Err(KwfError::Config(format!(
                "daily_shapes needs 1, 3 or 7 rows, got {}",
                self.daily_shapes.len()
            )));
        }
        if let Some(row) = self.daily_shapes.iter().position(|r| r.len() != self.h) {
            return Err(KwfError::Config(format!(
                "daily_shapes row {row} has {} values, expected H = {}",
                self.daily_shapes[row].len(),
                self.h
            )));
        }
        Ok(())
    }

    fn shape_row(&self, date: NaiveDate) -> &[f64] {
        let dow = date.weekday().num_days_from_monday() as usize;
        let row = match self.daily_shapes.len() {
            7 => dow,
            3 => match dow {
                5 => 1,
                6 => 2,
                _ => 0,
            },
            _ => 0,
        };
        &self.daily_shapes[row]
    }
}

/// Generates `n_days` segments, labelled by day of week. Identical configs
/// give bit-identical output.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<SegmentSeries> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = Normal::new(0.0, cfg.noise_sd).map_err(|e| KwfError::Config(e.to_string()))?;
    let scheme = GroupScheme::DayOfWeek;
    let mut segments = Vec::with_capacity(cfg.n_days);
    for (d, date) in cfg.start_date.iter_days().take(cfg.n_days).enumerate() {
        let day = d as f64;
        let dow = date.weekday().num_days_from_monday() as usize;
        let level = cfg.trend_slope * day
            + cfg.annual_amplitude * (2.0 * PI * day / 365.25).cos()
            + cfg.weekly_profile[dow];
        let values = cfg
            .shape_row(date)
            .iter()
            .map(|s| {
                let eps = if cfg.noise_sd > 0.0 {
                    noise.sample(&mut rng)
                } else {
                    0.0
                };
                level + s + eps
            })
            .collect();
        segments.push(Segment {
            values,
            date,
            group: scheme.group_of(date)?,
        });
    }
    SegmentSeries::new(segments, cfg.h)
}
