#![allow(dead_code)]

use chrono::NaiveDate;
use kwf::data::{generate_synthetic, Segment, SegmentSeries, SyntheticConfig};
use kwf::forecast::{AnalyzedSeries, BootstrapPaths, ForecastBundle};
use kwf::wavelet::WaveletBasis;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect()
}

pub fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2005, 1, 3).unwrap()
}

/// Noiseless series: a single daily shape plus a per-day level.
pub fn series_from_levels(levels: &[f64], h: usize) -> SegmentSeries {
    let shape: Vec<f64> = (0..h)
        .map(|i| 100.0 * (2.0 * std::f64::consts::PI * i as f64 / h as f64).sin())
        .collect();
    let segments = levels
        .iter()
        .zip(start().iter_days())
        .map(|(l, date)| Segment {
            values: shape.iter().map(|s| l + s).collect(),
            date,
            group: kwf::data::GroupScheme::DayOfWeek.group_of(date).unwrap(),
        })
        .collect();
    SegmentSeries::new(segments, h).unwrap()
}

/// Series whose days are the given rows, labelled by day of week.
pub fn series_from_rows(rows: Vec<Vec<f64>>) -> SegmentSeries {
    let h = rows[0].len();
    let segments = rows
        .into_iter()
        .zip(start().iter_days())
        .map(|(values, date)| Segment {
            values,
            date,
            group: kwf::data::GroupScheme::DayOfWeek.group_of(date).unwrap(),
        })
        .collect();
    SegmentSeries::new(segments, h).unwrap()
}

pub fn analyzed(series: SegmentSeries) -> AnalyzedSeries {
    AnalyzedSeries::new(series, WaveletBasis::sym6()).unwrap()
}

/// Noiseless, trendless load-like series: every weekday repeats exactly.
pub fn periodic_config(n_days: usize) -> SyntheticConfig {
    SyntheticConfig {
        trend_slope: 0.0,
        annual_amplitude: 0.0,
        noise_sd: 0.0,
        ..SyntheticConfig::load_like(n_days, 48, 1)
    }
}

pub fn periodic_series(n_days: usize) -> SegmentSeries {
    generate_synthetic(&periodic_config(n_days)).unwrap()
}

/// Random bundle with independent smooth and detail paths.
pub fn random_bundle(seed: u64, h: usize, b: usize) -> ForecastBundle {
    let mut r = rng(seed);
    let smooth: Vec<Vec<f64>> = (0..b)
        .map(|_| {
            let lvl = r.gen_range(-5.0..5.0);
            (0..h).map(|_| lvl + r.gen_range(-0.5..0.5)).collect()
        })
        .collect();
    let detail: Vec<Vec<f64>> = (0..b).map(|_| random_vec(&mut r, h)).collect();
    let paths: Vec<Vec<f64>> = smooth
        .iter()
        .zip(&detail)
        .map(|(s, d)| s.iter().zip(d).map(|(a, b)| a + b).collect())
        .collect();
    let mean = |rows: &[Vec<f64>]| -> Vec<f64> {
        (0..h)
            .map(|i| rows.iter().map(|p| p[i]).sum::<f64>() / b as f64)
            .collect()
    };
    let (sm, dm) = (mean(&smooth), mean(&detail));
    let point = sm.iter().zip(&dm).map(|(a, b)| a + b).collect();
    ForecastBundle::from_paths(
        point,
        sm,
        dm,
        BootstrapPaths {
            paths,
            smooth,
            detail,
            sources: (0..b).collect(),
        },
    )
}
