mod common;

use kwf::data::{generate_synthetic, SyntheticConfig};
use kwf::eval::{
    backtest, by_hour_profiles, curvewise_coverage, evaluate, mean_amplitude, mean_coverage,
    read_per_day, write_per_day, BacktestConfig, BacktestResult, BandwidthPolicy, DayResult,
};
use kwf::forecast::{Correction, ForecastSettings};
use kwf::intervals::{BandMeta, Method, PredictionBand};

fn noisy_backtest(test_start_index: usize) -> BacktestResult {
    let series = generate_synthetic(&SyntheticConfig::load_like(84, 48, 8)).unwrap();
    let start = series.segments()[test_start_index].date;
    let a = common::analyzed(series);
    let cfg = BacktestConfig {
        forecast: ForecastSettings {
            correction: Correction::Increment,
            seed: 21,
            ..ForecastSettings::default()
        },
        ..BacktestConfig::default()
    };
    backtest(&a, start, &cfg).unwrap()
}

#[test]
fn later_start_drops_only_the_first_day() {
    let early = noisy_backtest(63);
    let late = noisy_backtest(64);
    assert_eq!(early.per_day.len(), late.per_day.len() + 1);
    assert_eq!(early.per_day[1..], late.per_day[..]);
}

#[test]
fn one_day_test_period() {
    let series = common::periodic_series(40);
    let start = series.segments()[39].date;
    let a = common::analyzed(series);
    let cfg = BacktestConfig {
        bandwidth: BandwidthPolicy::Fixed(200.0),
        ..BacktestConfig::default()
    };
    let r = backtest(&a, start, &cfg).unwrap();
    assert_eq!(r.per_day.len(), 1);
    assert_eq!(r.per_day[0].bands.len(), 4 * 3);
}

#[test]
fn noiseless_periodic_series_is_forecast_exactly() {
    let series = common::periodic_series(70);
    let start = series.segments()[35].date;
    let scale = series.flatten().iter().map(|v| v.abs()).fold(0.0, f64::max);
    let a = common::analyzed(series);
    let r = backtest(&a, start, &BacktestConfig::default()).unwrap();
    for day in &r.per_day {
        let actual = day.actual.as_ref().unwrap();
        let err = day
            .point
            .iter()
            .zip(actual)
            .map(|(p, y)| (p - y).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6 * scale, "{}: {err}", day.date);
    }
}

#[test]
fn metrics_match_recomputation() {
    let r = noisy_backtest(56);
    for m in Method::ALL {
        for alpha in [0.2, 0.05] {
            let (mut width, mut hit, mut cells) = (0.0, 0usize, 0usize);
            let mut per_day_misses = Vec::new();
            let mut amp_h = vec![0.0; 48];
            for day in &r.per_day {
                let band = day
                    .bands
                    .iter()
                    .find(|b| b.method == m && b.alpha == alpha)
                    .unwrap();
                let actual = day.actual.as_ref().unwrap();
                let mut misses = 0;
                for i in 0..48 {
                    width += band.upper[i] - band.lower[i];
                    amp_h[i] += band.upper[i] - band.lower[i];
                    cells += 1;
                    if band.lower[i] <= actual[i] && actual[i] <= band.upper[i] {
                        hit += 1;
                    } else {
                        misses += 1;
                    }
                }
                per_day_misses.push(misses);
            }
            let days = r.per_day.len() as f64;
            assert!((mean_amplitude(&r, m, alpha).unwrap() - width / cells as f64).abs() < 1e-9);
            assert!(
                (mean_coverage(&r, m, alpha).unwrap() - 100.0 * hit as f64 / cells as f64).abs()
                    < 1e-9
            );
            let mut last = 0.0;
            for k in 0..=48 {
                let expected =
                    100.0 * per_day_misses.iter().filter(|x| **x <= k).count() as f64 / days;
                let got = curvewise_coverage(&r, m, alpha, k).unwrap();
                assert!((got - expected).abs() < 1e-9);
                assert!(got >= last);
                last = got;
            }
            assert_eq!(last, 100.0);
            let (amp, _) = by_hour_profiles(&r, m, alpha).unwrap();
            for i in 0..48 {
                assert!((amp[i] - amp_h[i] / days).abs() < 1e-9);
            }
            let avg = amp.iter().sum::<f64>() / 48.0;
            assert!((avg - mean_amplitude(&r, m, alpha).unwrap()).abs() < 1e-9);
        }
    }
}

fn hand_day(lower: Vec<f64>, upper: Vec<f64>, actual: Vec<f64>) -> BacktestResult {
    let h = actual.len();
    BacktestResult {
        per_day: vec![DayResult {
            date: common::start(),
            actual: Some(actual),
            point: vec![0.0; h],
            bands: vec![PredictionBand {
                lower,
                upper,
                method: Method::Skwf,
                alpha: 0.1,
                k_allow: 0,
                meta: BandMeta::default(),
            }],
            bandwidth: None,
            last_used_date: None,
            weight_source: None,
        }],
        methods: vec![Method::Skwf],
        alpha_levels: vec![0.1],
        h,
    }
}

#[test]
fn hand_built_coverage() {
    let actual: Vec<f64> = (0..48)
        .map(|i| if i % 2 == 0 { 0.5 } else { 2.0 })
        .collect();
    let r = hand_day(vec![0.0; 48], vec![1.0; 48], actual);
    assert_eq!(mean_coverage(&r, Method::Skwf, 0.1).unwrap(), 50.0);
    assert_eq!(curvewise_coverage(&r, Method::Skwf, 0.1, 23).unwrap(), 0.0);
    assert_eq!(
        curvewise_coverage(&r, Method::Skwf, 0.1, 24).unwrap(),
        100.0
    );
    assert_eq!(mean_amplitude(&r, Method::Skwf, 0.1).unwrap(), 1.0);

    let boundary = hand_day(vec![0.0; 48], vec![1.0; 48], vec![1.0; 48]);
    assert_eq!(mean_coverage(&boundary, Method::Skwf, 0.1).unwrap(), 100.0);
    let off = hand_day(vec![0.0; 48], vec![0.0; 48], vec![3.0; 48]);
    assert_eq!(mean_coverage(&off, Method::Skwf, 0.1).unwrap(), 0.0);
    let huge = hand_day(vec![-1e300; 48], vec![1e300; 48], vec![3.0; 48]);
    assert_eq!(mean_coverage(&huge, Method::Skwf, 0.1).unwrap(), 100.0);
}

#[test]
fn per_day_dump_round_trips_the_report() {
    let r = noisy_backtest(60);
    let mut buf = Vec::new();
    write_per_day(&r, &mut buf).unwrap();
    let back = read_per_day(buf.as_slice()).unwrap();
    assert_eq!(back.per_day.len(), r.per_day.len());
    let (a, b) = (
        evaluate(&r, 0.05, &[0, 1, 2, 3]).unwrap(),
        evaluate(&back, 0.05, &[0, 1, 2, 3]).unwrap(),
    );
    assert_eq!(a.curvewise, b.curvewise);
    for (x, y) in a
        .mean_amplitude
        .iter()
        .flatten()
        .zip(b.mean_amplitude.iter().flatten())
    {
        assert!((x - y).abs() <= 1e-12 * x.abs());
    }
}

#[test]
fn too_little_history_is_rejected() {
    let series = common::periodic_series(40);
    let start = series.segments()[10].date;
    let a = common::analyzed(series);
    assert!(matches!(
        backtest(&a, start, &BacktestConfig::default()),
        Err(kwf::KwfError::InsufficientHistory { .. })
    ));
}
