#![allow(clippy::needless_range_loop)]

mod common;

use kwf::forecast::{
    draw_bootstrap, forecast_corrected, forecast_next, forecast_stationary, pointwise_sigma,
    select_weights, Correction, ForecastSettings,
};
use kwf::similarity::{KernelSpec, WeightVector};
use rand::Rng;

fn weights(w: &[f64]) -> WeightVector {
    WeightVector {
        weights: w.to_vec(),
        bandwidth_used: 1.0,
        filtered: false,
    }
}

fn random_rows(seed: u64, days: usize) -> Vec<Vec<f64>> {
    let mut r = common::rng(seed);
    (0..days).map(|_| common::random_vec(&mut r, 48)).collect()
}

#[test]
fn single_atom_reproduces_the_successor() {
    let rows = random_rows(1, 6);
    let a = common::analyzed(common::series_from_rows(rows.clone()));
    for m in 0..4 {
        let mut w = vec![0.0; 4];
        w[m] = 1.0;
        let fc = forecast_stationary(&a, 5, &weights(&w)).unwrap();
        for (p, y) in fc.point.iter().zip(&rows[m + 1]) {
            assert!((p - y).abs() < 1e-9);
        }
    }
}

#[test]
fn forecast_is_linear_in_the_signal_domain() {
    for seed in 0..20 {
        let rows = random_rows(100 + seed, 4);
        let a = common::analyzed(common::series_from_rows(rows.clone()));
        let mut r = common::rng(seed);
        let raw: Vec<f64> = (0..3).map(|_| r.gen_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let fc = forecast_stationary(&a, 4, &weights(&w)).unwrap();
        for i in 0..48 {
            let brute: f64 = (0..3).map(|m| w[m] * rows[m + 1][i]).sum();
            assert!((fc.point[i] - brute).abs() < 1e-9);
            assert!((fc.smooth[i] + fc.detail[i] - fc.point[i]).abs() < 1e-9);
        }
    }
}

#[test]
fn identical_successors() {
    let a = common::analyzed(common::series_from_levels(&[5.0; 8], 48));
    let fc = forecast_stationary(&a, 8, &weights(&[1.0 / 7.0; 7])).unwrap();
    for (p, y) in fc.point.iter().zip(&a.series().segments()[0].values) {
        assert!((p - y).abs() < 1e-9);
    }
    // zero increments: the corrected level is the last level
    let fc = forecast_corrected(&a, 8, &weights(&[1.0 / 7.0; 7])).unwrap();
    for (s, last) in fc.smooth.iter().zip(a.smooth(7)) {
        assert!((s - last).abs() < 1e-9);
    }
}

#[test]
fn linear_trend_is_extrapolated_for_any_weights() {
    let slope = 3.0;
    let levels: Vec<f64> = (0..20).map(|d| 100.0 + slope * d as f64).collect();
    let a = common::analyzed(common::series_from_levels(&levels, 48));
    let mut r = common::rng(4);
    for _ in 0..10 {
        let raw: Vec<f64> = (0..18).map(|_| r.gen_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let fc = forecast_corrected(&a, 19, &weights(&w)).unwrap();
        for (s, last) in fc.smooth.iter().zip(a.smooth(18)) {
            assert!((s - last - slope).abs() < 1e-8);
        }
    }
    assert!(forecast_corrected(&a, 2, &weights(&[1.0])).is_err());
}

#[test]
fn correction_beats_stationary_on_a_trended_fixture() {
    let cfg = kwf::data::SyntheticConfig {
        trend_slope: 20.0,
        annual_amplitude: 0.0,
        noise_sd: 0.0,
        ..kwf::data::SyntheticConfig::load_like(120, 48, 1)
    };
    let a = common::analyzed(kwf::data::generate_synthetic(&cfg).unwrap());
    let spec = KernelSpec::gaussian(50.0).unwrap();
    let mut worse = 0;
    for n in 60..120 {
        let (w, _) = select_weights(&a, n, &spec, 0, true).unwrap();
        let actual = &a.series().segments()[n].values;
        let err = |p: &[f64]| (p.iter().zip(actual).map(|(x, y)| x - y).sum::<f64>() / 48.0).abs();
        let c = err(&forecast_corrected(&a, n, &w).unwrap().point);
        let s = err(&forecast_stationary(&a, n, &w).unwrap().point);
        if c >= s {
            worse += 1;
        }
    }
    assert_eq!(worse, 0);
}

#[test]
fn point_mass_bootstrap() {
    let rows = random_rows(9, 5);
    let a = common::analyzed(common::series_from_rows(rows.clone()));
    let boot = draw_bootstrap(
        &a,
        5,
        &weights(&[0.0, 0.0, 1.0, 0.0]),
        50,
        1,
        Correction::None,
    )
    .unwrap();
    assert!(boot.paths.iter().all(|p| p == &rows[3]));
    assert!(pointwise_sigma(&boot.paths)
        .values
        .iter()
        .all(|s| *s == 0.0));
}

#[test]
fn bootstrap_frequencies_and_two_atom_sigma() {
    let rows = random_rows(10, 4);
    let a = common::analyzed(common::series_from_rows(rows.clone()));
    let w = weights(&[0.5, 0.5, 0.0]);
    let boot = draw_bootstrap(&a, 4, &w, 10_000, 12345, Correction::None).unwrap();
    let share = boot.sources.iter().filter(|m| **m == 0).count() as f64 / 10_000.0;
    assert!((share - 0.5).abs() <= 0.02, "{share}");
    assert!(boot.sources.iter().all(|m| *m < 2));

    let sigma = pointwise_sigma(&boot.paths);
    for i in 0..48 {
        let exact = (rows[1][i] - rows[2][i]).abs() / 2.0;
        assert!(
            (sigma.values[i] - exact).abs() <= 0.05 * exact,
            "instant {i}"
        );
    }

    let again = draw_bootstrap(&a, 4, &w, 10_000, 12345, Correction::None).unwrap();
    assert_eq!(boot, again);
}

#[test]
fn sigma_of_two_paths() {
    let mut p = vec![vec![0.0; 4], vec![0.0; 4]];
    p[1][2] = 2.0;
    let s = pointwise_sigma(&p);
    assert_eq!(s.values[0], 0.0);
    assert!((s.values[2] - 2f64.sqrt()).abs() < 1e-15);
    assert!(pointwise_sigma(&p[..1]).degenerate);
}

#[test]
fn corrected_bootstrap_is_centred_on_the_last_level() {
    let levels: Vec<f64> = (0..30).map(|d| 1000.0 + 10.0 * d as f64).collect();
    let a = common::analyzed(common::series_from_levels(&levels, 48));
    let settings = ForecastSettings {
        correction: Correction::Increment,
        group_filter: false,
        ..ForecastSettings::default()
    };
    let bundle = forecast_next(&a, 29, &settings, 5.0).unwrap();
    for path in &bundle.boot_paths {
        for (p, y) in path.iter().zip(&a.series().segments()[29].values) {
            assert!((p - y).abs() < 1e-8);
        }
    }
}

#[test]
fn forecast_next_uses_only_the_past() {
    let a = common::analyzed(common::periodic_series(40));
    let bundle = forecast_next(&a, 30, &ForecastSettings::default(), 100.0).unwrap();
    assert_eq!(bundle.last_used_date, a.series().segments()[29].date);
    assert_eq!(bundle.target_date, a.series().segments()[30].date);
    assert_eq!(bundle.weights.len(), 29);
    assert!(bundle.boot_sources.iter().all(|m| m + 1 < 30));
    // periodic, filtered: the forecast repeats last week's same day
    for (p, y) in bundle.point.iter().zip(&a.series().segments()[30].values) {
        assert!((p - y).abs() < 1e-6);
    }
}
