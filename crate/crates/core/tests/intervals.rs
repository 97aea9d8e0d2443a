mod common;

use kwf::forecast::ForecastBundle;
use kwf::intervals::{
    build_band, pi_kfwe, pi_np, pi_ns_kwf, pi_s_kwf, IntervalSettings, Method, NsKwfMode,
};
use kwf::quantile::inverse_normal_cdf;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

#[test]
fn inverse_normal_matches_statrs() {
    let n = Normal::new(0.0, 1.0).unwrap();
    for i in 1..2000 {
        let p = i as f64 / 2000.0;
        let (ours, theirs) = (inverse_normal_cdf(p), n.inverse_cdf(p));
        assert!(
            (ours - theirs).abs() <= 1e-9 * theirs.abs().max(1.0),
            "p = {p}"
        );
    }
    for p in [1e-10, 1e-6, 0.999_999] {
        assert!((inverse_normal_cdf(p) - n.inverse_cdf(p)).abs() < 1e-8);
    }
}

#[test]
fn s_kwf_examples() {
    let mut b = common::random_bundle(1, 4, 20);
    b.point = vec![100.0; 4];
    b.sigma = vec![10.0, 0.0, 10.0, 10.0];
    let band = pi_s_kwf(&b, 0.05).unwrap();
    assert!((band.meta.z.unwrap() - 1.95996).abs() < 1e-4);
    assert!((band.lower[0] - 80.40).abs() < 0.01 && (band.upper[0] - 119.60).abs() < 0.01);
    assert_eq!((band.lower[1], band.upper[1]), (100.0, 100.0));
}

fn flat_bundle(h: usize, b: usize) -> ForecastBundle {
    let mut bundle = common::random_bundle(3, h, b);
    let point = bundle.point.clone();
    bundle.boot_paths = vec![point.clone(); b];
    bundle.boot_smooth = vec![bundle.smooth_part.clone(); b];
    bundle.boot_detail = vec![bundle.detail_part.clone(); b];
    bundle.sigma = vec![0.0; h];
    bundle
}

#[test]
fn degenerate_paths_give_point_bands() {
    let bundle = flat_bundle(48, 40);
    for m in Method::ALL {
        let band = build_band(&bundle, m, 0.1, &IntervalSettings::default()).unwrap();
        for i in 0..48 {
            assert!((band.lower[i] - bundle.point[i]).abs() < 1e-12, "{m}");
            assert!((band.upper[i] - bundle.point[i]).abs() < 1e-12, "{m}");
        }
    }
}

#[test]
fn np_without_peeling_is_the_full_envelope() {
    let bundle = common::random_bundle(4, 48, 10);
    let band = pi_np(&bundle, 0.05).unwrap();
    assert!(band.meta.removed.is_empty());
    for i in 0..48 {
        let lo = bundle
            .boot_paths
            .iter()
            .map(|p| p[i])
            .fold(f64::INFINITY, f64::min);
        let hi = bundle
            .boot_paths
            .iter()
            .map(|p| p[i])
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!((band.lower[i], band.upper[i]), (lo, hi));
    }
}

#[test]
fn nskwf_needs_enough_paths() {
    let bundle = common::random_bundle(5, 8, 10);
    assert!(pi_ns_kwf(&bundle, 0.05, NsKwfMode::Disconnected).is_err());
    assert!(pi_ns_kwf(&bundle, 0.1, NsKwfMode::Disconnected).is_ok());
}

#[test]
fn disconnected_is_wider_in_the_majority() {
    let (mut wider, mut total) = (0, 0);
    for seed in 0..100 {
        let bundle = common::random_bundle(seed, 48, 100);
        let d = pi_ns_kwf(&bundle, 0.1, NsKwfMode::Disconnected).unwrap();
        let c = pi_ns_kwf(&bundle, 0.1, NsKwfMode::Connected).unwrap();
        for (wd, wc) in d.width().iter().zip(c.width()) {
            total += 1;
            if *wd >= wc {
                wider += 1;
            }
        }
    }
    assert!(wider * 2 > total, "{wider} of {total}");
}

#[test]
fn kfwe_narrows_as_k_grows() {
    for seed in 0..30 {
        let bundle = common::random_bundle(seed, 48, 100);
        let bands: Vec<_> = (1..6).map(|k| pi_kfwe(&bundle, 0.05, k).unwrap()).collect();
        for pair in bands.windows(2) {
            assert!(pair[0].contains(&pair[1]));
            assert!(pair[0].meta.d_max >= pair[1].meta.d_max);
        }
    }
}

fn nested_in_alpha(bundle: &ForecastBundle, method: Method, settings: &IntervalSettings) -> bool {
    let bands: Vec<_> = [0.05, 0.1, 0.2, 0.3]
        .iter()
        .map(|a| build_band(bundle, method, *a, settings).unwrap())
        .collect();
    bands.windows(2).all(|p| p[0].contains(&p[1]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bands_are_ordered_and_nested(seed in 0u64..100_000, b in 20usize..120) {
        let bundle = common::random_bundle(seed, 24, b);
        let settings = IntervalSettings::default();
        for m in Method::ALL {
            for a in [0.05, 0.1, 0.2] {
                let band = build_band(&bundle, m, a, &settings).unwrap();
                prop_assert!(band.lower.iter().zip(&band.upper).all(|(l, u)| l <= u));
            }
            prop_assert!(nested_in_alpha(&bundle, m, &settings), "{}", m);
        }
    }

    #[test]
    fn bands_are_affine_equivariant(seed in 0u64..100_000, scale in 0.1..50.0f64, shift in -1e3..1e3f64) {
        let bundle = common::random_bundle(seed, 24, 60);
        let mut moved = bundle.clone();
        let f = |v: &mut f64, with_shift: bool| *v = scale * *v + if with_shift { shift } else { 0.0 };
        moved.point.iter_mut().for_each(|v| f(v, true));
        moved.smooth_part.iter_mut().for_each(|v| f(v, true));
        moved.detail_part.iter_mut().for_each(|v| f(v, false));
        moved.boot_paths.iter_mut().flatten().for_each(|v| f(v, true));
        moved.boot_smooth.iter_mut().flatten().for_each(|v| f(v, true));
        moved.boot_detail.iter_mut().flatten().for_each(|v| f(v, false));
        moved.sigma.iter_mut().for_each(|v| *v *= scale);
        let settings = IntervalSettings::default();
        for m in Method::ALL {
            let a = build_band(&bundle, m, 0.1, &settings).unwrap();
            let b = build_band(&moved, m, 0.1, &settings).unwrap();
            for i in 0..24 {
                let tol = 1e-9 * (scale * a.upper[i].abs() + shift.abs() + 1.0);
                prop_assert!((b.lower[i] - (scale * a.lower[i] + shift)).abs() <= tol, "{}", m);
                prop_assert!((b.upper[i] - (scale * a.upper[i] + shift)).abs() <= tol, "{}", m);
            }
        }
    }
}
