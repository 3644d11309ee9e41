mod common;

use chmass_core::model::*;
use chmass_core::profile::*;
use proptest::prelude::*;

fn appendix(m: usize) -> MomentumProfile {
    theta_custom(AlphaSpec::Bump(BumpSpec::default()), m).unwrap()
}

#[test]
fn smooth_at_the_origin() {
    for kind in [ProfileKind::Flat, ProfileKind::Ch, ProfileKind::Fs] {
        let [t, t1, _] = theta_model(kind, 2).unwrap().derivs(0.0);
        assert_eq!((t, t1), (0.0, 2.0));
    }
    let [t, t1, _] = appendix(3).derivs(0.0);
    assert!(t.abs() < 1e-10 && (t1 - 2.0).abs() < 1e-10);
}

#[test]
fn ch_profile_reproduces_the_model_metric() {
    let mut r = common::rng(21);
    for m in [2, 3] {
        let prof = theta_model(ProfileKind::Ch, m).unwrap();
        for _ in 0..20 {
            let p = BallPoint::new(common::ball_point(&mut r, 2 * m, 0.95)).unwrap();
            let a = metric_of_profile(&prof, &p).unwrap().g;
            let b = metric_ch(&p).unwrap().g;
            assert!((&a - &b).amax() <= 1e-10 * b.amax(), "{}", (a - b).amax());
        }
    }
}

#[test]
fn flat_and_fubini_study_profiles() {
    let flat = theta_model(ProfileKind::Flat, 2).unwrap();
    let p = BallPoint::new(vec![1e-3, -2e-3, 5e-4, 1e-3]).unwrap();
    let g = metric_of_profile(&flat, &p).unwrap().g;
    assert!((g - chmass_core::linalg::Mat::identity(4, 4)).amax() < 1e-8);
    // the same chart anchoring gives the affine Fubini-Study chart
    let fs = theta_model(ProfileKind::Fs, 2).unwrap();
    let q = [0.3, -0.2, 0.5, 0.1];
    let a = ProfileMetric::new(fs).metric(&q).unwrap();
    let b = FubiniStudy { m: 2 }.metric(&q).unwrap();
    assert!((a - b).amax() < 1e-10);
}

#[test]
fn bump_moments() {
    let b = BumpSpec::default();
    assert!(b.unit_integral_defect().unwrap() < 1e-12);
    // symmetric about 3/2
    assert!((b.first_moment - 1.5).abs() < 1e-12);
    assert!(BumpSpec::new(0.5, 1.0, 1.0).is_err());
    assert!(BumpSpec::new(2.0, 2.0, 1.0).is_err());
}

#[test]
fn alpha_values() {
    let b = BumpSpec::default();
    for x in [0.0, 0.3, 1.0] {
        assert_eq!(alpha_of_x(&b, 2, x), 0.0);
    }
    assert!((alpha_of_x(&b, 2, 10.0) - (10.0 - 1.5) / 10.0).abs() < 1e-12);
    for m in [2, 3, 4] {
        let x: f64 = 1e7;
        let lead = x.powi(m as i32 - 2) * alpha_of_x(&b, m, x);
        assert!((lead - 1.0).abs() < 1e-6, "{lead}");
    }
    for m in [2, 3] {
        let x: f64 = 3e3;
        let rel = MomentumProfile::theta0(x) / appendix(m).value(x) - 1.0;
        assert!((rel * x.powi(m as i32) * 2.0 - 1.0).abs() < 2e-3);
    }
    for x in [0.2, 0.7, 1.0] {
        assert_eq!(appendix(2).value(x), MomentumProfile::theta0(x));
    }
}

#[test]
fn scalar_curvature_values() {
    let ch = theta_model(ProfileKind::Ch, 2).unwrap();
    let flat = theta_model(ProfileKind::Flat, 3).unwrap();
    for x in [1e-8, 0.5, 3.0, 40.0] {
        assert!((scal_profile(&ch, x).unwrap() + 24.0).abs() < 1e-9);
        assert!(scal_profile(&flat, x).unwrap().abs() < 1e-9);
    }
    let fd = scal(&ComplexHyperbolic { m: 2 }, &[0.1, 0.2, 0.0, -0.1]).unwrap();
    assert!((fd + 24.0).abs() < 1e-4);
    // finite-difference scalar curvature of the appendix metric
    let prof = appendix(2);
    let metric = ProfileMetric::new(prof.clone());
    let s2: f64 = 0.55;
    let p = [s2.sqrt(), 0.0, 0.0, 0.0];
    let x = prof.moment_of_radius2(s2).unwrap();
    let fd = scal(&metric, &p).unwrap();
    assert!((fd - scal_profile(&prof, x).unwrap()).abs() < 1e-3, "{fd} at x={x}");
}

#[test]
fn scalar_curvature_only_increases() {
    for m in [2, 3] {
        let prof = appendix(m);
        let grid = log_grid(1e-3, 1e5, 400);
        let s = scal_excess_sweep(&prof, &grid);
        assert!(s.min >= -1e-10 && s.max > 0.0);
        let c = convexity_sweep(&prof, &grid);
        assert!(c.min >= -1e-10, "{c:?}");
    }
}

#[test]
fn excess_is_the_bump() {
    let b = BumpSpec::new(1.0, 3.0, 0.5).unwrap();
    let prof = theta_custom(AlphaSpec::Bump(b.clone()), 3).unwrap();
    for x in [1.2, 1.9, 2.7, 5.0] {
        assert!((scal_excess(&prof, x) - b.chi(x) * x.powi(-2)).abs() < 1e-10);
    }
}

#[test]
fn positivity_violations_are_rejected() {
    let step = BumpSpec::default();
    assert!(theta_custom(AlphaSpec::PowerDecay { eps: 100.0, rate: 2.0, step }, 2).is_err());
    assert!(theta_custom(AlphaSpec::Bump(BumpSpec::default()), 1).is_err());
}

#[test]
fn decay_rates() {
    for m in [2, 3] {
        let metric = ProfileMetric::new(appendix(m));
        let radii: Vec<f64> = (0..8).map(|i| 3.0 + 0.5 * i as f64).collect();
        let norm = decay_fit(&metric, DecayQuantity::Norm, &radii).unwrap();
        assert!((norm.exponent / (2 * m) as f64 - 1.0).abs() < 0.05, "{}", norm.exponent);
        // leading terms cancel in the trace
        let tr = decay_fit(&metric, DecayQuantity::Trace, &radii).unwrap();
        assert!((tr.exponent / (2 * m + 2) as f64 - 1.0).abs() < 0.05, "{}", tr.exponent);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bumps_have_unit_mass(z0 in 1.0f64..4.0, width in 0.2f64..3.0, sharp in 0.1f64..3.0) {
        let b = BumpSpec::new(z0, z0 + width, sharp).unwrap();
        prop_assert!(b.unit_integral_defect().unwrap() < 1e-12);
        prop_assert!(b.first_moment > z0 && b.first_moment < z0 + width);
    }

    #[test]
    fn excess_matches_difference_of_displays(x in 0.05f64..30.0) {
        let prof = appendix(2);
        let ch = theta_model(ProfileKind::Ch, 2).unwrap();
        let d = scal_display(&prof, x).unwrap() - scal_display(&ch, x).unwrap();
        prop_assert!((d - scal_excess(&prof, x)).abs() < 1e-9 * (1.0 + 1.0 / x));
    }

    #[test]
    fn custom_metric_is_kahler(p in proptest::collection::vec(-0.6f64..0.6, 4)) {
        // the box reaches past the unit sphere at its corners
        prop_assume!(p.iter().map(|x| x * x).sum::<f64>() < 0.95);
        let g = metric_of_profile(&appendix(2), &BallPoint::new(p).unwrap()).unwrap();
        prop_assert!(g.is_positive_definite());
        prop_assert!(g.kahler_defect() < 1e-10);
    }
}
