mod common;

use chmass_core::linalg::{complex_structure, Vector};
use chmass_core::model::*;
use proptest::prelude::*;

#[test]
fn ch_holomorphic_curvature_is_minus_four() {
    let mut r = common::rng(1);
    for m in [2, 3] {
        let f = ComplexHyperbolic { m };
        for _ in 0..3 {
            let p = common::ball_point(&mut r, 2 * m, 0.6);
            let x = Vector::from_vec(common::direction(&mut r, 2 * m));
            let y = Vector::from_vec(common::direction(&mut r, 2 * m));
            let s = riemann(&f, &p, &x, &y).unwrap();
            assert!((s.holomorphic + 4.0).abs() < 1e-5, "{}", s.holomorphic);
            // pinched between -4 and -1
            assert!(s.sectional <= -1.0 + 1e-5 && s.sectional >= -4.0 - 1e-5);
        }
    }
}

#[test]
fn scalar_curvatures() {
    for m in [2, 3] {
        let p = vec![0.1; 2 * m];
        let mf = m as f64;
        let ch = scal(&ComplexHyperbolic { m }, &p).unwrap();
        assert!((ch + 4.0 * mf * (mf + 1.0)).abs() < 1e-4, "{ch}");
        let fs = scal(&FubiniStudy { m }, &p).unwrap();
        assert!((fs - 4.0 * mf * (mf + 1.0)).abs() < 1e-4, "{fs}");
    }
    let rh = scal(&RealHyperbolic { n: 4 }, &[0.1, 0.2, -0.1, 0.3]).unwrap();
    assert!((rh + 12.0).abs() < 1e-4);
    assert!(scal(&Euclidean { n: 4 }, &[0.3; 4]).unwrap().abs() < 1e-10);
}

#[test]
fn radial_geodesic_matches_distance() {
    let f = ComplexHyperbolic { m: 2 };
    let c = geodesic(&f, &[0.0; 4], &[1.0, 0.0, 0.0, 0.0], 1.5).unwrap();
    assert!(!c.truncated);
    let end = c.points.last().unwrap();
    assert!((end[0] - 1.5f64.tanh()).abs() < 1e-8);
    assert!(end[1..].iter().all(|v| v.abs() < 1e-10));
    assert!(c.speed_drift < 1e-8);
}

#[test]
fn boundary_points_are_rejected() {
    assert!(BallPoint::new(vec![1.0, 0.0, 0.0, 0.0]).is_err());
    assert!(ComplexHyperbolic { m: 2 }.metric(&[0.8, 0.7, 0.0, 0.0]).is_err());
    assert!(coord_maps(RadialInput::R(-1.0)).is_err());
    assert!(coord_maps(RadialInput::S(1.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_is_kahler_and_positive(p in proptest::collection::vec(-0.45f64..0.45, 6)) {
        prop_assume!(p.iter().map(|x| x * x).sum::<f64>() < 0.95);
        let v = metric_ch(&BallPoint::new(p).unwrap()).unwrap();
        prop_assert!(v.is_positive_definite());
        prop_assert!(v.symmetry_defect() < 1e-14);
        prop_assert!(v.kahler_defect() < 1e-12);
    }

    #[test]
    fn radial_coordinates_round_trip(r in 0.01f64..8.0) {
        let c = coord_maps(RadialInput::R(r)).unwrap();
        prop_assert!((c.s - r.tanh()).abs() < 1e-14);
        prop_assert!((c.x - r.sinh().powi(2)).abs() <= 1e-12 * c.x.max(1.0));
        for back in [RadialInput::S(c.s), RadialInput::T(c.t), RadialInput::X(c.x)] {
            let d = coord_maps(back).unwrap();
            prop_assert!((d.r - r).abs() < 1e-7 * r.max(1.0), "{:?} {:?}", back, d);
        }
    }

    #[test]
    fn j_is_isometric(p in proptest::collection::vec(-0.4f64..0.4, 4), x in proptest::collection::vec(-1.0f64..1.0, 4)) {
        let g = ComplexHyperbolic { m: 2 }.metric(&p).unwrap();
        let x = Vector::from_vec(x);
        let jx = complex_structure(4) * &x;
        let a = x.dot(&(&g * &x));
        let b = jx.dot(&(&g * &jx));
        prop_assert!((a - b).abs() < 1e-12 * a.max(1.0));
    }
}
