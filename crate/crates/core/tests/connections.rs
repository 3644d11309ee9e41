mod common;

use chmass_core::ambient::*;
use chmass_core::connection::*;
use chmass_core::linalg::{inertia, Vector};
use chmass_core::model::*;
use chmass_core::profile::{theta_custom, AlphaSpec, BumpSpec, ProfileMetric};
use proptest::prelude::*;

fn lassos(seed: u64, n: usize, count: usize) -> Vec<Lasso> {
    let mut r = common::rng(seed);
    let base = vec![0.0; n];
    (0..count)
        .map(|_| {
            let center = common::ball_point(&mut r, n, 0.4);
            let x: Vec<f64> = common::direction(&mut r, n).iter().map(|v| v * 0.15).collect();
            let y: Vec<f64> = common::direction(&mut r, n).iter().map(|v| v * 0.15).collect();
            Lasso { base: base.clone(), center, x, y }
        })
        .collect()
}

#[test]
fn flat_on_complex_hyperbolic() {
    let mut r = common::rng(7);
    for m in [2, 3] {
        let f = ComplexHyperbolic { m };
        for _ in 0..5 {
            let p = common::ball_point(&mut r, 2 * m, 0.6);
            let x = common::direction(&mut r, 2 * m);
            let y = common::direction(&mut r, 2 * m);
            let c = curvature_e(-1.0, &f, &p, &x, &y).unwrap();
            assert!(c.max_abs() < 1e-5, "m={m} {}", c.max_abs());
            assert!(c.predicted.amax() < 1e-5);
        }
    }
}

#[test]
fn wrong_sign_is_not_flat_but_matches_block_formula() {
    let f = ComplexHyperbolic { m: 2 };
    let p = [0.2, -0.1, 0.3, 0.1];
    let c = curvature_e(1.0, &f, &p, &[1.0, 0.0, 0.3, 0.0], &[0.0, 0.5, 1.0, -0.2]).unwrap();
    assert!(c.max_abs() > 1.0);
    assert!(c.relative_gap(1.0) < 1e-5);
    // and +1 is the flat choice for the positively curved model
    let fs = FubiniStudy { m: 2 };
    let c = curvature_e(1.0, &fs, &p, &[1.0, 0.0, 0.3, 0.0], &[0.0, 0.5, 1.0, -0.2]).unwrap();
    assert!(c.max_abs() < 1e-5);
}

#[test]
fn degenerate_plane_is_an_error() {
    let f = ComplexHyperbolic { m: 2 };
    let e = curvature_e(-1.0, &f, &[0.0; 4], &[1.0, 0.0, 0.0, 0.0], &[2.0, 0.0, 0.0, 0.0]);
    assert!(matches!(e, Err(chmass_core::GeomError::DegeneratePlane)));
}

#[test]
fn signature_is_exact() {
    for m in 2..=4 {
        let p = vec![0.05; 2 * m];
        let g = ComplexHyperbolic { m }.metric(&p).unwrap();
        let (pos, neg, zero) = inertia(&h_gram(&g).unwrap(), 1e-10);
        assert_eq!((pos, neg, zero), (m * m + 1, 2 * m, 0));
    }
}

#[test]
fn holonomy_fixed_space_has_full_dimension() {
    let m = 2;
    let conn = ChConnection::new(ComplexHyperbolic { m }, -1.0);
    let ps = parallel_space_dim(&conn, &lassos(3, 2 * m, 4), SIGMA_RANK).unwrap();
    assert_eq!(ps.dim, (m + 1) * (m + 1));
    assert!(!ps.flagged);
    // the wrong sign has curvature, so loops cut the fixed space down
    let conn = ChConnection::new(ComplexHyperbolic { m }, 1.0);
    let ps = parallel_space_dim(&conn, &lassos(3, 2 * m, 4), SIGMA_RANK).unwrap();
    assert!(ps.dim < (m + 1) * (m + 1), "{}", ps.dim);
    let n = 4;
    let conn = RhConnection { field: RealHyperbolic { n } };
    let ps = parallel_space_dim(&conn, &lassos(5, n, 4), SIGMA_RANK).unwrap();
    assert_eq!(ps.dim, n + 1);
}

#[test]
fn transport_preserves_h() {
    let f = ComplexHyperbolic { m: 2 };
    let s0 = theta_z_inv_at(&[0.0; 4], &beta_explicit(2, &[1])).unwrap();
    let loop_ = circle(&[0.1, 0.0, 0.2, 0.0], &[0.2, 0.0, 0.0, 0.1], &[0.0, 0.2, 0.1, 0.0]);
    let out = segment(&[0.0; 4], &[0.1, 0.0, 0.2, 0.0]);
    let drift = transport_h_drift(-1.0, &f, &s0, &out).unwrap();
    assert!(drift < 1e-9, "{drift}");
    let p = [0.1, 0.0, 0.2, 0.0];
    let s1 = transport_e(-1.0, &f, &theta_z_inv_at(&p, &beta_explicit(2, &[2])).unwrap(), &loop_).unwrap();
    let expect = theta_z_inv_at(&p, &beta_explicit(2, &[2])).unwrap();
    assert!((s1.xi - expect.xi).amax() < 1e-8);
    assert!((s1.u - expect.u).abs() < 1e-8);
}

#[test]
fn kahler_class_is_parallel_for_any_kahler_metric() {
    let g = ProfileMetric::new(theta_custom(AlphaSpec::Bump(BumpSpec::default()), 2).unwrap());
    let mut sec = |q: &[f64]| Ok(SectionE { xi: kahler_form(&g.metric(q)?), alpha: Vector::zeros(4), u: -1.0 });
    for c in [-1.0, 1.0] {
        let d = nabla_ch(c, &g, &mut sec, &[0.3, -0.7, 0.2, 0.5], &[0.5, 0.1, -0.3, 0.2]).unwrap();
        assert!(d.xi.amax() < 1e-9 && d.alpha.amax() < 1e-12 && d.u.abs() < 1e-12);
    }
    let th = theta_z_inv_at(&[0.3, 0.1, -0.2, 0.0], &omega(2)).unwrap();
    let g0 = ComplexHyperbolic { m: 2 }.metric(&[0.3, 0.1, -0.2, 0.0]).unwrap();
    assert!((th.xi - kahler_form(&g0)).amax() < 1e-12);
    assert!(th.alpha.amax() < 1e-12);
    assert!((th.u + 1.0).abs() < 1e-12);
}

#[test]
fn u_of_parallel_sections_solves_third_order_equation() {
    let f = ComplexHyperbolic { m: 2 };
    let b = beta_explicit(2, &[1]).add(&AmbientForm::from_coords(2, &[0.3, 0.0, 0.1, -0.2, 0.0, 0.0, 0.4, 0.0, 0.1]));
    let mut u = u_field_of_beta(&b);
    let r = third_order_residual(&f, &mut u, &[0.2, -0.1, 0.1, 0.3], &[0.5, 1.0, -0.2, 0.3]).unwrap();
    assert!(r.residual.amax() < 1e-4, "{}", r.residual.amax());
    // a scalar that is not of this form fails
    let mut bad = |q: &[f64]| Ok(q[0] * q[0] * q[1]);
    let r = third_order_residual(&f, &mut bad, &[0.2, -0.1, 0.1, 0.3], &[0.5, 1.0, -0.2, 0.3]).unwrap();
    assert!(r.residual.amax() > 1e-2);
}

#[test]
fn theta_is_natural_under_isometries() {
    let m = 2;
    let b = AmbientForm::from_coords(m, &(0..9).map(|i| (i as f64 * 0.37).sin()).collect::<Vec<_>>());
    let u = PseudoUnitary::boost(m, 0, 0.4).compose(&PseudoUnitary::phases(&[0.3, -0.2, 0.5])).compose(&PseudoUnitary::boost(m, 1, -0.25));
    assert!(u.isometry_defect() < 1e-12);
    let p = vec![0.2, -0.1, 0.15, 0.3];
    let s = theta_z_inv_at(&u.ball_map(&p).unwrap(), &b).unwrap();
    let pulled = pullback_section(&u, &p, &s).unwrap();
    let got = theta_z(&BallPoint::new(p).unwrap(), &pulled).unwrap();
    assert!((got.b - pu_action(&u, &b).unwrap().b).amax() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn theta_round_trip(c in proptest::collection::vec(-2.0f64..2.0, 9), w in proptest::collection::vec(-0.45f64..0.45, 4)) {
        let b = AmbientForm::from_coords(2, &c);
        let s = theta_z_inv_at(&w, &b).unwrap();
        let back = theta_z(&BallPoint::new(w).unwrap(), &s).unwrap();
        prop_assert!((back.b - &b.b).amax() < 1e-10);
    }

    #[test]
    fn h_matches_ambient_pairing(c in proptest::collection::vec(-2.0f64..2.0, 9), w in proptest::collection::vec(-0.45f64..0.45, 4)) {
        let b = AmbientForm::from_coords(2, &c);
        let s = theta_z_inv_at(&w, &b).unwrap();
        let g = ComplexHyperbolic { m: 2 }.metric(&w).unwrap();
        let h = s.h(&g).unwrap();
        let pair = b.pair(&b);
        prop_assert!((h - pair).abs() < 1e-9 * pair.abs().max(1.0), "{} {}", h, pair);
    }

    #[test]
    fn section_vectors_round_trip(v in proptest::collection::vec(-1.0f64..1.0, 16)) {
        let s = SectionE::from_vec(6, &v);
        let back = s.to_vec();
        prop_assert!(v.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-14));
    }
}
