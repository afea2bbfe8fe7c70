use nrpos_core::error::Error;
use nrpos_core::oracles::pinv::pinv_lambda;
use nrpos_core::positioning::{geometry_factors, positioning_error};
use nrpos_core::rng::stream;
use rand::Rng;

#[test]
fn orthonormal_geometry_has_unit_factors() {
    let f = geometry_factors([0.0; 3], &[[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]).unwrap();
    assert_eq!(f.lambda, vec![1.0, 1.0, 1.0]);
}

#[test]
fn collinear_anchors_are_degenerate() {
    let r = geometry_factors([0.0, 5.0, 0.0], &[[1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [3.0, 0.0, 0.0]]);
    assert!(matches!(r, Err(Error::DegenerateGeometry { .. })));
}

#[test]
fn tetrahedron_matches_pseudo_inverse() {
    let s = 1.0 / 3f64.sqrt();
    let anchors = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
    let f = geometry_factors([0.0; 3], &anchors).unwrap();
    let p = pinv_lambda([0.0; 3], &anchors).unwrap();
    for (a, b) in f.lambda.iter().zip(&p) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn random_geometries_match_pseudo_inverse() {
    let mut rng = stream(1, 0);
    for _ in 0..200 {
        let n = rng.random_range(3..8);
        let anchors: Vec<[f64; 3]> = (0..n)
            .map(|_| [rng.random_range(0.0..100.0), rng.random_range(0.0..100.0), rng.random_range(0.0..10.0)])
            .collect();
        let user = [rng.random_range(0.0..100.0), rng.random_range(0.0..100.0), rng.random_range(0.0..10.0)];
        if let Ok(f) = geometry_factors(user, &anchors) {
            let p = pinv_lambda(user, &anchors).unwrap();
            for (a, b) in f.lambda.iter().zip(&p) {
                assert!((a - b).abs() <= 1e-8 * b.max(1.0), "{a} {b}");
            }
        }
    }
}

#[test]
fn error_combines_factors_and_variances() {
    let e = positioning_error(&[1.0, 2.0], &[0.25, 1.0]).unwrap();
    assert!((e - (0.25f64 + 4.0).sqrt()).abs() < 1e-15);
    assert!(positioning_error(&[1.0], &[1.0, 2.0]).is_err());
}
