mod common;

use common::*;
use proptest::prelude::*;
use signed_dec::delaunay::{circumcenter_order_points, one_sidedness, pair_status};
use signed_dec::{fixtures, io};
use signed_dec::geometry::circumcenter;
use signed_dec::{classify_complex, OneSided, PairStatus, Point, Tolerance};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn circumcenter_order_matches_delaunay_status(seed in any::<u64>(), n in 2usize..=3) {
        let pair = random_pair(&mut rng(seed), n);
        let tol = Tolerance::default();
        let status = pair_status(&pair.facet, &pair.left_apex, &pair.right_apex, &tol).unwrap();
        prop_assume!(status != PairStatus::Degenerate);
        let data = circumcenter_order_points(&pair.facet, &pair.left_apex, &pair.right_apex).unwrap();
        prop_assert_eq!(data.order_correct(), status == PairStatus::Strict);
        prop_assert!(data.identity_residual() < 1e-9);
        // measuring toward the left apex flips both positions and the test
        let rev = data.reversed();
        prop_assert_eq!(rev.order_correct(), data.order_correct());
        prop_assert!(rev.identity_residual() < 1e-9);
        if let Some(oracle) = pair_strict_oracle(&pair) {
            prop_assert_eq!(oracle, status == PairStatus::Strict);
        }
    }

    #[test]
    fn pair_status_ignores_rigid_motions_and_swaps(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = rng(seed);
        let pair = random_pair(&mut rng, n);
        let tol = Tolerance::default();
        let status = pair_status(&pair.facet, &pair.left_apex, &pair.right_apex, &tol).unwrap();
        prop_assert_eq!(pair_status(&pair.facet, &pair.right_apex, &pair.left_apex, &tol).unwrap(), status);
        let motion = random_rigid_motion(&mut rng, n);
        let facet: Vec<Point> = pair.facet.iter().map(|p| apply(&motion, p)).collect();
        let moved = pair_status(&facet, &apply(&motion, &pair.left_apex), &apply(&motion, &pair.right_apex), &tol).unwrap();
        prop_assert_eq!(moved, status);
    }

    #[test]
    fn one_sided_is_oriented_gabriel(seed in any::<u64>(), n in 2usize..=3) {
        let s = random_simplex(&mut rng(seed), n, n);
        let facet = &s[..n];
        let apex = &s[n];
        let c = circumcenter(facet).unwrap();
        let gap = (apex - &c.center).norm() - c.radius;
        prop_assume!(gap.abs() > 1e-9 * c.radius);
        let status = one_sidedness(facet, apex, &Tolerance::default()).unwrap();
        prop_assert_eq!(status == OneSided::Yes, gap > 0.0);
    }
}

#[test]
fn folded_surface_pairs_are_checked_after_flattening() {
    // equilateral pair folded by 90 degrees about the shared edge
    let h = 3f64.sqrt() / 2.0;
    let facet = [pt(&[0.0, 0.0, 0.0]), pt(&[1.0, 0.0, 0.0])];
    let left = pt(&[0.5, -h, 0.0]);
    let right = pt(&[0.5, 0.0, h]);
    let tol = Tolerance::default();
    assert_eq!(pair_status(&facet, &left, &right, &tol).unwrap(), PairStatus::Strict);
    // in 3-space the two apexes are close, but flattening restores the rhombus
    assert!((&left - &right).norm() < 2.0 * h);
}

#[test]
fn reports_are_ordered_and_versioned() {
    let c = fixtures::non_delaunay_square(6, 0.25, 4, 2).unwrap().build().unwrap();
    let report = classify_complex(&c);
    assert!(!report.is_qualifying());
    assert!(report.violated_pairs().count() >= 1);
    assert!(report.pairs.windows(2).all(|w| w[0].facet < w[1].facet));
    assert!(report.boundary.windows(2).all(|w| w[0].facet < w[1].facet));
    let json: serde_json::Value = serde_json::from_str(&io::report_json(&report).unwrap()).unwrap();
    assert_eq!(io::report_json(&classify_complex(&c)).unwrap(), io::report_json(&report).unwrap());
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["verdict"], "not_qualifying");
    assert!(json["pairs"].as_array().unwrap().iter().any(|p| p["status"] == "violated"));
}

#[test]
fn structured_square_is_not_qualifying_only_through_ties() {
    let c = fixtures::structured_square(4).unwrap().build().unwrap();
    let report = classify_complex(&c);
    assert!(!report.is_qualifying());
    assert_eq!(report.violated_pairs().count(), 0);
    assert!(report.non_one_sided().next().is_none());
}
