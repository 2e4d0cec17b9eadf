//! Tower translate disjointness, union coverage, and the boundary
//! cover plan, on the default actions at several box sides. Negative
//! controls weaken the clearance threshold and must be caught.

use zdtl_core::dynsys::{sample_points, LatticeVector, RotationAction};
use zdtl_core::marker::default_marker;
use zdtl_core::tiling::TilingConfig;
use zdtl_core::towers::{
    build_boundary_cover, group_modulus, piece_shift, round_half_down, tower_union_membership,
    tower_union_scan, urp_parameter_search, verify_ocap_boundary_bound, verify_tower_coverage,
    verify_tower_disjoint, TowerSpec,
};

fn line_setup() -> (RotationAction, zdtl_core::marker::MarkerFunction, TilingConfig) {
    let action = RotationAction::default_1d();
    let marker = default_marker(&action).unwrap();
    let config = TilingConfig::for_marker(&marker, 1);
    (action, marker, config)
}

fn plane_setup() -> (RotationAction, zdtl_core::marker::MarkerFunction, TilingConfig) {
    let action = RotationAction::default_2d();
    let marker = default_marker(&action).unwrap();
    let config = TilingConfig::for_marker(&marker, 2);
    (action, marker, config)
}

#[test]
fn translates_stay_disjoint_on_the_circle() {
    let (action, marker, config) = line_setup();
    for n in [2u64, 3, 4] {
        let spec = TowerSpec::new(0, n, 1).unwrap();
        let rep = verify_tower_disjoint(&action, &marker, &config, &spec, 42, 1000).unwrap();
        assert_eq!(rep.overlap_violations, 0, "n={n}: translates overlapped");
        assert_eq!(rep.residue_mismatches, 0, "n={n}: residue identity broke");
        assert!(rep.membership_hits > 0, "n={n}: base never visited, check is empty");
        assert!(rep.pass, "n={n}: disjointness failed");
    }
}

#[test]
fn translates_stay_disjoint_on_the_torus() {
    let (action, marker, config) = plane_setup();
    let spec = TowerSpec::new(0, 2, 2).unwrap();
    let rep = verify_tower_disjoint(&action, &marker, &config, &spec, 42, 300).unwrap();
    assert_eq!(rep.overlap_violations, 0, "translates overlapped");
    assert_eq!(rep.residue_mismatches, 0, "residue identity broke");
    assert!(rep.pass);
    // Plane clearances top out near 2.7 at these marker radii, below the
    // n*sqrt(2) threshold, so the base is legitimately unvisited.
    assert_eq!(rep.membership_hits, 0, "clearance distribution shifted; revisit thresholds");
}

#[test]
fn weakened_threshold_is_caught_on_both_actions() {
    let (action, marker, config) = line_setup();
    let weak = TowerSpec::with_threshold(0, 3, 0.0).unwrap();
    let rep = verify_tower_disjoint(&action, &marker, &config, &weak, 5, 300).unwrap();
    assert!(rep.overlap_violations > 0, "circle control produced no overlaps");
    assert!(rep.residue_mismatches > 0, "circle control produced no mismatches");
    assert!(!rep.pass);

    let (action, marker, config) = plane_setup();
    let weak = TowerSpec::with_threshold(0, 2, 0.0).unwrap();
    let rep = verify_tower_disjoint(&action, &marker, &config, &weak, 5, 300).unwrap();
    assert!(rep.overlap_violations > 0, "torus control produced no overlaps");
    assert!(!rep.pass);
}

#[test]
fn deep_clearance_guarantees_coverage_on_the_circle() {
    let (action, marker, config) = line_setup();
    let spec = TowerSpec::new(0, 2, 1).unwrap();
    let rep = verify_tower_coverage(&action, &marker, &config, &spec, 6, 1000).unwrap();
    assert!(rep.qualifying > 0, "no sample cleared twice the threshold; check is empty");
    assert_eq!(rep.qualifying_violations, 0, "guaranteed member missing from union");
    assert!(rep.pass);
}

#[test]
fn weakened_coverage_claim_is_caught() {
    let (action, marker, config) = line_setup();
    // Threshold zero promises coverage everywhere, which is false.
    let weak = TowerSpec::with_threshold(0, 3, 0.0).unwrap();
    let rep = verify_tower_coverage(&action, &marker, &config, &weak, 6, 300).unwrap();
    assert!(rep.qualifying_violations > 0, "circle coverage control fired nothing");
    assert!(!rep.pass);

    let (action, marker, config) = plane_setup();
    let weak = TowerSpec::with_threshold(0, 2, 0.0).unwrap();
    let rep = verify_tower_coverage(&action, &marker, &config, &weak, 6, 300).unwrap();
    assert!(rep.qualifying_violations > 0, "torus coverage control fired nothing");
    assert!(!rep.pass);
}

#[test]
fn union_shortcut_agrees_with_exhaustive_scan() {
    let (action, marker, config) = line_setup();
    let spec = TowerSpec::new(0, 3, 1).unwrap();
    let mut members = 0u64;
    for x in sample_points(17, 200, 1) {
        let quick = tower_union_membership(&action, &marker, &config, &spec, &x).unwrap();
        let full = tower_union_scan(&action, &marker, &config, &spec, &x).unwrap();
        assert_eq!(quick.member, !full.is_empty(), "shortcut disagrees with scan");
        if let Some(residue) = quick.residue {
            assert_eq!(full, vec![residue], "scan found a different translate");
            members += 1;
        }
    }
    assert!(members > 0, "agreement test never saw a member");
}

#[test]
fn boundary_cover_plan_shapes() {
    let (_, marker, config) = line_setup();
    let plan = build_boundary_cover(&marker, &config, 2, 1).unwrap();
    assert!((plan.r0 - 4.0).abs() < 1e-12, "r0 {}", plan.r0);
    // Labels: integers of norm below covering + sqrt(d) + 2 r0 = 17.
    assert_eq!(plan.labels.len(), 33, "label count");
    assert_eq!(plan.group_modulus, 3);
    assert!(plan.group_count <= 3, "group count {}", plan.group_count);
    assert_eq!(plan.labels.len(), plan.shifts.len());
    for (label, shift) in plan.labels.iter().zip(&plan.shifts) {
        let expected: Vec<i64> = label
            .components()
            .iter()
            .map(|&c| round_half_down((1.0 - 1.0 / config.scale) * c as f64))
            .collect();
        assert_eq!(shift.components(), expected.as_slice(), "shift for {label:?}");
        // The planned displacement stays within half a lattice step of
        // the exact contraction, so shifted pieces stay near their row.
        let exact = (1.0 - 1.0 / config.scale) * label.components()[0] as f64;
        assert!((shift.components()[0] as f64 - exact).abs() <= 0.5 + 1e-12);
    }

    let (_, marker2, config2) = plane_setup();
    let plan2 = build_boundary_cover(&marker2, &config2, 2, 2).unwrap();
    assert_eq!(plan2.group_modulus, 3);
    assert!(plan2.group_count <= 9, "plane group count {}", plan2.group_count);
    assert_eq!(group_modulus(1), 3);
    assert_eq!(group_modulus(2), 3);
}

#[test]
fn rounding_convention_matches_half_down() {
    assert_eq!(round_half_down(0.5), 0);
    assert_eq!(round_half_down(-0.5), -1);
    assert_eq!(round_half_down(1.49), 1);
    assert_eq!(round_half_down(1.51), 2);
    let v = LatticeVector::new(vec![3, -3]);
    // (1 - 1/1.5) = 1/3; 3/3 = 1 exactly, -1 exactly.
    assert_eq!(piece_shift(&v, 1.5).components(), &[1, -1]);
}

#[test]
fn near_boundary_frequency_matches_spatial_measure() {
    let (action, marker, config) = line_setup();
    let rep =
        verify_ocap_boundary_bound(&action, &marker, &config, 0.25, 13, 2000, 2000).unwrap();
    assert!(rep.pass, "orbit {} vs spatial {} gap {}", rep.orbit_fraction, rep.spatial_fraction, rep.gap);
}

#[test]
fn shrinking_markers_reduce_uncovered_fraction() {
    let action = RotationAction::default_1d();
    let result = urp_parameter_search(&action, 2, 0.35, 23, 400, 3).unwrap();
    assert!(!result.steps.is_empty());
    let first = result.steps.first().unwrap().uncovered;
    let last = result.steps.last().unwrap().uncovered;
    if result.steps.len() > 1 {
        assert!(last < first, "uncovered fraction did not shrink: {first} -> {last}");
    }
    assert!(result.achieved, "target uncovered fraction not reached: {last}");
}
