//! Full sampled property suite for the equivariant cross-section
//! tilings at both default actions, plus the derived scale constants
//! the construction promises.

use zdtl_core::dynsys::RotationAction;
use zdtl_core::marker::default_marker;
use zdtl_core::tiling::{
    displacement_bound, guaranteed_cut_radius, verify_tiling_properties, weight_cap, TilingConfig,
};

#[test]
fn derived_scales_at_line_defaults() {
    let action = RotationAction::default_1d();
    let marker = default_marker(&action).unwrap();
    let config = TilingConfig::for_marker(&marker, 1);

    // covering 8, reach 9: depth 82, truncation 19, cut depth 123.
    assert_eq!(marker.separation, 1, "separation at line defaults");
    assert_eq!(marker.covering, 8, "covering at line defaults");
    assert!((config.depth - 82.0).abs() < 1e-12, "depth {}", config.depth);
    assert!((config.truncation - 19.0).abs() < 1e-12, "truncation {}", config.truncation);
    assert!((config.scale - 1.5).abs() < 1e-12, "scale {}", config.scale);
    assert!((config.cut_depth() - 123.0).abs() < 1e-12, "cut depth {}", config.cut_depth());

    // sqrt((depth+1)^2 + rho^2) - depth with rho = 8.5 at depth 123.
    let cap = weight_cap(config.cut_depth(), marker.covering, 1);
    let expected = (124.0f64 * 124.0 + 8.5 * 8.5).sqrt() - 123.0;
    assert!((cap - expected).abs() < 1e-12, "weight cap {cap}");
    assert!((cap - 1.29098921).abs() < 1e-8, "weight cap magnitude {cap}");

    let r_cut = guaranteed_cut_radius(&marker, &config, 1).unwrap();
    assert!((r_cut - 0.277779).abs() < 5e-4, "cut radius {r_cut}");

    let disp = displacement_bound(&marker, 1);
    assert!((disp - 4.0 / 9.0).abs() < 1e-12, "displacement bound {disp}");
}

#[test]
fn derived_scales_at_plane_defaults() {
    let action = RotationAction::default_2d();
    let marker = default_marker(&action).unwrap();
    let config = TilingConfig::for_marker(&marker, 2);

    let reach = 8.0 + 2f64.sqrt();
    assert_eq!(marker.separation, 1, "separation at plane defaults");
    assert_eq!(marker.covering, 8, "covering at plane defaults");
    assert!((config.depth - (reach * reach + 1.0)).abs() < 1e-12, "depth {}", config.depth);
    assert!((config.truncation - (2.0 * reach + 1.0)).abs() < 1e-12, "truncation {}", config.truncation);
    assert!((config.cut_depth() - 1.5 * (reach * reach + 1.0)).abs() < 1e-12);

    let r_cut = guaranteed_cut_radius(&marker, &config, 2).unwrap();
    assert!((r_cut - 0.1606).abs() < 5e-4, "cut radius {r_cut}");

    let disp = displacement_bound(&marker, 2);
    assert!((disp - 4.0 / reach).abs() < 1e-12, "displacement bound {disp}");
}

fn run_suite(d: usize, seed: u64) {
    let action = match d {
        1 => RotationAction::default_1d(),
        _ => RotationAction::default_2d(),
    };
    let marker = default_marker(&action).unwrap();
    let config = TilingConfig::for_marker(&marker, d);
    let report = verify_tiling_properties(&action, &marker, &config, seed, 100).unwrap();

    for p in &report.properties {
        assert!(p.checked > 0, "d={d}: property {} never fired", p.name);
        assert_eq!(p.violations, 0, "d={d}: property {} violated, worst {}", p.name, p.worst);
        assert!(p.pass, "d={d}: property {} failed", p.name);
    }
    assert_eq!(report.properties.len(), 8, "eight properties checked");
    assert!(report.pass, "d={d}: suite failed");

    // The shift test must have fired often enough to mean something.
    let equiv = &report.properties[0];
    assert!(equiv.name.starts_with("equivariance"), "property order");
    assert!(equiv.checked >= 100, "d={d}: equivariance barely exercised: {}", equiv.checked);
}

#[test]
fn sampled_properties_hold_on_the_circle() {
    run_suite(1, 1234);
}

#[test]
fn sampled_properties_hold_on_the_torus() {
    run_suite(2, 1234);
}

#[test]
fn sampled_properties_hold_across_seeds() {
    for seed in [7, 99, 4096] {
        run_suite(1, seed);
    }
}
