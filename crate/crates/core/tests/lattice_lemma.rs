//! Lattice-point counting near convex boundaries: the Steiner volume
//! oracle, the closed-form window side on the line, and the sampled
//! lemma check in the plane.

use zdtl_core::lattice::{
    boundary_shell_volume_box, find_n0, steiner_outer_volume_box, verify_lemma, LemmaParams,
};

#[test]
fn steiner_volume_exact_and_monte_carlo() {
    // Square of side 10 fattened by 1: 100 + 4*10 + pi.
    let exact = steiner_outer_volume_box(10, 1.0, 2);
    assert!((exact - (140.0 + std::f64::consts::PI)).abs() < 1e-10, "exact {exact}");

    // Monte Carlo over the bounding box [-1, 11]^2.
    let mut rng_state = 0x243F_6A88_85A3_08D3u64;
    let mut next = || {
        // SplitMix64: statistical quality is plenty for volume counting.
        rng_state = rng_state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = rng_state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        (z ^ (z >> 31)) as f64 / u64::MAX as f64
    };
    let samples = 1_000_000;
    let mut hits = 0u64;
    for _ in 0..samples {
        let x = -1.0 + 12.0 * next();
        let y = -1.0 + 12.0 * next();
        let dx = (0.0 - x).max(x - 10.0).max(0.0);
        let dy = (0.0 - y).max(y - 10.0).max(0.0);
        if dx * dx + dy * dy <= 1.0 {
            hits += 1;
        }
    }
    let mc = hits as f64 / samples as f64 * 144.0;
    assert!((mc - exact).abs() / exact < 0.01, "mc {mc} vs exact {exact}");
}

#[test]
fn shell_volume_degenerates_to_full_box() {
    // When the box is thinner than twice the shell radius the inner box
    // is empty and the shell is the whole fattened volume.
    let full = steiner_outer_volume_box(3, 2.0, 2);
    assert!((boundary_shell_volume_box(3, 2.0, 2) - full).abs() < 1e-12);
}

#[test]
fn line_window_side_matches_closed_form() {
    // On the line the shell volume is exactly 4e with e = r + 1, so the
    // smallest window with 2*shell/N < eps is floor(8e/eps) + 1.
    for (epsilon, r) in [(0.5, 1.0), (0.2, 1.0), (0.5, 2.0), (0.2, 2.0), (0.3, 1.5)] {
        let n0 = find_n0(epsilon, r, 1).unwrap();
        let closed = (8.0 * (r + 1.0) / epsilon).floor() as u64 + 1;
        assert_eq!(n0, closed, "epsilon {epsilon}, r {r}");
    }
    assert_eq!(find_n0(0.5, 1.0, 1).unwrap(), 33);
}

#[test]
fn plane_window_side_is_minimal() {
    let epsilon = 0.5;
    let r = 1.0;
    let n0 = find_n0(epsilon, r, 2).unwrap();
    let e = r + 2f64.sqrt();
    let frac = |n: u64| 2.0 * boundary_shell_volume_box(n, e, 2) / (n as f64).powi(2);
    assert!(frac(n0) < epsilon, "returned side does not satisfy the bound");
    assert!(frac(n0 - 1) >= epsilon, "a smaller side already satisfies the bound");
}

#[test]
fn sampled_lemma_holds_in_the_plane() {
    let report = verify_lemma(&LemmaParams {
        d: 2,
        epsilon: 0.5,
        r: 1.0,
        bodies: 200,
        seed: 31,
        mc_samples: 200_000,
    })
    .unwrap();
    assert!(report.steiner_ok, "steiner mc {} vs exact {}", report.steiner_mc, report.steiner_exact);
    for body in &report.bodies {
        assert!(body.fraction < 0.5, "near-boundary fraction {} too large", body.fraction);
    }
    assert!(report.pass);
}
