//! Acceptance gate: one test per criterion, so the harness emits one
//! pass/fail line for each. Every test prints its numeric evidence;
//! a failing criterion therefore carries its own analysis in the
//! captured output.

use std::process::{Command, Output};
use std::time::Instant;

use zdtl_core::comparison::{
    certify_comparison, check_rank_domination, default_pipeline_sets, measure_estimate,
    ocap_estimate, Ball, OpenSet,
};
use zdtl_core::dynsys::{RotationAction, TorusPoint};
use zdtl_core::lattice::{find_n0, steiner_outer_volume_box, verify_lemma, LemmaParams};
use zdtl_core::marker::{default_marker, MarkerFunction};
use zdtl_core::tiling::{verify_tiling_properties, TilingConfig};
use zdtl_core::towers::{
    build_two_towers, verify_tower_coverage, verify_tower_disjoint, TowerSpec, TwoTowersOptions,
};

const TILING_TRIALS: usize = 100;
const TILING_BUDGET_SECS: f64 = 60.0;
const LEMMA_BODIES: usize = 200;
const LEMMA_MC_SAMPLES: usize = 20_000;
const LEMMA_BUDGET_SECS: f64 = 120.0;
const STEINER_ABS_TOL: f64 = 1e-10;
const STEINER_MC_REL_TOL: f64 = 0.01;
const STEINER_MC_SAMPLES: u64 = 1_000_000;
const TOWER_SAMPLES: usize = 1000;
const CONTROL_SAMPLES: usize = 300;
const OCAP_WINDOW: u64 = 1000;
const OCAP_SAMPLES: usize = 100;
const OCAP_RANGE: (f64, f64) = (0.18, 0.22);

fn system(d: usize) -> (RotationAction, MarkerFunction, TilingConfig) {
    let action = match d {
        1 => RotationAction::default_1d(),
        _ => RotationAction::default_2d(),
    };
    let marker = default_marker(&action).expect("default marker");
    let config = TilingConfig::for_marker(&marker, d);
    (action, marker, config)
}

#[test]
fn criterion_1_tiling_invariants_hold_on_both_defaults() {
    let start = Instant::now();
    for d in [1usize, 2] {
        let (action, marker, config) = system(d);
        let report = verify_tiling_properties(&action, &marker, &config, 1234, TILING_TRIALS)
            .expect("tiling report");
        println!("d={d}: samples={} skipped={}", report.samples, report.skipped);
        for p in &report.properties {
            println!(
                "  {}: checked={} violations={} worst={:.3e} pass={}",
                p.name, p.checked, p.violations, p.worst, p.pass
            );
            assert!(p.checked > 0, "d={d} {}: nothing checked", p.name);
            assert_eq!(p.violations, 0, "d={d} {}: violations", p.name);
        }
        assert!(report.properties.len() >= 6, "d={d}: fewer than six properties");
        assert!(report.pass, "d={d}: tiling invariants failed");
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!("elapsed: {elapsed:.1}s (budget {TILING_BUDGET_SECS}s)");
    assert!(elapsed <= TILING_BUDGET_SECS, "over the {TILING_BUDGET_SECS}s budget: {elapsed:.1}s");
}

#[test]
fn criterion_2_window_bound_holds_for_random_bodies() {
    let start = Instant::now();
    for d in [1usize, 2] {
        for epsilon in [0.2, 0.5] {
            for r in [1.0, 2.0] {
                let n0 = find_n0(epsilon, r, d).expect("window side");
                let report = verify_lemma(&LemmaParams {
                    d,
                    epsilon,
                    r,
                    bodies: LEMMA_BODIES,
                    seed: 5,
                    mc_samples: LEMMA_MC_SAMPLES,
                })
                .expect("lemma report");
                let worst = report
                    .bodies
                    .iter()
                    .map(|b| b.fraction)
                    .fold(0.0_f64, f64::max);
                println!(
                    "d={d} epsilon={epsilon} r={r}: N0={n0} worst_fraction={worst:.4} pass={}",
                    report.pass
                );
                for body in &report.bodies {
                    assert!(
                        body.fraction < epsilon,
                        "d={d} epsilon={epsilon} r={r}: fraction {} at window {}",
                        body.fraction,
                        body.window
                    );
                }
                assert!(report.pass);
                if d == 1 {
                    let closed = (8.0 * (r + 1.0) / epsilon).floor() as u64 + 1;
                    assert_eq!(n0, closed, "closed form mismatch at epsilon={epsilon} r={r}");
                }
            }
        }
    }
    assert_eq!(find_n0(0.5, 1.0, 1).expect("window side"), 33, "anchor value");
    let elapsed = start.elapsed().as_secs_f64();
    println!("elapsed: {elapsed:.1}s (budget {LEMMA_BUDGET_SECS}s)");
    assert!(elapsed <= LEMMA_BUDGET_SECS, "over the {LEMMA_BUDGET_SECS}s budget: {elapsed:.1}s");
}

#[test]
fn criterion_3_steiner_volume_matches_closed_form_and_monte_carlo() {
    let exact = steiner_outer_volume_box(10, 1.0, 2);
    let closed = 140.0 + std::f64::consts::PI;
    println!("exact={exact:.12} closed={closed:.12} diff={:.3e}", (exact - closed).abs());
    assert!((exact - closed).abs() < STEINER_ABS_TOL, "closed form off: {exact} vs {closed}");

    // Uniform samples over [-1, 11]^2; a point lies in the outer
    // parallel body iff its distance to the box is at most 1.
    let mut state = 0x9e3779b97f4a7c15_u64;
    let mut next = move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        (z ^ (z >> 31)) as f64 / u64::MAX as f64
    };
    let mut hits = 0u64;
    for _ in 0..STEINER_MC_SAMPLES {
        let x = -1.0 + 12.0 * next();
        let y = -1.0 + 12.0 * next();
        let dx = (-x).max(x - 10.0).max(0.0);
        let dy = (-y).max(y - 10.0).max(0.0);
        if dx * dx + dy * dy <= 1.0 {
            hits += 1;
        }
    }
    let mc = 144.0 * hits as f64 / STEINER_MC_SAMPLES as f64;
    let rel = (mc - exact).abs() / exact;
    println!("monte_carlo={mc:.4} rel_err={rel:.4}");
    assert!(rel < STEINER_MC_REL_TOL, "monte carlo off by {rel:.4}");
}

#[test]
fn criterion_4_towers_are_disjoint_and_cover_deep_samples() {
    for d in [1usize, 2] {
        let (action, marker, config) = system(d);
        for n in [2u64, 3, 4] {
            let spec = TowerSpec::new(0, n, d).expect("tower spec");
            let disjoint =
                verify_tower_disjoint(&action, &marker, &config, &spec, 42, TOWER_SAMPLES)
                    .expect("disjointness report");
            let coverage =
                verify_tower_coverage(&action, &marker, &config, &spec, 43, TOWER_SAMPLES)
                    .expect("coverage report");
            println!(
                "d={d} N={n}: hits={} overlaps={} mismatches={} qualifying={} violations={}",
                disjoint.membership_hits,
                disjoint.overlap_violations,
                disjoint.residue_mismatches,
                coverage.qualifying,
                coverage.qualifying_violations
            );
            // The planar base is legitimately unvisited at these marker
            // radii (clearances top out near 2.7, below N*sqrt(2)); the
            // weakened controls below prove the checkers still bite.
            assert_eq!(disjoint.overlap_violations, 0, "d={d} N={n}: overlaps");
            assert_eq!(disjoint.residue_mismatches, 0, "d={d} N={n}: mismatches");
            assert!(disjoint.pass);
            assert_eq!(coverage.qualifying_violations, 0, "d={d} N={n}: coverage");
            assert!(coverage.pass);
            if d == 1 {
                assert!(disjoint.membership_hits > 0, "N={n}: circle checks were vacuous");
            }
        }
    }

    // Negative controls: a zero clearance threshold must be caught by
    // both checkers in both dimensions.
    for (d, n) in [(1usize, 3u64), (2, 2)] {
        let (action, marker, config) = system(d);
        let weak = TowerSpec::with_threshold(0, n, 0.0).expect("weak spec");
        let disjoint =
            verify_tower_disjoint(&action, &marker, &config, &weak, 5, CONTROL_SAMPLES)
                .expect("control disjointness");
        let coverage =
            verify_tower_coverage(&action, &marker, &config, &weak, 6, CONTROL_SAMPLES)
                .expect("control coverage");
        println!(
            "control d={d} N={n}: overlaps={} mismatches={} coverage_violations={}",
            disjoint.overlap_violations,
            disjoint.residue_mismatches,
            coverage.qualifying_violations
        );
        assert!(disjoint.overlap_violations > 0, "d={d}: control produced no overlaps");
        assert!(!disjoint.pass);
        assert!(coverage.qualifying_violations > 0, "d={d}: control coverage fired nothing");
        assert!(!coverage.pass);
    }
}

#[test]
fn criterion_5_two_tower_properties_pass_at_reference_parameters() {
    let mut all_pass = true;
    for (d, n, epsilon) in [(1usize, 3u64, 0.2), (2, 2, 0.3)] {
        let (action, marker, config) = system(d);
        let result = build_two_towers(
            &action,
            &marker,
            &config,
            n,
            epsilon,
            TwoTowersOptions::default(),
            9,
            4,
        )
        .expect("decomposition");
        let p = &result.params;
        println!(
            "d={d} N={n} epsilon={epsilon}: n0={} n1={} r0={:.3} r1={:.3} pieces={} groups={}",
            p.n0, p.n1, p.r0, p.r1, p.pieces, p.groups
        );
        for prop in &result.properties {
            println!(
                "  {}: checked={} violations={} vacuous={} pass={}",
                prop.name, prop.checked, prop.violations, prop.vacuous, prop.pass
            );
        }
        // Why this fails at desk scale: the refined tower needs every
        // piece shifted with clearance r1 + 2*r0 + 1 + sqrt(d)/2 — over
        // a thousand lattice steps here — while the cut-down tiling can
        // guarantee less than one. Strict mode reports that requirement:
        match build_two_towers(
            &action,
            &marker,
            &config,
            n,
            epsilon,
            TwoTowersOptions { strict: true, merge_groups_debug: false },
            9,
            4,
        ) {
            Err(e) => println!("  strict mode: {e}"),
            Ok(_) => println!("  strict mode: accepted"),
        }
        let bound = match d {
            1 => 3,
            _ => 9,
        };
        assert!(p.groups <= bound, "d={d}: {} groups exceed {bound}", p.groups);
        all_pass &= result.pass;
    }
    assert!(all_pass, "a sampled two-tower property failed; analysis above");
}

#[test]
fn criterion_6_comparison_certificate_and_rank_domination() {
    // Margin sets: mu(E) stays below a quarter of mu(F) with 20% slack.
    let (action, marker, config) = system(1);
    let (e, f, epsilon) = default_pipeline_sets(1).expect("default sets");
    let mu_e = measure_estimate(&e, 1, 2000).expect("mu(E)");
    let mu_f = measure_estimate(&f, 2, 2000).expect("mu(F)");
    let (mu_e, mu_f) = (
        mu_e.exact_disjoint.expect("E is one small ball"),
        mu_f.exact_disjoint.expect("F is one small ball"),
    );
    println!("mu(E)={mu_e:.4} vs quarter bound {:.4}", 0.25 * mu_f * 0.8);
    assert!(mu_e <= 0.25 * mu_f * 0.8, "margin hypothesis violated");
    let cert = certify_comparison(&action, &marker, &config, e, f, epsilon, 11, 12)
        .expect("certificate");
    for stage in &cert.stages {
        println!("stage {}: pass={} worst={:.3e}", stage.name, stage.pass, stage.worst_case);
    }
    println!("overall={} n={} delta={:.5}", cert.overall, cert.n_density, cert.delta);
    assert!(cert.overall, "margin sets must certify");

    // Coinciding nonempty sets must fail at the density stage.
    let same = || {
        OpenSet::new(vec![Ball {
            center: TorusPoint::new(vec![0.7]).expect("point"),
            radius: 0.2,
        }])
        .expect("set")
    };
    let cert = certify_comparison(&action, &marker, &config, same(), same(), epsilon, 2, 4)
        .expect("certificate");
    println!("coinciding sets: overall={}", cert.overall);
    assert!(!cert.overall);
    let density = cert.stages.iter().find(|s| s.name == "density").expect("density stage");
    assert!(!density.pass, "density stage should reject E = F");

    // Rank domination triples.
    assert!(check_rank_domination(1, 5));
    assert!(!check_rank_domination(2, 5));
    assert!(!check_rank_domination(0, 4));
}

#[test]
fn criterion_7_ocap_of_a_short_interval_is_near_its_measure() {
    let action = RotationAction::default_1d();
    let set = OpenSet::new(vec![Ball {
        center: TorusPoint::new(vec![0.5]).expect("point"),
        radius: 0.1,
    }])
    .expect("interval of length 0.2");
    let estimate = ocap_estimate(&action, &set, OCAP_WINDOW, 0, OCAP_SAMPLES).expect("estimate");
    println!("estimate={estimate:.4} range=[{}, {}]", OCAP_RANGE.0, OCAP_RANGE.1);
    assert!(
        (OCAP_RANGE.0..=OCAP_RANGE.1).contains(&estimate),
        "estimate {estimate} outside [{}, {}]",
        OCAP_RANGE.0,
        OCAP_RANGE.1
    );
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zdtl"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_8_every_command_is_deterministic() {
    let runs: &[&[&str]] = &[
        &["marker", "--samples", "30", "--seed", "3"],
        &["tiling", "--samples", "3", "--seed", "3"],
        &["tiling", "--d", "2", "--format", "svg", "--seed", "5"],
        &["tower", "--N", "2", "--samples", "30", "--seed", "3"],
        &["two-towers", "--N", "3", "--samples", "2", "--seed", "3"],
        &["lattice", "--d", "1", "--r", "1", "--epsilon", "0.5", "--samples", "2", "--seed", "3"],
        &["ocap", "--N", "50", "--samples", "10", "--seed", "3"],
        &["certify", "--samples", "3", "--seed", "2"],
    ];
    for args in runs {
        let first = run_cli(args);
        let second = run_cli(args);
        println!(
            "{}: {} bytes, exit {:?}",
            args.join(" "),
            first.stdout.len(),
            first.status.code()
        );
        assert!(!first.stdout.is_empty(), "{}: no report", args.join(" "));
        assert_eq!(first.stdout, second.stdout, "{}: stdout differs", args.join(" "));
        assert_eq!(first.status.code(), second.status.code(), "{}: exit differs", args.join(" "));
    }
}
