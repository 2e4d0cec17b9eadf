//! Hot-path benchmarks: origin-cell reads on both defaults, the
//! near-boundary lattice scan, and an orbit-capacity window.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use zdtl_core::comparison::{ocap_estimate, Ball, OpenSet};
use zdtl_core::dynsys::{sample_points, RotationAction, TorusPoint};
use zdtl_core::lattice::{count_near_boundary, find_n0, ConvexBody};
use zdtl_core::marker::default_marker;
use zdtl_core::tiling::{origin_cell, TilingConfig};

fn origin_cell_reads(c: &mut Criterion) {
    for d in [1usize, 2] {
        let action = match d {
            1 => RotationAction::default_1d(),
            _ => RotationAction::default_2d(),
        };
        let marker = default_marker(&action).expect("default marker");
        let config = TilingConfig::for_marker(&marker, d);
        let points = sample_points(7, 64, d);
        let mut idx = 0usize;
        c.bench_function(&format!("origin_cell_cut_depth_d{d}"), |b| {
            b.iter_batched(
                || {
                    idx = (idx + 1) % points.len();
                    points[idx].clone()
                },
                |x| origin_cell(&action, &marker, &config, &x, config.cut_depth()).expect("cell"),
                BatchSize::SmallInput,
            )
        });
    }
}

fn boundary_scan(c: &mut Criterion) {
    let n = find_n0(0.5, 1.0, 2).expect("window side");
    let body = ConvexBody::Polygon {
        vertices: vec![[5.0, 5.0], [60.0, 8.0], [70.0, 55.0], [12.0, 62.0]],
    };
    c.bench_function("near_boundary_scan_plane", |b| {
        b.iter(|| count_near_boundary(&body, 1.0, n, 0.5).expect("count"))
    });
}

fn ocap_window(c: &mut Criterion) {
    let action = RotationAction::default_1d();
    let set = OpenSet::new(vec![Ball {
        center: TorusPoint::new(vec![0.5]).expect("point"),
        radius: 0.1,
    }])
    .expect("set");
    c.bench_function("ocap_window_1000", |b| {
        b.iter(|| ocap_estimate(&action, &set, 1000, 0, 16).expect("estimate"))
    });
}

criterion_group!(benches, origin_cell_reads, boundary_scan, ocap_window);
criterion_main!(benches);
