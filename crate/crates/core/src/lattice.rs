//! Lattice points near convex boundaries.
//!
//! The counting lemma exercised here: for any convex body `V` and the
//! window `{0, .., N-1}^d`, the number of lattice points within `r` of
//! the boundary of `V` is at most the volume of the `(r + sqrt(d))`-tube
//! around the part of the boundary meeting the window (each such point
//! contributes a disjoint unit cell inside the tube), and for convex
//! bodies that tube volume is dominated by twice the tube volume of the
//! window box itself. Consequently the fraction of near-boundary points
//! drops below any `epsilon` once
//!
//! ```text
//! 2 * vol(tube_E of [0,N]^d) / N^d < epsilon,   E = r + sqrt(d),
//! ```
//!
//! and `find_n0` returns the smallest such `N` by direct scan.

use rand::Rng;
use serde::Serialize;

use crate::dynsys::{box_window, stream_rng};
use crate::geometry::{convex_hull, point_segment_distance};
use crate::{Error, Result};

/// Convex body given explicitly: an interval on the line or a convex
/// polygon (counterclockwise vertices; two vertices degenerate to a
/// segment, whose boundary is itself).
#[derive(Debug, Clone, Serialize)]
pub enum ConvexBody {
    Interval { lo: f64, hi: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl ConvexBody {
    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Interval { .. } => 1,
            ConvexBody::Polygon { .. } => 2,
        }
    }

    /// Distance from `p` to the body's boundary, valid inside and out.
    pub fn boundary_distance(&self, p: &[f64]) -> f64 {
        match self {
            ConvexBody::Interval { lo, hi } => (p[0] - lo).abs().min((p[0] - hi).abs()),
            ConvexBody::Polygon { vertices } => {
                let n = vertices.len();
                if n == 1 {
                    let v = vertices[0];
                    return ((p[0] - v[0]).powi(2) + (p[1] - v[1]).powi(2)).sqrt();
                }
                (0..n)
                    .map(|i| point_segment_distance(p, &vertices[i], &vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Axis-aligned bounding box as (mins, maxs).
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ConvexBody::Interval { lo, hi } => (vec![*lo], vec![*hi]),
            ConvexBody::Polygon { vertices } => {
                let mut mins = vec![f64::INFINITY; 2];
                let mut maxs = vec![f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        mins[k] = mins[k].min(v[k]);
                        maxs[k] = maxs[k].max(v[k]);
                    }
                }
                (mins, maxs)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryCountReport {
    pub count: u64,
    pub window: u64,
    pub fraction: f64,
    pub epsilon: f64,
    pub within_epsilon: bool,
}

/// Counts lattice points of `{0, .., n-1}^d` within `r` of the body's
/// boundary and compares the fraction against `epsilon`.
pub fn count_near_boundary(body: &ConvexBody, r: f64, n: u64, epsilon: f64) -> Result<BoundaryCountReport> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be >= 0, got {r}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("window size must be positive".into()));
    }
    let d = body.dim();
    let mut count = 0;
    for p in box_window(d, n) {
        if body.boundary_distance(&p.as_f64()) <= r {
            count += 1;
        }
    }
    let window = (n as f64).powi(d as i32) as u64;
    let fraction = count as f64 / window as f64;
    Ok(BoundaryCountReport { count, window, fraction, epsilon, within_epsilon: fraction < epsilon })
}

/// Volume of the unit ball in dimension `k` via the two-step recurrence
/// `kappa_k = kappa_{k-2} * 2 pi / k`.
pub fn unit_ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(k - 2) * 2.0 * std::f64::consts::PI / k as f64,
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut out = 1.0;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

/// Steiner formula for the outer parallel volume of the box `[0, N]^d`
/// at distance `e`: `sum_k C(d,k) N^{d-k} kappa_k e^k`.
pub fn steiner_outer_volume_box(n: u64, e: f64, d: usize) -> f64 {
    (0..=d)
        .map(|k| binomial(d, k) * (n as f64).powi((d - k) as i32) * unit_ball_volume(k) * e.powi(k as i32))
        .sum()
}

/// Volume of the two-sided boundary shell `{ y : dist(y, box boundary)
/// <= e }`: outer parallel body minus the eroded core.
pub fn boundary_shell_volume_box(n: u64, e: f64, d: usize) -> f64 {
    steiner_outer_volume_box(n, e, d) - (n as f64 - 2.0 * e).max(0.0).powi(d as i32)
}

const FIND_N0_CAP: u64 = 10_000_000;

/// Smallest window size `N` with `2 vol(shell_{r + sqrt(d)}) / N^d <
/// epsilon`.
pub fn find_n0(epsilon: f64, r: f64, d: usize) -> Result<u64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be >= 0, got {r}")));
    }
    let e = r + (d as f64).sqrt();
    for n in 1..FIND_N0_CAP {
        if 2.0 * boundary_shell_volume_box(n, e, d) / (n as f64).powi(d as i32) < epsilon {
            return Ok(n);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no window below {FIND_N0_CAP} meets epsilon = {epsilon} at radius {r}"
    )))
}

/// Random convex body whose centroid lands inside `[0, N]^d`.
pub fn random_convex_body<R: Rng>(rng: &mut R, d: usize, n: u64) -> Result<ConvexBody> {
    let nf = n as f64;
    match d {
        1 => {
            let c = rng.gen_range(0.0..nf);
            let h = rng.gen_range(0.5..nf / 2.0 + 0.5);
            Ok(ConvexBody::Interval { lo: c - h, hi: c + h })
        }
        2 => {
            let cx = rng.gen_range(0.0..nf);
            let cy = rng.gen_range(0.0..nf);
            let k = rng.gen_range(4..=10);
            let pts: Vec<[f64; 2]> = (0..k)
                .map(|_| {
                    let ang = rng.gen_range(0.0..std::f64::consts::TAU);
                    let rad = rng.gen_range(1.0..nf / 2.0 + 1.0);
                    [cx + rad * ang.cos(), cy + rad * ang.sin()]
                })
                .collect();
            let hull = convex_hull(&pts);
            Ok(ConvexBody::Polygon { vertices: hull })
        }
        _ => Err(Error::BoundaryDistanceUnsupported { d }),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaBodyOutcome {
    pub count: u64,
    pub window: u64,
    pub fraction: f64,
    pub tube_volume_mc: f64,
    /// Unit-cell packing: count cannot exceed the tube volume (up to
    /// Monte Carlo noise).
    pub packing_ok: bool,
    /// The lemma's conclusion: the near-boundary fraction is below
    /// epsilon at the window size `find_n0` returned.
    pub fraction_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaParams {
    pub d: usize,
    pub epsilon: f64,
    pub r: f64,
    pub bodies: usize,
    pub seed: u64,
    pub mc_samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub n0: u64,
    pub params: LemmaParams,
    pub bodies: Vec<LemmaBodyOutcome>,
    pub steiner_exact: f64,
    pub steiner_mc: f64,
    pub steiner_ok: bool,
    pub pass: bool,
}

/// Distance from a point to the boundary of the box `[0, N]^d`.
fn box_boundary_distance(p: &[f64], n: f64) -> f64 {
    let mut inside = f64::INFINITY;
    let mut out_sq = 0.0;
    for &c in p {
        inside = inside.min(c.min(n - c));
        let excess = (-c).max(c - n).max(0.0);
        out_sq += excess * excess;
    }
    if inside >= 0.0 {
        inside
    } else {
        out_sq.sqrt()
    }
}

/// End-to-end check of the counting lemma on random convex bodies: the
/// exact near-boundary count at the window `find_n0` prescribes stays
/// below `epsilon`, the unit-cell packing bound holds against a Monte
/// Carlo tube volume, and the Steiner formula agrees with Monte Carlo
/// on the box shell itself.
pub fn verify_lemma(params: &LemmaParams) -> Result<LemmaReport> {
    let n0 = find_n0(params.epsilon, params.r, params.d)?;
    let e = params.r + (params.d as f64).sqrt();
    let mut bodies = Vec::new();
    for trial in 0..params.bodies {
        let mut rng = stream_rng(params.seed, trial as u64);
        let body = random_convex_body(&mut rng, params.d, n0)?;
        let report = count_near_boundary(&body, params.r, n0, params.epsilon)?;
        let (mins, maxs) = body.bounding_box();
        let lo: Vec<f64> = mins.iter().map(|v| v - e - 0.5).collect();
        let hi: Vec<f64> = maxs.iter().map(|v| v + e + 0.5).collect();
        let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let mut hits = 0u64;
        for _ in 0..params.mc_samples {
            let q: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| rng.gen_range(*a..*b)).collect();
            if body.boundary_distance(&q) <= e {
                hits += 1;
            }
        }
        let p_hat = hits as f64 / params.mc_samples as f64;
        let tube_volume_mc = p_hat * box_vol;
        let sigma = box_vol * (p_hat * (1.0 - p_hat) / params.mc_samples as f64).sqrt();
        let packing_ok = (report.count as f64) <= tube_volume_mc + 4.0 * sigma + 1.0;
        bodies.push(LemmaBodyOutcome {
            count: report.count,
            window: report.window,
            fraction: report.fraction,
            tube_volume_mc,
            packing_ok,
            fraction_ok: report.within_epsilon,
        });
    }

    // Steiner formula versus Monte Carlo on the window box itself.
    let mut rng = stream_rng(params.seed, params.bodies as u64);
    let steiner_exact = boundary_shell_volume_box(n0, e, params.d);
    let span = n0 as f64 + 2.0 * (e + 0.5);
    let offset = -(e + 0.5);
    let sample_vol = span.powi(params.d as i32);
    let mut hits = 0u64;
    for _ in 0..params.mc_samples {
        let q: Vec<f64> = (0..params.d).map(|_| offset + rng.gen::<f64>() * span).collect();
        if box_boundary_distance(&q, n0 as f64) <= e {
            hits += 1;
        }
    }
    let steiner_mc = hits as f64 / params.mc_samples as f64 * sample_vol;
    let rel = (steiner_mc - steiner_exact).abs() / steiner_exact;
    let mc_tol = 4.0 * (1.0 / (params.mc_samples as f64).sqrt()) * sample_vol / steiner_exact;
    let steiner_ok = rel <= mc_tol.max(0.02);
    let pass = steiner_ok && bodies.iter().all(|b| b.packing_ok && b.fraction_ok);
    Ok(LemmaReport { n0, params: params.clone(), bodies, steiner_exact, steiner_mc, steiner_ok, pass })
}
