//! Equivariant tilings of `R^d` from marker orbits.
//!
//! For a point `x` on the torus, the active centers are the lattice
//! vectors `n` whose orbit position lands in the marker support; each
//! carries weight `t_n = 1 / phi(T^n x) >= 1`. Lifting center `n` to
//! `(n, t_n)` in `R^{d+1}` and taking the Voronoi diagram of the lifted
//! points, the cross-section at level `-depth` tiles `R^d` with convex
//! cells. Cell membership reduces to halfspaces in the cross-section:
//! `a` lies in the cell of `n0` iff for every competitor `m`
//!
//! ```text
//! 2 (m - n0) . a <= |m|^2 - |n0|^2 + (t_m - t_n0) (2 depth + t_m + t_n0)
//! ```
//!
//! (the factored right-hand side avoids cancellation between `depth^2`
//! terms). Covering pins every cell inside a ball of radius
//! `L + sqrt(d)/2` around its center, so competitors beyond the
//! truncation radius `2 (L + sqrt(d)) + 1` are always redundant.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynsys::{
    lattice_ball, sample_points, stream_rng, LatticeVector, RotationAction, TorusPoint,
};
use crate::geometry::{
    clip_interval, clip_polygon, dist, hausdorff_distance, ConvexRegion, Halfspace,
};
use crate::marker::MarkerFunction;
use crate::{Error, Result, TAU_GEO};

/// Cross-section depth, cut-down scale, and competitor truncation.
#[derive(Debug, Clone, Serialize)]
pub struct TilingConfig {
    /// Cross-section level `H` (cells are cut at `-H`).
    pub depth: f64,
    /// Cut-down scale `s > 1`; the deep tiling sits at level `-s*H`.
    pub scale: f64,
    /// Competitors farther than this from a cell's center are skipped.
    pub truncation: f64,
}

impl TilingConfig {
    pub fn new(depth: f64, scale: f64, truncation: f64) -> Result<Self> {
        if !(depth.is_finite() && depth >= 1.0) {
            return Err(Error::InvalidParameter(format!("depth must be >= 1, got {depth}")));
        }
        if !(scale.is_finite() && scale > 1.0) {
            return Err(Error::InvalidParameter(format!("scale must be > 1, got {scale}")));
        }
        if !(truncation.is_finite() && truncation >= 1.0) {
            return Err(Error::InvalidParameter(format!("truncation must be >= 1, got {truncation}")));
        }
        Ok(Self { depth, scale, truncation })
    }

    /// Derives the scales from the marker: with reach `L + sqrt(d)`, the
    /// depth `reach^2 + 1` makes every displacement bound hold, and
    /// truncation `2 reach + 1` strictly exceeds twice the cell radius
    /// `L + sqrt(d)/2`, so no binding wall is ever skipped.
    pub fn for_marker(marker: &MarkerFunction, d: usize) -> Self {
        let reach = marker.covering as f64 + (d as f64).sqrt();
        Self { depth: reach * reach + 1.0, scale: 1.5, truncation: 2.0 * reach + 1.0 }
    }

    pub fn cut_depth(&self) -> f64 {
        self.scale * self.depth
    }
}

/// Active center: a lattice vector inside the marker support together
/// with its weight `t = 1 / phi`.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedCenter {
    pub label: LatticeVector,
    pub weight: f64,
}

/// One wall of a cell: the halfspace contributed by a competitor,
/// keyed by the competitor's offset from the cell center.
#[derive(Debug, Clone, Serialize)]
pub struct CellWall {
    pub competitor_offset: LatticeVector,
    pub halfspace: Halfspace,
}

/// Cross-section cell of one center at one depth. `region` is the wall
/// intersection clipped to the truncation box; for marker-derived
/// centers the box is never binding, so `region` is the exact cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellCrossSection {
    pub label: LatticeVector,
    pub weight: f64,
    pub depth: f64,
    pub walls: Vec<CellWall>,
    pub region: ConvexRegion,
}

impl CellCrossSection {
    pub fn is_empty(&self) -> bool {
        self.region.is_empty()
    }

    /// Signed wall margin: distance from `p` to the nearest wall plane,
    /// positive iff `p` satisfies every wall. For interior points this
    /// equals the exact distance to the cell boundary (every stored
    /// wall plane is disjoint from the interior, so the segment to the
    /// nearest plane point crosses the boundary first).
    pub fn margin(&self, p: &[f64]) -> Result<f64> {
        if self.walls.is_empty() {
            return Err(Error::UnboundedCell(format!("cell {} has no walls", self.label)));
        }
        Ok(self
            .walls
            .iter()
            .map(|w| -w.halfspace.signed_excess(p))
            .fold(f64::INFINITY, f64::min))
    }

    /// Distance from `p` to the cell boundary: wall margin inside,
    /// distance to the region outside.
    pub fn boundary_distance(&self, p: &[f64]) -> Result<f64> {
        if self.region.is_empty() {
            return Err(Error::UnboundedCell(format!("cell {} is empty", self.label)));
        }
        let margin = self.margin(p)?;
        if margin >= 0.0 {
            Ok(margin)
        } else {
            self.region
                .distance_to_point(p)
                .ok_or_else(|| Error::UnboundedCell(format!("cell {} has no region", self.label)))
        }
    }
}

/// Active centers of one torus point within a lattice radius, with a
/// label index for cell construction and ownership queries.
#[derive(Debug, Clone)]
pub struct CenterField {
    d: usize,
    centers: Vec<WeightedCenter>,
    index: HashMap<LatticeVector, usize>,
    radius: f64,
}

impl CenterField {
    pub fn gather(
        action: &RotationAction,
        marker: &MarkerFunction,
        x: &TorusPoint,
        radius: f64,
    ) -> Result<Self> {
        let d = action.dim_lattice();
        let mut centers = Vec::new();
        for n in lattice_ball(d, radius) {
            let phi = marker.phi(&action.act(x, &n)?)?;
            if phi > TAU_GEO {
                centers.push(WeightedCenter { label: n, weight: 1.0 / phi });
            }
        }
        Ok(Self::from_centers(centers, d, radius))
    }

    /// Synthetic fields for tests: caller supplies the centers directly.
    pub fn from_centers(centers: Vec<WeightedCenter>, d: usize, radius: f64) -> Self {
        let index = centers.iter().enumerate().map(|(i, c)| (c.label.clone(), i)).collect();
        Self { d, centers, index, radius }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn centers(&self) -> &[WeightedCenter] {
        &self.centers
    }

    pub fn get(&self, label: &LatticeVector) -> Option<&WeightedCenter> {
        self.index.get(label).map(|&i| &self.centers[i])
    }

    /// Builds the cross-section cell of `label` at `depth`, using
    /// competitors within `truncation`.
    pub fn cell(&self, label: &LatticeVector, depth: f64, truncation: f64) -> Result<CellCrossSection> {
        let center = self.get(label).ok_or_else(|| {
            Error::InvalidParameter(format!("label {label} is not an active center"))
        })?;
        let tn = center.weight;
        let nsq = sum_sq(label);
        let mut walls = Vec::new();
        for c in &self.centers {
            if c.label == *label {
                continue;
            }
            let g = c.label.sub(label);
            if g.norm_l2() > truncation {
                continue;
            }
            let tm = c.weight;
            let rhs = sum_sq(&c.label) - nsq + (tm - tn) * (2.0 * depth + tm + tn);
            walls.push(CellWall {
                competitor_offset: g.clone(),
                halfspace: Halfspace::new(g.as_f64().iter().map(|v| 2.0 * v).collect(), rhs),
            });
        }
        let hs: Vec<Halfspace> = walls.iter().map(|w| w.halfspace.clone()).collect();
        let n0 = label.as_f64();
        let half_width = truncation + 1.0;
        let region = match self.d {
            1 => clip_interval(&hs, n0[0] - half_width, n0[0] + half_width),
            2 => clip_polygon(&hs, &n0, half_width),
            d => return Err(Error::InvalidParameter(format!("cells exist for d in {{1,2}}, got {d}"))),
        };
        Ok(CellCrossSection { label: label.clone(), weight: tn, depth, walls, region })
    }

    /// Owner of a point in the cross-section at `depth`: the center
    /// minimizing the lifted distance `sqrt(|p - n|^2 + (depth + t)^2)`.
    /// The field must be wide enough to contain the true owner and the
    /// runner-up (for queries at the origin, radius `>= L + truncation`
    /// suffices since the owner satisfies `|n| <= L`).
    pub fn owner(&self, p: &[f64], depth: f64) -> Result<OwnerQuery> {
        let mut best: Option<(usize, f64)> = None;
        let mut second = f64::INFINITY;
        for (i, c) in self.centers.iter().enumerate() {
            let dx = dist(p, &c.label.as_f64());
            let lifted = (dx * dx + (depth + c.weight) * (depth + c.weight)).sqrt();
            match best {
                None => best = Some((i, lifted)),
                Some((_, b)) if lifted < b => {
                    second = b;
                    best = Some((i, lifted));
                }
                Some(_) => second = second.min(lifted),
            }
        }
        let (i, lifted) = best.ok_or_else(|| {
            Error::InvalidParameter("ownership query over an empty center field".into())
        })?;
        Ok(OwnerQuery { label: self.centers[i].label.clone(), lifted_distance: lifted, runner_up_gap: second - lifted })
    }
}

fn sum_sq(n: &LatticeVector) -> f64 {
    n.components().iter().map(|&c| (c * c) as f64).sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct OwnerQuery {
    pub label: LatticeVector,
    pub lifted_distance: f64,
    /// Runner-up lifted distance minus the winner's; near zero means
    /// the point sits on (or numerically on) a cell boundary.
    pub runner_up_gap: f64,
}

/// Origin's cell in the cross-section, or a boundary verdict when the
/// ownership gap is below [`TAU_GEO`].
#[derive(Debug, Clone, Serialize)]
pub enum OriginLocation {
    Interior(OriginCell),
    NearBoundary { owner: LatticeVector, runner_up_gap: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct OriginCell {
    pub cell: CellCrossSection,
    /// Exact distance from the origin to the cell boundary.
    pub boundary_distance: f64,
    pub owner_gap: f64,
}

pub fn origin_cell_from_field(
    field: &CenterField,
    depth: f64,
    truncation: f64,
) -> Result<OriginLocation> {
    let p0 = vec![0.0; field.dim()];
    let query = field.owner(&p0, depth)?;
    if query.runner_up_gap <= TAU_GEO {
        return Ok(OriginLocation::NearBoundary { owner: query.label, runner_up_gap: query.runner_up_gap });
    }
    let cell = field.cell(&query.label, depth, truncation)?;
    let margin = cell.margin(&p0)?;
    if margin <= 0.0 {
        return Err(Error::TilingInconsistency);
    }
    Ok(OriginLocation::Interior(OriginCell { cell, boundary_distance: margin, owner_gap: query.runner_up_gap }))
}

/// Origin's cell at `depth` for torus point `x`; gathers a field wide
/// enough for the owner (within the covering radius of the origin) and
/// all of its competitors.
pub fn origin_cell(
    action: &RotationAction,
    marker: &MarkerFunction,
    config: &TilingConfig,
    x: &TorusPoint,
    depth: f64,
) -> Result<OriginLocation> {
    let radius = marker.covering as f64 + config.truncation + 1.0;
    let field = CenterField::gather(action, marker, x, radius)?;
    origin_cell_from_field(&field, depth, config.truncation)
}

/// All nonempty cells at `depth` whose labels lie within `radius` of
/// the origin (labels must be inside the field).
pub fn cells_in_window(
    field: &CenterField,
    radius: f64,
    depth: f64,
    truncation: f64,
) -> Result<Vec<CellCrossSection>> {
    let mut out = Vec::new();
    for c in field.centers() {
        if c.label.norm_l2() > radius {
            continue;
        }
        let cell = field.cell(&c.label, depth, truncation)?;
        if !cell.is_empty() {
            out.push(cell);
        }
    }
    Ok(out)
}

/// Image of `(a, -depth)` under the projection from the lifted center
/// `(n, t)` onto the level `-scale * depth`, read back in `R^d`:
/// `a + ((scale - 1) depth / (scale depth + t)) (n - a)`.
pub fn h_projective_image(a: &[f64], n: &[f64], t: f64, scale: f64, depth: f64) -> Vec<f64> {
    let mu = (scale - 1.0) * depth / (scale * depth + t);
    a.iter().zip(n).map(|(ai, ni)| ai + mu * (ni - ai)).collect()
}

/// Affine cut-down map `a -> a / scale + (1 - 1/scale) n`.
pub fn cut_down_point(a: &[f64], n: &[f64], scale: f64) -> Vec<f64> {
    a.iter().zip(n).map(|(ai, ni)| ai / scale + (1.0 - 1.0 / scale) * ni).collect()
}

/// Upper bound on the weight of any center with a nonempty cell at
/// `depth`. A point `a` of the cell has an active weight-1 competitor
/// within `rho = L + sqrt(d)/2` (nearest lattice point plus covering),
/// so `(depth + t)^2 <= (depth + 1)^2 + rho^2`.
pub fn weight_cap(depth: f64, covering: u32, d: usize) -> f64 {
    let rho = covering as f64 + (d as f64).sqrt() / 2.0;
    ((depth + 1.0) * (depth + 1.0) + rho * rho).sqrt() - depth
}

/// Smallest squared lattice norm strictly above the separation scale.
fn min_excess_norm_sq(d: usize, separation: u32) -> f64 {
    let m = separation as f64;
    lattice_ball(d, m + 2.0)
        .iter()
        .map(|n| n.norm_l2())
        .filter(|&v| v > m)
        .fold(f64::INFINITY, f64::min)
        .powi(2)
}

/// Radius guaranteed by the cut-down containment: if `a` lies in the
/// deep cell of `n`, the ball of this radius around `a/s + (1-1/s) n`
/// lies in the depth-`H` cell of `n`. Per competitor at offset `g` the
/// admissible radius is `(1-1/s) (|g|^2 + t_m^2 - t_n^2) / (2 |g|)`,
/// which is increasing in `|g|`; minimizing over `t_m >= 1`,
/// `t_n <= weight_cap(sH)` and `|g| > M` gives the bound.
pub fn guaranteed_cut_radius(marker: &MarkerFunction, config: &TilingConfig, d: usize) -> Result<f64> {
    let gsq = min_excess_norm_sq(d, marker.separation);
    let t_cut = weight_cap(config.cut_depth(), marker.covering, d);
    let r = (1.0 - 1.0 / config.scale) * (gsq + 1.0 - t_cut * t_cut) / (2.0 * gsq.sqrt());
    if r <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "cut-down guarantee degenerates (radius {r}); marker separation too small for this depth"
        )));
    }
    Ok(r)
}

/// Bound on the gap between the cut-down map and the projective image
/// for points of deep cells.
pub fn displacement_bound(marker: &MarkerFunction, d: usize) -> f64 {
    4.0 / (marker.covering as f64 + (d as f64).sqrt())
}

// Wall offsets carry a (t_m - t_n)(2*depth + t_m + t_n) term, so marker
// rounding noise is amplified by roughly 2*depth even for bounded weights;
// observed worst gaps sit near 6e-9, hence the order of headroom here.
const EQUIV_WALL_TOL: f64 = 1e-7;
const EQUIV_HAUSDORFF_TOL: f64 = 1e-6;
const WEIGHT_MAX: f64 = 2.0;
const CONTINUITY_PERTURBATION: f64 = 1e-8;
const CONTINUITY_TOL: f64 = 1e-3;
const CUT_MARGIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    /// Extremal observed value; the name records which direction is bad.
    pub worst: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TilingPropertyReport {
    pub samples: usize,
    pub skipped: u64,
    pub properties: Vec<PropertyCheck>,
    pub pass: bool,
}

#[derive(Clone)]
struct SampleStats {
    equiv: (u64, u64, f64),
    weight: (u64, u64, f64),
    trunc: (u64, u64, f64),
    ball: (u64, u64, f64),
    sep: (u64, u64, f64),
    cut: (u64, u64, f64),
    disp: (u64, u64, f64),
    cont: (u64, u64, f64),
    skipped: u64,
}

impl Default for SampleStats {
    fn default() -> Self {
        Self {
            equiv: (0, 0, 0.0),
            weight: (0, 0, 0.0),
            trunc: (0, 0, 0.0),
            ball: (0, 0, f64::INFINITY),
            sep: (0, 0, f64::INFINITY),
            cut: (0, 0, f64::INFINITY),
            disp: (0, 0, 0.0),
            cont: (0, 0, 0.0),
            skipped: 0,
        }
    }
}

impl SampleStats {
    fn merge(mut self, o: SampleStats) -> SampleStats {
        let max3 = |a: (u64, u64, f64), b: (u64, u64, f64)| (a.0 + b.0, a.1 + b.1, a.2.max(b.2));
        let min3 = |a: (u64, u64, f64), b: (u64, u64, f64)| (a.0 + b.0, a.1 + b.1, a.2.min(b.2));
        self.equiv = max3(self.equiv, o.equiv);
        self.weight = max3(self.weight, o.weight);
        self.trunc = max3(self.trunc, o.trunc);
        self.ball = min3(self.ball, o.ball);
        self.sep = min3(self.sep, o.sep);
        self.cut = min3(self.cut, o.cut);
        self.disp = max3(self.disp, o.disp);
        self.cont = max3(self.cont, o.cont);
        self.skipped += o.skipped;
        self
    }
}

/// Samples torus points and checks the tiling properties: equivariance
/// under lattice shifts, the weight cap on nonempty cells, cell
/// truncation, lifted center separation, cut-down containment with its
/// displacement bound, and continuity under tiny perturbations of `x`.
pub fn verify_tiling_properties(
    action: &RotationAction,
    marker: &MarkerFunction,
    config: &TilingConfig,
    seed: u64,
    samples: usize,
) -> Result<TilingPropertyReport> {
    let d = action.dim_lattice();
    let reach = marker.covering as f64 + (d as f64).sqrt();
    let r_cut = guaranteed_cut_radius(marker, config, d)?;
    let disp_bound = displacement_bound(marker, d);
    let points = sample_points(seed, samples, action.dim_torus());
    let stats = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| check_one_sample(action, marker, config, x, seed, i as u64, reach, r_cut))
        .try_reduce(SampleStats::default, |a, b| Ok(a.merge(b)))?;

    let sep_floor = marker.separation as f64;
    let properties = vec![
        PropertyCheck {
            name: "equivariance(max_hausdorff_after_shift)".into(),
            checked: stats.equiv.0,
            violations: stats.equiv.1,
            worst: stats.equiv.2,
            pass: stats.equiv.1 == 0,
        },
        PropertyCheck {
            name: "weight_bound(max_weight_of_nonempty_cell)".into(),
            checked: stats.weight.0,
            violations: stats.weight.1,
            worst: stats.weight.2,
            pass: stats.weight.1 == 0 && stats.weight.2 <= WEIGHT_MAX,
        },
        PropertyCheck {
            name: "truncation(max_vertex_distance_from_center)".into(),
            checked: stats.trunc.0,
            violations: stats.trunc.1,
            worst: stats.trunc.2,
            pass: stats.trunc.1 == 0,
        },
        PropertyCheck {
            name: "marker_ball(min_margin_minus_half_separation)".into(),
            checked: stats.ball.0,
            violations: stats.ball.1,
            worst: stats.ball.2,
            pass: stats.ball.1 == 0,
        },
        PropertyCheck {
            name: "lifted_separation(min_pairwise_distance)".into(),
            checked: stats.sep.0,
            violations: stats.sep.1,
            worst: stats.sep.2,
            pass: stats.sep.1 == 0 && stats.sep.2 > sep_floor,
        },
        PropertyCheck {
            name: "cut_down(min_margin_minus_guarantee)".into(),
            checked: stats.cut.0,
            violations: stats.cut.1,
            worst: stats.cut.2,
            pass: stats.cut.1 == 0,
        },
        PropertyCheck {
            name: "displacement(max_gap_to_projective_image)".into(),
            checked: stats.disp.0,
            violations: stats.disp.1,
            worst: stats.disp.2,
            pass: stats.disp.1 == 0 && stats.disp.2 <= disp_bound,
        },
        PropertyCheck {
            name: "continuity(max_hausdorff_under_perturbation)".into(),
            checked: stats.cont.0,
            violations: stats.cont.1,
            worst: stats.cont.2,
            pass: stats.cont.1 == 0,
        },
    ];
    let pass = properties.iter().all(|p| p.pass);
    Ok(TilingPropertyReport { samples, skipped: stats.skipped, properties, pass })
}

#[allow(clippy::too_many_arguments)]
fn check_one_sample(
    action: &RotationAction,
    marker: &MarkerFunction,
    config: &TilingConfig,
    x: &TorusPoint,
    seed: u64,
    stream: u64,
    reach: f64,
    r_cut: f64,
) -> Result<SampleStats> {
    let mut st = SampleStats::default();
    let mut rng = stream_rng(seed, stream);
    let d = action.dim_lattice();
    let l = marker.covering as f64;
    let half_sep = marker.separation as f64 / 2.0;
    let radius = l + config.truncation + 4.0;
    let field = CenterField::gather(action, marker, x, radius)?;

    let origin = match origin_cell_from_field(&field, config.depth, config.truncation)? {
        OriginLocation::Interior(oc) => oc,
        OriginLocation::NearBoundary { .. } => {
            st.skipped += 1;
            return Ok(st);
        }
    };
    let owner = origin.cell.label.clone();

    // Weight cap, truncation, and lifted separation over the centers
    // whose cells can reach the origin's neighborhood.
    let nearby: Vec<&WeightedCenter> =
        field.centers().iter().filter(|c| c.label.norm_l2() <= l + (d as f64).sqrt() + 1.0).collect();
    for c in &nearby {
        let cell = field.cell(&c.label, config.depth, config.truncation)?;
        if cell.is_empty() {
            continue;
        }
        st.weight.0 += 1;
        st.weight.2 = st.weight.2.max(c.weight);
        if c.weight > WEIGHT_MAX {
            st.weight.1 += 1;
        }
        let n0 = c.label.as_f64();
        for v in cell.region.extreme_points() {
            st.trunc.0 += 1;
            let dv = dist(&v, &n0);
            st.trunc.2 = st.trunc.2.max(dv);
            if dv >= reach {
                st.trunc.1 += 1;
            }
        }
        // A weight-1 center has the global minimum weight, so every
        // wall stays at least half the separation away from it.
        if c.weight <= 1.0 + TAU_GEO {
            let margin = cell.margin(&n0)?;
            st.ball.0 += 1;
            st.ball.2 = st.ball.2.min(margin - half_sep);
            if margin < half_sep - CUT_MARGIN_SLACK {
                st.ball.1 += 1;
            }
        }
    }
    for (i, a) in nearby.iter().enumerate() {
        for b in &nearby[i + 1..] {
            let dx = a.label.sub(&b.label).norm_l2();
            let dt = a.weight - b.weight;
            let lifted = (dx * dx + dt * dt).sqrt();
            st.sep.0 += 1;
            st.sep.2 = st.sep.2.min(lifted);
            if lifted <= marker.separation as f64 {
                st.sep.1 += 1;
            }
        }
    }

    // Equivariance: the cell of `owner + k` at `x`, translated by `-k`,
    // must reproduce the cell of `owner` at `T^k x` — wall offsets agree
    // up to the exact `2 g . k` shift and the regions coincide. The
    // shift `k` is drawn from offsets to other active centers near the
    // owner (the covering scale guarantees at least one), so the check
    // runs on essentially every interior sample.
    let candidates: Vec<&WeightedCenter> = field
        .centers()
        .iter()
        .filter(|c| {
            let off = c.label.sub(&owner);
            !off.is_zero() && off.norm_l2() <= l
        })
        .collect();
    if !candidates.is_empty() {
        let k = candidates[rng.gen_range(0..candidates.len())].label.sub(&owner);
        let xk = action.act(x, &k)?;
        let field_k = CenterField::gather(action, marker, &xk, radius)?;
        let shifted_label = owner.add(&k);
        // `owner` is active at `xk` up to the activation knife edge
        // (the marker values at the two probes agree to rounding).
        if field_k.get(&owner).is_some() {
            let cell_at_xk = field_k.cell(&owner, config.depth, config.truncation)?;
            let cell_shifted = field.cell(&shifted_label, config.depth, config.truncation)?;
            let kf = k.as_f64();
            let mut offsets: HashMap<&LatticeVector, f64> = HashMap::new();
            for w in &cell_at_xk.walls {
                offsets.insert(&w.competitor_offset, w.halfspace.offset);
            }
            // Wall offsets of nearly-inactive centers (huge weights) are
            // provably redundant — nonempty cells and their binding
            // competitors stay under the weight cap — and their squared
            // weight terms amplify rounding noise past any fixed
            // tolerance, so compare only light-against-light walls.
            // Empty-cell agreement for heavy owners is still checked by
            // the region comparison below.
            let owner_light =
                field.get(&shifted_label).is_some_and(|c| c.weight <= WEIGHT_MAX);
            for w in cell_shifted.walls.iter().filter(|_| owner_light) {
                let competitor = shifted_label.add(&w.competitor_offset);
                let heavy = field.get(&competitor).is_none_or(|c| c.weight > WEIGHT_MAX);
                if heavy {
                    continue;
                }
                if let Some(&other) = offsets.get(&w.competitor_offset) {
                    let shift: f64 = w
                        .halfspace
                        .normal
                        .iter()
                        .zip(&kf)
                        .map(|(ni, ki)| ni * ki)
                        .sum();
                    let gap = (other - (w.halfspace.offset - shift)).abs();
                    st.equiv.0 += 1;
                    st.equiv.2 = st.equiv.2.max(gap);
                    if gap > EQUIV_WALL_TOL {
                        st.equiv.1 += 1;
                    }
                }
            }
            let neg_k: Vec<f64> = kf.iter().map(|v| -v).collect();
            let translated = cell_shifted.region.translate(&neg_k);
            match hausdorff_distance(&cell_at_xk.region, &translated) {
                Some(h) => {
                    st.equiv.0 += 1;
                    st.equiv.2 = st.equiv.2.max(h);
                    if h > EQUIV_HAUSDORFF_TOL {
                        st.equiv.1 += 1;
                    }
                }
                None => {
                    // Both empty is consistent; exactly one empty is not.
                    st.equiv.0 += 1;
                    if cell_at_xk.is_empty() != cell_shifted.is_empty() {
                        st.equiv.1 += 1;
                    }
                }
            }
        }
    }

    // Cut-down containment and the displacement bound, using interior
    // probes of the deep cell of the origin's deep owner.
    let deep = match origin_cell_from_field(&field, config.cut_depth(), config.truncation)? {
        OriginLocation::Interior(oc) => oc,
        OriginLocation::NearBoundary { .. } => {
            st.skipped += 1;
            return Ok(st);
        }
    };
    let n_label = deep.cell.label.clone();
    let nf = n_label.as_f64();
    let shallow = field.cell(&n_label, config.depth, config.truncation)?;
    if !shallow.is_empty() {
        let probes = interior_probes(&deep.cell.region);
        for a in probes {
            let b = cut_down_point(&a, &nf, config.scale);
            let margin = shallow.margin(&b)?;
            st.cut.0 += 1;
            st.cut.2 = st.cut.2.min(margin - r_cut);
            if margin < r_cut - CUT_MARGIN_SLACK {
                st.cut.1 += 1;
            }
            let image = h_projective_image(&a, &nf, deep.cell.weight, config.scale, config.depth);
            let gap = dist(&b, &image);
            st.disp.0 += 1;
            st.disp.2 = st.disp.2.max(gap);
            if gap > displacement_bound(marker, d) {
                st.disp.1 += 1;
            }
        }
    }

    // Continuity: perturbing `x` by 1e-8 moves the owner's cell by far
    // less than the tolerance (wall offsets move at rate O(depth)).
    let dir: Vec<f64> = (0..action.dim_torus()).map(|_| rng.gen_range(-1.0..1.0_f64)).collect();
    let nrm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nrm > 0.0 {
        let coords: Vec<f64> = x
            .coords()
            .iter()
            .zip(&dir)
            .map(|(c, u)| c + CONTINUITY_PERTURBATION * u / nrm)
            .collect();
        let xp = TorusPoint::new(coords)?;
        let field_p = CenterField::gather(action, marker, &xp, radius)?;
        if field_p.get(&owner).is_some() {
            let cell_p = field_p.cell(&owner, config.depth, config.truncation)?;
            if let Some(h) = hausdorff_distance(&origin.cell.region, &cell_p.region) {
                st.cont.0 += 1;
                st.cont.2 = st.cont.2.max(h);
                if h > CONTINUITY_TOL {
                    st.cont.1 += 1;
                }
            }
        }
    }
    Ok(st)
}

/// Strictly interior points of a convex region: the centroid plus each
/// vertex pulled 10% toward it.
fn interior_probes(region: &ConvexRegion) -> Vec<Vec<f64>> {
    let vertices = region.extreme_points();
    if vertices.is_empty() {
        return Vec::new();
    }
    let dim = vertices[0].len();
    let mut centroid = vec![0.0; dim];
    for v in &vertices {
        for (c, vi) in centroid.iter_mut().zip(v) {
            *c += vi;
        }
    }
    for c in centroid.iter_mut() {
        *c /= vertices.len() as f64;
    }
    let mut out = vec![centroid.clone()];
    for v in &vertices {
        out.push(v.iter().zip(&centroid).map(|(vi, ci)| ci + 0.9 * (vi - ci)).collect());
    }
    out
}
