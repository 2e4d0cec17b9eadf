//! Marker functions: toral bump functions whose orbit hits are sparse
//! (separation) yet frequent (covering).
//!
//! The bump is `phi(x) = clamp((r_outer - dist(x, center)) / (r_outer -
//! r_inner), 0, 1)`. Two scales are derived from the action:
//!
//! * separation `M`: the largest radius such that every nonzero lattice
//!   vector with `|n|_2 <= M` moves the origin by more than `2*r_outer`,
//!   so at most one orbit point per `M`-ball can enter the bump support;
//! * covering `L`: the smallest radius such that the closed
//!   `r_inner`-balls centered on the backward orbit `{-n*A : |n|_2 <= L}`
//!   cover the torus, so every point sees `phi = 1` within `L` steps.

use rand::Rng;
use serde::Serialize;

use crate::dynsys::{lattice_ball, sample_points, torus_distance, LatticeVector, RotationAction, TorusPoint};
use crate::{Error, Result};

/// Scan caps; both scales stay single-digit at desk scale, so hitting a
/// cap signals a misconfigured geometry rather than a slow search.
const SEPARATION_CAP: u32 = 64;
const COVERING_CAP: u32 = 64;

/// Center and the two radii of the bump.
#[derive(Debug, Clone, Serialize)]
pub struct MarkerGeometry {
    pub center: TorusPoint,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl MarkerGeometry {
    pub fn new(center: TorusPoint, r_inner: f64, r_outer: f64) -> Result<Self> {
        if !(r_inner.is_finite() && r_outer.is_finite()) || r_inner <= 0.0 || r_inner >= r_outer || r_outer >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "marker radii must satisfy 0 < r_inner < r_outer < 1, got ({r_inner}, {r_outer})"
            )));
        }
        Ok(Self { center, r_inner, r_outer })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }
}

/// `clamp((r_outer - dist(x, center)) / (r_outer - r_inner), 0, 1)`.
pub fn phi_eval(geometry: &MarkerGeometry, x: &TorusPoint) -> Result<f64> {
    let dist = torus_distance(x, &geometry.center)?;
    Ok(((geometry.r_outer - dist) / (geometry.r_outer - geometry.r_inner)).clamp(0.0, 1.0))
}

/// Largest `M >= 1` such that all nonzero `|n|_2 <= M` have
/// `dist(n*A, 0) > 2*r_outer`.
pub fn compute_separation(action: &RotationAction, geometry: &MarkerGeometry, cap: u32) -> Result<u32> {
    let zero = TorusPoint::origin(action.dim_torus());
    let threshold = 2.0 * geometry.r_outer;
    let valid = |radius: u32| -> Result<bool> {
        for n in lattice_ball(action.dim_lattice(), radius as f64) {
            if n.is_zero() {
                continue;
            }
            if torus_distance(&action.lattice_image(&n), &zero)? <= threshold {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if !valid(1)? {
        return Err(Error::MarkerRadiusTooLarge);
    }
    let mut m = 1;
    loop {
        if m + 1 > cap {
            return Err(Error::SeparationCapExceeded { cap });
        }
        if !valid(m + 1)? {
            return Ok(m);
        }
        m += 1;
    }
}

/// Smallest `L >= 0` such that the closed `r_inner`-balls at
/// `{center - n*A : |n|_2 <= L}` cover the torus.
///
/// The check is exact for the circle (sorted cyclic gaps) and grid-based
/// for the 2-torus: with grid spacing `r_inner/4` the farthest point from
/// the grid is `r_inner*sqrt(2)/8 < r_inner/4`, so requiring every grid
/// point within `r_inner - r_inner/4` of a center certifies covering.
pub fn compute_covering(action: &RotationAction, geometry: &MarkerGeometry, cap: u32) -> Result<u32> {
    let m = action.dim_torus();
    if geometry.dim() != m {
        return Err(Error::DimensionMismatch { expected: m, got: geometry.dim() });
    }
    for l in 0..=cap {
        let centers: Vec<TorusPoint> = lattice_ball(action.dim_lattice(), l as f64)
            .iter()
            .map(|n| {
                action
                    .act(&geometry.center, &n.neg())
                    .expect("center and window share the action's dimensions")
            })
            .collect();
        let covered = match m {
            1 => circle_covered(&centers, geometry.r_inner),
            2 => torus2_covered(&centers, geometry.r_inner)?,
            d => return Err(Error::BoundaryDistanceUnsupported { d }),
        };
        if covered {
            return Ok(l);
        }
    }
    Err(Error::CoveringCapExceeded { cap, r_inner: geometry.r_inner })
}

fn circle_covered(centers: &[TorusPoint], r_inner: f64) -> bool {
    let mut pos: Vec<f64> = centers.iter().map(|c| c.coords()[0]).collect();
    pos.sort_by(|a, b| a.partial_cmp(b).expect("torus coordinates are finite"));
    let mut max_gap: f64 = 0.0;
    for i in 0..pos.len() {
        let next = if i + 1 < pos.len() { pos[i + 1] } else { pos[0] + 1.0 };
        max_gap = max_gap.max(next - pos[i]);
    }
    max_gap <= 2.0 * r_inner
}

fn torus2_covered(centers: &[TorusPoint], r_inner: f64) -> Result<bool> {
    let spacing = r_inner / 4.0;
    let steps = (1.0 / spacing).ceil() as usize;
    let slack = r_inner - r_inner / 4.0;
    for i in 0..steps {
        for j in 0..steps {
            let g = TorusPoint::new(vec![i as f64 * spacing, j as f64 * spacing])?;
            let mut hit = false;
            for c in centers {
                if torus_distance(&g, c)? <= slack {
                    hit = true;
                    break;
                }
            }
            if !hit {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Bump geometry together with its derived scales.
#[derive(Debug, Clone, Serialize)]
pub struct MarkerFunction {
    pub geometry: MarkerGeometry,
    /// Separation radius `M`.
    pub separation: u32,
    /// Covering radius `L`.
    pub covering: u32,
}

impl MarkerFunction {
    pub fn phi(&self, x: &TorusPoint) -> Result<f64> {
        phi_eval(&self.geometry, x)
    }
}

pub fn build_marker(action: &RotationAction, geometry: MarkerGeometry) -> Result<MarkerFunction> {
    let separation = compute_separation(action, &geometry, SEPARATION_CAP)?;
    let covering = compute_covering(action, &geometry, COVERING_CAP)?;
    Ok(MarkerFunction { geometry, separation, covering })
}

/// Origin-centered bump with radii tuned per torus dimension so that
/// both derived scales are small: `M = 1`, `L = 8` for the default
/// actions in either dimension.
pub fn default_marker(action: &RotationAction) -> Result<MarkerFunction> {
    let (r_inner, r_outer) = match action.dim_torus() {
        1 => (0.05, 0.1),
        2 => (0.1, 0.2),
        d => return Err(Error::BoundaryDistanceUnsupported { d }),
    };
    let geometry = MarkerGeometry::new(TorusPoint::origin(action.dim_torus()), r_inner, r_outer)?;
    build_marker(action, geometry)
}

/// Two orbit positions inside the bump support closer than the
/// separation scale allows.
#[derive(Debug, Clone, Serialize)]
pub struct SeparationViolation {
    pub x: TorusPoint,
    pub n1: LatticeVector,
    pub n2: LatticeVector,
    pub lattice_gap: f64,
}

/// A sample point no orbit position within the covering scale pulls
/// into the inner ball.
#[derive(Debug, Clone, Serialize)]
pub struct CoveringViolation {
    pub x: TorusPoint,
    pub best_distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MarkerReport {
    pub samples: usize,
    pub scan_radius: f64,
    pub separation_violations: Vec<SeparationViolation>,
    pub covering_violations: Vec<CoveringViolation>,
    pub pass: bool,
}

/// Checks both marker properties on sampled points: active orbit
/// positions (those with `phi > 0`) must be pairwise more than `M`
/// apart in the lattice, and some position within `L` must reach the
/// inner ball.
pub fn verify_marker(
    action: &RotationAction,
    marker: &MarkerFunction,
    seed: u64,
    samples: usize,
) -> Result<MarkerReport> {
    let scan_radius = (marker.covering + marker.separation + 2) as f64;
    let scan = lattice_ball(action.dim_lattice(), scan_radius);
    let covering_window = lattice_ball(action.dim_lattice(), marker.covering as f64);
    let mut separation_violations = Vec::new();
    let mut covering_violations = Vec::new();
    for x in sample_points(seed, samples, action.dim_torus()) {
        let mut active: Vec<&LatticeVector> = Vec::new();
        for n in &scan {
            if marker.phi(&action.act(&x, n)?)? > 0.0 {
                active.push(n);
            }
        }
        for (i, n1) in active.iter().enumerate() {
            for n2 in &active[i + 1..] {
                let gap = n1.sub(n2).norm_l2();
                if gap <= marker.separation as f64 {
                    separation_violations.push(SeparationViolation {
                        x: x.clone(),
                        n1: (*n1).clone(),
                        n2: (*n2).clone(),
                        lattice_gap: gap,
                    });
                }
            }
        }
        let mut best = f64::INFINITY;
        for n in &covering_window {
            best = best.min(torus_distance(&action.act(&x, n)?, &marker.geometry.center)?);
        }
        if best > marker.geometry.r_inner + 1e-12 {
            covering_violations.push(CoveringViolation { x: x.clone(), best_distance: best });
        }
    }
    let pass = separation_violations.is_empty() && covering_violations.is_empty();
    Ok(MarkerReport { samples, scan_radius, separation_violations, covering_violations, pass })
}

/// Random marker geometry for property tests: radii drawn within the
/// band where the default actions keep `M >= 1`.
pub fn random_geometry<R: Rng>(rng: &mut R, m: usize) -> Result<MarkerGeometry> {
    let r_outer = rng.gen_range(0.05..0.18);
    let r_inner = r_outer * rng.gen_range(0.3..0.8);
    let center = TorusPoint::new((0..m).map(|_| rng.gen::<f64>()).collect())?;
    MarkerGeometry::new(center, r_inner, r_outer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom_1d(r_inner: f64, r_outer: f64) -> MarkerGeometry {
        MarkerGeometry::new(TorusPoint::origin(1), r_inner, r_outer).unwrap()
    }

    #[test]
    fn phi_profile() {
        let g = geom_1d(0.05, 0.1);
        let at = |v: f64| phi_eval(&g, &TorusPoint::new(vec![v]).unwrap()).unwrap();
        assert_eq!(at(0.0), 1.0);
        assert_eq!(at(0.03), 1.0);
        assert!((at(0.075) - 0.5).abs() < 1e-12);
        assert_eq!(at(0.1), 0.0);
        assert_eq!(at(0.5), 0.0);
        assert_eq!(at(0.97), 1.0, "distance wraps around the circle");
    }

    #[test]
    fn geometry_rejects_bad_radii() {
        assert!(MarkerGeometry::new(TorusPoint::origin(1), 0.1, 0.05).is_err());
        assert!(MarkerGeometry::new(TorusPoint::origin(1), 0.0, 0.1).is_err());
        assert!(MarkerGeometry::new(TorusPoint::origin(1), 0.5, 1.0).is_err());
    }

    #[test]
    fn separation_scales_on_default_circle_action() {
        let action = RotationAction::default_1d();
        assert_eq!(compute_separation(&action, &geom_1d(0.025, 0.05), 64).unwrap(), 4);
        assert_eq!(compute_separation(&action, &geom_1d(0.05, 0.1), 64).unwrap(), 1);
        let err = compute_separation(&action, &geom_1d(0.15, 0.3), 64).unwrap_err();
        assert!(matches!(err, Error::MarkerRadiusTooLarge));
    }

    #[test]
    fn separation_scale_on_default_torus_action() {
        let action = RotationAction::default_2d();
        let g = MarkerGeometry::new(TorusPoint::origin(2), 0.1, 0.2).unwrap();
        assert_eq!(compute_separation(&action, &g, 64).unwrap(), 1);
    }

    #[test]
    fn covering_scales_on_default_circle_action() {
        let action = RotationAction::default_1d();
        assert_eq!(compute_covering(&action, &geom_1d(0.05, 0.1), 64).unwrap(), 8);
        assert_eq!(compute_covering(&action, &geom_1d(0.3, 0.4), 64).unwrap(), 1);
        assert_eq!(compute_covering(&action, &geom_1d(0.5, 0.6), 64).unwrap(), 0);
    }

    #[test]
    fn covering_scale_on_default_torus_action() {
        let action = RotationAction::default_2d();
        let g = MarkerGeometry::new(TorusPoint::origin(2), 0.1, 0.2).unwrap();
        assert_eq!(compute_covering(&action, &g, 64).unwrap(), 8);
    }

    #[test]
    fn default_markers() {
        let m1 = default_marker(&RotationAction::default_1d()).unwrap();
        assert_eq!((m1.separation, m1.covering), (1, 8));
        let m2 = default_marker(&RotationAction::default_2d()).unwrap();
        assert_eq!((m2.separation, m2.covering), (1, 8));
    }

    #[test]
    fn verify_marker_passes_on_defaults() {
        let action = RotationAction::default_1d();
        let marker = default_marker(&action).unwrap();
        let report = verify_marker(&action, &marker, 7, 50).unwrap();
        assert!(report.pass, "marker properties must hold on sampled points: {report:?}");
        assert_eq!(report.samples, 50);
    }

    #[test]
    fn verify_marker_flags_broken_covering_scale() {
        let action = RotationAction::default_1d();
        let mut marker = default_marker(&action).unwrap();
        marker.covering = 1;
        let report = verify_marker(&action, &marker, 7, 50).unwrap();
        assert!(!report.pass);
        assert!(!report.covering_violations.is_empty(), "a single-step window cannot reach the inner ball from everywhere");
    }
}
