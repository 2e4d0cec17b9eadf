//! Convex geometry in dimensions one and two: halfspaces, interval and
//! polygon clipping, and Hausdorff distance between convex regions.
//!
//! Cells produced by the tiling module are intersections of halfspaces,
//! known a priori to fit inside a truncation box. Clipping that box
//! against every halfspace yields an explicit interval or polygon, and
//! all downstream queries (support, area, boundary distance, Hausdorff)
//! read off the explicit region.

use serde::Serialize;

/// Closed halfspace `{ y : normal . y <= offset }`.
#[derive(Debug, Clone, Serialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        debug_assert!(norm(&normal) > 1e-15, "halfspace normal must be nonzero");
        Self { normal, offset }
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        dot(&self.normal, p) <= self.offset + tol
    }

    /// Euclidean distance from `p` to the bounding hyperplane, signed
    /// positive when `p` violates the constraint.
    pub fn signed_excess(&self, p: &[f64]) -> f64 {
        (dot(&self.normal, p) - self.offset) / norm(&self.normal)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b))
}

/// Explicit convex region: an interval on the line or a convex polygon
/// in the plane (counterclockwise vertex list; empty when the list has
/// fewer than `dim + 1` vertices).
#[derive(Debug, Clone, Serialize)]
pub enum ConvexRegion {
    Empty,
    Interval { lo: f64, hi: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl ConvexRegion {
    pub fn is_empty(&self) -> bool {
        matches!(self, ConvexRegion::Empty)
    }

    /// Support function `max { u . y : y in region }`.
    pub fn support(&self, u: &[f64]) -> Option<f64> {
        match self {
            ConvexRegion::Empty => None,
            ConvexRegion::Interval { lo, hi } => Some(if u[0] >= 0.0 { u[0] * hi } else { u[0] * lo }),
            ConvexRegion::Polygon { vertices } => vertices
                .iter()
                .map(|v| dot(u, v))
                .max_by(|a, b| a.partial_cmp(b).expect("finite coordinates")),
        }
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        match self {
            ConvexRegion::Empty => false,
            ConvexRegion::Interval { lo, hi } => p[0] >= lo - tol && p[0] <= hi + tol,
            ConvexRegion::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    // Counterclockwise polygon: inside means left of every edge.
                    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= -tol
                })
            }
        }
    }

    /// Distance from a point to the region (zero inside).
    pub fn distance_to_point(&self, p: &[f64]) -> Option<f64> {
        match self {
            ConvexRegion::Empty => None,
            ConvexRegion::Interval { lo, hi } => {
                Some(if p[0] < *lo { lo - p[0] } else if p[0] > *hi { p[0] - hi } else { 0.0 })
            }
            ConvexRegion::Polygon { vertices } => {
                if self.contains(p, 0.0) {
                    return Some(0.0);
                }
                let n = vertices.len();
                (0..n)
                    .map(|i| point_segment_distance(p, &vertices[i], &vertices[(i + 1) % n]))
                    .min_by(|a, b| a.partial_cmp(b).expect("finite distances"))
            }
        }
    }

    /// Vertices (interval endpoints on the line).
    pub fn extreme_points(&self) -> Vec<Vec<f64>> {
        match self {
            ConvexRegion::Empty => Vec::new(),
            ConvexRegion::Interval { lo, hi } => vec![vec![*lo], vec![*hi]],
            ConvexRegion::Polygon { vertices } => vertices.iter().map(|v| v.to_vec()).collect(),
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            ConvexRegion::Empty => 0.0,
            ConvexRegion::Interval { lo, hi } => hi - lo,
            ConvexRegion::Polygon { vertices } => polygon_area(vertices),
        }
    }

    pub fn translate(&self, shift: &[f64]) -> ConvexRegion {
        match self {
            ConvexRegion::Empty => ConvexRegion::Empty,
            ConvexRegion::Interval { lo, hi } => {
                ConvexRegion::Interval { lo: lo + shift[0], hi: hi + shift[0] }
            }
            ConvexRegion::Polygon { vertices } => ConvexRegion::Polygon {
                vertices: vertices.iter().map(|v| [v[0] + shift[0], v[1] + shift[1]]).collect(),
            },
        }
    }
}

/// Intersects halfspaces with the interval `[lo0, hi0]`.
pub fn clip_interval(halfspaces: &[Halfspace], lo0: f64, hi0: f64) -> ConvexRegion {
    let (mut lo, mut hi) = (lo0, hi0);
    for h in halfspaces {
        let n = h.normal[0];
        if n > 0.0 {
            hi = hi.min(h.offset / n);
        } else if n < 0.0 {
            lo = lo.max(h.offset / n);
        } else if h.offset < 0.0 {
            return ConvexRegion::Empty;
        }
    }
    if lo > hi {
        ConvexRegion::Empty
    } else {
        ConvexRegion::Interval { lo, hi }
    }
}

/// Intersects halfspaces with an axis-aligned box (Sutherland-Hodgman
/// against each halfplane in turn).
pub fn clip_polygon(halfspaces: &[Halfspace], center: &[f64], half_width: f64) -> ConvexRegion {
    let mut poly: Vec<[f64; 2]> = vec![
        [center[0] - half_width, center[1] - half_width],
        [center[0] + half_width, center[1] - half_width],
        [center[0] + half_width, center[1] + half_width],
        [center[0] - half_width, center[1] + half_width],
    ];
    for h in halfspaces {
        poly = clip_against(&poly, h);
        if poly.len() < 3 {
            return ConvexRegion::Empty;
        }
    }
    let poly = dedupe_vertices(poly);
    if poly.len() < 3 {
        ConvexRegion::Empty
    } else {
        ConvexRegion::Polygon { vertices: poly }
    }
}

fn clip_against(poly: &[[f64; 2]], h: &Halfspace) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let nxt = poly[(i + 1) % n];
        let vc = dot(&h.normal, &cur) - h.offset;
        let vn = dot(&h.normal, &nxt) - h.offset;
        if vc <= 0.0 {
            out.push(cur);
        }
        if (vc < 0.0 && vn > 0.0) || (vc > 0.0 && vn < 0.0) {
            let t = vc / (vc - vn);
            out.push([cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])]);
        }
    }
    out
}

fn dedupe_vertices(poly: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(poly.len());
    for v in poly {
        if out.last().is_none_or(|u| dist(u, &v) > 1e-12) {
            out.push(v);
        }
    }
    if out.len() >= 2 && dist(&out[0], out.last().expect("nonempty")) <= 1e-12 {
        out.pop();
    }
    out
}

/// Shoelace area of a counterclockwise polygon.
pub fn polygon_area(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        twice += a[0] * b[1] - b[0] * a[1];
    }
    twice.abs() / 2.0
}

pub fn polygon_centroid(vertices: &[[f64; 2]]) -> [f64; 2] {
    let n = vertices.len();
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut twice = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let w = a[0] * b[1] - b[0] * a[1];
        twice += w;
        cx += (a[0] + b[0]) * w;
        cy += (a[1] + b[1]) * w;
    }
    if twice.abs() < 1e-300 {
        // Degenerate polygon: fall back to the vertex mean.
        let k = n as f64;
        return [
            vertices.iter().map(|v| v[0]).sum::<f64>() / k,
            vertices.iter().map(|v| v[1]).sum::<f64>() / k,
        ];
    }
    [cx / (3.0 * twice), cy / (3.0 * twice)]
}

pub fn point_segment_distance(p: &[f64], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 < 1e-300 {
        return dist(p, a);
    }
    let t = ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0);
    dist(p, &[a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Monotone-chain convex hull; returns counterclockwise vertices.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup_by(|a, b| dist(a, b) <= 1e-15);
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Hausdorff distance between convex regions: the farthest point of a
/// convex set from another convex set is one of its extreme points, so
/// vertex-to-region distances suffice.
pub fn hausdorff_distance(a: &ConvexRegion, b: &ConvexRegion) -> Option<f64> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let directed = |from: &ConvexRegion, to: &ConvexRegion| -> f64 {
        from.extreme_points()
            .iter()
            .map(|v| to.distance_to_point(v).expect("target region is nonempty"))
            .fold(0.0, f64::max)
    };
    Some(directed(a, b).max(directed(b, a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(cx: f64, cy: f64, half: f64) -> ConvexRegion {
        clip_polygon(&[], &[cx, cy], half)
    }

    #[test]
    fn clip_interval_basics() {
        let hs = vec![Halfspace::new(vec![1.0], 5.0), Halfspace::new(vec![-1.0], 2.0)];
        match clip_interval(&hs, -100.0, 100.0) {
            ConvexRegion::Interval { lo, hi } => {
                assert_eq!(lo, -2.0);
                assert_eq!(hi, 5.0);
            }
            other => panic!("expected interval, got {other:?}"),
        }
        let empty = clip_interval(&[Halfspace::new(vec![1.0], -1.0), Halfspace::new(vec![-1.0], -1.0)], -10.0, 10.0);
        assert!(empty.is_empty());
    }

    #[test]
    fn clip_polygon_halves_square() {
        let region = clip_polygon(&[Halfspace::new(vec![1.0, 0.0], 0.5)], &[0.5, 0.5], 0.5);
        assert!((region.measure() - 0.5).abs() < 1e-12);
        assert!(region.contains(&[0.25, 0.5], 0.0));
        assert!(!region.contains(&[0.75, 0.5], 1e-9));
    }

    #[test]
    fn clip_polygon_to_empty() {
        let region = clip_polygon(&[Halfspace::new(vec![1.0, 0.0], -2.0)], &[0.0, 0.0], 1.0);
        assert!(region.is_empty());
    }

    #[test]
    fn polygon_area_and_centroid() {
        let tri = vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]];
        assert!((polygon_area(&tri) - 2.0).abs() < 1e-12);
        let c = polygon_centroid(&tri);
        assert!((c[0] - 2.0 / 3.0).abs() < 1e-12 && (c[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn support_values() {
        let sq = square(0.0, 0.0, 1.0);
        assert!((sq.support(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((sq.support(&[1.0, 1.0]).unwrap() - 2.0).abs() < 1e-12);
        let iv = ConvexRegion::Interval { lo: -2.0, hi: 3.0 };
        assert_eq!(iv.support(&[1.0]).unwrap(), 3.0);
        assert_eq!(iv.support(&[-1.0]).unwrap(), 2.0);
    }

    #[test]
    fn hausdorff_between_shifted_squares() {
        let a = square(0.0, 0.0, 1.0);
        let b = square(0.5, 0.0, 1.0);
        let h = hausdorff_distance(&a, &b).unwrap();
        assert!((h - 0.5).abs() < 1e-12);
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        let ia = ConvexRegion::Interval { lo: 0.0, hi: 1.0 };
        let ib = ConvexRegion::Interval { lo: 0.2, hi: 1.1 };
        assert!((hausdorff_distance(&ia, &ib).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn point_segment_distance_cases() {
        let a = [0.0, 0.0];
        let b = [2.0, 0.0];
        assert!((point_segment_distance(&[1.0, 1.0], &a, &b) - 1.0).abs() < 1e-12);
        assert!((point_segment_distance(&[3.0, 0.0], &a, &b) - 1.0).abs() < 1e-12);
        assert_eq!(point_segment_distance(&[1.0, 0.0], &a, &b), 0.0);
    }

    #[test]
    fn hull_of_square_with_interior_points() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.25, 0.75]];
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 4);
        assert!((polygon_area(&hull) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distance_to_point_from_polygon() {
        let sq = square(0.0, 0.0, 1.0);
        assert_eq!(sq.distance_to_point(&[0.0, 0.0]).unwrap(), 0.0);
        assert!((sq.distance_to_point(&[2.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((sq.distance_to_point(&[2.0, 2.0]).unwrap() - 2.0_f64.sqrt()).abs() < 1e-12);
    }
}
