//! Lattice actions on tori by irrational rotation vectors.
//!
//! A `RotationAction` is the map `act(x, n) = x + n*A mod 1` on the
//! `m`-torus, where `A` is a fixed `d x m` real matrix and `n` ranges
//! over `Z^d`. Freeness cannot be certified by floating point, so the
//! constructor desk-checks a finite witness: every nonzero `n` with
//! `|n|_inf <= independence_window` must move the origin by more than
//! [`crate::TAU_GEO`].

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Error, Result, TAU_GEO};

/// Point on the `m`-torus; coordinates are kept canonical in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("torus point needs >= 1 coordinate".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("torus coordinates must be finite".into()));
        }
        Ok(Self(coords.into_iter().map(wrap_unit).collect()))
    }

    pub fn origin(m: usize) -> Self {
        Self(vec![0.0; m])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:.12}")?;
        }
        write!(f, ")")
    }
}

/// Wrap a finite real into `[0, 1)`.
fn wrap_unit(v: f64) -> f64 {
    let w = v.rem_euclid(1.0);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Element of `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LatticeVector(Vec<i64>);

impl LatticeVector {
    pub fn new(components: Vec<i64>) -> Self {
        Self(components)
    }

    pub fn zero(d: usize) -> Self {
        Self(vec![0; d])
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn norm_l2(&self) -> f64 {
        self.0.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>().sqrt()
    }

    pub fn norm_inf(&self) -> i64 {
        self.0.iter().map(|&c| c.abs()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|&c| -c).collect())
    }

    /// Componentwise residue in `{0, .., modulus-1}^d`.
    pub fn rem_euclid(&self, modulus: u64) -> Self {
        let q = modulus as i64;
        Self(self.0.iter().map(|&c| c.rem_euclid(q)).collect())
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Rotation action of `Z^d` on the `m`-torus with increment matrix `A`
/// (`d` rows of `m` entries): `act(x, n) = x + n*A mod 1`.
#[derive(Debug, Clone)]
pub struct RotationAction {
    rows: Vec<Vec<f64>>,
    dim_lattice: usize,
    dim_torus: usize,
    independence_window: u32,
}

impl RotationAction {
    /// Builds the action and desk-checks the freeness witness: every
    /// nonzero `n` with `|n|_inf <= independence_window` must move the
    /// origin by more than `TAU_GEO`.
    pub fn new(rows: Vec<Vec<f64>>, independence_window: u32) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::InvalidParameter("increment matrix needs >= 1 row".into()));
        }
        let m = rows[0].len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidParameter("increment matrix rows must be nonempty and equal length".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("increment matrix entries must be finite".into()));
        }
        let action = Self { rows, dim_lattice: d, dim_torus: m, independence_window };
        let zero = TorusPoint::origin(m);
        for n in lattice_box(d, independence_window as i64) {
            if n.is_zero() {
                continue;
            }
            let image = action.lattice_image(&n);
            let dist = torus_distance(&image, &zero)?;
            if dist <= TAU_GEO {
                return Err(Error::NotFree { n: n.components().to_vec(), dist });
            }
        }
        Ok(action)
    }

    /// `Z` acting on the circle by `sqrt(2) - 1`.
    pub fn default_1d() -> Self {
        Self::new(vec![vec![std::f64::consts::SQRT_2 - 1.0]], 50)
            .expect("default 1d rotation is free within the window")
    }

    /// `Z^2` acting on the 2-torus by the fractional parts of
    /// `(sqrt(2), sqrt(3))` and `(sqrt(5), sqrt(7))`.
    pub fn default_2d() -> Self {
        let rows = vec![
            vec![2.0_f64.sqrt() % 1.0, 3.0_f64.sqrt() % 1.0],
            vec![5.0_f64.sqrt() % 1.0, 7.0_f64.sqrt() % 1.0],
        ];
        Self::new(rows, 50).expect("default 2d rotation is free within the window")
    }

    pub fn dim_lattice(&self) -> usize {
        self.dim_lattice
    }

    pub fn dim_torus(&self) -> usize {
        self.dim_torus
    }

    pub fn independence_window(&self) -> u32 {
        self.independence_window
    }

    pub fn increments(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `x + n*A mod 1`.
    pub fn act(&self, x: &TorusPoint, n: &LatticeVector) -> Result<TorusPoint> {
        if x.dim() != self.dim_torus {
            return Err(Error::DimensionMismatch { expected: self.dim_torus, got: x.dim() });
        }
        if n.dim() != self.dim_lattice {
            return Err(Error::DimensionMismatch { expected: self.dim_lattice, got: n.dim() });
        }
        let mut out = x.coords().to_vec();
        for (row, &ni) in self.rows.iter().zip(n.components()) {
            let step = ni as f64;
            for (o, a) in out.iter_mut().zip(row) {
                *o += step * a;
            }
        }
        Ok(TorusPoint(out.into_iter().map(wrap_unit).collect()))
    }

    /// Orbit of the origin: `n*A mod 1`.
    pub fn lattice_image(&self, n: &LatticeVector) -> TorusPoint {
        self.act(&TorusPoint::origin(self.dim_torus), n)
            .expect("origin and lattice vector have the action's dimensions")
    }
}

/// Geodesic distance on the torus: the l2 norm of coordinatewise
/// wrapped differences `min(|dx|, 1 - |dx|)`.
pub fn torus_distance(x: &TorusPoint, y: &TorusPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    let mut sum = 0.0;
    for (a, b) in x.coords().iter().zip(y.coords()) {
        let d = (a - b).abs();
        let d = d.min(1.0 - d);
        sum += d * d;
    }
    Ok(sum.sqrt())
}

/// Orbit restricted to a finite window of lattice vectors.
pub fn orbit_window(
    action: &RotationAction,
    x: &TorusPoint,
    window: &[LatticeVector],
) -> Result<BTreeMap<LatticeVector, TorusPoint>> {
    let mut out = BTreeMap::new();
    for n in window {
        out.insert(n.clone(), action.act(x, n)?);
    }
    Ok(out)
}

/// Deterministic uniform samples on the `m`-torus.
pub fn sample_points(seed: u64, count: usize, m: usize) -> Vec<TorusPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| TorusPoint((0..m).map(|_| rng.gen::<f64>()).collect()))
        .collect()
}

/// Seeded generator with an independent stream per work item, so
/// parallel loops draw identical values regardless of scheduling.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// All lattice vectors with `|n|_inf <= half_width`, in lexicographic
/// order (deterministic iteration everywhere downstream).
pub fn lattice_box(d: usize, half_width: i64) -> Vec<LatticeVector> {
    let mut out = Vec::new();
    let mut current = vec![-half_width; d];
    loop {
        out.push(LatticeVector::new(current.clone()));
        let mut k = d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if current[k] < half_width {
                current[k] += 1;
                for c in current.iter_mut().skip(k + 1) {
                    *c = -half_width;
                }
                break;
            }
        }
    }
}

/// All lattice vectors with `|n|_2 <= radius` (origin included), in
/// lexicographic order.
pub fn lattice_ball(d: usize, radius: f64) -> Vec<LatticeVector> {
    if radius < 0.0 {
        return Vec::new();
    }
    lattice_box(d, radius.floor() as i64)
        .into_iter()
        .filter(|n| n.norm_l2() <= radius)
        .collect()
}

/// The box window `{0, .., n-1}^d` in lexicographic order.
pub fn box_window(d: usize, n: u64) -> Vec<LatticeVector> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let top = (n - 1) as i64;
    let mut current = vec![0_i64; d];
    loop {
        out.push(LatticeVector::new(current.clone()));
        let mut k = d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if current[k] < top {
                current[k] += 1;
                for c in current.iter_mut().skip(k + 1) {
                    *c = 0;
                }
                break;
            }
        }
    }
}
