//! Planar polygon geometry: oriented area and its derivatives, circumcircle
//! fitting and the cyclic-polygon quantities built on it (central half-angles,
//! side orientations, winding number, bifurcation value).
//!
//! Vertex coordinates are flattened as `(x_0, y_0, x_1, y_1, ...)`; side `i`
//! runs from vertex `i` to vertex `i + 1 (mod n)`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector, Vector2};

use crate::error::{NecklaceError, Result};
use crate::linalg;
use crate::tol::Tolerances;

pub type Vec2 = Vector2<f64>;

/// `a.x * b.y - a.y * b.x`.
#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// An ordered, cyclically indexed list of `n >= 3` planar vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Vec2>,
}

impl Polygon {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(NecklaceError::Degenerate(format!(
                "a polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !(v.x.is_finite() && v.y.is_finite())) {
            return Err(NecklaceError::Degenerate("non-finite vertex coordinate".into()));
        }
        Ok(Self { vertices })
    }

    pub fn from_points(points: &[[f64; 2]]) -> Result<Self> {
        Self::new(points.iter().map(|p| Vec2::new(p[0], p[1])).collect())
    }

    /// Builds a polygon from flattened coordinates `(x_0, y_0, x_1, ...)`.
    pub fn from_coords(coords: &DVector<f64>) -> Result<Self> {
        if !coords.len().is_multiple_of(2) {
            return Err(NecklaceError::Degenerate("odd coordinate count".into()));
        }
        Self::new(
            (0..coords.len() / 2)
                .map(|i| Vec2::new(coords[2 * i], coords[2 * i + 1]))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// Vertex `i`, index taken mod `n`.
    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.len()]
    }

    pub fn coords(&self) -> DVector<f64> {
        DVector::from_iterator(
            2 * self.len(),
            self.vertices.iter().flat_map(|v| [v.x, v.y]),
        )
    }

    /// Side vector `p_{i+1} - p_i`.
    pub fn side(&self, i: usize) -> Vec2 {
        let n = self.len();
        self.vertices[(i + 1) % n] - self.vertices[i % n]
    }

    pub fn side_lengths(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.side(i).norm()).collect()
    }

    pub fn perimeter(&self) -> f64 {
        self.side_lengths().iter().sum()
    }

    /// Oriented angle between `(1, 0)` and side `i`; undefined for a zero side.
    pub fn direction_angle(&self, i: usize) -> Option<f64> {
        let s = self.side(i);
        (s.norm() > 0.0).then(|| s.y.atan2(s.x))
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn translated(&self, t: Vec2) -> Self {
        Self { vertices: self.vertices.iter().map(|v| v + t).collect() }
    }

    /// Rotation by `theta` about the origin.
    pub fn rotated(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y))
                .collect(),
        }
    }

    /// Reflection in the x-axis.
    pub fn reflected(&self) -> Self {
        Self { vertices: self.vertices.iter().map(|v| Vec2::new(v.x, -v.y)).collect() }
    }

    /// The same vertices traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Self { vertices: v }
    }
}

/// Shoelace oriented area `1/2 sum det[p_i, p_{i+1}]`.
pub fn oriented_area(p: &Polygon) -> f64 {
    let n = p.len();
    0.5 * (0..n).map(|i| cross(&p.vertex(i), &p.vertex(i + 1))).sum::<f64>()
}

/// Gradient of the oriented area with respect to the flattened coordinates.
///
/// Written with side vectors, `2 dA/dx_i = l_{i-1} sin b_{i-1} + l_i sin b_i`
/// and `2 dA/dy_i = -l_{i-1} cos b_{i-1} - l_i cos b_i`; a zero side simply
/// contributes nothing.
pub fn area_gradient(p: &Polygon) -> DVector<f64> {
    let n = p.len();
    let mut g = DVector::zeros(2 * n);
    for i in 0..n {
        let prev = p.side(i + n - 1);
        let next = p.side(i);
        g[2 * i] = 0.5 * (prev.y + next.y);
        g[2 * i + 1] = -0.5 * (prev.x + next.x);
    }
    g
}

/// Constant Hessian of the oriented area on `n`-gons.
pub fn area_hessian(n: usize) -> DMatrix<f64> {
    assert!(n >= 3, "area_hessian needs n >= 3");
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let next = (i + 1) % n;
        let prev = (i + n - 1) % n;
        h[(2 * i, 2 * next + 1)] += 0.5;
        h[(2 * next + 1, 2 * i)] += 0.5;
        h[(2 * i, 2 * prev + 1)] -= 0.5;
        h[(2 * prev + 1, 2 * i)] -= 0.5;
    }
    h
}

/// Circumcircle of a cyclic polygon and the per-side quantities measured
/// against it.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicData {
    pub center: Vec2,
    pub radius: f64,
    /// Central half-angles `alpha_i` in `[0, pi/2]`.
    pub half_angles: Vec<f64>,
    /// Side orientations `eps_i` in `{-1, 0, 1}`.
    pub orientations: Vec<i8>,
    /// Winding number about the centre, when admissible and consistent.
    pub winding: Option<i64>,
    /// Largest `| |p_i - o| - R |` over all vertices.
    pub max_residual: f64,
}

fn distinct_vertices(p: &Polygon) -> Vec<Vec2> {
    let scale = p.diameter();
    let mut out: Vec<Vec2> = Vec::new();
    for v in p.vertices() {
        if !out.iter().any(|u| (u - v).norm() <= 1e-12 * scale) {
            out.push(*v);
        }
    }
    if scale == 0.0 {
        out.truncate(1);
    }
    out
}

/// Algebraic (linearised) circle fit followed by one geometric Gauss-Newton step.
fn least_squares_circle(points: &[Vec2]) -> Option<(Vec2, f64)> {
    let m = points.len();
    let mean = points.iter().sum::<Vec2>() / m as f64;
    let s = (points.iter().map(|p| (p - mean).norm_squared()).sum::<f64>() / m as f64).sqrt();
    if s == 0.0 {
        return None;
    }
    let q: Vec<Vec2> = points.iter().map(|p| (p - mean) / s).collect();
    let a = DMatrix::from_fn(m, 3, |r, c| match c {
        0 => q[r].x,
        1 => q[r].y,
        _ => 1.0,
    });
    let b = DVector::from_fn(m, |r, _| -q[r].norm_squared());
    let sv = linalg::singular_values(&a);
    if sv[2] <= 1e-12 * sv[0] {
        return None; // collinear points
    }
    let sol = linalg::lstsq(&a, &b, 0.0);
    let c = Vec2::new(-0.5 * sol[0], -0.5 * sol[1]);
    let r2 = c.norm_squared() - sol[2];
    if !(r2 > 0.0) {
        return None;
    }
    let (mut center, mut radius) = (c, r2.sqrt());

    let j = DMatrix::from_fn(m, 3, |r, col| {
        let d = q[r] - center;
        let dn = d.norm();
        match col {
            0 => -d.x / dn,
            1 => -d.y / dn,
            _ => -1.0,
        }
    });
    let res = DVector::from_fn(m, |r, _| (q[r] - center).norm() - radius);
    if res.iter().all(|r| r.is_finite()) {
        let step = linalg::lstsq(&j, &(-res), 1e-14);
        if step.iter().all(|v| v.is_finite()) && radius + step[2] > 0.0 {
            center += Vec2::new(step[0], step[1]);
            radius += step[2];
        }
    }
    Some((mean + center * s, radius * s))
}

/// Fits the circumcircle with the cyclicity tolerance `tol` (relative to `R`)
/// and default orientation threshold. Returns `Ok(None)` when the polygon is
/// not cyclic.
pub fn fit_circumcircle(p: &Polygon, tol: f64) -> Result<Option<CyclicData>> {
    fit_circumcircle_with(p, &Tolerances { cyclic: tol, ..Tolerances::default() })
}

pub fn fit_circumcircle_with(p: &Polygon, tols: &Tolerances) -> Result<Option<CyclicData>> {
    let distinct = distinct_vertices(p);
    if distinct.len() < 3 {
        return Err(NecklaceError::Degenerate(format!(
            "circle fit needs 3 distinct vertices, found {}",
            distinct.len()
        )));
    }
    let Some((center, radius)) = least_squares_circle(&distinct) else {
        return Ok(None);
    };
    let max_residual = p
        .vertices()
        .iter()
        .map(|v| ((v - center).norm() - radius).abs())
        .fold(0.0, f64::max);
    if max_residual > tols.cyclic * radius {
        return Ok(None);
    }
    Ok(Some(cyclic_data(p, center, radius, max_residual, tols)))
}

/// Side quantities of `p` measured against a known circle.
pub fn cyclic_data(
    p: &Polygon,
    center: Vec2,
    radius: f64,
    max_residual: f64,
    tols: &Tolerances,
) -> CyclicData {
    let n = p.len();
    let mut half_angles = Vec::with_capacity(n);
    let mut orientations = Vec::with_capacity(n);
    for i in 0..n {
        let l = p.side(i).norm();
        half_angles.push((l / (2.0 * radius)).clamp(0.0, 1.0).asin());
        let c = cross(&(p.vertex(i) - center), &(p.vertex(i + 1) - center));
        orientations.push(if c.abs() <= tols.orientation * radius * l {
            0
        } else if c > 0.0 {
            1
        } else {
            -1
        });
    }
    let mut data = CyclicData {
        center,
        radius,
        half_angles,
        orientations,
        winding: None,
        max_residual,
    };
    data.winding = winding_number(&data).ok();
    data
}

/// True iff no side passes through the centre (all orientations non-zero).
pub fn is_admissible(c: &CyclicData) -> bool {
    c.orientations.iter().all(|&e| e != 0)
}

fn first_inadmissible(c: &CyclicData) -> Option<usize> {
    c.orientations.iter().position(|&e| e == 0)
}

/// Winding number about the centre from the signed central angles.
pub fn winding_number(c: &CyclicData) -> Result<i64> {
    if let Some(side) = first_inadmissible(c) {
        return Err(NecklaceError::NotAdmissible { side });
    }
    let turns = c
        .orientations
        .iter()
        .zip(&c.half_angles)
        .map(|(&e, &a)| f64::from(e) * 2.0 * a)
        .sum::<f64>()
        / (2.0 * PI);
    let w = turns.round();
    let residual = (turns - w).abs();
    if residual > 1e-6 {
        return Err(NecklaceError::Inconsistent { what: "signed central angles", residual });
    }
    Ok(w as i64)
}

/// `sum eps_i tan(alpha_i)`; zero exactly at bifurcating polygons.
pub fn bifurcation_value(c: &CyclicData) -> Result<f64> {
    bifurcation_value_with(c, Tolerances::default().admissible)
}

pub fn bifurcation_value_with(c: &CyclicData, diameter_tol: f64) -> Result<f64> {
    if let Some(side) = first_inadmissible(c) {
        return Err(NecklaceError::NotAdmissible { side });
    }
    if let Some(side) = c.half_angles.iter().position(|&a| FRAC_PI_2 - a <= diameter_tol) {
        return Err(NecklaceError::NotAdmissible { side });
    }
    Ok(c.orientations
        .iter()
        .zip(&c.half_angles)
        .map(|(&e, &a)| f64::from(e) * a.tan())
        .sum())
}
