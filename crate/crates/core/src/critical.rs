//! Critical configurations of oriented area on the smooth part of a
//! necklace configuration space.
//!
//! A non-singular configuration is critical iff it is cyclic, every side of
//! piece `j` has length `L_j / n_j`, and all sides of a piece share one
//! orientation `E_j`. Writing `A_j` for the common central half-angle, the
//! circle closes iff `sum_j n_j E_j 2 A_j = 2 pi w`, which with
//! `sin A_j = L_j / (2 n_j R)` leaves a scalar equation in the radius for
//! each choice of signs and winding number.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{NecklaceError, Result};
use crate::linalg;
use crate::necklace::{self, Necklace};
use crate::polygon::{self, Polygon, Vec2};
use crate::roots;
use crate::tol::Tolerances;

/// Orientation of a piece: the sign of the central angle of its sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A cyclic critical configuration, placed on the circle of radius `radius`
/// about the origin with vertex 0 at angle 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalConfig {
    /// Piece orientations `E_j`.
    pub signs: Vec<Sign>,
    pub winding: i64,
    pub radius: f64,
    /// Per-piece central half-angles `A_j`.
    pub half_angles: Vec<f64>,
    /// Lagrange multipliers `lambda_j = (L_j / n_j) E_j cot A_j`, normalised
    /// so that `2 grad A = sum_j lambda_j grad L_j`.
    pub multipliers: Vec<f64>,
    pub polygon: Polygon,
    pub admissible: bool,
    pub bifurcating: bool,
    /// `sum_j n_j E_j tan A_j`; `None` when not admissible.
    pub bifurcation_value: Option<f64>,
    pub area: f64,
}

impl CriticalConfig {
    pub fn sign_values(&self) -> Vec<i8> {
        self.signs.iter().map(|s| s.as_i8()).collect()
    }

    fn sort_key(&self) -> (i64, Vec<i8>, f64) {
        (self.winding, self.sign_values(), self.radius)
    }

    /// True when `other` is the reflection of `self` (signs and winding negated).
    pub fn is_mirror_of(&self, other: &CriticalConfig, rel_tol: f64) -> bool {
        self.winding == -other.winding
            && self.signs.iter().zip(&other.signs).all(|(a, b)| *a == b.flip())
            && (self.radius - other.radius).abs() <= rel_tol * self.radius
    }

    /// Largest vertex distance to `other` (same labelling, no motion applied).
    pub fn vertex_distance(&self, other: &CriticalConfig) -> f64 {
        self.polygon
            .vertices()
            .iter()
            .zip(other.polygon.vertices())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Smallest radius on which every piece's side fits: `max_j L_j / (2 n_j)`.
pub fn min_radius(nk: &Necklace) -> f64 {
    (0..nk.k()).map(|j| 0.5 * nk.side_length(j)).fold(0.0, f64::max)
}

fn check_signs(nk: &Necklace, signs: &[Sign]) -> Result<()> {
    if signs.len() != nk.k() {
        return Err(NecklaceError::Instance(format!(
            "{} signs given for {} pieces",
            signs.len(),
            nk.k()
        )));
    }
    Ok(())
}

/// Closure function in the inverse radius `u = 1/R`.
fn closure_in_inverse_radius(nk: &Necklace, signs: &[Sign], w: i64, u: f64) -> f64 {
    (0..nk.k())
        .map(|j| {
            let n = nk.pieces()[j].beads as f64;
            n * signs[j].value() * (0.5 * nk.side_length(j) * u).min(1.0).asin()
        })
        .sum::<f64>()
        - PI * w as f64
}

/// Same as [`closure_in_inverse_radius`] but dividing by `R`, so that at
/// `R = R_min` the widest piece has `sin A_j = 1` exactly.
fn closure_at_radius(nk: &Necklace, signs: &[Sign], w: i64, radius: f64) -> f64 {
    (0..nk.k())
        .map(|j| {
            let n = nk.pieces()[j].beads as f64;
            n * signs[j].value() * (0.5 * nk.side_length(j) / radius).min(1.0).asin()
        })
        .sum::<f64>()
        - PI * w as f64
}

fn closure_derivative(nk: &Necklace, signs: &[Sign], u: f64) -> f64 {
    (0..nk.k())
        .map(|j| {
            let n = nk.pieces()[j].beads as f64;
            let c = 0.5 * nk.side_length(j);
            let s = (c * u).min(1.0);
            n * signs[j].value() * c / (1.0 - s * s).sqrt()
        })
        .sum()
}

/// `F(R) = sum_j n_j E_j arcsin(L_j / (2 n_j R)) - pi w`.
pub fn closure_residual(nk: &Necklace, signs: &[Sign], w: i64, radius: f64) -> Result<f64> {
    check_signs(nk, signs)?;
    let r_min = min_radius(nk);
    if !(radius >= r_min * (1.0 - 1e-14)) {
        return Err(NecklaceError::Domain { radius, min_radius: r_min });
    }
    Ok(closure_at_radius(nk, signs, w, radius))
}

/// Radii solving the closure equation for one `(signs, w)` pair.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RadiusRoots {
    /// Roots with every `A_j < pi/2`, ascending.
    pub interior: Vec<f64>,
    /// Root at `R_min`, where some piece consists of diameters.
    pub boundary: Option<f64>,
}

pub fn solve_radii(nk: &Necklace, signs: &[Sign], w: i64) -> Result<RadiusRoots> {
    solve_radii_with(nk, signs, w, &Tolerances::default())
}

/// Scans `u = 1/R` over `(0, 1/R_min]` with `scan_per_bead * n` samples and
/// bisects every bracketed root. Roots beyond `R_cap = 1e9 R_min` are not
/// searched when `w = 0`.
pub fn solve_radii_with(nk: &Necklace, signs: &[Sign], w: i64, tols: &Tolerances) -> Result<RadiusRoots> {
    check_signs(nk, signs)?;
    let mut out = RadiusRoots::default();
    let all_same = signs.windows(2).all(|p| p[0] == p[1]);
    if w == 0 && all_same || closure_vanishes_identically(nk, signs, w) {
        return Ok(out);
    }
    // |sum n_j E_j A_j| <= n pi / 2
    if (w.unsigned_abs() as f64) > nk.n() as f64 / 2.0 {
        return Ok(out);
    }
    let r_min = min_radius(nk);
    let u_max = 1.0 / r_min;
    let u_min = if w == 0 { 1e-9 * u_max } else { 0.0 };
    let samples = (tols.scan_per_bead * nk.n() as f64).ceil().max(8.0) as usize;
    let f = |u: f64| closure_in_inverse_radius(nk, signs, w, u);
    let df = |u: f64| closure_derivative(nk, signs, u);

    let boundary = closure_at_radius(nk, signs, w, r_min).abs() <= 1e-12 * (1.0 + w.abs() as f64);
    if boundary {
        out.boundary = Some(r_min);
    }
    let edge = u_max * (1.0 - 1e-12);
    for u in roots::bracket_roots(f, df, u_min, u_max, samples, 0.0) {
        if u <= 0.0 || (boundary && u >= edge) {
            continue;
        }
        if u >= edge {
            out.boundary.get_or_insert(r_min);
            continue;
        }
        out.interior.push(1.0 / u);
    }
    out.interior.sort_by(f64::total_cmp);
    Ok(out)
}

/// True when the closure condition holds for every radius: `w = 0` and, among
/// pieces with a common side length, the signed bead counts cancel. The
/// cyclic configurations then form a one-parameter family of degenerate
/// critical points instead of isolated ones.
pub fn closure_vanishes_identically(nk: &Necklace, signs: &[Sign], w: i64) -> bool {
    if w != 0 {
        return false;
    }
    let k = nk.k();
    let mut done = vec![false; k];
    for a in 0..k {
        if done[a] {
            continue;
        }
        let la = nk.side_length(a);
        let mut sum = 0i64;
        for b in a..k {
            if (nk.side_length(b) - la).abs() <= 1e-12 * la {
                done[b] = true;
                sum += nk.pieces()[b].beads as i64 * signs[b].value() as i64;
            }
        }
        if sum != 0 {
            return false;
        }
    }
    true
}

/// Realises the cyclic configuration for `(signs, w, R)` and fills in its
/// multipliers and flags.
pub fn build_configuration(
    nk: &Necklace,
    signs: &[Sign],
    w: i64,
    radius: f64,
    tols: &Tolerances,
) -> Result<CriticalConfig> {
    check_signs(nk, signs)?;
    let r_min = min_radius(nk);
    if !(radius >= r_min * (1.0 - 1e-14)) {
        return Err(NecklaceError::Domain { radius, min_radius: r_min });
    }
    let k = nk.k();
    let half_angles: Vec<f64> =
        (0..k).map(|j| (0.5 * nk.side_length(j) / radius).min(1.0).asin()).collect();
    let total: f64 = (0..k)
        .map(|j| nk.pieces()[j].beads as f64 * signs[j].value() * 2.0 * half_angles[j])
        .sum();
    let residual = (total - 2.0 * PI * w as f64).abs();
    if residual > 1e-10 {
        return Err(NecklaceError::Inconsistent { what: "closure of central angles", residual });
    }

    let mut vertices = Vec::with_capacity(nk.n());
    let mut theta = 0.0f64;
    for j in 0..k {
        let step = signs[j].value() * 2.0 * half_angles[j];
        for _ in nk.sides(j) {
            vertices.push(Vec2::new(radius * theta.cos(), radius * theta.sin()));
            theta += step;
        }
    }
    let polygon = Polygon::new(vertices)?;

    let multipliers: Vec<f64> = (0..k)
        .map(|j| {
            let a = half_angles[j];
            nk.side_length(j) * signs[j].value() * a.cos() / a.sin()
        })
        .collect();
    let admissible = half_angles.iter().all(|&a| FRAC_PI_2 - a > tols.admissible);
    let (bifurcation_value, bifurcating) = if admissible {
        let mut value = 0.0;
        let mut scale = 0.0;
        for j in 0..k {
            let t = nk.pieces()[j].beads as f64 * half_angles[j].tan();
            value += signs[j].value() * t;
            scale += t;
        }
        (Some(value), value.abs() <= tols.bifurcation * scale)
    } else {
        (None, false)
    };
    let area = polygon::oriented_area(&polygon);
    Ok(CriticalConfig {
        signs: signs.to_vec(),
        winding: w,
        radius,
        half_angles,
        multipliers,
        polygon,
        admissible,
        bifurcating,
        bifurcation_value,
        area,
    })
}

/// True when `p_i = p_{i+2}` for every `i` (within `tol` absolute).
pub fn is_complete_fold(p: &Polygon, tol: f64) -> bool {
    let n = p.len();
    n.is_multiple_of(2) && (0..n).all(|i| (p.vertex(i) - p.vertex(i + 2)).norm() <= tol)
}

/// Range of winding numbers to try.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindingBound {
    /// `|w| <= ceil(n / 2)`, which is exhaustive.
    #[default]
    Auto,
    Max(u64),
}

/// Every critical point found for a necklace, split by kind.
#[derive(Debug, Clone, Default)]
pub struct CriticalSet {
    /// Roots with all `A_j < pi/2`.
    pub interior: Vec<CriticalConfig>,
    /// Roots at `R_min` where some (not all) sides are diameters.
    pub boundary: Vec<CriticalConfig>,
    /// Complete folds; critical but never admissible.
    pub folds: Vec<CriticalConfig>,
    /// Sign patterns (with `w = 0`) whose cyclic configurations form a
    /// continuum for `R >= R_min`; no member is listed above.
    pub families: Vec<Vec<Sign>>,
}

fn sign_vector(mask: u64, k: usize) -> Vec<Sign> {
    (0..k)
        .map(|j| if mask >> j & 1 == 1 { Sign::Minus } else { Sign::Plus })
        .collect()
}

fn dedup_by_vertices(mut list: Vec<CriticalConfig>, tol: f64) -> Vec<CriticalConfig> {
    list.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.0.cmp(&kb.0).then(ka.1.cmp(&kb.1)).then(ka.2.total_cmp(&kb.2))
    });
    let mut out: Vec<CriticalConfig> = Vec::with_capacity(list.len());
    for c in list {
        if !out.iter().any(|o| o.vertex_distance(&c) <= tol) {
            out.push(c);
        }
    }
    out
}

pub fn enumerate_all(nk: &Necklace, bound: WindingBound, tols: &Tolerances) -> Result<CriticalSet> {
    necklace::manifold_dimension(nk)?;
    let n = nk.n();
    if n < 3 {
        return Ok(CriticalSet::default());
    }
    let k = nk.k();
    if k > 24 {
        return Err(NecklaceError::Instance(format!("{k} pieces is too many to enumerate signs")));
    }
    let w_max = match bound {
        WindingBound::Auto => n.div_ceil(2) as i64,
        WindingBound::Max(m) => m as i64,
    };
    let tasks: Vec<(u64, i64)> = (0..1u64 << k)
        .flat_map(|mask| (-w_max..=w_max).map(move |w| (mask, w)))
        .collect();
    let found: Vec<(CriticalConfig, bool)> = tasks
        .par_iter()
        .map(|&(mask, w)| -> Result<Vec<(CriticalConfig, bool)>> {
            let signs = sign_vector(mask, k);
            let roots = solve_radii_with(nk, &signs, w, tols)?;
            let mut out = Vec::new();
            for r in roots.interior {
                out.push((build_configuration(nk, &signs, w, r, tols)?, false));
            }
            if let Some(r) = roots.boundary {
                out.push((build_configuration(nk, &signs, w, r, tols)?, true));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let tol = tols.dedup * nk.total_length();
    let mut set = CriticalSet::default();
    let (mut interior, mut boundary, mut folds) = (Vec::new(), Vec::new(), Vec::new());
    for (c, at_boundary) in found {
        if is_complete_fold(&c.polygon, tol) {
            folds.push(c);
        } else if at_boundary {
            boundary.push(c);
        } else {
            interior.push(c);
        }
    }
    set.interior = dedup_by_vertices(interior, tol);
    set.boundary = dedup_by_vertices(boundary, tol);
    set.folds = dedup_by_vertices(folds, tol);
    set.families = (0..1u64 << k)
        .map(|mask| sign_vector(mask, k))
        .filter(|signs| closure_vanishes_identically(nk, signs, 0))
        .collect();
    set.families.sort();
    Ok(set)
}

/// Interior critical configurations sorted by `(w, signs, R)`.
pub fn enumerate_critical(nk: &Necklace, bound: WindingBound, tols: &Tolerances) -> Result<Vec<CriticalConfig>> {
    Ok(enumerate_all(nk, bound, tols)?.interior)
}

fn orthonormal_constraint_rows(p: &Polygon, nk: &Necklace) -> Result<DMatrix<f64>> {
    let j = necklace::length_gradients(p, nk)?;
    Ok(linalg::column_basis(&j.transpose(), 1e-12))
}

/// Norm of the area gradient projected onto the kernel of the constraint
/// Jacobian: zero exactly at constrained critical points.
pub fn projected_gradient_norm(p: &Polygon, nk: &Necklace) -> Result<f64> {
    let q = orthonormal_constraint_rows(p, nk)?;
    Ok(linalg::project_out(&polygon::area_gradient(p), &q).norm())
}

/// `grad A - 1/2 sum_j lambda_j grad L_j` for the given multipliers.
pub fn lagrange_residual(p: &Polygon, nk: &Necklace, multipliers: &[f64]) -> Result<DVector<f64>> {
    let j = necklace::length_gradients(p, nk)?;
    let lam = DVector::from_column_slice(multipliers);
    Ok(polygon::area_gradient(p) - 0.5 * j.transpose() * lam)
}

/// Least-squares multipliers for `2 grad A = sum_j lambda_j grad L_j`.
pub fn least_squares_multipliers(p: &Polygon, nk: &Necklace) -> Result<Vec<f64>> {
    let j = necklace::length_gradients(p, nk)?;
    let rhs = 2.0 * polygon::area_gradient(p);
    let sol = linalg::lstsq(&j.transpose(), &rhs, 1e-12);
    Ok(sol.iter().copied().collect())
}
