//! Hessian-orthogonal splitting of the tangent space at a critical point:
//! edge-length-preserving motions versus motions through cyclic polygons,
//! and the further per-piece split of the cyclic directions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::critical::{CriticalConfig, Sign};
use crate::error::{NecklaceError, Result};
use crate::linalg;
use crate::morse::{self, TangentFrame};
use crate::necklace::{self, Necklace};
use crate::tol::Tolerances;

const SPAN_TOL: f64 = 1e-9;

/// Bases (orthonormal columns in coordinate space) of the three families of
/// subspaces.
#[derive(Debug, Clone)]
pub struct Splitting {
    pub frame: TangentFrame,
    /// Motions keeping every side length fixed.
    pub edge: DMatrix<f64>,
    /// Motions through cyclic configurations of the necklace.
    pub cyclic: DMatrix<f64>,
    /// Per-piece cyclic motions, one block per piece.
    pub pieces: Vec<DMatrix<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    /// `dim E`, `dim C`, then `dim C_j` per piece.
    pub dims: Vec<usize>,
    /// Largest `|e . H c|` over unit `e` in `E`, `c` in `C`, divided by `||B||`.
    pub max_cross_ec: f64,
    /// Largest `|c_i . H c_j|` across distinct pieces, divided by `||B||`.
    pub max_cross_pieces: f64,
    /// Distance of every subspace from the tangent space, plus the distance
    /// between `C` and the sum of the `C_j`.
    pub containment_residual: f64,
    /// Distance of the tangent space from `E + C`.
    pub span_residual: f64,
    /// Smallest singular value of `[E | C]`; zero means the sum is not direct.
    pub independence: f64,
}

/// Columns `d p / d theta_i` and `d p / d R` of the circle parametrisation.
fn circle_chart(c: &CriticalConfig) -> DMatrix<f64> {
    let n = c.polygon.len();
    let mut phi = DMatrix::zeros(2 * n, n + 1);
    for (i, v) in c.polygon.vertices().iter().enumerate() {
        let th = v.y.atan2(v.x);
        phi[(2 * i, i)] = -c.radius * th.sin();
        phi[(2 * i + 1, i)] = c.radius * th.cos();
        phi[(2 * i, n)] = th.cos();
        phi[(2 * i + 1, n)] = th.sin();
    }
    phi
}

fn orbit_basis(frame: &TangentFrame) -> DMatrix<f64> {
    linalg::column_basis(&frame.orbit_dirs, 1e-12)
}

/// Orbit-free orthonormal basis of the span of `vectors`; the rank cut is
/// relative to the vectors before projection.
fn reduce(vectors: &DMatrix<f64>, orbit: &DMatrix<f64>) -> DMatrix<f64> {
    let scale = vectors.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut m = vectors.clone();
    for c in 0..m.ncols() {
        let v = linalg::project_out(&m.column(c).into_owned(), orbit);
        m.set_column(c, &v);
    }
    linalg::column_basis_above(&m, SPAN_TOL * scale)
}

pub fn split(c: &CriticalConfig, nk: &Necklace, tols: &Tolerances) -> Result<Splitting> {
    if c.bifurcating {
        return Err(NecklaceError::ChartDegenerate);
    }
    let p = &c.polygon;
    let n = p.len();
    let frame = morse::tangent_frame(p, nk, tols)?;
    let orbit = orbit_basis(&frame);
    let sides = necklace::side_length_gradients(p)?;

    let mut stacked = DMatrix::zeros(n + 3, 2 * n);
    stacked.rows_mut(0, n).copy_from(&sides);
    stacked.rows_mut(n, 3).copy_from(&orbit.transpose());
    let (edge, _) = linalg::null_space(&stacked, SPAN_TOL);

    let phi = circle_chart(c);
    let mut chart = DMatrix::zeros(2 * n, n + 3);
    chart.columns_mut(0, n + 1).copy_from(&phi);
    for i in 0..n {
        chart[(2 * i, n + 1)] = 1.0;
        chart[(2 * i + 1, n + 2)] = 1.0;
    }
    let jac = necklace::length_gradients(p, nk)?;
    let (coeffs, _) = linalg::null_space(&(&jac * &chart), SPAN_TOL);
    let cyclic = reduce(&(&chart * coeffs), &orbit);

    // Side lengths as coordinates on the cyclic family.
    let length_chart = &sides * &phi;
    let sv = linalg::singular_values(&length_chart);
    if sv.len() < n || sv[n - 1] <= tols.rank * sv[0] {
        return Err(NecklaceError::ChartDegenerate);
    }
    let pinv = linalg::pseudo_inverse(&length_chart, tols.rank);
    let mut pieces = Vec::with_capacity(nk.k());
    for j in 0..nk.k() {
        let inner: Vec<usize> = nk.sides(j).skip(1).collect();
        let mut dirs = DMatrix::zeros(2 * n, inner.len());
        for (col, &i) in inner.iter().enumerate() {
            let mut rhs = DVector::zeros(n);
            rhs[i - 1] = 1.0;
            rhs[i] = -1.0;
            dirs.set_column(col, &(&phi * (&pinv * rhs)));
        }
        pieces.push(reduce(&dirs, &orbit));
    }
    Ok(Splitting { frame, edge, cyclic, pieces })
}

fn max_cross(h: &DMatrix<f64>, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() == 0 || b.ncols() == 0 {
        return 0.0;
    }
    (a.transpose() * h * b).amax()
}

fn hstack(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut m = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        m.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    m
}

pub fn orthogonality_report(c: &CriticalConfig, nk: &Necklace, tols: &Tolerances) -> Result<OrthogonalityReport> {
    let s = split(c, nk, tols)?;
    let b = morse::reduced_hessian_in(c, nk, &s.frame.basis, tols)?;
    let norm = morse::spectral_norm(&b).max(f64::MIN_POSITIVE);
    let h = morse::lagrangian_hessian(&c.polygon, nk, &c.multipliers)?;

    let mut dims = vec![s.edge.ncols(), s.cyclic.ncols()];
    dims.extend(s.pieces.iter().map(|m| m.ncols()));

    let max_cross_ec = max_cross(&h, &s.edge, &s.cyclic) / norm;
    let mut max_cross_pieces = 0.0f64;
    for i in 0..s.pieces.len() {
        for j in i + 1..s.pieces.len() {
            max_cross_pieces = max_cross_pieces.max(max_cross(&h, &s.pieces[i], &s.pieces[j]) / norm);
        }
    }

    let piece_refs: Vec<&DMatrix<f64>> = s.pieces.iter().collect();
    let all_pieces = hstack(&piece_refs);
    let piece_span = linalg::column_basis(&all_pieces, SPAN_TOL);
    let containment_residual = [
        linalg::max_distance_from_span(&s.edge, &s.frame.basis),
        linalg::max_distance_from_span(&s.cyclic, &s.frame.basis),
        linalg::max_distance_from_span(&all_pieces, &s.cyclic),
        linalg::max_distance_from_span(&s.cyclic, &piece_span),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let joined = hstack(&[&s.edge, &s.cyclic]);
    let independence = linalg::singular_values(&joined).last().copied().unwrap_or(1.0);
    let span_residual =
        linalg::max_distance_from_span(&s.frame.basis, &linalg::column_basis(&joined, SPAN_TOL));

    Ok(OrthogonalityReport {
        dims,
        max_cross_ec,
        max_cross_pieces,
        containment_residual,
        span_residual,
        independence,
    })
}

/// Definiteness of the area Hessian restricted to the cyclic directions.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceVerdict {
    /// `Plus` for a local maximum, `Minus` for a local minimum.
    pub extremum: Sign,
    /// Ascending, relative to `||B||`.
    pub eigenvalues: Vec<f64>,
}

/// For a two-bead necklace `((n, L), (1, l))`: the critical point is a strict
/// maximum of area on the cyclic slice when `E_1 = +1` and a strict minimum
/// when `E_1 = -1`.
pub fn extremum_on_cyclic_slice(c: &CriticalConfig, nk: &Necklace, tols: &Tolerances) -> Result<SliceVerdict> {
    if nk.k() != 2 || nk.pieces()[1].beads != 1 {
        return Err(NecklaceError::Instance("expected a necklace of the form ((n, L), (1, l))".into()));
    }
    let s = split(c, nk, tols)?;
    let b = morse::reduced_hessian_in(c, nk, &s.frame.basis, tols)?;
    let norm = morse::spectral_norm(&b).max(f64::MIN_POSITIVE);
    let h = morse::lagrangian_hessian(&c.polygon, nk, &c.multipliers)?;
    let restricted = linalg::symmetrize(&(s.cyclic.transpose() * h * &s.cyclic));
    let eigenvalues: Vec<f64> = linalg::symmetric_eigenvalues(&restricted).iter().map(|e| e / norm).collect();
    let extremum = c.signs[0];
    let ok = match extremum {
        Sign::Plus => eigenvalues.iter().all(|&e| e < -tols.zero_eigen),
        Sign::Minus => eigenvalues.iter().all(|&e| e > tols.zero_eigen),
    };
    if !ok {
        return Err(NecklaceError::SliceNotExtremal(format!("restricted eigenvalues {eigenvalues:?}")));
    }
    Ok(SliceVerdict { extremum, eigenvalues })
}
