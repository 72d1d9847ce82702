//! Dense linear algebra on nalgebra matrices, with the decompositions
//! delegated to faer.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD `m = u diag(s) v^T`, singular values descending.
struct FullSvd {
    u: DMatrix<f64>,
    s: Vec<f64>,
    v: DMatrix<f64>,
}

fn full_svd(m: &DMatrix<f64>) -> FullSvd {
    let svd = to_faer(m).svd().expect("svd did not converge");
    let s = (0..m.nrows().min(m.ncols())).map(|i| svd.S()[i]).collect();
    FullSvd { u: from_faer(svd.U()), s, v: from_faer(svd.V()) }
}

fn rank_of(s: &[f64], rel_tol: f64) -> usize {
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| top > 0.0 && x > rel_tol * top).count()
}

/// Orthonormal basis of `ker(m)` (as columns) together with the numerical
/// rank of `m`. Singular values at or below `rel_tol * sigma_max` are zero.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> (DMatrix<f64>, usize) {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return (DMatrix::zeros(0, 0), 0);
    }
    if rows == 0 {
        return (DMatrix::identity(cols, cols), 0);
    }
    let svd = full_svd(m);
    let rank = rank_of(&svd.s, rel_tol);
    (svd.v.columns(rank, cols - rank).into_owned(), rank)
}

/// Orthonormal basis (as columns) of the span of the columns of `m`.
pub fn column_basis(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = full_svd(m);
    let rank = rank_of(&svd.s, rel_tol);
    svd.u.columns(0, rank).into_owned()
}

/// Orthonormal basis of the span of the columns of `m`, keeping directions
/// with singular value above the absolute `cutoff`.
pub fn column_basis_above(m: &DMatrix<f64>, cutoff: f64) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = full_svd(m);
    let rank = svd.s.iter().filter(|&&s| s > cutoff).count();
    svd.u.columns(0, rank).into_owned()
}

/// Singular values of `m`, sorted in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("svd did not converge")
}

/// Moore-Penrose inverse, truncating singular values at `rel_tol * sigma_max`.
pub fn pseudo_inverse(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return DMatrix::zeros(cols, rows);
    }
    let svd = full_svd(m);
    let rank = rank_of(&svd.s, rel_tol);
    let mut out = DMatrix::zeros(cols, rows);
    for i in 0..rank {
        out += svd.v.column(i) * svd.u.column(i).transpose() / svd.s[i];
    }
    out
}

/// Minimum-norm least-squares solution of `m x = b`.
pub fn lstsq(m: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
    pseudo_inverse(m, rel_tol) * b
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    to_faer(m).self_adjoint_eigenvalues(Side::Lower).expect("eigensolver did not converge")
}

/// `(m + m^T) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Removes from `v` its component in the span of the orthonormal columns of `q`.
pub fn project_out(v: &DVector<f64>, q: &DMatrix<f64>) -> DVector<f64> {
    if q.ncols() == 0 {
        return v.clone();
    }
    v - q * (q.transpose() * v)
}

/// Largest Euclidean distance of a column of `m` from the span of the
/// orthonormal columns of `q`.
pub fn max_distance_from_span(m: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    (0..m.ncols())
        .map(|c| project_out(&m.column(c).into_owned(), q).norm())
        .fold(0.0, f64::max)
}
