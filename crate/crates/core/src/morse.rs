//! Morse indices at critical configurations, computed two ways: the closed
//! form in terms of piece orientations and winding number, and the signature
//! of the Lagrangian Hessian restricted to the constrained tangent space.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::critical::{self, CriticalConfig, Sign};
use crate::error::{NecklaceError, Result};
use crate::linalg;
use crate::necklace::{self, Necklace};
use crate::polygon::{self, Polygon};
use crate::tol::Tolerances;

/// The two translations and the infinitesimal rotation about the origin,
/// as columns of a `2n x 3` matrix.
pub fn orbit_directions(p: &Polygon) -> DMatrix<f64> {
    let n = p.len();
    DMatrix::from_fn(2 * n, 3, |r, c| {
        let v = p.vertex(r / 2);
        match (c, r % 2) {
            (0, 0) | (1, 1) => 1.0,
            (0, _) | (1, _) => 0.0,
            (_, 0) => -v.y,
            _ => v.x,
        }
    })
}

/// Orthonormal basis of the constrained tangent space with the isometry
/// orbit removed.
#[derive(Debug, Clone)]
pub struct TangentFrame {
    /// `2n x (2n - k - 3)`, orthonormal columns.
    pub basis: DMatrix<f64>,
    /// `2n x 3`: translations and rotation.
    pub orbit_dirs: DMatrix<f64>,
}

impl TangentFrame {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The same space with its basis rotated by an orthogonal `q`.
    pub fn rotated(&self, q: &DMatrix<f64>) -> Self {
        Self { basis: &self.basis * q, orbit_dirs: self.orbit_dirs.clone() }
    }
}

fn normalized_rows(m: DMatrix<f64>) -> DMatrix<f64> {
    let mut m = m;
    for mut row in m.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    m
}

pub fn tangent_frame(p: &Polygon, nk: &Necklace, tols: &Tolerances) -> Result<TangentFrame> {
    if let Some(reason) = necklace::is_singular(p, nk, tols)? {
        return Err(NecklaceError::Singular(format!("{reason:?}")));
    }
    let jac = necklace::length_gradients(p, nk)?;
    let orbit = orbit_directions(p);
    let k = nk.k();
    let mut stacked = DMatrix::zeros(k + 3, 2 * p.len());
    stacked.rows_mut(0, k).copy_from(&jac);
    stacked.rows_mut(k, 3).copy_from(&orbit.transpose());
    let (basis, rank) = linalg::null_space(&normalized_rows(stacked), 1e-10);
    if rank < k + 3 {
        return Err(NecklaceError::Singular(format!(
            "constraint and orbit directions have rank {rank} < {}",
            k + 3
        )));
    }
    Ok(TangentFrame { basis, orbit_dirs: orbit })
}

/// `H_A - 1/2 sum_j lambda_j H_{L_j}` on the full coordinate space.
pub fn lagrangian_hessian(p: &Polygon, nk: &Necklace, multipliers: &[f64]) -> Result<DMatrix<f64>> {
    let mut h = polygon::area_hessian(p.len());
    for (hj, lam) in necklace::length_hessians(p, nk)?.iter().zip(multipliers) {
        h -= hj * (0.5 * lam);
    }
    Ok(h)
}

fn ensure_critical(c: &CriticalConfig, nk: &Necklace, tols: &Tolerances) -> Result<()> {
    let residual = critical::projected_gradient_norm(&c.polygon, nk)?;
    if residual > tols.stationarity * nk.total_length() {
        return Err(NecklaceError::NotCritical { residual });
    }
    Ok(())
}

/// Lagrangian Hessian expressed in the given orthonormal tangent basis.
pub fn reduced_hessian_in(c: &CriticalConfig, nk: &Necklace, basis: &DMatrix<f64>, tols: &Tolerances) -> Result<DMatrix<f64>> {
    ensure_critical(c, nk, tols)?;
    let h = lagrangian_hessian(&c.polygon, nk, &c.multipliers)?;
    Ok(linalg::symmetrize(&(basis.transpose() * h * basis)))
}

/// Hessian of oriented area on the configuration space at `c`, in the
/// basis of its tangent frame.
pub fn reduced_hessian(c: &CriticalConfig, nk: &Necklace, tols: &Tolerances) -> Result<DMatrix<f64>> {
    let frame = tangent_frame(&c.polygon, nk, tols)?;
    reduced_hessian_in(c, nk, &frame.basis, tols)
}

/// Eigenvalue counts of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl Signature {
    pub fn total(&self) -> usize {
        self.negative + self.zero + self.positive
    }
}

/// Spectral norm of a symmetric matrix.
pub fn spectral_norm(b: &DMatrix<f64>) -> f64 {
    linalg::symmetric_eigenvalues(b).iter().fold(0.0, |m, e| m.max(e.abs()))
}

/// Classifies the eigenvalues of `b`; `|mu| <= zero_threshold * ||b||` is zero.
pub fn signature(b: &DMatrix<f64>, zero_threshold: f64) -> Signature {
    let eig = linalg::symmetric_eigenvalues(b);
    let norm = eig.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let mut s = Signature { negative: 0, zero: 0, positive: 0 };
    for e in eig {
        if e.abs() <= zero_threshold * norm {
            s.zero += 1;
        } else if e < 0.0 {
            s.negative += 1;
        } else {
            s.positive += 1;
        }
    }
    s
}

pub fn numerical_index(c: &CriticalConfig, nk: &Necklace, zero_threshold: f64) -> Result<Signature> {
    let tols = Tolerances { zero_eigen: zero_threshold, ..Tolerances::default() };
    Ok(signature(&reduced_hessian(c, nk, &tols)?, zero_threshold))
}

/// `1/2 sum_j (2 n_j - 1)(E_j + 1) - 1 - 2w - delta`, with `delta = 0` when
/// `sum_j n_j E_j tan A_j > 0` and `1` otherwise.
pub fn index_formula(beads: &[usize], signs: &[Sign], winding: i64, tan_sum_positive: bool) -> i64 {
    let positive: i64 = beads
        .iter()
        .zip(signs)
        .filter(|(_, s)| **s == Sign::Plus)
        .map(|(&b, _)| 2 * b as i64 - 1)
        .sum();
    positive - 1 - 2 * winding - if tan_sum_positive { 0 } else { 1 }
}

/// Closed-form Morse index of an admissible, non-bifurcating configuration.
pub fn formula_index(c: &CriticalConfig, nk: &Necklace) -> Result<i64> {
    if !c.admissible {
        return Err(NecklaceError::UndefinedIndex("configuration is not admissible"));
    }
    if c.bifurcating {
        return Err(NecklaceError::UndefinedIndex("bifurcating configurations are not Morse"));
    }
    let value = c.bifurcation_value.ok_or(NecklaceError::UndefinedIndex("no bifurcation value"))?;
    let beads: Vec<usize> = nk.pieces().iter().map(|p| p.beads).collect();
    Ok(index_formula(&beads, &c.signs, c.winding, value > 0.0))
}

/// Both index computations for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseReport {
    /// `None` at bifurcating configurations.
    pub formula_index: Option<i64>,
    pub signature: Signature,
    pub zero_threshold: f64,
    /// With a formula value: no zero eigenvalue and matching negative count.
    /// At a bifurcating configuration: at least one zero eigenvalue.
    pub agree: bool,
}

/// Morse analysis of an admissible critical configuration.
pub fn analyze(c: &CriticalConfig, nk: &Necklace, tols: &Tolerances) -> Result<MorseReport> {
    if !c.admissible {
        return Err(NecklaceError::UndefinedIndex("configuration is not admissible"));
    }
    let b = reduced_hessian(c, nk, tols)?;
    let sig = signature(&b, tols.zero_eigen);
    let formula = if c.bifurcating { None } else { Some(formula_index(c, nk)?) };
    let agree = match formula {
        Some(f) => sig.zero == 0 && f == sig.negative as i64,
        None => sig.zero > 0,
    };
    Ok(MorseReport { formula_index: formula, signature: sig, zero_threshold: tols.zero_eigen, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::{build_configuration, enumerate_critical, WindingBound};
    use std::f64::consts::SQRT_2;

    fn nk(pairs: &[(usize, f64)]) -> Necklace {
        Necklace::from_pairs(pairs).unwrap()
    }

    fn square(sign: Sign) -> (Necklace, CriticalConfig) {
        let n = nk(&[(4, 4.0)]);
        let w = if sign == Sign::Plus { 1 } else { -1 };
        let c = build_configuration(&n, &[sign], w, SQRT_2 / 2.0, &Tolerances::default()).unwrap();
        (n, c)
    }

    #[test]
    fn frame_of_square() {
        let (n, c) = square(Sign::Plus);
        let f = tangent_frame(&c.polygon, &n, &Tolerances::default()).unwrap();
        assert_eq!(f.dim(), 4);
        let jac = necklace::length_gradients(&c.polygon, &n).unwrap();
        assert!((jac * &f.basis).amax() <= 1e-10);
        assert!((f.orbit_dirs.transpose() * &f.basis).amax() <= 1e-12);
        assert!((f.basis.transpose() * &f.basis - DMatrix::identity(4, 4)).amax() <= 1e-12);
    }

    #[test]
    fn frame_of_rigid_triangle_is_empty() {
        let n = nk(&[(1, 1.0); 3]);
        let all = enumerate_critical(&n, WindingBound::Auto, &Tolerances::default()).unwrap();
        let f = tangent_frame(&all[0].polygon, &n, &Tolerances::default()).unwrap();
        assert_eq!(f.dim(), 0);
        assert_eq!(numerical_index(&all[0], &n, 1e-7).unwrap(), Signature { negative: 0, zero: 0, positive: 0 });
    }

    #[test]
    fn singular_frame_is_rejected() {
        let p = Polygon::from_points(&[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [0.5, 0.0]]).unwrap();
        let n = nk(&[(2, 1.0), (2, 1.0)]);
        assert!(matches!(tangent_frame(&p, &n, &Tolerances::default()), Err(NecklaceError::Singular(_))));
    }

    #[test]
    fn square_is_maximum_and_mirror_minimum() {
        let (n, c) = square(Sign::Plus);
        let s = numerical_index(&c, &n, 1e-7).unwrap();
        assert_eq!(s, Signature { negative: 4, zero: 0, positive: 0 });
        assert_eq!(formula_index(&c, &n).unwrap(), 4);
        let (n, m) = square(Sign::Minus);
        assert_eq!(numerical_index(&m, &n, 1e-7).unwrap(), Signature { negative: 0, zero: 0, positive: 4 });
        assert_eq!(formula_index(&m, &n).unwrap(), 0);
    }

    #[test]
    fn orbit_directions_add_three_zero_eigenvalues() {
        let (n, c) = square(Sign::Plus);
        let t = Tolerances::default();
        let f = tangent_frame(&c.polygon, &n, &t).unwrap();
        let orbit = linalg::column_basis(&f.orbit_dirs, 1e-12);
        let mut wide = DMatrix::zeros(8, 7);
        wide.columns_mut(0, 4).copy_from(&f.basis);
        wide.columns_mut(4, 3).copy_from(&orbit);
        let b = reduced_hessian_in(&c, &n, &wide, &t).unwrap();
        assert_eq!(signature(&b, 1e-7), Signature { negative: 4, zero: 3, positive: 0 });
    }

    #[test]
    fn non_critical_is_rejected() {
        let (n, mut c) = square(Sign::Plus);
        let mut v = c.polygon.vertices().to_vec();
        v[1].x += 0.05;
        v[1].y -= 0.05;
        c.polygon = Polygon::new(v).unwrap();
        assert!(matches!(reduced_hessian(&c, &n, &Tolerances::default()), Err(NecklaceError::NotCritical { .. })));
    }

    #[test]
    fn formula_special_cases() {
        // all positive, w = 1: full dimension 2n - k - 3
        let beads = [3, 1, 2];
        assert_eq!(index_formula(&beads, &[Sign::Plus; 3], 1, true), 2 * 6 - 3 - 3);
        // one piece: 2n - 2w - 2 for w > 0
        for n in 3..9usize {
            for w in 1..(n as i64 + 1) / 2 {
                assert_eq!(index_formula(&[n], &[Sign::Plus], w, true), 2 * n as i64 - 2 * w - 2);
            }
        }
    }

    #[test]
    fn undefined_index_cases() {
        let (n, mut c) = square(Sign::Plus);
        c.bifurcating = true;
        assert!(formula_index(&c, &n).is_err());
        c.bifurcating = false;
        c.admissible = false;
        assert!(formula_index(&c, &n).is_err());
        assert!(analyze(&c, &n, &Tolerances::default()).is_err());
    }
}
