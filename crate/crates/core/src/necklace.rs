//! Necklace instances and the piece-length constraints `L_j` they impose.
//!
//! Indexing is 0-based: piece `j` owns sides `start(j) .. start(j) + n_j`,
//! and its fixed bead is vertex `start(j)`. In 1-based terms this is
//! `s(j) = start(j) + 1` and `j* = {s(j), ..., s(j + 1) - 1}`.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{NecklaceError, Result};
use crate::linalg;
use crate::polygon::Polygon;
use crate::tol::Tolerances;

/// One piece of string: `beads` beads (the fixed one plus `beads - 1`
/// sliding ones) followed by string of total length `length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub beads: usize,
    pub length: f64,
}

/// On-disk instance format: `{"pieces": [{"beads": 2, "length": 1.5}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NecklaceSpec {
    pub pieces: Vec<Piece>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Necklace {
    pieces: Vec<Piece>,
    starts: Vec<usize>,
    beads: usize,
    total_length: f64,
}

impl Necklace {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(NecklaceError::Instance("a necklace needs at least one piece".into()));
        }
        for (j, p) in pieces.iter().enumerate() {
            if p.beads == 0 {
                return Err(NecklaceError::Instance(format!("piece {j} has no beads")));
            }
            if !(p.length.is_finite() && p.length > 0.0) {
                return Err(NecklaceError::Instance(format!(
                    "piece {j} has non-positive length {}",
                    p.length
                )));
            }
        }
        let mut starts = Vec::with_capacity(pieces.len());
        let mut acc = 0;
        for p in &pieces {
            starts.push(acc);
            acc += p.beads;
        }
        let total_length = pieces.iter().map(|p| p.length).sum();
        Ok(Self { pieces, starts, beads: acc, total_length })
    }

    /// Builds a necklace from `(beads, length)` pairs.
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(beads, length)| Piece { beads, length }).collect())
    }

    pub fn from_spec(spec: &NecklaceSpec) -> Result<Self> {
        Self::new(spec.pieces.clone())
    }

    pub fn to_spec(&self) -> NecklaceSpec {
        NecklaceSpec { pieces: self.pieces.clone() }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Number of pieces `k`.
    pub fn k(&self) -> usize {
        self.pieces.len()
    }

    /// Total number of beads `n`.
    pub fn n(&self) -> usize {
        self.beads
    }

    /// Total string length `L`.
    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Index of the fixed bead (and first side) of piece `j`.
    pub fn start(&self, j: usize) -> usize {
        self.starts[j]
    }

    /// Side indices belonging to piece `j`.
    pub fn sides(&self, j: usize) -> std::ops::Range<usize> {
        self.starts[j]..self.starts[j] + self.pieces[j].beads
    }

    /// Piece owning side `i`.
    pub fn piece_of_side(&self, i: usize) -> usize {
        self.starts.partition_point(|&s| s <= i % self.beads) - 1
    }

    /// Vertex `i` is inner when sides `i - 1` and `i` lie in the same piece.
    pub fn is_inner_vertex(&self, i: usize) -> bool {
        !self.starts.contains(&(i % self.beads))
    }

    /// Common side length `L_j / n_j` at critical configurations.
    pub fn side_length(&self, j: usize) -> f64 {
        self.pieces[j].length / self.pieces[j].beads as f64
    }

    fn check_size(&self, p: &Polygon) -> Result<()> {
        if p.len() != self.beads {
            return Err(NecklaceError::Instance(format!(
                "polygon has {} vertices, necklace has {} beads",
                p.len(),
                self.beads
            )));
        }
        Ok(())
    }
}

/// `L_j(P)`: total side length of each piece.
pub fn piece_lengths(p: &Polygon, nk: &Necklace) -> Result<Vec<f64>> {
    nk.check_size(p)?;
    let l = p.side_lengths();
    Ok((0..nk.k()).map(|j| nk.sides(j).map(|i| l[i]).sum()).collect())
}

/// True iff `|L_j(P) - L_j| <= tol * L` for every piece.
pub fn is_configuration(p: &Polygon, nk: &Necklace, tol: f64) -> bool {
    match piece_lengths(p, nk) {
        Ok(ls) => ls
            .iter()
            .zip(nk.pieces())
            .all(|(l, piece)| (l - piece.length).abs() <= tol * nk.total_length()),
        Err(_) => false,
    }
}

fn unit_sides(p: &Polygon) -> Result<Vec<(nalgebra::Vector2<f64>, f64)>> {
    (0..p.len())
        .map(|i| {
            let s = p.side(i);
            let l = s.norm();
            if l == 0.0 {
                Err(NecklaceError::NonDifferentiable { side: i })
            } else {
                Ok((s / l, l))
            }
        })
        .collect()
}

/// Gradients of the individual side lengths `l_i`, one row per side.
pub fn side_length_gradients(p: &Polygon) -> Result<DMatrix<f64>> {
    let n = p.len();
    let units = unit_sides(p)?;
    let mut g = DMatrix::zeros(n, 2 * n);
    for (i, (u, _)) in units.iter().enumerate() {
        let next = (i + 1) % n;
        g[(i, 2 * i)] -= u.x;
        g[(i, 2 * i + 1)] -= u.y;
        g[(i, 2 * next)] += u.x;
        g[(i, 2 * next + 1)] += u.y;
    }
    Ok(g)
}

/// Gradients of `L_1, ..., L_k` as the rows of a `k x 2n` matrix.
///
/// At the fixed bead `s(j)` the row holds `-(cos b_i, sin b_i)`, at inner
/// vertices of the piece `(cos b_{i-1} - cos b_i, sin b_{i-1} - sin b_i)`
/// and at the next fixed bead `(cos b_{i-1}, sin b_{i-1})`.
pub fn length_gradients(p: &Polygon, nk: &Necklace) -> Result<DMatrix<f64>> {
    nk.check_size(p)?;
    let sides = side_length_gradients(p)?;
    let n = p.len();
    let mut g = DMatrix::zeros(nk.k(), 2 * n);
    for j in 0..nk.k() {
        for i in nk.sides(j) {
            let row = sides.row(i).into_owned();
            let mut target = g.row_mut(j);
            target += row;
        }
    }
    Ok(g)
}

/// Hessians of `L_1, ..., L_k`, assembled from the side-length blocks
/// `(I - u u^T) / l_i`.
pub fn length_hessians(p: &Polygon, nk: &Necklace) -> Result<Vec<DMatrix<f64>>> {
    nk.check_size(p)?;
    let n = p.len();
    let units = unit_sides(p)?;
    let mut out = vec![DMatrix::zeros(2 * n, 2 * n); nk.k()];
    for (i, (u, l)) in units.iter().enumerate() {
        let block = (Matrix2::identity() - u * u.transpose()) / *l;
        let h = &mut out[nk.piece_of_side(i)];
        let a = 2 * i;
        let b = 2 * ((i + 1) % n);
        for r in 0..2 {
            for c in 0..2 {
                h[(a + r, a + c)] += block[(r, c)];
                h[(b + r, b + c)] += block[(r, c)];
                h[(a + r, b + c)] -= block[(r, c)];
                h[(b + r, a + c)] -= block[(r, c)];
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularReason {
    /// Some side has (numerically) vanished.
    ZeroSide,
    /// The polygon lies on a line with matching directions at every inner vertex.
    AlignedLine,
}

/// Geometric singularity test: `Some(reason)` for singular configurations.
pub fn is_singular(p: &Polygon, nk: &Necklace, tols: &Tolerances) -> Result<Option<SingularReason>> {
    nk.check_size(p)?;
    let scale = nk.total_length();
    let lengths = p.side_lengths();
    if lengths.iter().any(|&l| l <= tols.zero_side * scale) {
        return Ok(Some(SingularReason::ZeroSide));
    }
    // Collinearity: smallest singular value of the centred vertex matrix.
    let n = p.len();
    let mean = p.vertices().iter().sum::<nalgebra::Vector2<f64>>() / n as f64;
    let centred = DMatrix::from_fn(n, 2, |r, c| p.vertex(r)[c] - mean[c]);
    let sv = linalg::singular_values(&centred);
    if sv[1] > tols.collinear * scale {
        return Ok(None);
    }
    let aligned = (0..n).filter(|&i| nk.is_inner_vertex(i)).all(|i| {
        let a = p.side(i + n - 1) / lengths[(i + n - 1) % n];
        let b = p.side(i) / lengths[i];
        (a - b).norm() <= tols.collinear
    });
    Ok(aligned.then_some(SingularReason::AlignedLine))
}

/// Numerical rank of the constraint Jacobian (relative cut-off `rel_tol`).
pub fn constraint_rank(p: &Polygon, nk: &Necklace, rel_tol: f64) -> Result<usize> {
    let g = length_gradients(p, nk)?;
    let sv = linalg::singular_values(&g);
    let top = sv.first().copied().unwrap_or(0.0);
    Ok(sv.iter().filter(|&&s| top > 0.0 && s > rel_tol * top).count())
}

/// `2 L_j < L` for every single-bead piece.
pub fn is_realisable(nk: &Necklace) -> bool {
    first_unrealisable(nk).is_none()
}

fn first_unrealisable(nk: &Necklace) -> Option<usize> {
    nk.pieces()
        .iter()
        .position(|p| p.beads == 1 && 2.0 * p.length >= nk.total_length())
}

/// Dimension `2n - k - 3` of the smooth part of the configuration space.
pub fn manifold_dimension(nk: &Necklace) -> Result<usize> {
    if let Some(piece) = first_unrealisable(nk) {
        return Err(NecklaceError::NotRealisable { piece });
    }
    Ok(2 * nk.n() - nk.k() - 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::Vec2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square() -> Polygon {
        Polygon::from_points(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    fn nk(pairs: &[(usize, f64)]) -> Necklace {
        Necklace::from_pairs(pairs).unwrap()
    }

    fn random_polygon(rng: &mut ChaCha8Rng, n: usize) -> Polygon {
        Polygon::new((0..n).map(|_| Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect())
            .unwrap()
    }

    fn random_split(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
        let k = rng.gen_range(1..=n);
        let mut beads = vec![1; k];
        for _ in 0..n - k {
            let j = rng.gen_range(0..k);
            beads[j] += 1;
        }
        beads
    }

    /// Necklace whose constraint is satisfied by `p` for the given bead split.
    fn matching_necklace(p: &Polygon, beads: &[usize]) -> Necklace {
        let l = p.side_lengths();
        let mut acc = 0;
        let mut pairs = Vec::new();
        for &b in beads {
            pairs.push((b, l[acc..acc + b].iter().sum()));
            acc += b;
        }
        nk(&pairs)
    }

    #[test]
    fn index_bookkeeping() {
        let n = nk(&[(2, 1.0), (1, 1.0), (4, 3.0)]);
        assert_eq!(n.n(), 7);
        assert_eq!(n.k(), 3);
        assert_eq!(n.total_length(), 5.0);
        assert_eq!(n.sides(2), 3..7);
        assert_eq!(n.piece_of_side(0), 0);
        assert_eq!(n.piece_of_side(2), 1);
        assert_eq!(n.piece_of_side(6), 2);
        let inner: Vec<usize> = (0..7).filter(|&i| n.is_inner_vertex(i)).collect();
        assert_eq!(inner, vec![1, 4, 5, 6]);
    }

    #[test]
    fn instance_validation() {
        assert!(Necklace::from_pairs(&[]).is_err());
        assert!(Necklace::from_pairs(&[(0, 1.0), (3, 1.0)]).is_err());
        assert!(Necklace::from_pairs(&[(3, 0.0)]).is_err());
        assert!(!is_realisable(&nk(&[(1, 3.0), (1, 1.0)])));
        let spec: NecklaceSpec =
            serde_json::from_str(r#"{"pieces":[{"beads":4,"length":4.0}]}"#).unwrap();
        assert_eq!(Necklace::from_spec(&spec).unwrap().n(), 4);
        assert!(serde_json::from_str::<NecklaceSpec>(r#"{"pieces":[{"beads":4,"lenght":4.0}]}"#).is_err());
        assert!(serde_json::from_str::<NecklaceSpec>(r#"{"pieces":[],"extra":1}"#).is_err());
    }

    #[test]
    fn square_piece_lengths() {
        let sq = square();
        assert_eq!(piece_lengths(&sq, &nk(&[(1, 1.0); 4])).unwrap(), vec![1.0; 4]);
        assert_eq!(piece_lengths(&sq, &nk(&[(2, 2.0), (2, 2.0)])).unwrap(), vec![2.0, 2.0]);
        let c = Polygon::from_points(&[[1.0, 1.0]; 4]).unwrap();
        assert_eq!(piece_lengths(&c, &nk(&[(2, 2.0), (2, 2.0)])).unwrap(), vec![0.0, 0.0]);
        assert!(piece_lengths(&sq, &nk(&[(3, 2.0)])).is_err());
    }

    #[test]
    fn square_configurations() {
        let sq = square();
        assert!(is_configuration(&sq, &nk(&[(4, 4.0)]), 1e-12));
        assert!(!is_configuration(&sq, &nk(&[(4, 5.0)]), 1e-12));
        assert!(is_configuration(&sq, &nk(&[(2, 2.0), (2, 2.0)]), 1e-12));
    }

    #[test]
    fn gradient_rows_are_translation_invariant() {
        let g = length_gradients(&square(), &nk(&[(4, 4.0)])).unwrap();
        let sx: f64 = (0..4).map(|i| g[(0, 2 * i)]).sum();
        let sy: f64 = (0..4).map(|i| g[(0, 2 * i + 1)]).sum();
        assert_eq!(sx, 0.0);
        assert_eq!(sy, 0.0);
    }

    #[test]
    fn gradients_follow_case_analysis() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_polygon(&mut rng, 6);
        let n = matching_necklace(&p, &[2, 1, 3]);
        let g = length_gradients(&p, &n).unwrap();
        let beta: Vec<f64> = (0..6).map(|i| p.direction_angle(i).unwrap()).collect();
        for j in 0..3 {
            let s = n.start(j);
            let s_next = n.start((j + 1) % 3);
            for i in 0..6 {
                let prev = (i + 5) % 6;
                let (ex, ey) = if i == s {
                    (-beta[i].cos(), -beta[i].sin())
                } else if n.piece_of_side(prev) == j && n.is_inner_vertex(i) {
                    (beta[prev].cos() - beta[i].cos(), beta[prev].sin() - beta[i].sin())
                } else if i == s_next {
                    (beta[prev].cos(), beta[prev].sin())
                } else {
                    (0.0, 0.0)
                };
                assert!((g[(j, 2 * i)] - ex).abs() < 1e-14);
                assert!((g[(j, 2 * i + 1)] - ey).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_side_is_not_differentiable() {
        let p = Polygon::from_points(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let n = nk(&[(2, 1.0), (2, 1.0 + 2f64.sqrt())]);
        assert_eq!(length_gradients(&p, &n), Err(NecklaceError::NonDifferentiable { side: 1 }));
        assert!(length_hessians(&p, &n).is_err());
        assert_eq!(is_singular(&p, &n, &Tolerances::default()).unwrap(), Some(SingularReason::ZeroSide));
    }

    #[test]
    fn length_hessian_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = random_polygon(&mut rng, 7);
            let n = matching_necklace(&p, &random_split(&mut rng, 7));
            let hs = length_hessians(&p, &n).unwrap();
            let tx = nalgebra::DVector::from_fn(14, |r, _| if r % 2 == 0 { 1.0 } else { 0.0 });
            for h in &hs {
                assert!((h - h.transpose()).norm() < 1e-14);
                assert!(linalg::symmetric_eigenvalues(h)[0] > -1e-12 * h.norm());
                assert!((h * &tx).norm() < 1e-12 * h.norm());
            }
        }
    }

    #[test]
    fn doubled_segment_is_aligned_singular() {
        for m in 2..5 {
            // out along [0, 1] in m steps, then back in m steps
            let mut pts = Vec::new();
            for i in 0..m {
                pts.push([i as f64 / m as f64, 0.0]);
            }
            for i in 0..m {
                pts.push([1.0 - i as f64 / m as f64, 0.0]);
            }
            let p = Polygon::from_points(&pts).unwrap();
            let n = nk(&[(m, 1.0), (m, 1.0)]);
            assert!(is_configuration(&p, &n, 1e-12));
            assert_eq!(is_singular(&p, &n, &Tolerances::default()).unwrap(), Some(SingularReason::AlignedLine));
            assert_eq!(constraint_rank(&p, &n, 1e-8).unwrap(), 1);
        }
    }

    #[test]
    fn square_is_regular() {
        for n in [nk(&[(4, 4.0)]), nk(&[(2, 2.0), (2, 2.0)]), nk(&[(1, 1.0); 4])] {
            assert_eq!(is_singular(&square(), &n, &Tolerances::default()).unwrap(), None);
        }
    }

    #[test]
    fn rank_agrees_with_geometry_on_random_polygons() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let size = rng.gen_range(3..9);
            let p = random_polygon(&mut rng, size);
            let n = matching_necklace(&p, &random_split(&mut rng, size));
            let singular = is_singular(&p, &n, &Tolerances::default()).unwrap().is_some();
            let deficient = constraint_rank(&p, &n, 1e-8).unwrap() < n.k();
            assert_eq!(singular, deficient);
            if n.k() == 1 {
                assert!(!deficient);
            }
            let total: f64 = piece_lengths(&p, &n).unwrap().iter().sum();
            assert!((total - p.perimeter()).abs() <= 1e-12 * total);
        }
    }

    #[test]
    fn realisability_and_dimension() {
        assert!(is_realisable(&nk(&[(3, 3.0), (1, 1.0)])));
        assert!(!is_realisable(&nk(&[(1, 3.0), (1, 1.0), (1, 1.0)])));
        assert!(is_realisable(&nk(&[(1, 1.0); 3])));
        assert_eq!(manifold_dimension(&nk(&[(4, 4.0)])).unwrap(), 4);
        assert_eq!(manifold_dimension(&nk(&[(1, 1.0); 3])).unwrap(), 0);
        assert_eq!(manifold_dimension(&nk(&[(2, 2.0), (1, 1.0)])).unwrap(), 1);
        assert_eq!(
            manifold_dimension(&nk(&[(1, 3.0), (2, 1.0)])),
            Err(NecklaceError::NotRealisable { piece: 0 })
        );
    }
}
