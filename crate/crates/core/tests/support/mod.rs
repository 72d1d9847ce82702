//! Test-only oracles shared by the integration suites.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use necklace_core::critical;
use necklace_core::linalg;
use necklace_core::necklace::{self, Necklace};
use necklace_core::polygon::{self, Polygon, Vec2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn nk(pairs: &[(usize, f64)]) -> Necklace {
    Necklace::from_pairs(pairs).unwrap()
}

/// Fixed necklaces exercising linkages, one-bead, two-bead and mixed cases.
pub fn regression_suite() -> Vec<Necklace> {
    let mut out = Vec::new();
    for lengths in [
        vec![1.0, 1.0, 1.0, 1.0],
        vec![1.0, 1.3, 0.8, 1.6],
        vec![2.0, 1.0, 1.5, 1.2],
        vec![1.0; 5],
        vec![1.0, 2.0, 1.5, 0.7, 1.1],
        vec![0.9, 1.4, 1.1, 1.9, 1.3],
        vec![1.0; 6],
        vec![1.0, 1.2, 0.8, 1.5, 0.9, 1.7],
        vec![2.0, 1.1, 1.3, 0.6, 1.8, 1.0],
    ] {
        out.push(nk(&lengths.iter().map(|&l| (1, l)).collect::<Vec<_>>()));
    }
    for n in 4..=6 {
        out.push(nk(&[(n, 1.0)]));
    }
    for n in 2..=6 {
        for l in [0.37, 1.21] {
            out.push(nk(&[(n, n as f64), (1, l)]));
        }
    }
    for pairs in [
        vec![(2, 1.5), (2, 2.5)],
        vec![(3, 2.0), (2, 1.0)],
        vec![(2, 1.0), (1, 0.8), (2, 1.7)],
        vec![(3, 3.0), (1, 1.0), (1, 1.5)],
        vec![(2, 2.0), (3, 1.2)],
        vec![(4, 3.0), (2, 2.2)],
        vec![(1, 1.0), (2, 1.5), (3, 2.5)],
        vec![(2, 1.3), (2, 0.9), (2, 1.8)],
        vec![(3, 1.0), (1, 0.7), (2, 2.0)],
        vec![(1, 1.2), (1, 0.9), (4, 3.1)],
    ] {
        out.push(nk(&pairs));
    }
    out
}

pub fn describe(n: &Necklace) -> String {
    let parts: Vec<String> = n.pieces().iter().map(|p| format!("({},{})", p.beads, p.length)).collect();
    format!("({})", parts.join(","))
}

/// Random composition of `n` beads into pieces with lengths drawn so that
/// the necklace is realisable.
pub fn random_necklace(rng: &mut ChaCha8Rng, n: usize) -> Necklace {
    loop {
        let k = rng.gen_range(1..=n);
        let mut beads = vec![1usize; k];
        for _ in k..n {
            let j = rng.gen_range(0..k);
            beads[j] += 1;
        }
        let pairs: Vec<(usize, f64)> = beads.iter().map(|&b| (b, b as f64 * rng.gen_range(0.5..1.5))).collect();
        let candidate = nk(&pairs);
        if necklace::is_realisable(&candidate) {
            return candidate;
        }
    }
}

/// Random piece structure on `n` sides whose lengths are taken from `p`.
pub fn necklace_for(rng: &mut ChaCha8Rng, p: &Polygon) -> Necklace {
    let n = p.len();
    let k = rng.gen_range(1..=n);
    let mut cuts: Vec<usize> = (1..n).collect();
    for i in (1..cuts.len()).rev() {
        cuts.swap(i, rng.gen_range(0..=i));
    }
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(n);
    let sides = p.side_lengths();
    let pairs: Vec<(usize, f64)> = bounds
        .windows(2)
        .map(|w| (w[1] - w[0], sides[w[0]..w[1]].iter().sum::<f64>().max(1e-300)))
        .collect();
    nk(&pairs)
}

pub fn random_polygon(rng: &mut ChaCha8Rng, n: usize, min_side: f64) -> Polygon {
    loop {
        let v: Vec<Vec2> = (0..n).map(|_| Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let p = Polygon::new(v).unwrap();
        if p.side_lengths().iter().all(|&l| l >= min_side) {
            return p;
        }
    }
}

/// Smallest distance between `a` and `b` over rotations and translations,
/// keeping vertex labels.
pub fn procrustes_distance(a: &Polygon, b: &Polygon) -> f64 {
    let n = a.len() as f64;
    let ca = a.vertices().iter().fold(Vec2::zeros(), |s, v| s + v) / n;
    let cb = b.vertices().iter().fold(Vec2::zeros(), |s, v| s + v) / n;
    let (mut dot, mut crs) = (0.0, 0.0);
    for (p, q) in a.vertices().iter().zip(b.vertices()) {
        let (p, q) = (p - ca, q - cb);
        dot += p.dot(&q);
        crs += polygon::cross(&p, &q);
    }
    let th = crs.atan2(dot);
    let (s, c) = th.sin_cos();
    a.vertices()
        .iter()
        .zip(b.vertices())
        .map(|(p, q)| {
            let p = p - ca;
            (Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y) - (q - cb)).norm()
        })
        .fold(0.0, f64::max)
}

/// Central-difference Jacobian of `f` at `x`.
pub fn fd_jacobian<F: Fn(&DVector<f64>) -> DVector<f64>>(f: F, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let m = f(x).len();
    let mut jac = DMatrix::zeros(m, x.len());
    for c in 0..x.len() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[c] += h;
        xm[c] -= h;
        jac.set_column(c, &((f(&xp) - f(&xm)) / (2.0 * h)));
    }
    jac
}

pub fn lengths_at(nk: &Necklace, x: &DVector<f64>) -> DVector<f64> {
    let p = Polygon::from_coords(x).unwrap();
    DVector::from_vec(necklace::piece_lengths(&p, nk).unwrap())
}

/// Largest jump between one-sided difference quotients of the piece
/// lengths along any coordinate; of order one exactly when some length is
/// not differentiable at `x`.
pub fn one_sided_mismatch(nk: &Necklace, x: &DVector<f64>, h: f64) -> f64 {
    let f0 = lengths_at(nk, x);
    let mut worst = 0.0f64;
    for c in 0..x.len() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[c] += h;
        xm[c] -= h;
        let right = (lengths_at(nk, &xp) - &f0) / h;
        let left = (&f0 - lengths_at(nk, &xm)) / h;
        worst = worst.max((right - left).amax());
    }
    worst
}

fn numeric_rank(m: &DMatrix<f64>, rel: f64) -> usize {
    let sv = linalg::singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| top > 0.0 && s > rel * top).count()
}

/// Rank of the piece-length Jacobian computed by central differences.
pub fn fd_constraint_rank(nk: &Necklace, p: &Polygon) -> usize {
    let h = 1e-7 * p.diameter().max(1e-300);
    numeric_rank(&fd_jacobian(|x| lengths_at(nk, x), &p.coords(), h), 1e-6)
}

// ---------------------------------------------------------------------
// Independent search for critical points.

struct Kkt<'a> {
    nk: &'a Necklace,
    targets: DVector<f64>,
}

impl Kkt<'_> {
    fn residual(&self, x: &DVector<f64>, lam: &DVector<f64>) -> Option<DVector<f64>> {
        let p = Polygon::from_coords(x).ok()?;
        let j = necklace::length_gradients(&p, self.nk).ok()?;
        let g = polygon::area_gradient(&p) - 0.5 * j.transpose() * lam;
        let c = lengths_at(self.nk, x) - &self.targets;
        let mut f = DVector::zeros(g.len() + c.len());
        f.rows_mut(0, g.len()).copy_from(&g);
        f.rows_mut(g.len(), c.len()).copy_from(&c);
        Some(f)
    }

    fn jacobian(&self, x: &DVector<f64>, lam: &DVector<f64>) -> Option<DMatrix<f64>> {
        let p = Polygon::from_coords(x).ok()?;
        let j = necklace::length_gradients(&p, self.nk).ok()?;
        let mut h = polygon::area_hessian(p.len());
        for (hj, l) in necklace::length_hessians(&p, self.nk).ok()?.iter().zip(lam.iter()) {
            h -= hj * (0.5 * l);
        }
        let (m, k) = (x.len(), lam.len());
        let mut big = DMatrix::zeros(m + k, m + k);
        big.view_mut((0, 0), (m, m)).copy_from(&h);
        big.view_mut((0, m), (m, k)).copy_from(&(-0.5 * j.transpose()));
        big.view_mut((m, 0), (k, m)).copy_from(&j);
        Some(big)
    }

    /// Gauss-Newton projection onto the level set of the piece lengths.
    fn project(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        let mut x = x.clone();
        let scale = self.nk.total_length();
        for _ in 0..60 {
            let p = Polygon::from_coords(&x).ok()?;
            let c = lengths_at(self.nk, &x) - &self.targets;
            if c.amax() <= 1e-13 * scale {
                return Some(x);
            }
            let j = necklace::length_gradients(&p, self.nk).ok()?;
            x -= linalg::lstsq(&j, &c, 1e-12);
        }
        None
    }

    fn newton(&self, x0: &DVector<f64>) -> Option<DVector<f64>> {
        let p = Polygon::from_coords(x0).ok()?;
        let mut x = x0.clone();
        let mut lam = DVector::from_vec(critical::least_squares_multipliers(&p, self.nk).ok()?);
        let m = x.len();
        let mut f = self.residual(&x, &lam)?;
        for _ in 0..80 {
            if f.norm() <= 1e-13 * self.nk.total_length() {
                break;
            }
            let step = -linalg::lstsq(&self.jacobian(&x, &lam)?, &f, 1e-12);
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let xn = &x + t * step.rows(0, m);
                let ln = &lam + t * step.rows(m, lam.len());
                if let Some(fnew) = self.residual(&xn, &ln) {
                    if fnew.norm() < (1.0 - 1e-4 * t) * f.norm() {
                        x = xn;
                        lam = ln;
                        f = fnew;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Some(x)
    }

    fn flow(&self, x0: &DVector<f64>, direction: f64) -> Option<DVector<f64>> {
        let scale = self.nk.total_length();
        let mut x = x0.clone();
        let mut h = 0.05;
        for _ in 0..400 {
            let p = Polygon::from_coords(&x).ok()?;
            let j = necklace::length_gradients(&p, self.nk).ok()?;
            let q = linalg::column_basis(&j.transpose(), 1e-12);
            let pg = linalg::project_out(&polygon::area_gradient(&p), &q);
            if pg.norm() <= 1e-4 * scale {
                break;
            }
            let a0 = polygon::oriented_area(&p);
            let mut moved = false;
            while h > 1e-12 {
                if let Some(xn) = self.project(&(&x + direction * h * &pg)) {
                    let a1 = polygon::oriented_area(&Polygon::from_coords(&xn).ok()?);
                    if direction * (a1 - a0) >= 1e-4 * h * pg.norm_squared() {
                        x = xn;
                        moved = true;
                        h *= 2.0;
                        break;
                    }
                }
                h *= 0.5;
            }
            if !moved {
                break;
            }
        }
        Some(x)
    }
}

/// A stationary, non-singular configuration reached by the search.
pub struct Found {
    pub polygon: Polygon,
    pub residual: f64,
}

/// Runs one search from a random feasible start. `mode` selects plain
/// Newton (0), ascent then Newton (1) or descent then Newton (2).
pub fn search(nk: &Necklace, rng: &mut ChaCha8Rng, mode: usize) -> Option<Found> {
    let kkt = Kkt { nk, targets: DVector::from_iterator(nk.k(), nk.pieces().iter().map(|p| p.length)) };
    let n = nk.n();
    let scale = nk.total_length();
    let start = DVector::from_fn(2 * n, |_, _| rng.gen_range(-0.3..0.3) * scale);
    let x = kkt.project(&start)?;
    let x = match mode {
        1 => kkt.flow(&x, 1.0)?,
        2 => kkt.flow(&x, -1.0)?,
        _ => x,
    };
    let x = kkt.newton(&x)?;
    let p = Polygon::from_coords(&x).ok()?;
    if (lengths_at(nk, &x) - &kkt.targets).amax() > 1e-10 * scale {
        return None;
    }
    if p.side_lengths().iter().any(|&l| l < 1e-6 * scale) {
        return None;
    }
    let sv = linalg::singular_values(&necklace::length_gradients(&p, nk).ok()?);
    if sv.last()? < &(1e-6 * sv[0]) {
        return None;
    }
    let residual = critical::projected_gradient_norm(&p, nk).ok()?;
    if residual > 1e-7 * scale {
        return None;
    }
    Some(Found { polygon: p, residual })
}
