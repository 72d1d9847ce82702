//! The two-fixed-beads case `((n, L), (1, l))`.
//!
//! Critical configurations correspond to the solutions `x` in `(-1, 1)` of
//! `|U_{n-1}(x)| = n l / L`, where `U_m` is the Chebyshev polynomial of the
//! second kind and `x = E_1 cos A_1` encodes the half-angle of the `n`-bead
//! piece.

use std::f64::consts::PI;

use crate::critical::{self, CriticalConfig, Sign};
use crate::error::{NecklaceError, Result};
use crate::necklace::Necklace;
use crate::roots;
use crate::tol::Tolerances;

/// Coefficients of `U_m` in ascending powers of `x`.
pub fn chebyshev_u(m: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if m == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 2.0];
    for _ in 1..m {
        let mut next = vec![0.0; cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `(U_m(x), U_m'(x))` by the three-term recurrence.
pub fn chebyshev_u_eval(m: usize, x: f64) -> (f64, f64) {
    let (mut u_prev, mut d_prev) = (1.0, 0.0);
    if m == 0 {
        return (u_prev, d_prev);
    }
    let (mut u, mut d) = (2.0 * x, 2.0);
    for _ in 1..m {
        let u_next = 2.0 * x * u - u_prev;
        let d_next = 2.0 * u + 2.0 * x * d - d_prev;
        u_prev = u;
        d_prev = d;
        u = u_next;
        d = d_next;
    }
    (u, d)
}

/// One solution of the two-bead equation with its configuration.
#[derive(Debug, Clone)]
pub struct TwoBeadSolution {
    pub x: f64,
    pub config: CriticalConfig,
}

fn check_two_bead(n: usize, big_l: f64, l: f64) -> Result<()> {
    if n < 2 {
        return Err(NecklaceError::Instance(format!("two-bead case needs n >= 2, got {n}")));
    }
    if !(l > 0.0 && big_l > l && big_l.is_finite()) {
        return Err(NecklaceError::Instance(format!(
            "two-bead case needs L > l > 0, got L = {big_l}, l = {l}"
        )));
    }
    Ok(())
}

pub fn two_bead_necklace(n: usize, big_l: f64, l: f64) -> Result<Necklace> {
    check_two_bead(n, big_l, l)?;
    Necklace::from_pairs(&[(n, big_l), (1, l)])
}

/// The critical configuration of `((n, L), (1, l))` encoded by `x`.
pub fn config_from_x(nk: &Necklace, x: f64, tols: &Tolerances) -> Result<CriticalConfig> {
    let n = nk.pieces()[0].beads;
    if !(x > -1.0 && x < 1.0) {
        return Err(NecklaceError::Domain { radius: x, min_radius: -1.0 });
    }
    let sign = if x < 0.0 { Sign::Minus } else { Sign::Plus };
    let half = x.abs().acos();
    let radius = nk.side_length(0) / (2.0 * half.sin());
    // signed central angle of the closing side, normalised to (-pi, pi]
    let swept = n as f64 * sign.value() * 2.0 * half;
    let mut closing = (-swept).rem_euclid(2.0 * PI);
    if closing > PI {
        closing -= 2.0 * PI;
    }
    let closing_sign = if closing < 0.0 { Sign::Minus } else { Sign::Plus };
    let w = ((swept + closing) / (2.0 * PI)).round() as i64;
    critical::build_configuration(nk, &[sign, closing_sign], w, radius, tols)
}

/// `x = E_1 cos A_1` of a two-bead configuration.
pub fn x_of(config: &CriticalConfig) -> f64 {
    config.signs[0].value() * config.half_angles[0].cos()
}

/// The two-bead configuration at `x` together with the closing length
/// `l = L |U_{n-1}(x)| / n` that makes it critical.
pub fn two_bead_config(n: usize, big_l: f64, x: f64, tols: &Tolerances) -> Result<(Necklace, CriticalConfig)> {
    let l = big_l * chebyshev_u_eval(n - 1, x).0.abs() / n as f64;
    let nk = two_bead_necklace(n, big_l, l)?;
    let config = config_from_x(&nk, x, tols)?;
    Ok((nk, config))
}

/// All solutions of `|U_{n-1}(x)| = n l / L` on `(-1, 1)`, sorted
/// descending, each with its critical configuration.
pub fn solve_two_bead(n: usize, big_l: f64, l: f64, tols: &Tolerances) -> Result<Vec<TwoBeadSolution>> {
    let nk = two_bead_necklace(n, big_l, l)?;
    let target = n as f64 * l / big_l;
    let m = n - 1;
    let samples = (tols.scan_per_bead * n as f64).ceil() as usize;
    let mut xs = Vec::new();
    for rhs in [target, -target] {
        xs.extend(roots::bracket_roots(
            |x| chebyshev_u_eval(m, x).0 - rhs,
            |x| chebyshev_u_eval(m, x).1,
            -1.0,
            1.0,
            samples,
            0.0,
        ));
    }
    xs.retain(|&x| x > -1.0 && x < 1.0);
    xs.sort_by(|a, b| b.total_cmp(a));
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
    xs.into_iter()
        .map(|x| Ok(TwoBeadSolution { x, config: config_from_x(&nk, x, tols)? }))
        .collect()
}

/// Morse index assigned by root position: `2n - 2 - i` for the `i`-th
/// largest positive root, `i - 1` for the `i`-th smallest negative root.
/// Expects `xs` sorted descending; the root `x = 0` gets `None`.
pub fn index_by_root_order(n: usize, xs: &[f64]) -> Vec<Option<i64>> {
    let n = n as i64;
    let negative = xs.iter().filter(|&&x| x < 0.0).count();
    let mut out = Vec::with_capacity(xs.len());
    let (mut i_pos, mut i_neg) = (0i64, 0i64);
    for &x in xs {
        if x > 0.0 {
            i_pos += 1;
            out.push(Some(2 * n - 2 - i_pos));
        } else if x < 0.0 {
            i_neg += 1;
            // descending order visits negatives from the largest; rank from the smallest
            out.push(Some(negative as i64 - i_neg));
        } else {
            out.push(None);
        }
    }
    out
}
