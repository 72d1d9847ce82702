//! Bracketing root finder for smooth scalar functions on a closed interval.
//!
//! The interval is sampled uniformly; sign changes of the derivative are
//! refined into extremum locations so that every sub-interval is monotone,
//! and each monotone piece with a sign change of `f` is bisected.

/// Bisection on a bracket `[lo, hi]` with `f(lo) * f(hi) < 0`. Stops once
/// `|f| < ftol` or the bracket cannot shrink any further (pass `0.0` for
/// full precision).
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, ftol: f64) -> f64 {
    let mut flo = f(lo);
    let fhi = f(hi);
    let (mut best, mut best_val) = if flo.abs() <= fhi.abs() { (lo, flo.abs()) } else { (hi, fhi.abs()) };
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return best;
        }
        let fm = f(mid);
        if fm.abs() < best_val {
            best = mid;
            best_val = fm.abs();
        }
        if fm == 0.0 || fm.abs() < ftol {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
}

/// All roots of `f` on `[a, b]` found by scanning `samples` uniform
/// sub-intervals, splitting them at extrema located through `df`, and
/// bisecting every monotone piece whose end values differ in sign.
pub fn bracket_roots<F, D>(f: F, df: D, a: f64, b: f64, samples: usize, ftol: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    assert!(b > a && samples >= 1);
    let grid: Vec<f64> = (0..=samples)
        .map(|i| if i == samples { b } else { a + (b - a) * i as f64 / samples as f64 })
        .collect();

    let mut breaks = Vec::with_capacity(grid.len() * 2);
    let dvals: Vec<f64> = grid.iter().map(|&x| df(x)).collect();
    for i in 0..samples {
        breaks.push(grid[i]);
        let (d0, d1) = (dvals[i], dvals[i + 1]);
        if d0.is_finite() && d1.is_finite() && d0 != 0.0 && d1 != 0.0 && (d0 < 0.0) != (d1 < 0.0) {
            let x = bisect(&df, grid[i], grid[i + 1], 0.0);
            if x > grid[i] && x < grid[i + 1] {
                breaks.push(x);
            }
        }
    }
    breaks.push(b);

    let vals: Vec<f64> = breaks.iter().map(|&x| f(x)).collect();
    let mut roots: Vec<f64> = Vec::new();
    let mut push = |x: f64| {
        if roots.last().is_none_or(|&r| x > r) {
            roots.push(x);
        }
    };
    for i in 0..breaks.len() - 1 {
        let (f0, f1) = (vals[i], vals[i + 1]);
        if f0 == 0.0 {
            push(breaks[i]);
        } else if f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            push(bisect(&f, breaks[i], breaks[i + 1], ftol));
        }
    }
    if vals[breaks.len() - 1] == 0.0 {
        push(b);
    }
    roots
}
