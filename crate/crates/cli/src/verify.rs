//! Randomized self-checks over generated necklaces.

use crate::error::CliResult;
use necklace_core::chebyshev;
use necklace_core::critical::{self, WindingBound};
use necklace_core::morse;
use necklace_core::necklace::{self, Piece};
use necklace_core::{Necklace, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Default, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub necklaces: usize,
    pub critical_points: usize,
    pub morse_checked: usize,
    pub two_bead_roots: usize,
    pub failures: Vec<String>,
}

fn random_necklace(rng: &mut ChaCha8Rng, max_beads: usize) -> Necklace {
    loop {
        let n = rng.gen_range(3..=max_beads.max(3));
        let k = rng.gen_range(1..=n.min(4));
        let mut cuts: Vec<usize> = (1..n).collect();
        for i in 0..k - 1 {
            let j = rng.gen_range(i..cuts.len());
            cuts.swap(i, j);
        }
        let mut cuts: Vec<usize> = cuts[..k - 1].to_vec();
        cuts.sort_unstable();
        cuts.push(n);
        let mut prev = 0;
        let pieces = cuts
            .iter()
            .map(|&c| {
                let beads = c - prev;
                prev = c;
                Piece { beads, length: beads as f64 * rng.gen_range(0.5..2.0) }
            })
            .collect();
        let nk = Necklace::new(pieces).expect("generated pieces are valid");
        if necklace::is_realisable(&nk) {
            return nk;
        }
    }
}

fn describe(nk: &Necklace) -> String {
    let parts: Vec<String> = nk.pieces().iter().map(|p| format!("({}, {:.6})", p.beads, p.length)).collect();
    format!("({})", parts.join(", "))
}

fn check_necklace(nk: &Necklace, tols: &Tolerances, report: &mut VerifyReport) -> CliResult<()> {
    let l = nk.total_length();
    let dim = necklace::manifold_dimension(nk)? as i64;
    let set = critical::enumerate_all(nk, WindingBound::Auto, tols)?;
    let name = describe(nk);
    report.critical_points += set.interior.len();
    for c in &set.interior {
        let tag = format!("{name} w={} E={:?}", c.winding, c.sign_values());
        let residual = critical::projected_gradient_norm(&c.polygon, nk)?;
        if residual > 1e-9 * l {
            report.failures.push(format!("{tag}: stationarity residual {residual:e}"));
        }
        let lengths = necklace::piece_lengths(&c.polygon, nk)?;
        let worst = lengths.iter().zip(nk.pieces()).map(|(a, p)| (a - p.length).abs()).fold(0.0, f64::max);
        if worst > 1e-10 * l {
            report.failures.push(format!("{tag}: piece lengths off by {worst:e}"));
        }
        let Some(mirror) = set.interior.iter().find(|m| c.is_mirror_of(m, tols.dedup)) else {
            report.failures.push(format!("{tag}: no mirror configuration"));
            continue;
        };
        if (mirror.area + c.area).abs() > 1e-9 * l * l {
            report.failures.push(format!("{tag}: mirror area {} vs {}", mirror.area, c.area));
        }
        if !c.admissible || c.bifurcating {
            continue;
        }
        let r = morse::analyze(c, nk, tols)?;
        report.morse_checked += 1;
        if !r.agree {
            report.failures.push(format!(
                "{tag}: formula {:?} vs signature {:?}",
                r.formula_index, r.signature
            ));
        }
        if let (Some(a), Ok(b)) = (r.formula_index, morse::formula_index(mirror, nk)) {
            if a + b != dim {
                report.failures.push(format!("{tag}: mirror indices {a} + {b} != {dim}"));
            }
        }
    }
    Ok(())
}

fn check_two_bead(rng: &mut ChaCha8Rng, tols: &Tolerances, report: &mut VerifyReport) -> CliResult<()> {
    let n = rng.gen_range(2..=8);
    let big_l = rng.gen_range(1.0..5.0);
    let l = big_l * rng.gen_range(0.05..0.95);
    let solutions = chebyshev::solve_two_bead(n, big_l, l, tols)?;
    let nk = chebyshev::two_bead_necklace(n, big_l, l)?;
    let set = critical::enumerate_all(&nk, WindingBound::Auto, tols)?;
    let mut xs: Vec<f64> = set.interior.iter().chain(&set.boundary).map(chebyshev::x_of).collect();
    xs.sort_by(|a, b| b.total_cmp(a));
    let name = format!("two-bead n={n} L={big_l:.6} l={l:.6}");
    report.two_bead_roots += solutions.len();
    if xs.len() != solutions.len()
        || xs.iter().zip(&solutions).any(|(a, s)| (a - s.x).abs() > 1e-9)
    {
        report.failures.push(format!(
            "{name}: roots {:?} vs enumeration {:?}",
            solutions.iter().map(|s| s.x).collect::<Vec<_>>(),
            xs
        ));
        return Ok(());
    }
    let order = chebyshev::index_by_root_order(n, &xs);
    for (s, rule) in solutions.iter().zip(order) {
        let c = &s.config;
        if !c.admissible || c.bifurcating {
            continue;
        }
        let formula = morse::formula_index(c, &nk)?;
        if rule != Some(formula) {
            report.failures.push(format!("{name}: x={} root-order {rule:?} vs formula {formula}", s.x));
        }
    }
    Ok(())
}

pub fn run(seed: u64, count: usize, max_beads: usize, tols: &Tolerances) -> CliResult<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport { seed, ..Default::default() };
    for _ in 0..count {
        let nk = random_necklace(&mut rng, max_beads);
        check_necklace(&nk, tols, &mut report)?;
        report.necklaces += 1;
        check_two_bead(&mut rng, tols, &mut report)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_necklaces_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let nk = random_necklace(&mut rng, 7);
            assert!((3..=7).contains(&nk.n()));
            assert!(necklace::is_realisable(&nk));
        }
    }

    #[test]
    fn small_run_is_clean() {
        let r = run(11, 4, 5, &Tolerances::default()).unwrap();
        assert_eq!(r.necklaces, 4);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
    }
}
