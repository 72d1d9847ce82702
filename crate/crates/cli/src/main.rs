mod args;
mod error;
mod record;
mod render;
mod verify;

use args::{Cli, Command, InstanceArgs, RenderArgs, SingularArgs, TwoBeadArgs, VerifyArgs};
use clap::Parser;
use error::{CliError, CliResult};
use necklace_core::chebyshev;
use necklace_core::critical::{self, WindingBound};
use necklace_core::morse;
use necklace_core::necklace;
use necklace_core::{Necklace, NecklaceError, NecklaceSpec, Polygon, Tolerances};
use record::{CriticalRecord, MorseRecord, PolygonFile, ResultFile, TwoBeadFile, TwoBeadRecord};
use serde::Serialize;
use std::fs;
use std::process::ExitCode;

fn load_necklace(path: &std::path::Path) -> CliResult<Necklace> {
    let spec: NecklaceSpec = record::read_json(path)?;
    let nk = Necklace::from_spec(&spec)?;
    if !necklace::is_realisable(&nk) {
        return Err(necklace::manifold_dimension(&nk).unwrap_err().into());
    }
    Ok(nk)
}

fn bound(max_winding: Option<u64>) -> WindingBound {
    max_winding.map_or(WindingBound::Auto, WindingBound::Max)
}

fn enumerate(args: &InstanceArgs, tols: &Tolerances) -> CliResult<(Necklace, critical::CriticalSet)> {
    let nk = load_necklace(&args.instance)?;
    let set = critical::enumerate_all(&nk, bound(args.max_winding), tols)?;
    if !set.families.is_empty() {
        let patterns: Vec<String> = set
            .families
            .iter()
            .map(|s| s.iter().map(|e| if e.as_i8() > 0 { '+' } else { '-' }).collect())
            .collect();
        eprintln!(
            "note: sign patterns [{}] with w = 0 carry continua of critical points; they are not listed",
            patterns.join(", ")
        );
    }
    Ok((nk, set))
}

fn morse_record(c: &critical::CriticalConfig, nk: &Necklace, tols: &Tolerances) -> CliResult<Option<MorseRecord>> {
    match morse::analyze(c, nk, tols) {
        Ok(r) => Ok(Some(MorseRecord::from(&r))),
        Err(NecklaceError::UndefinedIndex(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn run_critical(args: &InstanceArgs, tols: &Tolerances) -> CliResult<()> {
    let (nk, set) = enumerate(args, tols)?;
    let file = ResultFile {
        necklace: nk.to_spec(),
        dimension: necklace::manifold_dimension(&nk)?,
        critical_points: set.interior.iter().map(|c| CriticalRecord::new(c, None)).collect(),
    };
    eprintln!("critical: {} configurations", file.critical_points.len());
    record::emit(args.output.out.as_deref(), &record::result_bytes(&file, args.output.format)?)
}

fn run_morse(args: &InstanceArgs, tols: &Tolerances) -> CliResult<()> {
    let (nk, set) = enumerate(args, tols)?;
    let mut points = Vec::with_capacity(set.interior.len());
    for c in &set.interior {
        points.push(CriticalRecord::new(c, morse_record(c, &nk, tols)?));
    }
    let file = ResultFile { necklace: nk.to_spec(), dimension: necklace::manifold_dimension(&nk)?, critical_points: points };
    let checked: Vec<_> = file
        .critical_points
        .iter()
        .filter(|r| r.admissible && !r.bifurcating)
        .collect();
    let agreeing = checked.iter().filter(|r| r.morse.as_ref().is_some_and(|m| m.agree)).count();
    let bifurcating = file.critical_points.iter().filter(|r| r.bifurcating).count();
    eprintln!(
        "morse: {agreeing}/{} admissible non-bifurcating records agree ({bifurcating} bifurcating)",
        checked.len()
    );
    record::emit(args.output.out.as_deref(), &record::result_bytes(&file, args.output.format)?)?;
    if agreeing != checked.len() {
        return Err(CliError::Verification(format!(
            "{} records disagree",
            checked.len() - agreeing
        )));
    }
    Ok(())
}

fn run_two_bead(args: &TwoBeadArgs, tols: &Tolerances) -> CliResult<()> {
    let solutions = chebyshev::solve_two_bead(args.beads, args.length, args.closing, tols)?;
    let nk = chebyshev::two_bead_necklace(args.beads, args.length, args.closing)?;
    let xs: Vec<f64> = solutions.iter().map(|s| s.x).collect();
    let order = chebyshev::index_by_root_order(args.beads, &xs);
    let mut records = Vec::with_capacity(solutions.len());
    let mut mismatches = Vec::new();
    for (s, rule) in solutions.iter().zip(order) {
        let morse = morse_record(&s.config, &nk, tols)?;
        if s.config.admissible && !s.config.bifurcating {
            let ok = morse
                .as_ref()
                .is_some_and(|m| m.agree && m.formula_index.is_some() && m.formula_index == rule);
            if !ok {
                mismatches.push(format!("x = {}: root order {rule:?}, morse {morse:?}", s.x));
            }
        }
        records.push(TwoBeadRecord { x: s.x, root_order_index: rule, critical_point: CriticalRecord::new(&s.config, morse) });
    }
    let file = TwoBeadFile { necklace: nk.to_spec(), dimension: necklace::manifold_dimension(&nk)?, solutions: records };
    eprintln!("two-bead: {} roots, {} index mismatches", file.solutions.len(), mismatches.len());
    record::emit(args.output.out.as_deref(), &record::two_bead_bytes(&file, args.output.format)?)?;
    if !mismatches.is_empty() {
        return Err(CliError::Verification(mismatches.join("; ")));
    }
    Ok(())
}

#[derive(Serialize)]
struct SingularReport {
    configuration: bool,
    piece_lengths: Vec<f64>,
    singular: bool,
    reason: Option<necklace::SingularReason>,
    constraint_rank: Option<usize>,
}

fn run_singular(args: &SingularArgs, tols: &Tolerances) -> CliResult<()> {
    let spec: NecklaceSpec = record::read_json(&args.instance)?;
    let nk = Necklace::from_spec(&spec)?;
    let poly: PolygonFile = record::read_json(&args.polygon)?;
    let p = Polygon::from_points(&poly.vertices)?;
    if p.len() != nk.n() {
        return Err(CliError::Input(format!("polygon has {} vertices, necklace has {} beads", p.len(), nk.n())));
    }
    let reason = necklace::is_singular(&p, &nk, tols)?;
    let rank = match necklace::constraint_rank(&p, &nk, tols.rank) {
        Ok(r) => Some(r),
        Err(NecklaceError::NonDifferentiable { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let report = SingularReport {
        configuration: necklace::is_configuration(&p, &nk, tols.cyclic),
        piece_lengths: necklace::piece_lengths(&p, &nk)?,
        singular: reason.is_some(),
        reason,
        constraint_rank: rank,
    };
    record::emit(args.out.as_deref(), &record::json_bytes(&report)?)
}

fn run_verify(args: &VerifyArgs, tols: &Tolerances) -> CliResult<()> {
    let report = verify::run(args.seed, args.count, args.max_beads, tols)?;
    eprintln!(
        "verify: {} necklaces, {} critical points, {} Morse checks, {} two-bead roots, {} failures",
        report.necklaces,
        report.critical_points,
        report.morse_checked,
        report.two_bead_roots,
        report.failures.len()
    );
    record::emit(args.out.as_deref(), &record::json_bytes(&report)?)?;
    if !report.failures.is_empty() {
        return Err(CliError::Verification(report.failures.join("; ")));
    }
    Ok(())
}

fn run_render(args: &RenderArgs) -> CliResult<()> {
    let file: ResultFile = record::read_json(&args.input)?;
    fs::create_dir_all(&args.render_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", args.render_dir.display())))?;
    let opts = render::RenderOptions { size: args.size, circle: !args.no_circle };
    for (i, r) in file.critical_points.iter().enumerate() {
        let path = args.render_dir.join(render::file_name(i, r));
        fs::write(&path, render::render_record(&file, r, &opts))
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    eprintln!("render: {} figures in {}", file.critical_points.len(), args.render_dir.display());
    Ok(())
}

fn run() -> CliResult<()> {
    let (argv, tols) = args::split_tolerances(std::env::args_os().collect())?;
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        match e.exit_code() {
            0 => std::process::exit(0),
            _ => CliError::Input("invalid arguments".into()),
        }
    })?;
    match &cli.command {
        Command::Critical(a) => run_critical(a, &tols),
        Command::Morse(a) => run_morse(a, &tols),
        Command::TwoBead(a) => run_two_bead(a, &tols),
        Command::SingularCheck(a) => run_singular(a, &tols),
        Command::Verify(a) => run_verify(a, &tols),
        Command::Render(a) => run_render(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("necklace: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
