//! On-disk schemas: instance files, result files and their CSV flattening.

use crate::args::Format;
use crate::error::{CliError, CliResult};
use necklace_core::{CriticalConfig, MorseReport, NecklaceSpec};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorseRecord {
    pub formula_index: Option<i64>,
    /// `[negative, zero, positive]` eigenvalue counts of the reduced Hessian.
    pub signature: [usize; 3],
    pub agree: bool,
}

impl From<&MorseReport> for MorseRecord {
    fn from(r: &MorseReport) -> Self {
        Self {
            formula_index: r.formula_index,
            signature: [r.signature.negative, r.signature.zero, r.signature.positive],
            agree: r.agree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalRecord {
    pub signs: Vec<i8>,
    pub winding: i64,
    pub radius: f64,
    pub half_angles: Vec<f64>,
    pub multipliers: Vec<f64>,
    pub vertices: Vec<[f64; 2]>,
    pub area: f64,
    pub admissible: bool,
    pub bifurcating: bool,
    pub morse: Option<MorseRecord>,
}

impl CriticalRecord {
    pub fn new(c: &CriticalConfig, morse: Option<MorseRecord>) -> Self {
        Self {
            signs: c.sign_values(),
            winding: c.winding,
            radius: c.radius,
            half_angles: c.half_angles.clone(),
            multipliers: c.multipliers.clone(),
            vertices: c.polygon.vertices().iter().map(|v| [v.x, v.y]).collect(),
            area: c.area,
            admissible: c.admissible,
            bifurcating: c.bifurcating,
            morse,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub necklace: NecklaceSpec,
    pub dimension: usize,
    pub critical_points: Vec<CriticalRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBeadRecord {
    pub x: f64,
    pub root_order_index: Option<i64>,
    pub critical_point: CriticalRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBeadFile {
    pub necklace: NecklaceSpec,
    pub dimension: usize,
    pub solutions: Vec<TwoBeadRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonFile {
    pub vertices: Vec<[f64; 2]>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// Shortest representation that parses back to the same bits.
fn float(x: f64) -> String {
    format!("{x:?}")
}

fn floats(xs: &[f64]) -> String {
    join(xs.iter().map(|&x| float(x)))
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

const CSV_HEADER: [&str; 15] = [
    "index",
    "signs",
    "winding",
    "radius",
    "half_angles",
    "multipliers",
    "vertices",
    "area",
    "admissible",
    "bifurcating",
    "formula_index",
    "negative",
    "zero",
    "positive",
    "agree",
];

/// One CSV row; list-valued leaves are `;`-separated, vertices as `x y`.
fn csv_row(index: usize, r: &CriticalRecord) -> Vec<String> {
    let m = r.morse.as_ref();
    vec![
        index.to_string(),
        join(&r.signs),
        r.winding.to_string(),
        float(r.radius),
        floats(&r.half_angles),
        floats(&r.multipliers),
        join(r.vertices.iter().map(|v| format!("{} {}", float(v[0]), float(v[1])))),
        float(r.area),
        r.admissible.to_string(),
        r.bifurcating.to_string(),
        opt(m.and_then(|m| m.formula_index)),
        opt(m.map(|m| m.signature[0])),
        opt(m.map(|m| m.signature[1])),
        opt(m.map(|m| m.signature[2])),
        opt(m.map(|m| m.agree)),
    ]
}

fn to_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| CliError::Other(e.to_string()))
}

pub fn result_bytes(file: &ResultFile, format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Json => json_bytes(file),
        Format::Csv => to_csv(
            &CSV_HEADER,
            file.critical_points.iter().enumerate().map(|(i, r)| csv_row(i, r)),
        ),
    }
}

pub fn two_bead_bytes(file: &TwoBeadFile, format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Json => json_bytes(file),
        Format::Csv => {
            let mut header = vec!["x", "root_order_index"];
            header.extend(CSV_HEADER);
            to_csv(
                &header,
                file.solutions.iter().enumerate().map(|(i, s)| {
                    let mut row = vec![float(s.x), opt(s.root_order_index)];
                    row.extend(csv_row(i, &s.critical_point));
                    row
                }),
            )
        }
    }
}

pub fn json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes to `out`, or to standard output when absent.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            Ok(stdout.flush()?)
        }
    }
}
