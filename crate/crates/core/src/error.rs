use thiserror::Error;

/// Errors raised by the geometry, solver and Morse routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NecklaceError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("necklace is not realisable: piece {piece} violates 2 L_j < L")]
    NotRealisable { piece: usize },
    #[error("polygon is not admissible: side {side} passes through the centre")]
    NotAdmissible { side: usize },
    #[error("inconsistent data: {what} (residual {residual:e})")]
    Inconsistent { what: &'static str, residual: f64 },
    #[error("side {side} has zero length; lengths are not differentiable there")]
    NonDifferentiable { side: usize },
    #[error("radius {radius} below the admissible minimum {min_radius}")]
    Domain { radius: f64, min_radius: f64 },
    #[error("configuration is singular: {0}")]
    Singular(String),
    #[error("configuration is not critical (projected gradient {residual:e})")]
    NotCritical { residual: f64 },
    #[error("Morse index undefined: {0}")]
    UndefinedIndex(&'static str),
    #[error("side-length chart degenerates (bifurcating configuration)")]
    ChartDegenerate,
    #[error("cyclic slice is not a non-degenerate extremum: {0}")]
    SliceNotExtremal(String),
}

pub type Result<T, E = NecklaceError> = std::result::Result<T, E>;
