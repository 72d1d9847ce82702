//! Named numerical tolerances shared by the solver and the Morse checks.

use crate::error::{NecklaceError, Result};

/// All thresholds are relative: lengths scale with the total string length
/// `L` or the circumradius, eigenvalues with the spectral norm of the
/// reduced Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Maximum circle-fit residual, relative to the radius.
    pub cyclic: f64,
    /// `|cross| <= orientation * R * l_i` sets the side orientation to zero.
    pub orientation: f64,
    /// Side lengths below `zero_side * L` count as vanished.
    pub zero_side: f64,
    /// Collinearity threshold on the smallest singular value of the centred
    /// vertex matrix, relative to `L`.
    pub collinear: f64,
    /// Numerical rank cut-off for constraint Jacobians (relative singular value).
    pub rank: f64,
    /// Half-angles within this distance of `pi/2` are diameter edges.
    pub admissible: f64,
    /// `|sum n_j E_j tan A_j| <= bifurcation * sum n_j tan A_j` is bifurcating.
    pub bifurcation: f64,
    /// Projected-gradient guard for Hessian routines, relative to `L`.
    pub stationarity: f64,
    /// Eigenvalues with `|mu| <= zero_eigen * ||B||` count as zero.
    pub zero_eigen: f64,
    /// Vertex-list distance (relative to `L`) under which two configurations coincide.
    pub dedup: f64,
    /// Scan samples per bead when bracketing closure roots.
    pub scan_per_bead: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cyclic: 1e-8,
            orientation: 1e-9,
            zero_side: 1e-10,
            collinear: 1e-9,
            rank: 1e-8,
            admissible: 1e-9,
            bifurcation: 1e-9,
            stationarity: 1e-7,
            zero_eigen: 1e-7,
            dedup: 1e-9,
            scan_per_bead: 200.0,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 11] = [
        "cyclic",
        "orientation",
        "zero_side",
        "collinear",
        "rank",
        "admissible",
        "bifurcation",
        "stationarity",
        "zero_eigen",
        "dedup",
        "scan_per_bead",
    ];

    /// Overrides a tolerance by name. Unknown names and non-positive values
    /// are rejected.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(NecklaceError::Instance(format!(
                "tolerance {name} must be positive, got {value}"
            )));
        }
        let slot = match name.replace('-', "_").as_str() {
            "cyclic" => &mut self.cyclic,
            "orientation" => &mut self.orientation,
            "zero_side" => &mut self.zero_side,
            "collinear" => &mut self.collinear,
            "rank" => &mut self.rank,
            "admissible" => &mut self.admissible,
            "bifurcation" => &mut self.bifurcation,
            "stationarity" => &mut self.stationarity,
            "zero_eigen" => &mut self.zero_eigen,
            "dedup" => &mut self.dedup,
            "scan_per_bead" => &mut self.scan_per_bead,
            _ => {
                return Err(NecklaceError::Instance(format!(
                    "unknown tolerance `{name}` (known: {})",
                    Self::NAMES.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}
