//! Planar necklaces, the oriented-area function on their configuration
//! spaces, its critical points and their Morse indices.

pub mod chebyshev;
pub mod critical;
pub mod error;
pub mod linalg;
pub mod morse;
pub mod necklace;
pub mod polygon;
pub mod roots;
pub mod splitting;
pub mod tol;

pub use critical::{enumerate_all, enumerate_critical, CriticalConfig, CriticalSet, Sign, WindingBound};
pub use error::{NecklaceError, Result};
pub use morse::{MorseReport, Signature, TangentFrame};
pub use necklace::{Necklace, NecklaceSpec, Piece};
pub use polygon::{Polygon, Vec2};
pub use tol::Tolerances;
