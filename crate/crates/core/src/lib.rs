//! Wigner–Moyal calculus on the cylinder `S¹ × ℝ` (angle × angular momentum).

pub mod basis;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod grid;
pub mod kernel;
pub mod model;
pub mod quadrature;
pub mod sinc;
pub mod star;
pub mod symbol;
pub mod weyl;

pub use basis::{BandedOperator, StandardOperator, WaveFunction};
pub use error::{Error, Result};
pub use model::{PendulumModel, PhysicalConstants, Potential, PotentialMode};
