//! One-dimensional smoothed Wigner toolkit: transforms, the smoothed
//! pseudodifferential calculus, phase-space dynamics and semiclassical checks.

pub mod error;
pub mod field;
pub mod grid;
pub mod signals;
pub mod wigner;
pub mod calculus;
pub mod swcalc;
pub mod dynamics;
pub mod semiclassical;
pub mod io;

pub use error::{Error, Result};
pub use field::{ComplexField1D, PhaseField};
pub use grid::{Grid1D, PhaseGrid};
pub use num_complex::Complex64 as C64;
