//! Singular dipole deformation of a ball, its regularisations, patched
//! bi-Lipschitz boundary data, neo-Hookean energy quadrature and the
//! verification suites built on top of them.

pub mod approx;
pub mod dipole;
pub mod energy;
pub mod error;
pub mod geom;
pub mod numerics;
pub mod patch;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
