//! Gromov–Hausdorff and hybrid limits of degenerating abelian varieties and
//! curves, computed from their combinatorial and lattice-theoretic shadows.

pub mod degen;
pub mod error;
pub mod forms;
pub mod hybrid;
pub mod limits;
pub mod linalg;
pub mod scalar;
pub mod siegel;
pub mod tropical;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use scalar::{Rational, Scalar};
