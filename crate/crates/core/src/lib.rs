//! Distance measures between finite-dimensional quantum states built on
//! super-fidelity, together with the machinery to check their properties
//! numerically.

pub mod channels;
pub mod error;
pub mod fidelity;
pub mod fixtures;
pub mod harness;
pub mod io;
pub mod matops;
pub mod metrics;
pub mod random;
pub mod states;

pub use error::{Error, InvalidReason, Result};
pub use matops::ComplexMatrix;
pub use states::DensityMatrix;
