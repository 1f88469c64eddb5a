//! Entanglement witnesses for two-particle spin-momentum states.
//!
//! Each particle carries two momentum labels and a spin-½, giving a 4 ⊗ 4
//! space. The crate builds the sixteen entangled basis states and their
//! mixtures, constructs decomposable optimal witnesses through the
//! correlation-matrix (KKT) route, and tracks how detection changes when the
//! particles are seen from a boosted frame.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod ppt;
pub mod relativity;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{BipartiteShape, ComplexMatrix, HermitianOperator, Party, RealMatrix};
pub use states::{MixtureWeights, Parity, PureState16};
