//! Joint spectral radius toolkit.
//!
//! Dense complex linear algebra, bounds on the joint spectral radius of a
//! finite matrix set, finite-depth extremal norms, invariant splittings of
//! matrix cocycles over periodic symbol sequences, and the symbolic dynamics
//! (shift metric, Sturmian words, periodic approximation, max-cycle-mean)
//! that goes with them.

pub mod bounds;
pub mod cocycle;
pub mod error;
pub mod extremal;
pub mod linalg;
pub mod symbolic;

pub use bounds::{Budget, MatrixSet, Word};
pub use error::{Error, Result};
pub use extremal::{operator_norm, AdaptedNorm, NormSpec};
pub use linalg::{ComplexMatrix, ProjectionPair, Subspace};
pub use num_complex::Complex64;
