//! Dense complex linear algebra: products, eigenvalues, singular values,
//! subspaces and oblique projections.

mod eigen;
mod matrix;
mod subspace;
mod svd;

pub use eigen::{eigenvalues, spectral_radius};
pub use matrix::{inner, normalize, vector_norm, ComplexMatrix};
pub use subspace::{
    grassmann_distance, max_distance_from, min_angle_sine, projection_from_pair, ProjectionPair,
    Subspace, SUBSPACE_TOL,
};
pub use svd::{singular_values, spectral_norm, svd, Svd};
