//! Finite-depth extremal norms and tests against them.
//!
//! The adapted norm `|||v|||_N = max_{k<=N} max_{|w|=k} ρ̂^{-k}‖A_w v‖`
//! satisfies `|||A v|||_{N-1} <= ρ̂ |||v|||_N` for every matrix in the set,
//! so it approaches an extremal norm as N grows when the scaled set is
//! product bounded.

mod membership;
mod norm;

pub use membership::{
    extremality_residual, is_product_bounded, y_membership, ProductBoundedness, ResidualReport, YMembershipReport,
    YVerdict, DEFAULT_SAMPLES, Y_TOL,
};
pub use norm::{eigenvectors, maximize_ratio, operator_norm, probe_vectors, AdaptedNorm, NormSpec};
