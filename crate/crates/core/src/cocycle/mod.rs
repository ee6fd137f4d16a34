//! Matrix cocycles over periodic points of the shift.
//!
//! A [`PeriodicWord`] with cycle `c` stands for the point `x` with
//! `x_i = c[i mod r]`, and `A(x, n) = A_{x_{n-1}} ... A_{x_0}`. On such points
//! the fast/slow splitting is built from singular subspaces at finite
//! horizons, cones around it are propagated, and periodic products certify
//! lower bounds.

mod certificate;
mod cone;
mod splitting;

use std::fmt;

use crate::bounds::{MatrixSet, Word};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub use certificate::{certify_lower, LowerBoundCertificate};
pub use cone::{
    cone_contains, cone_containment_check, cone_propagation_check, fit_cone_constants, ConeConstants,
    ConeCounterexample, ConeMembership, ConeParams, ConePropagationReport, ContainmentReport,
};
pub use splitting::{
    detect_p, fast_subspace, finite_splitting, splitting_along_orbit, splitting_residuals, CauchyFit,
    DetectedDimension, SplittingDiagnostics, SplittingResult, THETA_THRESHOLD,
};

/// A bi-infinite periodic symbol sequence given by its repeating block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicWord {
    cycle: Vec<usize>,
}

impl PeriodicWord {
    pub fn new(cycle: Vec<usize>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidArgument("periodic word needs a nonempty cycle".into()));
        }
        Ok(Self { cycle })
    }

    pub fn from_word(w: &Word) -> Result<Self> {
        Self::new(w.indices().to_vec())
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    /// `x_i` for any integer `i`.
    pub fn symbol(&self, i: i64) -> usize {
        self.cycle[i.rem_euclid(self.cycle.len() as i64) as usize]
    }

    /// `T^k x`, where `(T^k x)_i = x_{i+k}`; negative `k` is the inverse shift.
    pub fn shift(&self, k: i64) -> Self {
        let mut c = self.cycle.clone();
        let r = c.len() as i64;
        c.rotate_left(k.rem_euclid(r) as usize);
        Self { cycle: c }
    }

    /// `x_0 ... x_{n-1}`.
    pub fn prefix(&self, n: usize) -> Word {
        Word::new((0..n as i64).map(|i| self.symbol(i)).collect())
    }

    /// `A(x, n)`.
    pub fn cocycle(&self, set: &MatrixSet, n: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::identity(set.dim());
        for i in 0..n {
            out = set.matrix(self.symbol(i as i64)) * &out;
        }
        out
    }

    pub fn check(&self, set: &MatrixSet) -> Result<()> {
        set.check_word(&Word::new(self.cycle.clone()))
    }
}

impl fmt::Display for PeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})^inf", Word::new(self.cycle.clone()))
    }
}
