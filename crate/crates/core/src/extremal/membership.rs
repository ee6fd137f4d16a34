use num_complex::Complex64;
use rayon::prelude::*;

use super::norm::{probe_vectors, NormSpec};
use crate::bounds::{sandwich, Budget, MatrixSet, WordTree};
use crate::cocycle::PeriodicWord;
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, svd};

/// Default sample count for [`extremality_residual`].
pub const DEFAULT_SAMPLES: usize = 4096;

/// Tolerance on `|||A(x,n)||| - 1` for Y-membership.
pub const Y_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// `max (|||Av|||/|||v||| - ρ̂)/ρ̂`, clipped below at zero.
    pub residual: f64,
    pub vectors_checked: usize,
}

/// Measures how far `spec` is from satisfying `|||A||| <= ρ̂` on the set.
///
/// Probes `samples` seeded unit vectors plus every left and right singular
/// vector of every matrix in the set.
pub fn extremality_residual(
    set: &MatrixSet,
    spec: &NormSpec,
    rho_hat: f64,
    samples: usize,
    seed: u64,
) -> Result<ResidualReport> {
    spec.check_dim(set.dim())?;
    if !(rho_hat > 0.0) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {rho_hat}")));
    }
    let mut vectors: Vec<Vec<Complex64>> = probe_vectors(set.dim(), samples, seed);
    for m in set.matrices() {
        let d = svd(m);
        vectors.extend(d.u.columns());
        vectors.extend(d.v.columns());
    }
    let worst = vectors
        .par_iter()
        .map(|v| {
            let den = spec.eval(v);
            set.matrices()
                .iter()
                .map(|m| spec.eval(&m.apply(v)) / den)
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(ResidualReport {
        residual: ((worst - rho_hat) / rho_hat).max(0.0),
        vectors_checked: vectors.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductBoundedness {
    BoundedUpToDepth,
    GrowthDetected,
    Inconclusive,
}

/// Classifies the per-level maxima of Euclidean product norms up to `depth`.
pub fn is_product_bounded(set: &MatrixSet, depth: usize, bound_guess: f64, budget: Budget) -> Result<ProductBoundedness> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let mut tree = WordTree::new(set, budget);
    let mut maxima = Vec::with_capacity(depth);
    for _ in 0..depth {
        match tree.advance() {
            Ok(()) => {}
            Err(Error::BudgetExceeded { .. }) => return Ok(ProductBoundedness::Inconclusive),
            Err(e) => return Err(e),
        }
        let m = tree
            .products()
            .par_iter()
            .map(spectral_norm)
            .reduce(|| 0.0, f64::max);
        maxima.push(m);
    }
    if maxima.iter().all(|&m| m <= bound_guess) {
        return Ok(ProductBoundedness::BoundedUpToDepth);
    }
    let tail = &maxima[maxima.len() - (maxima.len() / 3).max(2).min(maxima.len())..];
    if tail.windows(2).all(|w| w[1] > w[0]) {
        Ok(ProductBoundedness::GrowthDetected)
    } else {
        Ok(ProductBoundedness::Inconclusive)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum YVerdict {
    Consistent,
    RejectedAt(usize),
    /// No value fell below `1 - tol` but some exceeded `1 + tol`, so the norm is not extremal.
    NormNotExtremal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct YMembershipReport {
    pub word: PeriodicWord,
    pub depth: usize,
    /// `1 - |||A(x,n)|||` for n = 1..=depth.
    pub margins: Vec<f64>,
    pub verdict: YVerdict,
    /// Horizons where the value exceeded `1 + tol`.
    pub above_one: Vec<usize>,
    pub normalization_estimate: f64,
}

/// Evaluates `|||A(x,n)|||` along the periodic point for n = 1..=depth.
pub fn y_membership(set: &MatrixSet, spec: &NormSpec, x: &PeriodicWord, depth: usize) -> Result<YMembershipReport> {
    x.check(set)?;
    spec.check_dim(set.dim())?;
    let coarse = sandwich(set, 8, &NormSpec::Euclidean, Budget::default())?;
    let last = coarse.rows.last().ok_or_else(|| Error::InvalidArgument("empty set".into()))?;
    let estimate = 0.5 * (last.best_lower + last.best_upper);
    if (estimate - 1.0).abs() > 0.2 {
        return Err(Error::NotNormalized { estimate });
    }
    let mut margins = Vec::with_capacity(depth);
    let mut above_one = Vec::new();
    let mut verdict = YVerdict::Consistent;
    let mut prod = crate::linalg::ComplexMatrix::identity(set.dim());
    for n in 1..=depth {
        prod = set.matrix(x.symbol(n as i64 - 1)) * &prod;
        let value = super::operator_norm(&prod, spec)?;
        margins.push(1.0 - value);
        if value > 1.0 + Y_TOL {
            above_one.push(n);
        }
        if value < 1.0 - Y_TOL && verdict == YVerdict::Consistent {
            verdict = YVerdict::RejectedAt(n);
        }
    }
    if verdict == YVerdict::Consistent && !above_one.is_empty() {
        verdict = YVerdict::NormNotExtremal;
    }
    Ok(YMembershipReport {
        word: x.clone(),
        depth,
        margins,
        verdict,
        above_one,
        normalization_estimate: estimate,
    })
}
