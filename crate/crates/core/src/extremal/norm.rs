use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{Budget, MatrixSet, WordTree};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, normalize, spectral_norm, svd, vector_norm, ComplexMatrix};

/// Seed for the fixed probe vectors used by the operator-norm search.
const SEARCH_SEED: u64 = 0x6a73_726b;

/// `|||v|||_N = max_{0<=k<=N} max_{|w|=k} ρ̂^{-k} ‖A_w v‖`.
#[derive(Debug, Clone)]
pub struct AdaptedNorm {
    dim: usize,
    rho_hat: f64,
    depth: usize,
    generators: Vec<ComplexMatrix>,
}

impl AdaptedNorm {
    pub fn new(set: &MatrixSet, rho_hat: f64, depth: usize, budget: Budget) -> Result<Self> {
        if !(rho_hat > 0.0 && rho_hat.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {rho_hat}")));
        }
        let mut tree = WordTree::new(set, budget);
        let mut seen = HashSet::new();
        let mut generators = vec![ComplexMatrix::identity(set.dim())];
        seen.insert(generators[0].bit_key());
        for k in 1..=depth {
            tree.advance()?;
            let s = rho_hat.powi(-(k as i32));
            for p in tree.products() {
                let g = p.scale_real(s);
                if seen.insert(g.bit_key()) {
                    generators.push(g);
                }
            }
        }
        Ok(Self {
            dim: set.dim(),
            rho_hat,
            depth,
            generators,
        })
    }

    pub fn rho_hat(&self) -> f64 {
        self.rho_hat
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The scaled products the maximum runs over, identity first.
    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn eval(&self, v: &[Complex64]) -> f64 {
        self.generators
            .iter()
            .map(|g| vector_norm(&g.apply(v)))
            .fold(0.0, f64::max)
    }
}

/// A vector norm on C^d.
#[derive(Debug, Clone)]
pub enum NormSpec {
    Euclidean,
    Adapted(Arc<AdaptedNorm>),
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Euclidean => write!(f, "euclidean"),
            Self::Adapted(a) => write!(f, "adapted(depth={}, rho_hat={:e})", a.depth, a.rho_hat),
        }
    }
}

impl NormSpec {
    pub fn adapted(set: &MatrixSet, rho_hat: f64, depth: usize, budget: Budget) -> Result<Self> {
        Ok(Self::Adapted(Arc::new(AdaptedNorm::new(set, rho_hat, depth, budget)?)))
    }

    pub fn eval(&self, v: &[Complex64]) -> f64 {
        match self {
            Self::Euclidean => vector_norm(v),
            Self::Adapted(a) => a.eval(v),
        }
    }

    /// Errors unless the norm lives on C^d.
    pub fn check_dim(&self, d: usize) -> Result<()> {
        match self {
            Self::Adapted(a) if a.dim != d => Err(Error::Dimension(format!(
                "norm is defined on C^{} but the matrix acts on C^{d}",
                a.dim
            ))),
            _ => Ok(()),
        }
    }
}

/// Operator norm induced by `norm`.
///
/// Euclidean: the top singular value. Adapted: the best ratio found by a
/// deterministic search seeded with basis vectors, fixed pseudo-random
/// probes, singular vectors of `M` and of each generator times `M`, and
/// eigenvectors of `M`, followed by local pattern refinement. Eigenvectors
/// make the result at least the spectral radius.
pub fn operator_norm(m: &ComplexMatrix, norm: &NormSpec) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("operator norm of a {}x{} matrix", m.rows(), m.cols())));
    }
    norm.check_dim(m.rows())?;
    match norm {
        NormSpec::Euclidean => Ok(spectral_norm(m)),
        NormSpec::Adapted(a) => {
            let mut seeds = svd(m).v.columns();
            for g in a.generators.iter().skip(1) {
                seeds.push(svd(&(g * m)).v.column(0));
            }
            seeds.extend(eigenvectors(m)?);
            Ok(maximize_ratio(m.rows(), &seeds, |v| {
                let den = a.eval(v);
                if den > 0.0 {
                    a.eval(&m.apply(v)) / den
                } else {
                    0.0
                }
            }))
        }
    }
}

/// One unit eigenvector per eigenvalue, from the null direction of `M - λI`.
pub fn eigenvectors(m: &ComplexMatrix) -> Result<Vec<Vec<Complex64>>> {
    let n = m.rows();
    Ok(eigenvalues(m)?
        .into_iter()
        .map(|lambda| {
            let shifted = m.sub(&ComplexMatrix::identity(n).scale(lambda));
            svd(&shifted).v.column(n - 1)
        })
        .collect())
}

/// Fixed pseudo-random unit vectors in C^d.
pub fn probe_vectors(dim: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        if let Some(u) = normalize(&v) {
            out.push(u);
        }
    }
    out
}

/// Maximizes a scale-invariant function on C^d \ {0}.
///
/// Starts from `seeds`, the standard basis and fixed probes, then polishes
/// the best few starts by a compass search over real and imaginary
/// coordinate moves.
pub fn maximize_ratio(dim: usize, seeds: &[Vec<Complex64>], f: impl Fn(&[Complex64]) -> f64) -> f64 {
    let mut starts: Vec<(f64, Vec<Complex64>)> = Vec::new();
    let mut consider = |v: Vec<Complex64>| {
        if let Some(u) = normalize(&v) {
            let val = f(&u);
            if val.is_finite() {
                starts.push((val, u));
            }
        }
    };
    for s in seeds {
        consider(s.clone());
    }
    for i in 0..dim {
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[i] = Complex64::new(1.0, 0.0);
        consider(e);
    }
    for p in probe_vectors(dim, 24 * dim, SEARCH_SEED) {
        consider(p);
    }
    starts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = starts.first().map_or(0.0, |s| s.0);
    for (val, v) in starts.into_iter().take(4) {
        best = best.max(compass_search(v, val, &f));
    }
    best
}

fn compass_search(mut v: Vec<Complex64>, mut val: f64, f: &impl Fn(&[Complex64]) -> f64) -> f64 {
    let dim = v.len();
    let mut step = 0.25;
    let units = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
    ];
    let mut evals = 0usize;
    while step > 1e-11 && evals < 20_000 {
        let mut improved = false;
        for k in 0..dim {
            for u in units {
                let mut trial = v.clone();
                trial[k] += u * step;
                let Some(trial) = normalize(&trial) else { continue };
                let tv = f(&trial);
                evals += 1;
                if tv > val {
                    val = tv;
                    v = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    val
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e2_half() -> MatrixSet {
        MatrixSet::new(vec![
            ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 0.0]]).unwrap(),
            ComplexMatrix::from_real(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap(),
        ])
        .unwrap()
    }

    fn cv(xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn depth_zero_is_euclidean() {
        let n = AdaptedNorm::new(&e2_half(), 1.0, 0, Budget::default()).unwrap();
        assert_eq!(n.eval(&cv(&[1.0, 0.0])), 1.0);
        assert_eq!(n.eval(&cv(&[3.0, 4.0])), 5.0);
    }

    #[test]
    fn worked_values_depth_one() {
        let n = AdaptedNorm::new(&e2_half(), 1.0, 1, Budget::default()).unwrap();
        assert!((n.eval(&cv(&[1.0, 0.0])) - 1.0).abs() < 1e-15);
        let s = 0.5f64.sqrt();
        assert!((n.eval(&cv(&[s, s])) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn budget_error_names_feasible_depth() {
        let err = AdaptedNorm::new(&e2_half(), 1.0, 10, Budget::new(7)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { feasible: 2, .. }), "{err:?}");
    }

    #[test]
    fn operator_norm_examples() {
        let b1 = ComplexMatrix::from_real(&[&[2.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((operator_norm(&b1, &NormSpec::Euclidean).unwrap() - 8f64.sqrt()).abs() < 1e-14);
        let a1 = ComplexMatrix::from_real(&[&[0.0, 2.0], &[0.5, 0.0]]).unwrap();
        assert!((operator_norm(&a1, &NormSpec::Euclidean).unwrap() - 2.0).abs() < 1e-14);
        let adapted = NormSpec::adapted(&e2_half(), 1.0, 3, Budget::default()).unwrap();
        let id = ComplexMatrix::identity(2);
        assert!((operator_norm(&id, &adapted).unwrap() - 1.0).abs() < 1e-14);
        assert!(operator_norm(&ComplexMatrix::identity(3), &adapted).is_err());
    }

    #[test]
    fn adapted_operator_norm_matches_closed_form() {
        // For E2/2 at depth >= 1 the norm is max(‖v‖, |v1 + v2|), under which
        // both matrices have operator norm exactly 1.
        let set = e2_half();
        let n = NormSpec::adapted(&set, 1.0, 2, Budget::default()).unwrap();
        for m in set.matrices() {
            let v = operator_norm(m, &n).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "{v}");
        }
        let v = cv(&[0.3, -1.2]);
        assert!((n.eval(&v) - vector_norm(&v).max((v[0] + v[1]).norm())).abs() < 1e-15);
    }

    #[test]
    fn search_reaches_spectral_radius() {
        let m = ComplexMatrix::from_real(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let n = NormSpec::adapted(&e2_half(), 1.0, 1, Budget::default()).unwrap();
        assert!(operator_norm(&m, &n).unwrap() >= 1.0 - 1e-12);
    }
}
