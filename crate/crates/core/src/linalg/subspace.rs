use num_complex::Complex64;

use super::matrix::{inner, vector_norm, ComplexMatrix};
use super::svd::{complete, svd};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Tolerance below which two subspaces are treated as equal.
pub const SUBSPACE_TOL: f64 = 1e-8;

/// A p-dimensional subspace of C^d held through an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Complex64>>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut e = vec![ZERO; ambient];
                e[i] = Complex64::new(1.0, 0.0);
                e
            })
            .collect();
        Self { ambient, basis }
    }

    /// Accepts columns that are already orthonormal to within 1e-10.
    pub fn from_orthonormal(ambient: usize, basis: Vec<Vec<Complex64>>) -> Result<Self> {
        if basis.len() > ambient || basis.iter().any(|b| b.len() != ambient) {
            return Err(Error::Dimension("basis shape does not fit ambient space".into()));
        }
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate().skip(i) {
                let want = if i == j { 1.0 } else { 0.0 };
                if (inner(a, b) - want).norm() > 1e-10 {
                    return Err(Error::InvalidArgument("basis is not orthonormal".into()));
                }
            }
        }
        Ok(Self { ambient, basis })
    }

    /// Span of the given vectors, which must be linearly independent
    /// (relative tolerance 1e-12 on the singular values).
    pub fn span(ambient: usize, vectors: &[Vec<Complex64>]) -> Result<Self> {
        if vectors.is_empty() {
            return Ok(Self::zero(ambient));
        }
        if vectors.iter().any(|v| v.len() != ambient) || vectors.len() > ambient {
            return Err(Error::Dimension("spanning set does not fit ambient space".into()));
        }
        let m = ComplexMatrix::from_columns(ambient, vectors)?;
        let d = svd(&m);
        let p = vectors.len();
        if d.s[0] == 0.0 || d.s[p - 1] <= 1e-12 * d.s[0] {
            return Err(Error::DegenerateSplitting(format!(
                "spanning set is rank deficient (singular values {:?})",
                d.s
            )));
        }
        Ok(Self {
            ambient,
            basis: d.top_left(p),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    /// Basis as a d x p matrix; `None` for the zero subspace.
    pub fn basis_matrix(&self) -> Option<ComplexMatrix> {
        (!self.basis.is_empty()).then(|| {
            ComplexMatrix::from_columns(self.ambient, &self.basis).expect("finite basis")
        })
    }

    pub fn orthogonal_projector(&self) -> ComplexMatrix {
        let d = self.ambient;
        let mut p = ComplexMatrix::zeros(d, d);
        for b in &self.basis {
            for i in 0..d {
                for j in 0..d {
                    p[(i, j)] += b[i] * b[j].conj();
                }
            }
        }
        p
    }

    pub fn orthogonal_complement(&self) -> Self {
        let mut basis = self.basis.clone();
        for _ in self.dim()..self.ambient {
            let next = complete(&basis, self.ambient);
            basis.push(next);
        }
        Self {
            ambient: self.ambient,
            basis: basis.split_off(self.dim()),
        }
    }

    /// Image of the subspace under `m`; fails when `m` collapses it.
    pub fn image(&self, m: &ComplexMatrix) -> Result<Self> {
        let vecs: Vec<Vec<Complex64>> = self.basis.iter().map(|b| m.apply(b)).collect();
        Self::span(m.rows(), &vecs)
    }

    /// Euclidean distance from `v` to the subspace.
    pub fn distance_to(&self, v: &[Complex64]) -> f64 {
        let mut r = v.to_vec();
        for b in &self.basis {
            let p = inner(b, &r);
            for (x, y) in r.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
        vector_norm(&r)
    }
}

fn check_ambient(u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient != v.ambient {
        return Err(Error::Dimension(format!(
            "subspaces live in C^{} and C^{}",
            u.ambient, v.ambient
        )));
    }
    Ok(())
}

/// `‖P_U - P_V‖` in the Euclidean operator norm. Subspaces of different
/// dimension are at distance 1.
pub fn grassmann_distance(u: &Subspace, v: &Subspace) -> Result<f64> {
    check_ambient(u, v)?;
    if u.dim() != v.dim() {
        return Ok(1.0);
    }
    if u.dim() == 0 {
        return Ok(0.0);
    }
    let diff = u.orthogonal_projector().sub(&v.orthogonal_projector());
    Ok(svd(&diff).s[0].min(1.0))
}

/// `max` over unit `u` in `U` of `dist(u, V)`, computed as the top singular
/// value of `(I - P_V) B_U`.
pub fn max_distance_from(u: &Subspace, v: &Subspace) -> Result<f64> {
    check_ambient(u, v)?;
    let Some(bu) = u.basis_matrix() else {
        return Ok(0.0);
    };
    let resid = ComplexMatrix::identity(u.ambient).sub(&v.orthogonal_projector());
    Ok(svd(&(&resid * &bu)).s[0].min(1.0))
}

/// Sine of the smallest principal angle between `v` and `w`, for subspaces
/// whose dimensions add up to at most the ambient dimension.
pub fn min_angle_sine(v: &Subspace, w: &Subspace) -> Result<f64> {
    check_ambient(v, w)?;
    let (Some(bv), false) = (v.basis_matrix(), w.dim() == 0) else {
        return Ok(1.0);
    };
    let resid = ComplexMatrix::identity(v.ambient).sub(&w.orthogonal_projector());
    let s = svd(&(&resid * &bv)).s;
    Ok(*s.last().expect("nonempty"))
}

/// Oblique projection with image `v` and kernel `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPair {
    pub v: Subspace,
    pub w: Subspace,
    pub p: ComplexMatrix,
}

impl ProjectionPair {
    /// `Q = I - P`.
    pub fn complement(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.p.rows()).sub(&self.p)
    }

    /// Range of `P` recovered numerically from the matrix alone.
    pub fn extract_image(&self) -> Result<Subspace> {
        let d = svd(&self.p);
        let rank = rank_of(&d.s);
        Subspace::from_orthonormal(self.p.rows(), d.top_left(rank))
    }

    /// Kernel of `P` recovered numerically from the matrix alone.
    pub fn extract_kernel(&self) -> Result<Subspace> {
        let d = svd(&self.p);
        let rank = rank_of(&d.s);
        Subspace::from_orthonormal(self.p.rows(), d.bottom_right(rank))
    }
}

fn rank_of(s: &[f64]) -> usize {
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > 1e-8 * top.max(1.0)).count()
}

/// Solves `P [B_V | B_W] = [B_V | 0]`.
pub fn projection_from_pair(v: &Subspace, w: &Subspace) -> Result<ProjectionPair> {
    check_ambient(v, w)?;
    let d = v.ambient;
    if v.dim() + w.dim() != d {
        return Err(Error::Dimension(format!(
            "dimensions {} + {} do not add up to {d}",
            v.dim(),
            w.dim()
        )));
    }
    let p = if w.dim() == 0 {
        ComplexMatrix::identity(d)
    } else if v.dim() == 0 {
        ComplexMatrix::zeros(d, d)
    } else {
        let mut cols: Vec<Vec<Complex64>> = v.basis.clone();
        cols.extend(w.basis.iter().cloned());
        let b = ComplexMatrix::from_columns(d, &cols)?;
        let smin = *svd(&b).s.last().expect("nonempty");
        if smin <= 1e-10 {
            return Err(Error::DegenerateSplitting(format!(
                "concatenated basis has smallest singular value {smin:e}"
            )));
        }
        let mut rhs_cols = v.basis.clone();
        rhs_cols.extend(std::iter::repeat_n(vec![ZERO; d], w.dim()));
        let rhs = ComplexMatrix::from_columns(d, &rhs_cols)?;
        // P B = R  <=>  B^H P^H = R^H
        b.adjoint().solve(&rhs.adjoint())?.adjoint()
    };
    Ok(ProjectionPair {
        v: v.clone(),
        w: w.clone(),
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    fn line(xs: &[f64]) -> Subspace {
        Subspace::span(xs.len(), &[rv(xs)]).unwrap()
    }

    #[test]
    fn distance_examples() {
        let e1 = line(&[1.0, 0.0]);
        let e2 = line(&[0.0, 1.0]);
        let diag = line(&[1.0, 1.0]);
        assert!(grassmann_distance(&e1, &e1).unwrap() < 1e-15);
        assert!((grassmann_distance(&e1, &e2).unwrap() - 1.0).abs() < 1e-15);
        let d = grassmann_distance(&e1, &diag).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-15, "{d}");
        assert!((max_distance_from(&e1, &diag).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(grassmann_distance(&e1, &Subspace::full(3)).is_err());
    }

    #[test]
    fn projection_examples() {
        let e1 = line(&[1.0, 0.0]);
        let e2 = line(&[0.0, 1.0]);
        let pp = projection_from_pair(&e1, &e2).unwrap();
        assert!(pp.p.sub(&ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap()).max_abs() < 1e-15);
        let w = line(&[2.0, -1.0]);
        let pp = projection_from_pair(&e1, &w).unwrap();
        let want = ComplexMatrix::from_real(&[&[1.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!(pp.p.sub(&want).max_abs() < 1e-14, "{:?}", pp.p);
        let pp = projection_from_pair(&line(&[1.0, 1.0]), &line(&[1.0, -1.0])).unwrap();
        let want = ComplexMatrix::from_real(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!(pp.p.sub(&want).max_abs() < 1e-15);
    }

    #[test]
    fn degenerate_pair_rejected() {
        let e1 = line(&[1.0, 0.0]);
        let near = line(&[1.0, 1e-12]);
        assert!(matches!(
            projection_from_pair(&e1, &near),
            Err(Error::DegenerateSplitting(_))
        ));
        assert!(projection_from_pair(&e1, &Subspace::full(2)).is_err());
    }

    #[test]
    fn trivial_splittings() {
        let pp = projection_from_pair(&Subspace::full(2), &Subspace::zero(2)).unwrap();
        assert_eq!(pp.p, ComplexMatrix::identity(2));
        let pp = projection_from_pair(&Subspace::zero(2), &Subspace::full(2)).unwrap();
        assert_eq!(pp.p.max_abs(), 0.0);
    }

    #[test]
    fn complement_and_image() {
        let v = Subspace::span(3, &[rv(&[1.0, 1.0, 0.0]), rv(&[0.0, 1.0, 1.0])]).unwrap();
        let c = v.orthogonal_complement();
        assert_eq!(c.dim(), 1);
        for b in v.basis() {
            assert!(inner(b, &c.basis()[0]).norm() < 1e-14);
        }
        let swap = ComplexMatrix::from_real(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        let img = v.image(&swap).unwrap();
        let want = Subspace::span(3, &[rv(&[1.0, 1.0, 0.0]), rv(&[1.0, 0.0, 1.0])]).unwrap();
        assert!(grassmann_distance(&img, &want).unwrap() < 1e-14);
        assert!(v.distance_to(&rv(&[1.0, 2.0, 1.0])) < 1e-14);
    }

    #[test]
    fn angle_sine() {
        let s = min_angle_sine(&line(&[1.0, 0.0]), &line(&[1.0, 1.0])).unwrap();
        assert!((s - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
