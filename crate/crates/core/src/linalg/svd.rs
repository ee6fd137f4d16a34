//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.

use num_complex::Complex64;

use super::matrix::{inner, vector_norm, ComplexMatrix};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `M = U diag(s) V^H` with `s` sorted descending.
///
/// For an m x n input, `u` is m x k and `v` is n x k with k = min(m, n).
/// Columns of `u` belonging to zero singular values are completed to an
/// orthonormal set.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// Right singular vectors for the `p` largest singular values.
    pub fn top_right(&self, p: usize) -> Vec<Vec<Complex64>> {
        (0..p).map(|j| self.v.column(j)).collect()
    }

    /// Right singular vectors for all but the `p` largest singular values.
    /// Only meaningful for square inputs, where `v` is a full basis.
    pub fn bottom_right(&self, p: usize) -> Vec<Vec<Complex64>> {
        (p..self.v.cols()).map(|j| self.v.column(j)).collect()
    }

    pub fn top_left(&self, p: usize) -> Vec<Vec<Complex64>> {
        (0..p).map(|j| self.u.column(j)).collect()
    }
}

pub fn svd(m: &ComplexMatrix) -> Svd {
    if m.rows() >= m.cols() {
        jacobi(m)
    } else {
        let t = jacobi(&m.adjoint());
        Svd { u: t.v, s: t.s, v: t.u }
    }
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    svd(m).s
}

/// Largest singular value, the Euclidean operator norm.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m)[0]
}

fn jacobi(m: &ComplexMatrix) -> Svd {
    let rows = m.rows();
    let n = m.cols();
    let mut a = m.columns();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    let tol = 4.0 * f64::EPSILON;
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha: f64 = a[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a[j].iter().map(|z| z.norm_sqr()).sum();
                let g = inner(&a[i], &a[j]);
                let gn = g.norm();
                if gn == 0.0 || gn <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = g / gn;
                let zeta = (beta - alpha) / (2.0 * gn);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let ph = phase.conj();
                for k in 0..rows {
                    let x = a[i][k];
                    let y = a[j][k] * ph;
                    a[i][k] = c * x - s * y;
                    a[j][k] = s * x + c * y;
                }
                for k in 0..n {
                    let x = v[i][k];
                    let y = v[j][k] * ph;
                    v[i][k] = c * x - s * y;
                    v[j][k] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = a.iter().map(|col| vector_norm(col)).zip(0..n).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let s: Vec<f64> = order.iter().map(|&(sv, _)| sv).collect();
    let smax = s[0];
    let mut ucols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for &(sv, idx) in &order {
        if sv > 0.0 && sv > smax * 1e-300 {
            let mut col: Vec<Complex64> = a[idx].iter().map(|z| z / sv).collect();
            // re-orthogonalize against previous columns; helps when sv is tiny
            orthogonalize(&mut col, &ucols);
            match renormalize(col) {
                Some(c) => ucols.push(c),
                None => ucols.push(complete(&ucols, rows)),
            }
        } else {
            ucols.push(complete(&ucols, rows));
        }
    }
    let vcols: Vec<Vec<Complex64>> = order.iter().map(|&(_, idx)| v[idx].clone()).collect();
    Svd {
        u: ComplexMatrix::from_columns(rows, &ucols).expect("finite columns"),
        s,
        v: ComplexMatrix::from_columns(n, &vcols).expect("finite columns"),
    }
}

fn orthogonalize(col: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for b in basis {
            let p = inner(b, col);
            for (x, y) in col.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
    }
}

fn renormalize(col: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let nrm = vector_norm(&col);
    (nrm > 0.5).then(|| col.iter().map(|z| z / nrm).collect())
}

/// A unit vector orthogonal to `basis`, taken from the standard basis.
pub(crate) fn complete(basis: &[Vec<Complex64>], dim: usize) -> Vec<Complex64> {
    let mut best: Option<Vec<Complex64>> = None;
    let mut best_norm = -1.0;
    for e in 0..dim {
        let mut col = vec![ZERO; dim];
        col[e] = Complex64::new(1.0, 0.0);
        orthogonalize(&mut col, basis);
        let nrm = vector_norm(&col);
        if nrm > best_norm {
            best_norm = nrm;
            best = Some(col);
        }
    }
    let col = best.expect("dim >= 1");
    col.iter().map(|z| z / best_norm).collect()
}
