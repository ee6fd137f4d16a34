//! Eigenvalues of general complex matrices: Householder reduction to
//! Hessenberg form followed by single-shift QR with Wilkinson shifts.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// All eigenvalues of a square matrix, in no particular order.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigenvalues of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let mut h: Vec<Vec<Complex64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

fn hessenberg(a: &mut [Vec<Complex64>]) {
    let n = a.len();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[i][k]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // A <- H A with H = I - 2 v v^H acting on rows k+1..n
        for j in 0..n {
            let s: Complex64 = (0..v.len()).map(|t| v[t].conj() * a[k + 1 + t][j]).sum();
            for t in 0..v.len() {
                a[k + 1 + t][j] -= 2.0 * v[t] * s;
            }
        }
        // A <- A H acting on columns k+1..n
        for row in a.iter_mut() {
            let s: Complex64 = (0..v.len()).map(|t| row[k + 1 + t] * v[t]).sum();
            for t in 0..v.len() {
                row[k + 1 + t] -= 2.0 * s * v[t].conj();
            }
        }
        for row in a.iter_mut().skip(k + 2) {
            row[k] = ZERO;
        }
    }
}

/// Complex Givens rotation `[[c, s], [-conj(s), c]]` mapping (a, b) to (r, 0).
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let r = an.hypot(b.norm());
    if r == 0.0 {
        (1.0, ZERO)
    } else if an == 0.0 {
        (0.0, Complex64::new(1.0, 0.0))
    } else {
        (an / r, (a / an) * b.conj() / r)
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg_qr(h: &mut [Vec<Complex64>]) -> Result<Vec<Complex64>> {
    let n = h.len();
    let mut eig = vec![ZERO; n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let max_iter = 100 * n;
    let scale = h
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    loop {
        if hi == 0 {
            eig[0] = h[0][0];
            break;
        }
        // Deflate negligible subdiagonals.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[lo][lo - 1].norm();
            let diag = h[lo][lo].norm() + h[lo - 1][lo - 1].norm();
            let reference = if diag > 0.0 { diag } else { scale };
            if sub <= f64::EPSILON * reference || sub <= 1e-300 {
                h[lo][lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[hi][hi];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > max_iter {
            return Err(Error::NoConvergence("Hessenberg QR".into()));
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift to break cycles
            h[hi][hi] + Complex64::new(0.75 * h[hi][hi - 1].norm(), 0.43 * h[hi][hi - 1].norm())
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };
        for k in lo..=hi {
            h[k][k] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            for j in k..=hi {
                let x = h[k][j];
                let y = h[k + 1][j];
                h[k][j] = c * x + s * y;
                h[k + 1][j] = -s.conj() * x + c * y;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            for row in h.iter_mut().take((k + 2).min(hi) + 1).skip(lo) {
                let p = row[k];
                let q = row[k + 1];
                row[k] = p * c + q * s.conj();
                row[k + 1] = -p * s + q * c;
            }
        }
        for k in lo..=hi {
            h[k][k] += mu;
        }
    }
    Ok(eig)
}
