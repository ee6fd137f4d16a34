#![allow(dead_code)]

use jsrkit_core::{Complex64, ComplexMatrix, MatrixSet};
use proptest::prelude::*;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn cv(xs: &[f64]) -> Vec<Complex64> {
    xs.iter().map(|&x| c(x)).collect()
}

pub fn real(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real(rows).unwrap()
}

pub fn e1() -> MatrixSet {
    MatrixSet::new(vec![
        real(&[&[0.0, 2.0], &[0.5, 0.0]]),
        real(&[&[0.0, 1.0], &[1.0, 0.0]]),
    ])
    .unwrap()
}

pub fn e2() -> MatrixSet {
    MatrixSet::new(vec![
        real(&[&[2.0, 2.0], &[0.0, 0.0]]),
        real(&[&[1.0, 1.0], &[1.0, 1.0]]),
    ])
    .unwrap()
}

pub fn complex_entry() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| Complex64::new(a, b))
}

pub fn matrix(d: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex_entry(), d * d).prop_map(move |data| ComplexMatrix::new(d, d, data).unwrap())
}

/// A square matrix of random size 1..=4.
pub fn any_matrix() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=4).prop_flat_map(matrix)
}

pub fn vector(d: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(complex_entry(), d)
}

/// Small sets of real matrices, d <= 3 and 2-3 members.
pub fn small_set() -> impl Strategy<Value = MatrixSet> {
    (1usize..=3, 2usize..=3).prop_flat_map(|(d, k)| {
        prop::collection::vec(prop::collection::vec(-1.5f64..1.5, d * d), k).prop_map(move |ms| {
            MatrixSet::new(
                ms.into_iter()
                    .map(|data| ComplexMatrix::new(d, d, data.into_iter().map(c).collect()).unwrap())
                    .collect(),
            )
            .unwrap()
        })
    })
}

/// All words of length n in lexicographic order.
pub fn all_words(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |i| {
                    let mut w2 = w.clone();
                    w2.push(i);
                    w2
                })
            })
            .collect();
    }
    out
}

/// `A_{w_n} ... A_{w_1}` by plain left multiplication.
pub fn naive_product(set: &MatrixSet, w: &[usize]) -> ComplexMatrix {
    let mut p = ComplexMatrix::identity(set.dim());
    for &i in w {
        p = set.matrix(i) * &p;
    }
    p
}

/// Euclidean operator norm by power iteration on MᴴM, independent of the SVD.
pub fn power_norm(m: &ComplexMatrix) -> f64 {
    let h = &m.adjoint() * m;
    let d = m.rows();
    let mut best = 0.0f64;
    for start in 0..d {
        let mut v: Vec<Complex64> = (0..d)
            .map(|i| Complex64::new(1.0 + (i * 7 + start * 3) as f64 * 0.1, 0.3 * (i + start) as f64))
            .collect();
        let mut lambda = 0.0;
        for _ in 0..2000 {
            let w = h.apply(&v);
            let n: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n == 0.0 {
                break;
            }
            lambda = n;
            v = w.iter().map(|z| z / n).collect();
        }
        best = best.max(lambda.sqrt());
    }
    best
}
