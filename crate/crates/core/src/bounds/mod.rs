//! Bound sequences for the joint spectral radius.
//!
//! `rho_plus_n` and `rho_minus_n` maximize normalized norms and spectral
//! radii over all words of length n. `sandwich` runs both for n = 1..N and
//! keeps the running enclosure, `pruned_bounds` is a best-first
//! branch-and-bound, and `fit_rate` measures how fast a gap closes.

pub(crate) mod fit;
mod pruned;
mod tree;

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extremal::{operator_norm, NormSpec};
use crate::linalg::{spectral_radius, ComplexMatrix};

pub use fit::{fit_rate, RateFit};
pub use pruned::{pruned_bounds, PrunedBounds};
pub use tree::WordTree;

/// Default cap on matrix multiplications per enumeration.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

/// Relative tolerance used to decide which words tie for a maximum.
pub const TIE_TOL: f64 = 1e-12;

/// Limit on the number of matrix multiplications an enumeration may spend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_multiplications: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_multiplications: DEFAULT_BUDGET,
        }
    }
}

impl Budget {
    pub fn new(max_multiplications: u64) -> Self {
        Self {
            max_multiplications,
        }
    }
}

/// A nonempty finite set of d x d matrices with optional labels.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet {
    dim: usize,
    matrices: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

impl MatrixSet {
    pub fn new(matrices: Vec<ComplexMatrix>) -> Result<Self> {
        let labels = (0..matrices.len()).map(|i| format!("A{}", i + 1)).collect();
        Self::with_labels(matrices, labels)
    }

    pub fn with_labels(matrices: Vec<ComplexMatrix>, labels: Vec<String>) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::InvalidArgument("matrix set is empty".into()));
        };
        if labels.len() != matrices.len() {
            return Err(Error::InvalidArgument("one label per matrix required".into()));
        }
        let dim = first.rows();
        for (m, label) in matrices.iter().zip(&labels) {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::Dimension(format!(
                    "matrix {label} is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Self {
            dim,
            matrices,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, i: usize) -> &ComplexMatrix {
        &self.matrices[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Every matrix multiplied by `s`; labels are kept.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            matrices: self.matrices.iter().map(|m| m.scale_real(s)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// `A_{w_n} ... A_{w_1}`: the first letter acts first. The empty word gives the identity.
    pub fn product(&self, w: &Word) -> Result<ComplexMatrix> {
        self.check_word(w)?;
        let mut out = ComplexMatrix::identity(self.dim);
        for &i in w.indices() {
            out = &self.matrices[i] * &out;
        }
        Ok(out)
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.indices().iter().find(|&&i| i >= self.len()) {
            Some(&index) => Err(Error::IndexOutOfRange {
                index,
                size: self.len(),
            }),
            None => Ok(()),
        }
    }
}

/// Free function form of [`MatrixSet::product`].
pub fn product_of_word(set: &MatrixSet, w: &Word) -> Result<ComplexMatrix> {
    set.product(w)
}

/// A finite sequence of indices into a [`MatrixSet`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(indices: Vec<usize>) -> Self {
        Self(indices)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cyclic rotation moving the first `k` letters to the end.
    pub fn rotate(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let k = k % v.len();
            v.rotate_left(k);
        }
        Self(v)
    }
}

impl fmt::Display for Word {
    /// Hyphen-joined indices; the empty word prints as an empty string.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("-"))
    }
}

impl std::str::FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(Self::empty());
        }
        s.split('-')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad word letter {t:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// Maximum of a normalized quantity over words of one length.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremum {
    pub value: f64,
    /// Lexicographically smallest word within [`TIE_TOL`] of the maximum.
    pub word: Word,
}

/// Per-level maxima of normalized norm and normalized spectral radius.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelExtrema {
    pub n: usize,
    pub plus: Extremum,
    pub minus: Extremum,
}

fn nth_root(x: f64, n: usize) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.powf(1.0 / n as f64)
    }
}

/// Index of the first value within `TIE_TOL` of the maximum. The tree keeps
/// products in lexicographic order of their representative words, so this
/// is the lexicographically smallest maximizer.
fn first_near_max(values: &[f64]) -> (f64, usize) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = max - TIE_TOL * max.abs();
    let idx = values.iter().position(|&v| v >= cut).expect("nonempty level");
    (max, idx)
}

/// Evaluates the current level of `tree`.
pub fn level_extrema(tree: &WordTree, norm: &NormSpec) -> Result<LevelExtrema> {
    let n = tree.depth();
    if n == 0 {
        return Err(Error::InvalidArgument("level 0 has no extrema".into()));
    }
    let evals: Vec<(f64, f64)> = tree
        .products()
        .par_iter()
        .map(|m| Ok((operator_norm(m, norm)?, spectral_radius(m)?)))
        .collect::<Result<_>>()?;
    let plus: Vec<f64> = evals.iter().map(|e| nth_root(e.0, n)).collect();
    let minus: Vec<f64> = evals.iter().map(|e| nth_root(e.1, n)).collect();
    let (pv, pi) = first_near_max(&plus);
    let (mv, mi) = first_near_max(&minus);
    Ok(LevelExtrema {
        n,
        plus: Extremum {
            value: pv,
            word: tree.word(pi),
        },
        minus: Extremum {
            value: mv,
            word: tree.word(mi),
        },
    })
}

fn tree_at_depth(set: &MatrixSet, n: usize, budget: Budget) -> Result<WordTree<'_>> {
    if n == 0 {
        return Err(Error::InvalidArgument("word length must be at least 1".into()));
    }
    let mut tree = WordTree::new(set, budget);
    for _ in 0..n {
        tree.advance()?;
    }
    Ok(tree)
}

/// `max ‖A_w‖^{1/n}` over words of length n.
pub fn rho_plus_n(set: &MatrixSet, n: usize, norm: &NormSpec, budget: Budget) -> Result<Extremum> {
    let tree = tree_at_depth(set, n, budget)?;
    Ok(level_extrema(&tree, norm)?.plus)
}

/// `max ρ(A_w)^{1/n}` over words of length n.
pub fn rho_minus_n(set: &MatrixSet, n: usize, budget: Budget) -> Result<Extremum> {
    let tree = tree_at_depth(set, n, budget)?;
    let rho: Vec<f64> = tree
        .products()
        .par_iter()
        .map(|m| spectral_radius(m).map(|r| nth_root(r, n)))
        .collect::<Result<_>>()?;
    let (value, idx) = first_near_max(&rho);
    Ok(Extremum {
        value,
        word: tree.word(idx),
    })
}

/// Representatives of every product class whose normalized spectral radius
/// lies within [`TIE_TOL`] of the level maximum.
pub fn near_max_words_minus(set: &MatrixSet, n: usize, budget: Budget) -> Result<Vec<Word>> {
    let tree = tree_at_depth(set, n, budget)?;
    let rho: Vec<f64> = tree
        .products()
        .par_iter()
        .map(|m| spectral_radius(m).map(|r| nth_root(r, n)))
        .collect::<Result<_>>()?;
    let (max, _) = first_near_max(&rho);
    let cut = max - TIE_TOL * max.abs();
    Ok(rho
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= cut)
        .map(|(i, _)| tree.word(i))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRow {
    pub n: usize,
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub best_lower: f64,
    pub best_upper: f64,
    pub gap: f64,
    pub argmax_plus: Word,
    pub argmax_minus: Word,
}

#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub rows: Vec<BoundsRow>,
    pub norm_used: NormSpec,
    pub fitted_rate: Option<RateFit>,
    /// Set when the budget ran out before the requested depth.
    pub truncated: bool,
    pub multiplications: u64,
}

/// Rows n = 1..=max_n of the bound sequences and their running enclosure.
pub fn sandwich(set: &MatrixSet, max_n: usize, norm: &NormSpec, budget: Budget) -> Result<BoundsReport> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    norm.check_dim(set.dim())?;
    let mut tree = WordTree::new(set, budget);
    let mut rows: Vec<BoundsRow> = Vec::with_capacity(max_n);
    let mut truncated = false;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for _ in 0..max_n {
        match tree.advance() {
            Ok(()) => {}
            Err(Error::BudgetExceeded { .. }) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        }
        let ext = level_extrema(&tree, norm)?;
        lower = lower.max(ext.minus.value);
        upper = upper.min(ext.plus.value);
        if ext.minus.value > ext.plus.value * (1.0 + 1e-9) + 1e-300 {
            return Err(Error::Invariant(format!(
                "at n = {} the spectral-radius maximum {} exceeds the norm maximum {}",
                ext.n, ext.minus.value, ext.plus.value
            )));
        }
        if lower > upper * (1.0 + 1e-9) {
            return Err(Error::Invariant(format!(
                "at n = {} best lower bound {lower} exceeds best upper bound {upper}",
                ext.n
            )));
        }
        rows.push(BoundsRow {
            n: ext.n,
            rho_plus: ext.plus.value,
            rho_minus: ext.minus.value,
            best_lower: lower,
            best_upper: upper,
            gap: (upper - lower).max(0.0),
            argmax_plus: ext.plus.word,
            argmax_minus: ext.minus.word,
        });
    }
    Ok(BoundsReport {
        rows,
        norm_used: norm.clone(),
        fitted_rate: None,
        truncated,
        multiplications: tree.multiplications(),
    })
}
