use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::{nth_root, Budget, MatrixSet, Word};
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, spectral_radius, ComplexMatrix};

/// Outcome of the branch-and-bound search. `lower <= ϱ <= upper` always
/// holds; `conclusive` says whether the width target was met.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedBounds {
    pub lower: f64,
    pub upper: f64,
    pub conclusive: bool,
    pub lower_word: Word,
    pub depth_reached: usize,
    pub nodes_expanded: usize,
    pub multiplications: u64,
}

struct Node {
    value: f64,
    word: Vec<usize>,
    product: ComplexMatrix,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap order: larger value first, then shorter word, then lexicographically smaller.
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.word.len().cmp(&self.word.len()))
            .then_with(|| other.word.cmp(&self.word))
    }
}

/// Best-first search over the word tree with Euclidean norms.
///
/// A branch `w` stays alive while `‖A_w‖^{1/|w|} > lower (1 - delta/4)`.
/// Every infinite word factors into blocks that are either pruned or still
/// on the frontier, so `max(lower, frontier max)` bounds ϱ from above.
pub fn pruned_bounds(set: &MatrixSet, delta: f64, max_depth: usize, budget: Budget) -> Result<PrunedBounds> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    if max_depth == 0 {
        return Err(Error::InvalidArgument("max_depth must be at least 1".into()));
    }
    let mut lower = 0.0f64;
    let mut lower_word = Word::new(vec![0]);
    let mut upper = f64::INFINITY;
    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut seen: HashSet<(usize, Vec<u64>)> = HashSet::new();
    let mut used = 0u64;
    let mut expanded = 0usize;
    let mut depth_reached = 0usize;

    let mut candidates: Vec<Node> = Vec::new();
    let identity = ComplexMatrix::identity(set.dim());
    let mut push_children =
        |parent_word: &[usize], parent: &ComplexMatrix, lower: &mut f64, lower_word: &mut Word, out: &mut Vec<Node>| -> Result<()> {
            for (s, a) in set.matrices().iter().enumerate() {
                let product = a * parent;
                let mut word = parent_word.to_vec();
                word.push(s);
                if !seen.insert((word.len(), product.bit_key())) {
                    continue;
                }
                let n = word.len();
                let rho = nth_root(spectral_radius(&product)?, n);
                if rho > *lower {
                    *lower = rho;
                    *lower_word = Word::new(word.clone());
                }
                out.push(Node {
                    value: nth_root(spectral_norm(&product), n),
                    word,
                    product,
                });
            }
            Ok(())
        };

    push_children(&[], &identity, &mut lower, &mut lower_word, &mut candidates)?;
    used += set.len() as u64;
    depth_reached = depth_reached.max(1);
    let mut conclusive = false;
    loop {
        let threshold = lower * (1.0 - delta / 4.0);
        for node in candidates.drain(..) {
            if node.value > threshold {
                heap.push(node);
            }
        }
        let frontier = heap.peek().map_or(f64::NEG_INFINITY, |n| n.value);
        upper = upper.min(lower.max(frontier));
        if upper - lower <= delta {
            conclusive = true;
            break;
        }
        let Some(top) = heap.pop() else {
            break;
        };
        if top.value <= threshold {
            // pruned retroactively after the lower bound moved
            continue;
        }
        if top.word.len() >= max_depth || used + set.len() as u64 > budget.max_multiplications {
            heap.push(top);
            break;
        }
        used += set.len() as u64;
        expanded += 1;
        depth_reached = depth_reached.max(top.word.len() + 1);
        push_children(&top.word, &top.product, &mut lower, &mut lower_word, &mut candidates)?;
    }
    Ok(PrunedBounds {
        lower,
        upper,
        conclusive,
        lower_word,
        depth_reached,
        nodes_expanded: expanded,
        multiplications: used,
    })
}
