use std::collections::HashSet;

use rayon::prelude::*;

use super::{Budget, MatrixSet, Word};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy)]
struct Node {
    parent: u32,
    symbol: u32,
}

/// Level-by-level enumeration of all products of a given length.
///
/// Products that are bitwise equal are merged, keeping the lexicographically
/// smallest word; the surviving products at each level are listed in
/// lexicographic order of those words.
pub struct WordTree<'a> {
    set: &'a MatrixSet,
    budget: Budget,
    used: u64,
    levels: Vec<Vec<Node>>,
    products: Vec<ComplexMatrix>,
}

impl<'a> WordTree<'a> {
    pub fn new(set: &'a MatrixSet, budget: Budget) -> Self {
        Self {
            set,
            budget,
            used: 0,
            levels: vec![vec![Node {
                parent: u32::MAX,
                symbol: u32::MAX,
            }]],
            products: vec![ComplexMatrix::identity(set.dim())],
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn products(&self) -> &[ComplexMatrix] {
        &self.products
    }

    pub fn multiplications(&self) -> u64 {
        self.used
    }

    /// Representative word of the `idx`-th product at the current depth.
    pub fn word(&self, idx: usize) -> Word {
        let mut letters = Vec::with_capacity(self.depth());
        let mut i = idx;
        for level in self.levels[1..].iter().rev() {
            let node = level[i];
            letters.push(node.symbol as usize);
            i = node.parent as usize;
        }
        letters.reverse();
        Word::new(letters)
    }

    /// Extends every surviving word by one letter.
    pub fn advance(&mut self) -> Result<()> {
        let k = self.set.len();
        let need = self.products.len() as u64 * k as u64;
        if self.used + need > self.budget.max_multiplications {
            return Err(Error::BudgetExceeded {
                limit: self.budget.max_multiplications,
                depth: self.depth() + 1,
                feasible: self.depth(),
            });
        }
        let mats = self.set.matrices();
        let children: Vec<ComplexMatrix> = self
            .products
            .par_iter()
            .flat_map_iter(|p| mats.iter().map(move |a| a * p))
            .collect();
        self.used += need;
        let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(children.len());
        let mut nodes = Vec::new();
        let mut kept = Vec::new();
        for (i, child) in children.into_iter().enumerate() {
            if seen.insert(child.bit_key()) {
                nodes.push(Node {
                    parent: (i / k) as u32,
                    symbol: (i % k) as u32,
                });
                kept.push(child);
            }
        }
        self.levels.push(nodes);
        self.products = kept;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representatives_are_lexicographically_smallest() {
        let set = MatrixSet::new(vec![
            ComplexMatrix::from_real(&[&[0.0, 2.0], &[0.5, 0.0]]).unwrap(),
            ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap(),
        ])
        .unwrap();
        let mut tree = WordTree::new(&set, Budget::default());
        for _ in 0..5 {
            tree.advance().unwrap();
        }
        let n = tree.depth();
        // brute force: for each product class, the smallest word
        let mut all: Vec<(Word, Vec<u64>)> = (0..1usize << n)
            .map(|bits| {
                let w = Word::new((0..n).map(|i| (bits >> (n - 1 - i)) & 1).collect());
                let key = set.product(&w).unwrap().bit_key();
                (w, key)
            })
            .collect();
        all.sort();
        let mut reps = Vec::new();
        let mut seen = HashSet::new();
        for (w, key) in all {
            if seen.insert(key) {
                reps.push(w);
            }
        }
        let got: Vec<Word> = (0..tree.products().len()).map(|i| tree.word(i)).collect();
        assert_eq!(got, reps);
        for (i, w) in got.iter().enumerate() {
            assert_eq!(&set.product(w).unwrap(), &tree.products()[i]);
        }
    }
}
