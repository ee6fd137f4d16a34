use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// Directed multigraph with finite real edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    vertices: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let edges = edges
            .into_iter()
            .map(|(from, to, weight)| {
                if from >= vertices || to >= vertices {
                    return Err(Error::IndexOutOfRange {
                        index: from.max(to),
                        size: vertices,
                    });
                }
                if !weight.is_finite() {
                    return Err(Error::NonFinite(format!("edge {from}->{to} has weight {weight}")));
                }
                Ok(Edge { from, to, weight })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.edges.iter().fold(0.0, |m, e| m.max(e.weight.abs()))
    }

    /// `table[k][v]`: best weight of a walk with exactly k edges ending at v,
    /// and the edge used last.
    fn walk_table(&self, n: usize) -> (Vec<Vec<f64>>, Vec<Vec<Option<usize>>>) {
        let v = self.vertices;
        let mut table = vec![vec![f64::NEG_INFINITY; v]; n + 1];
        let mut pred = vec![vec![None; v]; n + 1];
        table[0].iter_mut().for_each(|x| *x = 0.0);
        for k in 1..=n {
            for (ei, e) in self.edges.iter().enumerate() {
                let prev = table[k - 1][e.from];
                if prev == f64::NEG_INFINITY {
                    continue;
                }
                let cand = prev + e.weight;
                if cand > table[k][e.to] {
                    table[k][e.to] = cand;
                    pred[k][e.to] = Some(ei);
                }
            }
        }
        (table, pred)
    }
}

/// A directed cycle given by its edge indices in traversal order.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleMean {
    pub value: f64,
    pub witness: Cycle,
}

/// `max_v min_{k<n} (D_n(v) - D_k(v)) / (n - k)`, Karp's expression at
/// walk length `n`; equal to the maximum cycle mean once `n >= |V|`.
pub fn karp_value(g: &WeightedGraph, n: usize) -> Result<f64> {
    if n < g.vertices().max(1) {
        return Err(Error::InvalidArgument(format!(
            "walk length {n} below the vertex count {}",
            g.vertices()
        )));
    }
    let (table, _) = g.walk_table(n);
    karp_from_table(&table, n).map(|(v, _)| v)
}

fn karp_from_table(table: &[Vec<f64>], n: usize) -> Result<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for v in 0..table[n].len() {
        let dn = table[n][v];
        if dn == f64::NEG_INFINITY {
            continue;
        }
        let inner = (0..n)
            .filter(|&k| table[k][v] > f64::NEG_INFINITY)
            .map(|k| (dn - table[k][v]) / (n - k) as f64)
            .fold(f64::INFINITY, f64::min);
        if best.map_or(true, |b| inner > b.0) {
            best = Some((inner, v));
        }
    }
    best.ok_or(Error::NoCycle)
}

/// Maximum over directed cycles of total weight over length, with a cycle
/// attaining it.
pub fn max_cycle_mean(g: &WeightedGraph) -> Result<CycleMean> {
    let n = g.vertices();
    if n == 0 {
        return Err(Error::NoCycle);
    }
    let (table, pred) = g.walk_table(n);
    let (value, end) = karp_from_table(&table, n)?;

    // Walk back along the optimal n-edge walk and take its best cycle.
    let mut walk_vertices = vec![end];
    let mut walk_edges = Vec::with_capacity(n);
    let mut v = end;
    for k in (1..=n).rev() {
        let ei = pred[k][v].ok_or_else(|| Error::Invariant("broken walk table".into()))?;
        walk_edges.push(ei);
        v = g.edges[ei].from;
        walk_vertices.push(v);
    }
    walk_vertices.reverse();
    walk_edges.reverse();
    let mut witness: Option<Cycle> = None;
    for i in 0..walk_vertices.len() {
        for j in i + 1..walk_vertices.len() {
            if walk_vertices[j] != walk_vertices[i] {
                continue;
            }
            let edges = walk_edges[i..j].to_vec();
            let mean = edges.iter().map(|&e| g.edges[e].weight).sum::<f64>() / edges.len() as f64;
            if witness.as_ref().map_or(true, |w| mean > w.mean) {
                witness = Some(Cycle {
                    vertices: walk_vertices[i..j].to_vec(),
                    edges,
                    mean,
                });
            }
            break;
        }
    }
    let witness = witness.ok_or_else(|| Error::Invariant("optimal walk contains no cycle".into()))?;
    Ok(CycleMean { value, witness })
}

/// Maximum average weight over walks with exactly `n` edges.
pub fn path_max_average(g: &WeightedGraph, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("walk length must be at least 1".into()));
    }
    let (table, _) = g.walk_table(n);
    let best = table[n].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::NoPath(n));
    }
    Ok(best / n as f64)
}
