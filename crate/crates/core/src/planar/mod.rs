//! Diverse maximum-weight independent sets and minimum-weight vertex covers
//! in planar graphs.
//!
//! The pipeline peels the drawing into levels, removes (or duplicates) one
//! residue class of levels, solves the bounded-treewidth remainder by dynamic
//! programming over a tree decomposition and keeps the most diverse result.

mod decompose;
mod dp;
mod layering;
mod pipeline;
mod td;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::framework::Solution;
use crate::numeric::{integerize, Ratio};
use crate::oracle::{Problem, Sense};

pub use decompose::{decompose, Piece};
pub use dp::{exact_diverse_td, kbest_bcbe_td, mwis_td, ExactTdOptions, TdBackend, MAX_TD_STATES};
pub use layering::{choose_ell, compute_levels, deeper_vertices_enclosed, segments_cross, Layering};
pub use pipeline::{
    diverse_planar, strata_report, PlanarOutcome, PlanarParams, PlanarProblem, StrataReport, StratumStats,
};
pub use td::{build_tree_decomposition, TdNode, TreeDecomposition};

/// Undirected simple graph with nonnegative integer vertex weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    pub weights: Vec<u64>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)], weights: Vec<u64>) -> Result<Graph> {
        if weights.len() != n {
            return input(format!("expected {n} weights, got {}", weights.len()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return input(format!("edge ({u}, {v}) has an endpoint out of range"));
            }
            if u == v {
                return input(format!("self-loop at {u}"));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            if list.len() != before {
                return input("parallel edges are not allowed");
            }
        }
        Ok(Graph { adj, weights })
    }

    pub fn unit(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        Graph::new(n, edges, vec![1; n])
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn weight(&self, s: &Solution) -> u64 {
        s.members().iter().map(|&v| self.weights[v]).sum()
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn is_independent(&self, s: &Solution) -> bool {
        s.members().iter().all(|&u| self.adj[u].iter().all(|&v| !s.contains(v)))
    }

    pub fn is_cover(&self, s: &Solution) -> bool {
        self.edges().iter().all(|&(u, v)| s.contains(u) || s.contains(v))
    }

    /// Induced subgraph on `keep` (sorted), with the map back to `self`.
    pub fn induced(&self, keep: &[usize]) -> (Graph, Vec<usize>) {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            local[v] = i;
        }
        let adj = keep
            .iter()
            .map(|&v| self.adj[v].iter().filter(|&&u| local[u] != usize::MAX).map(|&u| local[u]).collect())
            .collect::<Vec<Vec<usize>>>();
        let adj = adj
            .into_iter()
            .map(|mut l: Vec<usize>| {
                l.sort_unstable();
                l
            })
            .collect();
        let weights = keep.iter().map(|&v| self.weights[v]).collect();
        (Graph { adj, weights }, keep.to_vec())
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// An independent-set view of a graph for the brute-force oracles.
pub struct IndependentSets<'a>(pub &'a Graph);

impl Problem for IndependentSets<'_> {
    fn ground_size(&self) -> usize {
        self.0.n()
    }

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn evaluate(&self, s: &Solution) -> Option<f64> {
        self.0.is_independent(s).then(|| self.0.weight(s) as f64)
    }

    fn evaluate_mask(&self, mask: u32) -> Option<f64> {
        let g = self.0;
        let mut w = 0u64;
        for v in 0..g.n() {
            if mask >> v & 1 == 1 {
                if g.adj[v].iter().any(|&u| mask >> u & 1 == 1) {
                    return None;
                }
                w += g.weights[v];
            }
        }
        Some(w as f64)
    }
}

/// A vertex-cover view of a graph for the brute-force oracles.
pub struct VertexCovers<'a>(pub &'a Graph);

impl Problem for VertexCovers<'_> {
    fn ground_size(&self) -> usize {
        self.0.n()
    }

    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn evaluate(&self, s: &Solution) -> Option<f64> {
        self.0.is_cover(s).then(|| self.0.weight(s) as f64)
    }

    fn evaluate_mask(&self, mask: u32) -> Option<f64> {
        let g = self.0;
        let mut w = 0u64;
        for v in 0..g.n() {
            if mask >> v & 1 == 1 {
                w += g.weights[v];
            } else if g.adj[v].iter().any(|&u| mask >> u & 1 == 0) {
                return None;
            }
        }
        Some(w as f64)
    }
}

/// A graph with a straight-line drawing and/or precomputed levels.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneGraph {
    pub graph: Graph,
    pub coords: Option<Vec<(f64, f64)>>,
    pub levels: Option<Vec<usize>>,
}

/// Graph JSON as read from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
}

impl PlaneGraph {
    /// Validates the drawing (no crossings, no vertex on a foreign edge) or,
    /// without coordinates, the supplied levels and the planar edge bound.
    pub fn new(graph: Graph, coords: Option<Vec<(f64, f64)>>, levels: Option<Vec<usize>>) -> Result<PlaneGraph> {
        let n = graph.n();
        if let Some(c) = &coords {
            if c.len() != n {
                return input(format!("expected {n} coordinates, got {}", c.len()));
            }
            if c.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
                return input("coordinates must be finite");
            }
            layering::validate_drawing(&graph, c)?;
        } else if levels.is_none() {
            return input("a planar instance needs coordinates or levels");
        }
        if let Some(l) = &levels {
            if l.len() != n || l.contains(&0) {
                return input("levels must be 1-based, one per vertex");
            }
        }
        if n >= 3 && graph.edge_count() > 3 * n - 6 {
            return input("too many edges for a planar graph");
        }
        Ok(PlaneGraph { graph, coords, levels })
    }

    pub fn from_json(j: &GraphJson) -> Result<PlaneGraph> {
        let weights = match &j.weights {
            None => vec![1; j.n],
            Some(w) => {
                let r = w.iter().map(|&x| Ratio::from_decimal(x)).collect::<Result<Vec<_>>>()?;
                integerize(&r, crate::knapsack::MAX_INGEST)?.0
            }
        };
        let edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        let graph = Graph::new(j.n, &edges, weights)?;
        let coords = j.coords.as_ref().map(|c| c.iter().map(|p| (p[0], p[1])).collect());
        PlaneGraph::new(graph, coords, j.levels.clone())
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.graph.n(),
            edges: self.graph.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            weights: Some(self.graph.weights.iter().map(|&w| w as f64).collect()),
            coords: self.coords.as_ref().map(|c| c.iter().map(|&(x, y)| [x, y]).collect()),
            levels: self.levels.clone(),
        }
    }
}

/// Fixed-width bitset over vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct VSet(Vec<u64>);

impl VSet {
    pub(crate) fn new(n: usize) -> VSet {
        VSet(vec![0; n.div_ceil(64).max(1)])
    }

    pub(crate) fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }

    pub(crate) fn union_with(&mut self, o: &VSet) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }

    pub(crate) fn to_solution(&self) -> Solution {
        let mut m = Vec::new();
        for (i, &w) in self.0.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                m.push(i * 64 + b);
                w &= w - 1;
            }
        }
        Solution::new(m)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn path3() -> Graph {
        Graph::unit(3, &[(0, 1), (1, 2)]).unwrap()
    }

    pub fn cycle4() -> Graph {
        Graph::unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    /// 3x3 grid, row-major, drawn on integer points.
    pub fn grid3() -> PlaneGraph {
        let mut edges = Vec::new();
        for r in 0..3 {
            for c in 0..3 {
                let v = 3 * r + c;
                if c < 2 {
                    edges.push((v, v + 1));
                }
                if r < 2 {
                    edges.push((v, v + 3));
                }
            }
        }
        let coords = (0..9).map(|v| ((v % 3) as f64, (v / 3) as f64)).collect();
        PlaneGraph::new(Graph::unit(9, &edges).unwrap(), Some(coords), None).unwrap()
    }
}
