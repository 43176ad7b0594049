use std::collections::BTreeSet;

use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdNode {
    /// Sorted vertex ids.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

/// Rooted tree decomposition with at most two children per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub nodes: Vec<TdNode>,
    pub root: usize,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.nodes.iter().map(|t| t.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Children before parents.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((t, done)) = stack.pop() {
            if done {
                out.push(t);
                continue;
            }
            stack.push((t, true));
            for &c in self.nodes[t].children.iter().rev() {
                stack.push((c, false));
            }
        }
        out
    }

    /// Vertices appearing in the subtree of each node.
    pub fn subtree_vertices(&self, n: usize) -> Vec<Vec<bool>> {
        let mut out = vec![vec![false; n]; self.nodes.len()];
        for t in self.post_order() {
            let mut mark = vec![false; n];
            for &v in &self.nodes[t].bag {
                mark[v] = true;
            }
            for &c in &self.nodes[t].children {
                for v in 0..n {
                    mark[v] |= out[c][v];
                }
            }
            out[t] = mark;
        }
        out
    }

    /// Vertex coverage, edge coverage, connectivity of each vertex's nodes,
    /// and the binary shape.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let n = g.n();
        let bad = |m: String| Err(Error::Backend(format!("invalid tree decomposition: {m}")));
        if self.nodes[self.root].parent.is_some() {
            return bad("root has a parent".into());
        }
        let order = self.post_order();
        if order.len() != self.nodes.len() {
            return bad("nodes unreachable from the root".into());
        }
        let mut tops = vec![0usize; n];
        let mut seen = vec![false; n];
        for (t, node) in self.nodes.iter().enumerate() {
            if node.children.len() > 2 {
                return bad(format!("node {t} has {} children", node.children.len()));
            }
            for &c in &node.children {
                if self.nodes[c].parent != Some(t) {
                    return bad(format!("parent link of node {c} is broken"));
                }
            }
            let parent_bag = node.parent.map(|q| &self.nodes[q].bag);
            for &v in &node.bag {
                if v >= n {
                    return bad(format!("vertex {v} out of range"));
                }
                seen[v] = true;
                if parent_bag.is_none_or(|b| b.binary_search(&v).is_err()) {
                    tops[v] += 1;
                }
            }
        }
        if let Some(v) = (0..n).find(|&v| !seen[v]) {
            return bad(format!("vertex {v} is in no bag"));
        }
        if let Some(v) = (0..n).find(|&v| tops[v] != 1) {
            return bad(format!("bags holding vertex {v} are not connected"));
        }
        for (u, v) in g.edges() {
            if !self.nodes.iter().any(|t| t.bag.binary_search(&u).is_ok() && t.bag.binary_search(&v).is_ok()) {
                return bad(format!("edge ({u}, {v}) is in no bag"));
            }
        }
        Ok(())
    }
}

/// Min-degree elimination, one node per eliminated vertex, components joined
/// under an empty root, then split into a binary tree. The result is
/// validated before it is returned.
pub fn build_tree_decomposition(g: &Graph) -> Result<TreeDecomposition> {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut position = vec![usize::MAX; n];
    let mut bags: Vec<Vec<usize>> = vec![Vec::new(); n];
    for step in 0..n {
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (adj[v].len(), v)).expect("vertex left");
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        let mut bag = nb;
        bag.push(v);
        bag.sort_unstable();
        bags[v] = bag;
        alive[v] = false;
        position[v] = step;
    }
    // node i <-> vertex i; node n is the root
    let mut nodes: Vec<TdNode> = bags.into_iter().map(|bag| TdNode { bag, children: vec![], parent: None }).collect();
    nodes.push(TdNode { bag: vec![], children: vec![], parent: None });
    let root = n;
    let mut by_position: Vec<usize> = (0..n).collect();
    by_position.sort_by_key(|&v| position[v]);
    for &v in &by_position {
        let parent = nodes[v].bag.iter().copied().filter(|&u| u != v).min_by_key(|&u| position[u]).unwrap_or(root);
        nodes[v].parent = Some(parent);
        nodes[parent].children.push(v);
    }
    binarize(&mut nodes);
    let td = TreeDecomposition { nodes, root };
    td.validate(g)?;
    Ok(td)
}

fn binarize(nodes: &mut Vec<TdNode>) {
    let mut t = 0;
    while t < nodes.len() {
        if nodes[t].children.len() > 2 {
            let rest: Vec<usize> = nodes[t].children.split_off(1);
            let extra = nodes.len();
            nodes.push(TdNode { bag: nodes[t].bag.clone(), children: rest.clone(), parent: Some(t) });
            for c in rest {
                nodes[c].parent = Some(extra);
            }
            nodes[t].children.push(extra);
        }
        t += 1;
    }
}
