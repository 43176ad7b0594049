use super::{Graph, Layering, PlanarProblem};
use crate::error::{input, Result};
use crate::framework::Solution;

/// The graph left after one strata has been removed (independent sets) or
/// duplicated (vertex covers), as a disjoint union of components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub graph: Graph,
    /// Original vertex of each local vertex.
    pub origin: Vec<usize>,
    /// Local vertices that are copies of a duplicated strata vertex.
    pub red: Vec<bool>,
}

impl Piece {
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.graph.components()
    }

    /// Original vertices touched by a local set; copies collapse.
    pub fn lift(&self, s: &Solution) -> Solution {
        s.members().iter().map(|&v| self.origin[v]).collect()
    }

    /// Original cover obtained from a local independent set by taking the
    /// complement inside the piece.
    pub fn lift_complement(&self, s: &Solution) -> Solution {
        (0..self.graph.n()).filter(|&v| !s.contains(v)).map(|v| self.origin[v]).collect()
    }

    pub fn has_red(&self) -> bool {
        self.red.iter().any(|&r| r)
    }
}

/// Split `g` along strata `p`.
///
/// Independent sets: delete `L^p`. Vertex covers: cut the level range at every
/// strata level `s` into bands `[s_j, s_{j+1}]` that share their boundary
/// level, and give each band its own copy of the boundary vertices; copies
/// present in two bands are marked red.
pub fn decompose(g: &Graph, layering: &Layering, p: usize, ell: usize, problem: PlanarProblem) -> Result<Piece> {
    if p > ell {
        return input(format!("p = {p} exceeds ell = {ell}"));
    }
    let levels = &layering.levels;
    if levels.len() != g.n() {
        return input("layering does not match the graph");
    }
    match problem {
        PlanarProblem::IndependentSet => {
            let keep: Vec<usize> = (0..g.n()).filter(|&v| !layering.in_strata(v, p, ell)).collect();
            let (graph, origin) = g.induced(&keep);
            let red = vec![false; origin.len()];
            Ok(Piece { graph, origin, red })
        }
        PlanarProblem::VertexCover => duplicate_strata(g, layering, p, ell),
    }
}

fn duplicate_strata(g: &Graph, layering: &Layering, p: usize, ell: usize) -> Result<Piece> {
    let levels = &layering.levels;
    for (u, v) in g.edges() {
        if levels[u].abs_diff(levels[v]) > 1 {
            return input(format!("edge ({u}, {v}) skips a level"));
        }
    }
    let depth = layering.depth().max(1);
    let mut cuts: Vec<usize> = vec![1, depth];
    cuts.extend((1..=depth).filter(|&l| l % (ell + 1) == p));
    cuts.sort_unstable();
    cuts.dedup();
    let bands: Vec<(usize, usize)> =
        if cuts.len() == 1 { vec![(cuts[0], cuts[0])] } else { cuts.windows(2).map(|w| (w[0], w[1])).collect() };
    let mut origin = Vec::new();
    let mut band_of = Vec::new();
    // copy[b][v] = local id of v in band b
    let mut copy = vec![vec![usize::MAX; g.n()]; bands.len()];
    for v in 0..g.n() {
        for (b, &(lo, hi)) in bands.iter().enumerate() {
            if (lo..=hi).contains(&levels[v]) {
                copy[b][v] = origin.len();
                origin.push(v);
                band_of.push(b);
            }
        }
    }
    let mut count = vec![0usize; g.n()];
    for &v in &origin {
        count[v] += 1;
    }
    let red: Vec<bool> = origin.iter().map(|&v| count[v] > 1).collect();
    let mut edges = Vec::new();
    for (u, v) in g.edges() {
        for c in &copy {
            if c[u] != usize::MAX && c[v] != usize::MAX {
                edges.push((c[u], c[v]));
            }
        }
    }
    let weights = origin.iter().map(|&v| g.weights[v]).collect();
    let graph = Graph::new(origin.len(), &edges, weights)?;
    Ok(Piece { graph, origin, red })
}

#[cfg(test)]
mod tests {
    use super::super::{compute_levels, fixtures};
    use super::*;

    #[test]
    fn path_without_strata_is_unchanged() {
        let g = fixtures::path3();
        let l = Layering { levels: vec![1, 1, 1] };
        let piece = decompose(&g, &l, 0, 3, PlanarProblem::IndependentSet).unwrap();
        assert_eq!(piece.graph, g);
        assert_eq!(piece.components().len(), 1);
    }

    #[test]
    fn grid_cases() {
        let pg = fixtures::grid3();
        let l = compute_levels(&pg).unwrap();
        let all = decompose(&pg.graph, &l, 0, 0, PlanarProblem::IndependentSet).unwrap();
        assert_eq!(all.graph.n(), 0);
        let ring = decompose(&pg.graph, &l, 0, 1, PlanarProblem::IndependentSet).unwrap();
        assert_eq!(ring.graph.n(), 8);
        assert_eq!(ring.graph.edge_count(), 8);
        assert_eq!(ring.components().len(), 1);
        assert!(ring.graph.neighbors(0).iter().all(|&u| ring.graph.neighbors(u).len() == 2));
    }

    #[test]
    fn vertex_cover_duplicates_strata() {
        let pg = fixtures::grid3();
        let l = compute_levels(&pg).unwrap();
        // cuts at levels 1 and 2 -> a single band [1, 2], nothing duplicated
        let piece = decompose(&pg.graph, &l, 0, 1, PlanarProblem::VertexCover).unwrap();
        assert_eq!(piece.graph.n(), 9);
        assert!(!piece.has_red());
        // three levels with the middle one cut: bands [1,2] and [2,3]
        let g = Graph::unit(3, &[(0, 1), (1, 2)]).unwrap();
        let l = Layering { levels: vec![1, 2, 3] };
        let piece = decompose(&g, &l, 2, 5, PlanarProblem::VertexCover).unwrap();
        assert_eq!(piece.graph.n(), 4);
        assert_eq!(piece.origin, vec![0, 1, 1, 2]);
        assert_eq!(piece.red, vec![false, true, true, false]);
        assert_eq!(piece.components().len(), 2);
        // any cover of the copies maps to a cover of the original
        let local = Solution::new([1, 2]);
        assert!(g.is_cover(&piece.lift(&local)));
        assert_eq!(piece.lift_complement(&Solution::new([0, 3])), Solution::new([1]));
    }
}
