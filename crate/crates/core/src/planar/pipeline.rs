use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{
    build_tree_decomposition, choose_ell, compute_levels, decompose, exact_diverse_td, mwis_td, ExactTdOptions, Graph,
    Layering, Piece, PlaneGraph, TdBackend, TreeDecomposition,
};
use crate::error::{arg, Error, Result};
use crate::framework::{diversity_sum, run_local_search, BcbeBackend, ScoreFunction, Solution, SolutionCollection};
use crate::knapsack::{profit_threshold_exact, scale_profits_exact, unit_ratio, Mode};
use crate::numeric::Ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanarProblem {
    IndependentSet,
    VertexCover,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarParams {
    pub k: usize,
    pub c: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub problem: PlanarProblem,
    pub distinct: bool,
    pub mode: Mode,
}

impl PlanarParams {
    pub fn new(k: usize, c: f64, delta: f64, epsilon: f64, problem: PlanarProblem) -> PlanarParams {
        PlanarParams { k, c, delta, epsilon, problem, distinct: false, mode: Mode::Auto }
    }

    /// `k < 4/ε`, where the exact product DP is used.
    pub fn small_k(&self) -> bool {
        (self.k as f64) < 4.0 / self.epsilon - 1e-9
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumStats {
    pub p: usize,
    /// Weight of `S_h ∩ L^p` for every solution.
    pub masses: Vec<u64>,
    /// `Σ_{i<j} |(S_i ∩ L^p) Δ (S_j ∩ L^p)|`.
    pub strata_diversity: u64,
    /// Every mass is at most `δ/2` of its solution's weight.
    pub light: bool,
    /// The strata diversity is at most `ε/2` of the total.
    pub thin: bool,
    /// Every pair keeps at least half its distance outside the strata.
    pub separated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrataReport {
    pub ell: usize,
    pub total_diversity: u64,
    pub strata: Vec<StratumStats>,
}

impl StrataReport {
    /// Smallest `p` whose strata is both light and thin.
    pub fn marginal(&self) -> Option<usize> {
        self.strata.iter().find(|s| s.light && s.thin).map(|s| s.p)
    }
}

/// Per-strata mass and diversity of a collection.
pub fn strata_report(
    col: &SolutionCollection,
    weights: &[u64],
    layering: &Layering,
    ell: usize,
    delta: f64,
    epsilon: f64,
) -> Result<StrataReport> {
    let dr = unit_ratio(delta, "delta", true)?;
    let er = unit_ratio(epsilon, "epsilon", true)?;
    let sols = col.solutions();
    let k = sols.len();
    let total = diversity_sum(col);
    let weight = |s: &Solution| -> u64 { s.members().iter().map(|&v| weights[v]).sum() };
    let mut strata = Vec::with_capacity(ell + 1);
    for p in 0..=ell {
        let cut: Vec<Solution> = sols
            .iter()
            .map(|s| s.members().iter().copied().filter(|&v| layering.in_strata(v, p, ell)).collect())
            .collect();
        let masses: Vec<u64> = cut.iter().map(weight).collect();
        let light = (0..k).all(|h| 2 * masses[h] as u128 * dr.den as u128 <= dr.num as u128 * weight(&sols[h]) as u128);
        let mut sd = 0u64;
        let mut separated = true;
        for i in 0..k {
            for j in i + 1..k {
                let d = cut[i].sym_diff(&cut[j]);
                sd += d as u64;
                separated &= 2 * d <= sols[i].sym_diff(&sols[j]);
            }
        }
        let thin = 2 * sd as u128 * er.den as u128 <= er.num as u128 * total as u128;
        strata.push(StratumStats { p, masses, strata_diversity: sd, light, thin, separated });
    }
    Ok(StrataReport { ell, total_diversity: total, strata })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarOutcome {
    pub collection: SolutionCollection,
    pub p: usize,
    pub ell: usize,
    pub used_exact: bool,
    /// Weight floor (independent sets) or budget (covers) on original weights,
    /// when no rescaling was needed.
    pub bound: Option<u64>,
    pub report: StrataReport,
}

struct Candidate {
    p: usize,
    piece: Piece,
    td: TreeDecomposition,
}

fn reweighted(piece: &Piece, weights: &[u64]) -> Graph {
    let mut g = piece.graph.clone();
    g.weights = piece.origin.iter().map(|&v| weights[v]).collect();
    g
}

fn into_collection(mut sols: Vec<Solution>) -> Result<SolutionCollection> {
    sols.sort();
    let col = SolutionCollection::multiset(sols)?;
    if col.has_repeats() {
        Ok(col)
    } else {
        SolutionCollection::distinct(col.into_solutions())
    }
}

/// Diverse near-optimal solutions on one decomposed piece, as local sets.
fn solve_piece(
    graph: Graph,
    td: TreeDecomposition,
    floor: u64,
    red: Option<Vec<bool>>,
    params: &PlanarParams,
    exact: bool,
) -> Result<Option<Vec<Solution>>> {
    let k = params.k;
    if exact {
        let chain: &[usize] = if params.distinct { &[1, 0] } else { &[0] };
        let opts = ExactTdOptions { red, ..Default::default() };
        for &d in chain {
            match exact_diverse_td(&graph, &td, k, floor, d, &opts) {
                Ok((_, col)) => return Ok(Some(col.into_solutions())),
                Err(Error::Infeasible(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        return Ok(None);
    }
    let backend = TdBackend { graph, td, floor };
    if backend.kbest(&ScoreFunction::zero(backend.ground_size()), 1)?.is_empty() {
        return Ok(None);
    }
    Ok(Some(run_local_search(&backend, k)?.into_solutions()))
}

/// The full planar pipeline.
///
/// Every residue `p` of the levels modulo `ℓ+1` is tried: the strata `L^p`
/// is removed (independent sets) or duplicated (vertex covers), and the
/// remainder is solved on its tree decomposition against one global quality
/// bound. The bound comes from the best single solution over all `p`, so
/// every emitted set meets the `(1-δ)c` guarantee whichever `p` wins. The
/// most diverse collection wins, ties going to the smallest `p`.
pub fn diverse_planar(pg: &PlaneGraph, params: &PlanarParams) -> Result<PlanarOutcome> {
    let g = &pg.graph;
    let n = g.n();
    let k = params.k;
    if n == 0 || k == 0 {
        return arg("need a nonempty graph and k >= 1");
    }
    let cr = unit_ratio(params.c, "c", true)?;
    let dr = unit_ratio(params.delta, "delta", false)?;
    unit_ratio(params.epsilon, "epsilon", false)?;
    let layering = compute_levels(pg)?;
    let ell = choose_ell(k, params.delta, params.epsilon, params.distinct)?;
    let exact = match params.mode {
        Mode::Exact => true,
        Mode::LocalSearch => false,
        Mode::Auto => params.small_k(),
    };
    let mut seen = BTreeSet::new();
    let mut cands = Vec::new();
    for p in 0..=ell {
        if !seen.insert(layering.strata(p, ell)) {
            continue;
        }
        let piece = decompose(g, &layering, p, ell, params.problem)?;
        let td = build_tree_decomposition(&piece.graph)?;
        cands.push(Candidate { p, piece, td });
    }
    let one_minus_d = dr.complement()?;
    let ell_r = |a: usize, b: usize| Ratio::new(a as u64, b as u64);

    let mut best: Option<(u64, usize, SolutionCollection)> = None;
    let mut bound = None;
    match params.problem {
        PlanarProblem::IndependentSet => {
            let mut w_ref = 0u64;
            for cd in &cands {
                w_ref = w_ref.max(mwis_td(&cd.piece.graph, &cd.td)?.0);
            }
            let (weights, floor) = if w_ref == 0 {
                (g.weights.clone(), 0)
            } else {
                let half_d = Ratio::new(dr.num, 2 * dr.den)?;
                let c_s = half_d.complement()?.mul(cr)?;
                let keep = one_minus_d.mul(ell_r(ell + 1, ell)?)?.div(half_d.complement()?)?;
                let d_s = keep.complement()?;
                let ut = profit_threshold_exact(n, d_s)?;
                if w_ref > ut + n as u64 {
                    let (w, _) = scale_profits_exact(&g.weights, w_ref, c_s, d_s)?;
                    (w, ut)
                } else {
                    let b = cr.mul(one_minus_d)?.mul(ell_r(ell + 1, ell)?)?.ceil_mul(w_ref);
                    bound = Some(b as u64);
                    (g.weights.clone(), b as u64)
                }
            };
            for cd in cands {
                let graph = reweighted(&cd.piece, &weights);
                let Some(local) = solve_piece(graph, cd.td, floor, None, params, exact)? else {
                    continue;
                };
                let col = into_collection(local.iter().map(|s| cd.piece.lift(s)).collect())?;
                consider(&mut best, cd.p, col);
            }
        }
        PlanarProblem::VertexCover => {
            let mut v_ref = u64::MAX;
            for cd in &cands {
                let total = cd.piece.graph.total_weight();
                v_ref = v_ref.min(total - mwis_td(&cd.piece.graph, &cd.td)?.0);
            }
            let factor = ell_r(ell + 1, ell + 2)?.div(one_minus_d.mul(cr)?)?;
            let budget = factor.floor_mul(v_ref) as u64;
            bound = Some(budget);
            for cd in cands {
                let total = cd.piece.graph.total_weight();
                let floor = total.saturating_sub(budget);
                let red = Some(cd.piece.red.clone());
                let graph = cd.piece.graph.clone();
                let Some(local) = solve_piece(graph, cd.td, floor, red, params, exact)? else {
                    continue;
                };
                let col = into_collection(local.iter().map(|s| cd.piece.lift_complement(s)).collect())?;
                consider(&mut best, cd.p, col);
            }
        }
    }
    let Some((_, p, collection)) = best else {
        return Err(Error::Infeasible("no strata admits a qualifying collection".into()));
    };
    let report = strata_report(&collection, &g.weights, &layering, ell, params.delta, params.epsilon)?;
    Ok(PlanarOutcome { collection, p, ell, used_exact: exact, bound, report })
}

fn consider(best: &mut Option<(u64, usize, SolutionCollection)>, p: usize, col: SolutionCollection) {
    let d = diversity_sum(&col);
    if best.as_ref().is_none_or(|b| d > b.0) {
        *best = Some((d, p, col));
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;
    use super::*;

    fn leveled(g: Graph) -> PlaneGraph {
        let n = g.n();
        PlaneGraph::new(g, None, Some(vec![1; n])).unwrap()
    }

    #[test]
    fn cycle_is_example() {
        let pg = leveled(fixtures::cycle4());
        let out = diverse_planar(&pg, &PlanarParams::new(2, 1.0, 0.5, 0.5, PlanarProblem::IndependentSet)).unwrap();
        assert_eq!(diversity_sum(&out.collection), 4);
        assert!(out.used_exact);
    }

    #[test]
    fn single_vertex_repeats() {
        let pg = leveled(Graph::unit(1, &[]).unwrap());
        let out = diverse_planar(&pg, &PlanarParams::new(2, 1.0, 0.5, 0.5, PlanarProblem::IndependentSet)).unwrap();
        assert_eq!(out.collection.solutions(), &[Solution::new([0]), Solution::new([0])][..]);
    }

    #[test]
    fn path_cover_is_unique() {
        let pg = leveled(fixtures::path3());
        let out = diverse_planar(&pg, &PlanarParams::new(2, 1.0, 0.1, 0.5, PlanarProblem::VertexCover)).unwrap();
        assert_eq!(diversity_sum(&out.collection), 0);
        assert!(out.collection.solutions().iter().all(|s| *s == Solution::new([1])));
    }

    #[test]
    fn report_partitions_diversity() {
        let pg = fixtures::grid3();
        let col =
            SolutionCollection::distinct(vec![Solution::new([0, 2, 4, 6, 8]), Solution::new([1, 3, 5, 7])]).unwrap();
        let layering = compute_levels(&pg).unwrap();
        let r = strata_report(&col, &pg.graph.weights, &layering, 3, 0.5, 0.5).unwrap();
        let sum: u64 = r.strata.iter().map(|s| s.strata_diversity).sum();
        assert_eq!(sum, r.total_diversity);
        assert_eq!(r.strata[2].strata_diversity, 1);
        assert!(r.strata[2].light && r.strata[2].thin);
        assert!(!r.strata[1].light);
        assert_eq!(r.marginal(), Some(0));
    }
}
