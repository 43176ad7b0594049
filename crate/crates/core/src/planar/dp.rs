//! Dynamic programs over a binary tree decomposition.
//!
//! All three DPs use the same accounting: a table entry at node `t` describes
//! a partial solution on the vertices below `t`, keyed by its trace `U` on
//! the bag `V_t`. Weight, score and distance are booked when a vertex is
//! forgotten, i.e. on the edge from the highest node containing it to that
//! node's parent. The root bag is empty, so every vertex is booked exactly
//! once. This is the same quantity as `f(t, U) = w(U) + Σ_i (f(t_i, U_i) -
//! w(U_i ∩ V_t))` with children constrained by `U_i ∩ V_t = U ∩ V_{t_i}`,
//! minus the bag part `w(U)`.

use std::collections::{BTreeMap, HashMap};

use super::{Graph, TreeDecomposition, VSet};
use crate::error::{arg, too_large, Error, Result};
use crate::framework::{BcbeBackend, BcbeResult, ScoreFunction, Solution, SolutionCollection};

/// Largest bag the DPs enumerate subsets of.
pub const MAX_BAG: usize = 20;
/// Default cap on states per node in [`exact_diverse_td`].
pub const MAX_TD_STATES: usize = 2_000_000;
/// Cap on bag k-tuples enumerated at one node.
const MAX_TUPLES: u128 = 20_000_000;

struct Link {
    /// (position in parent bag, position in child bag) for shared vertices.
    shared: Vec<(usize, usize)>,
    /// Child-bag positions of vertices absent from the parent bag.
    forgotten: Vec<usize>,
}

impl Link {
    fn child_key(&self, mask: u32) -> u32 {
        let mut key = 0;
        for (i, &(_, c)) in self.shared.iter().enumerate() {
            key |= (mask >> c & 1) << i;
        }
        key
    }

    fn parent_key(&self, mask: u32) -> u32 {
        let mut key = 0;
        for (i, &(p, _)) in self.shared.iter().enumerate() {
            key |= (mask >> p & 1) << i;
        }
        key
    }
}

struct Ctx<'a> {
    td: &'a TreeDecomposition,
    n: usize,
    masks: Vec<Vec<u32>>,
    up: Vec<Option<Link>>,
    order: Vec<usize>,
}

impl<'a> Ctx<'a> {
    fn new(g: &Graph, td: &'a TreeDecomposition) -> Result<Ctx<'a>> {
        let mut masks = Vec::with_capacity(td.nodes.len());
        let mut up = Vec::with_capacity(td.nodes.len());
        for node in &td.nodes {
            let b = node.bag.len();
            if b > MAX_BAG {
                return too_large(format!("bag of size {b} exceeds {MAX_BAG}"));
            }
            let adj: Vec<u32> = node
                .bag
                .iter()
                .map(|&v| {
                    node.bag.iter().enumerate().filter(|&(_, &u)| g.has_edge(u, v)).fold(0u32, |m, (i, _)| m | 1 << i)
                })
                .collect();
            let list: Vec<u32> =
                (0u32..1 << b).filter(|&m| (0..b).all(|i| m >> i & 1 == 0 || m & adj[i] == 0)).collect();
            masks.push(list);
            up.push(node.parent.map(|q| {
                let pb = &td.nodes[q].bag;
                let mut shared = Vec::new();
                let mut forgotten = Vec::new();
                for (c, v) in node.bag.iter().enumerate() {
                    match pb.binary_search(v) {
                        Ok(p) => shared.push((p, c)),
                        Err(_) => forgotten.push(c),
                    }
                }
                Link { shared, forgotten }
            }));
        }
        Ok(Ctx { td, n: g.n(), masks, up, order: td.post_order() })
    }

    fn bag(&self, t: usize) -> &[usize] {
        &self.td.nodes[t].bag
    }

    fn children(&self, t: usize) -> &[usize] {
        &self.td.nodes[t].children
    }

    fn link(&self, t: usize) -> &Link {
        self.up[t].as_ref().expect("non-root node has a parent link")
    }

    /// Forgotten vertices of `mask` at node `t`, as vertex ids.
    fn forgotten_members(&self, t: usize, mask: u32) -> impl Iterator<Item = usize> + '_ {
        let bag = self.bag(t);
        self.link(t).forgotten.iter().filter(move |&&c| mask >> c & 1 == 1).map(move |&c| bag[c])
    }
}

fn check_graph(g: &Graph, td: &TreeDecomposition) -> Result<()> {
    if td.nodes.is_empty() || !td.nodes[td.root].bag.is_empty() {
        return arg("tree decomposition must have an empty root bag");
    }
    let covered = td.nodes.iter().flat_map(|t| t.bag.iter()).all(|&v| v < g.n());
    if !covered {
        return arg("tree decomposition refers to vertices outside the graph");
    }
    Ok(())
}

fn better(a: &(u64, VSet), b: &(u64, VSet)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Maximum-weight independent set.
pub fn mwis_td(g: &Graph, td: &TreeDecomposition) -> Result<(u64, Solution)> {
    check_graph(g, td)?;
    let ctx = Ctx::new(g, td)?;
    let mut proj: Vec<HashMap<u32, (u64, VSet)>> = vec![HashMap::new(); td.nodes.len()];
    for &t in &ctx.order {
        let mut table: Vec<(u32, (u64, VSet))> = Vec::new();
        'mask: for &u in &ctx.masks[t] {
            let mut acc = (0u64, VSet::new(ctx.n));
            for &c in ctx.children(t) {
                let Some((w, s)) = proj[c].get(&ctx.link(c).parent_key(u)) else {
                    continue 'mask;
                };
                acc.0 += w;
                acc.1.union_with(s);
            }
            table.push((u, acc));
        }
        if t == td.root {
            let (_, (w, s)) = table.into_iter().next().expect("empty set is independent");
            return Ok((w, s.to_solution()));
        }
        let link = ctx.link(t);
        let mut out: HashMap<u32, (u64, VSet)> = HashMap::new();
        for (u, (mut w, mut s)) in table {
            for v in ctx.forgotten_members(t, u) {
                w += g.weights[v];
                s.insert(v);
            }
            let cand = (w, s);
            let key = link.child_key(u);
            match out.get(&key) {
                Some(old) if !better(&cand, old) => {}
                _ => {
                    out.insert(key, cand);
                }
            }
        }
        proj[t] = out;
    }
    unreachable!("post order ends at the root")
}

type Cell = BTreeMap<i64, Vec<(u64, VSet)>>;

fn trim(list: &mut Vec<(u64, VSet)>, k: usize) {
    list.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    list.truncate(k);
}

fn convolve(a: &Cell, b: &Cell, k: usize) -> Cell {
    let mut out: Cell = BTreeMap::new();
    for (ra, la) in a {
        for (rb, lb) in b {
            let slot = out.entry(ra + rb).or_default();
            for ea in la {
                for eb in lb {
                    let mut s = ea.1.clone();
                    s.union_with(&eb.1);
                    slot.push((ea.0 + eb.0, s));
                }
            }
            if slot.len() > 4 * k {
                trim(slot, k);
            }
        }
    }
    for list in out.values_mut() {
        trim(list, k);
    }
    out
}

/// The `k` distinct independent sets of weight `>= floor` with the largest
/// score totals.
///
/// Each cell `(t, U, R)` holds the `k` heaviest partial sets with trace `U`
/// and booked score exactly `R`; children merge by pairwise sums, truncated
/// back to `k`.
pub fn kbest_bcbe_td(
    g: &Graph,
    td: &TreeDecomposition,
    floor: u64,
    k: usize,
    score: &ScoreFunction,
) -> Result<BcbeResult> {
    check_graph(g, td)?;
    if k == 0 {
        return arg("k must be at least 1");
    }
    if score.len() != g.n() {
        return arg("score length does not match the vertex count");
    }
    let ctx = Ctx::new(g, td)?;
    let mut proj: Vec<HashMap<u32, Cell>> = vec![HashMap::new(); td.nodes.len()];
    for &t in &ctx.order {
        let mut table: Vec<(u32, Cell)> = Vec::new();
        'mask: for &u in &ctx.masks[t] {
            let mut acc: Cell = BTreeMap::from([(0, vec![(0, VSet::new(ctx.n))])]);
            for &c in ctx.children(t) {
                let Some(cell) = proj[c].get(&ctx.link(c).parent_key(u)) else {
                    continue 'mask;
                };
                acc = convolve(&acc, cell, k);
            }
            table.push((u, acc));
        }
        if t == td.root {
            let (_, cell) = table.into_iter().next().expect("empty set is independent");
            let cands = cell
                .into_iter()
                .flat_map(|(r, list)| list.into_iter().filter(|e| e.0 >= floor).map(move |e| (r, e.1.to_solution())))
                .collect();
            return Ok(BcbeResult::from_candidates(cands, k));
        }
        let link = ctx.link(t);
        let mut out: HashMap<u32, Cell> = HashMap::new();
        for (u, cell) in table {
            let gone: Vec<usize> = ctx.forgotten_members(t, u).collect();
            let dw: u64 = gone.iter().map(|&v| g.weights[v]).sum();
            let dr: i64 = gone.iter().map(|&v| score.get(v)).sum();
            let target = out.entry(link.child_key(u)).or_default();
            for (r, list) in cell {
                let slot = target.entry(r + dr).or_default();
                for (w, mut s) in list {
                    for &v in &gone {
                        s.insert(v);
                    }
                    slot.push((w + dw, s));
                }
                trim(slot, k);
            }
        }
        proj[t] = out;
    }
    unreachable!("post order ends at the root")
}

/// [`kbest_bcbe_td`] as a local-search backend.
pub struct TdBackend {
    pub graph: Graph,
    pub td: TreeDecomposition,
    pub floor: u64,
}

impl TdBackend {
    pub fn new(graph: Graph, floor: u64) -> Result<TdBackend> {
        let td = super::build_tree_decomposition(&graph)?;
        Ok(TdBackend { graph, td, floor })
    }
}

impl BcbeBackend for TdBackend {
    fn ground_size(&self) -> usize {
        self.graph.n()
    }

    fn kbest(&self, score: &ScoreFunction, k: usize) -> Result<BcbeResult> {
        kbest_bcbe_td(&self.graph, &self.td, self.floor, k, score)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactTdOptions {
    /// Red vertices: their diversity is minimized after the rest is
    /// maximized, and they do not count towards `d_min`.
    pub red: Option<Vec<bool>>,
    pub max_states: usize,
}

impl Default for ExactTdOptions {
    fn default() -> ExactTdOptions {
        ExactTdOptions { red: None, max_states: MAX_TD_STATES }
    }
}

type State = (i64, Vec<VSet>);

fn better_state(a: &State, b: &State) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// `k` independent sets, each of weight `>= floor`, pairwise at distance
/// `>= d_min`, maximizing the diversity sum.
///
/// Product DP: a state at node `t` is a k-tuple of bag traces together with
/// the booked weight of every solution (clamped at `floor`) and the booked
/// distance of every pair (clamped at `d_min`); the value is the booked
/// diversity. Returns [`Error::Infeasible`] when no tuple qualifies and
/// [`Error::TooLarge`] past the state cap.
pub fn exact_diverse_td(
    g: &Graph,
    td: &TreeDecomposition,
    k: usize,
    floor: u64,
    d_min: usize,
    opts: &ExactTdOptions,
) -> Result<(u64, SolutionCollection)> {
    check_graph(g, td)?;
    if k == 0 {
        return arg("k must be at least 1");
    }
    let n = g.n();
    let red = opts.red.clone().unwrap_or_else(|| vec![false; n]);
    if red.len() != n {
        return arg("red flags do not match the vertex count");
    }
    let ctx = Ctx::new(g, td)?;
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
    let n_red = red.iter().filter(|&&r| r).count() as i64;
    let scale = pairs.len() as i64 * n_red + 1;
    let d_min = d_min as u64;
    let sub = td.subtree_vertices(n);
    let total_w: u64 = g.total_weight();
    let out_w: Vec<u64> =
        sub.iter().map(|m| total_w - (0..n).filter(|&v| m[v]).map(|v| g.weights[v]).sum::<u64>()).collect();
    let out_c: Vec<u64> = sub.iter().map(|m| (0..n).filter(|&v| !m[v] && !red[v]).count() as u64).collect();

    // projected tables: key traces -> (booked aux -> state)
    let mut proj: Vec<HashMap<Vec<u32>, HashMap<Vec<u64>, State>>> = vec![HashMap::new(); td.nodes.len()];
    for &t in &ctx.order {
        let bag = ctx.bag(t);
        let masks = &ctx.masks[t];
        let tuples = (masks.len() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if tuples > MAX_TUPLES {
            return too_large(format!("{tuples} bag tuples at one node"));
        }
        let bag_w: Vec<u64> = masks
            .iter()
            .map(|&m| (0..bag.len()).filter(|&i| m >> i & 1 == 1).map(|i| g.weights[bag[i]]).sum())
            .collect();
        let nonred_bits: u32 = (0..bag.len()).filter(|&i| !red[bag[i]]).fold(0, |m, i| m | 1 << i);
        let mut table: HashMap<(Vec<u32>, Vec<u64>), State> = HashMap::new();
        let mut idx = vec![0usize; k];
        'tuple: loop {
            let traces: Vec<u32> = idx.iter().map(|&i| masks[i]).collect();
            // cross product over children of their matching projected entries
            let mut partial: Vec<(Vec<u64>, State)> = vec![(vec![0; k + pairs.len()], (0, vec![VSet::new(n); k]))];
            let mut ok = true;
            for &c in ctx.children(t) {
                let link = ctx.link(c);
                let key: Vec<u32> = traces.iter().map(|&m| link.parent_key(m)).collect();
                let Some(group) = proj[c].get(&key) else {
                    ok = false;
                    break;
                };
                let mut next = Vec::with_capacity(partial.len() * group.len());
                for (aux, st) in &partial {
                    for (caux, cst) in group {
                        let mut a = aux.clone();
                        for h in 0..k {
                            a[h] = (a[h] + caux[h]).min(floor);
                        }
                        for p in k..a.len() {
                            a[p] = (a[p] + caux[p]).min(d_min);
                        }
                        let mut sets = st.1.clone();
                        for h in 0..k {
                            sets[h].union_with(&cst.1[h]);
                        }
                        next.push((a, (st.0 + cst.0, sets)));
                    }
                }
                partial = next;
            }
            if ok {
                for (aux, st) in partial {
                    let viable = (0..k).all(|h| aux[h] + bag_w[idx[h]] + out_w[t] >= floor)
                        && pairs.iter().enumerate().all(|(p, &(a, b))| {
                            let bag_d = ((traces[a] ^ traces[b]) & nonred_bits).count_ones() as u64;
                            aux[k + p] + bag_d + out_c[t] >= d_min
                        });
                    if !viable {
                        continue;
                    }
                    let key = (traces.clone(), aux);
                    match table.get(&key) {
                        Some(old) if !better_state(&st, old) => {}
                        _ => {
                            table.insert(key, st);
                            if table.len() > opts.max_states {
                                return too_large(format!("exact diverse DP exceeded {} states", opts.max_states));
                            }
                        }
                    }
                }
            }
            for h in (0..k).rev() {
                idx[h] += 1;
                if idx[h] < masks.len() {
                    continue 'tuple;
                }
                idx[h] = 0;
            }
            break;
        }
        if t == td.root {
            let target: Vec<u64> =
                std::iter::repeat_n(floor, k).chain(std::iter::repeat_n(d_min, pairs.len())).collect();
            let best = table.into_iter().filter(|((_, aux), _)| *aux == target).map(|(_, st)| st).fold(
                None,
                |acc: Option<State>, st| match acc {
                    Some(a) if !better_state(&st, &a) => Some(a),
                    _ => Some(st),
                },
            );
            let Some((_, sets)) = best else {
                return Err(Error::Infeasible(format!(
                    "no {k} independent sets of weight >= {floor} at distance >= {d_min}"
                )));
            };
            let mut sols: Vec<Solution> = sets.iter().map(VSet::to_solution).collect();
            sols.sort();
            let col = SolutionCollection::multiset(sols)?;
            let col = if col.has_repeats() { col } else { SolutionCollection::distinct(col.into_solutions())? };
            return Ok((crate::framework::diversity_sum(&col), col));
        }
        let link = ctx.link(t);
        let mut out: HashMap<Vec<u32>, HashMap<Vec<u64>, State>> = HashMap::new();
        for ((traces, mut aux), (mut value, mut sets)) in table {
            let gone: Vec<Vec<usize>> = traces.iter().map(|&m| ctx.forgotten_members(t, m).collect()).collect();
            for h in 0..k {
                let w: u64 = gone[h].iter().map(|&v| g.weights[v]).sum();
                aux[h] = (aux[h] + w).min(floor);
                for &v in &gone[h] {
                    sets[h].insert(v);
                }
            }
            for (p, &(a, b)) in pairs.iter().enumerate() {
                let diff = traces[a] ^ traces[b];
                let (mut plain, mut tinted) = (0i64, 0i64);
                for &c in &link.forgotten {
                    if diff >> c & 1 == 1 {
                        if red[bag[c]] {
                            tinted += 1;
                        } else {
                            plain += 1;
                        }
                    }
                }
                aux[k + p] = (aux[k + p] + plain as u64).min(d_min);
                value += plain * scale - tinted;
            }
            let key: Vec<u32> = traces.iter().map(|&m| link.child_key(m)).collect();
            let group = out.entry(key).or_default();
            let st = (value, sets);
            match group.get(&aux) {
                Some(old) if !better_state(&st, old) => {}
                _ => {
                    group.insert(aux, st);
                }
            }
        }
        proj[t] = out;
    }
    unreachable!("post order ends at the root")
}

#[cfg(test)]
mod tests {
    use super::super::{build_tree_decomposition, fixtures};
    use super::*;
    use crate::framework::diversity_sum;

    fn td(g: &Graph) -> TreeDecomposition {
        build_tree_decomposition(g).unwrap()
    }

    #[test]
    fn mwis_examples() {
        let g = fixtures::path3();
        assert_eq!(mwis_td(&g, &td(&g)).unwrap(), (2, Solution::new([0, 2])));
        let g = fixtures::cycle4();
        assert_eq!(mwis_td(&g, &td(&g)).unwrap().0, 2);
        let grid = fixtures::grid3().graph;
        let (w, s) = mwis_td(&grid, &td(&grid)).unwrap();
        assert_eq!(w, 5);
        assert!(grid.is_independent(&s));
    }

    #[test]
    fn kbest_examples() {
        let g = fixtures::path3();
        let r = kbest_bcbe_td(&g, &td(&g), 2, 1, &ScoreFunction::new(vec![1, 1, 1], 2)).unwrap();
        assert_eq!(r.solutions, vec![Solution::new([0, 2])]);
        assert_eq!(r.scores, vec![2]);
        let g = fixtures::cycle4();
        let r = kbest_bcbe_td(&g, &td(&g), 2, 2, &ScoreFunction::zero(4)).unwrap();
        assert_eq!(r.solutions, vec![Solution::new([0, 2]), Solution::new([1, 3])]);
        let r = kbest_bcbe_td(&g, &td(&g), 3, 2, &ScoreFunction::new(vec![1, -1, 2, 0], 2)).unwrap();
        assert!(r.exhausted);
        assert!(r.is_empty());
    }

    #[test]
    fn exact_examples() {
        let o = ExactTdOptions::default();
        let g = fixtures::path3();
        let (v, c) = exact_diverse_td(&g, &td(&g), 2, 2, 0, &o).unwrap();
        assert_eq!(v, 0);
        assert!(c.has_repeats());
        let g = fixtures::cycle4();
        let (v, c) = exact_diverse_td(&g, &td(&g), 2, 2, 1, &o).unwrap();
        assert_eq!(v, 4);
        assert_eq!(c.solutions(), &[Solution::new([0, 2]), Solution::new([1, 3])][..]);
        assert!(matches!(exact_diverse_td(&g, &td(&g), 2, 2, 5, &o), Err(Error::Infeasible(_))));
    }

    #[test]
    fn red_diversity_is_secondary() {
        // path 0-1-2 where vertex 2 is red: with floor 1 the best pair keeps
        // the plain diversity and avoids differing on vertex 2
        let g = fixtures::path3();
        let o = ExactTdOptions { red: Some(vec![false, false, true]), ..Default::default() };
        let (_, c) = exact_diverse_td(&g, &td(&g), 2, 1, 0, &o).unwrap();
        let plain: usize = c.solutions()[0].sym_diff(&c.solutions()[1]);
        assert_eq!(diversity_sum(&c), plain as u64);
        assert!(c.solutions().iter().all(|s| !s.contains(2)) || c.solutions().iter().all(|s| s.contains(2)));
    }
}
