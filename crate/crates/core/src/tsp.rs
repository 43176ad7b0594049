//! Diverse travelling-salesman tours on small complete graphs.
//!
//! Tours are compared as undirected edge sets over the `n(n-1)/2` edges of
//! the complete graph, so two tours on `n` vertices differ in `2n - 2C`
//! edges when they share `C`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{arg, input, too_large, Result};
use crate::framework::{run_local_search, BcbeBackend, BcbeResult, ScoreFunction, Solution, SolutionCollection};
use crate::knapsack::{unit_ratio, MAX_INGEST};
use crate::numeric::{integerize, Ratio};
use crate::oracle::FeasibleSpace;

/// Largest instance for [`held_karp`].
pub const MAX_HELD_KARP_N: usize = 18;
/// Largest instance for the k-best tour DP.
pub const MAX_KBEST_N: usize = 12;
/// Largest instance for [`farthest_pair`].
pub const MAX_PAIR_N: usize = 10;
/// Cap on optimal tours enumerated by [`farthest_pair`].
pub const MAX_OPTIMAL_TOURS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TspInstance {
    lengths: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspJson {
    pub n: usize,
    pub lengths: Vec<Vec<f64>>,
}

impl TspInstance {
    pub fn new(lengths: Vec<Vec<u64>>) -> Result<TspInstance> {
        let n = lengths.len();
        if n < 3 {
            return input("a tour needs at least 3 vertices");
        }
        for (i, row) in lengths.iter().enumerate() {
            if row.len() != n {
                return input(format!("row {i} has {} entries, expected {n}", row.len()));
            }
            if row[i] != 0 {
                return input(format!("diagonal entry {i} is nonzero"));
            }
            for j in 0..i {
                if lengths[j][i] != row[j] {
                    return input(format!("lengths ({i}, {j}) and ({j}, {i}) differ"));
                }
            }
        }
        Ok(TspInstance { lengths })
    }

    pub fn from_json(j: &TspJson) -> Result<TspInstance> {
        if j.lengths.len() != j.n {
            return input("length matrix does not match n");
        }
        let flat = j.lengths.iter().flatten().map(|&x| Ratio::from_decimal(x)).collect::<Result<Vec<_>>>()?;
        let (ints, _) = integerize(&flat, MAX_INGEST)?;
        let n = j.n;
        if ints.len() != n * n {
            return input("length matrix is not square");
        }
        TspInstance::new(ints.chunks(n).map(<[u64]>::to_vec).collect())
    }

    pub fn to_json(&self) -> TspJson {
        TspJson { n: self.n(), lengths: self.lengths.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect() }
    }

    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    pub fn length(&self, i: usize, j: usize) -> u64 {
        self.lengths[i][j]
    }

    pub fn edge_count(&self) -> usize {
        self.n() * (self.n() - 1) / 2
    }

    /// Index of the undirected edge `{i, j}`.
    pub fn edge_index(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let n = self.n();
        a * n - a * (a + 1) / 2 + (b - a - 1)
    }

    pub fn edge_ends(&self, e: usize) -> (usize, usize) {
        let n = self.n();
        let mut a = 0;
        let mut base = 0;
        while base + (n - a - 1) <= e {
            base += n - a - 1;
            a += 1;
        }
        (a, a + 1 + e - base)
    }

    pub fn tour_length(&self, t: &Tour) -> u64 {
        let o = &t.order;
        (0..o.len()).map(|i| self.lengths[o[i]][o[(i + 1) % o.len()]]).sum()
    }

    /// The tour whose edge set is `s`, if `s` is a Hamiltonian cycle.
    pub fn tour_of(&self, s: &Solution) -> Option<Tour> {
        let n = self.n();
        if s.len() != n {
            return None;
        }
        let mut adj = vec![Vec::new(); n];
        for &e in s.members() {
            let (a, b) = self.edge_ends(e);
            adj[a].push(b);
            adj[b].push(a);
        }
        if adj.iter().any(|l| l.len() != 2) {
            return None;
        }
        let mut order = vec![0];
        let (mut prev, mut cur) = (0, adj[0][0]);
        while cur != 0 {
            order.push(cur);
            let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
            (prev, cur) = (cur, next);
        }
        (order.len() == n).then(|| Tour::canonical(order))
    }
}

/// A Hamiltonian cycle starting at vertex 0 with `order[1] < order[n-1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
}

impl Tour {
    /// Rotate to start at 0 and orient so the second vertex is the smaller
    /// neighbour of 0.
    pub fn canonical(order: Vec<usize>) -> Tour {
        let n = order.len();
        let z = order.iter().position(|&v| v == 0).expect("tour visits 0");
        let mut o: Vec<usize> = (0..n).map(|i| order[(z + i) % n]).collect();
        if n > 2 && o[1] > o[n - 1] {
            o[1..].reverse();
        }
        Tour { order: o }
    }

    pub fn edges(&self, inst: &TspInstance) -> Solution {
        let o = &self.order;
        (0..o.len()).map(|i| inst.edge_index(o[i], o[(i + 1) % o.len()])).collect()
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return too_large(format!("{n} vertices exceed the cap of {cap}"));
    }
    Ok(())
}

struct HeldKarp {
    /// best[S][i]: shortest path from 0 through the vertex set S (bits for
    /// vertices 1..n) ending at i.
    best: Vec<Vec<u64>>,
}

impl HeldKarp {
    fn run(inst: &TspInstance) -> HeldKarp {
        let n = inst.n();
        let full = 1usize << (n - 1);
        let mut best = vec![vec![u64::MAX; n]; full];
        for i in 1..n {
            best[1 << (i - 1)][i] = inst.length(0, i);
        }
        for s in 1..full {
            for i in 1..n {
                let cur = best[s][i];
                if cur == u64::MAX {
                    continue;
                }
                for j in 1..n {
                    if s >> (j - 1) & 1 == 0 {
                        let t = s | 1 << (j - 1);
                        let v = cur + inst.length(i, j);
                        if v < best[t][j] {
                            best[t][j] = v;
                        }
                    }
                }
            }
        }
        HeldKarp { best }
    }

    fn optimum(&self, inst: &TspInstance) -> u64 {
        let full = self.best.len() - 1;
        (1..inst.n()).map(|i| self.best[full][i] + inst.length(i, 0)).min().expect("n >= 3")
    }
}

/// Shortest tour by the subset DP.
pub fn held_karp(inst: &TspInstance) -> Result<(u64, Tour)> {
    let n = inst.n();
    check_cap(n, MAX_HELD_KARP_N)?;
    let hk = HeldKarp::run(inst);
    let opt = hk.optimum(inst);
    let full = hk.best.len() - 1;
    let mut i = (1..n).find(|&i| hk.best[full][i] + inst.length(i, 0) == opt).expect("optimum attained");
    let mut s = full;
    let mut rev = vec![i];
    while s.count_ones() > 1 {
        let prev = s & !(1 << (i - 1));
        let j = (1..n)
            .find(|&j| {
                prev >> (j - 1) & 1 == 1
                    && hk.best[prev][j] != u64::MAX
                    && hk.best[prev][j] + inst.length(j, i) == hk.best[s][i]
            })
            .expect("predecessor exists");
        rev.push(j);
        (s, i) = (prev, j);
    }
    rev.push(0);
    rev.reverse();
    Ok((opt, Tour::canonical(rev)))
}

/// Minimum over all `(n-1)!` orders; for testing.
pub fn brute_force_length(inst: &TspInstance) -> u64 {
    let mut best = u64::MAX;
    for_each_tour(inst.n(), &mut |order| {
        best = best.min(inst.tour_length(&Tour { order: order.to_vec() }));
    });
    best
}

/// Calls `f` once per canonical tour.
fn for_each_tour(n: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(order: &mut Vec<usize>, used: &mut [bool], n: usize, f: &mut dyn FnMut(&[usize])) {
        if order.len() == n {
            if order[1] < order[n - 1] {
                f(order);
            }
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                order.push(v);
                rec(order, used, n, f);
                order.pop();
                used[v] = false;
            }
        }
    }
    let mut used = vec![false; n];
    used[0] = true;
    rec(&mut vec![0], &mut used, n, f);
}

/// Every tour of length at most `optimum / c`, as edge sets; for the oracles.
pub fn tour_space(inst: &TspInstance, c: f64) -> Result<FeasibleSpace> {
    check_cap(inst.n(), 10)?;
    let cr = unit_ratio(c, "c", true)?;
    let opt = brute_force_length(inst);
    let mut sols = Vec::new();
    let mut lens = Vec::new();
    for_each_tour(inst.n(), &mut |order| {
        let t = Tour { order: order.to_vec() };
        let len = inst.tour_length(&t);
        if within(len, opt, cr) {
            sols.push(t.edges(inst));
            lens.push(len as f64);
        }
    });
    FeasibleSpace::new(inst.edge_count(), sols, lens)
}

fn within(len: u64, opt: u64, cr: Ratio) -> bool {
    len as u128 * cr.num as u128 <= opt as u128 * cr.den as u128
}

#[derive(Clone, Copy)]
struct Link {
    len: u64,
    prev: u8,
    rank: u16,
}

/// The `k` distinct tours of length at most `optimum / c` with the largest
/// edge-score totals.
///
/// State `(S, i, a)`: a path leaving 0 through `a`, covering `S`, ending at
/// `i`. Each state keeps, per exact score, the `k` shortest such paths.
/// Closing requires `a < i`, so every cycle is produced once.
pub fn kbest_bcbe_tsp(inst: &TspInstance, c: f64, k: usize, score: &ScoreFunction) -> Result<BcbeResult> {
    let n = inst.n();
    check_cap(n, MAX_KBEST_N)?;
    if k == 0 || k > u16::MAX as usize {
        return arg("k out of range");
    }
    if score.len() != inst.edge_count() {
        return arg("score length does not match the edge count");
    }
    let cr = unit_ratio(c, "c", true)?;
    let opt = HeldKarp::run(inst).optimum(inst);
    let m = n - 1;
    let full = 1usize << m;
    let r = |i: usize, j: usize| score.get(inst.edge_index(i, j));
    let cell = |s: usize, i: usize, a: usize| (s * n + i) * n + a;
    let mut table: Vec<BTreeMap<i64, Vec<Link>>> = vec![BTreeMap::new(); full * n * n];
    for a in 1..n {
        table[cell(1 << (a - 1), a, a)].insert(r(0, a), vec![Link { len: inst.length(0, a), prev: 0, rank: 0 }]);
    }
    for s in 1..full {
        if s.count_ones() < 2 {
            continue;
        }
        for j in 1..n {
            if s >> (j - 1) & 1 == 0 {
                continue;
            }
            let prev = s & !(1 << (j - 1));
            for a in 1..n {
                if a == j || prev >> (a - 1) & 1 == 0 {
                    continue;
                }
                let mut out: BTreeMap<i64, Vec<Link>> = BTreeMap::new();
                for i in 1..n {
                    if prev >> (i - 1) & 1 == 0 {
                        continue;
                    }
                    let src = &table[cell(prev, i, a)];
                    let (d, dr) = (inst.length(i, j), r(i, j));
                    for (&sc, list) in src {
                        let slot = out.entry(sc + dr).or_default();
                        for (rank, e) in list.iter().enumerate() {
                            slot.push(Link { len: e.len + d, prev: i as u8, rank: rank as u16 });
                        }
                    }
                }
                for list in out.values_mut() {
                    list.sort_by_key(|e| (e.len, e.prev, e.rank));
                    list.truncate(k);
                }
                table[cell(s, j, a)] = out;
            }
        }
    }
    let last = full - 1;
    let mut cands = Vec::new();
    for i in 1..n {
        for a in 1..i {
            for (&sc, list) in &table[cell(last, i, a)] {
                for (rank, e) in list.iter().enumerate() {
                    let len = e.len + inst.length(i, 0);
                    if !within(len, opt, cr) {
                        continue;
                    }
                    // walk the links back to 0
                    let mut order = vec![i];
                    let (mut s, mut v, mut sc2, mut rk) = (last, i, sc, rank);
                    while s.count_ones() > 1 {
                        let link = table[cell(s, v, a)][&sc2][rk];
                        let u = link.prev as usize;
                        sc2 -= r(u, v);
                        s &= !(1 << (v - 1));
                        (v, rk) = (u, link.rank as usize);
                        order.push(v);
                    }
                    order.push(0);
                    order.reverse();
                    let t = Tour::canonical(order);
                    cands.push((sc + r(i, 0), t.edges(inst)));
                }
            }
        }
    }
    Ok(BcbeResult::from_candidates(cands, k))
}

/// [`kbest_bcbe_tsp`] as a local-search backend.
pub struct TspBackend<'a> {
    pub inst: &'a TspInstance,
    pub c: f64,
}

impl BcbeBackend for TspBackend<'_> {
    fn ground_size(&self) -> usize {
        self.inst.edge_count()
    }

    fn kbest(&self, score: &ScoreFunction, k: usize) -> Result<BcbeResult> {
        kbest_bcbe_tsp(self.inst, self.c, k, score)
    }
}

/// `k` tours of length at most `optimum / c` by local search over the
/// k-best tour DP. A multiset when fewer distinct tours qualify.
pub fn diverse_tsp(inst: &TspInstance, k: usize, c: f64) -> Result<SolutionCollection> {
    run_local_search(&TspBackend { inst, c }, k)
}

/// All optimal tours, canonical and sorted, via the Held–Karp table.
fn optimal_tours(inst: &TspInstance, hk: &HeldKarp, opt: u64) -> Result<Vec<Tour>> {
    let n = inst.n();
    let full = hk.best.len() - 1;
    let mut out = Vec::new();
    let mut stack: Vec<(usize, usize, Vec<usize>)> =
        (1..n).filter(|&i| hk.best[full][i] + inst.length(i, 0) == opt).map(|i| (full, i, vec![i])).collect();
    while let Some((s, i, path)) = stack.pop() {
        if s.count_ones() == 1 {
            let mut order = path.clone();
            order.push(0);
            order.reverse();
            // each cycle is found in both directions; keep one
            if order[1] < order[n - 1] {
                out.push(Tour { order });
                if out.len() > MAX_OPTIMAL_TOURS {
                    return too_large("too many optimal tours");
                }
            }
            continue;
        }
        let prev = s & !(1 << (i - 1));
        for j in 1..n {
            if prev >> (j - 1) & 1 == 1
                && hk.best[prev][j] != u64::MAX
                && hk.best[prev][j] + inst.length(j, i) == hk.best[s][i]
            {
                let mut p = path.clone();
                p.push(j);
                stack.push((prev, j, p));
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Shortest tour minimizing, among shortest tours, the edges shared with
/// `t1`: a Held–Karp DP over `(length, shared)` pairs.
fn least_overlap(inst: &TspInstance, t1: &Solution) -> (u64, usize, Tour) {
    let n = inst.n();
    let full = 1usize << (n - 1);
    let shared = |i: usize, j: usize| t1.contains(inst.edge_index(i, j)) as usize;
    let mut best = vec![vec![(u64::MAX, usize::MAX, 0usize); n]; full];
    for i in 1..n {
        best[1 << (i - 1)][i] = (inst.length(0, i), shared(0, i), 0);
    }
    for s in 1..full {
        for i in 1..n {
            let (len, sh, _) = best[s][i];
            if len == u64::MAX {
                continue;
            }
            for j in 1..n {
                if s >> (j - 1) & 1 == 0 {
                    let t = s | 1 << (j - 1);
                    let v = (len + inst.length(i, j), sh + shared(i, j), i);
                    if (v.0, v.1) < (best[t][j].0, best[t][j].1) {
                        best[t][j] = v;
                    }
                }
            }
        }
    }
    let last = full - 1;
    let (len, sh, mut i) =
        (1..n).map(|i| (best[last][i].0 + inst.length(i, 0), best[last][i].1 + shared(i, 0), i)).min().expect("n >= 3");
    let mut s = last;
    let mut rev = Vec::new();
    while i != 0 {
        rev.push(i);
        let p = best[s][i].2;
        s &= !(1 << (i - 1));
        i = p;
    }
    rev.push(0);
    rev.reverse();
    (len, sh, Tour::canonical(rev))
}

/// Two shortest tours with the largest edge-set distance.
///
/// Every optimal tour `T1` is taken in turn and paired with the optimal tour
/// sharing the fewest edges with it; the distance is `2n - 2·shared`.
pub fn farthest_pair(inst: &TspInstance) -> Result<(Tour, Tour, usize)> {
    let n = inst.n();
    check_cap(n, MAX_PAIR_N)?;
    let hk = HeldKarp::run(inst);
    let opt = hk.optimum(inst);
    let tours = optimal_tours(inst, &hk, opt)?;
    let mut best: Option<(usize, Tour, Tour)> = None;
    for t1 in tours {
        let (len, shared, t2) = least_overlap(inst, &t1.edges(inst));
        debug_assert_eq!(len, opt);
        let d = 2 * n - 2 * shared;
        if best.as_ref().is_none_or(|b| d > b.0) {
            best = Some((d, t1, t2));
        }
        if d == 2 * n {
            break;
        }
    }
    let (d, t1, t2) = best.expect("an optimal tour exists");
    Ok((t1, t2, d))
}
