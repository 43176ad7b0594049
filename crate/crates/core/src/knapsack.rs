//! Diverse 0/1 knapsack: exact diverse DP, rarity-score k-best DP, profit and
//! weight scaling, and the pipeline that picks between them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{arg, input, too_large, Error, Result};
use crate::framework::{
    pad_farthest, run_local_search, BcbeBackend, BcbeResult, ScoreFunction, Solution, SolutionCollection,
};
use crate::numeric::{integerize, Ratio};
use crate::oracle::{Problem, Sense};

/// Largest number of memoized states the exact diverse DP may create.
pub const MAX_EXACT_STATES: usize = 20_000_000;
/// State budget for the exact branch under `Mode::Auto`.
pub const AUTO_EXACT_STATES: usize = 2_000_000;
/// Largest number of cells one layer of the k-best DP may hold.
pub const MAX_KBEST_CELLS: usize = 50_000_000;
/// Cap on integers produced when ingesting fractional data.
pub const MAX_INGEST: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    pub weights: Vec<u64>,
    pub profits: Vec<u64>,
    pub capacity: u64,
}

impl KnapsackInstance {
    pub fn new(weights: Vec<u64>, profits: Vec<u64>, capacity: u64) -> Result<KnapsackInstance> {
        let inst = KnapsackInstance { weights, profits, capacity };
        inst.validate()?;
        Ok(inst)
    }

    /// Scale fractional weights (with the capacity) and fractional profits to
    /// integers by their common denominators.
    pub fn from_ratios(weights: &[Ratio], profits: &[Ratio], capacity: Ratio) -> Result<KnapsackInstance> {
        let mut wc = weights.to_vec();
        wc.push(capacity);
        let (mut w, _) = integerize(&wc, MAX_INGEST)?;
        let cap = w.pop().unwrap_or(0);
        let (p, _) = integerize(profits, MAX_INGEST)?;
        KnapsackInstance::new(w, p, cap)
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != self.profits.len() {
            return input("weights and profits differ in length");
        }
        if self.weights.is_empty() {
            return input("instance has no items");
        }
        if self.weights.contains(&0) || self.profits.contains(&0) {
            return input("weights and profits must be strictly positive");
        }
        if self.capacity == 0 {
            return input("capacity must be positive");
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, s: &Solution) -> u64 {
        s.members().iter().map(|&i| self.weights[i]).sum()
    }

    pub fn profit(&self, s: &Solution) -> u64 {
        s.members().iter().map(|&i| self.profits[i]).sum()
    }

    pub fn fits(&self, s: &Solution) -> bool {
        self.weight(s) <= self.capacity
    }
}

impl Problem for KnapsackInstance {
    fn ground_size(&self) -> usize {
        self.n()
    }

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn evaluate(&self, s: &Solution) -> Option<f64> {
        self.fits(s).then(|| self.profit(s) as f64)
    }

    fn evaluate_mask(&self, mask: u32) -> Option<f64> {
        let (mut w, mut u) = (0u64, 0u64);
        for i in 0..self.n() {
            if mask >> i & 1 == 1 {
                w += self.weights[i];
                u += self.profits[i];
            }
        }
        (w <= self.capacity).then_some(u as f64)
    }
}

/// Adjusted profits and weights with their thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledInstance {
    pub profits: Vec<u64>,
    pub weights: Vec<u64>,
    pub u_threshold: u64,
    pub w_threshold: u64,
    pub reference: Solution,
    pub c: f64,
    pub delta: f64,
    pub gamma: f64,
}

pub(crate) fn unit_ratio(x: f64, name: &str, closed_top: bool) -> Result<Ratio> {
    let ok = if closed_top { x > 0.0 && x <= 1.0 } else { x > 0.0 && x < 1.0 };
    if !ok {
        return arg(format!("{name} = {x} is out of range"));
    }
    Ratio::from_decimal(x)
}

fn div_ceil(a: u128, b: u128) -> u128 {
    a.div_ceil(b)
}

/// `Ũ = ⌈(1-δ)n/δ⌉` for profits; shared with the planar and polygon scaling.
pub fn profit_threshold(n: usize, delta: f64) -> Result<u64> {
    profit_threshold_exact(n, unit_ratio(delta, "delta", false)?)
}

pub fn profit_threshold_exact(n: usize, d: Ratio) -> Result<u64> {
    if d.num == 0 || d.num >= d.den {
        return arg("delta must lie in (0, 1)");
    }
    Ok(div_ceil((d.den - d.num) as u128 * n as u128, d.num as u128) as u64)
}

/// `ũ_i = ⌊(Ũ+n)·u_i / (c·u(S))⌋`, computed exactly.
pub fn scale_profits(values: &[u64], reference_value: u64, c: f64, delta: f64) -> Result<(Vec<u64>, u64)> {
    scale_profits_exact(values, reference_value, unit_ratio(c, "c", true)?, unit_ratio(delta, "delta", false)?)
}

pub fn scale_profits_exact(values: &[u64], reference_value: u64, cr: Ratio, d: Ratio) -> Result<(Vec<u64>, u64)> {
    if reference_value == 0 {
        return arg("reference solution has zero value");
    }
    if cr.num == 0 || cr.num > cr.den {
        return arg("c must lie in (0, 1]");
    }
    let n = values.len();
    let ut = profit_threshold_exact(n, d)?;
    let num = (ut as u128 + n as u128) * cr.den as u128;
    let den = cr.num as u128 * reference_value as u128;
    let scaled = values
        .iter()
        .map(|&u| u64::try_from(num * u as u128 / den).map_err(|_| Error::TooLarge("scaled profit".into())))
        .collect::<Result<Vec<u64>>>()?;
    Ok((scaled, ut))
}

/// Profit and weight scaling around a feasible reference solution `s`.
///
/// Profits follow `ũ_i = ⌊(Ũ+n)u_i/(c·u(S))⌋` with `Ũ = ⌈(1-δ)n/δ⌉`.
/// Weights use `w̃_i = ⌈(W̃-n)w_i/W⌉` with `W̃ = ⌈(1+γ)n/γ⌉`, normalized by
/// the capacity so that every feasible set passes and anything passing
/// weighs at most `(1+γ)W`.
pub fn scale_instance(inst: &KnapsackInstance, s: &Solution, c: f64, delta: f64, gamma: f64) -> Result<ScaledInstance> {
    s.check(inst.n())?;
    if !inst.fits(s) {
        return arg("reference solution exceeds the capacity");
    }
    let (profits, u_threshold) = scale_profits(&inst.profits, inst.profit(s), c, delta)?;
    let g = unit_ratio(gamma, "gamma", false)?;
    let n = inst.n() as u128;
    let wt = div_ceil((g.den + g.num) as u128 * n, g.num as u128);
    let cap = inst.capacity as u128;
    let weights = inst
        .weights
        .iter()
        .map(|&w| {
            u64::try_from(div_ceil((wt - n) * w as u128, cap)).map_err(|_| Error::TooLarge("scaled weight".into()))
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(ScaledInstance { profits, weights, u_threshold, w_threshold: wt as u64, reference: s.clone(), c, delta, gamma })
}

/// A single solution with profit at least `(1-δ)` times optimal, by the
/// classical profit-scaling DP.
pub fn approx_single(inst: &KnapsackInstance, delta: f64) -> Result<Solution> {
    let d = unit_ratio(delta, "delta", false)?;
    let n = inst.n();
    let items: Vec<usize> = (0..n).filter(|&i| inst.weights[i] <= inst.capacity).collect();
    let Some(umax) = items.iter().map(|&i| inst.profits[i]).max() else {
        return Ok(Solution::empty());
    };
    // K = δ·umax/n; with K <= 1 the raw profits are already small enough.
    let exact = (d.num as u128) * (umax as u128) <= (n as u128) * (d.den as u128);
    let scaled: Vec<u64> = items
        .iter()
        .map(|&i| {
            let u = inst.profits[i] as u128;
            if exact {
                u as u64
            } else {
                (u * n as u128 * d.den as u128 / (d.num as u128 * umax as u128)) as u64
            }
        })
        .collect();
    let total: u64 = scaled.iter().sum();
    if total as usize > MAX_KBEST_CELLS {
        return too_large("profit table for the single-solution DP");
    }
    let width = total as usize + 1;
    // best[p] = min weight reaching scaled profit exactly p
    let mut best = vec![u64::MAX; width];
    best[0] = 0;
    let mut take = vec![vec![false; width]; items.len()];
    for (t, &i) in items.iter().enumerate() {
        let (w, p) = (inst.weights[i], scaled[t] as usize);
        for q in (p..width).rev() {
            if best[q - p] != u64::MAX && best[q - p] + w < best[q] {
                best[q] = best[q - p] + w;
                take[t][q] = true;
            }
        }
    }
    let mut q = (0..width).rev().find(|&q| best[q] <= inst.capacity).unwrap_or(0);
    let mut chosen = Vec::new();
    for t in (0..items.len()).rev() {
        if take[t][q] {
            chosen.push(items[t]);
            q -= scaled[t] as usize;
        }
    }
    Ok(Solution::new(chosen))
}

/// An integer knapsack as seen by the DPs: items, a weight budget and a
/// profit floor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkInstance {
    pub weights: Vec<u64>,
    pub profits: Vec<u64>,
    pub capacity: u64,
    pub floor: u64,
}

impl WorkInstance {
    pub fn raw(inst: &KnapsackInstance, floor: u64) -> WorkInstance {
        WorkInstance { weights: inst.weights.clone(), profits: inst.profits.clone(), capacity: inst.capacity, floor }
    }

    fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn admits(&self, s: &Solution) -> bool {
        let w: u64 = s.members().iter().map(|&i| self.weights[i]).sum();
        let u: u64 = s.members().iter().map(|&i| self.profits[i]).sum();
        w <= self.capacity && u >= self.floor
    }
}

struct ExactDp<'a> {
    inst: &'a WorkInstance,
    k: usize,
    pairs: Vec<(usize, usize)>,
    pref_w: Vec<u64>,
    pref_u: Vec<u64>,
    pair_index: Vec<Vec<usize>>,
    // reach[h][c]: best profit from items 0..h within weight c, when small
    reach: Option<Vec<Vec<u64>>>,
    memo: Vec<HashMap<Vec<u64>, (i64, u32)>>,
    states: usize,
    max_states: usize,
}

const NEG: i64 = i64::MIN / 4;

impl ExactDp<'_> {
    // state layout: [cap_0..cap_k, deficit_0..deficit_k, dist_0..dist_pairs]
    fn solve(&mut self, h: usize, state: Vec<u64>) -> Result<i64> {
        let k = self.k;
        if h == 0 {
            let done = state[k..].iter().all(|&x| x == 0);
            return Ok(if done { 0 } else { NEG });
        }
        if state[k..2 * k].iter().any(|&d| d > self.pref_u[h]) || state[2 * k..].iter().any(|&d| d > h as u64) {
            return Ok(NEG);
        }
        if let Some(reach) = &self.reach {
            if (0..k).any(|a| reach[h][state[a] as usize] < state[k + a]) {
                return Ok(NEG);
            }
        }
        let (state, _) = self.canonical(&state);
        if let Some(&(v, _)) = self.memo[h].get(&state) {
            return Ok(v);
        }
        self.states += 1;
        if self.states > self.max_states {
            return too_large(format!("exact diverse DP exceeded {} states", self.max_states));
        }
        let (w, u) = (self.inst.weights[h - 1], self.inst.profits[h - 1]);
        let mut best = (NEG, 0u32);
        for x in 0u32..(1 << k) {
            if (0..k).any(|a| x >> a & 1 == 1 && state[a] < w) {
                continue;
            }
            let mut next = state.clone();
            for a in 0..k {
                if x >> a & 1 == 1 {
                    next[a] -= w;
                    next[k + a] = next[k + a].saturating_sub(u);
                }
                next[a] = next[a].min(self.pref_w[h - 1]);
            }
            let mut gain = 0i64;
            for (p, &(a, b)) in self.pairs.iter().enumerate() {
                if (x >> a & 1) != (x >> b & 1) {
                    gain += 1;
                    next[2 * k + p] = next[2 * k + p].saturating_sub(1);
                }
            }
            let sub = self.solve(h - 1, next)?;
            if sub > NEG && gain + sub > best.0 {
                best = (gain + sub, x);
            }
        }
        self.memo[h].insert(state, best);
        Ok(best.0)
    }

    /// The solutions are interchangeable, so states are stored under the
    /// relabelling that sorts `(cap, deficit)` and, among ties, gives the
    /// smallest pair vector. Returns the state and `perm`, where canonical
    /// solution `a` is solution `perm[a]` of the input.
    fn canonical(&self, state: &[u64]) -> (Vec<u64>, Vec<usize>) {
        let k = self.k;
        let key = |a: usize| (state[a], state[k + a]);
        let mut perm: Vec<usize> = (0..k).collect();
        perm.sort_by_key(|&a| key(a));
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut lo = 0;
        for a in 1..=k {
            if a == k || key(perm[a]) != key(perm[lo]) {
                if a - lo > 1 {
                    groups.push((lo, a));
                }
                lo = a;
            }
        }
        let build = |perm: &[usize]| -> Vec<u64> {
            let mut out: Vec<u64> = perm.iter().map(|&a| state[a]).collect();
            out.extend(perm.iter().map(|&a| state[k + a]));
            out.extend(self.pairs.iter().map(|&(a, b)| state[2 * k + self.pair_index[perm[a]][perm[b]]]));
            out
        };
        if groups.is_empty() {
            return (build(&perm), perm);
        }
        // Walk every ordering inside the tie groups.
        let mut best = (build(&perm), perm.clone());
        let mut cur = perm;
        loop {
            let mut g = 0;
            loop {
                if g == groups.len() {
                    return best;
                }
                let (lo, hi) = groups[g];
                if next_permutation(&mut cur[lo..hi]) {
                    break;
                }
                g += 1;
            }
            let cand = build(&cur);
            if cand < best.0 {
                best = (cand, cur.clone());
            }
        }
    }

    fn next_state(&self, h: usize, state: &[u64], x: u32) -> Vec<u64> {
        let k = self.k;
        let (w, u) = (self.inst.weights[h - 1], self.inst.profits[h - 1]);
        let mut next = state.to_vec();
        for a in 0..k {
            if x >> a & 1 == 1 {
                next[a] -= w;
                next[k + a] = next[k + a].saturating_sub(u);
            }
            next[a] = next[a].min(self.pref_w[h - 1]);
        }
        for (p, &(a, b)) in self.pairs.iter().enumerate() {
            if (x >> a & 1) != (x >> b & 1) {
                next[2 * k + p] = next[2 * k + p].saturating_sub(1);
            }
        }
        next
    }
}

const MAX_REACH_CELLS: usize = 1 << 22;

fn reach_table(inst: &WorkInstance, cap: u64) -> Option<Vec<Vec<u64>>> {
    let n = inst.n();
    let width = usize::try_from(cap).ok()?.checked_add(1)?;
    if width.checked_mul(n + 1)? > MAX_REACH_CELLS {
        return None;
    }
    let mut table = vec![vec![0u64; width]];
    for h in 0..n {
        let prev = &table[h];
        let w = inst.weights[h] as usize;
        let next: Vec<u64> =
            (0..width).map(|c| if c >= w { prev[c].max(prev[c - w] + inst.profits[h]) } else { prev[c] }).collect();
        table.push(next);
    }
    Some(table)
}

/// Rearranges `v` into the next lexicographic permutation; false (and `v`
/// reset to ascending order) after the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        v.reverse();
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `k` solutions of weight `<= capacity` and profit `>= floor` maximizing the
/// diversity sum, subject to every pairwise distance being at least `d_min`.
///
/// The DP runs over items with per-solution remaining capacity, per-solution
/// profit deficit and per-pair distance deficit, the deficits clamped at
/// zero; each step tries all `2^k` inclusion vectors. Returns
/// [`Error::Infeasible`] when no such collection exists.
pub fn exact_diverse(inst: &WorkInstance, k: usize, d_min: usize) -> Result<(u64, SolutionCollection)> {
    exact_diverse_capped(inst, k, d_min, MAX_EXACT_STATES)
}

/// [`exact_diverse`] giving up with [`Error::TooLarge`] after `max_states`
/// memo entries.
pub fn exact_diverse_capped(
    inst: &WorkInstance,
    k: usize,
    d_min: usize,
    max_states: usize,
) -> Result<(u64, SolutionCollection)> {
    if k == 0 || k > 16 {
        return arg("exact diverse DP supports 1 <= k <= 16");
    }
    let n = inst.n();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
    let mut pref_w = vec![0u64; n + 1];
    let mut pref_u = vec![0u64; n + 1];
    for i in 0..n {
        pref_w[i + 1] = pref_w[i] + inst.weights[i];
        pref_u[i + 1] = pref_u[i] + inst.profits[i];
    }
    let mut start = vec![inst.capacity.min(pref_w[n]); k];
    start.extend(std::iter::repeat_n(inst.floor, k));
    start.extend(std::iter::repeat_n(d_min as u64, pairs.len()));
    let mut pair_index = vec![vec![0; k]; k];
    for (p, &(a, b)) in pairs.iter().enumerate() {
        pair_index[a][b] = p;
        pair_index[b][a] = p;
    }
    let memo = vec![HashMap::new(); n + 1];
    let reach = reach_table(inst, start[0]);
    let mut dp = ExactDp { inst, k, pairs, pref_w, pref_u, pair_index, reach, memo, states: 0, max_states };
    let value = dp.solve(n, start.clone())?;
    if value <= NEG {
        return Err(Error::Infeasible(format!("no {k} solutions meet the profit floor and distance {d_min}")));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut state = start;
    for h in (1..=n).rev() {
        let (key, perm) = dp.canonical(&state);
        let (_, xc) = dp.memo[h][&key];
        let mut x = 0u32;
        for (a, &orig) in perm.iter().enumerate() {
            if xc >> a & 1 == 1 {
                members[orig].push(h - 1);
                x |= 1 << orig;
            }
        }
        state = dp.next_state(h, &state, x);
    }
    let mut sols: Vec<Solution> = members.into_iter().map(Solution::new).collect();
    sols.sort();
    let col = SolutionCollection::multiset(sols)?;
    let col = if col.has_repeats() { col } else { SolutionCollection::distinct(col.into_solutions())? };
    Ok((value as u64, col))
}

#[derive(Clone, Copy)]
struct Entry {
    weight: u64,
    prev: u32,
    rank: u8,
    took: bool,
}

/// The `k` distinct solutions of weight `<= capacity` and profit `>= floor`
/// with the largest score totals.
///
/// `DP[h][U'][R']` keeps the `k` smallest weights over items `0..h` with
/// profit `>= U'` (clamped at the floor) and score exactly `R'` (stored at
/// `R' + Σ|r|`). Each entry remembers its predecessor, so equal-weight,
/// equal-score but different sets are kept apart.
pub fn kbest_bcbe(inst: &WorkInstance, k: usize, score: &ScoreFunction) -> Result<BcbeResult> {
    if k == 0 || k > 255 {
        return arg("k-best DP supports 1 <= k <= 255");
    }
    let n = inst.n();
    if score.len() != n {
        return arg("score length does not match the item count");
    }
    let off = score.abs_total();
    let nr = (2 * off + 1) as usize;
    let np = inst.floor as usize + 1;
    let cells = nr.checked_mul(np).filter(|&c| c <= MAX_KBEST_CELLS);
    let Some(cells) = cells else {
        return too_large("k-best knapsack table");
    };
    let idx = |p: usize, r: i64| p * nr + (r + off) as usize;
    let mut layers: Vec<Vec<Vec<Entry>>> = Vec::with_capacity(n + 1);
    let mut first = vec![Vec::new(); cells];
    first[idx(0, 0)].push(Entry { weight: 0, prev: u32::MAX, rank: 0, took: false });
    layers.push(first);
    for h in 0..n {
        let (w, u, r) = (inst.weights[h], inst.profits[h], score.get(h));
        let prev = &layers[h];
        let mut next: Vec<Vec<Entry>> = vec![Vec::new(); cells];
        for (cell, entries) in prev.iter().enumerate() {
            if entries.is_empty() {
                continue;
            }
            let p = cell / nr;
            let rr = (cell % nr) as i64 - off;
            let taken = idx((p as u64 + u).min(inst.floor) as usize, rr + r);
            for (rank, e) in entries.iter().enumerate() {
                next[cell].push(Entry { weight: e.weight, prev: cell as u32, rank: rank as u8, took: false });
                if e.weight + w <= inst.capacity {
                    next[taken].push(Entry { weight: e.weight + w, prev: cell as u32, rank: rank as u8, took: true });
                }
            }
        }
        for list in next.iter_mut() {
            if list.len() > k {
                list.sort_by_key(|e| (e.weight, e.prev, e.rank, e.took));
                list.truncate(k);
            } else {
                list.sort_by_key(|e| (e.weight, e.prev, e.rank, e.took));
            }
        }
        layers.push(next);
    }
    let top = &layers[n];
    let mut cands: Vec<(i64, Solution)> = Vec::new();
    for rr in (-off..=off).rev() {
        if cands.len() >= k {
            break;
        }
        let cell = idx(inst.floor as usize, rr);
        for rank in 0..top[cell].len() {
            let mut members = Vec::new();
            let (mut c, mut q) = (cell, rank);
            for h in (1..=n).rev() {
                let e = layers[h][c][q];
                if e.took {
                    members.push(h - 1);
                }
                c = e.prev as usize;
                q = e.rank as usize;
            }
            cands.push((rr, Solution::new(members)));
        }
    }
    Ok(BcbeResult::from_candidates(cands, k))
}

/// [`kbest_bcbe`] as a backend for the local search.
pub struct KnapsackBackend {
    pub inst: WorkInstance,
}

impl BcbeBackend for KnapsackBackend {
    fn ground_size(&self) -> usize {
        self.inst.n()
    }

    fn kbest(&self, score: &ScoreFunction, k: usize) -> Result<BcbeResult> {
        kbest_bcbe(&self.inst, k, score)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    LocalSearch,
    Auto,
}

/// Whether the weight axis uses raw weights (budget `W`) or the adjusted
/// weights (budget `W̃`, output weight at most `(1+γ)W`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    Exact,
    Ptas,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiverseKnapsackParams {
    pub k: usize,
    pub c: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub d_min: usize,
    pub mode: Mode,
    pub weight_mode: WeightMode,
}

impl DiverseKnapsackParams {
    pub fn new(k: usize, c: f64, delta: f64, epsilon: f64) -> DiverseKnapsackParams {
        DiverseKnapsackParams {
            k,
            c,
            delta,
            epsilon,
            gamma: 0.5,
            d_min: 1,
            mode: Mode::Auto,
            weight_mode: WeightMode::Exact,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return arg("k must be at least 1");
        }
        unit_ratio(self.c, "c", true)?;
        for (v, name) in [(self.delta, "delta"), (self.epsilon, "epsilon"), (self.gamma, "gamma")] {
            unit_ratio(v, name, false)?;
        }
        Ok(())
    }

    /// `k <= 2/ε`, the condition for the exact branch under `Mode::Auto`.
    pub fn small_k(&self) -> bool {
        self.k as f64 <= 2.0 / self.epsilon + 1e-9
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackOutcome {
    pub collection: SolutionCollection,
    /// No item fits; the collection is `k` empty packings.
    pub empty_warning: bool,
    pub used_exact: bool,
    pub reference: Solution,
    pub scaled: Option<ScaledInstance>,
}

/// The full pipeline: a `(1-δ/2)`-approximate reference, scaling, then the
/// exact DP when `k <= 2/ε` (or as forced by `mode`) and local search over
/// the k-best DP otherwise. Falls back to a multiset when fewer than `k`
/// distinct qualifying solutions exist.
pub fn diverse_knapsack(inst: &KnapsackInstance, params: &DiverseKnapsackParams) -> Result<KnapsackOutcome> {
    inst.validate()?;
    params.validate()?;
    let k = params.k;
    if inst.weights.iter().all(|&w| w > inst.capacity) {
        return Ok(KnapsackOutcome {
            collection: SolutionCollection::multiset(vec![Solution::empty(); k])?,
            empty_warning: true,
            used_exact: false,
            reference: Solution::empty(),
            scaled: None,
        });
    }
    let delta = params.delta / 2.0;
    let reference = approx_single(inst, delta)?;
    let scaled = scale_instance(inst, &reference, params.c, delta, params.gamma)?;
    let work = match params.weight_mode {
        WeightMode::Exact => WorkInstance {
            weights: inst.weights.clone(),
            profits: scaled.profits.clone(),
            capacity: inst.capacity,
            floor: scaled.u_threshold,
        },
        WeightMode::Ptas => WorkInstance {
            weights: scaled.weights.clone(),
            profits: scaled.profits.clone(),
            capacity: scaled.w_threshold,
            floor: scaled.u_threshold,
        },
    };
    let use_exact = match params.mode {
        Mode::Exact => true,
        Mode::LocalSearch => false,
        Mode::Auto => params.small_k(),
    };
    let budget = if params.mode == Mode::Auto { AUTO_EXACT_STATES } else { MAX_EXACT_STATES };
    let mut exact = None;
    if use_exact {
        let mut tries = vec![params.d_min.max(1), 1, 0];
        tries.dedup();
        for d in tries {
            match exact_diverse_capped(&work, k, d, budget) {
                Ok((_, c)) => {
                    exact = Some(c);
                    break;
                }
                Err(Error::Infeasible(_)) => continue,
                // Auto hands oversized tables to the local search.
                Err(Error::TooLarge(_)) if params.mode == Mode::Auto => break,
                Err(e) => return Err(e),
            }
        }
        if exact.is_none() && params.mode == Mode::Exact {
            return Err(Error::Infeasible("no qualifying packing".into()));
        }
    }
    let used_exact = exact.is_some();
    let collection = match exact {
        Some(c) => c,
        None => run_local_search(&KnapsackBackend { inst: work }, k)?,
    };
    Ok(KnapsackOutcome { collection, empty_warning: false, used_exact, reference, scaled: Some(scaled) })
}

/// Multiset fallback used by callers that hold an explicit pool.
pub fn farthest_insertion(pool: Vec<Solution>, k: usize) -> Result<SolutionCollection> {
    pad_farthest(pool, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::diversity_sum;

    fn i2() -> KnapsackInstance {
        KnapsackInstance::new(vec![2, 2, 4, 4], vec![4, 4, 16, 16], 6).unwrap()
    }

    #[test]
    fn scaling_examples() {
        let inst = KnapsackInstance::new(vec![1, 1], vec![1, 1], 1).unwrap();
        let s = scale_instance(&inst, &Solution::new([0]), 1.0, 0.5, 0.5).unwrap();
        assert_eq!(s.u_threshold, 2);
        assert_eq!(s.profits, vec![4, 4]);
        assert_eq!(s.w_threshold, 6);
        assert_eq!(s.weights, vec![4, 4]);
        assert_eq!(profit_threshold(1, 0.9).unwrap(), 1);
        assert!(scale_instance(&inst, &Solution::new([0, 1]), 1.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn exact_examples() {
        let tiny = WorkInstance { weights: vec![1, 1], profits: vec![1, 1], capacity: 1, floor: 1 };
        let (v, c) = exact_diverse(&tiny, 2, 1).unwrap();
        assert_eq!(v, 2);
        assert_eq!(c.solutions(), &[Solution::new([0]), Solution::new([1])][..]);
        let w = WorkInstance::raw(&i2(), 20);
        assert_eq!(exact_diverse(&w, 2, 4).unwrap().0, 4);
        let w = WorkInstance::raw(&i2(), 21);
        assert!(matches!(exact_diverse(&w, 1, 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn kbest_examples() {
        let tiny = WorkInstance { weights: vec![1, 1], profits: vec![1, 1], capacity: 1, floor: 1 };
        let r = kbest_bcbe(&tiny, 1, &ScoreFunction::new(vec![1, -1], 2)).unwrap();
        assert_eq!(r.solutions, vec![Solution::new([0])]);
        assert_eq!(r.scores, vec![1]);
        let w = WorkInstance::raw(&i2(), 20);
        let r = kbest_bcbe(&w, 4, &ScoreFunction::new(vec![1; 4], 2)).unwrap();
        assert_eq!(r.scores, vec![2; 4]);
        assert!(!r.exhausted);
        let r = kbest_bcbe(&w, 1, &ScoreFunction::new(vec![1, -1, 1, -1], 2)).unwrap();
        assert_eq!(r.solutions, vec![Solution::new([0, 2])]);
        assert_eq!(r.scores, vec![2]);
        let r = kbest_bcbe(&w, 5, &ScoreFunction::zero(4)).unwrap();
        assert!(r.exhausted);
        assert_eq!(r.len(), 4);
    }

    #[test]
    fn pipeline_examples() {
        let tiny = KnapsackInstance::new(vec![1, 1], vec![1, 1], 1).unwrap();
        let out = diverse_knapsack(&tiny, &DiverseKnapsackParams::new(2, 1.0, 0.2, 0.5)).unwrap();
        assert_eq!(diversity_sum(&out.collection), 2);
        let out = diverse_knapsack(&i2(), &DiverseKnapsackParams::new(4, 1.0, 0.1, 0.5)).unwrap();
        assert!(out.used_exact);
        assert_eq!(diversity_sum(&out.collection), 16);
        let out = diverse_knapsack(&i2(), &DiverseKnapsackParams::new(2, 1.0, 0.1, 0.9)).unwrap();
        assert_eq!(diversity_sum(&out.collection), 4);
    }

    #[test]
    fn nothing_fits() {
        let inst = KnapsackInstance::new(vec![5, 6], vec![1, 1], 4).unwrap();
        let out = diverse_knapsack(&inst, &DiverseKnapsackParams::new(3, 1.0, 0.2, 0.5)).unwrap();
        assert!(out.empty_warning);
        assert_eq!(out.collection.k(), 3);
        assert!(out.collection.solutions().iter().all(Solution::is_empty));
    }

    #[test]
    fn fractional_ingest() {
        let r = |x: f64| Ratio::from_decimal(x).unwrap();
        let inst = KnapsackInstance::from_ratios(&[r(0.5), r(1.0)], &[r(1.5), r(2.0)], r(1.25)).unwrap();
        assert_eq!(inst.weights, vec![2, 4]);
        assert_eq!(inst.capacity, 5);
        assert_eq!(inst.profits, vec![3, 4]);
    }
}
