//! Binary codes from diverse optimal solutions.
//!
//! The optimal packings of a doubled-item knapsack, and the minimum s–t cuts
//! of a two-edge-per-vertex graph, are both in bijection with `{0,1}^n`, and
//! their symmetric differences are twice the Hamming distance. Finding many
//! optimal solutions at pairwise distance `2d` is therefore finding a binary
//! code with minimum distance `d`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::framework::Solution;
use crate::knapsack::KnapsackInstance;
use crate::oracle::{enumerate_feasible, has_mutual_distance_set_capped, FeasibleSpace, Problem, Sense};

/// Largest item-pair count [`build_knapsack_instance`] accepts.
pub const MAX_KNAPSACK_N: usize = 20;
/// Largest code length the oracle-backed routes accept.
pub const MAX_ORACLE_N: usize = 12;

/// Items `2i` and `2i+1` (0-based pair `i`) both weigh `2^(i+1)` and are
/// worth `4^(i+1)`; the capacity is `2^(n+1) - 2`.
pub fn build_knapsack_instance(n: usize) -> Result<KnapsackInstance> {
    if n == 0 || n > MAX_KNAPSACK_N {
        return arg(format!("code length must lie in 1..={MAX_KNAPSACK_N}, got {n}"));
    }
    let mut weights = Vec::with_capacity(2 * n);
    let mut values = Vec::with_capacity(2 * n);
    for i in 1..=n as u32 {
        weights.extend([1u64 << i; 2]);
        values.extend([1u64 << (2 * i); 2]);
    }
    KnapsackInstance::new(weights, values, (1u64 << (n + 1)) - 2)
}

fn optimal_packing_value(n: usize) -> u64 {
    (1..=n as u32).map(|i| 1u64 << (2 * i)).sum()
}

/// Codeword of an optimal packing: bit `i` is `0` iff item `2i` is packed.
pub fn decode_packing(n: usize, packing: &Solution) -> Result<String> {
    let inst = build_knapsack_instance(n)?;
    packing.check(2 * n)?;
    if !inst.fits(packing) || inst.profit(packing) != optimal_packing_value(n) {
        return Err(Error::Input("packing is not optimal".into()));
    }
    pairs_to_word(n, packing)
}

fn pairs_to_word(n: usize, s: &Solution) -> Result<String> {
    (0..n)
        .map(|i| match (s.contains(2 * i), s.contains(2 * i + 1)) {
            (true, false) => Ok('0'),
            (false, true) => Ok('1'),
            _ => Err(Error::Input(format!("pair {i} must contribute exactly one element"))),
        })
        .collect()
}

/// Packing (or cut) for a codeword; inverse of [`decode_packing`].
pub fn encode_word(word: &str) -> Result<Solution> {
    word.chars()
        .enumerate()
        .map(|(i, b)| match b {
            '0' => Ok(2 * i),
            '1' => Ok(2 * i + 1),
            _ => arg(format!("codeword symbol {b:?} is not a bit")),
        })
        .collect()
}

pub fn hamming(a: &str, b: &str) -> usize {
    a.chars().zip(b.chars()).filter(|(x, y)| x != y).count()
}

/// Source `s = 0`, sink `t = n + 1`, middle vertices `1..=n`. Edge `2(i-1)`
/// is `s → i` and edge `2(i-1) + 1` is `i → t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutGraph {
    n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl CutGraph {
    pub fn source(&self) -> usize {
        0
    }

    pub fn sink(&self) -> usize {
        self.n + 1
    }

    pub fn vertex_count(&self) -> usize {
        self.n + 2
    }

    /// Whether removing the edge set disconnects the sink from the source.
    pub fn is_cut(&self, removed: &Solution) -> bool {
        let mut reached = vec![false; self.vertex_count()];
        reached[self.source()] = true;
        let mut stack = vec![self.source()];
        while let Some(v) = stack.pop() {
            for (e, &(a, b)) in self.edges.iter().enumerate() {
                if a == v && !reached[b] && !removed.contains(e) {
                    reached[b] = true;
                    stack.push(b);
                }
            }
        }
        !reached[self.sink()]
    }
}

pub fn build_cut_graph(n: usize) -> Result<CutGraph> {
    if n == 0 {
        return arg("code length must be positive");
    }
    let edges = (1..=n).flat_map(|i| [(0, i), (i, n + 1)]).collect();
    Ok(CutGraph { n, edges })
}

/// s–t cuts as edge subsets, minimizing their size.
impl Problem for CutGraph {
    fn ground_size(&self) -> usize {
        self.edges.len()
    }

    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn evaluate(&self, s: &Solution) -> Option<f64> {
        self.is_cut(s).then(|| s.len() as f64)
    }
}

/// Codeword of a minimum cut: bit `i` is `0` iff edge `s → i+1` is cut.
pub fn decode_cut(g: &CutGraph, cut: &Solution) -> Result<String> {
    cut.check(g.edges.len())?;
    if !g.is_cut(cut) || cut.len() != g.n {
        return Err(Error::Input("edge set is not a minimum cut".into()));
    }
    pairs_to_word(g.n, cut)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Knapsack,
    Cut,
    Direct,
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Route> {
        match s {
            "knapsack" => Ok(Route::Knapsack),
            "cut" => Ok(Route::Cut),
            "direct" => Ok(Route::Direct),
            _ => arg(format!("unknown route {s:?}; expected knapsack, cut or direct")),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Knapsack => "knapsack",
            Route::Cut => "cut",
            Route::Direct => "direct",
        })
    }
}

/// `2⌊d/(2d-n)⌋`, valid when `2d > n`.
pub fn plotkin_bound(n: usize, d: usize) -> usize {
    2 * (d / (2 * d - n))
}

fn check_regime(n: usize, d: usize) -> Result<()> {
    if n == 0 || d > n || 2 * d <= n {
        return arg(format!("need n/2 < d <= n, got n={n}, d={d}"));
    }
    Ok(())
}

/// Largest `g` in `[1, plotkin]` for which `query(g)` holds; `query` must
/// be monotone and true at 1.
fn search_g(n: usize, d: usize, mut query: impl FnMut(usize) -> Result<bool>) -> Result<usize> {
    let (mut lo, mut hi) = (1, plotkin_bound(n, d).max(1));
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if query(mid)? {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

fn oracle_route(n: usize, d: usize, space: FeasibleSpace) -> Result<usize> {
    let cap = 1usize << n;
    if space.len() != cap {
        return Err(Error::Backend(format!("expected {cap} optimal solutions, found {}", space.len())));
    }
    search_g(n, d, |g| has_mutual_distance_set_capped(&space, 2 * d, g, cap))
}

/// Optimal packings of [`build_knapsack_instance`].
pub fn optimal_packings(n: usize) -> Result<FeasibleSpace> {
    enumerate_feasible(&build_knapsack_instance(n)?, 1.0)
}

/// Minimum cuts of [`build_cut_graph`].
pub fn minimum_cuts(n: usize) -> Result<FeasibleSpace> {
    enumerate_feasible(&build_cut_graph(n)?, 1.0)
}

/// `A₂(n, d)`, the largest binary code of length `n` and minimum distance
/// `d`, for `n/2 < d <= n`.
pub fn a2(n: usize, d: usize, route: Route) -> Result<usize> {
    check_regime(n, d)?;
    if route != Route::Direct && n > MAX_ORACLE_N {
        return arg(format!("oracle routes are limited to n <= {MAX_ORACLE_N}"));
    }
    match route {
        Route::Knapsack => oracle_route(n, d, optimal_packings(n)?),
        Route::Cut => oracle_route(n, d, minimum_cuts(n)?),
        Route::Direct => Ok(direct_search(n, d)),
    }
}

/// Exhaustive branch and bound over codewords as integers. Codes are
/// translation invariant, so the zero word is fixed.
fn direct_search(n: usize, d: usize) -> usize {
    fn grow(cand: &[u32], d: u32, size: usize, best: &mut usize) {
        if size + cand.len() <= *best {
            return;
        }
        if cand.is_empty() {
            *best = size;
            return;
        }
        for (i, &w) in cand.iter().enumerate() {
            if size + cand.len() - i <= *best {
                return;
            }
            let next: Vec<u32> = cand[i + 1..].iter().copied().filter(|&x| (x ^ w).count_ones() >= d).collect();
            grow(&next, d, size + 1, best);
        }
    }
    let d = d as u32;
    let cand: Vec<u32> = (1u32..1 << n).filter(|&x| x.count_ones() >= d).collect();
    let mut best = 1;
    grow(&cand, d, 1, &mut best);
    best
}
