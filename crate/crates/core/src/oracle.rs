//! Exhaustive reference implementations for small instances.
//!
//! Everything here is deliberately exponential and guarded by hard caps so a
//! misconfigured test fails fast instead of hanging.

use crate::error::{arg, too_large, Result};
use crate::framework::{BcbeBackend, BcbeResult, ScoreFunction, Solution, SolutionCollection};
use crate::numeric::{ge_tol, le_tol};

/// Largest ground set [`enumerate_feasible`] will scan.
pub const MAX_ENUM_N: usize = 24;
/// Largest number of k-subsets the diversity oracles will visit.
pub const MAX_COMBINATIONS: u128 = 10_000_000;
/// Largest space accepted by [`max_mutual_distance_set`].
pub const MAX_CLIQUE_SPACE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// A problem the oracle can enumerate: a ground set plus a quality function
/// that is `None` on infeasible subsets.
pub trait Problem {
    fn ground_size(&self) -> usize;
    fn sense(&self) -> Sense;
    fn evaluate(&self, s: &Solution) -> Option<f64>;

    /// Same as [`Problem::evaluate`] on the subset encoded by `mask`.
    fn evaluate_mask(&self, mask: u32) -> Option<f64> {
        self.evaluate(&mask_solution(mask))
    }
}

fn mask_solution(mask: u32) -> Solution {
    Solution::new((0..32).filter(|b| mask >> b & 1 == 1))
}

/// An explicit list of distinct solutions and their qualities.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSpace {
    n: usize,
    solutions: Vec<Solution>,
    qualities: Vec<f64>,
}

impl FeasibleSpace {
    /// Build from parallel lists; duplicates are dropped and the result is
    /// sorted canonically.
    pub fn new(n: usize, solutions: Vec<Solution>, qualities: Vec<f64>) -> Result<FeasibleSpace> {
        if solutions.len() != qualities.len() {
            return arg("solutions and qualities differ in length");
        }
        for s in &solutions {
            s.check(n)?;
        }
        let mut pairs: Vec<(Solution, f64)> = solutions.into_iter().zip(qualities).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        pairs.dedup_by(|a, b| a.0 == b.0);
        let (solutions, qualities) = pairs.into_iter().unzip();
        Ok(FeasibleSpace { n, solutions, qualities })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn solutions(&self) -> &[Solution] {
        &self.solutions
    }

    pub fn qualities(&self) -> &[f64] {
        &self.qualities
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn contains(&self, s: &Solution) -> bool {
        self.solutions.binary_search(s).is_ok()
    }

    /// Keep the solutions accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&Solution, f64) -> bool) -> FeasibleSpace {
        let mut out = FeasibleSpace { n: self.n, solutions: vec![], qualities: vec![] };
        for (s, &q) in self.solutions.iter().zip(&self.qualities) {
            if keep(s, q) {
                out.solutions.push(s.clone());
                out.qualities.push(q);
            }
        }
        out
    }
}

impl BcbeBackend for FeasibleSpace {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn kbest(&self, score: &ScoreFunction, k: usize) -> Result<BcbeResult> {
        Ok(kbest_bruteforce(self, score, k))
    }
}

/// Every feasible solution, with its quality.
pub fn enumerate_all<P: Problem + ?Sized>(p: &P) -> Result<FeasibleSpace> {
    let n = p.ground_size();
    if n > MAX_ENUM_N {
        return too_large(format!("oracle enumeration is limited to n <= {MAX_ENUM_N}, got {n}"));
    }
    let mut sols = Vec::new();
    let mut quals = Vec::new();
    for mask in 0..(1u32 << n) {
        if let Some(q) = p.evaluate_mask(mask) {
            sols.push(mask_solution(mask));
            quals.push(q);
        }
    }
    FeasibleSpace::new(n, sols, quals)
}

/// The c-optimal feasible solutions: quality `>= c·OPT` when maximizing,
/// `<= OPT/c` when minimizing.
pub fn enumerate_feasible<P: Problem + ?Sized>(p: &P, c: f64) -> Result<FeasibleSpace> {
    if !(c > 0.0 && c <= 1.0) {
        return arg(format!("niceness c must lie in (0, 1], got {c}"));
    }
    let all = enumerate_all(p)?;
    let qs = all.qualities();
    if qs.is_empty() {
        return Ok(all);
    }
    Ok(match p.sense() {
        Sense::Maximize => {
            let opt = qs.iter().cloned().fold(f64::MIN, f64::max);
            all.filter(|_, q| ge_tol(q, c * opt))
        }
        Sense::Minimize => {
            let opt = qs.iter().cloned().fold(f64::MAX, f64::min);
            all.filter(|_, q| le_tol(q, opt / c))
        }
    })
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
        if r > u64::MAX as u128 {
            return r;
        }
    }
    r
}

fn distance_matrix(space: &FeasibleSpace) -> Vec<Vec<u64>> {
    let s = space.solutions();
    (0..s.len()).map(|a| (0..s.len()).map(|b| s[a].sym_diff(&s[b]) as u64).collect()).collect()
}

struct Search<'a> {
    dist: &'a [Vec<u64>],
    k: usize,
    repeat: bool,
    d_min: u64,
    pick: Vec<usize>,
    best: Option<(u64, Vec<usize>)>,
}

impl Search<'_> {
    fn run(&mut self, start: usize, value: u64) {
        if self.pick.len() == self.k {
            if self.best.as_ref().is_none_or(|b| value > b.0) {
                self.best = Some((value, self.pick.clone()));
            }
            return;
        }
        let m = self.dist.len();
        for a in start..m {
            if self.pick.iter().any(|&b| self.dist[a][b] < self.d_min) {
                continue;
            }
            let add: u64 = self.pick.iter().map(|&b| self.dist[a][b]).sum();
            self.pick.push(a);
            self.run(if self.repeat { a } else { a + 1 }, value + add);
            self.pick.pop();
        }
    }
}

/// Exact maximum of the diversity sum over `k` distinct members of `space`,
/// or over multisets when the space has fewer than `k` members.
pub fn opt_div_bruteforce(space: &FeasibleSpace, k: usize) -> Result<(u64, SolutionCollection)> {
    if k == 0 || space.is_empty() {
        return arg("need k >= 1 and a nonempty space");
    }
    let m = space.len();
    let repeat = m < k;
    let count = if repeat { binomial((m + k - 1) as u128, k as u128) } else { binomial(m as u128, k as u128) };
    if count > MAX_COMBINATIONS {
        return too_large(format!("{count} candidate collections exceed the oracle cap"));
    }
    let dist = distance_matrix(space);
    let mut s = Search { dist: &dist, k, repeat, d_min: 0, pick: vec![], best: None };
    s.run(0, 0);
    let (v, pick) = s.best.expect("nonempty space has a collection");
    let sols = pick.into_iter().map(|i| space.solutions()[i].clone()).collect();
    Ok((v, SolutionCollection::new(sols, repeat)?))
}

/// Exact maximum of the diversity sum over multisets of `k` members of
/// `space` whose pairwise distances are all at least `d_min`. With
/// `d_min >= 1` the members are necessarily distinct. `None` when no such
/// collection exists.
pub fn opt_div_min_distance(
    space: &FeasibleSpace,
    k: usize,
    d_min: usize,
) -> Result<Option<(u64, SolutionCollection)>> {
    if k == 0 {
        return arg("k must be at least 1");
    }
    let m = space.len();
    if m == 0 {
        return Ok(None);
    }
    let count = binomial((m + k - 1) as u128, k as u128);
    if count > MAX_COMBINATIONS {
        return too_large(format!("{count} candidate collections exceed the oracle cap"));
    }
    let dist = distance_matrix(space);
    let mut s = Search { dist: &dist, k, repeat: d_min == 0, d_min: d_min as u64, pick: vec![], best: None };
    s.run(0, 0);
    match s.best {
        None => Ok(None),
        Some((v, pick)) => {
            let sols = pick.into_iter().map(|i| space.solutions()[i].clone()).collect();
            Ok(Some((v, SolutionCollection::multiset(sols)?)))
        }
    }
}

/// Sort the space by score (descending, canonical order on ties) and take `k`.
pub fn kbest_bruteforce(space: &FeasibleSpace, score: &ScoreFunction, k: usize) -> BcbeResult {
    let cands = space.solutions().iter().map(|s| (score.total(s), s.clone())).collect();
    BcbeResult::from_candidates(cands, k)
}

struct Clique<'a> {
    adj: &'a [Vec<bool>],
    best: usize,
    target: usize,
}

impl Clique<'_> {
    /// Greedy colouring of `cand`; returns vertices ordered by colour and
    /// the colour bound for each.
    fn colour(&self, cand: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in cand {
            match classes.iter_mut().find(|cl| cl.iter().all(|&u| !self.adj[u][v])) {
                Some(cl) => cl.push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut order = Vec::with_capacity(cand.len());
        let mut bound = Vec::with_capacity(cand.len());
        for (c, cl) in classes.iter().enumerate() {
            for &v in cl {
                order.push(v);
                bound.push(c + 1);
            }
        }
        (order, bound)
    }

    fn expand(&mut self, size: usize, cand: Vec<usize>) {
        if self.best >= self.target {
            return;
        }
        if cand.is_empty() {
            self.best = self.best.max(size);
            return;
        }
        let (order, bound) = self.colour(&cand);
        let mut live: Vec<bool> = vec![true; order.len()];
        for idx in (0..order.len()).rev() {
            if size + bound[idx] <= self.best || self.best >= self.target {
                return;
            }
            let v = order[idx];
            let next: Vec<usize> = (0..idx).filter(|&j| live[j] && self.adj[v][order[j]]).map(|j| order[j]).collect();
            self.expand(size + 1, next);
            live[idx] = false;
        }
    }
}

fn clique_search(space: &FeasibleSpace, d: usize, target: usize, cap: usize) -> Result<usize> {
    let m = space.len();
    if m > cap {
        return too_large(format!("clique oracle is limited to {cap} solutions, got {m}"));
    }
    let s = space.solutions();
    let adj: Vec<Vec<bool>> = (0..m).map(|a| (0..m).map(|b| a != b && s[a].sym_diff(&s[b]) >= d).collect()).collect();
    let mut c = Clique { adj: &adj, best: 0, target };
    c.expand(0, (0..m).collect());
    Ok(c.best)
}

/// Size of the largest subset of `space` with all pairwise distances `>= d`.
pub fn max_mutual_distance_set(space: &FeasibleSpace, d: usize) -> Result<usize> {
    clique_search(space, d, usize::MAX, MAX_CLIQUE_SPACE)
}

/// Whether `g` members of `space` with pairwise distances `>= d` exist.
pub fn has_mutual_distance_set(space: &FeasibleSpace, d: usize, g: usize) -> Result<bool> {
    has_mutual_distance_set_capped(space, d, g, MAX_CLIQUE_SPACE)
}

/// [`has_mutual_distance_set`] with a caller-chosen space cap.
pub fn has_mutual_distance_set_capped(space: &FeasibleSpace, d: usize, g: usize, cap: usize) -> Result<bool> {
    Ok(clique_search(space, d, g, cap)? >= g)
}
