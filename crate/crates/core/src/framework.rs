//! Problem-agnostic types, diversity measures and the swap local search.
//!
//! A backend only has to answer one question: "give me the `k` best
//! quality-feasible solutions for this per-element score". The local search
//! turns that into a collection whose diversity is within `1 - 2/(k+1)` of
//! the best collection in the backend's space.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};

/// Elements `0..n`, optionally labelled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSet {
    n: usize,
    labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<GroundSet> {
        if n == 0 {
            return arg("ground set must be nonempty");
        }
        Ok(GroundSet { n, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<GroundSet> {
        let mut g = GroundSet::new(labels.len())?;
        g.labels = Some(labels);
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn label(&self, e: usize) -> Option<&str> {
        self.labels.as_ref().and_then(|l| l.get(e)).map(String::as_str)
    }
}

/// A subset of the ground set, kept sorted and duplicate-free so that
/// equality and ordering are structural.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Solution {
    members: Vec<usize>,
}

impl Solution {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Solution {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Solution { members }
    }

    pub fn empty() -> Solution {
        Solution::default()
    }

    pub fn from_mask(mask: &[bool]) -> Solution {
        Solution { members: mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect() }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.members.binary_search(&e).is_ok()
    }

    pub fn to_mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &e in &self.members {
            m[e] = true;
        }
        m
    }

    /// `|self Δ other|` by a merge of the two sorted lists.
    pub fn sym_diff(&self, other: &Solution) -> usize {
        let (a, b) = (&self.members, &other.members);
        let (mut i, mut j, mut common) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    common += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        a.len() + b.len() - 2 * common
    }

    pub fn check(&self, n: usize) -> Result<()> {
        match self.members.last() {
            Some(&e) if e >= n => arg(format!("element {e} outside ground set of size {n}")),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for Solution {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Solution::new(iter)
    }
}

/// An ordered list of `k` solutions with a cached distance matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionCollection {
    solutions: Vec<Solution>,
    allow_multiset: bool,
    dist: Vec<usize>,
}

impl SolutionCollection {
    /// Build a collection; repeated solutions are rejected unless
    /// `allow_multiset` is set.
    pub fn new(solutions: Vec<Solution>, allow_multiset: bool) -> Result<SolutionCollection> {
        if solutions.is_empty() {
            return arg("a collection needs at least one solution");
        }
        let k = solutions.len();
        let mut dist = vec![0; k * k];
        for i in 0..k {
            for j in i + 1..k {
                let d = solutions[i].sym_diff(&solutions[j]);
                if d == 0 && !allow_multiset {
                    return arg("repeated solution in a collection that must be distinct");
                }
                dist[i * k + j] = d;
                dist[j * k + i] = d;
            }
        }
        Ok(SolutionCollection { solutions, allow_multiset, dist })
    }

    pub fn distinct(solutions: Vec<Solution>) -> Result<SolutionCollection> {
        SolutionCollection::new(solutions, false)
    }

    pub fn multiset(solutions: Vec<Solution>) -> Result<SolutionCollection> {
        SolutionCollection::new(solutions, true)
    }

    pub fn k(&self) -> usize {
        self.solutions.len()
    }

    pub fn solutions(&self) -> &[Solution] {
        &self.solutions
    }

    pub fn into_solutions(self) -> Vec<Solution> {
        self.solutions
    }

    pub fn allow_multiset(&self) -> bool {
        self.allow_multiset
    }

    pub fn distance(&self, i: usize, j: usize) -> usize {
        self.dist[i * self.k() + j]
    }

    pub fn contains(&self, s: &Solution) -> bool {
        self.solutions.iter().any(|t| t == s)
    }

    /// True when some solution occurs twice.
    pub fn has_repeats(&self) -> bool {
        let k = self.k();
        (0..k).any(|i| (i + 1..k).any(|j| self.distance(i, j) == 0))
    }

    fn replace(&mut self, i: usize, s: Solution) {
        let k = self.k();
        for j in 0..k {
            if j != i {
                let d = s.sym_diff(&self.solutions[j]);
                self.dist[i * k + j] = d;
                self.dist[j * k + i] = d;
            }
        }
        self.solutions[i] = s;
    }
}

/// Integer score per element, the `r` of the swap step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreFunction {
    per_element: Vec<i64>,
    k_context: usize,
}

impl ScoreFunction {
    pub fn new(per_element: Vec<i64>, k_context: usize) -> ScoreFunction {
        ScoreFunction { per_element, k_context }
    }

    pub fn zero(n: usize) -> ScoreFunction {
        ScoreFunction::new(vec![0; n], 1)
    }

    pub fn len(&self) -> usize {
        self.per_element.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_element.is_empty()
    }

    pub fn get(&self, e: usize) -> i64 {
        self.per_element[e]
    }

    pub fn values(&self) -> &[i64] {
        &self.per_element
    }

    pub fn k_context(&self) -> usize {
        self.k_context
    }

    pub fn total(&self, s: &Solution) -> i64 {
        s.members().iter().map(|&e| self.per_element[e]).sum()
    }

    /// `Σ |r(e)|`, which bounds `|r(S)|` for every `S`; DP score axes are
    /// offset by this amount.
    pub fn abs_total(&self) -> i64 {
        self.per_element.iter().map(|r| r.abs()).sum()
    }
}

/// A request for the `k` best solutions under `score`.
#[derive(Debug, Clone)]
pub struct BcbeQuery {
    pub k: usize,
    pub score: ScoreFunction,
}

impl BcbeQuery {
    pub fn run<B: BcbeBackend + ?Sized>(&self, backend: &B) -> Result<BcbeResult> {
        if self.k == 0 {
            return arg("k must be at least 1");
        }
        backend.kbest(&self.score, self.k)
    }
}

/// Up to `k` distinct solutions sorted by nonincreasing score.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BcbeResult {
    pub solutions: Vec<Solution>,
    pub scores: Vec<i64>,
    /// Fewer than the requested number of feasible solutions exist.
    pub exhausted: bool,
}

impl BcbeResult {
    /// Assemble from `(score, solution)` candidates: sort by score, then by
    /// canonical solution order, and keep the first `k`.
    pub fn from_candidates(mut cands: Vec<(i64, Solution)>, k: usize) -> BcbeResult {
        cands.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        cands.dedup_by(|a, b| a.1 == b.1);
        let exhausted = cands.len() < k;
        cands.truncate(k);
        let (scores, solutions) = cands.into_iter().unzip();
        BcbeResult { solutions, scores, exhausted }
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Check ordering and distinctness.
    pub fn validate(&self) -> Result<()> {
        if self.scores.len() != self.solutions.len() {
            return Err(Error::Backend("score list length mismatch".into()));
        }
        if self.scores.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Backend("scores are not nonincreasing".into()));
        }
        let mut seen = self.solutions.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Backend("repeated solution in k-best answer".into()));
        }
        Ok(())
    }
}

/// Budget-constrained k-best enumeration over a fixed feasible space.
pub trait BcbeBackend {
    /// Size of the ground set the solutions live in.
    fn ground_size(&self) -> usize;

    /// The `k` distinct feasible solutions with the largest `score` totals.
    fn kbest(&self, score: &ScoreFunction, k: usize) -> Result<BcbeResult>;
}

impl<B: BcbeBackend + ?Sized> BcbeBackend for &B {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }

    fn kbest(&self, score: &ScoreFunction, k: usize) -> Result<BcbeResult> {
        (**self).kbest(score, k)
    }
}

/// `1 - 2/(k+1)`, the local-search guarantee.
pub fn beta(k: usize) -> f64 {
    1.0 - 2.0 / (k as f64 + 1.0)
}

/// Sum of `|S_i Δ S_j|` over unordered pairs.
pub fn diversity_sum(c: &SolutionCollection) -> u64 {
    let k = c.k();
    let mut total = 0u64;
    for i in 0..k {
        for j in i + 1..k {
            total += c.distance(i, j) as u64;
        }
    }
    total
}

/// Smallest pairwise symmetric difference; needs `k >= 2`.
pub fn min_pairwise_distance(c: &SolutionCollection) -> Result<usize> {
    let k = c.k();
    if k < 2 {
        return arg("minimum pairwise distance needs at least two solutions");
    }
    let mut best = usize::MAX;
    for i in 0..k {
        for j in i + 1..k {
            best = best.min(c.distance(i, j));
        }
    }
    Ok(best)
}

/// `r(e) = Σ_{j ≠ excluded} (1[e ∉ S_j] − 1[e ∈ S_j])` over a ground set of size `n`.
///
/// With this score, `Σ_{j≠i} |S Δ S_j| = Σ_{j≠i} |S_j| + r(S)` for every `S`,
/// so maximizing `r` maximizes the distance to the rest of the collection.
pub fn build_score(c: &SolutionCollection, excluded: usize, n: usize) -> Result<ScoreFunction> {
    let k = c.k();
    if excluded >= k {
        return arg(format!("excluded index {excluded} out of range for k = {k}"));
    }
    let mut count = vec![0i64; n];
    for (j, s) in c.solutions().iter().enumerate() {
        if j == excluded {
            continue;
        }
        s.check(n)?;
        for &e in s.members() {
            count[e] += 1;
        }
    }
    let others = (k - 1) as i64;
    Ok(ScoreFunction::new(count.into_iter().map(|m| others - 2 * m).collect(), k))
}

/// Change in [`diversity_sum`] when `c[out_index]` is replaced by `candidate`.
pub fn swap_gain(c: &SolutionCollection, out_index: usize, candidate: &Solution) -> i64 {
    let mut gain = 0i64;
    for (j, s) in c.solutions().iter().enumerate() {
        if j != out_index {
            gain += candidate.sym_diff(s) as i64 - c.distance(out_index, j) as i64;
        }
    }
    gain
}

/// `⌈3k ln k⌉`, the round bound of the swap loop.
pub fn default_rounds(k: usize) -> usize {
    if k < 2 {
        return 0;
    }
    let k = k as f64;
    (3.0 * k * k.ln()).ceil() as usize
}

/// One k-best query with the all-zero score. A short answer is padded by
/// repeating its first solution.
pub fn seed_collection<B: BcbeBackend + ?Sized>(backend: &B, k: usize) -> Result<SolutionCollection> {
    if k == 0 {
        return arg("k must be at least 1");
    }
    let res = backend.kbest(&ScoreFunction::zero(backend.ground_size()), k)?;
    if res.solutions.is_empty() {
        return Err(Error::Backend("feasible space is empty".into()));
    }
    if res.solutions.len() == k {
        return SolutionCollection::distinct(res.solutions);
    }
    let mut sols = res.solutions;
    while sols.len() < k {
        sols.push(sols[0].clone());
    }
    SolutionCollection::multiset(sols)
}

/// Best-swap local search.
///
/// Each round asks the backend, for every removal index `i`, for the `k+1`
/// best solutions under `build_score(c, i)`; the best one not already in the
/// collection is the candidate for slot `i`. The best candidate swap is
/// applied if it strictly increases diversity, otherwise the search stops.
/// Ties go to the smallest removal index.
pub fn local_search<B: BcbeBackend + ?Sized>(
    backend: &B,
    seed: SolutionCollection,
    max_rounds: Option<usize>,
) -> Result<SolutionCollection> {
    let k = seed.k();
    let n = backend.ground_size();
    let rounds = max_rounds.unwrap_or_else(|| default_rounds(k));
    let mut c = seed;
    for _ in 0..rounds {
        let mut best: Option<(i64, usize, Solution)> = None;
        for i in 0..k {
            let score = build_score(&c, i, n)?;
            let res = backend.kbest(&score, k + 1)?;
            if res.solutions.is_empty() {
                return Err(Error::Backend("k-best query returned nothing".into()));
            }
            let Some(cand) = res.solutions.into_iter().find(|s| !c.contains(s)) else {
                continue;
            };
            let gain = swap_gain(&c, i, &cand);
            if best.as_ref().is_none_or(|b| gain > b.0) {
                best = Some((gain, i, cand));
            }
        }
        match best {
            Some((gain, i, cand)) if gain > 0 => c.replace(i, cand),
            _ => break,
        }
    }
    Ok(c)
}

/// Seed with one zero-score query, then run [`local_search`].
///
/// When the backend's space holds fewer than `k` solutions the whole space
/// is returned, padded by farthest insertion into a multiset.
pub fn run_local_search<B: BcbeBackend + ?Sized>(backend: &B, k: usize) -> Result<SolutionCollection> {
    let seed = seed_collection(backend, k)?;
    if seed.allow_multiset() {
        let mut pool: Vec<Solution> = seed.into_solutions();
        pool.sort();
        pool.dedup();
        return pad_farthest(pool, k);
    }
    local_search(backend, seed, None)
}

/// Extend `pool` to `k` members by repeatedly adding the pool member with the
/// largest total distance to the current collection (smallest index on ties).
pub fn pad_farthest(pool: Vec<Solution>, k: usize) -> Result<SolutionCollection> {
    if pool.is_empty() || k == 0 {
        return arg("farthest insertion needs a nonempty pool and k >= 1");
    }
    if pool.len() >= k {
        return SolutionCollection::distinct(pool.into_iter().take(k).collect());
    }
    let m = pool.len();
    let mut totals: Vec<usize> = (0..m).map(|a| (0..m).map(|b| pool[a].sym_diff(&pool[b])).sum()).collect();
    let mut out = pool.clone();
    while out.len() < k {
        let pick = (0..m).max_by_key(|&a| (totals[a], std::cmp::Reverse(a))).unwrap_or(0);
        for (a, t) in totals.iter_mut().enumerate() {
            *t += pool[a].sym_diff(&pool[pick]);
        }
        out.push(pool[pick].clone());
    }
    SolutionCollection::multiset(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(sets: &[&[usize]]) -> SolutionCollection {
        SolutionCollection::multiset(sets.iter().map(|s| Solution::new(s.iter().copied())).collect()).unwrap()
    }

    #[test]
    fn diversity_examples() {
        assert_eq!(diversity_sum(&col(&[&[], &[]])), 0);
        assert_eq!(diversity_sum(&col(&[&[0], &[1]])), 2);
        assert_eq!(diversity_sum(&col(&[&[0, 2], &[0, 3], &[1, 2], &[1, 3]])), 16);
    }

    #[test]
    fn min_distance_examples() {
        assert_eq!(min_pairwise_distance(&col(&[&[0], &[0]])).unwrap(), 0);
        assert_eq!(min_pairwise_distance(&col(&[&[0], &[1]])).unwrap(), 2);
        assert_eq!(min_pairwise_distance(&col(&[&[0, 2], &[0, 3], &[1, 2], &[1, 3]])).unwrap(), 2);
        assert!(min_pairwise_distance(&col(&[&[0]])).is_err());
    }

    #[test]
    fn score_examples() {
        assert_eq!(build_score(&col(&[&[0], &[1]]), 0, 2).unwrap().values(), &[1, -1]);
        assert_eq!(build_score(&col(&[&[0], &[0]]), 1, 3).unwrap().values(), &[-1, 1, 1]);
        assert_eq!(build_score(&col(&[&[0, 1], &[1], &[2]]), 2, 3).unwrap().values(), &[0, -2, 2]);
        assert!(build_score(&col(&[&[0]]), 1, 1).is_err());
    }

    #[test]
    fn swap_examples() {
        assert_eq!(swap_gain(&col(&[&[0], &[1]]), 0, &Solution::new([0])), 0);
        assert_eq!(swap_gain(&col(&[&[0], &[0]]), 1, &Solution::new([1])), 2);
    }

    #[test]
    fn distinct_collection_rejects_repeats() {
        let s = Solution::new([1]);
        assert!(SolutionCollection::distinct(vec![s.clone(), s]).is_err());
        assert!(SolutionCollection::distinct(vec![]).is_err());
    }

    #[test]
    fn round_bound() {
        assert_eq!(default_rounds(1), 0);
        assert_eq!(default_rounds(2), 5);
        assert_eq!(default_rounds(4), 17);
    }

    #[test]
    fn farthest_padding() {
        let c = pad_farthest(vec![Solution::new([0]), Solution::new([1])], 3).unwrap();
        assert!(c.allow_multiset());
        assert_eq!(diversity_sum(&c), 4);
    }
}
