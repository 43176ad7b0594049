//! Diverse value-enclosing convex polygons.
//!
//! A solution is the set of input points weakly inside the convex hull of
//! some subset, so every solution is closed under enclosure and distinct
//! hulls give distinct point sets. The enumeration DP builds each hull as a
//! fan around its lowest vertex.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{arg, input, too_large, Result};
use crate::framework::{run_local_search, BcbeBackend, BcbeResult, ScoreFunction, Solution, SolutionCollection};
use crate::knapsack::{scale_profits, unit_ratio};
use crate::oracle::{Problem, Sense};

/// Relative slack when comparing a perimeter against the budget.
pub const LENGTH_TOL: f64 = 1e-9;
/// Largest value range the exact single-enclosure DP works with.
pub const MAX_VALUE_AXIS: u64 = 200_000;

type Pt = (f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub points: Vec<[f64; 2]>,
    pub values: Vec<u64>,
}

impl PointSet {
    pub fn new(points: Vec<[f64; 2]>, values: Vec<u64>) -> Result<PointSet> {
        let ps = PointSet { points, values };
        ps.validate()?;
        Ok(ps)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.len() != self.values.len() {
            return input("points and values differ in length");
        }
        if self.points.is_empty() {
            return input("no points");
        }
        if self.points.iter().flatten().any(|x| !x.is_finite()) {
            return input("coordinates must be finite");
        }
        for i in 0..self.points.len() {
            for j in 0..i {
                if self.points[i] == self.points[j] {
                    return input(format!("points {j} and {i} coincide"));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    fn pt(&self, i: usize) -> Pt {
        (self.points[i][0], self.points[i][1])
    }

    pub fn value(&self, s: &Solution) -> u64 {
        s.members().iter().map(|&i| self.values[i]).sum()
    }

    /// No three points on a line.
    pub fn general_position(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (i + 1..n).all(|j| (j + 1..n).all(|h| orient(self.pt(i), self.pt(j), self.pt(h)) != 0.0)))
    }
}

fn orient(a: Pt, b: Pt, c: Pt) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn dist(a: Pt, b: Pt) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn on_segment(a: Pt, b: Pt, p: Pt) -> bool {
    orient(a, b, p) == 0.0 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn in_triangle(a: Pt, b: Pt, c: Pt, p: Pt) -> bool {
    let o = orient(a, b, c);
    if o == 0.0 {
        return on_segment(a, b, p) || on_segment(b, c, p) || on_segment(a, c, p);
    }
    let s = o.signum();
    orient(a, b, p) * s >= 0.0 && orient(b, c, p) * s >= 0.0 && orient(c, a, p) * s >= 0.0
}

/// Convex hull vertices in counter-clockwise order, without collinear
/// points; one or two points for degenerate input.
pub fn convex_hull(ps: &PointSet, subset: &Solution) -> Vec<usize> {
    let mut idx: Vec<usize> = subset.members().to_vec();
    idx.sort_by(|&a, &b| ps.pt(a).partial_cmp(&ps.pt(b)).expect("finite"));
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && orient(ps.pt(lower[lower.len() - 2]), ps.pt(lower[lower.len() - 1]), ps.pt(i)) <= 0.0
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && orient(ps.pt(upper[upper.len() - 2]), ps.pt(upper[upper.len() - 1]), ps.pt(i)) <= 0.0
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    lower
}

/// Perimeter of the convex hull; a segment counts twice, a point is 0.
pub fn hull_perimeter(ps: &PointSet, subset: &Solution) -> Result<f64> {
    if subset.is_empty() {
        return arg("hull of an empty set");
    }
    let h = convex_hull(ps, subset);
    Ok(match h.len() {
        1 => 0.0,
        2 => 2.0 * dist(ps.pt(h[0]), ps.pt(h[1])),
        m => (0..m).map(|i| dist(ps.pt(h[i]), ps.pt(h[(i + 1) % m]))).sum(),
    })
}

/// All points weakly inside the hull of `subset`.
pub fn enclosure(ps: &PointSet, subset: &Solution) -> Solution {
    if subset.is_empty() {
        return Solution::empty();
    }
    let h = convex_hull(ps, subset);
    let inside = |p: Pt| match h.len() {
        1 => p == ps.pt(h[0]),
        2 => on_segment(ps.pt(h[0]), ps.pt(h[1]), p),
        m => (0..m).all(|i| orient(ps.pt(h[i]), ps.pt(h[(i + 1) % m]), p) >= 0.0),
    };
    (0..ps.n()).filter(|&i| inside(ps.pt(i))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleAggregate {
    pub value: u64,
    pub score: i64,
    pub count: usize,
    /// The three corners are collinear; the sums cover the segments.
    pub degenerate: bool,
}

/// Value, score and count of points weakly inside triangle `i j h`.
pub fn triangle_aggregate(ps: &PointSet, score: &[i64], i: usize, j: usize, h: usize) -> Result<TriangleAggregate> {
    if i == j || j == h || i == h {
        return arg("triangle corners must be distinct");
    }
    let (a, b, c) = (ps.pt(i), ps.pt(j), ps.pt(h));
    let mut agg = TriangleAggregate { value: 0, score: 0, count: 0, degenerate: orient(a, b, c) == 0.0 };
    for q in 0..ps.n() {
        if in_triangle(a, b, c, ps.pt(q)) {
            agg.value += ps.values[q];
            agg.score += score.get(q).copied().unwrap_or(0);
            agg.count += 1;
        }
    }
    Ok(agg)
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    perim: f64,
    /// Previous chain vertex and the key/rank of the entry extended.
    prev: usize,
    key: (i64, u64),
    rank: usize,
}

type Cell = HashMap<(i64, u64), Vec<Entry>>;

fn trim(list: &mut Vec<Entry>, k: usize) {
    list.sort_by(|a, b| {
        a.perim.total_cmp(&b.perim).then(a.prev.cmp(&b.prev)).then(a.key.cmp(&b.key)).then(a.rank.cmp(&b.rank))
    });
    list.truncate(k);
}

/// One finished enclosure produced by the DP.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    pub points: Solution,
    pub perimeter: f64,
    pub value: u64,
    pub score: i64,
}

/// Enumerates, for every (score, clamped value) pair, the `k` shortest
/// enclosures, including the empty set, single points and segments.
fn enumerate(ps: &PointSet, values: &[u64], score: &[i64], clamp: u64, k: usize) -> Vec<Enclosure> {
    let n = ps.n();
    let val = |s: &Solution| -> u64 { s.members().iter().map(|&i| values[i]).sum() };
    let sc = |s: &Solution| -> i64 { s.members().iter().map(|&i| score[i]).sum() };
    let mut out = vec![Enclosure { points: Solution::empty(), perimeter: 0.0, value: 0, score: 0 }];
    for i in 0..n {
        let s = Solution::new([i]);
        out.push(Enclosure { value: val(&s), score: sc(&s), perimeter: 0.0, points: s });
    }
    for i in 0..n {
        for j in i + 1..n {
            let s: Solution = (0..n).filter(|&q| on_segment(ps.pt(i), ps.pt(j), ps.pt(q))).collect();
            out.push(Enclosure { value: val(&s), score: sc(&s), perimeter: 2.0 * dist(ps.pt(i), ps.pt(j)), points: s });
        }
    }
    for a in 0..n {
        out.extend(fan(ps, values, score, clamp, k, a));
    }
    out
}

/// Polygons of at least three strictly convex vertices whose lowest
/// (then leftmost) vertex is `a`.
fn fan(ps: &PointSet, values: &[u64], score: &[i64], clamp: u64, k: usize, a: usize) -> Vec<Enclosure> {
    let n = ps.n();
    let pa = ps.pt(a);
    let mut cand: Vec<usize> = (0..n)
        .filter(|&c| {
            let p = ps.pt(c);
            p.1 > pa.1 || (p.1 == pa.1 && p.0 > pa.0)
        })
        .collect();
    let ang = |c: usize| {
        let p = ps.pt(c);
        (p.1 - pa.1).atan2(p.0 - pa.0)
    };
    cand.sort_by(|&x, &y| ang(x).total_cmp(&ang(y)).then(dist(pa, ps.pt(x)).total_cmp(&dist(pa, ps.pt(y)))));
    let m = cand.len();
    if m < 2 {
        return Vec::new();
    }
    // region of the fan triangle (a, q, r) without the closed segment [a, q]
    let region = |q: usize, r: usize| -> (u64, i64) {
        let (pq, pr) = (ps.pt(q), ps.pt(r));
        let (mut v, mut s) = (0, 0);
        for x in 0..n {
            let p = ps.pt(x);
            if in_triangle(pa, pq, pr, p) && !on_segment(pa, pq, p) {
                v += values[x];
                s += score[x];
            }
        }
        (v, s)
    };
    // states[(p, q)] keyed by local indices; p == m stands for the anchor
    let mut states: HashMap<(usize, usize), Cell> = HashMap::new();
    for (qi, &q) in cand.iter().enumerate() {
        let (mut v, mut s) = (0u64, 0i64);
        for x in 0..n {
            if on_segment(pa, ps.pt(q), ps.pt(x)) {
                v += values[x];
                s += score[x];
            }
        }
        let e = Entry { perim: dist(pa, ps.pt(q)), prev: usize::MAX, key: (0, 0), rank: 0 };
        states.insert((m, qi), HashMap::from([((s, v.min(clamp)), vec![e])]));
    }
    let mut done = Vec::new();
    for qi in 0..m {
        let q = cand[qi];
        let preds: Vec<usize> = (0..=m).filter(|&pi| states.contains_key(&(pi, qi))).collect();
        for pi in preds {
            let cell = states[&(pi, qi)].clone();
            let pp = if pi == m { pa } else { ps.pt(cand[pi]) };
            if pi != m && orient(pp, ps.pt(q), pa) > 0.0 {
                done.push((pi, qi));
            }
            for ri in qi + 1..m {
                let r = cand[ri];
                if ang(r) <= ang(q) || orient(pp, ps.pt(q), ps.pt(r)) <= 0.0 {
                    continue;
                }
                let (dv, ds) = region(q, r);
                let d = dist(ps.pt(q), ps.pt(r));
                let target = states.entry((qi, ri)).or_default();
                for (&(s, v), list) in &cell {
                    let key = (s + ds, (v + dv).min(clamp));
                    let slot = target.entry(key).or_default();
                    for (rank, e) in list.iter().enumerate() {
                        slot.push(Entry { perim: e.perim + d, prev: pi, key: (s, v), rank });
                    }
                    trim(slot, k);
                }
            }
        }
    }
    let mut out = Vec::new();
    for (pi, qi) in done {
        let cell = &states[&(pi, qi)];
        let mut keys: Vec<&(i64, u64)> = cell.keys().collect();
        keys.sort();
        for key in keys {
            for (rank, e) in cell[key].iter().enumerate() {
                let mut verts = vec![cand[qi]];
                let (mut p, mut q, mut kk, mut rk) = (pi, qi, *key, rank);
                while p != m {
                    let cur = states[&(p, q)][&kk][rk];
                    verts.push(cand[p]);
                    (q, p, kk, rk) = (p, cur.prev, cur.key, cur.rank);
                }
                verts.push(a);
                let hull: Solution = verts.into_iter().collect();
                let pts = enclosure(ps, &hull);
                out.push(Enclosure {
                    perimeter: e.perim + dist(ps.pt(cand[qi]), pa),
                    value: pts.members().iter().map(|&i| values[i]).sum(),
                    score: pts.members().iter().map(|&i| score[i]).sum(),
                    points: pts,
                });
                debug_assert_eq!(out.last().map(|o| (o.score, o.value.min(clamp))), Some(*key));
            }
        }
    }
    out
}

fn fits(perim: f64, budget: f64) -> bool {
    perim <= budget * (1.0 + LENGTH_TOL) + LENGTH_TOL
}

/// The `k` enclosures with perimeter at most `budget` and value at least
/// `floor` (under `values`) having the largest score totals.
pub fn enclosing_kbest(
    ps: &PointSet,
    values: &[u64],
    budget: f64,
    floor: u64,
    k: usize,
    score: &ScoreFunction,
) -> Result<BcbeResult> {
    if k == 0 {
        return arg("k must be at least 1");
    }
    if score.len() != ps.n() || values.len() != ps.n() {
        return arg("score or value length does not match the point count");
    }
    let all = enumerate(ps, values, score.values(), floor, k);
    let cands = all
        .into_iter()
        .filter(|e| e.value >= floor && fits(e.perimeter, budget))
        .map(|e| (e.score, e.points))
        .collect();
    Ok(BcbeResult::from_candidates(cands, k))
}

/// Shortest hull perimeter for every achievable enclosed value.
pub fn min_perimeter_by_value(ps: &PointSet) -> BTreeMap<u64, f64> {
    let total: u64 = ps.values.iter().sum();
    let zero = vec![0i64; ps.n()];
    let mut best: BTreeMap<u64, f64> = BTreeMap::new();
    for e in enumerate(ps, &ps.values, &zero, total, 1) {
        let slot = best.entry(e.value).or_insert(f64::INFINITY);
        *slot = slot.min(e.perimeter);
    }
    best
}

/// Same table by scanning every subset; for testing.
pub fn min_perimeter_by_value_bruteforce(ps: &PointSet) -> Result<BTreeMap<u64, f64>> {
    let n = ps.n();
    if n > 20 {
        return too_large("subset scan is limited to 20 points");
    }
    let mut best: BTreeMap<u64, f64> = BTreeMap::from([(0, 0.0)]);
    for mask in 1u32..1 << n {
        let s: Solution = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let v = ps.value(&enclosure(ps, &s));
        let p = hull_perimeter(ps, &s)?;
        let slot = best.entry(v).or_insert(f64::INFINITY);
        *slot = slot.min(p);
    }
    Ok(best)
}

/// Points with a perimeter budget, as a maximization problem over closed
/// point sets.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonInstance {
    pub points: PointSet,
    pub budget: f64,
}

impl Problem for PolygonInstance {
    fn ground_size(&self) -> usize {
        self.points.n()
    }

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn evaluate(&self, s: &Solution) -> Option<f64> {
        if s.is_empty() {
            return Some(0.0);
        }
        let closed = enclosure(&self.points, s) == *s;
        let p = hull_perimeter(&self.points, s).ok()?;
        (closed && fits(p, self.budget)).then(|| self.points.value(s) as f64)
    }
}

/// A single enclosure within the budget whose value is at least `(1-δ)`
/// times the best. Exact when the value range is small, otherwise on values
/// divided by `δ·v_max/n`.
pub fn best_enclosure(ps: &PointSet, budget: f64, delta: f64) -> Result<(Solution, u64)> {
    let d = unit_ratio(delta, "delta", false)?;
    let n = ps.n() as u64;
    let total: u64 = ps.values.iter().sum();
    let vmax = ps.values.iter().copied().max().unwrap_or(0);
    let values: Vec<u64> = if total <= MAX_VALUE_AXIS || vmax == 0 {
        ps.values.clone()
    } else {
        ps.values
            .iter()
            .map(|&v| (v as u128 * n as u128 * d.den as u128 / (d.num as u128 * vmax as u128)) as u64)
            .collect()
    };
    let cap: u64 = values.iter().sum();
    let zero = vec![0i64; ps.n()];
    let best = enumerate(ps, &values, &zero, cap, 1)
        .into_iter()
        .filter(|e| fits(e.perimeter, budget))
        .max_by(|a, b| a.value.cmp(&b.value).then_with(|| b.points.cmp(&a.points)))
        .expect("the empty enclosure always fits");
    let v = ps.value(&best.points);
    Ok((best.points, v))
}

/// Local-search backend over [`enclosing_kbest`].
pub struct PolygonBackend<'a> {
    pub points: &'a PointSet,
    pub values: Vec<u64>,
    pub budget: f64,
    pub floor: u64,
}

impl BcbeBackend for PolygonBackend<'_> {
    fn ground_size(&self) -> usize {
        self.points.n()
    }

    fn kbest(&self, score: &ScoreFunction, k: usize) -> Result<BcbeResult> {
        enclosing_kbest(self.points, &self.values, self.budget, self.floor, k, score)
    }
}

/// `k` diverse enclosures within the perimeter budget.
///
/// With a small value range the best value is found exactly and the floor
/// is `⌈c·OPT⌉` on raw values. Otherwise a `(1-δ/2)`-approximate enclosure
/// `S` drives the value scaling `ṽ_i = ⌊(Ṽ+n)v_i/(c·v(S))⌋` with floor
/// `Ṽ = ⌈(1-δ/2)n/(δ/2)⌉`, so every output is `(1-δ)c`-optimal.
pub fn diverse_polygons(ps: &PointSet, budget: f64, k: usize, c: f64, delta: f64) -> Result<SolutionCollection> {
    ps.validate()?;
    if !budget.is_finite() || budget < 0.0 {
        return arg("budget must be a nonnegative number");
    }
    let cr = unit_ratio(c, "c", true)?;
    unit_ratio(delta, "delta", false)?;
    let total: u64 = ps.values.iter().sum();
    let backend = if total <= MAX_VALUE_AXIS {
        let (_, opt) = best_enclosure(ps, budget, delta)?;
        let floor = cr.ceil_mul(opt) as u64;
        PolygonBackend { points: ps, values: ps.values.clone(), budget, floor }
    } else {
        let (_, v) = best_enclosure(ps, budget, delta / 2.0)?;
        let (values, floor) = scale_profits(&ps.values, v, c, delta / 2.0)?;
        PolygonBackend { points: ps, values, budget, floor }
    };
    run_local_search(&backend, k)
}
