use std::f64::consts::PI;

use super::{Graph, PlaneGraph};
use crate::error::{arg, input, Result};
use crate::numeric::ceil_tol;

/// Level of every vertex (1-based) in the onion peeling of the drawing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layering {
    pub levels: Vec<usize>,
}

impl Layering {
    pub fn depth(&self) -> usize {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    /// `L^p`: vertices whose level is congruent to `p` modulo `ell + 1`.
    pub fn strata(&self, p: usize, ell: usize) -> Vec<usize> {
        (0..self.levels.len()).filter(|&v| self.levels[v] % (ell + 1) == p).collect()
    }

    pub fn in_strata(&self, v: usize, p: usize, ell: usize) -> bool {
        self.levels[v] % (ell + 1) == p
    }
}

/// Smallest `ℓ` with `ℓ >= 2k/δ + 2/ε - 1`, plus `2k²` when distinct
/// solutions are required.
pub fn choose_ell(k: usize, delta: f64, epsilon: f64, distinct: bool) -> Result<usize> {
    if k == 0 || !(delta > 0.0 && delta <= 1.0) || !(epsilon > 0.0 && epsilon <= 1.0) {
        return arg("choose_ell needs k >= 1 and delta, epsilon in (0, 1]");
    }
    let k = k as f64;
    let mut bound = 2.0 * k / delta + 2.0 / epsilon - 1.0;
    if distinct {
        bound += 2.0 * k * k;
    }
    Ok(ceil_tol(bound).max(0) as usize)
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn on_segment(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> bool {
    orient(a, b, p) == 0.0 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

/// Whether closed segments `ab` and `cd` share a point.
pub fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

pub(super) fn validate_drawing(g: &Graph, coords: &[(f64, f64)]) -> Result<()> {
    let n = g.n();
    for u in 0..n {
        for v in u + 1..n {
            if coords[u] == coords[v] {
                return input(format!("vertices {u} and {v} share a position"));
            }
        }
    }
    let edges = g.edges();
    for &(a, b) in &edges {
        for v in 0..n {
            if v != a && v != b && on_segment(coords[a], coords[b], coords[v]) {
                return input(format!("vertex {v} lies on edge ({a}, {b})"));
            }
        }
    }
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if segments_cross(coords[a], coords[b], coords[c], coords[d]) {
                return input(format!("edges ({a}, {b}) and ({c}, {d}) cross"));
            }
        }
    }
    Ok(())
}

fn angle(from: (f64, f64), to: (f64, f64)) -> f64 {
    (to.1 - from.1).atan2(to.0 - from.0)
}

/// Next vertex after arriving at `v` from direction `incoming`: the first
/// neighbour met turning clockwise.
fn turn(g: &Graph, alive: &[bool], coords: &[(f64, f64)], v: usize, incoming: f64) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for &w in g.neighbors(v) {
        if !alive[w] {
            continue;
        }
        let mut rot = (incoming - angle(coords[v], coords[w])).rem_euclid(2.0 * PI);
        if rot <= 1e-12 {
            rot = 2.0 * PI;
        }
        if rot < best.0 {
            best = (rot, w);
        }
    }
    best.1
}

/// Boundary walk of the unbounded face of one component, starting at its
/// leftmost (then lowest) vertex.
fn outer_walk(g: &Graph, alive: &[bool], coords: &[(f64, f64)], comp: &[usize]) -> Vec<usize> {
    let start = *comp
        .iter()
        .min_by(|&&a, &&b| coords[a].partial_cmp(&coords[b]).expect("finite coordinates"))
        .expect("nonempty component");
    if !g.neighbors(start).iter().any(|&w| alive[w]) {
        return vec![start];
    }
    let first = turn(g, alive, coords, start, PI);
    let mut walk = vec![start];
    let (mut u, mut v) = (start, first);
    loop {
        let w = turn(g, alive, coords, v, angle(coords[v], coords[u]));
        if v == start && w == first {
            break;
        }
        walk.push(v);
        (u, v) = (v, w);
    }
    walk
}

fn inside_walk(coords: &[(f64, f64)], walk: &[usize], p: (f64, f64)) -> bool {
    let m = walk.len();
    let mut inside = false;
    for i in 0..m {
        let a = coords[walk[i]];
        let b = coords[walk[(i + 1) % m]];
        if (a.1 > p.1) != (b.1 > p.1) {
            let x = a.0 + (p.1 - a.1) * (b.0 - a.0) / (b.1 - a.1);
            if x > p.0 {
                inside = !inside;
            }
        }
    }
    inside
}

/// Peel the drawing: level `i` is the set of vertices on the unbounded face
/// once all lower levels are deleted. Supplied levels take precedence.
pub fn compute_levels(pg: &PlaneGraph) -> Result<Layering> {
    if let Some(l) = &pg.levels {
        return Ok(Layering { levels: l.clone() });
    }
    let Some(coords) = &pg.coords else {
        return input("levels cannot be computed without coordinates");
    };
    let g = &pg.graph;
    let n = g.n();
    let mut levels = vec![0usize; n];
    let mut alive = vec![true; n];
    let mut level = 0;
    while alive.iter().any(|&a| a) {
        level += 1;
        let comps = alive_components(g, &alive);
        let walks: Vec<Vec<usize>> = comps.iter().map(|c| outer_walk(g, &alive, coords, c)).collect();
        let mut peeled = Vec::new();
        for (i, comp) in comps.iter().enumerate() {
            let probe = coords[walks[i][0]];
            let nested = walks.iter().enumerate().any(|(j, w)| j != i && w.len() >= 3 && inside_walk(coords, w, probe));
            if !nested && !comp.is_empty() {
                peeled.extend(walks[i].iter().copied());
            }
        }
        for v in peeled {
            levels[v] = level;
            alive[v] = false;
        }
    }
    Ok(Layering { levels })
}

fn alive_components(g: &Graph, alive: &[bool]) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if !alive[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut comp = Vec::new();
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &u in g.neighbors(v) {
                if alive[u] && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// For tests: every vertex deeper than level `i` sits strictly inside some
/// closed outer walk of the level-`i` drawing.
#[doc(hidden)]
pub fn deeper_vertices_enclosed(pg: &PlaneGraph, layering: &Layering) -> bool {
    let Some(coords) = &pg.coords else { return true };
    let g = &pg.graph;
    for i in 1..=layering.depth() {
        let alive: Vec<bool> = layering.levels.iter().map(|&l| l >= i).collect();
        let walks: Vec<Vec<usize>> =
            alive_components(g, &alive).iter().map(|c| outer_walk(g, &alive, coords, c)).collect();
        for v in 0..g.n() {
            if layering.levels[v] > i && !walks.iter().any(|w| w.len() >= 3 && inside_walk(coords, w, coords[v])) {
                return false;
            }
        }
    }
    true
}
