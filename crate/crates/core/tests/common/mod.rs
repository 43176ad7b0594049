#![allow(dead_code, clippy::needless_range_loop)]

use nicediv::geometry::PointSet;
use nicediv::knapsack::KnapsackInstance;
use nicediv::planar::{segments_cross, Graph, PlaneGraph};
use nicediv::tsp::TspInstance;
use nicediv::{ScoreFunction, Solution};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Profits come from a small palette so optimal packings tie.
pub fn knapsack(r: &mut ChaCha8Rng, n: usize) -> KnapsackInstance {
    let palette: Vec<u64> = (0..r.gen_range(1..=3)).map(|_| r.gen_range(1..=6)).collect();
    let weights: Vec<u64> = (0..n).map(|_| r.gen_range(1..=6)).collect();
    let profits = (0..n).map(|_| *palette.choose(r).unwrap()).collect();
    let capacity = (weights.iter().sum::<u64>() / 2).max(1);
    KnapsackInstance::new(weights, profits, capacity).unwrap()
}

/// Greedy triangulation of random points, thinned by dropping each edge
/// with probability `drop`.
pub fn plane_graph(r: &mut ChaCha8Rng, n: usize, drop: f64, max_weight: u64) -> PlaneGraph {
    let coords: Vec<(f64, f64)> = (0..n).map(|_| (r.gen_range(0.0..100.0), r.gen_range(0.0..100.0))).collect();
    let len = |(a, b): (usize, usize)| (coords[a].0 - coords[b].0).hypot(coords[a].1 - coords[b].1);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    pairs.sort_by(|&x, &y| len(x).total_cmp(&len(y)));
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (a, b) in pairs {
        let (pa, pb) = (coords[a], coords[b]);
        let through = (0..n).any(|v| v != a && v != b && segments_cross(pa, pb, coords[v], coords[v]));
        let crosses = edges
            .iter()
            .any(|&(c, d)| c != a && c != b && d != a && d != b && segments_cross(pa, pb, coords[c], coords[d]));
        if !through && !crosses {
            edges.push((a, b));
        }
    }
    edges.retain(|_| !r.gen_bool(drop));
    let weights = (0..n).map(|_| r.gen_range(1..=max_weight)).collect();
    PlaneGraph::new(Graph::new(n, &edges, weights).unwrap(), Some(coords), None).unwrap()
}

pub fn tsp(r: &mut ChaCha8Rng, n: usize, max_len: u64) -> TspInstance {
    let mut m = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = r.gen_range(1..=max_len);
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    TspInstance::new(m).unwrap()
}

/// Distinct points on a `side × side` integer grid, so collinear triples
/// are common.
pub fn points(r: &mut ChaCha8Rng, n: usize, side: i32, max_value: u64) -> PointSet {
    let mut pts: Vec<[f64; 2]> = Vec::new();
    while pts.len() < n {
        let p = [r.gen_range(0..side) as f64, r.gen_range(0..side) as f64];
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let values = (0..n).map(|_| r.gen_range(0..=max_value)).collect();
    PointSet::new(pts, values).unwrap()
}

pub fn subset(r: &mut ChaCha8Rng, n: usize) -> Solution {
    (0..n).filter(|_| r.gen_bool(0.5)).collect()
}

pub fn score(r: &mut ChaCha8Rng, n: usize, k: usize) -> ScoreFunction {
    let k = k.max(1) as i64;
    ScoreFunction::new((0..n).map(|_| r.gen_range(-k..=k)).collect(), k as usize)
}

pub fn sorted(mut v: Vec<i64>) -> Vec<i64> {
    v.sort_unstable();
    v
}
