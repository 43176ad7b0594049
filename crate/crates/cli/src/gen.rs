//! Seeded instance generators. The same seed always yields the same file.

use std::collections::BTreeSet;

use anyhow::{bail, Result};
use nicediv::geometry::PointSet;
use nicediv::knapsack::KnapsackInstance;
use nicediv::planar::{segments_cross, Graph, PlaneGraph};
use nicediv::tsp::TspInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Profits are drawn from a palette of `distinct` values so that several
/// packings tie.
pub fn knapsack(n: usize, seed: u64, distinct: Option<usize>) -> Result<KnapsackInstance> {
    if n == 0 {
        bail!("need at least one item");
    }
    let mut r = rng(seed);
    let distinct = distinct.unwrap_or(n.div_ceil(2)).max(1);
    let palette: Vec<u64> = (0..distinct).map(|_| r.gen_range(1..=20)).collect();
    let weights: Vec<u64> = (0..n).map(|_| r.gen_range(1..=10)).collect();
    let profits = (0..n).map(|_| palette[r.gen_range(0..distinct)]).collect();
    let capacity = (weights.iter().sum::<u64>() / 2).max(1);
    Ok(KnapsackInstance::new(weights, profits, capacity)?)
}

pub fn tsp(n: usize, seed: u64) -> Result<TspInstance> {
    if n < 3 {
        bail!("a tour needs at least three cities");
    }
    let mut r = rng(seed);
    let mut m = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = r.gen_range(1..=9);
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    Ok(TspInstance::new(m)?)
}

pub fn tsp_json(inst: &TspInstance) -> Value {
    let n = inst.n();
    let lengths: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| inst.length(i, j)).collect()).collect();
    json!({ "n": n, "lengths": lengths })
}

/// Greedy triangulation of uniform random points, with weights in 1..=4:
/// point pairs are taken shortest first and kept unless they cross an edge
/// already kept or pass through another point.
pub fn planar(n: usize, seed: u64) -> Result<PlaneGraph> {
    if n == 0 {
        bail!("need at least one vertex");
    }
    let mut r = rng(seed);
    let coords: Vec<(f64, f64)> = (0..n).map(|_| (r.gen_range(0.0..100.0), r.gen_range(0.0..100.0))).collect();
    let weights: Vec<u64> = (0..n).map(|_| r.gen_range(1..=4)).collect();
    let len = |(a, b): (usize, usize)| (coords[a].0 - coords[b].0).hypot(coords[a].1 - coords[b].1);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    pairs.sort_by(|&x, &y| len(x).total_cmp(&len(y)).then(x.cmp(&y)));
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
    Ok(PlaneGraph::new(Graph::new(n, &edges, weights)?, Some(coords), None)?)
}

pub fn planar_json(pg: &PlaneGraph) -> Value {
    let g = &pg.graph;
    let edges: Vec<[usize; 2]> = g.edges().into_iter().map(|(u, v)| [u, v]).collect();
    let coords: Option<Vec<[f64; 2]>> = pg.coords.as_ref().map(|c| c.iter().map(|&(x, y)| [x, y]).collect());
    json!({ "n": g.n(), "edges": edges, "weights": g.weights, "coords": coords })
}

/// Distinct integer points on an 11 × 11 grid with values in 0..=4.
pub fn polygon(n: usize, seed: u64) -> Result<PointSet> {
    if n == 0 || n > 121 {
        bail!("polygon instances hold 1..=121 points");
    }
    let mut r = rng(seed);
    let mut seen = BTreeSet::new();
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let p = (r.gen_range(0..=10i32), r.gen_range(0..=10i32));
        if seen.insert(p) {
            points.push([p.0 as f64, p.1 as f64]);
        }
    }
    let values = (0..n).map(|_| r.gen_range(0..=4)).collect();
    Ok(PointSet::new(points, values)?)
}

pub fn polygon_json(ps: &PointSet) -> Value {
    let points: Vec<[i64; 2]> = ps.points.iter().map(|p| [p[0] as i64, p[1] as i64]).collect();
    json!({ "points": points, "values": ps.values })
}
