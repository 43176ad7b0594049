//! Random small instances solved and compared against the oracle.

use anyhow::Result;
use nicediv::knapsack::DiverseKnapsackParams;
use nicediv::planar::{PlanarParams, PlanarProblem};
use serde::Serialize;

use crate::result::RunResult;
use crate::{gen, solve};

#[derive(Debug, Serialize)]
pub struct Row {
    pub problem: String,
    pub case: usize,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub c: f64,
    pub diversity: u64,
    pub opt_div: u64,
    pub ratio: String,
    pub meets_bound: bool,
    pub quality_ok: bool,
}

fn row(r: &RunResult, case: usize, seed: u64, n: usize, k: usize, c: f64) -> Row {
    let o = r.oracle.as_ref().expect("bench runs with the oracle");
    let ratio = match o.opt_div {
        0 => "NA".to_string(),
        d => format!("{:.6}", r.diversity_sum as f64 / d as f64),
    };
    Row {
        problem: r.problem.clone(),
        case,
        seed,
        n,
        k,
        c,
        diversity: r.diversity_sum,
        opt_div: o.opt_div,
        ratio,
        meets_bound: o.meets_local_search_bound,
        quality_ok: o.qualities_within_guarantee,
    }
}

pub fn run(cases: usize, seed: u64, k: usize, c: f64) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for case in 0..cases {
        let s = seed + case as u64;
        let inst = gen::knapsack(8, s, None)?;
        let r = solve::knapsack(&inst, &DiverseKnapsackParams::new(k, c, 0.1, 0.5), true)?;
        rows.push(row(&r, case, s, 8, k, c));

        let pg = gen::planar(9, s)?;
        let r = solve::planar(&pg, &PlanarParams::new(k, c, 0.5, 0.5, PlanarProblem::IndependentSet), true)?;
        rows.push(row(&r, case, s, 9, k, c));

        let t = gen::tsp(6, s)?;
        let r = solve::tsp(&t, k, c, true)?;
        rows.push(row(&r, case, s, 6, k, c));

        let ps = gen::polygon(7, s)?;
        let r = solve::polygon(&ps, 20.0, k, c, 0.1, true)?;
        rows.push(row(&r, case, s, 7, k, c));
    }
    Ok(rows)
}

pub fn to_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
