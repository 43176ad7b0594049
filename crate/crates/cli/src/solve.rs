//! Solver runs with re-validation and the optional oracle comparison.

use anyhow::{bail, Context, Result};
use nicediv::geometry::{
    best_enclosure, diverse_polygons, enclosure, hull_perimeter, PointSet, PolygonInstance, LENGTH_TOL,
};
use nicediv::knapsack::{diverse_knapsack, DiverseKnapsackParams, KnapsackInstance, WeightMode};
use nicediv::numeric::{ge_tol, le_tol};
use nicediv::oracle::{enumerate_all, enumerate_feasible, opt_div_bruteforce, FeasibleSpace, Problem, Sense};
use nicediv::planar::{diverse_planar, IndependentSets, PlanarParams, PlanarProblem, PlaneGraph, VertexCovers};
use nicediv::tsp::{diverse_tsp, held_karp, tour_space, TspInstance};
use nicediv::Solution;
use serde_json::json;

use crate::result::{OracleReport, RunResult};

fn best_quality(qs: &[f64], sense: Sense) -> u64 {
    let it = qs.iter().copied();
    let v = match sense {
        Sense::Maximize => it.fold(f64::MIN, f64::max),
        Sense::Minimize => it.fold(f64::MAX, f64::min),
    };
    v.round() as u64
}

fn report(
    space: &FeasibleSpace,
    opt_value: u64,
    r: &RunResult,
    k: usize,
    ok: impl Fn(f64) -> bool,
) -> Result<OracleReport> {
    let opt_div = if space.is_empty() { 0 } else { opt_div_bruteforce(space, k)?.0 };
    Ok(OracleReport {
        space_size: space.len(),
        opt_value,
        opt_div,
        meets_local_search_bound: OracleReport::meets(k, r.diversity_sum, opt_div),
        qualities_within_guarantee: r.qualities.iter().all(|&q| ok(q as f64)),
    })
}

fn problem_report<P: Problem>(
    p: &P,
    c: f64,
    r: &RunResult,
    k: usize,
    ok: impl Fn(f64, f64) -> bool,
) -> Result<OracleReport> {
    let opt = best_quality(enumerate_all(p)?.qualities(), p.sense());
    let space = enumerate_feasible(p, c)?;
    report(&space, opt, r, k, |q| ok(q, opt as f64))
}

pub fn knapsack(inst: &KnapsackInstance, p: &DiverseKnapsackParams, oracle: bool) -> Result<RunResult> {
    let out = diverse_knapsack(inst, p)?;
    let limit = match p.weight_mode {
        WeightMode::Exact => inst.capacity as f64,
        WeightMode::Ptas => (1.0 + p.gamma) * inst.capacity as f64,
    };
    for s in out.collection.solutions() {
        s.check(inst.n())?;
        if inst.weight(s) as f64 > limit * (1.0 + 1e-12) {
            bail!("packing {:?} exceeds the weight limit", s.members());
        }
        if let Some(sc) = &out.scaled {
            let u: u64 = s.members().iter().map(|&i| sc.profits[i]).sum();
            if u < sc.u_threshold {
                bail!("packing {:?} is below the profit floor", s.members());
            }
        }
    }
    let qualities = out.collection.solutions().iter().map(|s| inst.profit(s)).collect();
    let mut r = RunResult::new("knapsack", serde_json::to_value(p)?, &out.collection, qualities);
    r.details = json!({
        "used_exact": out.used_exact,
        "empty_warning": out.empty_warning,
        "reference_profit": inst.profit(&out.reference),
        "scaled_profit_floor": out.scaled.as_ref().map(|s| s.u_threshold),
    });
    if oracle {
        let f = (1.0 - p.delta) * p.c;
        r.oracle = Some(problem_report(inst, p.c, &r, p.k, |q, opt| ge_tol(q, f * opt))?);
    }
    r.check_consistency()?;
    Ok(r)
}

pub fn planar(pg: &PlaneGraph, p: &PlanarParams, oracle: bool) -> Result<RunResult> {
    let g = &pg.graph;
    let out = diverse_planar(pg, p)?;
    let is = p.problem == PlanarProblem::IndependentSet;
    for s in out.collection.solutions() {
        s.check(g.n())?;
        let w = g.weight(s);
        if is && (!g.is_independent(s) || out.bound.is_some_and(|b| w < b)) {
            bail!("set {:?} is not a qualifying independent set", s.members());
        }
        if !is && (!g.is_cover(s) || out.bound.is_some_and(|b| w > b)) {
            bail!("set {:?} is not a qualifying vertex cover", s.members());
        }
    }
    let qualities = out.collection.solutions().iter().map(|s| g.weight(s)).collect();
    let tag = if is { "planar-is" } else { "planar-vc" };
    let mut r = RunResult::new(tag, serde_json::to_value(p)?, &out.collection, qualities);
    r.details = json!({
        "p": out.p,
        "ell": out.ell,
        "used_exact": out.used_exact,
        "bound": out.bound,
        "marginal_strata": out.report.marginal(),
    });
    if oracle {
        let f = (1.0 - p.delta) * p.c;
        r.oracle = Some(if is {
            problem_report(&IndependentSets(g), p.c, &r, p.k, |q, opt| ge_tol(q, f * opt))?
        } else {
            problem_report(&VertexCovers(g), p.c, &r, p.k, |q, opt| le_tol(q, opt / f))?
        });
    }
    r.check_consistency()?;
    Ok(r)
}

pub fn tsp(inst: &TspInstance, k: usize, c: f64, oracle: bool) -> Result<RunResult> {
    let col = diverse_tsp(inst, k, c)?;
    let (opt, _) = held_karp(inst)?;
    let mut tours = Vec::new();
    let mut qualities = Vec::new();
    for s in col.solutions() {
        let tour = inst.tour_of(s).with_context(|| format!("edge set {:?} is not a tour", s.members()))?;
        let len = inst.tour_length(&tour);
        if !le_tol(len as f64, opt as f64 / c) {
            bail!("tour {:?} is longer than the niceness allows", tour.order);
        }
        qualities.push(len);
        tours.push(tour.order);
    }
    let mut r = RunResult::new("tsp", json!({ "k": k, "c": c }), &col, qualities);
    r.details = json!({ "optimal_length": opt, "tours": tours });
    if oracle {
        let space = tour_space(inst, c)?;
        r.oracle = Some(report(&space, opt, &r, k, |q| le_tol(q, opt as f64 / c))?);
    }
    r.check_consistency()?;
    Ok(r)
}

pub fn polygon(ps: &PointSet, budget: f64, k: usize, c: f64, delta: f64, oracle: bool) -> Result<RunResult> {
    let col = diverse_polygons(ps, budget, k, c, delta)?;
    let (_, reference) = best_enclosure(ps, budget, delta / 2.0)?;
    let floor = (1.0 - delta) * c * reference as f64;
    let mut perimeters = Vec::new();
    for s in col.solutions() {
        s.check(ps.n())?;
        if enclosure(ps, s) != *s {
            bail!("point set {:?} is not closed under enclosure", s.members());
        }
        let per = if s.is_empty() { 0.0 } else { hull_perimeter(ps, s)? };
        if per > budget * (1.0 + LENGTH_TOL) + LENGTH_TOL || !ge_tol(ps.value(s) as f64, floor) {
            bail!("enclosure {:?} misses the budget or the value floor", s.members());
        }
        perimeters.push(per);
    }
    let qualities = col.solutions().iter().map(|s| ps.value(s)).collect();
    let params = json!({ "k": k, "c": c, "delta": delta, "budget": budget });
    let mut r = RunResult::new("polygon", params, &col, qualities);
    r.details = json!({ "perimeters": perimeters, "reference_value": reference });
    if oracle {
        let f = (1.0 - delta) * c;
        let inst = PolygonInstance { points: ps.clone(), budget };
        r.oracle = Some(problem_report(&inst, c, &r, k, |q, opt| ge_tol(q, f * opt))?);
    }
    r.check_consistency()?;
    Ok(r)
}

/// The exhaustive optimum of the diversity sum over c-optimal solutions.
pub fn oracle_space(problem: &str, path: &std::path::Path, c: f64, budget: Option<f64>) -> Result<FeasibleSpace> {
    use crate::io;
    Ok(match problem {
        "knapsack" => enumerate_feasible(&io::read_knapsack(path)?, c)?,
        "planar-is" => enumerate_feasible(&IndependentSets(&io::read_planar(path)?.graph), c)?,
        "planar-vc" => enumerate_feasible(&VertexCovers(&io::read_planar(path)?.graph), c)?,
        "tsp" => tour_space(&io::read_tsp(path)?, c)?,
        "polygon" => {
            let budget = budget.context("polygon instances need --budget")?;
            enumerate_feasible(&PolygonInstance { points: io::read_points(path)?, budget }, c)?
        }
        other => bail!("unknown problem {other:?}"),
    })
}

pub fn oracle(problem: &str, space: &FeasibleSpace, k: usize, c: f64) -> Result<RunResult> {
    if space.is_empty() {
        return Err(nicediv::Error::Infeasible("no feasible solution".into()).into());
    }
    let (opt_div, col) = opt_div_bruteforce(space, k)?;
    let quality = |s: &Solution| {
        let i = space.solutions().iter().position(|t| t == s).expect("member of the space");
        space.qualities()[i].round() as u64
    };
    let qualities = col.solutions().iter().map(quality).collect();
    let mut r = RunResult::new(problem, json!({ "k": k, "c": c }), &col, qualities);
    r.details = json!({ "opt_div": opt_div, "space_size": space.len() });
    r.check_consistency()?;
    Ok(r)
}
