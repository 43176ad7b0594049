use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use nicediv::codes::{a2, plotkin_bound, Route};
use nicediv::knapsack::{DiverseKnapsackParams, Mode, WeightMode};
use nicediv::planar::{PlanarParams, PlanarProblem};
use serde_json::json;

use nicediv_cli::result::{self, emit, RunResult};
use nicediv_cli::{bench, gen, io, solve};

#[derive(Parser)]
#[command(name = "nicediv", version, about = "Diverse near-optimal solutions for classic optimization problems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Diverse 0/1 knapsack packings.
    Knapsack(KnapsackArgs),
    /// Diverse heavy independent sets of a plane graph.
    PlanarIs(PlanarArgs),
    /// Diverse light vertex covers of a plane graph.
    PlanarVc(PlanarArgs),
    /// Diverse short tours.
    Tsp(Common),
    /// Diverse value-enclosing convex polygons under a perimeter budget.
    Polygon(PolygonArgs),
    /// Largest binary code A₂(n, d) for n/2 < d <= n.
    Codes(CodesArgs),
    /// Exhaustive optimum of the diversity sum on a small instance.
    Oracle(OracleArgs),
    /// Write a random instance.
    Gen(GenArgs),
    /// Random instances against the oracle, as CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Niceness factor in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compare against brute force (small instances only).
    #[arg(long)]
    check_oracle: bool,
    /// Record the wall time in the result.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    LocalSearch,
    Auto,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::LocalSearch => Mode::LocalSearch,
            ModeArg::Auto => Mode::Auto,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Exact,
    Ptas,
}

#[derive(Args)]
struct KnapsackArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Minimum pairwise distance asked of the exact solver.
    #[arg(long, default_value_t = 1)]
    dmin: usize,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "exact")]
    weight_mode: WeightArg,
}

#[derive(Args)]
struct PlanarArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Require pairwise distinct solutions where they exist.
    #[arg(long)]
    distinct: bool,
}

#[derive(Args)]
struct PolygonArgs {
    #[command(flatten)]
    common: Common,
    /// Perimeter budget.
    #[arg(long)]
    budget: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
}

#[derive(Args)]
struct CodesArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value = "direct")]
    route: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// knapsack, planar-is, planar-vc, tsp or polygon; guessed from the file
    /// when absent.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenProblem {
    Knapsack,
    Planar,
    Tsp,
    Polygon,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    problem: GenProblem,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of distinct knapsack profits.
    #[arg(long)]
    collisions: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 10)]
    cases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0.8)]
    c: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn finish(mut r: RunResult, common: &Common, start: Instant) -> Result<()> {
    if common.timing {
        r.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    emit(common.out.as_deref(), &r.to_json()?)
}

fn pretty(v: &serde_json::Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn run(cli: Cli) -> Result<()> {
    let start = Instant::now();
    match cli.cmd {
        Cmd::Knapsack(a) => {
            let inst = io::read_knapsack(&a.common.input)?;
            let mut p = DiverseKnapsackParams::new(a.common.k, a.common.c, a.delta, a.epsilon);
            p.gamma = a.gamma;
            p.d_min = a.dmin;
            p.mode = a.mode.into();
            p.weight_mode = match a.weight_mode {
                WeightArg::Exact => WeightMode::Exact,
                WeightArg::Ptas => WeightMode::Ptas,
            };
            finish(solve::knapsack(&inst, &p, a.common.check_oracle)?, &a.common, start)
        }
        Cmd::PlanarIs(a) => planar(a, PlanarProblem::IndependentSet, start),
        Cmd::PlanarVc(a) => planar(a, PlanarProblem::VertexCover, start),
        Cmd::Tsp(a) => {
            let inst = io::read_tsp(&a.input)?;
            finish(solve::tsp(&inst, a.k, a.c, a.check_oracle)?, &a, start)
        }
        Cmd::Polygon(a) => {
            let ps = io::read_points(&a.common.input)?;
            let c = &a.common;
            finish(solve::polygon(&ps, a.budget, c.k, c.c, a.delta, c.check_oracle)?, c, start)
        }
        Cmd::Codes(a) => {
            let route: Route = a.route.parse()?;
            let count = a2(a.n, a.d, route)?;
            println!("{count}");
            if let Some(out) = &a.out {
                let v = json!({ "n": a.n, "d": a.d, "route": route, "a2": count, "plotkin_bound": plotkin_bound(a.n, a.d) });
                result::write_atomic(out, pretty(&v)?.as_bytes())?;
            }
            Ok(())
        }
        Cmd::Oracle(a) => {
            let problem = match &a.problem {
                Some(p) => p.clone(),
                None => io::sniff(&a.input)?.to_string(),
            };
            let space = solve::oracle_space(&problem, &a.input, a.c, a.budget)?;
            let r = solve::oracle(&problem, &space, a.k, a.c)?;
            println!("OPT_div = {}", r.details["opt_div"]);
            if let Some(out) = &a.out {
                result::write_atomic(out, r.to_json()?.as_bytes())?;
            }
            Ok(())
        }
        Cmd::Gen(a) => {
            let v = match a.problem {
                GenProblem::Knapsack => serde_json::to_value(gen::knapsack(a.n, a.seed, a.collisions)?)?,
                GenProblem::Planar => gen::planar_json(&gen::planar(a.n, a.seed)?),
                GenProblem::Tsp => gen::tsp_json(&gen::tsp(a.n, a.seed)?),
                GenProblem::Polygon => gen::polygon_json(&gen::polygon(a.n, a.seed)?),
            };
            emit(a.out.as_deref(), &pretty(&v)?)
        }
        Cmd::Bench(a) => {
            let rows = bench::run(a.cases, a.seed, a.k, a.c)?;
            emit(a.out.as_deref(), &bench::to_csv(&rows)?)
        }
    }
}

fn planar(a: PlanarArgs, problem: PlanarProblem, start: Instant) -> Result<()> {
    let pg = io::read_planar(&a.common.input)?;
    let mut p = PlanarParams::new(a.common.k, a.common.c, a.delta, a.epsilon, problem);
    p.mode = a.mode.into();
    p.distinct = a.distinct;
    finish(solve::planar(&pg, &p, a.common.check_oracle)?, &a.common, start)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let infeasible =
        e.chain().any(|c| matches!(c.downcast_ref::<nicediv::Error>(), Some(nicediv::Error::Infeasible(_))));
    if infeasible {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
