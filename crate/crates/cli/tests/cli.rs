#![allow(clippy::needless_range_loop)]

use std::path::PathBuf;
use std::process::{Command, Output};

use nicediv_cli::io;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nicediv"))
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("cli-{name}"))
}

fn write(name: &str, body: &str) -> PathBuf {
    let p = tmp(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn diversity(sols: &[Vec<usize>]) -> u64 {
    let mut d = 0;
    for a in 0..sols.len() {
        for b in a + 1..sols.len() {
            d += sols[a].iter().filter(|x| !sols[b].contains(x)).count() as u64;
            d += sols[b].iter().filter(|x| !sols[a].contains(x)).count() as u64;
        }
    }
    d
}

fn result_json(args: &[&str], name: &str) -> Value {
    let out = tmp(name);
    let mut full: Vec<&str> = args.to_vec();
    let out_s = out.to_str().unwrap().to_string();
    full.extend(["--out", &out_s]);
    let o = run(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let sols: Vec<Vec<usize>> = serde_json::from_value(v["solutions"].clone()).unwrap();
    assert_eq!(v["diversity_sum"].as_u64().unwrap(), diversity(&sols));
    v
}

const I2: &str = r#"{"weights":[2,2,4,4],"profits":[4,4,16,16],"capacity":6}"#;

#[test]
fn knapsack_four_packings() {
    let i2 = write("i2.json", I2);
    let i2 = i2.to_str().unwrap();
    let v = result_json(
        &["knapsack", "--input", i2, "--k", "4", "--c", "1", "--epsilon", "0.5", "--delta", "0.1"],
        "k4.json",
    );
    assert_eq!(v["diversity_sum"], 16);
    assert_eq!(v["problem"], "knapsack");
    let v = result_json(&["knapsack", "--input", i2, "--k", "2", "--epsilon", "0.9", "--check-oracle"], "k2.json");
    assert_eq!(v["diversity_sum"], 4);
    assert_eq!(v["oracle"]["opt_div"], 4);
    assert_eq!(v["oracle"]["meets_local_search_bound"], true);
}

#[test]
fn codes_and_oracle_print_counts() {
    let o = run(&["codes", "--n", "5", "--d", "3", "--route", "direct"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "4");
    let o = run(&["codes", "--n", "4", "--d", "3", "--route", "cut"]);
    assert_eq!(stdout(&o).trim(), "2");
    let i2 = write("oracle-i2.json", I2);
    let o = run(&["oracle", "--input", i2.to_str().unwrap(), "--k", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "OPT_div = 4");
}

#[test]
fn other_solvers_on_small_cases() {
    let k4 = write("k4.json", r#"{"n":4,"lengths":[[0,1,1,1],[1,0,1,1],[1,1,0,1],[1,1,1,0]]}"#);
    let v = result_json(&["tsp", "--input", k4.to_str().unwrap(), "--k", "2", "--check-oracle"], "tsp.json");
    assert_eq!(v["diversity_sum"], 4);

    let c4 = write("c4.json", r#"{"n":4,"edges":[[0,1],[1,2],[2,3],[3,0]],"levels":[1,1,1,1]}"#);
    let v = result_json(&["planar-is", "--input", c4.to_str().unwrap(), "--k", "2"], "is.json");
    assert_eq!(v["diversity_sum"], 4);

    let p3 = write("p3.json", r#"{"n":3,"edges":[[0,1],[1,2]],"levels":[1,1,1]}"#);
    let v = result_json(&["planar-vc", "--input", p3.to_str().unwrap(), "--k", "2", "--delta", "0.1"], "vc.json");
    assert_eq!(v["diversity_sum"], 0);
    assert_eq!(v["solutions"], serde_json::json!([[1], [1]]));

    let sq = write("sq.json", r#"{"points":[[0,0],[1,0],[1,1],[0,1]],"values":[1,1,1,1]}"#);
    let v = result_json(
        &["polygon", "--input", sq.to_str().unwrap(), "--budget", "2", "--k", "2", "--c", "0.5"],
        "poly.json",
    );
    assert!(v["diversity_sum"].as_u64().unwrap() >= 2);
}

#[test]
fn error_exit_codes() {
    let missing = tmp("does-not-exist.json");
    assert_eq!(run(&["knapsack", "--input", missing.to_str().unwrap()]).status.code(), Some(1));
    let bad = write("bad.json", "{ not json");
    assert_eq!(run(&["knapsack", "--input", bad.to_str().unwrap()]).status.code(), Some(1));
    let i2 = write("range-i2.json", I2);
    assert_eq!(run(&["knapsack", "--input", i2.to_str().unwrap(), "--c", "1.5"]).status.code(), Some(1));
    assert_eq!(run(&["codes", "--n", "4", "--d", "2"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let crossing = write("cross.json", r#"{"n":4,"edges":[[0,2],[1,3]],"coords":[[0,0],[1,0],[1,1],[0,1]]}"#);
    assert_eq!(run(&["planar-is", "--input", crossing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn generators_are_deterministic_and_valid() {
    let a = run(&["gen", "knapsack", "--n", "8", "--seed", "7"]);
    let b = run(&["gen", "knapsack", "--n", "8", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, run(&["gen", "knapsack", "--n", "8", "--seed", "8"]).stdout);

    let planar = tmp("gen-planar.json");
    let o = run(&["gen", "planar", "--n", "12", "--seed", "1", "--out", planar.to_str().unwrap()]);
    assert!(o.status.success());
    let pg = io::read_planar(&planar).unwrap();
    assert_eq!(pg.graph.n(), 12);

    let t: Value = serde_json::from_slice(&run(&["gen", "tsp", "--n", "6", "--seed", "3"]).stdout).unwrap();
    let m: Vec<Vec<u64>> = serde_json::from_value(t["lengths"].clone()).unwrap();
    for i in 0..6 {
        assert_eq!(m[i][i], 0);
        for j in 0..6 {
            assert_eq!(m[i][j], m[j][i]);
        }
    }
}

#[test]
fn runs_are_byte_identical() {
    let inst = tmp("det-knapsack.json");
    run(&["gen", "knapsack", "--n", "9", "--seed", "3", "--out", inst.to_str().unwrap()]);
    let args = ["knapsack", "--input", inst.to_str().unwrap(), "--k", "3", "--c", "0.8"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let bench = ["bench", "--cases", "2", "--seed", "5"];
    let a = run(&bench);
    assert!(a.status.success());
    assert_eq!(a.stdout, run(&bench).stdout);
    assert!(stdout(&a).starts_with("problem,case,seed,n,k,c,diversity,opt_div,ratio,meets_bound,quality_ok"));
}
