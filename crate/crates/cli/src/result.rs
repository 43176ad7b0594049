use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nicediv::{diversity_sum, Solution, SolutionCollection};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Brute-force comparison attached when `--check-oracle` is given.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    /// Number of c-optimal solutions the oracle enumerated.
    pub space_size: usize,
    /// Best single-solution quality.
    pub opt_value: u64,
    pub opt_div: u64,
    /// `diversity_sum >= (1 - 2/(k+1)) * opt_div`, checked in integers.
    pub meets_local_search_bound: bool,
    /// Every emitted quality is within the solver's stated factor of
    /// `opt_value`.
    pub qualities_within_guarantee: bool,
}

impl OracleReport {
    pub fn meets(k: usize, diversity: u64, opt_div: u64) -> bool {
        let k = k as u128;
        diversity as u128 * (k + 1) >= opt_div as u128 * (k.max(1) - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub problem: String,
    pub params: Value,
    pub solutions: Vec<Vec<usize>>,
    pub qualities: Vec<u64>,
    pub diversity_sum: u64,
    /// Absent for a single solution.
    pub min_pairwise_distance: Option<usize>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunResult {
    pub fn new(problem: &str, params: Value, col: &SolutionCollection, qualities: Vec<u64>) -> RunResult {
        let sols = col.solutions();
        let min = (sols.len() >= 2).then(|| {
            (0..sols.len())
                .flat_map(|i| (i + 1..sols.len()).map(move |j| (i, j)))
                .map(|(i, j)| sols[i].sym_diff(&sols[j]))
                .min()
                .unwrap_or(0)
        });
        RunResult {
            problem: problem.to_string(),
            params,
            solutions: sols.iter().map(|s| s.members().to_vec()).collect(),
            qualities,
            diversity_sum: diversity_sum(col),
            min_pairwise_distance: min,
            details: Value::Null,
            oracle: None,
            wall_time_ms: None,
        }
    }

    /// Recomputes the diversity figures from the solution lists.
    pub fn check_consistency(&self) -> Result<()> {
        if self.qualities.len() != self.solutions.len() {
            bail!("one quality per solution expected");
        }
        let sols: Vec<Solution> = self.solutions.iter().map(|s| Solution::new(s.iter().copied())).collect();
        let mut sum = 0u64;
        let mut min: Option<usize> = None;
        for i in 0..sols.len() {
            for j in i + 1..sols.len() {
                let d = sols[i].sym_diff(&sols[j]);
                sum += d as u64;
                min = Some(min.map_or(d, |m| m.min(d)));
            }
        }
        if sum != self.diversity_sum || min != self.min_pairwise_distance {
            bail!("diversity figures do not match the solution lists");
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let mut f = fs::File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?;
    f.write_all(contents)?;
    f.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// To `path` when given, otherwise stdout.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, contents.as_bytes()),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}
