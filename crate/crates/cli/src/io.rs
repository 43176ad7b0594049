//! Instance files.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use nicediv::geometry::PointSet;
use nicediv::knapsack::KnapsackInstance;
use nicediv::numeric::Ratio;
use nicediv::planar::{GraphJson, PlaneGraph};
use nicediv::tsp::{TspInstance, TspJson};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Number, Value};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed instance {}", path.display()))
}

#[derive(Deserialize)]
struct KnapsackJson {
    weights: Vec<Number>,
    profits: Vec<Number>,
    capacity: Number,
}

/// Integers are taken as they are; any fractional entry switches to exact
/// rational scaling of the whole instance.
pub fn read_knapsack(path: &Path) -> Result<KnapsackInstance> {
    let j: KnapsackJson = read_json(path)?;
    let ints = |v: &[Number]| v.iter().map(Number::as_u64).collect::<Option<Vec<u64>>>();
    if let (Some(w), Some(p), Some(c)) = (ints(&j.weights), ints(&j.profits), j.capacity.as_u64()) {
        return Ok(KnapsackInstance::new(w, p, c)?);
    }
    let ratio = |x: &Number| -> Result<Ratio> {
        let f = x.as_f64().context("number out of range")?;
        Ok(Ratio::from_decimal(f)?)
    };
    let w = j.weights.iter().map(ratio).collect::<Result<Vec<_>>>()?;
    let p = j.profits.iter().map(ratio).collect::<Result<Vec<_>>>()?;
    Ok(KnapsackInstance::from_ratios(&w, &p, ratio(&j.capacity)?)?)
}

pub fn read_planar(path: &Path) -> Result<PlaneGraph> {
    Ok(PlaneGraph::from_json(&read_json::<GraphJson>(path)?)?)
}

pub fn read_tsp(path: &Path) -> Result<TspInstance> {
    Ok(TspInstance::from_json(&read_json::<TspJson>(path)?)?)
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    let ps: PointSet = read_json(path)?;
    ps.validate()?;
    Ok(ps)
}

/// Which problem an instance file describes, judged by its keys.
pub fn sniff(path: &Path) -> Result<&'static str> {
    let v: Value = read_json(path)?;
    let has = |k: &str| v.get(k).is_some();
    Ok(if has("weights") && has("capacity") {
        "knapsack"
    } else if has("points") {
        "polygon"
    } else if has("lengths") {
        "tsp"
    } else if has("edges") {
        "planar-is"
    } else {
        anyhow::bail!("cannot tell the problem of {}; pass --problem", path.display())
    })
}
