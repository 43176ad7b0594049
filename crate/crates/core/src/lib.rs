//! Diverse and nice optimization.
//!
//! Given a problem with a quality measure, find `k` solutions that are all
//! near-optimal and, among such collections, maximize the sum of pairwise
//! symmetric differences. The generic pieces live in [`framework`]; each
//! problem module supplies a k-best enumeration backend and, where the
//! parameters allow it, an exact diverse solver.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod codes;
pub mod error;
pub mod framework;
pub mod geometry;
pub mod knapsack;
pub mod numeric;
pub mod oracle;
pub mod planar;
pub mod tsp;

pub use error::{Error, Result};
pub use framework::{
    beta, build_score, diversity_sum, local_search, min_pairwise_distance, seed_collection, swap_gain, BcbeBackend,
    BcbeQuery, BcbeResult, GroundSet, ScoreFunction, Solution, SolutionCollection,
};
