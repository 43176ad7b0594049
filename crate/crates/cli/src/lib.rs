//! Instance I/O, generators, validated solver runs and the benchmark
//! harness behind the `nicediv` command.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod bench;
pub mod gen;
pub mod io;
pub mod result;
pub mod solve;
