//! Symbolic reachability with difference-bound matrices over the `n·|X|`
//! product clocks, and concrete witness extraction.
//!
//! Product clock `c` of process `q` (0-based) has DBM index `1 + q·|X| + c`.
//! Zones are extrapolated with the largest absolute constant of the
//! valuated model.

mod dbm;
mod reach;
mod witness;

pub use dbm::{bound, is_strict, value, Bound, Dbm, INF, LE_ZERO};
pub use reach::{reach, ReachOptions, ReachResult, DEFAULT_BUDGET};
pub use crate::semantics::{extract_trace_time, ReachStatus};

#[cfg(test)]
mod tests;
