//! Parametric disjunctive timed networks.
//!
//! A network is made of `n` identical copies of a guarded parametric timed
//! automaton (gPTA). Processes communicate only through location guards: an
//! edge guarded by location `l` may be taken when some *other* process
//! currently sits in `l`. Timing constants may be integer parameters.
//!
//! The crate provides:
//! - [`model`]: gPTA syntax, valuations, subclass classification;
//! - [`textfmt`]: the JSON model format, property strings and 2-counter machine programs;
//! - [`semantics`]: concrete network semantics, trace replay, simulation and a region-graph oracle;
//! - [`zone`]: DBM-based symbolic reachability with concrete witness extraction;
//! - [`decide`]: parameter-emptiness procedures (cutoff, fully parametric, L/U, bounded search);
//! - [`twocm`]: 2-counter machines and their compilation into gPTA gadgets;
//! - [`cli`]: the `pdtn` command-line front end.
//!
//! Clock values are exact rationals. The concrete semantics is generic over
//! the [`Scalar`] type; [`Rational`] (`Ratio<i64>`) is the default and
//! [`BigRational`] is available when long simulations need unbounded precision.

pub mod cli;
pub mod decide;
pub mod model;
mod scalar;
pub mod semantics;
pub mod textfmt;
pub mod twocm;
pub mod zone;

pub use scalar::Scalar;

/// Default exact time domain.
pub type Rational = num_rational::Ratio<i64>;
/// Arbitrary-precision time domain.
pub type BigRational = num_rational::BigRational;

pub type ClockValuation = model::ClockValuation<Rational>;
pub type Configuration = semantics::Configuration<Rational>;
pub type ProcState = semantics::ProcState<Rational>;
pub type TimedStep = semantics::TimedStep<Rational>;
pub type Trace = semantics::Trace<Rational>;

pub use decide::{solve, Bounds, Mode, ProblemInstance, Verdict};
pub use model::{Constraint, Edge, GuardedPta, Inequality, LinearExpr, ParamValuation, Relation};
pub use semantics::Goal;
pub use textfmt::PropertyAst;
pub use zone::{reach, ReachOptions, ReachResult, ReachStatus};
