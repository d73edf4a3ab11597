//! Concrete semantics of a network of `n` copies of a valuated gPTA.
//!
//! Processes are numbered from 1 in [`TimedStep::Discrete`] (the trace
//! format) and from 0 in [`Configuration::procs`]. A discrete step of
//! process `i` along an edge with location guard `l` requires some other
//! process `j != i` to be in `l`, and the target invariant must hold after
//! the reset.

mod region;
mod simulate;
mod trace;

use std::fmt;

use thiserror::Error;

use crate::model::{eval_constraint, reset, ClockValuation, GuardedPta, ModelError, ParamValuation};
use crate::textfmt::PropertyAst;
use crate::Scalar;

pub use region::region_reach_oracle;
pub use simulate::simulate;
pub use trace::{TimedStep, Trace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("model must be valuated first (parameters: {0:?})")]
    NotValuated(Vec<String>),
    #[error("network size must be at least 1")]
    EmptyNetwork,
    #[error("the zero valuation violates the invariant of the initial location `{0}`")]
    InitialInvariant(String),
    #[error("process {0} does not exist")]
    NoSuchProcess(usize),
    #[error("edge {0} does not exist")]
    NoSuchEdge(usize),
    #[error("edge {edge} is not enabled for process {proc}")]
    Disabled { proc: usize, edge: usize },
    #[error("delay {0} is not admissible")]
    InadmissibleDelay(String),
    #[error("unknown location `{0}` in goal")]
    UnresolvedLocation(String),
    #[error("bad trace: {0}")]
    BadTrace(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Failure of [`replay`] at step `index` (0-based).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("step {index}: {error}")]
pub struct ReplayError {
    pub index: usize,
    pub error: SemanticsError,
}

/// Outcome of a reachability query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReachStatus {
    Reachable,
    Unreachable,
    BudgetExceeded,
}

impl ReachStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ReachStatus::Reachable => "reachable",
            ReachStatus::Unreachable => "unreachable",
            ReachStatus::BudgetExceeded => "budget-exceeded",
        }
    }
}

impl fmt::Display for ReachStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProcState<T> {
    pub loc: String,
    pub mu: ClockValuation<T>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration<T> {
    pub procs: Vec<ProcState<T>>,
}

impl<T: Scalar> Configuration<T> {
    pub fn n(&self) -> usize {
        self.procs.len()
    }

    pub fn occupies(&self, loc: &str) -> bool {
        self.procs.iter().any(|p| p.loc == loc)
    }

    /// `out.procs[k] = self.procs[perm[k]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Configuration { procs: perm.iter().map(|&k| self.procs[k].clone()).collect() }
    }

    pub fn max_clock(&self) -> T {
        self.procs.iter().map(|p| p.mu.max_value()).max().unwrap_or_else(T::zero)
    }
}

impl<T: Scalar> fmt::Display for Configuration<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.procs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}, {})", p.loc, p.mu)?;
        }
        f.write_str(")")
    }
}

/// Reachability target: a single location, or a global property.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Goal {
    Location(String),
    Property(PropertyAst),
}

impl Goal {
    pub fn location(name: impl Into<String>) -> Self {
        Goal::Location(name.into())
    }

    /// Checks that every location named by the goal exists.
    pub fn resolve(&self, model: &GuardedPta) -> Result<(), SemanticsError> {
        let names = match self {
            Goal::Location(l) => vec![l.as_str()],
            Goal::Property(p) => p.locations(),
        };
        match names.into_iter().find(|l| !model.has_location(l)) {
            Some(l) => Err(SemanticsError::UnresolvedLocation(l.to_string())),
            None => Ok(()),
        }
    }

    /// Evaluates the goal given an occupancy test.
    pub fn holds(&self, occupied: &dyn Fn(&str) -> bool) -> bool {
        match self {
            Goal::Location(l) => occupied(l),
            Goal::Property(p) => p.eval(occupied),
        }
    }

    pub fn holds_in<T: Scalar>(&self, c: &Configuration<T>) -> bool {
        self.holds(&|l| c.occupies(l))
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Location(l) => f.write_str(l),
            Goal::Property(p) => write!(f, "{p}"),
        }
    }
}

pub(crate) fn ensure_valuated(model: &GuardedPta) -> Result<(), SemanticsError> {
    if model.params.is_empty() {
        Ok(())
    } else {
        Err(SemanticsError::NotValuated(model.params.clone()))
    }
}

fn holds<T: Scalar>(c: &crate::model::Constraint, mu: &ClockValuation<T>) -> bool {
    eval_constraint(c, mu, &ParamValuation::new()).expect("valuated, validated model")
}

fn invariant_holds<T: Scalar>(model: &GuardedPta, p: &ProcState<T>) -> bool {
    model.invariant(&p.loc).is_some_and(|inv| holds(inv, &p.mu))
}

/// `n` copies of `(initial, 0)`.
pub fn initial_config<T: Scalar>(model: &GuardedPta, n: usize) -> Result<Configuration<T>, SemanticsError> {
    ensure_valuated(model)?;
    model.ensure_valid()?;
    if n == 0 {
        return Err(SemanticsError::EmptyNetwork);
    }
    let p = ProcState { loc: model.initial.clone(), mu: ClockValuation::zero(&model.clocks) };
    if !invariant_holds(model, &p) {
        return Err(SemanticsError::InitialInvariant(model.initial.clone()));
    }
    Ok(Configuration { procs: vec![p; n] })
}

/// Lets `d` time units elapse. `None` if `d < 0` or some invariant fails
/// somewhere in `[0, d]`. Invariants are conjunctions of single-clock
/// bounds, hence convex along the delay line, so checking both endpoints
/// is exact.
pub fn apply_delay<T: Scalar>(c: &Configuration<T>, d: &T, model: &GuardedPta) -> Option<Configuration<T>> {
    if d.is_negative() {
        return None;
    }
    if c.procs.iter().any(|p| !invariant_holds(model, p)) {
        return None;
    }
    let next = Configuration {
        procs: c.procs.iter().map(|p| ProcState { loc: p.loc.clone(), mu: p.mu.delayed(d) }).collect(),
    };
    next.procs.iter().all(|p| invariant_holds(model, p)).then_some(next)
}

fn discrete_target<T: Scalar>(
    c: &Configuration<T>,
    i: usize,
    edge: usize,
    model: &GuardedPta,
) -> Result<Option<ProcState<T>>, SemanticsError> {
    let p = c.procs.get(i).ok_or(SemanticsError::NoSuchProcess(i + 1))?;
    let e = model.edges.get(edge).ok_or(SemanticsError::NoSuchEdge(edge))?;
    if e.source != p.loc || !holds(&e.guard, &p.mu) {
        return Ok(None);
    }
    if let Some(g) = &e.locguard {
        if !c.procs.iter().enumerate().any(|(j, q)| j != i && &q.loc == g) {
            return Ok(None);
        }
    }
    let next = ProcState { loc: e.target.clone(), mu: reset(&p.mu, &e.resets)? };
    Ok(invariant_holds(model, &next).then_some(next))
}

/// All `(process, edge index)` pairs enabled in `c`, processes 1-based,
/// ordered by process then edge.
pub fn enabled_discrete<T: Scalar>(c: &Configuration<T>, model: &GuardedPta) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..c.n() {
        for k in 0..model.edges.len() {
            if matches!(discrete_target(c, i, k, model), Ok(Some(_))) {
                out.push((i + 1, k));
            }
        }
    }
    out
}

/// Fires edge `edge` in process `proc` (1-based).
pub fn apply_discrete<T: Scalar>(
    c: &Configuration<T>,
    proc: usize,
    edge: usize,
    model: &GuardedPta,
) -> Result<Configuration<T>, SemanticsError> {
    if proc == 0 || proc > c.n() {
        return Err(SemanticsError::NoSuchProcess(proc));
    }
    match discrete_target(c, proc - 1, edge, model)? {
        Some(next) => {
            let mut out = c.clone();
            out.procs[proc - 1] = next;
            Ok(out)
        }
        None => Err(SemanticsError::Disabled { proc, edge }),
    }
}

pub fn eval_property<T: Scalar>(phi: &PropertyAst, c: &Configuration<T>) -> bool {
    phi.eval(&|l| c.occupies(l))
}

/// Applies one step.
pub fn apply_step<T: Scalar>(
    c: &Configuration<T>,
    step: &TimedStep<T>,
    model: &GuardedPta,
) -> Result<Configuration<T>, SemanticsError> {
    match step {
        TimedStep::Delay(d) => apply_delay(c, d, model).ok_or_else(|| SemanticsError::InadmissibleDelay(d.to_string())),
        TimedStep::Discrete { proc, edge } => apply_discrete(c, *proc, *edge, model),
    }
}

/// Every configuration visited by `trace`, starting with the initial one.
pub fn replay_states<T: Scalar>(
    trace: &Trace<T>,
    model: &GuardedPta,
    n: usize,
) -> Result<Vec<Configuration<T>>, ReplayError> {
    let mut states = vec![initial_config(model, n).map_err(|error| ReplayError { index: 0, error })?];
    for (index, step) in trace.steps.iter().enumerate() {
        let next = apply_step(states.last().unwrap(), step, model).map_err(|error| ReplayError { index, error })?;
        states.push(next);
    }
    Ok(states)
}

/// Folds `trace` from the initial configuration of size `n`.
pub fn replay<T: Scalar>(trace: &Trace<T>, model: &GuardedPta, n: usize) -> Result<Configuration<T>, ReplayError> {
    let mut c = initial_config(model, n).map_err(|error| ReplayError { index: 0, error })?;
    for (index, step) in trace.steps.iter().enumerate() {
        c = apply_step(&c, step, model).map_err(|error| ReplayError { index, error })?;
    }
    Ok(c)
}

/// `(total delay, largest clock value)` along a replayable trace. Clocks
/// only grow during delays, so the maximum is attained at a configuration.
pub fn extract_trace_time<T: Scalar>(
    trace: &Trace<T>,
    model: &GuardedPta,
    n: usize,
) -> Result<(T, T), ReplayError> {
    let states = replay_states(trace, model, n)?;
    let max = states.iter().map(|c| c.max_clock()).max().unwrap_or_else(T::zero);
    Ok((trace.total_delay(), max))
}
