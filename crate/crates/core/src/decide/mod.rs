//! Parameter-emptiness procedures.
//!
//! - `PR-e`: is there a valuation `v` and a size `n` such that some process
//!   reaches the target location?
//! - `PGR-e`: same with a global property as target.
//!
//! [`solve`] dispatches on the syntactic class of the model. `Empty` is only
//! returned on routes that decide the question: invariant-free `PR-e` via
//! the `|L|` cutoff, either through the two-valuation test for fully
//! parametric models or the `λ0^∞` reduction for L/U models. Everything else
//! is a bounded witness search that can only prove non-emptiness.

use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::model::{classify, valuate, Constraint, GuardedPta, ModelError, ParamValuation, Relation};
use crate::semantics::{extract_trace_time, replay, Goal, ReachStatus, SemanticsError, Trace};
use crate::zone::{reach, ReachOptions};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("state budget exhausted after {explored} symbolic states")]
    BudgetExhausted { explored: usize },
    #[error("internal error: witness self-check failed: {0}")]
    SelfCheck(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Parametric reachability emptiness (a target location).
    PRe,
    /// Parametric global reachability emptiness (a global property).
    PGRe,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::PRe => "pr-e",
            Mode::PGRe => "pgr-e",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    pub model: GuardedPta,
    pub mode: Mode,
    pub target: Goal,
}

impl ProblemInstance {
    /// Validates the model and resolves the target. `PR-e` needs a location target.
    pub fn new(model: GuardedPta, mode: Mode, target: Goal) -> Result<Self, DecideError> {
        model.ensure_valid()?;
        target.resolve(&model)?;
        if mode == Mode::PRe && !matches!(target, Goal::Location(_)) {
            return Err(DecideError::Precondition("pr-e needs a target location".into()));
        }
        Ok(ProblemInstance { model, mode, target })
    }

    pub fn pr_e(model: GuardedPta, target: &str) -> Result<Self, DecideError> {
        Self::new(model, Mode::PRe, Goal::location(target))
    }

    pub fn pgr_e(model: GuardedPta, target: Goal) -> Result<Self, DecideError> {
        Self::new(model, Mode::PGRe, target)
    }

    fn target_location(&self) -> Option<&str> {
        match (&self.mode, &self.target) {
            (Mode::PRe, Goal::Location(l)) => Some(l),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bounds {
    pub n_max: usize,
    /// Per-parameter cap.
    pub p_max: u64,
    /// Per reachability query.
    pub state_budget: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { n_max: 4, p_max: 4, state_budget: crate::zone::DEFAULT_BUDGET }
    }
}

impl Bounds {
    pub fn to_json(&self) -> Value {
        json!({ "n_max": self.n_max, "p_max": self.p_max, "state_budget": self.state_budget })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Empty,
    NonEmpty { valuation: ParamValuation, n: usize, witness: Trace<Rational> },
    UnknownUpToBounds(Bounds),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub answer: Answer,
    /// Name of the procedure that produced the answer.
    pub method: &'static str,
    /// False whenever the answer is `UnknownUpToBounds`.
    pub exact: bool,
    /// Symbolic states stored over all reachability queries.
    pub explored: usize,
}

impl Verdict {
    fn non_empty(method: &'static str, valuation: ParamValuation, n: usize, witness: Trace<Rational>, explored: usize) -> Self {
        Verdict { answer: Answer::NonEmpty { valuation, n, witness }, method, exact: true, explored }
    }

    fn unknown(method: &'static str, bounds: Bounds, explored: usize) -> Self {
        Verdict { answer: Answer::UnknownUpToBounds(bounds), method, exact: false, explored }
    }

    pub fn is_empty(&self) -> bool {
        self.answer == Answer::Empty
    }

    pub fn is_non_empty(&self) -> bool {
        matches!(self.answer, Answer::NonEmpty { .. })
    }

    pub fn answer_str(&self) -> &'static str {
        match self.answer {
            Answer::Empty => "empty",
            Answer::NonEmpty { .. } => "nonempty",
            Answer::UnknownUpToBounds(_) => "unknown",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "answer": self.answer_str(),
            "exact": self.exact,
            "method": self.method,
            "explored": self.explored,
        });
        match &self.answer {
            Answer::Empty => {}
            Answer::NonEmpty { valuation, n, witness } => {
                v["valuation"] = json!(valuation.as_map());
                v["n"] = json!(n);
                v["witness"] = witness.to_json();
            }
            Answer::UnknownUpToBounds(b) => v["bounds"] = b.to_json(),
        }
        v
    }
}

/// Outcome of [`dtn_reach_no_invariants`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DtnReach {
    /// `n` is the smallest network size that reaches the target.
    Reachable { n: usize, witness: Trace<Rational>, explored: usize },
    Unreachable { explored: usize },
}

/// Reachability of `target` for some network size, in a valuated model
/// without invariants. `|L|` processes suffice, so one query at `n = |L|`
/// decides; the smallest size is then found by descending.
pub fn dtn_reach_no_invariants(model: &GuardedPta, target: &str, budget: usize) -> Result<DtnReach, DecideError> {
    if !model.params.is_empty() {
        return Err(SemanticsError::NotValuated(model.params.clone()).into());
    }
    if model.has_invariants() {
        return Err(DecideError::Precondition("model has invariants".into()));
    }
    let goal = Goal::location(target);
    let opts = query_options(budget);
    let none = ParamValuation::new();
    let cutoff = model.locations.len();
    let r = reach(model, &none, cutoff, &goal, &opts)?;
    let mut explored = r.explored;
    match r.status {
        ReachStatus::Unreachable => return Ok(DtnReach::Unreachable { explored }),
        ReachStatus::BudgetExceeded => return Err(DecideError::BudgetExhausted { explored }),
        ReachStatus::Reachable => {}
    }
    let (mut best_n, mut best) = (cutoff, r.witness.expect("reachable"));
    for n in (1..cutoff).rev() {
        let r = reach(model, &none, n, &goal, &opts)?;
        explored += r.explored;
        match r.witness {
            Some(w) if r.status == ReachStatus::Reachable => (best_n, best) = (n, w),
            _ => break,
        }
    }
    Ok(DtnReach::Reachable { n: best_n, witness: best, explored })
}

/// Two-valuation test for fully parametric models with one parameter:
/// scaling all constants by `k > 0` preserves reachability, so `p = 0` and
/// `p = 1` cover every valuation.
pub fn pr_e_fully_parametric(inst: &ProblemInstance, bounds: &Bounds) -> Result<Verdict, DecideError> {
    const METHOD: &str = "fully-parametric";
    let report = classify(&inst.model)?;
    if !report.fully_parametric || report.param_count != 1 {
        return Err(DecideError::Precondition("needs a fully parametric model with exactly one parameter".into()));
    }
    let p = inst.model.params[0].clone();
    let candidates: Vec<ParamValuation> = (0..=1).map(|k| ParamValuation::new().with(p.clone(), k)).collect();

    match inst.target_location() {
        Some(target) if !report.has_invariants => {
            let mut explored = 0;
            let mut budget_hit = false;
            for v in candidates {
                match dtn_reach_no_invariants(&valuate(&inst.model, &v)?, target, bounds.state_budget) {
                    Ok(DtnReach::Reachable { n, witness, explored: e }) => {
                        return Ok(Verdict::non_empty(METHOD, v, n, witness, explored + e))
                    }
                    Ok(DtnReach::Unreachable { explored: e }) => explored += e,
                    Err(DecideError::BudgetExhausted { explored: e }) => {
                        explored += e;
                        budget_hit = true;
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(if budget_hit {
                Verdict::unknown(METHOD, *bounds, explored)
            } else {
                Verdict { answer: Answer::Empty, method: METHOD, exact: true, explored }
            })
        }
        _ => {
            let found = search(&inst.model, &inst.target, &candidates, bounds)?;
            Ok(match found.hit {
                Some((v, n, w)) => Verdict::non_empty(METHOD, v, n, w, found.explored),
                None => Verdict::unknown(METHOD, *bounds, found.explored),
            })
        }
    }
}

/// Whether an inequality must be dropped under `λ0^∞`: an upper-bound
/// parameter pushes its bound to infinity.
fn deleted_by_infinity(rel: Relation, coef: i64) -> bool {
    (rel.is_upper() && coef > 0) || (rel.is_lower() && coef < 0)
}

/// The `λ0^∞` model of an L/U model: inequalities with an upper-bound
/// parameter are deleted, lower-bound parameters become 0.
pub fn apply_lu_infinity(model: &GuardedPta) -> Result<GuardedPta, DecideError> {
    let report = classify(model)?;
    let (_, upper) = report.lu_partition.ok_or_else(|| DecideError::Precondition("model is not L/U".into()))?;
    let prune = |c: &Constraint| Constraint {
        conjuncts: c
            .conjuncts
            .iter()
            .filter(|i| !upper.iter().any(|u| deleted_by_infinity(i.rel, i.rhs.coefficient(u))))
            .cloned()
            .collect(),
    };
    let mut pruned = model.clone();
    for l in &mut pruned.locations {
        l.invariant = prune(&l.invariant);
    }
    for e in &mut pruned.edges {
        e.guard = prune(&e.guard);
    }
    Ok(valuate(&pruned, &ParamValuation::uniform(&model.params, 0))?)
}

/// Integer that dominates every constant a deleted inequality could need:
/// the magnitude of the smallest constant of the model, and the constants
/// `d` of deleted lower bounds `x ≥ -a·p + d`.
fn lu_slack(model: &GuardedPta, upper: &[String]) -> i64 {
    let smallest = model.inequalities().map(|i| i.rhs.constant_term()).min().unwrap_or(0);
    let deleted_lower = model
        .inequalities()
        .filter(|i| i.rel.is_lower() && upper.iter().any(|u| deleted_by_infinity(i.rel, i.rhs.coefficient(u))))
        .map(|i| i.rhs.constant_term())
        .max()
        .unwrap_or(0);
    smallest.abs().max(deleted_lower)
}

/// L/U procedure: reachability is monotone (smaller lower-bound and larger
/// upper-bound parameters only add behaviour), so the question reduces to
/// the `λ0^∞` model. A witness found there is turned into a concrete
/// valuation `lower ↦ 0, upper ↦ D` with `D = ⌈T⌉ + K + 1`, `T` the largest
/// clock value along the witness and `K` from [`lu_slack`], then re-checked.
pub fn pr_e_lu(inst: &ProblemInstance, bounds: &Bounds) -> Result<Verdict, DecideError> {
    const METHOD: &str = "lu";
    let report = classify(&inst.model)?;
    let (lower, upper) = report.lu_partition.clone().ok_or_else(|| DecideError::Precondition("model is not L/U".into()))?;
    let relaxed = apply_lu_infinity(&inst.model)?;

    let (n, witness, mut explored) = match inst.target_location() {
        Some(target) if !relaxed.has_invariants() => {
            match dtn_reach_no_invariants(&relaxed, target, bounds.state_budget) {
                Ok(DtnReach::Reachable { n, witness, explored }) => (n, witness, explored),
                Ok(DtnReach::Unreachable { explored }) => {
                    return Ok(Verdict { answer: Answer::Empty, method: METHOD, exact: true, explored })
                }
                Err(DecideError::BudgetExhausted { explored }) => return Ok(Verdict::unknown(METHOD, *bounds, explored)),
                Err(e) => return Err(e),
            }
        }
        _ => {
            let found = search(&relaxed, &inst.target, &[ParamValuation::new()], bounds)?;
            match found.hit {
                Some((_, n, w)) => (n, w, found.explored),
                None => return Ok(Verdict::unknown(METHOD, *bounds, found.explored)),
            }
        }
    };

    let (_, t) = extract_trace_time(&witness, &relaxed, n).map_err(|e| DecideError::SelfCheck(e.to_string()))?;
    let t_ceil = t.ceil().to_integer();
    let d = t_ceil + lu_slack(&inst.model, &upper) + 1;
    let mut v_star = ParamValuation::new();
    for p in &lower {
        v_star.set(p.clone(), 0);
    }
    for p in &upper {
        v_star.set(p.clone(), d as u64);
    }

    let concrete = valuate(&inst.model, &v_star)?;
    let end = replay(&witness, &concrete, n).map_err(|e| DecideError::SelfCheck(format!("witness under {v_star}: {e}")))?;
    if !inst.target.holds_in(&end) {
        return Err(DecideError::SelfCheck(format!("witness under {v_star} misses the target")));
    }
    let again = reach(&inst.model, &v_star, n, &inst.target, &query_options(bounds.state_budget))?;
    explored += again.explored;
    match again.witness {
        Some(w) if again.status == ReachStatus::Reachable => {
            let end = replay(&w, &concrete, n).map_err(|e| DecideError::SelfCheck(format!("re-run witness: {e}")))?;
            if !inst.target.holds_in(&end) {
                return Err(DecideError::SelfCheck("re-run witness misses the target".into()));
            }
        }
        _ if again.status == ReachStatus::BudgetExceeded => {}
        _ => return Err(DecideError::SelfCheck(format!("target unreachable under {v_star} with n = {n}"))),
    }
    Ok(Verdict::non_empty(METHOD, v_star, n, witness, explored))
}

struct SearchResult {
    hit: Option<(ParamValuation, usize, Trace<Rational>)>,
    explored: usize,
}

/// All valuations of `params` in `[0, p_max]`, lexicographic in declaration order.
pub fn valuation_box(params: &[String], p_max: u64) -> Vec<ParamValuation> {
    let mut out = vec![ParamValuation::new()];
    for p in params.iter().rev() {
        out = (0..=p_max)
            .flat_map(|k| out.iter().map(move |v| v.clone().with(p.clone(), k)))
            .collect();
    }
    out
}

/// Processes are interchangeable, so every query uses symmetry reduction.
fn query_options(budget: usize) -> ReachOptions {
    ReachOptions { symmetry: true, ..ReachOptions::with_budget(budget) }
}

/// Tries `(n, v)` for `n` in `1..=n_max` (outer) and `v` in `valuations`
/// (inner). Candidates are evaluated in parallel chunks; the first hit in
/// enumeration order wins and `explored` counts the candidates up to it.
fn search(
    model: &GuardedPta,
    goal: &Goal,
    valuations: &[ParamValuation],
    bounds: &Bounds,
) -> Result<SearchResult, DecideError> {
    let candidates: Vec<(usize, &ParamValuation)> =
        (1..=bounds.n_max).flat_map(|n| valuations.iter().map(move |v| (n, v))).collect();
    let opts = query_options(bounds.state_budget);
    let chunk = (rayon::current_num_threads() * 2).max(1);
    let mut explored = 0;
    for group in candidates.chunks(chunk) {
        let results: Vec<_> = group.par_iter().map(|(n, v)| reach(model, v, *n, goal, &opts)).collect();
        for ((n, v), r) in group.iter().zip(results) {
            let r = r?;
            explored += r.explored;
            if let (ReachStatus::Reachable, Some(w)) = (r.status, r.witness) {
                return Ok(SearchResult { hit: Some(((*v).clone(), *n, w)), explored });
            }
        }
    }
    Ok(SearchResult { hit: None, explored })
}

/// Witness search over the box `[0, p_max]^|P|` and sizes `1..=n_max`.
/// Never answers `Empty`.
pub fn bounded_pr_e(inst: &ProblemInstance, bounds: &Bounds) -> Result<Verdict, DecideError> {
    const METHOD: &str = "bounded";
    let found = search(&inst.model, &inst.target, &valuation_box(&inst.model.params, bounds.p_max), bounds)?;
    Ok(match found.hit {
        Some((v, n, w)) => Verdict::non_empty(METHOD, v, n, w, found.explored),
        None => Verdict::unknown(METHOD, *bounds, found.explored),
    })
}

/// Routes to the L/U procedure when an L/U partition exists (parameter-free
/// models included), else to the two-valuation test for fully parametric
/// one-parameter models, else to bounded search.
pub fn solve(inst: &ProblemInstance, bounds: &Bounds) -> Result<Verdict, DecideError> {
    let report = classify(&inst.model)?;
    if report.is_lu() {
        pr_e_lu(inst, bounds)
    } else if report.fully_parametric && report.param_count == 1 {
        pr_e_fully_parametric(inst, bounds)
    } else {
        bounded_pr_e(inst, bounds)
    }
}
