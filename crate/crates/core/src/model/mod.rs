//! Guarded parametric timed automata (gPTA): syntax, valuations and
//! syntactic subclasses.

mod classify;
mod lower;
mod valuation;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

pub use classify::{classify, ClassReport};
pub use lower::{Atom, LoweredEdge, LoweredTa};
pub use valuation::{eval_constraint, reset, valuate, ClockValuation, ParamValuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("model is not well-formed: {}", join_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("no value for parameter `{0}`")]
    MissingParameter(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("no value for clock `{0}`")]
    MissingClock(String),
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error("model still has parameters: {0:?}")]
    NotValuated(Vec<String>),
}

fn join_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

/// Comparison operator of an inequality `x ⋈ e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub const ALL: [Relation; 5] = [Relation::Lt, Relation::Le, Relation::Eq, Relation::Ge, Relation::Gt];

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "<" => Relation::Lt,
            "<=" | "≤" => Relation::Le,
            "=" | "==" => Relation::Eq,
            ">=" | "≥" => Relation::Ge,
            ">" => Relation::Gt,
            _ => return None,
        })
    }

    pub fn holds<T: Ord + ?Sized>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    /// True for `<`, `<=` (the clock is bounded from above).
    pub fn is_upper(self) -> bool {
        matches!(self, Relation::Lt | Relation::Le)
    }

    /// True for `>`, `>=` (the clock is bounded from below).
    pub fn is_lower(self) -> bool {
        matches!(self, Relation::Gt | Relation::Ge)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coef: i64,
    pub param: String,
}

/// `Σ coef·param + constant`, kept canonical: each parameter at most once,
/// no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LinearExpr {
    terms: Vec<Term>,
    constant: i64,
}

impl LinearExpr {
    pub fn constant(constant: i64) -> Self {
        LinearExpr { terms: Vec::new(), constant }
    }

    pub fn param(name: impl Into<String>) -> Self {
        Self::new([(1, name.into())], 0)
    }

    /// Merges repeated parameters (first occurrence fixes the position) and
    /// drops zero coefficients.
    pub fn new<S: Into<String>>(terms: impl IntoIterator<Item = (i64, S)>, constant: i64) -> Self {
        let mut merged: Vec<Term> = Vec::new();
        for (coef, param) in terms {
            let param = param.into();
            match merged.iter_mut().find(|t| t.param == param) {
                Some(t) => t.coef += coef,
                None => merged.push(Term { coef, param }),
            }
        }
        merged.retain(|t| t.coef != 0);
        LinearExpr { terms: merged, constant }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn constant_term(&self) -> i64 {
        self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, param: &str) -> i64 {
        self.terms.iter().find(|t| t.param == param).map_or(0, |t| t.coef)
    }

    pub fn evaluate(&self, v: &ParamValuation) -> Result<i64, ModelError> {
        let mut acc = self.constant;
        for t in &self.terms {
            let value = v.get(&t.param).ok_or_else(|| ModelError::MissingParameter(t.param.clone()))?;
            acc += t.coef * value as i64;
        }
        Ok(acc)
    }
}

impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for t in &self.terms {
            let (sign, mag) = if t.coef < 0 { ("-", -t.coef) } else { ("+", t.coef) };
            match (first, sign) {
                (true, "-") => f.write_str("-")?,
                (true, _) => {}
                (false, s) => write!(f, " {s} ")?,
            }
            if mag == 1 {
                write!(f, "{}", t.param)?;
            } else {
                write!(f, "{mag}*{}", t.param)?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant > 0 {
            write!(f, " + {}", self.constant)
        } else if self.constant < 0 {
            write!(f, " - {}", -self.constant)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub clock: String,
    pub rel: Relation,
    pub rhs: LinearExpr,
}

impl Inequality {
    pub fn new(clock: impl Into<String>, rel: Relation, rhs: LinearExpr) -> Self {
        Inequality { clock: clock.into(), rel, rhs }
    }

    pub fn constant(clock: impl Into<String>, rel: Relation, c: i64) -> Self {
        Self::new(clock, rel, LinearExpr::constant(c))
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.clock, self.rel, self.rhs)
    }
}

/// Conjunction of inequalities; the empty conjunction is `True`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Constraint {
    pub conjuncts: Vec<Inequality>,
}

impl Constraint {
    pub fn truth() -> Self {
        Constraint::default()
    }

    pub fn of(conjuncts: impl IntoIterator<Item = Inequality>) -> Self {
        Constraint { conjuncts: conjuncts.into_iter().collect() }
    }

    pub fn is_true(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn and(mut self, ineq: Inequality) -> Self {
        self.conjuncts.push(ineq);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = &Inequality> {
        self.conjuncts.iter()
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conjuncts.is_empty() {
            return f.write_str("true");
        }
        for (i, c) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" && ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: String,
    pub guard: Constraint,
    /// `None` is the trivial location guard.
    pub locguard: Option<String>,
    pub action: String,
    pub resets: Vec<String>,
    pub target: String,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Edge {
            source: source.into(),
            guard: Constraint::truth(),
            locguard: None,
            action: "a".to_string(),
            resets: Vec::new(),
            target: target.into(),
        }
    }

    pub fn guard(mut self, guard: Constraint) -> Self {
        self.guard = guard;
        self
    }

    pub fn locguard(mut self, loc: impl Into<String>) -> Self {
        self.locguard = Some(loc.into());
        self
    }

    pub fn action(mut self, action: impl Into<String>) -> Self {
        self.action = action.into();
        self
    }

    pub fn reset<S: Into<String>>(mut self, clocks: impl IntoIterator<Item = S>) -> Self {
        for c in clocks {
            let c = c.into();
            if !self.resets.contains(&c) {
                self.resets.push(c);
            }
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Location {
    pub name: String,
    pub invariant: Constraint,
}

/// A gPTA. Invariants live on [`Location`]s; a location without one has `True`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GuardedPta {
    pub name: String,
    pub locations: Vec<Location>,
    pub initial: String,
    pub clocks: Vec<String>,
    pub params: Vec<String>,
    pub edges: Vec<Edge>,
}

impl GuardedPta {
    /// Empty model; the first location added becomes initial unless
    /// [`GuardedPta::initial`] is set explicitly.
    pub fn new<C: Into<String>, P: Into<String>>(
        name: impl Into<String>,
        clocks: impl IntoIterator<Item = C>,
        params: impl IntoIterator<Item = P>,
    ) -> Self {
        GuardedPta {
            name: name.into(),
            locations: Vec::new(),
            initial: String::new(),
            clocks: clocks.into_iter().map(Into::into).collect(),
            params: params.into_iter().map(Into::into).collect(),
            edges: Vec::new(),
        }
    }

    pub fn add_location(&mut self, name: impl Into<String>, invariant: Constraint) -> &mut Self {
        let name = name.into();
        if self.initial.is_empty() {
            self.initial = name.clone();
        }
        self.locations.push(Location { name, invariant });
        self
    }

    pub fn add_edge(&mut self, edge: Edge) -> &mut Self {
        self.edges.push(edge);
        self
    }

    pub fn actions(&self) -> BTreeSet<String> {
        self.edges.iter().map(|e| e.action.clone()).collect()
    }

    pub fn location(&self, name: &str) -> Option<&Location> {
        self.locations.iter().find(|l| l.name == name)
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l.name == name)
    }

    pub fn has_location(&self, name: &str) -> bool {
        self.location(name).is_some()
    }

    pub fn invariant(&self, loc: &str) -> Option<&Constraint> {
        self.location(loc).map(|l| &l.invariant)
    }

    pub fn has_invariants(&self) -> bool {
        self.locations.iter().any(|l| !l.invariant.is_true())
    }

    /// Every constraint of the model, invariants first, then guards in edge order.
    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.locations.iter().map(|l| &l.invariant).chain(self.edges.iter().map(|e| &e.guard))
    }

    pub fn inequalities(&self) -> impl Iterator<Item = &Inequality> {
        self.constraints().flat_map(|c| c.conjuncts.iter())
    }

    /// Copy with every invariant replaced by `True`.
    pub fn without_invariants(&self) -> GuardedPta {
        let mut m = self.clone();
        for l in &mut m.locations {
            l.invariant = Constraint::truth();
        }
        m
    }

    /// Well-formedness check. Empty result iff the model is well-formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        validate(self)
    }

    pub fn ensure_valid(&self) -> Result<(), ModelError> {
        let d = validate(self);
        if d.is_empty() {
            Ok(())
        } else {
            Err(ModelError::Invalid(d))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    /// The offending name (location, clock, parameter, ...).
    pub element: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`: {}", self.element, self.message)
    }
}

pub fn validate(model: &GuardedPta) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |element: &str, message: String| {
        out.push(Diagnostic { element: element.to_string(), message })
    };

    let mut seen = HashSet::new();
    for l in &model.locations {
        if !seen.insert(l.name.as_str()) {
            diag(&l.name, "location declared twice".into());
        }
    }
    let mut seen = HashSet::new();
    for c in &model.clocks {
        if !seen.insert(c.as_str()) {
            diag(c, "clock declared twice".into());
        }
    }
    let mut seen = HashSet::new();
    for p in &model.params {
        if !seen.insert(p.as_str()) {
            diag(p, "parameter declared twice".into());
        }
        if model.clocks.contains(p) {
            diag(p, "name used both as clock and parameter".into());
        }
    }
    if model.locations.is_empty() {
        diag(&model.name, "model has no locations".into());
    }
    if !model.has_location(&model.initial) {
        diag(&model.initial, "initial location is not declared".into());
    }

    let check_constraint = |ctx: &str, c: &Constraint, diag: &mut dyn FnMut(&str, String)| {
        for ineq in &c.conjuncts {
            if !model.clocks.contains(&ineq.clock) {
                diag(&ineq.clock, format!("undeclared clock in {ctx}"));
            }
            let mut params = HashSet::new();
            for t in ineq.rhs.terms() {
                if !model.params.contains(&t.param) {
                    diag(&t.param, format!("undeclared parameter in {ctx}"));
                }
                if !params.insert(t.param.as_str()) {
                    diag(&t.param, format!("parameter repeated in one expression in {ctx}"));
                }
                if t.coef == 0 {
                    diag(&t.param, format!("zero coefficient in {ctx}"));
                }
            }
        }
    };

    for l in &model.locations {
        check_constraint(&format!("invariant of `{}`", l.name), &l.invariant, &mut diag);
    }
    for (i, e) in model.edges.iter().enumerate() {
        let ctx = format!("edge #{i} ({} -> {})", e.source, e.target);
        for (what, name) in [("source", &e.source), ("target", &e.target)] {
            if !model.has_location(name) {
                diag(name, format!("undeclared {what} location of {ctx}"));
            }
        }
        if let Some(g) = &e.locguard {
            if !model.has_location(g) {
                diag(g, format!("undeclared location guard of {ctx}"));
            }
        }
        let mut resets = HashSet::new();
        for r in &e.resets {
            if !model.clocks.contains(r) {
                diag(r, format!("reset of undeclared clock in {ctx}"));
            } else if !resets.insert(r.as_str()) {
                diag(r, format!("clock reset twice in {ctx}"));
            }
        }
        check_constraint(&format!("guard of {ctx}"), &e.guard, &mut diag);
    }
    out
}
