use std::collections::BTreeMap;
use std::fmt;

use super::{Constraint, GuardedPta, Inequality, LinearExpr, Location, ModelError};
use crate::{Rational, Scalar};

/// Assignment of non-negative integers to parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ParamValuation(BTreeMap<String, u64>);

impl ParamValuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, param: &str) -> Option<u64> {
        self.0.get(param).copied()
    }

    pub fn set(&mut self, param: impl Into<String>, value: u64) -> &mut Self {
        self.0.insert(param.into(), value);
        self
    }

    pub fn with(mut self, param: impl Into<String>, value: u64) -> Self {
        self.set(param, value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn as_map(&self) -> &BTreeMap<String, u64> {
        &self.0
    }

    /// The same value for every parameter in `params`.
    pub fn uniform<S: AsRef<str>>(params: &[S], value: u64) -> Self {
        ParamValuation(params.iter().map(|p| (p.as_ref().to_string(), value)).collect())
    }

    /// Checks that the domain is exactly `params`.
    pub fn check_domain(&self, params: &[String]) -> Result<(), ModelError> {
        if let Some(p) = params.iter().find(|p| !self.0.contains_key(*p)) {
            return Err(ModelError::MissingParameter(p.clone()));
        }
        if let Some(p) = self.0.keys().find(|k| !params.contains(k)) {
            return Err(ModelError::UnknownParameter(p.clone()));
        }
        Ok(())
    }
}

impl FromIterator<(String, u64)> for ParamValuation {
    fn from_iter<I: IntoIterator<Item = (String, u64)>>(iter: I) -> Self {
        ParamValuation(iter.into_iter().collect())
    }
}

impl fmt::Display for ParamValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Assignment of non-negative exact values to clocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClockValuation<T = Rational> {
    values: BTreeMap<String, T>,
}

impl<T: Scalar> ClockValuation<T> {
    /// All clocks at zero.
    pub fn zero<S: AsRef<str>>(clocks: &[S]) -> Self {
        ClockValuation { values: clocks.iter().map(|c| (c.as_ref().to_string(), T::zero())).collect() }
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, T)>) -> Self {
        let values: BTreeMap<String, T> = pairs.into_iter().map(|(k, v)| (k.into(), v)).collect();
        debug_assert!(values.values().all(|v| !v.is_negative()));
        ClockValuation { values }
    }

    pub fn get(&self, clock: &str) -> Option<&T> {
        self.values.get(clock)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &T)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// `μ + d`.
    pub fn delayed(&self, d: &T) -> Self {
        ClockValuation { values: self.values.iter().map(|(k, v)| (k.clone(), v.clone() + d.clone())).collect() }
    }

    pub fn max_value(&self) -> T {
        self.values.values().cloned().max().unwrap_or_else(T::zero)
    }
}

impl<T: Scalar> fmt::Display for ClockValuation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

/// Replaces every parameter occurrence by its value; the result has no parameters.
pub fn valuate(model: &GuardedPta, v: &ParamValuation) -> Result<GuardedPta, ModelError> {
    v.check_domain(&model.params)?;
    let subst = |c: &Constraint| -> Result<Constraint, ModelError> {
        c.conjuncts
            .iter()
            .map(|i| Ok(Inequality::new(i.clock.clone(), i.rel, LinearExpr::constant(i.rhs.evaluate(v)?))))
            .collect::<Result<Vec<_>, _>>()
            .map(|conjuncts| Constraint { conjuncts })
    };
    let mut out = model.clone();
    out.params.clear();
    out.locations = model
        .locations
        .iter()
        .map(|l| Ok(Location { name: l.name.clone(), invariant: subst(&l.invariant)? }))
        .collect::<Result<_, ModelError>>()?;
    for (e, orig) in out.edges.iter_mut().zip(&model.edges) {
        e.guard = subst(&orig.guard)?;
    }
    Ok(out)
}

/// Whether `μ ⊨ v(C)`.
pub fn eval_constraint<T: Scalar>(
    c: &Constraint,
    mu: &ClockValuation<T>,
    v: &ParamValuation,
) -> Result<bool, ModelError> {
    for ineq in &c.conjuncts {
        let x = mu.get(&ineq.clock).ok_or_else(|| ModelError::MissingClock(ineq.clock.clone()))?;
        let bound = T::from_int(ineq.rhs.evaluate(v)?);
        if !ineq.rel.holds(x, &bound) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `μ[R]`: clocks of `r` set to zero.
pub fn reset<T: Scalar, S: AsRef<str>>(mu: &ClockValuation<T>, r: &[S]) -> Result<ClockValuation<T>, ModelError> {
    let mut out = mu.clone();
    for c in r {
        let slot = out.values.get_mut(c.as_ref()).ok_or_else(|| ModelError::MissingClock(c.as_ref().to_string()))?;
        *slot = T::zero();
    }
    Ok(out)
}
