use serde_json::{json, Value};

use super::SemanticsError;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TimedStep<T> {
    Delay(T),
    /// `proc` is 1-based; `edge` indexes the model's edge list.
    Discrete { proc: usize, edge: usize },
}

/// A timed path. Consecutive delays are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace<T> {
    pub steps: Vec<TimedStep<T>>,
}

impl<T> Default for Trace<T> {
    fn default() -> Self {
        Trace { steps: Vec::new() }
    }
}

impl<T: Scalar> Trace<T> {
    pub fn new(steps: Vec<TimedStep<T>>) -> Self {
        Trace { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_delay(&self) -> T {
        self.steps
            .iter()
            .filter_map(|s| match s {
                TimedStep::Delay(d) => Some(d.clone()),
                _ => None,
            })
            .fold(T::zero(), |a, b| a + b)
    }

    /// Discrete steps only.
    pub fn discrete(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.steps.iter().filter_map(|s| match s {
            TimedStep::Discrete { proc, edge } => Some((*proc, *edge)),
            _ => None,
        })
    }

    /// `[{"delay": "a/b"}, {"proc": i, "edge": k}, ...]`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.steps
                .iter()
                .map(|s| match s {
                    TimedStep::Delay(d) => json!({ "delay": d.to_string() }),
                    TimedStep::Discrete { proc, edge } => json!({ "proc": proc, "edge": edge }),
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self, SemanticsError> {
        let bad = |m: String| SemanticsError::BadTrace(m);
        let items = v.as_array().ok_or_else(|| bad("expected a JSON list".into()))?;
        let mut steps = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            let obj = item.as_object().ok_or_else(|| bad(format!("step {i} is not an object")))?;
            if let Some(d) = obj.get("delay") {
                let text = match d {
                    Value::String(s) => s.clone(),
                    Value::Number(n) if n.is_u64() => n.to_string(),
                    _ => return Err(bad(format!("step {i}: delay must be a string \"a/b\""))),
                };
                let d: T = text.trim().parse().map_err(|_| bad(format!("step {i}: bad delay `{text}`")))?;
                if d.is_negative() {
                    return Err(bad(format!("step {i}: negative delay")));
                }
                steps.push(TimedStep::Delay(d));
            } else {
                let field = |k: &str| {
                    obj.get(k).and_then(Value::as_u64).map(|x| x as usize).ok_or_else(|| bad(format!("step {i}: missing `{k}`")))
                };
                steps.push(TimedStep::Discrete { proc: field("proc")?, edge: field("edge")? });
            }
        }
        Ok(Trace { steps })
    }
}
