use std::collections::BTreeMap;

use serde::Serialize;

use super::{GuardedPta, ModelError, Relation};

/// Syntactic profile of a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub clock_count: usize,
    pub param_count: usize,
    pub has_invariants: bool,
    pub has_constant_terms: bool,
    /// `(lower-bound, upper-bound)` parameters, in declaration order.
    pub lu_partition: Option<(Vec<String>, Vec<String>)>,
    pub fully_parametric: bool,
}

impl ClassReport {
    pub fn is_lu(&self) -> bool {
        self.lu_partition.is_some()
    }
}

#[derive(Default, Clone, Copy)]
struct Roles {
    lower: bool,
    upper: bool,
}

/// Classifies a validated model. An equality whose right-hand side mentions a
/// parameter constrains that parameter in both directions, so it rules out
/// an L/U partition. Unused parameters are put on the lower-bound side.
pub fn classify(model: &GuardedPta) -> Result<ClassReport, ModelError> {
    model.ensure_valid()?;

    let mut roles: BTreeMap<&str, Roles> = model.params.iter().map(|p| (p.as_str(), Roles::default())).collect();
    let mut has_constant_terms = false;
    for ineq in model.inequalities() {
        has_constant_terms |= ineq.rhs.constant_term() != 0;
        for t in ineq.rhs.terms() {
            let r = roles.get_mut(t.param.as_str()).expect("validated");
            let positive = t.coef > 0;
            match ineq.rel {
                Relation::Eq => {
                    r.lower = true;
                    r.upper = true;
                }
                // x <= a·p: a lower-bound parameter needs a <= 0, an upper-bound one a >= 0.
                Relation::Le | Relation::Lt => {
                    if positive {
                        r.upper = true
                    } else {
                        r.lower = true
                    }
                }
                Relation::Ge | Relation::Gt => {
                    if positive {
                        r.lower = true
                    } else {
                        r.upper = true
                    }
                }
            }
        }
    }

    let lu_partition = if roles.values().any(|r| r.lower && r.upper) {
        None
    } else {
        let (upper, lower): (Vec<&String>, Vec<&String>) = model.params.iter().partition(|p| roles[p.as_str()].upper);
        Some((lower.into_iter().cloned().collect(), upper.into_iter().cloned().collect()))
    };

    Ok(ClassReport {
        clock_count: model.clocks.len(),
        param_count: model.params.len(),
        has_invariants: model.has_invariants(),
        has_constant_terms,
        lu_partition,
        fully_parametric: !has_constant_terms,
    })
}
