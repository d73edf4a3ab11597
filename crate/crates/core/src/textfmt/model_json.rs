use serde::{Deserialize, Serialize};

use super::TextError;
use crate::model::{Constraint, Edge, GuardedPta, Inequality, LinearExpr, Location, Relation};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    name: String,
    #[serde(default)]
    clocks: Vec<String>,
    #[serde(default)]
    params: Vec<String>,
    locations: Vec<LocationEntry>,
    #[serde(default)]
    edges: Vec<EdgeEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LocationEntry {
    name: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    initial: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    invariant: Vec<IneqEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeEntry {
    from: String,
    to: String,
    #[serde(default = "default_action")]
    action: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    guard: Vec<IneqEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    locguard: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    reset: Vec<String>,
}

fn default_action() -> String {
    "a".to_string()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IneqEntry {
    clock: String,
    rel: String,
    #[serde(default)]
    terms: Vec<TermEntry>,
    #[serde(rename = "const", default)]
    constant: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermEntry {
    coef: i64,
    param: String,
}

fn to_constraint(entries: Vec<IneqEntry>) -> Result<Constraint, TextError> {
    entries
        .into_iter()
        .map(|e| {
            let rel = Relation::from_symbol(&e.rel)
                .filter(|_| matches!(e.rel.as_str(), "<" | "<=" | "=" | ">=" | ">"))
                .ok_or_else(|| TextError::Invalid(format!("unknown relation `{}` on clock `{}`", e.rel, e.clock)))?;
            let rhs = LinearExpr::new(e.terms.into_iter().map(|t| (t.coef, t.param)), e.constant);
            Ok(Inequality::new(e.clock, rel, rhs))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|conjuncts| Constraint { conjuncts })
}

fn from_constraint(c: &Constraint) -> Vec<IneqEntry> {
    c.conjuncts
        .iter()
        .map(|i| IneqEntry {
            clock: i.clock.clone(),
            rel: i.rel.symbol().to_string(),
            terms: i.rhs.terms().iter().map(|t| TermEntry { coef: t.coef, param: t.param.clone() }).collect(),
            constant: i.rhs.constant_term(),
        })
        .collect()
}

/// Parses and validates a `.pdtn.json` model.
pub fn parse_model(text: &str) -> Result<GuardedPta, TextError> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| TextError::syntax(e.line(), e.column(), e.to_string()))?;

    let initials: Vec<&str> = file.locations.iter().filter(|l| l.initial).map(|l| l.name.as_str()).collect();
    let initial = match initials.as_slice() {
        [one] => one.to_string(),
        [] => return Err(TextError::Invalid("no location is marked initial".into())),
        _ => return Err(TextError::Invalid(format!("several initial locations: {}", initials.join(", ")))),
    };

    let locations = file
        .locations
        .into_iter()
        .map(|l| Ok(Location { name: l.name, invariant: to_constraint(l.invariant)? }))
        .collect::<Result<Vec<_>, TextError>>()?;
    let edges = file
        .edges
        .into_iter()
        .map(|e| {
            Ok(Edge {
                source: e.from,
                guard: to_constraint(e.guard)?,
                locguard: e.locguard,
                action: e.action,
                resets: e.reset,
                target: e.to,
            })
        })
        .collect::<Result<Vec<_>, TextError>>()?;

    let model = GuardedPta { name: file.name, locations, initial, clocks: file.clocks, params: file.params, edges };
    model.ensure_valid()?;
    Ok(model)
}

/// Canonical JSON text: declaration order kept, object keys sorted,
/// `True` guards/invariants and trivial location guards omitted.
pub fn serialize_model(model: &GuardedPta) -> String {
    let file = ModelFile {
        name: model.name.clone(),
        clocks: model.clocks.clone(),
        params: model.params.clone(),
        locations: model
            .locations
            .iter()
            .map(|l| LocationEntry {
                name: l.name.clone(),
                initial: l.name == model.initial,
                invariant: from_constraint(&l.invariant),
            })
            .collect(),
        edges: model
            .edges
            .iter()
            .map(|e| EdgeEntry {
                from: e.source.clone(),
                to: e.target.clone(),
                action: e.action.clone(),
                guard: from_constraint(&e.guard),
                locguard: e.locguard.clone(),
                reset: e.resets.clone(),
            })
            .collect(),
    };
    // Going through `Value` sorts object keys.
    let value = serde_json::to_value(&file).expect("model serializes");
    let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "name": "small",
        "clocks": ["x"],
        "params": ["p"],
        "locations": [
            {"name": "a", "initial": true, "invariant": [{"clock": "x", "rel": "<=", "terms": [{"coef": 1, "param": "p"}, {"coef": 1, "param": "p"}], "const": 1}]},
            {"name": "b"}
        ],
        "edges": [{"from": "a", "to": "b", "action": "go", "locguard": "b", "reset": ["x"]}]
    }"#;

    #[test]
    fn parses_and_merges_terms() {
        let m = parse_model(SMALL).unwrap();
        assert_eq!(m.initial, "a");
        let inv = &m.locations[0].invariant.conjuncts[0];
        assert_eq!(inv.rhs.coefficient("p"), 2);
        assert_eq!(m.edges[0].locguard.as_deref(), Some("b"));
    }

    #[test]
    fn empty_input_is_a_syntax_error() {
        assert!(matches!(parse_model(""), Err(TextError::Syntax { .. })));
    }

    #[test]
    fn validation_errors_propagate() {
        let bad = SMALL.replace(r#""to": "b""#, r#""to": "ghost""#);
        assert!(matches!(parse_model(&bad), Err(TextError::Model(_))));
    }

    #[test]
    fn two_initial_locations_rejected() {
        let bad = SMALL.replace(r#"{"name": "b"}"#, r#"{"name": "b", "initial": true}"#);
        assert!(matches!(parse_model(&bad), Err(TextError::Invalid(_))));
    }

    #[test]
    fn canonical_form_omits_trivial_fields() {
        let m = parse_model(SMALL).unwrap();
        let text = serialize_model(&m);
        assert!(!text.contains("\"guard\""));
        assert_eq!(text.matches("invariant").count(), 1);
        assert_eq!(parse_model(&text).unwrap(), m);
        assert_eq!(serialize_model(&parse_model(&text).unwrap()), text);
    }
}
