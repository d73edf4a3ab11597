use super::{is_ident_char, TextError};
use crate::model::{Constraint, Inequality, LinearExpr, ParamValuation, Relation};

/// Parses `p=1,q=2` (whitespace allowed, empty string is the empty valuation).
pub fn parse_valuation(text: &str) -> Result<ParamValuation, TextError> {
    let mut v = ParamValuation::new();
    if text.trim().is_empty() {
        return Ok(v);
    }
    let mut offset = 0;
    for part in text.split(',') {
        let col = offset + 1;
        offset += part.len() + 1;
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| TextError::syntax(1, col, format!("expected `param=value`, got `{}`", part.trim())))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(is_ident_char) {
            return Err(TextError::syntax(1, col, format!("bad parameter name `{name}`")));
        }
        let value: u64 = value
            .trim()
            .parse()
            .map_err(|_| TextError::syntax(1, col, format!("bad value for `{name}`: expected a natural number")))?;
        if v.get(name).is_some() {
            return Err(TextError::syntax(1, col, format!("parameter `{name}` assigned twice")));
        }
        v.set(name, value);
    }
    Ok(v)
}

/// Parses a conjunction such as `x <= 2*p + 1 && y > 0`; `true` is the empty
/// conjunction. Conjuncts may also be separated by `&` or `,`.
pub fn parse_constraint(text: &str) -> Result<Constraint, TextError> {
    let t = text.trim();
    if t.is_empty() || t == "true" {
        return Ok(Constraint::truth());
    }
    let normalized = t.replace("&&", "&").replace(',', "&");
    normalized
        .split('&')
        .map(|part| parse_inequality(part.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map(|conjuncts| Constraint { conjuncts })
}

fn parse_inequality(text: &str) -> Result<Inequality, TextError> {
    let err = |m: String| TextError::syntax(1, 1, format!("{m} in `{text}`"));
    let op_start = text.find(['<', '>', '=', '≤', '≥']).ok_or_else(|| err("missing relation".into()))?;
    let clock = text[..op_start].trim();
    if clock.is_empty() || !clock.chars().all(is_ident_char) {
        return Err(err(format!("bad clock name `{clock}`")));
    }
    let rest = &text[op_start..];
    let op_len: usize = rest.chars().take_while(|c| "<>=≤≥".contains(*c)).map(char::len_utf8).sum();
    let rel = Relation::from_symbol(&rest[..op_len]).ok_or_else(|| err(format!("unknown relation `{}`", &rest[..op_len])))?;
    let rhs = parse_expr(rest[op_len..].trim()).map_err(err)?;
    Ok(Inequality::new(clock, rel, rhs))
}

fn parse_expr(text: &str) -> Result<LinearExpr, String> {
    if text.is_empty() {
        return Err("empty right-hand side".into());
    }
    let mut terms: Vec<(i64, String)> = Vec::new();
    let mut constant = 0i64;
    let mut sign = 1i64;
    let mut expect_term = true;
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let chars: Vec<char> = compact.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '+' || c == '-' {
            if c == '-' {
                sign = -sign;
            }
            expect_term = true;
            i += 1;
            continue;
        }
        if !expect_term {
            return Err(format!("unexpected `{c}`"));
        }
        let start = i;
        while i < chars.len() && (is_ident_char(chars[i]) || chars[i] == '*') {
            i += 1;
        }
        let token: String = chars[start..i].iter().collect();
        if token.is_empty() {
            return Err(format!("unexpected `{c}`"));
        }
        match token.split_once('*') {
            Some((k, p)) => {
                let k: i64 = k.parse().map_err(|_| format!("bad coefficient `{k}`"))?;
                if p.is_empty() || p.chars().next().unwrap().is_ascii_digit() {
                    return Err(format!("bad parameter `{p}`"));
                }
                terms.push((sign * k, p.to_string()));
            }
            None if token.chars().all(|c| c.is_ascii_digit()) => {
                constant += sign * token.parse::<i64>().map_err(|_| format!("bad number `{token}`"))?;
            }
            None if token.chars().next().unwrap().is_ascii_digit() => return Err(format!("bad term `{token}`")),
            None => terms.push((sign, token)),
        }
        sign = 1;
        expect_term = false;
    }
    if expect_term {
        return Err("dangling operator".into());
    }
    Ok(LinearExpr::new(terms, constant))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        let v = parse_valuation("p=1, q = 22").unwrap();
        assert_eq!((v.get("p"), v.get("q")), (Some(1), Some(22)));
        assert!(parse_valuation("").unwrap().is_empty());
        for bad in ["p", "p=-1", "p=x", "=3", "p=1,p=2"] {
            assert!(parse_valuation(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn constraints() {
        let c = parse_constraint("x <= 2*p + 1 && y > 0").unwrap();
        assert_eq!(c.conjuncts.len(), 2);
        assert_eq!(c.conjuncts[0].rhs, LinearExpr::new([(2, "p")], 1));
        assert_eq!(c.conjuncts[1].rel, Relation::Gt);
        assert_eq!(parse_constraint("x = p - 1").unwrap().to_string(), "x = p - 1");
        assert_eq!(parse_constraint("x >= -p + 3").unwrap().conjuncts[0].rhs, LinearExpr::new([(-1, "p")], 3));
        assert!(parse_constraint("true").unwrap().is_true());
        for bad in ["x", "x <=", "<= 3", "x <= 3 +", "x <= 2p", "x ! 3"] {
            assert!(parse_constraint(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["x <= 2*p + 1", "x > -p - 2", "y = 0", "x >= q + 3 && y < 4"] {
            assert_eq!(parse_constraint(s).unwrap().to_string(), s);
        }
    }
}
