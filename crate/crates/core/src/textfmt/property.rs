use std::fmt;

use super::{is_ident_char, TextError};

/// Positive Boolean combination of `#l >= 1` and `#l = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PropertyAst {
    AtLeastOne(String),
    NoneIn(String),
    And(Vec<PropertyAst>),
    Or(Vec<PropertyAst>),
}

impl PropertyAst {
    /// `#l1 = 0 & ... & #lk = 0` for every location except `target`.
    pub fn all_in<S: AsRef<str>>(target: &str, locations: &[S]) -> PropertyAst {
        let atoms: Vec<_> = locations
            .iter()
            .map(|l| l.as_ref())
            .filter(|l| *l != target)
            .map(|l| PropertyAst::NoneIn(l.to_string()))
            .collect();
        PropertyAst::and(atoms)
    }

    /// Conjunction, flattened; a single child is returned as is.
    pub fn and(children: Vec<PropertyAst>) -> PropertyAst {
        Self::combine(children, true)
    }

    pub fn or(children: Vec<PropertyAst>) -> PropertyAst {
        Self::combine(children, false)
    }

    fn combine(children: Vec<PropertyAst>, conj: bool) -> PropertyAst {
        let mut flat = Vec::new();
        for c in children {
            match (c, conj) {
                (PropertyAst::And(cs), true) | (PropertyAst::Or(cs), false) => flat.extend(cs),
                (c, _) => flat.push(c),
            }
        }
        assert!(!flat.is_empty(), "empty Boolean combination");
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else if conj {
            PropertyAst::And(flat)
        } else {
            PropertyAst::Or(flat)
        }
    }

    /// Evaluates the property given an occupancy test.
    pub fn eval(&self, occupied: &dyn Fn(&str) -> bool) -> bool {
        match self {
            PropertyAst::AtLeastOne(l) => occupied(l),
            PropertyAst::NoneIn(l) => !occupied(l),
            PropertyAst::And(cs) => cs.iter().all(|c| c.eval(occupied)),
            PropertyAst::Or(cs) => cs.iter().any(|c| c.eval(occupied)),
        }
    }

    pub fn locations(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_locations(&mut out);
        out
    }

    fn collect_locations<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            PropertyAst::AtLeastOne(l) | PropertyAst::NoneIn(l) => out.push(l),
            PropertyAst::And(cs) | PropertyAst::Or(cs) => cs.iter().for_each(|c| c.collect_locations(out)),
        }
    }
}

impl fmt::Display for PropertyAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyAst::AtLeastOne(l) => write!(f, "#{l} >= 1"),
            PropertyAst::NoneIn(l) => write!(f, "#{l} = 0"),
            PropertyAst::And(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    match c {
                        PropertyAst::Or(_) => write!(f, "({c})")?,
                        _ => write!(f, "{c}")?,
                    }
                }
                Ok(())
            }
            PropertyAst::Or(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Hash,
    Ident(String),
    Num(String),
    Ge,
    Eq,
    Other(String),
    And,
    Or,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, TextError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '#' => Tok::Hash,
            '&' => {
                if chars.get(i + 1) == Some(&'&') {
                    i += 1;
                }
                Tok::And
            }
            '|' => {
                if chars.get(i + 1) == Some(&'|') {
                    i += 1;
                }
                Tok::Or
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '>' | '<' | '=' | '!' => {
                let mut op = c.to_string();
                if chars.get(i + 1) == Some(&'=') {
                    op.push('=');
                    i += 1;
                }
                match op.as_str() {
                    ">=" => Tok::Ge,
                    "=" | "==" => Tok::Eq,
                    _ => Tok::Other(op),
                }
            }
            '≥' => Tok::Ge,
            c if c.is_ascii_digit() || c == '-' => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((col, Tok::Num(chars[start..i].iter().collect())));
                continue;
            }
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push((col, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            other => return Err(TextError::syntax(1, col, format!("unexpected character `{other}`"))),
        };
        out.push((col, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len + 1, |(c, _)| *c)
    }

    fn err(&self, msg: impl Into<String>) -> TextError {
        TextError::syntax(1, self.col(), msg)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn disjunction(&mut self) -> Result<PropertyAst, TextError> {
        let mut parts = vec![self.conjunction()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            parts.push(self.conjunction()?);
        }
        Ok(PropertyAst::or(parts))
    }

    fn conjunction(&mut self) -> Result<PropertyAst, TextError> {
        let mut parts = vec![self.primary()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            parts.push(self.primary()?);
        }
        Ok(PropertyAst::and(parts))
    }

    fn primary(&mut self) -> Result<PropertyAst, TextError> {
        match self.next() {
            Some(Tok::LParen) => {
                let inner = self.disjunction()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => {
                        self.pos -= 1;
                        Err(self.err("expected `)`"))
                    }
                }
            }
            Some(Tok::Hash) => {
                let name = match self.next() {
                    Some(Tok::Ident(n)) => n,
                    _ => {
                        self.pos -= 1;
                        return Err(self.err("expected a location name after `#`"));
                    }
                };
                let rel_col = self.col();
                let rel = self.next();
                let num = match self.next() {
                    Some(Tok::Num(n)) => n,
                    _ => {
                        self.pos -= 1;
                        return Err(self.err("expected a number"));
                    }
                };
                match (rel, num.as_str()) {
                    (Some(Tok::Ge), "1") => Ok(PropertyAst::AtLeastOne(name)),
                    (Some(Tok::Eq), "0") => Ok(PropertyAst::NoneIn(name)),
                    (Some(Tok::Ge | Tok::Eq | Tok::Other(_)), _) => Err(TextError::syntax(
                        1,
                        rel_col,
                        format!("unsupported count atom on `{name}`: only `#l >= 1` and `#l = 0` are allowed"),
                    )),
                    _ => Err(TextError::syntax(1, rel_col, "expected `>=` or `=`")),
                }
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err("expected `#location` or `(`"))
            }
        }
    }
}

/// Parses a global property. `&` binds tighter than `|`.
pub fn parse_property(text: &str) -> Result<PropertyAst, TextError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, len: text.chars().count() };
    let ast = p.disjunction()?;
    if p.pos < p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(ast)
}
