use std::collections::BTreeMap;
use std::fmt;

use super::{is_ident_char, TextError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Counter {
    C1,
    C2,
}

impl Counter {
    pub fn index(self) -> usize {
        match self {
            Counter::C1 => 0,
            Counter::C2 => 1,
        }
    }
}

impl fmt::Display for Counter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Counter::C1 => "1",
            Counter::C2 => "2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Step {
    /// Increment and move to `next`.
    Inc { counter: Counter, next: String },
    /// If the counter is positive, decrement and go to `nonzero`; otherwise go to `zero`.
    ZDec { counter: Counter, nonzero: String, zero: String },
}

/// A deterministic 2-counter machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MachineProgram {
    /// All states, in order of first declaration or mention.
    pub states: Vec<String>,
    pub initial: String,
    pub halt: String,
    pub steps: BTreeMap<String, Step>,
}

impl MachineProgram {
    /// Steps in state order.
    pub fn ordered_steps(&self) -> impl Iterator<Item = (&str, &Step)> {
        self.states.iter().filter_map(|s| self.steps.get(s).map(|st| (s.as_str(), st)))
    }
}

impl fmt::Display for MachineProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.states {
            writeln!(f, "state {s}")?;
        }
        writeln!(f, "init {}", self.initial)?;
        writeln!(f, "halt {}", self.halt)?;
        for (s, step) in self.ordered_steps() {
            match step {
                Step::Inc { counter, next } => writeln!(f, "inc {counter} {s} {next}")?,
                Step::ZDec { counter, nonzero, zero } => writeln!(f, "zdec {counter} {s} {nonzero} {zero}")?,
            }
        }
        Ok(())
    }
}

/// Parses the line-based machine format:
///
/// ```text
/// # comment
/// state s0            (optional; if any are given, all states must be declared)
/// init s0             (optional; defaults to the source of the first step)
/// halt sh             (required)
/// inc 1 s0 s1
/// zdec 2 s1 s0 sh
/// ```
///
/// `;` separates statements on one line. Every non-halting state needs
/// exactly one step and the halting state has none.
pub fn parse_machine(text: &str) -> Result<MachineProgram, TextError> {
    let mut declared: Vec<String> = Vec::new();
    let mut mentioned: Vec<(String, usize)> = Vec::new();
    let mut initial: Option<(String, usize)> = None;
    let mut halt: Option<(String, usize)> = None;
    let mut steps: BTreeMap<String, Step> = BTreeMap::new();
    let mut first_step: Option<String> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut col_base = 0;
        for stmt in content.split(';') {
            let col = col_base + 1 + (stmt.len() - stmt.trim_start().len());
            col_base += stmt.len() + 1;
            let words: Vec<&str> = stmt.split_whitespace().collect();
            let Some((&kw, args)) = words.split_first() else { continue };
            let err = |m: String| TextError::syntax(line, col, m);
            let state = |s: &str| -> Result<String, TextError> {
                if s.chars().all(is_ident_char) {
                    Ok(s.to_string())
                } else {
                    Err(err(format!("bad state name `{s}`")))
                }
            };
            let counter = |s: &str| match s {
                "1" => Ok(Counter::C1),
                "2" => Ok(Counter::C2),
                _ => Err(err(format!("counter must be 1 or 2, got `{s}`"))),
            };
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(err(format!("`{kw}` takes {n} argument(s), got {}", args.len())))
                }
            };
            match kw {
                "state" => {
                    if args.is_empty() {
                        return Err(err("`state` needs at least one name".into()));
                    }
                    for a in args {
                        let s = state(a)?;
                        if declared.contains(&s) {
                            return Err(err(format!("state `{s}` declared twice")));
                        }
                        declared.push(s);
                    }
                }
                "init" | "halt" => {
                    arity(1)?;
                    let s = state(args[0])?;
                    mentioned.push((s.clone(), line));
                    let slot = if kw == "init" { &mut initial } else { &mut halt };
                    if slot.is_some() {
                        return Err(err(format!("`{kw}` given twice")));
                    }
                    *slot = Some((s, line));
                }
                "inc" | "zdec" => {
                    let (src, step) = if kw == "inc" {
                        arity(3)?;
                        (state(args[1])?, Step::Inc { counter: counter(args[0])?, next: state(args[2])? })
                    } else {
                        arity(4)?;
                        (
                            state(args[1])?,
                            Step::ZDec { counter: counter(args[0])?, nonzero: state(args[2])?, zero: state(args[3])? },
                        )
                    };
                    for a in &args[1..] {
                        mentioned.push((a.to_string(), line));
                    }
                    if steps.contains_key(&src) {
                        return Err(err(format!("state `{src}` has more than one step")));
                    }
                    first_step.get_or_insert_with(|| src.clone());
                    steps.insert(src, step);
                }
                other => return Err(err(format!("unknown statement `{other}`"))),
            }
        }
    }

    let invalid = |m: String| Err(TextError::Invalid(m));
    if !declared.is_empty() {
        if let Some((s, line)) = mentioned.iter().find(|(s, _)| !declared.contains(s)) {
            return Err(TextError::syntax(*line, 1, format!("state `{s}` is not declared")));
        }
    }
    let mut states = declared;
    for (s, _) in &mentioned {
        if !states.contains(s) {
            states.push(s.clone());
        }
    }
    let Some((halt, _)) = halt else { return invalid("no `halt` state given".into()) };
    let initial = match (initial, first_step) {
        (Some((s, _)), _) => s,
        (None, Some(s)) => s,
        (None, None) => halt.clone(),
    };
    if steps.contains_key(&halt) {
        return invalid(format!("halting state `{halt}` must not have a step"));
    }
    if let Some(s) = states.iter().find(|s| **s != halt && !steps.contains_key(*s)) {
        return invalid(format!("state `{s}` has no step"));
    }
    Ok(MachineProgram { states, initial, halt, steps })
}
