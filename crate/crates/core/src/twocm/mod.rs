//! Two-counter machines: a reference interpreter and compilers into
//! parametric timed automata whose halting location is reachable iff the
//! machine halts.
//!
//! Counters are encoded by clocks relative to a reference clock `t`: at
//! every visit of a machine-state location with `t = 0`, `x1 = c1` and
//! `x2 = c2`. Each instruction takes exactly `p` time units, and `p` must
//! exceed every counter value reached.

mod compile;

use std::fmt;

use serde::Serialize;

pub use crate::textfmt::{Counter, MachineProgram, Step};
pub use compile::{compile, compile_fixed_n, compile_single_pta, compile_three_process, CompiledMachine, LocationRole};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MachineConfig {
    pub state: String,
    pub c1: u64,
    pub c2: u64,
}

impl MachineConfig {
    pub fn counter(&self, c: Counter) -> u64 {
        match c {
            Counter::C1 => self.c1,
            Counter::C2 => self.c2,
        }
    }
}

impl fmt::Display for MachineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.state, self.c1, self.c2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunOutcome {
    /// Reached the halting state after `steps` instructions.
    Halted { steps: usize, c_max: u64 },
    /// Still running after the step limit.
    Running { c_max: u64 },
}

impl RunOutcome {
    pub fn halted(&self) -> bool {
        matches!(self, RunOutcome::Halted { .. })
    }

    pub fn c_max(&self) -> u64 {
        match *self {
            RunOutcome::Halted { c_max, .. } | RunOutcome::Running { c_max } => c_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncodingKind {
    /// Three clocks, one process.
    SinglePta,
    /// One clock, three processes.
    ThreeProcess { with_invariants: bool },
    /// One clock, exactly `n >= 3` processes; extra ones are parked in sinks.
    FixedN { n: usize, with_invariants: bool },
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodingKind::SinglePta => f.write_str("single"),
            EncodingKind::ThreeProcess { .. } => f.write_str("three"),
            EncodingKind::FixedN { n, .. } => write!(f, "fixed:{n}"),
        }
    }
}

/// One instruction from `c`; `None` in the halting state.
pub fn step(m: &MachineProgram, c: &MachineConfig) -> Option<MachineConfig> {
    let mut next = c.clone();
    match m.steps.get(&c.state)? {
        Step::Inc { counter, next: s } => {
            *counter_mut(&mut next, *counter) += 1;
            next.state = s.clone();
        }
        Step::ZDec { counter, nonzero, zero } => {
            let v = counter_mut(&mut next, *counter);
            if *v > 0 {
                *v -= 1;
                next.state = nonzero.clone();
            } else {
                next.state = zero.clone();
            }
        }
    }
    Some(next)
}

fn counter_mut(c: &mut MachineConfig, counter: Counter) -> &mut u64 {
    match counter {
        Counter::C1 => &mut c.c1,
        Counter::C2 => &mut c.c2,
    }
}

/// Configurations visited from `(initial, 0, 0)`, at most `max_steps + 1`.
pub fn trace_2cm(m: &MachineProgram, max_steps: usize) -> Vec<MachineConfig> {
    let mut out = vec![MachineConfig { state: m.initial.clone(), c1: 0, c2: 0 }];
    while out.len() <= max_steps {
        let last = out.last().unwrap();
        if last.state == m.halt {
            break;
        }
        match step(m, last) {
            Some(next) => out.push(next),
            None => break,
        }
    }
    out
}

pub fn run_2cm(m: &MachineProgram, max_steps: usize) -> RunOutcome {
    let trace = trace_2cm(m, max_steps);
    let c_max = trace.iter().map(|c| c.c1.max(c.c2)).max().unwrap_or(0);
    if trace.last().unwrap().state == m.halt {
        RunOutcome::Halted { steps: trace.len() - 1, c_max }
    } else {
        RunOutcome::Running { c_max }
    }
}

#[cfg(test)]
mod tests;
