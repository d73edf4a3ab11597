use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use super::{Counter, EncodingKind, MachineProgram, Step};
use crate::model::{Constraint, Edge, GuardedPta, Inequality, LinearExpr, Relation};

/// What a location of a compiled model stands for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocationRole {
    /// Machine state whose gadget the location belongs to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    /// `init`, `state`, `inc`, `dec`, `zero`, `final`, `halt` or `sink`.
    pub gadget: &'static str,
    /// Simulated clock (`t`, `1` or `2`) in the one-clock encodings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subpart: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledMachine {
    pub model: GuardedPta,
    pub encoding: EncodingKind,
    /// Location reachable iff the machine halts (for a large enough `p`).
    pub halt: String,
    pub roles: BTreeMap<String, LocationRole>,
}

impl CompiledMachine {
    /// Sidecar: `{encoding, halt, locations: {name: role}}`.
    pub fn sidecar(&self) -> Value {
        json!({
            "encoding": self.encoding.to_string(),
            "halt": self.halt,
            "locations": self.roles,
        })
    }

    /// Location of machine state `state` (for the one-clock encodings, in
    /// subpart `t`).
    pub fn state_location(&self, state: &str) -> Option<&str> {
        self.roles
            .iter()
            .find(|(_, r)| r.gadget == "state" && r.state.as_deref() == Some(state) && matches!(r.subpart, None | Some("t")))
            .map(|(l, _)| l.as_str())
    }
}

pub fn compile(m: &MachineProgram, kind: EncodingKind) -> Result<CompiledMachine, String> {
    match kind {
        EncodingKind::SinglePta => Ok(compile_single_pta(m)),
        EncodingKind::ThreeProcess { with_invariants } => Ok(compile_three_process(m, with_invariants)),
        EncodingKind::FixedN { n, with_invariants } => compile_fixed_n(m, n, with_invariants),
    }
}

const HALT: &str = "s_halt";

fn p_plus(clock: &str, rel: Relation, c: i64) -> Inequality {
    Inequality::new(clock, rel, LinearExpr::new([(1, "p")], c))
}

fn konst(clock: &str, rel: Relation, c: i64) -> Inequality {
    Inequality::constant(clock, rel, c)
}

fn all<const N: usize>(ineqs: [Inequality; N]) -> Constraint {
    Constraint::of(ineqs)
}

/// Accumulates locations and their roles.
struct Builder {
    model: GuardedPta,
    roles: BTreeMap<String, LocationRole>,
    /// Machine state name to index, for location names.
    index: BTreeMap<String, usize>,
    halt_state: String,
}

impl Builder {
    fn new(m: &MachineProgram, clocks: &[&str]) -> Self {
        Builder {
            model: GuardedPta::new(format!("2cm_{}", m.initial), clocks.to_vec(), ["p"]),
            roles: BTreeMap::new(),
            index: m.states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect(),
            halt_state: m.halt.clone(),
        }
    }

    fn loc(&mut self, name: &str, invariant: Constraint, state: Option<&str>, gadget: &'static str, subpart: Option<&'static str>) {
        self.model.add_location(name, invariant);
        self.roles.insert(name.to_string(), LocationRole { state: state.map(str::to_string), gadget, subpart });
    }

    fn edge(&mut self, e: Edge) {
        self.model.add_edge(e);
    }

    /// Location of machine state `s`, with an optional subpart suffix.
    fn sigma(&self, s: &str, sub: Option<&str>) -> String {
        let base = if s == self.halt_state { HALT.to_string() } else { format!("s_{}", self.index[s]) };
        match sub {
            Some(r) => format!("{base}_{r}"),
            None => base,
        }
    }

    fn finish(self, encoding: EncodingKind) -> CompiledMachine {
        CompiledMachine { model: self.model, encoding, halt: HALT.to_string(), roles: self.roles }
    }
}

/// Three clocks `t`, `x1`, `x2`, no invariants, no location guards.
pub fn compile_single_pta(m: &MachineProgram) -> CompiledMachine {
    let mut b = Builder::new(m, &["t", "x1", "x2"]);
    b.loc("l0", Constraint::truth(), None, "init", None);
    b.model.initial = "l0".into();
    for s in &m.states {
        let role = if *s == m.halt { "halt" } else { "state" };
        b.loc(&b.sigma(s, None), Constraint::truth(), Some(s), role, None);
    }
    b.edge(
        Edge::new("l0", b.sigma(&m.initial, None))
            .guard(all([p_plus("t", Relation::Eq, 0), konst("t", Relation::Gt, 1)]))
            .reset(["t", "x1", "x2"]),
    );

    for (s, step) in m.ordered_steps() {
        let i = b.index[s];
        let here = b.sigma(s, None);
        let (l1, l2, l2p, l3) = (format!("l_{i}_1"), format!("l_{i}_2"), format!("l_{i}_2p"), format!("l_{i}_3"));
        let (counter, to, gadget, offset, test) = match step {
            Step::Inc { counter, next } => (*counter, next, "inc", -1, None),
            Step::ZDec { counter, nonzero, zero } => (*counter, nonzero, "dec", 1, Some(zero)),
        };
        let (xc, xo) = match counter {
            Counter::C1 => ("x1", "x2"),
            Counter::C2 => ("x2", "x1"),
        };
        for l in [&l1, &l2, &l2p, &l3] {
            b.loc(l, Constraint::truth(), Some(s), gadget, None);
        }
        let entry = match test {
            None => all([konst("t", Relation::Eq, 0)]),
            Some(_) => all([konst("t", Relation::Eq, 0), konst(xc, Relation::Gt, 0)]),
        };
        let there = b.sigma(to, None);
        b.edge(Edge::new(&here, &l1).guard(entry));
        b.edge(Edge::new(&l1, &l2).guard(all([p_plus(xo, Relation::Eq, 0)])).reset([xo]));
        b.edge(Edge::new(&l1, &l2p).guard(all([p_plus(xc, Relation::Eq, offset)])).reset([xc]));
        b.edge(Edge::new(&l2, &l3).guard(all([p_plus(xc, Relation::Eq, offset)])).reset([xc]));
        b.edge(Edge::new(&l2p, &l3).guard(all([p_plus(xo, Relation::Eq, 0)])).reset([xo]));
        b.edge(Edge::new(&l3, there).guard(all([p_plus("t", Relation::Eq, 0)])).reset(["t"]));

        if let Some(zero) = test {
            let (k1, k2) = (format!("l_{i}_k1"), format!("l_{i}_k2"));
            b.loc(&k1, Constraint::truth(), Some(s), "zero", None);
            b.loc(&k2, Constraint::truth(), Some(s), "zero", None);
            let there = b.sigma(zero, None);
            b.edge(Edge::new(&here, &k1).guard(all([konst("t", Relation::Eq, 0), konst(xc, Relation::Eq, 0)])));
            b.edge(Edge::new(&k1, &k2).guard(all([p_plus(xo, Relation::Eq, 0)])).reset([xo]));
            b.edge(Edge::new(&k2, there).guard(all([p_plus("t", Relation::Eq, 0)])).reset(["t", xc]));
        }
    }
    b.finish(EncodingKind::SinglePta)
}

/// Subpart names of the one-clock encodings: the reference clock and the
/// clocks of the operated and of the other counter.
fn roles_of(counter: Counter) -> (&'static str, &'static str) {
    match counter {
        Counter::C1 => ("1", "2"),
        Counter::C2 => ("2", "1"),
    }
}

/// Invariant of a state location in subpart `r`, given by the gadget that
/// starts there.
fn state_invariant(m: &MachineProgram, s: &str, r: &'static str) -> Constraint {
    let le = |c| all([p_plus("x", Relation::Le, c)]);
    if s == m.halt {
        return all([konst("x", Relation::Eq, 0)]);
    }
    if r == "t" {
        return all([konst("x", Relation::Eq, 0)]);
    }
    match &m.steps[s] {
        Step::Inc { counter, .. } if roles_of(*counter).0 == r => le(-1),
        Step::ZDec { counter, .. } if roles_of(*counter).0 == r => le(1),
        _ => le(0),
    }
}

/// One clock `x`; the three subparts simulate `t`, `x1` and `x2`. Edges
/// entering the `s_halt_*` locations reset `x`.
pub fn compile_three_process(m: &MachineProgram, with_invariants: bool) -> CompiledMachine {
    build_network(m, 3, with_invariants)
}

/// [`compile_three_process`] (without invariants unless asked) whose
/// initial gadget parks every process beyond the third in a chain of sink
/// locations `sink_3 .. sink_{n-1}`.
pub fn compile_fixed_n(m: &MachineProgram, n: usize, with_invariants: bool) -> Result<CompiledMachine, String> {
    if n < 3 {
        return Err(format!("fixed-n encoding needs n >= 3, got {n}"));
    }
    Ok(build_network(m, n, with_invariants))
}

fn build_network(m: &MachineProgram, n: usize, with_invariants: bool) -> CompiledMachine {
    let mut b = Builder::new(m, &["x"]);
    let x0 = || all([konst("x", Relation::Eq, 0)]);
    let le_p = || all([p_plus("x", Relation::Le, 0)]);
    let eq_p = |c| all([p_plus("x", Relation::Eq, c)]);

    // Initial gadget.
    b.loc("l0_t", le_p(), None, "init", None);
    b.model.initial = "l0_t".into();
    for r in ["t", "1", "2"] {
        b.loc(&format!("l1_{r}"), x0(), None, "init", Some(r));
    }
    for s in &m.states {
        let gadget = if *s == m.halt { "final" } else { "state" };
        for r in ["t", "1", "2"] {
            b.loc(&b.sigma(s, Some(r)), state_invariant(m, s, r), Some(s), gadget, Some(r));
        }
    }
    let s0 = |r| b.sigma(&m.initial, Some(r));
    let into_halt = |e: Edge, target: &str| if target.starts_with(HALT) { e.reset(["x"]) } else { e };
    let start_guard = if n > 3 { format!("sink_{}", n - 1) } else { "l1_2".to_string() };
    let init_edges = [
        Edge::new("l0_t", "l1_t").guard(all([p_plus("x", Relation::Eq, 0), konst("x", Relation::Gt, 1)])).reset(["x"]),
        into_halt(Edge::new("l1_t", s0("t")).guard(x0()).locguard(start_guard), &s0("t")),
        Edge::new("l0_t", "l1_1").locguard("l1_t").reset(["x"]),
        into_halt(Edge::new("l1_1", s0("1")).guard(x0()).locguard(s0("t")), &s0("1")),
        Edge::new("l0_t", "l1_2").locguard("l1_1").reset(["x"]),
        into_halt(Edge::new("l1_2", s0("2")).guard(x0()).locguard(s0("t")), &s0("2")),
    ];
    for e in init_edges {
        b.edge(e);
    }
    for k in 3..n {
        let name = format!("sink_{k}");
        b.loc(&name, Constraint::truth(), None, "sink", None);
        let prev = if k == 3 { "l1_2".to_string() } else { format!("sink_{}", k - 1) };
        b.edge(Edge::new("l0_t", &name).locguard(prev));
    }

    for (s, step) in m.ordered_steps() {
        let i = b.index[s];
        let sig = |st: &str, r: &str| b.sigma(st, Some(r));
        let mut locs: Vec<(String, Constraint, &'static str, &'static str)> = Vec::new();
        let mut edges: Vec<Edge> = Vec::new();
        match step {
            Step::Inc { counter, next } => {
                let (c, o) = roles_of(*counter);
                let (lt, lc, lo) = (format!("l_{i}_t"), format!("l_{i}_{c}"), format!("l_{i}_{o}"));
                locs.push((lt.clone(), le_p(), "inc", "t"));
                locs.push((lc.clone(), le_p(), "inc", c));
                locs.push((lo.clone(), le_p(), "inc", o));
                edges.push(Edge::new(sig(s, "t"), &lt).guard(x0()));
                edges.push(Edge::new(&lt, sig(next, "t")).guard(eq_p(0)).reset(["x"]));
                edges.push(Edge::new(sig(s, c), &lc).guard(eq_p(-1)).reset(["x"]));
                edges.push(Edge::new(&lc, sig(next, c)).guard(le_p()).locguard(sig(next, "t")));
                edges.push(Edge::new(sig(s, o), &lo).guard(eq_p(0)).reset(["x"]));
                edges.push(Edge::new(&lo, sig(next, o)).guard(le_p()).locguard(sig(next, "t")));
            }
            Step::ZDec { counter, nonzero: j, zero: k } => {
                let (c, o) = roles_of(*counter);
                let (lt, lkt) = (format!("l_{i}_t"), format!("l_{i}_k_t"));
                let (lc1, lc2, lkc) = (format!("l_{i}_1_{c}"), format!("l_{i}_2_{c}"), format!("l_{i}_k_{c}"));
                let (lo, lko) = (format!("l_{i}_{o}"), format!("l_{i}_k_{o}"));
                locs.push((lt.clone(), le_p(), "dec", "t"));
                locs.push((lkt.clone(), le_p(), "zero", "t"));
                locs.push((lc1.clone(), all([p_plus("x", Relation::Le, 1)]), "dec", c));
                locs.push((lc2.clone(), le_p(), "dec", c));
                locs.push((lkc.clone(), le_p(), "zero", c));
                locs.push((lo.clone(), le_p(), "dec", o));
                locs.push((lko.clone(), le_p(), "zero", o));
                // Reference clock: branch on which counter subpart moved.
                edges.push(Edge::new(sig(s, "t"), &lt).guard(x0()).locguard(&lc1));
                edges.push(Edge::new(&lt, sig(j, "t")).guard(eq_p(0)).reset(["x"]));
                edges.push(Edge::new(sig(s, "t"), &lkt).guard(x0()).locguard(&lkc));
                edges.push(Edge::new(&lkt, sig(k, "t")).guard(eq_p(0)).reset(["x"]));
                // Operated counter: the 0-test happens while t is in its state location.
                edges.push(Edge::new(sig(s, c), &lc1).guard(all([konst("x", Relation::Gt, 0)])).locguard(sig(s, "t")));
                edges.push(Edge::new(&lc1, &lc2).guard(eq_p(1)).reset(["x"]));
                edges.push(Edge::new(&lc2, sig(j, c)).guard(le_p()).locguard(sig(j, "t")));
                edges.push(Edge::new(sig(s, c), &lkc).guard(x0()).locguard(sig(s, "t")));
                edges.push(Edge::new(&lkc, sig(k, c)).guard(eq_p(0)).reset(["x"]).locguard(sig(k, "t")));
                // Other counter follows the branch taken by t.
                edges.push(Edge::new(sig(s, o), &lo).guard(eq_p(0)).reset(["x"]).locguard(&lt));
                edges.push(Edge::new(&lo, sig(j, o)).guard(le_p()).locguard(sig(j, "t")));
                edges.push(Edge::new(sig(s, o), &lko).guard(eq_p(0)).reset(["x"]).locguard(&lkt));
                edges.push(Edge::new(&lko, sig(k, o)).guard(le_p()).locguard(sig(k, "t")));
            }
        }
        for (name, inv, gadget, r) in locs {
            b.loc(&name, inv, Some(s), gadget, Some(r));
        }
        for e in edges {
            let target = e.target.clone();
            b.edge(into_halt(e, &target));
        }
    }

    // Final gadget.
    let h = |r: &str| format!("{HALT}_{r}");
    for r in ["t", "1", "2"] {
        b.loc(&format!("lhalt_{r}"), x0(), Some(&m.halt), "final", Some(r));
    }
    b.loc(HALT, x0(), Some(&m.halt), "halt", None);
    let final_edges = [
        Edge::new(h("t"), "lhalt_t").guard(x0()),
        Edge::new("lhalt_t", HALT).guard(x0()).locguard("lhalt_2"),
        Edge::new(h("1"), "lhalt_1").guard(x0()).locguard("lhalt_t"),
        Edge::new("lhalt_1", HALT).guard(x0()).locguard(HALT),
        Edge::new(h("2"), "lhalt_2").guard(x0()).locguard("lhalt_1"),
        Edge::new("lhalt_2", HALT).guard(x0()).locguard(HALT),
    ];
    for e in final_edges {
        b.edge(e);
    }

    let encoding = if n == 3 {
        EncodingKind::ThreeProcess { with_invariants }
    } else {
        EncodingKind::FixedN { n, with_invariants }
    };
    let mut out = b.finish(encoding);
    if !with_invariants {
        out.model = out.model.without_invariants();
    }
    out
}
