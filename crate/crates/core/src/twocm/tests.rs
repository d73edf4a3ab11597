use super::*;
use crate::model::{classify, ParamValuation};
use crate::semantics::Goal;
use crate::textfmt::parse_machine;
use crate::zone::{reach, ReachOptions};

fn machine(text: &str) -> MachineProgram {
    parse_machine(text).unwrap()
}

fn inc_inc_halt() -> MachineProgram {
    machine("halt h\ninc 1 a b\ninc 1 b h\n")
}

fn reachable(c: &CompiledMachine, p: u64, n: usize) -> bool {
    let v = ParamValuation::new().with("p", p);
    let opts = ReachOptions { symmetry: n > 1, ..ReachOptions::default() };
    let r = reach(&c.model, &v, n, &Goal::location(&c.halt), &opts).unwrap();
    assert!(r.status != crate::zone::ReachStatus::BudgetExceeded);
    r.is_reachable()
}

#[test]
fn run_examples() {
    assert_eq!(run_2cm(&machine("halt h\ninc 1 s h\n"), 10), RunOutcome::Halted { steps: 1, c_max: 1 });
    assert_eq!(run_2cm(&machine("halt h\ninc 1 s s\n"), 100), RunOutcome::Running { c_max: 100 });
    assert_eq!(run_2cm(&machine("halt h\nzdec 1 s s h\n"), 10), RunOutcome::Halted { steps: 1, c_max: 0 });
}

#[test]
fn trace_counts_down() {
    let m = machine("halt h\ninc 2 a b\ninc 2 b c\nzdec 2 c c h\n");
    let t = trace_2cm(&m, 100);
    let c2: Vec<u64> = t.iter().map(|c| c.c2).collect();
    assert_eq!(c2, [0, 1, 2, 1, 0, 0]);
    assert_eq!(t.last().unwrap().state, "h");
    assert_eq!(step(&m, t.last().unwrap()), None);
    assert_eq!(trace_2cm(&m, 2).len(), 3);
}

#[test]
fn single_pta_shape() {
    let c = compile_single_pta(&inc_inc_halt());
    assert_eq!(c.model.clocks, ["t", "x1", "x2"]);
    assert_eq!(c.model.params, ["p"]);
    assert!(!c.model.has_invariants());
    assert!(c.model.edges.iter().all(|e| e.locguard.is_none()));
    assert_eq!(c.halt, "s_halt");
    assert_eq!(c.state_location("a"), Some("s_1"));
    assert!(c.model.ensure_valid().is_ok());
    assert_eq!(classify(&c.model).unwrap().param_count, 1);
}

#[test]
fn single_pta_halts_iff_p_large_enough() {
    let c = compile_single_pta(&inc_inc_halt());
    assert!(reachable(&c, 3, 1));
    assert!(!reachable(&c, 1, 1));
    let z = compile_single_pta(&machine("halt h\ninc 2 a b\nzdec 2 b c h\nzdec 2 c c h\n"));
    assert!(reachable(&z, 3, 1));
}

#[test]
fn single_pta_loops_never_halt() {
    let looping = [
        "halt h\ninc 1 s s\n",
        "halt h\ninc 1 a b\nzdec 1 b a a\n",
        "halt h\ninc 2 a b\ninc 1 b c\nzdec 1 c a h\n",
    ];
    for text in looping {
        let m = machine(text);
        assert!(!run_2cm(&m, 200).halted());
        let c = compile_single_pta(&m);
        for p in 0..=5 {
            assert!(!reachable(&c, p, 1), "{text} p={p}");
        }
    }
}

#[test]
fn three_process_needs_three_processes() {
    let c = compile_three_process(&machine("halt h\ninc 1 s h\n"), false);
    assert_eq!(c.model.clocks, ["x"]);
    assert!(!c.model.has_invariants());
    assert!(reachable(&c, 2, 3));
    assert!(!reachable(&c, 2, 2));
    assert!(!reachable(&c, 1, 3));
}

#[test]
fn three_process_with_invariants() {
    let m = machine("halt h\ninc 1 s h\n");
    let c = compile_three_process(&m, true);
    assert!(c.model.has_invariants());
    assert_eq!(c.model.without_invariants(), compile_three_process(&m, false).model);
    assert!(reachable(&c, 2, 3));
    assert!(!reachable(&c, 2, 2));
}

#[test]
fn three_process_zero_test() {
    let m = machine("halt h\nzdec 1 s s h\n");
    let c = compile_three_process(&m, true);
    assert!(reachable(&c, 2, 3));
}

#[test]
fn fixed_n_is_exact() {
    let m = machine("halt h\ninc 1 s h\n");
    let c = compile_fixed_n(&m, 4, false).unwrap();
    assert_eq!(c.encoding.to_string(), "fixed:4");
    assert!(reachable(&c, 2, 4));
    assert!(!reachable(&c, 2, 3));
}

#[test]
fn fixed_n_sinks() {
    let m = inc_inc_halt();
    let three = compile_three_process(&m, false);
    assert_eq!(compile_fixed_n(&m, 3, false).unwrap(), three);
    let five = compile_fixed_n(&m, 5, false).unwrap();
    assert_eq!(five.model.locations.len(), three.model.locations.len() + 2);
    assert!(five.model.has_location("sink_3") && five.model.has_location("sink_4"));
    assert!(compile_fixed_n(&m, 2, false).is_err());
}

#[test]
fn dispatch_and_sidecar() {
    let m = inc_inc_halt();
    assert_eq!(compile(&m, EncodingKind::SinglePta).unwrap(), compile_single_pta(&m));
    let c = compile(&m, EncodingKind::ThreeProcess { with_invariants: true }).unwrap();
    let side = c.sidecar();
    assert_eq!(side["encoding"], "three");
    assert_eq!(side["halt"], "s_halt");
    assert_eq!(side["locations"]["s_1_1"]["state"], "a");
    assert_eq!(side["locations"]["s_1_1"]["subpart"], "1");
    assert_eq!(side["locations"]["l0_t"]["gadget"], "init");
    assert_eq!(c.roles.len(), c.model.locations.len());
    assert!(c.model.ensure_valid().is_ok());
}
