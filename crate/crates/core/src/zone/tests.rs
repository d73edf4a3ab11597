use super::*;
use crate::model::{valuate, Constraint, Edge, GuardedPta, Inequality, ParamValuation, Relation};
use crate::semantics::{replay, Goal};
use crate::textfmt::{parse_model, parse_property};
use crate::Rational;

const ASYNC_READ: &str = include_str!("../../models/async_read.pdtn.json");

fn async_read() -> GuardedPta {
    parse_model(ASYNC_READ).unwrap()
}

fn p(v: u64) -> ParamValuation {
    ParamValuation::new().with("p", v)
}

fn check_witness(model: &GuardedPta, v: &ParamValuation, n: usize, goal: &Goal, r: &ReachResult) {
    let w = r.witness.as_ref().expect("reachable results carry a witness");
    let end = replay(w, &valuate(model, v).unwrap(), n).unwrap();
    assert!(goal.holds_in(&end), "witness ends in {end}");
}

#[test]
fn async_read_error_reachable_with_three_processes() {
    let goal = Goal::location("error");
    for symmetry in [false, true] {
        let opts = ReachOptions { symmetry, ..ReachOptions::default() };
        let r = reach(&async_read(), &p(1), 3, &goal, &opts).unwrap();
        assert_eq!(r.status, ReachStatus::Reachable);
        check_witness(&async_read(), &p(1), 3, &goal, &r);
        let (_, max) = extract_trace_time(r.witness.as_ref().unwrap(), &valuate(&async_read(), &p(1)).unwrap(), 3).unwrap();
        assert!(max > Rational::from_integer(1));
    }
}

#[test]
fn async_read_error_needs_three_processes_and_small_p() {
    let goal = Goal::location("error");
    for v in 0..=4 {
        for n in [1, 2] {
            assert_eq!(reach(&async_read(), &p(v), n, &goal, &ReachOptions::default()).unwrap().status, ReachStatus::Unreachable);
        }
    }
    assert_eq!(reach(&async_read(), &p(0), 3, &goal, &ReachOptions::default()).unwrap().status, ReachStatus::Reachable);
    let sym = ReachOptions { symmetry: true, ..ReachOptions::default() };
    for v in 2..=4 {
        assert_eq!(reach(&async_read(), &p(v), 4, &goal, &sym).unwrap().status, ReachStatus::Unreachable);
    }
}

#[test]
fn async_read_all_in_error_unreachable() {
    let phi = parse_property("#init = 0 & #listen = 0 & #post = 0 & #reading = 0 & #done = 0").unwrap();
    let r = reach(&async_read(), &p(1), 3, &Goal::Property(phi), &ReachOptions::default()).unwrap();
    assert_eq!(r.status, ReachStatus::Unreachable);
    assert!(r.witness.is_none());
}

#[test]
fn initial_goal_has_empty_witness() {
    let r = reach(&async_read(), &p(3), 2, &Goal::location("init"), &ReachOptions::default()).unwrap();
    assert_eq!(r.status, ReachStatus::Reachable);
    assert!(r.witness.unwrap().is_empty());
}

#[test]
fn budget_is_reported() {
    let r = reach(&async_read(), &p(1), 3, &Goal::location("error"), &ReachOptions::with_budget(3)).unwrap();
    assert_eq!(r.status, ReachStatus::BudgetExceeded);
    assert!(r.witness.is_none());
    assert_eq!(r.explored, 3);
}

#[test]
fn errors() {
    assert!(reach(&async_read(), &ParamValuation::new(), 3, &Goal::location("error"), &ReachOptions::default()).is_err());
    assert!(reach(&async_read(), &p(1), 3, &Goal::location("ghost"), &ReachOptions::default()).is_err());
    assert!(reach(&async_read(), &p(1), 0, &Goal::location("error"), &ReachOptions::default()).is_err());
}

fn ineq(rel: Relation, c: i64) -> Constraint {
    Constraint::of([Inequality::constant("x", rel, c)])
}

#[test]
fn strict_bounds_get_fractional_delays() {
    // Two strict guards around 1 force a delay strictly between 0 and 1.
    let mut m = GuardedPta::new("m", ["x", "y"], Vec::<String>::new());
    m.add_location("a", Constraint::truth());
    m.add_location("b", Constraint::truth());
    m.add_location("c", Constraint::truth());
    m.add_edge(Edge::new("a", "b").guard(ineq(Relation::Gt, 0).and(Inequality::constant("x", Relation::Lt, 1))).reset(["x"]));
    m.add_edge(Edge::new("b", "c").guard(Constraint::of([
        Inequality::constant("y", Relation::Eq, 1),
        Inequality::constant("x", Relation::Lt, 1),
        Inequality::constant("x", Relation::Gt, 0),
    ])));
    let goal = Goal::location("c");
    let r = reach(&m, &ParamValuation::new(), 1, &goal, &ReachOptions::default()).unwrap();
    assert_eq!(r.status, ReachStatus::Reachable);
    check_witness(&m, &ParamValuation::new(), 1, &goal, &r);
}

#[test]
fn invariant_forces_urgency() {
    let mut m = GuardedPta::new("m", ["x"], Vec::<String>::new());
    m.add_location("a", ineq(Relation::Le, 0));
    m.add_location("b", ineq(Relation::Le, 2));
    m.add_location("c", Constraint::truth());
    m.add_location("d", Constraint::truth());
    m.add_edge(Edge::new("a", "b"));
    m.add_edge(Edge::new("b", "c").guard(ineq(Relation::Ge, 2)));
    m.add_edge(Edge::new("b", "d").guard(ineq(Relation::Gt, 2)));
    let none = ParamValuation::new();
    let c = reach(&m, &none, 1, &Goal::location("c"), &ReachOptions::default()).unwrap();
    check_witness(&m, &none, 1, &Goal::location("c"), &c);
    assert_eq!(reach(&m, &none, 1, &Goal::location("d"), &ReachOptions::default()).unwrap().status, ReachStatus::Unreachable);
}

#[test]
fn subsumption_and_exact_mode_agree_on_async_read() {
    for v in 0..3 {
        for n in 1..=3 {
            let goal = Goal::location("error");
            let with = reach(&async_read(), &p(v), n, &goal, &ReachOptions::default()).unwrap();
            let without = reach(&async_read(), &p(v), n, &goal, &ReachOptions { subsumption: false, ..Default::default() }).unwrap();
            assert_eq!(with.status, without.status);
        }
    }
}
