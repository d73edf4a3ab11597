//! Property tests over generated model corpora.

mod common;

use common::{rng, Shape};
use pdtn::decide::{bounded_pr_e, pr_e_fully_parametric, pr_e_lu, Answer};
use pdtn::model::{classify, valuate};
use pdtn::semantics::{region_reach_oracle, replay, simulate};
use pdtn::textfmt::{parse_machine, parse_model, parse_property, serialize_model};
use pdtn::{reach, Bounds, Goal, GuardedPta, ParamValuation, ProblemInstance, Rational, ReachOptions, ReachStatus, Trace};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn empty() -> ParamValuation {
    ParamValuation::new()
}

fn status(m: &GuardedPta, v: &ParamValuation, n: usize, goal: &Goal, opts: &ReachOptions) -> ReachStatus {
    reach(m, v, n, goal, opts).unwrap().status
}

/// Random positive combination of `#l >= 1` and `#l = 0` atoms.
fn random_property(r: &mut ChaCha8Rng, m: &GuardedPta) -> Goal {
    let atom = |r: &mut ChaCha8Rng| {
        let l = &m.locations.choose(r).unwrap().name;
        if r.gen_bool(0.5) {
            format!("#{l} >= 1")
        } else {
            format!("#{l} = 0")
        }
    };
    let mut text = atom(r);
    for _ in 0..r.gen_range(0..3) {
        let op = if r.gen_bool(0.5) { "&" } else { "|" };
        text = format!("({text}) {op} {}", atom(r));
    }
    Goal::Property(parse_property(&text).unwrap())
}

fn random_goal(r: &mut ChaCha8Rng, m: &GuardedPta) -> Goal {
    if r.gen_bool(0.5) {
        Goal::location(common::target(r, m))
    } else {
        random_property(r, m)
    }
}

fn replays_to(m: &GuardedPta, v: &ParamValuation, n: usize, w: &Trace, goal: &Goal) -> bool {
    let m = valuate(m, v).unwrap();
    matches!(replay(w, &m, n), Ok(c) if goal.holds_in(&c))
}

#[test]
fn round_trip_corpus() {
    let mut r = rng(11);
    for i in 0..600 {
        let m = common::arbitrary(&mut r);
        let text = serialize_model(&m);
        let back = parse_model(&text).unwrap_or_else(|e| panic!("model {i}: {e}\n{text}"));
        assert_eq!(back, m, "model {i}");
        assert_eq!(serialize_model(&back), text);
        assert_eq!(classify(&back).unwrap(), classify(&m).unwrap());
    }
}

#[test]
fn flipping_a_shared_parameter_breaks_the_partition() {
    let mut r = rng(12);
    let mut flipped = 0;
    for _ in 0..300 {
        let mut m = common::lu(&mut r, Shape::default());
        assert!(classify(&m).unwrap().is_lu());
        // A parameter with two occurrences: negate the first one.
        let occurrences = |m: &GuardedPta, p: &str| m.inequalities().filter(|q| q.rhs.coefficient(p) != 0).count();
        let Some(p) = m.params.iter().find(|p| occurrences(&m, p) >= 2).cloned() else { continue };
        let q = m
            .edges
            .iter_mut()
            .flat_map(|e| e.guard.conjuncts.iter_mut())
            .chain(m.locations.iter_mut().flat_map(|l| l.invariant.conjuncts.iter_mut()))
            .find(|q| q.rhs.coefficient(&p) != 0)
            .unwrap();
        let terms: Vec<(i64, String)> =
            q.rhs.terms().iter().map(|t| (if t.param == p { -t.coef } else { t.coef }, t.param.clone())).collect();
        q.rhs = pdtn::LinearExpr::new(terms, q.rhs.constant_term());
        assert!(!classify(&m).unwrap().is_lu(), "{}", serialize_model(&m));
        flipped += 1;
    }
    assert!(flipped >= 50);
}

#[test]
fn machine_parser_rejects_nondeterminism() {
    for entry in std::fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/machines")).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let m = parse_machine(&text).unwrap();
        assert_eq!(parse_machine(&m.to_string()).unwrap(), m);
        let (state, _) = m.ordered_steps().next().unwrap();
        let dup = format!("{text}inc 2 {state} {}\n", m.halt);
        assert!(parse_machine(&dup).is_err(), "{dup}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn zone_matches_oracle_on_two_clocks(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let m = common::valuated(&mut r, Shape { clocks: 2, max_constant: 2, ..Shape::default() });
        let goal = random_goal(&mut r, &m);
        let z = status(&m, &empty(), n, &goal, &ReachOptions::default());
        let o = region_reach_oracle(&m, n, &goal, 200_000).unwrap();
        if z != ReachStatus::BudgetExceeded && o != ReachStatus::BudgetExceeded {
            prop_assert_eq!(z, o);
        }
    }

    #[test]
    fn subsumption_does_not_change_answers(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let m = common::valuated(&mut r, Shape { clocks: 2, ..Shape::default() });
        let goal = random_goal(&mut r, &m);
        let on = status(&m, &empty(), n, &goal, &ReachOptions::default());
        let off = status(&m, &empty(), n, &goal, &ReachOptions { subsumption: false, ..ReachOptions::default() });
        prop_assert_eq!(on, off);
    }

    #[test]
    fn symmetry_does_not_change_answers(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let m = common::valuated(&mut r, Shape { clocks: 2, ..Shape::default() });
        let goal = random_goal(&mut r, &m);
        let plain = reach(&m, &empty(), n, &goal, &ReachOptions::default()).unwrap();
        let sym = reach(&m, &empty(), n, &goal, &ReachOptions { symmetry: true, ..ReachOptions::default() }).unwrap();
        prop_assert_eq!(plain.status, sym.status);
        if let Some(w) = &sym.witness {
            prop_assert!(replays_to(&m, &empty(), n, w, &goal));
        }
    }

    #[test]
    fn extrapolation_constant_is_safe(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let m = common::valuated(&mut r, Shape { clocks: 2, ..Shape::default() });
        let goal = random_goal(&mut r, &m);
        let k = status(&m, &empty(), n, &goal, &ReachOptions::default());
        let k1 = status(&m, &empty(), n, &goal, &ReachOptions { extrapolation_slack: 1, ..ReachOptions::default() });
        prop_assert_eq!(k, k1);
    }

    #[test]
    fn copycat_monotonicity(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let m = common::valuated(&mut r, Shape::default());
        let goal = Goal::location(common::target(&mut r, &m));
        if status(&m, &empty(), n, &goal, &ReachOptions::default()) == ReachStatus::Reachable {
            prop_assert_eq!(status(&m, &empty(), n + 1, &goal, &ReachOptions::default()), ReachStatus::Reachable);
            prop_assert_eq!(region_reach_oracle(&m, n + 1, &goal, 200_000).unwrap(), ReachStatus::Reachable);
        }
    }

    #[test]
    fn witnesses_replay(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let m = common::lu(&mut r, Shape { clocks: 2, ..Shape::default() });
        let v: ParamValuation = m.params.iter().map(|p| (p.clone(), r.gen_range(0..=3))).collect();
        let goal = random_goal(&mut r, &m);
        let res = reach(&m, &v, n, &goal, &ReachOptions::default()).unwrap();
        prop_assert_eq!(res.witness.is_some(), res.is_reachable());
        if let Some(w) = &res.witness {
            prop_assert!(replays_to(&m, &v, n, w, &goal));
        }
    }

    #[test]
    fn simulations_replay(seed in any::<u64>(), n in 1usize..=4, steps in 0usize..40) {
        let mut r = rng(seed);
        let m = common::lu(&mut r, Shape { clocks: 2, ..Shape::default() });
        let v: ParamValuation = m.params.iter().map(|p| (p.clone(), r.gen_range(0..=3))).collect();
        let t = simulate::<Rational>(&m, n, &v, steps, seed).unwrap();
        prop_assert!(t.len() <= steps);
        prop_assert!(replay(&t, &valuate(&m, &v).unwrap(), n).is_ok());
        prop_assert_eq!(simulate::<Rational>(&m, n, &v, steps, seed).unwrap(), t);
    }

    #[test]
    fn exact_verdicts_agree_with_bounded_search(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = if r.gen_bool(0.5) { common::lu(&mut r, Shape::default()) } else { common::fully_parametric(&mut r, Shape::default()) };
        let target = common::target(&mut r, &m);
        let goal = Goal::location(&target);
        let inst = ProblemInstance::pr_e(m.clone(), &target).unwrap();
        let report = classify(&m).unwrap();
        let exact = if report.is_lu() {
            pr_e_lu(&inst, &Bounds::default()).unwrap()
        } else {
            pr_e_fully_parametric(&inst, &Bounds::default()).unwrap()
        };
        let bounded = bounded_pr_e(&inst, &Bounds { n_max: m.locations.len() + 1, p_max: 6, ..Bounds::default() }).unwrap();
        if let Answer::NonEmpty { valuation, n, witness } = &bounded.answer {
            prop_assert!(replays_to(&m, valuation, *n, witness, &goal));
            prop_assert!(!(exact.exact && exact.is_empty()), "exact Empty contradicted at {} n={}", valuation, n);
        }
        if let Answer::NonEmpty { valuation, n, witness } = &exact.answer {
            prop_assert!(replays_to(&m, valuation, *n, witness, &goal));
        }
    }
}
