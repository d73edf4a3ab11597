//! Seeded model generators shared by the integration tests.
#![allow(dead_code)]

use pdtn::textfmt::parse_model;
use pdtn::{Constraint, Edge, GuardedPta, Inequality, LinearExpr, Relation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn async_read() -> GuardedPta {
    parse_model(include_str!("../../models/async_read.pdtn.json")).unwrap()
}

/// Shape of a generated model.
#[derive(Clone, Copy)]
pub struct Shape {
    pub max_locations: usize,
    pub clocks: usize,
    pub max_constant: i64,
    pub invariants: bool,
    /// Probability that an edge carries a location guard.
    pub locguard: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_locations: 4, clocks: 1, max_constant: 3, invariants: true, locguard: 0.4 }
    }
}

pub fn location_names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("l{i}")).collect()
}

/// Random model skeleton; `atom` produces guard atoms and `inv` invariant atoms.
fn skeleton(
    r: &mut ChaCha8Rng,
    shape: Shape,
    params: &[&str],
    atom: &mut dyn FnMut(&mut ChaCha8Rng, &str) -> Inequality,
    inv: &mut dyn FnMut(&mut ChaCha8Rng, &str) -> Inequality,
) -> GuardedPta {
    let clocks: Vec<String> = (0..shape.clocks).map(|i| format!("x{i}")).collect();
    let k = r.gen_range(2..=shape.max_locations.max(2));
    let locs = location_names(k);
    let mut m = GuardedPta::new("gen", clocks.clone(), params.to_vec());
    for (i, l) in locs.iter().enumerate() {
        let invariant = if shape.invariants && i > 0 && r.gen_bool(0.3) {
            let c = clocks.choose(r).unwrap().clone();
            Constraint::of([inv(r, &c)])
        } else {
            Constraint::truth()
        };
        m.add_location(l.clone(), invariant);
    }
    let edges = r.gen_range(k - 1..=k + 2);
    for i in 0..edges {
        // The first k-1 edges make a spanning chain so most locations are relevant.
        let (s, t) = if i + 1 < k { (i, i + 1) } else { (r.gen_range(0..k), r.gen_range(0..k)) };
        let mut guard = Constraint::truth();
        for _ in 0..r.gen_range(0..=2) {
            let c = clocks.choose(r).unwrap().clone();
            guard = guard.and(atom(r, &c));
        }
        let mut e = Edge::new(locs[s].clone(), locs[t].clone()).guard(guard);
        if r.gen_bool(shape.locguard) {
            e = e.locguard(locs.choose(r).unwrap().clone());
        }
        let resets: Vec<String> = clocks.iter().filter(|_| r.gen_bool(0.4)).cloned().collect();
        e = e.reset(resets);
        m.add_edge(e);
    }
    m
}

fn any_relation(r: &mut ChaCha8Rng) -> Relation {
    *Relation::ALL.choose(r).unwrap()
}

/// Parameter-free model with constants in `0..=max_constant`.
pub fn valuated(r: &mut ChaCha8Rng, shape: Shape) -> GuardedPta {
    let kmax = shape.max_constant;
    skeleton(
        r,
        shape,
        &[],
        &mut |r, c| Inequality::constant(c, any_relation(r), r.gen_range(0..=kmax)),
        &mut |r, c| Inequality::constant(c, if r.gen_bool(0.5) { Relation::Le } else { Relation::Lt }, r.gen_range(1..=kmax.max(1))),
    )
}

/// Invariant-free, one parameter `p`, no constant terms.
pub fn fully_parametric(r: &mut ChaCha8Rng, shape: Shape) -> GuardedPta {
    let shape = Shape { invariants: false, ..shape };
    skeleton(
        r,
        shape,
        &["p"],
        &mut |r, c| {
            let rhs = if r.gen_bool(0.8) { LinearExpr::new([(r.gen_range(1..=2), "p")], 0) } else { LinearExpr::constant(0) };
            Inequality::new(c, any_relation(r), rhs)
        },
        &mut |_, _| unreachable!(),
    )
}

/// Lower-bound parameter `l`, upper-bound parameter `u`, small constants.
pub fn lu(r: &mut ChaCha8Rng, shape: Shape) -> GuardedPta {
    let kmax = shape.max_constant;
    skeleton(
        r,
        shape,
        &["l", "u"],
        &mut |r, c| {
            let k = r.gen_range(0..=kmax);
            match r.gen_range(0..5) {
                0 => Inequality::new(c, if r.gen_bool(0.5) { Relation::Gt } else { Relation::Ge }, LinearExpr::new([(1, "l")], k)),
                1 => Inequality::new(c, if r.gen_bool(0.5) { Relation::Lt } else { Relation::Le }, LinearExpr::new([(1, "u")], k)),
                2 => Inequality::new(c, if r.gen_bool(0.5) { Relation::Lt } else { Relation::Le }, LinearExpr::new([(-1, "l")], k)),
                _ => Inequality::constant(c, any_relation(r), k),
            }
        },
        &mut |r, c| {
            let k = r.gen_range(1..=kmax.max(1));
            let rel = if r.gen_bool(0.5) { Relation::Le } else { Relation::Lt };
            if r.gen_bool(0.5) {
                Inequality::new(c, rel, LinearExpr::new([(1, "u")], k))
            } else {
                Inequality::constant(c, rel, k)
            }
        },
    )
}

/// Any model the text format accepts: several clocks and parameters,
/// mixed coefficients, invariants, custom actions.
pub fn arbitrary(r: &mut ChaCha8Rng) -> GuardedPta {
    let params = ["p", "q"];
    let shape = Shape { max_locations: 5, clocks: r.gen_range(1..=3), max_constant: 9, invariants: true, locguard: 0.4 };
    let mut m = skeleton(
        r,
        shape,
        &params,
        &mut |r, c| {
            let mut terms = Vec::new();
            for p in params {
                if r.gen_bool(0.4) {
                    terms.push((r.gen_range(-3..=3i64), p));
                }
            }
            terms.retain(|(k, _)| *k != 0);
            Inequality::new(c, any_relation(r), LinearExpr::new(terms, r.gen_range(-4..=9)))
        },
        &mut |r, c| Inequality::new(c, Relation::Le, LinearExpr::new([(1, "p")], r.gen_range(0..=5))),
    );
    for e in &mut m.edges {
        if r.gen_bool(0.3) {
            e.action = ["a", "b", "tick"].choose(r).unwrap().to_string();
        }
    }
    m
}

/// A location other than the initial one, when there is one.
pub fn target(r: &mut ChaCha8Rng, m: &GuardedPta) -> String {
    let others: Vec<&String> = m.locations.iter().map(|l| &l.name).filter(|n| **n != m.initial).collect();
    others.choose(r).map(|s| s.to_string()).unwrap_or_else(|| m.initial.clone())
}
