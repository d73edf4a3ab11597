//! Concrete timing for a discrete path of the zone graph.
//!
//! Unknowns are the firing dates `τ_1..τ_k` of the `k` discrete steps, with
//! `τ_0 = 0`. Every guard and every invariant (checked at both ends of each
//! waiting interval) is a difference constraint between two dates, so the
//! system is solved by Bellman-Ford. Strict bounds become non-strict after
//! scaling by `m = k + 2`, so the resulting dates have denominator `m`.

use crate::model::{Atom, LoweredTa, Relation};
use crate::semantics::{TimedStep, Trace};
use crate::Rational;

/// `τ_a - τ_b <= w` over scaled integer dates.
struct Diff {
    a: usize,
    b: usize,
    w: i64,
}

/// Returns `None` when the path admits no timing.
pub(crate) fn time_path(ta: &LoweredTa, n: usize, path: &[(usize, usize)]) -> Option<Trace<Rational>> {
    let k = path.len();
    let m = k as i64 + 2;
    let h = ta.clock_count();
    let mut locs = vec![ta.initial; n];
    // Index of the date of the last reset of each product clock.
    let mut last_reset = vec![0usize; n * h];
    let mut cons: Vec<Diff> = Vec::new();

    // x = τ_at - τ_reset; adds `x ⋈ bound`.
    let mut atom = |at: usize, reset: usize, a: &Atom| {
        let (c, strict_up, strict_lo) = (a.bound, a.rel == Relation::Lt, a.rel == Relation::Gt);
        if matches!(a.rel, Relation::Lt | Relation::Le | Relation::Eq) {
            cons.push(Diff { a: at, b: reset, w: c * m - strict_up as i64 });
        }
        if matches!(a.rel, Relation::Gt | Relation::Ge | Relation::Eq) {
            cons.push(Diff { a: reset, b: at, w: -c * m - strict_lo as i64 });
        }
    };
    let invariants = |at: usize, locs: &[usize], last_reset: &[usize], atom: &mut dyn FnMut(usize, usize, &Atom)| {
        for (q, &l) in locs.iter().enumerate() {
            for a in &ta.invariants[l] {
                atom(at, last_reset[q * h + a.clock], a);
            }
        }
    };

    invariants(0, &locs, &last_reset, &mut atom);
    for (j, &(p, e)) in path.iter().enumerate() {
        let j = j + 1;
        // Waiting in the current locations up to τ_j.
        invariants(j, &locs, &last_reset, &mut atom);
        let edge = &ta.edges[e];
        debug_assert_eq!(edge.source, locs[p]);
        for a in &edge.guard {
            atom(j, last_reset[p * h + a.clock], a);
        }
        for &c in &edge.resets {
            last_reset[p * h + c] = j;
        }
        locs[p] = edge.target;
        invariants(j, &locs, &last_reset, &mut atom);
    }
    for j in 1..=k {
        cons.push(Diff { a: j - 1, b: j, w: 0 });
    }

    // Bellman-Ford from a virtual source joined to every date with weight 0.
    let mut dist = vec![0i64; k + 1];
    for round in 0..=k + 1 {
        let mut changed = false;
        for d in &cons {
            if dist[d.b] + d.w < dist[d.a] {
                dist[d.a] = dist[d.b] + d.w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        if round == k + 1 {
            return None;
        }
    }
    let base = dist[0];
    let dates: Vec<i64> = dist.iter().map(|d| d - base).collect();

    let mut steps = Vec::with_capacity(2 * k);
    for (j, &(p, e)) in path.iter().enumerate() {
        let delay = dates[j + 1] - dates[j];
        if delay > 0 {
            steps.push(TimedStep::Delay(Rational::new(delay, m)));
        }
        steps.push(TimedStep::Discrete { proc: p + 1, edge: e });
    }
    Some(Trace::new(steps))
}
