//! Region-graph reachability over the `n·|X|` product clocks. Written
//! independently of the zone engine so the two can be cross-checked.

use std::collections::{HashSet, VecDeque};

use super::{ensure_valuated, Goal, ReachStatus, SemanticsError};
use crate::model::{Atom, GuardedPta, LoweredTa, ParamValuation, Relation};

/// Region of one network configuration. Per clock: the integer part
/// (`k + 1` means "above `k`") and the rank of its fractional part among
/// all bounded clocks (0 = integral).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Region {
    locs: Vec<usize>,
    ints: Vec<i64>,
    ranks: Vec<u32>,
}

struct Net<'a> {
    ta: &'a LoweredTa,
    n: usize,
    h: usize,
    k: i64,
}

impl Net<'_> {
    fn atom(&self, r: &Region, proc: usize, a: &Atom) -> bool {
        let g = proc * self.h + a.clock;
        let (x, zero, c) = (r.ints[g], r.ranks[g] == 0, a.bound);
        if x > self.k {
            return matches!(a.rel, Relation::Gt | Relation::Ge);
        }
        match a.rel {
            Relation::Le => if zero { x <= c } else { x < c },
            Relation::Lt => x < c,
            Relation::Eq => zero && x == c,
            Relation::Ge => x >= c,
            Relation::Gt => if zero { x > c } else { x >= c },
        }
    }

    fn all(&self, r: &Region, proc: usize, atoms: &[Atom]) -> bool {
        atoms.iter().all(|a| self.atom(r, proc, a))
    }

    fn invariants_hold(&self, r: &Region) -> bool {
        (0..self.n).all(|i| self.all(r, i, &self.ta.invariants[r.locs[i]]))
    }

    fn normalize(&self, r: &mut Region) {
        let mut used: Vec<u32> = r.ranks.iter().copied().filter(|&x| x > 0).collect();
        used.sort_unstable();
        used.dedup();
        for x in r.ranks.iter_mut().filter(|x| **x > 0) {
            *x = used.binary_search(x).unwrap() as u32 + 1;
        }
    }

    fn time_successor(&self, r: &Region) -> Option<Region> {
        let k = self.k;
        let bounded = |g: usize| r.ints[g] <= k;
        let clocks = r.ints.len();
        let mut s = r.clone();
        if (0..clocks).any(|g| bounded(g) && r.ranks[g] == 0) {
            for g in (0..clocks).filter(|&g| bounded(g)) {
                if r.ranks[g] == 0 {
                    if r.ints[g] == k {
                        s.ints[g] = k + 1;
                    } else {
                        s.ranks[g] = 1;
                    }
                } else {
                    s.ranks[g] += 1;
                }
            }
        } else {
            let top = (0..clocks).filter(|&g| bounded(g)).map(|g| r.ranks[g]).max()?;
            for g in (0..clocks).filter(|&g| bounded(g) && r.ranks[g] == top) {
                s.ints[g] += 1;
                s.ranks[g] = 0;
            }
        }
        self.normalize(&mut s);
        Some(s)
    }

    fn successors(&self, r: &Region) -> Vec<Region> {
        let mut out = Vec::new();
        if let Some(s) = self.time_successor(r) {
            if self.invariants_hold(&s) {
                out.push(s);
            }
        }
        for i in 0..self.n {
            for (_, e) in self.ta.outgoing(r.locs[i]) {
                if let Some(g) = e.locguard {
                    if !(0..self.n).any(|j| j != i && r.locs[j] == g) {
                        continue;
                    }
                }
                if !self.all(r, i, &e.guard) {
                    continue;
                }
                let mut s = r.clone();
                s.locs[i] = e.target;
                for &c in &e.resets {
                    s.ints[i * self.h + c] = 0;
                    s.ranks[i * self.h + c] = 0;
                }
                if !self.all(&s, i, &self.ta.invariants[e.target]) {
                    continue;
                }
                self.normalize(&mut s);
                out.push(s);
            }
        }
        out
    }
}

/// Exact reachability for a valuated model by exhaustive exploration of the
/// region graph. More than `state_budget` stored regions gives
/// `BudgetExceeded`.
pub fn region_reach_oracle(
    model: &GuardedPta,
    n: usize,
    goal: &Goal,
    state_budget: usize,
) -> Result<ReachStatus, SemanticsError> {
    ensure_valuated(model)?;
    if n == 0 {
        return Err(SemanticsError::EmptyNetwork);
    }
    goal.resolve(model)?;
    let ta = LoweredTa::new(model, &ParamValuation::new())?;
    let net = Net { ta: &ta, n, h: ta.clock_count(), k: ta.max_constant };
    let is_goal = |r: &Region| goal.holds(&|l| ta.location_index(l).is_some_and(|li| r.locs.contains(&li)));

    let init = Region { locs: vec![ta.initial; n], ints: vec![0; n * net.h], ranks: vec![0; n * net.h] };
    if !net.invariants_hold(&init) {
        return Ok(ReachStatus::Unreachable);
    }
    if is_goal(&init) {
        return Ok(ReachStatus::Reachable);
    }
    let mut seen = HashSet::new();
    seen.insert(init.clone());
    let mut queue = VecDeque::from([init]);
    while let Some(r) = queue.pop_front() {
        for s in net.successors(&r) {
            if seen.contains(&s) {
                continue;
            }
            if is_goal(&s) {
                return Ok(ReachStatus::Reachable);
            }
            if seen.len() >= state_budget {
                return Ok(ReachStatus::BudgetExceeded);
            }
            seen.insert(s.clone());
            queue.push_back(s);
        }
    }
    Ok(ReachStatus::Unreachable)
}
