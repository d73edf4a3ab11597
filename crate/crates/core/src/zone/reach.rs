use std::collections::{HashMap, HashSet, VecDeque};

use serde_json::{json, Value};

use super::dbm::Dbm;
use super::witness::time_path;
use crate::model::{GuardedPta, LoweredTa, ParamValuation, Relation};
use crate::semantics::{Goal, ReachStatus, SemanticsError, Trace};
use crate::Rational;

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachOptions {
    /// Maximum number of stored symbolic states.
    pub budget: usize,
    /// Inclusion subsumption; when off, only identical states are merged.
    pub subsumption: bool,
    /// Sort processes by location name before storing a state.
    pub symmetry: bool,
    /// Added to the model's maximal constant for extrapolation.
    pub extrapolation_slack: i64,
}

impl Default for ReachOptions {
    fn default() -> Self {
        ReachOptions { budget: DEFAULT_BUDGET, subsumption: true, symmetry: false, extrapolation_slack: 0 }
    }
}

impl ReachOptions {
    pub fn with_budget(budget: usize) -> Self {
        ReachOptions { budget, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachResult {
    pub status: ReachStatus,
    /// Present iff `status` is `Reachable`.
    pub witness: Option<Trace<Rational>>,
    /// Number of stored symbolic states.
    pub explored: usize,
}

impl ReachResult {
    pub fn is_reachable(&self) -> bool {
        self.status == ReachStatus::Reachable
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "status": self.status.as_str(), "explored": self.explored });
        if let Some(w) = &self.witness {
            v["witness"] = w.to_json();
        }
        v
    }
}

struct Node {
    locs: Vec<usize>,
    zone: Dbm,
    /// Predecessor, process slot (in the predecessor's order) and edge.
    parent: Option<(usize, usize, usize)>,
    /// `slot k` of this node holds `slot perm[k]` of the raw successor.
    perm: Vec<usize>,
    covered: bool,
}

struct Engine<'a> {
    ta: &'a LoweredTa,
    n: usize,
    h: usize,
    k: i64,
    /// Per DBM index: largest constant in a lower / upper bound on that clock.
    lower: Vec<i64>,
    upper: Vec<i64>,
}

impl Engine<'_> {
    fn clock(&self, proc: usize, c: usize) -> usize {
        1 + proc * self.h + c
    }

    fn constrain_all_invariants(&self, locs: &[usize], z: &mut Dbm) {
        for (q, &l) in locs.iter().enumerate() {
            for a in &self.ta.invariants[l] {
                z.constrain_atom(self.clock(q, a.clock), a.rel, a.bound);
            }
        }
    }

    /// Delay closure under the invariants of `locs`, then extrapolation.
    fn finish(&self, locs: &[usize], z: &mut Dbm) {
        z.up();
        self.constrain_all_invariants(locs, z);
        z.extrapolate(self.k);
    }

    fn successor(&self, locs: &[usize], zone: &Dbm, i: usize, e: usize) -> Option<(Vec<usize>, Dbm)> {
        let edge = &self.ta.edges[e];
        if let Some(g) = edge.locguard {
            if !(0..self.n).any(|j| j != i && locs[j] == g) {
                return None;
            }
        }
        let mut z = zone.clone();
        for a in &edge.guard {
            z.constrain_atom(self.clock(i, a.clock), a.rel, a.bound);
        }
        if z.is_empty() {
            return None;
        }
        for &c in &edge.resets {
            z.reset(self.clock(i, c));
        }
        for a in &self.ta.invariants[edge.target] {
            z.constrain_atom(self.clock(i, a.clock), a.rel, a.bound);
        }
        if z.is_empty() {
            return None;
        }
        let mut next = locs.to_vec();
        next[i] = edge.target;
        self.finish(&next, &mut z);
        (!z.is_empty()).then_some((next, z))
    }

    /// Sorts processes by location name. Within groups of equal location
    /// the order giving the lexicographically smallest DBM is chosen (up to
    /// [`MAX_ORBIT`] candidate orders, beyond that ties keep a cheap key
    /// order). Returns the permutation used.
    fn canonical(&self, locs: Vec<usize>, zone: Dbm) -> (Vec<usize>, Dbm, Vec<usize>) {
        let mut perm: Vec<usize> = (0..self.n).collect();
        let key = |q: usize| {
            let bounds: Vec<_> = (0..self.h).map(|c| (zone.get(self.clock(q, c), 0), zone.get(0, self.clock(q, c)))).collect();
            (&self.ta.locations[locs[q]], bounds)
        };
        perm.sort_by_cached_key(|&q| key(q));
        let mut groups = Vec::new();
        let mut start = 0;
        for k in 1..=self.n {
            if k == self.n || locs[perm[k]] != locs[perm[start]] {
                if k - start > 1 {
                    groups.push(start..k);
                }
                start = k;
            }
        }
        let orbit: usize = groups.iter().map(|g| (1..=g.len()).product::<usize>()).product();
        let apply = |perm: &[usize]| {
            let mut map = vec![0usize; zone.dim()];
            for (k, &src) in perm.iter().enumerate() {
                for c in 0..self.h {
                    map[self.clock(k, c)] = self.clock(src, c);
                }
            }
            zone.permuted(&map)
        };
        let mut best = apply(&perm);
        if orbit > 1 && orbit <= MAX_ORBIT {
            let mut cur = perm.clone();
            for g in &groups {
                cur[g.clone()].sort_unstable();
            }
            loop {
                let z = apply(&cur);
                if z.lex_cmp(&best).is_lt() {
                    best = z;
                    perm.clone_from(&cur);
                }
                if !groups.iter().rev().any(|g| next_permutation(&mut cur[g.clone()])) {
                    break;
                }
            }
        }
        let locs = perm.iter().map(|&src| locs[src]).collect();
        (locs, best, perm)
    }
}

/// Bound on the number of orders tried by symmetry canonicalization.
const MAX_ORBIT: usize = 720;

/// Advances to the next lexicographic permutation; on the last one, resets
/// to ascending order and returns false.
fn next_permutation(s: &mut [usize]) -> bool {
    let Some(i) = (1..s.len()).rev().find(|&i| s[i - 1] < s[i]) else {
        s.reverse();
        return false;
    };
    let j = (i..s.len()).rev().find(|&j| s[j] > s[i - 1]).unwrap();
    s.swap(i - 1, j);
    s[i..].reverse();
    true
}

/// Zone-graph reachability of `goal` in the network of `n` copies of
/// `model` under `v`. Breadth-first, successors in (process, edge) order.
pub fn reach(
    model: &GuardedPta,
    v: &ParamValuation,
    n: usize,
    goal: &Goal,
    opts: &ReachOptions,
) -> Result<ReachResult, SemanticsError> {
    if n == 0 {
        return Err(SemanticsError::EmptyNetwork);
    }
    goal.resolve(model)?;
    let ta = LoweredTa::new(model, v)?;
    let h = ta.clock_count();
    let (mut lower, mut upper) = (vec![0i64; h], vec![0i64; h]);
    for a in ta.invariants.iter().flatten().chain(ta.edges.iter().flat_map(|e| &e.guard)) {
        if a.rel != Relation::Lt && a.rel != Relation::Le {
            lower[a.clock] = lower[a.clock].max(a.bound);
        }
        if a.rel != Relation::Gt && a.rel != Relation::Ge {
            upper[a.clock] = upper[a.clock].max(a.bound);
        }
    }
    let per_index = |b: &[i64]| std::iter::once(0).chain((0..n).flat_map(|_| b.iter().copied())).collect();
    let eng = Engine {
        ta: &ta,
        n,
        h,
        k: ta.max_constant + opts.extrapolation_slack,
        lower: per_index(&lower),
        upper: per_index(&upper),
    };
    let goal_ids: Vec<(String, usize)> =
        ta.locations.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    let is_goal = |locs: &[usize]| {
        goal.holds(&|name| goal_ids.iter().any(|(l, i)| l == name && locs.contains(i)))
    };

    let dim = 1 + n * eng.h;
    let init_locs = vec![ta.initial; n];
    let mut z = Dbm::zero(dim);
    eng.constrain_all_invariants(&init_locs, &mut z);
    if z.is_empty() {
        return Ok(ReachResult { status: ReachStatus::Unreachable, witness: None, explored: 0 });
    }
    if is_goal(&init_locs) {
        return Ok(ReachResult { status: ReachStatus::Reachable, witness: Some(Trace::default()), explored: 1 });
    }
    eng.finish(&init_locs, &mut z);

    let mut nodes: Vec<Node> = Vec::new();
    let mut by_locs: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let mut exact: HashSet<(Vec<usize>, Dbm)> = HashSet::new();
    let mut queue = VecDeque::new();

    let (locs, zone, perm) = if opts.symmetry {
        eng.canonical(init_locs, z)
    } else {
        (init_locs, z, (0..n).collect())
    };
    by_locs.entry(locs.clone()).or_default().push(0);
    exact.insert((locs.clone(), zone.clone()));
    nodes.push(Node { locs, zone, parent: None, perm, covered: false });
    queue.push_back(0);

    while let Some(id) = queue.pop_front() {
        if nodes[id].covered {
            continue;
        }
        for i in 0..n {
            let src = nodes[id].locs[i];
            for (e, _) in ta.outgoing(src) {
                let Some((locs, zone)) = eng.successor(&nodes[id].locs, &nodes[id].zone, i, e) else { continue };
                let (locs, zone, perm) =
                    if opts.symmetry { eng.canonical(locs, zone) } else { (locs, zone, (0..n).collect()) };
                if is_goal(&locs) {
                    nodes.push(Node { locs, zone, parent: Some((id, i, e)), perm, covered: false });
                    let witness = reconstruct(&ta, n, &nodes, nodes.len() - 1);
                    return Ok(ReachResult {
                        status: ReachStatus::Reachable,
                        witness: Some(witness),
                        explored: nodes.len(),
                    });
                }
                if opts.subsumption {
                    let bucket = by_locs.entry(locs.clone()).or_default();
                    if bucket.iter().any(|&o| nodes[o].zone.lu_includes(&zone, &eng.lower, &eng.upper)) {
                        continue;
                    }
                    bucket.retain(|&o| {
                        if zone.lu_includes(&nodes[o].zone, &eng.lower, &eng.upper) {
                            nodes[o].covered = true;
                            false
                        } else {
                            true
                        }
                    });
                    bucket.push(nodes.len());
                } else if !exact.insert((locs.clone(), zone.clone())) {
                    continue;
                }
                if nodes.len() >= opts.budget {
                    return Ok(ReachResult { status: ReachStatus::BudgetExceeded, witness: None, explored: nodes.len() });
                }
                queue.push_back(nodes.len());
                nodes.push(Node { locs, zone, parent: Some((id, i, e)), perm, covered: false });
            }
        }
    }
    Ok(ReachResult { status: ReachStatus::Unreachable, witness: None, explored: nodes.len() })
}

/// Discrete path to `last` in terms of actual process indices, then timed.
fn reconstruct(ta: &LoweredTa, n: usize, nodes: &[Node], last: usize) -> Trace<Rational> {
    let mut chain = vec![last];
    while let Some((p, _, _)) = nodes[*chain.last().unwrap()].parent {
        chain.push(p);
    }
    chain.reverse();
    // actual[k]: the real process stored in slot k of the current node.
    let mut actual: Vec<usize> = nodes[chain[0]].perm.clone();
    let mut path = Vec::with_capacity(chain.len() - 1);
    for &id in &chain[1..] {
        let (_, slot, e) = nodes[id].parent.unwrap();
        path.push((actual[slot], e));
        actual = nodes[id].perm.iter().map(|&k| actual[k]).collect();
    }
    debug_assert_eq!(actual.len(), n);
    time_path(ta, n, &path).expect("a zone-graph path always admits a timing")
}
