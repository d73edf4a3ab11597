//! Difference-bound matrices. Index 0 is the reference clock; entry
//! `(i, j)` bounds `x_i - x_j`.

use std::fmt;

use crate::model::Relation;

/// Encoded bound: `(value << 1) | non_strict`, or [`INF`].
pub type Bound = i64;

pub const INF: Bound = i64::MAX;
/// `(0, <=)`.
pub const LE_ZERO: Bound = 1;

pub fn bound(value: i64, strict: bool) -> Bound {
    (value << 1) | (!strict as i64)
}

pub fn value(b: Bound) -> i64 {
    b >> 1
}

pub fn is_strict(b: Bound) -> bool {
    b & 1 == 0
}

fn add(a: Bound, b: Bound) -> Bound {
    if a == INF || b == INF {
        INF
    } else {
        (((a >> 1) + (b >> 1)) << 1) | (a & b & 1)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dbm {
    dim: usize,
    m: Vec<Bound>,
}

impl Dbm {
    /// All clocks equal to 0.
    pub fn zero(dim: usize) -> Self {
        Dbm { dim, m: vec![LE_ZERO; dim * dim] }
    }

    /// All non-negative valuations.
    pub fn universe(dim: usize) -> Self {
        let mut d = Dbm { dim, m: vec![INF; dim * dim] };
        for i in 0..dim {
            d.set(i, i, LE_ZERO);
            d.set(0, i, LE_ZERO);
        }
        d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Bound {
        self.m[i * self.dim + j]
    }

    fn set(&mut self, i: usize, j: usize, b: Bound) {
        self.m[i * self.dim + j] = b;
    }

    pub fn is_empty(&self) -> bool {
        self.get(0, 0) < LE_ZERO
    }

    fn mark_empty(&mut self) {
        self.set(0, 0, bound(-1, false));
    }

    /// All-pairs shortest paths. Detects emptiness.
    pub fn canonicalize(&mut self) {
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                let ik = self.get(i, k);
                if ik == INF {
                    continue;
                }
                for j in 0..n {
                    let via = add(ik, self.get(k, j));
                    if via < self.get(i, j) {
                        self.set(i, j, via);
                    }
                }
            }
        }
        if (0..n).any(|i| self.get(i, i) < LE_ZERO) {
            self.mark_empty();
        }
    }

    pub fn is_canonical(&self) -> bool {
        let mut c = self.clone();
        c.canonicalize();
        c == *self
    }

    /// Delay: removes the upper bounds of all clocks.
    pub fn up(&mut self) {
        for i in 1..self.dim {
            self.set(i, 0, INF);
        }
    }

    /// Intersects a canonical DBM with `x_i - x_j ≺ b`, keeping it canonical.
    pub fn constrain(&mut self, i: usize, j: usize, b: Bound) {
        if self.is_empty() || b >= self.get(i, j) {
            return;
        }
        if add(self.get(j, i), b) < LE_ZERO {
            self.mark_empty();
            return;
        }
        self.set(i, j, b);
        let n = self.dim;
        for k in 0..n {
            let ki = self.get(k, i);
            if ki == INF {
                continue;
            }
            let kij = add(ki, b);
            for l in 0..n {
                let via = add(kij, self.get(j, l));
                if via < self.get(k, l) {
                    self.set(k, l, via);
                }
            }
        }
    }

    /// Intersects with `x ⋈ c`.
    pub fn constrain_atom(&mut self, x: usize, rel: Relation, c: i64) {
        match rel {
            Relation::Lt => self.constrain(x, 0, bound(c, true)),
            Relation::Le => self.constrain(x, 0, bound(c, false)),
            Relation::Eq => {
                self.constrain(x, 0, bound(c, false));
                self.constrain(0, x, bound(-c, false));
            }
            Relation::Ge => self.constrain(0, x, bound(-c, false)),
            Relation::Gt => self.constrain(0, x, bound(-c, true)),
        }
    }

    /// `x := 0` on a canonical DBM.
    pub fn reset(&mut self, x: usize) {
        for j in 0..self.dim {
            let (zj, jz) = (self.get(0, j), self.get(j, 0));
            self.set(x, j, zj);
            self.set(j, x, jz);
        }
        self.set(x, x, LE_ZERO);
    }

    /// Whether `other ⊆ self`; both canonical.
    pub fn includes(&self, other: &Dbm) -> bool {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        if other.is_empty() {
            return true;
        }
        self.m.iter().zip(&other.m).all(|(a, b)| a >= b)
    }

    /// Whether `other ⊆ a_LU(self)`: every valuation of `other` is simulated
    /// by one of `self` for the per-clock lower and upper constants `l`, `u`
    /// (indexed like the DBM, entry 0 unused). Both canonical.
    #[allow(clippy::needless_range_loop)]
    pub fn lu_includes(&self, other: &Dbm, l: &[i64], u: &[i64]) -> bool {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        if other.is_empty() {
            return true;
        }
        if self.is_empty() {
            return false;
        }
        for x in 0..self.dim {
            let lower_x = other.get(0, x);
            if lower_x < bound(if x == 0 { 0 } else { -u[x] }, false) {
                continue;
            }
            for y in 0..self.dim {
                let tight = self.get(y, x);
                if y == x || tight >= other.get(y, x) {
                    continue;
                }
                if add(tight, bound(if y == 0 { 0 } else { -l[y] }, true)) < lower_x {
                    return false;
                }
            }
        }
        true
    }

    /// Max-constant normalization with bound `k` (the `+` variant: clocks
    /// already above `k` lose every diagonal constraint), followed by
    /// canonicalization. The result stays within the region closure of the
    /// input for diagonal-free guards.
    pub fn extrapolate(&mut self, k: i64) {
        if self.is_empty() {
            return;
        }
        let upper = bound(k, false);
        let lower = bound(-k, true);
        let beyond: Vec<bool> = (0..self.dim).map(|i| i != 0 && self.get(0, i) < bound(-k, false)).collect();
        let old = self.m.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i == j {
                    continue;
                }
                let b = old[i * self.dim + j];
                if b == INF {
                    continue;
                }
                if b > upper || (i != 0 && (beyond[i] || beyond[j])) {
                    self.set(i, j, INF);
                } else if b < lower {
                    self.set(i, j, lower);
                }
            }
        }
        self.canonicalize();
    }

    /// Renames clocks: clock `map[i]` of `self` becomes clock `i` of the result.
    /// `map[0]` must be 0.
    pub fn permuted(&self, map: &[usize]) -> Dbm {
        assert_eq!(map.len(), self.dim, "dimension mismatch");
        let mut out = Dbm { dim: self.dim, m: vec![INF; self.m.len()] };
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(map[i], map[j]));
            }
        }
        out
    }

    /// Total order on DBMs of equal dimension (entrywise, row-major).
    pub fn lex_cmp(&self, other: &Dbm) -> std::cmp::Ordering {
        self.m.cmp(&other.m)
    }

    /// Whether an integer point scaled by `1/den` lies in the zone;
    /// `point[0]` is ignored and taken as 0.
    pub fn contains_scaled(&self, point: &[i64], den: i64) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let b = self.get(i, j);
                if b == INF {
                    return true;
                }
                let xi = if i == 0 { 0 } else { point[i] };
                let xj = if j == 0 { 0 } else { point[j] };
                let diff = xi - xj;
                let lim = value(b) * den;
                if is_strict(b) { diff < lim } else { diff <= lim }
            })
        })
    }
}

impl fmt::Debug for Dbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Dbm[{}]", self.dim)?;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let b = self.get(i, j);
                if b == INF {
                    write!(f, "   inf")?;
                } else {
                    write!(f, " {:>3}{}", value(b), if is_strict(b) { "<" } else { "≤" })?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_dbm(rng: &mut ChaCha8Rng, dim: usize) -> Dbm {
        let mut d = Dbm::universe(dim);
        for _ in 0..rng.gen_range(0..2 * dim) {
            let i = rng.gen_range(0..dim);
            let j = rng.gen_range(0..dim);
            if i != j {
                d.set(i, j, bound(rng.gen_range(-4..6), rng.gen_bool(0.5)));
            }
        }
        d
    }

    #[test]
    fn canonicalize_is_idempotent_on_random_dbms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let dim = rng.gen_range(1..6);
            let mut d = random_dbm(&mut rng, dim);
            d.canonicalize();
            let once = d.clone();
            d.canonicalize();
            if once.is_empty() {
                assert!(d.is_empty());
            } else {
                assert_eq!(d, once);
            }
        }
    }

    #[test]
    fn up_then_upper_bound() {
        let mut d = Dbm::zero(4);
        d.up();
        d.constrain_atom(1, Relation::Le, 1);
        for i in 1..4 {
            assert_eq!(d.get(i, 0), bound(1, false));
            assert_eq!(d.get(0, i), LE_ZERO);
            for j in 1..4 {
                assert_eq!(d.get(i, j), LE_ZERO, "clocks stay equal");
            }
        }
        assert!(d.contains_scaled(&[0, 1, 1, 1], 2));
        assert!(!d.contains_scaled(&[0, 3, 3, 3], 2));
    }

    #[test]
    fn reset_then_zero_constraint_is_identity() {
        let mut d = Dbm::zero(3);
        d.up();
        d.constrain_atom(2, Relation::Le, 5);
        d.reset(1);
        let before = d.clone();
        d.constrain_atom(1, Relation::Eq, 0);
        assert_eq!(d, before);
        assert!(d.is_canonical());
    }

    #[test]
    fn contradictory_bounds_are_empty() {
        let mut d = Dbm::zero(2);
        d.up();
        d.constrain_atom(1, Relation::Ge, 2);
        d.constrain_atom(1, Relation::Lt, 2);
        assert!(d.is_empty());
        let mut e = Dbm::zero(2);
        e.up();
        e.constrain_atom(1, Relation::Gt, 1);
        e.constrain_atom(1, Relation::Le, 1);
        assert!(e.is_empty());
    }

    #[test]
    fn extrapolation_widens_large_bounds() {
        let mut d = Dbm::zero(2);
        d.up();
        d.constrain_atom(1, Relation::Ge, 7);
        d.extrapolate(3);
        assert_eq!(d.get(0, 1), bound(-3, true));
        assert_eq!(d.get(1, 0), INF);
    }

    fn interval(lo: i64, hi: i64) -> Dbm {
        let mut d = Dbm::zero(2);
        d.up();
        d.constrain_atom(1, Relation::Ge, lo);
        d.constrain_atom(1, Relation::Le, hi);
        d
    }

    #[test]
    fn lu_inclusion_single_clock() {
        let (l, u) = ([0, 4], [0, 4]);
        // Below the constants valuations must match exactly.
        assert!(!interval(2, 2).lu_includes(&interval(3, 3), &l, &u));
        assert!(!interval(4, 4).lu_includes(&interval(3, 3), &l, &u));
        assert!(!interval(0, 3).lu_includes(&interval(0, 5), &l, &u));
        // Above them any larger value simulates.
        assert!(interval(6, 6).lu_includes(&interval(5, 5), &l, &u));
        assert!(interval(5, 5).lu_includes(&interval(6, 6), &l, &u));
        let mut below_five = interval(0, 5);
        below_five.constrain_atom(1, Relation::Lt, 5);
        assert!(below_five.lu_includes(&interval(0, 5), &l, &u));
        assert!(!below_five.lu_includes(&interval(0, 5), &[0, 5], &[0, 5]));
    }

    #[test]
    fn extrapolation_drops_diagonals_of_large_clocks() {
        // x1 in [5, 6], x2 = 0: with k = 3 only x1 > 3 survives.
        let mut d = Dbm::zero(3);
        d.up();
        d.constrain_atom(1, Relation::Ge, 5);
        d.constrain_atom(1, Relation::Le, 6);
        d.reset(2);
        assert_eq!(d.get(1, 2), bound(6, false));
        d.extrapolate(3);
        assert_eq!(d.get(1, 2), INF);
        assert_eq!(d.get(2, 1), bound(-3, true));
        assert_eq!(d.get(0, 1), bound(-3, true));
    }

    #[test]
    fn inclusion() {
        let mut small = Dbm::zero(2);
        small.up();
        small.constrain_atom(1, Relation::Le, 1);
        let mut big = Dbm::zero(2);
        big.up();
        assert!(big.includes(&small));
        assert!(!small.includes(&big));
    }

    fn arb_ops() -> impl Strategy<Value = Vec<(u8, usize, Relation, i64)>> {
        prop::collection::vec((0u8..3, 1usize..4, prop::sample::select(Relation::ALL.to_vec()), 0i64..5), 0..10)
    }

    proptest! {
        /// Incremental closure agrees with full canonicalization.
        #[test]
        fn constrain_matches_full_closure(ops in arb_ops()) {
            let mut d = Dbm::zero(4);
            for (op, x, rel, c) in ops {
                match op {
                    0 => d.up(),
                    1 => d.reset(x),
                    _ => {
                        let mut full = d.clone();
                        match rel {
                            Relation::Le | Relation::Lt | Relation::Eq => {
                                let b = bound(c, rel == Relation::Lt);
                                if b < full.get(x, 0) { full.set(x, 0, b); }
                            }
                            _ => {}
                        }
                        match rel {
                            Relation::Ge | Relation::Gt | Relation::Eq => {
                                let b = bound(-c, rel == Relation::Gt);
                                if b < full.get(0, x) { full.set(0, x, b); }
                            }
                            _ => {}
                        }
                        full.canonicalize();
                        d.constrain_atom(x, rel, c);
                        prop_assert_eq!(d.is_empty(), full.is_empty());
                        if d.is_empty() { return Ok(()); }
                        prop_assert_eq!(&d, &full);
                    }
                }
                prop_assert!(d.is_canonical());
            }
        }

        #[test]
        fn extrapolation_only_grows(ops in arb_ops(), k in 0i64..4) {
            let mut d = Dbm::zero(4);
            for (op, x, rel, c) in ops {
                match op {
                    0 => d.up(),
                    1 => d.reset(x),
                    _ => d.constrain_atom(x, rel, c),
                }
            }
            let mut e = d.clone();
            e.extrapolate(k);
            prop_assert!(e.includes(&d));
            prop_assert!(e.lu_includes(&d, &[0; 4], &[0; 4]));
            prop_assert!(d.lu_includes(&e, &[k; 4], &[k; 4]));
            let mut wide = d.clone();
            wide.extrapolate(10);
            prop_assert_eq!(wide, d);
        }
    }
}
