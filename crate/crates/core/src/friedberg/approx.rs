//! Stage approximations `φ_{e,s}`: `φ_e(y)` for `y < s`, run with fuel `s`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigUint;

use crate::k1::enumeration::phi_program;
use crate::k1::{K1Model, Program};
use crate::outcome::{Fuel, Halt};

/// A finite partial function on naturals.
pub type FiniteFn = BTreeMap<u64, BigUint>;

#[derive(Debug)]
struct Track {
    program: Arc<Program>,
    /// `y ↦ (value, steps)`.
    known: BTreeMap<u64, (BigUint, u64)>,
    divergent: BTreeSet<u64>,
    /// `(cap, y)`: exhausted at `cap`, retried once the stage passes it.
    pending: BTreeSet<(u64, u64)>,
    scanned: u64,
    spent: u64,
}

impl Track {
    fn new(e: u64) -> Self {
        Track {
            program: Arc::new(phi_program(e)),
            known: BTreeMap::new(),
            divergent: BTreeSet::new(),
            pending: BTreeSet::new(),
            scanned: 0,
            spent: 0,
        }
    }

    fn attempt(&mut self, model: &K1Model, y: u64, cap: u64) {
        let mut fuel = Fuel::new(cap);
        let r = model.exec(&self.program, &BigUint::from(y), &mut fuel);
        self.spent += fuel.spent();
        match r {
            Ok(v) => {
                self.known.insert(y, (v, fuel.spent()));
            }
            Err(Halt::Divergent) => {
                self.divergent.insert(y);
            }
            Err(Halt::Exhausted) => {
                self.pending.insert((cap, y));
            }
        }
    }

    /// Makes every `y < min(s, upto)` with `steps(y) ≤ s` known.
    fn ensure(&mut self, model: &K1Model, s: u64, upto: u64) {
        let hi = s.min(upto);
        while self.scanned < hi {
            let y = self.scanned;
            self.attempt(model, y, s.max(1));
            self.scanned += 1;
        }
        while let Some(&(cap, y)) = self.pending.first() {
            if cap >= s {
                break;
            }
            self.pending.pop_first();
            self.attempt(model, y, s.max(cap.saturating_mul(2)));
        }
    }

    fn at(&self, y: u64, s: u64) -> Option<&BigUint> {
        if y >= s {
            return None;
        }
        self.known.get(&y).filter(|(_, steps)| *steps <= s).map(|(v, _)| v)
    }
}

/// What the approximations of one index say about one point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointStatus {
    Defined,
    /// Proven divergent: no stage will ever define it.
    Never,
    Open,
}

/// Lazily grown approximations of every `φ_e` asked about.
#[derive(Debug)]
pub struct PhiTable {
    model: K1Model,
    tracks: HashMap<u64, Track>,
}

impl Default for PhiTable {
    fn default() -> Self {
        Self::new()
    }
}

impl PhiTable {
    pub fn new() -> Self {
        PhiTable { model: K1Model::new(), tracks: HashMap::new() }
    }

    fn track(&mut self, e: u64, s: u64, upto: u64) -> &Track {
        let model = &self.model;
        let t = self.tracks.entry(e).or_insert_with(|| Track::new(e));
        t.ensure(model, s, upto);
        t
    }

    /// Interpreter steps spent per index, largest first.
    pub fn cost_by_index(&self) -> Vec<(u64, u64)> {
        let mut v: Vec<(u64, u64)> = self.tracks.iter().map(|(&e, t)| (e, t.spent)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    /// `φ_{e,s}(y)`.
    pub fn value(&mut self, e: u64, s: u64, y: u64) -> Option<BigUint> {
        self.track(e, s, y + 1).at(y, s).cloned()
    }

    pub fn status(&mut self, e: u64, s: u64, y: u64) -> PointStatus {
        let t = self.track(e, s, y + 1);
        if t.at(y, s).is_some() {
            PointStatus::Defined
        } else if t.divergent.contains(&y) {
            PointStatus::Never
        } else {
            PointStatus::Open
        }
    }

    /// `φ_{e,s} ↾ bound` as a finite function.
    pub fn restriction(&mut self, e: u64, s: u64, bound: u64) -> FiniteFn {
        let t = self.track(e, s, bound);
        t.known
            .range(..s.min(bound))
            .filter(|(_, (_, steps))| *steps <= s)
            .map(|(y, (v, _))| (*y, v.clone()))
            .collect()
    }

    /// `φ_{e,s}`.
    pub fn approximation(&mut self, e: u64, s: u64) -> FiniteFn {
        self.restriction(e, s, s)
    }

    /// `|dom φ_{e,s}|`.
    pub fn size(&mut self, e: u64, s: u64) -> usize {
        let t = self.track(e, s, s);
        t.known.range(..s).filter(|(_, (_, steps))| *steps <= s).count()
    }

    /// `φ_{i,s} ↾ bound = φ_{e,s} ↾ bound`.
    pub fn agree_below(&mut self, i: u64, e: u64, s: u64, bound: u64) -> bool {
        self.track(i, s, bound);
        self.track(e, s, bound);
        let (ti, te) = (&self.tracks[&i], &self.tracks[&e]);
        (0..s.min(bound)).all(|y| ti.at(y, s) == te.at(y, s))
    }

    /// `φ_{e,s}` is defined on every `y < bound` with a single value.
    pub fn constant_below(&mut self, e: u64, s: u64, bound: u64) -> bool {
        let t = self.track(e, s, bound);
        let Some(first) = t.at(0, s) else { return false };
        bound <= s && (1..bound).all(|y| t.at(y, s) == Some(first))
    }

    pub fn is_nonempty(&mut self, e: u64, s: u64) -> bool {
        let t = self.track(e, s, s);
        t.known.range(..s).any(|(_, (_, steps))| *steps <= s)
    }

    /// Some `y < bound` where `φ_i` and `φ_e` can never agree again:
    /// both defined with different values, or one defined and the other divergent.
    pub fn permanently_differ(&mut self, i: u64, e: u64, s: u64, bound: u64) -> bool {
        self.track(i, s, bound);
        self.track(e, s, bound);
        let (ti, te) = (&self.tracks[&i], &self.tracks[&e]);
        (0..s.min(bound)).any(|y| match (ti.at(y, s), te.at(y, s)) {
            (Some(a), Some(b)) => a != b,
            (Some(_), None) => te.divergent.contains(&y),
            (None, Some(_)) => ti.divergent.contains(&y),
            (None, None) => false,
        })
    }
}

/// Two finite functions are compatible when they agree on their common domain.
pub fn compatible(f: &FiniteFn, g: &FiniteFn) -> bool {
    let (small, large) = if f.len() <= g.len() { (f, g) } else { (g, f) };
    small.iter().all(|(y, v)| large.get(y).is_none_or(|w| w == v))
}

/// Defined on every `n < bound` with a single value.
pub fn is_constant_below(f: &FiniteFn, bound: u64) -> bool {
    let first = f.get(&0);
    first.is_some() && (0..bound).all(|n| f.get(&n) == first)
}

/// At least two distinct values.
pub fn is_nonconstant(f: &FiniteFn) -> bool {
    let mut vals = f.values();
    match vals.next() {
        Some(v) => vals.any(|w| w != v),
        None => false,
    }
}

/// A nonconstant finite function that disagrees with every target on a common
/// point, keeping `base` wherever no disagreement is forced. Each target
/// contributes its least point; the value there exceeds every target's value.
pub fn make_incompatible<'a>(base: &FiniteFn, targets: impl IntoIterator<Item = &'a FiniteFn>) -> FiniteFn {
    let mut forced: BTreeMap<u64, BigUint> = BTreeMap::new();
    let mut horizon = base.keys().next_back().copied().unwrap_or(0);
    for g in targets {
        horizon = horizon.max(g.keys().next_back().copied().unwrap_or(0));
        if let Some((&p, v)) = g.iter().next() {
            let want = v + 1u32;
            let slot = forced.entry(p).or_insert_with(|| want.clone());
            if *slot < want {
                *slot = want;
            }
        }
    }
    let mut f = base.clone();
    f.extend(forced);
    if !is_nonconstant(&f) {
        let top = f.values().max().cloned().unwrap_or_default();
        let q = horizon + 1;
        if f.is_empty() {
            f.insert(q, BigUint::from(0u32));
        }
        f.insert(q + 1, top + 1u32);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ff(pairs: &[(u64, u64)]) -> FiniteFn {
        pairs.iter().map(|&(y, v)| (y, BigUint::from(v))).collect()
    }

    #[test]
    fn approximation_of_successor_grows() {
        let mut t = PhiTable::new();
        let s5 = t.approximation(2, 5);
        assert!(s5.len() <= 5);
        let s50 = t.approximation(2, 50);
        assert_eq!(s50.len(), 50);
        assert!(s5.iter().all(|(y, v)| s50.get(y) == Some(v)));
        assert_eq!(s50[&7], BigUint::from(8u32));
    }

    #[test]
    fn diverging_index_is_never() {
        let mut t = PhiTable::new();
        assert_eq!(t.status(8, 10, 3), PointStatus::Never);
        assert!(!t.is_nonempty(8, 100));
    }

    #[test]
    fn slow_points_appear_later() {
        let mut t = PhiTable::new();
        // 2a+1 by recursion costs more than a steps
        assert_eq!(t.value(0, 20, 19), None);
        assert_eq!(t.value(0, 2000, 19), Some(BigUint::from(39u32)));
    }

    #[test]
    fn constant_and_compatibility() {
        assert!(is_constant_below(&ff(&[(0, 3), (1, 3)]), 2));
        assert!(!is_constant_below(&ff(&[(0, 3)]), 2));
        assert!(compatible(&ff(&[(0, 1), (2, 2)]), &ff(&[(2, 2), (5, 0)])));
        assert!(!compatible(&ff(&[(0, 1)]), &ff(&[(0, 2)])));
    }

    proptest! {
        #[test]
        fn incompatible_construction(base in prop::collection::btree_map(0u64..8, 0u64..4, 0..5),
                                     targets in prop::collection::vec(prop::collection::btree_map(0u64..8, 0u64..4, 1..5), 0..6)) {
            let conv = |m: &BTreeMap<u64, u64>| m.iter().map(|(&y, &v)| (y, BigUint::from(v))).collect::<FiniteFn>();
            let targets: Vec<FiniteFn> = targets.iter().map(conv).collect();
            let f = make_incompatible(&conv(&base), &targets);
            prop_assert!(is_nonconstant(&f));
            for g in &targets {
                prop_assert!(!compatible(&f, g));
            }
        }
    }
}
