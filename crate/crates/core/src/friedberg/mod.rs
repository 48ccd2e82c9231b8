//! A 1-1 numbering `ψ` of the unary partial computable functions with
//! `ψ_{2x+1}(y) = x`, built stage by stage from the K1 enumeration by
//! followers that copy `φ_e` until released.

mod approx;
mod psi;

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::pairing::unpair_u64;
pub use approx::{compatible, is_constant_below, is_nonconstant, make_incompatible, FiniteFn, PhiTable, PointStatus};
pub use psi::{find_k_code, refute_s_candidate, FriedbergError, KCodeReport, KSample, PsiModel, PsiValue, SInconclusive, SWitness, Undefinedness};

/// Why a follower was released.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReleaseRule {
    /// Some smaller index agrees below the follower.
    NotMinimal = 1,
    /// Equals the frozen function of a released code.
    DuplicatesFrozen = 2,
    /// Constant below the follower.
    Constant = 3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Release {
    pub stage: u64,
    pub rule: ReleaseRule,
    #[serde(with = "fn_serde")]
    pub frozen: FiniteFn,
}

/// One even code that has been appointed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    /// The φ-index it followed.
    pub index: u64,
    pub appointed: u64,
    /// `ψ_{x,t}` at appointment; later approximations extend it.
    #[serde(with = "fn_serde")]
    pub first: FiniteFn,
    pub release: Option<Release>,
}

/// What happened at one stage.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageEvent {
    pub stage: u64,
    pub releases: Vec<ReleaseEvent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub appointment: Option<Appointment>,
    /// Followers whose copy grew: `(code, domain size)`.
    pub copies: Vec<(u64, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReleaseEvent {
    pub code: u64,
    pub index: u64,
    pub rule: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Appointment {
    pub index: u64,
    pub code: u64,
}

/// The construction after some number of stages.
#[derive(Debug)]
pub struct FriedbergState {
    stage: u64,
    phi: PhiTable,
    entries: BTreeMap<u64, Entry>,
    /// φ-index ↦ active follower.
    followers: BTreeMap<u64, u64>,
    next_even: u64,
    sizes: HashMap<u64, usize>,
    frozen_by_size: HashMap<usize, Vec<u64>>,
    // (i, x): some point below x separates φ_i from the index x follows
    differ: HashSet<(u64, u64)>,
    // active codes equal to a frozen function at the end of the last stage
    shadowed: Vec<u64>,
    keep_trace: bool,
    trace: Vec<StageEvent>,
    violations: Vec<String>,
}

impl Default for FriedbergState {
    fn default() -> Self {
        Self::new()
    }
}

impl FriedbergState {
    /// Stage 0: odd codes and `ψ_0` are symbolic, nothing appointed.
    pub fn new() -> Self {
        FriedbergState {
            stage: 0,
            phi: PhiTable::new(),
            entries: BTreeMap::new(),
            followers: BTreeMap::new(),
            next_even: 2,
            sizes: HashMap::new(),
            frozen_by_size: HashMap::new(),
            differ: HashSet::new(),
            shadowed: Vec::new(),
            keep_trace: true,
            trace: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn without_trace() -> Self {
        FriedbergState { keep_trace: false, ..Self::new() }
    }

    pub fn stage(&self) -> u64 {
        self.stage
    }

    pub fn entries(&self) -> &BTreeMap<u64, Entry> {
        &self.entries
    }

    pub fn followers(&self) -> &BTreeMap<u64, u64> {
        &self.followers
    }

    pub fn trace(&self) -> &[StageEvent] {
        &self.trace
    }

    pub fn phi(&mut self) -> &mut PhiTable {
        &mut self.phi
    }

    pub fn follower_of(&self, e: u64) -> Option<u64> {
        self.followers.get(&e).copied()
    }

    pub fn run(&mut self, stages: u64) {
        for _ in 0..stages {
            self.step();
        }
    }

    pub fn run_until(&mut self, stage: u64) {
        while self.stage < stage {
            self.step();
        }
    }

    pub fn step(&mut self) {
        self.stage += 1;
        let s = self.stage;
        let mut event = StageEvent { stage: s, ..Default::default() };

        // (1) releases, in increasing follower order
        let mut active: Vec<(u64, u64)> = self.followers.iter().map(|(&e, &x)| (x, e)).filter(|&(x, _)| x < s).collect();
        active.sort_unstable();
        for (x, e) in active {
            if let Some(rule) = self.release_rule(x, e, s) {
                self.release(x, e, s, rule);
                event.releases.push(ReleaseEvent { code: x, index: e, rule: rule as u8 });
            }
        }

        // (2) appointment at s = ⟨e, t⟩
        let (e, _) = unpair_u64(s);
        if !self.followers.contains_key(&e) && self.phi.is_nonempty(e, s) {
            let x = self.next_even;
            self.next_even += 2;
            let first = self.phi.approximation(e, s);
            self.entries.insert(x, Entry { index: e, appointed: s, first, release: None });
            self.followers.insert(e, x);
            event.appointment = Some(Appointment { index: e, code: x });
        }

        // (3) copies
        let follows: Vec<(u64, u64)> = self.followers.iter().map(|(&e, &x)| (e, x)).collect();
        for (e, x) in follows {
            let size = self.phi.size(e, s);
            if self.sizes.insert(x, size) != Some(size) {
                event.copies.push((x, size));
            }
        }

        self.check_shadowing(&event);
        if self.keep_trace {
            self.trace.push(event);
        }
    }

    fn release_rule(&mut self, x: u64, e: u64, s: u64) -> Option<ReleaseRule> {
        for i in 0..e {
            if self.differ.contains(&(i, x)) {
                continue;
            }
            if self.phi.permanently_differ(i, e, s, x) {
                self.differ.insert((i, x));
                continue;
            }
            if self.phi.agree_below(i, e, s, x) {
                return Some(ReleaseRule::NotMinimal);
            }
        }
        if self.duplicates_frozen(e, s) {
            return Some(ReleaseRule::DuplicatesFrozen);
        }
        if self.phi.constant_below(e, s, x) {
            return Some(ReleaseRule::Constant);
        }
        None
    }

    /// `φ_{e,s}` equals some frozen function; sizes are compared first.
    fn duplicates_frozen(&mut self, e: u64, s: u64) -> bool {
        let size = self.phi.size(e, s);
        if !self.frozen_by_size.contains_key(&size) {
            return false;
        }
        let f = self.phi.approximation(e, s);
        self.equals_frozen(&f).is_some()
    }

    fn equals_frozen(&self, f: &FiniteFn) -> Option<u64> {
        self.frozen_by_size.get(&f.len())?.iter().copied().find(|y| {
            self.entries[y].release.as_ref().is_some_and(|r| r.frozen == *f)
        })
    }

    fn release(&mut self, x: u64, e: u64, s: u64, rule: ReleaseRule) {
        let base = self.phi.approximation(e, s);
        let targets: Vec<&FiniteFn> = self
            .entries
            .iter()
            .filter(|(&y, _)| y != x)
            .flat_map(|(_, en)| std::iter::once(&en.first).chain(en.release.as_ref().map(|r| &r.frozen)))
            .filter(|g| !g.is_empty())
            .collect();
        let frozen = make_incompatible(&base, targets);
        self.frozen_by_size.entry(frozen.len()).or_default().push(x);
        self.entries.get_mut(&x).expect("released code was appointed").release = Some(Release { stage: s, rule, frozen });
        self.followers.remove(&e);
        self.sizes.remove(&x);
    }

    /// An active follower equal to a frozen function must be released or
    /// grow by the next stage.
    fn check_shadowing(&mut self, event: &StageEvent) {
        let released: HashSet<u64> = event.releases.iter().map(|r| r.code).collect();
        let grown: HashSet<u64> = event.copies.iter().map(|c| c.0).collect();
        for x in std::mem::take(&mut self.shadowed) {
            if !released.contains(&x) && !grown.contains(&x) {
                self.violations.push(format!("stage {}: active {x} still equals a frozen function", event.stage));
            }
        }
        let s = self.stage;
        let follows: Vec<(u64, u64)> = self.followers.iter().map(|(&e, &x)| (e, x)).collect();
        for (e, x) in follows {
            if self.duplicates_frozen(e, s) {
                self.shadowed.push(x);
            }
        }
    }

    /// `ψ_{x,s}` for the current stage, or the frozen function.
    pub fn psi_table(&mut self, x: u64) -> Option<FiniteFn> {
        let en = self.entries.get(&x)?;
        match &en.release {
            Some(r) => Some(r.frozen.clone()),
            None => {
                let e = en.index;
                Some(self.phi.approximation(e, self.stage))
            }
        }
    }

    pub fn snapshot(&mut self) -> Snapshot {
        let stage = self.stage;
        let codes: Vec<u64> = self.entries.keys().copied().collect();
        let mut entries = Vec::new();
        for x in codes {
            let psi = self.psi_table(x).expect("listed code");
            let en = self.entries[&x].clone();
            entries.push(SnapshotEntry { code: x, entry: en, psi });
        }
        let appointments = self.trace.iter().filter_map(|ev| ev.appointment.as_ref().map(|a| a.code)).collect();
        Snapshot {
            stage,
            followers: self.followers.iter().map(|(&e, &x)| (e, x)).collect(),
            entries,
            appointments,
            violations: self.violations.clone(),
        }
    }

    /// Checks the snapshot invariants plus the live ones: active copies equal
    /// the stage approximation, and no shadowing lasted past one stage.
    pub fn check_invariants(&mut self) -> InvariantReport {
        let snap = self.snapshot();
        let mut report = snap.check();
        for (e, x) in &snap.followers {
            let want = self.phi.approximation(*e, snap.stage);
            let have = &snap.entries.iter().find(|en| en.code == *x).expect("follower listed").psi;
            if *have != want {
                report.violations.push(format!("active {x}: copy differs from φ_{{{e},{}}}", snap.stage));
            }
        }
        report
    }
}

/// A serializable view of the construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub stage: u64,
    /// `(φ-index, code)` of active followers.
    pub followers: Vec<(u64, u64)>,
    pub entries: Vec<SnapshotEntry>,
    /// Codes in order of appointment, from the trace.
    pub appointments: Vec<u64>,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub code: u64,
    #[serde(flatten)]
    pub entry: Entry,
    #[serde(with = "fn_serde")]
    pub psi: FiniteFn,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub stage: u64,
    pub codes_checked: usize,
    pub released: usize,
    pub active: usize,
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Snapshot {
    /// Invariants that need no recomputation of `φ`.
    pub fn check(&self) -> InvariantReport {
        let mut v: Vec<String> = self.violations.clone();
        let mut seen_idx = HashSet::new();
        let mut seen_code = HashSet::new();
        for (e, x) in &self.followers {
            if !seen_idx.insert(*e) || !seen_code.insert(*x) {
                v.push(format!("followers not injective at ({e}, {x})"));
            }
            match self.entries.iter().find(|en| en.code == *x) {
                Some(en) if en.entry.release.is_none() && en.entry.index == *e => {}
                _ => v.push(format!("follower {x} of {e} is not an active entry")),
            }
        }
        for en in &self.entries {
            if en.code == 0 || en.code % 2 == 1 {
                v.push(format!("code {} is zero or odd but was appointed", en.code));
            }
            if en.entry.first.is_empty() {
                v.push(format!("code {} was appointed to an empty approximation", en.code));
            }
            if let Some(r) = &en.entry.release {
                if r.frozen != en.psi {
                    v.push(format!("code {}: table differs from its frozen function", en.code));
                }
                if !is_nonconstant(&r.frozen) {
                    v.push(format!("code {}: frozen function is constant or too small", en.code));
                }
            } else if !self.followers.iter().any(|(_, x)| *x == en.code) {
                v.push(format!("code {} is neither released nor following", en.code));
            }
        }
        let released: Vec<&SnapshotEntry> = self.entries.iter().filter(|e| e.entry.release.is_some()).collect();
        for (i, a) in released.iter().enumerate() {
            for b in &released[i + 1..] {
                if compatible(&a.psi, &b.psi) {
                    v.push(format!("frozen functions of {} and {} are compatible", a.code, b.code));
                }
            }
        }
        let mut appointed = HashSet::new();
        for x in &self.appointments {
            if !appointed.insert(*x) {
                v.push(format!("code {x} appointed more than once"));
            }
        }
        let active = self.entries.len() - released.len();
        InvariantReport { stage: self.stage, codes_checked: self.entries.len(), released: released.len(), active, violations: v }
    }
}

/// Finite functions as `[[y, "value"], …]`, values in decimal.
mod fn_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(f: &FiniteFn, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<(u64, String)> = f.iter().map(|(y, v)| (*y, v.to_string())).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<FiniteFn, D::Error> {
        let v: Vec<(u64, String)> = Vec::deserialize(d)?;
        v.into_iter()
            .map(|(y, s)| s.parse::<BigUint>().map(|n| (y, n)).map_err(serde::de::Error::custom))
            .collect()
    }
}
