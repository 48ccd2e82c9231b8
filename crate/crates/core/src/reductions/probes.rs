use std::fmt::Debug;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Setting;
use crate::model::Combinatory;
use crate::outcome::EvalOutcome;

/// Tally of a property checked on probes; inconclusive means fuel ran out.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub agree: usize,
    pub disagree: usize,
    pub inconclusive: usize,
}

impl ProbeReport {
    pub fn record(&mut self, v: Option<bool>) {
        match v {
            Some(true) => self.agree += 1,
            Some(false) => self.disagree += 1,
            None => self.inconclusive += 1,
        }
    }

    pub fn all_agree(&self, n: usize) -> bool {
        self.disagree == 0 && self.inconclusive == 0 && self.agree == n
    }
}

const MAX_ATTEMPTS: usize = 20_000;

fn atoms<M>(s: &Setting<'_, M>) -> Vec<M::Elem>
where
    M: Combinatory,
    M::Elem: Clone + Eq + Hash + Debug,
{
    let l = &s.lib;
    let mut v = vec![l.basis.k.clone(), l.basis.s.clone(), l.i.clone(), l.fls.clone(), s.h.clone(), l.not.clone()];
    v.extend(l.numerals().iter().take(6).cloned());
    v
}

/// Distinct defined elements `x` or `x y` over a fixed atom set, chosen by seed.
pub fn probe_elements<M>(s: &Setting<'_, M>, seed: u64, n: usize) -> Vec<M::Elem>
where
    M: Combinatory,
    M::Elem: Clone + Eq + Hash + Debug,
{
    let atoms = atoms(s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<M::Elem> = Vec::new();
    for _ in 0..MAX_ATTEMPTS {
        if out.len() >= n {
            break;
        }
        let mut e = atoms[rng.gen_range(0..atoms.len())].clone();
        for _ in 0..rng.gen_range(0..3) {
            let a = &atoms[rng.gen_range(0..atoms.len())];
            match s.model.apply_outcome(&e, a, s.fuel) {
                EvalOutcome::Defined(v) => e = v,
                _ => break,
            }
        }
        if !out.contains(&e) {
            out.push(e);
        }
    }
    out
}

/// Pairs `(a, b)` whose application `a b` settles within the setting's fuel,
/// mixing defined and divergent cases.
pub fn probe_pairs<M>(s: &Setting<'_, M>, seed: u64, n: usize) -> Vec<(M::Elem, M::Elem)>
where
    M: Combinatory,
    M::Elem: Clone + Eq + Hash + Debug,
{
    let pool = probe_elements(s, seed, 24);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut out = Vec::new();
    for _ in 0..MAX_ATTEMPTS {
        if out.len() >= n {
            break;
        }
        let a = &pool[rng.gen_range(0..pool.len())];
        let b = &pool[rng.gen_range(0..pool.len())];
        if s.halts(a, b).is_some() {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}
