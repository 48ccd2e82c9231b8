//! Application `n · m = ψ_n(m)` read at a fixed stage horizon, the extracted
//! `k`, and the refuter for proposed `s` codes.

use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::FriedbergState;
use crate::k1::enumeration::DOUBLE_PLUS_ONE;
use crate::model::Model;
use crate::outcome::{EvalOutcome, Fuel, Halt, Step};
use crate::term::{app, cst, eval_closed, lams, var, Basis};

/// Why a value is known to be undefined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Undefinedness {
    /// `ψ_0` is the empty function.
    EmptyCode,
    /// Outside the domain of a released code's frozen function.
    FrozenDomain,
}

/// `ψ_{n,H}(m)` in three values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status", content = "value")]
pub enum PsiValue {
    Defined(#[serde(serialize_with = "decimal")] BigUint),
    Undefined(Undefinedness),
    /// Not defined by the horizon, but a later stage might define it.
    Unknown,
}

fn decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl FriedbergState {
    /// `ψ_n(m)` as it stands at stage `horizon`, advancing the construction
    /// as needed. Odd codes and `0` are answered without simulation.
    pub fn psi_at(&mut self, n: &BigUint, m: &BigUint, horizon: u64) -> PsiValue {
        if n.bit(0) {
            return PsiValue::Defined(n >> 1u32);
        }
        let Some(x) = n.to_u64() else { return PsiValue::Unknown };
        if x == 0 {
            return PsiValue::Undefined(Undefinedness::EmptyCode);
        }
        self.run_until(horizon);
        let Some(en) = self.entries.get(&x) else { return PsiValue::Unknown };
        if en.appointed > horizon {
            return PsiValue::Unknown;
        }
        let Some(y) = m.to_u64() else { return PsiValue::Unknown };
        match &en.release {
            Some(r) if r.stage <= horizon => match r.frozen.get(&y) {
                Some(v) => PsiValue::Defined(v.clone()),
                None => PsiValue::Undefined(Undefinedness::FrozenDomain),
            },
            _ => {
                let e = en.index;
                match self.phi.value(e, horizon, y) {
                    Some(v) => PsiValue::Defined(v),
                    None => PsiValue::Unknown,
                }
            }
        }
    }

    /// `n · m` with the stage budget `fuel` as horizon. Undefinedness is only
    /// reported as proven for frozen domains; `ψ_0` stays fuel-exhausted.
    pub fn psi_apply(&mut self, n: &BigUint, m: &BigUint, fuel: u64) -> EvalOutcome<BigUint> {
        match self.psi_at(n, m, fuel) {
            PsiValue::Defined(v) => EvalOutcome::Defined(v),
            PsiValue::Undefined(Undefinedness::FrozenDomain) => EvalOutcome::ProvenDivergent,
            PsiValue::Undefined(Undefinedness::EmptyCode) | PsiValue::Unknown => EvalOutcome::FuelExhausted(fuel),
        }
    }

    /// `a · b` in three values, strict in both sides.
    fn app3(&mut self, a: &PsiValue, b: &PsiValue, horizon: u64) -> PsiValue {
        match (a, b) {
            (PsiValue::Undefined(w), _) | (_, PsiValue::Undefined(w)) => PsiValue::Undefined(*w),
            (PsiValue::Defined(a), PsiValue::Defined(b)) => self.psi_at(a, b, horizon),
            _ => PsiValue::Unknown,
        }
    }
}

/// `ψ` application as a model, read at a fixed horizon.
pub struct PsiModel {
    pub horizon: u64,
    state: Mutex<FriedbergState>,
}

impl PsiModel {
    pub fn new(horizon: u64) -> Self {
        PsiModel { horizon, state: Mutex::new(FriedbergState::without_trace()) }
    }

    pub fn with_state<R>(&self, f: impl FnOnce(&mut FriedbergState) -> R) -> R {
        f(&mut self.state.lock().expect("construction state poisoned"))
    }
}

impl Model for PsiModel {
    type Elem = BigUint;

    fn apply(&self, f: &BigUint, a: &BigUint, fuel: &mut Fuel) -> Step<BigUint> {
        fuel.tick()?;
        match self.with_state(|st| st.psi_at(f, a, self.horizon)) {
            PsiValue::Defined(v) => Ok(v),
            PsiValue::Undefined(Undefinedness::FrozenDomain) => Err(Halt::Divergent),
            _ => Err(Halt::Exhausted),
        }
    }

    fn render(&self, e: &BigUint) -> String {
        e.to_string()
    }

    fn name(&self) -> &str {
        "friedberg"
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KSample {
    pub a: u64,
    pub b: u64,
    pub psi_k_a: String,
    pub result: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct KCodeReport {
    pub code: u64,
    pub follows_index: u64,
    pub appointed: u64,
    pub stages: u64,
    pub samples: Vec<KSample>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FriedbergError {
    #[error("no stable follower of the 2a+1 program within {0} stages")]
    NoStableFollower(u64),
    #[error("sample a = {a}: ψ_k(a) is not yet defined within {stages} stages")]
    SampleOutOfReach { a: u64, stages: u64 },
    #[error("k check failed at a = {a}, b = {b}")]
    KLawFails { a: u64, b: u64 },
}

/// Locates the code following `a ↦ 2a+1` and checks `ψ_{ψ_k(a)}(b) = a` on
/// `samples` pairs drawn by `seed` among the points defined by the budget.
pub fn find_k_code(state: &mut FriedbergState, stages: u64, samples: usize, seed: u64) -> Result<KCodeReport, FriedbergError> {
    state.run_until(stages);
    let k = state.follower_of(DOUBLE_PLUS_ONE).ok_or(FriedbergError::NoStableFollower(stages))?;
    let appointed = state.entries[&k].appointed;
    let reach = state.phi.approximation(DOUBLE_PLUS_ONE, stages).len() as u64;
    if reach == 0 {
        return Err(FriedbergError::NoStableFollower(stages));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    let kb = BigUint::from(k);
    for i in 0..samples {
        // always include a = 5 for the textbook check
        let a = if i == 0 { 5.min(reach - 1) } else { rng.gen_range(0..reach) };
        let b = rng.gen_range(0..1000u64);
        let ka = match state.psi_at(&kb, &BigUint::from(a), stages) {
            PsiValue::Defined(v) => v,
            _ => return Err(FriedbergError::SampleOutOfReach { a, stages }),
        };
        let r = state.psi_at(&ka, &BigUint::from(b), stages);
        if ka != BigUint::from(2 * a + 1) || r != PsiValue::Defined(BigUint::from(a)) {
            return Err(FriedbergError::KLawFails { a, b });
        }
        out.push(KSample { a, b, psi_k_a: ka.to_string(), result: a.to_string() });
    }
    Ok(KCodeReport { code: k, follows_index: DOUBLE_PLUS_ONE, appointed, stages, samples: out })
}

/// A violated `s`-law, or the phase-2 outcome.
#[derive(Clone, Debug, Serialize)]
pub struct SWitness {
    pub candidate: String,
    pub phase: u8,
    pub triple: [String; 3],
    pub left: PsiValue,
    pub right: PsiValue,
    pub clause: String,
    pub stages: u64,
    pub triples_examined: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SInconclusive {
    pub candidate: String,
    pub stages: u64,
    pub triples_examined: usize,
    pub phase2: String,
}

fn probe_pool(state: &mut FriedbergState, k: Option<u64>, horizon: u64) -> Vec<BigUint> {
    let mut pool: Vec<u64> = vec![0, 1, 3, 5, 7, 9, 11, 13, 15, 999];
    if let Some(k) = k {
        pool.extend([k, 2 * k + 1]);
    }
    state.run_until(horizon);
    pool.extend(state.entries.iter().filter(|(_, en)| en.appointed <= horizon).map(|(&x, _)| x).take(24));
    pool.sort_unstable();
    pool.dedup();
    pool.into_iter().map(BigUint::from).collect()
}

/// Phase 1 searches triples for a failure of `σab↓` or `σabc ≃ ac(bc)` that
/// is provable at the horizon. Phase 2, reached only if sampling finds none,
/// checks the reduction `f a = 1 ⟺ ψ_a(a)↓` with `f = λ*a c. 1·(a a)` on
/// points where the answer is known; it is best-effort.
pub fn refute_s_candidate(state: &mut FriedbergState, sigma: &BigUint, k: Option<u64>, horizon: u64) -> Result<SWitness, SInconclusive> {
    let pool = probe_pool(state, k, horizon);
    let d = |v: &BigUint| PsiValue::Defined(v.clone());
    let mut examined = 0;
    let sv = d(sigma);
    for a in &pool {
        let sa = state.app3(&sv, &d(a), horizon);
        for b in &pool {
            let sab = state.app3(&sa, &d(b), horizon);
            for c in &pool {
                examined += 1;
                let witness = |left: PsiValue, right: PsiValue, clause: &str| SWitness {
                    candidate: sigma.to_string(),
                    phase: 1,
                    triple: [a.to_string(), b.to_string(), c.to_string()],
                    left,
                    right,
                    clause: clause.to_string(),
                    stages: horizon,
                    triples_examined: examined,
                };
                if let PsiValue::Undefined(_) = sab {
                    return Ok(witness(sab.clone(), PsiValue::Unknown, "s a b must be defined"));
                }
                let left = state.app3(&sab, &d(c), horizon);
                let ac = state.app3(&d(a), &d(c), horizon);
                let bc = state.app3(&d(b), &d(c), horizon);
                let right = state.app3(&ac, &bc, horizon);
                let broken = match (&left, &right) {
                    (PsiValue::Defined(l), PsiValue::Defined(r)) => l != r,
                    (PsiValue::Defined(_), PsiValue::Undefined(_)) | (PsiValue::Undefined(_), PsiValue::Defined(_)) => true,
                    _ => false,
                };
                if broken {
                    return Ok(witness(left, right, "s a b c ≃ a c (b c)"));
                }
            }
        }
    }
    Err(SInconclusive {
        candidate: sigma.to_string(),
        stages: horizon,
        triples_examined: examined,
        phase2: phase_two(sigma, k, horizon),
    })
}

fn phase_two(sigma: &BigUint, k: Option<u64>, horizon: u64) -> String {
    let Some(k) = k else { return "no k code available".into() };
    let basis = Basis { k: BigUint::from(k), s: sigma.clone() };
    let one = BigUint::from(1u32);
    let t = lams(&["a", "c"], app(cst(one.clone()), app(var("a"), var("a"))));
    let Ok(f_term) = basis.compile(&t) else { return "compilation failed".into() };
    let model = PsiModel::new(horizon);
    let Ok(EvalOutcome::Defined(f)) = eval_closed(&model, &f_term, horizon) else {
        return format!("f is not defined within {horizon} stages");
    };
    let mut agreed = 0;
    // ψ_a(a) is defined for odd a, so f a must be the unique constant-zero code 1
    for a in [1u64, 3, 5, 7, 9] {
        match model.apply_outcome(&f, &BigUint::from(a), horizon) {
            EvalOutcome::Defined(v) if v != one => {
                return format!("f {a} = {v}, but ψ_{a}({a}) is defined so f {a} must be 1");
            }
            EvalOutcome::Defined(_) => agreed += 1,
            _ => {}
        }
    }
    format!("no contradiction within {horizon} stages ({agreed} points agreed)")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbolic_codes() {
        let mut st = FriedbergState::new();
        assert_eq!(st.psi_apply(&BigUint::from(15u32), &BigUint::from(99u32), 1), EvalOutcome::Defined(BigUint::from(7u32)));
        assert_eq!(st.stage(), 0, "odd codes need no simulation");
        assert_eq!(st.psi_apply(&BigUint::from(0u32), &BigUint::from(4u32), 50), EvalOutcome::FuelExhausted(50));
    }
}
