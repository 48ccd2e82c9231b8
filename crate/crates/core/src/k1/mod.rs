//! Kleene's first model: naturals applied as codes of programs.

pub mod enumeration;
pub mod program;

use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use crate::model::{Combinatory, Model};
use crate::observe::{observational_eq, ObservationVerdict};
use crate::outcome::{EvalOutcome, Fuel, Halt, Step};
use crate::pairing::{pair, unpair};
use program::build::*;
pub use program::Program;

const DECODE_CACHE_LIMIT: usize = 8192;
const PAIR_CACHE_LIMIT: usize = 1 << 16;
// Small codes unpair in machine words; anything larger is cheaper to look up.
const PAIR_CACHE_MIN_BITS: u64 = 64;

/// `n · m = φ_n(m)`.
#[derive(Debug, Default)]
pub struct K1Model {
    decoded: Mutex<FxHashMap<BigUint, Arc<Program>>>,
    // components of large pair codes built during evaluation
    paired: Mutex<FxHashMap<BigUint, (BigUint, BigUint)>>,
}

impl K1Model {
    pub fn new() -> Self {
        Self::default()
    }

    fn program_of(&self, code: &BigUint) -> Arc<Program> {
        let mut cache = self.decoded.lock().expect("decode cache poisoned");
        if let Some(p) = cache.get(code) {
            return p.clone();
        }
        if cache.len() >= DECODE_CACHE_LIMIT {
            cache.clear();
        }
        let p = Arc::new(Program::decode(code));
        cache.insert(code.clone(), p.clone());
        p
    }

    fn pair(&self, a: BigUint, b: BigUint) -> BigUint {
        let z = pair(&a, &b);
        if z.bits() >= PAIR_CACHE_MIN_BITS {
            let mut cache = self.paired.lock().expect("pair cache poisoned");
            if cache.len() >= PAIR_CACHE_LIMIT {
                cache.clear();
            }
            cache.insert(z.clone(), (a, b));
        }
        z
    }

    fn unpair(&self, z: BigUint) -> (BigUint, BigUint) {
        if z.bits() >= PAIR_CACHE_MIN_BITS {
            if let Some(c) = self.paired.lock().expect("pair cache poisoned").get(&z) {
                return c.clone();
            }
        }
        unpair(&z)
    }

    /// Runs the program numbered `code` on `input`.
    pub fn run(&self, code: &BigUint, input: &BigUint, fuel: &mut Fuel) -> Step<BigUint> {
        let p = self.program_of(code);
        self.exec(&p, input, fuel)
    }

    pub fn run_outcome(&self, code: &BigUint, input: &BigUint, limit: u64) -> EvalOutcome<BigUint> {
        let mut fuel = Fuel::new(limit);
        let r = self.run(code, input, &mut fuel);
        fuel.settle(r)
    }

    /// Two-argument convention: the arguments arrive Cantor-paired.
    pub fn run2(&self, code: &BigUint, a: &BigUint, x: &BigUint, fuel: &mut Fuel) -> Step<BigUint> {
        self.run(code, &self.pair(a.clone(), x.clone()), fuel)
    }

    /// Big-step evaluation; every node visited costs one unit of fuel.
    pub fn exec(&self, p: &Program, x: &BigUint, fuel: &mut Fuel) -> Step<BigUint> {
        fuel.tick()?;
        Ok(match p {
            Program::Input => x.clone(),
            Program::Const(n) => n.clone(),
            Program::Succ(e) => self.exec(e, x, fuel)? + 1u32,
            Program::Pred(e) => {
                let v = self.exec(e, x, fuel)?;
                if v.is_zero() {
                    v
                } else {
                    v - 1u32
                }
            }
            Program::Pair(a, b) => {
                let a = self.exec(a, x, fuel)?;
                let b = self.exec(b, x, fuel)?;
                self.pair(a, b)
            }
            Program::Fst(e) => self.unpair(self.exec(e, x, fuel)?).0,
            Program::Snd(e) => self.unpair(self.exec(e, x, fuel)?).1,
            Program::IfZero(g, t, e) => {
                if self.exec(g, x, fuel)?.is_zero() {
                    self.exec(t, x, fuel)?
                } else {
                    self.exec(e, x, fuel)?
                }
            }
            Program::Apply(f, a) => {
                let code = self.exec(f, x, fuel)?;
                let arg = self.exec(a, x, fuel)?;
                self.run(&code, &arg, fuel)?
            }
            Program::Smn(f, a) => {
                let code = self.exec(f, x, fuel)?;
                let arg = self.exec(a, x, fuel)?;
                smn(&code, &arg)
            }
            Program::Equal(a, b) => {
                let a = self.exec(a, x, fuel)?;
                let b = self.exec(b, x, fuel)?;
                if a == b {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            }
            Program::Diverge => return Err(Halt::Divergent),
        })
    }

    /// Compares the functions coded by `a` and `b` on `probes`.
    pub fn same_function_on(&self, a: &BigUint, b: &BigUint, probes: &[BigUint], limit: u64) -> ObservationVerdict<BigUint> {
        observational_eq(self, a, b, probes, limit)
    }
}

impl Model for K1Model {
    type Elem = BigUint;

    fn apply(&self, f: &BigUint, a: &BigUint, fuel: &mut Fuel) -> Step<BigUint> {
        self.run(f, a, fuel)
    }

    fn render(&self, e: &BigUint) -> String {
        e.to_string()
    }

    fn name(&self) -> &str {
        "k1"
    }
}

impl Combinatory for K1Model {
    fn k(&self) -> BigUint {
        k_code().clone()
    }

    fn s(&self) -> BigUint {
        s_code().clone()
    }
}

/// Specialization: a code for `x ↦ run2(code, a, x)`, built syntactically.
pub fn smn(code: &BigUint, a: &BigUint) -> BigUint {
    apply(Program::Const(code.clone()), pair_prog(Program::Const(a.clone()), input())).encode()
}

fn pair_prog(a: Program, b: Program) -> Program {
    program::build::pair(a, b)
}

macro_rules! fixed_code {
    ($name:ident, $body:expr) => {
        pub fn $name() -> &'static BigUint {
            static CELL: OnceLock<BigUint> = OnceLock::new();
            CELL.get_or_init(|| $body)
        }
    };
}

// k·a = smn(⟨a,b⟩ ↦ a, a)
fixed_code!(k_code, smn_prog(first_component()).encode());

// s·a·b = smn(smn(S3, a), b), where S3 runs on ⟨a, ⟨b, c⟩⟩.
fixed_code!(
    s_code,
    smn_prog(smn_twice(
        apply(
            apply(fst(input()), snd(snd(input()))),
            apply(fst(snd(input())), snd(snd(input()))),
        )
        .encode()
    ))
    .encode()
);

fixed_code!(diverge_code, Program::Diverge.encode());

fixed_code!(identity_code, Program::Input.encode());

fn first_component() -> BigUint {
    fst(input()).encode()
}

/// `x ↦ smn(code, x)`.
fn smn_prog(code: BigUint) -> Program {
    program::build::smn(Program::Const(code), input())
}

/// `⟨a, b⟩ ↦ smn(smn(code, a), b)`.
fn smn_twice(code: BigUint) -> BigUint {
    program::build::smn(program::build::smn(Program::Const(code), fst(input())), snd(input())).encode()
}

// runs on ⟨b, ⟨a, x⟩⟩ computing (b·a)·x
fixed_code!(totalizer_body, smn_twice(apply(apply(fst(input()), fst(snd(input()))), snd(snd(input()))).encode()));

/// Totalizer for the standard numbering: `f·a` always halts with a code
/// that first evaluates `b·a` and then runs the result on its input.
pub fn precomplete_totalizer(b: &BigUint) -> BigUint {
    smn(totalizer_body(), b)
}

// The totalizer as an element: `t·b = precomplete_totalizer(b)`.
fixed_code!(totalizer_code, smn_prog(totalizer_body().clone()).encode());

/// An induced equivalence on codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NumberingKernel {
    /// Code identity: the numbering is claimed to be 1-1.
    Identity,
    /// "Codes the same partial function", observed on probes.
    FunctionEquality,
}

impl NumberingKernel {
    pub fn claims_injective(self) -> bool {
        matches!(self, NumberingKernel::Identity)
    }

    pub fn related<M: Model>(self, model: &M, a: &M::Elem, b: &M::Elem, probes: &[M::Elem], limit: u64) -> bool {
        match self {
            NumberingKernel::Identity => a == b,
            NumberingKernel::FunctionEquality => {
                matches!(observational_eq(model, a, b, probes, limit), ObservationVerdict::AgreeOnProbes)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    const FUEL: u64 = 100_000;

    #[test]
    fn run_examples() {
        let m = K1Model::new();
        assert_eq!(m.run_outcome(&Program::Input.encode(), &n(7), FUEL), EvalOutcome::Defined(n(7)));
        assert_eq!(m.run_outcome(diverge_code(), &n(3), FUEL), EvalOutcome::ProvenDivergent);
        assert_eq!(m.run_outcome(&succ(input()).encode(), &n(4), FUEL), EvalOutcome::Defined(n(5)));
        assert_eq!(m.run_outcome(&pred(nat(0u32)).encode(), &n(4), FUEL), EvalOutcome::Defined(n(0)));
    }

    #[test]
    fn looping_program_exhausts_fuel() {
        let m = K1Model::new();
        let omega = apply(input(), input()).encode();
        assert_eq!(m.run_outcome(&omega, &omega, 500), EvalOutcome::FuelExhausted(500));
    }

    #[test]
    fn smn_specializes_first_argument() {
        let m = K1Model::new();
        let first = fst(input()).encode();
        let c = smn(&first, &n(9));
        for x in [0, 1, 17] {
            assert_eq!(m.run_outcome(&c, &n(x), FUEL), EvalOutcome::Defined(n(9)));
        }
        let second_plus_one = succ(snd(input())).encode();
        assert_eq!(m.run_outcome(&smn(&second_plus_one, &n(0)), &n(6), FUEL), EvalOutcome::Defined(n(7)));
        assert_ne!(smn(&first, &n(1)), smn(&first, &n(2)));
    }

    #[test]
    fn smn_primitive_agrees_with_function() {
        let m = K1Model::new();
        let prog = program::build::smn(nat(33u32), input()).encode();
        assert_eq!(m.run_outcome(&prog, &n(5), FUEL), EvalOutcome::Defined(smn(&n(33), &n(5))));
    }

    #[test]
    fn k_and_s_codes() {
        let m = K1Model::new();
        let k = k_code();
        let s = s_code();
        let ka = m.apply_outcome(k, &n(3), FUEL).defined().unwrap();
        assert_eq!(m.apply_outcome(&ka, &n(8), FUEL), EvalOutcome::Defined(n(3)));
        let sk = m.apply_outcome(s, k, FUEL).defined().unwrap();
        let skk = m.apply_outcome(&sk, k, FUEL).defined().unwrap();
        assert_eq!(m.apply_outcome(&skk, &n(5), FUEL), EvalOutcome::Defined(n(5)));
    }

    #[test]
    fn totalizer_tracks_diagonal() {
        let m = K1Model::new();
        let f = precomplete_totalizer(diverge_code());
        let fa = m.apply_outcome(&f, &n(12), FUEL).defined().unwrap();
        assert_eq!(m.apply_outcome(&fa, &n(0), FUEL), EvalOutcome::ProvenDivergent);
    }
}
