//! Halting sets, m-reductions, and refuters that turn impossibility proofs
//! into witness extraction against concrete candidates.

pub mod candidates;
mod probes;
mod witness;

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use thiserror::Error;

use crate::k1::{self, K1Model, NumberingKernel};
use crate::model::{Combinatory, Model};
use crate::outcome::EvalOutcome;
use crate::pca::{diverger, StdLib, StdLibError};
use crate::term::{app, apps, cst, lams, var, Term};

pub use probes::{probe_elements, probe_pairs, ProbeReport};
pub use witness::{Application, Recorder, Witness, WitnessKind, WitnessReport};

#[derive(Debug, Error)]
pub enum ReductionError<E: Debug> {
    #[error(transparent)]
    Stdlib(#[from] StdLibError),
    #[error("precondition unmet: {0}")]
    Precondition(String),
    #[error("candidate is invalid: {}", .0.clause)]
    Invalid(Box<Witness<E>>),
    #[error("fuel exhausted: {}", .0.clause)]
    FuelExhausted(Box<Witness<E>>),
}

/// A model together with its standard library and a fixed diverger `h`.
pub struct Setting<'m, M: Model> {
    pub model: &'m M,
    pub lib: StdLib<M::Elem>,
    /// `h a` is proven divergent for every `a`.
    pub h: M::Elem,
    /// Budget for each recorded application.
    pub fuel: u64,
}

impl<'m, M> Setting<'m, M>
where
    M: Combinatory,
    M::Elem: Clone + Eq + Hash + Debug,
{
    /// `f g` must be proven divergent.
    pub fn new(model: &'m M, lib: StdLib<M::Elem>, f: &M::Elem, g: &M::Elem, fuel: u64) -> Result<Self, StdLibError> {
        let h = diverger(model, &lib, f, g)?;
        Ok(Setting { model, lib, h, fuel })
    }

    fn el(&self, what: &str, t: &Term<M::Elem>) -> Result<M::Elem, StdLibError> {
        self.lib.element(self.model, what, t)
    }

    fn c(&self, e: &M::Elem) -> Term<M::Elem> {
        cst(e.clone())
    }

    fn pair_term(&self, a: Term<M::Elem>, b: Term<M::Elem>) -> Term<M::Elem> {
        apps([self.c(self.lib.tuple_maker(2)), a, b])
    }

    pub fn recorder(&self) -> Recorder<'_, M> {
        Recorder::new(self.model, self.fuel)
    }

    pub fn numeral(&self, n: usize) -> M::Elem {
        self.lib.numerals()[n].clone()
    }

    /// `k v`: the constant function with value `v`.
    pub fn constant(&self, v: &M::Elem) -> Result<M::Elem, StdLibError> {
        self.el("k v", &app(self.c(&self.lib.basis.k), self.c(v)))
    }

    pub fn pair(&self, a: &M::Elem, b: &M::Elem) -> Result<M::Elem, StdLibError> {
        self.lib.tuple(self.model, &[a.clone(), b.clone()])
    }

    /// Definedness of `f a` within the setting's fuel; `None` if inconclusive.
    pub fn halts(&self, f: &M::Elem, a: &M::Elem) -> Option<bool> {
        halts_within(self.model, f, a, self.fuel)
    }

    /// `e x = (x U²₁)(x U²₂)`, so `e⟨a,b⟩ ≃ ab`.
    pub fn halting_ce_element(&self) -> Result<M::Elem, StdLibError> {
        let (u1, u2) = (self.lib.projection(2, 1), self.lib.projection(2, 2));
        self.el("halting e", &lams(&["x"], app(app(var("x"), self.c(u1)), app(var("x"), self.c(u2)))))
    }

    /// `e a = (ite (d(c a)) (k 0̄) h) a`; the trailing `a` keeps the divergent
    /// branch unevaluated under strict application.
    pub fn ce_from_decider(&self, c: &M::Elem, probes: &[M::Elem]) -> Result<M::Elem, ReductionError<M::Elem>> {
        let mut rec = self.recorder();
        for a in probes {
            let v = rec.apply(c, a);
            let ok = v.as_defined().is_some_and(|v| v == self.lib.zero_numeral() || v == self.lib.one());
            if !ok {
                return Err(self.invalid(rec, vec![("decider", c.clone()), ("probe", a.clone())], "c a must be 0̄ or 1̄"));
            }
        }
        let body = app(
            apps([
                self.c(&self.lib.ite),
                app(self.c(&self.lib.to_bool), app(self.c(c), var("a"))),
                app(self.c(&self.lib.basis.k), self.c(self.lib.zero_numeral())),
                self.c(&self.h),
            ]),
            var("a"),
        );
        Ok(self.el("e from decider", &lams(&["a"], body))?)
    }

    /// `f a = ⟨e, a⟩`.
    pub fn m_reduce_to_h(&self, e: &M::Elem) -> Result<M::Elem, StdLibError> {
        self.el("m-reduction", &lams(&["a"], self.pair_term(self.c(e), var("a"))))
    }

    /// `(f_KH, f_HK)` with `f_KH a = ⟨a,a⟩` and `f_HK x = λ*z.(xU²₁)(xU²₂)`.
    pub fn k_h_equivalence(&self) -> Result<(M::Elem, M::Elem), StdLibError> {
        let f_kh = self.el("f_KH", &lams(&["a"], self.pair_term(var("a"), var("a"))))?;
        Ok((f_kh, self.universal_unpacker()?))
    }

    /// `g⟨a,b⟩ z ≃ ab`; `g x` is always defined.
    fn universal_unpacker(&self) -> Result<M::Elem, StdLibError> {
        let (u1, u2) = (self.lib.projection(2, 1), self.lib.projection(2, 2));
        let body = app(app(var("x"), self.c(u1)), app(var("x"), self.c(u2)));
        self.el("f_HK", &lams(&["x", "z"], body))
    }

    /// `x ↦ f(g x)` for `g` the universal unpacker.
    pub fn extension_transfer(&self, f: &M::Elem) -> Result<M::Elem, StdLibError> {
        let g = self.universal_unpacker()?;
        self.el("extension transfer", &lams(&["x"], app(self.c(f), app(self.c(&g), var("x")))))
    }

    /// `flip z = c(not(d z))`: swaps 0̄ and 1̄.
    fn flip(&self) -> Result<M::Elem, StdLibError> {
        let l = &self.lib;
        self.el("flip", &lams(&["z"], app(self.c(&l.to_numeral), app(self.c(&l.not), app(self.c(&l.to_bool), var("z"))))))
    }

    fn invalid(&self, rec: Recorder<'_, M>, offending: Vec<(&str, M::Elem)>, clause: &str) -> ReductionError<M::Elem> {
        ReductionError::Invalid(Box::new(rec.finish(WitnessKind::InvalidCandidate, offending, clause)))
    }

    fn exhausted(&self, rec: Recorder<'_, M>, offending: Vec<(&str, M::Elem)>, clause: &str) -> ReductionError<M::Elem> {
        ReductionError::FuelExhausted(Box::new(rec.finish(WitnessKind::InvalidCandidate, offending, clause)))
    }

    /// Diagonalizes against a claimed total decider `f` of `H`.
    pub fn refute_halting_decider(&self, f: &M::Elem) -> Result<Witness<M::Elem>, ReductionError<M::Elem>> {
        let l = &self.lib;
        let test = app(self.c(&l.not), app(self.c(f), self.pair_term(var("a"), var("a"))));
        let body = app(
            apps([self.c(&l.ite), test, app(self.c(&l.basis.k), self.c(l.zero_numeral())), self.c(&self.h)]),
            var("a"),
        );
        let g = self.el("g", &lams(&["a"], body))?;
        let mut rec = self.recorder();
        let offending = || vec![("candidate", f.clone()), ("g", g.clone())];
        let gg_pair = match rec.apply_n(l.tuple_maker(2), &[g.clone(), g.clone()]) {
            EvalOutcome::Defined(p) => p,
            _ => return Err(self.exhausted(rec, offending(), "pairing ⟨g,g⟩ did not finish")),
        };
        let claim = rec.apply(f, &gg_pair);
        let says_halts = match &claim {
            EvalOutcome::FuelExhausted(_) => return Err(self.exhausted(rec, offending(), "f⟨g,g⟩ did not finish")),
            EvalOutcome::Defined(v) => l.bool_value(v),
            EvalOutcome::ProvenDivergent => None,
        };
        let Some(says_halts) = says_halts else {
            return Err(self.invalid(rec, offending(), "f⟨g,g⟩ must be true or false"));
        };
        let actual = rec.apply(&g, &g);
        let clause = match (says_halts, &actual) {
            (true, EvalOutcome::ProvenDivergent) => "f⟨g,g⟩ = true, yet g g diverges through h",
            (false, EvalOutcome::Defined(v)) if v == l.zero_numeral() => "f⟨g,g⟩ = false, yet g g = 0̄",
            (_, EvalOutcome::FuelExhausted(_)) => return Err(self.exhausted(rec, offending(), "g g did not finish")),
            _ => return Err(ReductionError::Precondition("stdlib branch identities failed on g g".into())),
        };
        Ok(rec.finish(WitnessKind::HaltingDecider, offending(), clause))
    }

    /// A claimed decider of some `C` with `A ⊆ C ⊆ ¬B`, where `A = {a : aa = 0̄}`
    /// and `B = {a : aa = 1̄}`, is wrong about itself.
    pub fn refute_separator(&self, c: &M::Elem) -> Result<Witness<M::Elem>, ReductionError<M::Elem>> {
        let mut rec = self.recorder();
        let v = rec.apply(c, c);
        let offending = vec![("candidate", c.clone())];
        let clause = match &v {
            EvalOutcome::Defined(v) if v == self.lib.one() => "c c = 1̄ puts c in B, so c ∉ C, yet c says c ∈ C",
            EvalOutcome::Defined(v) if v == self.lib.zero_numeral() => {
                "c c = 0̄ puts c in A ⊆ C, yet c says c ∉ C"
            }
            EvalOutcome::FuelExhausted(_) => return Err(self.exhausted(rec, offending, "c c did not finish")),
            _ => return Err(self.invalid(rec, offending, "c c must be 0̄ or 1̄")),
        };
        Ok(rec.finish(WitnessKind::Separator, offending, clause))
    }

    /// Shows `f` is not a total extension of the diagonal `b a = a a`.
    pub fn refute_total_extension(&self, f: &M::Elem, c01: &M::Elem) -> Result<Witness<M::Elem>, ReductionError<M::Elem>> {
        let mut rec = self.recorder();
        let probe = self.constant(self.lib.one())?;
        let offending = |extra: Option<(&'static str, M::Elem)>| {
            let mut v = vec![("candidate", f.clone()), ("c01", c01.clone())];
            v.extend(extra);
            v
        };
        let fa = rec.apply(f, &probe);
        match &fa {
            EvalOutcome::ProvenDivergent => {
                let w = rec.finish(WitnessKind::TotalExtension, offending(Some(("probe", probe))), "f is not total: f a diverges");
                return Ok(w.with_link("not-total"));
            }
            EvalOutcome::FuelExhausted(_) => return Err(self.exhausted(rec, offending(None), "f a did not finish")),
            EvalOutcome::Defined(v) => {
                let aa = rec.apply(&probe, &probe);
                if aa.as_defined() != Some(v) {
                    let w = rec.finish(
                        WitnessKind::TotalExtension,
                        offending(Some(("probe", probe))),
                        "extension violated at a direct probe: f a ≠ a a",
                    );
                    return Ok(w.with_link("extension-violated"));
                }
            }
        }

        let fhat = self.el("f-hat", &lams(&["a"], app(self.c(c01), app(self.c(f), var("a")))))?;
        let flip = self.flip()?;
        let g = self.el("g", &lams(&["a"], app(self.c(&flip), app(self.c(&fhat), var("a")))))?;
        let fg = rec.apply(f, &g);
        let fg = match fg {
            EvalOutcome::Defined(v) => v,
            EvalOutcome::ProvenDivergent => {
                let w = rec.finish(WitnessKind::TotalExtension, offending(Some(("g", g))), "f is not total: f g diverges");
                return Ok(w.with_link("not-total"));
            }
            EvalOutcome::FuelExhausted(_) => return Err(self.exhausted(rec, offending(Some(("g", g))), "f g did not finish")),
        };
        let gg = rec.apply(&g, &g);
        if let EvalOutcome::Defined(v) = &gg {
            if *v != fg {
                let w = rec.finish(
                    WitnessKind::TotalExtension,
                    offending(Some(("g", g))),
                    "extension violated at the diagonal: f g ≠ g g = flip(c01(f g))",
                );
                return Ok(w.with_link("extension-violated"));
            }
        } else if let EvalOutcome::FuelExhausted(_) = gg {
            return Err(self.exhausted(rec, offending(Some(("g", g))), "g g did not finish"));
        }
        // Either g g failed although f g did not, or f g = g g = flip(c01(f g)):
        // both force c01 to misbehave on f g.
        let w = rec.apply(c01, &fg);
        let fixes = w.as_defined() == Some(&fg);
        let is_01 = fg == *self.lib.zero_numeral() || fg == *self.lib.one();
        if !is_01 || !fixes {
            let w = rec.finish(
                WitnessKind::TotalExtension,
                offending(Some(("g", g))),
                "c01 is not a 0/1 separator on f g",
            );
            return Ok(w.with_link("c01-invalid"));
        }
        Err(ReductionError::Precondition("converter identities failed inside flip".into()))
    }

    /// Under a claimed 1-1 numbering, a precompleteness totalizer would give a
    /// literal total extension of the diagonal.
    pub fn refute_precomplete_injective(
        &self,
        totalizer: &M::Elem,
        kernel: NumberingKernel,
        c01: &M::Elem,
    ) -> Result<Witness<M::Elem>, ReductionError<M::Elem>> {
        if !kernel.claims_injective() {
            return Err(ReductionError::Precondition("the numbering kernel is not claimed to be 1-1".into()));
        }
        let b = self.el("diagonal", &lams(&["a"], app(var("a"), var("a"))))?;
        let mut rec = self.recorder();
        let f = match rec.apply(totalizer, &b) {
            EvalOutcome::Defined(f) => f,
            _ => {
                return Err(self.invalid(rec, vec![("totalizer", totalizer.clone())], "totalizer b must be defined"));
            }
        };
        let inner = match self.refute_total_extension(&f, c01) {
            Ok(w) => w,
            Err(ReductionError::Invalid(w)) => return Err(ReductionError::Invalid(Box::new(rec.prepend(*w)))),
            Err(ReductionError::FuelExhausted(w)) => {
                return Err(ReductionError::FuelExhausted(Box::new(rec.prepend(*w))))
            }
            Err(e) => return Err(e),
        };
        let mut w = rec.prepend(inner);
        w.kind = WitnessKind::PrecompleteOneOne;
        w.offending.insert(0, ("totalizer".into(), totalizer.clone()));
        Ok(w)
    }
}

pub fn halts_within<M: Model>(model: &M, f: &M::Elem, a: &M::Elem, fuel: u64) -> Option<bool> {
    match model.apply_outcome(f, a, fuel) {
        EvalOutcome::Defined(_) => Some(true),
        EvalOutcome::ProvenDivergent => Some(false),
        EvalOutcome::FuelExhausted(_) => None,
    }
}

impl<'m> Setting<'m, K1Model> {
    /// The standard K1 setting; the diverger comes from the code that never halts.
    pub fn k1(model: &'m K1Model, fuel: u64) -> Result<Self, StdLibError> {
        let lib = StdLib::build(model, fuel)?;
        Setting::new(model, lib, k1::diverge_code(), &BigUint::from(0u32), fuel)
    }
}
