//! Booleans, tuples, numerals and converters compiled from λ*-definitions.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{Combinatory, Model};
use crate::outcome::{EvalOutcome, Fuel, Step};
use crate::term::{app, apps, cst, eval_closed, lams, var, Basis, Term, TermError};

pub const MAX_ARITY: usize = 4;
pub const DEFAULT_NUMERALS: usize = 24;

#[derive(Debug, Error)]
pub enum StdLibError {
    #[error("combinator axiom failed on smoke input: {0}")]
    Axiom(String),
    #[error("`{what}` did not evaluate to an element ({outcome})")]
    Undefined { what: String, outcome: &'static str },
    #[error("diverger check failed: f g is {0}, not proven divergent")]
    NotDivergent(&'static str),
    #[error("converter identities failed: {0:?}")]
    Converters(Vec<String>),
    #[error("numeral {0} was not precomputed")]
    NumeralRange(usize),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// Named elements of one model. Immutable once built.
#[derive(Clone, Debug)]
pub struct StdLib<E> {
    pub basis: Basis<E>,
    pub i: E,
    pub tru: E,
    pub fls: E,
    pub ite: E,
    pub not: E,
    pub and: E,
    pub zero: E,
    /// `c`: true ↦ 1̄, false ↦ 0̄.
    pub to_numeral: E,
    /// `d`: 1̄ ↦ true, 0̄ ↦ false.
    pub to_bool: E,
    /// `λ*f x y. f (x x) y`.
    pub fix_template: E,
    tuple_makers: Vec<E>,
    projections: BTreeMap<(usize, usize), E>,
    numerals: Vec<E>,
    pub fuel: u64,
}

impl<E: Clone + Eq + std::hash::Hash + std::fmt::Debug> StdLib<E> {
    pub fn build<M: Combinatory<Elem = E>>(model: &M, fuel: u64) -> Result<Self, StdLibError> {
        Self::build_with(model, fuel, DEFAULT_NUMERALS)
    }

    pub fn build_with<M: Combinatory<Elem = E>>(model: &M, fuel: u64, numerals: usize) -> Result<Self, StdLibError> {
        let basis = Basis::of(model);
        smoke_test(model, &basis, fuel)?;
        let closed = |what: &str, t: Term<E>| -> Result<E, StdLibError> { element(model, &basis, what, &t, fuel) };

        let i = closed("i", basis.identity())?;
        let tru = basis.k.clone();
        let fls = closed("false", app(cst(basis.k.clone()), cst(i.clone())))?;
        let ite = i.clone();
        let c = |e: &E| cst(e.clone());

        let not = closed("not", lams(&["a"], apps([c(&ite), var("a"), c(&fls), c(&tru)])))?;
        let and = closed(
            "and",
            lams(&["a", "b"], apps([c(&ite), var("a"), apps([c(&ite), var("b"), c(&tru), c(&fls)]), c(&fls)])),
        )?;

        let mut tuple_makers = Vec::new();
        let mut projections = BTreeMap::new();
        for n in 1..=MAX_ARITY {
            let names: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
            let mut binders: Vec<&str> = names.iter().map(String::as_str).collect();
            binders.push("z");
            let body = apps(std::iter::once(var("z")).chain(names.iter().map(|x| var(x))));
            tuple_makers.push(closed(&format!("tuple/{n}"), lams(&binders, body))?);
            for j in 1..=n {
                let us: Vec<&str> = names.iter().map(String::as_str).collect();
                projections.insert((n, j), closed(&format!("U^{n}_{j}"), lams(&us, var(&names[j - 1])))?);
            }
        }

        let mut lib = StdLib {
            basis,
            i: i.clone(),
            tru,
            fls,
            ite,
            not,
            and,
            zero: i.clone(),
            to_numeral: i.clone(),
            to_bool: i.clone(),
            fix_template: i.clone(),
            tuple_makers,
            projections,
            numerals: vec![i],
            fuel,
        };
        for n in 1..=numerals.max(2) {
            let prev = lib.numerals[n - 1].clone();
            let next = lib.tuple(model, &[lib.fls.clone(), prev])?;
            lib.numerals.push(next);
        }
        let one = lib.numerals[1].clone();
        let zero_num = lib.numerals[0].clone();
        lib.to_numeral = lib.element(model, "c", &lams(&["z"], apps([c(&lib.ite), var("z"), c(&one), c(&zero_num)])))?;
        lib.zero = lib.element(model, "zero", &lams(&["x"], app(var("x"), c(&lib.tru))))?;
        lib.to_bool = lib.element(model, "d", &lams(&["x"], app(c(&lib.not), app(c(&lib.zero), var("x")))))?;
        lib.fix_template =
            lib.element(model, "w-template", &lams(&["f", "x", "y"], apps([var("f"), app(var("x"), var("x")), var("y")])))?;
        Ok(lib)
    }

    /// Compiles and evaluates a closed term with this library's fuel.
    pub fn eval<M: Model<Elem = E>>(&self, model: &M, t: &Term<E>) -> Result<EvalOutcome<E>, TermError> {
        eval_closed(model, &self.basis.compile(t)?, self.fuel)
    }

    pub fn element<M: Model<Elem = E>>(&self, model: &M, what: &str, t: &Term<E>) -> Result<E, StdLibError> {
        element(model, &self.basis, what, t, self.fuel)
    }

    pub fn apply<M: Model<Elem = E>>(&self, model: &M, f: &E, a: &E) -> EvalOutcome<E> {
        model.apply_outcome(f, a, self.fuel)
    }

    /// `f a1 ... an` with one shared budget.
    pub fn apply_n<M: Model<Elem = E>>(&self, model: &M, f: &E, args: &[E]) -> EvalOutcome<E> {
        let mut fuel = Fuel::new(self.fuel);
        let r = apply_chain(model, f, args, &mut fuel);
        fuel.settle(r)
    }

    pub fn tuple_maker(&self, n: usize) -> &E {
        &self.tuple_makers[n - 1]
    }

    /// `⟨a1, ..., an⟩`.
    pub fn tuple<M: Model<Elem = E>>(&self, model: &M, items: &[E]) -> Result<E, StdLibError> {
        let out = self.apply_n(model, self.tuple_maker(items.len()), items);
        defined(format!("tuple/{}", items.len()), out)
    }

    pub fn projection(&self, n: usize, i: usize) -> &E {
        &self.projections[&(n, i)]
    }

    pub fn numeral(&self, n: usize) -> Result<&E, StdLibError> {
        self.numerals.get(n).ok_or(StdLibError::NumeralRange(n))
    }

    pub fn numerals(&self) -> &[E] {
        &self.numerals
    }

    pub fn one(&self) -> &E {
        &self.numerals[1]
    }

    pub fn zero_numeral(&self) -> &E {
        &self.numerals[0]
    }

    /// Index of `e` among the cached numerals, by handle identity.
    pub fn numeral_value(&self, e: &E) -> Option<usize> {
        self.numerals.iter().position(|n| n == e)
    }

    pub fn bool_value(&self, e: &E) -> Option<bool> {
        if *e == self.tru {
            Some(true)
        } else if *e == self.fls {
            Some(false)
        } else {
            None
        }
    }
}

fn apply_chain<M: Model>(model: &M, f: &M::Elem, args: &[M::Elem], fuel: &mut Fuel) -> Step<M::Elem> {
    let mut acc = f.clone();
    for a in args {
        fuel.tick()?;
        acc = model.apply(&acc, a, fuel)?;
    }
    Ok(acc)
}

fn defined<E>(what: String, o: EvalOutcome<E>) -> Result<E, StdLibError> {
    let label = o.label();
    o.defined().ok_or(StdLibError::Undefined { what, outcome: label })
}

fn element<M: Model>(model: &M, basis: &Basis<M::Elem>, what: &str, t: &Term<M::Elem>, fuel: u64) -> Result<M::Elem, StdLibError> {
    let out = eval_closed(model, &basis.compile(t)?, fuel)?;
    defined(what.to_string(), out)
}

fn smoke_test<M: Model>(model: &M, basis: &Basis<M::Elem>, fuel: u64) -> Result<(), StdLibError> {
    let sample = [basis.k.clone(), basis.s.clone()];
    for a in &sample {
        for b in &sample {
            let kab = eval_closed(model, &apps([cst(basis.k.clone()), cst(a.clone()), cst(b.clone())]), fuel)?;
            if kab.as_defined() != Some(a) {
                return Err(StdLibError::Axiom(format!("k a b = a failed ({})", kab.label())));
            }
            let sab = eval_closed(model, &apps([cst(basis.s.clone()), cst(a.clone()), cst(b.clone())]), fuel)?;
            if !sab.is_defined() {
                return Err(StdLibError::Axiom(format!("s a b defined failed ({})", sab.label())));
            }
        }
    }
    Ok(())
}

/// The four converter identities; returns `(c, d)` when all hold.
pub fn converters_roundtrip<M: Model>(model: &M, lib: &StdLib<M::Elem>) -> Result<(M::Elem, M::Elem), StdLibError>
where
    M::Elem: Clone + Eq + std::hash::Hash + std::fmt::Debug,
{
    let (c, d) = (&lib.to_numeral, &lib.to_bool);
    let checks = [
        ("c true = 1", c, &lib.tru, lib.one()),
        ("c false = 0", c, &lib.fls, lib.zero_numeral()),
        ("d 1 = true", d, lib.one(), &lib.tru),
        ("d 0 = false", d, lib.zero_numeral(), &lib.fls),
    ];
    let failed: Vec<String> = checks
        .iter()
        .filter(|(_, f, a, want)| lib.apply(model, f, a).as_defined() != Some(want))
        .map(|(name, ..)| name.to_string())
        .collect();
    if failed.is_empty() {
        Ok((c.clone(), d.clone()))
    } else {
        Err(StdLibError::Converters(failed))
    }
}

/// `h = λ*x.fg = s(kf)(kg)` for a pair with `fg` proven divergent.
pub fn diverger<M: Model>(model: &M, lib: &StdLib<M::Elem>, f: &M::Elem, g: &M::Elem) -> Result<M::Elem, StdLibError>
where
    M::Elem: Clone + Eq + std::hash::Hash + std::fmt::Debug,
{
    match lib.apply(model, f, g) {
        EvalOutcome::ProvenDivergent => {}
        other => return Err(StdLibError::NotDivergent(other.label())),
    }
    lib.element(model, "h", &lams(&["x"], app(cst(f.clone()), cst(g.clone()))))
}

/// `e = w w` with `w = λ*x y. f (x x) y`, so that `e y ≃ f e y`.
pub fn fixpoint<M: Model>(model: &M, lib: &StdLib<M::Elem>, f: &M::Elem) -> Result<M::Elem, StdLibError>
where
    M::Elem: Clone + Eq + std::hash::Hash + std::fmt::Debug,
{
    let w = defined("w".into(), lib.apply(model, &lib.fix_template, f))?;
    defined("w w".into(), lib.apply(model, &w, &w))
}
