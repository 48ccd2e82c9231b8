//! Terms over a pca and the λ*-abstraction compiler.
//!
//! Compilation uses the classical bracket-abstraction rules in a fixed order:
//! the bound variable itself becomes `s k k`; a subterm without the variable
//! becomes `k t`; an application becomes `s (λ*x.u) (λ*x.v)`. The constant
//! rule is only taken for subterms whose definedness is syntactically
//! guaranteed (see [`Basis::is_total_shape`]), otherwise a divergent
//! parameter-free subterm would make the compiled abstraction itself undefined.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{Combinatory, Model};
use crate::outcome::{EvalOutcome, Fuel, Step};
use crate::sexpr::{Sexpr, SexprError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term<C> {
    Const(C),
    Var(String),
    App(Box<Term<C>>, Box<Term<C>>),
    /// Surface binder; removed by [`compile`].
    LambdaStar(String, Box<Term<C>>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("λ* input still contains a binder for `{0}`; compile inner binders first")]
    NestedBinder(String),
    #[error("term is not closed: free variables {0:?}")]
    NotClosed(Vec<String>),
    #[error("term contains an uncompiled binder")]
    UncompiledBinder,
    #[error("malformed term: {0}")]
    Syntax(String),
    #[error(transparent)]
    Sexpr(#[from] SexprError),
}

/// Shorthand constructors.
pub fn var<C>(x: &str) -> Term<C> {
    Term::Var(x.to_string())
}

pub fn cst<C>(c: C) -> Term<C> {
    Term::Const(c)
}

pub fn app<C>(f: Term<C>, a: Term<C>) -> Term<C> {
    Term::App(Box::new(f), Box::new(a))
}

/// Left-associated application `t0 t1 ... tn`.
pub fn apps<C>(terms: impl IntoIterator<Item = Term<C>>) -> Term<C> {
    let mut it = terms.into_iter();
    let head = it.next().expect("apps needs at least one term");
    it.fold(head, app)
}

pub fn lam<C>(x: &str, body: Term<C>) -> Term<C> {
    Term::LambdaStar(x.to_string(), Box::new(body))
}

/// Nested binders `λ*x1...xn.body`.
pub fn lams<C>(xs: &[&str], body: Term<C>) -> Term<C> {
    xs.iter().rev().fold(body, |b, x| lam(x, b))
}

impl<C> Term<C> {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Const(_) => {}
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Term::LambdaStar(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Term::Const(_) => false,
            Term::Var(y) => y == x,
            Term::App(f, a) => f.has_free(x) || a.has_free(x),
            Term::LambdaStar(y, body) => y != x && body.has_free(x),
        }
    }

    pub fn has_binder(&self) -> bool {
        match self {
            Term::Const(_) | Term::Var(_) => false,
            Term::App(f, a) => f.has_binder() || a.has_binder(),
            Term::LambdaStar(..) => true,
        }
    }

    pub fn map_consts<D>(&self, f: &mut impl FnMut(&C) -> D) -> Term<D> {
        match self {
            Term::Const(c) => Term::Const(f(c)),
            Term::Var(x) => Term::Var(x.clone()),
            Term::App(l, r) => app(l.map_consts(f), r.map_consts(f)),
            Term::LambdaStar(x, b) => lam(x, b.map_consts(f)),
        }
    }

    pub fn try_map_consts<D, E>(&self, f: &mut impl FnMut(&C) -> Result<D, E>) -> Result<Term<D>, E> {
        Ok(match self {
            Term::Const(c) => Term::Const(f(c)?),
            Term::Var(x) => Term::Var(x.clone()),
            Term::App(l, r) => app(l.try_map_consts(f)?, r.try_map_consts(f)?),
            Term::LambdaStar(x, b) => lam(x, b.try_map_consts(f)?),
        })
    }

    /// Number of application nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 0,
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::LambdaStar(_, b) => b.size(),
        }
    }

    pub fn to_sexpr(&self, name: &impl Fn(&C) -> String) -> Sexpr {
        let atom = |s: &str| Sexpr::Atom(s.to_string());
        match self {
            Term::Const(c) => Sexpr::List(vec![atom("const"), Sexpr::Atom(name(c))]),
            Term::Var(x) => Sexpr::List(vec![atom("var"), atom(x)]),
            Term::App(f, a) => Sexpr::List(vec![atom("app"), f.to_sexpr(name), a.to_sexpr(name)]),
            Term::LambdaStar(x, b) => Sexpr::List(vec![atom("lam"), atom(x), b.to_sexpr(name)]),
        }
    }
}

impl<C: Clone> Term<C> {
    /// `t[x := c]`, respecting binders.
    pub fn subst(&self, x: &str, c: &C) -> Term<C> {
        match self {
            Term::Const(_) => self.clone(),
            Term::Var(y) if y == x => Term::Const(c.clone()),
            Term::Var(_) => self.clone(),
            Term::App(f, a) => app(f.subst(x, c), a.subst(x, c)),
            Term::LambdaStar(y, _) if y == x => self.clone(),
            Term::LambdaStar(y, b) => lam(y, b.subst(x, c)),
        }
    }
}

impl Term<String> {
    pub fn parse(src: &str) -> Result<Term<String>, TermError> {
        Self::from_sexpr(&Sexpr::parse(src)?)
    }

    pub fn from_sexpr(e: &Sexpr) -> Result<Term<String>, TermError> {
        let bad = || TermError::Syntax(e.to_string());
        let items = e.list().ok_or_else(bad)?;
        let head = items.first().and_then(Sexpr::atom).ok_or_else(bad)?;
        let word = |i: usize| items.get(i).and_then(Sexpr::atom).map(str::to_string).ok_or_else(bad);
        match (head, items.len()) {
            ("const", 2) => Ok(Term::Const(word(1)?)),
            ("var", 2) => Ok(Term::Var(word(1)?)),
            ("app", 3) => Ok(app(Self::from_sexpr(&items[1])?, Self::from_sexpr(&items[2])?)),
            ("lam", 3) => Ok(lam(&word(1)?, Self::from_sexpr(&items[2])?)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Term<String> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr(&|c: &String| c.clone()))
    }
}

/// The two primitive combinators compiled terms are built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis<C> {
    pub k: C,
    pub s: C,
}

impl<C: Clone + PartialEq> Basis<C> {
    pub fn of<M: Combinatory<Elem = C>>(model: &M) -> Self {
        Basis { k: model.k(), s: model.s() }
    }

    pub fn identity(&self) -> Term<C> {
        apps([cst(self.s.clone()), cst(self.k.clone()), cst(self.k.clone())])
    }

    fn is_const(&self, t: &Term<C>, c: &C) -> bool {
        matches!(t, Term::Const(d) if d == c)
    }

    /// Terms defined under every instantiation of their variables:
    /// atoms, `k u` and `s u`, and `s u v` with `u`, `v` of the same shape.
    pub fn is_total_shape(&self, t: &Term<C>) -> bool {
        match t {
            Term::Const(_) | Term::Var(_) => true,
            Term::LambdaStar(..) => false,
            Term::App(f, a) => {
                if !self.is_total_shape(a) {
                    return false;
                }
                if self.is_const(f, &self.k) || self.is_const(f, &self.s) {
                    return true;
                }
                match &**f {
                    Term::App(g, u) => self.is_const(g, &self.s) && self.is_total_shape(u),
                    _ => false,
                }
            }
        }
    }

    /// `λ*x.t` for a binder-free `t`.
    pub fn lambda_star(&self, x: &str, t: &Term<C>) -> Result<Term<C>, TermError> {
        match t {
            Term::LambdaStar(y, _) => Err(TermError::NestedBinder(y.clone())),
            Term::Var(y) if y == x => Ok(self.identity()),
            _ if !t.has_free(x) && self.is_total_shape(t) => {
                if t.has_binder() {
                    return Err(TermError::UncompiledBinder);
                }
                Ok(app(cst(self.k.clone()), t.clone()))
            }
            Term::App(u, v) => Ok(apps([
                cst(self.s.clone()),
                self.lambda_star(x, u)?,
                self.lambda_star(x, v)?,
            ])),
            Term::Const(_) | Term::Var(_) => unreachable!("atoms are total-shaped"),
        }
    }

    /// Eliminates every binder, innermost first.
    pub fn compile(&self, t: &Term<C>) -> Result<Term<C>, TermError> {
        match t {
            Term::Const(_) | Term::Var(_) => Ok(t.clone()),
            Term::App(f, a) => Ok(app(self.compile(f)?, self.compile(a)?)),
            Term::LambdaStar(x, body) => self.lambda_star(x, &self.compile(body)?),
        }
    }
}

/// Evaluates a closed, binder-free term leftmost-innermost. Each model
/// application costs one unit of fuel on top of what the model draws.
pub fn eval_closed<M: Model>(model: &M, t: &Term<M::Elem>, limit: u64) -> Result<EvalOutcome<M::Elem>, TermError> {
    let mut fuel = Fuel::new(limit);
    let r = eval_with(model, t, &mut fuel)?;
    Ok(fuel.settle(r))
}

pub fn eval_with<M: Model>(model: &M, t: &Term<M::Elem>, fuel: &mut Fuel) -> Result<Step<M::Elem>, TermError> {
    if t.has_binder() {
        return Err(TermError::UncompiledBinder);
    }
    let fv = t.free_vars();
    if !fv.is_empty() {
        return Err(TermError::NotClosed(fv.into_iter().collect()));
    }
    Ok(eval_unchecked(model, t, fuel))
}

fn eval_unchecked<M: Model>(model: &M, t: &Term<M::Elem>, fuel: &mut Fuel) -> Step<M::Elem> {
    match t {
        Term::Const(c) => Ok(c.clone()),
        Term::App(f, a) => {
            let fv = eval_unchecked(model, f, fuel)?;
            let av = eval_unchecked(model, a, fuel)?;
            fuel.tick()?;
            model.apply(&fv, &av, fuel)
        }
        Term::Var(_) | Term::LambdaStar(..) => unreachable!("checked closed and binder-free"),
    }
}
