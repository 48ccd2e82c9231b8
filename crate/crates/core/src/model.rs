//! The partial applicative structure contract.

use std::fmt::Debug;
use std::hash::Hash;

use crate::outcome::{EvalOutcome, Fuel, Step};

/// A partial applicative structure with fueled application.
///
/// Element equality is the model's native identity (`Eq` on handles).
/// `apply` must be deterministic and fuel-monotone. Implementations draw
/// their internal steps from the same `Fuel` the caller passes in.
pub trait Model {
    type Elem: Clone + Eq + Hash + Debug;

    fn apply(&self, f: &Self::Elem, a: &Self::Elem, fuel: &mut Fuel) -> Step<Self::Elem>;

    fn render(&self, e: &Self::Elem) -> String;

    fn name(&self) -> &str;

    fn apply_outcome(&self, f: &Self::Elem, a: &Self::Elem, limit: u64) -> EvalOutcome<Self::Elem> {
        let mut fuel = Fuel::new(limit);
        let r = self.apply(f, a, &mut fuel);
        fuel.settle(r)
    }
}

/// A model that ships primitive `k` and `s` elements.
pub trait Combinatory: Model {
    fn k(&self) -> Self::Elem;
    fn s(&self) -> Self::Elem;
}

impl<M: Model + ?Sized> Model for &M {
    type Elem = M::Elem;

    fn apply(&self, f: &Self::Elem, a: &Self::Elem, fuel: &mut Fuel) -> Step<Self::Elem> {
        (**self).apply(f, a, fuel)
    }

    fn render(&self, e: &Self::Elem) -> String {
        (**self).render(e)
    }

    fn name(&self) -> &str {
        (**self).name()
    }
}

impl<M: Combinatory + ?Sized> Combinatory for &M {
    fn k(&self) -> Self::Elem {
        (**self).k()
    }

    fn s(&self) -> Self::Elem {
        (**self).s()
    }
}
