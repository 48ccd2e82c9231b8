//! Three-valued results of fueled evaluation.

use serde::Serialize;

/// Result of evaluating an application under a step budget.
///
/// `Defined` and `ProvenDivergent` are stable under more fuel;
/// `FuelExhausted` may turn into either one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "outcome", content = "value", rename_all = "kebab-case")]
pub enum EvalOutcome<T> {
    Defined(T),
    ProvenDivergent,
    FuelExhausted(u64),
}

impl<T> EvalOutcome<T> {
    pub fn is_defined(&self) -> bool {
        matches!(self, EvalOutcome::Defined(_))
    }

    pub fn defined(self) -> Option<T> {
        match self {
            EvalOutcome::Defined(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_defined(&self) -> Option<&T> {
        match self {
            EvalOutcome::Defined(v) => Some(v),
            _ => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> EvalOutcome<U> {
        match self {
            EvalOutcome::Defined(v) => EvalOutcome::Defined(f(v)),
            EvalOutcome::ProvenDivergent => EvalOutcome::ProvenDivergent,
            EvalOutcome::FuelExhausted(n) => EvalOutcome::FuelExhausted(n),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EvalOutcome::Defined(_) => "defined",
            EvalOutcome::ProvenDivergent => "proven-divergent",
            EvalOutcome::FuelExhausted(_) => "fuel-exhausted",
        }
    }
}

/// Why a computation stopped without a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Halt {
    Divergent,
    Exhausted,
}

pub type Step<T> = Result<T, Halt>;

/// A step budget shared by every layer of an evaluation.
#[derive(Clone, Debug)]
pub struct Fuel {
    limit: u64,
    spent: u64,
}

impl Fuel {
    pub fn new(limit: u64) -> Self {
        Fuel { limit, spent: 0 }
    }

    pub fn tick(&mut self) -> Step<()> {
        if self.spent >= self.limit {
            return Err(Halt::Exhausted);
        }
        self.spent += 1;
        Ok(())
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.spent
    }

    /// Converts an internal step result into the public outcome.
    pub fn settle<T>(&self, step: Step<T>) -> EvalOutcome<T> {
        match step {
            Ok(v) => EvalOutcome::Defined(v),
            Err(Halt::Divergent) => EvalOutcome::ProvenDivergent,
            Err(Halt::Exhausted) => EvalOutcome::FuelExhausted(self.spent),
        }
    }
}

impl<T> From<EvalOutcome<T>> for Step<T> {
    fn from(o: EvalOutcome<T>) -> Self {
        match o {
            EvalOutcome::Defined(v) => Ok(v),
            EvalOutcome::ProvenDivergent => Err(Halt::Divergent),
            EvalOutcome::FuelExhausted(_) => Err(Halt::Exhausted),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fuel_runs_out_exactly_at_limit() {
        let mut fuel = Fuel::new(3);
        assert!(fuel.tick().is_ok());
        assert!(fuel.tick().is_ok());
        assert!(fuel.tick().is_ok());
        assert_eq!(fuel.tick(), Err(Halt::Exhausted));
        assert_eq!(fuel.settle::<u8>(Err(Halt::Exhausted)), EvalOutcome::FuelExhausted(3));
    }

    #[test]
    fn outcome_serializes_with_tag() {
        let o: EvalOutcome<u32> = EvalOutcome::Defined(4);
        assert_eq!(serde_json::to_string(&o).unwrap(), r#"{"outcome":"defined","value":4}"#);
    }
}
