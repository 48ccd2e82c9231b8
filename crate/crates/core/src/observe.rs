//! Observational comparison of elements on finitely many probes.

use serde::Serialize;

use crate::model::Model;
use crate::outcome::EvalOutcome;

/// Extensional equality is never decided, only refuted or sampled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ObservationVerdict<E> {
    Distinguished { probe: E, left: EvalOutcome<E>, right: EvalOutcome<E> },
    AgreeOnProbes,
}

/// `a x ≃ b x` for every probe, where exhausted fuel counts as unknown
/// and never distinguishes.
pub fn observational_eq<M: Model>(model: &M, a: &M::Elem, b: &M::Elem, probes: &[M::Elem], limit: u64) -> ObservationVerdict<M::Elem> {
    for x in probes {
        let left = model.apply_outcome(a, x, limit);
        let right = model.apply_outcome(b, x, limit);
        let differ = match (&left, &right) {
            (EvalOutcome::FuelExhausted(_), _) | (_, EvalOutcome::FuelExhausted(_)) => false,
            (l, r) => l != r,
        };
        if differ {
            return ObservationVerdict::Distinguished { probe: x.clone(), left, right };
        }
    }
    ObservationVerdict::AgreeOnProbes
}
