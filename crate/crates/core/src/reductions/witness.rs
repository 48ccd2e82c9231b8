use serde::Serialize;

use crate::model::Model;
use crate::outcome::EvalOutcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    HaltingDecider,
    Separator,
    TotalExtension,
    #[serde(rename = "precomplete-1-1")]
    PrecompleteOneOne,
    InvalidCandidate,
}

/// One recorded `function · argument` under a fixed budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Application<E> {
    pub function: E,
    pub argument: E,
    pub fuel: u64,
    pub outcome: EvalOutcome<E>,
}

/// A concrete failure of a candidate, with every application that shows it.
#[derive(Clone, Debug)]
pub struct Witness<E> {
    pub kind: WitnessKind,
    pub offending: Vec<(String, E)>,
    pub transcript: Vec<Application<E>>,
    pub clause: String,
    /// Which link of the argument broke, when there is a choice.
    pub broken_link: Option<String>,
}

impl<E: Clone + Eq> Witness<E> {
    pub fn with_link(mut self, link: &str) -> Self {
        self.broken_link = Some(link.to_string());
        self
    }

    /// Re-evaluates every recorded application; `Err(i)` names the first mismatch.
    pub fn replay<M: Model<Elem = E>>(&self, model: &M) -> Result<(), usize> {
        for (i, a) in self.transcript.iter().enumerate() {
            if model.apply_outcome(&a.function, &a.argument, a.fuel) != a.outcome {
                return Err(i);
            }
        }
        Ok(())
    }

    pub fn report<M: Model<Elem = E>>(&self, model: &M) -> WitnessReport {
        WitnessReport {
            kind: self.kind,
            clause: self.clause.clone(),
            broken_link: self.broken_link.clone(),
            offending: self.offending.iter().map(|(r, e)| NamedElement { role: r.clone(), element: model.render(e) }).collect(),
            transcript: self
                .transcript
                .iter()
                .map(|a| ApplicationReport {
                    function: model.render(&a.function),
                    argument: model.render(&a.argument),
                    fuel: a.fuel,
                    outcome: a.outcome.label(),
                    value: a.outcome.as_defined().map(|v| model.render(v)),
                    fuel_spent: match a.outcome {
                        EvalOutcome::FuelExhausted(s) => Some(s),
                        _ => None,
                    },
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedElement {
    pub role: String,
    pub element: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApplicationReport {
    pub function: String,
    pub argument: String,
    pub fuel: u64,
    pub outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fuel_spent: Option<u64>,
}

/// Serializable form of a witness, elements rendered by the model.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub kind: WitnessKind,
    pub clause: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub broken_link: Option<String>,
    pub offending: Vec<NamedElement>,
    pub transcript: Vec<ApplicationReport>,
}

/// Evaluates applications and keeps the transcript.
pub struct Recorder<'a, M: Model> {
    model: &'a M,
    fuel: u64,
    log: Vec<Application<M::Elem>>,
}

impl<'a, M: Model> Recorder<'a, M> {
    pub fn new(model: &'a M, fuel: u64) -> Self {
        Recorder { model, fuel, log: Vec::new() }
    }

    pub fn apply(&mut self, f: &M::Elem, a: &M::Elem) -> EvalOutcome<M::Elem> {
        let outcome = self.model.apply_outcome(f, a, self.fuel);
        self.log.push(Application { function: f.clone(), argument: a.clone(), fuel: self.fuel, outcome: outcome.clone() });
        outcome
    }

    /// `f a1 … an`, one recorded application per step.
    pub fn apply_n(&mut self, f: &M::Elem, args: &[M::Elem]) -> EvalOutcome<M::Elem> {
        let mut acc = EvalOutcome::Defined(f.clone());
        for a in args {
            acc = match acc {
                EvalOutcome::Defined(g) => self.apply(&g, a),
                other => return other,
            };
        }
        acc
    }

    pub fn transcript(&self) -> &[Application<M::Elem>] {
        &self.log
    }

    pub fn finish(self, kind: WitnessKind, offending: Vec<(&str, M::Elem)>, clause: &str) -> Witness<M::Elem> {
        Witness {
            kind,
            offending: offending.into_iter().map(|(r, e)| (r.to_string(), e)).collect(),
            transcript: self.log,
            clause: clause.to_string(),
            broken_link: None,
        }
    }

    /// `inner` with this recorder's applications placed first.
    pub fn prepend(self, mut inner: Witness<M::Elem>) -> Witness<M::Elem> {
        let mut log = self.log;
        log.append(&mut inner.transcript);
        inner.transcript = log;
        inner
    }
}
