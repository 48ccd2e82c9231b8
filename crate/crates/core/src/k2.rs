//! A desk-scale Kleene second model on finitely described reals.
//!
//! `(α·β)(n) = α(⟨n, β(0), …, β(k−1)⟩) − 1` for the least `k` at which the
//! coded value is positive. Base elements answer every index; applied
//! elements compute their coordinates on demand under fuel, logging each
//! argument coordinate they consult.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Model;
use crate::outcome::{EvalOutcome, Fuel, Halt, Step};
use crate::pairing::query_decode;

/// What a prefix rule says about output coordinate `n` after seeing a prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Response {
    Wait,
    Answer(u64),
    /// Explicit marker: no extension of this prefix will ever answer.
    Reject,
}

/// Named functionals given by their action on finite prefixes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrefixRule {
    /// Copies the input while it is all zeros; rejects on the first 1.
    AlphaHat,
    /// Outputs ones once a 1 has been seen; silent on all-zero prefixes.
    BetaHat,
    /// Ignores its input.
    Constant(Box<K2Element>),
    /// Reads `reads` inputs, then answers with `if_all_zero` or `otherwise`.
    ReadThenDecide { reads: usize, if_all_zero: Box<K2Element>, otherwise: Box<K2Element> },
}

impl PrefixRule {
    pub fn respond(&self, n: u64, prefix: &[u64]) -> Response {
        self.respond_to(n, prefix.len(), prefix.iter().any(|&v| v != 0))
    }

    /// The response given only a prefix's length and whether it holds a nonzero.
    fn respond_to(&self, n: u64, len: usize, nonzero: bool) -> Response {
        match self {
            PrefixRule::AlphaHat => {
                if nonzero {
                    Response::Reject
                } else if len as u64 > n {
                    Response::Answer(0)
                } else {
                    Response::Wait
                }
            }
            PrefixRule::BetaHat => {
                if len as u64 > n && nonzero {
                    Response::Answer(1)
                } else {
                    Response::Wait
                }
            }
            PrefixRule::Constant(r) => Response::Answer(r.base_value(n)),
            PrefixRule::ReadThenDecide { reads, if_all_zero, otherwise } => {
                if len < *reads {
                    Response::Wait
                } else if !nonzero {
                    Response::Answer(if_all_zero.base_value(n))
                } else {
                    Response::Answer(otherwise.base_value(n))
                }
            }
        }
    }

    /// The coding real: positive only at the first prefix that answers.
    pub fn coded_value(&self, n: u64, seq: &[u64]) -> u64 {
        if (0..seq.len()).any(|k| self.respond(n, &seq[..k]) != Response::Wait) {
            return 0;
        }
        match self.respond(n, seq) {
            Response::Answer(v) => v + 1,
            Response::Wait | Response::Reject => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum K2Element {
    /// `prefix` followed by `period` repeated forever.
    Periodic { prefix: Vec<u64>, period: Vec<u64> },
    Rule(PrefixRule),
    #[serde(skip)]
    Applied(Arc<K2Element>, Arc<K2Element>),
}

impl K2Element {
    pub fn constant(v: u64) -> Self {
        K2Element::Periodic { prefix: vec![], period: vec![v] }
    }

    pub fn zeros() -> Self {
        Self::constant(0)
    }

    pub fn ones() -> Self {
        Self::constant(1)
    }

    /// `0^p 1 0^ω`.
    pub fn single_one_at(p: usize) -> Self {
        let mut prefix = vec![0; p];
        prefix.push(1);
        K2Element::Periodic { prefix, period: vec![0] }
    }

    pub fn rule(r: PrefixRule) -> Self {
        K2Element::Rule(r)
    }

    /// Value of a base element; applied elements are not base.
    fn base_value(&self, i: u64) -> u64 {
        match self {
            K2Element::Periodic { prefix, period } => {
                if (i as usize) < prefix.len() {
                    prefix[i as usize]
                } else {
                    period[(i as usize - prefix.len()) % period.len()]
                }
            }
            K2Element::Rule(r) => match query_decode(&BigUint::from(i)) {
                Some((n, seq)) => r.coded_value(n, &seq),
                None => 0,
            },
            K2Element::Applied(..) => panic!("applied elements have no closed-form value"),
        }
    }

    fn is_well_formed(&self) -> bool {
        match self {
            K2Element::Periodic { period, .. } => !period.is_empty(),
            K2Element::Rule(PrefixRule::Constant(r)) => r.is_well_formed() && !matches!(**r, K2Element::Applied(..)),
            K2Element::Rule(PrefixRule::ReadThenDecide { if_all_zero, otherwise, .. }) => {
                if_all_zero.is_well_formed() && otherwise.is_well_formed()
            }
            K2Element::Rule(_) => true,
            K2Element::Applied(f, a) => f.is_well_formed() && a.is_well_formed(),
        }
    }

    /// Coordinate `i`, logging the argument coordinates consulted by
    /// applications at the top level.
    pub fn coordinate(&self, i: u64, fuel: &mut Fuel, log: &mut Vec<u64>) -> Step<u64> {
        match self {
            K2Element::Applied(f, a) => apply_coordinate(f, a, i, fuel, log),
            _ => Ok(self.base_value(i)),
        }
    }

    /// The first `n` coordinates, without fuel concerns for base elements.
    pub fn prefix(&self, n: usize, fuel: &mut Fuel) -> Step<Vec<u64>> {
        (0..n as u64).map(|i| self.coordinate(i, fuel, &mut Vec::new())).collect()
    }
}

impl fmt::Display for K2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            K2Element::Periodic { prefix, period } => {
                let p: Vec<String> = prefix.iter().map(u64::to_string).collect();
                let q: Vec<String> = period.iter().map(u64::to_string).collect();
                write!(f, "[{}]({})^ω", p.join(","), q.join(","))
            }
            K2Element::Rule(r) => match r {
                PrefixRule::AlphaHat => f.write_str("alpha-hat"),
                PrefixRule::BetaHat => f.write_str("beta-hat"),
                PrefixRule::Constant(e) => write!(f, "const({e})"),
                PrefixRule::ReadThenDecide { reads, if_all_zero, otherwise } => {
                    write!(f, "read{reads}({if_all_zero}|{otherwise})")
                }
            },
            K2Element::Applied(a, b) => write!(f, "({a} · {b})"),
        }
    }
}

fn apply_coordinate(alpha: &K2Element, beta: &K2Element, n: u64, fuel: &mut Fuel, log: &mut Vec<u64>) -> Step<u64> {
    let mut prefix: Vec<u64> = Vec::new();
    let mut nonzero = false;
    let logged: HashSet<u64> = log.iter().copied().collect();
    loop {
        fuel.tick()?;
        let v = match alpha {
            // every shorter prefix got Wait, so the response is the coded value
            K2Element::Rule(r) => match r.respond_to(n, prefix.len(), nonzero) {
                Response::Reject => return Err(Halt::Divergent),
                Response::Answer(v) => v + 1,
                Response::Wait => 0,
            },
            _ => {
                let idx = crate::pairing::query_code(n, &prefix).to_u64().ok_or(Halt::Exhausted)?;
                alpha.coordinate(idx, fuel, &mut Vec::new())?
            }
        };
        if v > 0 {
            return Ok(v - 1);
        }
        let k = prefix.len() as u64;
        let next = beta.coordinate(k, fuel, &mut Vec::new())?;
        if !logged.contains(&k) {
            log.push(k);
        }
        nonzero |= next != 0;
        prefix.push(next);
    }
}

/// Result of applying `α` to `β` on a window of output coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct K2Application {
    pub outcome: EvalOutcome<Vec<u64>>,
    /// Argument coordinates consulted, per output coordinate computed.
    pub query_log: Vec<Vec<u64>>,
    pub fuel_spent: u64,
}

impl K2Application {
    /// Distinct argument coordinates consulted overall.
    pub fn queries(&self) -> usize {
        let mut all: Vec<u64> = self.query_log.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum K2Error {
    #[error("malformed element: periodic parts need a nonempty period")]
    Malformed,
    #[error("the two truth reals agree on the first {0} coordinates")]
    TruthValuesAgree(u64),
    #[error("candidate is not a decider: γ·0̄ at coordinate {coordinate} is {value}, neither truth value")]
    NotADecider { coordinate: u64, value: u64 },
    #[error("candidate is not total on the tested input: {0}")]
    Undefined(&'static str),
    #[error("continuity failed: identical consulted prefix gave different values")]
    Discontinuous,
}

/// Computes the first `coords` output coordinates of `α·β`.
pub fn k2_apply(alpha: &K2Element, beta: &K2Element, coords: usize, limit: u64) -> Result<K2Application, K2Error> {
    if !alpha.is_well_formed() || !beta.is_well_formed() {
        return Err(K2Error::Malformed);
    }
    let mut fuel = Fuel::new(limit);
    let mut values = Vec::with_capacity(coords);
    let mut query_log = Vec::new();
    let mut failure = None;
    for n in 0..coords as u64 {
        let mut log = Vec::new();
        let r = apply_coordinate(alpha, beta, n, &mut fuel, &mut log);
        query_log.push(log);
        match r {
            Ok(v) => values.push(v),
            Err(h) => {
                failure = Some(h);
                break;
            }
        }
    }
    let outcome = match failure {
        None => EvalOutcome::Defined(values),
        Some(h) => fuel.settle::<Vec<u64>>(Err(h)),
    };
    Ok(K2Application { outcome, query_log, fuel_spent: fuel.spent() })
}

/// `(α̂, β̂)`: the domain of the first is `{0̄}`, of the second its complement.
pub fn make_counterexample_pair() -> (K2Element, K2Element) {
    (K2Element::rule(PrefixRule::AlphaHat), K2Element::rule(PrefixRule::BetaHat))
}

/// Application as a partial applicative structure: `α·β` is reported
/// defined once its first `window` coordinates are.
#[derive(Clone, Debug)]
pub struct K2Model {
    pub window: usize,
}

impl Default for K2Model {
    fn default() -> Self {
        K2Model { window: 16 }
    }
}

impl Model for K2Model {
    type Elem = K2Element;

    fn apply(&self, f: &K2Element, a: &K2Element, fuel: &mut Fuel) -> Step<K2Element> {
        let out = K2Element::Applied(Arc::new(f.clone()), Arc::new(a.clone()));
        for i in 0..self.window as u64 {
            out.coordinate(i, fuel, &mut Vec::new())?;
        }
        Ok(out)
    }

    fn render(&self, e: &K2Element) -> String {
        e.to_string()
    }

    fn name(&self) -> &str {
        "k2"
    }
}

/// A concrete wrong answer of a claimed decider for `{0̄}` on 0/1 reals.
#[derive(Clone, Debug, Serialize)]
pub struct K2Witness {
    pub kind: &'static str,
    /// Coordinate on which the truth reals differ.
    pub coordinate: u64,
    /// Number of leading input coordinates `γ·0̄` consulted there.
    pub consulted: usize,
    /// The input on which the candidate answers wrongly.
    pub input: String,
    pub input_is_zero_real: bool,
    /// Value of `γ·input` at `coordinate`.
    pub answer: u64,
    pub claims_member: bool,
    pub violated_clause: String,
}

const TRUTH_SCAN: u64 = 64;

pub fn refute_continuous_decider(
    gamma: &K2Element,
    true_real: &K2Element,
    false_real: &K2Element,
    limit: u64,
) -> Result<K2Witness, K2Error> {
    if !gamma.is_well_formed() || !true_real.is_well_formed() || !false_real.is_well_formed() {
        return Err(K2Error::Malformed);
    }
    let mut fuel = Fuel::new(limit);
    let mut scratch = Vec::new();
    let mut coord = None;
    for j in 0..TRUTH_SCAN {
        let t = true_real.coordinate(j, &mut fuel, &mut scratch).map_err(|_| K2Error::Undefined("true real"))?;
        let f = false_real.coordinate(j, &mut fuel, &mut scratch).map_err(|_| K2Error::Undefined("false real"))?;
        if t != f {
            coord = Some((j, t, f));
            break;
        }
    }
    let (j, t, f) = coord.ok_or(K2Error::TruthValuesAgree(TRUTH_SCAN))?;

    let zero = K2Element::zeros();
    let mut log = Vec::new();
    let v0 = apply_coordinate(gamma, &zero, j, &mut fuel, &mut log).map_err(|h| match h {
        Halt::Divergent => K2Error::Undefined("γ·0̄ is proven divergent"),
        Halt::Exhausted => K2Error::Undefined("γ·0̄ exhausted fuel"),
    })?;
    let consulted = log.iter().map(|&k| k as usize + 1).max().unwrap_or(0);
    if v0 == f {
        return Ok(K2Witness {
            kind: "wrong-on-member",
            coordinate: j,
            consulted,
            input: zero.to_string(),
            input_is_zero_real: true,
            answer: v0,
            claims_member: false,
            violated_clause: "γ·0̄ must be the true real since 0̄ ∈ A".into(),
        });
    }
    if v0 != t {
        return Err(K2Error::NotADecider { coordinate: j, value: v0 });
    }
    let flip = K2Element::single_one_at(consulted);
    let mut flip_log = Vec::new();
    let v1 = apply_coordinate(gamma, &flip, j, &mut fuel, &mut flip_log).map_err(|_| K2Error::Undefined("γ·x"))?;
    if v1 != v0 {
        return Err(K2Error::Discontinuous);
    }
    Ok(K2Witness {
        kind: "wrong-on-non-member",
        coordinate: j,
        consulted,
        input: flip.to_string(),
        input_is_zero_real: false,
        answer: v1,
        claims_member: true,
        violated_clause: format!("x = 0^{consulted} 1 0^ω ∉ A, yet γ·x agrees with γ·0̄ on the consulted prefix"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FUEL: u64 = 100_000;

    #[test]
    fn alpha_hat_copies_zeros() {
        let (a, _) = make_counterexample_pair();
        let r = k2_apply(&a, &K2Element::zeros(), 16, FUEL).unwrap();
        assert_eq!(r.outcome, EvalOutcome::Defined(vec![0; 16]));
    }

    #[test]
    fn alpha_hat_rejects_after_first_one() {
        let (a, _) = make_counterexample_pair();
        for k in 0..6 {
            let r = k2_apply(&a, &K2Element::single_one_at(k), 16, FUEL).unwrap();
            assert_eq!(r.outcome, EvalOutcome::ProvenDivergent, "k = {k}");
            assert_eq!(r.queries(), k + 1);
        }
    }

    #[test]
    fn beta_hat_outputs_ones() {
        let (_, b) = make_counterexample_pair();
        let r = k2_apply(&b, &K2Element::single_one_at(3), 8, FUEL).unwrap();
        assert_eq!(r.outcome, EvalOutcome::Defined(vec![1; 8]));
        let r = k2_apply(&b, &K2Element::zeros(), 1, 5_000).unwrap();
        assert!(matches!(r.outcome, EvalOutcome::FuelExhausted(_)));
    }

    #[test]
    fn coded_values_fire_once_per_family() {
        let r = PrefixRule::BetaHat;
        // positive at [0,1] for n = 1, zero on the extension
        assert_eq!(r.coded_value(1, &[0, 1]), 2);
        assert_eq!(r.coded_value(1, &[0, 1, 1]), 0);
        assert_eq!(r.coded_value(1, &[0]), 0);
    }

    #[test]
    fn rule_as_real_matches_rule() {
        let beta = K2Element::rule(PrefixRule::BetaHat);
        let idx = crate::pairing::query_code(1, &[0, 1]).to_u64().unwrap();
        let mut fuel = Fuel::new(10);
        assert_eq!(beta.coordinate(idx, &mut fuel, &mut Vec::new()), Ok(2));
    }

    #[test]
    fn constant_decider_is_wrong_off_the_zero_real() {
        let g = K2Element::rule(PrefixRule::Constant(Box::new(K2Element::ones())));
        let w = refute_continuous_decider(&g, &K2Element::ones(), &K2Element::zeros(), FUEL).unwrap();
        assert_eq!(w.kind, "wrong-on-non-member");
        assert_eq!(w.consulted, 0);
        assert_eq!(w.input, K2Element::single_one_at(0).to_string());
    }

    #[test]
    fn read_five_decider_flips_at_five() {
        let g = K2Element::rule(PrefixRule::ReadThenDecide {
            reads: 5,
            if_all_zero: Box::new(K2Element::ones()),
            otherwise: Box::new(K2Element::zeros()),
        });
        let w = refute_continuous_decider(&g, &K2Element::ones(), &K2Element::zeros(), FUEL).unwrap();
        assert_eq!(w.consulted, 5);
        assert_eq!(w.input, K2Element::single_one_at(5).to_string());
    }

    #[test]
    fn constant_false_is_wrong_on_member() {
        let g = K2Element::rule(PrefixRule::Constant(Box::new(K2Element::zeros())));
        let w = refute_continuous_decider(&g, &K2Element::ones(), &K2Element::zeros(), FUEL).unwrap();
        assert_eq!(w.kind, "wrong-on-member");
        assert!(w.input_is_zero_real);
    }

    #[test]
    fn non_decider_is_reported() {
        let g = K2Element::rule(PrefixRule::Constant(Box::new(K2Element::constant(7))));
        let e = refute_continuous_decider(&g, &K2Element::ones(), &K2Element::zeros(), FUEL).unwrap_err();
        assert_eq!(e, K2Error::NotADecider { coordinate: 0, value: 7 });
    }

    #[test]
    fn model_application_checks_window() {
        let m = K2Model { window: 8 };
        let (a, b) = make_counterexample_pair();
        assert!(m.apply_outcome(&a, &K2Element::zeros(), FUEL).is_defined());
        assert_eq!(m.apply_outcome(&a, &K2Element::ones(), FUEL), EvalOutcome::ProvenDivergent);
        assert!(m.apply_outcome(&b, &K2Element::ones(), FUEL).is_defined());
    }

    #[test]
    fn element_specs_parse_from_json() {
        let e: K2Element = serde_json::from_str(r#"{"rule":"alpha-hat"}"#).unwrap();
        assert_eq!(e, K2Element::rule(PrefixRule::AlphaHat));
        let e: K2Element = serde_json::from_str(r#"{"periodic":{"prefix":[0,1],"period":[0]}}"#).unwrap();
        assert_eq!(e, K2Element::single_one_at(1));
    }
}
