//! Relative computation `A[f]`: application as a dialogue with an oracle.
//!
//! A machine `a` is applied to the history `⟨ī, b, L⟩`, where `ī` is the
//! number of answers so far and `L` the answers as a cons list, most recent
//! first (`nil = i`, `cons = ⟨head, tail⟩`). It replies `⟨false, e⟩` to ask
//! the oracle about `e`, or `⟨true, c⟩` to finish with `c`.

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Combinatory, Model};
use crate::outcome::{EvalOutcome, Fuel, Halt, Step};
use crate::pca::{StdLib, StdLibError};
use crate::term::{app, apps, cst, lams, var, Term};

/// Deepest dialogue a compiled machine may hold.
pub const MAX_ROUNDS: usize = 16;

/// A total oracle: a finite table plus a default.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleFn<E> {
    pub table: Vec<(E, E)>,
    pub default: E,
}

impl<E: Clone + Eq> OracleFn<E> {
    pub fn new(table: Vec<(E, E)>, default: E) -> Self {
        OracleFn { table, default }
    }

    pub fn query(&self, e: &E) -> E {
        self.table.iter().find(|(k, _)| k == e).map_or_else(|| self.default.clone(), |(_, v)| v.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round<E> {
    pub history: E,
    pub reply: E,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DialogueEnd<E> {
    Returned(E),
    Divergent,
    Exhausted,
    /// The reply of this round was not a ⟨boolean, payload⟩ pair.
    InvalidReply(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DialogueTranscript<E> {
    pub queries: Vec<E>,
    pub answers: Vec<E>,
    pub rounds: Vec<Round<E>>,
    pub end: DialogueEnd<E>,
}

impl<E> DialogueTranscript<E> {
    fn new() -> Self {
        DialogueTranscript { queries: vec![], answers: vec![], rounds: vec![], end: DialogueEnd::Exhausted }
    }
}

/// Serializable view of a transcript.
#[derive(Clone, Debug, Serialize)]
pub struct TranscriptReport {
    pub rounds: Vec<RoundReport>,
    pub end: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundReport {
    pub round: usize,
    pub kind: &'static str,
    pub payload: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
}

impl<E> DialogueTranscript<E> {
    pub fn report(&self, render: impl Fn(&E) -> String) -> TranscriptReport {
        let mut rounds: Vec<RoundReport> = self
            .queries
            .iter()
            .zip(&self.answers)
            .enumerate()
            .map(|(i, (q, a))| RoundReport { round: i, kind: "query", payload: render(q), answer: Some(render(a)) })
            .collect();
        let (end, result) = match &self.end {
            DialogueEnd::Returned(c) => {
                rounds.push(RoundReport { round: rounds.len(), kind: "return", payload: render(c), answer: None });
                ("returned".to_string(), Some(render(c)))
            }
            DialogueEnd::Divergent => ("proven-divergent".into(), None),
            DialogueEnd::Exhausted => ("fuel-exhausted".into(), None),
            DialogueEnd::InvalidReply(r) => (format!("invalid-reply-at-round-{r}"), None),
        };
        TranscriptReport { rounds, end, result }
    }
}

fn chain<M: Model>(model: &M, f: &M::Elem, args: &[&M::Elem], fuel: &mut Fuel) -> Step<M::Elem> {
    let mut acc = f.clone();
    for a in args {
        fuel.tick()?;
        acc = model.apply(&acc, a, fuel)?;
    }
    Ok(acc)
}

/// Runs the dialogue of `a` on `b` against `oracle`, drawing on `fuel`.
pub fn dialogue<M>(
    model: &M,
    lib: &StdLib<M::Elem>,
    oracle: &OracleFn<M::Elem>,
    a: &M::Elem,
    b: &M::Elem,
    fuel: &mut Fuel,
) -> DialogueTranscript<M::Elem>
where
    M: Model,
    M::Elem: Clone + Eq + Hash + Debug,
{
    let mut t = DialogueTranscript::new();
    let mut answers_list = lib.i.clone();
    let mut round = 0;
    loop {
        t.end = match dialogue_round(model, lib, oracle, a, b, round, &mut answers_list, &mut t, fuel) {
            Ok(RoundEnd::Asked) => {
                round += 1;
                continue;
            }
            Ok(RoundEnd::Returned(c)) => DialogueEnd::Returned(c),
            Ok(RoundEnd::Invalid) => DialogueEnd::InvalidReply(round),
            Err(Halt::Divergent) => DialogueEnd::Divergent,
            // also reached when the round count outruns the cached numerals
            Err(Halt::Exhausted) => DialogueEnd::Exhausted,
        };
        return t;
    }
}

enum RoundEnd<E> {
    Asked,
    Returned(E),
    Invalid,
}

#[allow(clippy::too_many_arguments)]
fn dialogue_round<M>(
    model: &M,
    lib: &StdLib<M::Elem>,
    oracle: &OracleFn<M::Elem>,
    a: &M::Elem,
    b: &M::Elem,
    round: usize,
    answers_list: &mut M::Elem,
    t: &mut DialogueTranscript<M::Elem>,
    fuel: &mut Fuel,
) -> Step<RoundEnd<M::Elem>>
where
    M: Model,
    M::Elem: Clone + Eq + Hash + Debug,
{
    fuel.tick()?;
    let n = lib.numeral(round).map_err(|_| Halt::Exhausted)?;
    let history = chain(model, lib.tuple_maker(3), &[n, b, answers_list], fuel)?;
    let reply = chain(model, a, &[&history], fuel)?;
    t.rounds.push(Round { history, reply: reply.clone() });
    let tag = chain(model, &reply, &[lib.projection(2, 1)], fuel);
    let payload = chain(model, &reply, &[lib.projection(2, 2)], fuel);
    let (Ok(tag), Ok(payload)) = (tag, payload) else { return Ok(RoundEnd::Invalid) };
    match lib.bool_value(&tag) {
        Some(true) => Ok(RoundEnd::Returned(payload)),
        Some(false) => {
            let answer = oracle.query(&payload);
            *answers_list = chain(model, lib.tuple_maker(2), &[&answer, answers_list], fuel)?;
            t.queries.push(payload);
            t.answers.push(answer);
            Ok(RoundEnd::Asked)
        }
        None => Ok(RoundEnd::Invalid),
    }
}

/// `a ·_f b` with its transcript.
pub fn oracle_apply<M>(
    model: &M,
    lib: &StdLib<M::Elem>,
    oracle: &OracleFn<M::Elem>,
    a: &M::Elem,
    b: &M::Elem,
    limit: u64,
) -> (EvalOutcome<M::Elem>, DialogueTranscript<M::Elem>)
where
    M: Model,
    M::Elem: Clone + Eq + Hash + Debug,
{
    let mut fuel = Fuel::new(limit);
    let t = dialogue(model, lib, oracle, a, b, &mut fuel);
    let outcome = match &t.end {
        DialogueEnd::Returned(c) => EvalOutcome::Defined(c.clone()),
        DialogueEnd::Divergent | DialogueEnd::InvalidReply(_) => EvalOutcome::ProvenDivergent,
        DialogueEnd::Exhausted => EvalOutcome::FuelExhausted(fuel.spent()),
    };
    (outcome, t)
}

/// Replays each round against the bare model and checks the protocol clauses.
/// `Err` names the first clause that fails.
pub fn check_protocol<M>(
    model: &M,
    lib: &StdLib<M::Elem>,
    oracle: &OracleFn<M::Elem>,
    a: &M::Elem,
    b: &M::Elem,
    t: &DialogueTranscript<M::Elem>,
) -> Result<(), String>
where
    M: Model,
    M::Elem: Clone + Eq + Hash + Debug,
{
    let limit = lib.fuel;
    if t.queries.len() != t.answers.len() {
        return Err("answer count differs from query count".into());
    }
    let mut list = lib.i.clone();
    for (i, round) in t.rounds.iter().enumerate() {
        let n = lib.numeral(i).map_err(|e| e.to_string())?;
        let history = lib
            .apply_n(model, lib.tuple_maker(3), &[n.clone(), b.clone(), list.clone()])
            .defined()
            .ok_or(format!("round {i}: history not rebuilt"))?;
        if history != round.history {
            return Err(format!("round {i}: history differs"));
        }
        if model.apply_outcome(a, &history, limit).as_defined() != Some(&round.reply) {
            return Err(format!("round {i}: reply differs on replay"));
        }
        let tag = model.apply_outcome(&round.reply, lib.projection(2, 1), limit).defined();
        let payload = model.apply_outcome(&round.reply, lib.projection(2, 2), limit).defined();
        match (tag.and_then(|t| lib.bool_value(&t)), payload) {
            (Some(false), Some(e)) => {
                if t.queries.get(i) != Some(&e) {
                    return Err(format!("round {i}: ⟨false, e⟩ but query {i} is not e"));
                }
                let ans = oracle.query(&e);
                if t.answers[i] != ans {
                    return Err(format!("round {i}: answer is not f(e)"));
                }
                list = lib.tuple(model, &[ans, list]).map_err(|e| e.to_string())?;
            }
            (Some(true), Some(c)) => {
                if i + 1 != t.rounds.len() || t.end != DialogueEnd::Returned(c) {
                    return Err(format!("round {i}: ⟨true, c⟩ must end the dialogue with c"));
                }
            }
            _ => {
                if t.end != DialogueEnd::InvalidReply(i) {
                    return Err(format!("round {i}: malformed reply not reported"));
                }
            }
        }
    }
    Ok(())
}

/// Where a round's value comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source<E> {
    Input,
    /// The oracle's answer in an earlier round.
    Answer(usize),
    Const(E),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanStep<E> {
    Ask(Source<E>),
    Return(Source<E>),
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("plan is empty or has no final return")]
    NoReturn,
    #[error("plan has {0} rounds; at most {MAX_ROUNDS} are supported")]
    TooDeep(usize),
    #[error("round {round} refers to answer {index}, which is not yet known")]
    FutureAnswer { round: usize, index: usize },
    #[error(transparent)]
    Stdlib(#[from] StdLibError),
}

/// Compiles a plan to a machine. Round `r` sees `r` answers; a plan ends
/// with its first `return`.
pub fn query_machine<M>(model: &M, lib: &StdLib<M::Elem>, plan: &[PlanStep<M::Elem>]) -> Result<M::Elem, PlanError>
where
    M: Combinatory,
    M::Elem: Clone + Eq + Hash + Debug,
{
    let last = plan.iter().position(|s| matches!(s, PlanStep::Return(_))).ok_or(PlanError::NoReturn)?;
    if last + 1 > MAX_ROUNDS {
        return Err(PlanError::TooDeep(last + 1));
    }
    let c = |e: &M::Elem| cst(e.clone());
    let u = |n: usize, i: usize| c(lib.projection(n, i));
    let source = |round: usize, s: &Source<M::Elem>| -> Result<Term<M::Elem>, PlanError> {
        Ok(match s {
            Source::Input => app(var("x"), u(3, 2)),
            Source::Const(e) => c(e),
            Source::Answer(j) if *j < round => {
                let mut l = app(var("x"), u(3, 3));
                for _ in 0..(round - 1 - j) {
                    l = app(l, u(2, 2));
                }
                app(l, u(2, 1))
            }
            Source::Answer(j) => return Err(PlanError::FutureAnswer { round, index: *j }),
        })
    };
    let mut replies = Vec::new();
    for (r, step) in plan[..=last].iter().enumerate() {
        let (tag, s) = match step {
            PlanStep::Ask(s) => (&lib.fls, s),
            PlanStep::Return(s) => (&lib.tru, s),
        };
        let body = apps([c(lib.tuple_maker(2)), c(tag), source(r, s)?]);
        replies.push(lib.element(model, &format!("reply {r}"), &lams(&["x"], body))?);
    }
    // T_r n u = (ite (zero n) D_r (T_{r+1} (pred n))) u
    let mut dispatch = lib.element(model, "dispatch", &lams(&["n", "u"], app(c(&replies[last]), var("u"))))?;
    for r in (0..last).rev() {
        let body = app(
            apps([
                c(&lib.ite),
                app(c(&lib.zero), var("n")),
                c(&replies[r]),
                app(c(&dispatch), app(var("n"), u(2, 2))),
            ]),
            var("u"),
        );
        dispatch = lib.element(model, "dispatch", &lams(&["n", "u"], body))?;
    }
    Ok(lib.element(model, "machine", &lams(&["x"], apps([c(&dispatch), app(var("x"), u(3, 1)), var("x")])))?)
}

/// Reads a plan directly against the oracle: the expected result and queries.
pub fn walk_plan<E: Clone + Eq>(plan: &[PlanStep<E>], oracle: &OracleFn<E>, b: &E) -> Option<(E, Vec<E>)> {
    let mut answers: Vec<E> = Vec::new();
    let mut queries = Vec::new();
    for step in plan {
        let (ask, s) = match step {
            PlanStep::Ask(s) => (true, s),
            PlanStep::Return(s) => (false, s),
        };
        let v = match s {
            Source::Input => b.clone(),
            Source::Const(c) => c.clone(),
            Source::Answer(j) => answers.get(*j)?.clone(),
        };
        if !ask {
            return Some((v, queries));
        }
        answers.push(oracle.query(&v));
        queries.push(v);
    }
    None
}

/// Table oracles shipped for demonstrations: successor on numerals,
/// a constant, and a swap of `k` and `s`.
pub fn table_oracles<E: Clone + Eq + Hash + Debug>(lib: &StdLib<E>) -> Result<Vec<(&'static str, OracleFn<E>)>, StdLibError> {
    let num = |n: usize| lib.numeral(n).cloned();
    let successor = (0..12).map(|n| Ok((num(n)?, num(n + 1)?))).collect::<Result<Vec<_>, StdLibError>>()?;
    let (k, s) = (lib.basis.k.clone(), lib.basis.s.clone());
    Ok(vec![
        ("successor", OracleFn::new(successor, num(0)?)),
        ("constant-7", OracleFn::new(vec![], num(7)?)),
        ("swap-k-s", OracleFn::new(vec![(k.clone(), s.clone()), (s, k)], lib.i.clone())),
    ])
}

/// A named dialogue plan.
pub type NamedPlan<E> = (&'static str, Vec<PlanStep<E>>);

/// Ten scripted dialogue plans, from oracle-free to three rounds deep.
pub fn scripted_plans<E: Clone + Eq + Hash + Debug>(lib: &StdLib<E>) -> Result<Vec<NamedPlan<E>>, StdLibError> {
    use PlanStep::{Ask, Return};
    use Source::{Answer, Const, Input};
    let num = |n: usize| lib.numeral(n).cloned();
    Ok(vec![
        ("return-input", vec![Return(Input)]),
        ("return-3", vec![Return(Const(num(3)?))]),
        ("representer", vec![Ask(Input), Return(Answer(0))]),
        ("twice-composed", vec![Ask(Input), Ask(Answer(0)), Return(Answer(1))]),
        ("ask-input-twice", vec![Ask(Input), Ask(Input), Return(Answer(1))]),
        ("ask-const", vec![Ask(Const(num(2)?)), Return(Answer(0))]),
        ("first-of-two", vec![Ask(Input), Ask(Const(num(0)?)), Return(Answer(0))]),
        ("thrice-composed", vec![Ask(Input), Ask(Answer(0)), Ask(Answer(1)), Return(Answer(2))]),
        ("ask-then-input", vec![Ask(Input), Return(Input)]),
        ("const-then-input", vec![Ask(Const(num(1)?)), Ask(Input), Return(Answer(0))]),
    ])
}

/// `A[f]`: same elements, application by dialogue.
pub struct OracleModel<'m, M: Model> {
    pub base: &'m M,
    pub lib: StdLib<M::Elem>,
    pub oracle: OracleFn<M::Elem>,
    name: String,
}

impl<'m, M: Model> OracleModel<'m, M> {
    pub fn new(base: &'m M, lib: StdLib<M::Elem>, oracle: OracleFn<M::Elem>) -> Self {
        let name = format!("{}[f]", base.name());
        OracleModel { base, lib, oracle, name }
    }
}

impl<M> Model for OracleModel<'_, M>
where
    M: Model,
    M::Elem: Clone + Eq + Hash + Debug,
{
    type Elem = M::Elem;

    fn apply(&self, f: &M::Elem, a: &M::Elem, fuel: &mut Fuel) -> Step<M::Elem> {
        match dialogue(self.base, &self.lib, &self.oracle, f, a, fuel).end {
            DialogueEnd::Returned(c) => Ok(c),
            DialogueEnd::Divergent | DialogueEnd::InvalidReply(_) => Err(Halt::Divergent),
            DialogueEnd::Exhausted => Err(Halt::Exhausted),
        }
    }

    fn render(&self, e: &M::Elem) -> String {
        self.base.render(e)
    }

    fn name(&self) -> &str {
        &self.name
    }
}
