use std::sync::OnceLock;

use num_bigint::BigUint;
use pca_core::k1::K1Model;
use pca_core::oracle::{check_protocol, oracle_apply, query_machine, scripted_plans, table_oracles, walk_plan, OracleFn, OracleModel, PlanError, PlanStep, Source};
use pca_core::pca::StdLib;
use pca_core::{EvalOutcome, Model};

const FUEL: u64 = 2_000_000;

fn env() -> &'static (K1Model, StdLib<BigUint>) {
    static ENV: OnceLock<(K1Model, StdLib<BigUint>)> = OnceLock::new();
    ENV.get_or_init(|| {
        let m = K1Model::new();
        let lib = StdLib::build(&m, FUEL).unwrap();
        (m, lib)
    })
}

fn num(n: usize) -> BigUint {
    env().1.numeral(n).unwrap().clone()
}

fn oracles() -> Vec<(&'static str, OracleFn<BigUint>)> {
    table_oracles(&env().1).unwrap()
}

use PlanStep::{Ask, Return};
use Source::{Answer, Const, Input};

fn plans() -> Vec<(&'static str, Vec<PlanStep<BigUint>>)> {
    scripted_plans(&env().1).unwrap()
}

/// Independent reading of a plan: walk it directly against the oracle.
fn expected(plan: &[PlanStep<BigUint>], f: &OracleFn<BigUint>, b: &BigUint) -> (BigUint, Vec<BigUint>) {
    let mut answers = Vec::new();
    let mut queries = Vec::new();
    let value = |s: &Source<BigUint>, answers: &[BigUint]| match s {
        Input => b.clone(),
        Const(c) => c.clone(),
        Answer(j) => answers[*j].clone(),
    };
    for step in plan {
        match step {
            Ask(s) => {
                let q = value(s, &answers);
                answers.push(f.query(&q));
                queries.push(q);
            }
            Return(s) => return (value(s, &answers), queries),
        }
    }
    unreachable!()
}

#[test]
fn scripted_machines_follow_the_protocol() {
    let (m, lib) = env();
    let inputs = [num(0), num(3), lib.basis.k.clone()];
    for (pname, plan) in plans() {
        let a = query_machine(m, lib, &plan).unwrap();
        for (oname, f) in oracles() {
            for b in &inputs {
                let (out, t) = oracle_apply(m, lib, &f, &a, b, FUEL);
                let (want, queries) = expected(&plan, &f, b);
                assert_eq!(walk_plan(&plan, &f, b), Some((want.clone(), queries.clone())));
                assert_eq!(out, EvalOutcome::Defined(want), "{pname} / {oname}");
                assert_eq!(t.queries, queries, "{pname} / {oname}");
                check_protocol(m, lib, &f, &a, b, &t).unwrap_or_else(|e| panic!("{pname} / {oname}: {e}"));
                let (again, t2) = oracle_apply(m, lib, &f, &a, b, FUEL);
                assert_eq!((again, t2), (out_clone(&t), t.clone()));
            }
        }
    }
}

fn out_clone(t: &pca_core::oracle::DialogueTranscript<BigUint>) -> EvalOutcome<BigUint> {
    match &t.end {
        pca_core::oracle::DialogueEnd::Returned(c) => EvalOutcome::Defined(c.clone()),
        other => panic!("unexpected end {other:?}"),
    }
}

#[test]
fn representer_represents_each_table() {
    let (m, lib) = env();
    let r = query_machine(m, lib, &[Ask(Input), Return(Answer(0))]).unwrap();
    for (name, f) in oracles() {
        for (point, value) in &f.table {
            let (out, t) = oracle_apply(m, lib, &f, &r, point, FUEL);
            assert_eq!(out.as_defined(), Some(value), "{name}");
            assert_eq!(t.queries, vec![point.clone()]);
        }
    }
}

#[test]
fn oracle_free_machines_ignore_the_oracle() {
    let (m, lib) = env();
    let a = query_machine(m, lib, &[Return(Const(num(4)))]).unwrap();
    let fs = oracles();
    let (o1, t1) = oracle_apply(m, lib, &fs[0].1, &a, &num(1), FUEL);
    let (o2, t2) = oracle_apply(m, lib, &fs[1].1, &a, &num(1), FUEL);
    assert_eq!(o1, o2);
    assert!(t1.queries.is_empty() && t2.queries.is_empty());
}

#[test]
fn malformed_replies_and_plans_are_reported() {
    let (m, lib) = env();
    let f = &oracles()[0].1;
    // replies with 0̄ = i, whose first projection is not a boolean
    let bad = m.apply_outcome(&lib.basis.k, &num(0), FUEL).defined().unwrap();
    let (out, t) = oracle_apply(m, lib, f, &bad, &num(1), FUEL);
    assert_eq!(out, EvalOutcome::ProvenDivergent);
    assert!(matches!(t.end, pca_core::oracle::DialogueEnd::InvalidReply(0)), "{:?}", t.end);
    assert!(matches!(query_machine(m, lib, &[Ask(Answer(0)), Return(Input)]), Err(PlanError::FutureAnswer { .. })));
    assert!(matches!(query_machine(m, lib, &[Ask(Input)]), Err(PlanError::NoReturn)));
}

#[test]
fn relativized_model_applies_by_dialogue() {
    let (m, lib) = env();
    let f = oracles().remove(0).1;
    let r = query_machine(m, lib, &[Ask(Input), Return(Answer(0))]).unwrap();
    let a_f = OracleModel::new(m, lib.clone(), f);
    assert_eq!(a_f.apply_outcome(&r, &num(5), FUEL), EvalOutcome::Defined(num(6)));
    assert_eq!(a_f.name(), "k1[f]");
}

