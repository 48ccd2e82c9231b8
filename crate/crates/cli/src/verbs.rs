use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::Zero;
use serde_json::{json, Value};

use pca_core::friedberg::{find_k_code, refute_s_candidate, FriedbergState, Snapshot};
use pca_core::k1::enumeration::DOUBLE_PLUS_ONE;
use pca_core::k1::{self, K1Model, NumberingKernel};
use pca_core::k2::{k2_apply, K2Model};
use pca_core::oracle::{check_protocol, oracle_apply, OracleModel};
use pca_core::pca::{search_finite_pca, FiniteTable, StdLib};
use pca_core::reductions::candidates::{k1_c01, k1_extension_candidates, k1_halting_candidates, k1_separator_candidates, Candidate};
use pca_core::reductions::{ReductionError, Setting, Witness};
use pca_core::term::{eval_with, Basis, Term};
use pca_core::{EvalOutcome, Fuel, Model};

use crate::spec::{self, K1Names};
use crate::suite::{Suite, CRITERIA};
use crate::trace::{Traced, Tracer};
use crate::{CliError, FriedbergVerb, K1Verb, K2Verb, Kernel, OracleVerb, RefuteVerb, RunConfig, Status, Verb, VerbOutput};

/// Budget for building the named elements, independent of `--fuel`.
const LIBRARY_FUEL: u64 = 1_000_000;
const K2_PREFIX: usize = 16;

fn k1_model() -> &'static K1Model {
    static MODEL: OnceLock<K1Model> = OnceLock::new();
    MODEL.get_or_init(K1Model::new)
}

fn k1_setting(fuel: u64) -> Result<Setting<'static, K1Model>, CliError> {
    let m = k1_model();
    let lib = StdLib::build(m, LIBRARY_FUEL).map_err(|e| CliError::usage(format!("K1 library: {e}")))?;
    Setting::new(m, lib, k1::diverge_code(), &BigUint::zero(), fuel).map_err(|e| CliError::usage(e.to_string()))
}

fn ok(result: Value) -> VerbOutput {
    VerbOutput { status: Status::Ok, fuel_spent: None, result }
}

fn outcome_json<E>(o: &EvalOutcome<E>, render: impl Fn(&E) -> String) -> Value {
    match o {
        EvalOutcome::Defined(v) => json!({ "outcome": o.label(), "value": render(v) }),
        EvalOutcome::FuelExhausted(n) => json!({ "outcome": o.label(), "fuel_spent": n }),
        EvalOutcome::ProvenDivergent => json!({ "outcome": o.label() }),
    }
}

pub(crate) fn run(verb: &Verb, cfg: &RunConfig, tracer: &mut Tracer) -> Result<(String, VerbOutput), CliError> {
    Ok(match verb {
        Verb::Eval(a) => ("eval".into(), eval(&a.term, &a.model, &a.binds, cfg, tracer)?),
        Verb::Compile(a) => ("compile".into(), compile(&a.term, a.var.as_deref())?),
        Verb::K1(K1Verb::Run { code, input }) => ("k1 run".into(), k1_run(code, input, cfg)?),
        Verb::K2(K2Verb::Apply { alpha, beta, coords }) => ("k2 apply".into(), k2_run(alpha, beta, *coords, cfg)?),
        Verb::Friedberg(v) => friedberg(v, cfg, tracer)?,
        Verb::Oracle(OracleVerb::Run { machine, input, oracle }) => ("oracle run".into(), oracle_run(machine, input, oracle, cfg, tracer)?),
        Verb::Refute(v) => refute(v, cfg)?,
        Verb::SearchFinitePca { n } => {
            let r = search_finite_pca(*n).map_err(|e| CliError::usage(e.to_string()))?;
            ("search-finite-pca".into(), ok(serde_json::to_value(r).expect("serializable")))
        }
        Verb::Suite { only } => ("suite".into(), suite(only, cfg)?),
    })
}

/// Evaluates a closed term in `model` with `--fuel`.
fn eval_in<M: Model>(model: &M, t: &Term<M::Elem>, cfg: &RunConfig) -> Result<(EvalOutcome<M::Elem>, u64), CliError> {
    let mut fuel = Fuel::new(cfg.fuel);
    let step = eval_with(model, t, &mut fuel).map_err(|e| CliError::usage(e.to_string()))?;
    Ok((fuel.settle(step), fuel.spent()))
}

fn compile_closed<C: Clone + PartialEq>(basis: Option<&Basis<C>>, t: &Term<C>) -> Result<Term<C>, CliError> {
    let compiled = match basis {
        Some(b) => b.compile(t).map_err(|e| CliError::usage(e.to_string()))?,
        None if t.has_binder() => return Err(CliError::usage("this model has no k and s, so terms cannot contain lam")),
        None => t.clone(),
    };
    spec::closed_check(&compiled)?;
    Ok(compiled)
}

fn eval(term: &str, model: &str, binds: &[String], cfg: &RunConfig, tracer: &Tracer) -> Result<VerbOutput, CliError> {
    let parsed = spec::parse_term(term)?;
    let shown = parsed.to_string();
    let (result, spent) = match model {
        "k1" => {
            let setting = k1_setting(cfg.fuel)?;
            let mut names = K1Names::new(&setting, binds)?;
            let params = names.bind_parameters(&parsed);
            let t = compile_closed(Some(&setting.lib.basis), &spec::resolve(&parsed, |n| names.lookup(n))?)?;
            let traced = Traced { inner: k1_model(), tracer };
            let (o, spent) = eval_in(&traced, &t, cfg)?;
            let mut r = outcome_json(&o, |v| v.to_string());
            if let EvalOutcome::Defined(v) = &o {
                r["names"] = json!(names.names_of(v));
            }
            r["parameters"] = json!(params);
            (r, spent)
        }
        "k2" => {
            if !binds.is_empty() {
                return Err(CliError::usage("--bind is only supported in k1 and oracle models"));
            }
            let t = compile_closed(None, &spec::resolve(&parsed, spec::k2_element)?)?;
            let m = K2Model::default();
            let traced = Traced { inner: &m, tracer };
            let (o, spent) = eval_in(&traced, &t, cfg)?;
            let mut r = outcome_json(&o, |v| v.to_string());
            if let EvalOutcome::Defined(v) = &o {
                let mut fuel = Fuel::new(cfg.fuel);
                r["prefix"] = match v.prefix(K2_PREFIX, &mut fuel) {
                    Ok(p) => json!(p),
                    Err(_) => Value::Null,
                };
            }
            (r, spent)
        }
        m if m.starts_with("oracle:") => {
            let setting = k1_setting(cfg.fuel)?;
            let mut names = K1Names::new(&setting, binds)?;
            let f = spec::oracle(&names, &m["oracle:".len()..])?;
            names.bind_parameters(&parsed);
            let t = compile_closed(None, &spec::resolve(&parsed, |n| names.lookup(n))?)?;
            let model = OracleModel::new(k1_model(), setting.lib.clone(), f);
            let traced = Traced { inner: &model, tracer };
            let (o, spent) = eval_in(&traced, &t, cfg)?;
            let mut r = outcome_json(&o, |v| v.to_string());
            if let EvalOutcome::Defined(v) = &o {
                r["names"] = json!(names.names_of(v));
            }
            (r, spent)
        }
        path => {
            if !binds.is_empty() {
                return Err(CliError::usage("--bind is only supported in k1 and oracle models"));
            }
            let table: FiniteTable = spec::read_table(path)?;
            let basis = Basis::of(&table);
            let t = compile_closed(Some(&basis), &spec::resolve(&parsed, |n| spec::table_element(&table, n))?)?;
            let traced = Traced { inner: &table, tracer };
            let (o, spent) = eval_in(&traced, &t, cfg)?;
            (outcome_json(&o, |v| v.to_string()), spent)
        }
    };
    let model_name = if model.starts_with("oracle:") || model == "k1" || model == "k2" { model.to_string() } else { "finite-table".into() };
    let mut result = result;
    result["model"] = json!(model_name);
    result["term"] = json!(shown);
    Ok(VerbOutput { status: Status::Ok, fuel_spent: Some(spent), result })
}

fn compile(term: &str, var: Option<&str>) -> Result<VerbOutput, CliError> {
    let parsed = spec::parse_term(term)?;
    let basis = spec::symbolic_basis();
    let mut t = basis.compile(&parsed).map_err(|e| CliError::usage(e.to_string()))?;
    if let Some(x) = var {
        t = basis.lambda_star(x, &t).map_err(|e| CliError::usage(e.to_string()))?;
    }
    Ok(ok(json!({
        "term": parsed.to_string(),
        "compiled": t.to_string(),
        "size": t.size(),
        "free_vars": t.free_vars(),
    })))
}

fn k1_run(code: &str, input: &str, cfg: &RunConfig) -> Result<VerbOutput, CliError> {
    let setting = k1_setting(cfg.fuel)?;
    let names = K1Names::new(&setting, &[])?;
    let (c, x) = (names.element(code)?, names.element(input)?);
    let mut fuel = Fuel::new(cfg.fuel);
    let step = k1_model().run(&c, &x, &mut fuel);
    let o = fuel.settle(step);
    let mut r = outcome_json(&o, |v| v.to_string());
    r["code"] = json!(c.to_string());
    r["input"] = json!(x.to_string());
    Ok(VerbOutput { status: Status::Ok, fuel_spent: Some(fuel.spent()), result: r })
}

fn k2_run(alpha: &str, beta: &str, coords: usize, cfg: &RunConfig) -> Result<VerbOutput, CliError> {
    let (a, b) = (spec::k2_element(alpha)?, spec::k2_element(beta)?);
    let r = k2_apply(&a, &b, coords, cfg.fuel).map_err(|e| CliError::usage(e.to_string()))?;
    let spent = r.fuel_spent;
    let mut v = serde_json::to_value(&r).expect("serializable");
    v["alpha"] = json!(a.to_string());
    v["beta"] = json!(b.to_string());
    Ok(VerbOutput { status: Status::Ok, fuel_spent: Some(spent), result: v })
}

fn friedberg(v: &FriedbergVerb, cfg: &RunConfig, tracer: &Tracer) -> Result<(String, VerbOutput), CliError> {
    Ok(match v {
        FriedbergVerb::Run { stages, snapshot } => {
            let mut st = if tracer.enabled() { FriedbergState::new() } else { FriedbergState::without_trace() };
            st.run_until(stages.stages);
            for ev in st.trace() {
                tracer.event(ev);
            }
            if let Some(path) = snapshot {
                let text = serde_json::to_string(&st.snapshot()).expect("serializable");
                std::fs::write(path, text).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
            }
            let released = st.entries().values().filter(|e| e.release.is_some()).count();
            let followers: Vec<(u64, u64)> = st.followers().iter().map(|(&e, &x)| (e, x)).collect();
            let out = ok(json!({
                "stages": st.stage(),
                "codes": st.entries().len(),
                "released": released,
                "active": st.entries().len() - released,
                "followers": followers,
            }));
            ("friedberg run".into(), out)
        }
        FriedbergVerb::Check { snapshot, stages } => {
            let r = match snapshot {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
                    let snap: Snapshot = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("bad snapshot: {e}")))?;
                    snap.check()
                }
                None => {
                    let mut st = FriedbergState::without_trace();
                    st.run_until(stages.stages);
                    st.check_invariants()
                }
            };
            let status = if r.ok() { Status::Ok } else { Status::Failed };
            ("friedberg check".into(), VerbOutput { status, fuel_spent: None, result: serde_json::to_value(r).expect("serializable") })
        }
        FriedbergVerb::FindK { stages, samples } => {
            let mut st = FriedbergState::without_trace();
            let out = match find_k_code(&mut st, stages.stages, *samples, cfg.seed) {
                Ok(r) => ok(serde_json::to_value(r).expect("serializable")),
                Err(e) => VerbOutput { status: Status::Failed, fuel_spent: None, result: json!({ "error": e.to_string() }) },
            };
            ("friedberg find-k".into(), out)
        }
        FriedbergVerb::RefuteS { code, budget } => {
            let sigma: BigUint = spec::read_spec(code)?.parse().map_err(|_| CliError::usage("--code must be a decimal code"))?;
            let mut st = FriedbergState::without_trace();
            st.run_until(*budget);
            let k = st.follower_of(DOUBLE_PLUS_ONE);
            let out = match refute_s_candidate(&mut st, &sigma, k, *budget) {
                Ok(w) => ok(json!({ "witness": w, "k": k })),
                Err(inc) => VerbOutput { status: Status::Failed, fuel_spent: None, result: json!({ "inconclusive": inc, "k": k }) },
            };
            ("friedberg refute-s".into(), out)
        }
    })
}

fn oracle_run(machine: &str, input: &str, oracle: &str, cfg: &RunConfig, tracer: &Tracer) -> Result<VerbOutput, CliError> {
    let setting = k1_setting(cfg.fuel)?;
    let (m, lib) = (k1_model(), &setting.lib);
    let names = K1Names::new(&setting, &[])?;
    let f = spec::oracle(&names, oracle)?;
    let a = names.element(machine)?;
    let b = names.element(input)?;
    let (o, t) = oracle_apply(m, lib, &f, &a, &b, cfg.fuel);
    let report = t.report(|e| m.render(e));
    for round in &report.rounds {
        tracer.event(&json!({ "event": "round", "round": round }));
    }
    let protocol = match check_protocol(m, lib, &f, &a, &b, &t) {
        Ok(()) => json!("ok"),
        Err(e) => json!(e),
    };
    let mut r = outcome_json(&o, |v| v.to_string());
    r["machine"] = json!(a.to_string());
    r["transcript"] = serde_json::to_value(&report).expect("serializable");
    r["protocol"] = protocol;
    let spent = match o {
        EvalOutcome::FuelExhausted(n) => Some(n),
        _ => None,
    };
    Ok(VerbOutput { status: Status::Ok, fuel_spent: spent, result: r })
}

fn candidates(
    setting: &Setting<'_, K1Model>,
    arg: &crate::CandidateArgs,
    family: impl FnOnce(&Setting<'_, K1Model>) -> Vec<Candidate>,
) -> Result<Vec<Candidate>, CliError> {
    if arg.family {
        return Ok(family(setting));
    }
    let spec = arg.candidate.as_deref().ok_or_else(|| CliError::usage("a candidate or --family is required"))?;
    let names = K1Names::new(setting, &[])?;
    Ok(vec![Candidate { name: spec.to_string(), element: names.element(spec)? }])
}

fn witness_json(model: &K1Model, name: &str, r: Result<Witness<BigUint>, ReductionError<BigUint>>) -> (bool, Value) {
    match r {
        Ok(w) => (true, json!({ "candidate": name, "replays": w.replay(model).is_ok(), "witness": w.report(model) })),
        Err(e) => {
            let w = match &e {
                ReductionError::Invalid(w) | ReductionError::FuelExhausted(w) => Some(w.report(model)),
                _ => None,
            };
            (false, json!({ "candidate": name, "error": e.to_string(), "witness": w }))
        }
    }
}

fn refute(v: &RefuteVerb, cfg: &RunConfig) -> Result<(String, VerbOutput), CliError> {
    let s = k1_setting(cfg.fuel)?;
    let m = k1_model();
    let (verb, results): (&str, Vec<(bool, Value)>) = match v {
        RefuteVerb::Halting(c) => {
            let cs = candidates(&s, c, k1_halting_candidates)?;
            ("refute halting", cs.iter().map(|c| witness_json(m, &c.name, s.refute_halting_decider(&c.element))).collect())
        }
        RefuteVerb::Separator(c) => {
            let cs = candidates(&s, c, k1_separator_candidates)?;
            ("refute separator", cs.iter().map(|c| witness_json(m, &c.name, s.refute_separator(&c.element))).collect())
        }
        RefuteVerb::Extension { candidate, c01 } => {
            let c01 = match c01 {
                Some(spec) => K1Names::new(&s, &[])?.element(spec)?,
                None => k1_c01(&s.lib),
            };
            let cs = candidates(&s, candidate, k1_extension_candidates)?;
            ("refute extension", cs.iter().map(|c| witness_json(m, &c.name, s.refute_total_extension(&c.element, &c01))).collect())
        }
        RefuteVerb::Precomplete { candidate, kernel } => {
            let (name, t) = match candidate {
                Some(spec) => (spec.clone(), K1Names::new(&s, &[])?.element(spec)?),
                None => ("totalizer".to_string(), k1::totalizer_code().clone()),
            };
            let kernel = match kernel {
                Kernel::Identity => NumberingKernel::Identity,
                Kernel::FunctionEquality => NumberingKernel::FunctionEquality,
            };
            ("refute precomplete", vec![witness_json(m, &name, s.refute_precomplete_injective(&t, kernel, &k1_c01(&s.lib)))])
        }
    };
    let all = results.iter().all(|(found, _)| *found);
    let status = if all { Status::Ok } else { Status::Failed };
    let items: Vec<Value> = results.into_iter().map(|(_, v)| v).collect();
    Ok((verb.into(), VerbOutput { status, fuel_spent: None, result: json!({ "fuel": cfg.fuel, "results": items }) }))
}

fn suite(only: &[u8], cfg: &RunConfig) -> Result<VerbOutput, CliError> {
    if let Some(bad) = only.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
        return Err(CliError::usage(format!("no criterion {bad}; the suite has 1..={}", CRITERIA.len())));
    }
    let mut s = Suite::new(cfg.seed);
    let report = if only.is_empty() { s.run_all() } else { s.run_only(only) };
    let status = if report.failed == 0 { Status::Ok } else { Status::Failed };
    Ok(VerbOutput { status, fuel_spent: None, result: serde_json::to_value(report).expect("serializable") })
}
