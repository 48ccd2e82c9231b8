//! The acceptance battery: eleven seeded property checks, each reporting
//! how many individual checks ran and which failed. Reports carry no
//! timings so that equal seeds give byte-identical output.

use std::sync::OnceLock;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use pca_core::friedberg::{find_k_code, refute_s_candidate, FriedbergState, PsiValue};
use pca_core::k1::{self, K1Model, NumberingKernel};
use pca_core::k2::{k2_apply, make_counterexample_pair, refute_continuous_decider, K2Element, PrefixRule};
use pca_core::oracle::{check_protocol, oracle_apply, query_machine, scripted_plans, table_oracles, walk_plan};
use pca_core::pca::{converters_roundtrip, fixpoint, search_finite_pca, FiniteTable};
use pca_core::reductions::candidates::{k1_c01, k1_extension_candidates, k1_halting_candidates, k1_separator_candidates};
use pca_core::reductions::{probe_elements, probe_pairs, Setting};
use pca_core::term::{app, apps, cst, eval_closed, lams, var, Term};
use pca_core::{EvalOutcome, Model};

pub const FRIEDBERG_STAGES: u64 = 10_000;
const LAW_FUEL: u64 = 100_000;
const FUEL: u64 = 1_000_000;
const MAX_LISTED: usize = 20;

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "feferman-laws"),
    (2, "lambda-star-contract"),
    (3, "stdlib-identities"),
    (4, "finite-pca-search"),
    (5, "k2-post-counterexample"),
    (6, "halting-machinery"),
    (7, "oracle-protocol"),
    (8, "friedberg-simulation"),
    (9, "s-refutation"),
    (10, "inseparability-and-extensions"),
    (11, "recursion-theorem"),
];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub checks: u64,
    pub failed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub criteria: Vec<CriterionReport>,
}

#[derive(Default)]
struct Tally {
    checks: u64,
    failed: u64,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_LISTED {
                self.failures.push(what());
            }
        }
    }

    fn finish(self, id: u8, detail: Value) -> CriterionReport {
        let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown");
        CriterionReport { id, name, pass: self.failed == 0 && self.checks > 0, checks: self.checks, failed: self.failed, failures: self.failures, detail }
    }
}

fn k1_model() -> &'static K1Model {
    static MODEL: OnceLock<K1Model> = OnceLock::new();
    MODEL.get_or_init(K1Model::new)
}

/// `≃` when both sides settled; unsettled pairs are counted separately.
fn kleene_eq(a: &EvalOutcome<BigUint>, b: &EvalOutcome<BigUint>) -> Option<bool> {
    match (a, b) {
        (EvalOutcome::FuelExhausted(_), _) | (_, EvalOutcome::FuelExhausted(_)) => None,
        _ => Some(a == b),
    }
}

/// Runs the battery with a fixed seed; the Friedberg run is shared by
/// criteria 8 and 9.
pub struct Suite {
    pub seed: u64,
    friedberg: Option<(FriedbergState, u64)>,
}

impl Suite {
    pub fn new(seed: u64) -> Self {
        Suite { seed, friedberg: None }
    }

    pub fn run_all(&mut self) -> SuiteReport {
        let criteria: Vec<CriterionReport> = CRITERIA.iter().map(|(id, _)| self.run(*id)).collect();
        let passed = criteria.iter().filter(|c| c.pass).count();
        SuiteReport { seed: self.seed, passed, failed: criteria.len() - passed, criteria }
    }

    pub fn run_only(&mut self, ids: &[u8]) -> SuiteReport {
        let criteria: Vec<CriterionReport> = ids.iter().map(|id| self.run(*id)).collect();
        let passed = criteria.iter().filter(|c| c.pass).count();
        SuiteReport { seed: self.seed, passed, failed: criteria.len() - passed, criteria }
    }

    pub fn run(&mut self, id: u8) -> CriterionReport {
        let seed = self.seed;
        let setup = |t: Tally, e: String| t.finish(id, json!({ "setup-error": e }));
        let k1 = || Setting::k1(k1_model(), FUEL).map_err(|e| e.to_string());
        match id {
            1 => match Setting::k1(k1_model(), LAW_FUEL).map_err(|e| e.to_string()) {
                Ok(s) => feferman(&s, seed),
                Err(e) => setup(Tally::default(), e),
            },
            2 => match k1() {
                Ok(s) => lambda_star(&s, seed),
                Err(e) => setup(Tally::default(), e),
            },
            3 => match k1() {
                Ok(s) => stdlib_identities(&s),
                Err(e) => setup(Tally::default(), e),
            },
            4 => finite_search(),
            5 => k2_counterexample(seed),
            6 => match k1() {
                Ok(s) => halting(&s, seed),
                Err(e) => setup(Tally::default(), e),
            },
            7 => match k1() {
                Ok(s) => oracle_protocol(&s),
                Err(e) => setup(Tally::default(), e),
            },
            8 => self.friedberg_run(),
            9 => self.s_refutation(),
            10 => match k1() {
                Ok(s) => inseparability(&s),
                Err(e) => setup(Tally::default(), e),
            },
            11 => match k1() {
                Ok(s) => recursion(&s, seed),
                Err(e) => setup(Tally::default(), e),
            },
            _ => setup(Tally::default(), format!("no criterion {id}")),
        }
    }

    fn friedberg_state(&mut self) -> Result<&mut (FriedbergState, u64), String> {
        if self.friedberg.is_none() {
            let mut st = FriedbergState::without_trace();
            st.run_until(FRIEDBERG_STAGES);
            let k = st.follower_of(k1::enumeration::DOUBLE_PLUS_ONE).ok_or("no follower of the 2a+1 program")?;
            self.friedberg = Some((st, k));
        }
        Ok(self.friedberg.as_mut().expect("just built"))
    }

    fn friedberg_run(&mut self) -> CriterionReport {
        let seed = self.seed;
        let mut t = Tally::default();
        let (st, _) = match self.friedberg_state() {
            Ok(v) => v,
            Err(e) => return t.finish(8, json!({ "setup-error": e })),
        };
        let inv = st.check_invariants();
        t.check(inv.ok(), || format!("invariant violations: {:?}", inv.violations));
        for x in 0..10u64 {
            let got = st.psi_at(&BigUint::from(2 * x + 1), &BigUint::from(3 * x + 4), FRIEDBERG_STAGES);
            t.check(got == PsiValue::Defined(BigUint::from(x)), || format!("ψ_{}(·) is not constantly {x}", 2 * x + 1));
        }
        let k = match find_k_code(st, FRIEDBERG_STAGES, 50, seed) {
            Ok(r) => {
                t.check(r.samples.len() == 50, || format!("{} samples verified", r.samples.len()));
                Some(r)
            }
            Err(e) => {
                t.check(false, || e.to_string());
                None
            }
        };
        t.finish(
            8,
            json!({
                "stages": FRIEDBERG_STAGES,
                "codes": inv.codes_checked,
                "released": inv.released,
                "active": inv.active,
                "violations": inv.violations.len(),
                "k": k.as_ref().map(|r| r.code),
                "k-follows-index": k.as_ref().map(|r| r.follows_index),
                "k-samples": k.as_ref().map(|r| r.samples.len()),
            }),
        )
    }

    fn s_refutation(&mut self) -> CriterionReport {
        let seed = self.seed;
        let mut t = Tally::default();
        let (st, k) = match self.friedberg_state() {
            Ok(v) => v,
            Err(e) => return t.finish(9, json!({ "setup-error": e })),
        };
        let k = *k;
        let mut family: Vec<(String, u64)> = (1..=99u64).step_by(2).map(|x| ("odd".to_string(), x)).collect();
        family.push(("zero".into(), 0));
        family.push(("k".into(), k));
        let used: Vec<u64> = st.entries().keys().copied().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..20 {
            family.push(("random-even".into(), used[rng.gen_range(0..used.len())]));
        }
        let mut clauses = std::collections::BTreeMap::<String, usize>::new();
        let mut examined = 0usize;
        for (group, sigma) in &family {
            match refute_s_candidate(st, &BigUint::from(*sigma), Some(k), FRIEDBERG_STAGES) {
                Ok(w) => {
                    examined += w.triples_examined;
                    *clauses.entry(w.clause.clone()).or_default() += 1;
                    t.check(w.phase == 1, || format!("σ = {sigma} ({group}) refuted only in phase {}", w.phase));
                }
                Err(e) => t.check(false, || format!("σ = {sigma} ({group}) not refuted: {}", e.phase2)),
            }
        }
        t.finish(9, json!({ "candidates": family.len(), "k": k, "horizon": FRIEDBERG_STAGES, "triples-examined": examined, "clauses": clauses }))
    }
}

fn feferman(s: &Setting<'_, K1Model>, seed: u64) -> CriterionReport {
    let mut t = Tally::default();
    let pool = probe_elements(s, seed, 24);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (k, sc) = (cst(s.lib.basis.k.clone()), cst(s.lib.basis.s.clone()));
    let mut unsettled = 0;
    for _ in 0..200 {
        let pick = |rng: &mut ChaCha8Rng| pool[rng.gen_range(0..pool.len())].clone();
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let kab = eval_closed(s.model, &apps([k.clone(), cst(a.clone()), cst(b.clone())]), LAW_FUEL);
        t.check(matches!(&kab, Ok(EvalOutcome::Defined(v)) if *v == a), || format!("k a b = a fails at a = {a}, b = {b}"));
        let sab = eval_closed(s.model, &apps([sc.clone(), cst(a.clone()), cst(b.clone())]), LAW_FUEL);
        t.check(matches!(&sab, Ok(o) if o.is_defined()), || format!("s a b undefined at a = {a}, b = {b}"));
        let lhs = eval_closed(s.model, &apps([sc.clone(), cst(a.clone()), cst(b.clone()), cst(c.clone())]), LAW_FUEL);
        let rhs = eval_closed(s.model, &app(apps([cst(a.clone()), cst(c.clone())]), apps([cst(b.clone()), cst(c.clone())])), LAW_FUEL);
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => match kleene_eq(&l, &r) {
                Some(ok) => t.check(ok, || format!("s a b c ≄ a c (b c) at ({a}, {b}, {c}): {} vs {}", l.label(), r.label())),
                None => unsettled += 1,
            },
            _ => t.check(false, || "term error".into()),
        }
    }
    t.finish(1, json!({ "triples": 200, "fuel": LAW_FUEL, "s-law-unsettled": unsettled }))
}

/// Random application trees over `pool` and the variable `x`, containing `x`.
fn random_term(rng: &mut ChaCha8Rng, pool: &[BigUint], depth: u32) -> Term<BigUint> {
    loop {
        let t = grow(rng, pool, depth);
        if t.has_free("x") {
            return t;
        }
    }
}

fn grow(rng: &mut ChaCha8Rng, pool: &[BigUint], depth: u32) -> Term<BigUint> {
    if depth == 0 || rng.gen_bool(0.3) {
        if rng.gen_bool(0.35) {
            var("x")
        } else {
            cst(pool[rng.gen_range(0..pool.len())].clone())
        }
    } else {
        app(grow(rng, pool, depth - 1), grow(rng, pool, depth - 1))
    }
}

fn lambda_star(s: &Setting<'_, K1Model>, seed: u64) -> CriterionReport {
    let mut t = Tally::default();
    let pool = probe_elements(s, seed, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut unsettled = 0;
    let mut defined = 0;
    for n in 0..100 {
        let term = random_term(&mut rng, &pool, 4);
        let abs = match s.lib.basis.lambda_star("x", &term) {
            Ok(a) => a,
            Err(e) => {
                t.check(false, || format!("term {n}: {e}"));
                continue;
            }
        };
        let f = match eval_closed(s.model, &abs, FUEL) {
            Ok(EvalOutcome::Defined(f)) => {
                t.check(true, String::new);
                f
            }
            other => {
                t.check(false, || format!("term {n}: λ*x.t is not defined ({other:?})"));
                continue;
            }
        };
        for _ in 0..10 {
            let a = &pool[rng.gen_range(0..pool.len())];
            let lhs = s.model.apply_outcome(&f, a, FUEL);
            let rhs = eval_closed(s.model, &term.subst("x", a), FUEL).unwrap_or(EvalOutcome::ProvenDivergent);
            defined += lhs.is_defined() as usize;
            match kleene_eq(&lhs, &rhs) {
                Some(ok) => t.check(ok, || format!("term {n}, a = {a}: {} vs {}", lhs.label(), rhs.label())),
                None => unsettled += 1,
            }
        }
    }
    t.finish(2, json!({ "terms": 100, "arguments-per-term": 10, "defined-applications": defined, "unsettled": unsettled }))
}

fn stdlib_identities(s: &Setting<'_, K1Model>) -> CriterionReport {
    let mut t = Tally::default();
    let (m, l) = (s.model, &s.lib);
    let a = BigUint::from(11u32);
    let b = BigUint::from(22u32);
    let expect = |t: &mut Tally, name: &str, got: EvalOutcome<BigUint>, want: &BigUint| {
        t.check(got.as_defined() == Some(want), || format!("{name}: got {}", got.label()));
    };
    expect(&mut t, "ite true a b = a", l.apply_n(m, &l.ite, &[l.tru.clone(), a.clone(), b.clone()]), &a);
    expect(&mut t, "ite false a b = b", l.apply_n(m, &l.ite, &[l.fls.clone(), a.clone(), b.clone()]), &b);
    expect(&mut t, "i a = a", l.apply(m, &l.i, &a), &a);
    let items: Vec<BigUint> = (30u32..34).map(BigUint::from).collect();
    for n in 1..=4 {
        match l.tuple(m, &items[..n]) {
            Ok(tu) => {
                for j in 1..=n {
                    expect(&mut t, &format!("U^{n}_{j} of a {n}-tuple"), l.apply(m, &tu, l.projection(n, j)), &items[j - 1]);
                }
            }
            Err(e) => t.check(false, || format!("tuple/{n}: {e}")),
        }
    }
    expect(&mut t, "zero 0̄ = true", l.apply(m, &l.zero, l.zero_numeral()), &l.tru);
    for n in 1..=10 {
        let nb = s.numeral(n);
        expect(&mut t, &format!("zero {n}̄ = false"), l.apply(m, &l.zero, &nb), &l.fls);
        expect(&mut t, &format!("{n}̄ = ⟨false, ·⟩"), l.apply(m, &nb, l.projection(2, 1)), &l.fls);
        expect(&mut t, &format!("{n}̄ = ⟨·, {}̄⟩", n - 1), l.apply(m, &nb, l.projection(2, 2)), &s.numeral(n - 1));
    }
    expect(&mut t, "c true = 1̄", l.apply(m, &l.to_numeral, &l.tru), l.one());
    expect(&mut t, "c false = 0̄", l.apply(m, &l.to_numeral, &l.fls), l.zero_numeral());
    expect(&mut t, "d 1̄ = true", l.apply(m, &l.to_bool, l.one()), &l.tru);
    expect(&mut t, "d 0̄ = false", l.apply(m, &l.to_bool, l.zero_numeral()), &l.fls);
    let bools = [(true, l.tru.clone()), (false, l.fls.clone())];
    for (x, bx) in &bools {
        expect(&mut t, &format!("not {x}"), l.apply(m, &l.not, bx), if *x { &l.fls } else { &l.tru });
        for (y, by) in &bools {
            expect(&mut t, &format!("and {x} {y}"), l.apply_n(m, &l.and, &[bx.clone(), by.clone()]), if *x && *y { &l.tru } else { &l.fls });
        }
    }
    let conv = converters_roundtrip(m, l);
    t.check(conv.is_ok(), || format!("converters: {:?}", conv.err()));
    t.finish(3, json!({ "numerals-checked": 10, "tuple-arities": 4 }))
}

fn finite_search() -> CriterionReport {
    let mut t = Tally::default();
    let mut detail = serde_json::Map::new();
    match search_finite_pca(1) {
        Ok(r) => {
            let want = FiniteTable::new(1, vec![Some(0)], 0, 0).expect("one-point table");
            t.check(r.solutions == vec![want], || format!("n = 1 gave {} structures", r.solutions.len()));
            detail.insert("n1-solutions".into(), json!(r.solutions.len()));
        }
        Err(e) => t.check(false, || e.to_string()),
    }
    for n in [2usize, 3] {
        let runs: Vec<_> = (0..2).map(|_| search_finite_pca(n)).collect();
        match (&runs[0], &runs[1]) {
            (Ok(a), Ok(b)) => {
                t.check(a.solutions.is_empty(), || format!("n = {n} found {} structures", a.solutions.len()));
                t.check(a.structures_examined == b.structures_examined && a.solutions == b.solutions, || format!("n = {n} is not deterministic"));
                detail.insert(format!("n{n}-examined"), json!(a.structures_examined));
            }
            _ => t.check(false, || format!("search n = {n} failed")),
        }
    }
    t.finish(4, Value::Object(detail))
}

fn is_zero_real(x: &K2Element) -> bool {
    matches!(x, K2Element::Periodic { prefix, period } if prefix.iter().chain(period).all(|&v| v == 0))
}

fn k2_counterexample(seed: u64) -> CriterionReport {
    const WINDOW: usize = 16;
    const K2_FUEL: u64 = 100_000;
    let mut t = Tally::default();
    let (alpha, beta) = make_counterexample_pair();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(5));
    let mut samples = vec![K2Element::zeros(), K2Element::ones()];
    while samples.len() < 20 {
        let bits = |rng: &mut ChaCha8Rng, lo: usize, hi: usize| (0..rng.gen_range(lo..hi)).map(|_| rng.gen_bool(0.3) as u64).collect::<Vec<_>>();
        samples.push(K2Element::Periodic { prefix: bits(&mut rng, 0, 8), period: bits(&mut rng, 1, 4) });
    }
    for x in &samples {
        let zero = is_zero_real(x);
        match (k2_apply(&alpha, x, WINDOW, K2_FUEL), k2_apply(&beta, x, WINDOW, K2_FUEL)) {
            (Ok(a), Ok(b)) => {
                let a_ok = if zero { a.outcome == EvalOutcome::Defined(vec![0; WINDOW]) } else { a.outcome == EvalOutcome::ProvenDivergent };
                let b_ok = if zero { !b.outcome.is_defined() } else { b.outcome == EvalOutcome::Defined(vec![1; WINDOW]) };
                t.check(a_ok, || format!("α̂·{x}: {}", a.outcome.label()));
                t.check(b_ok, || format!("β̂·{x}: {}", b.outcome.label()));
            }
            _ => t.check(false, || format!("application to {x} rejected")),
        }
    }
    let decide = |reads: usize| {
        K2Element::rule(PrefixRule::ReadThenDecide { reads, if_all_zero: Box::new(K2Element::ones()), otherwise: Box::new(K2Element::zeros()) })
    };
    let candidates = vec![
        ("constant-true", K2Element::rule(PrefixRule::Constant(Box::new(K2Element::ones())))),
        ("constant-false", K2Element::rule(PrefixRule::Constant(Box::new(K2Element::zeros())))),
        ("read-1", decide(1)),
        ("read-3", decide(3)),
        ("read-7", decide(7)),
    ];
    let (tru, fls) = (K2Element::ones(), K2Element::zeros());
    let mut kinds = Vec::new();
    for (name, g) in &candidates {
        match refute_continuous_decider(g, &tru, &fls, K2_FUEL) {
            Ok(w) => {
                let input = if w.input_is_zero_real { K2Element::zeros() } else { K2Element::single_one_at(w.consulted) };
                let verified = k2_apply(g, &input, w.coordinate as usize + 1, K2_FUEL).ok().and_then(|r| r.outcome.defined()).and_then(|v| v.last().copied());
                let member = is_zero_real(&input);
                let claims = verified == Some(1);
                t.check(verified == Some(w.answer) && claims == w.claims_member && claims != member && input.to_string() == w.input, || {
                    format!("{name}: witness on {} does not verify", w.input)
                });
                kinds.push(json!({ "candidate": name, "kind": w.kind, "input": w.input, "consulted": w.consulted }));
            }
            Err(e) => t.check(false, || format!("{name}: {e}")),
        }
    }
    t.finish(5, json!({ "sequences": samples.len(), "window": WINDOW, "witnesses": kinds }))
}

fn halting(s: &Setting<'_, K1Model>, seed: u64) -> CriterionReport {
    let mut t = Tally::default();
    let e_h = match s.halting_ce_element() {
        Ok(e) => e,
        Err(e) => return t.finish(6, json!({ "setup-error": e.to_string() })),
    };
    for (a, b) in probe_pairs(s, seed, 50) {
        let direct = s.model.apply_outcome(&a, &b, FUEL);
        let via = s.pair(&a, &b).map(|p| s.model.apply_outcome(&e_h, &p, 4 * FUEL));
        t.check(matches!(&via, Ok(v) if kleene_eq(&direct, v) == Some(true)), || format!("e⟨{a}, {b}⟩ ≄ {a} {b}"));
    }
    let mut m_red = 0;
    for (target, name) in [(s.lib.i.clone(), "i"), (s.h.clone(), "h")] {
        let Ok(f) = s.m_reduce_to_h(&target) else {
            t.check(false, || format!("m-reduction of {name} failed"));
            continue;
        };
        for (a, _) in probe_pairs(s, seed + 1, 25) {
            let fa = s.lib.apply(s.model, &f, &a).defined();
            let ok = fa.is_some_and(|fa| s.halts(&target, &a) == s.halts(&e_h, &fa));
            m_red += 1;
            t.check(ok, || format!("m-reduction of {name} disagrees at {a}"));
        }
    }
    let mut transfers = 0;
    match s.k_h_equivalence() {
        Ok((f_kh, f_hk)) => {
            for (a, b) in probe_pairs(s, seed + 2, 50) {
                let kh = s.lib.apply(s.model, &f_kh, &a).defined();
                t.check(kh.is_some_and(|kh| s.halts(&a, &a) == s.halts(&e_h, &kh)), || format!("K ≤ H disagrees at {a}"));
                let gx = s.pair(&a, &b).ok().and_then(|x| s.lib.apply(s.model, &f_hk, &x).defined());
                t.check(gx.is_some_and(|gx| s.halts(&gx, &gx) == s.halts(&a, &b)), || format!("H ≤ K disagrees at ⟨{a}, {b}⟩"));
                transfers += 1;
            }
        }
        Err(e) => t.check(false, || e.to_string()),
    }
    let mut refuted = Vec::new();
    for c in k1_halting_candidates(s) {
        match s.refute_halting_decider(&c.element) {
            Ok(w) => {
                t.check(w.replay(s.model).is_ok(), || format!("{}: witness does not replay", c.name));
                refuted.push(json!({ "candidate": c.name, "clause": w.clause, "applications": w.transcript.len() }));
            }
            Err(e) => t.check(false, || format!("{}: {e}", c.name)),
        }
    }
    t.finish(6, json!({ "simulation-probes": 50, "m-reduction-probes": m_red, "transfer-probes": transfers, "refuted": refuted }))
}

fn oracle_protocol(s: &Setting<'_, K1Model>) -> CriterionReport {
    let mut t = Tally::default();
    let (m, lib) = (s.model, &s.lib);
    let (Ok(plans), Ok(oracles)) = (scripted_plans(lib), table_oracles(lib)) else {
        return t.finish(7, json!({ "setup-error": "fixtures need more numerals" }));
    };
    let inputs = [s.numeral(0), s.numeral(3), lib.basis.k.clone()];
    let mut rounds = 0;
    for (pname, plan) in &plans {
        let a = match query_machine(m, lib, plan) {
            Ok(a) => a,
            Err(e) => {
                t.check(false, || format!("{pname}: {e}"));
                continue;
            }
        };
        for (oname, f) in &oracles {
            for b in &inputs {
                let (out, tr) = oracle_apply(m, lib, f, &a, b, FUEL);
                rounds += tr.rounds.len();
                let want = walk_plan(plan, f, b);
                t.check(
                    want.as_ref().is_some_and(|(v, q)| out.as_defined() == Some(v) && tr.queries == *q),
                    || format!("{pname} / {oname}: result or queries differ from the plan"),
                );
                let proto = check_protocol(m, lib, f, &a, b, &tr);
                t.check(proto.is_ok(), || format!("{pname} / {oname}: {}", proto.clone().unwrap_err()));
                let (again, tr2) = oracle_apply(m, lib, f, &a, b, FUEL);
                t.check(again == out && tr2 == tr, || format!("{pname} / {oname}: replay differs"));
            }
        }
    }
    let mut points = 0;
    if let Ok(r) = query_machine(m, lib, &plans[2].1) {
        for (oname, f) in &oracles {
            for (p, v) in &f.table {
                points += 1;
                let (out, _) = oracle_apply(m, lib, f, &r, p, FUEL);
                t.check(out.as_defined() == Some(v), || format!("representer misses {oname} at a table point"));
            }
        }
    }
    t.finish(7, json!({ "machines": plans.len(), "oracles": oracles.len(), "rounds": rounds, "table-points": points }))
}

fn inseparability(s: &Setting<'_, K1Model>) -> CriterionReport {
    let mut t = Tally::default();
    let c01 = k1_c01(&s.lib);
    let mut out = Vec::new();
    for c in k1_separator_candidates(s) {
        match s.refute_separator(&c.element) {
            Ok(w) => {
                t.check(w.replay(s.model).is_ok(), || format!("separator {}: witness does not replay", c.name));
                out.push(json!({ "refuter": "separator", "candidate": c.name }));
            }
            Err(e) => t.check(false, || format!("separator {}: {e}", c.name)),
        }
    }
    for c in k1_extension_candidates(s) {
        match s.refute_total_extension(&c.element, &c01) {
            Ok(w) => {
                t.check(w.replay(s.model).is_ok(), || format!("extension {}: witness does not replay", c.name));
                out.push(json!({ "refuter": "extension", "candidate": c.name, "broken-link": w.broken_link }));
            }
            Err(e) => t.check(false, || format!("extension {}: {e}", c.name)),
        }
    }
    match s.refute_precomplete_injective(k1::totalizer_code(), NumberingKernel::Identity, &c01) {
        Ok(w) => {
            t.check(w.replay(s.model).is_ok(), || "totalizer witness does not replay".into());
            out.push(json!({ "refuter": "precomplete", "candidate": "k1-totalizer", "broken-link": w.broken_link }));
        }
        Err(e) => t.check(false, || format!("totalizer: {e}")),
    }
    t.finish(10, json!({ "witnesses": out }))
}

fn recursion(s: &Setting<'_, K1Model>, seed: u64) -> CriterionReport {
    let mut t = Tally::default();
    let l = &s.lib;
    let c = |e: &BigUint| cst(e.clone());
    let samples = [
        ("k i", app(c(&l.basis.k), c(&l.i))),
        ("self-returning", lams(&["e", "y"], var("e"))),
        ("pair-with-self", lams(&["e", "y"], apps([c(l.tuple_maker(2)), var("y"), var("e")]))),
        ("constant-0", lams(&["e", "y"], c(l.zero_numeral()))),
        ("apply-self", lams(&["e", "y"], apps([var("y"), c(l.projection(2, 2)), var("e")]))),
    ];
    let ys = probe_elements(s, seed.wrapping_add(11), 20);
    let mut unsettled = 0;
    for (name, term) in &samples {
        let f = match l.element(s.model, name, term) {
            Ok(f) => f,
            Err(e) => {
                t.check(false, || format!("{name}: {e}"));
                continue;
            }
        };
        let e = match fixpoint(s.model, l, &f) {
            Ok(e) => e,
            Err(err) => {
                t.check(false, || format!("{name}: {err}"));
                continue;
            }
        };
        for y in &ys {
            let lhs = l.apply(s.model, &e, y);
            let rhs = l.apply_n(s.model, &f, &[e.clone(), y.clone()]);
            match kleene_eq(&lhs, &rhs) {
                Some(ok) => t.check(ok, || format!("{name}: e y ≄ f e y at y = {y}")),
                None => unsettled += 1,
            }
        }
    }
    t.finish(11, json!({ "functions": samples.len(), "arguments": ys.len(), "fuel": FUEL, "unsettled": unsettled }))
}
