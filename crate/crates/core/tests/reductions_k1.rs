use std::sync::OnceLock;

use num_bigint::BigUint;
use pca_core::k1::{self, K1Model, NumberingKernel};
use pca_core::reductions::candidates::{k1_c01, k1_extension_candidates, k1_halting_candidates, k1_separator_candidates};
use pca_core::reductions::{probe_pairs, ProbeReport, ReductionError, Setting, WitnessKind};
use pca_core::term::{app, lams, var};
use pca_core::{EvalOutcome, Model};

const FUEL: u64 = 1_000_000;

fn setting() -> &'static Setting<'static, K1Model> {
    static MODEL: OnceLock<K1Model> = OnceLock::new();
    static SETTING: OnceLock<Setting<'static, K1Model>> = OnceLock::new();
    SETTING.get_or_init(|| Setting::k1(MODEL.get_or_init(K1Model::new), FUEL).expect("stdlib builds in K1"))
}

#[test]
fn halting_element_simulates_application() {
    let s = setting();
    let e = s.halting_ce_element().unwrap();
    let four = s.numeral(4);
    let p = s.pair(&s.lib.i, &four).unwrap();
    assert_eq!(s.lib.apply(s.model, &e, &p), EvalOutcome::Defined(four.clone()));
    let p = s.pair(&s.h, &four).unwrap();
    assert_eq!(s.lib.apply(s.model, &e, &p), EvalOutcome::ProvenDivergent);

    let mut report = ProbeReport::default();
    for (a, b) in probe_pairs(s, 1, 50) {
        let p = s.pair(&a, &b).unwrap();
        let direct = s.model.apply_outcome(&a, &b, FUEL);
        let via = s.model.apply_outcome(&e, &p, 4 * FUEL);
        report.record(match (direct.is_defined(), &via) {
            (_, EvalOutcome::FuelExhausted(_)) => None,
            (true, EvalOutcome::Defined(v)) => Some(direct.as_defined() == Some(v)),
            (false, EvalOutcome::ProvenDivergent) => Some(true),
            _ => Some(false),
        });
    }
    assert!(report.all_agree(50), "{report:?}");
}

#[test]
fn ce_from_decider_matches_its_decider() {
    let s = setting();
    let one = s.numeral(1);
    let zero = s.numeral(0);
    let probes: Vec<BigUint> = (0..6).map(|n| s.numeral(n)).chain([s.lib.basis.k.clone(), s.lib.i.clone()]).collect();

    let full = s.ce_from_decider(&s.constant(&one).unwrap(), &probes).unwrap();
    let empty = s.ce_from_decider(&s.constant(&zero).unwrap(), &probes).unwrap();
    for a in &probes {
        assert_eq!(s.halts(&full, a), Some(true));
        assert_eq!(s.model.apply_outcome(&empty, a, FUEL), EvalOutcome::ProvenDivergent);
    }
    let is_k = k1_separator_candidates(s).into_iter().find(|c| c.name == "is-k").unwrap().element;
    let e = s.ce_from_decider(&is_k, &probes).unwrap();
    let members: Vec<&BigUint> = probes.iter().filter(|a| s.halts(&e, a) == Some(true)).collect();
    assert_eq!(members, vec![&s.lib.basis.k]);

    match s.ce_from_decider(&s.lib.i, &probes[1..]) {
        Err(ReductionError::Invalid(w)) => assert_eq!(w.kind, WitnessKind::InvalidCandidate),
        other => panic!("identity is not 0/1 valued: {other:?}"),
    }
}

#[test]
fn m_reduction_and_k_h_transfers_agree() {
    let s = setting();
    let e_h = s.halting_ce_element().unwrap();
    let (f_kh, f_hk) = s.k_h_equivalence().unwrap();
    for (target, name) in [(s.lib.i.clone(), "i"), (s.h.clone(), "h")] {
        let f = s.m_reduce_to_h(&target).unwrap();
        for (a, _) in probe_pairs(s, 2, 20) {
            let fa = s.lib.apply(s.model, &f, &a).defined().unwrap_or_else(|| panic!("f total ({name})"));
            assert_eq!(s.halts(&target, &a), s.halts(&e_h, &fa), "{name}");
        }
    }
    for (a, b) in probe_pairs(s, 3, 20) {
        let kh = s.lib.apply(s.model, &f_kh, &a).defined().unwrap();
        assert_eq!(s.halts(&a, &a), s.halts(&e_h, &kh));
        let x = s.pair(&a, &b).unwrap();
        let gx = s.lib.apply(s.model, &f_hk, &x).defined().unwrap();
        assert_eq!(s.halts(&gx, &gx), s.halts(&a, &b));
    }
}

#[test]
fn halting_deciders_are_refuted() {
    let s = setting();
    for c in k1_halting_candidates(s) {
        let w = s.refute_halting_decider(&c.element).unwrap_or_else(|e| panic!("{}: {e}", c.name));
        assert_eq!(w.kind, WitnessKind::HaltingDecider);
        assert_eq!(w.replay(s.model), Ok(()), "{}", c.name);
        let last = w.transcript.last().unwrap();
        match c.name.as_str() {
            "constant-false" => assert_eq!(last.outcome, EvalOutcome::Defined(s.numeral(0))),
            "constant-true" => assert_eq!(last.outcome, EvalOutcome::ProvenDivergent),
            _ => {}
        }
    }
}

#[test]
fn separators_are_refuted() {
    let s = setting();
    for c in k1_separator_candidates(s) {
        let w = s.refute_separator(&c.element).unwrap_or_else(|e| panic!("{}: {e}", c.name));
        assert_eq!(w.kind, WitnessKind::Separator);
        assert_eq!(w.replay(s.model), Ok(()));
    }
    assert!(matches!(s.refute_separator(&s.h), Err(ReductionError::Invalid(_))));
}

#[test]
fn total_extensions_are_refuted() {
    let s = setting();
    let c01 = k1_c01(&s.lib);
    for c in k1_extension_candidates(s) {
        let w = s.refute_total_extension(&c.element, &c01).unwrap_or_else(|e| panic!("{}: {e}", c.name));
        assert_eq!(w.kind, WitnessKind::TotalExtension);
        assert_eq!(w.replay(s.model), Ok(()), "{}", c.name);
        let link = w.broken_link.as_deref().unwrap();
        match c.name.as_str() {
            "diverger" => assert_eq!(link, "not-total"),
            "constant-0" | "identity" => assert_eq!(link, "extension-violated"),
            _ => {}
        }
    }
}

#[test]
fn diagonal_catches_extensions_agreeing_on_direct_probe() {
    // agrees with a a on the direct probe k 1̄ but not on the diagonal
    let s = setting();
    let c01 = k1_c01(&s.lib);
    let const_one = s.constant(&s.numeral(1)).unwrap();
    let w = s.refute_total_extension(&const_one, &c01).unwrap();
    assert_eq!(w.broken_link.as_deref(), Some("extension-violated"));
    assert!(w.clause.contains("diagonal"), "{}", w.clause);
}

#[test]
fn precomplete_totalizer_is_not_one_one() {
    let s = setting();
    let c01 = k1_c01(&s.lib);
    let w = s.refute_precomplete_injective(k1::totalizer_code(), NumberingKernel::Identity, &c01).unwrap();
    assert_eq!(w.kind, WitnessKind::PrecompleteOneOne);
    assert_eq!(w.replay(s.model), Ok(()));

    let zero_emitter = s.constant(&s.constant(&s.numeral(0)).unwrap()).unwrap();
    let w = s.refute_precomplete_injective(&zero_emitter, NumberingKernel::Identity, &c01).unwrap();
    assert_eq!(w.broken_link.as_deref(), Some("extension-violated"));

    let refused = s.refute_precomplete_injective(k1::totalizer_code(), NumberingKernel::FunctionEquality, &c01);
    assert!(matches!(refused, Err(ReductionError::Precondition(_))));
}

#[test]
fn extension_transfer_recovers_application() {
    let s = setting();
    let diag = s.lib.element(s.model, "b", &lams(&["a"], app(var("a"), var("a")))).unwrap();
    let t = s.extension_transfer(&diag).unwrap();
    let two = s.numeral(2);
    let x = s.pair(&s.lib.i, &two).unwrap();
    assert_eq!(s.lib.apply(s.model, &t, &x), EvalOutcome::Defined(two));
    let five = s.numeral(5);
    let ka = s.constant(&five).unwrap();
    let x = s.pair(&ka, &s.lib.i).unwrap();
    assert_eq!(s.lib.apply(s.model, &t, &x), EvalOutcome::Defined(five));
}
