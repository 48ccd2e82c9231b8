use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use pca_core::friedberg::{find_k_code, refute_s_candidate, FriedbergState, PsiValue, ReleaseRule, Snapshot, Undefinedness};
use pca_core::k1::enumeration::{phi_program, DOUBLE_PLUS_ONE};
use pca_core::k1::K1Model;
use pca_core::EvalOutcome;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STAGES: u64 = 2_000;

fn n(v: u64) -> BigUint {
    BigUint::from(v)
}

fn shared() -> std::sync::MutexGuard<'static, FriedbergState> {
    static CELL: OnceLock<Mutex<FriedbergState>> = OnceLock::new();
    let mut st = CELL.get_or_init(|| Mutex::new(FriedbergState::new())).lock().unwrap();
    st.run_until(STAGES);
    st
}

#[test]
fn odd_codes_and_zero_at_stage_zero() {
    let mut st = FriedbergState::new();
    for x in [0u64, 1, 7, 49] {
        assert_eq!(st.psi_at(&n(2 * x + 1), &n(123), 0), PsiValue::Defined(n(x)));
    }
    assert_eq!(st.psi_at(&n(0), &n(3), 0), PsiValue::Undefined(Undefinedness::EmptyCode));
    assert_eq!(st.psi_at(&n(2), &n(0), 0), PsiValue::Unknown);
    assert_eq!(st.stage(), 0);
    assert!(st.entries().is_empty());
}

#[test]
fn first_stages_appoint_in_order() {
    let mut st = FriedbergState::new();
    st.run(40);
    let codes: Vec<u64> = st.trace().iter().filter_map(|ev| ev.appointment.as_ref().map(|a| a.code)).collect();
    assert!(!codes.is_empty());
    assert_eq!(codes, (1..=codes.len() as u64).map(|i| 2 * i).collect::<Vec<_>>());
    assert!(st.check_invariants().ok());
}

#[test]
fn invariants_hold_after_run() {
    let mut st = shared();
    let r = st.check_invariants();
    assert!(r.ok(), "{:?}", r.violations);
    assert_eq!(r.released + r.active, r.codes_checked);
    assert!(r.released > 0);
}

#[test]
fn constant_functions_are_released_by_the_constant_rule() {
    let st = shared();
    let model = K1Model::new();
    // prelude index 3 is the constant 0 function
    assert_eq!(model.exec(&phi_program(3), &n(9), &mut pca_core::Fuel::new(100)), Ok(n(0)));
    let rules: Vec<ReleaseRule> = st.entries().values().filter(|en| en.index == 3).filter_map(|en| en.release.as_ref().map(|r| r.rule)).collect();
    assert!(rules.contains(&ReleaseRule::Constant), "{rules:?}");
}

#[test]
fn duplicate_of_smaller_index_is_released() {
    let st = shared();
    // prelude index 5 computes the identity, as index 1 does
    let rules: Vec<ReleaseRule> = st.entries().values().filter(|en| en.index == 5).filter_map(|en| en.release.as_ref().map(|r| r.rule)).collect();
    assert!(rules.contains(&ReleaseRule::NotMinimal), "{rules:?}");
    assert!(st.follower_of(5).is_none() || st.follower_of(1).is_none());
}

#[test]
fn injected_duplicate_is_flagged() {
    let mut st = shared();
    let mut snap: Snapshot = st.snapshot();
    assert!(snap.check().ok());
    let released: Vec<usize> = snap.entries.iter().enumerate().filter(|(_, e)| e.entry.release.is_some()).map(|(i, _)| i).collect();
    let (a, b) = (released[0], released[1]);
    let copy = snap.entries[a].psi.clone();
    snap.entries[b].psi = copy.clone();
    snap.entries[b].entry.release.as_mut().unwrap().frozen = copy;
    let r = snap.check();
    assert!(r.violations.iter().any(|v| v.contains("compatible")), "{:?}", r.violations);
}

#[test]
fn snapshot_round_trips_through_json() {
    let mut st = shared();
    let snap = st.snapshot();
    let json = serde_json::to_string(&snap).unwrap();
    let back: Snapshot = serde_json::from_str(&json).unwrap();
    assert_eq!(back, snap);
}

#[test]
fn every_nonempty_small_index_was_followed() {
    let st = shared();
    let followed: std::collections::HashSet<u64> = st.trace().iter().filter_map(|ev| ev.appointment.as_ref().map(|a| a.index)).collect();
    let model = K1Model::new();
    for e in 0..=10u64 {
        let nonempty = (0..20u64).any(|y| model.exec(&phi_program(e), &n(y), &mut pca_core::Fuel::new(10_000)).is_ok());
        assert_eq!(followed.contains(&e), nonempty, "index {e}");
    }
}

#[test]
fn k_code_satisfies_the_k_law() {
    let mut st = shared();
    let report = find_k_code(&mut st, STAGES, 20, 3).unwrap();
    let k = report.code;
    assert!(k > 0 && k.is_multiple_of(2));
    assert!(st.entries()[&k].release.is_none());
    assert_eq!(st.entries()[&k].index, DOUBLE_PLUS_ONE);
    assert_eq!(st.psi_at(&n(k), &n(5), STAGES), PsiValue::Defined(n(11)));
    assert_eq!(st.psi_apply(&n(11), &n(42), STAGES), EvalOutcome::Defined(n(5)));
    assert_eq!(report.samples.len(), 20);
}

#[test]
fn s_candidates_are_refuted_in_phase_one() {
    let mut st = shared();
    let k = find_k_code(&mut st, STAGES, 1, 0).unwrap().code;
    let mut family: Vec<u64> = (1..=99).step_by(2).collect();
    family.extend([0, k]);
    let used: Vec<u64> = st.entries().keys().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    family.extend((0..20).map(|_| used[rng.gen_range(0..used.len())]));
    for sigma in family {
        match refute_s_candidate(&mut st, &n(sigma), Some(k), STAGES) {
            Ok(w) => assert_eq!(w.phase, 1, "σ = {sigma}"),
            Err(e) => panic!("σ = {sigma} not refuted: {e:?}"),
        }
    }
}
