use std::sync::OnceLock;

use num_bigint::BigUint;
use pca_core::k1::{self, K1Model};
use pca_core::observe::{observational_eq, ObservationVerdict};
use pca_core::pca::{search_finite_pca, StdLib};
use pca_core::term::{app, apps, cst, eval_closed, var, Term};
use pca_core::{EvalOutcome, Model};
use proptest::prelude::*;

const FUEL: u64 = 100_000;

fn env() -> &'static (K1Model, StdLib<BigUint>) {
    static CELL: OnceLock<(K1Model, StdLib<BigUint>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let m = K1Model::new();
        let l = StdLib::build(&m, 1_000_000).unwrap();
        (m, l)
    })
}

fn pool() -> Vec<BigUint> {
    let (_, l) = env();
    let mut v = vec![l.basis.k.clone(), l.basis.s.clone(), l.i.clone(), l.fls.clone(), l.not.clone()];
    v.extend((0..4).map(|n| l.numeral(n).unwrap().clone()));
    v.extend([BigUint::from(0u32), BigUint::from(7u32), k1::diverge_code().clone()]);
    v
}

fn atom() -> impl Strategy<Value = BigUint> {
    (0..pool().len()).prop_map(|i| pool()[i].clone())
}

/// Terms over pool constants and the variable `x`.
fn arb_open_term() -> impl Strategy<Value = Term<BigUint>> {
    let leaf = prop_oneof![atom().prop_map(cst), Just(var("x"))];
    leaf.prop_recursive(4, 12, 2, |inner| (inner.clone(), inner).prop_map(|(f, a)| app(f, a)))
}

/// Both conclusive and equal, or at least one side ran out of fuel.
fn consistent(a: &EvalOutcome<BigUint>, b: &EvalOutcome<BigUint>) -> bool {
    matches!(a, EvalOutcome::FuelExhausted(_)) || matches!(b, EvalOutcome::FuelExhausted(_)) || a == b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn k_law(a in atom(), b in atom()) {
        let (m, l) = env();
        let r = eval_closed(m, &apps([cst(l.basis.k.clone()), cst(a.clone()), cst(b)]), FUEL).unwrap();
        prop_assert_eq!(r, EvalOutcome::Defined(a));
    }

    #[test]
    fn s_law(a in atom(), b in atom(), c in atom()) {
        let (m, l) = env();
        let s = cst(l.basis.s.clone());
        let sab = eval_closed(m, &apps([s.clone(), cst(a.clone()), cst(b.clone())]), FUEL).unwrap();
        prop_assert!(sab.is_defined());
        let lhs = eval_closed(m, &apps([s, cst(a.clone()), cst(b.clone()), cst(c.clone())]), FUEL).unwrap();
        let rhs = eval_closed(m, &app(apps([cst(a), cst(c.clone())]), apps([cst(b), cst(c)])), FUEL).unwrap();
        prop_assert!(consistent(&lhs, &rhs), "{:?} vs {:?}", lhs, rhs);
    }

    #[test]
    fn lambda_star_contract(t in arb_open_term(), a in atom()) {
        let (m, l) = env();
        let abs = l.basis.lambda_star("x", &t).unwrap();
        let f = eval_closed(m, &abs, FUEL).unwrap();
        let f = f.defined().expect("λ*x.t is always defined");
        let lhs = m.apply_outcome(&f, &a, FUEL);
        let rhs = eval_closed(m, &t.subst("x", &a), FUEL).unwrap();
        prop_assert!(consistent(&lhs, &rhs), "{:?} vs {:?}", lhs, rhs);
    }
}

#[test]
fn numerals_are_distinct_and_decoded() {
    let (m, l) = env();
    let ns: Vec<BigUint> = (0..=20).map(|n| l.numeral(n).unwrap().clone()).collect();
    for (i, a) in ns.iter().enumerate() {
        assert_eq!(l.numeral_value(a), Some(i));
        for b in &ns[i + 1..] {
            assert_ne!(a, b);
        }
    }
    assert_eq!(l.apply(m, &l.zero, &ns[0]), EvalOutcome::Defined(l.tru.clone()));
    for n in &ns[1..] {
        assert_eq!(l.apply(m, &l.zero, n), EvalOutcome::Defined(l.fls.clone()));
    }
}

#[test]
fn tuples_project_every_component() {
    let (m, l) = env();
    let items: Vec<BigUint> = (10u32..14).map(BigUint::from).collect();
    for n in 1..=4 {
        let t = l.tuple(m, &items[..n]).unwrap();
        for j in 1..=n {
            assert_eq!(l.apply(m, &t, l.projection(n, j)), EvalOutcome::Defined(items[j - 1].clone()), "U^{n}_{j}");
        }
    }
}

#[test]
fn boolean_tables() {
    let (m, l) = env();
    let b = |v: bool| if v { l.tru.clone() } else { l.fls.clone() };
    for x in [false, true] {
        assert_eq!(l.apply(m, &l.not, &b(x)), EvalOutcome::Defined(b(!x)));
        for y in [false, true] {
            assert_eq!(l.apply_n(m, &l.and, &[b(x), b(y)]), EvalOutcome::Defined(b(x && y)));
        }
    }
}

#[test]
fn observation_distinguishes_and_agrees() {
    let (m, l) = env();
    let probes = pool();
    let (k, s) = (cst(l.basis.k.clone()), cst(l.basis.s.clone()));
    // s k (k k) is another code for the identity
    let skkk = eval_closed(m, &apps([s, k.clone(), app(k.clone(), k)]), FUEL).unwrap().defined().unwrap();
    assert_ne!(skkk, l.i);
    assert_eq!(observational_eq(m, &skkk, &l.i, &probes, FUEL), ObservationVerdict::AgreeOnProbes);
    match observational_eq(m, &l.i, &l.not, &probes, FUEL) {
        ObservationVerdict::Distinguished { .. } => {}
        v => panic!("{v:?}"),
    }
}

#[test]
fn no_pca_of_size_two_or_three() {
    assert_eq!(search_finite_pca(1).unwrap().solutions.len(), 1);
    assert!(search_finite_pca(2).unwrap().solutions.is_empty());
    assert!(search_finite_pca(3).unwrap().solutions.is_empty());
}
