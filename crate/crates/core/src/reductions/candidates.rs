//! Shipped candidate families in K1 for the refuters.

use num_bigint::BigUint;
use serde::Serialize;

use super::Setting;
use crate::k1::program::build::{apply, equal, if_zero, input};
use crate::k1::{K1Model, Program};
use crate::pca::StdLib;

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub name: String,
    #[serde(serialize_with = "as_decimal")]
    pub element: BigUint,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn cand(name: &str, element: BigUint) -> Candidate {
    Candidate { name: name.to_string(), element }
}

fn k(v: &BigUint) -> Program {
    Program::Const(v.clone())
}

/// Answers `yes` when `test` is nonzero and `no` otherwise.
fn decide(test: Program, yes: &BigUint, no: &BigUint) -> BigUint {
    if_zero(test, k(no), k(yes)).encode()
}

/// The separator on codes: 1̄ exactly on the code of 1̄, else 0̄.
pub fn k1_c01(lib: &StdLib<BigUint>) -> BigUint {
    decide(equal(input(), k(lib.one())), lib.one(), lib.zero_numeral())
}

/// `yes` exactly on the listed codes, `no` elsewhere.
fn table(keys: &[&BigUint], yes: &BigUint, no: &BigUint) -> BigUint {
    keys.iter().rev().fold(k(no), |rest, key| if_zero(equal(input(), k(key)), rest, k(yes))).encode()
}

fn component(lib: &StdLib<BigUint>, i: usize) -> Program {
    apply(input(), k(lib.projection(2, i)))
}

/// Claimed total boolean deciders of `H` on pair codes.
pub fn k1_halting_candidates(s: &Setting<'_, K1Model>) -> Vec<Candidate> {
    let l = &s.lib;
    let (t, f) = (&l.tru, &l.fls);
    vec![
        cand("constant-false", s.constant(f).expect("k f is total")),
        cand("constant-true", s.constant(t).expect("k t is total")),
        cand("first-is-k", decide(equal(component(l, 1), k(&l.basis.k)), t, f)),
        cand("first-is-identity", decide(equal(component(l, 1), k(&l.i)), t, f)),
        cand("components-equal", decide(equal(component(l, 1), component(l, 2)), t, f)),
    ]
}

fn numeral_deciders(s: &Setting<'_, K1Model>) -> Vec<Candidate> {
    let l = &s.lib;
    let (one, zero) = (l.one(), l.zero_numeral());
    vec![
        cand("constant-0", s.constant(zero).expect("k 0 is total")),
        cand("constant-1", s.constant(one).expect("k 1 is total")),
        cand("identity", l.i.clone()),
        cand("is-k", decide(equal(input(), k(&l.basis.k)), one, zero)),
        cand("c01", k1_c01(l)),
        cand("table", table(&[&l.basis.k, &l.i, one, &l.numerals()[3]], one, zero)),
    ]
}

/// Claimed 0̄/1̄ deciders of a separating set.
pub fn k1_separator_candidates(s: &Setting<'_, K1Model>) -> Vec<Candidate> {
    numeral_deciders(s)
}

/// Claimed total extensions of the diagonal.
pub fn k1_extension_candidates(s: &Setting<'_, K1Model>) -> Vec<Candidate> {
    let mut v = numeral_deciders(s);
    v.push(cand("diverger", s.h.clone()));
    v
}
