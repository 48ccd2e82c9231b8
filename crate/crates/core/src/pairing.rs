//! Cantor pairing and the sequence coding built on it.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub fn pair(x: &BigUint, y: &BigUint) -> BigUint {
    let w = x + y;
    (&w * (&w + 1u32)) / 2u32 + y
}

pub fn unpair(z: &BigUint) -> (BigUint, BigUint) {
    if let Some(small) = z.to_u64() {
        if small < 1 << 62 {
            let (x, y) = unpair_u64(small);
            return (BigUint::from(x), BigUint::from(y));
        }
    }
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let y = z - t;
    let x = w - &y;
    (x, y)
}

pub fn pair_u64(x: u64, y: u64) -> u64 {
    let w = x + y;
    w * (w + 1) / 2 + y
}

pub fn unpair_u64(z: u64) -> (u64, u64) {
    let mut w = ((((8 * z as u128 + 1) as f64).sqrt() as u64).saturating_sub(1)) / 2;
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    let y = z - w * (w + 1) / 2;
    (w - y, y)
}

/// Codes a finite sequence: `[] -> 0`, `x :: rest -> 1 + pair(x, code(rest))`.
pub fn seq_code(items: &[u64]) -> BigUint {
    items.iter().rev().fold(BigUint::zero(), |acc, &x| pair(&BigUint::from(x), &acc) + 1u32)
}

pub fn seq_decode(code: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut cur = code.clone();
    while !cur.is_zero() {
        let (x, rest) = unpair(&(cur - BigUint::one()));
        out.push(x);
        cur = rest;
    }
    out
}

/// Index of the coded query `<n, prefix>` used for Baire-space application.
pub fn query_code(n: u64, prefix: &[u64]) -> BigUint {
    pair(&BigUint::from(n), &seq_code(prefix))
}

pub fn query_decode(code: &BigUint) -> Option<(u64, Vec<u64>)> {
    let (n, s) = unpair(code);
    let n = n.to_u64()?;
    let seq = seq_decode(&s).iter().map(|v| v.to_u64()).collect::<Option<Vec<_>>>()?;
    Some((n, seq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_values() {
        assert_eq!(pair_u64(0, 0), 0);
        assert_eq!(pair_u64(1, 0), 1);
        assert_eq!(pair_u64(0, 1), 2);
        assert_eq!(pair_u64(2, 0), 3);
        assert_eq!(unpair_u64(4), (1, 1));
    }

    proptest! {
        #[test]
        fn unpair_inverts_pair(x in 0u64..1_000_000, y in 0u64..1_000_000) {
            let z = pair(&BigUint::from(x), &BigUint::from(y));
            prop_assert_eq!(unpair(&z), (BigUint::from(x), BigUint::from(y)));
            prop_assert_eq!(z.to_u64().unwrap(), pair_u64(x, y));
            prop_assert_eq!(unpair_u64(pair_u64(x, y)), (x, y));
        }

        #[test]
        fn sequence_coding_is_invertible(items in proptest::collection::vec(0u64..50, 0..6), n in 0u64..20) {
            let q = query_code(n, &items);
            prop_assert_eq!(query_decode(&q), Some((n, items)));
        }
    }
}
