//! The standard φ-enumeration of unary partial computable functions used by
//! the Friedberg construction.
//!
//! Small indices are a fixed prelude of programs so that interesting
//! functions (notably `a ↦ 2a+1`) appear within desk-scale stage budgets;
//! index `PRELUDE.len() + n` runs the program with Gödel number `n`.

use std::sync::OnceLock;

use num_bigint::BigUint;

use super::program::build::*;
use super::program::Program;

/// Index of `a ↦ 2a+1` in the enumeration.
pub const DOUBLE_PLUS_ONE: u64 = 0;

fn prelude() -> &'static [Program] {
    static CELL: OnceLock<Vec<Program>> = OnceLock::new();
    CELL.get_or_init(|| {
        // runs on ⟨self, n⟩
        let step = if_zero(
            snd(input()),
            nat(1u32),
            succ(succ(apply(fst(input()), pair(fst(input()), pred(snd(input())))))),
        );
        let step_code = Program::Const(step.encode());
        vec![
            apply(step_code.clone(), pair(step_code, input())),
            input(),
            succ(input()),
            nat(0u32),
            nat(5u32),
            pred(succ(input())),
            if_zero(input(), nat(3u32), Program::Diverge),
            if_zero(input(), nat(1u32), if_zero(pred(input()), nat(0u32), Program::Diverge)),
            Program::Diverge,
            fst(input()),
            snd(input()),
            succ(succ(input())),
        ]
    })
}

pub fn prelude_len() -> u64 {
    prelude().len() as u64
}

/// The program computing `φ_e`.
pub fn phi_program(e: u64) -> Program {
    let pre = prelude();
    match pre.get(e as usize) {
        Some(p) => p.clone(),
        None => Program::decode(&BigUint::from(e - pre.len() as u64)),
    }
}

/// Gödel number of `φ_e`'s program.
pub fn phi_code(e: u64) -> BigUint {
    phi_program(e).encode()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::k1::K1Model;
    use crate::outcome::EvalOutcome;

    #[test]
    fn double_plus_one() {
        let m = K1Model::new();
        let code = phi_code(DOUBLE_PLUS_ONE);
        for a in [0u64, 1, 5, 30] {
            assert_eq!(
                m.run_outcome(&code, &BigUint::from(a), 100_000),
                EvalOutcome::Defined(BigUint::from(2 * a + 1))
            );
        }
    }

    #[test]
    fn tail_is_goedel_numbering() {
        let n = Program::Input.encode();
        let e = prelude_len() + u64::try_from(&n).unwrap();
        assert_eq!(phi_program(e), Program::Input);
        assert_eq!(phi_program(prelude_len()), Program::Diverge);
    }
}
