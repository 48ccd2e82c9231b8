//! Programs of the self-interpreting language and their Gödel numbers.
//!
//! A program is serialized to a prefix-free bit string (4-bit node tags in
//! preorder, constants in Elias-delta form) and the string `w` is numbered by
//! `int("1" ++ w) - 1`. Code size is additive in the sizes of embedded
//! constants, so specialized codes grow linearly with nesting depth.
//! Numbers whose string does not parse as exactly one program decode to
//! [`Program::Diverge`].

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::sexpr::{Sexpr, SexprError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Program {
    Input,
    Const(BigUint),
    Succ(Box<Program>),
    Pred(Box<Program>),
    Pair(Box<Program>, Box<Program>),
    Fst(Box<Program>),
    Snd(Box<Program>),
    /// `IfZero(guard, then, else)`.
    IfZero(Box<Program>, Box<Program>, Box<Program>),
    /// Run the code produced by the first operand on the second.
    Apply(Box<Program>, Box<Program>),
    /// Specialize the code produced by the first operand to the second.
    Smn(Box<Program>, Box<Program>),
    /// 1 when both operands are the same natural, 0 otherwise.
    Equal(Box<Program>, Box<Program>),
    Diverge,
}

const TAG_BITS: usize = 4;

impl Program {
    fn tag(&self) -> u8 {
        match self {
            Program::Input => 0,
            Program::Const(_) => 1,
            Program::Succ(_) => 2,
            Program::Pred(_) => 3,
            Program::Pair(..) => 4,
            Program::Fst(_) => 5,
            Program::Snd(_) => 6,
            Program::IfZero(..) => 7,
            Program::Apply(..) => 8,
            Program::Smn(..) => 9,
            Program::Diverge => 10,
            Program::Equal(..) => 11,
        }
    }

    pub fn encode(&self) -> BigUint {
        let mut bits = vec![1u8];
        self.write_bits(&mut bits);
        BigUint::from_radix_be(&bits, 2).expect("binary digits") - 1u32
    }

    /// Total decoding; malformed numbers become `Diverge`.
    pub fn decode(code: &BigUint) -> Program {
        Self::try_decode(code).unwrap_or(Program::Diverge)
    }

    /// Decodes only numbers in the image of [`Program::encode`].
    pub fn try_decode(code: &BigUint) -> Option<Program> {
        let digits = (code + 1u32).to_radix_be(2);
        let mut r = BitReader { bits: &digits[1..], pos: 0 };
        let p = r.program()?;
        (r.pos == r.bits.len()).then_some(p)
    }

    pub fn is_well_formed_code(code: &BigUint) -> bool {
        Self::try_decode(code).is_some()
    }

    fn write_bits(&self, out: &mut Vec<u8>) {
        let tag = self.tag();
        for i in (0..TAG_BITS).rev() {
            out.push((tag >> i) & 1);
        }
        match self {
            Program::Input | Program::Diverge => {}
            Program::Const(n) => write_delta(&(n + 1u32), out),
            Program::Succ(e) | Program::Pred(e) | Program::Fst(e) | Program::Snd(e) => e.write_bits(out),
            Program::Pair(a, b) | Program::Apply(a, b) | Program::Smn(a, b) | Program::Equal(a, b) => {
                a.write_bits(out);
                b.write_bits(out);
            }
            Program::IfZero(g, t, e) => {
                g.write_bits(out);
                t.write_bits(out);
                e.write_bits(out);
            }
        }
    }

    pub fn to_sexpr(&self) -> Sexpr {
        let atom = |s: &str| Sexpr::Atom(s.to_string());
        let node = |name: &str, kids: &[&Program]| {
            let mut v = vec![atom(name)];
            v.extend(kids.iter().map(|k| k.to_sexpr()));
            Sexpr::List(v)
        };
        match self {
            Program::Input => atom("input"),
            Program::Diverge => atom("diverge"),
            Program::Const(n) => Sexpr::List(vec![atom("const"), Sexpr::Atom(n.to_string())]),
            Program::Succ(e) => node("succ", &[e]),
            Program::Pred(e) => node("pred", &[e]),
            Program::Fst(e) => node("fst", &[e]),
            Program::Snd(e) => node("snd", &[e]),
            Program::Pair(a, b) => node("pair", &[a, b]),
            Program::Apply(a, b) => node("apply", &[a, b]),
            Program::Smn(a, b) => node("smn", &[a, b]),
            Program::Equal(a, b) => node("equal", &[a, b]),
            Program::IfZero(g, t, e) => node("ifzero", &[g, t, e]),
        }
    }

    pub fn parse(src: &str) -> Result<Program, ProgramError> {
        Self::from_sexpr(&Sexpr::parse(src)?)
    }

    pub fn from_sexpr(e: &Sexpr) -> Result<Program, ProgramError> {
        let bad = || ProgramError::Syntax(e.to_string());
        if let Some(a) = e.atom() {
            return match a {
                "input" => Ok(Program::Input),
                "diverge" => Ok(Program::Diverge),
                _ => Err(bad()),
            };
        }
        let items = e.list().ok_or_else(bad)?;
        let head = items.first().and_then(Sexpr::atom).ok_or_else(bad)?;
        let kid = |i: usize| Self::from_sexpr(&items[i]).map(Box::new);
        match (head, items.len()) {
            ("const", 2) => {
                let n = items[1].atom().and_then(|s| s.parse::<BigUint>().ok()).ok_or_else(bad)?;
                Ok(Program::Const(n))
            }
            ("succ", 2) => Ok(Program::Succ(kid(1)?)),
            ("pred", 2) => Ok(Program::Pred(kid(1)?)),
            ("fst", 2) => Ok(Program::Fst(kid(1)?)),
            ("snd", 2) => Ok(Program::Snd(kid(1)?)),
            ("pair", 3) => Ok(Program::Pair(kid(1)?, kid(2)?)),
            ("apply", 3) => Ok(Program::Apply(kid(1)?, kid(2)?)),
            ("smn", 3) => Ok(Program::Smn(kid(1)?, kid(2)?)),
            ("equal", 3) => Ok(Program::Equal(kid(1)?, kid(2)?)),
            ("ifzero", 4) => Ok(Program::IfZero(kid(1)?, kid(2)?, kid(3)?)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}

#[derive(Debug, Error)]
pub enum ProgramError {
    #[error("malformed program: {0}")]
    Syntax(String),
    #[error(transparent)]
    Sexpr(#[from] SexprError),
}

fn binary_digits(n: &BigUint) -> Vec<u8> {
    n.to_radix_be(2)
}

/// Elias-delta code of `m >= 1`.
fn write_delta(m: &BigUint, out: &mut Vec<u8>) {
    let m_bits = binary_digits(m);
    let len = BigUint::from(m_bits.len());
    let len_bits = binary_digits(&len);
    out.extend(std::iter::repeat_n(0, len_bits.len() - 1));
    out.extend_from_slice(&len_bits);
    out.extend_from_slice(&m_bits[1..]);
}

struct BitReader<'a> {
    bits: &'a [u8],
    pos: usize,
}

impl BitReader<'_> {
    fn bit(&mut self) -> Option<u8> {
        let b = *self.bits.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }

    fn take(&mut self, n: usize) -> Option<&[u8]> {
        let s = self.bits.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }

    fn delta(&mut self) -> Option<BigUint> {
        let mut zeros = 0usize;
        while self.bit()? == 0 {
            zeros += 1;
        }
        let rest = self.take(zeros)?;
        let mut len: usize = 1;
        for &b in rest {
            len = len.checked_mul(2)?.checked_add(b as usize)?;
        }
        let tail = self.take(len - 1)?;
        let mut digits = Vec::with_capacity(len);
        digits.push(1);
        digits.extend_from_slice(tail);
        BigUint::from_radix_be(&digits, 2)
    }

    fn program(&mut self) -> Option<Program> {
        let mut tag = 0u8;
        for _ in 0..TAG_BITS {
            tag = tag << 1 | self.bit()?;
        }
        let kid = |r: &mut Self| r.program().map(Box::new);
        Some(match tag {
            0 => Program::Input,
            1 => {
                let m = self.delta()?;
                Program::Const(m - BigUint::one())
            }
            2 => Program::Succ(kid(self)?),
            3 => Program::Pred(kid(self)?),
            4 => Program::Pair(kid(self)?, kid(self)?),
            5 => Program::Fst(kid(self)?),
            6 => Program::Snd(kid(self)?),
            7 => Program::IfZero(kid(self)?, kid(self)?, kid(self)?),
            8 => Program::Apply(kid(self)?, kid(self)?),
            9 => Program::Smn(kid(self)?, kid(self)?),
            10 => Program::Diverge,
            11 => Program::Equal(kid(self)?, kid(self)?),
            _ => return None,
        })
    }
}

/// Builders used by the library's fixed programs.
pub mod build {
    use super::Program;
    use num_bigint::BigUint;

    pub fn input() -> Program {
        Program::Input
    }
    pub fn nat(n: impl Into<BigUint>) -> Program {
        Program::Const(n.into())
    }
    pub fn succ(e: Program) -> Program {
        Program::Succ(Box::new(e))
    }
    pub fn pred(e: Program) -> Program {
        Program::Pred(Box::new(e))
    }
    pub fn pair(a: Program, b: Program) -> Program {
        Program::Pair(Box::new(a), Box::new(b))
    }
    pub fn fst(e: Program) -> Program {
        Program::Fst(Box::new(e))
    }
    pub fn snd(e: Program) -> Program {
        Program::Snd(Box::new(e))
    }
    pub fn if_zero(g: Program, t: Program, e: Program) -> Program {
        Program::IfZero(Box::new(g), Box::new(t), Box::new(e))
    }
    pub fn apply(f: Program, a: Program) -> Program {
        Program::Apply(Box::new(f), Box::new(a))
    }
    pub fn smn(f: Program, a: Program) -> Program {
        Program::Smn(Box::new(f), Box::new(a))
    }
    pub fn equal(a: Program, b: Program) -> Program {
        Program::Equal(Box::new(a), Box::new(b))
    }
}

#[cfg(test)]
mod tests {
    use super::build::*;
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn arb_program() -> impl Strategy<Value = Program> {
        let leaf = prop_oneof![
            Just(Program::Input),
            Just(Program::Diverge),
            (0u64..1000).prop_map(nat),
            any::<u128>().prop_map(nat),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(succ),
                inner.clone().prop_map(pred),
                inner.clone().prop_map(fst),
                inner.clone().prop_map(snd),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| pair(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| apply(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| smn(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| equal(a, b)),
                (inner.clone(), inner.clone(), inner).prop_map(|(g, t, e)| if_zero(g, t, e)),
            ]
        })
    }

    #[test]
    fn small_codes() {
        assert_eq!(Program::Input.encode(), BigUint::from(15u32));
        assert_eq!(Program::decode(&BigUint::from(15u32)), Program::Input);
        // The empty string is not a program.
        assert_eq!(Program::try_decode(&BigUint::from(0u32)), None);
        assert_eq!(Program::decode(&BigUint::from(0u32)), Program::Diverge);
    }

    #[test]
    fn trailing_bits_are_rejected() {
        let code = Program::Input.encode();
        let padded = (code + 1u32) * 2u32 - 1u32;
        assert_eq!(Program::try_decode(&padded), None);
    }

    #[test]
    fn code_size_is_additive_in_constants() {
        let big: BigUint = BigUint::from(1u32) << 4000usize;
        let p = apply(nat(big.clone()), pair(nat(big), input()));
        assert!(p.encode().bits() < 8100);
    }

    #[test]
    fn text_format() {
        let p = Program::parse("(ifzero input (const 3) (succ (fst input)))").unwrap();
        assert_eq!(p, if_zero(input(), nat(3u32), succ(fst(input()))));
        assert_eq!(p.to_string(), "(ifzero input (const 3) (succ (fst input)))");
        assert!(Program::parse("(succ)").is_err());
        assert!(Program::parse("(const -1)").is_err());
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(p in arb_program()) {
            let code = p.encode();
            prop_assert!(Program::is_well_formed_code(&code));
            prop_assert_eq!(Program::decode(&code), p.clone());
            prop_assert_eq!(Program::parse(&p.to_string()).unwrap(), p);
        }

        #[test]
        fn well_formed_codes_reencode(n in 0u64..200_000) {
            let code = BigUint::from(n);
            if let Some(p) = Program::try_decode(&code) {
                prop_assert_eq!(p.encode(), code);
            }
        }
    }
}
