//! Gödel numbering of terms.
//!
//! A term is serialized to bytes and the byte string is read as a natural
//! number in bijective base 256, so every natural names at most one byte
//! string and the empty string is 0.
//!
//! Byte layout: one sort byte (`0x00` seq, `0x01` enum) followed by the
//! root node in prefix order. Varints are unsigned LEB128 (7-bit groups,
//! least significant first, high bit set on every byte but the last, no
//! redundant trailing zero groups).
//!
//! | tag  | node              | operands                                  |
//! |------|-------------------|-------------------------------------------|
//! | 0x01 | number            | varint                                    |
//! | 0x02 | `i`               |                                           |
//! | 0x03 | `k`               |                                           |
//! | 0x04 | `a`               |                                           |
//! | 0x05 | `b`               |                                           |
//! | 0x06 | `+`               | node node                                 |
//! | 0x07 | `-`               | node node                                 |
//! | 0x08 | `*`               | node node                                 |
//! | 0x09 | `div`             | node, varint divisor ≥ 1                  |
//! | 0x0A | `mod`             | node, varint divisor ≥ 1                  |
//! | 0x0B | `eq`              | node node                                 |
//! | 0x0C | `lt`              | node node                                 |
//! | 0x0D | `if`              | node node node                            |
//! | 0x0E | `bit`             | node node                                 |
//! | 0x0F | `parity`          | node                                      |
//! | 0x10 | `row`             | enum, varint row                          |
//! | 0x11 | `diag`            | enum                                      |
//! | 0x12 | `diag_row`        | enum, perm                                |
//! | 0x13 | `diag_transversal`| enum, perm                                |
//! | 0x14 | `z`               | enum                                      |
//! | 0x20 | `zeros`           |                                           |
//! | 0x21 | `ones`            |                                           |
//! | 0x22 | `identity`        |                                           |
//! | 0x23 | `binary_naturals` |                                           |
//! | 0x24 | `hashrows`        | varint salt                               |
//! | 0x25 | `doubly_periodic` | varint R ≥ 1, varint C ≥ 1, R·C bytes 0/1 |
//! | 0x26 | `counterexample`  |                                           |
//! | 0x30 | `interleave`      | enum enum                                 |
//! | 0x31 | `prepend`         | seq enum                                  |
//! | 0x32 | `dovetail`        | family                                    |
//! | 0x33 | `ys`              | enum, byte 0 = row / 1 = transversal      |
//! | 0x34 | `tower`           | enum enum, varint level ≥ 1               |
//! | 0x35 | `xinf`            | enum enum                                 |
//!
//! A perm is a varint bound `m` followed by `m` varint table entries, in
//! canonical form. Combinator operands start a fresh scope of their own
//! sort, without a sort byte.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::ast::{EnumTerm, Expr, FamilyTerm, Node, SeqTerm, Sort, Term, Var as Variable, Variant};
use crate::enumerations::{BitMatrix, BuilderSpec};
use crate::perm::FiniteSupportPerm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("code does not denote a term: {0}")]
    InvalidCode(String),
}

fn invalid<T>(why: impl Into<String>) -> Result<T, CodecError> {
    Err(CodecError::InvalidCode(why.into()))
}

/// A Gödel number.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GodelCode(pub BigUint);

impl std::fmt::Display for GodelCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn put_varint(out: &mut Vec<u8>, n: &BigUint) {
    let bytes = n.to_bytes_le();
    let mut bits: Vec<u8> = Vec::new();
    // regroup 8-bit bytes into 7-bit groups
    let mut acc: u32 = 0;
    let mut have = 0;
    for b in bytes {
        acc |= (b as u32) << have;
        have += 8;
        while have >= 7 {
            bits.push((acc & 0x7F) as u8);
            acc >>= 7;
            have -= 7;
        }
    }
    if have > 0 {
        bits.push(acc as u8);
    }
    while bits.len() > 1 && *bits.last().unwrap() == 0 {
        bits.pop();
    }
    if bits.is_empty() {
        bits.push(0);
    }
    let last = bits.len() - 1;
    for (n, g) in bits.into_iter().enumerate() {
        out.push(if n < last { g | 0x80 } else { g });
    }
}

fn put_u64(out: &mut Vec<u8>, n: u64) {
    put_varint(out, &BigUint::from(n));
}

fn put_perm(out: &mut Vec<u8>, p: &FiniteSupportPerm) {
    put_u64(out, p.bound() as u64);
    for &v in p.table() {
        put_u64(out, v);
    }
}

fn put_expr(out: &mut Vec<u8>, e: &Expr) {
    use Expr::*;
    let bin = |out: &mut Vec<u8>, tag: u8, x: &Node, y: &Node| {
        out.push(tag);
        put_expr(out, x);
        put_expr(out, y);
    };
    match e {
        Num(n) => {
            out.push(0x01);
            put_varint(out, n);
        }
        Var(v) => out.push(match v {
            Variable::I => 0x02,
            Variable::K => 0x03,
            Variable::A => 0x04,
            Variable::B => 0x05,
        }),
        Add(x, y) => bin(out, 0x06, x, y),
        Sub(x, y) => bin(out, 0x07, x, y),
        Mul(x, y) => bin(out, 0x08, x, y),
        Div(x, d) | Mod(x, d) => {
            out.push(if matches!(e, Div(..)) { 0x09 } else { 0x0A });
            put_expr(out, x);
            put_varint(out, d);
        }
        Eq(x, y) => bin(out, 0x0B, x, y),
        Lt(x, y) => bin(out, 0x0C, x, y),
        If(c, t, el) => {
            out.push(0x0D);
            put_expr(out, c);
            put_expr(out, t);
            put_expr(out, el);
        }
        Bit(x, y) => bin(out, 0x0E, x, y),
        Parity(x) => {
            out.push(0x0F);
            put_expr(out, x);
        }
        Row(en, k) => {
            out.push(0x10);
            put_expr(out, en.expr());
            put_u64(out, *k);
        }
        Diag(en) => {
            out.push(0x11);
            put_expr(out, en.expr());
        }
        DiagRow(en, p) | DiagTransversal(en, p) => {
            out.push(if matches!(e, DiagRow(..)) { 0x12 } else { 0x13 });
            put_expr(out, en.expr());
            put_perm(out, p);
        }
        ReverseDiag(en) => {
            out.push(0x14);
            put_expr(out, en.expr());
        }
        Builder(spec) => match spec {
            BuilderSpec::Zeros => out.push(0x20),
            BuilderSpec::Ones => out.push(0x21),
            BuilderSpec::Identity => out.push(0x22),
            BuilderSpec::BinaryNaturals => out.push(0x23),
            BuilderSpec::Hashrows { salt } => {
                out.push(0x24);
                put_u64(out, *salt);
            }
            BuilderSpec::DoublyPeriodic(m) => {
                out.push(0x25);
                put_u64(out, m.height() as u64);
                put_u64(out, m.width() as u64);
                out.extend(m.rows().iter().flatten());
            }
            BuilderSpec::Counterexample => out.push(0x26),
        },
        Interleave(x, y) => {
            out.push(0x30);
            put_expr(out, x.expr());
            put_expr(out, y.expr());
        }
        Prepend(s, en) => {
            out.push(0x31);
            put_expr(out, s.expr());
            put_expr(out, en.expr());
        }
        Dovetail(fam) => {
            out.push(0x32);
            put_expr(out, fam.expr());
        }
        Ys(en, v) => {
            out.push(0x33);
            put_expr(out, en.expr());
            out.push(match v {
                Variant::Row => 0,
                Variant::Transversal => 1,
            });
        }
        Tower(x, y, n) => {
            out.push(0x34);
            put_expr(out, x.expr());
            put_expr(out, y.expr());
            put_u64(out, *n);
        }
        XInfinity(x, y) => {
            out.push(0x35);
            put_expr(out, x.expr());
            put_expr(out, y.expr());
        }
    }
}

/// Serializes a term to its byte string.
pub fn term_bytes(t: &Term) -> Vec<u8> {
    let mut out = vec![match t {
        Term::Seq(_) => 0x00,
        Term::Enum(_) => 0x01,
    }];
    put_expr(&mut out, t.expr());
    out
}

/// Bijective base-256: byte `j` contributes `(b_j + 1) · 256^j`.
pub fn bytes_to_nat(bytes: &[u8]) -> BigUint {
    let mut n = BigUint::zero();
    for &b in bytes.iter().rev() {
        n = (n << 8u32) + BigUint::from(b as u32 + 1);
    }
    n
}

pub fn nat_to_bytes(n: &BigUint) -> Vec<u8> {
    let mut out = Vec::new();
    let mut n = n.clone();
    let base = BigUint::from(256u32);
    while !n.is_zero() {
        let mut digit = (&n % &base).to_u32().unwrap();
        if digit == 0 {
            digit = 256;
        }
        out.push((digit - 1) as u8);
        n = (n - BigUint::from(digit)) / &base;
    }
    out
}

pub fn encode_term(t: &Term) -> GodelCode {
    GodelCode(bytes_to_nat(&term_bytes(t)))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn byte(&mut self) -> Result<u8, CodecError> {
        match self.bytes.get(self.pos) {
            Some(&b) => {
                self.pos += 1;
                Ok(b)
            }
            None => invalid("truncated"),
        }
    }

    fn varint(&mut self) -> Result<BigUint, CodecError> {
        let mut groups = Vec::new();
        loop {
            let b = self.byte()?;
            groups.push(b & 0x7F);
            if b & 0x80 == 0 {
                break;
            }
        }
        if groups.len() > 1 && *groups.last().unwrap() == 0 {
            return invalid("overlong varint");
        }
        let mut n = BigUint::zero();
        for g in groups.iter().rev() {
            n = (n << 7u32) + BigUint::from(*g);
        }
        Ok(n)
    }

    fn small(&mut self) -> Result<u64, CodecError> {
        match self.varint()?.to_u64() {
            Some(v) => Ok(v),
            None => invalid("operand exceeds 64 bits"),
        }
    }

    fn perm(&mut self) -> Result<FiniteSupportPerm, CodecError> {
        let m = self.small()?;
        if m as usize > self.bytes.len() {
            return invalid("perm bound exceeds code length");
        }
        let table = (0..m)
            .map(|_| self.small())
            .collect::<Result<Vec<_>, _>>()?;
        FiniteSupportPerm::from_canonical_table(table)
            .or_else(|e| invalid(format!("bad permutation: {e}")))
    }

    fn node(&mut self, sort: Sort) -> Result<Node, CodecError> {
        Ok(Arc::new(self.expr(sort)?))
    }

    fn enum_term(&mut self) -> Result<EnumTerm, CodecError> {
        let e = self.expr(Sort::Enum)?;
        EnumTerm::new(e).or_else(|e| invalid(e.to_string()))
    }

    fn expr(&mut self, sort: Sort) -> Result<Expr, CodecError> {
        use Expr::*;
        let tag = self.byte()?;
        let e = match tag {
            0x01 => Num(self.varint()?),
            0x02 => Expr::Var(Variable::I),
            0x03 => Expr::Var(Variable::K),
            0x04 => Expr::Var(Variable::A),
            0x05 => Expr::Var(Variable::B),
            0x06 => Add(self.node(sort)?, self.node(sort)?),
            0x07 => Sub(self.node(sort)?, self.node(sort)?),
            0x08 => Mul(self.node(sort)?, self.node(sort)?),
            0x09 => Div(self.node(sort)?, self.varint()?),
            0x0A => Mod(self.node(sort)?, self.varint()?),
            0x0B => Eq(self.node(sort)?, self.node(sort)?),
            0x0C => Lt(self.node(sort)?, self.node(sort)?),
            0x0D => If(self.node(sort)?, self.node(sort)?, self.node(sort)?),
            0x0E => Bit(self.node(sort)?, self.node(sort)?),
            0x0F => Parity(self.node(sort)?),
            0x10 => Row(self.enum_term()?, self.small()?),
            0x11 => Diag(self.enum_term()?),
            0x12 => DiagRow(self.enum_term()?, self.perm()?),
            0x13 => DiagTransversal(self.enum_term()?, self.perm()?),
            0x14 => ReverseDiag(self.enum_term()?),
            0x20 => Builder(BuilderSpec::Zeros),
            0x21 => Builder(BuilderSpec::Ones),
            0x22 => Builder(BuilderSpec::Identity),
            0x23 => Builder(BuilderSpec::BinaryNaturals),
            0x24 => Builder(BuilderSpec::Hashrows {
                salt: self.small()?,
            }),
            0x25 => {
                let r = self.small()? as usize;
                let c = self.small()? as usize;
                match r.checked_mul(c) {
                    Some(cells) if cells <= self.bytes.len() - self.pos => {}
                    _ => return invalid("matrix exceeds code length"),
                }
                let mut rows = Vec::with_capacity(r);
                for _ in 0..r {
                    rows.push((0..c).map(|_| self.byte()).collect::<Result<Vec<_>, _>>()?);
                }
                match BitMatrix::new(rows) {
                    Ok(m) => Builder(BuilderSpec::DoublyPeriodic(m)),
                    Err(e) => return invalid(e.to_string()),
                }
            }
            0x26 => Builder(BuilderSpec::Counterexample),
            0x30 => Interleave(self.enum_term()?, self.enum_term()?),
            0x31 => {
                let s = SeqTerm::new(self.expr(Sort::Seq)?).or_else(|e| invalid(e.to_string()))?;
                Prepend(s, self.enum_term()?)
            }
            0x32 => {
                let f = FamilyTerm::new(self.expr(Sort::Family)?)
                    .or_else(|e| invalid(e.to_string()))?;
                Dovetail(f)
            }
            0x33 => {
                let e = self.enum_term()?;
                let v = match self.byte()? {
                    0 => Variant::Row,
                    1 => Variant::Transversal,
                    _ => return invalid("bad variant byte"),
                };
                Ys(e, v)
            }
            0x34 => Tower(self.enum_term()?, self.enum_term()?, self.small()?),
            0x35 => XInfinity(self.enum_term()?, self.enum_term()?),
            other => return invalid(format!("unknown tag {other:#04x}")),
        };
        e.check(sort).or_else(|err| invalid(err.to_string()))?;
        Ok(e)
    }
}

/// Parses a byte string back into a term.
pub fn term_from_bytes(bytes: &[u8]) -> Result<Term, CodecError> {
    let mut r = Reader { bytes, pos: 0 };
    let term = match r.byte()? {
        0x00 => Term::Seq(SeqTerm::new(r.expr(Sort::Seq)?).or_else(|e| invalid(e.to_string()))?),
        0x01 => Term::Enum(r.enum_term()?),
        other => return invalid(format!("unknown sort byte {other:#04x}")),
    };
    if r.pos != bytes.len() {
        return invalid("trailing bytes");
    }
    Ok(term)
}

/// Inverse of [`encode_term`] on its image.
pub fn decode_term(c: &GodelCode) -> Result<Term, CodecError> {
    let bytes = nat_to_bytes(&c.0);
    let term = term_from_bytes(&bytes)?;
    // the reader already rejects every non-canonical spelling; keep the
    // round trip as the definition of the image
    if term_bytes(&term) != bytes {
        return invalid("non-canonical encoding");
    }
    Ok(term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdl::parse::{parse_enum, parse_seq};

    fn code(text: &str) -> GodelCode {
        encode_term(&Term::Seq(parse_seq(text).unwrap()))
    }

    #[test]
    fn bijective_base_256() {
        assert_eq!(bytes_to_nat(&[]), BigUint::zero());
        assert_eq!(bytes_to_nat(&[0]), BigUint::from(1u8));
        assert_eq!(bytes_to_nat(&[255]), BigUint::from(256u32));
        assert_eq!(bytes_to_nat(&[0, 0]), BigUint::from(257u32));
        for n in 0u32..70_000 {
            let n = BigUint::from(n);
            assert_eq!(bytes_to_nat(&nat_to_bytes(&n)), n);
        }
    }

    #[test]
    fn varint_layout() {
        let mut out = Vec::new();
        put_u64(&mut out, 0);
        put_u64(&mut out, 127);
        put_u64(&mut out, 128);
        put_u64(&mut out, 300);
        assert_eq!(out, vec![0x00, 0x7F, 0x80, 0x01, 0xAC, 0x02]);
        let mut big = Vec::new();
        put_varint(&mut big, &(BigUint::from(1u8) << 70u32));
        let mut r = Reader {
            bytes: &big,
            pos: 0,
        };
        assert_eq!(r.varint().unwrap(), BigUint::from(1u8) << 70u32);
        let mut r = Reader {
            bytes: &[0x80, 0x00],
            pos: 0,
        };
        assert!(r.varint().is_err());
    }

    #[test]
    fn examples() {
        assert_ne!(code("0"), code("1"));
        // seq sort byte, number tag, varint 0
        assert_eq!(
            term_bytes(&Term::Seq(parse_seq("0").unwrap())),
            vec![0x00, 0x01, 0x00]
        );
        let t = Term::Seq(parse_seq("0").unwrap());
        assert_eq!(decode_term(&encode_term(&t)), Ok(t.clone()));
        assert_eq!(decode_term(&encode_term(&t)), decode_term(&encode_term(&t)));
    }

    #[test]
    fn rejects_small_non_image_codes() {
        let mut rejected = 0;
        for n in 0u32..2000 {
            let c = GodelCode(BigUint::from(n));
            match decode_term(&c) {
                Ok(t) => assert_eq!(encode_term(&t), c),
                Err(CodecError::InvalidCode(_)) => rejected += 1,
            }
        }
        assert!(rejected > 0);
        // 0 is the empty byte string
        assert!(decode_term(&GodelCode(BigUint::zero())).is_err());
    }

    #[test]
    fn rejects_scope_violations() {
        // seq term using `k`
        assert!(term_from_bytes(&[0x00, 0x03]).is_err());
        // div by zero
        assert!(term_from_bytes(&[0x00, 0x09, 0x02, 0x00]).is_err());
        // builder in seq scope
        assert!(term_from_bytes(&[0x00, 0x20]).is_err());
        // non-canonical perm table [1, 0, 2]
        assert!(term_from_bytes(&[0x00, 0x12, 0x20, 0x03, 0x01, 0x00, 0x02]).is_err());
        // tower level 0
        assert!(term_from_bytes(&[0x01, 0x34, 0x20, 0x20, 0x00]).is_err());
        assert!(term_from_bytes(&[0x01, 0x20, 0x20]).is_err());
    }

    #[test]
    fn combinators_roundtrip() {
        for text in [
            "xinf(zeros, ys(hashrows(99), transversal))",
            "tower(doubly_periodic([[0, 1, 1], [1, 0, 0]]), counterexample, 16)",
            "dovetail(bit(a, i) + b * 1000000000000000000000000)",
            "prepend(diag_transversal(identity, [2,0,1]), interleave(ones, binary_naturals))",
        ] {
            let t = Term::Enum(parse_enum(text).unwrap());
            assert_eq!(decode_term(&encode_term(&t)).unwrap(), t);
        }
    }
}
