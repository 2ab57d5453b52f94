//! Countability witnesses and enumeration combinators.

use std::fmt;

use thiserror::Error;

use crate::sdl::ast::{EnumTerm, Expr, FamilyTerm, SeqTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("invalid builder spec: {0}")]
    InvalidSpec(String),
    #[error("hashrows coordinate ({k}, {i}) is outside 0..2^32")]
    CoordinateOutOfRange { k: u64, i: u64 },
}

/// Cantor pairing `(a+b)(a+b+1)/2 + b`, or `None` if it exceeds `u64`.
pub fn checked_pair(a: u64, b: u64) -> Option<u64> {
    let s = (a as u128) + (b as u128);
    let v = s.checked_mul(s + 1)? / 2 + b as u128;
    u64::try_from(v).ok()
}

/// Cantor pairing. Panics when the pair index does not fit in `u64`.
pub fn pair(a: u64, b: u64) -> u64 {
    checked_pair(a, b).expect("pair index overflows u64")
}

/// Inverse of [`pair`].
pub fn unpair(n: u64) -> (u64, u64) {
    let n = n as u128;
    // anti-diagonal w is the largest with w(w+1)/2 <= n
    let w = ((8 * n + 1).isqrt() - 1) / 2;
    let b = n - w * (w + 1) / 2;
    let a = w - b;
    (a as u64, b as u64)
}

/// `result(2t, i) = x(t, i)`, `result(2t+1, i) = y(t, i)`.
pub fn interleave(x: &EnumTerm, y: &EnumTerm) -> EnumTerm {
    EnumTerm::combinator(Expr::Interleave(x.clone(), y.clone()))
}

/// `result(0, i) = s(i)`, `result(j+1, i) = e(j, i)`.
pub fn prepend(s: &SeqTerm, e: &EnumTerm) -> EnumTerm {
    EnumTerm::combinator(Expr::Prepend(s.clone(), e.clone()))
}

/// `result(n, i) = family(a, b, i)` where `(a, b) = unpair(n)`.
pub fn dovetail(family: &FamilyTerm) -> EnumTerm {
    EnumTerm::combinator(Expr::Dovetail(family.clone()))
}

/// A rectangular grid of bits with at least one row and one column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<Vec<u8>>,
}

impl BitMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self, EnumError> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || width == 0 {
            return Err(EnumError::InvalidSpec(
                "doubly_periodic needs at least one row and one column".into(),
            ));
        }
        if rows.iter().any(|r| r.len() != width) {
            return Err(EnumError::InvalidSpec(
                "doubly_periodic rows differ in length".into(),
            ));
        }
        if rows.iter().flatten().any(|&b| b > 1) {
            return Err(EnumError::InvalidSpec(
                "matrix entries must be 0 or 1".into(),
            ));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, k: u64, i: u64) -> u8 {
        let r = (k % self.height() as u64) as usize;
        let c = (i % self.width() as u64) as usize;
        self.rows[r][c]
    }
}

impl std::str::FromStr for BitMatrix {
    type Err = EnumError;

    /// Rows of `0`/`1` characters separated by `;`, e.g. `01;10`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows = s
            .split(';')
            .map(|row| {
                row.trim()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(EnumError::InvalidSpec(format!(
                            "bad matrix digit {other:?}"
                        ))),
                    })
                    .collect::<Result<Vec<u8>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        BitMatrix::new(rows)
    }
}

/// Named enumerations used as test corpora.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BuilderSpec {
    Zeros,
    Ones,
    /// `a[k][i] = 1` iff `k = i`
    Identity,
    /// `a[k][i]` is bit `i` of `k`
    BinaryNaturals,
    /// splitmix-style mixer, see [`hashrows_bit`]
    Hashrows {
        salt: u64,
    },
    /// `a[k][i] = M[k mod R][i mod C]`
    DoublyPeriodic(BitMatrix),
    /// `a[k][i] = 1` iff `(k = i ∧ k ≥ 1) ∨ (k = 0 ∧ i = 1)`; row 0 equals
    /// its own row-indexed diagonal under the transposition `(0 1)`
    Counterexample,
}

impl BuilderSpec {
    /// The six named builders of the standard corpus.
    pub fn standard_corpus() -> Vec<BuilderSpec> {
        vec![
            BuilderSpec::Zeros,
            BuilderSpec::Ones,
            BuilderSpec::Identity,
            BuilderSpec::BinaryNaturals,
            BuilderSpec::Hashrows { salt: 0 },
            BuilderSpec::DoublyPeriodic(
                BitMatrix::new(vec![vec![0, 1, 1], vec![1, 0, 0]]).unwrap(),
            ),
        ]
    }

    /// Resolves a builder by name; `salt` and `matrix` feed the
    /// parameterized builders.
    pub fn from_name(
        name: &str,
        salt: Option<u64>,
        matrix: Option<BitMatrix>,
    ) -> Result<Self, EnumError> {
        Ok(match name {
            "zeros" => BuilderSpec::Zeros,
            "ones" => BuilderSpec::Ones,
            "identity" => BuilderSpec::Identity,
            "binary_naturals" => BuilderSpec::BinaryNaturals,
            "hashrows" => BuilderSpec::Hashrows {
                salt: salt.unwrap_or(0),
            },
            "doubly_periodic" => {
                BuilderSpec::DoublyPeriodic(matrix.ok_or_else(|| {
                    EnumError::InvalidSpec("doubly_periodic needs a matrix".into())
                })?)
            }
            "counterexample" => BuilderSpec::Counterexample,
            other => return Err(EnumError::InvalidSpec(format!("unknown builder {other:?}"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BuilderSpec::Zeros => "zeros",
            BuilderSpec::Ones => "ones",
            BuilderSpec::Identity => "identity",
            BuilderSpec::BinaryNaturals => "binary_naturals",
            BuilderSpec::Hashrows { .. } => "hashrows",
            BuilderSpec::DoublyPeriodic(_) => "doubly_periodic",
            BuilderSpec::Counterexample => "counterexample",
        }
    }

    /// Matrix entry `a[k][i]`. Total: hashrows folds coordinates into
    /// `0..2^32` (use [`hashrows_bit`] for the checked form).
    pub fn bit(&self, k: u64, i: u64) -> u8 {
        match self {
            BuilderSpec::Zeros => 0,
            BuilderSpec::Ones => 1,
            BuilderSpec::Identity => u8::from(k == i),
            BuilderSpec::BinaryNaturals => {
                if i >= 64 {
                    0
                } else {
                    ((k >> i) & 1) as u8
                }
            }
            BuilderSpec::Hashrows { salt } => mix_lsb(*salt, k & 0xFFFF_FFFF, i & 0xFFFF_FFFF),
            BuilderSpec::DoublyPeriodic(m) => m.get(k, i),
            BuilderSpec::Counterexample => u8::from((k == i && k >= 1) || (k == 0 && i == 1)),
        }
    }
}

impl fmt::Display for BuilderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuilderSpec::Hashrows { salt } => write!(f, "hashrows({salt})"),
            BuilderSpec::DoublyPeriodic(m) => {
                f.write_str("doubly_periodic([")?;
                for (r, row) in m.rows().iter().enumerate() {
                    if r > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str("[")?;
                    for (c, b) in row.iter().enumerate() {
                        if c > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{b}")?;
                    }
                    f.write_str("]")?;
                }
                f.write_str("])")
            }
            other => f.write_str(other.name()),
        }
    }
}

/// Builds the enumeration term for a named builder.
pub fn build_enumeration(spec: &BuilderSpec) -> EnumTerm {
    EnumTerm::combinator(Expr::Builder(spec.clone()))
}

fn mix_lsb(salt: u64, k: u64, i: u64) -> u8 {
    let x = salt ^ ((k << 32) | i);
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z & 1) as u8
}

/// The hashrows entry `a[k][i]` for `k, i < 2^32`.
pub fn hashrows_bit(salt: u64, k: u64, i: u64) -> Result<u8, EnumError> {
    if k >> 32 != 0 || i >> 32 != 0 {
        return Err(EnumError::CoordinateOutOfRange { k, i });
    }
    Ok(mix_lsb(salt, k, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdl::ast::build::*;
    use crate::sdl::ast::Var;

    /// Walks anti-diagonals in order; the position of `(a, b)` is its index.
    fn anti_diagonal_index(a: u64, b: u64) -> u64 {
        let mut n = 0;
        for s in 0.. {
            for bb in 0..=s {
                if (s - bb, bb) == (a, b) {
                    return n;
                }
                n += 1;
            }
        }
        unreachable!()
    }

    #[test]
    fn pair_examples() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(anti_diagonal_index(1, 2), 8);
        assert_eq!(pair(1, 2), 8);
        assert_eq!(unpair(0), (0, 0));
        assert_eq!(unpair(8), (1, 2));
        for a in 0..20 {
            for b in 0..20 {
                assert_eq!(pair(a, b), anti_diagonal_index(a, b));
            }
        }
    }

    #[test]
    fn pair_extremes() {
        assert_eq!(checked_pair(u64::MAX, 0), None);
        assert_eq!(checked_pair(u64::MAX, u64::MAX), None);
        let (a, b) = unpair(u64::MAX);
        assert_eq!(pair(a, b), u64::MAX);
    }

    #[test]
    fn pair_roundtrip_small() {
        for a in 0..100 {
            for b in 0..100 {
                assert_eq!(unpair(pair(a, b)), (a, b));
            }
        }
    }

    #[test]
    fn builders_pointwise() {
        let id = build_enumeration(&BuilderSpec::Identity);
        assert_eq!(
            (id.bit(3, 3), id.bit(3, 4), id.bit(4, 4), id.bit(4, 5)),
            (1, 0, 1, 0)
        );
        let bn = build_enumeration(&BuilderSpec::BinaryNaturals);
        assert_eq!(bn.bit(5, 2), 1);
        assert_eq!(bn.bit(5, 0), 1);
        assert_eq!(bn.row_prefix(5, 4), vec![1, 0, 1, 0]);
        let m: BitMatrix = "01;10".parse().unwrap();
        let dp = build_enumeration(&BuilderSpec::DoublyPeriodic(m));
        assert_eq!(dp.bit(2, 3), 1);
        let ce = build_enumeration(&BuilderSpec::Counterexample);
        assert_eq!(ce.row_prefix(0, 4), vec![0, 1, 0, 0]);
        assert_eq!(ce.row_prefix(2, 4), vec![0, 0, 1, 0]);
    }

    #[test]
    fn hashrows_is_bit_exact() {
        // reference values from an independent run of the mixer
        let expect_diag = [1, 1, 1, 0, 1, 0, 0, 0];
        for (i, &b) in expect_diag.iter().enumerate() {
            assert_eq!(hashrows_bit(0, i as u64, i as u64), Ok(b));
        }
        let expect_row0 = [1, 1, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 0, 1];
        let h = build_enumeration(&BuilderSpec::Hashrows { salt: 0 });
        assert_eq!(h.row_prefix(0, 16), expect_row0);
        assert_eq!(
            hashrows_bit(0, 1 << 32, 0),
            Err(EnumError::CoordinateOutOfRange { k: 1 << 32, i: 0 })
        );
    }

    #[test]
    fn matrix_validation() {
        assert!(BitMatrix::new(vec![]).is_err());
        assert!(BitMatrix::new(vec![vec![]]).is_err());
        assert!(BitMatrix::new(vec![vec![0, 1], vec![1]]).is_err());
        assert!("01;2".parse::<BitMatrix>().is_err());
        assert!(BuilderSpec::from_name("doubly_periodic", None, None).is_err());
        assert!(BuilderSpec::from_name("nope", None, None).is_err());
        assert_eq!(
            BuilderSpec::from_name("hashrows", Some(7), None),
            Ok(BuilderSpec::Hashrows { salt: 7 })
        );
    }

    #[test]
    fn combinator_index_laws() {
        let zeros = build_enumeration(&BuilderSpec::Zeros);
        let ones = build_enumeration(&BuilderSpec::Ones);
        let il = interleave(&zeros, &ones);
        assert_eq!(il.row_prefix(1, 16), vec![1; 16]);
        assert_eq!(il.row_prefix(2, 16), vec![0; 16]);
        let one_seq = SeqTerm::new(num(1)).unwrap();
        let pp = prepend(&one_seq, &zeros);
        assert_eq!(pp.row_prefix(0, 16), vec![1; 16]);
        assert_eq!(pp.row_prefix(3, 16), vec![0; 16]);
    }

    #[test]
    fn dovetail_places_pairs() {
        // family(a, b, ·) is the constant parity of a
        let fam = FamilyTerm::new(modulo(var(Var::A), 2)).unwrap();
        let d = dovetail(&fam);
        assert_eq!(d.row_prefix(8, 8), vec![1; 8]);
        let fam = FamilyTerm::new(bit(var(Var::B), var(Var::I))).unwrap();
        let d = dovetail(&fam);
        for b in 0..40 {
            assert_eq!(d.row_prefix(pair(0, b), 8), fam_row(&fam, 0, b));
        }
    }

    fn fam_row(f: &FamilyTerm, a: u64, b: u64) -> Vec<u8> {
        (0..8).map(|i| f.bit(a, b, i)).collect()
    }
}
