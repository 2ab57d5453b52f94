//! Eventually-periodic certificates extracted from term structure.
//!
//! The extractor proves, by structural recursion, that a sequence is
//! eventually periodic with preperiod at most `pre` and period dividing
//! `period`. The first `pre + period` bits then determine the sequence,
//! and the normal form is computed from them. Anything outside the
//! recognised subclass is refused; no certificate is ever guessed from a
//! finite prefix.
//!
//! The recursion tracks how a sequence is read: position `i` of the
//! sequence under analysis reads the enumeration at row `r(i)` and column
//! `c(i)`, both affine in `i`.

use super::ep::{EpError, EventuallyPeriodic};
use crate::enumerations::BuilderSpec;
use crate::perm::FiniteSupportPerm;
use crate::sdl::{EnumTerm, Expr, SeqTerm, Var as Variable};

/// Certificates needing more bits than this are refused.
pub const MAX_CERTIFIED_BITS: u64 = 1 << 20;

/// `i ↦ slope·i + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Affine {
    slope: u64,
    offset: u64,
}

type Cert = Result<Bounds, EpError>;

fn refuse<T>(why: impl Into<String>) -> Result<T, EpError> {
    Err(EpError::NotEventuallyPeriodic(why.into()))
}

fn overflow<T>() -> Result<T, EpError> {
    refuse("index arithmetic overflow")
}

impl Affine {
    const IDENTITY: Affine = Affine {
        slope: 1,
        offset: 0,
    };

    fn constant(offset: u64) -> Self {
        Affine { slope: 0, offset }
    }

    fn at(self, i: u64) -> Option<u64> {
        self.slope.checked_mul(i)?.checked_add(self.offset)
    }

    /// `i ↦ self(factor·i + shift)`.
    fn compose(self, factor: u64, shift: u64) -> Result<Affine, EpError> {
        let slope = self.slope.checked_mul(factor);
        let offset = self.at(shift);
        match (slope, offset) {
            (Some(slope), Some(offset)) => Ok(Affine { slope, offset }),
            _ => overflow(),
        }
    }

    /// Least `i` with `self(i) ≥ bound`, if the map is increasing.
    fn first_at_least(self, bound: u64) -> Option<u64> {
        if self.offset >= bound {
            return Some(0);
        }
        if self.slope == 0 {
            return None;
        }
        Some((bound - self.offset).div_ceil(self.slope))
    }
}

/// Preperiod at most `pre`, period dividing `period`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Bounds {
    pre: u64,
    period: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Bounds {
    const CONSTANT: Bounds = Bounds { pre: 0, period: 1 };

    fn join(self, other: Bounds) -> Cert {
        let g = gcd(self.period, other.period);
        let period = (self.period / g).checked_mul(other.period);
        match period {
            Some(period) if period <= MAX_CERTIFIED_BITS => Ok(Bounds {
                pre: self.pre.max(other.pre),
                period,
            }),
            _ => refuse("period bound too large"),
        }
    }

    /// The sequence agrees with `self` from position `from` on.
    fn starting_at(self, from: u64) -> Cert {
        Ok(Bounds {
            pre: self.pre.max(from),
            period: self.period,
        })
    }

    /// The sequence at `i + shift` is described by `self`.
    fn shifted(self, shift: u64) -> Cert {
        match self.pre.checked_add(shift) {
            Some(pre) => Ok(Bounds {
                pre,
                period: self.period,
            }),
            None => overflow(),
        }
    }

    /// Merges the even-position and odd-position subsequences.
    fn merge_halves(even: Bounds, odd: Bounds) -> Cert {
        let both = even.join(odd)?;
        match (both.pre.checked_mul(2), both.period.checked_mul(2)) {
            (Some(pre), Some(period)) => Ok(Bounds { pre, period }),
            _ => overflow(),
        }
    }
}

/// Least `i` past which `[x(i) = y(i)]` is constant.
fn affine_eq_settles(x: Affine, y: Affine) -> u64 {
    if x.slope == y.slope {
        return 0;
    }
    let (ds, doff) = (
        x.slope as i128 - y.slope as i128,
        y.offset as i128 - x.offset as i128,
    );
    if doff % ds == 0 && doff / ds >= 0 {
        (doff / ds) as u64 + 1
    } else {
        0
    }
}

fn seq_bounds(s: &SeqTerm, col: Affine) -> Cert {
    expr_bounds(s.expr(), Affine::constant(0), col)
}

fn enum_bounds(e: &EnumTerm, row: Affine, col: Affine) -> Cert {
    expr_bounds(e.expr(), row, col)
}

fn expr_bounds(expr: &Expr, row: Affine, col: Affine) -> Cert {
    use Expr::*;
    if row.slope == 0 && col.slope == 0 {
        return Ok(Bounds::CONSTANT);
    }
    match expr {
        Num(_) => Ok(Bounds::CONSTANT),
        Expr::Var(v) => {
            let moving = match v {
                Variable::I => col.slope != 0,
                Variable::K => row.slope != 0,
                Variable::A | Variable::B => true,
            };
            if moving {
                refuse(format!("arithmetic on a moving `{}`", v.name()))
            } else {
                Ok(Bounds::CONSTANT)
            }
        }
        Add(x, y) | Sub(x, y) | Mul(x, y) | Eq(x, y) | Lt(x, y) | Bit(x, y) => {
            expr_bounds(x, row, col)?.join(expr_bounds(y, row, col)?)
        }
        Div(x, _) | Mod(x, _) | Parity(x) => expr_bounds(x, row, col),
        If(c, t, e) => expr_bounds(c, row, col)?
            .join(expr_bounds(t, row, col)?)?
            .join(expr_bounds(e, row, col)?),
        Row(e, k) => enum_bounds(e, Affine::constant(*k), col),
        Diag(e) => enum_bounds(e, col, col),
        DiagRow(e, p) | DiagTransversal(e, p) => permuted_bounds(e, p, col),
        ReverseDiag(_) => refuse("reverse diagonal reads an unbounded family of permutations"),
        Builder(spec) => builder_bounds(spec, row, col),
        Interleave(x, y) => interleave_bounds(x, y, row, col),
        Prepend(s, e) => {
            if row.slope == 0 {
                return match row.offset {
                    0 => seq_bounds(s, col),
                    k => enum_bounds(e, Affine::constant(k - 1), col),
                };
            }
            if row.offset >= 1 {
                let below = Affine {
                    slope: row.slope,
                    offset: row.offset - 1,
                };
                return enum_bounds(e, below, col);
            }
            // only position 0 reads the prepended sequence
            let below = row.compose(1, 1)?;
            let below = Affine {
                slope: below.slope,
                offset: below.offset - 1,
            };
            enum_bounds(e, below, col.compose(1, 1)?)?.shifted(1)
        }
        Dovetail(_) => refuse("dovetailed rows are not affine in the index"),
        Ys(e, _) => {
            if row.slope != 0 {
                return refuse("moving row of a Y family");
            }
            permuted_bounds(e, &FiniteSupportPerm::unrank(row.offset), col)
        }
        Tower(x, y, n) => tower_bounds(x, y, *n, row, col),
        XInfinity(x, y) => {
            if row.slope % 2 == 1 {
                let even = expr_bounds(expr, row.compose(2, 0)?, col.compose(2, 0)?)?;
                let odd = expr_bounds(expr, row.compose(2, 1)?, col.compose(2, 1)?)?;
                return Bounds::merge_halves(even, odd);
            }
            let half = Affine {
                slope: row.slope / 2,
                offset: row.offset / 2,
            };
            if row.offset % 2 == 1 {
                interleave_bounds(x, y, half, col)
            } else if row.slope == 0 {
                tower_w_bounds(x, y, half.offset + 1, col)
            } else {
                refuse("limit rows through unboundedly many tower levels")
            }
        }
    }
}

/// Both permuted variants equal the classical flip of `e` at every
/// position `j ≥ bound(p)`.
fn permuted_bounds(e: &EnumTerm, p: &FiniteSupportPerm, col: Affine) -> Cert {
    let inner = enum_bounds(e, col, col)?;
    match col.first_at_least(p.bound() as u64) {
        Some(from) => inner.starting_at(from),
        None => Ok(Bounds::CONSTANT),
    }
}

fn interleave_bounds(x: &EnumTerm, y: &EnumTerm, row: Affine, col: Affine) -> Cert {
    if row.slope % 2 == 1 {
        let even = interleave_bounds(x, y, row.compose(2, 0)?, col.compose(2, 0)?)?;
        let odd = interleave_bounds(x, y, row.compose(2, 1)?, col.compose(2, 1)?)?;
        return Bounds::merge_halves(even, odd);
    }
    let half = Affine {
        slope: row.slope / 2,
        offset: row.offset / 2,
    };
    if row.offset.is_multiple_of(2) {
        enum_bounds(x, half, col)
    } else {
        enum_bounds(y, half, col)
    }
}

fn tower_w_bounds(x: &EnumTerm, y: &EnumTerm, n: u64, col: Affine) -> Cert {
    tower_bounds(x, y, n, col, col)
}

/// Rows `0..=n−2` of level `n` are `w_{n−1}, …, w_1`; row `k ≥ n−1` is
/// row `k − (n−1)` of level 1.
fn tower_bounds(x: &EnumTerm, y: &EnumTerm, n: u64, row: Affine, col: Affine) -> Cert {
    if row.slope == 0 {
        let k = row.offset;
        return if k.saturating_add(2) <= n {
            tower_w_bounds(x, y, n - k - 1, col)
        } else {
            interleave_bounds(x, y, Affine::constant(k - (n - 1)), col)
        };
    }
    let from = row.first_at_least(n - 1).expect("row map is increasing");
    let shifted_row = row.compose(1, from)?;
    let base_row = Affine {
        slope: shifted_row.slope,
        offset: shifted_row.offset - (n - 1),
    };
    interleave_bounds(x, y, base_row, col.compose(1, from)?)?.shifted(from)
}

fn builder_bounds(spec: &BuilderSpec, row: Affine, col: Affine) -> Cert {
    match spec {
        BuilderSpec::Zeros | BuilderSpec::Ones => Ok(Bounds::CONSTANT),
        BuilderSpec::Identity => Ok(Bounds {
            pre: affine_eq_settles(row, col),
            period: 1,
        }),
        BuilderSpec::Counterexample => {
            let pre = [
                affine_eq_settles(row, col),
                affine_eq_settles(row, Affine::constant(0)),
                affine_eq_settles(col, Affine::constant(1)),
                1,
            ]
            .into_iter()
            .max()
            .unwrap();
            Ok(Bounds { pre, period: 1 })
        }
        BuilderSpec::DoublyPeriodic(m) => {
            let (r, c) = (m.height() as u64, m.width() as u64);
            Ok(Bounds {
                pre: 0,
                period: r / gcd(r, c) * c,
            })
        }
        BuilderSpec::BinaryNaturals => binary_naturals_bounds(row, col),
        BuilderSpec::Hashrows { .. } => refuse("hashrows has no periodic structure"),
    }
}

/// Bit `c(i)` of `r(i)`.
fn binary_naturals_bounds(row: Affine, col: Affine) -> Cert {
    if col.slope == 0 {
        let d = col.offset;
        if d >= 64 {
            return Ok(Bounds::CONSTANT);
        }
        // bit d of an arithmetic progression repeats every 2^(d+1) steps
        if d + 1 > MAX_CERTIFIED_BITS.trailing_zeros() as u64 {
            return refuse("bit position too high for a certified period");
        }
        return Ok(Bounds {
            pre: 0,
            period: 1 << (d + 1),
        });
    }
    // the row grows linearly, the bit position linearly, so the bit is
    // eventually 0: find i with r(i) < 2^c(i) and slope(r) ≤ 2^c(i)
    for i in 0..=128u64 {
        let (Some(r), Some(c)) = (row.at(i), col.at(i)) else {
            return overflow();
        };
        if c >= 64 || (r < (1u64 << c) && row.slope <= (1u64 << c)) {
            return Ok(Bounds { pre: i, period: 1 });
        }
    }
    refuse("binary expansion does not settle")
}

/// Exact normal form of a sequence in the certified subclass.
pub fn ep_of_term(s: &SeqTerm) -> Result<EventuallyPeriodic, EpError> {
    let b = seq_bounds(s, Affine::IDENTITY)?;
    let total = b.pre.checked_add(b.period);
    match total {
        Some(t) if t <= MAX_CERTIFIED_BITS => {
            let bits = s.prefix(t);
            EventuallyPeriodic::new(&bits[..b.pre as usize], &bits[b.pre as usize..])
        }
        _ => refuse("certificate needs too many bits"),
    }
}

/// Normal form of row `k` of an enumeration.
pub fn ep_of_row(e: &EnumTerm, k: u64) -> Result<EventuallyPeriodic, EpError> {
    ep_of_term(&crate::sdl::row(e, k))
}
