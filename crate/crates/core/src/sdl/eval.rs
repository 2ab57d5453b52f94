//! Evaluation. Every term is total: arithmetic is over ℕ and combinators
//! recurse only into strictly smaller subterms or strictly lower tower
//! levels.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::ast::{EnumTerm, Expr, FamilyTerm, SeqTerm, Var, Variant};
use crate::enumerations::unpair;
use crate::perm::FiniteSupportPerm;

/// Natural number with a machine-word fast path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nat {
    Small(u64),
    Big(BigUint),
}

impl Nat {
    fn big(&self) -> BigUint {
        match self {
            Nat::Small(v) => BigUint::from(*v),
            Nat::Big(b) => b.clone(),
        }
    }

    fn norm(b: BigUint) -> Nat {
        match b.to_u64() {
            Some(v) => Nat::Small(v),
            None => Nat::Big(b),
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        self.big()
    }

    pub fn parity(&self) -> u8 {
        match self {
            Nat::Small(v) => (v & 1) as u8,
            Nat::Big(b) => u8::from(b.bit(0)),
        }
    }

    fn add(self, o: Nat) -> Nat {
        if let (Nat::Small(x), Nat::Small(y)) = (&self, &o) {
            if let Some(v) = x.checked_add(*y) {
                return Nat::Small(v);
            }
        }
        Nat::norm(self.big() + o.big())
    }

    fn sub(self, o: Nat) -> Nat {
        match (&self, &o) {
            (Nat::Small(x), Nat::Small(y)) => Nat::Small(x.saturating_sub(*y)),
            _ => {
                let (x, y) = (self.big(), o.big());
                if x <= y {
                    Nat::Small(0)
                } else {
                    Nat::norm(x - y)
                }
            }
        }
    }

    fn mul(self, o: Nat) -> Nat {
        if let (Nat::Small(x), Nat::Small(y)) = (&self, &o) {
            if let Some(v) = x.checked_mul(*y) {
                return Nat::Small(v);
            }
        }
        Nat::norm(self.big() * o.big())
    }

    fn div(self, d: &BigUint) -> Nat {
        match (&self, d.to_u64()) {
            (Nat::Small(x), Some(d)) => Nat::Small(x / d),
            _ => Nat::norm(self.big() / d),
        }
    }

    fn rem(self, d: &BigUint) -> Nat {
        match (&self, d.to_u64()) {
            (Nat::Small(x), Some(d)) => Nat::Small(x % d),
            _ => Nat::norm(self.big() % d),
        }
    }

    fn lt(&self, o: &Nat) -> bool {
        match (self, o) {
            (Nat::Small(x), Nat::Small(y)) => x < y,
            _ => self.big() < o.big(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Nat::Small(v) => *v == 0,
            Nat::Big(b) => b.is_zero(),
        }
    }

    fn bit(&self, j: &Nat) -> u8 {
        let j = match j {
            Nat::Small(j) => *j,
            // no representable number has that many digits
            Nat::Big(_) => return 0,
        };
        match self {
            Nat::Small(v) => {
                if j >= 64 {
                    0
                } else {
                    ((v >> j) & 1) as u8
                }
            }
            Nat::Big(b) => u8::from(b.bit(j)),
        }
    }
}

/// Variable bindings for one evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Env {
    pub i: u64,
    pub k: u64,
    pub a: u64,
    pub b: u64,
}

impl Env {
    fn get(&self, v: Var) -> u64 {
        match v {
            Var::I => self.i,
            Var::K => self.k,
            Var::A => self.a,
            Var::B => self.b,
        }
    }
}

fn flag(b: bool) -> Nat {
    Nat::Small(u64::from(b))
}

/// Evaluates an expression to a natural number under `env`.
pub fn eval_expr(expr: &Expr, env: &Env) -> Nat {
    use Expr::*;
    match expr {
        Num(n) => Nat::norm(n.clone()),
        Var(v) => Nat::Small(env.get(*v)),
        Add(x, y) => eval_expr(x, env).add(eval_expr(y, env)),
        Sub(x, y) => eval_expr(x, env).sub(eval_expr(y, env)),
        Mul(x, y) => eval_expr(x, env).mul(eval_expr(y, env)),
        Div(x, d) => eval_expr(x, env).div(d),
        Mod(x, d) => eval_expr(x, env).rem(d),
        Eq(x, y) => flag(eval_expr(x, env) == eval_expr(y, env)),
        Lt(x, y) => flag(eval_expr(x, env).lt(&eval_expr(y, env))),
        If(c, t, e) => {
            if eval_expr(c, env).is_zero() {
                eval_expr(e, env)
            } else {
                eval_expr(t, env)
            }
        }
        Bit(n, j) => Nat::Small(eval_expr(n, env).bit(&eval_expr(j, env)).into()),
        Parity(x) => Nat::Small(eval_expr(x, env).parity().into()),
        _ => Nat::Small(combinator_bit(expr, env).into()),
    }
}

fn combinator_bit(expr: &Expr, env: &Env) -> u8 {
    use Expr::*;
    let (i, k) = (env.i, env.k);
    match expr {
        Row(e, r) => e.bit(*r, i),
        Diag(e) => 1 - e.bit(i, i),
        DiagRow(e, p) => diag_row_bit(e, p, i),
        DiagTransversal(e, p) => diag_transversal_bit(e, p, i),
        ReverseDiag(e) => e.bit(i, FiniteSupportPerm::unrank(i).apply(i)),
        Builder(spec) => spec.bit(k, i),
        Interleave(x, y) => interleave_bit(x, y, k, i),
        Prepend(s, e) => match k {
            0 => s.bit(i),
            _ => e.bit(k - 1, i),
        },
        Dovetail(f) => {
            let (a, b) = unpair(k);
            f.bit(a, b, i)
        }
        Ys(e, variant) => {
            let p = FiniteSupportPerm::unrank(k);
            match variant {
                Variant::Row => diag_row_bit(e, &p, i),
                Variant::Transversal => diag_transversal_bit(e, &p, i),
            }
        }
        Tower(x, y, n) => tower_row_bit(x, y, *n, k, i),
        XInfinity(x, y) => {
            if k % 2 == 0 {
                tower_w_bit(x, y, k / 2 + 1, i)
            } else {
                interleave_bit(x, y, k / 2, i)
            }
        }
        _ => unreachable!("arithmetic node handled by eval_expr"),
    }
}

fn diag_row_bit(e: &EnumTerm, p: &FiniteSupportPerm, i: u64) -> u8 {
    1 - e.bit(i, p.apply(i))
}

fn diag_transversal_bit(e: &EnumTerm, p: &FiniteSupportPerm, j: u64) -> u8 {
    1 - e.bit(p.apply_inverse(j), j)
}

fn interleave_bit(x: &EnumTerm, y: &EnumTerm, k: u64, i: u64) -> u8 {
    if k.is_multiple_of(2) {
        x.bit(k / 2, i)
    } else {
        y.bit(k / 2, i)
    }
}

/// Row `k` of tower level `n`: rows `0..=n−2` are `w_{n−1}, …, w_1`, then
/// the rows of level 1 follow.
fn tower_row_bit(x: &EnumTerm, y: &EnumTerm, n: u64, k: u64, i: u64) -> u8 {
    match k.checked_add(2) {
        Some(k2) if k2 <= n => tower_w_bit(x, y, n - k - 1, i),
        _ => interleave_bit(x, y, k - (n - 1), i),
    }
}

/// `w_n(i) = 1 − x_n(i, i)`, unfolded iteratively: each step either lands
/// on a row of level 1 or on a strictly lower `w`, flipping once per step.
fn tower_w_bit(x: &EnumTerm, y: &EnumTerm, n: u64, i: u64) -> u8 {
    let mut level = n;
    let mut flips = 0u8;
    loop {
        flips ^= 1;
        match i.checked_add(2) {
            Some(i2) if i2 <= level => level -= i + 1,
            _ => return flips ^ interleave_bit(x, y, i - (level - 1), i),
        }
    }
}

impl SeqTerm {
    /// The bit at position `i`; the body is reduced through parity.
    pub fn bit(&self, i: u64) -> u8 {
        eval_expr(
            self.expr(),
            &Env {
                i,
                ..Env::default()
            },
        )
        .parity()
    }

    pub fn prefix(&self, len: u64) -> Vec<u8> {
        (0..len).map(|i| self.bit(i)).collect()
    }
}

impl EnumTerm {
    /// Matrix access `a[k][i]`.
    pub fn bit(&self, k: u64, i: u64) -> u8 {
        eval_expr(
            self.expr(),
            &Env {
                i,
                k,
                ..Env::default()
            },
        )
        .parity()
    }

    pub fn row_prefix(&self, k: u64, len: u64) -> Vec<u8> {
        (0..len).map(|i| self.bit(k, i)).collect()
    }
}

impl FamilyTerm {
    pub fn bit(&self, a: u64, b: u64, i: u64) -> u8 {
        eval_expr(self.expr(), &Env { i, a, b, k: 0 }).parity()
    }
}

pub fn eval_seq(t: &SeqTerm, i: u64) -> u8 {
    t.bit(i)
}

pub fn eval_enum(e: &EnumTerm, k: u64, i: u64) -> u8 {
    e.bit(k, i)
}
