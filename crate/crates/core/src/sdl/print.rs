//! Canonical printing. `parse(print(t)) == t` for every term: parentheses
//! appear only where precedence or associativity requires them.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::{EnumTerm, Expr, FamilyTerm, SeqTerm, Term};

const IF: u8 = 0;
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const ATOM: u8 = 3;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::If(..) => IF,
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) | Expr::Mod(..) => PRODUCT,
        _ => ATOM,
    }
}

fn write_at(f: &mut Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        f.write_char('(')?;
        write_expr(f, e)?;
        f.write_char(')')
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut Formatter<'_>, e: &Expr) -> fmt::Result {
    use Expr::*;
    match e {
        Num(n) => write!(f, "{n}"),
        Var(v) => f.write_str(v.name()),
        Add(x, y) | Sub(x, y) => {
            write_at(f, x, SUM)?;
            f.write_str(if matches!(e, Add(..)) { " + " } else { " - " })?;
            write_at(f, y, PRODUCT)
        }
        Mul(x, y) => {
            write_at(f, x, PRODUCT)?;
            f.write_str(" * ")?;
            write_at(f, y, ATOM)
        }
        Div(x, d) => {
            write_at(f, x, PRODUCT)?;
            write!(f, " div {d}")
        }
        Mod(x, d) => {
            write_at(f, x, PRODUCT)?;
            write!(f, " mod {d}")
        }
        Eq(x, y) => write!(f, "eq({}, {})", Show(x), Show(y)),
        Lt(x, y) => write!(f, "lt({}, {})", Show(x), Show(y)),
        Bit(x, y) => write!(f, "bit({}, {})", Show(x), Show(y)),
        Parity(x) => write!(f, "parity({})", Show(x)),
        If(c, t, el) => write!(f, "if {} then {} else {}", Show(c), Show(t), Show(el)),
        Row(en, k) => write!(f, "row({en}, {k})"),
        Diag(en) => write!(f, "diag({en})"),
        DiagRow(en, p) => write!(f, "diag_row({en}, {p})"),
        DiagTransversal(en, p) => write!(f, "diag_transversal({en}, {p})"),
        ReverseDiag(en) => write!(f, "z({en})"),
        Builder(spec) => write!(f, "{spec}"),
        Interleave(x, y) => write!(f, "interleave({x}, {y})"),
        Prepend(s, en) => write!(f, "prepend({s}, {en})"),
        Dovetail(fam) => write!(f, "dovetail({fam})"),
        Ys(en, v) => write!(f, "ys({en}, {})", v.name()),
        Tower(x, y, n) => write!(f, "tower({x}, {y}, {n})"),
        XInfinity(x, y) => write!(f, "xinf({x}, {y})"),
    }
}

struct Show<'a>(&'a Expr);

impl Display for Show<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(f, self.0)
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

impl Display for SeqTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr())
    }
}

impl Display for EnumTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr())
    }
}

impl Display for FamilyTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr())
    }
}

impl Term {
    /// The file form read back by [`parse_file`](super::parse::parse_file).
    pub fn to_file_text(&self) -> String {
        match self {
            Term::Seq(s) => format!("seq:\n{s}\n"),
            Term::Enum(e) => format!("enum:\n{e}\n"),
        }
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr())
    }
}
