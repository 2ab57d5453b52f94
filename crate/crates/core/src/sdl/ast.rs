use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use crate::enumerations::BuilderSpec;
use crate::perm::FiniteSupportPerm;

/// Free variables of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// column (position inside a sequence)
    I,
    /// row of an enumeration
    K,
    /// first family parameter
    A,
    /// second family parameter
    B,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::I => "i",
            Var::K => "k",
            Var::A => "a",
            Var::B => "b",
        }
    }
}

/// What a closed term denotes, determined by which variables it may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    /// one infinite binary sequence, free in `i`
    Seq,
    /// a matrix `a[k][i]`, free in `k` and `i`
    Enum,
    /// a two-parameter family of sequences, free in `a`, `b` and `i`
    Family,
}

impl Sort {
    pub fn allows(self, var: Var) -> bool {
        match self {
            Sort::Seq => var == Var::I,
            Sort::Enum => matches!(var, Var::I | Var::K),
            Sort::Family => matches!(var, Var::I | Var::A | Var::B),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sort::Seq => "seq",
            Sort::Enum => "enum",
            Sort::Family => "family",
        }
    }
}

/// Which permuted diagonal a `Y` family is made of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `b_i = 1 − a(i, π(i))`
    Row,
    /// `b_{π(i)} = 1 − a(i, π(i))`
    Transversal,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Row => "row",
            Variant::Transversal => "transversal",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "row" => Ok(Variant::Row),
            "transversal" => Ok(Variant::Transversal),
            other => Err(format!(
                "unknown variant {other:?} (expected row or transversal)"
            )),
        }
    }
}

pub type Node = Arc<Expr>;

/// Abstract syntax shared by every sort.
///
/// Arithmetic nodes work over ℕ with truncated subtraction. Combinator
/// nodes carry typed, closed subterms and always produce a bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(BigUint),
    Var(Var),
    Add(Node, Node),
    Sub(Node, Node),
    Mul(Node, Node),
    /// divisor is a positive literal
    Div(Node, BigUint),
    /// divisor is a positive literal
    Mod(Node, BigUint),
    Eq(Node, Node),
    Lt(Node, Node),
    If(Node, Node, Node),
    /// `bit(n, j)`: the j-th binary digit of n
    Bit(Node, Node),
    Parity(Node),

    // sequence combinators, usable in every sort
    Row(EnumTerm, u64),
    Diag(EnumTerm),
    DiagRow(EnumTerm, FiniteSupportPerm),
    DiagTransversal(EnumTerm, FiniteSupportPerm),
    ReverseDiag(EnumTerm),

    // enumeration combinators, usable where `k` is in scope
    Builder(BuilderSpec),
    Interleave(EnumTerm, EnumTerm),
    Prepend(SeqTerm, EnumTerm),
    Dovetail(FamilyTerm),
    Ys(EnumTerm, Variant),
    /// level `n ≥ 1` of the diagonal tower over `(x, y)`
    Tower(EnumTerm, EnumTerm, u64),
    XInfinity(EnumTerm, EnumTerm),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScopeError {
    #[error("variable `{}` is not bound in a {} term", .var.name(), .sort.name())]
    UnboundVariable { var: Var, sort: Sort },
    #[error("enumeration combinator used inside a {} term", .0.name())]
    MisplacedEnum(Sort),
    #[error("divisor must be a positive literal")]
    ZeroDivisor,
    #[error("tower level must be at least 1")]
    ZeroLevel,
}

impl Expr {
    /// Checks that the expression is a well-formed body of the given sort.
    /// Combinator children are already checked by their typed wrappers.
    pub fn check(&self, sort: Sort) -> Result<(), ScopeError> {
        use Expr::*;
        match self {
            Num(_) => Ok(()),
            Var(v) => {
                if sort.allows(*v) {
                    Ok(())
                } else {
                    Err(ScopeError::UnboundVariable { var: *v, sort })
                }
            }
            Add(x, y) | Sub(x, y) | Mul(x, y) | Eq(x, y) | Lt(x, y) | Bit(x, y) => {
                x.check(sort)?;
                y.check(sort)
            }
            Div(x, d) | Mod(x, d) => {
                if d.bits() == 0 {
                    return Err(ScopeError::ZeroDivisor);
                }
                x.check(sort)
            }
            If(c, t, e) => {
                c.check(sort)?;
                t.check(sort)?;
                e.check(sort)
            }
            Parity(x) => x.check(sort),
            Row(..) | Diag(_) | DiagRow(..) | DiagTransversal(..) | ReverseDiag(_) => Ok(()),
            Tower(_, _, 0) => Err(ScopeError::ZeroLevel),
            Builder(_) | Interleave(..) | Prepend(..) | Dovetail(_) | Ys(..) | Tower(..)
            | XInfinity(..) => {
                if sort == Sort::Enum {
                    Ok(())
                } else {
                    Err(ScopeError::MisplacedEnum(sort))
                }
            }
        }
    }

    /// True when no variable occurs outside combinator subterms.
    pub fn is_variable_free(&self) -> bool {
        use Expr::*;
        match self {
            Var(_) => false,
            Num(_) => true,
            Add(x, y) | Sub(x, y) | Mul(x, y) | Eq(x, y) | Lt(x, y) | Bit(x, y) => {
                x.is_variable_free() && y.is_variable_free()
            }
            Div(x, _) | Mod(x, _) | Parity(x) => x.is_variable_free(),
            If(c, t, e) => c.is_variable_free() && t.is_variable_free() && e.is_variable_free(),
            _ => true,
        }
    }
}

macro_rules! typed_term {
    ($name:ident, $sort:expr, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq, Eq, Hash)]
        pub struct $name(Node);

        impl $name {
            pub const SORT: Sort = $sort;

            pub fn new(expr: Expr) -> Result<Self, ScopeError> {
                Self::from_node(Arc::new(expr))
            }

            pub fn from_node(node: Node) -> Result<Self, ScopeError> {
                node.check(Self::SORT)?;
                Ok(Self(node))
            }

            pub fn expr(&self) -> &Expr {
                &self.0
            }

            pub fn node(&self) -> &Node {
                &self.0
            }
        }
    };
}

typed_term!(
    SeqTerm,
    Sort::Seq,
    "A closed term denoting one infinite binary sequence."
);
typed_term!(
    EnumTerm,
    Sort::Enum,
    "A closed term denoting an enumeration `a[k][i]` of sequences."
);
typed_term!(
    FamilyTerm,
    Sort::Family,
    "A closed term denoting a family `(a, b, i) ↦ bit`."
);

impl SeqTerm {
    /// Wraps a combinator that is well-formed in every sort.
    pub(crate) fn combinator(expr: Expr) -> Self {
        Self::new(expr).expect("sequence combinators are closed")
    }
}

impl EnumTerm {
    pub(crate) fn combinator(expr: Expr) -> Self {
        Self::new(expr).expect("enumeration combinators are closed")
    }
}

/// A top-level term of either sequence or enumeration sort.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Seq(SeqTerm),
    Enum(EnumTerm),
}

impl Term {
    pub fn sort(&self) -> Sort {
        match self {
            Term::Seq(_) => Sort::Seq,
            Term::Enum(_) => Sort::Enum,
        }
    }

    pub fn expr(&self) -> &Expr {
        match self {
            Term::Seq(s) => s.expr(),
            Term::Enum(e) => e.expr(),
        }
    }
}

impl From<SeqTerm> for Term {
    fn from(s: SeqTerm) -> Self {
        Term::Seq(s)
    }
}

impl From<EnumTerm> for Term {
    fn from(e: EnumTerm) -> Self {
        Term::Enum(e)
    }
}

/// Short constructors for building arithmetic bodies in code.
pub mod build {
    use super::*;

    pub fn num(n: u64) -> Expr {
        Expr::Num(BigUint::from(n))
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn add(x: Expr, y: Expr) -> Expr {
        Expr::Add(Arc::new(x), Arc::new(y))
    }

    pub fn sub(x: Expr, y: Expr) -> Expr {
        Expr::Sub(Arc::new(x), Arc::new(y))
    }

    pub fn mul(x: Expr, y: Expr) -> Expr {
        Expr::Mul(Arc::new(x), Arc::new(y))
    }

    pub fn div(x: Expr, d: u64) -> Expr {
        Expr::Div(Arc::new(x), BigUint::from(d))
    }

    pub fn modulo(x: Expr, d: u64) -> Expr {
        Expr::Mod(Arc::new(x), BigUint::from(d))
    }

    pub fn eq(x: Expr, y: Expr) -> Expr {
        Expr::Eq(Arc::new(x), Arc::new(y))
    }

    pub fn lt(x: Expr, y: Expr) -> Expr {
        Expr::Lt(Arc::new(x), Arc::new(y))
    }

    pub fn ite(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::If(Arc::new(c), Arc::new(t), Arc::new(e))
    }

    pub fn bit(n: Expr, j: Expr) -> Expr {
        Expr::Bit(Arc::new(n), Arc::new(j))
    }

    pub fn parity(x: Expr) -> Expr {
        Expr::Parity(Arc::new(x))
    }
}
