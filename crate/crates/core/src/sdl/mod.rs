//! The sequence description language: a total expression language whose
//! closed terms denote infinite binary sequences and enumerations of them.

pub mod ast;
pub mod codec;
pub mod eval;
pub mod parse;
pub mod print;

pub use ast::{build, EnumTerm, Expr, FamilyTerm, SeqTerm, Sort, Term, Var, Variant};
pub use codec::{decode_term, encode_term, CodecError, GodelCode};
pub use eval::{eval_enum, eval_seq};
pub use parse::{parse_enum, parse_family, parse_file, parse_seq, ParseError};

/// Row `k` of an enumeration as a sequence term.
pub fn row(e: &EnumTerm, k: u64) -> SeqTerm {
    SeqTerm::combinator(Expr::Row(e.clone(), k))
}
