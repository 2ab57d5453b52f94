//! Executable diagonal constructions over countable enumerations of
//! infinite binary sequences.
//!
//! Sequences and enumerations are closed terms of a small total language
//! ([`sdl`]). The [`engine`] builds classical and permuted diagonals, the
//! `Y` family, the reverse diagonal `z`, the diagonal tower and its limit.
//! [`analysis`] turns "differs from every row" into checkable witnesses and
//! decides equality on eventually periodic sequences.

pub mod analysis;
pub mod corpus;
pub mod engine;
pub mod enumerations;
pub mod perm;
pub mod sdl;

pub use enumerations::{build_enumeration, pair, unpair, BitMatrix, BuilderSpec};
pub use perm::FiniteSupportPerm;
pub use sdl::{EnumTerm, SeqTerm, Term};
