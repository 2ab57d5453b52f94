//! Recursive-descent parser for the sequence description language.
//!
//! ```text
//! expr    := "if" expr "then" expr "else" expr | sum
//! sum     := product (("+" | "-") product)*
//! product := atom ("*" atom | ("div" | "mod") NUMBER)*
//! atom    := NUMBER | VAR | "(" expr ")" | call | builder
//! call    := ("eq" | "lt" | "bit") "(" expr "," expr ")" | "parity" "(" expr ")"
//!          | "row" "(" enum "," NUMBER ")" | ("diag" | "z") "(" enum ")"
//!          | ("diag_row" | "diag_transversal") "(" enum "," perm ")"
//!          | ("interleave" | "xinf") "(" enum "," enum ")"
//!          | "prepend" "(" seq "," enum ")" | "dovetail" "(" family ")"
//!          | "ys" "(" enum "," ("row" | "transversal") ")"
//!          | "tower" "(" enum "," enum "," NUMBER ")"
//! builder := "zeros" | "ones" | "identity" | "binary_naturals" | "counterexample"
//!          | "hashrows" "(" NUMBER ")" | "doubly_periodic" "(" matrix ")"
//! matrix  := "[" row ("," row)* "]"      row := "[" BIT ("," BIT)* "]"
//! perm    := factor ("*" factor)*
//! factor  := "id" | "t" "(" NUMBER "," NUMBER ")" | "#" NUMBER | "[" (NUMBER ("," NUMBER)*)? "]"
//! ```
//!
//! `seq` terms may use `i`; `enum` terms `k` and `i`; `family` terms `a`,
//! `b` and `i`. Each combinator argument is a closed term of its own sort.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::ast::{EnumTerm, Expr, FamilyTerm, Node, SeqTerm, Sort, Term, Var, Variant};
use crate::enumerations::{BitMatrix, BuilderSpec};
use crate::perm::FiniteSupportPerm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: variable `{name}` is not bound in a {sort} term")]
    UnboundVariable {
        line: usize,
        column: usize,
        name: &'static str,
        sort: &'static str,
    },
    #[error("{line}:{column}: divisor must be positive")]
    ZeroDivisor { line: usize, column: usize },
    #[error("{line}:{column}: `{name}` denotes an enumeration and needs row scope")]
    MisplacedEnum {
        line: usize,
        column: usize,
        name: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(BigUint),
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Plus,
    Minus,
    Star,
    Hash,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let mut digits = String::new();
            while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                digits.push(bump(&mut chars));
            }
            Tok::Num(digits.parse().unwrap())
        } else if c.is_ascii_lowercase() || c == '_' {
            let mut id = String::new();
            while chars
                .peek()
                .is_some_and(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || *c == '_')
            {
                id.push(bump(&mut chars));
            }
            Tok::Ident(id)
        } else {
            bump(&mut chars);
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '#' => Tok::Hash,
                other => {
                    return Err(ParseError::Syntax {
                        line: l,
                        column: col,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            }
        };
        out.push(Spanned {
            tok,
            line: l,
            column: col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        let (line, column) = self.here();
        Err(ParseError::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> PResult<()> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(id) if id == kw)
    }

    fn number(&mut self) -> PResult<BigUint> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.next();
                Ok(n)
            }
            _ => self.err("expected a number"),
        }
    }

    fn small(&mut self) -> PResult<u64> {
        let n = self.number()?;
        match n.to_u64() {
            Some(v) => Ok(v),
            None => {
                self.pos -= 1;
                self.err("number does not fit in 64 bits")
            }
        }
    }

    fn expr(&mut self, sort: Sort) -> PResult<Expr> {
        if self.is_keyword("if") {
            self.next();
            let c = self.expr(sort)?;
            if !self.is_keyword("then") {
                return self.err("expected `then`");
            }
            self.next();
            let t = self.expr(sort)?;
            if !self.is_keyword("else") {
                return self.err("expected `else`");
            }
            self.next();
            let e = self.expr(sort)?;
            return Ok(Expr::If(Arc::new(c), Arc::new(t), Arc::new(e)));
        }
        self.sum(sort)
    }

    fn sum(&mut self, sort: Sort) -> PResult<Expr> {
        let mut lhs = self.product(sort)?;
        loop {
            let ctor: fn(Node, Node) -> Expr = match self.peek() {
                Tok::Plus => Expr::Add,
                Tok::Minus => Expr::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.product(sort)?;
            lhs = ctor(Arc::new(lhs), Arc::new(rhs));
        }
    }

    fn product(&mut self, sort: Sort) -> PResult<Expr> {
        let mut lhs = self.atom(sort)?;
        loop {
            if *self.peek() == Tok::Star {
                self.next();
                let rhs = self.atom(sort)?;
                lhs = Expr::Mul(Arc::new(lhs), Arc::new(rhs));
            } else if self.is_keyword("div") || self.is_keyword("mod") {
                let is_div = self.is_keyword("div");
                self.next();
                let (line, column) = self.here();
                if !matches!(self.peek(), Tok::Num(_)) {
                    return self.err("divisor must be a positive integer literal");
                }
                let d = self.number()?;
                if d.is_zero() {
                    return Err(ParseError::ZeroDivisor { line, column });
                }
                lhs = if is_div {
                    Expr::Div(Arc::new(lhs), d)
                } else {
                    Expr::Mod(Arc::new(lhs), d)
                };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn args2(&mut self, sort: Sort) -> PResult<(Expr, Expr)> {
        self.expect(Tok::LParen, "`(`")?;
        let x = self.expr(sort)?;
        self.expect(Tok::Comma, "`,`")?;
        let y = self.expr(sort)?;
        self.expect(Tok::RParen, "`)`")?;
        Ok((x, y))
    }

    fn seq_arg(&mut self) -> PResult<SeqTerm> {
        let e = self.expr(Sort::Seq)?;
        Ok(SeqTerm::new(e).expect("parser enforces scope"))
    }

    fn enum_arg(&mut self) -> PResult<EnumTerm> {
        let e = self.expr(Sort::Enum)?;
        Ok(EnumTerm::new(e).expect("parser enforces scope"))
    }

    fn family_arg(&mut self) -> PResult<FamilyTerm> {
        let e = self.expr(Sort::Family)?;
        Ok(FamilyTerm::new(e).expect("parser enforces scope"))
    }

    fn perm(&mut self) -> PResult<FiniteSupportPerm> {
        let mut acc = FiniteSupportPerm::identity();
        loop {
            let factor = match self.peek().clone() {
                Tok::Ident(id) if id == "id" => {
                    self.next();
                    FiniteSupportPerm::identity()
                }
                Tok::Ident(id) if id == "t" => {
                    self.next();
                    self.expect(Tok::LParen, "`(`")?;
                    let a = self.small()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let b = self.small()?;
                    self.expect(Tok::RParen, "`)`")?;
                    match FiniteSupportPerm::transposition(a, b) {
                        Ok(p) => p,
                        Err(e) => return self.err(e.to_string()),
                    }
                }
                Tok::Hash => {
                    self.next();
                    FiniteSupportPerm::unrank(self.small()?)
                }
                Tok::LBracket => {
                    self.next();
                    let mut table = Vec::new();
                    if *self.peek() != Tok::RBracket {
                        table.push(self.small()?);
                        while *self.peek() == Tok::Comma {
                            self.next();
                            table.push(self.small()?);
                        }
                    }
                    self.expect(Tok::RBracket, "`]`")?;
                    match FiniteSupportPerm::from_table(table) {
                        Ok(p) => p,
                        Err(e) => return self.err(e.to_string()),
                    }
                }
                _ => return self.err("expected a permutation"),
            };
            acc = acc.compose(&factor);
            if *self.peek() != Tok::Star {
                return Ok(acc);
            }
            self.next();
        }
    }

    fn matrix(&mut self) -> PResult<BitMatrix> {
        self.expect(Tok::LBracket, "`[`")?;
        let mut rows = Vec::new();
        loop {
            self.expect(Tok::LBracket, "`[`")?;
            let mut row = Vec::new();
            loop {
                let b = self.small()?;
                if b > 1 {
                    self.pos -= 1;
                    return self.err("matrix entries must be 0 or 1");
                }
                row.push(b as u8);
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.next();
            }
            self.expect(Tok::RBracket, "`]`")?;
            rows.push(row);
            if *self.peek() != Tok::Comma {
                break;
            }
            self.next();
        }
        self.expect(Tok::RBracket, "`]`")?;
        match BitMatrix::new(rows) {
            Ok(m) => Ok(m),
            Err(e) => self.err(e.to_string()),
        }
    }

    fn atom(&mut self, sort: Sort) -> PResult<Expr> {
        let (line, column) = self.here();
        match self.next() {
            Tok::Num(n) => Ok(Expr::Num(n)),
            Tok::LParen => {
                let e = self.expr(sort)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(id) => self.named(sort, &id, line, column),
            Tok::Eof => {
                self.pos = self.toks.len() - 1;
                self.err("unexpected end of input")
            }
            _ => {
                self.pos -= 1;
                self.err("expected an expression")
            }
        }
    }

    fn named(&mut self, sort: Sort, id: &str, line: usize, column: usize) -> PResult<Expr> {
        let var = match id {
            "i" => Some(Var::I),
            "k" => Some(Var::K),
            "a" => Some(Var::A),
            "b" => Some(Var::B),
            _ => None,
        };
        if let Some(v) = var {
            if !sort.allows(v) {
                return Err(ParseError::UnboundVariable {
                    line,
                    column,
                    name: v.name(),
                    sort: sort.name(),
                });
            }
            return Ok(Expr::Var(v));
        }
        let enum_only = matches!(
            id,
            "zeros"
                | "ones"
                | "identity"
                | "binary_naturals"
                | "counterexample"
                | "hashrows"
                | "doubly_periodic"
                | "interleave"
                | "prepend"
                | "dovetail"
                | "ys"
                | "tower"
                | "xinf"
        );
        if enum_only && sort != Sort::Enum {
            return Err(ParseError::MisplacedEnum {
                line,
                column,
                name: id.to_string(),
            });
        }
        let wrap = |x: Expr| Arc::new(x);
        let expr = match id {
            "eq" => {
                let (x, y) = self.args2(sort)?;
                Expr::Eq(wrap(x), wrap(y))
            }
            "lt" => {
                let (x, y) = self.args2(sort)?;
                Expr::Lt(wrap(x), wrap(y))
            }
            "bit" => {
                let (x, y) = self.args2(sort)?;
                Expr::Bit(wrap(x), wrap(y))
            }
            "parity" => {
                self.expect(Tok::LParen, "`(`")?;
                let x = self.expr(sort)?;
                self.expect(Tok::RParen, "`)`")?;
                Expr::Parity(wrap(x))
            }
            "row" => {
                self.expect(Tok::LParen, "`(`")?;
                let e = self.enum_arg()?;
                self.expect(Tok::Comma, "`,`")?;
                let k = self.small()?;
                self.expect(Tok::RParen, "`)`")?;
                Expr::Row(e, k)
            }
            "diag" | "z" => {
                self.expect(Tok::LParen, "`(`")?;
                let e = self.enum_arg()?;
                self.expect(Tok::RParen, "`)`")?;
                if id == "diag" {
                    Expr::Diag(e)
                } else {
                    Expr::ReverseDiag(e)
                }
            }
            "diag_row" | "diag_transversal" => {
                self.expect(Tok::LParen, "`(`")?;
                let e = self.enum_arg()?;
                self.expect(Tok::Comma, "`,`")?;
                let p = self.perm()?;
                self.expect(Tok::RParen, "`)`")?;
                if id == "diag_row" {
                    Expr::DiagRow(e, p)
                } else {
                    Expr::DiagTransversal(e, p)
                }
            }
            "zeros" => Expr::Builder(BuilderSpec::Zeros),
            "ones" => Expr::Builder(BuilderSpec::Ones),
            "identity" => Expr::Builder(BuilderSpec::Identity),
            "binary_naturals" => Expr::Builder(BuilderSpec::BinaryNaturals),
            "counterexample" => Expr::Builder(BuilderSpec::Counterexample),
            "hashrows" => {
                self.expect(Tok::LParen, "`(`")?;
                let salt = self.small()?;
                self.expect(Tok::RParen, "`)`")?;
                Expr::Builder(BuilderSpec::Hashrows { salt })
            }
            "doubly_periodic" => {
                self.expect(Tok::LParen, "`(`")?;
                let m = self.matrix()?;
                self.expect(Tok::RParen, "`)`")?;
                Expr::Builder(BuilderSpec::DoublyPeriodic(m))
            }
            "interleave" | "xinf" => {
                self.expect(Tok::LParen, "`(`")?;
                let x = self.enum_arg()?;
                self.expect(Tok::Comma, "`,`")?;
                let y = self.enum_arg()?;
                self.expect(Tok::RParen, "`)`")?;
                if id == "interleave" {
                    Expr::Interleave(x, y)
                } else {
                    Expr::XInfinity(x, y)
                }
            }
            "prepend" => {
                self.expect(Tok::LParen, "`(`")?;
                let s = self.seq_arg()?;
                self.expect(Tok::Comma, "`,`")?;
                let e = self.enum_arg()?;
                self.expect(Tok::RParen, "`)`")?;
                Expr::Prepend(s, e)
            }
            "dovetail" => {
                self.expect(Tok::LParen, "`(`")?;
                let f = self.family_arg()?;
                self.expect(Tok::RParen, "`)`")?;
                Expr::Dovetail(f)
            }
            "ys" => {
                self.expect(Tok::LParen, "`(`")?;
                let e = self.enum_arg()?;
                self.expect(Tok::Comma, "`,`")?;
                let variant = match self.peek() {
                    Tok::Ident(v) if v == "row" => Variant::Row,
                    Tok::Ident(v) if v == "transversal" => Variant::Transversal,
                    _ => return self.err("expected `row` or `transversal`"),
                };
                self.next();
                self.expect(Tok::RParen, "`)`")?;
                Expr::Ys(e, variant)
            }
            "tower" => {
                self.expect(Tok::LParen, "`(`")?;
                let x = self.enum_arg()?;
                self.expect(Tok::Comma, "`,`")?;
                let y = self.enum_arg()?;
                self.expect(Tok::Comma, "`,`")?;
                let n = self.small()?;
                if n == 0 {
                    self.pos -= 1;
                    return self.err("tower level must be at least 1");
                }
                self.expect(Tok::RParen, "`)`")?;
                Expr::Tower(x, y, n)
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    column,
                    message: format!("unknown name `{other}`"),
                })
            }
        };
        Ok(expr)
    }
}

fn parse_sort(text: &str, sort: Sort) -> PResult<Expr> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr(sort)?;
    if *p.peek() != Tok::Eof {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Parses a sequence term (free in `i` only).
pub fn parse_seq(text: &str) -> Result<SeqTerm, ParseError> {
    Ok(SeqTerm::new(parse_sort(text, Sort::Seq)?).expect("parser enforces scope"))
}

/// Parses an enumeration term (free in `k` and `i`).
pub fn parse_enum(text: &str) -> Result<EnumTerm, ParseError> {
    Ok(EnumTerm::new(parse_sort(text, Sort::Enum)?).expect("parser enforces scope"))
}

/// Parses a family term (free in `a`, `b` and `i`).
pub fn parse_family(text: &str) -> Result<FamilyTerm, ParseError> {
    Ok(FamilyTerm::new(parse_sort(text, Sort::Family)?).expect("parser enforces scope"))
}

/// Parses an SDL file: a `seq:` or `enum:` header line, then the expression.
pub fn parse_file(text: &str) -> Result<Term, ParseError> {
    let mut skipped = 0;
    for line in text.lines() {
        let trimmed = line.trim();
        skipped += 1;
        if trimmed.is_empty() {
            continue;
        }
        let (header, rest) = match trimmed.split_once(':') {
            Some((h, r)) => (h.trim(), r),
            None => (trimmed, ""),
        };
        let body: String = std::iter::once(rest)
            .chain(text.lines().skip(skipped))
            .collect::<Vec<_>>()
            .join("\n");
        let shift = |e: ParseError| shift_lines(e, skipped - 1);
        return match header {
            "seq" => parse_seq(&body).map(Term::Seq).map_err(shift),
            "enum" => parse_enum(&body).map(Term::Enum).map_err(shift),
            _ => Err(ParseError::Syntax {
                line: skipped,
                column: 1,
                message: "expected a `seq:` or `enum:` header".into(),
            }),
        };
    }
    Err(ParseError::Syntax {
        line: 1,
        column: 1,
        message: "empty file".into(),
    })
}

fn shift_lines(e: ParseError, by: usize) -> ParseError {
    match e {
        ParseError::Syntax {
            line,
            column,
            message,
        } => ParseError::Syntax {
            line: line + by,
            column,
            message,
        },
        ParseError::UnboundVariable {
            line,
            column,
            name,
            sort,
        } => ParseError::UnboundVariable {
            line: line + by,
            column,
            name,
            sort,
        },
        ParseError::ZeroDivisor { line, column } => ParseError::ZeroDivisor {
            line: line + by,
            column,
        },
        ParseError::MisplacedEnum { line, column, name } => ParseError::MisplacedEnum {
            line: line + by,
            column,
            name,
        },
    }
}
