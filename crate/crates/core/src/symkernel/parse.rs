//! Recursive-descent reader for polynomial expressions.
//!
//! Grammar (no implicit multiplication):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | '+' unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := integer | name | '(' expr ')'
//! ```
//!
//! Division and negative powers are accepted only for invertible divisors.

use std::sync::Arc;

use num::BigInt;

use super::expr::Expr;
use super::ring::Ring;
use super::Rational;
use crate::error::{Error, Result};

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Op(char),
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    ring: &'a Arc<Ring>,
}

pub(crate) fn parse_expr(ring: &Arc<Ring>, src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser {
        src,
        toks,
        pos: 0,
        ring,
    };
    if p.toks.is_empty() {
        return Err(p.error(0, "empty expression"));
    }
    let e = p.expr()?;
    if let Some((at, t)) = p.toks.get(p.pos) {
        return Err(p.error(*at, &format!("unexpected token {t:?}")));
    }
    Ok(e)
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = src[start..i].parse().expect("digits");
            out.push((start, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Name(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                input: src.to_string(),
                pos: i,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

impl Parser<'_> {
    fn error(&self, pos: usize, msg: &str) -> Error {
        Error::Parse {
            input: self.src.to_string(),
            pos,
            msg: msg.to_string(),
        }
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src.len(), |t| t.0)
    }

    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some((_, Tok::Op(c))) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            let at = self.here();
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                &acc * &rhs
            } else {
                let inv = rhs
                    .try_inverse()
                    .map_err(|e| self.error(at, &e.to_string()))?;
                &acc * &inv
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        let at = self.here();
        self.pos += 1;
        let negative = if self.peek_op() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let n = match self.toks.get(self.pos) {
            Some((_, Tok::Int(n))) => n.clone(),
            _ => return Err(self.error(self.here(), "expected an integer exponent")),
        };
        self.pos += 1;
        let n: u32 = u32::try_from(&n).map_err(|_| self.error(at, "exponent too large"))?;
        if negative {
            let inv = base
                .try_inverse()
                .map_err(|e| self.error(at, &e.to_string()))?;
            Ok(inv.pow(n))
        } else {
            Ok(base.pow(n))
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.here();
        match self.toks.get(self.pos).cloned() {
            Some((_, Tok::Int(n))) => {
                self.pos += 1;
                Ok(Expr::constant(self.ring, Rational::from_integer(n)))
            }
            Some((_, Tok::Name(name))) => {
                self.pos += 1;
                Expr::var(self.ring, &name).map_err(|e| self.error(at, &e.to_string()))
            }
            Some((_, Tok::Op('('))) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(self.error(self.here(), "expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some((_, t)) => Err(self.error(at, &format!("unexpected token {t:?}"))),
            None => Err(self.error(at, "unexpected end of input")),
        }
    }
}

/// Reads a rational literal such as `-3/4` or `2`.
pub fn parse_rational(src: &str) -> Result<Rational> {
    let s = src.trim();
    let bad = || Error::Parse {
        input: src.to_string(),
        pos: 0,
        msg: "expected a rational literal".into(),
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}
