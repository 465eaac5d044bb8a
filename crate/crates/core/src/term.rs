//! Terms over the relation algebra operations: parsing, printing and
//! evaluation in abstract algebras and in proper structures.
//!
//! Surface syntax: constants `0`, `1`, `1'`; identifiers; prefix `-`;
//! postfix `~` (converse); infix `;`, `.` and `+` in decreasing precedence,
//! all left-associative; parentheses.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{AtomSet, AtomStructure};
use crate::relation::{ProperStructure, Relation, RelationError};
use crate::signature::{Signature, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown token `{token}` at position {pos}")]
    UnknownToken { pos: usize, token: String },
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("name `{0}` is bound to an element outside the algebra")]
    ForeignElement(String),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// Name bindings for evaluation.
pub type Env<T> = BTreeMap<String, T>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    Identity,
    Name(String),
    Neg(Box<Term>),
    Conv(Box<Term>),
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Comp(Box<Term>, Box<Term>),
}

impl Term {
    pub fn name(n: impl Into<String>) -> Term {
        Term::Name(n.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(t: Term) -> Term {
        Term::Neg(Box::new(t))
    }

    pub fn conv(t: Term) -> Term {
        Term::Conv(Box::new(t))
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn comp(a: Term, b: Term) -> Term {
        Term::Comp(Box::new(a), Box::new(b))
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Zero | Term::One | Term::Identity | Term::Name(_) => 1,
            Term::Neg(t) | Term::Conv(t) => 1 + t.depth(),
            Term::Join(a, b) | Term::Meet(a, b) | Term::Comp(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Binding strength when printed: leaves and postfix 5, prefix 4, `;` 3, `.` 2, `+` 1.
    fn strength(&self) -> u8 {
        match self {
            Term::Zero | Term::One | Term::Identity | Term::Name(_) | Term::Conv(_) => 5,
            Term::Neg(_) => 4,
            Term::Comp(..) => 3,
            Term::Meet(..) => 2,
            Term::Join(..) => 1,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let parens = self.strength() < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Term::Zero => f.write_str("0")?,
            Term::One => f.write_str("1")?,
            Term::Identity => f.write_str("1'")?,
            Term::Name(n) => f.write_str(n)?,
            Term::Neg(t) => {
                f.write_str("-")?;
                t.write(f, 4)?;
            }
            Term::Conv(t) => {
                t.write(f, 5)?;
                f.write_str("~")?;
            }
            Term::Join(a, b) | Term::Meet(a, b) | Term::Comp(a, b) => {
                let p = self.strength();
                let op = match self {
                    Term::Join(..) => " + ",
                    Term::Meet(..) => " . ",
                    _ => " ; ",
                };
                a.write(f, p)?;
                f.write_str(op)?;
                b.write(f, p + 1)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Zero,
    One,
    Identity,
    Name(String),
    Minus,
    Tilde,
    Semi,
    Dot,
    Plus,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, TermError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'-' => Some(Token::Minus),
            b'~' => Some(Token::Tilde),
            b';' => Some(Token::Semi),
            b'.' => Some(Token::Dot),
            b'+' => Some(Token::Plus),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((start, tok));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            let tok = if c.is_ascii_digit() {
                match word {
                    "0" => Token::Zero,
                    "1" if bytes.get(i) == Some(&b'\'') => {
                        i += 1;
                        Token::Identity
                    }
                    "1" => Token::One,
                    _ => {
                        return Err(TermError::UnknownToken {
                            pos: start,
                            token: word.into(),
                        })
                    }
                }
            } else {
                Token::Name(word.to_string())
            };
            out.push((start, tok));
        } else {
            let token = text[start..]
                .chars()
                .next()
                .map(String::from)
                .unwrap_or_default();
            return Err(TermError::UnknownToken { pos: start, token });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error(&self, message: impl Into<String>) -> TermError {
        TermError::Syntax {
            pos: self.offset(),
            message: message.into(),
        }
    }

    fn expr(&mut self, min: u8) -> Result<Term, TermError> {
        let mut lhs = self.unary()?;
        loop {
            let (prec, build): (u8, fn(Term, Term) -> Term) = match self.peek() {
                Some(Token::Semi) => (3, Term::comp),
                Some(Token::Dot) => (2, Term::meet),
                Some(Token::Plus) => (1, Term::join),
                _ => break,
            };
            if prec < min {
                break;
            }
            self.pos += 1;
            let rhs = self.expr(prec + 1)?;
            lhs = build(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Term, TermError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Term::neg(self.unary()?));
        }
        let mut t = self.primary()?;
        while self.peek() == Some(&Token::Tilde) {
            self.pos += 1;
            t = Term::conv(t);
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term, TermError> {
        let tok = self.peek().cloned();
        let t = match tok {
            Some(Token::Zero) => Term::Zero,
            Some(Token::One) => Term::One,
            Some(Token::Identity) => Term::Identity,
            Some(Token::Name(n)) => Term::Name(n),
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr(0)?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(self.error("expected `)`"));
                }
                inner
            }
            Some(other) => return Err(self.error(format!("unexpected {other:?}"))),
            None => return Err(self.error("unexpected end of input")),
        };
        self.pos += 1;
        Ok(t)
    }
}

pub fn parse_term(text: &str) -> Result<Term, TermError> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
        end: text.len(),
    };
    let t = p.expr(0)?;
    if p.pos != p.tokens.len() {
        return Err(p.error("trailing input"));
    }
    Ok(t)
}

/// Operation symbols occurring in `t`.
pub fn symbols_of(t: &Term) -> Signature {
    let own = match t {
        Term::Zero => Some(Symbol::Zero),
        Term::One => Some(Symbol::One),
        Term::Identity => Some(Symbol::Ident),
        Term::Name(_) => None,
        Term::Neg(_) => Some(Symbol::Neg),
        Term::Conv(_) => Some(Symbol::Conv),
        Term::Join(..) => Some(Symbol::Join),
        Term::Meet(..) => Some(Symbol::Meet),
        Term::Comp(..) => Some(Symbol::Comp),
    };
    let here = own.into_iter().collect::<Signature>();
    match t {
        Term::Neg(a) | Term::Conv(a) => here.union(symbols_of(a)),
        Term::Join(a, b) | Term::Meet(a, b) | Term::Comp(a, b) => {
            here.union(symbols_of(a)).union(symbols_of(b))
        }
        _ => here,
    }
}

/// Evaluates `t` in the algebra generated by `alg`.
pub fn eval_abstract(
    alg: &AtomStructure,
    t: &Term,
    env: &Env<AtomSet>,
) -> Result<AtomSet, TermError> {
    let eval = |t| eval_abstract(alg, t, env);
    Ok(match t {
        Term::Zero => alg.zero(),
        Term::One => alg.one(),
        Term::Identity => alg.identity_element(),
        Term::Name(n) => {
            let x = *env.get(n).ok_or_else(|| TermError::Unbound(n.clone()))?;
            if !alg.contains(x) {
                return Err(TermError::ForeignElement(n.clone()));
            }
            x
        }
        Term::Neg(a) => alg.negate(eval(a)?),
        Term::Conv(a) => alg.converse_of(eval(a)?),
        Term::Join(a, b) => alg.join(eval(a)?, eval(b)?),
        Term::Meet(a, b) => alg.meet(eval(a)?, eval(b)?),
        Term::Comp(a, b) => alg.compose(eval(a)?, eval(b)?),
    })
}

/// Evaluates `t` with proper set-theoretic operations over `structure`'s
/// base. Names resolve in `env` first, then among the structure's relations.
pub fn eval_proper(
    structure: &ProperStructure,
    t: &Term,
    env: &Env<Relation>,
) -> Result<Relation, TermError> {
    let base = structure.base();
    let eval = |t| eval_proper(structure, t, env);
    Ok(match t {
        Term::Zero => Relation::empty(base),
        Term::One => Relation::full(base),
        Term::Identity => Relation::identity(base),
        Term::Name(n) => {
            let r = *env
                .get(n)
                .or_else(|| structure.get(n))
                .ok_or_else(|| TermError::Unbound(n.clone()))?;
            if r.base() != base {
                return Err(RelationError::MixedBases(base.size(), r.base().size()).into());
            }
            r
        }
        Term::Neg(a) => eval(a)?.complement(),
        Term::Conv(a) => eval(a)?.converse(),
        Term::Join(a, b) => eval(a)?.union(&eval(b)?)?,
        Term::Meet(a, b) => eval(a)?.intersection(&eval(b)?)?,
        Term::Comp(a, b) => eval(a)?.compose(&eval(b)?)?,
    })
}
