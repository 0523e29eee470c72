//! Text grammar for polynomial input.
//!
//! Terms are joined by `+` and `-`; a term is a `*`-separated product of
//! integer literals, powers of the symbol `t` (the adjoined root, extension
//! fields only) and variables `x1..xk` with optional `^exponent`. Whitespace
//! is insignificant. A bare `x` is accepted as shorthand for `x1`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{Monomial, MultiPoly, UniPoly, MAX_EXPONENT};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    Int(String),
    Var(usize),
    T,
    End,
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn next_token(&mut self) -> Result<(Tok, usize)> {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.bytes.len() {
            return Ok((Tok::End, start));
        }
        let b = self.bytes[self.pos];
        self.pos += 1;
        let tok = match b {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'0'..=b'9' => {
                let mut digits = String::from(b as char);
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    digits.push(self.bytes[self.pos] as char);
                    self.pos += 1;
                }
                Tok::Int(digits)
            }
            b'x' => {
                let mut idx = 0usize;
                let mut saw_digit = false;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    saw_digit = true;
                    idx = idx
                        .saturating_mul(10)
                        .saturating_add((self.bytes[self.pos] - b'0') as usize);
                    self.pos += 1;
                }
                if saw_digit {
                    Tok::Var(idx)
                } else {
                    Tok::Var(1)
                }
            }
            b't' => Tok::T,
            other => {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character {:?}", other as char),
                })
            }
        };
        Ok((tok, start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    look: (Tok, usize),
    spec: Arc<FieldSpec>,
    k: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, k: usize, spec: Arc<FieldSpec>) -> Result<Self> {
        let mut lexer = Lexer::new(text);
        let look = lexer.next_token()?;
        Ok(Parser {
            lexer,
            look,
            spec,
            k,
        })
    }

    fn advance(&mut self) -> Result<(Tok, usize)> {
        let mut next = self.lexer.next_token()?;
        std::mem::swap(&mut self.look, &mut next);
        Ok(next)
    }

    fn parse(mut self) -> Result<MultiPoly> {
        let mut terms: Vec<(Monomial, FieldElement)> = Vec::new();
        let mut constant = FieldElement::ZERO;
        let mut negate = false;
        match self.look.0 {
            Tok::Minus => {
                negate = true;
                self.advance()?;
            }
            Tok::Plus => {
                self.advance()?;
            }
            _ => {}
        }
        loop {
            let (coeff, exps) = self.parse_term()?;
            let coeff = if negate { self.spec.neg(coeff) } else { coeff };
            if exps.iter().all(|&e| e == 0) {
                constant = self.spec.add(constant, coeff);
            } else {
                let exps_u32 = exps
                    .iter()
                    .map(|&e| {
                        if e >= MAX_EXPONENT {
                            Err(Error::SizeLimit(format!(
                                "exponent {e} is at or above 2^32"
                            )))
                        } else {
                            Ok(e as u32)
                        }
                    })
                    .collect::<Result<Vec<u32>>>()?;
                terms.push((Monomial::new(exps_u32)?, coeff));
            }
            match self.look.0 {
                Tok::Plus => {
                    negate = false;
                    self.advance()?;
                }
                Tok::Minus => {
                    negate = true;
                    self.advance()?;
                }
                Tok::End => break,
                ref other => {
                    return Err(Error::Syntax {
                        pos: self.look.1,
                        msg: format!("expected '+', '-' or '*', found {other:?}"),
                    })
                }
            }
        }
        MultiPoly::new(self.spec, self.k, terms, constant)
    }

    /// One product of factors; returns the accumulated coefficient and the
    /// exponent vector.
    fn parse_term(&mut self) -> Result<(FieldElement, Vec<u64>)> {
        let mut coeff = FieldElement::ONE;
        let mut exps = vec![0u64; self.k];
        loop {
            let (tok, pos) = self.advance()?;
            match tok {
                Tok::Int(digits) => {
                    coeff = self.spec.mul(coeff, self.fold_literal(&digits));
                }
                Tok::T => {
                    if self.spec.e() == 1 {
                        return Err(Error::TSymbolInPrimeField);
                    }
                    let exp = self.optional_exponent()?;
                    let t = self.spec.from_coeffs(&[0, 1]).expect("e > 1");
                    coeff = self.spec.mul(coeff, self.spec.pow(t, exp));
                }
                Tok::Var(index) => {
                    if index == 0 || index > self.k {
                        return Err(Error::UnknownVariable {
                            index,
                            arity: self.k,
                        });
                    }
                    let exp = self.optional_exponent()?;
                    exps[index - 1] += exp;
                }
                other => {
                    return Err(Error::Syntax {
                        pos,
                        msg: format!("expected an integer, 't' or a variable, found {other:?}"),
                    })
                }
            }
            if self.look.0 == Tok::Star {
                self.advance()?;
            } else {
                break;
            }
        }
        Ok((coeff, exps))
    }

    /// `^n` if present, otherwise 1.
    fn optional_exponent(&mut self) -> Result<u64> {
        if self.look.0 != Tok::Caret {
            return Ok(1);
        }
        self.advance()?;
        let (tok, pos) = self.advance()?;
        match tok {
            Tok::Int(digits) => {
                let value: u64 = digits.parse().map_err(|_| {
                    Error::SizeLimit(format!("exponent {digits} is at or above 2^32"))
                })?;
                if value >= MAX_EXPONENT {
                    return Err(Error::SizeLimit(format!(
                        "exponent {value} is at or above 2^32"
                    )));
                }
                Ok(value)
            }
            other => Err(Error::Syntax {
                pos,
                msg: format!("expected an integer exponent, found {other:?}"),
            }),
        }
    }

    /// Integer literal reduced mod p, digit by digit so any length works.
    fn fold_literal(&self, digits: &str) -> FieldElement {
        let p = self.spec.p();
        let mut v = 0u64;
        for ch in digits.bytes() {
            v = (v * 10 + (ch - b'0') as u64) % p;
        }
        self.spec.from_int(v as i64)
    }
}

/// Parses the text grammar into a canonical `MultiPoly` with like terms
/// combined and zero coefficients dropped.
pub fn parse_poly(text: &str, k: usize, spec: &Arc<FieldSpec>) -> Result<MultiPoly> {
    Parser::new(text, k, Arc::clone(spec))?.parse()
}

/// Parses a univariate polynomial (`x` or `x1` as the variable).
pub fn parse_unipoly(text: &str, spec: &Arc<FieldSpec>) -> Result<UniPoly> {
    let p = parse_poly(text, 1, spec)?;
    let mut coeffs: Vec<(u64, FieldElement)> =
        p.terms().map(|(m, c)| (m.exps()[0] as u64, c)).collect();
    if !p.constant().is_zero() {
        coeffs.push((0, p.constant()));
    }
    Ok(UniPoly::new(Arc::clone(spec), coeffs))
}
