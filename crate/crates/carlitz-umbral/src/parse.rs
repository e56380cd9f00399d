//! A small expression grammar for rational functions over F_q(x), plus the
//! canonical printer. The printer and parser are inverse on canonical
//! forms: parse(print(r)) == r.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ['^' digits]
//! atom   := 'x' | digits | '[' int (',' int)* ']' | '(' expr ')'
//! ```
//!
//! Integers reduce modulo p; `[c0,c1,...]` gives an extension field element
//! by its coordinates. Exponents are non-negative integer literals. Any
//! other identifier is rejected with its position.
//!
//! F_q-linear polynomials extend the grammar with the symbol `t`:
//!
//! ```text
//! linexpr := ['-'] linterm (('+' | '-') linterm)*
//! linterm := product of factors, exactly one of which is 't' ['^' digits]
//! ```
//!
//! The exponent of `t` must be a power of q (it encodes the Frobenius
//! level); the remaining factors form the coefficient and may not contain
//! `t`. A term with no `t` is rejected unless it is literally zero.
//!
//! Printed form: terms in descending exponent order joined by " + ", each
//! term `c*x^e` with unit coefficients and exponent 1 suppressed; fractions
//! as `num/den` with parentheses around multi-term sides. No minus signs
//! are ever emitted (coefficients print as residues).

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::linpoly::LinPoly;
use crate::poly::Poly;
use crate::ratfn::RatFn;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    X,
    T,
    /// Value reduced mod p, plus the raw value when it fits in u64
    /// (exponents need the raw value).
    Int(u64, Option<u64>),
    Coords(Vec<i64>),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    p: u64,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Reads digits, reducing modulo p on the fly and tracking the raw
    /// value while it still fits in u64.
    fn digits(&mut self) -> (u64, Option<u64>) {
        let mut red: u64 = 0;
        let mut raw: Option<u64> = Some(0);
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            let d = (self.src[self.pos] - b'0') as u64;
            red = (red * 10 + d) % self.p;
            raw = raw
                .and_then(|r| r.checked_mul(10))
                .and_then(|r| r.checked_add(d));
            self.pos += 1;
        }
        (red, raw)
    }

    fn int_signed(&mut self) -> Result<i64> {
        self.skip_ws();
        let neg = self.pos < self.src.len() && self.src[self.pos] == b'-';
        if neg {
            self.pos += 1;
            self.skip_ws();
        }
        if self.pos >= self.src.len() || !self.src[self.pos].is_ascii_digit() {
            return Err(Error::Syntax {
                pos: self.pos,
                msg: "expected integer".into(),
            });
        }
        let (red, _) = self.digits();
        Ok(if neg { -(red as i64) } else { red as i64 })
    }

    fn next(&mut self) -> Result<Option<(usize, Tok)>> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let b = self.src[self.pos];
        let tok = match b {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'[' => {
                self.pos += 1;
                let mut coords = vec![self.int_signed()?];
                loop {
                    self.skip_ws();
                    match self.src.get(self.pos) {
                        Some(b',') => {
                            self.pos += 1;
                            coords.push(self.int_signed()?);
                        }
                        Some(b']') => {
                            self.pos += 1;
                            break;
                        }
                        _ => {
                            return Err(Error::Syntax {
                                pos: self.pos,
                                msg: "expected ',' or ']' in coordinate list".into(),
                            })
                        }
                    }
                }
                Tok::Coords(coords)
            }
            b'0'..=b'9' => {
                let (red, raw) = self.digits();
                Tok::Int(red, raw)
            }
            _ if b.is_ascii_alphabetic() || b == b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[start..end])
                    .unwrap()
                    .to_string();
                self.pos = end;
                match name.as_str() {
                    "x" => Tok::X,
                    "t" => Tok::T,
                    _ => return Err(Error::UnknownSymbol { pos: start, name }),
                }
            }
            _ => {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character '{}'", b as char),
                })
            }
        };
        Ok(Some((start, tok)))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    field: FieldSpec,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RatFn> {
        let mut neg = false;
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            neg = true;
        }
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFn> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    acc = acc.div(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatFn> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some(Tok::Int(_, raw)) => {
                    let e = raw.filter(|&e| e <= i64::MAX as u64).ok_or(Error::Syntax {
                        pos,
                        msg: "exponent too large".into(),
                    })?;
                    return base.pow(e as i64);
                }
                _ => {
                    return Err(Error::Syntax {
                        pos,
                        msg: "exponent must be a non-negative integer".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFn> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::X) => Ok(RatFn::x(self.field)),
            Some(Tok::Int(v, _)) => Ok(RatFn::constant(self.field, self.field.from_u64(v))),
            Some(Tok::Coords(cs)) => {
                if cs.len() > self.field.nu() as usize {
                    return Err(Error::Syntax {
                        pos,
                        msg: format!(
                            "coordinate list has {} entries, field degree is {}",
                            cs.len(),
                            self.field.nu()
                        ),
                    });
                }
                let p = self.field.p() as i64;
                let coords: Vec<u32> = cs.iter().map(|&c| (((c % p) + p) % p) as u32).collect();
                Ok(RatFn::constant(self.field, self.field.elem(&coords)))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                if self.bump() != Some(Tok::RParen) {
                    return Err(Error::Syntax {
                        pos: self.pos(),
                        msg: "expected ')'".into(),
                    });
                }
                Ok(inner)
            }
            _ => Err(Error::Syntax {
                pos,
                msg: "expected 'x', a number, a coordinate list, or '('".into(),
            }),
        }
    }

    fn linexpr(&mut self) -> Result<LinPoly> {
        let mut neg = false;
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            neg = true;
        }
        let mut acc = self.linterm()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.linterm()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.linterm()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    /// One product of factors, exactly one of which is `t ['^' e]`.
    fn linterm(&mut self) -> Result<LinPoly> {
        let start = self.pos();
        let mut coeff = RatFn::one(self.field);
        let mut level: Option<usize> = None;
        loop {
            if self.peek() == Some(&Tok::T) {
                let tpos = self.pos();
                self.bump();
                if level.is_some() {
                    return Err(Error::Syntax {
                        pos: tpos,
                        msg: "'t' may appear only once per term".into(),
                    });
                }
                let mut e = 1u64;
                if self.peek() == Some(&Tok::Caret) {
                    self.bump();
                    let pos = self.pos();
                    match self.bump() {
                        Some(Tok::Int(_, raw)) => {
                            e = raw.ok_or(Error::Syntax {
                                pos,
                                msg: "exponent too large".into(),
                            })?;
                        }
                        _ => {
                            return Err(Error::Syntax {
                                pos,
                                msg: "exponent must be a non-negative integer".into(),
                            })
                        }
                    }
                }
                level = Some(self.q_level(tpos, e)?);
            } else {
                let f = self.factor()?;
                coeff = coeff.mul(&f);
            }
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                }
                Some(Tok::Slash) => {
                    self.bump();
                    if self.peek() == Some(&Tok::T) {
                        return Err(Error::Syntax {
                            pos: self.pos(),
                            msg: "cannot divide by 't'".into(),
                        });
                    }
                    let f = self.factor()?;
                    coeff = coeff.div(&f)?;
                    // A division binds immediately; only '*' starts a new
                    // operand, so loop back through the separator check.
                    while self.peek() == Some(&Tok::Slash) {
                        self.bump();
                        if self.peek() == Some(&Tok::T) {
                            return Err(Error::Syntax {
                                pos: self.pos(),
                                msg: "cannot divide by 't'".into(),
                            });
                        }
                        let f = self.factor()?;
                        coeff = coeff.div(&f)?;
                    }
                    if self.peek() == Some(&Tok::Star) {
                        self.bump();
                    } else {
                        break;
                    }
                }
                _ => break,
            }
        }
        match level {
            Some(j) => Ok(LinPoly::term(self.field, j, coeff)),
            None if coeff.is_zero() => Ok(LinPoly::zero(self.field)),
            None => Err(Error::Syntax {
                pos: start,
                msg: "each term of a q-linear polynomial must contain 't'".into(),
            }),
        }
    }

    /// Maps a `t` exponent to its Frobenius level: e = q^j, else an error.
    fn q_level(&self, pos: usize, e: u64) -> Result<usize> {
        let q = self.field.q() as u64;
        let mut pw = 1u64;
        let mut j = 0usize;
        while pw < e {
            pw = pw.checked_mul(q).ok_or(Error::Syntax {
                pos,
                msg: "exponent too large".into(),
            })?;
            j += 1;
        }
        if pw == e {
            Ok(j)
        } else {
            Err(Error::Syntax {
                pos,
                msg: format!("exponent of 't' must be a power of q = {}", q),
            })
        }
    }
}

/// Parses an expression into a rational function over the given field.
pub fn parse_ratfn(field: FieldSpec, src: &str) -> Result<RatFn> {
    let mut lx = Lexer {
        src: src.as_bytes(),
        pos: 0,
        p: field.p() as u64,
    };
    let mut toks = Vec::new();
    while let Some(t) = lx.next()? {
        toks.push(t);
    }
    let mut parser = Parser {
        toks,
        idx: 0,
        field,
        end: src.len(),
    };
    let r = parser.expr()?;
    if parser.idx != parser.toks.len() {
        return Err(Error::Syntax {
            pos: parser.pos(),
            msg: "unexpected trailing input".into(),
        });
    }
    Ok(r)
}

/// Parses a q-linear polynomial in `t` with coefficients in F_q(x).
pub fn parse_linpoly(field: FieldSpec, src: &str) -> Result<LinPoly> {
    let mut lx = Lexer {
        src: src.as_bytes(),
        pos: 0,
        p: field.p() as u64,
    };
    let mut toks = Vec::new();
    while let Some(t) = lx.next()? {
        toks.push(t);
    }
    let mut parser = Parser {
        toks,
        idx: 0,
        field,
        end: src.len(),
    };
    let l = parser.linexpr()?;
    if parser.idx != parser.toks.len() {
        return Err(Error::Syntax {
            pos: parser.pos(),
            msg: "unexpected trailing input".into(),
        });
    }
    Ok(l)
}

/// Parses an expression that must be a polynomial (denominator 1).
pub fn parse_poly(field: FieldSpec, src: &str) -> Result<Poly> {
    let r = parse_ratfn(field, src)?;
    match r.as_poly() {
        Some(p) => Ok(p.clone()),
        None => Err(Error::NotPolynomial {
            context: "expression has a nontrivial denominator".into(),
        }),
    }
}

/// Canonical text form of a polynomial: descending exponents, " + " joins.
pub fn fmt_poly(p: &Poly) -> String {
    let fs = p.field();
    if p.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<String> = Vec::new();
    for (e, c) in p.nonzero_terms().into_iter().rev() {
        let cs = fs.fmt_elem(c);
        let t = match (e, c == fs.one()) {
            (0, _) => cs,
            (1, true) => "x".to_string(),
            (1, false) => format!("{}*x", cs),
            (_, true) => format!("x^{}", e),
            (_, false) => format!("{}*x^{}", cs, e),
        };
        terms.push(t);
    }
    terms.join(" + ")
}

/// Canonical text form of a rational function: `num/den`, parenthesizing
/// multi-term sides; `/den` omitted when den = 1.
pub fn fmt_ratfn(r: &RatFn) -> String {
    let num = fmt_poly(r.num());
    if r.den().is_one() {
        return num;
    }
    let den = fmt_poly(r.den());
    let wrap = |s: String, multi: bool| if multi { format!("({})", s) } else { s };
    format!(
        "{}/{}",
        wrap(num, r.num().term_count() > 1),
        wrap(den, r.den().term_count() > 1)
    )
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_poly(self))
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_ratfn(self))
    }
}
