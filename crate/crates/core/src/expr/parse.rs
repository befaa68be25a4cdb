//! Recursive-descent parser for the expression grammar.
//!
//! Precedence, tightest first: `^` (right-assoc), unary `-`, `* /`, `+ -`.

use super::{Expr, Func};
use crate::error::{Error, Result};
use crate::scalar::{parse_decimal, Scalar};

#[derive(Clone, Debug)]
pub enum RawExpr {
    Num(Scalar),
    Ident(String, usize),
    Call(String, Box<RawExpr>, usize),
    Add(Box<RawExpr>, Box<RawExpr>),
    Sub(Box<RawExpr>, Box<RawExpr>),
    Mul(Box<RawExpr>, Box<RawExpr>),
    Div(Box<RawExpr>, Box<RawExpr>),
    Neg(Box<RawExpr>),
    Pow(Box<RawExpr>, Box<RawExpr>, usize),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Scalar),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && i + 1 < b.len() && (b[i + 1] as char).is_ascii_digit()) {
            let start = i;
            while i < b.len() && ((b[i] as char).is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            let mantissa = &text[start..i];
            let mut float_exp = None;
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                let ds = j;
                while j < b.len() && (b[j] as char).is_ascii_digit() {
                    j += 1;
                }
                if j > ds {
                    float_exp = Some(&text[i..j]);
                    i = j;
                }
            }
            let tok = match float_exp {
                Some(e) => {
                    let v: f64 = format!("{mantissa}{e}")
                        .parse()
                        .map_err(|_| Error::Syntax { pos: start, msg: "bad number".into() })?;
                    Tok::Num(Scalar::Float(v))
                }
                None => {
                    if mantissa.matches('.').count() > 1 {
                        return Err(Error::Syntax { pos: start, msg: "bad number".into() });
                    }
                    let r = parse_decimal(mantissa).ok_or(Error::Syntax { pos: start, msg: "bad number".into() })?;
                    Tok::Num(Scalar::Exact(r))
                }
            };
            out.push((tok, start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, msg: &str) -> Result<T> {
        let msg = match self.peek() {
            None => format!("{msg}, found end of input"),
            Some(t) => format!("{msg}, found {t:?}"),
        };
        Err(Error::Syntax { pos: self.offset(), msg })
    }

    fn expr(&mut self) -> Result<RawExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = RawExpr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = RawExpr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<RawExpr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = RawExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = RawExpr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<RawExpr> {
        if self.eat('-') {
            return Ok(RawExpr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RawExpr> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            let at = self.offset();
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(RawExpr::Pow(Box::new(base), Box::new(exp), at));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RawExpr> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                Ok(RawExpr::Num(s))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return self.error("expected `)`");
                    }
                    Ok(RawExpr::Call(name, Box::new(arg), at))
                } else {
                    Ok(RawExpr::Ident(name, at))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.error("expected `)`");
                }
                Ok(e)
            }
            _ => self.error("expected a number, identifier or `(`"),
        }
    }
}

/// Parse to an identifier-level tree; callers decide what identifiers mean.
pub fn parse_raw(text: &str) -> Result<RawExpr> {
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len() };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}

pub(crate) fn var_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&i| i >= 1)
}

/// Constant exponent of `^`, or an error naming the offset.
pub(crate) fn constant_exponent(e: &Expr, at: usize) -> Result<Scalar> {
    e.as_const()
        .cloned()
        .ok_or(Error::Syntax { pos: at, msg: "exponent must be a constant".into() })
}

fn lower(raw: &RawExpr) -> Result<Expr> {
    Ok(match raw {
        RawExpr::Num(s) => Expr::constant(s.clone()),
        RawExpr::Ident(name, _) => Expr::var(var_index(name).ok_or_else(|| Error::UnknownIdent(name.clone()))?),
        RawExpr::Call(name, a, _) => {
            let f = Func::from_name(name).ok_or_else(|| Error::UnknownIdent(name.clone()))?;
            Expr::func(f, &lower(a)?)
        }
        RawExpr::Add(a, b) => lower(a)?.add(&lower(b)?),
        RawExpr::Sub(a, b) => lower(a)?.sub(&lower(b)?),
        RawExpr::Mul(a, b) => lower(a)?.mul(&lower(b)?),
        RawExpr::Div(a, b) => lower(a)?.div(&lower(b)?),
        RawExpr::Neg(a) => lower(a)?.neg(),
        RawExpr::Pow(a, b, at) => {
            let p = constant_exponent(&lower(b)?, *at)?;
            lower(a)?.powr(p)
        }
    })
}

/// Parse a scalar expression in x1, x2, ...
pub fn parse(text: &str) -> Result<Expr> {
    lower(&parse_raw(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse("-x1^2").unwrap();
        assert_eq!(e.eval(&[3.0]).unwrap(), -9.0);
        let e = parse("2^3^2").unwrap();
        assert_eq!(e.eval(&[]).unwrap(), 512.0);
        let e = parse("x1^2 + x2^2 - x3").unwrap();
        assert_eq!(e.eval(&[3.0, 4.0, 5.0]).unwrap(), 20.0);
    }

    #[test]
    fn errors() {
        assert_eq!(parse("x1 +").unwrap_err(), Error::Syntax { pos: 4, msg: "expected a number, identifier or `(`, found end of input".into() });
        assert!(matches!(parse("y + 1"), Err(Error::UnknownIdent(_))));
        assert!(matches!(parse("x1^x2"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse("x1 $"), Err(Error::Syntax { pos: 3, .. })));
    }

    #[test]
    fn literals() {
        assert_eq!(parse("3/4").unwrap().as_const().unwrap(), &Scalar::ratio(3, 4));
        assert_eq!(parse("0.125").unwrap().as_const().unwrap(), &Scalar::ratio(1, 8));
        assert!(!parse("1.5e-3").unwrap().as_const().unwrap().is_exact());
        assert_eq!(parse("sqrt(x1*x1)").unwrap().eval(&[-2.0]).unwrap(), 2.0);
    }
}
