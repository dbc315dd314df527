//! Text syntax: `3/7`, `0.25`, `2+3g`, `1/g^3`, `(2-g)*5`. Juxtaposition
//! multiplies at the same precedence as `*`, so `5/7g` reads as `(5/7)·g`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{FieldSpec, Rational, Scalar};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum Expr {
    Num(Rational),
    Gen,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                b'-' => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                b'/' => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                b'g' | b'(' | b'0'..=b'9' | b'.' => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = match self.peek() {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                _ => false,
            };
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let e: i64 = digits.parse().map_err(|_| err("exponent must be an integer"))?;
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'g') => {
                self.pos += 1;
                Ok(Expr::Gen)
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(err("missing ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) => Err(err(format!("unexpected '{}'", c as char))),
            None => Err(err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        let mut frac_part = String::new();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            frac_part = std::str::from_utf8(&self.src[fs..self.pos]).unwrap().to_string();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err("malformed number"));
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = digits.parse().map_err(|_| err("malformed number"))?;
        let denom = BigInt::from(10).pow(frac_part.len() as u32);
        Ok(Expr::Num(Rational::new(numer, denom)))
    }
}

fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    if p.peek().is_none() {
        return Err(err("empty expression"));
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(err(format!("trailing input at offset {} in '{text}'", p.pos)));
    }
    Ok(e)
}

fn eval(e: &Expr, field: Option<&Arc<FieldSpec>>) -> Result<Scalar> {
    Ok(match e {
        Expr::Num(r) => Scalar::rational(r.clone()),
        Expr::Gen => match field {
            Some(f) => Scalar::generator(f),
            None => return Err(err("'g' used without a field declaration")),
        },
        Expr::Neg(x) => -eval(x, field)?,
        Expr::Add(a, b) => eval(a, field)?.try_add(&eval(b, field)?)?,
        Expr::Sub(a, b) => eval(a, field)?.try_sub(&eval(b, field)?)?,
        Expr::Mul(a, b) => eval(a, field)?.try_mul(&eval(b, field)?)?,
        Expr::Div(a, b) => eval(a, field)?.try_div(&eval(b, field)?)?,
        Expr::Pow(a, k) => eval(a, field)?.pow(*k)?,
    })
}

/// Evaluates an expression that must be affine in `g`; returns (constant, coefficient).
fn eval_linear(e: &Expr) -> Result<(Rational, Rational)> {
    let nonlinear = || err("field declaration must be linear in g");
    Ok(match e {
        Expr::Num(r) => (r.clone(), Rational::zero()),
        Expr::Gen => (Rational::zero(), Rational::one()),
        Expr::Neg(x) => {
            let (c, k) = eval_linear(x)?;
            (-c, -k)
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (c1, k1) = eval_linear(a)?;
            let (c2, k2) = eval_linear(b)?;
            if matches!(e, Expr::Add(..)) {
                (c1 + c2, k1 + k2)
            } else {
                (c1 - c2, k1 - k2)
            }
        }
        Expr::Mul(a, b) => {
            let (c1, k1) = eval_linear(a)?;
            let (c2, k2) = eval_linear(b)?;
            if !k1.is_zero() && !k2.is_zero() {
                return Err(nonlinear());
            }
            (&c1 * &c2, &c1 * &k2 + &k1 * &c2)
        }
        Expr::Div(a, b) => {
            let (c1, k1) = eval_linear(a)?;
            let (c2, k2) = eval_linear(b)?;
            if !k2.is_zero() {
                return Err(nonlinear());
            }
            if c2.is_zero() {
                return Err(Error::DivisionByZero);
            }
            (c1 / &c2, k1 / c2)
        }
        Expr::Pow(a, k) => {
            let (c, g) = eval_linear(a)?;
            if !g.is_zero() && *k != 1 && *k != 0 {
                return Err(nonlinear());
            }
            match *k {
                0 => (Rational::one(), Rational::zero()),
                1 => (c, g),
                _ => {
                    let r = Scalar::rational(c).pow(*k)?;
                    (r.u().clone(), Rational::zero())
                }
            }
        }
    })
}

pub(super) fn parse_scalar(text: &str, field: Option<&Arc<FieldSpec>>) -> Result<Scalar> {
    eval(&parse_expr(text)?, field)
}

pub(super) fn parse_linear(text: &str) -> Result<(Rational, Rational)> {
    eval_linear(&parse_expr(text)?)
}
