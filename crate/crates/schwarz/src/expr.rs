//! Rational expressions in `x`: integer literals, `+ - * /`, integer powers
//! and parentheses.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ratfunc::RatFunc;
use crate::rational::Q;

/// Parse a rational expression such as `-4*x/(1-x)^2`.
pub fn parse_ratfunc(src: &str) -> Result<RatFunc> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err(format!("unexpected {:?}", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: String) -> Error {
        Error::Parse { pos: self.pos, msg }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    acc = acc.checked_div(&d).map_err(|_| Error::Parse {
                        pos: at,
                        msg: "division by zero".into(),
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'(') => {
                self.pos += 1;
                let neg = self.peek() == Some(b'-');
                if neg {
                    self.pos += 1;
                }
                let e = self.integer()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')' after exponent".into()));
                }
                self.pos += 1;
                return self.raise(base, e, neg);
            }
            _ => false,
        };
        let e = self.integer()?;
        self.raise(base, e, neg)
    }

    fn raise(&self, base: RatFunc, e: BigInt, neg: bool) -> Result<RatFunc> {
        let e: i64 = e.try_into().map_err(|_| self.err("exponent out of range".into()))?;
        if neg && base.is_zero() {
            return Err(self.err("zero to a negative power".into()));
        }
        Ok(base.pow(if neg { -e } else { e }))
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer".into()));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn atom(&mut self) -> Result<RatFunc> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                Ok(RatFunc::x())
            }
            Some(c) if c.is_ascii_digit() => Ok(RatFunc::constant(Q::from_integer(self.integer()?))),
            Some(c) => Err(self.err(format!("unexpected {:?}", c as char))),
            None => Err(self.err("unexpected end of input".into())),
        }
    }
}
