//! Text form of symbols.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' INT)?
//! atom   := INT ('/' INT)? | 'x'INT | 'xi'INT | 'h' | '(' expr ')'
//! ```
//!
//! Positions in error messages are byte offsets into the input.

use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Monomial, SymbolPoly};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn parse_symbol(text: &str, n: usize) -> Result<SymbolPoly> {
    if n == 0 {
        return Err(Error::Config("dimension must be positive".into()));
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        n,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<SymbolPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SymbolPoly> {
        let mut acc = self.unary()?;
        while self.eat(b'*') {
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<SymbolPoly> {
        if self.eat(b'-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<SymbolPoly> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let at = self.pos;
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| Error::Syntax {
                pos: at,
                msg: "exponent too large".into(),
            })?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("ascii digits"))
    }

    fn index(&mut self) -> Option<usize> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Some(digits.parse().unwrap_or(usize::MAX))
    }

    fn atom(&mut self) -> Result<SymbolPoly> {
        let n = self.n;
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let den = if self.eat(b'/') {
                    let at = self.peek().map(|_| self.pos).unwrap_or(self.pos);
                    let d = self.integer()?;
                    if d.is_zero() {
                        return Err(Error::Syntax {
                            pos: at,
                            msg: "zero denominator".into(),
                        });
                    }
                    d
                } else {
                    BigInt::from(1)
                };
                Ok(SymbolPoly::constant(n, Scalar::from_big(num, den)))
            }
            Some(b'h') => {
                self.pos += 1;
                Ok(SymbolPoly::nu(n))
            }
            Some(b'x') => {
                let start = self.pos;
                self.pos += 1;
                let is_xi = self.src.get(self.pos) == Some(&b'i');
                if is_xi {
                    self.pos += 1;
                }
                let name_len = if is_xi { 2 } else { 1 };
                let i = self.index().ok_or_else(|| Error::Syntax {
                    pos: start + name_len,
                    msg: "expected a variable index".into(),
                })?;
                if i == 0 || i > n {
                    return Err(Error::IndexOutOfRange {
                        name: String::from_utf8_lossy(&self.src[start..self.pos]).into_owned(),
                        pos: start,
                        n,
                    });
                }
                Ok(if is_xi {
                    SymbolPoly::xi(n, i - 1)
                } else {
                    SymbolPoly::x(n, i - 1)
                })
            }
            Some(c) => Err(self.err(format!("unexpected `{}`", c as char))),
        }
    }
}

/// Factors of a monomial joined by `*`, in the order `h`, `x`, `xi`; empty for 1.
pub(crate) fn format_monomial(m: &Monomial) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut push = |name: String, e: u32| match e {
        0 => {}
        1 => parts.push(name),
        _ => parts.push(format!("{name}^{e}")),
    };
    push("h".into(), m.nu());
    for (i, &e) in m.x().iter().enumerate() {
        push(format!("x{}", i + 1), e);
    }
    for (i, &e) in m.xi().iter().enumerate() {
        push(format!("xi{}", i + 1), e);
    }
    parts.join("*")
}

/// Terms in decreasing graded-lex order, e.g. `x1*xi1^2 + h*xi1`.
pub(crate) fn format_symbol(p: &SymbolPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (idx, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        match (idx, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs();
        let body = format_monomial(m);
        if body.is_empty() {
            write!(out, "{a}").unwrap();
        } else if a.is_one() {
            out.push_str(&body);
        } else {
            write!(out, "{a}*{body}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_term_example() {
        let f = parse_symbol("3*x1^2*xi2 + 1/2*h*xi1", 2).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(
            f.coeff(&Monomial::new(&[2, 0], &[0, 1], 0)),
            Scalar::from_int(3)
        );
        assert_eq!(
            f.coeff(&Monomial::new(&[0, 0], &[1, 0], 1)),
            Scalar::new(1, 2)
        );
    }

    #[test]
    fn out_of_range() {
        let e = parse_symbol("x3", 2).unwrap_err();
        assert!(matches!(e, Error::IndexOutOfRange { pos: 0, n: 2, .. }));
        assert!(parse_symbol("xi0", 2).is_err());
        assert!(parse_symbol("1 + x9", 1).is_err());
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert_eq!(
            parse_symbol("x1 + * x1", 1),
            Err(Error::Syntax {
                pos: 5,
                msg: "unexpected `*`".into()
            })
        );
        assert!(matches!(
            parse_symbol("(x1", 1),
            Err(Error::Syntax { pos: 3, .. })
        ));
        assert!(parse_symbol("x1^", 1).is_err());
        assert!(parse_symbol("x1^-1", 1).is_err());
        assert!(parse_symbol("1/0", 1).is_err());
        assert!(parse_symbol("x1 x1", 1).is_err());
        assert!(parse_symbol("y1", 1).is_err());
        assert!(parse_symbol("", 1).is_err());
        assert!(parse_symbol("x", 1).is_err());
    }

    #[test]
    fn precedence() {
        let a = parse_symbol("-x1^2 + 2*(x1 - xi1)^2", 1).unwrap();
        let b = parse_symbol("x1^2 - 4*x1*xi1 + 2*xi1^2", 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_symbol(" h ^ 2 ", 1).unwrap().to_string(), "h^2");
    }

    #[test]
    fn canonical_format() {
        let f = parse_symbol("h*xi1 + x1*xi1^2", 1).unwrap();
        assert_eq!(f.to_string(), "x1*xi1^2 + h*xi1");
        let g = parse_symbol("1/2*h + xi1*x1", 1).unwrap();
        assert_eq!(g.to_string(), "x1*xi1 + 1/2*h");
        assert_eq!(parse_symbol("-1 - x1", 1).unwrap().to_string(), "-x1 - 1");
        assert_eq!(parse_symbol("x1 - x1", 1).unwrap().to_string(), "0");
        assert_eq!(parse_symbol("-3/4*xi2", 2).unwrap().to_string(), "-3/4*xi2");
    }

    #[test]
    fn round_trip() {
        for s in [
            "3*x1^2*xi2 + 1/2*h*xi1",
            "-x1*x2*xi1*xi2 + 7/3*h^3 - 1",
            "(x1 + xi2)^3 - h*(x2 - 1/5)",
        ] {
            let f = parse_symbol(s, 2).unwrap();
            assert_eq!(parse_symbol(&f.to_string(), 2).unwrap(), f);
        }
    }
}
