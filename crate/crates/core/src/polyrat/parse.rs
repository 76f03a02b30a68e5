use num_bigint::BigInt;

use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// Parses an expression over integer literals and `x` with `+ - * / ^` and
/// parentheses. Juxtaposition (`2x`, `3(x+1)`) means multiplication and
/// exponents are (possibly negative) integers.
pub fn parse_ratfunc(src: &str) -> Result<RatFunc> {
    let mut parser = Parser {
        src,
        toks: tokenize(src)?,
        pos: 0,
    };
    let f = parser.expr()?;
    match parser.peek() {
        None => Ok(f),
        Some((at, tok)) => Err(Error::Parse {
            pos: at,
            msg: format!("unexpected {tok:?}"),
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    X,
    Op(char),
    Open,
    Close,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (at, c) = chars[i];
        match c {
            ' ' | '\t' => {}
            '0'..='9' => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].1.is_ascii_digit() {
                    i += 1;
                }
                let end = chars.get(i + 1).map_or(src.len(), |&(k, _)| k);
                let text = &src[chars[start].0..end];
                out.push((at, Tok::Num(text.parse().expect("digits"))));
            }
            'x' | 'X' => out.push((at, Tok::X)),
            '+' | '-' | '*' | '/' | '^' => out.push((at, Tok::Op(c))),
            '(' => out.push((at, Tok::Open)),
            ')' => out.push((at, Tok::Close)),
            _ => {
                return Err(Error::Parse {
                    pos: at,
                    msg: format!("unexpected character '{c}'"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<(usize, Tok)> {
        self.toks.get(self.pos).cloned()
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src.len(), |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.at(),
            msg: msg.into(),
        })
    }

    fn eat_op(&mut self, op: char) -> bool {
        if matches!(self.peek(), Some((_, Tok::Op(c))) if c == op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            if self.eat_op('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat_op('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_op('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat_op('/') {
                let at = self.at();
                let rhs = self.unary()?;
                acc = acc.div(&rhs).map_err(|_| Error::Parse {
                    pos: at,
                    msg: "division by zero".into(),
                })?;
            } else if matches!(self.peek(), Some((_, Tok::X | Tok::Open | Tok::Num(_)))) {
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        if self.eat_op('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat_op('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if !self.eat_op('^') {
            return Ok(base);
        }
        let at = self.at();
        let e = self.exponent()?;
        base.pow(e).map_err(|_| Error::Parse {
            pos: at,
            msg: "negative power of zero".into(),
        })
    }

    fn exponent(&mut self) -> Result<i32> {
        let paren = matches!(self.peek(), Some((_, Tok::Open)));
        if paren {
            self.pos += 1;
        }
        let neg = self.eat_op('-');
        let e = match self.peek() {
            Some((_, Tok::Num(n))) => {
                self.pos += 1;
                i32::try_from(n).or_else(|_| self.err("exponent too large"))?
            }
            _ => return self.err("expected an integer exponent"),
        };
        if paren {
            match self.peek() {
                Some((_, Tok::Close)) => self.pos += 1,
                _ => return self.err("expected ')'"),
            }
        }
        Ok(if neg { -e } else { e })
    }

    fn atom(&mut self) -> Result<RatFunc> {
        match self.peek() {
            Some((_, Tok::Num(n))) => {
                self.pos += 1;
                Ok(RatFunc::constant(n))
            }
            Some((_, Tok::X)) => {
                self.pos += 1;
                Ok(RatFunc::x())
            }
            Some((_, Tok::Open)) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some((_, Tok::Close)) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some((_, t)) => self.err(format!("unexpected {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrat::IntPoly;

    fn rf(n: &[i64], d: &[i64]) -> RatFunc {
        RatFunc::new(IntPoly::from_i64(n), IntPoly::from_i64(d)).unwrap()
    }

    #[test]
    fn parses_expressions() {
        assert_eq!(parse_ratfunc("x^2").unwrap(), rf(&[0, 0, 1], &[1]));
        assert_eq!(parse_ratfunc("x^3 + 3x").unwrap(), rf(&[0, 3, 0, 1], &[1]));
        assert_eq!(parse_ratfunc("-x^2").unwrap(), rf(&[0, 0, -1], &[1]));
        assert_eq!(parse_ratfunc("x/(x+1)").unwrap(), rf(&[0, 1], &[1, 1]));
        assert_eq!(
            parse_ratfunc("x^2 + x^-1").unwrap(),
            rf(&[1, 0, 0, 1], &[0, 1])
        );
        assert_eq!(parse_ratfunc("x^(-2)").unwrap(), rf(&[1], &[0, 0, 1]));
        assert_eq!(parse_ratfunc("2(x+1)^2/4").unwrap(), rf(&[1, 2, 1], &[2]));
        assert_eq!(parse_ratfunc("1").unwrap(), RatFunc::one());
    }

    #[test]
    fn reports_positions() {
        assert_eq!(
            parse_ratfunc("x + $").unwrap_err(),
            Error::Parse {
                pos: 4,
                msg: "unexpected character '$'".into()
            }
        );
        assert!(matches!(
            parse_ratfunc("(x + 1"),
            Err(Error::Parse { pos: 6, .. })
        ));
        assert!(matches!(
            parse_ratfunc("x / 0"),
            Err(Error::Parse { pos: 4, .. })
        ));
        assert!(matches!(
            parse_ratfunc("x^"),
            Err(Error::Parse { pos: 2, .. })
        ));
    }
}
