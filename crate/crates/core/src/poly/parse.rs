//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr       := term (('+'|'-') term)*
//! term       := factor ('*' factor)*
//! factor     := '-' factor | atom ('^' natural)?
//! atom       := identifier | rational | '(' expr ')'
//! rational   := integer ('/' positive-integer)?
//! identifier := letter (letter|digit|'_')* ('#' natural)?
//! ```
//!
//! Whitespace is insignificant. There is no implicit multiplication: `xz`
//! is a single identifier. Unary minus binds looser than `^`, so `-x^2`
//! is `-(x^2)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::variable::{Context, Variable};
use super::{PolyError, Polynomial, Rational};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, usize)>, PolyError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let Some(&b) = self.bytes.get(self.pos) else {
                break;
            };
            let start = self.pos;
            let tok = match b {
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'^' => Tok::Caret,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'0'..=b'9' => {
                    let d = self.digits();
                    out.push((Tok::Int(d.parse().unwrap()), start));
                    continue;
                }
                c if c.is_ascii_alphabetic() => {
                    while self.pos < self.bytes.len()
                        && (self.bytes[self.pos].is_ascii_alphanumeric()
                            || self.bytes[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    let mut name = self.src[start..self.pos].to_string();
                    let save = self.pos;
                    self.skip_ws();
                    if self.bytes.get(self.pos) == Some(&b'#') {
                        self.pos += 1;
                        self.skip_ws();
                        let d = self.digits();
                        if d.is_empty() {
                            return Err(PolyError::Syntax {
                                position: self.pos,
                                message: "expected jet level after '#'".into(),
                            });
                        }
                        name.push('#');
                        name.push_str(d);
                    } else {
                        self.pos = save;
                    }
                    out.push((Tok::Ident(name), start));
                    continue;
                }
                _ => {
                    return Err(PolyError::Syntax {
                        position: start,
                        message: format!("unexpected character '{}'", self.src[start..].chars().next().unwrap()),
                    })
                }
            };
            self.pos += 1;
            out.push((tok, start));
        }
        Ok(out)
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    ctx: &'a Arc<Context>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn syntax(&self, message: impl Into<String>) -> PolyError {
        PolyError::Syntax {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            return Ok(-&self.factor()?);
        }
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    let e = n.to_u32().ok_or_else(|| self.syntax("exponent too large"))?;
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.syntax("expected natural exponent after '^'")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        let position = self.offset();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let v = Variable::parse(&name)?;
                Polynomial::variable(self.ctx, &v)
                    .map_err(|_| PolyError::UnknownIdentifier { name, position })
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let mut value = Rational::from_integer(n);
                if let Some(Tok::Slash) = self.peek() {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            self.pos += 1;
                            value /= Rational::from_integer(d);
                        }
                        _ => return Err(self.syntax("expected positive denominator after '/'")),
                    }
                }
                Ok(Polynomial::constant(self.ctx, value))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.syntax("expected ')'")),
                }
            }
            Some(_) => Err(self.syntax("expected identifier, number or '('")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }
}

/// Parses `text` as a polynomial over `ctx`.
pub fn parse(text: &str, ctx: &Arc<Context>) -> Result<Polynomial, PolyError> {
    let toks = Lexer {
        src: text,
        bytes: text.as_bytes(),
        pos: 0,
    }
    .tokenize()?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        ctx,
    };
    let result = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.syntax("trailing input"));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Arc<Context> {
        Context::from_names(&["x", "y", "z", "t", "x#0", "x#12"]).unwrap()
    }

    #[test]
    fn parses_examples() {
        let c = ctx();
        let f = parse("x*z - y^2 + 1", &c).unwrap();
        assert_eq!(f.to_string(), "-y^2 + x*z + 1");
        assert!(parse("0", &c).unwrap().is_zero());
        assert_eq!(
            parse("(y + x*t)^2", &c).unwrap(),
            parse("y^2 + 2*x*y*t + x^2*t^2", &c).unwrap()
        );
    }

    #[test]
    fn rationals_and_unary_minus() {
        let c = ctx();
        assert_eq!(
            parse("3/4*x - -2", &c).unwrap(),
            parse("2 + 3/4 * x", &c).unwrap()
        );
        assert_eq!(parse("-x^2", &c).unwrap().to_string(), "-x^2");
        assert_eq!(parse("(-x)^2", &c).unwrap().to_string(), "x^2");
        assert_eq!(parse("x # 12 * x#0", &c).unwrap().to_string(), "x#0*x#12");
    }

    #[test]
    fn errors_carry_positions() {
        let c = ctx();
        match parse("x + xz", &c) {
            Err(PolyError::UnknownIdentifier { name, position }) => {
                assert_eq!(name, "xz");
                assert_eq!(position, 4);
            }
            other => panic!("{other:?}"),
        }
        match parse("x + * y", &c) {
            Err(PolyError::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("x / 0", &c), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse("1/0", &c), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse("(x + y", &c), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse("x y", &c), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse("x^y", &c), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse("x$", &c), Err(PolyError::Syntax { position: 1, .. })));
    }
}
