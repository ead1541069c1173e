//! Recursive-descent parser for the expression language.
//!
//! Precedence from loosest to tightest: `+ -`, `* /`, unary `-`, atoms.
//! Binary operators associate to the left. Subtrees without `z` are folded
//! into a single constant, so `2*pi` and `1-2i` are literals.

use num_complex::Complex;

use super::{Evaluation, Expr};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
enum Tok<T> {
    Num(Complex<T>),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek_byte(&self, at: usize) -> Option<u8> {
        self.src.as_bytes().get(at).copied()
    }

    /// Returns the next token and its starting byte offset.
    fn next<T: Scalar>(&mut self) -> Result<(Tok<T>, usize)> {
        self.skip_ws();
        let start = self.pos;
        let Some(b) = self.peek_byte(start) else {
            return Ok((Tok::End, start));
        };
        let single = match b {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            return Ok((tok, start));
        }
        if b.is_ascii_digit() || b == b'.' {
            return self.number(start).map(|t| (t, start));
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            let mut end = start;
            while self.peek_byte(end).is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok((Tok::Ident(self.src[start..end].to_string()), start));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(Error::syntax(start, format!("unexpected character `{ch}`")))
    }

    fn number<T: Scalar>(&mut self, start: usize) -> Result<Tok<T>> {
        let digits = |lx: &Self, mut at: usize| {
            while lx.peek_byte(at).is_some_and(|c| c.is_ascii_digit()) {
                at += 1;
            }
            at
        };
        let mut end = digits(self, start);
        let int_len = end - start;
        let mut frac_len = 0;
        if self.peek_byte(end) == Some(b'.') {
            let after = digits(self, end + 1);
            frac_len = after - end - 1;
            end = after;
        }
        if int_len == 0 && frac_len == 0 {
            return Err(Error::syntax(start, "malformed number"));
        }
        if matches!(self.peek_byte(end), Some(b'e' | b'E')) {
            let mut at = end + 1;
            if matches!(self.peek_byte(at), Some(b'+' | b'-')) {
                at += 1;
            }
            let after = digits(self, at);
            if after == at {
                return Err(Error::syntax(end, "malformed exponent"));
            }
            end = after;
        }
        let value: T = self.src[start..end]
            .parse()
            .map_err(|_| Error::syntax(start, "malformed number"))?;
        if !value.is_finite() {
            return Err(Error::syntax(start, "literal out of range"));
        }
        // `2i`, `0.5i`: an `i` glued to the literal makes it imaginary
        let imaginary = self.peek_byte(end) == Some(b'i')
            && !self.peek_byte(end + 1).is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_');
        if imaginary {
            end += 1;
        }
        self.pos = end;
        Ok(Tok::Num(if imaginary {
            Complex::new(T::zero(), value)
        } else {
            Complex::new(value, T::zero())
        }))
    }
}

struct Parser<'a, T> {
    lexer: Lexer<'a>,
    tok: Tok<T>,
    at: usize,
}

impl<'a, T: Scalar> Parser<'a, T> {
    fn new(src: &'a str) -> Result<Self> {
        let mut lexer = Lexer { src, pos: 0 };
        let (tok, at) = lexer.next()?;
        Ok(Parser { lexer, tok, at })
    }

    fn bump(&mut self) -> Result<()> {
        let (tok, at) = self.lexer.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn unexpected(&self) -> Error {
        let what = match &self.tok {
            Tok::End => "unexpected end of input".to_string(),
            Tok::RParen => "unexpected `)`".to_string(),
            Tok::Ident(name) => format!("unexpected identifier `{name}`"),
            Tok::Num(_) => "unexpected number".to_string(),
            _ => "unexpected operator".to_string(),
        };
        Error::syntax(self.at, what)
    }

    fn sum(&mut self) -> Result<Expr<T>> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.tok {
                Tok::Plus => Expr::Add,
                Tok::Minus => Expr::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.product()?;
            lhs = fold(op(Box::new(lhs), Box::new(rhs)));
        }
    }

    fn product(&mut self) -> Result<Expr<T>> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => Expr::Mul,
                Tok::Slash => Expr::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = fold(op(Box::new(lhs), Box::new(rhs)));
        }
    }

    fn unary(&mut self) -> Result<Expr<T>> {
        if self.tok == Tok::Minus {
            self.bump()?;
            let inner = self.unary()?;
            return Ok(fold(Expr::neg(inner)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr<T>> {
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Num(c) => {
                self.bump()?;
                Ok(Expr::Const(c))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.sum()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let start = self.at;
                let func: Option<fn(Expr<T>) -> Expr<T>> = match name.as_str() {
                    "z" => {
                        self.bump()?;
                        return Ok(Expr::Var);
                    }
                    "i" => {
                        self.bump()?;
                        return Ok(Expr::constant(T::zero(), T::one()));
                    }
                    "pi" => {
                        self.bump()?;
                        return Ok(Expr::real(T::PI()));
                    }
                    "exp" => Some(Expr::exp),
                    "sin" => Some(Expr::sin),
                    "cos" => Some(Expr::cos),
                    _ => None,
                };
                let Some(func) = func else {
                    return Err(Error::syntax(start, format!("unknown identifier `{name}`")));
                };
                self.bump()?;
                if self.tok != Tok::LParen {
                    return Err(Error::syntax(self.at, format!("expected `(` after `{name}`")));
                }
                self.bump()?;
                let arg = self.sum()?;
                self.expect_rparen()?;
                Ok(fold(func(arg)))
            }
            other => {
                self.tok = other;
                Err(self.unexpected())
            }
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.tok {
            Tok::RParen => self.bump(),
            Tok::End => Err(Error::syntax(self.at, "expected `)` before end of input")),
            _ => Err(Error::syntax(self.at, "expected `)`")),
        }
    }
}

/// Collapses a node whose operands are all constants, unless evaluating it
/// faults (division by zero, overflow): those stay symbolic.
fn fold<T: Scalar>(e: Expr<T>) -> Expr<T> {
    let foldable = match &e {
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            a.as_const().is_some() && b.as_const().is_some()
        }
        Expr::Neg(a) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) => a.as_const().is_some(),
        _ => false,
    };
    if foldable {
        if let Ok(Evaluation::Finite(v)) = e.eval(Complex::new(T::zero(), T::zero())) {
            return Expr::Const(v);
        }
    }
    e
}

/// Parses the textual form of an expression in `z`.
pub fn parse_expression<T: Scalar>(text: &str) -> Result<Expr<T>> {
    let mut parser = Parser::<T>::new(text)?;
    if parser.tok == Tok::End {
        return Err(Error::syntax(parser.at, "empty expression"));
    }
    let e = parser.sum()?;
    if parser.tok != Tok::End {
        return Err(parser.unexpected());
    }
    Ok(e)
}
