//! Expressions in one complex variable `z` defining semigroup generators.
//!
//! The language is deliberately small: `+ - * /`, unary minus, `exp`, `sin`,
//! `cos`, the variable `z`, real literals, `i` and `pi`. Every function
//! family used by the presets is expressible, anything else is rejected at
//! parse time.

mod diff;
mod generator;
mod parse;

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use diff::differentiate;
pub use generator::{build_shifted_iterate, verify_periodicity, Generator, PeriodicityReport};
pub use parse::parse_expression;

/// Abstract syntax tree of an expression in `z`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr<T> {
    Var,
    Const(Complex<T>),
    Add(Box<Expr<T>>, Box<Expr<T>>),
    Sub(Box<Expr<T>>, Box<Expr<T>>),
    Mul(Box<Expr<T>>, Box<Expr<T>>),
    Div(Box<Expr<T>>, Box<Expr<T>>),
    Neg(Box<Expr<T>>),
    Exp(Box<Expr<T>>),
    Sin(Box<Expr<T>>),
    Cos(Box<Expr<T>>),
}

/// Result of evaluating an expression: a finite value, or the marker that
/// some intermediate quantity left the floating-point range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Evaluation<T> {
    Finite(Complex<T>),
    Overflow,
}

impl<T: Copy> Evaluation<T> {
    pub fn finite(self) -> Option<Complex<T>> {
        match self {
            Evaluation::Finite(v) => Some(v),
            Evaluation::Overflow => None,
        }
    }

    pub fn is_overflow(&self) -> bool {
        matches!(self, Evaluation::Overflow)
    }
}

enum Fault {
    Overflow,
    DivisionByZero,
}

fn checked<T: Scalar>(v: Complex<T>) -> Result<Complex<T>, Fault> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Fault::Overflow)
    }
}

impl<T: Scalar> Expr<T> {
    pub fn constant(re: T, im: T) -> Self {
        Expr::Const(Complex::new(re, im))
    }

    pub fn real(re: T) -> Self {
        Expr::Const(Complex::new(re, T::zero()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Self, b: Self) -> Self {
        Expr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Self, b: Self) -> Self {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Self, b: Self) -> Self {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Self, b: Self) -> Self {
        Expr::Div(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Self) -> Self {
        Expr::Neg(Box::new(a))
    }

    pub fn exp(a: Self) -> Self {
        Expr::Exp(Box::new(a))
    }

    pub fn sin(a: Self) -> Self {
        Expr::Sin(Box::new(a))
    }

    pub fn cos(a: Self) -> Self {
        Expr::Cos(Box::new(a))
    }

    pub fn as_const(&self) -> Option<Complex<T>> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub(crate) fn is_const_value(&self, re: T) -> bool {
        matches!(self, Expr::Const(c) if c.re == re && c.im == T::zero())
    }

    /// True when the tree contains no `Var`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Var => false,
            Expr::Const(_) => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Expr::Neg(a) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) => a.is_constant(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var | Expr::Const(_) => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.size() + b.size()
            }
            Expr::Neg(a) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) => 1 + a.size(),
        }
    }

    /// Evaluates at `z`. Any non-finite intermediate value yields
    /// [`Evaluation::Overflow`]; a zero denominator is an error.
    pub fn eval(&self, z: Complex<T>) -> Result<Evaluation<T>> {
        match self.eval_inner(z) {
            Ok(v) => Ok(Evaluation::Finite(v)),
            Err(Fault::Overflow) => Ok(Evaluation::Overflow),
            Err(Fault::DivisionByZero) => Err(Error::DivisionByZero),
        }
    }

    fn eval_inner(&self, z: Complex<T>) -> Result<Complex<T>, Fault> {
        let v = match self {
            Expr::Var => z,
            Expr::Const(c) => *c,
            Expr::Add(a, b) => a.eval_inner(z)? + b.eval_inner(z)?,
            Expr::Sub(a, b) => a.eval_inner(z)? - b.eval_inner(z)?,
            Expr::Mul(a, b) => a.eval_inner(z)? * b.eval_inner(z)?,
            Expr::Div(a, b) => {
                let num = a.eval_inner(z)?;
                let den = b.eval_inner(z)?;
                if den.re == T::zero() && den.im == T::zero() {
                    return Err(Fault::DivisionByZero);
                }
                num / den
            }
            Expr::Neg(a) => -a.eval_inner(z)?,
            Expr::Exp(a) => a.eval_inner(z)?.exp(),
            Expr::Sin(a) => a.eval_inner(z)?.sin(),
            Expr::Cos(a) => a.eval_inner(z)?.cos(),
        };
        checked(v)
    }

    /// Substitutes `inner` for every occurrence of `z`, i.e. `self ∘ inner`.
    pub fn compose(&self, inner: &Expr<T>) -> Expr<T> {
        let sub = |e: &Expr<T>| Box::new(e.compose(inner));
        match self {
            Expr::Var => inner.clone(),
            Expr::Const(c) => Expr::Const(*c),
            Expr::Add(a, b) => Expr::Add(sub(a), sub(b)),
            Expr::Sub(a, b) => Expr::Sub(sub(a), sub(b)),
            Expr::Mul(a, b) => Expr::Mul(sub(a), sub(b)),
            Expr::Div(a, b) => Expr::Div(sub(a), sub(b)),
            Expr::Neg(a) => Expr::Neg(sub(a)),
            Expr::Exp(a) => Expr::Exp(sub(a)),
            Expr::Sin(a) => Expr::Sin(sub(a)),
            Expr::Cos(a) => Expr::Cos(sub(a)),
        }
    }

    pub fn differentiate(&self) -> Expr<T> {
        differentiate(self)
    }

    /// If the expression is affine in `z`, returns `(a, b)` with `e = a*z + b`.
    pub fn affine_coefficients(&self) -> Option<(Complex<T>, Complex<T>)> {
        let zero = Complex::new(T::zero(), T::zero());
        match self {
            Expr::Var => Some((Complex::new(T::one(), T::zero()), zero)),
            Expr::Const(c) => Some((zero, *c)),
            Expr::Add(a, b) => {
                let (a1, b1) = a.affine_coefficients()?;
                let (a2, b2) = b.affine_coefficients()?;
                Some((a1 + a2, b1 + b2))
            }
            Expr::Sub(a, b) => {
                let (a1, b1) = a.affine_coefficients()?;
                let (a2, b2) = b.affine_coefficients()?;
                Some((a1 - a2, b1 - b2))
            }
            Expr::Neg(a) => {
                let (a1, b1) = a.affine_coefficients()?;
                Some((-a1, -b1))
            }
            Expr::Mul(a, b) => {
                let (a1, b1) = a.affine_coefficients()?;
                let (a2, b2) = b.affine_coefficients()?;
                if a1 == zero {
                    Some((b1 * a2, b1 * b2))
                } else if a2 == zero {
                    Some((a1 * b2, b1 * b2))
                } else {
                    None
                }
            }
            Expr::Div(a, b) => {
                let (a1, b1) = a.affine_coefficients()?;
                let (a2, b2) = b.affine_coefficients()?;
                if a2 != zero || b2 == zero {
                    return None;
                }
                Some((a1 / b2, b1 / b2))
            }
            Expr::Exp(_) | Expr::Sin(_) | Expr::Cos(_) => {
                if self.is_constant() {
                    match self.eval(zero) {
                        Ok(Evaluation::Finite(c)) => Some((zero, c)),
                        _ => None,
                    }
                } else {
                    None
                }
            }
        }
    }
}

fn fmt_real<T: Scalar>(f: &mut fmt::Formatter<'_>, x: T, suffix: &str) -> fmt::Result {
    if x.is_sign_negative() {
        write!(f, "(-{}{})", x.abs(), suffix)
    } else {
        write!(f, "{}{}", x, suffix)
    }
}

/// Canonical, fully parenthesized form accepted by [`parse_expression`].
impl<T: Scalar> fmt::Display for Expr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var => f.write_str("z"),
            Expr::Const(c) => {
                if c.im == T::zero() {
                    fmt_real(f, c.re, "")
                } else if c.re == T::zero() {
                    fmt_real(f, c.im, "i")
                } else {
                    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
                    if c.re.is_sign_negative() {
                        write!(f, "(-{}{}{}i)", c.re.abs(), sign, c.im.abs())
                    } else {
                        write!(f, "({}{}{}i)", c.re, sign, c.im.abs())
                    }
                }
            }
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
        }
    }
}
