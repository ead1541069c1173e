use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{differentiate, parse_expression, Evaluation, Expr};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const PERIODICITY_SEED: u64 = 0x9e37_79b9_7f4a_7c15;
const PERIODICITY_RADIUS: f64 = 10.0;

/// One generator of a semigroup, with its cached derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator<T> {
    pub name: String,
    pub expr: Expr<T>,
    pub derivative: Expr<T>,
    /// Asserted by the user, never computed.
    pub bounded_type: bool,
    /// Claimed period; check with [`verify_periodicity`] before relying on it.
    pub period: Option<Complex<T>>,
}

impl<T: Scalar> Generator<T> {
    pub fn new(name: impl Into<String>, expr: Expr<T>) -> Self {
        let derivative = differentiate(&expr);
        Generator { name: name.into(), expr, derivative, bounded_type: false, period: None }
    }

    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        Ok(Self::new(name, parse_expression(text)?))
    }

    pub fn with_bounded_type(mut self, bounded_type: bool) -> Self {
        self.bounded_type = bounded_type;
        self
    }

    pub fn with_period(mut self, period: Option<Complex<T>>) -> Self {
        self.period = period;
        self
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Evaluation<T>> {
        self.expr.eval(z)
    }

    pub fn eval_derivative(&self, z: Complex<T>) -> Result<Evaluation<T>> {
        self.derivative.eval(z)
    }
}

/// Builds `g = f^k + p` by syntactic k-fold self-composition.
pub fn build_shifted_iterate<T: Scalar>(f: &Generator<T>, k: u32, p: Complex<T>) -> Result<Generator<T>> {
    if k == 0 {
        return Err(Error::InvalidParameter("iterate count k must be at least 1".into()));
    }
    let mut expr = f.expr.clone();
    for _ in 1..k {
        expr = f.expr.compose(&expr);
    }
    let shifted = p.re != T::zero() || p.im != T::zero();
    if shifted {
        expr = Expr::add(expr, Expr::Const(p));
    }
    let name = match (k, shifted) {
        (1, false) => f.name.clone(),
        (1, true) => format!("{} + {}", f.name, Expr::Const(p)),
        (_, false) => format!("{}^{}", f.name, k),
        (_, true) => format!("{}^{} + {}", f.name, k, Expr::Const(p)),
    };
    Ok(Generator::new(name, expr).with_bounded_type(f.bounded_type))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicityReport {
    pub passed: bool,
    /// Samples where both sides were finite.
    pub samples_used: usize,
    pub samples_overflowed: usize,
    pub max_deviation: f64,
}

/// Tests `|f(z + p) - f(z)| < tol` on a fixed pseudo-random sample of the
/// disc `|z| <= 10`.
pub fn verify_periodicity<T: Scalar>(
    f: &Generator<T>,
    p: Complex<T>,
    sample_count: usize,
    tol: f64,
) -> Result<PeriodicityReport> {
    if sample_count == 0 {
        return Err(Error::InvalidParameter("sample_count must be at least 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PERIODICITY_SEED);
    let scale = PERIODICITY_RADIUS / std::f64::consts::SQRT_2;
    let mut used = 0;
    let mut overflowed = 0;
    let mut max_deviation = 0.0f64;
    for _ in 0..sample_count {
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        let z = Complex::new(T::lit(re * scale), T::lit(im * scale));
        match (f.eval(z)?, f.eval(z + p)?) {
            (Evaluation::Finite(a), Evaluation::Finite(b)) => {
                used += 1;
                let d = (b - a).norm().to_f64().unwrap_or(f64::INFINITY);
                max_deviation = max_deviation.max(d);
            }
            _ => overflowed += 1,
        }
    }
    if used == 0 {
        return Err(Error::InsufficientSamples);
    }
    Ok(PeriodicityReport {
        passed: max_deviation < tol,
        samples_used: used,
        samples_overflowed: overflowed,
        max_deviation,
    })
}
