//! Structural differentiation with 0/1 absorption.

use super::Expr;
use crate::scalar::Scalar;

fn is_zero<T: Scalar>(e: &Expr<T>) -> bool {
    matches!(e, Expr::Const(c) if c.re == T::zero() && c.im == T::zero())
}

fn is_one<T: Scalar>(e: &Expr<T>) -> bool {
    e.is_const_value(T::one())
}

fn zero<T: Scalar>() -> Expr<T> {
    Expr::real(T::zero())
}

fn s_add<T: Scalar>(a: Expr<T>, b: Expr<T>) -> Expr<T> {
    if is_zero(&a) {
        b
    } else if is_zero(&b) {
        a
    } else {
        Expr::add(a, b)
    }
}

fn s_sub<T: Scalar>(a: Expr<T>, b: Expr<T>) -> Expr<T> {
    if is_zero(&b) {
        a
    } else if is_zero(&a) {
        s_neg(b)
    } else {
        Expr::sub(a, b)
    }
}

fn s_mul<T: Scalar>(a: Expr<T>, b: Expr<T>) -> Expr<T> {
    if is_zero(&a) || is_zero(&b) {
        zero()
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Expr::mul(a, b)
    }
}

fn s_div<T: Scalar>(a: Expr<T>, b: Expr<T>) -> Expr<T> {
    if is_zero(&a) {
        zero()
    } else if is_one(&b) {
        a
    } else {
        Expr::div(a, b)
    }
}

fn s_neg<T: Scalar>(a: Expr<T>) -> Expr<T> {
    if is_zero(&a) {
        zero()
    } else {
        Expr::neg(a)
    }
}

/// Returns `d e / dz`.
pub fn differentiate<T: Scalar>(e: &Expr<T>) -> Expr<T> {
    match e {
        Expr::Var => Expr::real(T::one()),
        Expr::Const(_) => zero(),
        Expr::Add(a, b) => s_add(differentiate(a), differentiate(b)),
        Expr::Sub(a, b) => s_sub(differentiate(a), differentiate(b)),
        Expr::Mul(a, b) => s_add(
            s_mul(differentiate(a), (**b).clone()),
            s_mul((**a).clone(), differentiate(b)),
        ),
        Expr::Div(a, b) => s_div(
            s_sub(
                s_mul(differentiate(a), (**b).clone()),
                s_mul((**a).clone(), differentiate(b)),
            ),
            s_mul((**b).clone(), (**b).clone()),
        ),
        Expr::Neg(a) => s_neg(differentiate(a)),
        Expr::Exp(u) => s_mul(differentiate(u), e.clone()),
        Expr::Sin(u) => s_mul(differentiate(u), Expr::cos((**u).clone())),
        Expr::Cos(u) => s_mul(differentiate(u), s_neg(Expr::sin((**u).clone()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    #[test]
    fn chain_rule_through_exp() {
        let lam = Expr::real(0.3);
        let e = Expr::exp(Expr::mul(lam.clone(), Expr::Var));
        assert_eq!(differentiate(&e), Expr::mul(lam, e));
    }

    #[test]
    fn linearity() {
        let gamma = Expr::real(0.5);
        let e = Expr::add(Expr::Var, Expr::mul(gamma.clone(), Expr::sin(Expr::Var)));
        let expected = Expr::add(Expr::real(1.0), Expr::mul(gamma, Expr::cos(Expr::Var)));
        assert_eq!(differentiate(&e), expected);
    }

    #[test]
    fn constants_vanish() {
        assert_eq!(differentiate(&Expr::<f64>::constant(2.0, -1.0)), Expr::real(0.0));
        let e: Expr<f64> = parse_expression("exp(1+i) * 3").unwrap();
        assert_eq!(differentiate(&e), Expr::real(0.0));
    }

    #[test]
    fn cosine_and_negation() {
        let e: Expr<f64> = parse_expression("cos(z)").unwrap();
        assert_eq!(differentiate(&e), Expr::neg(Expr::sin(Expr::Var)));
        let e: Expr<f64> = parse_expression("-exp(-z)").unwrap();
        assert_eq!(
            differentiate(&e),
            Expr::neg(Expr::mul(
                Expr::neg(Expr::real(1.0)),
                Expr::exp(Expr::neg(Expr::Var))
            ))
        );
    }

    #[test]
    fn quotient_rule() {
        let e: Expr<f64> = parse_expression("1/z").unwrap();
        assert_eq!(
            differentiate(&e),
            Expr::div(Expr::neg(Expr::real(1.0)), Expr::mul(Expr::Var, Expr::Var))
        );
    }
}
