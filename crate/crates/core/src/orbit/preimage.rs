//! Preimages of a target point under one generator: closed-form log
//! branches for `exp(a*z + b) + c`, Newton's method for everything else.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::expr::{Evaluation, Expr, Generator};
use crate::field::Rectangle;
use crate::scalar::Scalar;

/// Roots closer than this are reported once.
const DEDUP_DISTANCE: f64 = 1e-8;
const MAX_BRANCHES: f64 = 1e6;

/// Coefficients of `exp(a*z + b) + c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpAffine<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
}

fn const_value<T: Scalar>(e: &Expr<T>) -> Option<Complex<T>> {
    if !e.is_constant() {
        return None;
    }
    e.eval(Complex::new(T::zero(), T::zero())).ok()?.finite()
}

/// Matches `exp(u)`, `exp(u) ± c` or `c + exp(u)` with `u` affine in `z`.
pub fn exp_affine_template<T: Scalar>(e: &Expr<T>) -> Option<ExpAffine<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let (exp_arg, c) = match e {
        Expr::Exp(u) => (u.as_ref(), zero),
        Expr::Add(x, y) => match (x.as_ref(), y.as_ref()) {
            (Expr::Exp(u), k) | (k, Expr::Exp(u)) => (u.as_ref(), const_value(k)?),
            _ => return None,
        },
        Expr::Sub(x, k) => match x.as_ref() {
            Expr::Exp(u) => (u.as_ref(), -const_value(k)?),
            _ => return None,
        },
        _ => return None,
    };
    let (a, b) = exp_arg.affine_coefficients()?;
    if a == zero {
        return None;
    }
    Some(ExpAffine { a, b, c })
}

/// Every solution of `f(z) = target` inside `region` for an exp-affine `f`:
/// `z = (log(target - c) + 2πik - b) / a`.
pub fn exp_affine_preimages<T: Scalar>(
    f: &Generator<T>,
    target: Complex<T>,
    region: &Rectangle<T>,
) -> Result<Vec<Complex<T>>> {
    let tpl = exp_affine_template(&f.expr).ok_or_else(|| Error::TemplateMismatch(f.name.clone()))?;
    let w = target - tpl.c;
    if w.re == T::zero() && w.im == T::zero() {
        return Err(Error::EmptyFiber(Expr::Const(tpl.c).to_string()));
    }
    let log = w.ln();
    let two_pi_i = Complex::new(T::zero(), T::TAU());
    let base = (log - tpl.b) / tpl.a;
    let step = two_pi_i / tpl.a;

    // k-interval from each axis: lo <= base + k*step <= hi
    let mut k_lo = f64::NEG_INFINITY;
    let mut k_hi = f64::INFINITY;
    let axes = [
        (base.re, step.re, region.x_min, region.x_max),
        (base.im, step.im, region.y_min, region.y_max),
    ];
    for (p, d, lo, hi) in axes {
        let (p, d) = (p.to_f64().unwrap_or(0.0), d.to_f64().unwrap_or(0.0));
        let (lo, hi) = (lo.to_f64().unwrap_or(0.0), hi.to_f64().unwrap_or(0.0));
        if d == 0.0 {
            if p < lo || p > hi {
                return Ok(Vec::new());
            }
            continue;
        }
        let (a, b) = ((lo - p) / d, (hi - p) / d);
        k_lo = k_lo.max(a.min(b));
        k_hi = k_hi.min(a.max(b));
    }
    if k_lo > k_hi + 1.0 {
        return Ok(Vec::new());
    }
    let (first, last) = (k_lo.floor() - 1.0, k_hi.ceil() + 1.0);
    if last - first > MAX_BRANCHES {
        return Err(Error::InvalidParameter(format!(
            "region holds more than {MAX_BRANCHES} logarithm branches"
        )));
    }
    let mut out = Vec::new();
    let mut k = first;
    while k <= last {
        let shift = Complex::new(T::zero(), T::TAU() * T::lit(k));
        let z = (log + shift - tpl.b) / tpl.a;
        if region.contains(z) {
            out.push(z);
        }
        k += 1.0;
    }
    sort_points(&mut out);
    Ok(out)
}

/// Newton's method from a `seed_grid × seed_grid` lattice of cell centers.
/// Seeds that diverge, overflow or hit a critical point are dropped.
pub fn newton_preimages<T: Scalar>(
    f: &Generator<T>,
    target: Complex<T>,
    region: &Rectangle<T>,
    seed_grid: usize,
    tol: f64,
    max_steps: usize,
) -> Result<Vec<Complex<T>>> {
    if seed_grid < 2 {
        return Err(Error::InvalidParameter("seed_grid must be at least 2".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let n = T::from_usize(seed_grid).expect("seed grid size");
    let half = T::lit(0.5);
    let dx = (region.x_max - region.x_min) / n;
    let dy = (region.y_max - region.y_min) / n;
    let tol_t = T::lit(tol);
    let mut roots: Vec<Complex<T>> = Vec::new();
    for j in 0..seed_grid {
        for i in 0..seed_grid {
            let seed = Complex::new(
                region.x_min + (T::from_usize(i).unwrap() + half) * dx,
                region.y_min + (T::from_usize(j).unwrap() + half) * dy,
            );
            let Some(root) = newton_from(f, target, seed, max_steps)? else {
                continue;
            };
            let Evaluation::Finite(v) = f.eval(root)? else {
                continue;
            };
            if (v - target).norm() >= tol_t || !region.contains(root) {
                continue;
            }
            let dedup = T::lit(DEDUP_DISTANCE);
            if roots.iter().all(|r| (*r - root).norm() >= dedup) {
                roots.push(root);
            }
        }
    }
    sort_points(&mut roots);
    Ok(roots)
}

fn newton_from<T: Scalar>(
    f: &Generator<T>,
    target: Complex<T>,
    seed: Complex<T>,
    max_steps: usize,
) -> Result<Option<Complex<T>>> {
    let mut z = seed;
    let eps = T::epsilon();
    for _ in 0..max_steps {
        let Evaluation::Finite(v) = f.eval(z)? else {
            return Ok(None);
        };
        let residual = v - target;
        if residual.re == T::zero() && residual.im == T::zero() {
            return Ok(Some(z));
        }
        let Evaluation::Finite(d) = f.eval_derivative(z)? else {
            return Ok(None);
        };
        if d.re == T::zero() && d.im == T::zero() {
            return Ok(None);
        }
        let step = residual / d;
        z = z - step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Ok(None);
        }
        if step.norm() <= eps * z.norm().max(T::one()) {
            break;
        }
    }
    Ok(Some(z))
}

fn sort_points<T: Scalar>(pts: &mut [Complex<T>]) {
    pts.sort_by(|a, b| {
        a.im.partial_cmp(&b.im)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal))
    });
}
