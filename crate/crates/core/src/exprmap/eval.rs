use super::ast::{BinOp, Expr, Func, Var};
use super::jet::{Jet2, Scalar};
use crate::grid::GridSpec;
use rayon::prelude::*;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalErrorKind {
    DomainViolation,
    DivisionByZero,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalErrorKind::DomainViolation => write!(f, "domain violation"),
            EvalErrorKind::DivisionByZero => write!(f, "division by zero"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at (u, v) = ({u}, {v}): {detail}")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub u: f64,
    pub v: f64,
    pub detail: String,
}

struct Ctx<S> {
    u: S,
    v: S,
    at: (f64, f64),
}

impl<S> Ctx<S> {
    fn fail(&self, kind: EvalErrorKind, detail: impl Into<String>) -> EvalError {
        EvalError { kind, u: self.at.0, v: self.at.1, detail: detail.into() }
    }
}

/// Evaluate `e` with `u` and `v` bound to the given scalars. `at` is the
/// parameter point reported in errors.
pub fn eval_scalar<S: Scalar>(e: &Expr, u: S, v: S, at: (f64, f64)) -> Result<S, EvalError> {
    let ctx = Ctx { u, v, at };
    let r = walk(e, &ctx)?;
    if !r.is_finite() {
        return Err(ctx.fail(EvalErrorKind::DomainViolation, "non-finite result"));
    }
    Ok(r)
}

pub fn eval_f64(e: &Expr, u: f64, v: f64) -> Result<f64, EvalError> {
    eval_scalar(e, u, v, (u, v))
}

/// Value and all partials up to order two; `u` is seeded with `du = 1` and
/// `v` with `dv = 1`.
pub fn eval_jet(e: &Expr, u: f64, v: f64) -> Result<Jet2, EvalError> {
    eval_scalar(e, Jet2::var_u(u), Jet2::var_v(v), (u, v))
}

/// [`eval_jet`] at every node, node-major in the order of
/// [`GridSpec::points`]. Errors stay per node.
pub fn eval_grid(e: &Expr, grid: &GridSpec) -> Vec<Result<Jet2, EvalError>> {
    (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (u, v) = grid.point(k);
            eval_jet(e, u, v)
        })
        .collect()
}

/// Constant value of a variable-free subtree.
pub fn constant_value(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(c) => Some(*c),
        Expr::Var(_) => None,
        Expr::Neg(a) => constant_value(a).map(|x| -x),
        Expr::Bin(..) | Expr::Call(..) => {
            if has_var(e) {
                None
            } else {
                eval_f64(e, 0.0, 0.0).ok()
            }
        }
    }
}

fn has_var(e: &Expr) -> bool {
    match e {
        Expr::Num(_) => false,
        Expr::Var(_) => true,
        Expr::Neg(a) | Expr::Call(_, a) => has_var(a),
        Expr::Bin(_, a, b) => has_var(a) || has_var(b),
    }
}

/// `p/q` with small odd `q`, if `r` is such a rational.
fn odd_rational(r: f64) -> Option<(i64, i64)> {
    (1..=63).step_by(2).find_map(|q| {
        let pq = r * q as f64;
        let p = pq.round();
        ((pq - p).abs() < 1e-12).then_some((p as i64, q))
    })
}

fn walk<S: Scalar>(e: &Expr, c: &Ctx<S>) -> Result<S, EvalError> {
    use EvalErrorKind::*;
    Ok(match e {
        Expr::Num(x) => S::cst(*x),
        Expr::Var(Var::U) => c.u,
        Expr::Var(Var::V) => c.v,
        Expr::Neg(a) => -walk(a, c)?,
        Expr::Bin(op, a, b) => {
            if *op == BinOp::Pow {
                return pow(a, b, c);
            }
            let x = walk(a, c)?;
            let y = walk(b, c)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y.re() == 0.0 {
                        return Err(c.fail(DivisionByZero, "zero denominator"));
                    }
                    x / y
                }
                BinOp::Pow => unreachable!(),
            }
        }
        Expr::Call(f, a) => {
            let x = walk(a, c)?;
            let r = x.re();
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => {
                    if r.cos() == 0.0 {
                        return Err(c.fail(DomainViolation, "tan at a pole"));
                    }
                    x.tan()
                }
                Func::Exp => x.exp(),
                Func::Log => {
                    if r <= 0.0 {
                        return Err(c.fail(DomainViolation, "log of non-positive value"));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if r < 0.0 || (r == 0.0 && S::DIFFERENTIABLE) {
                        return Err(c.fail(DomainViolation, "sqrt outside its smooth domain"));
                    }
                    x.sqrt()
                }
                Func::Abs => {
                    if r == 0.0 && S::DIFFERENTIABLE {
                        return Err(c.fail(DomainViolation, "abs is not differentiable at 0"));
                    }
                    x.abs()
                }
            }
        }
    })
}

fn pow<S: Scalar>(a: &Expr, b: &Expr, c: &Ctx<S>) -> Result<S, EvalError> {
    use EvalErrorKind::*;
    let base = walk(a, c)?;
    let br = base.re();
    if let Some(p) = constant_value(b) {
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            let n = p as i32;
            if n < 0 && br == 0.0 {
                return Err(c.fail(DivisionByZero, "zero base with negative exponent"));
            }
            return Ok(base.powi(n));
        }
        if br > 0.0 {
            return Ok(base.powf(p));
        }
        if br == 0.0 {
            if !S::DIFFERENTIABLE && p > 0.0 {
                return Ok(S::zero());
            }
            return Err(c.fail(DomainViolation, "zero base with non-integer exponent"));
        }
        return match odd_rational(p) {
            Some((num, _)) => {
                let mag = (-base).powf(p);
                Ok(if num % 2 == 0 { mag } else { -mag })
            }
            None => Err(c.fail(DomainViolation, "negative base with irrational exponent")),
        };
    }
    if br <= 0.0 {
        return Err(c.fail(DomainViolation, "variable exponent needs a positive base"));
    }
    let ex = walk(b, c)?;
    Ok((ex * base.ln()).exp())
}
