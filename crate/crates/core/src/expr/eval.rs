//! Expression evaluation.
//!
//! Evaluation binds `x1..xn`, `y1..yk` and `z` to IEEE double-precision
//! values. Out-of-domain operations are reported as errors rather than
//! returned as NaN; a final guard converts any NaN produced by arithmetic on
//! infinities (e.g. `inf - inf` after an overflow) into an error as well.

use super::{BinOp, Expr, Func, Var};

/// Coordinate bindings for evaluation.
///
/// A context over base coordinates only is written `EvalContext::base(x)`;
/// energy-like expressions additionally bind fiber coordinates and `z`.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    /// Base coordinates `x1..xn`.
    pub x: &'a [f64],
    /// Fiber (or dual fiber) coordinates `y1..yk`.
    pub y: &'a [f64],
    /// Dissipation coordinate `z`, when the state carries one.
    pub z: Option<f64>,
}

impl<'a> EvalContext<'a> {
    /// A context binding base coordinates only.
    pub fn base(x: &'a [f64]) -> EvalContext<'a> {
        EvalContext { x, y: &[], z: None }
    }

    fn lookup(&self, var: Var) -> Result<f64, EvalError> {
        match var {
            Var::X(i) => self.x.get(i).copied(),
            Var::Y(i) => self.y.get(i).copied(),
            Var::Z => self.z,
        }
        .ok_or(EvalError::UnboundVariable(var))
    }
}

/// Error produced while evaluating an expression.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    /// The expression references a variable the context does not bind
    /// (wrong kind, or index beyond the declared dimension).
    #[error("unbound variable `{0}`")]
    UnboundVariable(Var),
    /// Division by zero.
    #[error("division by zero (numerator {numerator})")]
    DivisionByZero {
        /// Value of the numerator at the point of failure.
        numerator: f64,
    },
    /// `ln` of a non-positive argument.
    #[error("ln of non-positive value {arg}")]
    LnNonPositive {
        /// The offending argument.
        arg: f64,
    },
    /// `sqrt` of a negative argument.
    #[error("sqrt of negative value {arg}")]
    SqrtNegative {
        /// The offending argument.
        arg: f64,
    },
    /// A power with no real value: negative base with non-integer exponent,
    /// or zero base with negative exponent.
    #[error("{base}^{exponent} is undefined over the reals")]
    PowUndefined {
        /// Base of the power.
        base: f64,
        /// Exponent of the power.
        exponent: f64,
    },
    /// Arithmetic on infinities produced NaN (e.g. `inf - inf`).
    #[error("operation `{op}` produced NaN from operands {lhs} and {rhs}")]
    NanProduced {
        /// Operator symbol.
        op: &'static str,
        /// Left operand value.
        lhs: f64,
        /// Right operand value.
        rhs: f64,
    },
}

impl Expr {
    /// Evaluate the expression under the given bindings.
    pub fn eval(&self, ctx: &EvalContext<'_>) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(v) => ctx.lookup(*v),
            Expr::Neg(e) => Ok(-e.eval(ctx)?),
            Expr::Bin(op, a, b) => {
                let lhs = a.eval(ctx)?;
                let rhs = b.eval(ctx)?;
                apply_bin(*op, lhs, rhs)
            }
            Expr::Call(f, a) => {
                let arg = a.eval(ctx)?;
                apply_func(*f, arg)
            }
        }
    }
}

pub(super) fn apply_bin(op: BinOp, lhs: f64, rhs: f64) -> Result<f64, EvalError> {
    let value = match op {
        BinOp::Add => lhs + rhs,
        BinOp::Sub => lhs - rhs,
        BinOp::Mul => lhs * rhs,
        BinOp::Div => {
            if rhs == 0.0 {
                return Err(EvalError::DivisionByZero { numerator: lhs });
            }
            lhs / rhs
        }
        BinOp::Pow => {
            if lhs == 0.0 && rhs < 0.0 {
                return Err(EvalError::PowUndefined { base: lhs, exponent: rhs });
            }
            if lhs < 0.0 && rhs.fract() != 0.0 {
                return Err(EvalError::PowUndefined { base: lhs, exponent: rhs });
            }
            lhs.powf(rhs)
        }
    };
    if value.is_nan() {
        let op = match op {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        };
        return Err(EvalError::NanProduced { op, lhs, rhs });
    }
    Ok(value)
}

pub(super) fn apply_func(f: Func, arg: f64) -> Result<f64, EvalError> {
    let value = match f {
        Func::Sin => arg.sin(),
        Func::Cos => arg.cos(),
        Func::Exp => arg.exp(),
        Func::Ln => {
            if arg <= 0.0 {
                return Err(EvalError::LnNonPositive { arg });
            }
            arg.ln()
        }
        Func::Sqrt => {
            if arg < 0.0 {
                return Err(EvalError::SqrtNegative { arg });
            }
            arg.sqrt()
        }
    };
    if value.is_nan() {
        // sin/cos of an infinite argument is the only remaining NaN source.
        return Err(EvalError::NanProduced { op: f.name(), lhs: arg, rhs: arg });
    }
    Ok(value)
}
