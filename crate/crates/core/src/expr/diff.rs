//! Exact symbolic differentiation and constant folding.
//!
//! `diff` applies the textbook rules (product, quotient, chain, power) and
//! immediately folds the result, so derivatives come out in a compact
//! canonical form: `d/dx1 (x1^2)` is the tree `2*x1`, not `2*x1^1*1`.
//!
//! Folding is conservative: it only evaluates literal subtrees whose
//! operation is defined and finite (so `1/0` is *not* folded away and still
//! errors at evaluation time), and it applies the identity eliminations that
//! differentiation relies on (`0+e`, `0*e`, `1*e`, `e^1`, `--e`, ...). No
//! deeper algebraic simplification is attempted.
//!
//! Folded trees stay inside the parser's image: a negative constant is
//! represented as unary minus applied to a non-negative literal, exactly as
//! the parser would build it, so printing and re-parsing a folded tree is the
//! identity.

use super::eval::{apply_bin, apply_func};
use super::{BinOp, Expr, Var};

pub(super) fn diff(e: &Expr, var: Var) -> Expr {
    fold(diff_raw(e, var))
}

fn diff_raw(e: &Expr, var: Var) -> Expr {
    match e {
        Expr::Num(_) => Expr::Num(0.0),
        Expr::Var(v) => {
            if *v == var {
                Expr::Num(1.0)
            } else {
                Expr::Num(0.0)
            }
        }
        Expr::Neg(a) => Expr::Neg(Box::new(diff_raw(a, var))),
        Expr::Bin(op, a, b) => diff_bin(*op, a, b, var),
        Expr::Call(f, a) => {
            let da = diff_raw(a, var);
            let outer = match f {
                super::Func::Sin => Expr::Call(super::Func::Cos, a.clone()),
                super::Func::Cos => Expr::Neg(Box::new(Expr::Call(super::Func::Sin, a.clone()))),
                super::Func::Exp => Expr::Call(super::Func::Exp, a.clone()),
                // d(ln u) = u'/u and d(sqrt u) = u' / (2*sqrt u)
                super::Func::Ln => {
                    return Expr::Bin(BinOp::Div, Box::new(da), a.clone());
                }
                super::Func::Sqrt => {
                    let two_sqrt = Expr::Bin(
                        BinOp::Mul,
                        Box::new(Expr::Num(2.0)),
                        Box::new(Expr::Call(super::Func::Sqrt, a.clone())),
                    );
                    return Expr::Bin(BinOp::Div, Box::new(da), Box::new(two_sqrt));
                }
            };
            Expr::Bin(BinOp::Mul, Box::new(outer), Box::new(da))
        }
    }
}

fn diff_bin(op: BinOp, a: &Expr, b: &Expr, var: Var) -> Expr {
    let da = || diff_raw(a, var);
    let db = || diff_raw(b, var);
    match op {
        BinOp::Add => Expr::Bin(BinOp::Add, Box::new(da()), Box::new(db())),
        BinOp::Sub => Expr::Bin(BinOp::Sub, Box::new(da()), Box::new(db())),
        BinOp::Mul => Expr::Bin(
            BinOp::Add,
            Box::new(Expr::Bin(BinOp::Mul, Box::new(da()), Box::new(b.clone()))),
            Box::new(Expr::Bin(BinOp::Mul, Box::new(a.clone()), Box::new(db()))),
        ),
        BinOp::Div => {
            // (u/v)' = (u'v - uv') / v^2
            let num = Expr::Bin(
                BinOp::Sub,
                Box::new(Expr::Bin(BinOp::Mul, Box::new(da()), Box::new(b.clone()))),
                Box::new(Expr::Bin(BinOp::Mul, Box::new(a.clone()), Box::new(db()))),
            );
            let den = Expr::Bin(BinOp::Pow, Box::new(b.clone()), Box::new(Expr::Num(2.0)));
            Expr::Bin(BinOp::Div, Box::new(num), Box::new(den))
        }
        BinOp::Pow => {
            if let Some(c) = as_literal(b) {
                // u^c with constant exponent: c * u^(c-1) * u'
                let power = Expr::Bin(BinOp::Pow, Box::new(a.clone()), Box::new(literal(c - 1.0)));
                return Expr::Bin(
                    BinOp::Mul,
                    Box::new(Expr::Bin(BinOp::Mul, Box::new(literal(c)), Box::new(power))),
                    Box::new(da()),
                );
            }
            if let Some(c) = as_literal(a) {
                if c > 0.0 {
                    // c^v with positive constant base: c^v * ln(c) * v'
                    let power = Expr::Bin(BinOp::Pow, Box::new(a.clone()), Box::new(b.clone()));
                    return Expr::Bin(
                        BinOp::Mul,
                        Box::new(Expr::Bin(BinOp::Mul, Box::new(power), Box::new(literal(c.ln())))),
                        Box::new(db()),
                    );
                }
                // A non-positive constant base falls through to the general
                // rule, whose ln(u) correctly reports the domain error.
            }
            // General u^v: u^v * (v' * ln u + v * u'/u)
            let power = Expr::Bin(BinOp::Pow, Box::new(a.clone()), Box::new(b.clone()));
            let ln_u = Expr::Call(super::Func::Ln, Box::new(a.clone()));
            let term1 = Expr::Bin(BinOp::Mul, Box::new(db()), Box::new(ln_u));
            let term2 = Expr::Bin(
                BinOp::Mul,
                Box::new(b.clone()),
                Box::new(Expr::Bin(BinOp::Div, Box::new(da()), Box::new(a.clone()))),
            );
            Expr::Bin(
                BinOp::Mul,
                Box::new(power),
                Box::new(Expr::Bin(BinOp::Add, Box::new(term1), Box::new(term2))),
            )
        }
    }
}

/// A literal in canonical form: non-negative values are bare, negative values
/// are unary minus over a bare literal (so folded trees re-parse exactly).
fn literal(v: f64) -> Expr {
    if v < 0.0 {
        Expr::Neg(Box::new(Expr::Num(-v)))
    } else {
        // Collapses -0.0 to +0.0 for a canonical zero.
        Expr::Num(v + 0.0)
    }
}

/// Extract a constant from a canonical tree: `Num(v)` or `Neg(Num(v))`.
fn as_literal(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        Expr::Neg(inner) => match inner.as_ref() {
            Expr::Num(v) => Some(-*v),
            _ => None,
        },
        _ => None,
    }
}

fn is_literal(e: &Expr, v: f64) -> bool {
    as_literal(e) == Some(v)
}

pub(super) fn fold(e: Expr) -> Expr {
    match e {
        Expr::Num(v) => literal(v),
        Expr::Var(_) => e,
        Expr::Neg(a) => fold_neg(fold(*a)),
        Expr::Bin(op, a, b) => fold_node(op, fold(*a), fold(*b)),
        Expr::Call(f, a) => {
            let a = fold(*a);
            if let Some(v) = as_literal(&a) {
                if let Ok(value) = apply_func(f, v) {
                    if value.is_finite() {
                        return literal(value);
                    }
                }
            }
            Expr::Call(f, Box::new(a))
        }
    }
}

pub(super) fn fold_neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) => literal(-v),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

/// Build `a <op> b` applying the folding rules at this node only
/// (both operands are assumed already folded).
pub(super) fn fold_node(op: BinOp, a: Expr, b: Expr) -> Expr {
    // Literal-literal: evaluate when defined and finite. Out-of-domain or
    // overflowing literal operations are kept as trees so that evaluation
    // reports them.
    if let (Some(x), Some(y)) = (as_literal(&a), as_literal(&b)) {
        if let Ok(value) = apply_bin(op, x, y) {
            if value.is_finite() {
                return literal(value);
            }
        }
        return Expr::Bin(op, Box::new(a), Box::new(b));
    }
    match op {
        BinOp::Add => {
            if is_literal(&a, 0.0) {
                return b;
            }
            if is_literal(&b, 0.0) {
                return a;
            }
        }
        BinOp::Sub => {
            if is_literal(&b, 0.0) {
                return a;
            }
            if is_literal(&a, 0.0) {
                return fold_neg(b);
            }
        }
        BinOp::Mul => {
            if is_literal(&a, 0.0) || is_literal(&b, 0.0) {
                return Expr::Num(0.0);
            }
            if is_literal(&a, 1.0) {
                return b;
            }
            if is_literal(&b, 1.0) {
                return a;
            }
        }
        BinOp::Div => {
            if is_literal(&b, 1.0) {
                return a;
            }
        }
        BinOp::Pow => {
            if is_literal(&b, 1.0) {
                return a;
            }
            if is_literal(&b, 0.0) {
                return Expr::Num(1.0);
            }
            if is_literal(&a, 1.0) {
                return Expr::Num(1.0);
            }
        }
    }
    Expr::Bin(op, Box::new(a), Box::new(b))
}
