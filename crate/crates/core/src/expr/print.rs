//! Canonical expression printing.
//!
//! The printer emits the minimal parenthesization that reproduces the tree
//! under the grammar's precedence and associativity, so `parse(print(e))`
//! rebuilds `e` node for node. Binary operators are surrounded by single
//! spaces except `^`, which binds tightly and is printed without spaces.
//!
//! One caveat for hand-built trees: a negative `Num` literal is printed with
//! a leading minus, which the parser necessarily reads back as unary minus
//! over a non-negative literal. Trees produced by `parse`, `fold`, or `diff`
//! never contain negative literals, so for those the round-trip is exact.

use std::fmt;

use super::{BinOp, Expr};

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Num(v) if *v < 0.0 => PREC_NEG,
        Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => PREC_ATOM,
        Expr::Neg(_) => PREC_NEG,
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => PREC_ADD,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => PREC_MUL,
        Expr::Bin(BinOp::Pow, ..) => PREC_POW,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        // `{}` on f64 is the shortest representation that round-trips the
        // value exactly, and always includes a digit before any exponent.
        Expr::Num(v) => write!(f, "{v}"),
        Expr::Var(v) => write!(f, "{v}"),
        Expr::Neg(a) => {
            write!(f, "-")?;
            child(a, PREC_NEG, f)
        }
        Expr::Bin(op, a, b) => {
            let (prec, sym) = match op {
                BinOp::Add => (PREC_ADD, "+"),
                BinOp::Sub => (PREC_ADD, "-"),
                BinOp::Mul => (PREC_MUL, "*"),
                BinOp::Div => (PREC_MUL, "/"),
                BinOp::Pow => (PREC_POW, "^"),
            };
            if *op == BinOp::Pow {
                // Right-associative: the left child must be an atom, while
                // the right child may be another power or a unary minus.
                child(a, PREC_POW + 1, f)?;
                write!(f, "^")?;
                child(b, PREC_NEG, f)
            } else {
                // Left-associative: an equal-precedence right child needs
                // parentheses to keep its grouping.
                child(a, prec, f)?;
                write!(f, " {sym} ")?;
                child(b, prec + 1, f)
            }
        }
        Expr::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(a, f)?;
            write!(f, ")")
        }
    }
}

fn child(e: &Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "(")?;
        write_expr(e, f)?;
        write!(f, ")")
    } else {
        write_expr(e, f)
    }
}
