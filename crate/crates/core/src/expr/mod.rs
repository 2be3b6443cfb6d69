//! Symbolic expressions over base and fiber coordinates.
//!
//! This module provides the small expression language used everywhere else in
//! the crate: anchor entries, structure-tensor entries, Hamiltonians and
//! Lagrangians are all [`Expr`] trees. The language is deliberately closed:
//!
//! - decimal literals (double precision; no rationals),
//! - variables `x1..xn` (base), `y1..yk` (fiber / dual fiber), `z` (dissipation),
//! - binary `+ - * / ^` with `^` right-associative and binding tighter than
//!   unary minus, which binds tighter than `*` and `/`,
//! - unary minus,
//! - the functions `sin`, `cos`, `exp`, `ln`, `sqrt`,
//! - parentheses.
//!
//! Expressions are immutable after construction and contain no interior
//! mutability, so they are freely shared across threads. Evaluation is total
//! on its domain: division by zero, `ln` of a non-positive value, `sqrt` of a
//! negative value and real-undefined powers are reported as [`EvalError`]s,
//! never returned as silent NaN.
//!
//! Differentiation ([`Expr::diff`]) is exact symbolic differentiation followed
//! by constant folding; no finite differences are used anywhere in the crate.

mod diff;
mod eval;
mod lex;
mod parse;
mod print;

pub use eval::{EvalContext, EvalError};
pub use parse::{parse, ParseError};

/// A variable occurring in an expression.
///
/// Indices are stored zero-based; the surface syntax is one-based (`x1` is
/// `Var::X(0)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Base coordinate `x{i+1}`.
    X(usize),
    /// Fiber (or dual fiber) coordinate `y{i+1}`.
    Y(usize),
    /// Dissipation coordinate `z`.
    Z,
}

impl std::fmt::Display for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::Y(i) => write!(f, "y{}", i + 1),
            Var::Z => write!(f, "z"),
        }
    }
}

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    /// Surface-syntax name of the function.
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }
}

/// A symbolic expression tree.
///
/// Structural equality (`PartialEq`) is tree equality; two expressions that
/// are mathematically equal but written differently (e.g. `x1+x1` and `2*x1`)
/// compare unequal. Printing round-trips: for any `e` built by `parse`,
/// `fold` or `diff`, `parse(&e.to_string())` yields a structurally identical
/// tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Numeric literal. Always finite and, in trees built by `parse`, `fold`
    /// or `diff`, non-negative: negative constants are represented as unary
    /// minus over a literal, matching what the parser produces.
    Num(f64),
    /// Variable reference.
    Var(Var),
    /// Unary negation.
    Neg(Box<Expr>),
    /// Binary operation.
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// Function application.
    Call(Func, Box<Expr>),
}

impl Expr {
    /// The literal zero.
    pub fn zero() -> Expr {
        Expr::Num(0.0)
    }

    /// The literal one.
    pub fn one() -> Expr {
        Expr::Num(1.0)
    }

    /// A numeric constant, in canonical form (negative values are wrapped in
    /// unary minus, as the parser would build them).
    pub fn num(v: f64) -> Expr {
        diff::fold(Expr::Num(v))
    }

    /// A variable reference.
    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    /// `self + rhs`, folded.
    pub fn add(self, rhs: Expr) -> Expr {
        diff::fold_node(BinOp::Add, self, rhs)
    }

    /// `self - rhs`, folded.
    pub fn sub(self, rhs: Expr) -> Expr {
        diff::fold_node(BinOp::Sub, self, rhs)
    }

    /// `self * rhs`, folded.
    pub fn mul(self, rhs: Expr) -> Expr {
        diff::fold_node(BinOp::Mul, self, rhs)
    }

    /// `-self`, folded.
    pub fn neg(self) -> Expr {
        diff::fold_neg(self)
    }

    /// Is this expression the literal `0` after constant folding?
    ///
    /// This is the zero test used by classification and by block attribution:
    /// an entry counts as zero iff it folds to the constant `0`.
    pub fn is_zero(&self) -> bool {
        matches!(self.clone().fold(), Expr::Num(v) if v == 0.0)
    }

    /// Constant-fold literal subtrees and eliminate arithmetic identities
    /// (`0+e`, `1*e`, `e^1`, double negation, ...). Folding never evaluates an
    /// operation outside its real domain: `1/0` is left intact so that
    /// evaluation still reports the error.
    pub fn fold(self) -> Expr {
        diff::fold(self)
    }

    /// Exact symbolic partial derivative with respect to `var`, folded.
    pub fn diff(&self, var: Var) -> Expr {
        diff::diff(self, var)
    }

    /// The set of variables referenced by the expression, in source order
    /// without duplicates.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Expr::Neg(e) => e.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Call(_, a) => a.collect_vars(out),
        }
    }
}
