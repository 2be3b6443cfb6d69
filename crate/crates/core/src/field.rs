//! Validated coefficient fields and the shared construction-error type.
//!
//! Anchor components and structure coefficients are functions of the base
//! coordinates alone. [`ScalarField`] wraps an [`Expr`] together with the
//! base dimension it was validated against, so a reference to `y1` or to an
//! out-of-range `x7` is rejected when the field is installed into a spec —
//! not later, in the middle of a numerical run.

use crate::expr::{EvalContext, EvalError, Expr, Var};

/// A smooth function of the base coordinates `x1..xn` only.
///
/// The wrapped expression is constant-folded at construction, so two fields
/// built from different spellings of the same folded tree compare equal, and
/// zero entries are recognizable structurally.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    n: usize,
    expr: Expr,
}

impl ScalarField {
    /// Validate `expr` as a function of `x1..xn` and fold it.
    ///
    /// `place` names the slot being filled (for example `phi[1][2][1]`) and
    /// is echoed in errors.
    pub fn new(n: usize, expr: Expr, place: impl Into<String>) -> Result<Self, ModelError> {
        let expr = expr.fold();
        for var in expr.variables() {
            let in_scope = matches!(var, Var::X(i) if i < n);
            if !in_scope {
                return Err(ModelError::UnboundVariable {
                    place: place.into(),
                    var,
                    allowed: allowed_base(n),
                });
            }
        }
        Ok(ScalarField { n, expr })
    }

    /// The constant field with value `v`.
    pub fn constant(n: usize, v: f64) -> ScalarField {
        ScalarField { n, expr: Expr::num(v) }
    }

    /// Wrap an expression built from already-validated fields.
    ///
    /// Callers guarantee every variable is `x1..xn`; no scope check is run.
    pub(crate) fn from_validated(n: usize, expr: Expr) -> ScalarField {
        ScalarField { n, expr: expr.fold() }
    }

    /// The zero field.
    pub fn zero(n: usize) -> ScalarField {
        ScalarField::constant(n, 0.0)
    }

    /// Base dimension this field was validated against.
    pub fn base_dim(&self) -> usize {
        self.n
    }

    /// The wrapped (folded) expression.
    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Is this the constant zero? Exact (structural on the folded tree).
    pub fn is_zero(&self) -> bool {
        matches!(self.expr, Expr::Num(v) if v == 0.0)
    }

    /// Evaluate at a base point of length `n`.
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        debug_assert_eq!(x.len(), self.n);
        self.expr.eval(&EvalContext::base(x))
    }

    /// Exact partial derivative with respect to `x{i+1}`.
    pub fn diff_x(&self, i: usize) -> ScalarField {
        ScalarField { n: self.n, expr: self.expr.diff(Var::X(i)) }
    }

    /// The negated field (folded; double negations cancel exactly).
    pub fn negated(&self) -> ScalarField {
        ScalarField { n: self.n, expr: self.expr.clone().neg() }
    }
}

impl std::fmt::Display for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.expr.fmt(f)
    }
}

fn allowed_base(n: usize) -> String {
    match n {
        0 => "the base is a point, so entries must be constants".to_string(),
        1 => "only x1 is in scope here".to_string(),
        _ => format!("only x1..x{n} are in scope here"),
    }
}

/// Error raised while building specs, tensors, or products.
///
/// Indices in messages are 1-based, matching the file format and all
/// reports.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    /// An expression references a variable its slot does not bind.
    #[error("{place}: unbound variable `{var}` ({allowed})")]
    UnboundVariable {
        /// Slot being filled, e.g. `anchor[2][1]`.
        place: String,
        /// The offending variable.
        var: Var,
        /// What would have been in scope.
        allowed: String,
    },
    /// An entry index exceeds the declared dimension. 1-based.
    #[error("{place}: index {index} out of range 1..={bound}")]
    IndexOutOfRange { place: String, index: usize, bound: usize },
    /// A pair-antisymmetric tensor entry violates the `first < second`
    /// storage convention. 1-based.
    #[error("{place}: antisymmetric entries are stored with first index < second index, got ({alpha}, {beta})")]
    PairOrder { place: String, alpha: usize, beta: usize },
    /// The same index tuple was supplied twice.
    #[error("{place}: duplicate entry")]
    DuplicateEntry { place: String },
    /// A container has the wrong dimensions.
    #[error("{place}: {detail}")]
    ShapeMismatch { place: String, detail: String },
    /// `make_product` was given a tensor the requested level forbids.
    #[error("tensor block {block} must be absent in a {level} product")]
    IllegalTensorForLevel {
        level: crate::bdcp::HierarchyLevel,
        block: &'static str,
    },
    /// A fiber split does not satisfy `1 <= p < k`.
    #[error("invalid fiber split: p = {p} must satisfy 1 <= p < k = {k}")]
    InvalidSplit { p: usize, k: usize },
}

impl ModelError {
    pub(crate) fn shape(place: impl Into<String>, detail: impl Into<String>) -> ModelError {
        ModelError::ShapeMismatch { place: place.into(), detail: detail.into() }
    }
}

/// An evaluation error tagged with the slot being evaluated.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{place}: {source}")]
pub struct EvalAt {
    /// Slot being evaluated, e.g. `structure[1][2][3]`.
    pub place: String,
    /// The underlying expression error.
    pub source: EvalError,
}

impl EvalAt {
    /// `map_err` adapter: `expr.eval(..).map_err(EvalAt::at("anchor[1][2]"))`.
    pub(crate) fn at(place: impl Into<String>) -> impl FnOnce(EvalError) -> EvalAt {
        move |source| EvalAt { place: place.into(), source }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn scope_is_checked_at_construction() {
        let ok = ScalarField::new(2, parse("x1*x2").unwrap(), "anchor[1][1]");
        assert!(ok.is_ok());

        let err = ScalarField::new(2, parse("x3").unwrap(), "anchor[1][1]").unwrap_err();
        assert_eq!(
            err.to_string(),
            "anchor[1][1]: unbound variable `x3` (only x1..x2 are in scope here)"
        );

        let err = ScalarField::new(0, parse("y1").unwrap(), "structure[1][2][3]").unwrap_err();
        assert!(err.to_string().contains("constants"), "{err}");
    }

    #[test]
    fn fields_fold_at_construction() {
        let f = ScalarField::new(1, parse("0*x1 + 2*3").unwrap(), "test").unwrap();
        assert_eq!(f.expr(), &Expr::Num(6.0));
        // Folding is not algebraic simplification: x1 - x1 stays symbolic.
        assert!(!ScalarField::new(1, parse("x1 - x1 * 1").unwrap(), "test").unwrap().is_zero());
        assert!(ScalarField::new(1, parse("0 * sin(x1)").unwrap(), "test").unwrap().is_zero());
    }

    #[test]
    fn derivative_and_negation() {
        let f = ScalarField::new(1, parse("x1^2").unwrap(), "test").unwrap();
        assert_eq!(f.diff_x(0).expr(), &parse("2*x1").unwrap());
        assert_eq!(f.negated().negated(), f);
    }
}
