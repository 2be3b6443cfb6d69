//! Energy-like functions: Hamiltonians, Lagrangians, and Casimirs.
//!
//! An [`EnergyLike`] is a scalar function of a dynamical state `(x, y, z?)`
//! together with every derivative the equation assemblers need: the
//! gradients in all three slots and the second derivatives through the
//! fiber (`∂²/∂y∂y`, `∂²/∂y∂x`, `∂²/∂y∂z`). All derivatives are taken
//! symbolically at construction, so repeated evaluation along a trajectory
//! never re-differentiates.

use crate::expr::{EvalContext, Expr, Var};
use crate::field::{EvalAt, ModelError};

/// A scalar function of the state with precomputed derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLike {
    name: String,
    n: usize,
    k: usize,
    uses_z: bool,
    value: Expr,
    dx: Vec<Expr>,
    dy: Vec<Expr>,
    dz: Expr,
    dyy: Vec<Expr>, // (α·k + β): ∂²/∂y_{α+1}∂y_{β+1}
    dyx: Vec<Expr>, // (α·n + i): ∂²/∂y_{α+1}∂x_{i+1}
    dyz: Vec<Expr>, // α: ∂²/∂y_{α+1}∂z
}

impl EnergyLike {
    /// Validate `expr` as a function of `x1..xn`, `y1..yk` (and `z` when
    /// `uses_z`), then differentiate everything the dynamics needs.
    ///
    /// `name` labels the function in error messages (`H`, `L`, a Casimir
    /// name, …). Declared slots may go unused; undeclared ones may not
    /// appear.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        k: usize,
        uses_z: bool,
        expr: Expr,
    ) -> Result<EnergyLike, ModelError> {
        let name = name.into();
        let value = expr.fold();
        for var in value.variables() {
            let in_scope = match var {
                Var::X(i) => i < n,
                Var::Y(a) => a < k,
                Var::Z => uses_z,
            };
            if !in_scope {
                return Err(ModelError::UnboundVariable {
                    place: name,
                    var,
                    allowed: allowed_vars(n, k, uses_z),
                });
            }
        }
        let dx: Vec<Expr> = (0..n).map(|i| value.diff(Var::X(i))).collect();
        let dy: Vec<Expr> = (0..k).map(|a| value.diff(Var::Y(a))).collect();
        let dz = value.diff(Var::Z);
        let mut dyy = Vec::with_capacity(k * k);
        let mut dyx = Vec::with_capacity(k * n);
        let mut dyz = Vec::with_capacity(k);
        for a in 0..k {
            for b in 0..k {
                dyy.push(dy[a].diff(Var::Y(b)));
            }
            for i in 0..n {
                dyx.push(dy[a].diff(Var::X(i)));
            }
            dyz.push(dy[a].diff(Var::Z));
        }
        Ok(EnergyLike { name, n, k, uses_z, value, dx, dy, dz, dyy, dyx, dyz })
    }

    /// The label used in error messages.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Base dimension `n`.
    pub fn base_dim(&self) -> usize {
        self.n
    }

    /// Fiber dimension `k`.
    pub fn fiber_dim(&self) -> usize {
        self.k
    }

    /// Whether `z` is a declared slot.
    pub fn uses_z(&self) -> bool {
        self.uses_z
    }

    /// The (folded) value expression.
    pub fn value(&self) -> &Expr {
        &self.value
    }

    /// The value at a state.
    pub fn eval(&self, x: &[f64], y: &[f64], z: Option<f64>) -> Result<f64, EvalAt> {
        self.at(&self.value, x, y, z, || self.name.clone())
    }

    /// The base gradient `∂/∂x_i`.
    pub fn grad_x(&self, x: &[f64], y: &[f64], z: Option<f64>) -> Result<Vec<f64>, EvalAt> {
        (0..self.n)
            .map(|i| self.at(&self.dx[i], x, y, z, || format!("d{}/dx{}", self.name, i + 1)))
            .collect()
    }

    /// The fiber gradient `∂/∂y_α`.
    pub fn grad_y(&self, x: &[f64], y: &[f64], z: Option<f64>) -> Result<Vec<f64>, EvalAt> {
        (0..self.k)
            .map(|a| self.at(&self.dy[a], x, y, z, || format!("d{}/dy{}", self.name, a + 1)))
            .collect()
    }

    /// The derivative `∂/∂z` (identically zero unless `z` is declared).
    pub fn grad_z(&self, x: &[f64], y: &[f64], z: Option<f64>) -> Result<f64, EvalAt> {
        self.at(&self.dz, x, y, z, || format!("d{}/dz", self.name))
    }

    /// The fiber Hessian `∂²/∂y_α∂y_β` as a `k×k` matrix.
    pub fn hess_yy(&self, x: &[f64], y: &[f64], z: Option<f64>) -> Result<Vec<Vec<f64>>, EvalAt> {
        (0..self.k)
            .map(|a| {
                (0..self.k)
                    .map(|b| {
                        self.at(&self.dyy[a * self.k + b], x, y, z, || {
                            format!("d2{}/dy{}dy{}", self.name, a + 1, b + 1)
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// The mixed block `∂²/∂y_α∂x_i` as a `k×n` matrix.
    pub fn hess_yx(&self, x: &[f64], y: &[f64], z: Option<f64>) -> Result<Vec<Vec<f64>>, EvalAt> {
        (0..self.k)
            .map(|a| {
                (0..self.n)
                    .map(|i| {
                        self.at(&self.dyx[a * self.n + i], x, y, z, || {
                            format!("d2{}/dy{}dx{}", self.name, a + 1, i + 1)
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// The mixed block `∂²/∂y_α∂z`.
    pub fn grad_yz(&self, x: &[f64], y: &[f64], z: Option<f64>) -> Result<Vec<f64>, EvalAt> {
        (0..self.k)
            .map(|a| self.at(&self.dyz[a], x, y, z, || format!("d2{}/dy{}dz", self.name, a + 1)))
            .collect()
    }

    fn at(
        &self,
        expr: &Expr,
        x: &[f64],
        y: &[f64],
        z: Option<f64>,
        place: impl FnOnce() -> String,
    ) -> Result<f64, EvalAt> {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.k);
        expr.eval(&EvalContext { x, y, z }).map_err(EvalAt::at(place()))
    }
}

fn allowed_vars(n: usize, k: usize, uses_z: bool) -> String {
    let mut parts = Vec::new();
    match n {
        0 => {}
        1 => parts.push("x1".to_string()),
        _ => parts.push(format!("x1..x{n}")),
    }
    match k {
        0 => {}
        1 => parts.push("y1".to_string()),
        _ => parts.push(format!("y1..y{k}")),
    }
    if uses_z {
        parts.push("z".to_string());
    }
    if parts.is_empty() {
        "the state is empty, so the expression must be constant".to_string()
    } else {
        format!("only {} are in scope here", parts.join(", "))
    }
}
