//! Dynamics on Lie algebroids: reversible Hamilton / Euler–Lagrange
//! equations, their dissipative (Herglotz / contact) extensions, numerical
//! integration, and invariant monitoring.
//!
//! One generic right-hand side per family operates on a (possibly
//! assembled) algebroid spec. The classical special cases are index
//! specializations of the same formulas, not separate code paths:
//!
//! * Hamiltonian on the dual, `n = 0` — Lie–Poisson;
//! * Hamiltonian on a tangent algebroid — classical Hamilton;
//! * Euler–Lagrange, `n = 0` — Euler–Poincaré;
//! * dissipative Hamiltonian on a tangent algebroid — contact Hamilton;
//! * Herglotz, `n = 0` — Euler–Poincaré–Herglotz.
//!
//! Lagrangian families solve an implicit system through the fiber Hessian;
//! a condition-number threshold makes the usual regularity assumption
//! testable instead of silent.

mod energy;
mod integrate;
mod linsolve;
mod monitor;

pub use energy::EnergyLike;
pub use integrate::{
    integrate, integrate_batch, Method, Trajectory, DEFAULT_ATOL, DEFAULT_RTOL, DT_MIN,
};
pub use monitor::{
    monitor_invariants, CasimirDrift, CasimirFn, MonitorReport, MonitorTolerances,
};

use serde::Serialize;

use crate::algebroid::AlgebroidSpec;
use crate::expr::{Expr, Var};
use crate::field::{EvalAt, ModelError, ScalarField};

/// Condition-number threshold above which a fiber Hessian counts as
/// singular.
pub const COND_LIMIT: f64 = 1e12;

/// The four equation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `ẋ = a·∂H/∂y`, `ẏ = −C·y·∂H/∂y − aᵀ·∂H/∂x`.
    Hamiltonian,
    /// Hamiltonian plus the contact terms in `z`.
    DissipativeHamiltonian,
    /// Implicit Euler–Lagrange through the fiber Hessian.
    EulerLagrange,
    /// Euler–Lagrange plus the Herglotz terms in `z`.
    Herglotz,
}

impl Family {
    /// Does the state carry a `z` coordinate?
    pub fn dissipative(self) -> bool {
        matches!(self, Family::DissipativeHamiltonian | Family::Herglotz)
    }

    /// Is the energy function a Lagrangian (fiber coordinates are
    /// velocities) rather than a Hamiltonian (momenta)?
    pub fn lagrangian(self) -> bool {
        matches!(self, Family::EulerLagrange | Family::Herglotz)
    }

    /// Short name used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Family::Hamiltonian => "hamiltonian",
            Family::DissipativeHamiltonian => "dissipative_hamiltonian",
            Family::EulerLagrange => "euler_lagrange",
            Family::Herglotz => "herglotz",
        }
    }
}

/// A dynamical state `(x, y, z?)`.
///
/// `y` holds fiber coordinates for Lagrangian families and dual-fiber
/// (momentum) coordinates for Hamiltonian ones; `z` is present exactly for
/// dissipative families.
#[derive(Debug, Clone, PartialEq)]
pub struct DynState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Option<f64>,
}

impl DynState {
    /// A state without a dissipation coordinate.
    pub fn reversible(x: Vec<f64>, y: Vec<f64>) -> DynState {
        DynState { x, y, z: None }
    }

    /// A state with a dissipation coordinate.
    pub fn dissipative(x: Vec<f64>, y: Vec<f64>, z: f64) -> DynState {
        DynState { x, y, z: Some(z) }
    }

    /// Total number of scalar components.
    pub fn dim(&self) -> usize {
        self.x.len() + self.y.len() + usize::from(self.z.is_some())
    }

    /// Flatten as `[x.., y.., z?]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        out.extend_from_slice(&self.x);
        out.extend_from_slice(&self.y);
        out.extend(self.z);
        out
    }

    /// Rebuild from the flat layout.
    pub fn from_flat(n: usize, k: usize, has_z: bool, flat: &[f64]) -> DynState {
        debug_assert_eq!(flat.len(), n + k + usize::from(has_z));
        DynState {
            x: flat[..n].to_vec(),
            y: flat[n..n + k].to_vec(),
            z: has_z.then(|| flat[n + k]),
        }
    }
}

/// Dynamics failure modes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalAt),
    /// The fiber Hessian of the Lagrangian is (numerically) singular.
    #[error("singular Lagrangian: fiber Hessian condition number {cond:.3e} exceeds 1e12")]
    SingularLagrangian { cond: f64 },
    /// The adaptive integrator could not meet its tolerance above the
    /// minimum step size.
    #[error("step size underflow at t = {t}: required step {dt:.3e} fell below 1e-12")]
    StepUnderflow { t: f64, dt: f64 },
    /// A failure during integration, stamped with the simulation time.
    #[error("at t = {t}: {source}")]
    AtTime { t: f64, source: Box<DynError> },
}

impl DynError {
    /// Wrap with a timestamp unless one is already attached.
    fn at_time(self, t: f64) -> DynError {
        match self {
            DynError::AtTime { .. } => self,
            other => DynError::AtTime { t, source: Box::new(other) },
        }
    }
}

/// A spec, an equation family, and an energy function, bound together with
/// everything precomputed for repeated right-hand-side evaluation.
#[derive(Debug, Clone)]
pub struct System {
    family: Family,
    energy: EnergyLike,
    /// Energy actually monitored along trajectories: the Hamiltonian
    /// itself, or the energy function `E_L = y·∂L/∂y − L` for Lagrangian
    /// families.
    monitor_energy: EnergyLike,
    n: usize,
    k: usize,
    anchor: Vec<Vec<ScalarField>>,
    /// Structure coefficients, both orientations, as `(α, β, γ, C[α][β][γ])`.
    structure: Vec<(usize, usize, usize, ScalarField)>,
}

impl System {
    /// Bind `energy` to `spec` under the given family.
    ///
    /// The energy's dimensions must match the spec, and it must declare `z`
    /// exactly when the family is dissipative.
    pub fn new(spec: &AlgebroidSpec, family: Family, energy: EnergyLike) -> Result<System, ModelError> {
        if energy.base_dim() != spec.n() || energy.fiber_dim() != spec.k() {
            return Err(ModelError::shape(
                energy.name().to_string(),
                format!(
                    "declared for n={}, k={} but the spec has n={}, k={}",
                    energy.base_dim(),
                    energy.fiber_dim(),
                    spec.n(),
                    spec.k()
                ),
            ));
        }
        if energy.uses_z() != family.dissipative() {
            let detail = if family.dissipative() {
                "dissipative dynamics needs an energy function with a z slot"
            } else {
                "reversible dynamics cannot use an energy function with a z slot"
            };
            return Err(ModelError::shape(energy.name().to_string(), detail));
        }
        let monitor_energy = if family.lagrangian() {
            energy_like_of_energy_function(&energy)
        } else {
            energy.clone()
        };
        let structure = spec
            .structure_oriented()
            .into_iter()
            .map(|(a, b, g, e)| (a, b, g, ScalarField::from_validated(spec.n(), e)))
            .collect();
        Ok(System {
            family,
            energy,
            monitor_energy,
            n: spec.n(),
            k: spec.k(),
            anchor: spec.anchor_table().to_vec(),
            structure,
        })
    }

    /// The equation family.
    pub fn family(&self) -> Family {
        self.family
    }

    /// The bound energy function.
    pub fn energy(&self) -> &EnergyLike {
        &self.energy
    }

    /// The function whose value is recorded in the trajectory energy
    /// column: the Hamiltonian, or `E_L` for Lagrangian families.
    pub fn monitor_energy(&self) -> &EnergyLike {
        &self.monitor_energy
    }

    /// Base dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Fiber dimension.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Check that a state has this system's shape.
    pub fn check_state(&self, s: &DynState) -> Result<(), ModelError> {
        let want_z = self.family.dissipative();
        if s.x.len() != self.n || s.y.len() != self.k || s.z.is_some() != want_z {
            return Err(ModelError::shape(
                "state",
                format!(
                    "expected {} base, {} fiber coordinates and {} z, got {}, {} and {}",
                    self.n,
                    self.k,
                    if want_z { "a" } else { "no" },
                    s.x.len(),
                    s.y.len(),
                    if s.z.is_some() { "a z" } else { "no z" },
                ),
            ));
        }
        Ok(())
    }

    /// The state derivative at `s`.
    pub fn rhs(&self, s: &DynState) -> Result<DynState, DynError> {
        self.check_state(s)?;
        match self.family {
            Family::Hamiltonian => self.hamiltonian(s, false),
            Family::DissipativeHamiltonian => self.hamiltonian(s, true),
            Family::EulerLagrange => self.lagrangian(s, false),
            Family::Herglotz => self.lagrangian(s, true),
        }
    }

    /// The monitored energy value at `s` (`H`, or `E_L` for Lagrangian
    /// families).
    pub fn energy_value(&self, s: &DynState) -> Result<f64, EvalAt> {
        self.monitor_energy.eval(&s.x, &s.y, s.z)
    }

    /// `ẋ^i = Σ_α a[α][i]·∂H/∂y_α`,
    /// `ẏ_α = −Σ_{β,γ} C[α][β][γ]·y_γ·∂H/∂y_β − Σ_i a[α][i]·∂H/∂x_i`;
    /// dissipative variants add `−y_α·∂H/∂z` to `ẏ_α` and set
    /// `ż = Σ_α y_α·∂H/∂y_α − H`.
    fn hamiltonian(&self, s: &DynState, dissipative: bool) -> Result<DynState, DynError> {
        let (x, y, z) = (&s.x[..], &s.y[..], s.z);
        let hy = self.energy.grad_y(x, y, z)?;
        let hx = self.energy.grad_x(x, y, z)?;
        let a = self.eval_anchor(x)?;
        let mut xdot = vec![0.0; self.n];
        for i in 0..self.n {
            for (row, hv) in a.iter().zip(&hy) {
                xdot[i] += row[i] * hv;
            }
        }
        let mut ydot = vec![0.0; self.k];
        for (al, be, ga, c) in &self.structure {
            ydot[*al] -= self.eval_structure(c, al, be, ga, x)? * y[*ga] * hy[*be];
        }
        for (al, row) in a.iter().enumerate() {
            for (av, hv) in row.iter().zip(&hx) {
                ydot[al] -= av * hv;
            }
        }
        let zdot = if dissipative {
            let hz = self.energy.grad_z(x, y, z)?;
            for (yd, yv) in ydot.iter_mut().zip(y) {
                *yd -= yv * hz;
            }
            let h = self.energy.eval(x, y, z)?;
            Some(y.iter().zip(&hy).map(|(yv, hv)| yv * hv).sum::<f64>() - h)
        } else {
            None
        };
        Ok(DynState { x: xdot, y: ydot, z: zdot })
    }

    /// `ẋ^i = Σ_α a[α][i]·y^α`, and `ẏ` solved from
    ///
    /// ```text
    /// Σ_β W[α][β]·ẏ^β = Σ_i a[α][i]·∂L/∂x_i + Σ_{β,γ} C[β][α][γ]·y^β·∂L/∂y_γ
    ///                 − Σ_i (∂²L/∂y_α∂x_i)·ẋ^i
    /// ```
    ///
    /// with `W = ∂²L/∂y∂y`. The Herglotz variant adds
    /// `+ (∂L/∂z)·∂L/∂y_α − (∂²L/∂y_α∂z)·L` on the right (the chain rule
    /// through `z` uses `ż = L`) and sets `ż = L`.
    fn lagrangian(&self, s: &DynState, dissipative: bool) -> Result<DynState, DynError> {
        let (x, y, z) = (&s.x[..], &s.y[..], s.z);
        let ly = self.energy.grad_y(x, y, z)?;
        let lx = self.energy.grad_x(x, y, z)?;
        let a = self.eval_anchor(x)?;
        let mut xdot = vec![0.0; self.n];
        for i in 0..self.n {
            for (row, yv) in a.iter().zip(y) {
                xdot[i] += row[i] * yv;
            }
        }
        let mut rhs = vec![0.0; self.k];
        for (al, row) in a.iter().enumerate() {
            for (av, lv) in row.iter().zip(&lx) {
                rhs[al] += av * lv;
            }
        }
        for (be, al, ga, c) in &self.structure {
            rhs[*al] += self.eval_structure(c, be, al, ga, x)? * y[*be] * ly[*ga];
        }
        let m = self.energy.hess_yx(x, y, z)?;
        for (r, row) in rhs.iter_mut().zip(&m) {
            for (mv, xd) in row.iter().zip(&xdot) {
                *r -= mv * xd;
            }
        }
        let zdot = if dissipative {
            let l = self.energy.eval(x, y, z)?;
            let lz = self.energy.grad_z(x, y, z)?;
            let v = self.energy.grad_yz(x, y, z)?;
            for (al, r) in rhs.iter_mut().enumerate() {
                *r += lz * ly[al] - v[al] * l;
            }
            Some(l)
        } else {
            None
        };
        let w = self.energy.hess_yy(x, y, z)?;
        let (ydot, cond) = linsolve::solve_with_cond(w, &rhs)
            .map_err(|_| DynError::SingularLagrangian { cond: f64::INFINITY })?;
        // `!(cond <= limit)` also rejects a NaN estimate (possible only
        // when infinities entered the Hessian).
        if !(cond <= COND_LIMIT) {
            return Err(DynError::SingularLagrangian { cond });
        }
        Ok(DynState { x: xdot, y: ydot, z: zdot })
    }

    fn eval_anchor(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, EvalAt> {
        self.anchor
            .iter()
            .enumerate()
            .map(|(al, row)| {
                row.iter()
                    .enumerate()
                    .map(|(i, f)| {
                        f.eval(x).map_err(EvalAt::at(format!("anchor[{}][{}]", al + 1, i + 1)))
                    })
                    .collect()
            })
            .collect()
    }

    fn eval_structure(
        &self,
        c: &ScalarField,
        a: &usize,
        b: &usize,
        g: &usize,
        x: &[f64],
    ) -> Result<f64, EvalAt> {
        c.eval(x)
            .map_err(EvalAt::at(format!("structure[{}][{}][{}]", a + 1, b + 1, g + 1)))
    }
}

/// The energy function `E_L = Σ_α y^α·∂L/∂y_α − L` determined by a
/// Lagrangian, as a value.
pub fn energy_function(l: &EnergyLike, s: &DynState) -> Result<f64, EvalAt> {
    let ly = l.grad_y(&s.x, &s.y, s.z)?;
    let val = l.eval(&s.x, &s.y, s.z)?;
    Ok(s.y.iter().zip(&ly).map(|(yv, lv)| yv * lv).sum::<f64>() - val)
}

/// The Legendre transformation (fiber derivative): momenta
/// `p_α = ∂L/∂y^α` at `s`. Total — regularity is only needed to invert it.
pub fn legendre_map(l: &EnergyLike, s: &DynState) -> Result<Vec<f64>, EvalAt> {
    l.grad_y(&s.x, &s.y, s.z)
}

/// Build `E_L` as an [`EnergyLike`] (symbolically), for analytic energy
/// monitoring along Lagrangian trajectories.
fn energy_like_of_energy_function(l: &EnergyLike) -> EnergyLike {
    let mut expr = Expr::zero();
    for a in 0..l.fiber_dim() {
        expr = expr.add(Expr::var(Var::Y(a)).mul(l.value().diff(Var::Y(a))));
    }
    expr = expr.sub(l.value().clone());
    EnergyLike::new(format!("E_{}", l.name()), l.base_dim(), l.fiber_dim(), l.uses_z(), expr)
        .expect("E_L inherits the Lagrangian's validated scope")
}

/// Hamilton's equations on the dual: one evaluation of the reversible
/// Hamiltonian right-hand side. `n = 0` gives the Lie–Poisson equations.
pub fn hamiltonian_rhs(
    spec: &AlgebroidSpec,
    h: &EnergyLike,
    s: &DynState,
) -> Result<DynState, DynError> {
    System::new(spec, Family::Hamiltonian, h.clone())?.rhs(s)
}

/// Dissipative Hamilton's equations on the extended dual (`z` present);
/// the tangent-algebroid case is contact Hamilton, `n = 0` is
/// Lie–Poisson–Herglotz.
pub fn dissipative_hamiltonian_rhs(
    spec: &AlgebroidSpec,
    h: &EnergyLike,
    s: &DynState,
) -> Result<DynState, DynError> {
    System::new(spec, Family::DissipativeHamiltonian, h.clone())?.rhs(s)
}

/// Euler–Lagrange equations on the algebroid; `n = 0` gives Euler–Poincaré.
pub fn euler_lagrange_rhs(
    spec: &AlgebroidSpec,
    l: &EnergyLike,
    s: &DynState,
) -> Result<DynState, DynError> {
    System::new(spec, Family::EulerLagrange, l.clone())?.rhs(s)
}

/// Herglotz equations (`z` present); `n = 0` gives Euler–Poincaré–Herglotz.
pub fn herglotz_rhs(
    spec: &AlgebroidSpec,
    l: &EnergyLike,
    s: &DynState,
) -> Result<DynState, DynError> {
    System::new(spec, Family::Herglotz, l.clone())?.rhs(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn so3() -> AlgebroidSpec {
        AlgebroidSpec::lie_algebra(
            3,
            vec![
                (0, 1, 2, Expr::one()),
                (0, 2, 1, parse("-1").unwrap()),
                (1, 2, 0, Expr::one()),
            ],
        )
        .unwrap()
    }

    fn tangent_line() -> AlgebroidSpec {
        AlgebroidSpec::new(1, 1, vec![vec![Expr::one()]], vec![]).unwrap()
    }

    #[test]
    fn classical_hamilton_on_the_line() {
        let h = EnergyLike::new("H", 1, 1, false, parse("(y1^2 + x1^2) / 2").unwrap()).unwrap();
        let ds = hamiltonian_rhs(&tangent_line(), &h, &DynState::reversible(vec![1.0], vec![0.5]))
            .unwrap();
        assert_eq!(ds.x, vec![0.5]);
        assert_eq!(ds.y, vec![-1.0]);
        assert_eq!(ds.z, None);
    }

    #[test]
    fn rigid_body_matches_cross_product() {
        // H = y1²/2 + y2²/4 + y3²/6 (inertia 1, 2, 3): ẏ = y × ∇H.
        let h = EnergyLike::new("H", 0, 3, false, parse("y1^2/2 + y2^2/4 + y3^2/6").unwrap())
            .unwrap();
        let ds = hamiltonian_rhs(&so3(), &h, &DynState::reversible(vec![], vec![1.0, 2.0, 3.0]))
            .unwrap();
        assert_eq!(ds.y, vec![-1.0, 2.0, -1.0]);
    }

    #[test]
    fn constant_hamiltonian_is_stationary() {
        let h = EnergyLike::new("H", 0, 3, false, parse("4").unwrap()).unwrap();
        let ds = hamiltonian_rhs(&so3(), &h, &DynState::reversible(vec![], vec![1.0, 2.0, 3.0]))
            .unwrap();
        assert_eq!(ds.y, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn pure_z_hamiltonian_decays_exponentially() {
        let h = EnergyLike::new("H", 0, 2, true, parse("z").unwrap()).unwrap();
        let s = DynState::dissipative(vec![], vec![3.0, -2.0], 5.0);
        let ds = dissipative_hamiltonian_rhs(&so3_truncated(), &h, &s).unwrap();
        assert_eq!(ds.y, vec![-3.0, 2.0]);
        assert_eq!(ds.z, Some(-5.0));
    }

    fn so3_truncated() -> AlgebroidSpec {
        // Any rank-2 algebra works here; take the abelian one.
        AlgebroidSpec::lie_algebra(2, vec![]).unwrap()
    }

    #[test]
    fn contact_oscillator_rhs() {
        let h = EnergyLike::new("H", 1, 1, true, parse("y1^2/2 + x1^2/2 + 0.1*z").unwrap())
            .unwrap();
        let s = DynState::dissipative(vec![1.0], vec![1.0], 0.0);
        let ds = dissipative_hamiltonian_rhs(&tangent_line(), &h, &s).unwrap();
        assert_eq!(ds.x, vec![1.0]);
        assert!((ds.y[0] - (-1.1)).abs() < 1e-15);
        // ż = y·∂H/∂y − H = 1 − 1 = 0 at this state.
        assert_eq!(ds.z, Some(0.0));
    }

    #[test]
    fn newton_from_euler_lagrange() {
        let l = EnergyLike::new("L", 1, 1, false, parse("y1^2/2 - x1^2/2").unwrap()).unwrap();
        let ds = euler_lagrange_rhs(&tangent_line(), &l, &DynState::reversible(vec![1.0], vec![0.0]))
            .unwrap();
        assert_eq!(ds.x, vec![0.0]);
        assert_eq!(ds.y, vec![-1.0]);
    }

    #[test]
    fn isotropic_rigid_body_is_stationary() {
        let l = EnergyLike::new("l", 0, 3, false, parse("(y1^2 + y2^2 + y3^2)/2").unwrap())
            .unwrap();
        let ds = euler_lagrange_rhs(&so3(), &l, &DynState::reversible(vec![], vec![0.3, -1.0, 2.0]))
            .unwrap();
        assert_eq!(ds.y, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn euler_poincare_matches_lie_poisson_through_legendre() {
        // Anisotropic rigid body: l = (y1² + 2y2² + 3y3²)/2, momenta
        // p = (y1, 2y2, 3y3), h = p1²/2 + p2²/4 + p3²/6.
        let l = EnergyLike::new("l", 0, 3, false, parse("(y1^2 + 2*y2^2 + 3*y3^2)/2").unwrap())
            .unwrap();
        let h = EnergyLike::new("h", 0, 3, false, parse("y1^2/2 + y2^2/4 + y3^2/6").unwrap())
            .unwrap();
        let spec = so3();
        let y = vec![0.7, -0.4, 1.3];
        let s = DynState::reversible(vec![], y.clone());
        let p = legendre_map(&l, &s).unwrap();
        let ep = euler_lagrange_rhs(&spec, &l, &s).unwrap();
        let lp = hamiltonian_rhs(&spec, &h, &DynState::reversible(vec![], p.clone())).unwrap();
        // d/dt p_α = W·ẏ (constant diagonal W here).
        let inertia = [1.0, 2.0, 3.0];
        for a in 0..3 {
            assert!(
                (inertia[a] * ep.y[a] - lp.y[a]).abs() < 1e-14,
                "component {a}: {} vs {}",
                inertia[a] * ep.y[a],
                lp.y[a]
            );
        }
    }

    #[test]
    fn herglotz_adds_linear_damping_on_so3() {
        let l = EnergyLike::new("l", 0, 3, true, parse("(y1^2 + y2^2 + y3^2)/2 + 0.5*z").unwrap())
            .unwrap();
        let s = DynState::dissipative(vec![], vec![1.0, 2.0, 3.0], 0.4);
        let ds = herglotz_rhs(&so3(), &l, &s).unwrap();
        assert_eq!(ds.y, vec![0.5, 1.0, 1.5]);
        let lval = 0.5 * (1.0 + 4.0 + 9.0) + 0.5 * 0.4;
        assert_eq!(ds.z, Some(lval));
    }

    #[test]
    fn z_free_herglotz_reduces_to_euler_lagrange() {
        let reversible =
            EnergyLike::new("L", 1, 1, false, parse("y1^2/2 - x1^2/2").unwrap()).unwrap();
        let extended = EnergyLike::new("L", 1, 1, true, parse("y1^2/2 - x1^2/2").unwrap()).unwrap();
        let spec = tangent_line();
        let s = DynState::dissipative(vec![0.8], vec![-0.3], 2.0);
        let hg = herglotz_rhs(&spec, &extended, &s).unwrap();
        let el = euler_lagrange_rhs(
            &spec,
            &reversible,
            &DynState::reversible(vec![0.8], vec![-0.3]),
        )
        .unwrap();
        assert_eq!(hg.x, el.x);
        assert_eq!(hg.y, el.y);
        assert_eq!(hg.z, Some(-0.3 * -0.3 / 2.0 - 0.8 * 0.8 / 2.0));
    }

    #[test]
    fn degenerate_lagrangian_is_rejected() {
        let l = EnergyLike::new("L", 1, 1, false, parse("y1").unwrap()).unwrap();
        let err = euler_lagrange_rhs(&tangent_line(), &l, &DynState::reversible(vec![0.0], vec![1.0]))
            .unwrap_err();
        assert!(matches!(err, DynError::SingularLagrangian { .. }), "{err}");
    }

    #[test]
    fn energy_function_values() {
        let l = EnergyLike::new("L", 1, 1, false, parse("y1^2/2 - x1^2/2").unwrap()).unwrap();
        let e = energy_function(&l, &DynState::reversible(vec![1.0], vec![2.0])).unwrap();
        assert_eq!(e, 2.5);
        let quadratic =
            EnergyLike::new("l", 0, 2, false, parse("(y1^2 + y2^2)/2").unwrap()).unwrap();
        let s = DynState::reversible(vec![], vec![3.0, 4.0]);
        assert_eq!(energy_function(&quadratic, &s).unwrap(), 12.5);
        let linear = EnergyLike::new("l", 0, 1, false, parse("y1 + 7").unwrap()).unwrap();
        assert_eq!(
            energy_function(&linear, &DynState::reversible(vec![], vec![9.0])).unwrap(),
            -7.0
        );
    }

    #[test]
    fn legendre_map_values() {
        let l = EnergyLike::new("l", 0, 3, false, parse("(y1^2 + 2*y2^2 + 3*y3^2)/2").unwrap())
            .unwrap();
        let p = legendre_map(&l, &DynState::reversible(vec![], vec![1.0, 1.0, 1.0])).unwrap();
        assert_eq!(p, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn arity_mismatches_are_rejected() {
        let h = EnergyLike::new("H", 0, 2, false, parse("y1").unwrap()).unwrap();
        assert!(System::new(&so3(), Family::Hamiltonian, h).is_err());
        let h = EnergyLike::new("H", 0, 3, true, parse("y1 + z").unwrap()).unwrap();
        assert!(System::new(&so3(), Family::Hamiltonian, h).is_err());
        let h = EnergyLike::new("H", 0, 3, false, parse("y1").unwrap()).unwrap();
        assert!(System::new(&so3(), Family::DissipativeHamiltonian, h).is_err());
    }
}
