//! Invariant monitoring along trajectories.
//!
//! Reversible systems must conserve their energy; dissipative systems must
//! obey the dissipation law of their family:
//!
//! * dissipative Hamiltonian: `dH/dt + (∂H/∂z)·H = 0`,
//! * Herglotz: `dE_L/dt − (∂L/∂z)·E_L = 0`,
//!
//! and Casimir functions must be constant in every case. The time
//! derivatives are computed analytically — the energy gradient contracted
//! with the right-hand side at each recorded state — never by differencing
//! the trajectory, so integrator error and structure error stay separate.

use serde::Serialize;

use super::{DynError, DynState, EnergyLike, Family, System, Trajectory};

/// A conserved function monitored along trajectories (for example `‖y‖²`
/// on the dual of so(3)).
#[derive(Debug, Clone, PartialEq)]
pub struct CasimirFn {
    pub name: String,
    pub function: EnergyLike,
}

/// Thresholds for [`monitor_invariants`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorTolerances {
    /// Maximum allowed `|E(t) − E(0)|` for reversible families.
    pub energy: f64,
    /// Maximum allowed per-Casimir drift.
    pub casimir: f64,
    /// Maximum allowed pointwise dissipation-law residual.
    pub dissipation: f64,
}

impl Default for MonitorTolerances {
    fn default() -> Self {
        MonitorTolerances { energy: 1e-8, casimir: 1e-8, dissipation: 1e-9 }
    }
}

/// Drift of one monitored Casimir.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CasimirDrift {
    pub name: String,
    pub max_drift: f64,
    pub pass: bool,
}

/// Outcome of a monitoring pass over one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorReport {
    pub family: Family,
    /// `max_t |E(t) − E(0)|`; present for reversible families.
    pub energy_drift: Option<f64>,
    /// Max pointwise residual of the family's dissipation law; present for
    /// dissipative families.
    pub dissipation_residual: Option<f64>,
    pub casimirs: Vec<CasimirDrift>,
    pub pass: bool,
}

/// Evaluate conservation and dissipation laws along `traj`.
pub fn monitor_invariants(
    system: &System,
    traj: &Trajectory,
    casimirs: &[CasimirFn],
    tol: &MonitorTolerances,
) -> Result<MonitorReport, DynError> {
    let family = system.family();
    let energy = system.monitor_energy();
    let mut energy_drift = None;
    let mut dissipation_residual = None;
    if family.dissipative() {
        let mut max_residual = 0.0f64;
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let residual = dissipation_law_residual(system, energy, s)
                .map_err(|e| e.at_time(*t))?;
            max_residual = max_residual.max(residual.abs());
        }
        dissipation_residual = Some(max_residual);
    } else {
        let mut max_drift = 0.0f64;
        let e0 = energy_at(energy, &traj.states[0], traj.times[0])?;
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let e = energy_at(energy, s, *t)?;
            max_drift = max_drift.max((e - e0).abs());
        }
        energy_drift = Some(max_drift);
    }
    let mut casimir_reports = Vec::with_capacity(casimirs.len());
    for c in casimirs {
        let mut max_drift = 0.0f64;
        let c0 = energy_at(&c.function, &traj.states[0], traj.times[0])?;
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let v = energy_at(&c.function, s, *t)?;
            max_drift = max_drift.max((v - c0).abs());
        }
        casimir_reports.push(CasimirDrift {
            name: c.name.clone(),
            max_drift,
            pass: max_drift <= tol.casimir,
        });
    }
    let pass = energy_drift.is_none_or(|d| d <= tol.energy)
        && dissipation_residual.is_none_or(|r| r <= tol.dissipation)
        && casimir_reports.iter().all(|c| c.pass);
    Ok(MonitorReport { family, energy_drift, dissipation_residual, casimirs: casimir_reports, pass })
}

/// The family's dissipation-law residual at one state, using the analytic
/// time derivative `dE/dt = ∇E·rhs(s)`.
fn dissipation_law_residual(
    system: &System,
    energy: &EnergyLike,
    s: &DynState,
) -> Result<f64, DynError> {
    let ds = system.rhs(s)?;
    let e_dot = energy_time_derivative(energy, s, &ds)?;
    let e = energy.eval(&s.x, &s.y, s.z)?;
    let residual = match system.family() {
        // dH/dt + H_z·H = 0 along the dissipative Hamiltonian flow.
        Family::DissipativeHamiltonian => {
            e_dot + system.energy().grad_z(&s.x, &s.y, s.z)? * e
        }
        // dE_L/dt − L_z·E_L = 0 along the Herglotz flow.
        Family::Herglotz => e_dot - system.energy().grad_z(&s.x, &s.y, s.z)? * e,
        _ => unreachable!("residuals are only defined for dissipative families"),
    };
    Ok(residual)
}

/// `∇E·ṡ` — the chain rule through every state slot.
fn energy_time_derivative(
    energy: &EnergyLike,
    s: &DynState,
    ds: &DynState,
) -> Result<f64, DynError> {
    let ex = energy.grad_x(&s.x, &s.y, s.z)?;
    let ey = energy.grad_y(&s.x, &s.y, s.z)?;
    let mut total = 0.0;
    for (g, d) in ex.iter().zip(&ds.x) {
        total += g * d;
    }
    for (g, d) in ey.iter().zip(&ds.y) {
        total += g * d;
    }
    if let (Some(zdot), true) = (ds.z, energy.uses_z()) {
        total += energy.grad_z(&s.x, &s.y, s.z)? * zdot;
    }
    Ok(total)
}

fn energy_at(f: &EnergyLike, s: &DynState, t: f64) -> Result<f64, DynError> {
    f.eval(&s.x, &s.y, s.z).map_err(|e| DynError::from(e).at_time(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::AlgebroidSpec;
    use crate::dynamics::{integrate, Method};
    use crate::expr::{parse, Expr};

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

    fn norm_casimir() -> CasimirFn {
        CasimirFn {
            name: "|y|^2".to_string(),
            function: EnergyLike::new("C1", 0, 3, false, parse("y1^2 + y2^2 + y3^2").unwrap())
                .unwrap(),
        }
    }

    #[test]
    fn rigid_body_conserves_energy_and_casimir() {
        let h = EnergyLike::new("H", 0, 3, false, parse("y1^2/2 + y2^2/4 + y3^2/6").unwrap())
            .unwrap();
        let sys = System::new(&so3(), Family::Hamiltonian, h).unwrap();
        let s0 = DynState::reversible(vec![], vec![1.0, 0.01, 0.01]);
        let traj = integrate(&sys, &s0, 0.0, 50.0, 0.5, Method::rk45_default()).unwrap();
        let report =
            monitor_invariants(&sys, &traj, &[norm_casimir()], &MonitorTolerances::default())
                .unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.energy_drift.unwrap() < 1e-8);
        assert_eq!(report.casimirs.len(), 1);
        assert!(report.casimirs[0].max_drift < 1e-8);
        assert_eq!(report.dissipation_residual, None);
    }

    #[test]
    fn dissipative_law_holds_pointwise() {
        // Contact oscillator: H = y²/2 + x²/2 + 0.1z on the tangent line.
        let spec = AlgebroidSpec::new(1, 1, vec![vec![Expr::one()]], vec![]).unwrap();
        let h = EnergyLike::new("H", 1, 1, true, parse("y1^2/2 + x1^2/2 + 0.1*z").unwrap())
            .unwrap();
        let sys = System::new(&spec, Family::DissipativeHamiltonian, h).unwrap();
        let s0 = DynState::dissipative(vec![1.0], vec![0.0], 0.0);
        let traj = integrate(&sys, &s0, 0.0, 20.0, 0.1, Method::rk45_default()).unwrap();
        let report =
            monitor_invariants(&sys, &traj, &[], &MonitorTolerances::default()).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.dissipation_residual.unwrap() < 1e-9);
        assert_eq!(report.energy_drift, None);
    }

    #[test]
    fn herglotz_law_holds_pointwise() {
        let l =
            EnergyLike::new("l", 0, 3, true, parse("(y1^2 + y2^2 + y3^2)/2 - 0.2*z").unwrap())
                .unwrap();
        let sys = System::new(&so3(), Family::Herglotz, l).unwrap();
        let s0 = DynState::dissipative(vec![], vec![1.0, 2.0, 3.0], 0.0);
        let traj = integrate(&sys, &s0, 0.0, 10.0, 0.1, Method::rk45_default()).unwrap();
        let report =
            monitor_invariants(&sys, &traj, &[], &MonitorTolerances::default()).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.dissipation_residual.unwrap() < 1e-9);
    }

    #[test]
    fn violated_invariants_fail_the_report() {
        let h = EnergyLike::new("H", 0, 3, false, parse("y1^2/2 + y2^2/4 + y3^2/6").unwrap())
            .unwrap();
        let sys = System::new(&so3(), Family::Hamiltonian, h).unwrap();
        // A hand-built "trajectory" that violates conservation outright.
        let traj = Trajectory {
            times: vec![0.0, 1.0],
            states: vec![
                DynState::reversible(vec![], vec![1.0, 0.0, 0.0]),
                DynState::reversible(vec![], vec![2.0, 0.0, 0.0]),
            ],
            energy: vec![0.5, 2.0],
        };
        let report =
            monitor_invariants(&sys, &traj, &[norm_casimir()], &MonitorTolerances::default())
                .unwrap();
        assert!(!report.pass);
        assert!(report.energy_drift.unwrap() > 1.0);
        assert!(!report.casimirs[0].pass);
    }
}
