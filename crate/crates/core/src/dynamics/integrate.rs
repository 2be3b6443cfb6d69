//! Time integration: fixed-step RK4 and adaptive Dormand–Prince 5(4).
//!
//! Both integrators record the state at every step boundary and are fully
//! deterministic: the adaptive controller is a PI controller with fixed
//! safety factor and clamps, so a given system, initial state, and
//! parameter set always produces the identical trajectory.

use rayon::prelude::*;

use super::{DynError, DynState, System};

/// Default relative tolerance of the adaptive integrator.
pub const DEFAULT_RTOL: f64 = 1e-9;
/// Default absolute tolerance of the adaptive integrator.
pub const DEFAULT_ATOL: f64 = 1e-12;
/// Smallest step the adaptive integrator will attempt.
pub const DT_MIN: f64 = 1e-12;

const SAFETY: f64 = 0.9;
const MAX_FACTOR: f64 = 5.0;
const MIN_FACTOR: f64 = 0.2;

/// Integration method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical fixed-step fourth-order Runge–Kutta; the final step is
    /// shortened to land exactly on `t1`.
    Rk4,
    /// Dormand–Prince 5(4) with FSAL and PI step-size control; the `dt`
    /// argument of [`integrate`] is the initial step.
    Rk45 { rtol: f64, atol: f64 },
}

impl Method {
    /// Adaptive method at default tolerances.
    pub fn rk45_default() -> Method {
        Method::Rk45 { rtol: DEFAULT_RTOL, atol: DEFAULT_ATOL }
    }
}

/// An integrated orbit: times, states, and the monitored energy value at
/// each recorded point.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Strictly increasing times, starting at `t0`, ending at `t1`.
    pub times: Vec<f64>,
    pub states: Vec<DynState>,
    /// `H` (or `E_L`) along the trajectory.
    pub energy: Vec<f64>,
}

impl Trajectory {
    /// The final recorded state.
    pub fn last_state(&self) -> &DynState {
        self.states.last().expect("trajectories contain at least the initial state")
    }
}

/// Integrate `system` from `s0` over `[t0, t1]`.
///
/// `dt` is the fixed step for [`Method::Rk4`] and the initial step for
/// [`Method::Rk45`]. Errors from the right-hand side are stamped with the
/// simulation time at which they occurred.
pub fn integrate(
    system: &System,
    s0: &DynState,
    t0: f64,
    t1: f64,
    dt: f64,
    method: Method,
) -> Result<Trajectory, DynError> {
    if !(t1 > t0) || !(dt > 0.0) {
        return Err(crate::field::ModelError::shape(
            "integration",
            format!("need t1 > t0 and dt > 0, got t0={t0}, t1={t1}, dt={dt}"),
        )
        .into());
    }
    system.check_state(s0)?;
    let has_z = system.family().dissipative();
    let (n, k) = (system.n(), system.k());
    let f = |t: f64, flat: &[f64]| -> Result<Vec<f64>, DynError> {
        let state = DynState::from_flat(n, k, has_z, flat);
        Ok(system.rhs(&state).map_err(|e| e.at_time(t))?.to_flat())
    };
    let mut recorder = Recorder::new(system);
    recorder.push(t0, s0.to_flat())?;
    match method {
        Method::Rk4 => rk4(&f, s0.to_flat(), t0, t1, dt, &mut recorder)?,
        Method::Rk45 { rtol, atol } => rk45(&f, s0.to_flat(), t0, t1, dt, rtol, atol, &mut recorder)?,
    }
    Ok(recorder.finish())
}

/// Integrate many initial states in parallel; results keep input order.
pub fn integrate_batch(
    system: &System,
    initial: &[DynState],
    t0: f64,
    t1: f64,
    dt: f64,
    method: Method,
) -> Vec<Result<Trajectory, DynError>> {
    initial
        .par_iter()
        .map(|s0| integrate(system, s0, t0, t1, dt, method))
        .collect()
}

/// Accumulates recorded boundaries and the energy column.
struct Recorder<'a> {
    system: &'a System,
    times: Vec<f64>,
    states: Vec<DynState>,
    energy: Vec<f64>,
}

impl<'a> Recorder<'a> {
    fn new(system: &'a System) -> Recorder<'a> {
        Recorder { system, times: Vec::new(), states: Vec::new(), energy: Vec::new() }
    }

    fn push(&mut self, t: f64, flat: Vec<f64>) -> Result<(), DynError> {
        let has_z = self.system.family().dissipative();
        let state = DynState::from_flat(self.system.n(), self.system.k(), has_z, &flat);
        let e = self.system.energy_value(&state).map_err(|e| DynError::from(e).at_time(t))?;
        self.times.push(t);
        self.states.push(state);
        self.energy.push(e);
        Ok(())
    }

    fn finish(self) -> Trajectory {
        Trajectory { times: self.times, states: self.states, energy: self.energy }
    }
}

fn rk4(
    f: &impl Fn(f64, &[f64]) -> Result<Vec<f64>, DynError>,
    mut s: Vec<f64>,
    t0: f64,
    t1: f64,
    dt: f64,
    rec: &mut Recorder<'_>,
) -> Result<(), DynError> {
    let steps = ((t1 - t0) / dt).ceil().max(1.0) as usize;
    let mut t = t0;
    for j in 1..=steps {
        let target = if j == steps { t1 } else { t0 + j as f64 * dt };
        let h = target - t;
        let k1 = f(t, &s)?;
        let k2 = f(t + h / 2.0, &lincomb(&s, h, &[(0.5, &k1)]))?;
        let k3 = f(t + h / 2.0, &lincomb(&s, h, &[(0.5, &k2)]))?;
        let k4 = f(t + h, &lincomb(&s, h, &[(1.0, &k3)]))?;
        for (i, v) in s.iter_mut().enumerate() {
            *v += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = target;
        rec.push(t, s.clone())?;
    }
    Ok(())
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] =
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
/// Fifth-order weights (also row 7: the FSAL property).
const B5: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
/// Difference between the fifth- and embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[allow(clippy::too_many_arguments)]
fn rk45(
    f: &impl Fn(f64, &[f64]) -> Result<Vec<f64>, DynError>,
    mut s: Vec<f64>,
    t0: f64,
    t1: f64,
    dt0: f64,
    rtol: f64,
    atol: f64,
    rec: &mut Recorder<'_>,
) -> Result<(), DynError> {
    let dim = s.len();
    let mut t = t0;
    let mut h = dt0.min(t1 - t0);
    let mut k1 = f(t, &s)?;
    // PI controller memory; floored so a zero-error step cannot freeze the
    // growth factor at the clamp minimum forever.
    let mut err_prev: f64 = 1.0;
    while t < t1 {
        let last = h >= t1 - t;
        if last {
            h = t1 - t;
        }
        if h < DT_MIN {
            return Err(DynError::StepUnderflow { t, dt: h });
        }
        let k2 = f(t + C[0] * h, &lincomb(&s, h, &[(A2[0], &k1)]))?;
        let k3 = f(t + C[1] * h, &lincomb(&s, h, &[(A3[0], &k1), (A3[1], &k2)]))?;
        let k4 = f(t + C[2] * h, &lincomb(&s, h, &[(A4[0], &k1), (A4[1], &k2), (A4[2], &k3)]))?;
        let k5 = f(
            t + C[3] * h,
            &lincomb(&s, h, &[(A5[0], &k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)]),
        )?;
        let k6 = f(
            t + C[4] * h,
            &lincomb(
                &s,
                h,
                &[(A6[0], &k1), (A6[1], &k2), (A6[2], &k3), (A6[3], &k4), (A6[4], &k5)],
            ),
        )?;
        let s_new = lincomb(
            &s,
            h,
            &[(B5[0], &k1), (B5[2], &k3), (B5[3], &k4), (B5[4], &k5), (B5[5], &k6)],
        );
        let k7 = f(t + h, &s_new)?;
        let stages: [&[f64]; 7] = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
        let mut err_sq = 0.0;
        for i in 0..dim {
            let e: f64 = h * stages.iter().zip(E).map(|(k, w)| w * k[i]).sum::<f64>();
            let scale = atol + rtol * s[i].abs().max(s_new[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / dim as f64).sqrt();
        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            s = s_new;
            k1 = k7;
            rec.push(t, s.clone())?;
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                SAFETY * err.powf(-0.14) * err_prev.powf(0.08)
            };
            h *= factor.clamp(MIN_FACTOR, MAX_FACTOR);
            err_prev = err.max(1e-14);
        } else {
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 0.9);
        }
    }
    Ok(())
}

/// `s + h·Σ c·k` over the given stage combinations.
fn lincomb(s: &[f64], h: f64, terms: &[(f64, &Vec<f64>)]) -> Vec<f64> {
    let mut out = s.to_vec();
    for (c, k) in terms {
        for (o, kv) in out.iter_mut().zip(k.iter()) {
            *o += h * c * kv;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::AlgebroidSpec;
    use crate::dynamics::{EnergyLike, Family};
    use crate::expr::{parse, Expr};

    fn oscillator() -> System {
        let spec = AlgebroidSpec::new(1, 1, vec![vec![Expr::one()]], vec![]).unwrap();
        let h = EnergyLike::new("H", 1, 1, false, parse("(y1^2 + x1^2)/2").unwrap()).unwrap();
        System::new(&spec, Family::Hamiltonian, h).unwrap()
    }

    #[test]
    fn harmonic_oscillator_returns_after_one_period() {
        let sys = oscillator();
        let s0 = DynState::reversible(vec![1.0], vec![0.0]);
        let traj =
            integrate(&sys, &s0, 0.0, std::f64::consts::TAU, 1e-3, Method::Rk4).unwrap();
        let end = traj.last_state();
        assert!((end.x[0] - 1.0).abs() < 1e-7, "x drifted to {}", end.x[0]);
        assert!(end.y[0].abs() < 1e-7, "y drifted to {}", end.y[0]);
        assert_eq!(*traj.times.last().unwrap(), std::f64::consts::TAU);
    }

    #[test]
    fn zero_field_gives_a_constant_trajectory() {
        let spec = AlgebroidSpec::lie_algebra(2, vec![]).unwrap();
        let h = EnergyLike::new("H", 0, 2, false, parse("3").unwrap()).unwrap();
        let sys = System::new(&spec, Family::Hamiltonian, h).unwrap();
        let s0 = DynState::reversible(vec![], vec![0.5, -0.5]);
        for method in [Method::Rk4, Method::rk45_default()] {
            let traj = integrate(&sys, &s0, 0.0, 5.0, 0.1, method).unwrap();
            assert!(traj.states.iter().all(|s| s == &s0));
            assert!(traj.energy.iter().all(|&e| e == 3.0));
        }
    }

    #[test]
    fn adaptive_grid_hits_endpoints_and_grows_steps() {
        let sys = oscillator();
        let s0 = DynState::reversible(vec![1.0], vec![0.0]);
        let traj = integrate(&sys, &s0, 0.0, 10.0, 1e-6, Method::rk45_default()).unwrap();
        assert_eq!(traj.times[0], 0.0);
        assert_eq!(*traj.times.last().unwrap(), 10.0);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        // The controller must have expanded the deliberately tiny initial
        // step by orders of magnitude.
        assert!(traj.times.len() < 2000, "took {} steps", traj.times.len());
        // Fifth-order accuracy keeps the energy essentially exact here.
        let drift = traj
            .energy
            .iter()
            .map(|e| (e - traj.energy[0]).abs())
            .fold(0.0, f64::max);
        assert!(drift < 1e-9, "energy drift {drift:e}");
    }

    #[test]
    fn rk4_convergence_is_fourth_order() {
        // One oscillator period at two resolutions; the end-point error
        // must shrink by ~2⁴.
        let sys = oscillator();
        let s0 = DynState::reversible(vec![1.0], vec![0.0]);
        let error = |dt: f64| {
            let traj = integrate(&sys, &s0, 0.0, std::f64::consts::TAU, dt, Method::Rk4).unwrap();
            let end = traj.last_state();
            ((end.x[0] - 1.0).powi(2) + end.y[0].powi(2)).sqrt()
        };
        let (coarse, fine) = (error(0.02), error(0.01));
        let order = (coarse / fine).log2();
        assert!((3.7..4.3).contains(&order), "observed order {order}");
    }

    #[test]
    fn bad_spans_are_rejected() {
        let sys = oscillator();
        let s0 = DynState::reversible(vec![1.0], vec![0.0]);
        assert!(integrate(&sys, &s0, 1.0, 1.0, 0.1, Method::Rk4).is_err());
        assert!(integrate(&sys, &s0, 0.0, 1.0, 0.0, Method::Rk4).is_err());
    }

    #[test]
    fn eval_failures_carry_the_simulation_time() {
        // ẋ = 1 pushes x toward the ln singularity at x = 1.
        let spec = AlgebroidSpec::new(1, 1, vec![vec![Expr::one()]], vec![]).unwrap();
        let h = EnergyLike::new("H", 1, 1, false, parse("y1 + ln(1 - x1)").unwrap()).unwrap();
        let sys = System::new(&spec, Family::Hamiltonian, h).unwrap();
        let s0 = DynState::reversible(vec![0.5], vec![0.0]);
        let err = integrate(&sys, &s0, 0.0, 1.0, 0.01, Method::Rk4).unwrap_err();
        match err {
            DynError::AtTime { t, source } => {
                assert!(t > 0.3 && t <= 1.0, "t = {t}");
                assert!(matches!(*source, DynError::Eval(_)), "{source}");
            }
            other => panic!("expected a timestamped error, got {other}"),
        }
    }
}
