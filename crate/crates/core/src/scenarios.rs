//! Built-in, verified specimens: one per hierarchy level and dynamics
//! family.
//!
//! Scenario data is embedded in code rather than files so the test suite
//! never depends on I/O; the CLI exports scenarios through the regular
//! serialization path when files are wanted. Every scenario passes the full
//! verifier at tolerance 1e-9, its classification matches the registered
//! label, and its reference facts (closed-form solutions, conserved
//! quantities) back the oracle tests.

use crate::algebroid::AlgebroidSpec;
use crate::bdcp::{make_product, BdcpParts, BdcpSpec, HierarchyLevel};
use crate::dynamics::{CasimirFn, DynState, EnergyLike, Family};
use crate::expr::{parse, Expr};

/// The registered scenario names, in listing order.
pub const NAMES: [&str; 8] = [
    "tangent-R2",
    "so3-rigid-body",
    "se3-heavy-top",
    "heisenberg-cocycle",
    "sl2-zeta-split",
    "so3xso3-bicocycle",
    "contact-damped-oscillator",
    "so3-ep-herglotz",
];

/// The structural data of a scenario: a plain algebroid, or BDCP data with
/// its splitting.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSpec {
    Algebroid(AlgebroidSpec),
    Bdcp(BdcpSpec),
}

impl ScenarioSpec {
    /// The total algebroid the dynamics runs on (assembled for BDCP data).
    pub fn total(&self) -> AlgebroidSpec {
        match self {
            ScenarioSpec::Algebroid(spec) => spec.clone(),
            ScenarioSpec::Bdcp(spec) => spec.assemble_total(),
        }
    }
}

/// Default simulation setup used when the CLI gets only a scenario name.
#[derive(Debug, Clone, PartialEq)]
pub struct SimDefaults {
    pub family: Family,
    pub state: DynState,
    pub t0: f64,
    pub t1: f64,
}

/// A named, verified specimen.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    /// One-line description for listings.
    pub summary: &'static str,
    pub spec: ScenarioSpec,
    /// Hierarchy level of the registered structure data.
    pub classification: HierarchyLevel,
    /// Reversible Hamiltonian preset, if the scenario has one.
    pub hamiltonian: Option<EnergyLike>,
    /// Reversible Lagrangian preset.
    pub lagrangian: Option<EnergyLike>,
    /// Dissipative (z-extended) Hamiltonian preset.
    pub dissipative_hamiltonian: Option<EnergyLike>,
    /// Dissipative (z-extended) Lagrangian preset.
    pub dissipative_lagrangian: Option<EnergyLike>,
    /// Conserved quantities to monitor.
    pub casimirs: Vec<CasimirFn>,
    /// Reference facts backing the oracle tests.
    pub facts: Vec<&'static str>,
    pub defaults: SimDefaults,
}

impl Scenario {
    /// The energy preset matching an equation family, if registered.
    pub fn energy_for(&self, family: Family) -> Option<&EnergyLike> {
        match family {
            Family::Hamiltonian => self.hamiltonian.as_ref(),
            Family::DissipativeHamiltonian => self.dissipative_hamiltonian.as_ref(),
            Family::EulerLagrange => self.lagrangian.as_ref(),
            Family::Herglotz => self.dissipative_lagrangian.as_ref(),
        }
    }
}

/// Requested scenario is not in the registry.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("unknown scenario `{0}`; run the scenario listing to see what is registered")]
pub struct UnknownScenario(pub String);

/// Look up a scenario by name.
pub fn get(name: &str) -> Result<Scenario, UnknownScenario> {
    match name {
        "tangent-R2" => Ok(tangent_r2()),
        "so3-rigid-body" => Ok(so3_rigid_body()),
        "se3-heavy-top" => Ok(se3_heavy_top()),
        "heisenberg-cocycle" => Ok(heisenberg_cocycle()),
        "sl2-zeta-split" => Ok(sl2_zeta_split()),
        "so3xso3-bicocycle" => Ok(so3xso3_bicocycle()),
        "contact-damped-oscillator" => Ok(contact_damped_oscillator()),
        "so3-ep-herglotz" => Ok(so3_ep_herglotz()),
        other => Err(UnknownScenario(other.to_string())),
    }
}

/// All registered scenarios, in listing order.
pub fn all() -> Vec<Scenario> {
    NAMES.iter().map(|n| get(n).expect("registry names resolve")).collect()
}

fn expr(s: &str) -> Expr {
    parse(s).expect("scenario expression data is well-formed")
}

fn energy(name: &str, n: usize, k: usize, uses_z: bool, src: &str) -> EnergyLike {
    EnergyLike::new(name, n, k, uses_z, expr(src)).expect("scenario energy data is well-formed")
}

fn casimir(name: &'static str, k: usize, src: &str) -> CasimirFn {
    CasimirFn { name: name.to_string(), function: energy(name, 0, k, false, src) }
}

/// The totally antisymmetric structure entries of so(3) (`α < β` half).
fn so3_entries() -> Vec<(usize, usize, usize, Expr)> {
    vec![(0, 1, 2, expr("1")), (0, 2, 1, expr("-1")), (1, 2, 0, expr("1"))]
}

fn so3_spec() -> AlgebroidSpec {
    AlgebroidSpec::lie_algebra(3, so3_entries()).expect("so(3) data is well-formed")
}

fn tangent_line_spec() -> AlgebroidSpec {
    AlgebroidSpec::new(1, 1, vec![vec![expr("1")]], vec![]).expect("tangent data is well-formed")
}

fn tangent_r2() -> Scenario {
    let spec = AlgebroidSpec::new(
        2,
        2,
        vec![vec![expr("1"), expr("0")], vec![expr("0"), expr("1")]],
        vec![],
    )
    .expect("tangent data is well-formed");
    Scenario {
        name: "tangent-R2",
        summary: "tangent algebroid of the plane; classical mechanics preset",
        spec: ScenarioSpec::Algebroid(spec),
        classification: HierarchyLevel::Direct,
        hamiltonian: Some(energy("H", 2, 2, false, "(y1^2 + y2^2 + x1^2 + x2^2)/2")),
        lagrangian: Some(energy("L", 2, 2, false, "(y1^2 + y2^2 - x1^2 - x2^2)/2")),
        dissipative_hamiltonian: None,
        dissipative_lagrangian: None,
        casimirs: Vec::new(),
        facts: vec![
            "isotropic harmonic oscillator: every orbit returns after t = 2*pi",
            "Hamilton and Euler-Lagrange presets describe the same motion",
        ],
        defaults: SimDefaults {
            family: Family::Hamiltonian,
            state: DynState::reversible(vec![1.0, 0.0], vec![0.0, 1.0]),
            t0: 0.0,
            t1: std::f64::consts::TAU,
        },
    }
}

fn so3_rigid_body() -> Scenario {
    Scenario {
        name: "so3-rigid-body",
        summary: "free rigid body: Lie-Poisson on the dual of so(3)",
        spec: ScenarioSpec::Algebroid(so3_spec()),
        classification: HierarchyLevel::Direct,
        hamiltonian: Some(energy("H", 0, 3, false, "y1^2/2 + y2^2/4 + y3^2/6")),
        lagrangian: Some(energy("l", 0, 3, false, "(y1^2 + 2*y2^2 + 3*y3^2)/2")),
        dissipative_hamiltonian: None,
        dissipative_lagrangian: None,
        casimirs: vec![casimir("|y|^2", 3, "y1^2 + y2^2 + y3^2")],
        facts: vec![
            "inertia (1, 2, 3): Euler equations ydot = y x grad(H)",
            "|y|^2 is a Casimir of the Lie-Poisson bracket",
            "the Lagrangian preset is the Legendre dual of the Hamiltonian one",
        ],
        defaults: SimDefaults {
            family: Family::Hamiltonian,
            state: DynState::reversible(vec![], vec![1.0, 0.01, 0.01]),
            t0: 0.0,
            t1: 100.0,
        },
    }
}

fn se3_heavy_top() -> Scenario {
    let mut parts = BdcpParts::lie_algebra(3, 3);
    // theta: the rotation block so(3).
    parts.theta = so3_entries();
    // rho[a][alpha][beta] = epsilon(a, alpha, beta): rotations act on the
    // translation block.
    for (a, al, be, v) in [
        (0, 1, 2, "1"),
        (0, 2, 1, "-1"),
        (1, 0, 2, "-1"),
        (1, 2, 0, "1"),
        (2, 0, 1, "1"),
        (2, 1, 0, "-1"),
    ] {
        parts.rho.push((a, al, be, expr(v)));
    }
    let spec = make_product(HierarchyLevel::Semidirect, parts)
        .expect("heavy-top data is well-formed");
    Scenario {
        name: "se3-heavy-top",
        summary: "heavy top: semidirect product so(3) acting on R^3",
        spec: ScenarioSpec::Bdcp(spec),
        classification: HierarchyLevel::Semidirect,
        hamiltonian: Some(energy("H", 0, 6, false, "y4^2/2 + y5^2/4 + y6^2/6 + y3")),
        lagrangian: None,
        dissipative_hamiltonian: None,
        dissipative_lagrangian: None,
        casimirs: vec![
            casimir("|Gamma|^2", 6, "y1^2 + y2^2 + y3^2"),
            casimir("Gamma.Pi", 6, "y1*y4 + y2*y5 + y3*y6"),
        ],
        facts: vec![
            "assembled total is the Euclidean algebra se(3)",
            "y1..y3 are the advected direction Gamma, y4..y6 the body momenta Pi",
            "|Gamma|^2 and Gamma.Pi are the se(3)* Casimirs",
        ],
        defaults: SimDefaults {
            family: Family::Hamiltonian,
            state: DynState::reversible(vec![], vec![0.2, 0.3, 0.9, 1.0, 0.5, 0.3]),
            t0: 0.0,
            t1: 20.0,
        },
    }
}

fn heisenberg_cocycle() -> Scenario {
    // A = span{Z} (the center), B = span{X, Y}; [X, Y] = Z is the cocycle.
    let mut parts = BdcpParts::lie_algebra(1, 2);
    parts.psi.push((0, 1, 0, expr("1")));
    let spec = make_product(HierarchyLevel::CocycleExt, parts)
        .expect("Heisenberg data is well-formed");
    Scenario {
        name: "heisenberg-cocycle",
        summary: "Heisenberg algebra h3 as a 2-cocycle extension",
        spec: ScenarioSpec::Bdcp(spec),
        classification: HierarchyLevel::CocycleExt,
        hamiltonian: Some(energy("H", 0, 3, false, "(y2^2 + y3^2)/2")),
        lagrangian: Some(energy("l", 0, 3, false, "(y1^2 + y2^2 + y3^2)/2")),
        dissipative_hamiltonian: None,
        dissipative_lagrangian: None,
        casimirs: vec![casimir("y1", 3, "y1")],
        facts: vec![
            "the central coordinate y1 is a Casimir",
            "closed form: (y2 + i*y3)(t) = (y2 + i*y3)(0) * exp(i*y1*t)",
        ],
        defaults: SimDefaults {
            family: Family::Hamiltonian,
            state: DynState::reversible(vec![], vec![1.0, 1.0, 0.0]),
            t0: 0.0,
            t1: 10.0,
        },
    }
}

fn sl2_zeta_split() -> Scenario {
    // A = span{E, F}, B = span{H} in sl(2, R): [E, F] = H escapes A (zeta),
    // [H, E] = 2E and [H, F] = -2F stay in A (rho).
    let mut parts = BdcpParts::lie_algebra(2, 1);
    parts.zeta.push((0, 1, 0, expr("1")));
    parts.rho.push((0, 0, 0, expr("2")));
    parts.rho.push((0, 1, 1, expr("-2")));
    let spec = BdcpSpec::from_parts(parts).expect("sl(2) data is well-formed");
    Scenario {
        name: "sl2-zeta-split",
        summary: "sl(2, R) split against its Cartan line; one twisted cocycle",
        spec: ScenarioSpec::Bdcp(spec),
        classification: HierarchyLevel::Bdcp,
        hamiltonian: Some(energy("H", 0, 3, false, "(y1^2 + y2^2 + y3^2)/2")),
        lagrangian: Some(energy("l", 0, 3, false, "(y1^2 + y2^2 + y3^2)/2")),
        dissipative_hamiltonian: None,
        dissipative_lagrangian: None,
        casimirs: vec![casimir("y1*y2 + y3^2/4", 3, "y1*y2 + y3^2/4")],
        facts: vec![
            "basis (E, F, H): [E,F] = H, [H,E] = 2E, [H,F] = -2F",
            "y1*y2 + y3^2/4 is the quadratic Casimir in this basis",
        ],
        defaults: SimDefaults {
            family: Family::Hamiltonian,
            state: DynState::reversible(vec![], vec![0.4, 0.7, 0.3]),
            t0: 0.0,
            t1: 10.0,
        },
    }
}

fn so3xso3_bicocycle() -> Scenario {
    // so(3) + so(3) with generators a1..a3, b1..b3, split across the
    // summands: A = span{a1, a2, b3}, B = span{a3, b1, b2}. Both block
    // brackets escape their block (zeta and psi), and the mixed brackets
    // populate rho and sigma.
    let mut parts = BdcpParts::lie_algebra(3, 3);
    // [a1, a2] = a3 lands in B.
    parts.zeta.push((0, 1, 0, expr("1")));
    // [b1, b2] = b3 lands in A.
    parts.psi.push((1, 2, 2, expr("1")));
    // [a3, a1] = a2, [a3, a2] = -a1.
    parts.rho.push((0, 0, 1, expr("1")));
    parts.rho.push((0, 1, 0, expr("-1")));
    // [b1, b3] = -b2, [b2, b3] = b1.
    parts.sigma.push((1, 2, 2, expr("-1")));
    parts.sigma.push((2, 2, 1, expr("1")));
    let spec = BdcpSpec::from_parts(parts).expect("so(3)+so(3) data is well-formed");
    Scenario {
        name: "so3xso3-bicocycle",
        summary: "so(3) + so(3) under a skew splitting; both cocycles nonzero",
        spec: ScenarioSpec::Bdcp(spec),
        classification: HierarchyLevel::Bdcp,
        hamiltonian: Some(energy(
            "H",
            0,
            6,
            false,
            "y1^2/2 + y2^2/4 + y3^2/6 + y4^2/2 + y5^2/4 + y6^2/6",
        )),
        lagrangian: Some(energy(
            "l",
            0,
            6,
            false,
            "(y1^2 + y2^2 + y3^2 + y4^2 + y5^2 + y6^2)/2",
        )),
        dissipative_hamiltonian: None,
        dissipative_lagrangian: None,
        casimirs: vec![
            casimir("|first so(3)|^2", 6, "y1^2 + y2^2 + y4^2"),
            casimir("|second so(3)|^2", 6, "y3^2 + y5^2 + y6^2"),
        ],
        facts: vec![
            "frame (a1, a2, b3, a3, b1, b2); assembled total is so(3) + so(3)",
            "each summand's momentum norm is a Casimir",
        ],
        defaults: SimDefaults {
            family: Family::Hamiltonian,
            state: DynState::reversible(vec![], vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]),
            t0: 0.0,
            t1: 10.0,
        },
    }
}

fn contact_damped_oscillator() -> Scenario {
    Scenario {
        name: "contact-damped-oscillator",
        summary: "contact Hamiltonian / Herglotz damped oscillator on the line",
        spec: ScenarioSpec::Algebroid(tangent_line_spec()),
        classification: HierarchyLevel::Direct,
        hamiltonian: None,
        lagrangian: None,
        dissipative_hamiltonian: Some(energy("H", 1, 1, true, "y1^2/2 + x1^2/2 + 0.1*z")),
        dissipative_lagrangian: Some(energy("L", 1, 1, true, "y1^2/2 - x1^2/2 - 0.1*z")),
        casimirs: Vec::new(),
        facts: vec![
            "both presets generate xddot + 0.1*xdot + x = 0",
            "closed form from (x, y) = (1, 0): x(t) = exp(-t/20)(cos(w*t) + sin(w*t)/(20*w)), w^2 = 0.9975",
        ],
        defaults: SimDefaults {
            family: Family::DissipativeHamiltonian,
            state: DynState::dissipative(vec![1.0], vec![0.0], 0.0),
            t0: 0.0,
            t1: 20.0,
        },
    }
}

fn so3_ep_herglotz() -> Scenario {
    Scenario {
        name: "so3-ep-herglotz",
        summary: "Euler-Poincare-Herglotz decay on so(3) with identity inertia",
        spec: ScenarioSpec::Algebroid(so3_spec()),
        classification: HierarchyLevel::Direct,
        hamiltonian: None,
        lagrangian: None,
        dissipative_hamiltonian: Some(energy("h", 0, 3, true, "(y1^2 + y2^2 + y3^2)/2 + 0.2*z")),
        dissipative_lagrangian: Some(energy("l", 0, 3, true, "(y1^2 + y2^2 + y3^2)/2 - 0.2*z")),
        casimirs: Vec::new(),
        facts: vec![
            "identity inertia kills the structure terms: ydot = -0.2*y",
            "closed form: y(t) = y(0) * exp(-0.2*t), under both presets",
        ],
        defaults: SimDefaults {
            family: Family::Herglotz,
            state: DynState::dissipative(vec![], vec![1.0, 2.0, 3.0], 0.0),
            t0: 0.0,
            t1: 10.0,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::{verify_algebroid, SamplePlan, DEFAULT_TOL};

    #[test]
    fn listing_is_exactly_the_registry() {
        let names: Vec<&str> = all().iter().map(|s| s.name).collect();
        assert_eq!(names, NAMES);
        assert!(get("so2-rigid-body").is_err());
    }

    #[test]
    fn every_scenario_verifies_and_classifies_as_registered() {
        for scenario in all() {
            let report =
                verify_algebroid(&scenario.spec.total(), &SamplePlan::default(), DEFAULT_TOL)
                    .unwrap();
            assert!(report.pass, "{} failed verification: {report:?}", scenario.name);
            if let ScenarioSpec::Bdcp(b) = &scenario.spec {
                assert_eq!(b.classify(), scenario.classification, "{}", scenario.name);
            }
        }
    }

    #[test]
    fn defaults_are_simulable() {
        use crate::dynamics::{integrate, Method, System};
        for scenario in all() {
            let energy = scenario
                .energy_for(scenario.defaults.family)
                .unwrap_or_else(|| panic!("{} lacks its default preset", scenario.name))
                .clone();
            let sys = System::new(&scenario.spec.total(), scenario.defaults.family, energy)
                .unwrap_or_else(|e| panic!("{}: {e}", scenario.name));
            let traj = integrate(
                &sys,
                &scenario.defaults.state,
                scenario.defaults.t0,
                (scenario.defaults.t0 + 1.0).min(scenario.defaults.t1),
                0.01,
                Method::rk45_default(),
            )
            .unwrap_or_else(|e| panic!("{}: {e}", scenario.name));
            assert!(traj.times.len() > 1);
        }
    }

    #[test]
    fn heavy_top_casimirs_are_conserved() {
        use crate::dynamics::{integrate, monitor_invariants, Method, MonitorTolerances, System};
        let sc = get("se3-heavy-top").unwrap();
        let sys = System::new(
            &sc.spec.total(),
            Family::Hamiltonian,
            sc.hamiltonian.clone().unwrap(),
        )
        .unwrap();
        let traj =
            integrate(&sys, &sc.defaults.state, 0.0, 20.0, 0.2, Method::rk45_default()).unwrap();
        let report =
            monitor_invariants(&sys, &traj, &sc.casimirs, &MonitorTolerances::default()).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn heisenberg_flow_matches_its_closed_form() {
        use crate::dynamics::{integrate, Method, System};
        let sc = get("heisenberg-cocycle").unwrap();
        let sys = System::new(
            &sc.spec.total(),
            Family::Hamiltonian,
            sc.hamiltonian.clone().unwrap(),
        )
        .unwrap();
        let traj =
            integrate(&sys, &sc.defaults.state, 0.0, 10.0, 0.1, Method::rk45_default()).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s.y[0] - 1.0).abs() < 1e-9);
            assert!((s.y[1] - t.cos()).abs() < 1e-7, "t = {t}");
            assert!((s.y[2] - t.sin()).abs() < 1e-7, "t = {t}");
        }
    }
}
