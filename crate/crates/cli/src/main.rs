//! Command-line surface over the algebroid library.
//!
//! Subcommands: `verify` (residual checks), `product` (assemble BDCP data
//! into its total algebroid), `decompose` (split and classify a total),
//! `simulate` (integrate a dynamics family to CSV), `invariants`
//! (recompute conservation/dissipation laws along a stored trajectory),
//! and `scenarios` (list the built-in registry).
//!
//! Exit codes: 0 success, 1 usage, 2 schema or parse problems in files and
//! flag values, 3 a verification or invariant check ran and failed, 4 a
//! numerical failure (singular Lagrangian, step underflow, domain errors).
//! All outputs are deterministic: identical inputs and flags produce
//! byte-identical files.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use algebroid::dynamics::{
    integrate, integrate_batch, monitor_invariants, DynError, DynState, EnergyLike, Family,
    Method, MonitorReport, MonitorTolerances, System, Trajectory, DEFAULT_ATOL, DEFAULT_RTOL,
};
use algebroid::expr::parse;
use algebroid::field::{EvalAt, ModelError};
use algebroid::io::{
    load_spec, read_trajectory, save_spec, write_trajectory, FileError, SpecFile, TrajectoryFile,
};
use algebroid::scenarios::{self, Scenario, UnknownScenario};
use algebroid::verifier::{
    check_bdcp, verify_algebroid, ResidualReport, SamplePlan, VerifyError, DEFAULT_POINTS,
    DEFAULT_SEED, DEFAULT_TOL,
};

const FAMILY_NAMES: [&str; 7] = [
    "hamilton",
    "lie-poisson",
    "euler-lagrange",
    "euler-poincare",
    "herglotz",
    "contact",
    "dissipative-hamilton",
];

#[derive(Parser)]
#[command(
    name = "algebroid",
    version,
    about = "Build, verify, decompose, and simulate bicocycle double cross product Lie algebroids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check antisymmetry, anchor morphism, and Jacobi residuals of a spec.
    Verify {
        /// Specification file (kind "algebroid" or "bdcp").
        spec: PathBuf,
        /// Number of sample points in the Halton plan.
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        /// Offset into the Halton sequence.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Absolute residual tolerance.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Assemble a BDCP specification into its total algebroid.
    Product {
        /// Specification file of kind "bdcp".
        spec: PathBuf,
        /// Where to write the assembled total (kind "algebroid").
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a total specification at a fiber index and classify the parts.
    Decompose {
        /// Specification file of kind "algebroid".
        spec: PathBuf,
        /// Dimension of the first block (1 <= p < k).
        #[arg(long)]
        split: usize,
        /// Where to write the split data (kind "bdcp").
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate a dynamics family and write the trajectory as CSV.
    Simulate {
        /// Specification file to simulate (alternative to --scenario).
        #[arg(value_name = "SPEC", required_unless_present = "scenario", conflicts_with = "scenario")]
        spec: Option<PathBuf>,
        /// Name of a built-in scenario.
        #[arg(long)]
        scenario: Option<String>,
        /// Equation family.
        #[arg(long, value_parser = FAMILY_NAMES)]
        dynamics: Option<String>,
        /// Energy expression, or the name of a preset of the chosen scenario.
        #[arg(long)]
        energy: Option<String>,
        /// Comma-separated initial state: x, then y, then z for dissipative
        /// families.
        #[arg(long, conflicts_with = "states_file")]
        state: Option<String>,
        /// File with one comma-separated initial state per line; output
        /// files are numbered -001, -002, ...
        #[arg(long)]
        states_file: Option<PathBuf>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t1: Option<f64>,
        /// Step size (rk4) or initial step size (rk45; default (t1-t0)/100).
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value = "rk45", value_parser = ["rk4", "rk45"])]
        method: String,
        /// Relative tolerance (rk45 only).
        #[arg(long)]
        rtol: Option<f64>,
        /// Absolute tolerance (rk45 only).
        #[arg(long)]
        atol: Option<f64>,
        /// Output trajectory CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute invariant drifts along a stored trajectory.
    Invariants {
        /// Trajectory CSV file produced by `simulate`.
        trajectory: PathBuf,
        /// Scenario name, or path to the specification file the trajectory
        /// was simulated on.
        #[arg(long)]
        system: String,
        /// Equation family (defaults to the scenario's).
        #[arg(long, value_parser = FAMILY_NAMES)]
        dynamics: Option<String>,
        /// Energy expression or scenario preset name (defaults to the
        /// scenario's preset for the family).
        #[arg(long)]
        energy: Option<String>,
        /// Maximum allowed energy drift (reversible families).
        #[arg(long)]
        energy_tol: Option<f64>,
        /// Maximum allowed per-Casimir drift.
        #[arg(long)]
        casimir_tol: Option<f64>,
        /// Maximum allowed dissipation-law residual (dissipative families).
        #[arg(long)]
        dissipation_tol: Option<f64>,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// List the built-in scenario registry, or export one entry.
    Scenarios {
        /// Export the named scenario's specification instead of listing.
        #[arg(long, requires = "out")]
        export: Option<String>,
        /// Where to write the exported specification.
        #[arg(long, requires = "export")]
        out: Option<PathBuf>,
    },
}

fn main() {
    // Die quietly when the output pipe closes (`algebroid ... | head`),
    // like any other line-oriented tool, instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

/// A command failed; `code` follows the exit-code contract.
struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Failure {
        fail(2, e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Failure {
        fail(2, e.to_string())
    }
}

impl From<UnknownScenario> for Failure {
    fn from(e: UnknownScenario) -> Failure {
        fail(1, e.to_string())
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Failure {
        let code = match &e {
            VerifyError::Model(_) => 2,
            VerifyError::Eval(_) => 4,
        };
        fail(code, e.to_string())
    }
}

impl From<EvalAt> for Failure {
    fn from(e: EvalAt) -> Failure {
        fail(4, e.to_string())
    }
}

impl From<DynError> for Failure {
    fn from(e: DynError) -> Failure {
        fn code(e: &DynError) -> i32 {
            match e {
                DynError::Model(_) => 2,
                DynError::AtTime { source, .. } => code(source),
                _ => 4,
            }
        }
        fail(code(&e), e.to_string())
    }
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Verify { spec, points, seed, tol, json } => {
            cmd_verify(&spec, points, seed, tol, json)
        }
        Command::Product { spec, out } => cmd_product(&spec, &out),
        Command::Decompose { spec, split, out } => cmd_decompose(&spec, split, &out),
        Command::Simulate {
            spec,
            scenario,
            dynamics,
            energy,
            state,
            states_file,
            t0,
            t1,
            dt,
            method,
            rtol,
            atol,
            out,
        } => cmd_simulate(SimulateArgs {
            spec,
            scenario,
            dynamics,
            energy,
            state,
            states_file,
            t0,
            t1,
            dt,
            method,
            rtol,
            atol,
            out,
        }),
        Command::Invariants {
            trajectory,
            system,
            dynamics,
            energy,
            energy_tol,
            casimir_tol,
            dissipation_tol,
            json,
        } => cmd_invariants(
            &trajectory,
            &system,
            dynamics.as_deref(),
            energy.as_deref(),
            MonitorTolerances {
                energy: energy_tol.unwrap_or(MonitorTolerances::default().energy),
                casimir: casimir_tol.unwrap_or(MonitorTolerances::default().casimir),
                dissipation: dissipation_tol.unwrap_or(MonitorTolerances::default().dissipation),
            },
            json,
        ),
        Command::Scenarios { export, out } => cmd_scenarios(export.as_deref(), out.as_deref()),
    }
}

// ---------------------------------------------------------------------------
// verify / product / decompose / scenarios
// ---------------------------------------------------------------------------

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn print_checks(checks: &[ResidualReport]) {
    for check in checks {
        let location = check
            .location
            .as_ref()
            .map(|l| format!(" at point {} indices {:?}", l.point_index, l.indices))
            .unwrap_or_default();
        println!(
            "{:<16} max residual {:.3e}{} (tolerance {:.1e}) {}",
            check.check.label(),
            check.max_residual,
            location,
            check.tol,
            pass_word(check.pass),
        );
    }
}

fn cmd_verify(spec: &Path, points: usize, seed: u64, tol: f64, json: bool) -> Result<i32, Failure> {
    let plan = SamplePlan::Halton { points, seed };
    let pass = match load_spec(spec)? {
        SpecFile::Algebroid(a) => {
            let report = verify_algebroid(&a, &plan, tol)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            } else {
                print_checks(&report.checks);
                println!("{}", if report.pass { "PASS" } else { "FAIL" });
            }
            report.pass
        }
        SpecFile::Bdcp(b) => {
            let report = check_bdcp(&b, &plan, tol)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            } else {
                print_checks(&report.checks);
                println!("nonzero blocks: {}", report.nonzero_blocks.join(", "));
                println!("leibniz compatibility: {}", report.leibniz);
                println!("{}", if report.pass { "PASS" } else { "FAIL" });
            }
            report.pass
        }
    };
    Ok(if pass { 0 } else { 3 })
}

fn cmd_product(spec: &Path, out: &Path) -> Result<i32, Failure> {
    let SpecFile::Bdcp(bdcp) = load_spec(spec)? else {
        return Err(fail(2, "product needs a kind \"bdcp\" specification"));
    };
    save_spec(out, &SpecFile::Algebroid(bdcp.assemble_total()))?;
    println!("wrote {}", out.display());
    Ok(0)
}

fn cmd_decompose(spec: &Path, split: usize, out: &Path) -> Result<i32, Failure> {
    let SpecFile::Algebroid(total) = load_spec(spec)? else {
        return Err(fail(2, "decompose needs a kind \"algebroid\" specification (bdcp files are already split)"));
    };
    let parts = algebroid::bdcp::decompose(&total, split)?;
    println!("classification: {}", parts.classify().label());
    save_spec(out, &SpecFile::Bdcp(parts))?;
    println!("wrote {}", out.display());
    Ok(0)
}

fn cmd_scenarios(export: Option<&str>, out: Option<&Path>) -> Result<i32, Failure> {
    if let Some(name) = export {
        let scenario = scenarios::get(name)?;
        let file = match scenario.spec {
            scenarios::ScenarioSpec::Algebroid(a) => SpecFile::Algebroid(a),
            scenarios::ScenarioSpec::Bdcp(b) => SpecFile::Bdcp(b),
        };
        let out = out.expect("clap ties --export to --out");
        save_spec(out, &file)?;
        println!("wrote {}", out.display());
        return Ok(0);
    }
    for sc in scenarios::all() {
        println!("{:<26} {:<12} {}", sc.name, sc.classification.label(), sc.summary);
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    spec: Option<PathBuf>,
    scenario: Option<String>,
    dynamics: Option<String>,
    energy: Option<String>,
    state: Option<String>,
    states_file: Option<PathBuf>,
    t0: Option<f64>,
    t1: Option<f64>,
    dt: Option<f64>,
    method: String,
    rtol: Option<f64>,
    atol: Option<f64>,
    out: PathBuf,
}

fn resolve_family(flag: Option<&str>, scenario: Option<&Scenario>) -> Result<Family, Failure> {
    match flag {
        Some("hamilton") | Some("lie-poisson") => Ok(Family::Hamiltonian),
        Some("euler-lagrange") | Some("euler-poincare") => Ok(Family::EulerLagrange),
        Some("herglotz") => Ok(Family::Herglotz),
        Some("contact") | Some("dissipative-hamilton") => Ok(Family::DissipativeHamiltonian),
        Some(other) => unreachable!("clap validated --dynamics {other}"),
        None => scenario
            .map(|s| s.defaults.family)
            .ok_or_else(|| fail(1, "--dynamics is required when not running a scenario")),
    }
}

fn resolve_energy(
    flag: Option<&str>,
    scenario: Option<&Scenario>,
    family: Family,
    n: usize,
    k: usize,
) -> Result<EnergyLike, Failure> {
    if let Some(src) = flag {
        if let Some(sc) = scenario {
            let presets = [
                &sc.hamiltonian,
                &sc.lagrangian,
                &sc.dissipative_hamiltonian,
                &sc.dissipative_lagrangian,
            ];
            if let Some(preset) = presets.into_iter().flatten().find(|p| p.name() == src) {
                return Ok(preset.clone());
            }
        }
        let expr = parse(src).map_err(|e| fail(2, format!("--energy: {e}")))?;
        let name = if family.lagrangian() { "L" } else { "H" };
        EnergyLike::new(name, n, k, family.dissipative(), expr)
            .map_err(|e| fail(2, format!("--energy: {e}")))
    } else if let Some(sc) = scenario {
        sc.energy_for(family).cloned().ok_or_else(|| {
            fail(
                1,
                format!(
                    "scenario `{}` has no energy preset for the {} family; pass --energy",
                    sc.name,
                    family.label()
                ),
            )
        })
    } else {
        Err(fail(1, "--energy is required when not running a scenario"))
    }
}

fn parse_state(src: &str, n: usize, k: usize, dissipative: bool) -> Result<DynState, Failure> {
    let values = src
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| fail(2, format!("state entry `{tok}` is not a number")))
        })
        .collect::<Result<Vec<f64>, Failure>>()?;
    let expected = n + k + usize::from(dissipative);
    if values.len() != expected {
        return Err(fail(
            2,
            format!(
                "state has {} entries; expected {expected} ({n} base + {k} fiber{})",
                values.len(),
                if dissipative { " + z" } else { "" },
            ),
        ));
    }
    Ok(DynState {
        x: values[..n].to_vec(),
        y: values[n..n + k].to_vec(),
        z: dissipative.then(|| values[n + k]),
    })
}

/// `traj.csv` -> `traj-001.csv`, `traj-002.csv`, ... for batch output.
fn numbered(path: &Path, index: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    path.with_file_name(format!("{stem}-{:03}{ext}", index + 1))
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32, Failure> {
    let scenario = args.scenario.as_deref().map(scenarios::get).transpose()?;
    let (total, casimirs) = match (&args.spec, &scenario) {
        (Some(path), None) => (load_spec(path)?.total(), Vec::new()),
        (None, Some(sc)) => (sc.spec.total(), sc.casimirs.clone()),
        _ => unreachable!("clap enforces exactly one of SPEC and --scenario"),
    };
    let family = resolve_family(args.dynamics.as_deref(), scenario.as_ref())?;
    let energy =
        resolve_energy(args.energy.as_deref(), scenario.as_ref(), family, total.n(), total.k())?;
    let system = System::new(&total, family, energy)?;

    let states: Vec<DynState> = if let Some(path) = &args.states_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
        let mut states = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            states.push(parse_state(line, system.n(), system.k(), family.dissipative())?);
        }
        if states.is_empty() {
            return Err(fail(2, format!("{}: no states found", path.display())));
        }
        states
    } else if let Some(list) = &args.state {
        vec![parse_state(list, system.n(), system.k(), family.dissipative())?]
    } else if let Some(sc) = &scenario {
        vec![sc.defaults.state.clone()]
    } else {
        return Err(fail(1, "--state or --states-file is required when not running a scenario"));
    };
    for state in &states {
        system.check_state(state)?;
    }

    let t0 = args.t0.unwrap_or_else(|| scenario.as_ref().map_or(0.0, |s| s.defaults.t0));
    let Some(t1) = args.t1.or(scenario.as_ref().map(|s| s.defaults.t1)) else {
        return Err(fail(1, "--t1 is required when not running a scenario"));
    };
    if !(t1 > t0) {
        return Err(fail(1, format!("--t1 ({t1}) must be greater than --t0 ({t0})")));
    }
    let method = match args.method.as_str() {
        "rk4" => {
            if args.rtol.is_some() || args.atol.is_some() {
                return Err(fail(1, "--rtol and --atol apply only to --method rk45"));
            }
            Method::Rk4
        }
        _ => Method::Rk45 {
            rtol: args.rtol.unwrap_or(DEFAULT_RTOL),
            atol: args.atol.unwrap_or(DEFAULT_ATOL),
        },
    };
    let dt = match (args.dt, method) {
        (Some(dt), _) => dt,
        (None, Method::Rk45 { .. }) => (t1 - t0) / 100.0,
        (None, Method::Rk4) => {
            return Err(fail(1, "--method rk4 is fixed-step: --dt is required"));
        }
    };
    if !(dt > 0.0) {
        return Err(fail(1, format!("--dt ({dt}) must be positive")));
    }

    if args.states_file.is_some() {
        let results = integrate_batch(&system, &states, t0, t1, dt, method);
        for (i, result) in results.into_iter().enumerate() {
            let traj = result?;
            let table = TrajectoryFile::from_trajectory(system.n(), system.k(), &traj, &casimirs)?;
            let path = numbered(&args.out, i);
            write_trajectory(&path, &table)?;
            println!("wrote {}", path.display());
        }
    } else {
        let traj = integrate(&system, &states[0], t0, t1, dt, method)?;
        let table = TrajectoryFile::from_trajectory(system.n(), system.k(), &traj, &casimirs)?;
        write_trajectory(&args.out, &table)?;
        println!("wrote {}", args.out.display());
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// invariants
// ---------------------------------------------------------------------------

fn print_monitor(report: &MonitorReport, tol: &MonitorTolerances) {
    println!("family: {}", report.family.label());
    if let Some(drift) = report.energy_drift {
        println!(
            "energy drift: {drift:.3e} (tolerance {:.1e}) {}",
            tol.energy,
            pass_word(drift <= tol.energy)
        );
    }
    if let Some(residual) = report.dissipation_residual {
        println!(
            "dissipation-law residual: {residual:.3e} (tolerance {:.1e}) {}",
            tol.dissipation,
            pass_word(residual <= tol.dissipation)
        );
    }
    for casimir in &report.casimirs {
        println!(
            "casimir {}: drift {:.3e} (tolerance {:.1e}) {}",
            casimir.name,
            casimir.max_drift,
            tol.casimir,
            pass_word(casimir.pass)
        );
    }
    println!("{}", if report.pass { "PASS" } else { "FAIL" });
}

fn cmd_invariants(
    trajectory: &Path,
    system_descriptor: &str,
    dynamics: Option<&str>,
    energy: Option<&str>,
    tol: MonitorTolerances,
    json: bool,
) -> Result<i32, Failure> {
    let table = read_trajectory(trajectory)?;
    if table.rows.is_empty() {
        return Err(fail(2, format!("{}: trajectory has no rows", trajectory.display())));
    }
    let scenario = if scenarios::NAMES.contains(&system_descriptor) {
        Some(scenarios::get(system_descriptor).expect("name is registered"))
    } else {
        None
    };
    let (total, casimirs) = match &scenario {
        Some(sc) => (sc.spec.total(), sc.casimirs.clone()),
        None => (load_spec(Path::new(system_descriptor))?.total(), Vec::new()),
    };
    let family = resolve_family(dynamics, scenario.as_ref())?;
    let energy = resolve_energy(energy, scenario.as_ref(), family, total.n(), total.k())?;
    let system = System::new(&total, family, energy)?;
    if table.n != system.n() || table.k != system.k() || table.has_z != family.dissipative() {
        return Err(fail(
            2,
            format!(
                "trajectory columns (n={}, k={}, z: {}) do not match the system (n={}, k={}, z: {})",
                table.n,
                table.k,
                table.has_z,
                system.n(),
                system.k(),
                family.dissipative(),
            ),
        ));
    }
    let traj = Trajectory {
        times: table.rows.iter().map(|r| r.t).collect(),
        states: (0..table.rows.len()).map(|i| table.state(i)).collect(),
        energy: table.rows.iter().map(|r| r.energy).collect(),
    };
    let report = monitor_invariants(&system, &traj, &casimirs, &tol)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    } else {
        print_monitor(&report, &tol);
    }
    Ok(if report.pass { 0 } else { 3 })
}
