//! Numerical certification of the Lie algebroid axioms.
//!
//! Candidate data — anchors and structure coefficients as functions of the
//! base point — is checked on a sample of base points:
//!
//! * antisymmetry of the structure coefficients ([`check_skew`]),
//! * the anchor morphism property ([`check_anchor_morphism`]),
//! * the Jacobi identity ([`check_jacobi`]).
//!
//! Each check reports the maximum absolute residual over all sample points
//! and index tuples, the location where it was attained, and pass/fail
//! against an absolute tolerance (coefficients in the built-in scenarios are
//! O(1), so residuals are not scaled). The default plan is 32 quasi-random
//! points in `[−1,1]^n` with a fixed seed, so reports are reproducible; the
//! point scan runs on parallel workers, and the reduction (max with
//! lexicographic arg-max tie-break on point index, then index tuple) does
//! not depend on the worker count.
//!
//! For BDCP data, [`check_bdcp`] certifies the compatibility conditions in
//! their equivalent formulation: the assembled total must itself verify as a
//! Lie algebroid. That form is immune to transcription-sign mistakes in the
//! individual conditions, and the reported nonzero blocks still let a
//! failure be attributed to the tensors actually present. The remaining
//! Leibniz compatibility is identically satisfied for coefficient-tensor
//! data and is reported as such.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebroid::AlgebroidSpec;
use crate::bdcp::BdcpSpec;
use crate::expr::Expr;
use crate::field::{EvalAt, ModelError, ScalarField};

/// Default number of sample points.
pub const DEFAULT_POINTS: usize = 32;
/// Default sampling seed (an offset into the quasi-random sequence).
pub const DEFAULT_SEED: u64 = 0;
/// Default absolute residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Where residuals are evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplePlan {
    /// `points` Halton points in `[−1,1]^n`, starting `seed` indices into
    /// the sequence. For `n = 0` this degenerates to the single empty point.
    Halton { points: usize, seed: u64 },
    /// An explicit list of base points.
    Explicit(Vec<Vec<f64>>),
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan::Halton { points: DEFAULT_POINTS, seed: DEFAULT_SEED }
    }
}

impl SamplePlan {
    /// Materialize the sample points for an `n`-dimensional base.
    pub fn points(&self, n: usize) -> Result<Vec<Vec<f64>>, ModelError> {
        match self {
            SamplePlan::Halton { points, seed } => {
                if *points == 0 {
                    return Err(ModelError::shape("sample plan", "at least one point required"));
                }
                if n == 0 {
                    return Ok(vec![Vec::new()]);
                }
                if n > HALTON_BASES.len() {
                    return Err(ModelError::shape(
                        "sample plan",
                        format!("Halton sampling supports up to {} base dimensions", HALTON_BASES.len()),
                    ));
                }
                Ok((0..*points)
                    .map(|j| {
                        (0..n)
                            .map(|i| 2.0 * halton(seed + 1 + j as u64, HALTON_BASES[i]) - 1.0)
                            .collect()
                    })
                    .collect())
            }
            SamplePlan::Explicit(pts) => {
                if pts.is_empty() {
                    return Err(ModelError::shape("sample plan", "at least one point required"));
                }
                if let Some(bad) = pts.iter().find(|p| p.len() != n) {
                    return Err(ModelError::shape(
                        "sample plan",
                        format!("point of dimension {} in a base of dimension {n}", bad.len()),
                    ));
                }
                Ok(pts.clone())
            }
        }
    }
}

const HALTON_BASES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical-inverse (van der Corput) value of `index` in the given base.
fn halton(mut index: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut f = 1.0 / base as f64;
    while index > 0 {
        result += f * (index % base) as f64;
        index /= base;
        f /= base as f64;
    }
    result
}

/// Which axiom a report concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Skew,
    AnchorMorphism,
    Jacobi,
}

impl CheckKind {
    /// Short name used in report lines.
    pub fn label(self) -> &'static str {
        match self {
            CheckKind::Skew => "skew",
            CheckKind::AnchorMorphism => "anchor_morphism",
            CheckKind::Jacobi => "jacobi",
        }
    }
}

/// Where the maximum residual was attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualLocation {
    /// 1-based position of the sample point within the plan.
    pub point_index: usize,
    /// The sample point itself.
    pub point: Vec<f64>,
    /// 1-based index tuple; meaning depends on the check
    /// (skew: `[α, β, γ]`; anchor: `[α, β, j]`; Jacobi: `[α, β, γ, ν]`).
    pub indices: Vec<usize>,
}

/// Outcome of a single check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub check: CheckKind,
    /// Maximum absolute residual over all points and index tuples.
    pub max_residual: f64,
    /// Arg-max location; `None` when the scan is empty (for example the
    /// anchor check of a Lie algebra, which has no base directions).
    pub location: Option<ResidualLocation>,
    /// Absolute tolerance the residual was compared against.
    pub tol: f64,
    /// `max_residual <= tol`.
    pub pass: bool,
}

/// Combined outcome of all three checks on one spec.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<ResidualReport>,
    pub pass: bool,
}

/// Outcome of [`check_bdcp`]: the assembled total's verification plus
/// block attribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BdcpReport {
    pub checks: Vec<ResidualReport>,
    /// Names of the tensors that are not identically zero; failures can
    /// only originate in these.
    pub nonzero_blocks: Vec<&'static str>,
    /// The Leibniz compatibility holds identically for coefficient-tensor
    /// data; recorded so reports are explicit about it.
    pub leibniz: &'static str,
    pub pass: bool,
}

/// Verification failure modes: bad plan shapes or expression evaluation
/// errors at a sample point.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalAt),
}

/// Max residual of `C[α][β][γ] + C[β][α][γ]` over the plan and `α ≤ β`.
///
/// Zero by construction for antisymmetric storage; meaningful for dense
/// candidate data.
pub fn check_skew(
    spec: &AlgebroidSpec,
    plan: &SamplePlan,
    tol: f64,
) -> Result<ResidualReport, VerifyError> {
    let tables = Tables::compile(spec);
    scan(spec, plan, tol, CheckKind::Skew, &tables, |t, best| {
        let k = t.k;
        for alpha in 0..k {
            for beta in alpha..k {
                for gamma in 0..k {
                    let r = t.c(alpha, beta, gamma) + t.c(beta, alpha, gamma);
                    best.offer(r, &[alpha + 1, beta + 1, gamma + 1]);
                }
            }
        }
    })
}

/// Max residual of the anchor morphism property
/// `Σ_γ a[γ][j]·C[α][β][γ] − (Σ_i a[α][i] ∂_i a[β][j] − a[β][i] ∂_i a[α][j])`
/// over the plan, pairs `α < β`, and base directions `j`. Trivially zero
/// when `n = 0`.
pub fn check_anchor_morphism(
    spec: &AlgebroidSpec,
    plan: &SamplePlan,
    tol: f64,
) -> Result<ResidualReport, VerifyError> {
    let tables = Tables::compile(spec);
    scan(spec, plan, tol, CheckKind::AnchorMorphism, &tables, |t, best| {
        let (k, n) = (t.k, t.n);
        for alpha in 0..k {
            for beta in alpha + 1..k {
                for j in 0..n {
                    let mut lhs = 0.0;
                    for gamma in 0..k {
                        lhs += t.a(gamma, j) * t.c(alpha, beta, gamma);
                    }
                    let mut rhs = 0.0;
                    for i in 0..n {
                        rhs += t.a(alpha, i) * t.da(beta, j, i) - t.a(beta, i) * t.da(alpha, j, i);
                    }
                    best.offer(lhs - rhs, &[alpha + 1, beta + 1, j + 1]);
                }
            }
        }
    })
}

/// Max residual of the Jacobi identity in coordinates,
///
/// ```text
/// J[ν][αβγ] = Σ_cyc(α,β,γ) [ Σ_i a[α][i] ∂_i C[β][γ][ν]
///                          + Σ_μ C[β][γ][μ]·C[α][μ][ν] ]
/// ```
///
/// scanned over the plan, all `k³` triples (repeated indices included), and
/// all output components `ν`.
pub fn check_jacobi(
    spec: &AlgebroidSpec,
    plan: &SamplePlan,
    tol: f64,
) -> Result<ResidualReport, VerifyError> {
    let tables = Tables::compile(spec);
    scan(spec, plan, tol, CheckKind::Jacobi, &tables, |t, best| {
        let (k, n) = (t.k, t.n);
        for alpha in 0..k {
            for beta in 0..k {
                for gamma in 0..k {
                    for nu in 0..k {
                        let mut r = 0.0;
                        for (a, b, c) in
                            [(alpha, beta, gamma), (beta, gamma, alpha), (gamma, alpha, beta)]
                        {
                            for i in 0..n {
                                r += t.a(a, i) * t.dc(b, c, nu, i);
                            }
                            for mu in 0..k {
                                r += t.c(b, c, mu) * t.c(a, mu, nu);
                            }
                        }
                        best.offer(r, &[alpha + 1, beta + 1, gamma + 1, nu + 1]);
                    }
                }
            }
        }
    })
}

/// Run all three checks.
pub fn verify_algebroid(
    spec: &AlgebroidSpec,
    plan: &SamplePlan,
    tol: f64,
) -> Result<VerificationReport, VerifyError> {
    let checks = vec![
        check_skew(spec, plan, tol)?,
        check_anchor_morphism(spec, plan, tol)?,
        check_jacobi(spec, plan, tol)?,
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerificationReport { checks, pass })
}

/// Certify BDCP compatibility: the assembled total must pass all three
/// algebroid checks. Nonzero blocks are listed for fault attribution.
pub fn check_bdcp(
    spec: &BdcpSpec,
    plan: &SamplePlan,
    tol: f64,
) -> Result<BdcpReport, VerifyError> {
    let total = spec.assemble_total();
    let report = verify_algebroid(&total, plan, tol)?;
    let mut nonzero_blocks = Vec::new();
    if !spec.phi().is_zero() {
        nonzero_blocks.push("phi");
    }
    if !spec.zeta().is_zero() {
        nonzero_blocks.push("zeta");
    }
    if !spec.psi().is_zero() {
        nonzero_blocks.push("psi");
    }
    if !spec.theta().is_zero() {
        nonzero_blocks.push("theta");
    }
    if !spec.rho().is_zero() {
        nonzero_blocks.push("rho");
    }
    if !spec.sigma().is_zero() {
        nonzero_blocks.push("sigma");
    }
    Ok(BdcpReport {
        checks: report.checks,
        nonzero_blocks,
        leibniz: "identically satisfied for coefficient-tensor data",
        pass: report.pass,
    })
}

/// Copy a spec into dense storage with `delta` added to the single entry
/// `C[α][β][γ]` (0-based), leaving the mirror entry untouched.
///
/// The one-sided perturbation breaks antisymmetry as well as whatever
/// identities the entry participates in, which is exactly what a corrupted
/// import looks like.
pub fn inject_fault(
    spec: &AlgebroidSpec,
    alpha: usize,
    beta: usize,
    gamma: usize,
    delta: f64,
) -> Result<AlgebroidSpec, ModelError> {
    let k = spec.k();
    for (index, bound) in [(alpha, k), (beta, k), (gamma, k)] {
        if index >= bound {
            return Err(ModelError::IndexOutOfRange {
                place: "fault injection".to_string(),
                index: index + 1,
                bound,
            });
        }
    }
    let mut table = vec![vec![vec![Expr::zero(); k]; k]; k];
    for (a, row) in table.iter_mut().enumerate() {
        for (b, col) in row.iter_mut().enumerate() {
            for (g, slot) in col.iter_mut().enumerate() {
                *slot = spec.structure_entry(a, b, g);
            }
        }
    }
    let perturbed = std::mem::replace(&mut table[alpha][beta][gamma], Expr::zero());
    table[alpha][beta][gamma] = perturbed.add(Expr::num(delta));
    let anchor = spec
        .anchor_table()
        .iter()
        .map(|row| row.iter().map(|f| f.expr().clone()).collect())
        .collect();
    AlgebroidSpec::from_dense(spec.n(), k, anchor, table)
}

/// Symbolic tables backing the residual scans: dense structure
/// coefficients, their base derivatives, and the anchor with its
/// derivatives.
struct Tables {
    n: usize,
    k: usize,
    c: Vec<ScalarField>,  // (α·k + β)·k + γ
    dc: Vec<ScalarField>, // ((α·k + β)·k + γ)·n + i
    a: Vec<ScalarField>,  // α·n + i
    da: Vec<ScalarField>, // (α·n + j)·n + i
}

impl Tables {
    fn compile(spec: &AlgebroidSpec) -> Tables {
        let (n, k) = (spec.n(), spec.k());
        let mut c = Vec::with_capacity(k * k * k);
        let mut dc = Vec::with_capacity(k * k * k * n);
        for alpha in 0..k {
            for beta in 0..k {
                for gamma in 0..k {
                    let f = ScalarField::from_validated(n, spec.structure_entry(alpha, beta, gamma));
                    for i in 0..n {
                        dc.push(f.diff_x(i));
                    }
                    c.push(f);
                }
            }
        }
        let mut a = Vec::with_capacity(k * n);
        let mut da = Vec::with_capacity(k * n * n);
        for alpha in 0..k {
            for j in 0..n {
                let f = spec.anchor_entry(alpha, j);
                for i in 0..n {
                    da.push(f.diff_x(i));
                }
                a.push(f.clone());
            }
        }
        Tables { n, k, c, dc, a, da }
    }

    /// Evaluate every table at one base point.
    fn eval(&self, x: &[f64], point_index: usize) -> Result<PointTables<'_>, EvalAt> {
        let at = |f: &ScalarField, what: &str| {
            f.eval(x).map_err(EvalAt::at(format!("{what} at sample point {}", point_index + 1)))
        };
        Ok(PointTables {
            tables: self,
            c: self.c.iter().map(|f| at(f, "structure coefficient")).collect::<Result<_, _>>()?,
            dc: self
                .dc
                .iter()
                .map(|f| at(f, "structure coefficient derivative"))
                .collect::<Result<_, _>>()?,
            a: self.a.iter().map(|f| at(f, "anchor entry")).collect::<Result<_, _>>()?,
            da: self.da.iter().map(|f| at(f, "anchor derivative")).collect::<Result<_, _>>()?,
        })
    }
}

/// Numeric values of the tables at one point.
struct PointTables<'a> {
    tables: &'a Tables,
    c: Vec<f64>,
    dc: Vec<f64>,
    a: Vec<f64>,
    da: Vec<f64>,
}

impl PointTables<'_> {
    fn c(&self, alpha: usize, beta: usize, gamma: usize) -> f64 {
        self.c[(alpha * self.k + beta) * self.k + gamma]
    }

    fn dc(&self, alpha: usize, beta: usize, gamma: usize, i: usize) -> f64 {
        self.dc[((alpha * self.k + beta) * self.k + gamma) * self.n + i]
    }

    fn a(&self, alpha: usize, i: usize) -> f64 {
        self.a[alpha * self.n + i]
    }

    fn da(&self, alpha: usize, j: usize, i: usize) -> f64 {
        self.da[(alpha * self.n + j) * self.n + i]
    }
}

impl std::ops::Deref for PointTables<'_> {
    type Target = Tables;

    fn deref(&self) -> &Tables {
        self.tables
    }
}

/// Running arg-max for one point's scan; `offer` keeps the first index
/// tuple attaining the maximum (scans run in ascending index order).
struct BestResidual {
    value: f64,
    indices: Vec<usize>,
    any: bool,
}

impl BestResidual {
    fn new() -> BestResidual {
        BestResidual { value: 0.0, indices: Vec::new(), any: false }
    }

    fn offer(&mut self, residual: f64, indices: &[usize]) {
        // NaN can only arise from inf − inf in residual arithmetic; count it
        // as an unbounded residual rather than letting comparisons drop it.
        let r = if residual.is_nan() { f64::INFINITY } else { residual.abs() };
        if !self.any || r > self.value {
            self.value = r;
            self.indices = indices.to_vec();
            self.any = true;
        }
    }
}

/// Evaluate `body` at every plan point (in parallel) and reduce to a
/// deterministic report: maximum residual, earliest (point, index tuple)
/// attaining it.
fn scan(
    spec: &AlgebroidSpec,
    plan: &SamplePlan,
    tol: f64,
    check: CheckKind,
    tables: &Tables,
    body: impl Fn(&PointTables<'_>, &mut BestResidual) + Sync,
) -> Result<ResidualReport, VerifyError> {
    let points = plan.points(spec.n())?;
    let per_point: Vec<Result<BestResidual, EvalAt>> = points
        .par_iter()
        .enumerate()
        .map(|(pi, x)| {
            let values = tables.eval(x, pi)?;
            let mut best = BestResidual::new();
            body(&values, &mut best);
            Ok(best)
        })
        .collect();
    let mut max_residual = 0.0;
    let mut location = None;
    for (pi, outcome) in per_point.into_iter().enumerate() {
        let best = outcome?;
        if best.any && (location.is_none() || best.value > max_residual) {
            max_residual = best.value;
            location = Some(ResidualLocation {
                point_index: pi + 1,
                point: points[pi].clone(),
                indices: best.indices,
            });
        }
    }
    Ok(ResidualReport { check, max_residual, location, tol, pass: max_residual <= tol })
}
