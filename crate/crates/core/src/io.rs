//! On-disk formats: TOML structure specifications and CSV trajectories.
//!
//! Specification files are TOML with `version = "1"` and a `kind` of either
//! `"algebroid"` or `"bdcp"`. All indices in files are 1-based. Entries not
//! listed are zero; listing the same slot twice is an error, as is an
//! antisymmetric entry with `alpha >= beta`. Saving is hand-rolled and
//! deterministic — entries are emitted in sorted index order with canonical
//! expression printing — so saving the same data twice produces identical
//! bytes, and `load(save(spec))` reproduces `spec` exactly.
//!
//! Trajectory files are CSV with header `t,x1..xn,y1..yk[,z],H[,C1..]` and
//! values printed with 17 significant digits, enough to round-trip `f64`
//! exactly.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;

use crate::algebroid::{AlgebroidSpec, StructureTensor};
use crate::bdcp::{BdcpParts, BdcpSpec};
use crate::dynamics::{CasimirFn, DynState, Trajectory};
use crate::expr::{parse, Expr, ParseError};
use crate::field::{EvalAt, ModelError};
use crate::tensor::{MixedTensor, SkewTensor};

/// The payload of a specification file.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecFile {
    Algebroid(AlgebroidSpec),
    Bdcp(BdcpSpec),
}

impl SpecFile {
    /// The total algebroid described by the file (assembled for BDCP data).
    pub fn total(&self) -> AlgebroidSpec {
        match self {
            SpecFile::Algebroid(spec) => spec.clone(),
            SpecFile::Bdcp(spec) => spec.assemble_total(),
        }
    }
}

/// Anything that can go wrong reading or writing the on-disk formats.
#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// TOML syntax or field-level (unknown/missing field, wrong type)
    /// failure; the inner error carries line and column.
    #[error("{path}: {source}")]
    Toml {
        path: String,
        #[source]
        source: Box<toml::de::Error>,
    },
    /// The document parsed but its fields do not form a valid spec.
    #[error("{path}: {detail}")]
    Schema { path: String, detail: String },
    /// An `expr` string failed to parse; the offset is within that string.
    #[error("{path}: {context}: {source}")]
    BadExpr {
        path: String,
        context: String,
        #[source]
        source: ParseError,
    },
    /// The entries are well-formed on their own but violate a model
    /// constraint (range, antisymmetric order, duplicates, scope).
    #[error("{path}: {source}")]
    Model {
        path: String,
        #[source]
        source: ModelError,
    },
    #[error("{path}: line {line}: {detail}")]
    Csv { path: String, line: u64, detail: String },
}

fn schema(path: &str, detail: impl Into<String>) -> FileError {
    FileError::Schema { path: path.to_string(), detail: detail.into() }
}

fn model(path: &str, source: ModelError) -> FileError {
    FileError::Model { path: path.to_string(), source }
}

// ---------------------------------------------------------------------------
// Specification documents
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    version: String,
    kind: String,
    n: usize,
    k: Option<usize>,
    p: Option<usize>,
    q: Option<usize>,
    #[serde(default)]
    anchor: Vec<RawAnchor>,
    #[serde(default)]
    anchor_a: Vec<RawAnchor>,
    #[serde(default)]
    anchor_b: Vec<RawAnchor>,
    #[serde(default)]
    structure: Vec<RawSkew>,
    #[serde(default)]
    phi: Vec<RawSkew>,
    #[serde(default)]
    zeta: Vec<RawSkew>,
    #[serde(default)]
    psi: Vec<RawSkew>,
    #[serde(default)]
    theta: Vec<RawSkew>,
    #[serde(default)]
    rho: Vec<RawRho>,
    #[serde(default)]
    sigma: Vec<RawSigma>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnchor {
    row: usize,
    col: usize,
    expr: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSkew {
    alpha: usize,
    beta: usize,
    gamma: usize,
    expr: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRho {
    a: usize,
    alpha: usize,
    beta: usize,
    expr: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSigma {
    a: usize,
    alpha: usize,
    b: usize,
    expr: String,
}

/// Parse a specification document from TOML text. `origin` labels errors
/// (a path for files, any tag for in-memory text).
pub fn spec_from_toml(text: &str, origin: &str) -> Result<SpecFile, FileError> {
    let raw: RawSpec = toml::from_str(text)
        .map_err(|e| FileError::Toml { path: origin.to_string(), source: Box::new(e) })?;
    if raw.version != "1" {
        return Err(schema(
            origin,
            format!("unsupported version \"{}\" (this reader understands version \"1\")", raw.version),
        ));
    }
    match raw.kind.as_str() {
        "algebroid" => build_algebroid(origin, raw),
        "bdcp" => build_bdcp(origin, raw),
        other => Err(schema(
            origin,
            format!("unknown kind \"{other}\" (expected \"algebroid\" or \"bdcp\")"),
        )),
    }
}

/// Load a specification file.
pub fn load_spec(path: &Path) -> Result<SpecFile, FileError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| FileError::Io { path: shown.clone(), source: e })?;
    spec_from_toml(&text, &shown)
}

fn check_index(
    path: &str,
    context: &str,
    field: &str,
    value: usize,
    bound: usize,
) -> Result<usize, FileError> {
    if value == 0 || value > bound {
        return Err(model(
            path,
            ModelError::IndexOutOfRange {
                place: format!("{context}, field `{field}`"),
                index: value,
                bound,
            },
        ));
    }
    Ok(value - 1)
}

fn parse_expr(path: &str, context: &str, src: &str) -> Result<Expr, FileError> {
    parse(src).map_err(|e| FileError::BadExpr {
        path: path.to_string(),
        context: context.to_string(),
        source: e,
    })
}

fn forbid_fields(path: &str, kind: &str, present: &[(&str, bool)]) -> Result<(), FileError> {
    for (name, is_present) in present {
        if *is_present {
            return Err(schema(
                path,
                format!("`{name}` is not valid in kind \"{kind}\" documents"),
            ));
        }
    }
    Ok(())
}

fn read_anchor_table(
    path: &str,
    table_name: &str,
    records: &[RawAnchor],
    rows: usize,
    cols: usize,
) -> Result<Vec<Vec<Expr>>, FileError> {
    let mut table = vec![vec![Expr::zero(); cols]; rows];
    let mut seen = BTreeSet::new();
    for (i, rec) in records.iter().enumerate() {
        let context = format!("`{table_name}` entry {}", i + 1);
        let r = check_index(path, &context, "row", rec.row, rows)?;
        let c = check_index(path, &context, "col", rec.col, cols)?;
        if !seen.insert((r, c)) {
            return Err(model(
                path,
                ModelError::DuplicateEntry {
                    place: format!("{table_name}[{}][{}]", rec.row, rec.col),
                },
            ));
        }
        table[r][c] = parse_expr(path, &context, &rec.expr)?;
    }
    Ok(table)
}

fn read_skew_entries(
    path: &str,
    table_name: &str,
    records: &[RawSkew],
    pair: usize,
    out: usize,
) -> Result<Vec<(usize, usize, usize, Expr)>, FileError> {
    let mut entries = Vec::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        let context = format!("`{table_name}` entry {}", i + 1);
        let a = check_index(path, &context, "alpha", rec.alpha, pair)?;
        let b = check_index(path, &context, "beta", rec.beta, pair)?;
        let g = check_index(path, &context, "gamma", rec.gamma, out)?;
        entries.push((a, b, g, parse_expr(path, &context, &rec.expr)?));
    }
    Ok(entries)
}

fn build_algebroid(path: &str, raw: RawSpec) -> Result<SpecFile, FileError> {
    let Some(k) = raw.k else {
        return Err(schema(path, "kind \"algebroid\" requires `k`"));
    };
    forbid_fields(
        path,
        "algebroid",
        &[
            ("p", raw.p.is_some()),
            ("q", raw.q.is_some()),
            ("anchor_a", !raw.anchor_a.is_empty()),
            ("anchor_b", !raw.anchor_b.is_empty()),
            ("phi", !raw.phi.is_empty()),
            ("zeta", !raw.zeta.is_empty()),
            ("psi", !raw.psi.is_empty()),
            ("theta", !raw.theta.is_empty()),
            ("rho", !raw.rho.is_empty()),
            ("sigma", !raw.sigma.is_empty()),
        ],
    )?;
    let anchor = read_anchor_table(path, "anchor", &raw.anchor, k, raw.n)?;
    let entries = read_skew_entries(path, "structure", &raw.structure, k, k)?;
    let spec = AlgebroidSpec::new(raw.n, k, anchor, entries).map_err(|e| model(path, e))?;
    Ok(SpecFile::Algebroid(spec))
}

fn build_bdcp(path: &str, raw: RawSpec) -> Result<SpecFile, FileError> {
    let (Some(p), Some(q)) = (raw.p, raw.q) else {
        return Err(schema(path, "kind \"bdcp\" requires `p` and `q`"));
    };
    forbid_fields(
        path,
        "bdcp",
        &[
            ("k", raw.k.is_some()),
            ("anchor", !raw.anchor.is_empty()),
            ("structure", !raw.structure.is_empty()),
        ],
    )?;
    let mixed = |name: &str, rows: &[(usize, usize, usize, &str)], b1, b2, b3| {
        let mut entries = Vec::with_capacity(rows.len());
        for (i, (a, al, c, expr)) in rows.iter().enumerate() {
            let context = format!("`{name}` entry {}", i + 1);
            let names: [&str; 3] = if name == "rho" {
                ["a", "alpha", "beta"]
            } else {
                ["a", "alpha", "b"]
            };
            let a = check_index(path, &context, names[0], *a, b1)?;
            let al = check_index(path, &context, names[1], *al, b2)?;
            let c = check_index(path, &context, names[2], *c, b3)?;
            entries.push((a, al, c, parse_expr(path, &context, expr)?));
        }
        Ok(entries)
    };
    let rho_rows: Vec<_> =
        raw.rho.iter().map(|r| (r.a, r.alpha, r.beta, r.expr.as_str())).collect();
    let sigma_rows: Vec<_> =
        raw.sigma.iter().map(|r| (r.a, r.alpha, r.b, r.expr.as_str())).collect();
    let parts = BdcpParts {
        n: raw.n,
        p,
        q,
        anchor_a: read_anchor_table(path, "anchor_a", &raw.anchor_a, p, raw.n)?,
        anchor_b: read_anchor_table(path, "anchor_b", &raw.anchor_b, q, raw.n)?,
        phi: read_skew_entries(path, "phi", &raw.phi, p, p)?,
        zeta: read_skew_entries(path, "zeta", &raw.zeta, p, q)?,
        psi: read_skew_entries(path, "psi", &raw.psi, q, p)?,
        theta: read_skew_entries(path, "theta", &raw.theta, q, q)?,
        rho: mixed("rho", &rho_rows, q, p, p)?,
        sigma: mixed("sigma", &sigma_rows, q, p, q)?,
    };
    let spec = BdcpSpec::from_parts(parts).map_err(|e| model(path, e))?;
    Ok(SpecFile::Bdcp(spec))
}

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

fn toml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            _ => out.push(ch),
        }
    }
    out
}

fn write_anchor_rows(out: &mut String, table_name: &str, table: &[Vec<crate::field::ScalarField>]) {
    for (r, row) in table.iter().enumerate() {
        for (c, field) in row.iter().enumerate() {
            if field.is_zero() {
                continue;
            }
            out.push_str(&format!(
                "\n[[{table_name}]]\nrow = {}\ncol = {}\nexpr = \"{}\"\n",
                r + 1,
                c + 1,
                toml_escape(&field.expr().to_string()),
            ));
        }
    }
}

fn write_skew_rows(out: &mut String, table_name: &str, tensor: &SkewTensor) {
    for (a, b, g, field) in tensor.entries() {
        out.push_str(&format!(
            "\n[[{table_name}]]\nalpha = {}\nbeta = {}\ngamma = {}\nexpr = \"{}\"\n",
            a + 1,
            b + 1,
            g + 1,
            toml_escape(&field.expr().to_string()),
        ));
    }
}

fn write_mixed_rows(out: &mut String, table_name: &str, third: &str, tensor: &MixedTensor) {
    for (a, b, c, field) in tensor.entries() {
        out.push_str(&format!(
            "\n[[{table_name}]]\na = {}\nalpha = {}\n{third} = {}\nexpr = \"{}\"\n",
            a + 1,
            b + 1,
            c + 1,
            toml_escape(&field.expr().to_string()),
        ));
    }
}

/// Render a specification as deterministic TOML. Fails only for dense
/// structure storage, which is an in-memory form for perturbation studies
/// and deliberately has no file representation.
pub fn spec_to_toml(spec: &SpecFile) -> Result<String, ModelError> {
    let mut out = String::from("version = \"1\"\n");
    match spec {
        SpecFile::Algebroid(a) => {
            let StructureTensor::Skew(structure) = a.structure() else {
                return Err(ModelError::shape(
                    "structure",
                    "dense structure storage is in-memory only and cannot be saved; \
                     rebuild the data in antisymmetric form first",
                ));
            };
            out.push_str(&format!("kind = \"algebroid\"\nn = {}\nk = {}\n", a.n(), a.k()));
            write_anchor_rows(&mut out, "anchor", a.anchor_table());
            write_skew_rows(&mut out, "structure", structure);
        }
        SpecFile::Bdcp(b) => {
            out.push_str(&format!(
                "kind = \"bdcp\"\nn = {}\np = {}\nq = {}\n",
                b.n(),
                b.p(),
                b.q()
            ));
            write_anchor_rows(&mut out, "anchor_a", b.anchor_a());
            write_anchor_rows(&mut out, "anchor_b", b.anchor_b());
            write_skew_rows(&mut out, "phi", b.phi());
            write_skew_rows(&mut out, "zeta", b.zeta());
            write_skew_rows(&mut out, "psi", b.psi());
            write_skew_rows(&mut out, "theta", b.theta());
            write_mixed_rows(&mut out, "rho", "beta", b.rho());
            write_mixed_rows(&mut out, "sigma", "b", b.sigma());
        }
    }
    Ok(out)
}

/// Save a specification file.
pub fn save_spec(path: &Path, spec: &SpecFile) -> Result<(), FileError> {
    let shown = path.display().to_string();
    let text = spec_to_toml(spec).map_err(|e| model(&shown, e))?;
    std::fs::write(path, text).map_err(|e| FileError::Io { path: shown, source: e })
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

/// One sample of a simulated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Option<f64>,
    pub energy: f64,
    pub casimirs: Vec<f64>,
}

/// A trajectory as stored on disk: dimensions plus sampled rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryFile {
    pub n: usize,
    pub k: usize,
    pub has_z: bool,
    /// Number of monitored-invariant columns (`C1..`).
    pub casimir_columns: usize,
    pub rows: Vec<TrajectoryRow>,
}

impl TrajectoryFile {
    /// Tabulate an integrator result, evaluating the given invariants at
    /// every sample.
    pub fn from_trajectory(
        n: usize,
        k: usize,
        traj: &Trajectory,
        casimirs: &[CasimirFn],
    ) -> Result<TrajectoryFile, EvalAt> {
        let has_z = traj.states.first().is_some_and(|s| s.z.is_some());
        let mut rows = Vec::with_capacity(traj.times.len());
        for ((t, s), e) in traj.times.iter().zip(&traj.states).zip(&traj.energy) {
            let mut values = Vec::with_capacity(casimirs.len());
            for c in casimirs {
                values.push(c.function.eval(&s.x, &s.y, None)?);
            }
            rows.push(TrajectoryRow {
                t: *t,
                x: s.x.clone(),
                y: s.y.clone(),
                z: s.z,
                energy: *e,
                casimirs: values,
            });
        }
        Ok(TrajectoryFile { n, k, has_z, casimir_columns: casimirs.len(), rows })
    }

    /// The state at row `i`.
    pub fn state(&self, i: usize) -> DynState {
        let row = &self.rows[i];
        DynState { x: row.x.clone(), y: row.y.clone(), z: row.z }
    }
}

/// Render a trajectory as CSV text with an exact-round-trip float format.
pub fn trajectory_to_csv(table: &TrajectoryFile) -> String {
    let mut out = String::from("t");
    for i in 1..=table.n {
        out.push_str(&format!(",x{i}"));
    }
    for a in 1..=table.k {
        out.push_str(&format!(",y{a}"));
    }
    if table.has_z {
        out.push_str(",z");
    }
    out.push_str(",H");
    for c in 1..=table.casimir_columns {
        out.push_str(&format!(",C{c}"));
    }
    out.push('\n');
    for row in &table.rows {
        assert_eq!(row.x.len(), table.n, "trajectory row does not match its header");
        assert_eq!(row.y.len(), table.k, "trajectory row does not match its header");
        assert_eq!(row.z.is_some(), table.has_z, "trajectory row does not match its header");
        assert_eq!(
            row.casimirs.len(),
            table.casimir_columns,
            "trajectory row does not match its header"
        );
        out.push_str(&format!("{:.16e}", row.t));
        for v in row.x.iter().chain(&row.y).chain(row.z.iter()) {
            out.push_str(&format!(",{v:.16e}"));
        }
        out.push_str(&format!(",{:.16e}", row.energy));
        for v in &row.casimirs {
            out.push_str(&format!(",{v:.16e}"));
        }
        out.push('\n');
    }
    out
}

/// Write a trajectory CSV file.
pub fn write_trajectory(path: &Path, table: &TrajectoryFile) -> Result<(), FileError> {
    let shown = path.display().to_string();
    std::fs::write(path, trajectory_to_csv(table))
        .map_err(|e| FileError::Io { path: shown, source: e })
}

fn parse_header(origin: &str, header: &csv::StringRecord) -> Result<(usize, usize, bool, usize), FileError> {
    let cols: Vec<&str> = header.iter().collect();
    if cols.first() != Some(&"t") {
        return Err(schema(origin, "malformed header: the first column must be `t`"));
    }
    let mut idx = 1;
    let mut n = 0;
    while idx < cols.len() && cols[idx] == format!("x{}", n + 1) {
        n += 1;
        idx += 1;
    }
    let mut k = 0;
    while idx < cols.len() && cols[idx] == format!("y{}", k + 1) {
        k += 1;
        idx += 1;
    }
    if k == 0 {
        return Err(schema(origin, "malformed header: at least one `y` column is required"));
    }
    let has_z = idx < cols.len() && cols[idx] == "z";
    if has_z {
        idx += 1;
    }
    if cols.get(idx) != Some(&"H") {
        return Err(schema(
            origin,
            format!(
                "malformed header: expected `H` after the state columns, found {}",
                cols.get(idx).map_or("end of header".to_string(), |c| format!("`{c}`")),
            ),
        ));
    }
    idx += 1;
    let mut casimirs = 0;
    while idx < cols.len() && cols[idx] == format!("C{}", casimirs + 1) {
        casimirs += 1;
        idx += 1;
    }
    if idx != cols.len() {
        return Err(schema(
            origin,
            format!("malformed header: unexpected column `{}`", cols[idx]),
        ));
    }
    Ok((n, k, has_z, casimirs))
}

/// Parse trajectory CSV text. `origin` labels errors.
pub fn trajectory_from_csv(text: &str, origin: &str) -> Result<TrajectoryFile, FileError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| FileError::Csv { path: origin.to_string(), line: 1, detail: e.to_string() })?
        .clone();
    let (n, k, has_z, casimir_columns) = parse_header(origin, &header)?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i as u64 + 2;
        let record = record.map_err(|e| FileError::Csv {
            path: origin.to_string(),
            line,
            detail: e.to_string(),
        })?;
        let mut fields = record.iter().zip(header.iter());
        let mut next = |_what: &str| -> Result<f64, FileError> {
            let (raw, name) = fields.next().expect("record length was checked by the reader");
            raw.parse::<f64>().map_err(|_| FileError::Csv {
                path: origin.to_string(),
                line,
                detail: format!("column `{name}` holds `{raw}`, which is not a number"),
            })
        };
        let t = next("t")?;
        let mut x = Vec::with_capacity(n);
        for _ in 0..n {
            x.push(next("x")?);
        }
        let mut y = Vec::with_capacity(k);
        for _ in 0..k {
            y.push(next("y")?);
        }
        let z = if has_z { Some(next("z")?) } else { None };
        let energy = next("H")?;
        let mut casimirs = Vec::with_capacity(casimir_columns);
        for _ in 0..casimir_columns {
            casimirs.push(next("C")?);
        }
        rows.push(TrajectoryRow { t, x, y, z, energy, casimirs });
    }
    Ok(TrajectoryFile { n, k, has_z, casimir_columns, rows })
}

/// Read a trajectory CSV file.
pub fn read_trajectory(path: &Path) -> Result<TrajectoryFile, FileError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| FileError::Io { path: shown.clone(), source: e })?;
    trajectory_from_csv(&text, &shown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    fn so3_file() -> SpecFile {
        let scenarios::ScenarioSpec::Algebroid(spec) =
            scenarios::get("so3-rigid-body").unwrap().spec
        else {
            panic!("so3 scenario stores a plain algebroid")
        };
        SpecFile::Algebroid(spec)
    }

    #[test]
    fn algebroid_toml_is_stable_and_round_trips() {
        let file = so3_file();
        let text = spec_to_toml(&file).unwrap();
        let expected = "\
version = \"1\"
kind = \"algebroid\"
n = 0
k = 3

[[structure]]
alpha = 1
beta = 2
gamma = 3
expr = \"1\"

[[structure]]
alpha = 1
beta = 3
gamma = 2
expr = \"-1\"

[[structure]]
alpha = 2
beta = 3
gamma = 1
expr = \"1\"
";
        assert_eq!(text, expected);
        assert_eq!(spec_from_toml(&text, "mem").unwrap(), file);
    }

    #[test]
    fn bdcp_toml_round_trips_through_files() {
        let scenarios::ScenarioSpec::Bdcp(spec) = scenarios::get("se3-heavy-top").unwrap().spec
        else {
            panic!("heavy top stores BDCP data")
        };
        let file = SpecFile::Bdcp(spec);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("heavy-top.toml");
        save_spec(&path, &file).unwrap();
        let loaded = load_spec(&path).unwrap();
        assert_eq!(loaded, file);
        // Saving what was loaded reproduces the file byte for byte.
        let again = dir.path().join("again.toml");
        save_spec(&again, &loaded).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn anchored_specs_round_trip() {
        let src = "\
version = \"1\"
kind = \"algebroid\"
n = 2
k = 2

[[anchor]]
row = 1
col = 1
expr = \"1\"

[[anchor]]
row = 2
col = 2
expr = \"x1\"
";
        let file = spec_from_toml(src, "mem").unwrap();
        assert_eq!(spec_to_toml(&file).unwrap(), src);
    }

    #[test]
    fn schema_problems_are_reported_with_context() {
        let cases: [(&str, &str); 7] = [
            ("version = \"2\"\nkind = \"algebroid\"\nn = 0\nk = 3\n", "unsupported version"),
            ("version = \"1\"\nkind = \"poisson\"\nn = 0\nk = 3\n", "unknown kind"),
            ("version = \"1\"\nkind = \"algebroid\"\nn = 0\n", "requires `k`"),
            ("version = \"1\"\nkind = \"bdcp\"\nn = 0\np = 1\nq = 1\nk = 2\n", "`k` is not valid"),
            (
                "version = \"1\"\nkind = \"algebroid\"\nn = 0\nk = 3\n\n[[structure]]\nalpha = 2\nbeta = 1\ngamma = 3\nexpr = \"1\"\n",
                "first index < second index",
            ),
            (
                "version = \"1\"\nkind = \"algebroid\"\nn = 0\nk = 3\n\n[[structure]]\nalpha = 1\nbeta = 2\ngamma = 4\nexpr = \"1\"\n",
                "index 4 out of range 1..=3",
            ),
            (
                "version = \"1\"\nkind = \"algebroid\"\nn = 0\nk = 3\n\n[[structure]]\nalpha = 1\nbeta = 2\ngamma = 3\nexpr = \"1 +\"\n",
                "syntax error at byte",
            ),
        ];
        for (src, needle) in cases {
            let err = spec_from_toml(src, "mem").unwrap_err().to_string();
            assert!(err.contains(needle), "expected `{needle}` in `{err}`");
        }
    }

    #[test]
    fn unknown_fields_are_rejected_with_their_name() {
        let err = spec_from_toml("version = \"1\"\nkind = \"algebroid\"\nn = 0\nk = 3\nm = 4\n", "mem")
            .unwrap_err()
            .to_string();
        assert!(err.contains('m'), "{err}");
        assert!(err.contains("unexpected") || err.contains("unknown"), "{err}");
    }

    #[test]
    fn duplicate_entries_are_rejected() {
        let src = "\
version = \"1\"
kind = \"algebroid\"
n = 1
k = 1

[[anchor]]
row = 1
col = 1
expr = \"1\"

[[anchor]]
row = 1
col = 1
expr = \"2\"
";
        let err = spec_from_toml(src, "mem").unwrap_err().to_string();
        assert!(err.contains("duplicate entry"), "{err}");
    }

    #[test]
    fn trajectory_csv_round_trips_bitwise() {
        let table = TrajectoryFile {
            n: 1,
            k: 1,
            has_z: true,
            casimir_columns: 2,
            rows: vec![
                TrajectoryRow {
                    t: 0.0,
                    x: vec![1.0],
                    y: vec![0.0],
                    z: Some(0.0),
                    energy: 0.5,
                    casimirs: vec![1.0, -2.0],
                },
                TrajectoryRow {
                    t: 0.1,
                    x: vec![0.995_141_592_653_589_8],
                    y: vec![-0.099_266_617_653_123_41],
                    z: Some(-0.004_987_356_789_012_345),
                    energy: 0.499_500_000_000_000_04,
                    casimirs: vec![1.0, -2.000_000_000_000_000_4],
                },
            ],
        };
        let text = trajectory_to_csv(&table);
        assert!(text.starts_with("t,x1,y1,z,H,C1,C2\n"), "{text}");
        let back = trajectory_from_csv(&text, "mem").unwrap();
        assert_eq!(back, table);
        assert_eq!(trajectory_to_csv(&back), text);
    }

    #[test]
    fn trajectory_header_problems_are_reported() {
        for (src, needle) in [
            ("a,y1,H\n", "first column must be `t`"),
            ("t,x1,H\n", "at least one `y` column"),
            ("t,y1\n", "expected `H`"),
            ("t,y1,H,C2\n", "unexpected column `C2`"),
            ("t,y1,H\n0.0,oops,1.0\n", "not a number"),
        ] {
            let err = trajectory_from_csv(src, "mem").unwrap_err().to_string();
            assert!(err.contains(needle), "expected `{needle}` in `{err}`");
        }
    }
}
