//! Lie algebroids in local coordinates.
//!
//! A finite-rank Lie algebroid over an `n`-dimensional base chart with fiber
//! rank `k` is encoded by its anchor components `a[α][i]` (the coefficient of
//! `∂/∂x_{i+1}` in the image of the frame section `e_{α+1}`) and its
//! structure coefficients `C[α][β][γ]` (the `e_{γ+1}`-coefficient of
//! `[e_{α+1}, e_{β+1}]`), all functions of the base coordinates.
//!
//! `n = 0` designates a Lie algebra: the anchor is empty and the structure
//! coefficients are constants.
//!
//! The structure tensor is normally stored sparse and antisymmetric (only
//! `α < β` representatives). A dense, possibly non-antisymmetric variant
//! exists in memory only, so that the verifier can represent and detect
//! broken candidate data; files always carry the sparse form.

use crate::expr::Expr;
use crate::field::{EvalAt, ModelError, ScalarField};
use crate::tensor::SkewTensor;

/// Structure-coefficient storage.
#[derive(Debug, Clone, PartialEq)]
pub enum StructureTensor {
    /// Antisymmetric sparse storage; the normal case.
    Skew(SkewTensor),
    /// Dense storage without symmetry assumptions, for candidate data and
    /// fault injection. Never serialized.
    Dense(DenseStructure),
}

/// A dense `k×k×k` table of structure coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStructure {
    k: usize,
    entries: Vec<ScalarField>,
}

impl DenseStructure {
    /// Build from a full table indexed `table[α][β][γ]`.
    pub fn new(k: usize, n: usize, table: Vec<Vec<Vec<Expr>>>) -> Result<Self, ModelError> {
        if table.len() != k || table.iter().any(|r| r.len() != k || r.iter().any(|c| c.len() != k))
        {
            return Err(ModelError::shape(
                "structure",
                format!("dense structure table must be {k}x{k}x{k}"),
            ));
        }
        let mut entries = Vec::with_capacity(k * k * k);
        for (a, row) in table.into_iter().enumerate() {
            for (b, col) in row.into_iter().enumerate() {
                for (g, expr) in col.into_iter().enumerate() {
                    let place = format!("structure[{}][{}][{}]", a + 1, b + 1, g + 1);
                    entries.push(ScalarField::new(n, expr, place)?);
                }
            }
        }
        Ok(DenseStructure { k, entries })
    }

    /// The entry `C[a][b][g]`.
    pub fn get(&self, a: usize, b: usize, g: usize) -> &ScalarField {
        &self.entries[(a * self.k + b) * self.k + g]
    }
}

/// A Lie algebroid candidate in local form.
///
/// Construction validates shapes and variable scopes only; whether the data
/// actually satisfies the Lie algebroid axioms is the verifier's business.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebroidSpec {
    n: usize,
    k: usize,
    anchor: Vec<Vec<ScalarField>>,
    structure: StructureTensor,
}

impl AlgebroidSpec {
    /// Build a spec with sparse antisymmetric structure.
    ///
    /// `anchor` is a `k×n` table of expressions (`anchor[α][i]` multiplies
    /// `∂/∂x_{i+1}` in the anchor image of `e_{α+1}`); for `n = 0` an empty
    /// vector is also accepted. `entries` lists `(α, β, γ, expr)` structure
    /// coefficients, 0-based, with `α < β`.
    pub fn new(
        n: usize,
        k: usize,
        anchor: Vec<Vec<Expr>>,
        entries: Vec<(usize, usize, usize, Expr)>,
    ) -> Result<Self, ModelError> {
        let mut structure = SkewTensor::new("structure", k, k, n);
        for (a, b, g, expr) in entries {
            structure.set(a, b, g, expr)?;
        }
        Self::from_skew(n, k, validate_anchor(n, k, anchor)?, structure)
    }

    /// Build a Lie algebra (point base) from its structure constants.
    pub fn lie_algebra(k: usize, entries: Vec<(usize, usize, usize, Expr)>) -> Result<Self, ModelError> {
        Self::new(0, k, Vec::new(), entries)
    }

    /// Build from an already-assembled anchor and skew tensor.
    pub fn from_skew(
        n: usize,
        k: usize,
        anchor: Vec<Vec<ScalarField>>,
        structure: SkewTensor,
    ) -> Result<Self, ModelError> {
        check_rank(k)?;
        if structure.pair_dim() != k || structure.out_dim() != k || structure.base_dim() != n {
            return Err(ModelError::shape(
                "structure",
                format!(
                    "expected a {k}x{k}x{k} tensor over {n} base coordinates, got {}x{}x{} over {}",
                    structure.pair_dim(),
                    structure.pair_dim(),
                    structure.out_dim(),
                    structure.base_dim()
                ),
            ));
        }
        check_anchor_fields(n, k, &anchor)?;
        Ok(AlgebroidSpec { n, k, anchor, structure: StructureTensor::Skew(structure) })
    }

    /// Build with dense (possibly non-antisymmetric) structure storage.
    pub fn from_dense(
        n: usize,
        k: usize,
        anchor: Vec<Vec<Expr>>,
        table: Vec<Vec<Vec<Expr>>>,
    ) -> Result<Self, ModelError> {
        check_rank(k)?;
        let anchor = validate_anchor(n, k, anchor)?;
        let dense = DenseStructure::new(k, n, table)?;
        Ok(AlgebroidSpec { n, k, anchor, structure: StructureTensor::Dense(dense) })
    }

    /// Base dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Fiber rank.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Is the base a point (`n = 0`)?
    pub fn is_lie_algebra(&self) -> bool {
        self.n == 0
    }

    /// The structure storage.
    pub fn structure(&self) -> &StructureTensor {
        &self.structure
    }

    /// The anchor component `a[α][i]`.
    pub fn anchor_entry(&self, alpha: usize, i: usize) -> &ScalarField {
        &self.anchor[alpha][i]
    }

    /// The full anchor table, row `α`, column `i`.
    pub fn anchor_table(&self) -> &[Vec<ScalarField>] {
        &self.anchor
    }

    /// The structure coefficient `C[α][β][γ]` with signs applied.
    pub fn structure_entry(&self, alpha: usize, beta: usize, gamma: usize) -> Expr {
        match &self.structure {
            StructureTensor::Skew(t) => t.get(alpha, beta, gamma),
            StructureTensor::Dense(d) => d.get(alpha, beta, gamma).expr().clone(),
        }
    }

    /// All non-zero structure coefficients as `(α, β, γ, expr)`, including
    /// both orientations of antisymmetric storage.
    pub fn structure_oriented(&self) -> Vec<(usize, usize, usize, Expr)> {
        let mut out = Vec::new();
        match &self.structure {
            StructureTensor::Skew(t) => {
                for (a, b, g, f) in t.entries() {
                    out.push((a, b, g, f.expr().clone()));
                    out.push((b, a, g, f.negated().expr().clone()));
                }
            }
            StructureTensor::Dense(d) => {
                for a in 0..self.k {
                    for b in 0..self.k {
                        for g in 0..self.k {
                            let f = d.get(a, b, g);
                            if !f.is_zero() {
                                out.push((a, b, g, f.expr().clone()));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Evaluate the anchor matrix at a base point (`k×n`; empty for `n=0`).
    pub fn eval_anchor(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, EvalAt> {
        debug_assert_eq!(x.len(), self.n);
        let mut rows = Vec::with_capacity(self.k);
        for (alpha, row) in self.anchor.iter().enumerate() {
            let mut vals = Vec::with_capacity(self.n);
            for (i, f) in row.iter().enumerate() {
                let place = || format!("anchor[{}][{}]", alpha + 1, i + 1);
                vals.push(f.eval(x).map_err(EvalAt::at(place()))?);
            }
            rows.push(vals);
        }
        Ok(rows)
    }

    /// Evaluate all non-zero structure coefficients at a base point, both
    /// orientations included, as `(α, β, γ, value)`.
    pub fn eval_structure_sparse(&self, x: &[f64]) -> Result<Vec<(usize, usize, usize, f64)>, EvalAt> {
        debug_assert_eq!(x.len(), self.n);
        let mut out = Vec::new();
        match &self.structure {
            StructureTensor::Skew(t) => {
                for (a, b, g, f) in t.entries() {
                    let place = format!("structure[{}][{}][{}]", a + 1, b + 1, g + 1);
                    let v = f.eval(x).map_err(EvalAt::at(place))?;
                    out.push((a, b, g, v));
                    out.push((b, a, g, -v));
                }
            }
            StructureTensor::Dense(d) => {
                for a in 0..self.k {
                    for b in 0..self.k {
                        for g in 0..self.k {
                            let f = d.get(a, b, g);
                            if !f.is_zero() {
                                let place = format!("structure[{}][{}][{}]", a + 1, b + 1, g + 1);
                                out.push((a, b, g, f.eval(x).map_err(EvalAt::at(place))?));
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Wrap coefficient expressions as a section of this algebroid.
    pub fn section(&self, coeffs: Vec<Expr>) -> Result<SectionCoeffs, ModelError> {
        if coeffs.len() != self.k {
            return Err(ModelError::shape(
                "section",
                format!("expected {} coefficients, got {}", self.k, coeffs.len()),
            ));
        }
        let coeffs = coeffs
            .into_iter()
            .enumerate()
            .map(|(g, e)| ScalarField::new(self.n, e, format!("section coefficient {}", g + 1)))
            .collect::<Result<_, _>>()?;
        Ok(SectionCoeffs { coeffs })
    }

    /// The frame section `e_{α+1}` as a `SectionCoeffs`.
    pub fn basis_section(&self, alpha: usize) -> Result<SectionCoeffs, ModelError> {
        if alpha >= self.k {
            return Err(ModelError::IndexOutOfRange {
                place: "basis section".to_string(),
                index: alpha + 1,
                bound: self.k,
            });
        }
        let coeffs = (0..self.k)
            .map(|g| ScalarField::constant(self.n, if g == alpha { 1.0 } else { 0.0 }))
            .collect();
        Ok(SectionCoeffs { coeffs })
    }

    /// The bracket `[X, Y]` as symbolic coefficient functions:
    ///
    /// ```text
    /// [X,Y]^γ = Σ_{α,β} X^α Y^β C[α][β][γ]
    ///         + Σ_{α,i} X^α a[α][i] ∂_i Y^γ  −  Σ_{β,i} Y^β a[β][i] ∂_i X^γ
    /// ```
    ///
    /// This is the bilinear-plus-Leibniz expansion on the frame; it is exact
    /// (symbolic differentiation, no sampling) and is defined for any
    /// candidate data, antisymmetric or not.
    pub fn bracket_coeffs(&self, xs: &SectionCoeffs, ys: &SectionCoeffs) -> SectionCoeffs {
        debug_assert_eq!(xs.coeffs.len(), self.k);
        debug_assert_eq!(ys.coeffs.len(), self.k);
        let mut out: Vec<Expr> = vec![Expr::zero(); self.k];
        for (a, b, g, c) in self.structure_oriented() {
            let term = xs.coeffs[a].expr().clone().mul(ys.coeffs[b].expr().clone()).mul(c);
            accumulate(&mut out[g], term);
        }
        for g in 0..self.k {
            for alpha in 0..self.k {
                for i in 0..self.n {
                    let a_entry = self.anchor[alpha][i].expr();
                    let fwd = xs.coeffs[alpha]
                        .expr()
                        .clone()
                        .mul(a_entry.clone())
                        .mul(ys.coeffs[g].diff_x(i).expr().clone());
                    accumulate(&mut out[g], fwd);
                    let bwd = ys.coeffs[alpha]
                        .expr()
                        .clone()
                        .mul(a_entry.clone())
                        .mul(xs.coeffs[g].diff_x(i).expr().clone());
                    let slot = std::mem::replace(&mut out[g], Expr::zero());
                    out[g] = slot.sub(bwd);
                }
            }
        }
        SectionCoeffs {
            coeffs: out.into_iter().map(|e| ScalarField::from_validated(self.n, e)).collect(),
        }
    }

    /// The bracket `[X, Y]` evaluated at a base point.
    pub fn bracket_sections(
        &self,
        xs: &SectionCoeffs,
        ys: &SectionCoeffs,
        x: &[f64],
    ) -> Result<Vec<f64>, EvalAt> {
        let coeffs = self.bracket_coeffs(xs, ys);
        coeffs
            .coeffs
            .iter()
            .enumerate()
            .map(|(g, f)| f.eval(x).map_err(EvalAt::at(format!("bracket component {}", g + 1))))
            .collect()
    }
}

/// Coefficients of a section in the frame `(e_α)`: `X = Σ_α X^α e_α` with
/// each `X^α` a scalar field on the base.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionCoeffs {
    coeffs: Vec<ScalarField>,
}

impl SectionCoeffs {
    /// The coefficient fields.
    pub fn coeffs(&self) -> &[ScalarField] {
        &self.coeffs
    }

    /// Evaluate all coefficients at a base point.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, EvalAt> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(g, f)| f.eval(x).map_err(EvalAt::at(format!("section coefficient {}", g + 1))))
            .collect()
    }
}

fn accumulate(slot: &mut Expr, term: Expr) {
    let old = std::mem::replace(slot, Expr::zero());
    *slot = old.add(term);
}

fn check_rank(k: usize) -> Result<(), ModelError> {
    if k == 0 {
        return Err(ModelError::shape("spec", "fiber rank k must be at least 1"));
    }
    Ok(())
}

fn validate_anchor(
    n: usize,
    k: usize,
    anchor: Vec<Vec<Expr>>,
) -> Result<Vec<Vec<ScalarField>>, ModelError> {
    // A Lie algebra may omit the anchor entirely.
    if n == 0 && anchor.is_empty() {
        return Ok(vec![Vec::new(); k]);
    }
    if anchor.len() != k || anchor.iter().any(|row| row.len() != n) {
        return Err(ModelError::shape(
            "anchor",
            format!("expected a {k}x{n} table of expressions"),
        ));
    }
    anchor
        .into_iter()
        .enumerate()
        .map(|(alpha, row)| {
            row.into_iter()
                .enumerate()
                .map(|(i, e)| ScalarField::new(n, e, format!("anchor[{}][{}]", alpha + 1, i + 1)))
                .collect()
        })
        .collect()
}

fn check_anchor_fields(n: usize, k: usize, anchor: &[Vec<ScalarField>]) -> Result<(), ModelError> {
    if anchor.len() != k || anchor.iter().any(|row| row.len() != n) {
        return Err(ModelError::shape(
            "anchor",
            format!("expected a {k}x{n} table of scalar fields"),
        ));
    }
    for row in anchor {
        for f in row {
            if f.base_dim() != n {
                return Err(ModelError::shape(
                    "anchor",
                    format!("field validated for base dimension {}, spec has {n}", f.base_dim()),
                ));
            }
        }
    }
    Ok(())
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

    #[test]
    fn so3_basis_brackets() {
        let spec = so3();
        let e = |a| spec.basis_section(a).unwrap();
        assert_eq!(spec.bracket_sections(&e(0), &e(1), &[]).unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(spec.bracket_sections(&e(1), &e(2), &[]).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(spec.bracket_sections(&e(2), &e(0), &[]).unwrap(), vec![0.0, 1.0, 0.0]);
        // Antisymmetry and self-bracket.
        assert_eq!(spec.bracket_sections(&e(1), &e(0), &[]).unwrap(), vec![0.0, 0.0, -1.0]);
        assert_eq!(spec.bracket_sections(&e(1), &e(1), &[]).unwrap(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn tangent_line_leibniz_term() {
        // Tangent algebroid of the line: identity anchor, zero structure.
        let spec = AlgebroidSpec::new(1, 1, vec![vec![Expr::one()]], vec![]).unwrap();
        let x_section = spec.section(vec![parse("x1").unwrap()]).unwrap();
        let unit = spec.section(vec![Expr::one()]).unwrap();
        // [1·e, x1·e] = (a·∂(x1))·1 e = e, independent of the point.
        assert_eq!(spec.bracket_sections(&unit, &x_section, &[7.0]).unwrap(), vec![1.0]);
        assert_eq!(spec.bracket_sections(&x_section, &unit, &[7.0]).unwrap(), vec![-1.0]);
    }

    #[test]
    fn anchor_evaluation() {
        let spec = AlgebroidSpec::new(
            2,
            2,
            vec![
                vec![Expr::one(), Expr::zero()],
                vec![parse("x2").unwrap(), Expr::one()],
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(
            spec.eval_anchor(&[1.0, 5.0]).unwrap(),
            vec![vec![1.0, 0.0], vec![5.0, 1.0]]
        );
        assert!(so3().eval_anchor(&[]).unwrap().iter().all(|row| row.is_empty()));
    }

    #[test]
    fn scope_and_shape_errors() {
        let err = AlgebroidSpec::new(1, 1, vec![vec![parse("y1").unwrap()]], vec![]).unwrap_err();
        assert!(matches!(err, ModelError::UnboundVariable { .. }), "{err}");
        let err = AlgebroidSpec::new(1, 2, vec![vec![Expr::one()]], vec![]).unwrap_err();
        assert!(matches!(err, ModelError::ShapeMismatch { .. }), "{err}");
        let err = AlgebroidSpec::lie_algebra(2, vec![(1, 0, 0, Expr::one())]).unwrap_err();
        assert!(matches!(err, ModelError::PairOrder { .. }), "{err}");
    }

    #[test]
    fn dense_storage_keeps_asymmetry() {
        let mut table = vec![vec![vec![Expr::zero(); 2]; 2]; 2];
        table[0][1][0] = Expr::one(); // no mirrored entry: deliberately broken
        let spec = AlgebroidSpec::from_dense(0, 2, vec![], table).unwrap();
        assert_eq!(spec.structure_entry(0, 1, 0), Expr::Num(1.0));
        assert_eq!(spec.structure_entry(1, 0, 0), Expr::Num(0.0));
    }
}
