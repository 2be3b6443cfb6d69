//! Bicocycle double cross products of Lie algebroids.
//!
//! A BDCP couples two anchored bundles 𝒜 (rank `p`) and ℬ (rank `q`) over a
//! shared base through six coefficient tensors:
//!
//! * `φ[α][β][γ]` — the 𝒜-component of `[e_α, e_β]` for frame sections of 𝒜
//!   (antisymmetric in `α, β`),
//! * `ζ[α][β][a]` — the twisted cocycle of 𝒜: the ℬ-component of the same
//!   bracket (antisymmetric),
//! * `ψ[a][b][γ]` — the twisted cocycle of ℬ: the 𝒜-component of
//!   `[e_a, e_b]` (antisymmetric),
//! * `θ[a][b][d]` — the ℬ-component of `[e_a, e_b]` (antisymmetric),
//! * `ρ[a][α][β]` — the weak action of ℬ on 𝒜: the `e_β`-coefficient of the
//!   𝒜-part of `[e_a, e_α]`,
//! * `σ[a][α][b]` — the weak action of 𝒜 on ℬ: the `e_b`-coefficient of the
//!   ℬ-part of `[e_a, e_α]`.
//!
//! With the frame of the total bundle ordered as the `p` sections of 𝒜
//! followed by the `q` sections of ℬ, the mixed brackets read
//!
//! ```text
//! [e_{p+a}, e_α] = Σ_β ρ[a][α][β] e_β + Σ_b σ[a][α][b] e_{p+b}
//! ```
//!
//! [`BdcpSpec::assemble_total`] packs everything into one candidate
//! algebroid of rank `p + q` with stacked anchors; [`decompose`] inverts the
//! packing against a chosen splitting, exactly. Setting particular tensors
//! to zero recovers the classical constructions — see [`HierarchyLevel`] and
//! [`make_product`].

use std::fmt;
use std::str::FromStr;

use crate::algebroid::{AlgebroidSpec, StructureTensor};
use crate::expr::Expr;
use crate::field::{ModelError, ScalarField};
use crate::tensor::{MixedTensor, SkewTensor};

/// The degeneration hierarchy of the bicocycle double cross product,
/// ordered from most special to fully general.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HierarchyLevel {
    /// Both cocycles and both actions vanish: a direct product.
    Direct,
    /// Only `θ` and the action `ρ` survive: a semidirect product.
    Semidirect,
    /// `θ`, `ρ` and the cocycle `ψ`: a 2-cocycle extension.
    CocycleExt,
    /// Both cocycles vanish: a matched pair (double cross product).
    DoubleCross,
    /// Only `ζ` vanishes: 𝒜 is a subalgebroid (unified product).
    Unified,
    /// Nothing vanishes.
    Bdcp,
}

impl HierarchyLevel {
    /// Every level, most special first.
    pub const ALL: [HierarchyLevel; 6] = [
        HierarchyLevel::Direct,
        HierarchyLevel::Semidirect,
        HierarchyLevel::CocycleExt,
        HierarchyLevel::DoubleCross,
        HierarchyLevel::Unified,
        HierarchyLevel::Bdcp,
    ];

    /// The canonical label, as printed by the CLI.
    pub fn label(self) -> &'static str {
        match self {
            HierarchyLevel::Direct => "direct",
            HierarchyLevel::Semidirect => "semidirect",
            HierarchyLevel::CocycleExt => "cocycle_ext",
            HierarchyLevel::DoubleCross => "double_cross",
            HierarchyLevel::Unified => "unified",
            HierarchyLevel::Bdcp => "BDCP",
        }
    }
}

impl fmt::Display for HierarchyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for HierarchyLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HierarchyLevel::ALL
            .into_iter()
            .find(|l| l.label() == s)
            .ok_or_else(|| format!("unknown hierarchy level `{s}`"))
    }
}

/// Raw inputs for a [`BdcpSpec`]: dimensions, anchors, and entry lists for
/// the six tensors (0-based indices, omitted entries are zero).
///
/// The antisymmetric tensors `phi`, `zeta`, `psi`, `theta` take entries with
/// first index < second index; `rho` and `sigma` take arbitrary
/// `(a, α, out)` triples.
#[derive(Debug, Clone, Default)]
pub struct BdcpParts {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    /// `p×n` anchor of 𝒜 (may be empty when `n = 0`).
    pub anchor_a: Vec<Vec<Expr>>,
    /// `q×n` anchor of ℬ (may be empty when `n = 0`).
    pub anchor_b: Vec<Vec<Expr>>,
    pub phi: Vec<(usize, usize, usize, Expr)>,
    pub zeta: Vec<(usize, usize, usize, Expr)>,
    pub psi: Vec<(usize, usize, usize, Expr)>,
    pub theta: Vec<(usize, usize, usize, Expr)>,
    pub rho: Vec<(usize, usize, usize, Expr)>,
    pub sigma: Vec<(usize, usize, usize, Expr)>,
}

impl BdcpParts {
    /// Empty parts for a product of Lie algebras (point base).
    pub fn lie_algebra(p: usize, q: usize) -> BdcpParts {
        BdcpParts { n: 0, p, q, ..BdcpParts::default() }
    }
}

/// A bicocycle double cross product candidate in local form.
#[derive(Debug, Clone, PartialEq)]
pub struct BdcpSpec {
    n: usize,
    p: usize,
    q: usize,
    anchor_a: Vec<Vec<ScalarField>>,
    anchor_b: Vec<Vec<ScalarField>>,
    phi: SkewTensor,
    zeta: SkewTensor,
    psi: SkewTensor,
    theta: SkewTensor,
    rho: MixedTensor,
    sigma: MixedTensor,
}

impl BdcpSpec {
    /// Validate and build a full BDCP spec; all six tensors are permitted.
    pub fn from_parts(parts: BdcpParts) -> Result<BdcpSpec, ModelError> {
        let BdcpParts { n, p, q, anchor_a, anchor_b, phi, zeta, psi, theta, rho, sigma } = parts;
        if p == 0 || q == 0 {
            return Err(ModelError::InvalidSplit { p, k: p + q });
        }
        let anchor_a = validate_block_anchor(n, p, anchor_a, "anchor_a")?;
        let anchor_b = validate_block_anchor(n, q, anchor_b, "anchor_b")?;
        let phi = fill_skew("phi", p, p, n, phi)?;
        let zeta = fill_skew("zeta", p, q, n, zeta)?;
        let psi = fill_skew("psi", q, p, n, psi)?;
        let theta = fill_skew("theta", q, q, n, theta)?;
        let rho = fill_mixed("rho", (q, p, p), n, rho)?;
        let sigma = fill_mixed("sigma", (q, p, q), n, sigma)?;
        Ok(BdcpSpec { n, p, q, anchor_a, anchor_b, phi, zeta, psi, theta, rho, sigma })
    }

    /// Base dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Rank of the first block 𝒜.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Rank of the second block ℬ.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Anchor of 𝒜 (`p×n`).
    pub fn anchor_a(&self) -> &[Vec<ScalarField>] {
        &self.anchor_a
    }

    /// Anchor of ℬ (`q×n`).
    pub fn anchor_b(&self) -> &[Vec<ScalarField>] {
        &self.anchor_b
    }

    /// The block bracket tensor of 𝒜.
    pub fn phi(&self) -> &SkewTensor {
        &self.phi
    }

    /// The twisted cocycle of 𝒜 (ℬ-valued).
    pub fn zeta(&self) -> &SkewTensor {
        &self.zeta
    }

    /// The twisted cocycle of ℬ (𝒜-valued).
    pub fn psi(&self) -> &SkewTensor {
        &self.psi
    }

    /// The block bracket tensor of ℬ.
    pub fn theta(&self) -> &SkewTensor {
        &self.theta
    }

    /// The weak action of ℬ on 𝒜.
    pub fn rho(&self) -> &MixedTensor {
        &self.rho
    }

    /// The weak action of 𝒜 on ℬ.
    pub fn sigma(&self) -> &MixedTensor {
        &self.sigma
    }

    /// The deepest hierarchy level whose zero-pattern this spec matches.
    ///
    /// A tensor counts as zero exactly when every entry folds to the
    /// constant `0`; anchors are not inspected.
    pub fn classify(&self) -> HierarchyLevel {
        let (phi, zeta, psi, sigma, rho) = (
            self.phi.is_zero(),
            self.zeta.is_zero(),
            self.psi.is_zero(),
            self.sigma.is_zero(),
            self.rho.is_zero(),
        );
        if zeta && psi && rho && sigma {
            HierarchyLevel::Direct
        } else if zeta && sigma && phi && psi {
            HierarchyLevel::Semidirect
        } else if zeta && sigma && phi {
            HierarchyLevel::CocycleExt
        } else if zeta && psi {
            HierarchyLevel::DoubleCross
        } else if zeta {
            HierarchyLevel::Unified
        } else {
            HierarchyLevel::Bdcp
        }
    }

    /// Pack the six tensors and stacked anchors into one rank-`p+q`
    /// algebroid candidate, frame ordered 𝒜 then ℬ.
    pub fn assemble_total(&self) -> AlgebroidSpec {
        let p = self.p;
        let k = self.p + self.q;
        let mut total = SkewTensor::new("structure", k, k, self.n);
        let mut put = |i: usize, j: usize, g: usize, e: Expr| {
            total.set(i, j, g, e).expect("validated blocks stay in range");
        };
        for (a, b, g, f) in self.phi.entries() {
            put(a, b, g, f.expr().clone());
        }
        for (a, b, g, f) in self.zeta.entries() {
            put(a, b, p + g, f.expr().clone());
        }
        for (a, b, g, f) in self.psi.entries() {
            put(p + a, p + b, g, f.expr().clone());
        }
        for (a, b, g, f) in self.theta.entries() {
            put(p + a, p + b, p + g, f.expr().clone());
        }
        // Mixed brackets are defined with the ℬ section first:
        // C[p+a][α][·] = (ρ, σ). Antisymmetric storage keys on (α, p+a),
        // so the stored representative carries the opposite sign.
        for (a, alpha, beta, f) in self.rho.entries() {
            put(alpha, p + a, beta, f.expr().clone().neg());
        }
        for (a, alpha, b, f) in self.sigma.entries() {
            put(alpha, p + a, p + b, f.expr().clone().neg());
        }
        let anchor = self.anchor_a.iter().chain(self.anchor_b.iter()).cloned().collect();
        AlgebroidSpec::from_skew(self.n, k, anchor, total)
            .expect("block data was validated at construction")
    }
}

/// Build one of the degenerate products of the hierarchy.
///
/// Every non-zero tensor in `parts` must be permitted at `level`
/// (for example semidirect admits only `theta` and `rho`); anchors are
/// always admitted. Passing [`HierarchyLevel::Bdcp`] is the same as
/// [`BdcpSpec::from_parts`].
pub fn make_product(level: HierarchyLevel, parts: BdcpParts) -> Result<BdcpSpec, ModelError> {
    let spec = BdcpSpec::from_parts(parts)?;
    let permitted: &[&str] = match level {
        HierarchyLevel::Direct => &["phi", "theta"],
        HierarchyLevel::Semidirect => &["theta", "rho"],
        HierarchyLevel::CocycleExt => &["theta", "rho", "psi"],
        HierarchyLevel::DoubleCross => &["phi", "theta", "rho", "sigma"],
        HierarchyLevel::Unified => &["phi", "theta", "rho", "sigma", "psi"],
        HierarchyLevel::Bdcp => &["phi", "theta", "rho", "sigma", "psi", "zeta"],
    };
    let blocks: [(&'static str, bool); 6] = [
        ("phi", spec.phi.is_zero()),
        ("zeta", spec.zeta.is_zero()),
        ("psi", spec.psi.is_zero()),
        ("theta", spec.theta.is_zero()),
        ("rho", spec.rho.is_zero()),
        ("sigma", spec.sigma.is_zero()),
    ];
    for (block, is_zero) in blocks {
        if !is_zero && !permitted.contains(&block) {
            return Err(ModelError::IllegalTensorForLevel { level, block });
        }
    }
    Ok(spec)
}

/// Split a total algebroid into BDCP data against the frame splitting
/// `𝒜 = span(e_1..e_p)`, `ℬ = span(e_{p+1}..e_k)`.
///
/// This inverts [`BdcpSpec::assemble_total`] exactly (the expressions are
/// recovered tree-for-tree). The total spec must use antisymmetric
/// structure storage.
pub fn decompose(total: &AlgebroidSpec, p: usize) -> Result<BdcpSpec, ModelError> {
    let k = total.k();
    if p == 0 || p >= k {
        return Err(ModelError::InvalidSplit { p, k });
    }
    let skew = match total.structure() {
        StructureTensor::Skew(t) => t,
        StructureTensor::Dense(_) => {
            return Err(ModelError::shape(
                "decompose",
                "dense structure storage cannot be split; assemble antisymmetric data first",
            ))
        }
    };
    let n = total.n();
    let q = k - p;
    let mut phi = SkewTensor::new("phi", p, p, n);
    let mut zeta = SkewTensor::new("zeta", p, q, n);
    let mut psi = SkewTensor::new("psi", q, p, n);
    let mut theta = SkewTensor::new("theta", q, q, n);
    let mut rho = MixedTensor::new("rho", (q, p, p), n);
    let mut sigma = MixedTensor::new("sigma", (q, p, q), n);
    for (i, j, g, f) in skew.entries() {
        let e = f.expr().clone();
        match (i < p, j < p, g < p) {
            (true, true, true) => phi.set(i, j, g, e)?,
            (true, true, false) => zeta.set(i, j, g - p, e)?,
            (false, false, true) => psi.set(i - p, j - p, g, e)?,
            (false, false, false) => theta.set(i - p, j - p, g - p, e)?,
            // Stored as C[α][p+a][·]; the defining orientation is
            // C[p+a][α][·], hence the sign flip.
            (true, false, true) => rho.set(j - p, i, g, e.neg())?,
            (true, false, false) => sigma.set(j - p, i, g - p, e.neg())?,
            (false, true, _) => unreachable!("antisymmetric storage keys satisfy i < j"),
        }
    }
    let anchor_a = total.anchor_table()[..p].to_vec();
    let anchor_b = total.anchor_table()[p..].to_vec();
    Ok(BdcpSpec { n, p, q, anchor_a, anchor_b, phi, zeta, psi, theta, rho, sigma })
}

fn fill_skew(
    name: &'static str,
    pair: usize,
    out: usize,
    n: usize,
    entries: Vec<(usize, usize, usize, Expr)>,
) -> Result<SkewTensor, ModelError> {
    let mut t = SkewTensor::new(name, pair, out, n);
    for (i, j, g, e) in entries {
        t.set(i, j, g, e)?;
    }
    Ok(t)
}

fn fill_mixed(
    name: &'static str,
    dims: (usize, usize, usize),
    n: usize,
    entries: Vec<(usize, usize, usize, Expr)>,
) -> Result<MixedTensor, ModelError> {
    let mut t = MixedTensor::new(name, dims, n);
    for (a, b, c, e) in entries {
        t.set(a, b, c, e)?;
    }
    Ok(t)
}

fn validate_block_anchor(
    n: usize,
    rank: usize,
    anchor: Vec<Vec<Expr>>,
    place: &str,
) -> Result<Vec<Vec<ScalarField>>, ModelError> {
    if n == 0 && anchor.is_empty() {
        return Ok(vec![Vec::new(); rank]);
    }
    if anchor.len() != rank || anchor.iter().any(|row| row.len() != n) {
        return Err(ModelError::shape(
            place.to_string(),
            format!("expected a {rank}x{n} table of expressions"),
        ));
    }
    anchor
        .into_iter()
        .enumerate()
        .map(|(r, row)| {
            row.into_iter()
                .enumerate()
                .map(|(i, e)| ScalarField::new(n, e, format!("{place}[{}][{}]", r + 1, i + 1)))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// so(3)⋉ℝ³ (the heavy-top algebra): ℬ = so(3) acting on abelian 𝒜 = ℝ³.
    fn heavy_top() -> BdcpSpec {
        let mut parts = BdcpParts::lie_algebra(3, 3);
        for (a, b, d, v) in [(0, 1, 2, 1.0), (0, 2, 1, -1.0), (1, 2, 0, 1.0)] {
            parts.theta.push((a, b, d, Expr::num(v)));
        }
        // rho[a][α][β] = ε_{aαβ}: the standard action of so(3) on ℝ³.
        for (a, al, be, v) in [
            (0, 1, 2, 1.0),
            (0, 2, 1, -1.0),
            (1, 0, 2, -1.0),
            (1, 2, 0, 1.0),
            (2, 0, 1, 1.0),
            (2, 1, 0, -1.0),
        ] {
            parts.rho.push((a, al, be, Expr::num(v)));
        }
        make_product(HierarchyLevel::Semidirect, parts).unwrap()
    }

    #[test]
    fn heavy_top_assembles_to_se3() {
        let total = heavy_top().assemble_total();
        assert_eq!(total.k(), 6);
        // Rotation block: [e_4, e_5] = e_6 and cyclic.
        assert_eq!(total.structure_entry(3, 4, 5), Expr::Num(1.0));
        assert_eq!(total.structure_entry(4, 5, 3), Expr::Num(1.0));
        // Mixed block: [e_4, e_2] = e_3, i.e. rotations move translations.
        assert_eq!(total.structure_entry(3, 1, 2), Expr::Num(1.0));
        assert_eq!(total.structure_entry(1, 3, 2), crate::expr::parse("-1").unwrap());
        // Translations commute.
        assert_eq!(total.structure_entry(0, 1, 2), Expr::Num(0.0));
    }

    #[test]
    fn decompose_inverts_assemble() {
        let spec = heavy_top();
        let back = decompose(&spec.assemble_total(), 3).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn classify_levels() {
        assert_eq!(heavy_top().classify(), HierarchyLevel::Semidirect);
        let direct = BdcpSpec::from_parts(BdcpParts::lie_algebra(1, 1)).unwrap();
        assert_eq!(direct.classify(), HierarchyLevel::Direct);
        let mut parts = BdcpParts::lie_algebra(2, 1);
        parts.zeta.push((0, 1, 0, Expr::one()));
        let full = BdcpSpec::from_parts(parts).unwrap();
        assert_eq!(full.classify(), HierarchyLevel::Bdcp);
    }

    #[test]
    fn levels_reject_forbidden_tensors() {
        let mut parts = BdcpParts::lie_algebra(2, 1);
        parts.phi.push((0, 1, 0, Expr::one()));
        let err = make_product(HierarchyLevel::Semidirect, parts).unwrap_err();
        assert_eq!(
            err,
            ModelError::IllegalTensorForLevel { level: HierarchyLevel::Semidirect, block: "phi" }
        );
        let mut parts = BdcpParts::lie_algebra(2, 1);
        parts.zeta.push((0, 1, 0, Expr::one()));
        assert!(make_product(HierarchyLevel::Unified, parts).is_err());
    }

    #[test]
    fn labels_round_trip() {
        for level in HierarchyLevel::ALL {
            assert_eq!(level.label().parse::<HierarchyLevel>().unwrap(), level);
        }
        assert!("dcp".parse::<HierarchyLevel>().is_err());
    }
}
