//! Sparse coefficient tensors in three indices.
//!
//! All structure data in this crate lives in rank-3 tensors of
//! [`ScalarField`]s, almost all of whose entries are zero. Two storage
//! conventions cover every block:
//!
//! - [`SkewTensor`]: antisymmetric in its first two indices. Only entries
//!   with `first < second` are stored; the mirrored entry is implied with a
//!   minus sign and diagonal entries are identically zero.
//! - [`MixedTensor`]: no symmetry; entries stored as given.
//!
//! Entries that fold to the constant zero are dropped on insertion, so "the
//! block is zero" is equivalent to "the block stores nothing" — which keeps
//! classification by zero-pattern independent of how the data was spelled.

use std::collections::BTreeMap;

use crate::expr::Expr;
use crate::field::{ModelError, ScalarField};

/// A rank-3 tensor antisymmetric in its first index pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewTensor {
    name: &'static str,
    pair: usize,
    out: usize,
    n: usize,
    entries: BTreeMap<(usize, usize, usize), ScalarField>,
}

impl SkewTensor {
    /// An empty (zero) tensor. `pair` is the dimension of the antisymmetric
    /// index pair, `out` of the third index, `n` the base dimension entries
    /// may depend on. `name` labels the block in error messages.
    pub fn new(name: &'static str, pair: usize, out: usize, n: usize) -> SkewTensor {
        SkewTensor { name, pair, out, n, entries: BTreeMap::new() }
    }

    /// Insert the entry at `(i, j, g)`, all 0-based with `i < j` required.
    /// Entries that fold to zero are dropped.
    pub fn set(&mut self, i: usize, j: usize, g: usize, expr: Expr) -> Result<(), ModelError> {
        let place = || format!("{}[{}][{}][{}]", self.name, i + 1, j + 1, g + 1);
        check_index(&place, i, self.pair)?;
        check_index(&place, j, self.pair)?;
        check_index(&place, g, self.out)?;
        if i >= j {
            return Err(ModelError::PairOrder { place: place(), alpha: i + 1, beta: j + 1 });
        }
        if self.entries.contains_key(&(i, j, g)) {
            return Err(ModelError::DuplicateEntry { place: place() });
        }
        let field = ScalarField::new(self.n, expr, place())?;
        if !field.is_zero() {
            self.entries.insert((i, j, g), field);
        }
        Ok(())
    }

    /// The entry at `(i, j, g)` with the antisymmetry sign applied; zero for
    /// `i == j` and for absent entries.
    pub fn get(&self, i: usize, j: usize, g: usize) -> Expr {
        if i < j {
            self.entries.get(&(i, j, g)).map(|f| f.expr().clone())
        } else if i > j {
            self.entries.get(&(j, i, g)).map(|f| f.expr().clone().neg())
        } else {
            None
        }
        .unwrap_or_else(Expr::zero)
    }

    /// Stored entries (the `i < j` representatives) in sorted index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, &ScalarField)> {
        self.entries.iter().map(|(&(i, j, g), f)| (i, j, g, f))
    }

    /// Is every entry the constant zero?
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Dimension of the antisymmetric index pair.
    pub fn pair_dim(&self) -> usize {
        self.pair
    }

    /// Dimension of the third index.
    pub fn out_dim(&self) -> usize {
        self.out
    }

    /// Base dimension the entries may depend on.
    pub fn base_dim(&self) -> usize {
        self.n
    }

    /// Block label used in error messages and file sections.
    pub fn name(&self) -> &'static str {
        self.name
    }
}

/// A rank-3 tensor with no index symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedTensor {
    name: &'static str,
    dims: (usize, usize, usize),
    n: usize,
    entries: BTreeMap<(usize, usize, usize), ScalarField>,
}

impl MixedTensor {
    /// An empty (zero) tensor with the given index dimensions.
    pub fn new(name: &'static str, dims: (usize, usize, usize), n: usize) -> MixedTensor {
        MixedTensor { name, dims, n, entries: BTreeMap::new() }
    }

    /// Insert the entry at `(a, b, c)`, 0-based. Zero entries are dropped.
    pub fn set(&mut self, a: usize, b: usize, c: usize, expr: Expr) -> Result<(), ModelError> {
        let place = || format!("{}[{}][{}][{}]", self.name, a + 1, b + 1, c + 1);
        check_index(&place, a, self.dims.0)?;
        check_index(&place, b, self.dims.1)?;
        check_index(&place, c, self.dims.2)?;
        if self.entries.contains_key(&(a, b, c)) {
            return Err(ModelError::DuplicateEntry { place: place() });
        }
        let field = ScalarField::new(self.n, expr, place())?;
        if !field.is_zero() {
            self.entries.insert((a, b, c), field);
        }
        Ok(())
    }

    /// The entry at `(a, b, c)`; zero when absent.
    pub fn get(&self, a: usize, b: usize, c: usize) -> Expr {
        self.entries.get(&(a, b, c)).map(|f| f.expr().clone()).unwrap_or_else(Expr::zero)
    }

    /// Stored entries in sorted index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, &ScalarField)> {
        self.entries.iter().map(|(&(a, b, c), f)| (a, b, c, f))
    }

    /// Is every entry the constant zero?
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// The three index dimensions.
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    /// Base dimension the entries may depend on.
    pub fn base_dim(&self) -> usize {
        self.n
    }

    /// Block label used in error messages and file sections.
    pub fn name(&self) -> &'static str {
        self.name
    }
}

fn check_index(place: &dyn Fn() -> String, index: usize, bound: usize) -> Result<(), ModelError> {
    if index < bound {
        Ok(())
    } else {
        Err(ModelError::IndexOutOfRange { place: place(), index: index + 1, bound })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn skew_sign_and_defaults() {
        let mut t = SkewTensor::new("phi", 3, 3, 0);
        t.set(0, 1, 2, Expr::one()).unwrap();
        assert_eq!(t.get(0, 1, 2), Expr::Num(1.0));
        assert_eq!(t.get(1, 0, 2), parse("-1").unwrap());
        assert_eq!(t.get(0, 0, 2), Expr::Num(0.0)); // diagonal
        assert_eq!(t.get(0, 2, 1), Expr::Num(0.0)); // absent
    }

    #[test]
    fn skew_rejects_bad_entries() {
        let mut t = SkewTensor::new("phi", 2, 2, 1);
        assert!(matches!(
            t.set(1, 0, 0, Expr::one()),
            Err(ModelError::PairOrder { .. })
        ));
        assert!(matches!(
            t.set(0, 1, 5, Expr::one()),
            Err(ModelError::IndexOutOfRange { index: 6, bound: 2, .. })
        ));
        t.set(0, 1, 0, parse("x1").unwrap()).unwrap();
        assert!(matches!(
            t.set(0, 1, 0, Expr::one()),
            Err(ModelError::DuplicateEntry { .. })
        ));
        assert!(matches!(
            t.set(0, 1, 1, parse("x2").unwrap()),
            Err(ModelError::UnboundVariable { .. })
        ));
    }

    #[test]
    fn zero_entries_are_dropped() {
        let mut t = MixedTensor::new("rho", (2, 2, 2), 1);
        t.set(0, 1, 1, parse("0*x1").unwrap()).unwrap();
        assert!(t.is_zero());
        t.set(1, 1, 1, parse("x1").unwrap()).unwrap();
        assert!(!t.is_zero());
        assert_eq!(t.get(1, 1, 1), parse("x1").unwrap());
        assert_eq!(t.get(0, 1, 1), Expr::Num(0.0));
    }
}
