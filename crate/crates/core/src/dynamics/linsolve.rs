//! Dense linear solves for the implicit Euler–Lagrange systems.
//!
//! Fiber Hessians here are tiny (`k ≤ 6` in every scenario), so a
//! partial-pivot LU factorization with an explicit inverse for the
//! condition estimate is both adequate and dependency-free.

/// Marker for an exactly singular matrix (zero pivot).
pub(crate) struct Singular;

/// Solve `A·x = b` and estimate the 1-norm condition number of `A`.
///
/// Returns `(x, cond₁)`; the caller decides what condition number is too
/// large. `cond₁` is `‖A‖₁·‖A⁻¹‖₁` with the inverse taken column by column
/// from the same factorization.
pub(crate) fn solve_with_cond(a: Vec<Vec<f64>>, b: &[f64]) -> Result<(Vec<f64>, f64), Singular> {
    let k = b.len();
    debug_assert!(a.len() == k && a.iter().all(|row| row.len() == k));
    let norm_a = one_norm_columns(&a, k);
    let lu = factor(a)?;
    let x = lu.solve(b);
    let mut norm_inv: f64 = 0.0;
    let mut unit = vec![0.0; k];
    for j in 0..k {
        unit[j] = 1.0;
        let col = lu.solve(&unit);
        norm_inv = norm_inv.max(col.iter().map(|v| v.abs()).sum());
        unit[j] = 0.0;
    }
    Ok((x, norm_a * norm_inv))
}

fn one_norm_columns(a: &[Vec<f64>], k: usize) -> f64 {
    (0..k)
        .map(|j| a.iter().map(|row| row[j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

struct Lu {
    /// Combined factors: strict lower triangle holds multipliers (unit
    /// diagonal implied), upper triangle holds `U`.
    m: Vec<Vec<f64>>,
    /// Row permutation applied to right-hand sides.
    perm: Vec<usize>,
}

fn factor(mut m: Vec<Vec<f64>>) -> Result<Lu, Singular> {
    let k = m.len();
    let mut perm: Vec<usize> = (0..k).collect();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs()))
            .expect("column range is never empty");
        if m[pivot][col] == 0.0 {
            return Err(Singular);
        }
        m.swap(col, pivot);
        perm.swap(col, pivot);
        for r in col + 1..k {
            let f = m[r][col] / m[col][col];
            m[r][col] = f;
            for c in col + 1..k {
                let u = m[col][c];
                m[r][c] -= f * u;
            }
        }
    }
    Ok(Lu { m, perm })
}

impl Lu {
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let k = b.len();
        let mut v: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 1..k {
            for c in 0..r {
                v[r] -= self.m[r][c] * v[c];
            }
        }
        for r in (0..k).rev() {
            for c in r + 1..k {
                v[r] -= self.m[r][c] * v[c];
            }
            v[r] /= self.m[r][r];
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_pivoting_system() {
        // First pivot is zero without row exchange.
        let a = vec![vec![0.0, 2.0, 1.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        let (x, cond) = solve_with_cond(a.clone(), &[5.0, 4.0, 4.0]).map_err(|_| ()).unwrap();
        for (row, b) in a.iter().zip([5.0, 4.0, 4.0]) {
            let lhs: f64 = row.iter().zip(&x).map(|(m, v)| m * v).sum();
            assert!((lhs - b).abs() < 1e-12);
        }
        assert!(cond >= 1.0 && cond < 1e3);
    }

    #[test]
    fn identity_has_unit_condition_number() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let (x, cond) = solve_with_cond(a, &[3.0, -4.0]).map_err(|_| ()).unwrap();
        assert_eq!(x, vec![3.0, -4.0]);
        assert_eq!(cond, 1.0);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve_with_cond(a, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn near_singular_matrix_has_huge_condition_number() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-14]];
        let (_, cond) = solve_with_cond(a, &[1.0, 1.0]).map_err(|_| ()).unwrap();
        assert!(cond > 1e13, "cond = {cond:e}");
    }
}
