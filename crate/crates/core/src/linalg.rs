//! Exact Gaussian elimination over the rationals: rank, linear solve with
//! consistency detection, and minimum-norm solutions of consistent
//! underdetermined systems. Sizes here are tiny (≤ 20 columns), so plain
//! dense elimination with the first nonzero pivot is plenty.

use num_traits::Zero;

use crate::scalars::{ExactScalar, Scalar};

pub(crate) type Matrix = Vec<Vec<Scalar>>;

pub(crate) fn rank(matrix: &Matrix) -> usize {
    if matrix.is_empty() {
        return 0;
    }
    let mut m = matrix.clone();
    let (rows, cols) = (m.len(), m[0].len());
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot_row) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot_row);
        let pivot = m[r][c].clone();
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].checked_div(&pivot).expect("pivot nonzero");
                for j in c..cols {
                    let delta = factor.clone() * m[r][j].clone();
                    m[i][j] = m[i][j].clone() - delta;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

#[derive(Clone, PartialEq, Debug)]
pub(crate) enum Solve {
    /// Every unknown is pinned by a pivot.
    Unique(Vec<Scalar>),
    /// Consistent but with free unknowns; the returned particular solution
    /// sets them to zero.
    Underdetermined(Vec<Scalar>),
    /// Some equation reduces to 0 = nonzero.
    Inconsistent,
}

/// Solves `matrix · x = rhs` by elimination on the augmented system.
pub(crate) fn solve(matrix: &Matrix, rhs: &[Scalar]) -> Solve {
    let rows = matrix.len();
    assert_eq!(rows, rhs.len());
    let cols = if rows == 0 { 0 } else { matrix[0].len() };
    let mut aug: Matrix = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();

    let mut pivot_col_of_row = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot_row) = (r..rows).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, pivot_row);
        let pivot = aug[r][c].clone();
        for i in 0..rows {
            if i != r && !aug[i][c].is_zero() {
                let factor = aug[i][c].checked_div(&pivot).expect("pivot nonzero");
                for j in c..=cols {
                    let delta = factor.clone() * aug[r][j].clone();
                    aug[i][j] = aug[i][j].clone() - delta;
                }
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }

    for row in aug.iter().skip(r) {
        if !row[cols].is_zero() {
            return Solve::Inconsistent;
        }
    }

    let mut x = vec![Scalar::zero(); cols];
    for (row, &c) in pivot_col_of_row.iter().enumerate() {
        x[c] = aug[row][cols]
            .checked_div(&aug[row][c])
            .expect("pivot nonzero");
    }
    if pivot_col_of_row.len() == cols {
        Solve::Unique(x)
    } else {
        Solve::Underdetermined(x)
    }
}

/// Minimum-norm solution of a consistent system `matrix · x = rhs`: solves
/// `M·Mᵀ·y = rhs` and returns `x = Mᵀ·y`, which lies in the row space and is
/// therefore the unique least-norm solution. `None` when inconsistent.
pub(crate) fn least_norm_solve(matrix: &Matrix, rhs: &[Scalar]) -> Option<Vec<Scalar>> {
    let rows = matrix.len();
    let cols = if rows == 0 { 0 } else { matrix[0].len() };
    let mut gram: Matrix = vec![vec![Scalar::zero(); rows]; rows];
    for i in 0..rows {
        for j in 0..rows {
            let mut acc = Scalar::zero();
            for k in 0..cols {
                acc = acc + matrix[i][k].clone() * matrix[j][k].clone();
            }
            gram[i][j] = acc;
        }
    }
    let y = match solve(&gram, rhs) {
        Solve::Unique(y) | Solve::Underdetermined(y) => y,
        Solve::Inconsistent => return None,
    };
    let mut x = vec![Scalar::zero(); cols];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut acc = Scalar::zero();
        for i in 0..rows {
            acc = acc + matrix[i][k].clone() * y[i].clone();
        }
        *xk = acc;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d).unwrap()
    }

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&v| Scalar::from_integer(v)).collect())
            .collect()
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&m(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rank(&m(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])), 2);
    }

    #[test]
    fn solve_unique() {
        // x + y = 3, x − y = 1 → (2, 1)
        let out = solve(&m(&[&[1, 1], &[1, -1]]), &[q(3, 1), q(1, 1)]);
        assert_eq!(out, Solve::Unique(vec![q(2, 1), q(1, 1)]));
    }

    #[test]
    fn solve_overdetermined_consistent_and_inconsistent() {
        let a = m(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(
            solve(&a, &[q(1, 1), q(2, 1), q(3, 1)]),
            Solve::Unique(vec![q(1, 1), q(2, 1)])
        );
        assert_eq!(solve(&a, &[q(1, 1), q(2, 1), q(4, 1)]), Solve::Inconsistent);
    }

    #[test]
    fn solve_underdetermined_sets_free_unknowns_to_zero() {
        let out = solve(&m(&[&[1, 1, 0]]), &[q(5, 1)]);
        match out {
            Solve::Underdetermined(x) => {
                assert_eq!(x, vec![q(5, 1), q(0, 1), q(0, 1)]);
            }
            other => panic!("expected underdetermined, got {:?}", other),
        }
    }

    #[test]
    fn least_norm_is_in_the_row_space() {
        // single equation x + y = 2 → least-norm (1, 1)
        let a = m(&[&[1, 1]]);
        let x = least_norm_solve(&a, &[q(2, 1)]).unwrap();
        assert_eq!(x, vec![q(1, 1), q(1, 1)]);
        // inconsistent after stacking a contradictory copy
        let b = m(&[&[1, 1], &[1, 1]]);
        assert_eq!(least_norm_solve(&b, &[q(2, 1), q(3, 1)]), None);
    }
}
