//! Dense exact linear algebra over Q, only as much as the crate needs:
//! row reduction for span computations and inversion of small square matrices.

use num_traits::{One, Zero};

use crate::rational::Q;

pub type Matrix = Vec<Vec<Q>>;

/// Reduced row echelon form; returns the nonzero rows.
pub fn row_reduce(rows: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut m: Matrix = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivot_row = 0;
    for c in 0..cols {
        let Some(p) = (pivot_row..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let inv = Q::one() / &m[pivot_row][c];
        for v in m[pivot_row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..m.len() {
            if r != pivot_row && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..cols {
                    let d = &f * &m[pivot_row][k];
                    m[r][k] -= d;
                }
            }
        }
        pivot_row += 1;
    }
    m.truncate(pivot_row);
    m
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    row_reduce(rows).len()
}

/// Inverse of a square matrix, or `None` when singular.
pub fn invert(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !aug[r][c].is_zero())?;
        aug.swap(c, p);
        let inv = Q::one() / &aug[c][c];
        for v in aug[c].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != c && !aug[r][c].is_zero() {
                let f = aug[r][c].clone();
                for k in 0..2 * n {
                    let d = &f * &aug[c][k];
                    aug[r][k] -= d;
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(a: &Matrix, v: &[Q]) -> Vec<Q> {
    a.iter().map(|row| row.iter().zip(v).fold(Q::zero(), |acc, (x, y)| acc + x * y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn inverse_round_trip() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        let inv = invert(&a).unwrap();
        assert_eq!(inv, vec![vec![q(1), q(-1)], vec![q(-1), q(2)]]);
        assert_eq!(mat_vec(&inv, &mat_vec(&a, &[qr(1, 3), q(5)])), vec![qr(1, 3), q(5)]);
        assert!(invert(&vec![vec![q(1), q(2)], vec![q(2), q(4)]]).is_none());
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(0)]];
        assert_eq!(rank(&rows), 2);
    }
}
