//! Small exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::poly::Rational;

/// Reduces `rows` (each of length `ncols`) to reduced row echelon form in
/// place and returns the pivot columns.
pub fn rref(rows: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][col];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let f = rows[i][col].clone();
            for j in col..ncols {
                let d = &f * &rows[r][j];
                rows[i][j] -= d;
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Basis of `{x : A x = 0}`.
pub fn nullspace(a: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut rows = a.to_vec();
    let pivots = rref(&mut rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rows[r][f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `A x = b`, or `None` if the system is inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational], ncols: usize) -> Option<Vec<Rational>> {
    let mut rows: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut rows, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = rows[r][ncols].clone();
    }
    Some(x)
}
