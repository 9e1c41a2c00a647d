//! Small dense linear algebra: exact over rationals, plus an `f64` solver
//! for the Newton iterations.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// Reduces `rows` to row echelon form in place and returns the rank.
fn echelon(rows: &mut [Vec<Rational>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &rows[rank][col];
            for c in col..ncols {
                let delta = &factor * &rows[rank][c];
                rows[r][c] -= delta;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

pub(crate) fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut rows = rows.to_vec();
    echelon(&mut rows)
}

/// Solves the square system `a x = b`; `None` when `a` is singular.
pub(crate) fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] *= &inv;
        }
        b[col] *= &inv;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    Some(b)
}

pub(crate) fn det(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::from_integer(1.into());
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}

/// A nonzero vector orthogonal to every row, assuming the rows have rank
/// exactly `ncols - 1`.
pub(crate) fn normal_vector(rows: &[Vec<Rational>], ncols: usize) -> Option<Vec<Rational>> {
    let mut m = rows.to_vec();
    let r = echelon(&mut m);
    if r + 1 != ncols {
        return None;
    }
    // Back-substitute into reduced form to find the free column.
    let mut pivots = Vec::with_capacity(r);
    let mut row = 0;
    for col in 0..ncols {
        if row < r && !m[row][col].is_zero() {
            pivots.push(col);
            row += 1;
        }
    }
    let free = (0..ncols).find(|c| !pivots.contains(c))?;
    let mut x = vec![Rational::zero(); ncols];
    x[free] = Rational::from_integer(1.into());
    for (i, &pc) in pivots.iter().enumerate().rev() {
        let mut s = Rational::zero();
        for c in pc + 1..ncols {
            s += &m[i][c] * &x[c];
        }
        x[pc] = -s / &m[i][pc];
    }
    Some(x)
}

/// Gaussian elimination with partial pivoting; `None` when numerically singular.
pub(crate) fn solve_f64(a: Vec<Vec<f64>>, b: Vec<f64>) -> Option<Vec<f64>> {
    solve_f64_with_pivot_floor(a, b, 1e-14)
}

/// As [`solve_f64`], rejecting any pivot below `floor` times the largest entry.
pub(crate) fn solve_f64_with_pivot_floor(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, floor: f64) -> Option<Vec<f64>> {
    let n = a.len();
    let scale = a.iter().flat_map(|r| r.iter()).fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= floor * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= factor * a[col][c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|c| a[i][c] * x[c]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Sparse exact solve of a square system given as rows of `(column, value)`
/// maps. Pivots on the shortest remaining row to limit fill-in, which keeps
/// graph Laplacians of paths and cycles cheap. `None` when singular.
pub(crate) fn solve_sparse(mut rows: Vec<BTreeMap<usize, Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut active: Vec<usize> = (0..n).collect();
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(n);
    while !active.is_empty() {
        let (pos, &r) = active.iter().enumerate().min_by_key(|(_, &r)| rows[r].len())?;
        let (&c, _) =
            rows[r].iter().min_by_key(|(&c, _)| active.iter().filter(|&&q| rows[q].contains_key(&c)).count())?;
        active.swap_remove(pos);
        let pivot_row = std::mem::take(&mut rows[r]);
        let pivot = pivot_row[&c].clone();
        for &q in &active {
            let Some(factor) = rows[q].get(&c).map(|v| v / &pivot) else {
                continue;
            };
            for (col, v) in &pivot_row {
                let entry = rows[q].entry(*col).or_insert_with(Rational::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    rows[q].remove(col);
                }
            }
            let delta = &factor * &rhs[r];
            rhs[q] -= delta;
        }
        rows[r] = pivot_row;
        order.push((r, c));
    }
    let mut x = vec![Rational::zero(); n];
    for &(r, c) in order.iter().rev() {
        let mut s = rhs[r].clone();
        for (col, v) in &rows[r] {
            if *col != c {
                s -= v * &x[*col];
            }
        }
        x[c] = s / &rows[r][&c];
    }
    Some(x)
}

pub(crate) fn abs_max<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
}
