//! Exact feasibility for `A x = b, x >= 0` by phase-one simplex with
//! Bland's rule (terminates on degenerate problems).

#![allow(clippy::needless_range_loop)]

use num_traits::{Signed, Zero};

use crate::rational::Rational;

pub(crate) fn feasible(a: &[Vec<Rational>], b: &[Rational]) -> bool {
    let m = a.len();
    if m == 0 {
        return true;
    }
    let n = a[0].len();
    let width = n + m;
    // Tableau rows: [A | I | b], with b made nonnegative.
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r: Vec<Rational> = row.iter().map(|x| if flip { -x } else { x.clone() }).collect();
        r.extend((0..m).map(|k| if k == i { Rational::from_integer(1.into()) } else { Rational::zero() }));
        t.push(r);
        rhs.push(if flip { -bi } else { bi.clone() });
    }
    let mut basis: Vec<usize> = (n..width).collect();
    // Reduced costs for minimizing the sum of artificials.
    let mut cost = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
    }
    while let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &rhs[i] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // Phase one is bounded below by zero, so a pivot row always exists.
        let Some((row, _)) = leave else { break };
        let inv = t[row][enter].recip();
        for v in t[row].iter_mut() {
            *v *= &inv;
        }
        rhs[row] *= &inv;
        for i in 0..m {
            if i == row || t[i][enter].is_zero() {
                continue;
            }
            let f = t[i][enter].clone();
            for j in 0..width {
                if !t[row][j].is_zero() {
                    let d = &f * &t[row][j];
                    t[i][j] -= d;
                }
            }
            let d = &f * &rhs[row];
            rhs[i] -= d;
        }
        let f = cost[enter].clone();
        for j in 0..width {
            if !t[row][j].is_zero() {
                let d = &f * &t[row][j];
                cost[j] -= d;
            }
        }
        basis[row] = enter;
    }
    basis.iter().zip(&rhs).all(|(&j, v)| j < n || v.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn convex_combination_membership() {
        // Is (1/3, 1/3) a convex combination of the simplex vertices?
        let a = vec![vec![int(0), int(1), int(0)], vec![int(0), int(0), int(1)], vec![int(1), int(1), int(1)]];
        assert!(feasible(&a, &[rat(1, 3), rat(1, 3), int(1)]));
        assert!(!feasible(&a, &[rat(2, 3), rat(2, 3), int(1)]));
    }

    #[test]
    fn negative_rhs_and_degeneracy() {
        let a = vec![vec![int(-1), int(1)], vec![int(1), int(1)]];
        assert!(feasible(&a, &[int(-1), int(1)]));
        assert!(!feasible(&[vec![int(1), int(1)]], &[int(-1)]));
        assert!(feasible(&[vec![int(1), int(-1)]], &[int(0)]));
    }
}
