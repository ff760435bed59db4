//! Dense two-phase simplex, phase one only: finds `x ≥ 0` with `A x = b`
//! or reports the optimal phase-one objective when none exists.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// A basic feasible solution.
    Feasible { x: Vec<f64> },
    /// Optimal phase-one objective: the smallest total of the artificial
    /// variables, zero iff the system is feasible.
    Infeasible { residual: f64 },
}

/// Solves the phase-one problem for `a` (row-major, `m × n`) and `b`.
///
/// `tol` decides when the phase-one optimum counts as zero. The returned
/// solution is checked against the original constraints; a residual above
/// `10·tol` is reported as [`Error::Solver`].
pub fn find_feasible(a: &[Vec<f64>], b: &[f64], tol: f64) -> Result<Feasibility> {
    let m = a.len();
    if m != b.len() {
        return Err(Error::Solver(format!("{m} rows but {} right-hand sides", b.len())));
    }
    let n = a.first().map_or(0, Vec::len);
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::Solver("ragged constraint matrix".into()));
    }

    // columns: n originals, m artificials, then rhs
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = sign * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // reduced costs of the phase-one objective Σ artificials
    let mut reduced = vec![0.0; width];
    for row in &t {
        for j in 0..n {
            reduced[j] -= row[j];
        }
        reduced[width - 1] -= row[width - 1];
    }

    let max_iters = 50 * (n + m).max(10);
    let mut iters = 0;
    loop {
        // Dantzig's rule, first index on ties
        let entering = (0..n + m)
            .filter(|&j| reduced[j] < -PIVOT_EPS)
            .min_by(|&p, &q| reduced[p].total_cmp(&reduced[q]));
        let Some(col) = entering else { break };

        let mut leaving: Option<(usize, f64)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[col] > PIVOT_EPS {
                let ratio = row[width - 1] / row[col];
                let better = match leaving {
                    None => true,
                    Some((k, r)) => ratio < r - PIVOT_EPS || (ratio <= r + PIVOT_EPS && basis[i] < basis[k]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leaving else {
            return Err(Error::Solver("phase-one objective unbounded".into()));
        };
        pivot(&mut t, &mut reduced, row, col);
        basis[row] = col;

        iters += 1;
        if iters > max_iters {
            return Err(Error::Solver(format!("no convergence after {max_iters} pivots")));
        }
    }

    let objective = -reduced[width - 1];
    if !objective.is_finite() {
        return Err(Error::Solver("non-finite phase-one objective".into()));
    }
    if objective > tol {
        return Ok(Feasibility::Infeasible { residual: objective });
    }

    let mut x = vec![0.0; n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[i][width - 1].max(0.0);
        }
    }
    let worst = a
        .iter()
        .zip(b)
        .map(|(row, bi)| (row.iter().zip(&x).map(|(aij, xj)| aij * xj).sum::<f64>() - bi).abs())
        .fold(0.0, f64::max);
    if worst > 10.0 * tol {
        return Err(Error::Solver(format!("solution residual {worst:e} exceeds tolerance")));
    }
    Ok(Feasibility::Feasible { x })
}

fn pivot(t: &mut [Vec<f64>], reduced: &mut [f64], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
    let f = reduced[col];
    for (v, pv) in reduced.iter_mut().zip(&pivot_row) {
        *v -= f * pv;
    }
}
