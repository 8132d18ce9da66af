//! Phase-I simplex for small feasibility problems `G x >= h` with `x` free.
//!
//! Dense tableau, Bland's rule for both entering and leaving variables, so the
//! pivot sequence is deterministic and cannot cycle.

use nalgebra::{DMatrix, DVector};

const EPS: f64 = 1e-11;

/// Returns some `x` with `G x >= h`, or `None` if the system is infeasible.
pub fn find_feasible(g: &DMatrix<f64>, h: &DVector<f64>) -> Option<DVector<f64>> {
    let m = g.nrows();
    let k = g.ncols();
    // columns: x+ (k), x- (k), surplus (m), artificial (m), rhs
    let cols = 2 * k + 2 * m;
    let mut t = DMatrix::<f64>::zeros(m + 1, cols + 1);
    for i in 0..m {
        let sign = if h[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..k {
            t[(i, j)] = sign * g[(i, j)];
            t[(i, k + j)] = -sign * g[(i, j)];
        }
        t[(i, 2 * k + i)] = -sign;
        t[(i, 2 * k + m + i)] = 1.0;
        t[(i, cols)] = sign * h[i];
    }
    // objective row: minimize the sum of artificials, expressed in nonbasics
    for j in 0..=cols {
        let s: f64 = (0..m).map(|i| t[(i, j)]).sum();
        t[(m, j)] = if (2 * k + m..cols).contains(&j) { 0.0 } else { -s };
    }
    let mut basis: Vec<usize> = (0..m).map(|i| 2 * k + m + i).collect();

    for _ in 0..10_000 {
        let Some(enter) = (0..cols).find(|&j| t[(m, j)] < -EPS) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let a = t[(i, enter)];
            if a > EPS {
                let ratio = t[(i, cols)] / a;
                let better = ratio < best - EPS
                    || (ratio <= best + EPS && leave.is_some_and(|l| basis[i] < basis[l]));
                if leave.is_none() || better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            // unbounded phase-I objective cannot happen; bail out
            return None;
        };
        pivot(&mut t, r, enter);
        basis[r] = enter;
    }
    if -t[(m, cols)] > 1e-9 {
        return None;
    }
    let mut x = DVector::zeros(k);
    for (i, &b) in basis.iter().enumerate() {
        if b < k {
            x[b] += t[(i, cols)];
        } else if b < 2 * k {
            x[b - k] -= t[(i, cols)];
        }
    }
    Some(x)
}

fn pivot(t: &mut DMatrix<f64>, r: usize, c: usize) {
    let p = t[(r, c)];
    let width = t.ncols();
    for j in 0..width {
        t[(r, j)] /= p;
    }
    for i in 0..t.nrows() {
        if i != r {
            let f = t[(i, c)];
            if f != 0.0 {
                for j in 0..width {
                    let v = t[(r, j)];
                    t[(i, j)] -= f * v;
                }
            }
        }
    }
}
