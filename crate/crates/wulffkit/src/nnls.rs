//! Lawson–Hanson nonnegative least squares.
//!
//! Small dense problems only (tens of variables); the passive-set subproblems
//! are solved by SVD. Used for the random isotropic-measure generator and the
//! John contact-point certificate.

use nalgebra::{DMatrix, DVector};

/// Minimizes `‖Ax - b‖` subject to `x >= 0`.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-12 * a.amax().max(1.0) * b.amax().max(1.0);
    let max_outer = 3 * n.max(10);

    for _ in 0..max_outer {
        let residual = b - a * &x;
        let w = a.transpose() * residual;
        // most negative gradient among the active (zero) coordinates
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if !passive[j] && w[j] > tol && best.map_or(true, |(_, bw)| w[j] > bw) {
                best = Some((j, w[j]));
            }
        }
        let Some((j, _)) = best else { break };
        passive[j] = true;

        loop {
            let z = solve_passive(a, b, &passive);
            let feasible = (0..n).all(|k| !passive[k] || z[k] > tol);
            if feasible {
                x = z;
                break;
            }
            // step toward z until the first passive coordinate hits zero
            let mut alpha = 1.0f64;
            for k in 0..n {
                if passive[k] && z[k] <= tol && x[k] > z[k] {
                    alpha = alpha.min(x[k] / (x[k] - z[k]));
                }
            }
            x = &x + (z - &x) * alpha;
            for k in 0..n {
                if passive[k] && x[k] <= tol {
                    passive[k] = false;
                    x[k] = 0.0;
                }
            }
        }
    }
    x
}

fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..a.ncols()).filter(|&j| passive[j]).collect();
    if cols.is_empty() {
        return DVector::zeros(a.ncols());
    }
    let sub = DMatrix::from_fn(a.nrows(), cols.len(), |r, c| a[(r, cols[c])]);
    let sol = sub
        .svd(true, true)
        .solve(b, 1e-13)
        .expect("SVD solve cannot fail with computed factors");
    let mut z = DVector::zeros(a.ncols());
    for (c, &j) in cols.iter().enumerate() {
        z[j] = sol[c];
    }
    z
}
