//! Damped Newton minimizer with finite-difference derivatives.
//!
//! The ellipsoid solvers are barrier formulations over at most ~20 variables,
//! so central-difference gradients and Hessians are affordable and keep the
//! objective code free of hand-written derivatives. Objectives return
//! `f64::INFINITY` outside their domain; the line search backtracks into it.

use nalgebra::{DMatrix, DVector};

pub(crate) struct NewtonOptions {
    pub max_iter: usize,
    pub grad_tol: f64,
    pub step_tol: f64,
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 500,
            grad_tol: 1e-10,
            step_tol: 1e-13,
            fd_step: 1e-5,
        }
    }
}

fn gradient<F: Fn(&DVector<f64>) -> f64>(f: &F, x: &DVector<f64>, h: f64) -> DVector<f64> {
    let n = x.len();
    let mut g = DVector::zeros(n);
    let mut xp = x.clone();
    for i in 0..n {
        let hi = h * (1.0 + x[i].abs());
        xp[i] = x[i] + hi;
        let fp = f(&xp);
        xp[i] = x[i] - hi;
        let fm = f(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * hi);
    }
    g
}

fn hessian<F: Fn(&DVector<f64>) -> f64>(f: &F, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let n = x.len();
    let f0 = f(x);
    let mut hess = DMatrix::zeros(n, n);
    let steps: Vec<f64> = (0..n).map(|i| h * (1.0 + x[i].abs())).collect();
    let mut xp = x.clone();
    // diagonal
    for i in 0..n {
        xp[i] = x[i] + steps[i];
        let fp = f(&xp);
        xp[i] = x[i] - steps[i];
        let fm = f(&xp);
        xp[i] = x[i];
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (steps[i] * steps[i]);
    }
    // off-diagonal
    for i in 0..n {
        for j in (i + 1)..n {
            xp[i] = x[i] + steps[i];
            xp[j] = x[j] + steps[j];
            let fpp = f(&xp);
            xp[j] = x[j] - steps[j];
            let fpm = f(&xp);
            xp[i] = x[i] - steps[i];
            let fmm = f(&xp);
            xp[j] = x[j] + steps[j];
            let fmp = f(&xp);
            xp[i] = x[i];
            xp[j] = x[j];
            let v = (fpp - fpm - fmp + fmm) / (4.0 * steps[i] * steps[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// Minimizes `f` from `x0`. Hessian is regularized until positive definite;
/// steps are backtracked until they decrease `f`.
pub(crate) fn minimize<F: Fn(&DVector<f64>) -> f64>(
    f: F,
    x0: DVector<f64>,
    opts: &NewtonOptions,
) -> DVector<f64> {
    let mut x = x0;
    let mut fx = f(&x);
    assert!(fx.is_finite(), "minimize: infeasible starting point");

    for _ in 0..opts.max_iter {
        let g = gradient(&f, &x, opts.fd_step);
        if g.amax() <= opts.grad_tol * (1.0 + fx.abs()) {
            break;
        }
        let h = hessian(&f, &x, opts.fd_step);
        let scale = h.amax().max(1.0);
        let mut lambda = 1e-12 * scale;
        let dir = loop {
            let reg = &h + DMatrix::identity(x.len(), x.len()) * lambda;
            if let Some(ch) = reg.cholesky() {
                let d = ch.solve(&(-&g));
                if d.iter().all(|v| v.is_finite()) {
                    break d;
                }
            }
            lambda *= 10.0;
            if lambda > 1e12 * scale {
                break -g.clone() / scale;
            }
        };

        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..60 {
            let cand = &x + &dir * t;
            let fc = f(&cand);
            if fc.is_finite() && fc < fx - 1e-16 * fx.abs() {
                x = cand;
                fx = fc;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved || dir.amax() * t <= opts.step_tol * (1.0 + x.amax()) {
            break;
        }
    }
    x
}

/// Newton's method with caller-supplied gradient and Hessian, for objectives
/// whose derivatives are available in closed form. Either callback may return
/// `None` outside its domain, which terminates the iteration.
pub(crate) fn minimize_newton<F, G, H>(
    f: F,
    grad: G,
    hess: H,
    x0: DVector<f64>,
    opts: &NewtonOptions,
) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> Option<DVector<f64>>,
    H: Fn(&DVector<f64>) -> Option<DMatrix<f64>>,
{
    let n = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    assert!(fx.is_finite(), "minimize_newton: infeasible start");

    for _ in 0..opts.max_iter {
        let Some(g) = grad(&x) else { break };
        if g.amax() <= opts.grad_tol * (1.0 + fx.abs()) {
            break;
        }
        let Some(h) = hess(&x) else { break };
        let scale = h.amax().max(1.0);
        let mut lambda = 0.0;
        let dir = loop {
            let reg = &h + DMatrix::identity(n, n) * lambda;
            if let Some(ch) = reg.cholesky() {
                let d = ch.solve(&(-&g));
                if d.iter().all(|v| v.is_finite()) {
                    break d;
                }
            }
            lambda = if lambda == 0.0 { 1e-12 * scale } else { lambda * 10.0 };
            if lambda > 1e12 * scale {
                break -g.clone() / scale;
            }
        };

        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..60 {
            let cand = &x + &dir * t;
            let fc = f(&cand);
            if fc.is_finite() && fc < fx {
                x = cand;
                fx = fc;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved || dir.amax() * t <= opts.step_tol * (1.0 + x.amax()) {
            break;
        }
    }
    x
}
