//! The determinant inequality behind the volume bounds, plus the Gaussian
//! transport maps used in its application.
//!
//! The core inequality: for unit vectors `w_i` with `Σ c_i w_i⊗w_i = I_d`
//! and positive scalars `t_i`,
//! `det(Σ c_i t_i w_i⊗w_i) >= exp(Σ c_i log t_i)`,
//! with equality when the `t_i` are constant on linearly independent
//! subsets — in particular when the `w_i` are orthonormal.
//!
//! The transport maps carry the exponential law to the Gaussian with density
//! `e^{-πs²}` (total mass 1) and back; their log-derivative identities are
//! exercised numerically by [`transport_identity_check`].

use crate::measures::LiftedMeasure;
use crate::report::InequalityReport;
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BbError {
    #[error("system is not isotropic: defect {0:.3e}")]
    NotIsotropic(f64),
    #[error("argument {0} outside the domain of the transport map")]
    DomainError(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// CDF and quantile functions of the Gaussian with density `e^{-πs²}`.
///
/// This normalization has total mass 1 with no `1/√(2π)` prefactor, so the
/// transport identities below are free of additive constants.
pub mod gauss {
    use statrs::function::erf;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    /// `Φ(x) = ∫_{-∞}^x e^{-πs²} ds = (1 + erf(√π·x))/2`.
    pub fn phi(x: f64) -> f64 {
        0.5 * (1.0 + erf::erf(SQRT_PI * x))
    }

    /// Upper tail `1 - Φ(x)`, computed via `erfc` so it stays accurate for
    /// large `x`.
    pub fn phi_c(x: f64) -> f64 {
        0.5 * erf::erfc(SQRT_PI * x)
    }

    /// Density `e^{-πx²}`.
    pub fn density(x: f64) -> f64 {
        (-std::f64::consts::PI * x * x).exp()
    }

    fn polish(mut x: f64, target: f64, tail: bool) -> f64 {
        // one or two Newton corrections push erf_inv's ~1e-9 accuracy down
        // to full double precision
        for _ in 0..2 {
            let d = density(x);
            if d <= 0.0 || !x.is_finite() {
                break;
            }
            let g = if tail { phi_c(x) - target } else { phi(x) - target };
            let step = if tail { g / d } else { -g / d };
            x += step;
            if step.abs() <= 1e-16 * (1.0 + x.abs()) {
                break;
            }
        }
        x
    }

    /// Quantile `Φ^{-1}(p)` for `p ∈ (0, 1)`.
    pub fn phi_inv(p: f64) -> f64 {
        assert!(p > 0.0 && p < 1.0, "quantile argument must lie in (0,1)");
        polish(erf::erf_inv(2.0 * p - 1.0) / SQRT_PI, p, false)
    }

    /// Tail quantile `Φ_c^{-1}(q)` for `q ∈ (0, 1)`; accurate for small `q`
    /// where `phi_inv(1 - q)` would lose digits.
    pub fn phi_c_inv(q: f64) -> f64 {
        assert!(q > 0.0 && q < 1.0, "quantile argument must lie in (0,1)");
        polish(erf::erfc_inv(2.0 * q) / SQRT_PI, q, true)
    }
}

/// Which direction the transport runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Exponential with mean `a` on `(0, ∞)` pushed to the Gaussian.
    Forward,
    /// Gaussian pushed to the exponential with rate `a`.
    Inverse,
}

/// Parameters of a transport map: the exponential parameter `a ∈ (0, 1]`
/// and the direction.
#[derive(Debug, Clone, Copy)]
pub struct TransportSpec {
    pub a: f64,
    pub direction: Direction,
}

impl TransportSpec {
    pub fn new(a: f64, direction: Direction) -> Result<Self, BbError> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(BbError::Invalid(format!(
                "exponential parameter {a} outside (0, 1]"
            )));
        }
        Ok(TransportSpec { a, direction })
    }
}

/// Evaluates the transport map.
///
/// Forward: `T(t) = Φ^{-1}(1 - e^{-t/a})` for `t > 0`.
/// Inverse: `T̂(t) = -(1/a)·log(Φ_c(t))` for all real `t`.
pub fn transport_eval(spec: &TransportSpec, t: f64) -> Result<f64, BbError> {
    match spec.direction {
        Direction::Forward => {
            if !(t > 0.0) {
                return Err(BbError::DomainError(t));
            }
            // 1 - e^{-t/a} near 1 for large t: route through the tail
            Ok(gauss::phi_c_inv((-t / spec.a).exp()))
        }
        Direction::Inverse => {
            if !t.is_finite() {
                return Err(BbError::DomainError(t));
            }
            Ok(-gauss::phi_c(t).ln() / spec.a)
        }
    }
}

/// Maximum residual of the log-derivative identities over the sample points,
/// with `T'` taken by central differences (step `1e-6`).
///
/// Forward: `log T'(t) - π·T(t)² = -log a - t/a`.
/// Inverse: `log T̂'(t) = a·T̂(t) - π·t² - log a`.
pub fn transport_identity_check(spec: &TransportSpec, ts: &[f64]) -> Result<f64, BbError> {
    const H: f64 = 1e-6;
    let mut worst = 0.0f64;
    for &t in ts {
        let d = (transport_eval(spec, t + H)? - transport_eval(spec, t - H)?) / (2.0 * H);
        if !(d > 0.0) {
            return Err(BbError::Invalid(format!(
                "non-increasing transport at t = {t}"
            )));
        }
        let log_d = d.ln();
        let residual = match spec.direction {
            Direction::Forward => {
                let tt = transport_eval(spec, t)?;
                log_d - std::f64::consts::PI * tt * tt - (-spec.a.ln() - t / spec.a)
            }
            Direction::Inverse => {
                let tt = transport_eval(spec, t)?;
                log_d - (spec.a * tt - std::f64::consts::PI * t * t - spec.a.ln())
            }
        };
        worst = worst.max(residual.abs());
    }
    Ok(worst)
}

/// The determinant inequality on raw data: `lhs = det Σ c_i t_i w_i⊗w_i`,
/// `rhs = exp Σ c_i log t_i`; requires `Σ c_i w_i⊗w_i = I` within `iso_tol`
/// and positive `t_i`.
pub fn bb_report(
    points: &[nalgebra::DVector<f64>],
    weights: &[f64],
    t: &[f64],
    iso_tol: f64,
    eq_tol: f64,
) -> Result<InequalityReport, BbError> {
    if points.len() != weights.len() || points.len() != t.len() || points.is_empty() {
        return Err(BbError::Invalid(format!(
            "mismatched lengths: {} points, {} weights, {} scalars",
            points.len(),
            weights.len(),
            t.len()
        )));
    }
    if let Some(&bad) = t.iter().find(|&&ti| !(ti > 0.0)) {
        return Err(BbError::Invalid(format!("nonpositive scalar {bad}")));
    }
    let d = points[0].len();
    let mut iso = DMatrix::zeros(d, d);
    let mut weighted = DMatrix::zeros(d, d);
    let mut log_sum = 0.0;
    for ((w, &c), &ti) in points.iter().zip(weights).zip(t) {
        let outer = w * w.transpose() * c;
        weighted += &outer * ti;
        iso += outer;
        log_sum += c * ti.ln();
    }
    let defect = (&iso - DMatrix::identity(d, d)).norm();
    if defect > iso_tol {
        return Err(BbError::NotIsotropic(defect));
    }
    let lhs = weighted.determinant();
    let rhs = log_sum.exp();
    Ok(
        InequalityReport::lower("ball_barthe_det", lhs, rhs, eq_tol)
            .with_meta("dim", d as f64)
            .with_meta("support_size", points.len() as f64),
    )
}

/// [`bb_report`] applied to a lifted measure.
pub fn bb_report_lifted(
    lm: &LiftedMeasure,
    t: &[f64],
    iso_tol: f64,
    eq_tol: f64,
) -> Result<InequalityReport, BbError> {
    bb_report(lm.points(), lm.weights(), t, iso_tol, eq_tol)
}

/// The concavity step on the last coordinate of a lifted measure:
/// `exp((1/(n+1)) Σ c̄_i log (w_i·e_{n+1})²) <= 1/(n+1)`,
/// with equality exactly when the last coordinate is constant on the
/// support, i.e. when the weight values were constant before lifting.
pub fn lifted_trace_logcheck(lm: &LiftedMeasure, eq_tol: f64) -> Result<InequalityReport, BbError> {
    let d = lm.dim();
    let defect = lm.isotropy_defect();
    if defect > 1e-6 {
        return Err(BbError::NotIsotropic(defect));
    }
    let mut log_sum = 0.0;
    for (w, &c) in lm.points().iter().zip(lm.weights()) {
        let last = w[d - 1];
        if last == 0.0 {
            return Err(BbError::Invalid(
                "lifted point orthogonal to the last axis".into(),
            ));
        }
        log_sum += c * (last * last).ln();
    }
    let lhs = (log_sum / d as f64).exp();
    let rhs = 1.0 / d as f64;
    Ok(InequalityReport::upper("lifted_last_coordinate", lhs, rhs, eq_tol)
        .with_meta("dim", d as f64)
        .with_meta("support_size", lm.points().len() as f64))
}
