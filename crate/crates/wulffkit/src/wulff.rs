//! Wulff shapes, displacement, and the sharp volume inequality evaluators.
//!
//! The shape determined by a discrete measure and positive weight values is
//! the half-space intersection `{x : x·u_i <= f_i}`. With an isotropic
//! f-centered measure it is a convex body, its volume is bounded above in
//! terms of the displacement and `‖f‖_{L²(ν)}`, and the volume of its polar
//! is bounded below; the regular simplex with constant f is the only
//! equality case. The even (origin-symmetric) versions have the cube as the
//! extremal configuration.

use crate::geom_core::{
    factorial, halfspace_to_vertices, polar_v_to_h, GeomError, HPolytope, Halfspace, VPolytope,
};
use crate::measures::{DiscreteMeasure, MeasureError, WeightFn, DEFAULT_TOL};
use crate::report::InequalityReport;
use nalgebra::DVector;
use thiserror::Error;

/// Relative tolerance for equality-case flags: sits between double-precision
/// geometry error and the generator residual.
pub const EQ_TOL: f64 = 1e-7;

/// Displacements below this are treated as zero when invoking the
/// displacement-free bound; larger ones route to the refined bound.
pub const DISP_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum WulffError {
    #[error("measure is not isotropic: defect {0:.3e}")]
    NotIsotropic(f64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("displacement {0:.3e} is not zero; use the refined bound")]
    DisplacementNotZero(f64),
    #[error("measure or weight function is not even")]
    NotEven,
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// A Wulff shape together with the data that determined it.
#[derive(Debug, Clone)]
pub struct WulffShape {
    measure: DiscreteMeasure,
    f: WeightFn,
    body: HPolytope,
    vbody: VPolytope,
}

impl WulffShape {
    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn f(&self) -> &WeightFn {
        &self.f
    }

    pub fn body(&self) -> &HPolytope {
        &self.body
    }

    pub fn vbody(&self) -> &VPolytope {
        &self.vbody
    }

    pub fn volume(&self) -> Result<f64, WulffError> {
        Ok(self.vbody.volume()?)
    }

    /// `disp W = cd(W) · Σ c_i u_i/f_i`.
    pub fn displacement(&self) -> Result<f64, WulffError> {
        let centroid = self.vbody.centroid()?;
        Ok(centroid.dot(&self.moment_direction()))
    }

    /// `Σ c_i u_i/f_i`, the direction the centroid is paired with.
    pub fn moment_direction(&self) -> DVector<f64> {
        let mut s = DVector::zeros(self.measure.dim());
        for ((u, &c), &fv) in self
            .measure
            .points()
            .iter()
            .zip(self.measure.weights())
            .zip(self.f.values())
        {
            s += u * (c / fv);
        }
        s
    }
}

/// Builds the Wulff shape `{x : x·u_i <= f_i}`; the isotropy requirement
/// guarantees boundedness.
pub fn build_wulff(m: &DiscreteMeasure, f: &WeightFn) -> Result<WulffShape, WulffError> {
    let defect = m.isotropy_defect();
    if defect > DEFAULT_TOL {
        return Err(WulffError::NotIsotropic(defect));
    }
    if f.len() != m.len() {
        return Err(MeasureError::AlignmentError {
            got: f.len(),
            want: m.len(),
        }
        .into());
    }
    let halfspaces = m
        .points()
        .iter()
        .zip(f.values())
        .map(|(u, &fv)| Halfspace {
            normal: u.clone(),
            offset: fv,
        })
        .collect();
    let body = HPolytope::new(m.dim(), halfspaces)?;
    let vbody = halfspace_to_vertices(&body)?;
    Ok(WulffShape {
        measure: m.clone(),
        f: f.clone(),
        body,
        vbody,
    })
}

/// The polar Wulff shape via its direct representation `conv{u_i/f_i}`.
/// Coincides with the polar of the half-space body.
pub fn polar_wulff(m: &DiscreteMeasure, f: &WeightFn) -> Result<VPolytope, WulffError> {
    let defect = m.isotropy_defect();
    if defect > DEFAULT_TOL {
        return Err(WulffError::NotIsotropic(defect));
    }
    if f.len() != m.len() {
        return Err(MeasureError::AlignmentError {
            got: f.len(),
            want: m.len(),
        }
        .into());
    }
    let points: Vec<DVector<f64>> = m
        .points()
        .iter()
        .zip(f.values())
        .map(|(u, &fv)| u / fv)
        .collect();
    Ok(VPolytope::new(m.dim(), points)?)
}

fn check_hypotheses(m: &DiscreteMeasure, f: &WeightFn) -> Result<(), WulffError> {
    let iso = m.isotropy_defect();
    if iso > DEFAULT_TOL {
        return Err(WulffError::HypothesisViolated(format!(
            "isotropy defect {iso:.3e}"
        )));
    }
    let cen = m.f_center_defect(f)?;
    if cen > DEFAULT_TOL {
        return Err(WulffError::HypothesisViolated(format!(
            "f-centering defect {cen:.3e}"
        )));
    }
    Ok(())
}

/// Right side of the refined volume bound:
/// `(n+1−disp)^{n+1} / (n!(n+1)^{(n+1)/2}) · ‖f‖ⁿ`.
///
/// The displacement-free bound is this expression at `disp = 0`; both
/// evaluators share this code path so the two agree bit-for-bit.
fn refined_rhs(n: usize, disp: f64, f_norm: f64) -> f64 {
    let np1 = (n + 1) as f64;
    (np1 - disp).powi(n as i32 + 1) / (factorial(n) * np1.powf(np1 / 2.0)) * f_norm.powi(n as i32)
}

fn base_meta(r: InequalityReport, m: &DiscreteMeasure, f: &WeightFn) -> InequalityReport {
    let f_norm = f.l2_norm(m).unwrap_or(f64::NAN);
    r.with_meta("n", m.dim() as f64)
        .with_meta("support_size", m.len() as f64)
        .with_meta("f_norm", f_norm)
}

/// Refined upper volume bound with the displacement correction.
pub fn wulff_volume_refined_report(
    m: &DiscreteMeasure,
    f: &WeightFn,
    eq_tol: f64,
) -> Result<InequalityReport, WulffError> {
    check_hypotheses(m, f)?;
    let shape = build_wulff(m, f)?;
    let lhs = shape.volume()?;
    let disp = shape.displacement()?;
    assert!(
        disp <= m.dim() as f64 + 1e-7,
        "displacement {disp} exceeds the dimension bound"
    );
    let f_norm = f.l2_norm(m)?;
    let rhs = refined_rhs(m.dim(), disp, f_norm);
    Ok(base_meta(
        InequalityReport::upper("wulff_volume_refined", lhs, rhs, eq_tol),
        m,
        f,
    )
    .with_meta("disp", disp))
}

/// Displacement-free upper volume bound `V(W) <= (n+1)^{(n+1)/2}/n!·‖f‖ⁿ`;
/// only valid when the displacement vanishes.
pub fn wulff_volume_report(
    m: &DiscreteMeasure,
    f: &WeightFn,
    eq_tol: f64,
) -> Result<InequalityReport, WulffError> {
    check_hypotheses(m, f)?;
    let shape = build_wulff(m, f)?;
    let disp = shape.displacement()?;
    if disp.abs() > DISP_TOL {
        return Err(WulffError::DisplacementNotZero(disp));
    }
    let lhs = shape.volume()?;
    let rhs = refined_rhs(m.dim(), 0.0, f.l2_norm(m)?);
    Ok(base_meta(
        InequalityReport::upper("wulff_volume", lhs, rhs, eq_tol),
        m,
        f,
    )
    .with_meta("disp", disp))
}

/// Lower volume bound for the polar Wulff shape,
/// `V(W*) >= (n+1)^{(n+1)/2}/n!·‖f‖^{-n}`. Displacement-independent.
pub fn polar_wulff_volume_report(
    m: &DiscreteMeasure,
    f: &WeightFn,
    eq_tol: f64,
) -> Result<InequalityReport, WulffError> {
    check_hypotheses(m, f)?;
    let polar = polar_wulff(m, f)?;
    let lhs = polar.volume()?;
    let n = m.dim();
    let np1 = (n + 1) as f64;
    let f_norm = f.l2_norm(m)?;
    let rhs = np1.powf(np1 / 2.0) / factorial(n) * f_norm.powi(-(n as i32));
    Ok(base_meta(
        InequalityReport::lower("polar_wulff_volume", lhs, rhs, eq_tol),
        m,
        f,
    ))
}

fn check_even(m: &DiscreteMeasure, f: &WeightFn) -> Result<(), WulffError> {
    if f.len() != m.len() {
        return Err(MeasureError::AlignmentError {
            got: f.len(),
            want: m.len(),
        }
        .into());
    }
    // support closed under negation with matching weights and f values
    let even = m.points().iter().enumerate().all(|(i, u)| {
        m.points().iter().enumerate().any(|(j, v)| {
            (u + v).norm() <= 1e-9
                && (m.weights()[i] - m.weights()[j]).abs() <= 1e-9
                && (f.values()[i] - f.values()[j]).abs() <= 1e-9
        })
    });
    if even {
        Ok(())
    } else {
        Err(WulffError::NotEven)
    }
}

/// Even-case upper volume bound `V(W) <= (2/√n)ⁿ·‖f‖ⁿ`.
pub fn even_wulff_volume_report(
    m: &DiscreteMeasure,
    f: &WeightFn,
    eq_tol: f64,
) -> Result<InequalityReport, WulffError> {
    check_even(m, f)?;
    check_hypotheses(m, f)?;
    let shape = build_wulff(m, f)?;
    let lhs = shape.volume()?;
    let n = m.dim();
    let rhs = (2.0 / (n as f64).sqrt()).powi(n as i32) * f.l2_norm(m)?.powi(n as i32);
    Ok(base_meta(
        InequalityReport::upper("even_wulff_volume", lhs, rhs, eq_tol),
        m,
        f,
    ))
}

/// Even-case lower bound for the polar, `V(W*) >= (2√n)ⁿ/n!·‖f‖^{-n}`.
pub fn even_polar_wulff_volume_report(
    m: &DiscreteMeasure,
    f: &WeightFn,
    eq_tol: f64,
) -> Result<InequalityReport, WulffError> {
    check_even(m, f)?;
    check_hypotheses(m, f)?;
    let polar = polar_wulff(m, f)?;
    let lhs = polar.volume()?;
    let n = m.dim();
    let rhs =
        (2.0 * (n as f64).sqrt()).powi(n as i32) / factorial(n) * f.l2_norm(m)?.powi(-(n as i32));
    Ok(base_meta(
        InequalityReport::lower("even_polar_wulff_volume", lhs, rhs, eq_tol),
        m,
        f,
    ))
}

/// Structural extremal-configuration flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtremalFlags {
    /// Support is the vertex set of a regular simplex inscribed in the sphere.
    pub is_simplex_extremal: bool,
    /// Support is `±{orthonormal basis}` (a cube inscribed in the sphere).
    pub is_cube_extremal: bool,
    pub f_constant_on_support: bool,
}

/// Detects the extremal support configurations within a relative tolerance
/// of 1e-7.
pub fn equality_case_detect(m: &DiscreteMeasure, f: &WeightFn) -> ExtremalFlags {
    const TOL: f64 = 1e-7;
    let n = m.dim();

    let is_simplex = m.len() == n + 1
        && (0..m.len()).all(|i| {
            ((i + 1)..m.len())
                .all(|j| (m.points()[i].dot(&m.points()[j]) + 1.0 / n as f64).abs() <= TOL)
        });

    let is_cube = m.len() == 2 * n && {
        // pair each point with its negation, then the representatives must be
        // pairwise orthogonal
        let mut reps: Vec<&DVector<f64>> = Vec::new();
        let mut paired = vec![false; m.len()];
        let mut ok = true;
        for i in 0..m.len() {
            if paired[i] {
                continue;
            }
            match (i + 1..m.len())
                .find(|&j| !paired[j] && (&m.points()[i] + &m.points()[j]).norm() <= TOL)
            {
                Some(j) => {
                    paired[i] = true;
                    paired[j] = true;
                    reps.push(&m.points()[i]);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        ok && reps.len() == n
            && (0..n).all(|i| ((i + 1)..n).all(|j| reps[i].dot(reps[j]).abs() <= TOL))
    };

    let values = f.values();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    ExtremalFlags {
        is_simplex_extremal: is_simplex,
        is_cube_extremal: is_cube,
        f_constant_on_support: spread <= TOL * mean,
    }
}

/// Canonical agreement of the two polar routes: `conv{u_i/f_i}` against the
/// polar of the half-space body.
pub fn polar_paths_agree(m: &DiscreteMeasure, f: &WeightFn, tol: f64) -> Result<bool, WulffError> {
    let direct = polar_wulff(m, f)?;
    let shape = build_wulff(m, f)?;
    let via_polar = crate::geom_core::polar_h_to_v(shape.body())?;
    let _ = polar_v_to_h(&direct)?; // also exercises the reverse direction
    Ok(direct.approx_eq(&via_polar, tol))
}
