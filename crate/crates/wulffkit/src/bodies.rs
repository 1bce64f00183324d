//! Convex-body machinery: L_p surface measures and mixed volumes, the
//! John/Loewner/L_p John ellipsoid family with position certificates, and
//! the volume-ratio corollary evaluators.
//!
//! Ellipsoid solvers avoid barrier methods entirely. The centered inscribed
//! ellipsoid of `{x : x·u_j <= β_j}` is, by polarity, the inverse of the
//! minimum-volume enclosing ellipsoid of the points `u_j/β_j`, which is a
//! determinant-maximization over the weight simplex solved by Frank–Wolfe
//! steps with away steps. The free-center John ellipsoid runs a Newton
//! iteration on the center with an envelope-theorem gradient.

use crate::geom_core::{
    factorial, halfspace_to_vertices, polar_h_to_v, surface_area_measure, unit_ball_volume,
    vertices_to_halfspaces, Ellipsoid, FacetData, GeomError, HPolytope, Halfspace, VPolytope,
};
use crate::measures::{DiscreteMeasure, MeasureError};
use crate::nnls::nnls;
use crate::optim::{minimize, minimize_newton, NewtonOptions};
use crate::report::InequalityReport;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use thiserror::Error;

/// Frank–Wolfe stopping tolerance for the ellipsoid design problems.
const DESIGN_EPS: f64 = 1e-10;
const DESIGN_MAX_ITER: usize = 300_000;

#[derive(Debug, Error)]
pub enum BodyError {
    #[error("ellipsoid solver failed: {0}")]
    SolverFailure(String),
    #[error("second-moment matrix is singular")]
    SingularM,
    #[error("body is not in John position: {0}")]
    NotInJohnPosition(String),
    #[error("centroid has norm {0:.3e}; translate the body first")]
    CentroidNotAtOrigin(f64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Anything with a support function; lets the mixed volume accept bodies and
/// ellipsoids uniformly.
pub trait Support {
    fn support_value(&self, u: &DVector<f64>) -> f64;
}

impl Support for Ellipsoid {
    fn support_value(&self, u: &DVector<f64>) -> f64 {
        self.support(u)
    }
}

impl Support for VPolytope {
    fn support_value(&self, u: &DVector<f64>) -> f64 {
        self.support(u)
    }
}

/// A convex body with the origin interior, kept in both representations
/// along with its facet decomposition.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    vbody: VPolytope,
    hbody: HPolytope,
    facets: Vec<FacetData>,
}

impl Support for ConvexBody {
    fn support_value(&self, u: &DVector<f64>) -> f64 {
        self.vbody.support(u)
    }
}

impl ConvexBody {
    pub fn from_points(dim: usize, points: Vec<DVector<f64>>) -> Result<Self, BodyError> {
        Self::from_vpolytope(VPolytope::new(dim, points)?)
    }

    pub fn from_vpolytope(vbody: VPolytope) -> Result<Self, BodyError> {
        // vertices_to_halfspaces rejects bodies without the origin interior
        let hbody = vertices_to_halfspaces(&vbody)?;
        let facets = surface_area_measure(&vbody)?;
        Ok(ConvexBody {
            vbody,
            hbody,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.vbody.dim()
    }

    pub fn vbody(&self) -> &VPolytope {
        &self.vbody
    }

    pub fn hbody(&self) -> &HPolytope {
        &self.hbody
    }

    pub fn facets(&self) -> &[FacetData] {
        &self.facets
    }

    pub fn volume(&self) -> Result<f64, BodyError> {
        Ok(self.vbody.volume()?)
    }

    pub fn centroid(&self) -> Result<DVector<f64>, BodyError> {
        Ok(self.vbody.centroid()?)
    }

    pub fn polar(&self) -> Result<ConvexBody, BodyError> {
        Self::from_vpolytope(polar_h_to_v(&self.hbody)?)
    }

    pub fn translate(&self, t: &DVector<f64>) -> Result<ConvexBody, BodyError> {
        let pts = self.vbody.vertices().iter().map(|v| v + t).collect();
        Self::from_points(self.dim(), pts)
    }

    pub fn linear_image(&self, t: &DMatrix<f64>) -> Result<ConvexBody, BodyError> {
        let pts = self.vbody.vertices().iter().map(|v| t * v).collect();
        Self::from_points(self.dim(), pts)
    }

    /// Translate so the centroid lands on the origin.
    pub fn centered(&self) -> Result<ConvexBody, BodyError> {
        let c = self.centroid()?;
        self.translate(&(-c))
    }

    pub fn is_origin_symmetric(&self, tol: f64) -> bool {
        let vs = self.vbody.vertices();
        vs.iter()
            .all(|v| vs.iter().any(|w| (v + w).norm() <= tol))
    }
}

/// The reweighted surface measure `dS_p = h^{1-p} dS` of a body.
#[derive(Debug, Clone)]
pub struct SpMeasure {
    pub p: f64,
    /// `(normal, h^{1-p}·area)` per facet.
    pub entries: Vec<(DVector<f64>, f64)>,
}

pub fn sp_measure(k: &ConvexBody, p: f64) -> SpMeasure {
    assert!(p >= 1.0, "exponent must be at least 1");
    let entries = k
        .facets
        .iter()
        .map(|f| (f.normal.clone(), f.support.powf(1.0 - p) * f.area))
        .collect();
    SpMeasure { p, entries }
}

/// `V_p(K, L) = (1/n) Σ h(L,u_j)^p h(K,u_j)^{1-p} S_j`; reduces to `V(K)`
/// at `L = K`.
pub fn vp_mixed_volume<L: Support>(k: &ConvexBody, l: &L, p: f64) -> f64 {
    assert!(p >= 1.0, "exponent must be at least 1");
    let n = k.dim() as f64;
    k.facets
        .iter()
        .map(|f| l.support_value(&f.normal).powf(p) * f.support.powf(1.0 - p) * f.area)
        .sum::<f64>()
        / n
}

/// The half-space intersection built from the facet data of `K` with its own
/// support values regenerates `K`; the `S_p` reweighting never moves a
/// half-space, so this holds for every `p`.
pub fn wulff_reconstruction_check(k: &ConvexBody, p: f64) -> Result<bool, BodyError> {
    let sp = sp_measure(k, p);
    let halfspaces = sp
        .entries
        .iter()
        .zip(&k.facets)
        .map(|((normal, _), f)| Halfspace {
            normal: normal.clone(),
            offset: f.support,
        })
        .collect();
    let rebuilt = halfspace_to_vertices(&HPolytope::new(k.dim(), halfspaces)?)?;
    Ok(rebuilt.approx_eq(&k.vbody, 1e-9))
}

/// Solves the determinant maximization `max log det Σ λ_i q_i q_iᵀ` over the
/// weight simplex — the optimal-design dual of the minimum-volume enclosing
/// ellipsoid. Each iteration moves mass from the support point with the
/// smallest leverage `κ_i = q_iᵀ M⁻¹ q_i` to the point with the largest,
/// using the exact line-search step `t* = (κ⁺ − κ⁻)/(2(κ⁺κ⁻ − c²))` obtained
/// from the rank-two determinant update (`c = q⁺ᵀ M⁻¹ q⁻`), clipped so no
/// weight goes negative. Returns `(λ, M)` once `max_i κ_i <= d(1+eps)`, which
/// bounds the duality gap of the objective by `d·eps`.
fn design(
    points: &[DVector<f64>],
    eps: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, DMatrix<f64>), BodyError> {
    let d = points[0].len();
    let m = points.len();
    let df = d as f64;
    let mut lambda = vec![1.0 / m as f64; m];

    for _ in 0..max_iter {
        let mut mm = DMatrix::zeros(d, d);
        for (q, &l) in points.iter().zip(&lambda) {
            if l > 0.0 {
                mm += q * q.transpose() * l;
            }
        }
        let inv = mm
            .clone()
            .try_inverse()
            .ok_or_else(|| BodyError::SolverFailure("singular moment matrix".into()))?;
        let kappa: Vec<f64> = points.iter().map(|q| (q.transpose() * &inv * q)[0]).collect();
        let gap = kappa.iter().cloned().fold(f64::MIN, f64::max) / df - 1.0;
        if gap <= eps {
            return Ok((lambda, mm));
        }

        let hi = (0..m)
            .max_by(|&a, &b| kappa[a].total_cmp(&kappa[b]))
            .expect("nonempty point set");
        let lo = (0..m)
            .filter(|&i| lambda[i] > 0.0)
            .min_by(|&a, &b| kappa[a].total_cmp(&kappa[b]))
            .expect("nonempty support");
        if hi == lo {
            return Err(BodyError::SolverFailure(
                "design stalled on a single-point support".into(),
            ));
        }
        let (ka, kb) = (kappa[hi], kappa[lo]);
        let cross = (points[hi].transpose() * &inv * &points[lo])[0];
        // κ⁺κ⁻ − c² > 0 unless the two points are parallel (Cauchy–Schwarz)
        let denom = 2.0 * (ka * kb - cross * cross);
        let t = if denom > f64::MIN_POSITIVE {
            ((ka - kb) / denom).min(lambda[lo])
        } else {
            lambda[lo]
        };
        if !(t > 0.0) {
            return Err(BodyError::SolverFailure(format!(
                "design line search stalled at gap {gap:.2e}"
            )));
        }
        lambda[hi] += t;
        lambda[lo] -= t;
    }
    Err(BodyError::SolverFailure(format!(
        "design did not reach tolerance {eps:.1e} in {max_iter} iterations"
    )))
}


/// Shape matrix of the maximal origin-centered ellipsoid inside
/// `{x : x·u_j <= β_j}`: the inverse of the enclosing design of `u_j/β_j`.
fn centered_inscribed_shape(
    normals: &[DVector<f64>],
    betas: &[f64],
) -> Result<DMatrix<f64>, BodyError> {
    let qs: Vec<DVector<f64>> = normals
        .iter()
        .zip(betas)
        .map(|(u, &b)| u / b)
        .collect();
    let d = qs[0].len() as f64;
    let (_, mm) = design(&qs, DESIGN_EPS, DESIGN_MAX_ITER)?;
    (mm * (d * (1.0 + DESIGN_EPS)))
        .try_inverse()
        .ok_or(BodyError::SingularM)
}

/// Maximal-volume inscribed ellipsoid, center free. Solves the joint convex
/// program `max log det L` over symmetric positive-definite `L` and centers
/// `c` subject to `u_j·c + ‖L u_j‖ <= b_j` (the ellipsoid `{c + Lz : ‖z‖<=1}`
/// inside each half-space), following a log-barrier path with analytic
/// gradients. The joint formulation stays smooth even when the contact
/// configuration is degenerate, where alternating center/shape schemes stall.
pub fn john_ellipsoid(k: &ConvexBody) -> Result<Ellipsoid, BodyError> {
    let n = k.dim();
    let hs = k.hbody.halfspaces();
    let normals: Vec<DVector<f64>> = hs.iter().map(|h| h.normal.clone()).collect();
    let offsets: Vec<f64> = hs.iter().map(|h| h.offset).collect();
    let nsym = n * (n + 1) / 2;

    let unpack = |x: &DVector<f64>| -> (DVector<f64>, DMatrix<f64>) {
        let c = x.rows(0, n).clone_owned();
        let mut l = DMatrix::zeros(n, n);
        let mut idx = n;
        for i in 0..n {
            for j in 0..=i {
                l[(i, j)] = x[idx];
                l[(j, i)] = x[idx];
                idx += 1;
            }
        }
        (c, l)
    };

    // slack of each half-space constraint together with L·u_j and ‖L·u_j‖
    let slacks = |c: &DVector<f64>,
                  l: &DMatrix<f64>|
     -> Option<Vec<(f64, DVector<f64>, f64)>> {
        let mut out = Vec::with_capacity(normals.len());
        for (u, &b) in normals.iter().zip(&offsets) {
            let lu = l * u;
            let r = lu.norm();
            let s = b - u.dot(c) - r;
            if s <= 0.0 || r <= 0.0 {
                return None;
            }
            out.push((s, lu, r));
        }
        Some(out)
    };

    let objective = |x: &DVector<f64>, t: f64| -> f64 {
        let (c, l) = unpack(x);
        let Some(ch) = l.clone().cholesky() else {
            return f64::INFINITY;
        };
        let logdet = 2.0 * (0..n).map(|i| ch.l_dirty()[(i, i)].ln()).sum::<f64>();
        // scaled by 1/t so the value stays O(1) along the whole barrier path
        match slacks(&c, &l) {
            Some(sl) => -logdet - sl.iter().map(|(s, _, _)| s.ln()).sum::<f64>() / t,
            None => f64::INFINITY,
        }
    };
    let gradient = |x: &DVector<f64>, t: f64| -> Option<DVector<f64>> {
        let (c, l) = unpack(x);
        let ch = l.clone().cholesky()?;
        let linv = ch.inverse();
        let sl = slacks(&c, &l)?;
        let mut gc = DVector::zeros(n);
        let mut gl = -linv;
        for ((s, lu, r), u) in sl.iter().zip(&normals) {
            gc += u / (*s * t);
            // d‖Lu‖/dL for symmetric perturbations, symmetrized
            let outer = (lu * u.transpose() + u * lu.transpose()) / (2.0 * r);
            gl += outer / (*s * t);
        }
        let mut g = DVector::zeros(n + nsym);
        g.rows_mut(0, n).copy_from(&gc);
        let mut idx = n;
        for i in 0..n {
            for j in 0..=i {
                g[idx] = if i == j { gl[(i, i)] } else { 2.0 * gl[(i, j)] };
                idx += 1;
            }
        }
        Some(g)
    };

    // basis of symmetric perturbations indexed like the packing above
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let hessian = |x: &DVector<f64>, t: f64| -> Option<DMatrix<f64>> {
        let (c, l) = unpack(x);
        let kinv = l.clone().cholesky()?.inverse();
        let sl = slacks(&c, &l)?;
        let dim = n + nsym;
        let mut h = DMatrix::zeros(dim, dim);

        // −log det L contributes tr(E_a L⁻¹ E_b L⁻¹) on the shape block
        for (ai, &(i, j)) in pairs.iter().enumerate() {
            for (bi, &(p, q)) in pairs.iter().enumerate() {
                let term = |i: usize, j: usize, p: usize, q: usize| kinv[(j, p)] * kinv[(q, i)];
                let mut v = term(i, j, p, q);
                if p != q {
                    v += term(i, j, q, p);
                }
                if i != j {
                    v += term(j, i, p, q);
                    if p != q {
                        v += term(j, i, q, p);
                    }
                }
                h[(n + ai, n + bi)] = v;
            }
        }

        // each barrier term −(1/t)·ln s adds (∇s∇sᵀ/s² + ∇²r/s)/t, with
        // ∇²r[a,b] = (v_a·v_b − (v_a·ŵ)(v_b·ŵ))/‖Lu‖ for v_a = E_a u
        for ((s, w, r), u) in sl.iter().zip(&normals) {
            let mut gs = DVector::zeros(dim);
            gs.rows_mut(0, n).copy_from(&(-u));
            let mut vs: Vec<DVector<f64>> = Vec::with_capacity(nsym);
            for &(i, j) in &pairs {
                let mut v = DVector::zeros(n);
                if i == j {
                    v[i] = u[i];
                } else {
                    v[i] = u[j];
                    v[j] = u[i];
                }
                vs.push(v);
            }
            let dr: Vec<f64> = vs.iter().map(|v| v.dot(w) / r).collect();
            for (ai, &d) in dr.iter().enumerate() {
                gs[n + ai] = -d;
            }
            h += &gs * gs.transpose() / (t * s * s);
            for ai in 0..nsym {
                for bi in 0..nsym {
                    h[(n + ai, n + bi)] +=
                        (vs[ai].dot(&vs[bi]) - dr[ai] * dr[bi]) / (r * t * s);
                }
            }
        }
        Some(h)
    };

    // strictly feasible start: centroid plus a small ball
    let c0 = k.centroid()?;
    let alpha = normals
        .iter()
        .zip(&offsets)
        .map(|(u, &b)| (b - u.dot(&c0)) / u.norm())
        .fold(f64::MAX, f64::min)
        * 0.5;
    if alpha <= 0.0 {
        return Err(BodyError::SolverFailure("centroid not interior".into()));
    }
    let mut x = DVector::zeros(n + nsym);
    x.rows_mut(0, n).copy_from(&c0);
    let mut idx = n;
    for i in 0..n {
        for j in 0..=i {
            x[idx] = if i == j { alpha } else { 0.0 };
            idx += 1;
        }
    }

    let opts = NewtonOptions {
        max_iter: 120,
        grad_tol: 1e-12,
        step_tol: 1e-15,
        fd_step: 0.0, // unused: derivatives are analytic
    };
    let mut t = 1.0;
    while t < 2e10 {
        x = minimize_newton(
            |y| objective(y, t),
            |y| gradient(y, t),
            |y| hessian(y, t),
            x,
            &opts,
        );
        t *= 20.0;
    }

    let (c, l) = unpack(&x);
    if slacks(&c, &l).is_none() {
        return Err(BodyError::SolverFailure("barrier left the body".into()));
    }
    Ok(Ellipsoid::new(c, &l * &l)?)
}


/// Minimal-volume enclosing ellipsoid of the vertex set, via the lifted
/// design in one dimension higher.
pub fn loewner_ellipsoid(k: &ConvexBody) -> Result<Ellipsoid, BodyError> {
    let n = k.dim();
    let lifted: Vec<DVector<f64>> = k
        .vbody
        .vertices()
        .iter()
        .map(|v| {
            let mut q = DVector::zeros(n + 1);
            q.rows_mut(0, n).copy_from(v);
            q[n] = 1.0;
            q
        })
        .collect();
    let (lambda, _) = design(&lifted, DESIGN_EPS, DESIGN_MAX_ITER)?;

    let mut c = DVector::zeros(n);
    let mut p = DMatrix::zeros(n, n);
    for (v, &l) in k.vbody.vertices().iter().zip(&lambda) {
        c += v * l;
        p += v * v.transpose() * l;
    }
    let shape = (p - &c * c.transpose())
        * (n as f64 * (1.0 + 2.0 * DESIGN_EPS * (n + 1) as f64 / n as f64));
    Ok(Ellipsoid::new(c, shape)?)
}

/// Second-moment matrix `M = Σ h_j^{-1} S_j u_j⊗u_j` of the `S₂` measure.
fn s2_moment_matrix(k: &ConvexBody) -> DMatrix<f64> {
    let n = k.dim();
    let mut m = DMatrix::zeros(n, n);
    for f in &k.facets {
        m += &f.normal * f.normal.transpose() * (f.area / f.support);
    }
    m
}

/// Closed-form solution `A = V(K)·M^{-1}` of the determinant maximization
/// under the `V₂` constraint (Lagrange condition with the linear constraint
/// `tr(AM) <= n·V(K)`); validated against a generic maximizer in the tests.
pub fn e2_ellipsoid(k: &ConvexBody) -> Result<Ellipsoid, BodyError> {
    let v = k.volume()?;
    let m = s2_moment_matrix(k);
    let shape = m.try_inverse().ok_or(BodyError::SingularM)? * v;
    Ok(Ellipsoid::new(DVector::zeros(k.dim()), shape)?)
}

/// Which member of the constrained-ellipsoid family to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpExponent {
    P1,
    PInf,
}

/// The extremal origin-centered ellipsoids: `p = ∞` is the maximal inscribed
/// ellipsoid with the center pinned at the origin; `p = 1` maximizes the
/// determinant under the `V₁` constraint, reduced to an unconstrained
/// problem by optimal rescaling.
pub fn ep_ellipsoid(k: &ConvexBody, p: EpExponent) -> Result<Ellipsoid, BodyError> {
    let n = k.dim();
    match p {
        EpExponent::PInf => {
            let hs = k.hbody.halfspaces();
            let normals: Vec<DVector<f64>> = hs.iter().map(|h| h.normal.clone()).collect();
            let betas: Vec<f64> = hs.iter().map(|h| h.offset).collect();
            let shape = centered_inscribed_shape(&normals, &betas)?;
            Ok(Ellipsoid::new(DVector::zeros(n), shape)?)
        }
        EpExponent::P1 => {
            let v = k.volume()?;
            let nf = n as f64;
            let nvars = n * (n + 1) / 2;
            let unpack = |x: &DVector<f64>| {
                let mut l = DMatrix::zeros(n, n);
                let mut idx = 0;
                for i in 0..n {
                    for j in 0..=i {
                        l[(i, j)] = if i == j { x[idx].exp() } else { x[idx] };
                        idx += 1;
                    }
                }
                l
            };
            let v1_sum = |a: &DMatrix<f64>| {
                k.facets
                    .iter()
                    .map(|f| (f.normal.transpose() * a * &f.normal)[0].sqrt() * f.area)
                    .sum::<f64>()
            };
            // scale-invariant objective: log det A − 2n·log Σ √(uᵀAu)·S
            let obj = |x: &DVector<f64>| {
                let l = unpack(x);
                let a = &l * l.transpose();
                let logdet: f64 = (0..n).map(|i| 2.0 * l[(i, i)].ln()).sum();
                let s = v1_sum(&a);
                if !s.is_finite() || s <= 0.0 {
                    return f64::INFINITY;
                }
                -(logdet - 2.0 * nf * s.ln())
            };
            let x = minimize(obj, DVector::zeros(nvars), &NewtonOptions::default());
            let l = unpack(&x);
            let a = &l * l.transpose();
            let tau = nf * v / v1_sum(&a);
            Ok(Ellipsoid::new(DVector::zeros(n), a * (tau * tau))?)
        }
    }
}

/// `‖S₂(K,·)/V(K) − I‖_F`: zero exactly when the normalized `S₂` measure is
/// isotropic.
pub fn s2_isotropy_defect(k: &ConvexBody) -> Result<f64, BodyError> {
    let v = k.volume()?;
    let n = k.dim();
    Ok((s2_moment_matrix(k) / v - DMatrix::identity(n, n)).norm())
}

/// Certifies John position: the facets touching the unit ball must carry
/// nonnegative weights making them a 1-centered isotropic system
/// (residual <= 1e-5 in the combined moment equations).
pub fn john_contact_certificate(k: &ConvexBody) -> Result<bool, BodyError> {
    const POS_TOL: f64 = 1e-5;
    let j = john_ellipsoid(k)?;
    let n = k.dim();
    let center_err = j.center().norm();
    let shape_err = (j.shape() - DMatrix::identity(n, n)).norm();
    if center_err > POS_TOL || shape_err > POS_TOL {
        return Err(BodyError::NotInJohnPosition(format!(
            "inscribed ellipsoid deviates from the unit ball: center {center_err:.3e}, shape {shape_err:.3e}"
        )));
    }

    let contacts: Vec<&Halfspace> = k
        .hbody
        .halfspaces()
        .iter()
        .filter(|h| (h.offset - 1.0).abs() <= POS_TOL)
        .collect();
    if contacts.is_empty() {
        return Ok(false);
    }

    let rows = n * n + n;
    let mut a = DMatrix::zeros(rows, contacts.len());
    let mut b = DVector::zeros(rows);
    for i in 0..n {
        b[i * n + i] = 1.0;
    }
    for (col, h) in contacts.iter().enumerate() {
        let u = &h.normal;
        for i in 0..n {
            for jj in 0..n {
                a[(i * n + jj, col)] = u[i] * u[jj];
            }
            a[(n * n + i, col)] = u[i];
        }
    }
    let x = nnls(&a, &b);
    let residual = (&a * x - b).norm();
    Ok(residual <= POS_TOL)
}

fn simplex_constant(n: usize) -> f64 {
    let np1 = (n + 1) as f64;
    np1.powf(np1 / 2.0) / ((n as f64).powf(n as f64 / 2.0) * factorial(n))
}

/// The volume-ratio consequences: inner ratio against the John ellipsoid,
/// its `L₂` version, the polar product bounds, and the outer ratio against
/// the Loewner ellipsoid. Ratios are simplex-extremal; the centroid must sit
/// at the origin so the centroid-conditional bounds apply.
pub fn volume_ratio_reports(
    k: &ConvexBody,
    eq_tol: f64,
) -> Result<Vec<InequalityReport>, BodyError> {
    let n = k.dim();
    let cd = k.centroid()?.norm();
    if cd > 1e-9 {
        return Err(BodyError::CentroidNotAtOrigin(cd));
    }
    let kn = unit_ball_volume(n);
    let ball_c = simplex_constant(n) * (n as f64).powf(n as f64) / kn;
    let dual_c = simplex_constant(n) * kn;
    let outer_c = simplex_constant(n) / kn;

    let vol = k.volume()?;
    let jk = john_ellipsoid(k)?;
    let lk = loewner_ellipsoid(k)?;
    let e2 = e2_ellipsoid(k)?;
    let polar_vol = k.polar()?.volume()?;

    let mut reports = vec![
        InequalityReport::upper("ball_volume_ratio", vol / jk.volume(), ball_c, eq_tol)
            .with_meta("n", n as f64),
        InequalityReport::upper("l2_volume_ratio", vol / e2.volume(), ball_c, eq_tol)
            .with_meta("n", n as f64),
        InequalityReport::lower("dual_volume_ratio", polar_vol * jk.volume(), dual_c, eq_tol)
            .with_meta("n", n as f64),
        InequalityReport::lower("polar_e2_product", polar_vol * e2.volume(), dual_c, eq_tol)
            .with_meta("n", n as f64),
        InequalityReport::lower("outer_volume_ratio", vol / lk.volume(), outer_c, eq_tol)
            .with_meta("n", n as f64),
    ];

    // for origin-symmetric bodies the John ellipsoid is centered, so the
    // whole constrained family obeys the same inner ratio bound
    if k.is_origin_symmetric(1e-9) {
        let e1 = ep_ellipsoid(k, EpExponent::P1)?;
        let einf = ep_ellipsoid(k, EpExponent::PInf)?;
        reports.push(
            InequalityReport::upper("l1_volume_ratio", vol / e1.volume(), ball_c, eq_tol)
                .with_meta("n", n as f64),
        );
        reports.push(
            InequalityReport::upper("linf_volume_ratio", vol / einf.volume(), ball_c, eq_tol)
                .with_meta("n", n as f64),
        );
    }
    Ok(reports)
}

/// The two hull bounds for 1-centered isotropic direction sets: the polar of
/// the support hull is bounded above, the hull itself below, both
/// simplex-extremal.
pub fn support_hull_reports(
    m: &DiscreteMeasure,
    tol: f64,
    eq_tol: f64,
) -> Result<(InequalityReport, InequalityReport), BodyError> {
    let iso = m.isotropy_defect();
    if iso > tol {
        return Err(BodyError::HypothesisViolated(format!(
            "isotropy defect {iso:.3e}"
        )));
    }
    let mut bary = DVector::zeros(m.dim());
    for (u, &c) in m.points().iter().zip(m.weights()) {
        bary += u * c;
    }
    if bary.norm() > tol {
        return Err(BodyError::HypothesisViolated(format!(
            "centering defect {:.3e}",
            bary.norm()
        )));
    }

    let n = m.dim();
    let hull = VPolytope::new(n, m.points().to_vec())?;
    let hull_vol = hull.volume()?;
    let polar_vol = polar_h_to_v(&vertices_to_halfspaces(&hull)?)?.volume()?;

    let upper_c = simplex_constant(n) * (n as f64).powf(n as f64);
    let lower_c = simplex_constant(n);
    let up = InequalityReport::upper("polar_support_hull_volume", polar_vol, upper_c, eq_tol)
        .with_meta("n", n as f64)
        .with_meta("support_size", m.len() as f64);
    let lo = InequalityReport::lower("support_hull_volume", hull_vol, lower_c, eq_tol)
        .with_meta("n", n as f64)
        .with_meta("support_size", m.len() as f64);
    Ok((up, lo))
}

/// Random full-dimensional body: the hull of `k` scaled random directions,
/// translated so the centroid is at the origin.
pub fn gen_random_body(n: usize, k: usize, seed: u64) -> Result<ConvexBody, BodyError> {
    assert!(k > n + 1, "need more points than the dimension");
    for retry in 0..20 {
        let mut rng = crate::measures::stream_rng(seed, 0x626f6479 ^ retry);
        let pts: Vec<DVector<f64>> = (0..k)
            .map(|_| random_direction(n, &mut rng) * rng.gen_range(0.6..1.4))
            .collect();
        let Ok(v) = VPolytope::new(n, pts) else {
            continue;
        };
        let c = v.centroid()?;
        let centered: Vec<DVector<f64>> = v.vertices().iter().map(|p| p - &c).collect();
        if let Ok(body) = ConvexBody::from_points(n, centered) {
            return Ok(body);
        }
    }
    Err(BodyError::SolverFailure(
        "could not generate a valid random body".into(),
    ))
}

/// Random origin-symmetric body: the hull of `±p_i` for `k` random scaled
/// directions.
pub fn gen_random_symmetric_body(n: usize, k: usize, seed: u64) -> Result<ConvexBody, BodyError> {
    assert!(k > n, "need more direction pairs than the dimension");
    for retry in 0..20 {
        let mut rng = crate::measures::stream_rng(seed, 0x73796d6d ^ retry);
        let mut pts = Vec::with_capacity(2 * k);
        for _ in 0..k {
            let p = random_direction(n, &mut rng) * rng.gen_range(0.6..1.4);
            pts.push(p.clone());
            pts.push(-p);
        }
        if let Ok(body) = ConvexBody::from_points(n, pts) {
            return Ok(body);
        }
    }
    Err(BodyError::SolverFailure(
        "could not generate a valid random symmetric body".into(),
    ))
}

fn random_direction<R: Rng>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{gen_cube_measure, gen_random_isotropic_fcentered, gen_simplex_measure};
    use nalgebra::dvector;

    fn cube2() -> ConvexBody {
        ConvexBody::from_points(
            2,
            vec![
                dvector![1.0, 1.0],
                dvector![1.0, -1.0],
                dvector![-1.0, 1.0],
                dvector![-1.0, -1.0],
            ],
        )
        .unwrap()
    }

    /// Equilateral triangle with inradius 1 and centroid at the origin.
    fn triangle_inradius(r: f64) -> ConvexBody {
        let pts = (0..3)
            .map(|k| {
                let th = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                dvector![2.0 * r * th.cos(), 2.0 * r * th.sin()]
            })
            .collect();
        ConvexBody::from_points(2, pts).unwrap()
    }

    #[test]
    fn sp_measure_values() {
        let k = cube2();
        let s1 = sp_measure(&k, 1.0);
        for (_, w) in &s1.entries {
            assert!((w - 2.0).abs() < 1e-9); // side lengths
        }
        let s2 = sp_measure(&k, 2.0);
        for (_, w) in &s2.entries {
            assert!((w - 2.0).abs() < 1e-9); // h = 1
        }
        // doubled cube: h = 2, side 4, weight 4/2 = 2
        let big = k.linear_image(&(DMatrix::identity(2, 2) * 2.0)).unwrap();
        let s2b = sp_measure(&big, 2.0);
        for (_, w) in &s2b.entries {
            assert!((w - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn facet_normals_sum_to_zero() {
        for seed in 0..10 {
            let k = gen_random_body(3, 20, seed).unwrap();
            let mut s = DVector::zeros(3);
            for f in k.facets() {
                s += &f.normal * f.area;
            }
            assert!(s.norm() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn vp_self_is_volume() {
        for seed in 0..5 {
            let k = gen_random_body(2, 14, seed).unwrap();
            let v = k.volume().unwrap();
            for &p in &[1.0, 2.0, 3.5] {
                let vp = vp_mixed_volume(&k, k.vbody(), p);
                assert!((vp - v).abs() <= 1e-9 * v, "seed {seed}, p {p}");
            }
        }
    }

    #[test]
    fn vp_examples() {
        let k = cube2();
        let disk = Ellipsoid::unit_ball(2);
        assert!((vp_mixed_volume(&k, &disk, 2.0) - 4.0).abs() < 1e-9);
        // V₁(K, B) = surface area / n
        let k3 = gen_random_body(3, 20, 3).unwrap();
        let area: f64 = k3.facets().iter().map(|f| f.area).sum();
        let v1 = vp_mixed_volume(&k3, &Ellipsoid::unit_ball(3), 1.0);
        assert!((v1 - area / 3.0).abs() < 1e-9 * area);
    }

    #[test]
    fn wulff_reconstruction() {
        assert!(wulff_reconstruction_check(&cube2(), 2.0).unwrap());
        let k = gen_random_body(3, 20, 5).unwrap();
        assert!(wulff_reconstruction_check(&k, 1.0).unwrap());
        assert!(wulff_reconstruction_check(&k, 3.5).unwrap());
    }

    #[test]
    fn john_of_cube_is_unit_ball() {
        let j = john_ellipsoid(&cube2()).unwrap();
        assert!(j.center().norm() < 1e-6);
        assert!((j.shape() - DMatrix::identity(2, 2)).norm() < 1e-6);
        assert!((j.volume() - std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn john_of_regular_triangle_is_unit_disk() {
        let j = john_ellipsoid(&triangle_inradius(1.0)).unwrap();
        assert!(j.center().norm() < 1e-6, "center {:?}", j.center());
        assert!((j.shape() - DMatrix::identity(2, 2)).norm() < 1e-5);
    }

    #[test]
    fn john_free_center_handles_translated_body() {
        let k = triangle_inradius(1.0)
            .translate(&dvector![0.3, -0.1])
            .unwrap();
        let j = john_ellipsoid(&k).unwrap();
        assert!((j.center() - dvector![0.3, -0.1]).norm() < 1e-5);
        assert!((j.shape() - DMatrix::identity(2, 2)).norm() < 1e-5);
    }

    #[test]
    fn random_triangles_obey_inner_ratio() {
        let c = simplex_constant(2) * 4.0 / std::f64::consts::PI; // 3√3/π
        assert!((c - 3.0 * 3.0f64.sqrt() / std::f64::consts::PI).abs() < 1e-12);
        for seed in 0..10 {
            let mut rng = crate::measures::stream_rng(seed, 77);
            let pts: Vec<DVector<f64>> = (0..3)
                .map(|_| random_direction(2, &mut rng) * rng.gen_range(0.5..1.5))
                .collect();
            let Ok(v) = VPolytope::new(2, pts) else {
                continue;
            };
            if v.vertices().len() < 3 {
                continue;
            }
            let centroid = v.centroid().unwrap();
            let k = ConvexBody::from_points(
                2,
                v.vertices().iter().map(|p| p - &centroid).collect(),
            )
            .unwrap();
            let j = john_ellipsoid(&k).unwrap();
            let ratio = k.volume().unwrap() / j.volume();
            assert!(ratio <= c + 1e-5, "seed {seed}: ratio {ratio}");
        }
    }

    #[test]
    fn loewner_symmetric_cases() {
        let cross = ConvexBody::from_points(
            2,
            vec![
                dvector![1.0, 0.0],
                dvector![-1.0, 0.0],
                dvector![0.0, 1.0],
                dvector![0.0, -1.0],
            ],
        )
        .unwrap();
        let l = loewner_ellipsoid(&cross).unwrap();
        assert!(l.center().norm() < 1e-8);
        assert!((l.shape() - DMatrix::identity(2, 2)).norm() < 1e-6);

        // triangle inscribed in the unit circle
        let tri = triangle_inradius(0.5);
        let l = loewner_ellipsoid(&tri).unwrap();
        assert!(l.center().norm() < 1e-6);
        assert!((l.shape() - DMatrix::identity(2, 2)).norm() < 1e-5);
    }

    #[test]
    fn loewner_contains_all_vertices() {
        for seed in 0..5 {
            let k = gen_random_body(3, 15, seed).unwrap();
            let l = loewner_ellipsoid(&k).unwrap();
            for v in k.vbody().vertices() {
                assert!(l.contains(v, 1e-8), "seed {seed}");
            }
        }
    }

    #[test]
    fn john_loewner_polar_duality() {
        let kn = std::f64::consts::PI;
        for seed in 0..5 {
            let k = gen_random_body(2, 12, seed).unwrap();
            let jk = john_ellipsoid(&k).unwrap();
            let lk_star = loewner_ellipsoid(&k.polar().unwrap()).unwrap();
            assert!(
                jk.volume() * lk_star.volume() >= kn * kn * (1.0 - 1e-6),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn e2_of_cube_is_unit_disk() {
        let e = e2_ellipsoid(&cube2()).unwrap();
        assert!((e.shape() - DMatrix::identity(2, 2)).norm() < 1e-9);
    }

    #[test]
    fn e2_constraint_active() {
        for seed in 0..5 {
            let k = gen_random_body(2, 14, seed).unwrap();
            let e = e2_ellipsoid(&k).unwrap();
            let v = k.volume().unwrap();
            let v2 = vp_mixed_volume(&k, &e, 2.0);
            assert!((v2 - v).abs() <= 1e-9 * v, "seed {seed}");
        }
    }

    #[test]
    fn e2_of_regular_triangle_is_equality_case() {
        let k = triangle_inradius(1.0);
        let e = e2_ellipsoid(&k).unwrap();
        let ratio = k.volume().unwrap() / e.volume();
        let c = 3.0 * 3.0f64.sqrt() / std::f64::consts::PI;
        assert!((ratio - c).abs() < 1e-6, "ratio {ratio} vs {c}");
    }

    #[test]
    fn e2_matches_brute_force_maximizer() {
        for seed in 0..6 {
            let n = 2 + (seed % 2) as usize;
            let k = gen_random_body(n, 8 * n, seed).unwrap();
            let closed = e2_ellipsoid(&k).unwrap();

            // generic maximizer of log det A under the V₂ constraint via the
            // scale-invariant reduction
            let nf = n as f64;
            let v = k.volume().unwrap();
            let nvars = n * (n + 1) / 2;
            let unpack = |x: &DVector<f64>| {
                let mut l = DMatrix::zeros(n, n);
                let mut idx = 0;
                for i in 0..n {
                    for j in 0..=i {
                        l[(i, j)] = if i == j { x[idx].exp() } else { x[idx] };
                        idx += 1;
                    }
                }
                l
            };
            let v2_sum = |a: &DMatrix<f64>| {
                k.facets()
                    .iter()
                    .map(|f| (f.normal.transpose() * a * &f.normal)[0] * f.area / f.support)
                    .sum::<f64>()
            };
            let obj = |x: &DVector<f64>| {
                let l = unpack(x);
                let a = &l * l.transpose();
                let logdet: f64 = (0..n).map(|i| 2.0 * l[(i, i)].ln()).sum();
                -(logdet - nf * v2_sum(&a).ln())
            };
            let x = minimize(obj, DVector::zeros(nvars), &NewtonOptions::default());
            let l = unpack(&x);
            let a = &l * l.transpose();
            let tau = nf * v / v2_sum(&a);
            let brute = a * tau;

            let scale = 1.0 + closed.shape().norm();
            assert!(
                (closed.shape() - &brute).norm() <= 1e-5 * scale,
                "seed {seed}: closed {:?} vs brute {:?}",
                closed.shape(),
                brute
            );
        }
    }

    #[test]
    fn e2_affine_covariance() {
        let k = gen_random_body(2, 12, 9).unwrap();
        let t = nalgebra::dmatrix![1.3, 0.4; -0.2, 0.8];
        let e = e2_ellipsoid(&k).unwrap();
        let et = e2_ellipsoid(&k.linear_image(&t).unwrap()).unwrap();
        let expected = &t * e.shape() * t.transpose();
        assert!((et.shape() - &expected).norm() <= 1e-6 * (1.0 + expected.norm()));
    }

    #[test]
    fn ep_family_on_cube_is_unit_ball() {
        let k = cube2();
        for e in [
            ep_ellipsoid(&k, EpExponent::P1).unwrap(),
            e2_ellipsoid(&k).unwrap(),
            ep_ellipsoid(&k, EpExponent::PInf).unwrap(),
        ] {
            assert!(
                (e.shape() - DMatrix::identity(2, 2)).norm() < 1e-5,
                "{:?}",
                e.shape()
            );
        }
    }

    #[test]
    fn einf_equals_john_for_symmetric_bodies() {
        for seed in 0..4 {
            let k = gen_random_symmetric_body(2, 6, seed).unwrap();
            let einf = ep_ellipsoid(&k, EpExponent::PInf).unwrap();
            let j = john_ellipsoid(&k).unwrap();
            assert!(j.center().norm() < 1e-5, "seed {seed}");
            assert!(
                (einf.shape() - j.shape()).norm() <= 1e-5 * (1.0 + j.shape().norm()),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn ellipsoid_volume_monotonicity() {
        for seed in 0..6 {
            let n = 2 + (seed % 2) as usize;
            let k = gen_random_symmetric_body(n, 4 * n, seed).unwrap();
            let v_inf = ep_ellipsoid(&k, EpExponent::PInf).unwrap().volume();
            let v_2 = e2_ellipsoid(&k).unwrap().volume();
            let v_1 = ep_ellipsoid(&k, EpExponent::P1).unwrap().volume();
            assert!(v_inf <= v_2 * (1.0 + 1e-4), "seed {seed}: {v_inf} vs {v_2}");
            assert!(v_2 <= v_1 * (1.0 + 1e-4), "seed {seed}: {v_2} vs {v_1}");
        }
    }

    #[test]
    fn s2_defect_examples() {
        assert!(s2_isotropy_defect(&cube2()).unwrap() < 1e-9);
        let stretched = cube2()
            .linear_image(&nalgebra::dmatrix![2.0, 0.0; 0.0, 1.0])
            .unwrap();
        assert!(s2_isotropy_defect(&stretched).unwrap() > 0.1);
    }

    #[test]
    fn s2_defect_vanishes_in_e2_position() {
        let k = gen_random_body(2, 12, 11).unwrap();
        let a = e2_ellipsoid(&k).unwrap().shape().clone();
        // map K by A^{-1/2}, sending the ellipsoid to a ball; then rescale so
        // the closed-form ellipsoid is exactly the unit ball
        let eig = nalgebra::SymmetricEigen::new(a);
        let mut root_inv = DMatrix::zeros(2, 2);
        for i in 0..2 {
            let vi = eig.eigenvectors.column(i);
            root_inv += vi * vi.transpose() / eig.eigenvalues[i].sqrt();
        }
        let k1 = k.linear_image(&root_inv).unwrap();
        let defect = s2_isotropy_defect(&k1).unwrap();
        assert!(defect <= 1e-6, "defect {defect}");
    }

    #[test]
    fn contact_certificate_cases() {
        assert!(john_contact_certificate(&cube2()).unwrap());
        assert!(john_contact_certificate(&triangle_inradius(1.0)).unwrap());
        assert!(matches!(
            john_contact_certificate(&triangle_inradius(1.1)),
            Err(BodyError::NotInJohnPosition(_))
        ));
    }

    #[test]
    fn corollaries_on_regular_triangle() {
        let reports = volume_ratio_reports(&triangle_inradius(1.0), 1e-5).unwrap();
        let c = 3.0 * 3.0f64.sqrt() / std::f64::consts::PI;
        let dual = 3.0 * 3.0f64.sqrt() * std::f64::consts::PI / 4.0;
        let by_name = |n: &str| reports.iter().find(|r| r.name == n).unwrap();
        let ball = by_name("ball_volume_ratio");
        assert!((ball.lhs - c).abs() < 1e-5 && ball.equality, "{ball:?}");
        let l2 = by_name("l2_volume_ratio");
        assert!((l2.lhs - c).abs() < 1e-5 && l2.equality);
        let p = by_name("polar_e2_product");
        assert!((p.lhs - dual).abs() < 1e-4 && p.equality, "{p:?}");
        let d = by_name("dual_volume_ratio");
        assert!(d.gap >= -1e-5 && d.equality, "{d:?}");
        let o = by_name("outer_volume_ratio");
        assert!(o.gap >= -1e-5 && o.equality, "{o:?}");
    }

    #[test]
    fn corollaries_on_square_are_strict() {
        let reports = volume_ratio_reports(&cube2(), 1e-5).unwrap();
        let ball = reports
            .iter()
            .find(|r| r.name == "ball_volume_ratio")
            .unwrap();
        assert!((ball.lhs - 4.0 / std::f64::consts::PI).abs() < 1e-5);
        assert!(!ball.equality && ball.gap > 0.3);
        // symmetric body: the L_p family reports are present
        assert!(reports.iter().any(|r| r.name == "l1_volume_ratio"));
        assert!(reports.iter().any(|r| r.name == "linf_volume_ratio"));
        for r in &reports {
            assert!(r.gap >= -1e-5, "{r:?}");
        }
    }

    #[test]
    fn corollaries_reject_off_center_body() {
        let k = triangle_inradius(1.0)
            .translate(&dvector![0.2, 0.0])
            .unwrap();
        assert!(matches!(
            volume_ratio_reports(&k, 1e-5),
            Err(BodyError::CentroidNotAtOrigin(_))
        ));
    }

    #[test]
    fn random_bodies_obey_all_corollaries() {
        for seed in 0..8 {
            let k = gen_random_body(2, 12, seed).unwrap();
            for r in volume_ratio_reports(&k, 1e-5).unwrap() {
                assert!(r.gap >= -1e-5, "seed {seed}: {r:?}");
                assert!(!r.equality, "seed {seed}: unexpected equality {r:?}");
            }
        }
    }

    #[test]
    fn hull_bounds_for_directions() {
        // simplex directions: equality in both, with the frozen n = 2 values
        let (m, _) = gen_simplex_measure(2);
        let (up, lo) = support_hull_reports(&m, 1e-8, 1e-7).unwrap();
        assert!(up.equality && lo.equality, "{up:?} {lo:?}");
        assert!((lo.lhs - 3.0 * 3.0f64.sqrt() / 4.0).abs() < 1e-9);
        assert!((up.lhs - 2.0 * 3.0 * 3.0f64.sqrt() / 2.0).abs() < 1e-9);

        // cube directions: strict in both
        let (m, _) = gen_cube_measure(2);
        let (up, lo) = support_hull_reports(&m, 1e-8, 1e-7).unwrap();
        assert!(!up.equality && !lo.equality);
        assert!(up.gap > 0.5 && lo.gap > 0.5);

        // random 1-centered isotropic direction sets
        for seed in 0..10 {
            let (m, _) = gen_random_isotropic_fcentered(2, 10, (1.0, 1.0), seed).unwrap();
            let (up, lo) = support_hull_reports(&m, 1e-7, 1e-7).unwrap();
            assert!(up.gap >= -1e-7 && lo.gap >= -1e-7, "seed {seed}");
        }
    }

    #[test]
    fn hull_bounds_reject_uncentered_measure() {
        let (m, _) = gen_random_isotropic_fcentered(2, 10, (0.5, 2.0), 3).unwrap();
        // f-centered with non-constant f is generally not 1-centered
        assert!(matches!(
            support_hull_reports(&m, 1e-9, 1e-7),
            Err(BodyError::HypothesisViolated(_))
        ));
    }
}

