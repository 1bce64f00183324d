//! Ellipsoids as center + symmetric positive-definite shape matrix.

use super::{unit_ball_volume, GeomError};
use nalgebra::{DMatrix, DVector};

/// The body `{x : (x-center)ᵀ A⁻¹ (x-center) <= 1}` with `A` SPD.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    center: DVector<f64>,
    shape: DMatrix<f64>,
}

impl Ellipsoid {
    pub fn new(center: DVector<f64>, shape: DMatrix<f64>) -> Result<Self, GeomError> {
        let n = center.len();
        if shape.nrows() != n || shape.ncols() != n {
            return Err(GeomError::Invalid("shape matrix dimension mismatch".into()));
        }
        if (&shape - shape.transpose()).amax() > 1e-12 * (1.0 + shape.amax()) {
            return Err(GeomError::Invalid("shape matrix is not symmetric".into()));
        }
        let sym = (&shape + shape.transpose()) * 0.5;
        if sym.clone().cholesky().is_none() {
            return Err(GeomError::Invalid(
                "shape matrix is not positive definite".into(),
            ));
        }
        Ok(Ellipsoid { center, shape: sym })
    }

    pub fn unit_ball(n: usize) -> Self {
        Ellipsoid {
            center: DVector::zeros(n),
            shape: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    /// `κ_n √det A`.
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.shape.determinant().sqrt()
    }

    /// Support function `h(E, u) = center·u + √(uᵀAu)`.
    pub fn support(&self, u: &DVector<f64>) -> f64 {
        self.center.dot(u) + (self.shape.clone() * u).dot(u).max(0.0).sqrt()
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        let d = x - &self.center;
        match self.shape.clone().cholesky() {
            Some(ch) => ch.solve(&d).dot(&d) <= 1.0 + tol,
            None => false,
        }
    }

    /// Image under the linear map `T`: center `Tc`, shape `T A Tᵀ`.
    pub fn linear_image(&self, t: &DMatrix<f64>) -> Ellipsoid {
        Ellipsoid {
            center: t * &self.center,
            shape: t * &self.shape * t.transpose(),
        }
    }

    /// Polar body, itself an ellipsoid when the origin is interior.
    ///
    /// From `{y : √(yᵀAy) <= 1 - c·y}`: with `Q = A - c cᵀ`, the polar is the
    /// ellipsoid centered at `-Q⁻¹c` with shape `ρ Q⁻¹`, `ρ = 1 + cᵀQ⁻¹c`.
    pub fn polar(&self) -> Result<Ellipsoid, GeomError> {
        let c = &self.center;
        let q = &self.shape - c * c.transpose();
        let ch = q.clone().cholesky().ok_or(GeomError::OriginNotInterior)?;
        let qinv_c = ch.solve(c);
        let rho = 1.0 + c.dot(&qinv_c);
        let qinv = ch.inverse();
        Ellipsoid::new(-qinv_c, qinv * rho)
    }
}
