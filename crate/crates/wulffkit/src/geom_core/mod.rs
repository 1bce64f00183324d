//! Convex geometry kernels at double precision.
//!
//! Everything here is exact-for-polytopes: hulls by incremental insertion,
//! volume and centroid by triangulation fanned from the vertex barycenter,
//! polarity by the `a_i/b_i <-> {x·v ≤ 1}` correspondence. Dimensions are
//! small (2..=6); robustness comes from a fixed facet-membership tolerance
//! rather than exact arithmetic.

mod ellipsoid;
mod hull;
mod polytope;

pub use ellipsoid::Ellipsoid;
pub use hull::convex_hull;
pub use polytope::{
    halfspace_to_vertices, polar_h_to_v, polar_v_to_h, surface_area_measure,
    vertices_to_halfspaces, FacetData, HPolytope, Halfspace, VPolytope,
};

use thiserror::Error;

/// Facet-membership tolerance for hull construction.
pub(crate) const FACET_TOL: f64 = 1e-10;
/// Coordinate snap used by canonical forms.
pub(crate) const SNAP: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("degenerate input: points span a proper affine subspace of R^{0}")]
    DegenerateInput(usize),
    #[error("half-space intersection is unbounded")]
    UnboundedBody,
    #[error("origin is not strictly interior")]
    OriginNotInterior,
    #[error("invalid geometry: {0}")]
    Invalid(String),
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Volume of the n-dimensional Euclidean unit ball.
///
/// Computed by the recurrence `κ_n = κ_{n-2}·2π/n` with `κ_1 = 2`, `κ_2 = π`,
/// which avoids a gamma-function dependency for integer n.
pub fn unit_ball_volume(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be at least 1");
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        // recurrence against the closed form pi^2/2 for n = 4
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }
}
