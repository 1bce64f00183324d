//! Convex-geometry toolkit for asymmetric Wulff shapes.
//!
//! A Wulff shape is the intersection of half-spaces `{x : x·u ≤ f(u)}` over
//! the support of a spherical measure. When the measure is discrete, isotropic
//! and f-centered, the shape is a convex polytope with the origin in its
//! interior and its volume obeys sharp bounds with the regular simplex (and,
//! in the even case, the cube) as the only extremals. This crate constructs
//! these shapes, their polars and the associated ellipsoids, and verifies the
//! volume inequalities numerically on batches of generated instances.
//!
//! Module map:
//! - [`geom_core`]: hulls, H/V polytope representations, volume, centroid,
//!   polarity, surface area measures, ellipsoids.
//! - [`measures`]: discrete spherical measures, isotropy/centering defects,
//!   extremal and random instance generators, the isotropic lift to `S^n`.
//! - [`wulff`]: Wulff shape construction, displacement, and the volume
//!   inequality evaluators with equality-case detection.
//! - [`bodies`]: L_p surface area measures, mixed volumes, John/Loewner and
//!   L_p John ellipsoids, volume-ratio corollary evaluators.
//! - [`ballbarthe`]: the Ball–Barthe determinant inequality and the monotone
//!   transport maps between exponential and Gaussian densities.
//! - [`cli`]: the batch-verification harness behind the `verify` binary.

pub mod ballbarthe;
pub mod bodies;
pub mod cli;
pub mod geom_core;
pub mod measures;
pub mod report;
pub mod wulff;

mod nnls;
mod optim;

pub use report::InequalityReport;
