//! Pareto-front approximation for biobjective shape optimization of 2D
//! ceramic components under tensile load.
//!
//! The two objectives are a Weibull-type failure intensity measure (expected
//! number of critical flaws, a surrogate for the probability of failure) and
//! the material volume. Shapes are vertical cross-sections described by a
//! meanline and a thickness profile, both parametrized by B-spline
//! coefficients. The state is plane linear elasticity discretized with P1
//! triangles; shape gradients come from a discrete adjoint and are chained
//! through the grid and spline parametrizations. Two drivers approximate the
//! Pareto front: a weighted-sum gradient descent and a biobjective steepest
//! descent with quadratic-program search directions.

pub mod bspline;
pub mod config;
pub mod driver;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod gradients;
pub mod metric;
pub mod objectives;
pub mod optim;
pub mod presets;
pub mod problem;
pub mod report;

pub use error::{Error, Result};

/// Minimum admissible thickness in meters; candidate shapes at or below this
/// are rejected before meshing.
pub const TH_MIN: f64 = 1e-4;
