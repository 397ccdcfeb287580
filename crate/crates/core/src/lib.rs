//! Stochastic primal-dual solvers for convex-concave saddle-point problems
//!
//! `min_x max_y f(x) + g(x) + Φ(x, y) − J(y)`
//!
//! The numerical core is generic over [`Scalar`] (`f32` / `f64`); the `*64`
//! aliases below fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` also rejects NaN

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod oracles;
pub mod problems;
mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Geometry64 = geometry::GeometrySpec<f64>;
pub type Set64 = geometry::SetKind<f64>;
pub type Problem64 = problems::SaddleProblem<f64>;
pub type Oracle64 = oracles::OracleHandle<f64>;
pub type Schedule64 = solvers::ScheduleParams<f64>;
pub type Iterate64 = solvers::IterateState<f64>;
pub type RunRecord64 = solvers::RunRecord<f64>;
