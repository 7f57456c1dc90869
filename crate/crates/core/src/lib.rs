//! Reversible KAM machinery for the derivative nonlinear wave equation
//! `y_tt − y_xx + m y = g(x, y, y_x, y_t)` on the circle.

pub mod dynamics;
pub mod error;
pub mod model;
pub mod normal_form;
pub mod qp;
pub mod scalar;
pub mod spectral;
pub mod vf_algebra;

pub use error::{Error, Result};

/// Crate version, recorded in artifact provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use scalar::{Cplx, Real};

pub type VectorField64 = vf_algebra::VectorField<f64>;
pub type VectorField32 = vf_algebra::VectorField<f32>;
pub type ModelParams64 = model::ModelParams<f64>;
pub type NonlinearitySpec64 = model::NonlinearitySpec<f64>;
pub type FieldState64 = model::FieldState<f64>;
pub type QpSolution64 = qp::QpSolution<f64>;
pub type NormalForm64 = normal_form::NormalForm<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
