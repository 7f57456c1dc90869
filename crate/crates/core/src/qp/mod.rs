//! Quasi-periodic standing waves by Newton iteration on torus-Fourier
//! coefficients.

mod continuation;
mod lyapunov;
mod newton;
mod solution;

pub use continuation::{
    continuation, ContinuationConfig, ContinuationFailure, ContinuationPoint, ContinuationResult,
};
pub use lyapunov::{lyapunov_exponent, LyapunovConfig, LyapunovPoint, LyapunovReport};
pub use newton::{newton_qp, qp_residual, NewtonConfig, NewtonReport, QpProblem};
pub use solution::{half_box_modes, QpSolution};

/// Default torus harmonic cutoff.
pub const DEFAULT_L_MAX: u32 = 6;
