//! The equation `y_tt − y_xx + m y = g(x, y, y_x, y_t)`: parameters,
//! nonlinearity, complex coordinates and linear solutions.

mod complex_form;
mod config;
mod linear;
mod nonlinearity;
mod params;

pub use complex_form::{
    complex_rhs, complex_to_coeffs, fourier_g, from_complex, to_complex, ComplexState,
    FieldState, GCoefficients,
};
pub use config::ModelConfig;
pub use linear::{action_angle_embed, action_angle_extract, linear_solution};
pub use nonlinearity::{check_g_symmetries, GTerm, NonlinearitySpec, SymmetryReport, XFactor};
pub use params::{lambda, ModelParams};
