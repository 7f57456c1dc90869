//! Sparse algebra of truncated Taylor–Fourier monomial vector fields.

mod bracket;
mod evaluate;
mod field;
pub mod io;
mod monomial;
mod norm;
pub mod random;
mod sites;
mod symmetry;

pub use bracket::{lie_bracket, lie_bracket_report, BracketOutcome};
pub use evaluate::{evaluate, PhasePoint, TangentVector};
pub use field::VectorField;
pub use monomial::{momentum, Component, Monomial, MonomialKey, SparseExp};
pub use norm::{majorant_norm, term_weight, NormContext};
pub use sites::{SiteSet, Truncation};
pub use symmetry::{
    apply_involution, check_real_coefficients, check_reversible, in_resonant_family,
    involute_key, project_momentum, symmetrize, symmetrized_key, MomentumMode, STRUCT_TOL,
};
