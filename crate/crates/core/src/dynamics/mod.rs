//! Time integration and numerical certificates for non-existence and blow-up.

mod certificates;
mod functionals;
mod integrate;

pub use certificates::{
    blow_up_certificate, mean_average_qp, mean_average_trajectory, BlowupReport, BlowupRow,
    MeanAverageReport,
};
pub use functionals::{
    dh_dt_identity, dm_dt_identity, flux_h, flux_m, linear_energy, lyapunov_h, lyapunov_m,
    IdentityReport,
};
pub use integrate::{integrate, Diagnostics, IntegratorConfig, Trajectory, CFL_LIMIT};
