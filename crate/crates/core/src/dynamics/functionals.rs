//! Conserved and monotone functionals and their flux identities.

use serde::{Deserialize, Serialize};

use super::integrate::Trajectory;
use crate::error::{Error, Result};
use crate::model::{FieldState, NonlinearitySpec};
use crate::scalar::Real;
use crate::spectral;

fn quad<T: Real>(f: impl Iterator<Item = T>, n: usize) -> T {
    f.sum::<T>() * T::TAU() / T::from_int(n as i64)
}

/// `∫ v² + y_x² + m y² dx`.
pub fn linear_energy<T: Real>(s: &FieldState<T>, mass: T) -> T {
    let yx = spectral::derivative(&s.y, 1);
    quad((0..s.len()).map(|k| s.v[k] * s.v[k] + yx[k] * yx[k] + mass * s.y[k] * s.y[k]), s.len())
}

/// `M = ∫ y_x v dx`.
pub fn lyapunov_m<T: Real>(s: &FieldState<T>) -> T {
    let yx = spectral::derivative(&s.y, 1);
    quad((0..s.len()).map(|k| yx[k] * s.v[k]), s.len())
}

/// `H = ∫ v²/2 + y_x²/2 − F(x, y) dx` with `F` the antiderivative in `y` of
/// `−m y` plus the terms of `g` that depend on `y` alone.
pub fn lyapunov_h<T: Real>(s: &FieldState<T>, g: &NonlinearitySpec<T>, mass: T) -> T {
    let yx = spectral::derivative(&s.y, 1);
    let x = spectral::grid::<T>(s.len());
    let pure: Vec<_> = g.terms().into_iter().filter(|t| t.yx == 0 && t.v == 0).collect();
    let half = T::lit(0.5);
    quad(
        (0..s.len()).map(|k| {
            let y = s.y[k];
            let f: T = pure
                .iter()
                .map(|t| t.coeff * t.x.eval(x[k]) * y.powi(t.y as i32 + 1) / T::from_int(t.y as i64 + 1))
                .sum();
            half * (s.v[k] * s.v[k] + yx[k] * yx[k] + mass * y * y) - f
        }),
        s.len(),
    )
}

/// `∫ y_x^{p+1} dx`.
pub fn flux_m<T: Real>(s: &FieldState<T>, p: u32) -> T {
    let yx = spectral::derivative(&s.y, 1);
    quad(yx.iter().map(|&d| d.powi(p as i32 + 1)), s.len())
}

/// `∫ v^{p+1} dx`.
pub fn flux_h<T: Real>(s: &FieldState<T>, p: u32) -> T {
    quad(s.v.iter().map(|&d| d.powi(p as i32 + 1)), s.len())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub p: u32,
    /// Interior record times where the difference quotient is formed.
    pub times: Vec<f64>,
    pub numerical: Vec<f64>,
    pub analytic: Vec<f64>,
    pub max_defect: f64,
    /// Nondecreasing within `10·`(step-doubling estimate)`·(1 + |F|)`.
    pub monotone: bool,
    pub min_increment: f64,
    /// Smallest analytic flux; nonnegative for odd `p`.
    pub min_flux: f64,
}

fn identity<T: Real>(
    traj: &Trajectory<T>,
    p: u32,
    values: &[f64],
    flux: impl Fn(&FieldState<T>) -> T,
) -> Result<IdentityReport> {
    let h = traj
        .uniform_step()
        .ok_or_else(|| Error::Contract("flux identity needs uniformly spaced records".into()))?;
    if traj.states.len() != traj.times.len() || traj.times.len() < 5 {
        return Err(Error::Contract("flux identity needs ≥ 5 stored states".into()));
    }
    let n = values.len();
    let mut rep = IdentityReport {
        p,
        times: Vec::new(),
        numerical: Vec::new(),
        analytic: Vec::new(),
        max_defect: 0.0,
        monotone: true,
        min_increment: f64::INFINITY,
        min_flux: f64::INFINITY,
    };
    for i in 2..n - 2 {
        let d = (-values[i + 2] + 8.0 * values[i + 1] - 8.0 * values[i - 1] + values[i - 2]) / (12.0 * h);
        let a = flux(&traj.states[i]).as_f64();
        rep.times.push(traj.times[i]);
        rep.numerical.push(d);
        rep.analytic.push(a);
        rep.max_defect = rep.max_defect.max((d - a).abs());
        rep.min_flux = rep.min_flux.min(a);
    }
    let err = traj.max_error_estimate();
    for w in values.windows(2) {
        let inc = w[1] - w[0];
        rep.min_increment = rep.min_increment.min(inc);
        if inc < -10.0 * err * (1.0 + w[0].abs()) {
            rep.monotone = false;
        }
    }
    Ok(rep)
}

/// Compares the difference quotient of `M` with `∫ y_x^{p+1}`.
pub fn dm_dt_identity<T: Real>(traj: &Trajectory<T>, p: u32) -> Result<IdentityReport> {
    let m: Vec<f64> = traj.diagnostics.iter().map(|d| d.m).collect();
    identity(traj, p, &m, |s| flux_m(s, p))
}

/// Compares the difference quotient of `H` with `∫ v^{p+1}`.
pub fn dh_dt_identity<T: Real>(traj: &Trajectory<T>, p: u32) -> Result<IdentityReport> {
    let h: Vec<f64> = traj.diagnostics.iter().map(|d| d.h).collect();
    identity(traj, p, &h, |s| flux_h(s, p))
}
