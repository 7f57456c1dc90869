//! Blow-up comparison and averaging certificates.

use serde::{Deserialize, Serialize};

use super::integrate::Trajectory;
use crate::error::{Error, Result};
use crate::qp::QpSolution;
use crate::scalar::Real;
use crate::spectral;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    pub t: f64,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    /// Initial mean velocity.
    pub w0: f64,
    pub flag_time: Option<f64>,
    /// `1/w₀`, when `w₀ > 0`.
    pub predicted_time: Option<f64>,
    /// Smallest `(1/w₀ − t) − 1/ȳ'(t)` over checked records. The comparison
    /// is tested in this reciprocal form, whose discretization error stays
    /// bounded up to the singularity.
    pub min_margin: f64,
    /// `ȳ'(t) ≥ w₀/(1 − w₀t)` (slack `1e−6` in the reciprocal) at every checked record.
    pub holds: bool,
    /// `w₀ ≤ 0`: the comparison bound carries no information.
    pub inconclusive: bool,
    pub rows: Vec<BlowupRow>,
}

/// Checks `ȳ'(t) ≥ w₀/(1 − w₀t)` along a trajectory of `y_tt − y_xx = y_t²`.
pub fn blow_up_certificate<T: Real>(traj: &Trajectory<T>) -> BlowupReport {
    let w0 = traj.diagnostics.first().map(|d| d.meanvel).unwrap_or(0.0);
    let mut rep = BlowupReport {
        w0,
        flag_time: traj.blowup_time,
        predicted_time: (w0 > 0.0).then(|| 1.0 / w0),
        min_margin: f64::INFINITY,
        holds: true,
        inconclusive: w0 <= 0.0,
        rows: Vec::new(),
    };
    if rep.inconclusive {
        return rep;
    }
    for d in &traj.diagnostics {
        if w0 * d.t >= 1.0 {
            break;
        }
        let bound = w0 / (1.0 - w0 * d.t);
        let margin = if d.meanvel > 0.0 {
            (1.0 / w0 - d.t) - 1.0 / d.meanvel
        } else {
            f64::NEG_INFINITY
        };
        rep.min_margin = rep.min_margin.min(margin);
        if margin < -1e-6 {
            rep.holds = false;
        }
        rep.rows.push(BlowupRow { t: d.t, observed: d.meanvel, bound });
    }
    rep
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanAverageReport {
    pub p: u32,
    pub q: u32,
    /// Space-time average of `y_x^p`.
    pub avg_yx: f64,
    /// Space-time average of `y_t^q`.
    pub avg_yt: f64,
}

/// Torus × space averages of `y_x^p` and `y_t^q` for a quasi-periodic
/// candidate; the grids resolve the powers exactly.
pub fn mean_average_qp<T: Real>(sol: &QpSolution<T>, p: u32, q: u32) -> Result<MeanAverageReport> {
    let d = sol.dim();
    let pm = p.max(q).max(1) as usize;
    let side = pm * sol.l_max as usize + 1;
    let total = side.pow(d as u32);
    if total > 1 << 20 {
        return Err(Error::Config(format!("averaging grid of {total} angle points is too large")));
    }
    let n = (pm * sol.j_max as usize + 1).next_power_of_two().max(8);
    let x = spectral::grid::<T>(n);
    let h = T::TAU() / T::from_int(side as i64);
    let (mut sy, mut sv) = (T::zero(), T::zero());
    for idx in 0..total {
        let mut r = idx;
        let theta: Vec<T> = (0..d)
            .map(|_| {
                let t = T::from_int((r % side) as i64) * h;
                r /= side;
                t
            })
            .collect();
        for &xk in &x {
            let (mut yx, mut v) = (T::zero(), T::zero());
            for (l, j, c) in sol.entries() {
                if c == T::zero() {
                    continue;
                }
                let ph: T = l.iter().zip(&theta).map(|(&a, &t)| T::from_int(a as i64) * t).sum();
                let lw: T = l.iter().zip(&sol.omega).map(|(&a, &w)| T::from_int(a as i64) * w).sum();
                let jj = T::from_int(j as i64);
                yx -= c * jj * ph.cos() * (jj * xk).sin();
                v -= c * lw * ph.sin() * (jj * xk).cos();
            }
            sy += yx.powi(p as i32);
            sv += v.powi(q as i32);
        }
    }
    let cnt = T::from_int((total * n) as i64);
    Ok(MeanAverageReport { p, q, avg_yx: (sy / cnt).as_f64(), avg_yt: (sv / cnt).as_f64() })
}

/// Time average (trapezoid over records) of the spatial means of `y_x^p`, `v^q`.
pub fn mean_average_trajectory<T: Real>(traj: &Trajectory<T>, p: u32, q: u32) -> Result<MeanAverageReport> {
    if traj.states.len() != traj.times.len() || traj.times.len() < 2 {
        return Err(Error::Contract("averaging needs ≥ 2 stored states".into()));
    }
    let means: Vec<(f64, f64)> = traj
        .states
        .iter()
        .map(|s| {
            let yx = spectral::derivative(&s.y, 1);
            let n = T::from_int(s.len() as i64);
            let a = yx.iter().map(|&d| d.powi(p as i32)).sum::<T>() / n;
            let b = s.v.iter().map(|&d| d.powi(q as i32)).sum::<T>() / n;
            (a.as_f64(), b.as_f64())
        })
        .collect();
    let (mut ay, mut av) = (0.0, 0.0);
    for i in 1..means.len() {
        let dt = traj.times[i] - traj.times[i - 1];
        ay += 0.5 * dt * (means[i].0 + means[i - 1].0);
        av += 0.5 * dt * (means[i].1 + means[i - 1].1);
    }
    let span = traj.times[traj.times.len() - 1] - traj.times[0];
    if !(span > 0.0) {
        return Err(Error::Contract("averaging needs a positive time span".into()));
    }
    Ok(MeanAverageReport { p, q, avg_yx: ay / span, avg_yt: av / span })
}
