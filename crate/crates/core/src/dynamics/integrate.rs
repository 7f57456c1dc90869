//! Pseudo-spectral RK4 for `y_t = v`, `v_t = y_xx − m y + g(x, y, y_x, v)`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::functionals::{linear_energy, lyapunov_h, lyapunov_m};
use crate::error::{Error, Result};
use crate::model::{FieldState, GTerm, NonlinearitySpec};
use crate::scalar::Real;
use crate::spectral;

/// Largest `dt·λ_max` accepted; RK4 is stable on `[−2.82i, 2.82i]`.
pub const CFL_LIMIT: f64 = 2.8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Record every this many accepted steps.
    pub record_every: usize,
    /// Advance with two half steps and compare against one full step.
    pub error_estimate: bool,
    pub keep_states: bool,
    /// `‖v‖∞` at which the run stops with the blow-up flag.
    pub blowup_threshold: f64,
    /// Shrink the step to `0.1/max(‖v‖∞, ‖y_x‖∞)` when that is smaller than `dt`.
    pub adaptive: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            t_end: 1.0,
            record_every: 1,
            error_estimate: true,
            keep_states: false,
            blowup_threshold: 1e6,
            adaptive: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    /// `∫ v² + y_x² + m y²`.
    pub energy: f64,
    pub m: f64,
    pub h: f64,
    /// Spatial means of `y` and `v`.
    pub mean: f64,
    pub meanvel: f64,
    pub flag: bool,
    /// Step-doubling estimate of the local error of the last step.
    pub err: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub times: Vec<f64>,
    /// Empty unless [`IntegratorConfig::keep_states`].
    pub states: Vec<FieldState<T>>,
    pub diagnostics: Vec<Diagnostics>,
    pub blowup_time: Option<f64>,
    pub final_state: FieldState<T>,
}

impl<T: Real> Trajectory<T> {
    /// CSV with columns `t,energy,M,H,mean,meanvel,flag`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "t,energy,M,H,mean,meanvel,flag")?;
        for d in &self.diagnostics {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
                d.t, d.energy, d.m, d.h, d.mean, d.meanvel, d.flag as u8
            )?;
        }
        Ok(())
    }

    pub fn max_error_estimate(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.err).fold(0.0, f64::max)
    }

    /// Spacing of the record times if uniform to `1e−9` relative.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let h = self.times[1] - self.times[0];
        self.times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
            .then_some(h)
    }
}

pub(crate) struct Rhs<T: Real> {
    mass: T,
    terms: Vec<GTerm<T>>,
    x: Vec<T>,
}

impl<T: Real> Rhs<T> {
    pub(crate) fn new(mass: T, g: &NonlinearitySpec<T>, n: usize) -> Self {
        Self { mass, terms: g.terms(), x: spectral::grid(n) }
    }

    pub(crate) fn g_values(&self, s: &FieldState<T>, yx: &[T]) -> Vec<T> {
        (0..s.len())
            .map(|k| self.terms.iter().map(|t| t.eval(self.x[k], s.y[k], yx[k], s.v[k])).sum())
            .collect()
    }

    fn eval(&self, s: &FieldState<T>) -> FieldState<T> {
        let yx = spectral::derivative(&s.y, 1);
        let yxx = spectral::derivative(&s.y, 2);
        let g = self.g_values(s, &yx);
        let vt = (0..s.len()).map(|k| yxx[k] - self.mass * s.y[k] + g[k]).collect();
        FieldState { y: s.v.clone(), v: vt }
    }

    fn rk4(&self, s: &FieldState<T>, dt: T) -> FieldState<T> {
        let comb = |a: &FieldState<T>, c: T, b: &FieldState<T>| FieldState {
            y: a.y.iter().zip(&b.y).map(|(&p, &q)| p + c * q).collect(),
            v: a.v.iter().zip(&b.v).map(|(&p, &q)| p + c * q).collect(),
        };
        let half = T::lit(0.5) * dt;
        let k1 = self.eval(s);
        let k2 = self.eval(&comb(s, half, &k1));
        let k3 = self.eval(&comb(s, half, &k2));
        let k4 = self.eval(&comb(s, dt, &k3));
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        FieldState {
            y: (0..s.len())
                .map(|k| s.y[k] + sixth * (k1.y[k] + two * (k2.y[k] + k3.y[k]) + k4.y[k]))
                .collect(),
            v: (0..s.len())
                .map(|k| s.v[k] + sixth * (k1.v[k] + two * (k2.v[k] + k3.v[k]) + k4.v[k]))
                .collect(),
        }
    }
}

fn sup<T: Real>(v: &[T]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs().as_f64()))
}

fn diagnostics<T: Real>(s: &FieldState<T>, g: &NonlinearitySpec<T>, mass: T, t: f64, err: f64) -> Diagnostics {
    let n = T::from_int(s.len() as i64);
    Diagnostics {
        t,
        energy: linear_energy(s, mass).as_f64(),
        m: lyapunov_m(s).as_f64(),
        h: lyapunov_h(s, g, mass).as_f64(),
        mean: (s.y.iter().copied().sum::<T>() / n).as_f64(),
        meanvel: (s.v.iter().copied().sum::<T>() / n).as_f64(),
        flag: false,
        err,
    }
}

/// Integrates from `state0` up to `cfg.t_end` or until `‖v‖∞` exceeds the
/// blow-up threshold. `mass ≥ 0`.
pub fn integrate<T: Real>(
    state0: &FieldState<T>,
    g: &NonlinearitySpec<T>,
    mass: T,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<T>> {
    let n = state0.len();
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::Config(format!("grid size must be a power of two ≥ 4, got {n}")));
    }
    if state0.y.len() != state0.v.len() {
        return Err(Error::Config("y and v must have the same length".into()));
    }
    if mass < T::zero() {
        return Err(Error::Config(format!("mass must be nonnegative, got {mass}")));
    }
    if !(cfg.dt > 0.0) || !(cfg.t_end >= 0.0) || cfg.record_every == 0 {
        return Err(Error::Config("need dt > 0, t_end ≥ 0 and record_every ≥ 1".into()));
    }
    let k = (n / 2) as f64;
    let lam_max = (k * k + mass.as_f64()).sqrt();
    if cfg.dt * lam_max > CFL_LIMIT {
        return Err(Error::Config(format!(
            "CFL violation: dt·λ_max = {:.4} > {CFL_LIMIT} (dt = {}, N = {n})",
            cfg.dt * lam_max,
            cfg.dt
        )));
    }
    let rhs = Rhs::new(mass, g, n);
    let mut s = state0.clone();
    let mut t = 0.0f64;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: Vec::new(),
        diagnostics: vec![diagnostics(&s, g, mass, 0.0, 0.0)],
        blowup_time: None,
        final_state: s.clone(),
    };
    if cfg.keep_states {
        traj.states.push(s.clone());
    }
    let mut steps = 0usize;
    let eps = 1e-12 * cfg.t_end.max(1.0);
    while t < cfg.t_end - eps {
        let mut dt = cfg.dt.min(cfg.t_end - t);
        if cfg.adaptive {
            let rate = sup(&s.v).max(sup(&spectral::derivative(&s.y, 1)));
            if rate > 0.0 {
                dt = dt.min(0.1 / rate);
            }
        }
        let h = T::lit(dt);
        let (next, err) = if cfg.error_estimate {
            let full = rhs.rk4(&s, h);
            let half = T::lit(0.5) * h;
            let two = rhs.rk4(&rhs.rk4(&s, half), half);
            let e = full.max_diff(&two).as_f64() / 15.0;
            (two, e)
        } else {
            (rhs.rk4(&s, h), 0.0)
        };
        s = next;
        t += dt;
        steps += 1;
        let vmax = sup(&s.v);
        let blown = !(vmax <= cfg.blowup_threshold) || s.y.iter().any(|v| !v.is_finite());
        if blown || steps % cfg.record_every == 0 || t >= cfg.t_end - eps {
            let mut d = diagnostics(&s, g, mass, t, err);
            d.flag = blown;
            traj.times.push(t);
            traj.diagnostics.push(d);
            if cfg.keep_states {
                traj.states.push(s.clone());
            }
        }
        if blown {
            traj.blowup_time = Some(t);
            break;
        }
    }
    traj.final_state = s;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_oscillates_at_lambda() {
        let n = 16;
        let lam = 5f64.sqrt();
        let s0 = FieldState::from_fn(n, |x: f64| (2.0 * x).cos(), |_| 0.0);
        let cfg = IntegratorConfig { dt: 0.01, t_end: 3.0, ..Default::default() };
        let tr = integrate(&s0, &NonlinearitySpec::zero(), 1.0, &cfg).unwrap();
        let want = FieldState::from_fn(n, |x: f64| (lam * 3.0).cos() * (2.0 * x).cos(), |x: f64| {
            -lam * (lam * 3.0).sin() * (2.0 * x).cos()
        });
        assert!(tr.final_state.max_diff(&want) < 1e-8);
        assert!(tr.uniform_step().is_some());
    }

    #[test]
    fn cfl_is_enforced() {
        let s0 = FieldState::from_fn(64, |x: f64| x.cos(), |_| 0.0);
        let cfg = IntegratorConfig { dt: 0.1, ..Default::default() };
        assert!(matches!(integrate(&s0, &NonlinearitySpec::zero(), 1.0, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn csv_header() {
        let s0 = FieldState::from_fn(8, |x: f64| x.cos(), |_| 0.0);
        let cfg = IntegratorConfig { dt: 0.1, t_end: 0.3, ..Default::default() };
        let tr = integrate(&s0, &NonlinearitySpec::zero(), 1.0, &cfg).unwrap();
        let mut out = Vec::new();
        tr.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("t,energy,M,H,mean,meanvel,flag\n"));
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn evenness_is_preserved() {
        let s0 = FieldState::from_fn(32, |x: f64| 0.3 * x.cos() + 0.1 * (2.0 * x).cos(), |x: f64| 0.2 * (3.0 * x).cos());
        let cfg = IntegratorConfig { dt: 0.02, t_end: 2.0, keep_states: true, ..Default::default() };
        let tr = integrate(&s0, &NonlinearitySpec::leading(), 1.0, &cfg).unwrap();
        for s in &tr.states {
            assert!(s.evenness_defect() < 1e-12);
        }
    }
}
