//! Finite-time Lyapunov exponents of the linearization along a torus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::solution::QpSolution;
use crate::error::{Error, Result};
use crate::model::{GTerm, NonlinearitySpec};
use crate::scalar::Real;
use crate::spectral;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LyapunovConfig {
    /// Grid for the variational equation.
    pub grid_n: usize,
    pub dt: f64,
    /// Times at which `χ(T)` is reported; the run stops at the largest.
    pub checkpoints: Vec<f64>,
    /// Renormalization interval.
    pub renorm: f64,
    /// Adds `−κ·v³` to `g` in the linearization (control runs).
    pub friction: f64,
    pub seed: u64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            grid_n: 32,
            dt: 0.05,
            checkpoints: vec![1e2, 1e3, 1e4],
            renorm: 1.0,
            friction: 0.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovPoint {
    pub t: f64,
    pub chi: f64,
    /// `log(T)/T`.
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub points: Vec<LyapunovPoint>,
    /// Largest `|χ(T)|·T/log T`.
    pub fit_constant: f64,
    /// `|χ(T)| ≤ 5·log(T)/T` at every checkpoint.
    pub consistent_with_zero: bool,
}

fn partials<T: Real>(terms: &[GTerm<T>], x: T, y: T, yx: T, v: T) -> (T, T, T) {
    let pw = |b: T, e: u32| if e == 0 { T::one() } else { b.powi(e as i32) };
    let (mut gy, mut gyx, mut gv) = (T::zero(), T::zero(), T::zero());
    for t in terms {
        let c = t.coeff * t.x.eval(x);
        let (py, pyx, pv) = (pw(y, t.y), pw(yx, t.yx), pw(v, t.v));
        if t.y > 0 {
            gy += c * T::from_int(t.y as i64) * pw(y, t.y - 1) * pyx * pv;
        }
        if t.yx > 0 {
            gyx += c * T::from_int(t.yx as i64) * py * pw(yx, t.yx - 1) * pv;
        }
        if t.v > 0 {
            gv += c * T::from_int(t.v as i64) * py * pyx * pw(v, t.v - 1);
        }
    }
    (gy, gyx, gv)
}

struct Variational<T: Real> {
    mass: T,
    terms: Vec<GTerm<T>>,
    friction: T,
    x: Vec<T>,
    /// `(ℓ·ω, Y_ℓ(x_k), ∂_xY_ℓ(x_k))` for every harmonic present.
    harmonics: Vec<(T, Vec<T>, Vec<T>)>,
}

impl<T: Real> Variational<T> {
    fn coefficients(&self, t: T) -> (Vec<T>, Vec<T>, Vec<T>) {
        let n = self.x.len();
        let (mut y, mut yx, mut v) = (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]);
        for (w, yl, yxl) in &self.harmonics {
            let (s, c) = (*w * t).sin_cos();
            for k in 0..n {
                y[k] += c * yl[k];
                yx[k] += c * yxl[k];
                v[k] -= *w * s * yl[k];
            }
        }
        let mut a = vec![T::zero(); n];
        let mut b = vec![T::zero(); n];
        let mut cc = vec![T::zero(); n];
        for k in 0..n {
            let (gy, gyx, gv) = partials(&self.terms, self.x[k], y[k], yx[k], v[k]);
            a[k] = gy;
            b[k] = gyx;
            cc[k] = gv - T::lit(3.0) * self.friction * v[k] * v[k];
        }
        (a, b, cc)
    }

    fn rhs(&self, coef: &(Vec<T>, Vec<T>, Vec<T>), w: &[T], u: &[T]) -> (Vec<T>, Vec<T>) {
        let wx = spectral::derivative(w, 1);
        let wxx = spectral::derivative(w, 2);
        let ut = (0..w.len())
            .map(|k| wxx[k] - self.mass * w[k] + coef.0[k] * w[k] + coef.1[k] * wx[k] + coef.2[k] * u[k])
            .collect();
        (u.to_vec(), ut)
    }

    fn energy_norm(&self, w: &[T], u: &[T]) -> T {
        let wx = spectral::derivative(w, 1);
        let h = T::TAU() / T::from_int(w.len() as i64);
        let e: T = (0..w.len())
            .map(|k| u[k] * u[k] + wx[k] * wx[k] + self.mass * w[k] * w[k])
            .sum();
        (e * h).sqrt()
    }
}

/// Integrates `w_tt − w_xx + m w = g_y w + g_{y_x} w_x + g_v w_t` along the
/// solution with RK4 and renormalization in the energy norm, and reports
/// `χ(T) = log(‖w(T)‖/‖w(0)‖)/T` at the checkpoints.
pub fn lyapunov_exponent<T: Real>(
    sol: &QpSolution<T>,
    mass: T,
    g: &NonlinearitySpec<T>,
    cfg: &LyapunovConfig,
) -> Result<LyapunovReport> {
    let n = cfg.grid_n;
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::Config(format!("variational grid must be a power of two ≥ 8, got {n}")));
    }
    if !(cfg.dt > 0.0) || !(cfg.renorm >= cfg.dt) || cfg.checkpoints.is_empty() {
        return Err(Error::Config("need dt > 0, renorm ≥ dt and at least one checkpoint".into()));
    }
    if cfg.checkpoints.iter().any(|&t| !(t > 1.0)) {
        return Err(Error::Config("checkpoints must exceed 1".into()));
    }
    let kmax = (n / 2) as f64;
    let lam_max = (kmax * kmax + mass.as_f64().max(0.0)).sqrt();
    if cfg.dt * lam_max > 2.8 {
        return Err(Error::Config(format!(
            "dt·λ_max = {:.3} exceeds the RK4 stability limit 2.8",
            cfg.dt * lam_max
        )));
    }
    let x = spectral::grid::<T>(n);
    let mut harmonics = Vec::new();
    for (mi, l) in sol.modes().iter().enumerate() {
        let stride = sol.j_max as usize + 1;
        let col = &sol.coeffs()[mi * stride..(mi + 1) * stride];
        if col.iter().all(|&c| c == T::zero()) {
            continue;
        }
        let w: T = l.iter().zip(&sol.omega).map(|(&a, &o)| T::from_int(a as i64) * o).sum();
        let yl: Vec<T> = x
            .iter()
            .map(|&xk| col.iter().enumerate().map(|(j, &c)| c * (T::from_int(j as i64) * xk).cos()).sum())
            .collect();
        let yxl: Vec<T> = x
            .iter()
            .map(|&xk| {
                col.iter()
                    .enumerate()
                    .map(|(j, &c)| -c * T::from_int(j as i64) * (T::from_int(j as i64) * xk).sin())
                    .sum()
            })
            .collect();
        harmonics.push((w, yl, yxl));
    }
    let sys = Variational {
        mass,
        terms: g.terms(),
        friction: T::lit(cfg.friction),
        x: x.clone(),
        harmonics,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w = vec![T::zero(); n];
    let mut u = vec![T::zero(); n];
    for j in 0..=8usize {
        let amp = T::lit(1.0 / ((1 + j) * (1 + j)) as f64);
        let c: [f64; 4] = rng.gen();
        for k in 0..n {
            let (s, co) = (T::from_int(j as i64) * x[k]).sin_cos();
            w[k] += amp * (T::lit(c[0] - 0.5) * co + T::lit(c[1] - 0.5) * s);
            u[k] += amp * (T::lit(c[2] - 0.5) * co + T::lit(c[3] - 0.5) * s);
        }
    }
    let n0 = sys.energy_norm(&w, &u);
    w.iter_mut().chain(u.iter_mut()).for_each(|v| *v /= n0);

    let mut checkpoints = cfg.checkpoints.clone();
    checkpoints.sort_by(|a, b| a.total_cmp(b));
    let t_end = *checkpoints.last().expect("nonempty");
    let steps = (t_end / cfg.dt).round() as u64;
    let renorm_every = ((cfg.renorm / cfg.dt).round() as u64).max(1);
    let dt = T::lit(cfg.dt);
    let half = T::lit(0.5);
    let mut log_acc = 0.0f64;
    let mut points = Vec::new();
    let mut next_cp = 0;
    let axpy = |a: &[T], s: T, b: &[T]| a.iter().zip(b).map(|(&p, &q)| p + s * q).collect::<Vec<T>>();
    for step in 1..=steps {
        let t = T::lit((step - 1) as f64 * cfg.dt);
        let c0 = sys.coefficients(t);
        let ch = sys.coefficients(t + half * dt);
        let c1 = sys.coefficients(t + dt);
        let k1 = sys.rhs(&c0, &w, &u);
        let k2 = sys.rhs(&ch, &axpy(&w, half * dt, &k1.0), &axpy(&u, half * dt, &k1.1));
        let k3 = sys.rhs(&ch, &axpy(&w, half * dt, &k2.0), &axpy(&u, half * dt, &k2.1));
        let k4 = sys.rhs(&c1, &axpy(&w, dt, &k3.0), &axpy(&u, dt, &k3.1));
        let sixth = dt / T::lit(6.0);
        for k in 0..n {
            w[k] += sixth * (k1.0[k] + T::lit(2.0) * (k2.0[k] + k3.0[k]) + k4.0[k]);
            u[k] += sixth * (k1.1[k] + T::lit(2.0) * (k2.1[k] + k3.1[k]) + k4.1[k]);
        }
        let t_now = step as f64 * cfg.dt;
        let at_cp = next_cp < checkpoints.len() && t_now + 0.5 * cfg.dt >= checkpoints[next_cp];
        if step % renorm_every == 0 || at_cp {
            let nr = sys.energy_norm(&w, &u);
            if !(nr.as_f64().is_finite() && nr > T::zero()) {
                return Err(Error::Numerical(format!("variational solution degenerated at t = {t_now}")));
            }
            log_acc += nr.as_f64().ln();
            w.iter_mut().chain(u.iter_mut()).for_each(|v| *v /= nr);
        }
        while next_cp < checkpoints.len() && t_now + 0.5 * cfg.dt >= checkpoints[next_cp] {
            points.push(LyapunovPoint {
                t: t_now,
                chi: log_acc / t_now,
                scale: t_now.ln() / t_now,
            });
            next_cp += 1;
        }
    }
    let fit_constant = points.iter().map(|p| p.chi.abs() / p.scale).fold(0.0, f64::max);
    let consistent_with_zero = points.iter().all(|p| p.chi.abs() <= 5.0 * p.scale);
    Ok(LyapunovReport { points, fit_constant, consistent_with_zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{linear_solution, ModelParams};
    use crate::vf_algebra::{SiteSet, Truncation};

    #[test]
    fn partial_derivatives() {
        let t = [GTerm::new(2.0f64, 1, 2, 0)];
        let (a, b, c) = partials(&t, 0.0, 0.5, 0.3, 0.7);
        assert!((a - 2.0 * 0.09).abs() < 1e-15);
        assert!((b - 2.0 * 2.0 * 0.5 * 0.3).abs() < 1e-15);
        assert_eq!(c, 0.0);
    }

    #[test]
    fn linear_torus_has_zero_exponent() {
        let p = ModelParams::new(1.0, SiteSet::new([1]).unwrap(), vec![1e-3], 64, Truncation::new(12, 8, 3)).unwrap();
        let s = linear_solution(&p);
        let cfg = LyapunovConfig { checkpoints: vec![1e2, 1e3], ..Default::default() };
        let r = lyapunov_exponent(&s, 1.0, &NonlinearitySpec::zero(), &cfg).unwrap();
        assert!(r.consistent_with_zero, "{r:?}");
        assert!(r.fit_constant < 1.0);
    }

    #[test]
    fn cfl_violation_is_rejected() {
        let p = ModelParams::new(1.0, SiteSet::new([1]).unwrap(), vec![1e-3], 64, Truncation::new(12, 8, 3)).unwrap();
        let cfg = LyapunovConfig { dt: 0.5, ..Default::default() };
        assert!(lyapunov_exponent(&linear_solution(&p), 1.0, &NonlinearitySpec::zero(), &cfg).is_err());
    }
}
