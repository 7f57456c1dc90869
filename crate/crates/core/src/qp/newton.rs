//! Newton iteration for quasi-periodic standing waves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solution::{half_box_modes, QpSolution};
use crate::error::{Error, Result};
use crate::model::{GTerm, ModelParams, NonlinearitySpec};
use crate::scalar::Real;
use crate::spectral;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NewtonConfig {
    /// Target for [`qp_residual`].
    pub tol: f64,
    pub max_iter: usize,
    /// Relative finite-difference step.
    pub fd_step: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_iter: 30,
            fd_step: 1e-7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Grid residual before the first step and after each step.
    pub residuals: Vec<f64>,
    /// `‖δ‖∞` of each step.
    pub steps: Vec<f64>,
    pub residual: f64,
    /// Largest `r_{n+1}/r_n²` over steps taken below `1e−4`.
    pub quadratic_constant: Option<f64>,
}

/// The truncated problem `y_tt − y_xx + m y = g` on the torus-Fourier ×
/// cosine basis of a [`QpSolution`], with angle grid `(2L+1)^d` and
/// `grid_n` points in `x`.
pub struct QpProblem<T: Real> {
    mass: T,
    terms: Vec<GTerm<T>>,
    l_max: u32,
    j_max: u32,
    d: usize,
    x: Vec<T>,
    cos_jx: Vec<T>,
    sin_jx: Vec<T>,
    /// `cos(ℓ·θ_p)` and `sin(ℓ·θ_p)`, row per angle point.
    cos_lt: Vec<T>,
    sin_lt: Vec<T>,
    modes: Vec<Vec<i32>>,
    n_theta: usize,
}

impl<T: Real> QpProblem<T> {
    /// `mass ≥ 0` is accepted here so that massless equations can be
    /// probed; the model layer itself requires `m > 0`.
    pub fn new(
        mass: T,
        g: &NonlinearitySpec<T>,
        d: usize,
        l_max: u32,
        j_max: u32,
        grid_n: usize,
    ) -> Result<Self> {
        if mass < T::zero() {
            return Err(Error::Config(format!("mass must be nonnegative, got {mass}")));
        }
        if d == 0 {
            return Err(Error::Config("at least one tangential site is required".into()));
        }
        let deg = g.max_degree().max(1) as usize;
        if (deg + 1) * j_max as usize >= grid_n {
            return Err(Error::Domain(format!(
                "grid of {grid_n} points cannot project a degree-{deg} nonlinearity onto {} modes",
                j_max + 1
            )));
        }
        let jn = j_max as usize + 1;
        let x = spectral::grid::<T>(grid_n);
        let mut cos_jx = Vec::with_capacity(grid_n * jn);
        let mut sin_jx = Vec::with_capacity(grid_n * jn);
        for &xk in &x {
            for j in 0..jn {
                let a = T::from_int(j as i64) * xk;
                cos_jx.push(a.cos());
                sin_jx.push(a.sin());
            }
        }
        let modes = half_box_modes(d, l_max);
        let side = 2 * l_max as usize + 1;
        let n_theta = side.pow(d as u32);
        let h = T::TAU() / T::from_int(side as i64);
        let mut cos_lt = Vec::with_capacity(n_theta * modes.len());
        let mut sin_lt = Vec::with_capacity(n_theta * modes.len());
        for p in 0..n_theta {
            let mut q = p;
            let theta: Vec<T> = (0..d)
                .map(|_| {
                    let t = T::from_int((q % side) as i64) * h;
                    q /= side;
                    t
                })
                .collect();
            for l in &modes {
                let ph: T = l.iter().zip(&theta).map(|(&a, &t)| T::from_int(a as i64) * t).sum();
                cos_lt.push(ph.cos());
                sin_lt.push(ph.sin());
            }
        }
        Ok(Self {
            mass,
            terms: g.terms(),
            l_max,
            j_max,
            d,
            x,
            cos_jx,
            sin_jx,
            cos_lt,
            sin_lt,
            modes,
            n_theta,
        })
    }

    pub fn from_params(
        params: &ModelParams<T>,
        g: &NonlinearitySpec<T>,
        l_max: u32,
        j_max: u32,
    ) -> Result<Self> {
        Self::new(params.mass(), g, params.sites().plus().len(), l_max, j_max, params.grid_n())
    }

    fn check(&self, sol: &QpSolution<T>) -> Result<()> {
        if sol.dim() != self.d || sol.l_max != self.l_max || sol.j_max != self.j_max {
            return Err(Error::Contract(format!(
                "solution truncation (d={}, L={}, J={}) differs from the problem (d={}, L={}, J={})",
                sol.dim(),
                sol.l_max,
                sol.j_max,
                self.d,
                self.l_max,
                self.j_max
            )));
        }
        Ok(())
    }

    fn lw(&self, omega: &[T]) -> Vec<T> {
        self.modes
            .iter()
            .map(|l| l.iter().zip(omega).map(|(&a, &w)| T::from_int(a as i64) * w).sum())
            .collect()
    }

    fn g_at(&self, x: T, y: T, yx: T, v: T) -> T {
        self.terms.iter().map(|t| t.eval(x, y, yx, v)).sum()
    }

    /// Visits `(p, k, y, y_x, v, y_tt − y_xx + m y)` on the tensor grid.
    fn for_grid(&self, sol: &QpSolution<T>, mut f: impl FnMut(usize, usize, T, T, T, T)) {
        let jn = self.j_max as usize + 1;
        let nm = self.modes.len();
        let lw = self.lw(&sol.omega);
        let c = sol.coeffs();
        let mut yj = vec![T::zero(); jn];
        let mut ytj = vec![T::zero(); jn];
        let mut lj = vec![T::zero(); jn];
        for p in 0..self.n_theta {
            yj.iter_mut().for_each(|v| *v = T::zero());
            ytj.iter_mut().for_each(|v| *v = T::zero());
            lj.iter_mut().for_each(|v| *v = T::zero());
            for (mi, &w) in lw.iter().enumerate() {
                let cl = self.cos_lt[p * nm + mi];
                let sl = self.sin_lt[p * nm + mi];
                for j in 0..jn {
                    let cv = c[mi * jn + j];
                    if cv == T::zero() {
                        continue;
                    }
                    yj[j] += cv * cl;
                    ytj[j] -= cv * w * sl;
                    let jj = T::from_int((j * j) as i64);
                    lj[j] += cv * cl * (jj + self.mass - w * w);
                }
            }
            for k in 0..self.x.len() {
                let cr = &self.cos_jx[k * jn..(k + 1) * jn];
                let sr = &self.sin_jx[k * jn..(k + 1) * jn];
                let (mut y, mut yx, mut v, mut lin) = (T::zero(), T::zero(), T::zero(), T::zero());
                for j in 0..jn {
                    y += yj[j] * cr[j];
                    yx -= T::from_int(j as i64) * yj[j] * sr[j];
                    v += ytj[j] * cr[j];
                    lin += lj[j] * cr[j];
                }
                f(p, k, y, yx, v, lin);
            }
        }
    }

    /// Max-norm of `y_tt − y_xx + m y − g` on the `(θ, x)` grid.
    pub fn residual(&self, sol: &QpSolution<T>) -> Result<T> {
        self.check(sol)?;
        let mut r = T::zero();
        self.for_grid(sol, |_, k, y, yx, v, lin| {
            let e = lin - self.g_at(self.x[k], y, yx, v);
            r = r.max(e.abs());
        });
        Ok(r)
    }

    /// Coefficients `ĝ_{ℓ,j}` in the layout of [`QpSolution::coeffs`].
    pub fn project_g(&self, sol: &QpSolution<T>) -> Vec<T> {
        let jn = self.j_max as usize + 1;
        let nm = self.modes.len();
        let n = self.x.len();
        let mut gj = vec![T::zero(); self.n_theta * jn];
        self.for_grid(sol, |p, k, y, yx, v, _| {
            let gv = self.g_at(self.x[k], y, yx, v);
            let cr = &self.cos_jx[k * jn..(k + 1) * jn];
            for j in 0..jn {
                gj[p * jn + j] += gv * cr[j];
            }
        });
        let mut out = vec![T::zero(); nm * jn];
        let nx = T::from_int(n as i64);
        let nt = T::from_int(self.n_theta as i64);
        for (mi, l) in self.modes.iter().enumerate() {
            let wl = if l.iter().all(|&a| a == 0) { T::one() } else { T::lit(2.0) };
            for j in 0..jn {
                let wj = if j == 0 { T::one() } else { T::lit(2.0) };
                let s: T = (0..self.n_theta)
                    .map(|p| gj[p * jn + j] * self.cos_lt[p * nm + mi])
                    .sum();
                out[mi * jn + j] = s * wl * wj / (nx * nt);
            }
        }
        out
    }

    fn pinned_slots(&self, sol: &QpSolution<T>) -> Result<Vec<usize>> {
        (0..self.d)
            .map(|a| {
                let j = sol.sites[a];
                if j < 0 || j as u32 > self.j_max {
                    return Err(Error::Contract(format!("site {j} outside [0, J]")));
                }
                Ok(sol.slot(&sol.unit_mode(a), j as u32).expect("within truncation"))
            })
            .collect()
    }

    /// Coefficient-space equations `((j²+m) − (ℓ·ω)²)ŷ_{ℓ,j} − ĝ_{ℓ,j}`.
    fn equations(&self, sol: &QpSolution<T>) -> Vec<T> {
        let jn = self.j_max as usize + 1;
        let lw = self.lw(&sol.omega);
        let g = self.project_g(sol);
        let c = sol.coeffs();
        (0..c.len())
            .map(|s| {
                let w = lw[s / jn];
                let j = (s % jn) as i64;
                (T::from_int(j * j) + self.mass - w * w) * c[s] - g[s]
            })
            .collect()
    }

    /// Newton iteration with the primary harmonics pinned and `ω` free.
    pub fn newton(&self, init: &QpSolution<T>, cfg: &NewtonConfig) -> Result<(QpSolution<T>, NewtonReport)> {
        self.check(init)?;
        let pinned = self.pinned_slots(init)?;
        let jn = self.j_max as usize + 1;
        let n_eq = init.coeffs().len();
        // unknown u ↦ coefficient slot, or ω_a for the pinned slots
        let unknown_of = |s: usize| pinned.iter().position(|&p| p == s);
        let scale = init.max_abs_coeff().max(T::lit(1e-12));
        let h_rel = T::lit(cfg.fd_step);
        let tol = T::lit(cfg.tol);

        let mut sol = init.clone();
        let mut report = NewtonReport {
            iterations: 0,
            residuals: vec![self.residual(&sol)?.as_f64()],
            steps: Vec::new(),
            residual: 0.0,
            quadratic_constant: None,
        };
        let mut growth = 0;
        loop {
            let res = self.residual(&sol)?;
            report.residual = res.as_f64();
            if res <= tol {
                break;
            }
            if report.iterations >= cfg.max_iter {
                return Err(Error::Numerical(format!(
                    "Newton did not reach residual {:e} in {} iterations (last {:e})",
                    cfg.tol,
                    cfg.max_iter,
                    res.as_f64()
                )));
            }
            let e0 = self.equations(&sol);
            let g0 = self.project_g(&sol);
            let lw = self.lw(&sol.omega);
            let columns: Vec<Vec<T>> = (0..n_eq)
                .into_par_iter()
                .map(|u| {
                    let mut pert = sol.clone();
                    let h;
                    match unknown_of(u) {
                        Some(a) => {
                            h = h_rel * sol.omega[a].abs().max(T::one());
                            pert.omega[a] += h;
                        }
                        None => {
                            h = h_rel * sol.coeffs()[u].abs().max(scale);
                            pert.coeffs_mut()[u] += h;
                        }
                    }
                    let g1 = self.project_g(&pert);
                    let mut col: Vec<T> = g1.iter().zip(&g0).map(|(&a, &b)| -(a - b) / h).collect();
                    match unknown_of(u) {
                        Some(a) => {
                            for (s, cv) in col.iter_mut().enumerate() {
                                let l = self.modes[s / jn][a];
                                if l != 0 {
                                    *cv -= T::lit(2.0) * lw[s / jn] * T::from_int(l as i64) * sol.coeffs()[s];
                                }
                            }
                        }
                        None => {
                            let w = lw[u / jn];
                            let j = (u % jn) as i64;
                            col[u] += T::from_int(j * j) + self.mass - w * w;
                        }
                    }
                    col
                })
                .collect();
            let mut a = vec![T::zero(); n_eq * n_eq];
            for (u, col) in columns.iter().enumerate() {
                for (s, &v) in col.iter().enumerate() {
                    a[s * n_eq + u] = v;
                }
            }
            let rhs: Vec<T> = e0.iter().map(|&v| -v).collect();
            let delta = T::solve_dense(&a, &rhs, n_eq).ok_or_else(|| {
                Error::Numerical("Newton Jacobian is singular (degenerate linearization)".into())
            })?;
            let step = delta.iter().fold(T::zero(), |m, d| m.max(d.abs()));
            if step.is_nan() {
                return Err(Error::Numerical("Newton step is not finite".into()));
            }
            for (u, &d) in delta.iter().enumerate() {
                match unknown_of(u) {
                    Some(a) => sol.omega[a] += d,
                    None => sol.coeffs_mut()[u] += d,
                }
            }
            report.iterations += 1;
            if let Some(&prev) = report.steps.last() {
                if step.as_f64() > prev {
                    growth += 1;
                } else {
                    growth = 0;
                }
            }
            report.steps.push(step.as_f64());
            let r = self.residual(&sol)?.as_f64();
            report.residuals.push(r);
            if growth >= 3 || !r.is_finite() {
                return Err(Error::Numerical(format!(
                    "Newton diverged: step norm grew over 3 iterations (steps {:?}, residuals {:?})",
                    report.steps, report.residuals
                )));
            }
        }
        report.quadratic_constant = report
            .residuals
            .windows(2)
            .filter(|w| w[0] < 1e-4 && w[0] > 0.0 && w[1] > 0.0)
            .map(|w| w[1] / (w[0] * w[0]))
            .fold(None, |m: Option<f64>, c| Some(m.map_or(c, |v| v.max(c))));
        Ok((sol, report))
    }
}

/// [`QpProblem::residual`] for the truncation of `sol`.
pub fn qp_residual<T: Real>(
    sol: &QpSolution<T>,
    params: &ModelParams<T>,
    g: &NonlinearitySpec<T>,
) -> Result<T> {
    QpProblem::from_params(params, g, sol.l_max, sol.j_max)?.residual(sol)
}

/// [`QpProblem::newton`] for the truncation of `init`.
pub fn newton_qp<T: Real>(
    init: &QpSolution<T>,
    params: &ModelParams<T>,
    g: &NonlinearitySpec<T>,
    cfg: &NewtonConfig,
) -> Result<(QpSolution<T>, NewtonReport)> {
    QpProblem::from_params(params, g, init.l_max, init.j_max)?.newton(init, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::linear_solution;
    use crate::vf_algebra::{SiteSet, Truncation};

    fn params(xi: f64, j_max: u32, n: usize) -> ModelParams<f64> {
        ModelParams::new(1.0, SiteSet::new([1]).unwrap(), vec![xi], n, Truncation::new(j_max, 8, 3)).unwrap()
    }

    #[test]
    fn linear_solution_is_exact_without_g() {
        let p = params(1e-3, 8, 64);
        let s = linear_solution(&p);
        assert!(qp_residual(&s, &p, &NonlinearitySpec::zero()).unwrap() < 1e-13);
    }

    #[test]
    fn zero_solution_has_zero_residual() {
        let p = params(1e-3, 8, 64);
        let mut s = linear_solution(&p);
        s.coeffs_mut().iter_mut().for_each(|c| *c = 0.0);
        assert_eq!(qp_residual(&s, &p, &NonlinearitySpec::leading()).unwrap(), 0.0);
    }

    #[test]
    fn projection_of_known_product() {
        // y = a cos θ cos x, g = y·y_x² = a³ cos³θ cos x sin² x
        let p = params(1e-3, 8, 64);
        let s = linear_solution(&p);
        let a = s.get(&[1], 1);
        let prob = QpProblem::from_params(&p, &NonlinearitySpec::leading(), s.l_max, s.j_max).unwrap();
        let g = prob.project_g(&s);
        // cos³θ = (3cos θ + cos 3θ)/4, cos x sin² x = (cos x − cos 3x)/4
        let want = |l: i32, j: u32| {
            let tl = if l == 1 { 0.75 } else if l == 3 { 0.25 } else { 0.0 };
            let tj = if j == 1 { 0.25 } else if j == 3 { -0.25 } else { 0.0 };
            a * a * a * tl * tj
        };
        for l in 0..=6 {
            for j in 0..=8 {
                let got = g[s.slot(&[l], j).unwrap()];
                assert!((got - want(l, j)).abs() < 1e-16, "({l},{j}) {got} vs {}", want(l, j));
            }
        }
    }

    #[test]
    fn newton_converges_at_small_amplitude() {
        let p = params(1e-3, 12, 64);
        let (s, rep) = newton_qp(&linear_solution(&p), &p, &NonlinearitySpec::leading(), &NewtonConfig::default()).unwrap();
        assert!(rep.residual < 1e-11);
        assert!(rep.iterations <= 8);
        assert!((s.omega[0] - 2f64.sqrt()).abs() < 1e-3);
        assert_eq!(s.get(&[1], 1), linear_solution(&p).get(&[1], 1));
    }

    #[test]
    fn rejects_wrong_truncation() {
        let p = params(1e-3, 8, 64);
        let s = QpSolution::zeros(vec![1], vec![1.4], vec![1e-3], 2, 4);
        let prob = QpProblem::from_params(&p, &NonlinearitySpec::leading(), 6, 8).unwrap();
        assert!(prob.residual(&s).is_err());
        assert!(QpProblem::from_params(&p, &NonlinearitySpec::leading(), 6, 16).is_err());
    }
}
