//! Continuation of quasi-periodic solutions along a ray in amplitude space.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::newton::{NewtonConfig, QpProblem};
use super::solution::QpSolution;
use crate::error::{Error, Result};
use crate::model::{linear_solution, ModelParams, NonlinearitySpec};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationConfig {
    pub newton: NewtonConfig,
    /// Largest number of successive step halvings before giving up.
    pub max_halvings: u32,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            newton: NewtonConfig::default(),
            max_halvings: 6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ContinuationPoint<T: Real> {
    /// Ray parameter: `ξ = s·direction`.
    pub s: T,
    pub solution: QpSolution<T>,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationFailure {
    pub s: f64,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct ContinuationResult<T: Real> {
    pub path: Vec<ContinuationPoint<T>>,
    pub failures: Vec<ContinuationFailure>,
}

impl<T: Real> ContinuationResult<T> {
    /// CSV with columns `xi,omega_<site>…,residual,iters`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let sites = self.path.first().map(|p| p.solution.sites.clone()).unwrap_or_default();
        let mut head = vec!["xi".to_string()];
        head.extend(sites.iter().map(|j| format!("omega_{j}")));
        head.push("residual".into());
        head.push("iters".into());
        writeln!(w, "{}", head.join(","))?;
        for p in &self.path {
            let mut row = vec![format!("{:e}", p.s)];
            row.extend(p.solution.omega.iter().map(|o| format!("{o:.17e}")));
            row.push(format!("{:e}", p.residual));
            row.push(p.iterations.to_string());
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Sets the primary harmonics to the pinned values for `xi`.
fn repin<T: Real>(sol: &mut QpSolution<T>, xi: &[T], lam: &[T]) -> Result<()> {
    for a in 0..sol.dim() {
        let j = sol.sites[a] as u32;
        let l = sol.unit_mode(a);
        sol.set(&l, j, (T::lit(8.0) * xi[a]).sqrt() / lam[a])?;
    }
    sol.xi = xi.to_vec();
    Ok(())
}

/// Follows `ξ = s·direction` through the increasing `targets`, starting from
/// the linear solution at the first target. A failed Newton solve halves the
/// step; the guess is the previous solution with linearly extrapolated `ω`.
pub fn continuation<T: Real>(
    params: &ModelParams<T>,
    g: &NonlinearitySpec<T>,
    direction: &[T],
    targets: &[T],
    cfg: &ContinuationConfig,
) -> Result<ContinuationResult<T>> {
    let d = params.sites().plus().len();
    if direction.len() != d || direction.iter().any(|&v| !(v > T::zero())) {
        return Err(Error::Config(format!("direction needs {d} positive entries")));
    }
    if targets.is_empty()
        || !(targets[0] > T::zero())
        || targets.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(Error::Config("continuation targets must be positive and increasing".into()));
    }
    let at = |s: T| direction.iter().map(|&v| v * s).collect::<Vec<T>>();
    let lam = params.tangential_lambdas();
    let first = params.with_xi(at(targets[0]))?;
    let init = linear_solution(&first);
    let prob = QpProblem::from_params(params, g, init.l_max, init.j_max)?;

    let mut out = ContinuationResult { path: Vec::new(), failures: Vec::new() };
    let mut prev: Option<(T, QpSolution<T>)> = None;
    let mut prev2: Option<(T, Vec<T>)> = None;
    for &target in targets {
        let mut s = target;
        let mut halvings = 0;
        loop {
            let mut guess = match &prev {
                None => init.clone(),
                Some((_, p)) => p.clone(),
            };
            if let (Some((s1, p1)), Some((s0, w0))) = (&prev, &prev2) {
                let f = (s - *s1) / (*s1 - *s0);
                for a in 0..d {
                    guess.omega[a] = p1.omega[a] + f * (p1.omega[a] - w0[a]);
                }
            }
            repin(&mut guess, &at(s), &lam)?;
            match prob.newton(&guess, &cfg.newton) {
                Ok((sol, rep)) => {
                    if let Some((s1, p1)) = prev.take() {
                        prev2 = Some((s1, p1.omega.clone()));
                    }
                    out.path.push(ContinuationPoint {
                        s,
                        solution: sol.clone(),
                        residual: rep.residual,
                        iterations: rep.iterations,
                    });
                    prev = Some((s, sol));
                    if s == target {
                        break;
                    }
                    s = target;
                    halvings = 0;
                }
                Err(e @ Error::Numerical(_)) => {
                    out.failures.push(ContinuationFailure { s: s.as_f64(), reason: e.to_string() });
                    let base = prev.as_ref().map(|p| p.0);
                    match base {
                        Some(b) if halvings < cfg.max_halvings => {
                            s = b + (s - b) * T::lit(0.5);
                            halvings += 1;
                        }
                        _ => return Ok(out),
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}
