use std::collections::BTreeMap;

use super::complex_form::ComplexState;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::qp::{QpSolution, DEFAULT_L_MAX};
use crate::scalar::{Cplx, Real};

/// `y(t, x) = Σ_{j∈I⁺} (√(8ξ_j)/λ_j) cos(λ_j t) cos(jx)`, the solution of the
/// linear equation with amplitudes `ξ`.
pub fn linear_solution<T: Real>(params: &ModelParams<T>) -> QpSolution<T> {
    let sites = params.sites().plus().to_vec();
    let lam = params.tangential_lambdas();
    let mut sol = QpSolution::zeros(
        sites.clone(),
        lam.clone(),
        params.xi().to_vec(),
        DEFAULT_L_MAX,
        params.truncation().j_max,
    );
    for (a, &j) in sites.iter().enumerate() {
        let amp = (T::lit(8.0) * params.xi()[a]).sqrt() / lam[a];
        let l = sol.unit_mode(a);
        sol.set(&l, j as u32, amp).expect("tangential sites lie within j_max");
    }
    sol
}

/// `u±_j = √(ξ_{|j|} + y_j) e^{±ix_j}` on `I`, `(u⁺_j, u⁻_j) = (z_j, z̄_j)` off `I`.
///
/// `x` and `y` follow the site enumeration of `params.sites()`.
pub fn action_angle_embed<T: Real>(
    params: &ModelParams<T>,
    x: &[T],
    y: &[T],
    z: &BTreeMap<i32, Cplx<T>>,
    zbar: &BTreeMap<i32, Cplx<T>>,
) -> Result<ComplexState<T>> {
    let sites = params.sites();
    let n = params.grid_n();
    if x.len() != sites.n() || y.len() != sites.n() {
        return Err(Error::Domain(format!(
            "angles/actions need {} entries, got {}/{}",
            sites.n(),
            x.len(),
            y.len()
        )));
    }
    let mut cs = ComplexState::zeros(n);
    for (p, j) in sites.sites().into_iter().enumerate() {
        let xi = params.xi_at(j).expect("site from the set");
        if y[p].abs() >= xi {
            return Err(Error::Domain(format!(
                "action y_{j} = {} outside (−ξ, ξ) with ξ = {xi}",
                y[p]
            )));
        }
        let r = (xi + y[p]).sqrt();
        cs.set(
            j as i64,
            Cplx::from_polar(r, x[p]),
            Cplx::from_polar(r, -x[p]),
        );
    }
    let half = (n / 2) as i32;
    for (map, plus) in [(z, true), (zbar, false)] {
        for (&j, &c) in map {
            if sites.contains(j) || j.abs() >= half {
                return Err(Error::Domain(format!("normal coordinate {j} outside the grid")));
            }
            let idx = crate::spectral::index_of(j as i64, n);
            if plus {
                cs.plus[idx] = c;
            } else {
                cs.minus[idx] = c;
            }
        }
    }
    Ok(cs)
}

/// Angles `arg u⁺_j` and actions `|u⁺_j|² − ξ_{|j|}` on `I`.
pub fn action_angle_extract<T: Real>(
    params: &ModelParams<T>,
    cs: &ComplexState<T>,
) -> (Vec<T>, Vec<T>) {
    params
        .sites()
        .sites()
        .into_iter()
        .map(|j| {
            let u = cs.get_plus(j as i64);
            (u.arg(), u.norm_sqr() - params.xi_at(j).expect("site from the set"))
        })
        .unzip()
}
