//! Reversibility involution, real-coefficient test, symmetrization and
//! momentum projections.

use super::field::VectorField;
use super::monomial::{momentum, Component, MonomialKey};
use super::sites::SiteSet;
use crate::scalar::Real;

/// Tolerance for the structural predicates on complex coefficients.
pub const STRUCT_TOL: f64 = 1e-12;

fn mirror_sparse(s: &[(i32, u32)]) -> Vec<(i32, u32)> {
    s.iter().map(|&(j, e)| (-j, e)).collect()
}

/// Image of a single monomial under `X ↦ S∘X∘S`; returns the new key and the
/// sign picked up by the coefficient.
pub fn involute_key(key: &MonomialKey, sites: &SiteSet) -> (MonomialKey, bool) {
    let n = sites.n();
    let mut k = vec![0; n];
    let mut i = vec![0; n];
    for p in 0..n {
        let q = SiteSet::mirror(p);
        k[p] = -key.k[q];
        i[p] = key.i[q];
    }
    let (component, flip) = match key.component {
        Component::X(j) => (Component::X(-j), true),
        Component::Y(j) => (Component::Y(-j), false),
        Component::Z(j) => (Component::Zbar(-j), false),
        Component::Zbar(j) => (Component::Z(-j), false),
    };
    let new = MonomialKey::new(
        component,
        k,
        i,
        mirror_sparse(&key.beta),
        mirror_sparse(&key.alpha),
    );
    (new, flip)
}

/// The pushforward `S∘X∘S` with `S(x_j, y_j, z_j, z̄_j) = (−x_{−j}, y_{−j}, z̄_{−j}, z_{−j})`.
pub fn apply_involution<T: Real>(x: &VectorField<T>) -> VectorField<T> {
    let mut out = x.empty_like();
    for (key, c) in x.terms() {
        let (nk, flip) = involute_key(key, x.sites());
        out.add_unchecked(nk, if flip { -*c } else { *c });
    }
    out
}

/// `S∘X∘S = −X` up to [`STRUCT_TOL`] on every coefficient.
///
/// The test is linear in `X`, so whether the normal form is part of `X` does
/// not change the outcome for a reversible normal form.
pub fn check_reversible<T: Real>(x: &VectorField<T>) -> bool {
    let tol = T::lit(STRUCT_TOL);
    let s = apply_involution(x);
    s.add(x).map(|d| d.max_abs_coeff() <= tol).unwrap_or(false)
}

/// Components `X^(x)`, `iX^(y)`, `iX^(z)`, `iX^(z̄)` all have real coefficients.
pub fn check_real_coefficients<T: Real>(x: &VectorField<T>) -> bool {
    let tol = T::lit(STRUCT_TOL);
    x.terms().all(|(key, c)| match key.component {
        Component::X(_) => c.im.abs() <= tol,
        _ => c.re.abs() <= tol,
    })
}

/// The representative a resonant monomial is replaced by, if any.
///
/// Families over `k ∈ ℤⁿ_odd`: `e^{ik·x}∂_{x_j}`, `e^{ik·x}yⁱ∂_{y_j}` with
/// `|i| ≤ 1`, `e^{ik·x}z_{±j}∂_{z_j}` and `e^{ik·x}z̄_{±j}∂_{z̄_j}`.
pub fn symmetrized_key(key: &MonomialKey, sites: &SiteSet) -> Option<MonomialKey> {
    if !sites.is_odd(&key.k) {
        return None;
    }
    let n = sites.n();
    let zero_k = vec![0; n];
    match key.component {
        Component::X(_) => {
            if key.degree() == 0 {
                return Some(MonomialKey::constant(key.component, n));
            }
        }
        Component::Y(_) => {
            if key.z_degree() == 0 && key.y_degree() <= 1 {
                return Some(MonomialKey::new(key.component, zero_k, key.i.clone(), [], []));
            }
        }
        Component::Z(j) => {
            if key.y_degree() == 0
                && key.beta.is_empty()
                && key.alpha.len() == 1
                && key.alpha[0].1 == 1
                && key.alpha[0].0.abs() == j.abs()
            {
                return Some(MonomialKey::linear(key.component, n, j, false));
            }
        }
        Component::Zbar(j) => {
            if key.y_degree() == 0
                && key.alpha.is_empty()
                && key.beta.len() == 1
                && key.beta[0].1 == 1
                && key.beta[0].0.abs() == j.abs()
            {
                return Some(MonomialKey::linear(key.component, n, j, true));
            }
        }
    }
    None
}

/// True when the monomial lies in one of the resonant families.
pub fn in_resonant_family(key: &MonomialKey, sites: &SiteSet) -> bool {
    symmetrized_key(key, sites).is_some()
}

/// Replaces every resonant-family monomial by its constant-coefficient
/// representative and merges coefficients.
pub fn symmetrize<T: Real>(x: &VectorField<T>) -> VectorField<T> {
    let mut out = x.empty_like();
    for (key, c) in x.terms() {
        let k = symmetrized_key(key, x.sites()).unwrap_or_else(|| key.clone());
        out.add_unchecked(k, *c);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentumMode {
    /// Terms with `|π| ≥ K`.
    High,
    /// Terms with `|π| < K`.
    Low,
}

/// `Π_{|π|≥K}` or its complement.
pub fn project_momentum<T: Real>(x: &VectorField<T>, k: u64, mode: MomentumMode) -> VectorField<T> {
    let sites = x.sites().clone();
    x.filter(|key, _| {
        let pi = momentum(key, &sites).expect("stored keys are validated");
        let high = pi.unsigned_abs() >= k;
        match mode {
            MomentumMode::High => high,
            MomentumMode::Low => !high,
        }
    })
}
