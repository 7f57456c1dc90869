//! Lie bracket of sparse monomial vector fields.
//!
//! Convention: `[X, Y] = (DX)Y − (DY)X = L_Y X − L_X Y`, where `L_V W` is the
//! derivative of the coefficient function of `W` along `V`. With this
//! convention monomials are eigenvectors of `ad_{X_M}` with eigenvalue `iπ`,
//! i.e. `[m, X_M] = iπ(m) m`.

use super::field::VectorField;
use super::monomial::{sparse_combine, sparse_get, Component, MonomialKey};
use super::sites::SiteSet;
use crate::error::Result;
use crate::scalar::{Cplx, Real};

/// Result of a truncated bracket together with what was cut off.
#[derive(Clone, Debug)]
pub struct BracketOutcome<T: Real> {
    pub field: VectorField<T>,
    /// Terms that exceeded `d_max` or `k_max`.
    pub discarded: Vec<(MonomialKey, Cplx<T>)>,
}

impl<T: Real> BracketOutcome<T> {
    /// `ℓ¹` mass of the discarded coefficients.
    pub fn discarded_mass(&self) -> T {
        self.discarded.iter().map(|(_, c)| c.norm()).sum()
    }
}

/// `L_V W` for a single pair of monomials: derivative of `w`'s coefficient
/// function along `v`. Returns `None` when the derivative vanishes.
pub(crate) fn lie_derivative_term<T: Real>(
    sites: &SiteSet,
    v: (&MonomialKey, Cplx<T>),
    w: (&MonomialKey, Cplx<T>),
) -> Option<(MonomialKey, Cplx<T>)> {
    let (vk, vc) = v;
    let (wk, wc) = w;
    let n = sites.n();
    let mut i_out: Vec<u32> = vk.i.iter().zip(&wk.i).map(|(a, b)| a + b).collect();
    let mut lower_alpha = None;
    let mut lower_beta = None;
    let factor: Cplx<T> = match vk.component {
        Component::X(j) => {
            let p = sites.position(j)?;
            let kp = wk.k[p];
            if kp == 0 {
                return None;
            }
            Cplx::new(T::zero(), T::from_int(kp as i64))
        }
        Component::Y(j) => {
            let p = sites.position(j)?;
            let e = wk.i[p];
            if e == 0 {
                return None;
            }
            i_out[p] -= 1;
            Cplx::new(T::from_int(e as i64), T::zero())
        }
        Component::Z(j) => {
            let e = sparse_get(&wk.alpha, j);
            if e == 0 {
                return None;
            }
            lower_alpha = Some(j);
            Cplx::new(T::from_int(e as i64), T::zero())
        }
        Component::Zbar(j) => {
            let e = sparse_get(&wk.beta, j);
            if e == 0 {
                return None;
            }
            lower_beta = Some(j);
            Cplx::new(T::from_int(e as i64), T::zero())
        }
    };
    debug_assert_eq!(vk.k.len(), n);
    let key = MonomialKey {
        component: wk.component,
        k: vk.k.iter().zip(&wk.k).map(|(a, b)| a + b).collect(),
        i: i_out,
        alpha: sparse_combine(&vk.alpha, &wk.alpha, lower_alpha),
        beta: sparse_combine(&vk.beta, &wk.beta, lower_beta),
    };
    Some((key, vc * wc * factor))
}

/// Truncated Lie bracket with a report of the discarded terms.
pub fn lie_bracket_report<T: Real>(
    x: &VectorField<T>,
    y: &VectorField<T>,
) -> Result<BracketOutcome<T>> {
    x.check_compatible(y)?;
    let sites = x.sites();
    let trunc = *x.truncation();
    let mut out = x.empty_like();
    let mut cut = x.empty_like();
    let mut push = |key: MonomialKey, c: Cplx<T>| {
        if key.within(&trunc) {
            out.add_unchecked(key, c);
        } else {
            cut.add_unchecked(key, c);
        }
    };
    for (xk, xc) in x.terms() {
        for (yk, yc) in y.terms() {
            // L_Y X
            if let Some((k, c)) = lie_derivative_term(sites, (yk, *yc), (xk, *xc)) {
                push(k, c);
            }
            // − L_X Y
            if let Some((k, c)) = lie_derivative_term(sites, (xk, *xc), (yk, *yc)) {
                push(k, -c);
            }
        }
    }
    Ok(BracketOutcome {
        field: out,
        discarded: cut.terms().map(|(k, c)| (k.clone(), *c)).collect(),
    })
}

/// `[X, Y] = (DX)Y − (DY)X`, truncated to `d_max` and `k_max`.
pub fn lie_bracket<T: Real>(x: &VectorField<T>, y: &VectorField<T>) -> Result<VectorField<T>> {
    Ok(lie_bracket_report(x, y)?.field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vf_algebra::{momentum, Truncation};

    fn c(re: f64, im: f64) -> Cplx<f64> {
        Cplx::new(re, im)
    }

    #[test]
    fn self_bracket_vanishes() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(4, 4, 3);
        let x = VectorField::from_terms(
            s,
            t,
            [(MonomialKey::linear(Component::Z(2), 2, 2, false), c(1.0, 0.0))],
        )
        .unwrap();
        assert!(lie_bracket(&x, &x).unwrap().is_empty());
    }

    #[test]
    fn constant_x_field_against_fourier_mode() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(4, 4, 3);
        let dx = VectorField::from_terms(
            s.clone(),
            t,
            [(MonomialKey::constant(Component::X(1), 2), c(1.0, 0.0))],
        )
        .unwrap();
        let key = MonomialKey::new(Component::Y(1), vec![1, 0], vec![0, 0], [], []);
        let e = VectorField::from_terms(s, t, [(key.clone(), c(1.0, 0.0))]).unwrap();
        // (DX)Y − (DY)X with X = ∂_{x₁}: only −(DY)X survives.
        let b = lie_bracket(&dx, &e).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.coeff(&key), c(0.0, -1.0));
        let b2 = lie_bracket(&e, &dx).unwrap();
        assert_eq!(b2.coeff(&key), c(0.0, 1.0));
    }

    #[test]
    fn momentum_eigenvector_single_case() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(6, 4, 3);
        let xm = VectorField::<f64>::momentum_field(&s, t);
        let key = MonomialKey::new(Component::Z(3), vec![1, 0], vec![0, 0], [(5, 1)], []);
        let m = VectorField::from_terms(s.clone(), t, [(key.clone(), c(0.5, -0.25))]).unwrap();
        let b = lie_bracket(&m, &xm).unwrap();
        let pi = momentum(&key, &s).unwrap() as f64;
        assert_eq!(b.len(), 1);
        assert_eq!(b.coeff(&key), c(0.0, pi) * c(0.5, -0.25));
    }

    #[test]
    fn truncation_reports_discarded() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(4, 4, 2);
        let a = MonomialKey::new(Component::Z(2), vec![0, 0], vec![0, 0], [(2, 2)], []);
        let b = MonomialKey::new(Component::Z(2), vec![0, 0], vec![0, 0], [(3, 2)], []);
        let x = VectorField::from_terms(s.clone(), t, [(a, c(1.0, 0.0))]).unwrap();
        let y = VectorField::from_terms(s, t, [(b, c(1.0, 0.0))]).unwrap();
        let out = lie_bracket_report(&x, &y).unwrap();
        assert!(out.field.is_empty());
        assert!(out.discarded_mass() > 0.0);
    }
}
