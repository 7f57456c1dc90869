//! Pointwise evaluation of sparse vector fields.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::field::VectorField;
use super::monomial::Component;
use super::sites::{SiteSet, Truncation};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// A point `(x, y, z, z̄)`; absent normal coordinates are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint<T: Real> {
    pub x: Vec<T>,
    pub y: Vec<Cplx<T>>,
    pub z: BTreeMap<i32, Cplx<T>>,
    pub zbar: BTreeMap<i32, Cplx<T>>,
}

/// Value of a vector field, with the same index structure as [`PhasePoint`].
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector<T: Real> {
    pub x: Vec<Cplx<T>>,
    pub y: Vec<Cplx<T>>,
    pub z: BTreeMap<i32, Cplx<T>>,
    pub zbar: BTreeMap<i32, Cplx<T>>,
}

impl<T: Real> PhasePoint<T> {
    pub fn origin(sites: &SiteSet) -> Self {
        Self {
            x: vec![T::zero(); sites.n()],
            y: vec![Cplx::zero(); sites.n()],
            z: BTreeMap::new(),
            zbar: BTreeMap::new(),
        }
    }

    fn check(&self, sites: &SiteSet, trunc: &Truncation) -> Result<()> {
        if self.x.len() != sites.n() || self.y.len() != sites.n() {
            return Err(Error::Domain(format!(
                "point has x/y length {}/{}, expected {}",
                self.x.len(),
                self.y.len(),
                sites.n()
            )));
        }
        for &j in self.z.keys().chain(self.zbar.keys()) {
            if !sites.is_normal(j, trunc.j_max) {
                return Err(Error::Domain(format!(
                    "normal coordinate {j} outside the truncation"
                )));
            }
        }
        Ok(())
    }

    /// True when `x_j = x_{−j}`, `y_j = y_{−j}`, `z_j = z_{−j}`, `z̄_j = z̄_{−j}`.
    pub fn in_even_subspace(&self, tol: T) -> bool {
        pairs_close(&self.x, tol, |a, b| (a - b).abs())
            && pairs_close(&self.y, tol, |a, b| (a - b).norm())
            && maps_even(&self.z, tol)
            && maps_even(&self.zbar, tol)
    }
}

impl<T: Real> TangentVector<T> {
    pub fn zeros(sites: &SiteSet) -> Self {
        Self {
            x: vec![Cplx::zero(); sites.n()],
            y: vec![Cplx::zero(); sites.n()],
            z: BTreeMap::new(),
            zbar: BTreeMap::new(),
        }
    }

    /// Max-norm distance between two tangent vectors.
    pub fn max_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for (a, b) in self.x.iter().zip(&other.x).chain(self.y.iter().zip(&other.y)) {
            m = m.max((*a - *b).norm());
        }
        for (sa, sb) in [(&self.z, &other.z), (&self.zbar, &other.zbar)] {
            for (j, a) in sa {
                m = m.max((*a - sb.get(j).copied().unwrap_or_else(Cplx::zero)).norm());
            }
            for (j, b) in sb {
                if !sa.contains_key(j) {
                    m = m.max(b.norm());
                }
            }
        }
        m
    }

    pub fn in_even_subspace(&self, tol: T) -> bool {
        pairs_close(&self.x, tol, |a, b| (a - b).norm())
            && pairs_close(&self.y, tol, |a, b| (a - b).norm())
            && maps_even(&self.z, tol)
            && maps_even(&self.zbar, tol)
    }
}

fn pairs_close<V: Copy, T: Real>(v: &[V], tol: T, d: impl Fn(V, V) -> T) -> bool {
    v.chunks_exact(2).all(|p| d(p[0], p[1]) <= tol)
}

fn maps_even<T: Real>(m: &BTreeMap<i32, Cplx<T>>, tol: T) -> bool {
    m.iter().all(|(j, a)| {
        let b = m.get(&-j).copied().unwrap_or_else(Cplx::zero);
        (*a - b).norm() <= tol
    })
}

fn ipow<T: Real>(z: Cplx<T>, e: u32) -> Cplx<T> {
    let mut out = Cplx::one();
    for _ in 0..e {
        out *= z;
    }
    out
}

/// Sums `c·e^{ik·x}yⁱz^αz̄^β` into the component slot of every term.
pub fn evaluate<T: Real>(field: &VectorField<T>, pt: &PhasePoint<T>) -> Result<TangentVector<T>> {
    let sites = field.sites();
    pt.check(sites, field.truncation())?;
    let mut out = TangentVector::zeros(sites);
    for (key, c) in field.terms() {
        let phase: T = key
            .k
            .iter()
            .zip(&pt.x)
            .map(|(&k, &x)| T::from_int(k as i64) * x)
            .sum();
        let mut v = *c * Cplx::from_polar(T::one(), phase);
        for (&e, &y) in key.i.iter().zip(&pt.y) {
            if e > 0 {
                v *= ipow(y, e);
            }
        }
        for &(j, e) in &key.alpha {
            v *= ipow(pt.z.get(&j).copied().unwrap_or_else(Cplx::zero), e);
        }
        for &(j, e) in &key.beta {
            v *= ipow(pt.zbar.get(&j).copied().unwrap_or_else(Cplx::zero), e);
        }
        match key.component {
            Component::X(j) => out.x[sites.position(j).expect("validated")] += v,
            Component::Y(j) => out.y[sites.position(j).expect("validated")] += v,
            Component::Z(j) => *out.z.entry(j).or_insert_with(Cplx::zero) += v,
            Component::Zbar(j) => *out.zbar.entry(j).or_insert_with(Cplx::zero) += v,
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vf_algebra::MonomialKey;

    #[test]
    fn constant_x_field() {
        let s = SiteSet::new([1, 2]).unwrap();
        let t = Truncation::new(4, 4, 3);
        let f = VectorField::from_terms(
            s.clone(),
            t,
            [(MonomialKey::constant(Component::X(1), 4), Cplx::new(1.0, 0.0))],
        )
        .unwrap();
        let mut pt = PhasePoint::origin(&s);
        pt.x = vec![0.3, -1.0, 2.0, 0.1];
        let v = evaluate(&f, &pt).unwrap();
        assert_eq!(v.x[0], Cplx::new(1.0, 0.0));
        assert!(v.x[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn normal_form_values() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(3, 2, 2);
        let mut nf = VectorField::<f64>::new(s.clone(), t);
        let om = 1.7;
        nf.add_term(MonomialKey::constant(Component::X(1), 2), Cplx::new(om, 0.0))
            .unwrap();
        nf.add_term(MonomialKey::linear(Component::Z(2), 2, 2, false), Cplx::new(0.0, -2.5))
            .unwrap();
        let mut pt = PhasePoint::origin(&s);
        pt.z.insert(2, Cplx::new(0.5, 0.25));
        let v = evaluate(&nf, &pt).unwrap();
        assert_eq!(v.x[0].re, om);
        assert_eq!(v.z[&2], Cplx::new(0.0, -2.5) * Cplx::new(0.5, 0.25));
        pt.z.insert(1, Cplx::new(1.0, 0.0));
        assert!(evaluate(&nf, &pt).is_err());
    }
}
