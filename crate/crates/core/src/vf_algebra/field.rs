use std::collections::BTreeMap;

use num_traits::Zero;

use super::monomial::{Component, Monomial, MonomialKey};
use super::sites::{SiteSet, Truncation};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Finite sparse sum of monomial vector fields in canonical key order.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<T: Real> {
    sites: SiteSet,
    trunc: Truncation,
    terms: BTreeMap<MonomialKey, Cplx<T>>,
}

impl<T: Real> VectorField<T> {
    pub fn new(sites: SiteSet, trunc: Truncation) -> Self {
        Self {
            sites,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(sites: SiteSet, trunc: Truncation, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MonomialKey, Cplx<T>)>,
    {
        let mut f = Self::new(sites, trunc);
        for (k, c) in terms {
            f.add_term(k, c)?;
        }
        Ok(f)
    }

    pub fn sites(&self) -> &SiteSet {
        &self.sites
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &Cplx<T>)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial<T>> + '_ {
        self.terms
            .iter()
            .map(|(k, c)| Monomial::new(*c, k.clone()))
    }

    pub fn coeff(&self, key: &MonomialKey) -> Cplx<T> {
        self.terms.get(key).copied().unwrap_or_else(Cplx::zero)
    }

    /// Adds `c` to the coefficient of `key`, dropping the entry when it cancels exactly.
    pub fn add_term(&mut self, key: MonomialKey, c: Cplx<T>) -> Result<()> {
        key.validate(&self.sites, &self.trunc)?;
        self.add_unchecked(key, c);
        Ok(())
    }

    pub(crate) fn add_unchecked(&mut self, key: MonomialKey, c: Cplx<T>) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn remove_term(&mut self, key: &MonomialKey) -> Option<Cplx<T>> {
        self.terms.remove(key)
    }

    /// Same sites and truncation, no terms.
    pub fn empty_like(&self) -> Self {
        Self::new(self.sites.clone(), self.trunc)
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.sites != other.sites {
            return Err(Error::Contract("vector fields live on different site sets".into()));
        }
        if self.trunc != other.trunc {
            return Err(Error::Contract("vector fields have different truncations".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_unchecked(k.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-Cplx::<T>::new(T::one(), T::zero())))
    }

    pub fn scale(&self, s: Cplx<T>) -> Self {
        let mut out = self.empty_like();
        for (k, c) in &self.terms {
            out.add_unchecked(k.clone(), *c * s);
        }
        out
    }

    pub fn filter<F: Fn(&MonomialKey, &Cplx<T>) -> bool>(&self, pred: F) -> Self {
        let mut out = self.empty_like();
        for (k, c) in &self.terms {
            if pred(k, c) {
                out.terms.insert(k.clone(), *c);
            }
        }
        out
    }

    /// Largest coefficient modulus; `0` for the zero field.
    pub fn max_abs_coeff(&self) -> T {
        self.terms
            .values()
            .map(|c| c.norm())
            .fold(T::zero(), T::max)
    }

    /// Sum of coefficient moduli.
    pub fn l1_mass(&self) -> T {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// `max |c_X − c_Y|` over the union of keys.
    pub fn max_coeff_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for (k, c) in &self.terms {
            m = m.max((*c - other.coeff(k)).norm());
        }
        for (k, c) in &other.terms {
            if !self.terms.contains_key(k) {
                m = m.max(c.norm());
            }
        }
        m
    }

    /// The momentum vector field `X_M = (𝚓, 0, …, i j z_j, …, −i j z̄_j, …)`.
    pub fn momentum_field(sites: &SiteSet, trunc: Truncation) -> Self {
        let n = sites.n();
        let mut f = Self::new(sites.clone(), trunc);
        for j in sites.sites() {
            f.add_unchecked(
                MonomialKey::constant(Component::X(j), n),
                Cplx::new(T::from_int(j as i64), T::zero()),
            );
        }
        for j in sites.normal_sites(trunc.j_max) {
            if j == 0 {
                continue;
            }
            let jj = T::from_int(j as i64);
            f.add_unchecked(
                MonomialKey::linear(Component::Z(j), n, j, false),
                Cplx::new(T::zero(), jj),
            );
            f.add_unchecked(
                MonomialKey::linear(Component::Zbar(j), n, j, true),
                Cplx::new(T::zero(), -jj),
            );
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (SiteSet, Truncation) {
        (SiteSet::new([1]).unwrap(), Truncation::new(4, 4, 3))
    }

    #[test]
    fn merge_drops_exact_cancellation() {
        let (s, t) = setup();
        let mut f = VectorField::<f64>::new(s, t);
        let key = MonomialKey::constant(Component::X(1), 2);
        f.add_term(key.clone(), Cplx::new(1.5, 0.0)).unwrap();
        f.add_term(key.clone(), Cplx::new(0.5, 1.0)).unwrap();
        assert_eq!(f.coeff(&key), Cplx::new(2.0, 1.0));
        f.add_term(key.clone(), Cplx::new(-2.0, -1.0)).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn rejects_out_of_truncation() {
        let (s, t) = setup();
        let mut f = VectorField::<f64>::new(s, t);
        let key = MonomialKey::new(Component::Z(2), vec![3, 2], vec![0, 0], [], []);
        assert!(f.add_term(key, Cplx::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn canonical_order_is_component_first() {
        let (s, t) = setup();
        let mut f = VectorField::<f64>::new(s, t);
        f.add_term(MonomialKey::linear(Component::Z(2), 2, 2, false), Cplx::new(1.0, 0.0))
            .unwrap();
        f.add_term(MonomialKey::constant(Component::X(-1), 2), Cplx::new(1.0, 0.0))
            .unwrap();
        f.add_term(MonomialKey::constant(Component::X(1), 2), Cplx::new(1.0, 0.0))
            .unwrap();
        let comps: Vec<_> = f.terms().map(|(k, _)| k.component).collect();
        assert_eq!(comps, vec![Component::X(-1), Component::X(1), Component::Z(2)]);
    }

    #[test]
    fn site_mismatch_is_contract_violation() {
        let (s, t) = setup();
        let a = VectorField::<f64>::new(s, t);
        let b = VectorField::<f64>::new(SiteSet::new([2]).unwrap(), t);
        assert!(matches!(a.add(&b), Err(Error::Contract(_))));
    }
}
