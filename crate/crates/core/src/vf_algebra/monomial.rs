use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::sites::{SiteSet, Truncation};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Target coordinate `∂_v` of a monomial vector field, tagged by site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Component {
    X(i32),
    Y(i32),
    Z(i32),
    Zbar(i32),
}

impl Component {
    pub fn site(self) -> i32 {
        match self {
            Component::X(j) | Component::Y(j) | Component::Z(j) | Component::Zbar(j) => j,
        }
    }

    /// `σ` in the momentum shift: `+1` for `z`, `−1` for `z̄`, `0` otherwise.
    pub fn sigma(self) -> i32 {
        match self {
            Component::Z(_) => 1,
            Component::Zbar(_) => -1,
            _ => 0,
        }
    }

    pub fn is_normal(self) -> bool {
        matches!(self, Component::Z(_) | Component::Zbar(_))
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::X(j) => write!(f, "x{j}"),
            Component::Y(j) => write!(f, "y{j}"),
            Component::Z(j) => write!(f, "z{j}"),
            Component::Zbar(j) => write!(f, "zb{j}"),
        }
    }
}

/// Sparse multi-index over normal sites: sorted `(site, exponent)` pairs, no zeros.
pub type SparseExp = Vec<(i32, u32)>;

pub(crate) fn normalize_sparse<I: IntoIterator<Item = (i32, u32)>>(it: I) -> SparseExp {
    let mut m: BTreeMap<i32, u32> = BTreeMap::new();
    for (j, e) in it {
        *m.entry(j).or_default() += e;
    }
    m.into_iter().filter(|&(_, e)| e > 0).collect()
}

pub(crate) fn sparse_get(s: &SparseExp, j: i32) -> u32 {
    s.binary_search_by_key(&j, |&(a, _)| a)
        .map(|idx| s[idx].1)
        .unwrap_or(0)
}

/// Sum of two sparse multi-indices, optionally lowering one site by one.
pub(crate) fn sparse_combine(a: &SparseExp, b: &SparseExp, lower: Option<i32>) -> SparseExp {
    let mut out = normalize_sparse(a.iter().chain(b.iter()).copied());
    if let Some(j) = lower {
        if let Ok(idx) = out.binary_search_by_key(&j, |&(s, _)| s) {
            out[idx].1 -= 1;
            if out[idx].1 == 0 {
                out.remove(idx);
            }
        }
    }
    out
}

/// Structural part of `e^{ik·x} yⁱ z^α z̄^β ∂_v`; canonical order is the derived one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MonomialKey {
    pub component: Component,
    pub k: Vec<i32>,
    pub i: Vec<u32>,
    pub alpha: SparseExp,
    pub beta: SparseExp,
}

impl MonomialKey {
    pub fn new<A, B>(component: Component, k: Vec<i32>, i: Vec<u32>, alpha: A, beta: B) -> Self
    where
        A: IntoIterator<Item = (i32, u32)>,
        B: IntoIterator<Item = (i32, u32)>,
    {
        Self {
            component,
            k,
            i,
            alpha: normalize_sparse(alpha),
            beta: normalize_sparse(beta),
        }
    }

    /// `∂_v` with constant coefficient on a site set of cardinality `n`.
    pub fn constant(component: Component, n: usize) -> Self {
        Self::new(component, vec![0; n], vec![0; n], [], [])
    }

    /// `z_h ∂_v` (or `z̄_h ∂_v` when `bar`) at `k = 0`.
    pub fn linear(component: Component, n: usize, h: i32, bar: bool) -> Self {
        if bar {
            Self::new(component, vec![0; n], vec![0; n], [], [(h, 1)])
        } else {
            Self::new(component, vec![0; n], vec![0; n], [(h, 1)], [])
        }
    }

    pub fn k_norm(&self) -> u32 {
        self.k.iter().map(|k| k.unsigned_abs()).sum()
    }

    pub fn y_degree(&self) -> u32 {
        self.i.iter().sum()
    }

    pub fn z_degree(&self) -> u32 {
        self.alpha.iter().chain(self.beta.iter()).map(|&(_, e)| e).sum()
    }

    /// Polynomial degree `|i| + |α| + |β|`.
    pub fn degree(&self) -> u32 {
        self.y_degree() + self.z_degree()
    }

    /// Checks the key against a site set and truncation bounds.
    pub fn validate(&self, sites: &SiteSet, trunc: &Truncation) -> Result<()> {
        let n = sites.n();
        if self.k.len() != n || self.i.len() != n {
            return Err(Error::InvalidMonomial(format!(
                "k/i length {}/{} does not match n = {n}",
                self.k.len(),
                self.i.len()
            )));
        }
        for &(j, _) in self.alpha.iter().chain(self.beta.iter()) {
            if !sites.is_normal(j, trunc.j_max) {
                return Err(Error::InvalidMonomial(format!(
                    "normal exponent at site {j} outside ℤ∖I or |j| ≤ {}",
                    trunc.j_max
                )));
            }
        }
        match self.component {
            Component::X(j) | Component::Y(j) if !sites.contains(j) => {
                return Err(Error::InvalidMonomial(format!(
                    "component {} is not a tangential site",
                    self.component
                )))
            }
            Component::Z(j) | Component::Zbar(j) if !sites.is_normal(j, trunc.j_max) => {
                return Err(Error::InvalidMonomial(format!(
                    "component {} outside normal truncation",
                    self.component
                )))
            }
            _ => {}
        }
        if self.degree() > trunc.d_max {
            return Err(Error::InvalidMonomial(format!(
                "degree {} exceeds d_max = {}",
                self.degree(),
                trunc.d_max
            )));
        }
        if self.k_norm() > trunc.k_max {
            return Err(Error::InvalidMonomial(format!(
                "|k| = {} exceeds k_max = {}",
                self.k_norm(),
                trunc.k_max
            )));
        }
        Ok(())
    }

    /// True when the key fits the degree and Fourier cutoffs.
    pub fn within(&self, trunc: &Truncation) -> bool {
        self.degree() <= trunc.d_max && self.k_norm() <= trunc.k_max
    }
}

/// A monomial vector field `c · e^{ik·x} yⁱ z^α z̄^β ∂_v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial<T: Real> {
    pub coeff: Cplx<T>,
    pub key: MonomialKey,
}

impl<T: Real> Monomial<T> {
    pub fn new(coeff: Cplx<T>, key: MonomialKey) -> Self {
        Self { coeff, key }
    }
}

/// Momentum `π(k, α, β; v) = Σ 𝚓ᵢkᵢ + Σ (αⱼ − βⱼ) j − σ j`.
pub fn momentum(key: &MonomialKey, sites: &SiteSet) -> Result<i64> {
    if key.k.len() != sites.n() {
        return Err(Error::InvalidMonomial(format!(
            "k has length {}, site set has n = {}",
            key.k.len(),
            sites.n()
        )));
    }
    let mut pi: i64 = key
        .k
        .iter()
        .enumerate()
        .map(|(p, &kp)| sites.site_at(p) as i64 * kp as i64)
        .sum();
    for &(j, e) in &key.alpha {
        pi += j as i64 * e as i64;
    }
    for &(j, e) in &key.beta {
        pi -= j as i64 * e as i64;
    }
    match key.component {
        Component::Z(j) | Component::Zbar(j) => {
            if sites.contains(j) {
                return Err(Error::InvalidMonomial(format!(
                    "normal component at tangential site {j}"
                )));
            }
            pi -= key.component.sigma() as i64 * j as i64;
        }
        Component::X(j) | Component::Y(j) => {
            if !sites.contains(j) {
                return Err(Error::InvalidMonomial(format!(
                    "tangential component at non-tangential site {j}"
                )));
            }
        }
    }
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn momentum_example() {
        let s = SiteSet::new([1]).unwrap();
        let key = MonomialKey::new(Component::Z(3), vec![1, 0], vec![0, 0], [(5, 1)], []);
        assert_eq!(momentum(&key, &s).unwrap(), 3);
    }

    #[test]
    fn momentum_vanishes_on_balanced_y_term() {
        let s = SiteSet::new([1, 3]).unwrap();
        let key = MonomialKey::new(
            Component::Y(-3),
            vec![0; 4],
            vec![1, 0, 2, 0],
            [(2, 1), (-4, 2)],
            [(2, 1), (-4, 2)],
        );
        assert_eq!(momentum(&key, &s).unwrap(), 0);
    }

    #[test]
    fn momentum_rejects_bad_component() {
        let s = SiteSet::new([1]).unwrap();
        let key = MonomialKey::constant(Component::Z(1), 2);
        assert!(momentum(&key, &s).is_err());
    }

    #[test]
    fn sparse_helpers() {
        let a = normalize_sparse([(3, 1), (-2, 2), (3, 1), (5, 0)]);
        assert_eq!(a, vec![(-2, 2), (3, 2)]);
        assert_eq!(sparse_get(&a, 3), 2);
        let c = sparse_combine(&a, &vec![(3, 1)], Some(-2));
        assert_eq!(c, vec![(-2, 1), (3, 3)]);
    }

    #[test]
    fn validate_bounds() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(4, 2, 2);
        let ok = MonomialKey::new(Component::Zbar(-4), vec![1, 1], vec![0, 0], [(2, 1)], []);
        assert!(ok.validate(&s, &t).is_ok());
        let too_far = MonomialKey::new(Component::Z(5), vec![0, 0], vec![0, 0], [], []);
        assert!(too_far.validate(&s, &t).is_err());
        let too_deep = MonomialKey::new(Component::X(1), vec![0, 0], vec![2, 0], [(0, 1)], []);
        assert!(too_deep.validate(&s, &t).is_err());
        let alpha_on_i = MonomialKey::new(Component::X(1), vec![0, 0], vec![0, 0], [(1, 1)], []);
        assert!(alpha_on_i.validate(&s, &t).is_err());
    }
}
