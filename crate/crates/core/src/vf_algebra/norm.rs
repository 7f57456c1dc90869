//! Coefficient-wise majorant surrogate of the weighted analytic norm.

use serde::{Deserialize, Serialize};

use super::field::VectorField;
use super::monomial::{momentum, Component, MonomialKey};
use super::sites::SiteSet;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Widths and weights of the majorant norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormContext<T> {
    pub s: T,
    pub r: T,
    pub a_weight: T,
    pub a_space: T,
    pub p: T,
}

impl<T: Real> NormContext<T> {
    pub fn new(s: T, r: T, a_weight: T, a_space: T, p: T) -> Result<Self> {
        let ctx = Self {
            s,
            r,
            a_weight,
            a_space,
            p,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.s > T::zero()
            && self.r > T::zero()
            && self.a_weight >= T::zero()
            && self.a_space >= T::zero()
            && self.p > T::lit(0.5);
        if ok && [self.s, self.r, self.a_weight, self.a_space, self.p]
            .iter()
            .all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "norm context needs s, r > 0, weights ≥ 0, p > 1/2 (got {:?})",
                self
            )))
        }
    }

    /// Same context with another momentum weight.
    pub fn with_weight(&self, a_weight: T) -> Self {
        Self { a_weight, ..*self }
    }

    /// `e^{−a|j|}⟨j⟩^{−p}` with `⟨j⟩ = max(1, |j|)`.
    fn site_weight(&self, j: i32) -> T {
        let aj = T::from_int(j.unsigned_abs() as i64);
        (-self.a_space * aj).exp() * aj.max(T::one()).powf(-self.p)
    }
}

/// Weight multiplying `|c|` for one monomial.
pub fn term_weight<T: Real>(key: &MonomialKey, sites: &SiteSet, ctx: &NormContext<T>) -> T {
    let pi = momentum(key, sites).expect("stored keys are validated");
    let mut w = (ctx.a_weight * T::from_int(pi.abs())).exp()
        * (ctx.s * T::from_int(key.k_norm() as i64)).exp()
        * ctx.r.powi(2 * key.y_degree() as i32);
    for &(j, e) in key.alpha.iter().chain(key.beta.iter()) {
        w *= (ctx.r * ctx.site_weight(j)).powi(e as i32);
    }
    let scale = match key.component {
        Component::X(_) => ctx.s.recip(),
        Component::Y(_) => (ctx.r * ctx.r).recip(),
        Component::Z(j) | Component::Zbar(j) => (ctx.r * ctx.site_weight(j)).recip(),
    };
    w * scale
}

/// `Σ weight(m)·|c_m|` over all terms.
pub fn majorant_norm<T: Real>(x: &VectorField<T>, ctx: &NormContext<T>) -> T {
    x.terms()
        .map(|(key, c)| term_weight(key, x.sites(), ctx) * c.norm())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cplx;
    use crate::vf_algebra::Truncation;

    #[test]
    fn penalization_equality_on_single_term() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(12, 4, 3);
        // π = 1 + 11 − 2 = 10
        let key = MonomialKey::new(Component::Z(2), vec![1, 0], vec![0, 0], [(11, 1)], []);
        assert_eq!(momentum(&key, &s).unwrap(), 10);
        let x = VectorField::from_terms(s, t, [(key, Cplx::new(0.3, -0.4))]).unwrap();
        let a = NormContext::new(0.5, 0.2, 1.0, 0.1, 1.0).unwrap();
        let ratio = majorant_norm(&x, &a.with_weight(0.5)) / majorant_norm(&x, &a);
        assert!((ratio - (-5.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn zero_field_and_monotone_removal() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(4, 4, 3);
        let ctx = NormContext::new(0.5, 0.2, 0.3, 0.1, 1.0).unwrap();
        let mut x = VectorField::<f64>::new(s, t);
        assert_eq!(majorant_norm(&x, &ctx), 0.0);
        let a = MonomialKey::constant(Component::X(1), 2);
        let b = MonomialKey::linear(Component::Z(2), 2, -3, true);
        x.add_term(a.clone(), Cplx::new(1.0, 0.0)).unwrap();
        x.add_term(b, Cplx::new(0.0, 2.0)).unwrap();
        let full = majorant_norm(&x, &ctx);
        x.remove_term(&a);
        assert!(majorant_norm(&x, &ctx) <= full);
    }

    #[test]
    fn rejects_bad_context() {
        assert!(NormContext::new(0.0, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(NormContext::new(1.0, 1.0, 0.0, 0.0, 0.5).is_err());
    }
}
