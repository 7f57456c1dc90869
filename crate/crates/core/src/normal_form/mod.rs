//! Normal forms, homological equations and frequency analysis.

mod asymptotics;
mod birkhoff;
mod homological;
mod melnikov;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::vf_algebra::{lie_bracket, Component, MonomialKey, SiteSet, Truncation, VectorField};

pub use asymptotics::{asymptotic_fit, toeplitz_decompose, AsymptoticFit, ToeplitzDecomposition};
pub use birkhoff::{
    birkhoff_third_order, cubic_vector_field, frequency_correction, torus_linear_part,
    BirkhoffData, BIRKHOFF_FLOOR,
};
pub use homological::{
    check_reversibility_preserving, homological_residual, solve_homological,
    solve_homological_with, HomologicalSolution, SkippedTerm, DEFAULT_DIVISOR_FLOOR,
};
pub use melnikov::{
    default_tau, halton_box, melnikov_check, melnikov_density, DensityPoint, MelnikovReport,
    MelnikovViolation,
};

/// Frequencies of `N = ω·∂_x − iΩ_j z_j∂_{z_j} + iΩ_j z̄_j∂_{z̄_j}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct NormalForm<T: Real> {
    pub sites: SiteSet,
    /// `ω_j` in the enumeration of `sites`.
    pub omega: Vec<T>,
    /// `Ω_j` on normal sites.
    pub big_omega: BTreeMap<i32, T>,
    /// `∂ω/∂ξ` over the positive sites.
    pub twist: Vec<Vec<T>>,
    pub a_const: T,
}

impl<T: Real> NormalForm<T> {
    /// `ω_j = λ_j` and `Ω_j = λ_j` for `|j| ≤ j_max`.
    pub fn unperturbed(mass: T, sites: &SiteSet, j_max: u32) -> Result<Self> {
        let lam = |j: i32| crate::model::lambda(mass, j as i64);
        let omega = sites.sites().into_iter().map(lam).collect::<Result<Vec<_>>>()?;
        let big_omega = sites
            .normal_sites(j_max)
            .into_iter()
            .map(|j| Ok((j, lam(j)?)))
            .collect::<Result<_>>()?;
        let d = sites.plus().len();
        Ok(Self {
            sites: sites.clone(),
            omega,
            big_omega,
            twist: vec![vec![T::zero(); d]; d],
            a_const: T::zero(),
        })
    }

    /// `ω` on the positive sites.
    pub fn omega_plus(&self) -> Vec<T> {
        self.omega.iter().step_by(2).copied().collect()
    }

    pub fn omega_of(&self, j: i32) -> Option<T> {
        self.sites.position(j).map(|p| self.omega[p])
    }

    pub fn big_omega_of(&self, j: i32) -> Option<T> {
        self.big_omega.get(&j).copied()
    }

    /// Largest violation of `ω_{−j} = ω_j`, `Ω_{−j} = Ω_j`.
    pub fn symmetry_defect(&self) -> T {
        let mut d = T::zero();
        for p in (0..self.omega.len()).step_by(2) {
            d = d.max((self.omega[p] - self.omega[p + 1]).abs());
        }
        for (&j, &w) in &self.big_omega {
            if let Some(&v) = self.big_omega.get(&-j) {
                d = d.max((w - v).abs());
            }
        }
        d
    }

    /// 2-norm condition number of the twist matrix (∞ if singular).
    pub fn twist_condition(&self) -> f64 {
        let d = self.twist.len();
        if d == 0 {
            return f64::INFINITY;
        }
        let m = nalgebra::DMatrix::<f64>::from_fn(d, d, |r, c| self.twist[r][c].as_f64());
        let sv = m.singular_values();
        let (mx, mn) = sv
            .iter()
            .fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
        if mn == 0.0 {
            f64::INFINITY
        } else {
            mx / mn
        }
    }

    /// The vector field `N` on `trunc`; every normal site in range needs an `Ω`.
    pub fn to_vector_field(&self, trunc: Truncation) -> Result<VectorField<T>> {
        let n = self.sites.n();
        let mut f = VectorField::new(self.sites.clone(), trunc);
        for (p, j) in self.sites.sites().into_iter().enumerate() {
            f.add_term(MonomialKey::constant(Component::X(j), n), Cplx::new(self.omega[p], T::zero()))?;
        }
        for j in self.sites.normal_sites(trunc.j_max) {
            let w = self.big_omega_of(j).ok_or_else(|| {
                Error::Contract(format!("normal frequency Ω_{j} missing from the normal form"))
            })?;
            f.add_term(MonomialKey::linear(Component::Z(j), n, j, false), Cplx::new(T::zero(), -w))?;
            f.add_term(MonomialKey::linear(Component::Zbar(j), n, j, true), Cplx::new(T::zero(), w))?;
        }
        Ok(f)
    }

    /// Closed form of `d` in `[N, m] = d·m`:
    /// `d = −i(ω·k − Σ Ω_j(α_j − β_j) + σΩ_{j_v})`.
    pub fn divisor(&self, key: &MonomialKey) -> Result<Cplx<T>> {
        let miss = |j: i32| Error::Contract(format!("normal frequency Ω_{j} missing"));
        let mut s: T = key
            .k
            .iter()
            .zip(&self.omega)
            .map(|(&k, &w)| T::from_int(k as i64) * w)
            .sum();
        for &(j, e) in &key.alpha {
            s -= T::from_int(e as i64) * self.big_omega_of(j).ok_or_else(|| miss(j))?;
        }
        for &(j, e) in &key.beta {
            s += T::from_int(e as i64) * self.big_omega_of(j).ok_or_else(|| miss(j))?;
        }
        match key.component {
            Component::Z(j) => s += self.big_omega_of(j).ok_or_else(|| miss(j))?,
            Component::Zbar(j) => s -= self.big_omega_of(j).ok_or_else(|| miss(j))?,
            _ => {}
        }
        Ok(Cplx::new(T::zero(), -s))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `d` with `[N, m] = d·m`, read off the bracket itself.
pub fn ad_eigenvalue<T: Real>(n_field: &VectorField<T>, key: &MonomialKey) -> Result<Cplx<T>> {
    let mut m = n_field.empty_like();
    m.add_term(key.clone(), Cplx::new(T::one(), T::zero()))?;
    let b = lie_bracket(n_field, &m)?;
    match b.len() {
        0 => Ok(Cplx::new(T::zero(), T::zero())),
        1 if b.terms().next().map(|(k, _)| k == key).unwrap_or(false) => Ok(b.coeff(key)),
        _ => Err(Error::Contract(
            "[N, m] is not proportional to m; N is not diagonal".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vf_algebra::random::{random_key, RandomShape};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_field_commutes() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(6, 4, 3);
        let nf = NormalForm::unperturbed(1.0, &s, 6).unwrap();
        let n = nf.to_vector_field(t).unwrap();
        let d = ad_eigenvalue(&n, &MonomialKey::constant(Component::X(1), 2)).unwrap();
        assert_eq!(d, Cplx::new(0.0, 0.0));
    }

    #[test]
    fn odd_lattice_family_is_in_kernel() {
        let s = SiteSet::new([1, 2]).unwrap();
        let t = Truncation::new(6, 4, 3);
        let nf = NormalForm::unperturbed(1.0, &s, 6).unwrap();
        let n = nf.to_vector_field(t).unwrap();
        let key = MonomialKey::new(Component::Z(4), vec![1, -1, 1, -1], vec![0; 4], [(4, 1)], []);
        assert!(ad_eigenvalue(&n, &key).unwrap().norm() < 1e-15);
    }

    #[test]
    fn bracket_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = SiteSet::new([1, 3]).unwrap();
        let t = Truncation::new(8, 6, 3);
        let nf = NormalForm::unperturbed(1.3, &s, 8).unwrap();
        let n = nf.to_vector_field(t).unwrap();
        for _ in 0..200 {
            let key = random_key(&mut rng, &s, &t, RandomShape::new(3, 2));
            let d = ad_eigenvalue(&n, &key).unwrap();
            let c = nf.divisor(&key).unwrap();
            assert!((d - c).norm() < 1e-12, "{key:?}: {d} vs {c}");
        }
    }

    #[test]
    fn non_diagonal_n_is_rejected() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(6, 4, 3);
        let mut n = NormalForm::unperturbed(1.0, &s, 6).unwrap().to_vector_field(t).unwrap();
        n.add_term(MonomialKey::linear(Component::Z(2), 2, 3, false), Cplx::new(1.0, 0.0))
            .unwrap();
        assert!(ad_eigenvalue(&n, &MonomialKey::linear(Component::Z(3), 2, 3, false)).is_err());
    }
}
