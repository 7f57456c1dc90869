use super::NormalForm;
use crate::error::Result;
use crate::scalar::{Cplx, Real};
use crate::vf_algebra::{
    apply_involution, in_resonant_family, lie_bracket, majorant_norm, symmetrize, MonomialKey,
    NormContext, VectorField, STRUCT_TOL,
};

pub const DEFAULT_DIVISOR_FLOOR: f64 = 1e-8;

/// A non-resonant term whose divisor fell below the floor.
#[derive(Clone, Debug, PartialEq)]
pub struct SkippedTerm<T: Real> {
    pub key: MonomialKey,
    pub coeff: Cplx<T>,
    pub divisor: Cplx<T>,
}

#[derive(Clone, Debug)]
pub struct HomologicalSolution<T: Real> {
    /// Generator with `[N, F] = −(P − resonant − skipped)`.
    pub generator: VectorField<T>,
    /// Terms of `P` in the resonant families, as they appear in `P`.
    pub resonant: VectorField<T>,
    /// `symmetrize(resonant)`: the diagonal constant-coefficient correction.
    pub correction: VectorField<T>,
    pub skipped: Vec<SkippedTerm<T>>,
}

impl<T: Real> HomologicalSolution<T> {
    pub fn skipped_field(&self) -> VectorField<T> {
        let mut f = self.resonant.empty_like();
        for s in &self.skipped {
            f.add_unchecked(s.key.clone(), s.coeff);
        }
        f
    }

    /// Number of terms reported as small divisors.
    pub fn skipped_count(&self) -> usize {
        self.skipped.len()
    }
}

/// Homological step with a custom resonance predicate.
///
/// Terms with `resonant(key)` go to the resonant part, terms with
/// `|d| < floor` are reported, and every other term `c·m` contributes
/// `−c/d · m` to the generator.
pub fn solve_homological_with<T: Real>(
    nf: &NormalForm<T>,
    p: &VectorField<T>,
    floor: T,
    resonant: impl Fn(&MonomialKey) -> bool,
) -> Result<HomologicalSolution<T>> {
    let mut gen = p.empty_like();
    let mut res = p.empty_like();
    let mut skipped = Vec::new();
    for (key, &c) in p.terms() {
        if resonant(key) {
            res.add_unchecked(key.clone(), c);
            continue;
        }
        let d = nf.divisor(key)?;
        if d.norm() < floor {
            skipped.push(SkippedTerm {
                key: key.clone(),
                coeff: c,
                divisor: d,
            });
        } else {
            gen.add_unchecked(key.clone(), -c / d);
        }
    }
    let correction = symmetrize(&res);
    Ok(HomologicalSolution {
        generator: gen,
        resonant: res,
        correction,
        skipped,
    })
}

/// Homological step with the resonant families of the symmetrization.
pub fn solve_homological<T: Real>(
    nf: &NormalForm<T>,
    p: &VectorField<T>,
    floor: T,
) -> Result<HomologicalSolution<T>> {
    let sites = p.sites().clone();
    solve_homological_with(nf, p, floor, |k| in_resonant_family(k, &sites))
}

/// `‖[N, F] + P − resonant − skipped‖` in the majorant norm.
pub fn homological_residual<T: Real>(
    nf: &NormalForm<T>,
    p: &VectorField<T>,
    sol: &HomologicalSolution<T>,
    ctx: &NormContext<T>,
) -> Result<T> {
    let n = nf.to_vector_field(*p.truncation())?;
    let r = lie_bracket(&n, &sol.generator)?
        .add(p)?
        .sub(&sol.resonant)?
        .sub(&sol.skipped_field())?;
    Ok(majorant_norm(&r, ctx))
}

/// `S∘F∘S = F`: the flow of `F` commutes with the involution.
pub fn check_reversibility_preserving<T: Real>(f: &VectorField<T>) -> bool {
    let tol = T::lit(STRUCT_TOL);
    apply_involution(f)
        .sub(f)
        .map(|d| d.max_abs_coeff() <= tol)
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vf_algebra::{Component, SiteSet, Truncation};

    #[test]
    fn resonant_term_goes_to_correction() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(6, 4, 3);
        let nf = NormalForm::unperturbed(1.0, &s, 6).unwrap();
        let key = MonomialKey::new(Component::Z(3), vec![1, -1], vec![0, 0], [(-3, 1)], []);
        let p = VectorField::from_terms(s, t, [(key, Cplx::new(0.0, 0.5))]).unwrap();
        let sol = solve_homological(&nf, &p, 1e-8).unwrap();
        assert!(sol.generator.is_empty());
        assert_eq!(sol.resonant, p);
        assert_eq!(sol.correction.len(), 1);
    }

    #[test]
    fn single_term_generator() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(6, 4, 3);
        let nf = NormalForm::unperturbed(1.0, &s, 6).unwrap();
        let key = MonomialKey::new(Component::Z(3), vec![1, 0], vec![0, 0], [(2, 1)], []);
        let c = Cplx::new(0.25, -1.0);
        let p = VectorField::from_terms(s, t, [(key.clone(), c)]).unwrap();
        let sol = solve_homological(&nf, &p, 1e-8).unwrap();
        let d = nf.divisor(&key).unwrap();
        assert!((sol.generator.coeff(&key) + c / d).norm() < 1e-15);
        let ctx = NormContext::new(0.5, 0.5, 0.0, 0.0, 1.0).unwrap();
        assert!(homological_residual(&nf, &p, &sol, &ctx).unwrap() < 1e-14);
    }

    #[test]
    fn tiny_divisor_is_reported() {
        let s = SiteSet::new([1]).unwrap();
        let t = Truncation::new(6, 4, 3);
        let nf = NormalForm::unperturbed(1.0, &s, 6).unwrap();
        // z_2 z̄_{−2} ∂_{x₁}: d = −i(−Ω₂ + Ω₋₂) = 0, outside the families.
        let key = MonomialKey::new(Component::X(1), vec![0, 0], vec![0, 0], [(2, 1)], [(-2, 1)]);
        let p = VectorField::from_terms(s, t, [(key, Cplx::new(1.0, 0.0))]).unwrap();
        let sol = solve_homological(&nf, &p, 1e-8).unwrap();
        assert_eq!(sol.skipped_count(), 1);
        assert!(sol.generator.is_empty());
    }
}
