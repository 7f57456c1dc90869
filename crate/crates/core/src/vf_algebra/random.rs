//! Random monomials, fields and points for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use super::evaluate::PhasePoint;
use super::field::VectorField;
use super::monomial::{Component, MonomialKey};
use super::sites::{SiteSet, Truncation};
use super::symmetry::apply_involution;
use crate::scalar::{Cplx, Real};

/// Shape of randomly generated monomials.
#[derive(Clone, Copy, Debug)]
pub struct RandomShape {
    /// Upper bound on the polynomial degree (clipped to `d_max`).
    pub max_degree: u32,
    /// Bound on each `|k_p|`.
    pub k_abs: i32,
}

impl RandomShape {
    pub fn new(max_degree: u32, k_abs: i32) -> Self {
        Self { max_degree, k_abs }
    }
}

fn random_component<R: Rng>(rng: &mut R, sites: &SiteSet, normal: &[i32]) -> Component {
    let tang = sites.sites();
    loop {
        match rng.gen_range(0..4) {
            0 if !tang.is_empty() => return Component::X(*tang.choose(rng).unwrap()),
            1 if !tang.is_empty() => return Component::Y(*tang.choose(rng).unwrap()),
            2 if !normal.is_empty() => return Component::Z(*normal.choose(rng).unwrap()),
            3 if !normal.is_empty() => return Component::Zbar(*normal.choose(rng).unwrap()),
            _ => {}
        }
    }
}

/// A random key respecting `trunc`.
pub fn random_key<R: Rng>(
    rng: &mut R,
    sites: &SiteSet,
    trunc: &Truncation,
    shape: RandomShape,
) -> MonomialKey {
    let n = sites.n();
    let normal = sites.normal_sites(trunc.j_max);
    let component = random_component(rng, sites, &normal);
    let k = loop {
        let k: Vec<i32> = (0..n).map(|_| rng.gen_range(-shape.k_abs..=shape.k_abs)).collect();
        if k.iter().map(|v| v.unsigned_abs()).sum::<u32>() <= trunc.k_max {
            break k;
        }
    };
    let deg = rng.gen_range(0..=shape.max_degree.min(trunc.d_max));
    let mut i = vec![0u32; n];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for _ in 0..deg {
        let slot = rng.gen_range(0..3);
        if slot == 0 && n > 0 {
            i[rng.gen_range(0..n)] += 1;
        } else if !normal.is_empty() {
            let j = *normal.choose(rng).unwrap();
            if slot == 1 {
                alpha.push((j, 1));
            } else {
                beta.push((j, 1));
            }
        } else if n > 0 {
            i[rng.gen_range(0..n)] += 1;
        }
    }
    MonomialKey::new(component, k, i, alpha, beta)
}

pub fn random_coeff<T: Real, R: Rng>(rng: &mut R) -> Cplx<T> {
    Cplx::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)))
}

/// A field with up to `terms` random monomials.
pub fn random_field<T: Real, R: Rng>(
    rng: &mut R,
    sites: &SiteSet,
    trunc: Truncation,
    terms: usize,
    shape: RandomShape,
) -> VectorField<T> {
    let mut f = VectorField::new(sites.clone(), trunc);
    for _ in 0..terms {
        let key = random_key(rng, sites, &trunc, shape);
        f.add_unchecked(key, random_coeff(rng));
    }
    f
}

/// A reversible field with the real-coefficient structure: `m − S∘m∘S`
/// summed over random monomials `m` with real `x` and imaginary other
/// coefficients.
pub fn random_reversible_field<T: Real, R: Rng>(
    rng: &mut R,
    sites: &SiteSet,
    trunc: Truncation,
    terms: usize,
    shape: RandomShape,
) -> VectorField<T> {
    let mut f = VectorField::new(sites.clone(), trunc);
    for _ in 0..terms {
        let key = random_key(rng, sites, &trunc, shape);
        let v = T::lit(rng.gen_range(-1.0..1.0));
        let c = match key.component {
            Component::X(_) => Cplx::new(v, T::zero()),
            _ => Cplx::new(T::zero(), v),
        };
        f.add_unchecked(key, c);
    }
    let s = apply_involution(&f);
    f.sub(&s).expect("same sites and truncation")
}

/// A random point of `E = {x_j = x_{−j}, y_j = y_{−j}, z_j = z_{−j}, z̄_j = z̄_{−j}}`.
pub fn random_even_point<T: Real, R: Rng>(
    rng: &mut R,
    sites: &SiteSet,
    j_max: u32,
    amplitude: f64,
) -> PhasePoint<T> {
    let mut pt = PhasePoint::origin(sites);
    for p in (0..sites.n()).step_by(2) {
        let x = T::lit(rng.gen_range(0.0..std::f64::consts::TAU));
        let y = Cplx::new(
            T::lit(rng.gen_range(-amplitude..amplitude)),
            T::lit(rng.gen_range(-amplitude..amplitude)),
        );
        pt.x[p] = x;
        pt.x[p + 1] = x;
        pt.y[p] = y;
        pt.y[p + 1] = y;
    }
    for j in sites.normal_sites(j_max) {
        if j < 0 {
            continue;
        }
        let mut draw = || {
            Cplx::new(
                T::lit(rng.gen_range(-amplitude..amplitude)),
                T::lit(rng.gen_range(-amplitude..amplitude)),
            )
        };
        let z = draw();
        let zb = draw();
        pt.z.insert(j, z);
        pt.zbar.insert(j, zb);
        if j != 0 {
            pt.z.insert(-j, z);
            pt.zbar.insert(-j, zb);
        }
    }
    pt
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vf_algebra::{check_real_coefficients, check_reversible};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_keys_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = SiteSet::new([1, 3]).unwrap();
        let t = Truncation::new(16, 6, 3);
        for _ in 0..500 {
            let k = random_key(&mut rng, &s, &t, RandomShape::new(3, 2));
            k.validate(&s, &t).unwrap();
        }
    }

    #[test]
    fn reversible_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = SiteSet::new([1, 3]).unwrap();
        let t = Truncation::new(8, 6, 3);
        for _ in 0..20 {
            let f: VectorField<f64> = random_reversible_field(&mut rng, &s, t, 10, RandomShape::new(3, 2));
            assert!(check_reversible(&f));
            assert!(check_real_coefficients(&f));
        }
    }

    #[test]
    fn even_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = SiteSet::new([2]).unwrap();
        let p: PhasePoint<f64> = random_even_point(&mut rng, &s, 5, 0.5);
        assert!(p.in_even_subspace(0.0));
    }
}
