//! Randomized property suite for the vector-field algebra.

use anyhow::Result;
use dnlw_kam::vf_algebra::random::{random_coeff, random_field, random_key, RandomShape};
use dnlw_kam::vf_algebra::{
    lie_bracket, majorant_norm, momentum, project_momentum, MomentumMode, NormContext, SiteSet, Truncation,
    VectorField,
};
use dnlw_kam::Cplx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::AlgebraBlock;

#[derive(Debug, Serialize)]
pub struct AlgebraReport {
    pub cases: usize,
    /// `max |[m, X_M] − iπ(m)·m|` over single monomials.
    pub adjoint_max_error: f64,
    pub adjoint_key_mismatches: usize,
    pub antisymmetry_max: f64,
    pub jacobi_cases: usize,
    pub jacobi_max: f64,
    pub penalization_cases: usize,
    pub penalization_violations: usize,
    pub passed: bool,
}

pub fn run(block: &AlgebraBlock, seed: u64) -> Result<AlgebraReport> {
    let sites = SiteSet::new(block.sites.iter().copied())?;
    let trunc = Truncation::new(block.j_max, block.k_max, block.d_max);
    let shape = RandomShape::new(block.d_max, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xm = VectorField::<f64>::momentum_field(&sites, trunc);

    let (mut adj, mut mismatches) = (0.0f64, 0);
    for _ in 0..block.cases {
        let key = random_key(&mut rng, &sites, &trunc, shape);
        let c: Cplx<f64> = random_coeff(&mut rng);
        let m = VectorField::from_terms(sites.clone(), trunc, [(key.clone(), c)])?;
        let b = lie_bracket(&m, &xm)?;
        let pi = momentum(&key, &sites)? as f64;
        if b.terms().any(|(k, _)| *k != key) {
            mismatches += 1;
        }
        adj = adj.max((b.coeff(&key) - Cplx::new(0.0, pi) * c).norm());
    }

    let mut anti = 0.0f64;
    for _ in 0..block.cases {
        let x: VectorField<f64> = random_field(&mut rng, &sites, trunc, 6, shape);
        let y: VectorField<f64> = random_field(&mut rng, &sites, trunc, 6, shape);
        anti = anti.max(lie_bracket(&x, &y)?.add(&lie_bracket(&y, &x)?)?.max_abs_coeff());
    }

    // linear fields with |k| ≤ 1: nested brackets never reach the cutoffs
    let wide = Truncation::new(block.j_max, 3 * sites.n() as u32, block.d_max.max(1));
    let low = RandomShape::new(1, 1);
    let jacobi_cases = (block.cases / 5).max(1);
    let mut jac = 0.0f64;
    for _ in 0..jacobi_cases {
        let mut f = || random_field::<f64, _>(&mut rng, &sites, wide, 4, low);
        let (x, y, z) = (f(), f(), f());
        let s = lie_bracket(&x, &lie_bracket(&y, &z)?)?
            .add(&lie_bracket(&y, &lie_bracket(&z, &x)?)?)?
            .add(&lie_bracket(&z, &lie_bracket(&x, &y)?)?)?;
        jac = jac.max(s.max_abs_coeff());
    }

    let mut violations = 0;
    for _ in 0..block.penalization_cases {
        let k = rng.gen_range(1..=12u64);
        let a = rng.gen_range(0.05..1.0);
        let a2 = rng.gen_range(0.0..a);
        let x: VectorField<f64> = random_field(&mut rng, &sites, trunc, 20, shape);
        let ctx = NormContext::new(0.5, 0.5, a, 0.1, 1.0)?;
        let lhs = majorant_norm(&project_momentum(&x, k, MomentumMode::High), &ctx.with_weight(a2));
        let rhs = (-(k as f64) * (a - a2)).exp() * majorant_norm(&x, &ctx);
        if lhs > rhs * (1.0 + 1e-12) {
            violations += 1;
        }
    }

    Ok(AlgebraReport {
        cases: block.cases,
        adjoint_max_error: adj,
        adjoint_key_mismatches: mismatches,
        antisymmetry_max: anti,
        jacobi_cases,
        jacobi_max: jac,
        penalization_cases: block.penalization_cases,
        penalization_violations: violations,
        passed: mismatches == 0 && adj <= 1e-12 && anti <= 1e-10 && jac <= 1e-10 && violations == 0,
    })
}
