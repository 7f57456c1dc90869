//! Second-order Melnikov conditions and the density of good amplitudes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BirkhoffData, NormalForm};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `τ = 2(n + 1)` with `n = 2·d` tangential sites.
pub fn default_tau(d_plus: usize) -> f64 {
    2.0 * (2 * d_plus + 1) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MelnikovViolation {
    pub k: Vec<i32>,
    pub i: i32,
    pub j: i32,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MelnikovReport {
    pub gamma: f64,
    pub tau: f64,
    pub checked: usize,
    pub violations: Vec<MelnikovViolation>,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub scale: f64,
    pub samples: usize,
    pub good: usize,
    pub density: f64,
}

/// All `k ∈ ℤ^d` with `0 < |k|₁ ≤ k_max`.
fn lattice(d: usize, k_max: u32) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for k in &out {
            let used: u32 = k.iter().map(|c: &i32| c.unsigned_abs()).sum();
            let r = (k_max - used) as i32;
            for c in -r..=r {
                let mut kk = k.clone();
                kk.push(c);
                next.push(kk);
            }
        }
        out = next;
    }
    out.retain(|k| k.iter().any(|&c| c != 0));
    out
}

fn validate(gamma: f64, tau: f64) -> Result<()> {
    if !(gamma > 0.0) || !(tau > 1.0) {
        return Err(Error::Config(format!(
            "Melnikov conditions need γ > 0 and τ > 1, got γ = {gamma}, τ = {tau}"
        )));
    }
    Ok(())
}

/// Checks `|ω·k + Ω_i − Ω_j| ≥ γ/(1 + |k|₁^τ)` for `0 < |k|₁ ≤ k_max` and
/// normal `i, j ∈ [0, j_max]`, plus `k = 0`, `i ≠ j`.
pub fn melnikov_check<T: Real>(
    nf: &NormalForm<T>,
    gamma: f64,
    tau: f64,
    k_max: u32,
    j_max: u32,
) -> Result<MelnikovReport> {
    validate(gamma, tau)?;
    let omega: Vec<f64> = nf.omega_plus().iter().map(|w| w.as_f64()).collect();
    let normal: Vec<(i32, f64)> = (0..=j_max as i32)
        .filter(|j| !nf.sites.contains(*j))
        .map(|j| {
            nf.big_omega_of(j)
                .map(|w| (j, w.as_f64()))
                .ok_or_else(|| Error::Contract(format!("normal frequency Ω_{j} not available")))
        })
        .collect::<Result<_>>()?;
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut ks = lattice(omega.len(), k_max);
    ks.push(vec![0; omega.len()]);
    for k in &ks {
        let k1: u32 = k.iter().map(|c| c.unsigned_abs()).sum();
        let bound = gamma / (1.0 + (k1 as f64).powf(tau));
        let wk: f64 = k.iter().zip(&omega).map(|(&c, &w)| c as f64 * w).sum();
        for &(i, oi) in &normal {
            for &(j, oj) in &normal {
                if k1 == 0 && i == j {
                    continue;
                }
                checked += 1;
                let value = wk + oi - oj;
                if value.abs() < bound {
                    violations.push(MelnikovViolation { k: k.clone(), i, j, value });
                }
            }
        }
    }
    let density = if violations.is_empty() { 1.0 } else { 0.0 };
    Ok(MelnikovReport { gamma, tau, checked, violations, density })
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Shifted Halton points in `(0, scale]^dim`.
pub fn halton_box(samples: usize, dim: usize, scale: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    if dim > PRIMES.len() {
        return Err(Error::Config(format!("at most {} sampling dimensions", PRIMES.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    Ok((1..=samples as u64)
        .map(|i| {
            (0..dim)
                .map(|a| {
                    let u = (radical_inverse(i, PRIMES[a]) + shift[a]).fract();
                    scale * (1.0 - u)
                })
                .collect()
        })
        .collect())
}

/// Fraction of amplitudes in `(0, scale]^d` whose Birkhoff frequencies
/// satisfy every condition of [`melnikov_check`].
#[allow(clippy::too_many_arguments)]
pub fn melnikov_density<T: Real>(
    birkhoff: &BirkhoffData<T>,
    scale: f64,
    samples: usize,
    seed: u64,
    gamma: f64,
    tau: f64,
    k_max: u32,
    j_max: u32,
) -> Result<DensityPoint> {
    validate(gamma, tau)?;
    if samples == 0 || !(scale > 0.0) {
        return Err(Error::Config("density needs samples > 0 and scale > 0".into()));
    }
    let pts = halton_box(samples, birkhoff.sites.plus().len(), scale, seed)?;
    let good = pts
        .par_iter()
        .map(|xi| {
            let xi: Vec<T> = xi.iter().map(|&x| T::lit(x)).collect();
            let nf = birkhoff.normal_form_at(&xi)?;
            Ok(melnikov_check(&nf, gamma, tau, k_max, j_max)?.violations.is_empty())
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&g| g)
        .count();
    Ok(DensityPoint {
        scale,
        samples,
        good,
        density: good as f64 / samples as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vf_algebra::SiteSet;

    #[test]
    fn single_condition_passes() {
        let nf = NormalForm::unperturbed(1.0, &SiteSet::new([1]).unwrap(), 4).unwrap();
        let value = 2f64.sqrt() + 5f64.sqrt() - 10f64.sqrt();
        assert!((value - 0.48795).abs() < 1e-4);
        let r = melnikov_check(&nf, 0.1, 2.0, 1, 4).unwrap();
        assert!(r.violations.iter().all(|v| !(v.k == [1] && v.i == 2 && v.j == 3)));
        assert!(r.violations.iter().all(|v| v.value.abs() < 0.1 / (1.0 + 1.0f64.powf(2.0))));
    }

    #[test]
    fn counts_exclude_trivial_triple() {
        let nf = NormalForm::unperturbed(1.0, &SiteSet::new([1]).unwrap(), 3).unwrap();
        // normal indices {0, 2, 3}, k ∈ {−1, 1} plus k = 0 with i ≠ j
        let r = melnikov_check(&nf, 1e-3, 2.0, 1, 3).unwrap();
        assert_eq!(r.checked, 2 * 9 + 6);
    }

    #[test]
    fn lattice_size() {
        assert_eq!(lattice(2, 2).len(), 12);
        assert_eq!(lattice(1, 3).len(), 6);
    }

    #[test]
    fn halton_in_box() {
        let p = halton_box(1000, 2, 1e-3, 7).unwrap();
        assert!(p.iter().flatten().all(|&x| x > 0.0 && x <= 1e-3));
        assert_eq!(p, halton_box(1000, 2, 1e-3, 7).unwrap());
        let mean: f64 = p.iter().map(|x| x[0]).sum::<f64>() / 1000.0;
        assert!((mean - 5e-4).abs() < 1e-5);
    }

    #[test]
    fn bad_parameters() {
        let nf = NormalForm::unperturbed(1.0, &SiteSet::new([1]).unwrap(), 3).unwrap();
        assert!(melnikov_check(&nf, 0.0, 2.0, 1, 3).is_err());
        assert!(melnikov_check(&nf, 0.1, 1.0, 1, 3).is_err());
    }
}
