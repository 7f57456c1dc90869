//! Third-order Birkhoff step for the cubic part of the nonlinearity.

use std::collections::BTreeMap;

use super::asymptotics::asymptotic_fit;
use super::homological::{solve_homological_with, SkippedTerm};
use super::NormalForm;
use crate::error::{Error, Result};
use crate::model::{lambda, ModelParams, NonlinearitySpec, XFactor};
use crate::scalar::{Cplx, Real};
use crate::vf_algebra::{symmetrize, Component, MonomialKey, SiteSet, Truncation, VectorField};

pub const BIRKHOFF_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, PartialEq)]
enum Factor {
    Y,
    Yx,
    V,
}

/// Coefficient of `u^σ_h` (function mode `μ = σh`) in the Fourier
/// coefficient of `y`, `y_x` or `v` at `μ`.
fn factor_coeff<T: Real>(f: Factor, mu: i64, plus: bool, lam: T) -> Cplx<T> {
    let r2 = T::SQRT_2().recip();
    match f {
        Factor::Y => Cplx::new(r2 / lam, T::zero()),
        Factor::Yx => Cplx::new(T::zero(), T::from_int(mu) * r2 / lam),
        Factor::V if plus => Cplx::new(T::zero(), -r2),
        Factor::V => Cplx::new(T::zero(), r2),
    }
}

/// `(shift, weight)` pairs of `X(x) = Σ weight·e^{i·shift·x}`.
fn x_shifts<T: Real>(x: XFactor) -> Vec<(i64, Cplx<T>)> {
    let half = T::lit(0.5);
    match x {
        XFactor::One => vec![(0, Cplx::new(T::one(), T::zero()))],
        XFactor::Cos(q) => vec![
            (q as i64, Cplx::new(half, T::zero())),
            (-(q as i64), Cplx::new(half, T::zero())),
        ],
        XFactor::Sin(q) => vec![
            (q as i64, Cplx::new(T::zero(), -half)),
            (-(q as i64), Cplx::new(T::zero(), half)),
        ],
    }
}

#[derive(Clone, Copy)]
struct Var {
    plus: bool,
    h: i32,
    normal: bool,
}

/// Cubic part of `u̇⁺_j = i𝚐⁺_j`, `u̇⁻_j = −i𝚐⁺_{−j}` in the coordinates
/// `z_j = u⁺_j`, `z̄_j = u⁻_j` for `|j| ≤ j_max`, keeping the monomials of
/// degree at most one in the modes outside `tangential`.
pub fn cubic_vector_field<T: Real>(
    mass: T,
    g: &NonlinearitySpec<T>,
    tangential: &SiteSet,
    j_max: u32,
) -> Result<VectorField<T>> {
    let jm = j_max as i32;
    let mut vars = Vec::new();
    for h in -jm..=jm {
        let normal = !tangential.contains(h);
        vars.push(Var { plus: true, h, normal });
        vars.push(Var { plus: false, h, normal });
    }
    let lam: Vec<T> = (0..=jm)
        .map(|j| lambda(mass, j as i64))
        .collect::<Result<_>>()?;
    let lam_of = |mu: i64| lam[mu.unsigned_abs() as usize];
    let trunc = Truncation::new(j_max, 0, 3);
    let mut out = VectorField::new(SiteSet::empty(), trunc);
    let r2 = T::SQRT_2().recip();
    let i = Cplx::new(T::zero(), T::one());
    for term in g.terms().into_iter().filter(|t| t.degree() == 3) {
        let mut factors = Vec::new();
        factors.extend(std::iter::repeat(Factor::Y).take(term.y as usize));
        factors.extend(std::iter::repeat(Factor::Yx).take(term.yx as usize));
        factors.extend(std::iter::repeat(Factor::V).take(term.v as usize));
        let shifts = x_shifts::<T>(term.x);
        let base = Cplx::new(term.coeff * r2, T::zero());
        for a in &vars {
            for b in &vars {
                for c in &vars {
                    let triple = [a, b, c];
                    if triple.iter().filter(|v| v.normal).count() > 1 {
                        continue;
                    }
                    let mut coeff = base;
                    let mut mom = 0i64;
                    for (f, v) in factors.iter().zip(triple) {
                        let mu = if v.plus { v.h as i64 } else { -(v.h as i64) };
                        mom += mu;
                        coeff *= factor_coeff(*f, mu, v.plus, lam_of(mu));
                    }
                    if coeff == Cplx::new(T::zero(), T::zero()) {
                        continue;
                    }
                    let alpha: Vec<(i32, u32)> =
                        triple.iter().filter(|v| v.plus).map(|v| (v.h, 1)).collect();
                    let beta: Vec<(i32, u32)> =
                        triple.iter().filter(|v| !v.plus).map(|v| (v.h, 1)).collect();
                    for &(s, w) in &shifts {
                        let j = mom + s;
                        if j.unsigned_abs() > j_max as u64 {
                            continue;
                        }
                        let j = j as i32;
                        let gc = coeff * w;
                        out.add_term(
                            MonomialKey::new(Component::Z(j), vec![], vec![], alpha.clone(), beta.clone()),
                            i * gc,
                        )?;
                        out.add_term(
                            MonomialKey::new(Component::Zbar(-j), vec![], vec![], alpha.clone(), beta.clone()),
                            -i * gc,
                        )?;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Divisor vanishes for every mass: for each `|j|` the net count of
/// `u⁺` minus `u⁻` factors, minus the target, is zero.
fn structurally_resonant(key: &MonomialKey) -> bool {
    let mut net: BTreeMap<u32, i64> = BTreeMap::new();
    for &(j, e) in &key.alpha {
        *net.entry(j.unsigned_abs()).or_default() += e as i64;
    }
    for &(j, e) in &key.beta {
        *net.entry(j.unsigned_abs()).or_default() -= e as i64;
    }
    let v = key.component;
    *net.entry(v.site().unsigned_abs()).or_default() -= v.sigma() as i64;
    net.values().all(|&n| n == 0)
}

/// `u⁺_j·Π|u_h|²` (or its `z̄` mirror): the factor multiplying the target
/// coordinate, as the multiset of `h`, when the monomial has this shape.
fn diagonal_partner(key: &MonomialKey) -> Option<Vec<i32>> {
    let (j, plus) = match key.component {
        Component::Z(j) => (j, true),
        Component::Zbar(j) => (j, false),
        _ => return None,
    };
    let (mut same, other) = if plus {
        (key.alpha.clone(), &key.beta)
    } else {
        (key.beta.clone(), &key.alpha)
    };
    let idx = same.iter().position(|&(h, _)| h == j)?;
    same[idx].1 -= 1;
    same.retain(|&(_, e)| e > 0);
    if &same != other {
        return None;
    }
    Some(
        same.iter()
            .flat_map(|&(h, e)| std::iter::repeat(h).take(e as usize))
            .collect(),
    )
}

/// Result of the cubic Birkhoff step: frequency-amplitude relations
/// `ω_j = λ_j + Σ A_{ja}ξ_a` and `Ω_j = λ_j + Σ D_{ja}ξ_a`.
#[derive(Clone, Debug)]
pub struct BirkhoffData<T: Real> {
    pub mass: T,
    pub sites: SiteSet,
    pub j_max: u32,
    /// `A` over the positive tangential sites.
    pub twist: Vec<Vec<T>>,
    /// `D_j` for every normal `|j| ≤ j_max`.
    pub normal_shift: BTreeMap<i32, Vec<T>>,
    /// Cubic field in `u`-coordinates.
    pub cubic: VectorField<T>,
    /// Structurally resonant cubic terms kept in the normal form.
    pub resonant: VectorField<T>,
    /// Generator of the step.
    pub generator: VectorField<T>,
    /// Non-resonant terms with divisor below the floor.
    pub near_resonances: Vec<SkippedTerm<T>>,
    /// Resonant terms that are not of the form `u_j·|u_h|²`.
    pub non_diagonal: usize,
    /// Smallest divisor among removed terms.
    pub min_divisor: T,
}

fn imag_check<T: Real>(v: Cplx<T>, what: &str) -> Result<T> {
    if v.im.abs() > T::lit(1e-12) * (T::one() + v.re.abs()) {
        return Err(Error::Symmetry(format!("{what} has imaginary part {}", v.im)));
    }
    Ok(v.re)
}

/// Builds the cubic field, removes its non-resonant part and extracts the
/// twist and normal-frequency shifts.
pub fn birkhoff_third_order<T: Real>(
    params: &ModelParams<T>,
    g: &NonlinearitySpec<T>,
) -> Result<BirkhoffData<T>> {
    g.validate_kam_class()?;
    if let Some(t) = g.terms().iter().find(|t| t.degree() < 3) {
        return Err(Error::Config(format!(
            "the Birkhoff step needs a nonlinearity of degree ≥ 3, found {t:?}"
        )));
    }
    let sites = params.sites().clone();
    let j_max = params.truncation().j_max;
    let m = params.mass();
    let cubic = cubic_vector_field(m, g, &sites, j_max)?;
    let nf0 = NormalForm::unperturbed(m, &SiteSet::empty(), j_max)?;
    let sol = solve_homological_with(&nf0, &cubic, T::lit(BIRKHOFF_FLOOR), structurally_resonant)?;

    let min_divisor = cubic
        .terms()
        .filter(|(k, _)| !structurally_resonant(k))
        .map(|(k, _)| nf0.divisor(k).map(|d| d.norm()))
        .collect::<Result<Vec<T>>>()?
        .into_iter()
        .fold(T::infinity(), T::min);

    let plus = sites.plus().to_vec();
    let d = plus.len();
    let slot = |h: i32| plus.iter().position(|&p| p == h.abs());
    let mut twist = vec![vec![T::zero(); d]; d];
    let mut normal_shift: BTreeMap<i32, Vec<T>> = sites
        .normal_sites(j_max)
        .into_iter()
        .map(|j| (j, vec![T::zero(); d]))
        .collect();
    let mut non_diagonal = 0;
    for (key, &c) in sol.resonant.terms() {
        let Component::Z(j) = key.component else { continue };
        let Some(partner) = diagonal_partner(key) else {
            non_diagonal += 1;
            continue;
        };
        // only first-order action dependence: partners must be tangential
        if partner.len() != 1 {
            continue;
        }
        let Some(b) = slot(partner[0]) else { continue };
        if !sites.contains(partner[0]) {
            continue;
        }
        let shift = imag_check(Cplx::new(T::zero(), T::one()) * c, "frequency shift")?;
        if sites.contains(j) {
            if j > 0 {
                twist[slot(j).expect("tangential")][b] += shift;
            }
        } else if let Some(row) = normal_shift.get_mut(&j) {
            row[b] += shift;
        }
    }
    Ok(BirkhoffData {
        mass: m,
        sites,
        j_max,
        twist,
        normal_shift,
        cubic,
        resonant: sol.resonant,
        generator: sol.generator,
        near_resonances: sol.skipped,
        non_diagonal,
        min_divisor,
    })
}

/// The part of the `u`-coordinate field `resonant_u` that is linear in the
/// normal modes, written on the torus `u±_a = √ξ_{|a|}e^{±ix_a}` at `y = 0`.
pub fn torus_linear_part<T: Real>(
    resonant_u: &VectorField<T>,
    sites: &SiteSet,
    xi: &[T],
    j_max: u32,
) -> Result<VectorField<T>> {
    let n = sites.n();
    let plus = sites.plus();
    if xi.len() != plus.len() {
        return Err(Error::Contract("one amplitude per positive site is required".into()));
    }
    let amp = |h: i32| xi[plus.iter().position(|&p| p == h.abs()).expect("tangential")].sqrt();
    let deg = resonant_u.truncation().d_max;
    let mut out = VectorField::new(sites.clone(), Truncation::new(j_max, deg, 1));
    for (key, &c) in resonant_u.terms() {
        let target = key.component.site();
        if sites.contains(target) {
            continue;
        }
        let mut k = vec![0i32; n];
        let mut coeff = c;
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        for (list, sign) in [(&key.alpha, 1i32), (&key.beta, -1i32)] {
            for &(h, e) in list {
                if sites.contains(h) {
                    k[sites.position(h).expect("tangential")] += sign * e as i32;
                    coeff = coeff * amp(h).powi(e as i32);
                } else if sign > 0 {
                    alpha.push((h, e));
                } else {
                    beta.push((h, e));
                }
            }
        }
        let nk = MonomialKey::new(key.component, k, vec![0; n], alpha, beta);
        if nk.z_degree() == 1 {
            out.add_term(nk, coeff)?;
        }
    }
    Ok(out)
}

/// `Ω⁺_j = Ω_j + iP^{z_j,z_j}` and `ω⁺_j = ω_j + P^{(x_j)}` from the
/// `x`-averaged constant-coefficient part of `P`.
pub fn frequency_correction<T: Real>(p: &VectorField<T>, nf: &NormalForm<T>) -> Result<NormalForm<T>> {
    if p.sites() != &nf.sites {
        return Err(Error::Contract("field and normal form live on different sites".into()));
    }
    let n = nf.sites.n();
    let mut out = nf.clone();
    for (pos, j) in nf.sites.sites().into_iter().enumerate() {
        let c = p.coeff(&MonomialKey::constant(Component::X(j), n));
        out.omega[pos] += imag_check(c, &format!("correction of ω_{j}"))?;
    }
    let i = Cplx::new(T::zero(), T::one());
    for (&j, w) in out.big_omega.iter_mut() {
        let c = p.coeff(&MonomialKey::linear(Component::Z(j), n, j, false));
        *w += imag_check(i * c, &format!("correction iP^(z_{j},z_{j})"))?;
    }
    Ok(out)
}

impl<T: Real> BirkhoffData<T> {
    /// `ω(ξ) = λ + Aξ` on the tangential sites.
    pub fn omega_at(&self, xi: &[T]) -> Vec<T> {
        self.sites
            .plus()
            .iter()
            .zip(&self.twist)
            .map(|(&j, row)| {
                lambda(self.mass, j as i64).expect("validated mass")
                    + row.iter().zip(xi).map(|(&a, &x)| a * x).sum::<T>()
            })
            .collect()
    }

    /// `Ω_j(ξ) = λ_j + D_j·ξ` from the stored shifts.
    pub fn big_omega_at(&self, xi: &[T]) -> BTreeMap<i32, T> {
        self.normal_shift
            .iter()
            .map(|(&j, row)| {
                let w = lambda(self.mass, j as i64).expect("validated mass")
                    + row.iter().zip(xi).map(|(&a, &x)| a * x).sum::<T>();
                (j, w)
            })
            .collect()
    }

    /// Normal form at amplitudes `ξ`; `Ω` goes through the symmetrized
    /// torus field and [`frequency_correction`].
    pub fn normal_form_at(&self, xi: &[T]) -> Result<NormalForm<T>> {
        let mut nf = NormalForm::unperturbed(self.mass, &self.sites, self.j_max)?;
        let om = self.omega_at(xi);
        for (p, w) in nf.omega.iter_mut().enumerate() {
            *w = om[p / 2];
        }
        let p = symmetrize(&torus_linear_part(&self.resonant, &self.sites, xi, self.j_max)?);
        let mut nf = frequency_correction(&p, &nf)?;
        nf.twist = self.twist.clone();
        if self.j_max >= 15 {
            let pts: Vec<(i32, T)> = (8..=self.j_max.min(32) as i32)
                .filter_map(|j| nf.big_omega_of(j).map(|w| (j, w)))
                .collect();
            nf.a_const = asymptotic_fit(&pts, self.mass)?.a_const;
        }
        Ok(nf)
    }
}
