//! Real grid states, the complex coordinates `u± = (Dy ± iv)/√2`, and the
//! Fourier components of the nonlinearity.

use std::io::Write;

use num_traits::Zero;

use super::nonlinearity::NonlinearitySpec;
use super::params::lambda;
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::spectral::{self, freq, index_of};

/// Samples `(y, v)` on the uniform grid `x_k = 2πk/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState<T: Real> {
    pub y: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Real> FieldState<T> {
    pub fn new(y: Vec<T>, v: Vec<T>) -> Result<Self> {
        if y.len() != v.len() || y.is_empty() {
            return Err(Error::Config(format!(
                "state arrays must have equal nonzero length, got {} and {}",
                y.len(),
                v.len()
            )));
        }
        Ok(Self { y, v })
    }

    pub fn from_fn(n: usize, y: impl Fn(T) -> T, v: impl Fn(T) -> T) -> Self {
        let x = spectral::grid::<T>(n);
        Self {
            y: x.iter().map(|&t| y(t)).collect(),
            v: x.iter().map(|&t| v(t)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn max_diff(&self, other: &Self) -> T {
        self.y
            .iter()
            .zip(&other.y)
            .chain(self.v.iter().zip(&other.v))
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }

    /// Largest defect of `y(x) = y(−x)`, `v(x) = v(−x)` on the grid.
    pub fn evenness_defect(&self) -> T {
        let n = self.len();
        let mut d = T::zero();
        for k in 0..n {
            let r = (n - k) % n;
            d = d.max((self.y[k] - self.y[r]).abs()).max((self.v[k] - self.v[r]).abs());
        }
        d
    }

    /// CSV snapshot with columns `x,y,v`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "x,y,v")?;
        let x = spectral::grid::<T>(self.len());
        for k in 0..self.len() {
            writeln!(w, "{:e},{:e},{:e}", x[k], self.y[k], self.v[k])?;
        }
        Ok(())
    }
}

/// Fourier coordinates `(u⁺_j, u⁻_j)` in FFT order, with
/// `u⁺ = Σ u⁺_j e^{ijx}` and `u⁻ = Σ u⁻_j e^{−ijx}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexState<T: Real> {
    pub plus: Vec<Cplx<T>>,
    pub minus: Vec<Cplx<T>>,
}

impl<T: Real> ComplexState<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            plus: vec![Cplx::zero(); n],
            minus: vec![Cplx::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty()
    }

    /// `max_j |conj(u⁺_j) − u⁻_j|`.
    pub fn reality_defect(&self) -> T {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(p, m)| (p.conj() - *m).norm())
            .fold(T::zero(), T::max)
    }

    pub fn get_plus(&self, j: i64) -> Cplx<T> {
        self.plus[index_of(j, self.len())]
    }

    pub fn get_minus(&self, j: i64) -> Cplx<T> {
        self.minus[index_of(j, self.len())]
    }

    pub fn set(&mut self, j: i64, plus: Cplx<T>, minus: Cplx<T>) {
        let n = self.len();
        self.plus[index_of(j, n)] = plus;
        self.minus[index_of(j, n)] = minus;
    }
}

fn lambdas<T: Real>(n: usize, m: T) -> Result<Vec<T>> {
    (0..n).map(|k| lambda(m, freq(k, n))).collect()
}

/// `(y, v) ↦ (u⁺_j, u⁻_j)`.
pub fn to_complex<T: Real>(state: &FieldState<T>, m: T) -> Result<ComplexState<T>> {
    let n = state.len();
    let lam = lambdas(n, m)?;
    let yh = spectral::forward(&state.y);
    let vh = spectral::forward(&state.v);
    let r2 = T::SQRT_2().recip();
    let i = Cplx::new(T::zero(), T::one());
    let mut out = ComplexState::zeros(n);
    for k in 0..n {
        let q = index_of(-freq(k, n), n);
        out.plus[k] = (yh[k].scale(lam[k]) + i * vh[k]).scale(r2);
        out.minus[k] = (yh[q].scale(lam[q]) - i * vh[q]).scale(r2);
    }
    Ok(out)
}

/// Coefficients `(ŷ_j, v̂_j)` of the possibly complex functions encoded by `cs`.
pub fn complex_to_coeffs<T: Real>(
    cs: &ComplexState<T>,
    m: T,
) -> Result<(Vec<Cplx<T>>, Vec<Cplx<T>>)> {
    let n = cs.len();
    let lam = lambdas(n, m)?;
    let r2 = T::SQRT_2().recip();
    let mi = Cplx::new(T::zero(), -T::one());
    let mut yh = vec![Cplx::zero(); n];
    let mut vh = vec![Cplx::zero(); n];
    for k in 0..n {
        let q = index_of(-freq(k, n), n);
        yh[k] = (cs.plus[k] + cs.minus[q]).scale(r2 / lam[k]);
        vh[k] = mi * (cs.plus[k] - cs.minus[q]).scale(r2);
    }
    Ok((yh, vh))
}

/// Inverse of [`to_complex`]; imaginary parts are discarded.
pub fn from_complex<T: Real>(cs: &ComplexState<T>, m: T) -> Result<FieldState<T>> {
    let (yh, vh) = complex_to_coeffs(cs, m)?;
    Ok(FieldState {
        y: spectral::synthesize_real(&yh),
        v: spectral::synthesize_real(&vh),
    })
}

/// Fourier components `𝚐⁺_j`, `𝚐⁻_j = 𝚐⁺_{−j}` in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct GCoefficients<T: Real> {
    pub plus: Vec<Cplx<T>>,
    pub minus: Vec<Cplx<T>>,
}

/// Evaluates `𝚐 = g(x, y, y_x, v)/√2` on a grid padded by `pad ≥ 2` and
/// projects back onto the `N` input modes.
pub fn fourier_g<T: Real>(
    cs: &ComplexState<T>,
    g: &NonlinearitySpec<T>,
    m: T,
    pad: usize,
) -> Result<GCoefficients<T>> {
    let n = cs.len();
    if g.is_zero() {
        return Ok(GCoefficients {
            plus: vec![Cplx::zero(); n],
            minus: vec![Cplx::zero(); n],
        });
    }
    if pad < 2 {
        return Err(Error::Config(format!("zero-padding factor must be ≥ 2, got {pad}")));
    }
    let (yh, vh) = complex_to_coeffs(cs, m)?;
    let scale = yh.iter().chain(&vh).fold(T::zero(), |a, c| a.max(c.norm()));
    let floor = scale * T::epsilon() * T::lit(1e3);
    let band = spectral::bandwidth(&yh, floor).max(spectral::bandwidth(&vh, floor));
    let p = pad * n;
    let deg = g.max_degree() as u64;
    if deg * band + (n as u64) / 2 >= p as u64 {
        return Err(Error::Domain(format!(
            "aliasing budget exceeded: degree {deg} × bandwidth {band} does not fit a {p}-point grid"
        )));
    }
    let yxh: Vec<Cplx<T>> = yh
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if n % 2 == 0 && k == n / 2 {
                Cplx::zero()
            } else {
                *c * Cplx::new(T::zero(), T::from_int(freq(k, n)))
            }
        })
        .collect();
    let yv = spectral::synthesize(&spectral::zero_pad(&yh, p));
    let yxv = spectral::synthesize(&spectral::zero_pad(&yxh, p));
    let vv = spectral::synthesize(&spectral::zero_pad(&vh, p));
    let x = spectral::grid::<T>(p);
    let r2 = T::SQRT_2().recip();
    let mut gv: Vec<Cplx<T>> = (0..p)
        .map(|k| g.eval_complex(x[k], yv[k], yxv[k], vv[k]).scale(r2))
        .collect();
    spectral::forward_in_place(&mut gv);
    let plus = spectral::truncate(&gv, n);
    let minus = (0..n).map(|k| plus[index_of(-freq(k, n), n)]).collect();
    Ok(GCoefficients { plus, minus })
}

/// Right-hand side `u̇⁺_j = −iλ_j u⁺_j + i𝚐⁺_j`, `u̇⁻_j = iλ_j u⁻_j − i𝚐⁻_j`.
pub fn complex_rhs<T: Real>(
    cs: &ComplexState<T>,
    g: &NonlinearitySpec<T>,
    m: T,
) -> Result<ComplexState<T>> {
    let n = cs.len();
    let lam = lambdas(n, m)?;
    let gc = fourier_g(cs, g, m, 2)?;
    let i = Cplx::new(T::zero(), T::one());
    let mut out = ComplexState::zeros(n);
    for k in 0..n {
        out.plus[k] = i * (gc.plus[k] - cs.plus[k].scale(lam[k]));
        out.minus[k] = i * (cs.minus[k].scale(lam[k]) - gc.minus[k]);
    }
    Ok(out)
}
