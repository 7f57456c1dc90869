//! Fourier helpers on the uniform grid `x_k = 2πk/N` of the circle.
//!
//! Coefficient arrays are stored in FFT order: index `k` holds wavenumber
//! [`freq`]`(k, N)`, and are normalized so that `u(x) = Σ û_j e^{ijx}`.

use num_traits::Zero;

use crate::scalar::{Cplx, Real};

/// Wavenumber stored at FFT index `k`; the Nyquist slot maps to `−N/2`.
#[inline]
pub fn freq(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// FFT index of wavenumber `j`.
#[inline]
pub fn index_of(j: i64, n: usize) -> usize {
    j.rem_euclid(n as i64) as usize
}

pub fn grid<T: Real>(n: usize) -> Vec<T> {
    let h = T::TAU() / T::from_int(n as i64);
    (0..n).map(|k| T::from_int(k as i64) * h).collect()
}

/// Normalized coefficients of real samples.
pub fn forward<T: Real>(values: &[T]) -> Vec<Cplx<T>> {
    let mut buf: Vec<Cplx<T>> = values.iter().map(|&v| Cplx::new(v, T::zero())).collect();
    forward_in_place(&mut buf);
    buf
}

pub fn forward_in_place<T: Real>(buf: &mut [Cplx<T>]) {
    T::fft_in_place(buf, false);
    let s = T::from_int(buf.len() as i64).recip();
    for c in buf.iter_mut() {
        *c = c.scale(s);
    }
}

/// Samples of `Σ û_j e^{ijx}` on the grid.
pub fn synthesize<T: Real>(coeffs: &[Cplx<T>]) -> Vec<Cplx<T>> {
    let mut buf = coeffs.to_vec();
    T::fft_in_place(&mut buf, true);
    buf
}

pub fn synthesize_real<T: Real>(coeffs: &[Cplx<T>]) -> Vec<T> {
    synthesize(coeffs).into_iter().map(|c| c.re).collect()
}

/// Spectral `∂_x^order` of real samples; the Nyquist mode is dropped.
pub fn derivative<T: Real>(values: &[T], order: u32) -> Vec<T> {
    let n = values.len();
    let mut c = forward(values);
    for (k, ck) in c.iter_mut().enumerate() {
        if n % 2 == 0 && k == n / 2 {
            *ck = Cplx::zero();
            continue;
        }
        let ik = Cplx::new(T::zero(), T::from_int(freq(k, n)));
        *ck *= ik.powu(order);
    }
    synthesize_real(&c)
}

/// Largest `|j|` carrying a coefficient above `tol`.
pub fn bandwidth<T: Real>(coeffs: &[Cplx<T>], tol: T) -> u64 {
    let n = coeffs.len();
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > tol)
        .map(|(k, _)| freq(k, n).unsigned_abs())
        .max()
        .unwrap_or(0)
}

/// Re-indexes coefficients onto `m ≥ n` slots; a Nyquist coefficient is split
/// evenly between `±n/2`.
pub fn zero_pad<T: Real>(coeffs: &[Cplx<T>], m: usize) -> Vec<Cplx<T>> {
    let n = coeffs.len();
    assert!(m >= n);
    let mut out = vec![Cplx::zero(); m];
    for (k, &c) in coeffs.iter().enumerate() {
        let j = freq(k, n);
        if n % 2 == 0 && k == n / 2 && m > n {
            let half = c.scale(T::lit(0.5));
            out[index_of(j, m)] += half;
            out[index_of(-j, m)] += half;
        } else {
            out[index_of(j, m)] += c;
        }
    }
    out
}

/// Inverse of [`zero_pad`] for band-limited data: folds `|j| ≤ n/2` back.
pub fn truncate<T: Real>(coeffs: &[Cplx<T>], n: usize) -> Vec<Cplx<T>> {
    let m = coeffs.len();
    let mut out = vec![Cplx::zero(); n];
    for (k, o) in out.iter_mut().enumerate() {
        let j = freq(k, n);
        *o = coeffs[index_of(j, m)];
        if n % 2 == 0 && k == n / 2 && m > n {
            *o += coeffs[index_of(-j, m)];
        }
    }
    out
}
