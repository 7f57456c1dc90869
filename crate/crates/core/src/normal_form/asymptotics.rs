//! Large-`j` behaviour of the normal frequencies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::lambda;
use crate::scalar::Real;

/// Least squares for `v_j ≈ c0 + c1/j`.
fn fit_inverse<T: Real>(pts: &[(i32, T)]) -> (T, T) {
    let n = T::from_int(pts.len() as i64);
    let (mut s1, mut s2, mut sv, mut sva) = (T::zero(), T::zero(), T::zero(), T::zero());
    for &(j, v) in pts {
        let q = T::from_int(j as i64).recip();
        s1 += q;
        s2 += q * q;
        sv += v;
        sva += v * q;
    }
    let det = n * s2 - s1 * s1;
    let c0 = (sv * s2 - s1 * sva) / det;
    let c1 = (n * sva - s1 * sv) / det;
    (c0, c1)
}

fn upper_half<T: Real>(pts: &[(i32, T)]) -> &[(i32, T)] {
    &pts[pts.len() / 2..]
}

fn sorted_window<T: Real>(pts: &[(i32, T)]) -> Result<Vec<(i32, T)>> {
    let mut v: Vec<(i32, T)> = pts.iter().copied().filter(|&(j, _)| j > 0).collect();
    v.sort_by_key(|p| p.0);
    v.dedup_by_key(|p| p.0);
    if v.len() < 8 {
        return Err(Error::Contract(format!(
            "an asymptotic window needs at least 8 positive indices, got {}",
            v.len()
        )));
    }
    Ok(v)
}

/// `Ω_j = j + a + m/(2j) + r_j` over a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct AsymptoticFit<T: Real> {
    pub a_const: T,
    /// Coefficient of `1/j` left in `Ω_j − λ_j` after removing `a`.
    pub tail: T,
    pub window: (i32, i32),
    /// `(j, Ω_j, r_j)`.
    pub rows: Vec<(i32, T, T)>,
    /// `sup_j |j·r_j|`.
    pub sup_jr: T,
}

/// Fits `Ω_j − λ_j ≈ a + b/j` on the upper half of the window and reports
/// `r_j = Ω_j − j − a − m/(2j)` on all of it.
pub fn asymptotic_fit<T: Real>(omega: &[(i32, T)], mass: T) -> Result<AsymptoticFit<T>> {
    let pts = sorted_window(omega)?;
    let dev = pts
        .iter()
        .map(|&(j, w)| Ok((j, w - lambda(mass, j as i64)?)))
        .collect::<Result<Vec<_>>>()?;
    let (a, b) = fit_inverse(upper_half(&dev));
    let half = T::lit(0.5);
    let mut sup = T::zero();
    let rows = pts
        .iter()
        .map(|&(j, w)| {
            let jj = T::from_int(j as i64);
            let r = w - jj - a - half * mass / jj;
            sup = sup.max((jj * r).abs());
            (j, w, r)
        })
        .collect();
    Ok(AsymptoticFit {
        a_const: a,
        tail: b,
        window: (pts[0].0, pts[pts.len() - 1].0),
        rows,
        sup_jr: sup,
    })
}

/// `P_jj = T + R_jj` with `T` constant and `R_jj = O(1/j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct ToeplitzDecomposition<T: Real> {
    pub t_value: T,
    pub r_diag: Vec<(i32, T)>,
    pub fit_window: (i32, i32),
    /// `sup_j |j·R_jj|`.
    pub certificate: T,
    /// Largest `j²·|P_jj − T − c/j|` on the fitted half.
    pub fit_residual: T,
    pub warning: Option<String>,
}

/// Fits `P_jj = T + c/j` on the upper half of the window.
pub fn toeplitz_decompose<T: Real>(diag: &[(i32, T)]) -> Result<ToeplitzDecomposition<T>> {
    let pts = sorted_window(diag)?;
    let up = upper_half(&pts);
    let (t, c) = fit_inverse(up);
    let fit_residual = up
        .iter()
        .map(|&(j, v)| {
            let jj = T::from_int(j as i64);
            (jj * jj * (v - t - c / jj)).abs()
        })
        .fold(T::zero(), T::max);
    let r_diag: Vec<(i32, T)> = pts.iter().map(|&(j, v)| (j, v - t)).collect();
    let certificate = r_diag
        .iter()
        .map(|&(j, r)| (T::from_int(j as i64) * r).abs())
        .fold(T::zero(), T::max);
    let warning = (fit_residual > T::lit(10.0) * (T::one() + c.abs())).then(|| {
        format!("diagonal is not of the form T + c/j: j²-scaled fit residual {fit_residual:e}")
    });
    Ok(ToeplitzDecomposition {
        t_value: t,
        r_diag,
        fit_window: (pts[0].0, pts[pts.len() - 1].0),
        certificate,
        fit_residual,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(f: impl Fn(f64) -> f64) -> Vec<(i32, f64)> {
        (8..=32).map(|j| (j, f(j as f64))).collect()
    }

    #[test]
    fn unperturbed_fit() {
        let fit = asymptotic_fit(&window(|j| (j * j + 1.0).sqrt()), 1.0).unwrap();
        assert_eq!(fit.a_const, 0.0);
        assert!(fit.sup_jr <= 1.0 / 64.0);
        assert_eq!(fit.window, (8, 32));
    }

    #[test]
    fn shifted_fit() {
        let fit = asymptotic_fit(&window(|j| (j * j + 1.0).sqrt() + 0.07), 1.0).unwrap();
        assert!((fit.a_const - 0.07).abs() < 1e-13);
    }

    #[test]
    fn short_window_rejected() {
        assert!(asymptotic_fit(&[(8, 8.0), (9, 9.0)], 1.0).is_err());
    }

    #[test]
    fn constructed_toeplitz() {
        let d = toeplitz_decompose(&window(|j| 0.3 + 1.0 / j)).unwrap();
        assert!((d.t_value - 0.3).abs() < 1e-13);
        assert!((d.certificate - 1.0).abs() < 1e-12);
        assert!(d.warning.is_none());
    }

    #[test]
    fn lambda_toeplitz() {
        let m = 1.0;
        let d = toeplitz_decompose(&window(|j| (j * j + m).sqrt() - j)).unwrap();
        assert!(d.t_value.abs() < 1e-4);
        for &(j, r) in &d.r_diag {
            assert!((r * j as f64 - m / 2.0).abs() < 5e-3);
        }
    }

    #[test]
    fn oscillating_diagonal_warns() {
        let d = toeplitz_decompose(&window(|j| if j as i32 % 2 == 0 { 1.0 } else { -1.0 })).unwrap();
        assert!(d.warning.is_some());
    }
}
