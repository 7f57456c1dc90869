//! Quasi-periodic standing waves in the basis `cos(ℓ·θ)·cos(jx)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FieldState;
use crate::scalar::Real;
use crate::spectral;

/// `ℓ ∈ [−L, L]^d` with `ℓ = 0` or first nonzero entry positive, in
/// lexicographic order. `cos(ℓ·θ)` is even in `ℓ`, so this half box indexes
/// every harmonic once.
pub fn half_box_modes(d: usize, l_max: u32) -> Vec<Vec<i32>> {
    let l = l_max as i32;
    let mut out = Vec::new();
    let mut cur = vec![-l; d];
    if d == 0 {
        return vec![Vec::new()];
    }
    loop {
        let canonical = match cur.iter().find(|&&v| v != 0) {
            None => true,
            Some(&v) => v > 0,
        };
        if canonical {
            out.push(cur.clone());
        }
        let mut p = d;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            if cur[p] < l {
                cur[p] += 1;
                for q in cur.iter_mut().skip(p + 1) {
                    *q = -l;
                }
                break;
            }
        }
    }
}

/// Frequencies `ω∞` and coefficients `ŷ_{ℓ,j}` of
/// `y(θ, x) = Σ ŷ_{ℓ,j} cos(ℓ·θ) cos(jx)` with `θ = ω∞ t`.
#[derive(Clone, Debug, PartialEq)]
pub struct QpSolution<T: Real> {
    pub omega: Vec<T>,
    pub xi: Vec<T>,
    pub sites: Vec<i32>,
    pub l_max: u32,
    pub j_max: u32,
    modes: Vec<Vec<i32>>,
    coeffs: Vec<T>,
}

impl<T: Real> QpSolution<T> {
    /// All-zero coefficients; `sites` are the positive tangential sites.
    pub fn zeros(sites: Vec<i32>, omega: Vec<T>, xi: Vec<T>, l_max: u32, j_max: u32) -> Self {
        let modes = half_box_modes(sites.len(), l_max);
        let coeffs = vec![T::zero(); modes.len() * (j_max as usize + 1)];
        Self {
            omega,
            xi,
            sites,
            l_max,
            j_max,
            modes,
            coeffs,
        }
    }

    pub fn dim(&self) -> usize {
        self.sites.len()
    }

    pub fn modes(&self) -> &[Vec<i32>] {
        &self.modes
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    fn stride(&self) -> usize {
        self.j_max as usize + 1
    }

    /// Index of `ℓ` (or `−ℓ`) in [`Self::modes`].
    pub fn mode_index(&self, l: &[i32]) -> Option<usize> {
        if l.len() != self.dim() || l.iter().any(|v| v.unsigned_abs() > self.l_max) {
            return None;
        }
        let neg: Vec<i32> = l.iter().map(|v| -v).collect();
        self.modes
            .binary_search_by(|m| m.as_slice().cmp(l))
            .or_else(|_| self.modes.binary_search_by(|m| m.as_slice().cmp(&neg)))
            .ok()
    }

    pub fn slot(&self, l: &[i32], j: u32) -> Option<usize> {
        if j > self.j_max {
            return None;
        }
        Some(self.mode_index(l)? * self.stride() + j as usize)
    }

    pub fn get(&self, l: &[i32], j: u32) -> T {
        self.slot(l, j).map(|s| self.coeffs[s]).unwrap_or_else(T::zero)
    }

    pub fn set(&mut self, l: &[i32], j: u32, value: T) -> Result<()> {
        let s = self.slot(l, j).ok_or_else(|| {
            Error::Contract(format!("harmonic ({l:?}, {j}) outside the truncation"))
        })?;
        self.coeffs[s] = value;
        Ok(())
    }

    /// `(ℓ, j, ŷ)` for every coefficient.
    pub fn entries(&self) -> impl Iterator<Item = (&[i32], u32, T)> + '_ {
        let st = self.stride();
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(s, &c)| (self.modes[s / st].as_slice(), (s % st) as u32, c))
    }

    /// The basis element `e_a` for tangential site index `a`.
    pub fn unit_mode(&self, a: usize) -> Vec<i32> {
        let mut l = vec![0; self.dim()];
        l[a] = 1;
        l
    }

    /// `y(θ, x)`.
    pub fn eval_angle(&self, theta: &[T], x: T) -> T {
        self.entries()
            .filter(|(_, _, c)| *c != T::zero())
            .map(|(l, j, c)| {
                let ph: T = l.iter().zip(theta).map(|(&li, &t)| T::from_int(li as i64) * t).sum();
                c * ph.cos() * (T::from_int(j as i64) * x).cos()
            })
            .sum()
    }

    /// `(y, y_t)` at time `t` and position `x`.
    pub fn eval_time(&self, t: T, x: T) -> (T, T) {
        let mut y = T::zero();
        let mut v = T::zero();
        for (l, j, c) in self.entries() {
            if c == T::zero() {
                continue;
            }
            let lw: T = l
                .iter()
                .zip(&self.omega)
                .map(|(&li, &w)| T::from_int(li as i64) * w)
                .sum();
            let cx = (T::from_int(j as i64) * x).cos();
            y += c * (lw * t).cos() * cx;
            v -= c * lw * (lw * t).sin() * cx;
        }
        (y, v)
    }

    /// Grid state at time `t`.
    pub fn state_at(&self, t: T, n: usize) -> FieldState<T> {
        let x = spectral::grid::<T>(n);
        let (y, v) = x.iter().map(|&xk| self.eval_time(t, xk)).unzip();
        FieldState { y, v }
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    /// Copies coefficients into a solution with other cutoffs.
    pub fn resized(&self, l_max: u32, j_max: u32) -> Self {
        let mut out = Self::zeros(self.sites.clone(), self.omega.clone(), self.xi.clone(), l_max, j_max);
        for (l, j, c) in self.entries() {
            if let Some(s) = out.slot(l, j) {
                out.coeffs[s] = c;
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&QpDoc::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: QpDoc<T> = serde_json::from_str(s)?;
        doc.try_into()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
struct CoeffEntry<T: Real> {
    l: Vec<i32>,
    j: u32,
    value: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
struct QpDoc<T: Real> {
    sites: Vec<i32>,
    xi: Vec<T>,
    omega: Vec<T>,
    l_max: u32,
    j_max: u32,
    coeffs: Vec<CoeffEntry<T>>,
}

impl<T: Real> From<&QpSolution<T>> for QpDoc<T> {
    fn from(s: &QpSolution<T>) -> Self {
        QpDoc {
            sites: s.sites.clone(),
            xi: s.xi.clone(),
            omega: s.omega.clone(),
            l_max: s.l_max,
            j_max: s.j_max,
            coeffs: s
                .entries()
                .filter(|(_, _, c)| *c != T::zero())
                .map(|(l, j, value)| CoeffEntry {
                    l: l.to_vec(),
                    j,
                    value,
                })
                .collect(),
        }
    }
}

impl<T: Real> TryFrom<QpDoc<T>> for QpSolution<T> {
    type Error = Error;
    fn try_from(d: QpDoc<T>) -> Result<Self> {
        if d.omega.len() != d.sites.len() || d.xi.len() != d.sites.len() {
            return Err(Error::Config("omega/xi length does not match sites".into()));
        }
        let mut s = QpSolution::zeros(d.sites, d.omega, d.xi, d.l_max, d.j_max);
        for e in d.coeffs {
            s.set(&e.l, e.j, e.value)?;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_box_counts() {
        assert_eq!(half_box_modes(1, 3).len(), 4);
        // (7² − 1)/2 + 1
        assert_eq!(half_box_modes(2, 3).len(), 25);
        let m = half_box_modes(2, 1);
        assert!(m.contains(&vec![0, 0]) && m.contains(&vec![1, -1]) && !m.contains(&vec![-1, 1]));
    }

    #[test]
    fn mode_lookup_is_even() {
        let mut s = QpSolution::<f64>::zeros(vec![1, 3], vec![1.0, 2.0], vec![0.1, 0.1], 2, 4);
        s.set(&[-1, 2], 3, 0.5).unwrap();
        assert_eq!(s.get(&[1, -2], 3), 0.5);
        assert!(s.set(&[3, 0], 0, 1.0).is_err());
    }

    #[test]
    fn time_derivative_matches_difference() {
        let mut s = QpSolution::<f64>::zeros(vec![1, 3], vec![1.3, 3.1], vec![0.1, 0.1], 2, 4);
        s.set(&[1, 0], 1, 0.4).unwrap();
        s.set(&[1, -1], 2, 0.1).unwrap();
        s.set(&[0, 2], 0, -0.2).unwrap();
        let (t, x, h) = (0.7, 0.3, 1e-5);
        let (_, v) = s.eval_time(t, x);
        let fd = (s.eval_time(t + h, x).0 - s.eval_time(t - h, x).0) / (2.0 * h);
        assert!((v - fd).abs() < 1e-9);
        let th = [1.3 * t, 3.1 * t];
        assert!((s.eval_angle(&th, x) - s.eval_time(t, x).0).abs() < 1e-14);
    }

    #[test]
    fn json_roundtrip() {
        let mut s = QpSolution::<f64>::zeros(vec![1], vec![1.4], vec![1e-3], 3, 8);
        s.set(&[1], 1, 0.0632).unwrap();
        s.set(&[3], 3, -1e-7).unwrap();
        let back = QpSolution::<f64>::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
