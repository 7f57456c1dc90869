use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vf_algebra::{SiteSet, Truncation};

/// `λ_j = √(j² + m)`.
pub fn lambda<T: Real>(m: T, j: i64) -> Result<T> {
    if !(m > T::zero()) {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    Ok(lambda_unchecked(m, j))
}

#[inline]
pub(crate) fn lambda_unchecked<T: Real>(m: T, j: i64) -> T {
    let jj = T::from_int(j);
    (jj * jj + m).sqrt()
}

/// Mass, tangential sites, amplitudes and discretization sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams<T>", into = "RawParams<T>")]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct ModelParams<T: Real> {
    mass: T,
    sites: SiteSet,
    xi: Vec<T>,
    grid_n: usize,
    truncation: Truncation,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams<T> {
    mass: T,
    /// Amplitude per positive tangential site.
    xi: BTreeMap<i32, T>,
    grid_n: usize,
    truncation: Truncation,
}

impl<T: Real> TryFrom<RawParams<T>> for ModelParams<T> {
    type Error = Error;
    fn try_from(r: RawParams<T>) -> Result<Self> {
        let sites = SiteSet::new(r.xi.keys().copied())?;
        let xi = r.xi.values().copied().collect();
        ModelParams::new(r.mass, sites, xi, r.grid_n, r.truncation)
    }
}

impl<T: Real> From<ModelParams<T>> for RawParams<T> {
    fn from(p: ModelParams<T>) -> Self {
        RawParams {
            mass: p.mass,
            xi: p.sites.plus().iter().copied().zip(p.xi).collect(),
            grid_n: p.grid_n,
            truncation: p.truncation,
        }
    }
}

impl<T: Real> ModelParams<T> {
    /// `xi[a]` is the amplitude of the `a`-th smallest positive site.
    pub fn new(
        mass: T,
        sites: SiteSet,
        xi: Vec<T>,
        grid_n: usize,
        truncation: Truncation,
    ) -> Result<Self> {
        let p = Self {
            mass,
            sites,
            xi,
            grid_n,
            truncation,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > T::zero()) || !self.mass.is_finite() {
            return Err(Error::Config(format!("mass must be positive, got {}", self.mass)));
        }
        if self.sites.plus().is_empty() {
            return Err(Error::Config("at least one tangential site is required".into()));
        }
        if self.xi.len() != self.sites.plus().len() {
            return Err(Error::Config(format!(
                "{} amplitudes given for {} tangential sites",
                self.xi.len(),
                self.sites.plus().len()
            )));
        }
        if let Some(x) = self.xi.iter().find(|x| !(**x > T::zero()) || !x.is_finite()) {
            return Err(Error::Config(format!("amplitudes must be positive, got {x}")));
        }
        if !self.grid_n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid_n must be a power of two, got {}",
                self.grid_n
            )));
        }
        if self.grid_n < 4 * self.truncation.j_max as usize {
            return Err(Error::Config(format!(
                "grid_n = {} is below 4·j_max = {}",
                self.grid_n,
                4 * self.truncation.j_max
            )));
        }
        if let Some(&j) = self.sites.plus().iter().find(|&&j| j as u32 > self.truncation.j_max) {
            return Err(Error::Config(format!(
                "tangential site {j} exceeds j_max = {}",
                self.truncation.j_max
            )));
        }
        Ok(())
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn sites(&self) -> &SiteSet {
        &self.sites
    }

    /// Amplitudes aligned with `sites().plus()`.
    pub fn xi(&self) -> &[T] {
        &self.xi
    }

    /// `ξ_{|j|}` for a tangential site `j`.
    pub fn xi_at(&self, j: i32) -> Option<T> {
        let a = self.sites.plus().binary_search(&j.abs()).ok()?;
        Some(self.xi[a])
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }

    pub fn lambda(&self, j: i64) -> T {
        lambda_unchecked(self.mass, j)
    }

    /// `λ_j` over the positive tangential sites.
    pub fn tangential_lambdas(&self) -> Vec<T> {
        self.sites
            .plus()
            .iter()
            .map(|&j| self.lambda(j as i64))
            .collect()
    }

    pub fn with_xi(&self, xi: Vec<T>) -> Result<Self> {
        Self::new(self.mass, self.sites.clone(), xi, self.grid_n, self.truncation)
    }

    pub fn with_grid(&self, grid_n: usize, truncation: Truncation) -> Result<Self> {
        Self::new(self.mass, self.sites.clone(), self.xi.clone(), grid_n, truncation)
    }
}
