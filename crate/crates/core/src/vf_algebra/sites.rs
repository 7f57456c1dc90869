use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tangential sites `I = I⁺ ∪ (−I⁺)`.
///
/// Coordinates indexed by `I` are enumerated as `j₁, −j₁, j₂, −j₂, …` with
/// `j₁ < j₂ < …` the sorted positive sites.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i32>", into = "Vec<i32>")]
pub struct SiteSet {
    plus: Vec<i32>,
}

impl SiteSet {
    pub fn new<I: IntoIterator<Item = i32>>(plus: I) -> Result<Self> {
        let mut plus: Vec<i32> = plus.into_iter().collect();
        if let Some(bad) = plus.iter().find(|&&j| j <= 0) {
            return Err(Error::Config(format!(
                "tangential sites must be positive integers, got {bad}"
            )));
        }
        plus.sort_unstable();
        plus.dedup();
        Ok(Self { plus })
    }

    pub fn empty() -> Self {
        Self { plus: Vec::new() }
    }

    pub fn plus(&self) -> &[i32] {
        &self.plus
    }

    /// Cardinality of the symmetric set `I`.
    pub fn n(&self) -> usize {
        2 * self.plus.len()
    }

    /// The fixed enumeration of `I`.
    pub fn sites(&self) -> Vec<i32> {
        (0..self.n()).map(|p| self.site_at(p)).collect()
    }

    pub fn site_at(&self, pos: usize) -> i32 {
        let j = self.plus[pos / 2];
        if pos % 2 == 0 {
            j
        } else {
            -j
        }
    }

    pub fn position(&self, j: i32) -> Option<usize> {
        let a = self.plus.binary_search(&j.abs()).ok()?;
        Some(if j > 0 { 2 * a } else { 2 * a + 1 })
    }

    /// Position of the mirrored site `−j` for the coordinate at `pos`.
    #[inline]
    pub fn mirror(pos: usize) -> usize {
        pos ^ 1
    }

    pub fn contains(&self, j: i32) -> bool {
        j != 0 && self.plus.binary_search(&j.abs()).is_ok()
    }

    /// Membership in `ℤⁿ_odd = {k : k₋ⱼ = −kⱼ}`.
    pub fn is_odd(&self, k: &[i32]) -> bool {
        debug_assert_eq!(k.len(), self.n());
        k.chunks_exact(2).all(|pair| pair[0] == -pair[1])
    }

    /// Normal sites `{j ∉ I : |j| ≤ j_max}` in increasing order.
    pub fn normal_sites(&self, j_max: u32) -> Vec<i32> {
        let jm = j_max as i32;
        (-jm..=jm).filter(|&j| !self.contains(j)).collect()
    }

    pub fn is_normal(&self, j: i32, j_max: u32) -> bool {
        j.unsigned_abs() <= j_max && !self.contains(j)
    }
}

impl TryFrom<Vec<i32>> for SiteSet {
    type Error = Error;
    fn try_from(v: Vec<i32>) -> Result<Self> {
        SiteSet::new(v)
    }
}

impl From<SiteSet> for Vec<i32> {
    fn from(s: SiteSet) -> Vec<i32> {
        s.plus
    }
}

/// Truncation bounds for sparse vector fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Truncation {
    /// Normal-mode cutoff `|j| ≤ j_max`.
    pub j_max: u32,
    /// Fourier cutoff `|k|₁ ≤ k_max`.
    pub k_max: u32,
    /// Cutoff on the polynomial degree `|i| + |α| + |β|`.
    pub d_max: u32,
}

impl Truncation {
    pub fn new(j_max: u32, k_max: u32, d_max: u32) -> Self {
        Self { j_max, k_max, d_max }
    }
}
