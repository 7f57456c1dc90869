//! Polynomial nonlinearities `g(x, y, y_x, v)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Explicit `x`-dependence of a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum XFactor {
    #[default]
    One,
    Cos(u32),
    Sin(u32),
}

impl XFactor {
    pub fn eval<T: Real>(self, x: T) -> T {
        match self {
            XFactor::One => T::one(),
            XFactor::Cos(q) => (T::from_int(q as i64) * x).cos(),
            XFactor::Sin(q) => (T::from_int(q as i64) * x).sin(),
        }
    }

    /// `+1` if even under `x ↦ −x`, `−1` if odd.
    pub fn parity(self) -> i32 {
        match self {
            XFactor::Sin(q) if q != 0 => -1,
            _ => 1,
        }
    }
}

/// `coeff · X(x) · y^y · y_x^yx · v^v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GTerm<T> {
    pub coeff: T,
    #[serde(default)]
    pub x: XFactor,
    #[serde(default)]
    pub y: u32,
    #[serde(default)]
    pub yx: u32,
    #[serde(default)]
    pub v: u32,
}

impl<T: Real> GTerm<T> {
    pub fn new(coeff: T, y: u32, yx: u32, v: u32) -> Self {
        Self {
            coeff,
            x: XFactor::One,
            y,
            yx,
            v,
        }
    }

    pub fn with_x(mut self, x: XFactor) -> Self {
        self.x = x;
        self
    }

    pub fn degree(&self) -> u32 {
        self.y + self.yx + self.v
    }

    /// Invariance under `v ↦ −v`.
    pub fn even_in_v(&self) -> bool {
        self.v % 2 == 0
    }

    /// Invariance under `(x, y_x) ↦ (−x, −y_x)`.
    pub fn reality(&self) -> bool {
        let s = if self.yx % 2 == 0 { 1 } else { -1 };
        self.x.parity() * s == 1
    }

    pub fn eval(&self, x: T, y: T, yx: T, v: T) -> T {
        self.coeff
            * self.x.eval(x)
            * y.powi(self.y as i32)
            * yx.powi(self.yx as i32)
            * v.powi(self.v as i32)
    }

    pub fn eval_complex(&self, x: T, y: Cplx<T>, yx: Cplx<T>, v: Cplx<T>) -> Cplx<T> {
        let c = self.coeff * self.x.eval(x);
        Cplx::new(c, T::zero()) * y.powu(self.y) * yx.powu(self.yx) * v.powu(self.v)
    }
}

/// `g = [y·y_x²] + h.o.t.`, both parts optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct NonlinearitySpec<T: Real> {
    #[serde(default = "yes")]
    pub leading: bool,
    #[serde(default)]
    pub hot: Vec<GTerm<T>>,
}

fn yes() -> bool {
    true
}

impl<T: Real> Default for NonlinearitySpec<T> {
    fn default() -> Self {
        Self::leading()
    }
}

impl<T: Real> NonlinearitySpec<T> {
    /// `g = y·y_x²`.
    pub fn leading() -> Self {
        Self {
            leading: true,
            hot: Vec::new(),
        }
    }

    /// `g ≡ 0`.
    pub fn zero() -> Self {
        Self {
            leading: false,
            hot: Vec::new(),
        }
    }

    /// A nonlinearity given by explicit terms only.
    pub fn from_terms(terms: Vec<GTerm<T>>) -> Self {
        Self {
            leading: false,
            hot: terms,
        }
    }

    pub fn with_term(mut self, t: GTerm<T>) -> Self {
        self.hot.push(t);
        self
    }

    /// All terms, the leading cubic first.
    pub fn terms(&self) -> Vec<GTerm<T>> {
        let mut out = Vec::with_capacity(self.hot.len() + 1);
        if self.leading {
            out.push(GTerm::new(T::one(), 1, 2, 0));
        }
        out.extend(self.hot.iter().copied().filter(|t| t.coeff != T::zero()));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms().is_empty()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms().iter().map(|t| t.degree()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: T, y: T, yx: T, v: T) -> T {
        self.terms().iter().map(|t| t.eval(x, y, yx, v)).sum()
    }

    pub fn eval_complex(&self, x: T, y: Cplx<T>, yx: Cplx<T>, v: Cplx<T>) -> Cplx<T> {
        self.terms()
            .iter()
            .fold(Cplx::new(T::zero(), T::zero()), |acc, t| acc + t.eval_complex(x, y, yx, v))
    }

    /// Requires evenness in `v`, the parity assumption and quadratic vanishing.
    pub fn validate_kam_class(&self) -> Result<()> {
        for t in self.terms() {
            if t.degree() < 2 {
                return Err(Error::Config(format!(
                    "term {t:?} does not vanish quadratically at the origin"
                )));
            }
            if !t.even_in_v() {
                return Err(Error::Config(format!("term {t:?} is odd in v")));
            }
            if !t.reality() {
                return Err(Error::Config(format!(
                    "term {t:?} breaks invariance under (x, y_x) ↦ (−x, −y_x)"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of the sampled parity checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub even_in_v: bool,
    pub reality: bool,
    pub max_even_in_v_defect: f64,
    pub max_reality_defect: f64,
    pub samples: usize,
}

/// Samples `g(x,y,y_x,−v) − g(x,y,y_x,v)` and `g(−x,y,−y_x,v) − g(x,y,y_x,v)`
/// at 100 random points and compares against `1e−12`.
pub fn check_g_symmetries<T: Real>(g: &NonlinearitySpec<T>, seed: u64) -> SymmetryReport {
    const SAMPLES: usize = 100;
    let tol = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut dv, mut dr) = (0.0f64, 0.0f64);
    for _ in 0..SAMPLES {
        let x = T::lit(rng.gen_range(0.0..std::f64::consts::TAU));
        let y = T::lit(rng.gen_range(-1.0..1.0));
        let yx = T::lit(rng.gen_range(-1.0..1.0));
        let v = T::lit(rng.gen_range(-1.0..1.0));
        let g0 = g.eval(x, y, yx, v);
        dv = dv.max((g.eval(x, y, yx, -v) - g0).abs().as_f64());
        dr = dr.max((g.eval(-x, y, -yx, v) - g0).abs().as_f64());
    }
    SymmetryReport {
        even_in_v: dv <= tol,
        reality: dr <= tol,
        max_even_in_v_defect: dv,
        max_reality_defect: dr,
        samples: SAMPLES,
    }
}
