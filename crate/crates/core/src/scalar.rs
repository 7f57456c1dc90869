//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Real`], which is implemented for `f32`
//! and `f64`. The FFT and dense linear solve are concrete per type so that the
//! generic code never has to juggle overlapping method names from `rustfft` or
//! `nalgebra` trait bounds.

use std::cell::RefCell;
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftPlanner;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Complex numbers over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + NumAssign
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Unnormalized in-place DFT; `inverse` selects the `e^{+i...}` sign.
    fn fft_in_place(buf: &mut [Complex<Self>], inverse: bool);

    /// Solves `a x = b` for a row-major `n x n` matrix; `None` when singular.
    fn solve_dense(a: &[Self], b: &[Self], n: usize) -> Option<Vec<Self>>;
}

macro_rules! impl_real {
    ($t:ty, $planner:ident) => {
        thread_local! {
            static $planner: RefCell<FftPlanner<$t>> = RefCell::new(FftPlanner::new());
        }

        impl Real for $t {
            fn fft_in_place(buf: &mut [Complex<$t>], inverse: bool) {
                if buf.len() <= 1 {
                    return;
                }
                let plan = $planner.with(|p| {
                    let mut p = p.borrow_mut();
                    if inverse {
                        p.plan_fft_inverse(buf.len())
                    } else {
                        p.plan_fft_forward(buf.len())
                    }
                });
                plan.process(buf);
            }

            fn solve_dense(a: &[$t], b: &[$t], n: usize) -> Option<Vec<$t>> {
                assert_eq!(a.len(), n * n);
                assert_eq!(b.len(), n);
                let m = nalgebra::DMatrix::<$t>::from_row_slice(n, n, a);
                let rhs = nalgebra::DVector::<$t>::from_column_slice(b);
                let lu = m.lu();
                let x = lu.solve(&rhs)?;
                if x.iter().all(|v| v.is_finite()) {
                    Some(x.iter().copied().collect())
                } else {
                    None
                }
            }
        }
    };
}

impl_real!(f64, PLANNER_F64);
impl_real!(f32, PLANNER_F32);
