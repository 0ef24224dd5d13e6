//! Floating-point abstraction shared by every pricing routine.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type the engines are generic over. Implemented for `f32` and `f64`.
///
/// Besides the `num_traits` float surface, the lattice and closed-form code
/// needs two special functions that `num_traits` does not carry: the
/// complementary error function (for the normal CDF) and `ln Γ` (for
/// binomial coefficients at large step counts).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    fn erfc(self) -> Self;

    fn ln_gamma(self) -> Self;

    /// Relative tolerance used when snapping log-prices onto lattice levels.
    fn snap_tolerance() -> Self;

    #[inline]
    fn lit(v: f64) -> Self {
        // every f64 literal used in this crate is representable (possibly rounded) in f32
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("count representable in scalar type")
    }

    #[inline]
    fn from_index(v: i64) -> Self {
        Self::from_i64(v).expect("index representable in scalar type")
    }
}

impl Scalar for f64 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }

    #[inline]
    fn ln_gamma(self) -> Self {
        libm::lgamma(self)
    }

    fn snap_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }

    #[inline]
    fn ln_gamma(self) -> Self {
        libm::lgammaf(self)
    }

    fn snap_tolerance() -> Self {
        64.0 * f32::EPSILON
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<F> {
    sum: F,
    compensation: F,
}

impl<F: Scalar> CompensatedSum<F> {
    pub fn new() -> Self {
        Self { sum: F::zero(), compensation: F::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation = self.compensation + ((self.sum - t) + x);
        } else {
            self.compensation = self.compensation + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> F {
        self.sum + self.compensation
    }
}

impl<F: Scalar> FromIterator<F> for CompensatedSum<F> {
    fn from_iter<I: IntoIterator<Item = F>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
