//! Scalar abstractions.
//!
//! [`Field`] is the minimal ordered-field contract used by the purely metric
//! parts of the crate (distances, the realization engine). It is satisfied by
//! `f32`, `f64` and exact rationals such as [`num_rational::BigRational`].
//! [`Real`] adds the transcendental operations needed by the spectral code
//! (square roots, eigenvalues, kernel evaluation) and is implemented only for
//! the IEEE float types.

use std::fmt::{Debug, Display, LowerExp};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

use crate::error::{Error, Result};

/// Ordered field with conversions from and to primitive numbers.
pub trait Field: Clone + PartialOrd + Debug + Num + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    /// Absolute value through the ordering; avoids clashing with `Float::abs`.
    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            Self::zero() - self.clone()
        } else {
            self.clone()
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Lossy conversion used for reporting and for numerical rank tests.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Conversion of a literal constant. Panics only for values the type
    /// cannot represent at all, which never happens for the constants used here.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl<T> Field for T where T: Clone + PartialOrd + Debug + Num + FromPrimitive + ToPrimitive + Send + Sync + 'static {}

/// Floating-point scalar used by the spectral and kernel code.
pub trait Real: Field + Float + FloatConst + Display + LowerExp + Default {
    /// Default relative tolerance for positive-semidefiniteness decisions.
    fn default_psd_tol() -> Self {
        Self::lit(1e-10)
    }
}

impl Real for f32 {
    fn default_psd_tol() -> Self {
        1e-5
    }
}

impl Real for f64 {}

/// Magnitude of a sample value: `|v|` for real scalars and the complex modulus
/// for complex ones. Implemented for the concrete scalar types of the crate.
pub trait Modulus {
    type Output: Field;
    fn modulus(&self) -> Self::Output;
}

macro_rules! modulus_for_ordered {
    ($($t:ty),*) => {$(
        impl Modulus for $t {
            type Output = $t;
            fn modulus(&self) -> $t {
                self.abs_val()
            }
        }
    )*};
}

modulus_for_ordered!(f32, f64, Ratio<i64>, Ratio<i128>, BigRational);

impl Modulus for Complex<f32> {
    type Output = f32;
    fn modulus(&self) -> f32 {
        self.norm()
    }
}

impl Modulus for Complex<f64> {
    type Output = f64;
    fn modulus(&self) -> f64 {
        self.norm()
    }
}

/// Exact rational built from a numerator and denominator.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The exact value of a finite float as a rational.
pub fn exact<T: Real>(t: T) -> Result<BigRational> {
    t.to_f64()
        .and_then(BigRational::from_float)
        .ok_or_else(|| Error::InvalidInput(format!("{t} has no exact rational value")))
}

/// [`exact`] applied to both parts.
pub fn exact_complex<T: Real>(z: Complex<T>) -> Result<Complex<BigRational>> {
    Ok(Complex::new(exact(z.re)?, exact(z.im)?))
}

/// Complex constant from two `f64` parts.
pub fn cx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}
