//! Complex scalar abstraction shared by the spectral evaluators.
//!
//! Everything that sums Lefschetz series or multiplies out closed-form
//! products is written once against [`ComplexScalar`]. `Complex64` is the
//! working type; [`Mp`] runs the same code at 1024-bit precision so that
//! truncation bounds far below `f64` resolution can be observed directly.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use rug::Complex;

/// Relative size of the imaginary part below which a value counts as real
/// when deciding whether it sits on the branch cut.
pub const CUT_TOLERANCE: f64 = 1e-14;

pub trait ComplexScalar:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(&self) -> Complex64;
    fn exp(&self) -> Self;
    /// Principal logarithm, cut along the non-positive reals.
    fn ln(&self) -> Self;
    /// Principal square root.
    fn sqrt(&self) -> Self;
    fn recip(&self) -> Self;
    /// Modulus, as a (real) scalar.
    fn abs(&self) -> Self;
    fn real_part(&self) -> Self;

    fn from_f64(x: f64) -> Self {
        Self::from_c64(Complex64::new(x, 0.0))
    }

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn norm(&self) -> f64 {
        self.to_c64().norm()
    }

    fn is_zero(&self) -> bool {
        self.to_c64() == Complex64::new(0.0, 0.0)
    }

    /// True when the value lies on `(-inf, 0]`.
    fn on_cut(&self) -> bool {
        let z = self.to_c64();
        z.re <= 0.0 && z.im.abs() <= CUT_TOLERANCE * z.norm()
    }

    /// `self^n` by repeated squaring; negative `n` inverts first.
    fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Principal power `exp(exponent * Log(self))`.
    fn powc(&self, exponent: &Self) -> Self {
        (exponent.clone() * self.ln()).exp()
    }
}

impl ComplexScalar for Complex64 {
    fn from_c64(z: Complex64) -> Self {
        z
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }

    fn ln(&self) -> Self {
        Complex64::ln(*self)
    }

    fn sqrt(&self) -> Self {
        Complex64::sqrt(*self)
    }

    fn recip(&self) -> Self {
        Complex64::inv(self)
    }

    fn abs(&self) -> Self {
        Complex64::new(Complex64::norm(*self), 0.0)
    }

    fn real_part(&self) -> Self {
        Complex64::new(self.re, 0.0)
    }
}

/// Working precision of [`Mp`], in bits.
pub const MP_PRECISION: u32 = 1024;

/// Arbitrary-precision complex number (MPC) at [`MP_PRECISION`] bits.
#[derive(Clone, Debug, PartialEq)]
pub struct Mp(pub Complex);

impl Mp {
    pub fn new(re: f64, im: f64) -> Self {
        Mp(Complex::with_val(MP_PRECISION, (re, im)))
    }
}

impl Add for Mp {
    type Output = Mp;
    fn add(self, rhs: Mp) -> Mp {
        Mp(Complex::with_val(MP_PRECISION, &self.0 + &rhs.0))
    }
}

impl Sub for Mp {
    type Output = Mp;
    fn sub(self, rhs: Mp) -> Mp {
        Mp(Complex::with_val(MP_PRECISION, &self.0 - &rhs.0))
    }
}

impl Mul for Mp {
    type Output = Mp;
    fn mul(self, rhs: Mp) -> Mp {
        Mp(Complex::with_val(MP_PRECISION, &self.0 * &rhs.0))
    }
}

impl Div for Mp {
    type Output = Mp;
    fn div(self, rhs: Mp) -> Mp {
        Mp(Complex::with_val(MP_PRECISION, &self.0 / &rhs.0))
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl ComplexScalar for Mp {
    fn from_c64(z: Complex64) -> Self {
        Mp::new(z.re, z.im)
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.0.real().to_f64(), self.0.imag().to_f64())
    }

    fn exp(&self) -> Self {
        Mp(self.0.clone().exp())
    }

    fn ln(&self) -> Self {
        Mp(self.0.clone().ln())
    }

    fn sqrt(&self) -> Self {
        Mp(self.0.clone().sqrt())
    }

    fn recip(&self) -> Self {
        Mp(self.0.clone().recip())
    }

    fn abs(&self) -> Self {
        Mp(self.0.clone().abs())
    }

    fn real_part(&self) -> Self {
        Mp(Complex::with_val(MP_PRECISION, self.0.real()))
    }

    fn is_zero(&self) -> bool {
        self.0.real().is_zero() && self.0.imag().is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_repeated_multiplication() {
        let z = Complex64::new(0.6, 0.8);
        let mut direct = Complex64::new(1.0, 0.0);
        for _ in 0..7 {
            direct *= z;
        }
        assert!((ComplexScalar::powi(&z, 7) - direct).norm() < 1e-15);
        assert!((ComplexScalar::powi(&z, -7) * direct - 1.0).norm() < 1e-14);
        assert_eq!(ComplexScalar::powi(&z, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn cut_detection() {
        assert!(Complex64::new(-2.0, 0.0).on_cut());
        assert!(Complex64::new(0.0, 0.0).on_cut());
        assert!(!Complex64::new(-2.0, 1e-6).on_cut());
        assert!(!Complex64::new(2.0, 0.0).on_cut());
    }

    #[test]
    fn mp_agrees_with_f64() {
        let z = Complex64::new(0.3, -1.2);
        let m = Mp::from_c64(z);
        for (a, b) in [
            (m.exp().to_c64(), z.exp()),
            (m.ln().to_c64(), z.ln()),
            (m.sqrt().to_c64(), z.sqrt()),
            (m.recip().to_c64(), z.inv()),
        ] {
            assert!((a - b).norm() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn mp_carries_more_digits() {
        // exp(ln 3) - 3 vanishes far below f64 resolution
        let three = Mp::from_f64(3.0);
        let err = (three.ln().exp() - three).norm();
        assert!(err < 1e-140, "{err}");
    }
}
