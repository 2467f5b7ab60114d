//! Multi-precision real and complex scalars.
//!
//! [`Real`] wraps an `astro_float::BigFloat` together with its working
//! precision so arithmetic reads like ordinary operator code. Binary
//! operations run at the larger of the two operand precisions with
//! round-to-nearest-even. Transcendental functions need a constants cache
//! and go through [`Ctx`].

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as BigSign};
use num_rational::BigRational;

const RM: RoundingMode = RoundingMode::ToEven;

/// Rounds a requested precision up to a whole number of 64-bit words.
pub fn word_prec(bits: usize) -> usize {
    bits.max(64).div_ceil(64) * 64
}

#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    prec: usize,
}

impl Real {
    fn wrap(v: BigFloat, prec: usize) -> Self {
        debug_assert!(!v.is_nan(), "arithmetic produced NaN");
        Real { v, prec }
    }

    pub fn zero(prec: usize) -> Self {
        let prec = word_prec(prec);
        Real::wrap(BigFloat::new(prec), prec)
    }

    pub fn one(prec: usize) -> Self {
        Real::from_i64(1, prec)
    }

    pub fn from_i64(x: i64, prec: usize) -> Self {
        let prec = word_prec(prec);
        Real::wrap(BigFloat::from_i64(x, prec), prec)
    }

    pub fn from_u64(x: u64, prec: usize) -> Self {
        let prec = word_prec(prec);
        Real::wrap(BigFloat::from_u64(x, prec), prec)
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        let prec = word_prec(prec);
        Real::wrap(BigFloat::from_f64(x, prec), prec)
    }

    /// Correctly rounded conversion of an arbitrary integer.
    pub fn from_bigint(x: &BigInt, prec: usize) -> Self {
        let prec = word_prec(prec);
        let (sign, words) = x.to_u64_digits();
        if words.is_empty() {
            return Real::zero(prec);
        }
        let sign = if sign == BigSign::Minus { Sign::Neg } else { Sign::Pos };
        let e = 64 * words.len() as i32;
        let mut v = BigFloat::from_words(&words, sign, e);
        v.set_precision(prec, RM).expect("precision change");
        Real::wrap(v, prec)
    }

    pub fn from_ratio(x: &BigRational, prec: usize) -> Self {
        let num = Real::from_bigint(x.numer(), prec + 64);
        let den = Real::from_bigint(x.denom(), prec + 64);
        (num / den).with_prec(prec)
    }

    /// `2^exp` at the given precision.
    pub fn pow2(exp: i64, prec: usize) -> Self {
        Real::one(prec).ldexp(exp)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn with_prec(mut self, prec: usize) -> Self {
        let prec = word_prec(prec);
        self.v.set_precision(prec, RM).expect("precision change");
        self.prec = prec;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.v.is_zero() {
            0
        } else if self.v.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn abs(&self) -> Self {
        Real::wrap(self.v.abs(), self.prec)
    }

    /// Multiplies by `2^n` exactly.
    pub fn ldexp(&self, n: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = self.v.clone();
        let e = v.exponent().expect("finite value") as i64 + n;
        v.set_exponent(i32::try_from(e).expect("exponent range"));
        Real::wrap(v, self.prec)
    }

    pub fn sqrt(&self) -> Self {
        Real::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    pub fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Real::one(self.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self * &Real::from_i64(k, self.prec)
    }

    pub fn div_i64(&self, k: i64) -> Self {
        self / &Real::from_i64(k, self.prec)
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Nearest double; saturates to ±inf and flushes to zero outside the f64 range.
    pub fn to_f64(&self) -> f64 {
        match self.v.as_raw_parts() {
            Some((words, _, sign, e, _)) => {
                let Some(&top) = words.last() else { return 0.0 };
                if top == 0 {
                    return 0.0;
                }
                let mag = libm::ldexp(top as f64, e - 64);
                if sign == Sign::Neg {
                    -mag
                } else {
                    mag
                }
            }
            None => f64::NAN,
        }
    }

    /// `log2 |x|` without leaving the f64 exponent range; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        match self.v.as_raw_parts() {
            Some((words, _, _, e, _)) => match words.last() {
                Some(&top) if top != 0 => e as f64 + libm::log2(top as f64) - 64.0,
                _ => f64::NEG_INFINITY,
            },
            None => f64::NAN,
        }
    }

    /// Binary exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            self.v.exponent().map(i64::from)
        }
    }

    pub fn inner(&self) -> &BigFloat {
        &self.v
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e}, {} bits)", self.to_f64(), self.prec)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.v.cmp(&other.v) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! real_binop {
    ($tr:ident, $method:ident, $op:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.prec.max(rhs.prec);
                Real::wrap(self.v.$op(&rhs.v, p, RM), p)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add, add);
real_binop!(Sub, sub, sub);
real_binop!(Mul, mul, mul);
real_binop!(Div, div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(BigFloat::neg(&self.v), self.prec)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(BigFloat::neg(&self.v), self.prec)
    }
}

impl AddAssign<&Real> for Real {
    fn add_assign(&mut self, rhs: &Real) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Real> for Real {
    fn sub_assign(&mut self, rhs: &Real) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Real> for Real {
    fn mul_assign(&mut self, rhs: &Real) {
        *self = &*self * rhs;
    }
}

/// Working precision plus the constants cache needed by transcendental functions.
pub struct Ctx {
    prec: usize,
    consts: Consts,
}

impl Ctx {
    pub fn new(prec: usize) -> Self {
        Ctx {
            prec: word_prec(prec),
            consts: Consts::new().expect("constants cache"),
        }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn pi(&mut self) -> Real {
        Real::wrap(self.consts.pi(self.prec, RM), self.prec)
    }

    pub fn two_pi(&mut self) -> Real {
        self.pi().ldexp(1)
    }

    pub fn exp(&mut self, x: &Real) -> Real {
        let p = x.prec.max(self.prec);
        Real::wrap(x.v.exp(p, RM, &mut self.consts), p)
    }

    pub fn ln(&mut self, x: &Real) -> Real {
        let p = x.prec.max(self.prec);
        Real::wrap(x.v.ln(p, RM, &mut self.consts), p)
    }

    pub fn sin(&mut self, x: &Real) -> Real {
        let p = x.prec.max(self.prec);
        Real::wrap(x.v.sin(p, RM, &mut self.consts), p)
    }

    pub fn cos(&mut self, x: &Real) -> Real {
        let p = x.prec.max(self.prec);
        Real::wrap(x.v.cos(p, RM, &mut self.consts), p)
    }

    pub fn sinh(&mut self, x: &Real) -> Real {
        let p = x.prec.max(self.prec);
        Real::wrap(x.v.sinh(p, RM, &mut self.consts), p)
    }

    pub fn cosh(&mut self, x: &Real) -> Real {
        let p = x.prec.max(self.prec);
        Real::wrap(x.v.cosh(p, RM, &mut self.consts), p)
    }

    /// `e^{i theta}`.
    pub fn cis(&mut self, theta: &Real) -> Complex {
        Complex::new(self.cos(theta), self.sin(theta))
    }

    /// `sin z` for complex `z`.
    pub fn sin_complex(&mut self, z: &Complex) -> Complex {
        let (sh, ch) = if z.im.abs().log2_abs() < -2.0 {
            (self.sinh(&z.im), self.cosh(&z.im))
        } else {
            let e = self.exp(&z.im);
            let ei = Real::one(e.prec()) / &e;
            ((&e - &ei).ldexp(-1), (&e + &ei).ldexp(-1))
        };
        let re = self.sin(&z.re) * ch;
        let im = self.cos(&z.re) * sh;
        Complex::new(re, im)
    }

    /// Decimal scientific notation carrying every significant digit of the value.
    pub fn to_decimal(&mut self, x: &Real) -> String {
        x.v.format(Radix::Dec, RM, &mut self.consts)
            .expect("decimal formatting")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn zero(prec: usize) -> Self {
        Complex::new(Real::zero(prec), Real::zero(prec))
    }

    pub fn from_real(re: Real) -> Self {
        let im = Real::zero(re.prec());
        Complex::new(re, im)
    }

    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        Complex::new(Real::from_f64(re, prec), Real::from_f64(im, prec))
    }

    pub fn prec(&self) -> usize {
        self.re.prec.max(self.im.prec)
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: &Real) -> Self {
        Complex::new(&self.re * k, &self.im * k)
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        Complex::new(&self.re / &n, -(&self.im / &n))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Double-precision image, scaled by a common power of two when the
    /// components fall outside the f64 range. Returns the value and the scale exponent.
    pub fn to_c64_scaled(&self) -> (num_complex::Complex64, i64) {
        let e = match (self.re.exponent(), self.im.exponent()) {
            (None, None) => return (num_complex::Complex64::new(0.0, 0.0), 0),
            (a, b) => a.unwrap_or(i64::MIN).max(b.unwrap_or(i64::MIN)),
        };
        let shift = if (-900..900).contains(&e) { 0 } else { e };
        let c = num_complex::Complex64::new(
            self.re.ldexp(-shift).to_f64(),
            self.im.ldexp(-shift).to_f64(),
        );
        (c, shift)
    }

    /// Principal argument in (-pi, pi], computed in double precision.
    pub fn arg_f64(&self) -> f64 {
        self.to_c64_scaled().0.arg()
    }
}

macro_rules! complex_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Complex> for &Complex {
            type Output = Complex;
            fn $method(self, rhs: &Complex) -> Complex {
                let f: fn(&Complex, &Complex) -> Complex = $body;
                f(self, rhs)
            }
        }
        impl $tr<Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: &Complex) -> Complex {
                (&self).$method(rhs)
            }
        }
        impl $tr<Complex> for &Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                self.$method(&rhs)
            }
        }
    };
}

complex_binop!(Add, add, |a, b| Complex::new(&a.re + &b.re, &a.im + &b.im));
complex_binop!(Sub, sub, |a, b| Complex::new(&a.re - &b.re, &a.im - &b.im));
complex_binop!(Mul, mul, |a, b| Complex::new(
    &a.re * &b.re - &a.im * &b.im,
    &a.re * &b.im + &a.im * &b.re
));
complex_binop!(Div, div, |a, b| {
    let n = b.norm_sqr();
    let re = &a.re * &b.re + &a.im * &b.im;
    let im = &a.im * &b.re - &a.re * &b.im;
    Complex::new(re / &n, im / n)
});

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-&self.re, -&self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Num;

    #[test]
    fn bigint_round_trip() {
        let x = BigInt::from_str_radix("-123456789012345678901234567890123", 10).unwrap();
        let r = Real::from_bigint(&x, 256);
        let back = Real::from_f64(-1.2345678901234568e32, 256);
        assert!(((r - back).to_f64()).abs() < 1e17);
        assert_eq!(Real::from_bigint(&BigInt::from(3), 128), Real::from_i64(3, 128));
        assert!(Real::from_bigint(&BigInt::from(0), 128).is_zero());
    }

    #[test]
    fn ratio_conversion() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        let r = Real::from_ratio(&q, 256);
        let err = r.mul_i64(3) - Real::one(256);
        assert!(err.log2_abs() < -250.0);
    }

    #[test]
    fn f64_views() {
        let x = Real::from_f64(-0.375, 128);
        assert_eq!(x.to_f64(), -0.375);
        assert_eq!(Real::pow2(-2000, 128).to_f64(), 0.0);
        assert!((Real::pow2(-2000, 128).log2_abs() + 2000.0).abs() < 1e-12);
        assert_eq!(Real::zero(64).log2_abs(), f64::NEG_INFINITY);
    }

    #[test]
    fn transcendental_identities() {
        let mut cx = Ctx::new(256);
        let x = Real::from_f64(0.7, 256);
        let s = cx.sin(&x);
        let c = cx.cos(&x);
        let one = &s * &s + &c * &c - Real::one(256);
        assert!(one.log2_abs() < -240.0);
        let pi = cx.pi();
        assert!((pi.to_f64() - core::f64::consts::PI).abs() < 1e-15);
        let z = Complex::from_f64(0.3, 0.4, 256);
        let w = cx.sin_complex(&z);
        let expect = num_complex::Complex64::new(0.3, 0.4).sin();
        assert!((w.re.to_f64() - expect.re).abs() < 1e-15);
        assert!((w.im.to_f64() - expect.im).abs() < 1e-15);
    }

    #[test]
    fn complex_division_inverts_multiplication() {
        let a = Complex::from_f64(1.5, -2.0, 192);
        let b = Complex::from_f64(-0.25, 3.0, 192);
        let back = &(&a * &b) / &b - &a;
        assert!(back.abs().log2_abs() < -180.0);
    }

    #[test]
    fn scaled_double_view() {
        let z = Complex::new(Real::pow2(5000, 128), Real::pow2(4999, 128).neg());
        let (c, shift) = z.to_c64_scaled();
        assert_eq!(shift, 5001);
        assert!((c.re - 0.5).abs() < 1e-15 && (c.im + 0.25).abs() < 1e-15);
        assert!((z.arg_f64() + (0.5f64).atan()).abs() < 1e-15);
    }
}
