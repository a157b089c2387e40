//! Scalar abstraction for the density and report code.
//!
//! Every implementation carries an a-priori bound on the relative error of a
//! single arithmetic operation. Brackets are widened by multiples of that
//! bound, so the same evaluation code yields honest intervals for `f32`,
//! `f64`, double-double and exact rationals alike.

use std::fmt::{self, Debug};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};
use twofloat::TwoFloat;

pub trait Scalar: Num + Clone + PartialOrd + Debug + Neg<Output = Self> {
    /// Upper bound on the relative error of one `+ - * /`; zero when exact.
    fn unit_roundoff() -> Self;

    fn from_uint(n: u64) -> Self;

    fn from_bigint(n: &BigInt) -> Self;

    fn approx_f64(&self) -> f64;

    /// The exact value as a rational, `None` for non-finite values.
    fn to_rational(&self) -> Option<BigRational>;

    fn is_exact() -> bool {
        Self::unit_roundoff().is_zero()
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        Self::from_uint(num) / Self::from_uint(den)
    }

    /// `self^exp` by binary exponentiation.
    fn powu(&self, exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
}

/// Scalars that also provide the natural logarithm.
pub trait Transcendental: Scalar {
    fn ln(&self) -> Self;
}

impl Scalar for f64 {
    fn unit_roundoff() -> Self {
        f64::EPSILON
    }
    fn from_uint(n: u64) -> Self {
        n as f64
    }
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }
    fn approx_f64(&self) -> f64 {
        *self
    }
    fn to_rational(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
}

impl Transcendental for f64 {
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
}

impl Scalar for f32 {
    fn unit_roundoff() -> Self {
        f32::EPSILON
    }
    fn from_uint(n: u64) -> Self {
        n as f32
    }
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f32().unwrap_or(f32::NAN)
    }
    fn approx_f64(&self) -> f64 {
        f64::from(*self)
    }
    fn to_rational(&self) -> Option<BigRational> {
        BigRational::from_float(f64::from(*self))
    }
}

impl Transcendental for f32 {
    fn ln(&self) -> Self {
        f32::ln(*self)
    }
}

// Double-word sums and products are within a small multiple of 2^-106, and
// the long division below within a few units of the same; 2^-98 leaves room.
const DOUBLE_DOUBLE_ROUNDOFF: f64 = 3.552713678800501e-30; // 2^-98

/// Double-word real backed by [`TwoFloat`], with a correctly compensated
/// division (the upstream quotient loses the low word of `1 - b*(1/b)`).
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct DoubleDouble(pub TwoFloat);

impl DoubleDouble {
    pub fn hi(&self) -> f64 {
        self.0.hi()
    }

    pub fn lo(&self) -> f64 {
        self.0.lo()
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble(TwoFloat::from(x))
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        DoubleDouble(self.0 + rhs.0)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        DoubleDouble(self.0 - rhs.0)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        DoubleDouble(self.0 * rhs.0)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        let q1 = a.hi() / b.hi();
        let r = a - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        DoubleDouble(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = (self / rhs).0.trunc();
        DoubleDouble(self.0 - q * rhs.0)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble(-self.0)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble(TwoFloat::from(0.0))
    }
    fn is_zero(&self) -> bool {
        self.0.hi() == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble(TwoFloat::from(1.0))
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(DoubleDouble::from)
    }
}

impl Scalar for DoubleDouble {
    fn unit_roundoff() -> Self {
        DoubleDouble::from(DOUBLE_DOUBLE_ROUNDOFF)
    }
    fn from_uint(n: u64) -> Self {
        let hi = n as f64;
        // hi is n rounded to 53 bits; the remainder is exact in i128.
        let lo = (i128::from(n) - hi as i128) as f64;
        DoubleDouble(TwoFloat::new_add(hi, lo))
    }
    fn from_bigint(n: &BigInt) -> Self {
        let hi = n.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return DoubleDouble::from(hi);
        }
        // hi is integral here (|n| >= 2^53 or hi == n), so the conversion is exact.
        let rest = n - BigInt::from_f64(hi).unwrap_or_else(BigInt::zero);
        let lo = rest.to_f64().unwrap_or(0.0);
        DoubleDouble(TwoFloat::new_add(hi, lo))
    }
    fn approx_f64(&self) -> f64 {
        self.hi() + self.lo()
    }
    fn to_rational(&self) -> Option<BigRational> {
        Some(BigRational::from_float(self.hi())? + BigRational::from_float(self.lo())?)
    }
}

impl Transcendental for DoubleDouble {
    fn ln(&self) -> Self {
        DoubleDouble(self.0.ln())
    }
}

impl Scalar for BigRational {
    fn unit_roundoff() -> Self {
        BigRational::zero()
    }
    fn from_uint(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn approx_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Round `x` to `places` decimals, ties away from zero, as an integer count of
/// `10^-places` units.
pub fn round_half_away<T: Scalar>(x: &T, places: u32) -> i64 {
    let scaled = x.clone() * T::from_uint(10u64.pow(places));
    let v = scaled.approx_f64();
    (v.abs() + 0.5).floor().copysign(v) as i64
}

/// Render a real with ten significant digits in plain decimal notation.
pub fn sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x == 0.0 {
            "0".into()
        } else {
            x.to_string()
        };
    }
    let rounded: f64 = format!("{x:.9e}").parse().unwrap_or(x);
    format!("{rounded}")
}
