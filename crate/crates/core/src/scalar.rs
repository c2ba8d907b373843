//! Numeric abstraction for lengths and opening costs.
//!
//! Everything that compares a distance against a radius `c * 5^r` or an
//! opening cost against a payment goes through [`Scalar`], so the same
//! engine runs on `f32`, `f64` or exact rationals.

use std::fmt;

use num_rational::Ratio;
use num_traits::{Num, Zero};

/// Scalar type for distances and costs.
pub trait Scalar: Copy + PartialOrd + fmt::Debug + fmt::Display + Num + Send + Sync + 'static {
    /// Short name used in diagnostics and CLI output.
    const NAME: &'static str;

    fn from_count(n: u64) -> Self;

    fn from_units(n: u128) -> Self;

    /// Conversion from a parsed JSON number. `None` for non-finite input.
    fn from_f64_value(v: f64) -> Option<Self>;

    fn as_f64(self) -> f64;

    /// Square root, or `None` when it is not representable in this type.
    fn checked_sqrt(self) -> Option<Self>;

    /// `5^exp`, computed with a single division for negative exponents.
    fn pow5(exp: i32) -> Self {
        let five = Self::from_count(5);
        let mut acc = Self::one();
        for _ in 0..exp.unsigned_abs() {
            acc = acc * five;
        }
        if exp < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }

    /// The radius `c * 5^r`.
    fn radius(c: u32, r: i32) -> Self {
        Self::from_count(u64::from(c)) * Self::pow5(r)
    }

    fn abs_diff(a: Self, b: Self) -> Self {
        if a >= b {
            a - b
        } else {
            b - a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    const NAME: &'static str = "f64";

    fn from_count(n: u64) -> Self {
        n as f64
    }

    fn from_units(n: u128) -> Self {
        n as f64
    }

    fn from_f64_value(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn as_f64(self) -> f64 {
        self
    }

    fn checked_sqrt(self) -> Option<Self> {
        (self >= 0.0).then(|| self.sqrt())
    }
}

impl Scalar for f32 {
    const NAME: &'static str = "f32";

    fn from_count(n: u64) -> Self {
        n as f32
    }

    fn from_units(n: u128) -> Self {
        n as f32
    }

    fn from_f64_value(v: f64) -> Option<Self> {
        let narrowed = v as f32;
        narrowed.is_finite().then_some(narrowed)
    }

    fn as_f64(self) -> f64 {
        f64::from(self)
    }

    fn checked_sqrt(self) -> Option<Self> {
        (self >= 0.0).then(|| self.sqrt())
    }
}

/// Exact rational scalar.
pub type Rational = Ratio<i128>;

impl Scalar for Rational {
    const NAME: &'static str = "exact";

    fn from_count(n: u64) -> Self {
        Ratio::from_integer(i128::from(n))
    }

    fn from_units(n: u128) -> Self {
        Ratio::from_integer(i128::try_from(n).expect("payment total exceeds i128"))
    }

    fn from_f64_value(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v.fract() == 0.0 && v.abs() < 1e30 {
            return Some(Ratio::from_integer(v as i128));
        }
        Ratio::<i128>::approximate_float(v)
    }

    fn as_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn checked_sqrt(self) -> Option<Self> {
        if self < Self::zero() {
            return None;
        }
        let n = isqrt_exact(*self.numer())?;
        let d = isqrt_exact(*self.denom())?;
        Some(Ratio::new(n, d))
    }
}

fn isqrt_exact(v: i128) -> Option<i128> {
    if v < 0 {
        return None;
    }
    let mut s = (v as f64).sqrt() as i128;
    while s > 0 && s.checked_mul(s).is_none_or(|sq| sq > v) {
        s -= 1;
    }
    while (s + 1).checked_mul(s + 1).is_some_and(|sq| sq <= v) {
        s += 1;
    }
    (s * s == v).then_some(s)
}

/// Least integer `r` with `5^r >= x`. `x` must be positive.
pub fn cround<T: Scalar>(x: T) -> i32 {
    debug_assert!(x > T::zero());
    let mut r = 0i32;
    while T::pow5(r) < x {
        r += 1;
    }
    while T::pow5(r - 1) >= x {
        r -= 1;
    }
    r
}
