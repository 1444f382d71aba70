//! Scalar traits shared by the exact group arithmetic and the numerical estimators.
//!
//! Group coordinates are exact integers. Every arithmetic kernel is written
//! against [`Coord`], which is implemented for `i64` (fast, overflow-checked)
//! and `BigInt` (unbounded). A kernel returning `None` means a fixed-width
//! type overflowed; callers retry with `BigInt`.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive};

pub trait Coord:
    Integer + Signed + Clone + Hash + Debug + Send + Sync + CheckedAdd + CheckedSub + CheckedMul + 'static
{
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn from_i64(v: i64) -> Self;
}

impl Coord for i64 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_i64(v: i64) -> Self {
        v
    }
}

impl Coord for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
}

#[inline]
pub fn add<T: Coord>(a: &T, b: &T) -> Option<T> {
    a.checked_add(b)
}

#[inline]
pub fn sub<T: Coord>(a: &T, b: &T) -> Option<T> {
    a.checked_sub(b)
}

#[inline]
pub fn mul<T: Coord>(a: &T, b: &T) -> Option<T> {
    a.checked_mul(b)
}

/// `binom(v, k)` for any integer `v` (negative allowed), computed so that
/// every intermediate value is itself a binomial coefficient.
pub fn binom<T: Coord>(v: &T, k: u32) -> Option<T> {
    let mut acc = T::one();
    for i in 0..k {
        let factor = sub(v, &T::from_i64(i as i64))?;
        acc = mul(&acc, &factor)?;
        acc = acc.div_floor(&T::from_i64(i as i64 + 1));
    }
    Some(acc)
}

pub fn convert<T: Coord>(v: &[BigInt]) -> Option<Vec<T>> {
    v.iter().map(T::from_big).collect()
}

pub fn widen<T: Coord>(v: &[T]) -> Vec<BigInt> {
    v.iter().map(Coord::to_big).collect()
}

/// Natural log of `|v|`, valid far beyond the `f64` range of `v` itself.
pub fn ln_abs(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().map(f64::abs).unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = v.abs() >> shift;
    top.to_f64().unwrap_or(1.0).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Floating-point scalar used by the growth estimators.
pub trait Real: nalgebra::RealField + Copy {
    fn of(v: f64) -> Self {
        nalgebra::convert(v)
    }

    fn to_f64(self) -> f64 {
        self.to_subset().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_handle_negative_arguments() {
        assert_eq!(binom(&5i64, 2), Some(10));
        assert_eq!(binom(&-1i64, 3), Some(-1));
        assert_eq!(binom(&-2i64, 2), Some(3));
        assert_eq!(binom(&0i64, 1), Some(0));
        assert_eq!(binom(&BigInt::from(7), 0), Some(BigInt::from(1)));
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(binom(&i64::MAX, 2), None);
        assert!(binom(&BigInt::from(i64::MAX), 2).is_some());
    }

    #[test]
    fn ln_abs_matches_float_for_small_and_scales_for_huge() {
        assert!((ln_abs(&BigInt::from(1000)) - 1000f64.ln()).abs() < 1e-12);
        let huge = BigInt::from(3).pow(2000);
        assert!((ln_abs(&huge) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }
}
