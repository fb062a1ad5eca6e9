//! High-precision binary floats with a fixed per-value mantissa width.
//!
//! Thin wrapper around `astro-float` that tags every value with its
//! precision in bits. Arithmetic between values of different precision is
//! a contract violation and panics; this is what keeps mixed-precision
//! data from silently contaminating a computation. Precisions are rounded
//! up to a multiple of the 64-bit word size.
//!
//! Values are always finite: any operation that would produce a NaN or an
//! infinity panics instead (binary exponents here are bounded by ±2^31,
//! far beyond anything the series core produces at desk scale).

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat as Af, Consts, Radix, RoundingMode, Sign};
use num::bigint::{BigInt, Sign as IntSign};
use num::rational::BigRational;
use num::{BigUint, One, Signed, ToPrimitive, Zero};

use crate::error::CoeffError;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Round a requested precision up to a whole number of mantissa words.
pub fn normalize_bits(bits: u32) -> u32 {
    let bits = bits.max(64);
    bits.div_ceil(64) * 64
}

#[derive(Clone, Debug)]
pub struct BigFloat {
    inner: Af,
    bits: u32,
}

impl BigFloat {
    fn wrap(inner: Af, bits: u32) -> Self {
        assert!(
            !inner.is_nan() && !inner.is_inf(),
            "non-finite high-precision float produced"
        );
        BigFloat { inner, bits }
    }

    pub fn zero(bits: u32) -> Self {
        let bits = normalize_bits(bits);
        Self::wrap(Af::from_i64(0, bits as usize), bits)
    }

    pub fn from_i64(n: i64, bits: u32) -> Self {
        let bits = normalize_bits(bits);
        Self::wrap(Af::from_i64(n, bits as usize), bits)
    }

    pub fn from_f64(x: f64, bits: u32) -> Self {
        assert!(x.is_finite(), "from_f64 requires a finite input");
        let bits = normalize_bits(bits);
        Self::wrap(Af::from_f64(x, bits as usize), bits)
    }

    /// Exact conversion of a big integer, then rounding to `bits`.
    pub fn from_bigint(n: &BigInt, bits: u32) -> Self {
        let bits = normalize_bits(bits);
        let need = (n.magnitude().bits() as usize + 64).max(bits as usize);
        let exact = with_consts(|cc| Af::parse(&n.to_string(), Radix::Dec, need, RM, cc));
        let rounded = exact.mul(&Af::from_i64(1, bits as usize), bits as usize, RM);
        Self::wrap(rounded, bits)
    }

    /// `num/den` rounded once to `bits`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let bits = normalize_bits(bits);
        let need = (num.magnitude().bits().max(den.magnitude().bits()) as usize + 64)
            .max(bits as usize);
        let (n, d) = with_consts(|cc| {
            (
                Af::parse(&num.to_string(), Radix::Dec, need, RM, cc),
                Af::parse(&den.to_string(), Radix::Dec, need, RM, cc),
            )
        });
        Self::wrap(n.div(&d, bits as usize, RM), bits)
    }

    pub fn from_rational(q: &BigRational, bits: u32) -> Self {
        Self::from_ratio(q.numer(), q.denom(), bits)
    }

    /// Parse a decimal literal (`-1.25`, `3e-7`, `0.5`). The literal is a
    /// rational number; conversion rounds once at `bits`.
    pub fn parse_decimal(s: &str, bits: u32) -> Result<Self, CoeffError> {
        let q = crate::coeff::decimal_to_rational(s)?;
        Ok(Self::from_rational(&q, bits))
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.inner.is_negative() && !self.inner.is_zero()
    }

    fn check_same_bits(&self, rhs: &Self) {
        assert_eq!(
            self.bits, rhs.bits,
            "mixed-precision float arithmetic is rejected ({} vs {} bits)",
            self.bits, rhs.bits
        );
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.check_same_bits(rhs);
        Self::wrap(self.inner.add(&rhs.inner, self.bits as usize, RM), self.bits)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.check_same_bits(rhs);
        Self::wrap(self.inner.sub(&rhs.inner, self.bits as usize, RM), self.bits)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.check_same_bits(rhs);
        Self::wrap(self.inner.mul(&rhs.inner, self.bits as usize, RM), self.bits)
    }

    pub fn div(&self, rhs: &Self) -> Option<Self> {
        self.check_same_bits(rhs);
        if rhs.is_zero() {
            return None;
        }
        Some(Self::wrap(
            self.inner.div(&rhs.inner, self.bits as usize, RM),
            self.bits,
        ))
    }

    pub fn neg(&self) -> Self {
        Self::wrap(self.inner.neg(), self.bits)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.inner.abs(), self.bits)
    }

    pub fn recip(&self) -> Option<Self> {
        Self::from_i64(1, self.bits).div(self)
    }

    /// Exact value as a rational number (every finite binary float is one).
    pub fn to_rational(&self) -> BigRational {
        match self.inner.as_raw_parts() {
            None => BigRational::zero(),
            Some((words, m_bits, sign, exp, _inexact)) => {
                if self.inner.is_zero() {
                    return BigRational::zero();
                }
                let mant = BigUint::from_slice(
                    &words
                        .iter()
                        .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                        .collect::<Vec<_>>(),
                );
                let int_sign = if sign == Sign::Neg {
                    IntSign::Minus
                } else {
                    IntSign::Plus
                };
                let mant = BigInt::from_biguint(int_sign, mant);
                // value = mant / 2^m_bits * 2^exp
                let shift = exp as i64 - m_bits as i64;
                if shift >= 0 {
                    BigRational::from_integer(mant << shift as u64)
                } else {
                    BigRational::new(mant, BigInt::one() << (-shift) as u64)
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    pub fn floor_bigint(&self) -> BigInt {
        self.to_rational().floor().to_integer()
    }

    /// Square root; `None` for negative inputs.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        Some(Self::wrap(
            self.inner.sqrt(self.bits as usize, RM),
            self.bits,
        ))
    }

    /// e^n for a (small) nonnegative integer n, computed with 64 guard bits.
    pub fn exp_int(n: u32, bits: u32) -> Self {
        let bits = normalize_bits(bits);
        let work = bits as usize + 64;
        let x = Af::from_i64(n as i64, work);
        let e = with_consts(|cc| x.exp(work, RM, cc));
        let rounded = e.mul(&Af::from_i64(1, bits as usize), bits as usize, RM);
        Self::wrap(rounded, bits)
    }

    pub fn total_cmp(&self, rhs: &Self) -> Ordering {
        self.check_same_bits(rhs);
        match self.inner.cmp(&rhs.inner) {
            Some(c) => c.cmp(&0),
            None => unreachable!("finite floats always compare"),
        }
    }

    /// Full-precision decimal form (used for serialization and display).
    pub fn to_decimal_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        with_consts(|cc| self.inner.format(Radix::Dec, RM, cc))
            .expect("formatting a finite float")
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits && self.total_cmp(other) == Ordering::Equal
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_roundtrip_exact_dyadic() {
        let x = BigFloat::from_ratio(&BigInt::from(5), &BigInt::from(8), 128);
        assert_eq!(x.to_rational(), BigRational::new(5.into(), 8.into()));
        assert_eq!(x.to_f64(), 0.625);
    }

    #[test]
    fn one_third_rounded_and_bounded() {
        let x = BigFloat::from_ratio(&BigInt::from(1), &BigInt::from(3), 256);
        let err = (x.to_rational() - BigRational::new(1.into(), 3.into())).abs();
        let ulp = BigRational::new(1.into(), BigInt::one() << 255u32);
        assert!(err < ulp);
    }

    #[test]
    fn exp_of_seventy_matches_reference() {
        // e^70 = 2.5154386709191670062657811742521e30
        let e70 = BigFloat::exp_int(70, 256);
        let f = e70.to_f64();
        assert!((f - 2.515438670919167e30).abs() / 2.515438670919167e30 < 1e-14);
        // floor is a 31-digit integer
        let n = e70.floor_bigint();
        assert_eq!(n.to_string().len(), 31);
        assert!(n.to_string().starts_with("2515438670919167006265781174252"));
    }

    #[test]
    #[should_panic(expected = "mixed-precision")]
    fn mixed_precision_is_rejected() {
        let a = BigFloat::from_i64(1, 128);
        let b = BigFloat::from_i64(1, 256);
        let _ = a.add(&b);
    }

    #[test]
    fn parse_decimal_literals() {
        let x = BigFloat::parse_decimal("-2.5e-1", 128).unwrap();
        assert_eq!(x.to_f64(), -0.25);
        let y = BigFloat::parse_decimal("0.1", 128).unwrap();
        assert!((y.to_f64() - 0.1).abs() < 1e-17);
    }
}
