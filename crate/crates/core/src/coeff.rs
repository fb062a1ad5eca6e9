//! Coefficient fields for the series core.
//!
//! Two instantiations: exact arbitrary-precision rationals (the default,
//! bit-reproducible across runs and platforms) and high-precision binary
//! floats with a configurable mantissa width. Everything downstream is
//! generic over [`Coeff`].

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bigfloat::{normalize_bits, BigFloat};
use crate::error::CoeffError;

pub const DEFAULT_FLOAT_BITS: u32 = 256;

/// Which coefficient field a computation runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffMode {
    Rational,
    Float { bits: u32 },
}

impl CoeffMode {
    /// Parse `rational`, `float` or `float:bits`.
    pub fn parse(s: &str) -> Result<Self, CoeffError> {
        match s {
            "rational" => Ok(CoeffMode::Rational),
            "float" => Ok(CoeffMode::Float {
                bits: DEFAULT_FLOAT_BITS,
            }),
            _ => {
                let rest = s
                    .strip_prefix("float:")
                    .ok_or_else(|| CoeffError::BadMode(s.to_string()))?;
                let bits: u32 = rest
                    .parse()
                    .map_err(|_| CoeffError::BadMode(s.to_string()))?;
                if !(32..=16384).contains(&bits) {
                    return Err(CoeffError::BadMode(s.to_string()));
                }
                Ok(CoeffMode::Float {
                    bits: normalize_bits(bits),
                })
            }
        }
    }
}

impl fmt::Display for CoeffMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffMode::Rational => write!(f, "rational"),
            CoeffMode::Float { bits } => write!(f, "float:{bits}"),
        }
    }
}

/// Field operations every coefficient type provides.
///
/// Operations never mutate; contexts (precision) travel with the values.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn mode(&self) -> CoeffMode;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    /// Integer constant in the same field (and precision) as `self`.
    fn of_int(&self, n: i64) -> Self;
    /// Magnitude as f64, for diagnostics and tolerance checks.
    fn abs_f64(&self) -> f64;
    /// Canonical text form; must parse back in the same mode.
    fn repr(&self) -> String;
    /// Square root when one is representable: perfect squares only in
    /// rational mode, rounded in float mode, `None` otherwise or for
    /// negative inputs.
    fn sqrt(&self) -> Option<Self>;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }
    fn scale_int(&self, n: i64) -> Self {
        self.mul(&self.of_int(n))
    }
    fn div_int(&self, n: i64) -> Self {
        assert!(n != 0, "division by zero integer");
        self.div(&self.of_int(n)).expect("nonzero divisor")
    }
    fn is_one(&self) -> bool {
        self == &self.of_int(1)
    }
}

/// Mode-directed construction (parsing and constants).
pub trait CoeffParse: Coeff + Sized {
    fn parse_in_mode(s: &str, mode: CoeffMode) -> Result<Self, CoeffError>;
    fn int_in_mode(n: i64, mode: CoeffMode) -> Result<Self, CoeffError>;
    fn ratio_in_mode(num: i64, den: i64, mode: CoeffMode) -> Result<Self, CoeffError>;

    fn one_in_mode(mode: CoeffMode) -> Result<Self, CoeffError> {
        Self::int_in_mode(1, mode)
    }
}

/// Exact rational coefficients.
pub type Rat = BigRational;

impl Coeff for BigRational {
    fn mode(&self) -> CoeffMode {
        CoeffMode::Rational
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn of_int(&self, n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
    fn abs_f64(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }
    fn repr(&self) -> String {
        self.to_string()
    }
    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let sn = self.numer().sqrt();
        let sd = self.denom().sqrt();
        if &(&sn * &sn) == self.numer() && &(&sd * &sd) == self.denom() {
            Some(BigRational::new(sn, sd))
        } else {
            None
        }
    }
}

impl CoeffParse for BigRational {
    fn parse_in_mode(s: &str, mode: CoeffMode) -> Result<Self, CoeffError> {
        if mode != CoeffMode::Rational {
            return Err(CoeffError::WrongMode {
                literal: s.to_string(),
                mode: mode.to_string(),
            });
        }
        parse_rational(s)
    }
    fn int_in_mode(n: i64, _mode: CoeffMode) -> Result<Self, CoeffError> {
        Ok(BigRational::from_integer(n.into()))
    }
    fn ratio_in_mode(num: i64, den: i64, _mode: CoeffMode) -> Result<Self, CoeffError> {
        if den == 0 {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(BigRational::new(num.into(), den.into()))
    }
}

impl Coeff for BigFloat {
    fn mode(&self) -> CoeffMode {
        CoeffMode::Float { bits: self.bits() }
    }
    fn is_zero(&self) -> bool {
        BigFloat::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        BigFloat::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        BigFloat::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        BigFloat::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        BigFloat::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        self.recip()
    }
    fn of_int(&self, n: i64) -> Self {
        BigFloat::from_i64(n, self.bits())
    }
    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
    fn repr(&self) -> String {
        self.to_decimal_string()
    }
    fn sqrt(&self) -> Option<Self> {
        BigFloat::sqrt(self)
    }
}

impl CoeffParse for BigFloat {
    fn parse_in_mode(s: &str, mode: CoeffMode) -> Result<Self, CoeffError> {
        let CoeffMode::Float { bits } = mode else {
            return Err(CoeffError::WrongMode {
                literal: s.to_string(),
                mode: mode.to_string(),
            });
        };
        // Accept both rational literals (p/q) and decimal literals.
        if let Some((num, den)) = s.split_once('/') {
            let n: BigInt = num
                .trim()
                .parse()
                .map_err(|_| CoeffError::BadCoefficient(s.to_string()))?;
            let d: BigInt = den
                .trim()
                .parse()
                .map_err(|_| CoeffError::BadCoefficient(s.to_string()))?;
            if d.is_zero() {
                return Err(CoeffError::DivisionByZero);
            }
            return Ok(BigFloat::from_ratio(&n, &d, bits));
        }
        BigFloat::parse_decimal(s, bits)
    }
    fn int_in_mode(n: i64, mode: CoeffMode) -> Result<Self, CoeffError> {
        let CoeffMode::Float { bits } = mode else {
            return Err(CoeffError::WrongMode {
                literal: n.to_string(),
                mode: mode.to_string(),
            });
        };
        Ok(BigFloat::from_i64(n, bits))
    }
    fn ratio_in_mode(num: i64, den: i64, mode: CoeffMode) -> Result<Self, CoeffError> {
        let CoeffMode::Float { bits } = mode else {
            return Err(CoeffError::WrongMode {
                literal: format!("{num}/{den}"),
                mode: mode.to_string(),
            });
        };
        if den == 0 {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(BigFloat::from_ratio(&num.into(), &den.into(), bits))
    }
}

/// Parse `p/q`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, CoeffError> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| CoeffError::BadCoefficient(s.to_string()))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| CoeffError::BadCoefficient(s.to_string()))?;
        if d.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        return Ok(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(BigRational::from_integer(n));
    }
    decimal_to_rational(s)
}

/// Exact conversion of a decimal literal (`-1.25`, `3e-7`) to a rational.
pub fn decimal_to_rational(s: &str) -> Result<BigRational, CoeffError> {
    let t = s.trim();
    let bad = || CoeffError::BadCoefficient(s.to_string());
    let (mantissa, exp10) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (t, 0i64),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if frac_part.contains(['+', '-']) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(bad());
    }
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        BigRational::from_integer(n * ten.pow(shift as u32))
    } else {
        BigRational::new(n, ten.pow((-shift) as u32))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_parsing() {
        assert_eq!(CoeffMode::parse("rational").unwrap(), CoeffMode::Rational);
        assert_eq!(
            CoeffMode::parse("float").unwrap(),
            CoeffMode::Float { bits: 256 }
        );
        assert_eq!(
            CoeffMode::parse("float:100").unwrap(),
            CoeffMode::Float { bits: 128 }
        );
        assert!(CoeffMode::parse("floats").is_err());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(
            parse_rational("3/2").unwrap(),
            BigRational::new(3.into(), 2.into())
        );
        assert_eq!(
            parse_rational("-7").unwrap(),
            BigRational::from_integer((-7).into())
        );
        assert_eq!(
            parse_rational("0.125").unwrap(),
            BigRational::new(1.into(), 8.into())
        );
        assert_eq!(
            parse_rational("-2.5e-1").unwrap(),
            BigRational::new((-1).into(), 4.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn rational_field_ops() {
        let a = parse_rational("1/2").unwrap();
        let b = parse_rational("1/3").unwrap();
        assert_eq!(Coeff::add(&a, &b), parse_rational("5/6").unwrap());
        assert_eq!(a.div(&b).unwrap(), parse_rational("3/2").unwrap());
        assert_eq!(a.of_int(-4), parse_rational("-4").unwrap());
        assert!(Coeff::is_zero(&Coeff::sub(&a, &a)));
    }
}
