//! Exact rationals in canonical form.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number, always in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(Rational);

/// Build `num / den` in canonical form.
pub fn make_rational(num: i64, den: i64) -> Result<ExactRational> {
    ExactRational::new(Integer::from(num), Integer::from(den))
}

impl ExactRational {
    /// `num / den`; fails on a zero denominator.
    pub fn new(num: Integer, den: Integer) -> Result<Self> {
        if den.cmp0() == Ordering::Equal {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(ExactRational(Rational::from((num, den))))
    }

    /// The integer `v`.
    pub fn from_integer(v: impl Into<Integer>) -> Self {
        ExactRational(Rational::from(v.into()))
    }

    /// Zero.
    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    /// One.
    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// Numerator in lowest terms.
    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    /// Positive denominator in lowest terms.
    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    /// The underlying GMP rational.
    pub fn as_rug(&self) -> &Rational {
        &self.0
    }

    /// Wrap a GMP rational.
    pub fn from_rug(q: Rational) -> Self {
        ExactRational(q)
    }

    /// Sign against zero.
    pub fn sign(&self) -> Ordering {
        self.0.cmp0()
    }

    /// Absolute value.
    pub fn abs(&self) -> Self {
        ExactRational(Rational::from(self.0.abs_ref()))
    }

    /// `self^k` for `k >= 0`.
    pub fn pow(&self, k: u32) -> Self {
        use rug::ops::Pow;
        ExactRational(Rational::from((&self.0).pow(k)))
    }

    /// Nearest `f64` (saturating).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> Integer {
        use rug::ops::DivRounding;
        self.numer().clone().div_floor(self.denom())
    }

    /// Scientific decimal text with `digits` significant digits.
    pub fn to_sci(&self, digits: u32) -> String {
        super::dyadic::format_sci(&self.0, digits)
    }

    /// Parse `a`, `a/b`, or a finite decimal such as `0.35` or `1e-3`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("invalid rational `{s}`"));
        if let Some((n, d)) = t.split_once('/') {
            let n = Integer::from_str(n.trim()).map_err(|_| bad())?;
            let d = Integer::from_str(d.trim()).map_err(|_| bad())?;
            return ExactRational::new(n, d).map_err(|_| bad());
        }
        let (mant, exp) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (t, 0),
        };
        let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
        let neg = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let mut n = Integer::from_str(&digits).map_err(|_| bad())?;
        if neg {
            n = -n;
        }
        let scale = exp - frac_part.len() as i32;
        let ten = Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
        if scale >= 0 {
            Ok(ExactRational::from_integer(n * ten))
        } else {
            ExactRational::new(n, ten)
        }
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for ExactRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExactRational::parse(s)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl std::ops::$tr<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $m(self, o: &ExactRational) -> ExactRational {
                ExactRational(Rational::from(&self.0 $op &o.0))
            }
        }
        impl std::ops::$tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, o: ExactRational) -> ExactRational {
                ExactRational(self.0 $op o.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl std::ops::Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(Rational::from(-&self.0))
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: String,
    den: String,
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr { num: self.numer().to_string(), den: self.denom().to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = RationalRepr::deserialize(d)?;
        let n = Integer::from_str(&r.num).map_err(D::Error::custom)?;
        let m = Integer::from_str(&r.den).map_err(D::Error::custom)?;
        ExactRational::new(n, m).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        assert_eq!(make_rational(2, 4).unwrap(), make_rational(1, 2).unwrap());
        assert_eq!(make_rational(3, -6).unwrap().to_string(), "-1/2");
        assert!(make_rational(1, 0).is_err());
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(ExactRational::parse("0.35").unwrap(), make_rational(7, 20).unwrap());
        assert_eq!(ExactRational::parse("1/40").unwrap(), make_rational(1, 40).unwrap());
        assert_eq!(ExactRational::parse("2e-3").unwrap(), make_rational(1, 500).unwrap());
        assert_eq!(ExactRational::parse("-1.5").unwrap(), make_rational(-3, 2).unwrap());
        assert!(ExactRational::parse("abc").is_err());
    }

    #[test]
    fn json_round_trip() {
        let q = make_rational(-7, 3).unwrap();
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"num":"-7","den":"3"}"#);
        assert_eq!(serde_json::from_str::<ExactRational>(&s).unwrap(), q);
    }

    #[test]
    fn floor_rounds_toward_negative_infinity() {
        assert_eq!(make_rational(-7, 2).unwrap().floor(), -4);
        assert_eq!(make_rational(7, 2).unwrap().floor(), 3);
    }
}
