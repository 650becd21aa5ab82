//! Closed intervals with dyadic endpoints and outward rounding.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dyadic::{Dyadic, Round};
use super::rational::ExactRational;
use crate::error::{Error, Result};

/// An enclosure `[lo, hi]` whose endpoints carry at most `prec` significant bits.
///
/// Every operation rounds the lower endpoint down and the upper endpoint up, so
/// the result contains the exact result for every choice of operands inside the
/// inputs. Binary operations work at the larger of the two precisions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl Interval {
    /// `[lo, hi]` rounded outward to `prec` bits.
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::Precondition(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo: lo.rounded(prec, Round::Down), hi: hi.rounded(prec, Round::Up), prec })
    }

    /// The enclosure of a dyadic value.
    pub fn from_dyadic(d: &Dyadic, prec: u32) -> Self {
        Interval { lo: d.rounded(prec, Round::Down), hi: d.rounded(prec, Round::Up), prec }
    }

    /// The tightest `prec`-bit enclosure of a rational.
    pub fn from_rational(q: &ExactRational, prec: u32) -> Self {
        if q.denom() == &1 {
            return Self::from_dyadic(&Dyadic::from_int(q.numer().clone()), prec);
        }
        Interval {
            lo: Dyadic::from_ratio(q.numer(), q.denom(), prec, Round::Down),
            hi: Dyadic::from_ratio(q.numer(), q.denom(), prec, Round::Up),
            prec,
        }
    }

    /// The integer `v`.
    pub fn from_int(v: i64, prec: u32) -> Self {
        Self::from_dyadic(&Dyadic::from_int(v), prec)
    }

    /// Lower endpoint.
    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    /// Upper endpoint.
    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    /// Working precision in bits.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `hi - lo`, rounded up.
    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo, self.prec, Round::Up)
    }

    /// The exact midpoint.
    pub fn midpoint(&self) -> ExactRational {
        let s = self.lo.to_rational() + self.hi.to_rational();
        ExactRational::from_rug(s / 2u32)
    }

    /// True when `q` lies in the interval.
    pub fn contains_rational(&self, q: &ExactRational) -> bool {
        self.lo.cmp_rational(q.as_rug()) != Ordering::Greater
            && self.hi.cmp_rational(q.as_rug()) != Ordering::Less
    }

    /// True when `o` lies inside this interval.
    pub fn contains(&self, o: &Interval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    /// True when zero lies in the interval.
    pub fn contains_zero(&self) -> bool {
        self.lo.sign() != Ordering::Greater && self.hi.sign() != Ordering::Less
    }

    /// Common part of two enclosures, if any.
    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        let lo = if self.lo >= o.lo { &self.lo } else { &o.lo };
        let hi = if self.hi <= o.hi { &self.hi } else { &o.hi };
        (lo <= hi).then(|| Interval { lo: lo.clone(), hi: hi.clone(), prec: self.prec.max(o.prec) })
    }

    /// Smallest interval containing both.
    pub fn hull(&self, o: &Interval) -> Interval {
        let lo = if self.lo <= o.lo { &self.lo } else { &o.lo };
        let hi = if self.hi >= o.hi { &self.hi } else { &o.hi };
        Interval { lo: lo.clone(), hi: hi.clone(), prec: self.prec.max(o.prec) }
    }

    /// The same enclosure rounded outward to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Interval {
        Interval { lo: self.lo.rounded(prec, Round::Down), hi: self.hi.rounded(prec, Round::Up), prec }
    }

    /// Sum.
    pub fn add(&self, o: &Interval) -> Interval {
        let p = self.prec.max(o.prec);
        Interval { lo: self.lo.add(&o.lo, p, Round::Down), hi: self.hi.add(&o.hi, p, Round::Up), prec: p }
    }

    /// Difference.
    pub fn sub(&self, o: &Interval) -> Interval {
        let p = self.prec.max(o.prec);
        Interval { lo: self.lo.sub(&o.hi, p, Round::Down), hi: self.hi.sub(&o.lo, p, Round::Up), prec: p }
    }

    /// Negation.
    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg(), prec: self.prec }
    }

    /// Product.
    pub fn mul(&self, o: &Interval) -> Interval {
        let p = self.prec.max(o.prec);
        if self.lo.sign() != Ordering::Less && o.lo.sign() != Ordering::Less {
            return Interval {
                lo: self.lo.mul(&o.lo, p, Round::Down),
                hi: self.hi.mul(&o.hi, p, Round::Up),
                prec: p,
            };
        }
        let pairs = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let lo = pairs.iter().map(|(a, b)| a.mul(b, p, Round::Down)).min().expect("four products");
        let hi = pairs.iter().map(|(a, b)| a.mul(b, p, Round::Up)).max().expect("four products");
        Interval { lo, hi, prec: p }
    }

    /// Product with the integer `k`.
    pub fn mul_int(&self, k: i64) -> Interval {
        self.mul(&Interval::from_int(k, self.prec))
    }

    /// Quotient; fails when the divisor contains zero.
    pub fn div(&self, o: &Interval) -> Result<Interval> {
        if o.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.prec.max(o.prec);
        let pairs = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let lo = pairs.iter().map(|(a, b)| a.div(b, p, Round::Down)).min().expect("four quotients");
        let hi = pairs.iter().map(|(a, b)| a.div(b, p, Round::Up)).max().expect("four quotients");
        Ok(Interval { lo, hi, prec: p })
    }

    /// Absolute value.
    pub fn abs(&self) -> Interval {
        if self.lo.sign() != Ordering::Less {
            self.clone()
        } else if self.hi.sign() != Ordering::Greater {
            self.neg()
        } else {
            let m = std::cmp::max(self.lo.neg(), self.hi.clone());
            Interval { lo: Dyadic::zero(), hi: m, prec: self.prec }
        }
    }

    /// Pointwise maximum.
    pub fn max(&self, o: &Interval) -> Interval {
        Interval {
            lo: std::cmp::max(&self.lo, &o.lo).clone(),
            hi: std::cmp::max(&self.hi, &o.hi).clone(),
            prec: self.prec.max(o.prec),
        }
    }

    /// Pointwise minimum.
    pub fn min(&self, o: &Interval) -> Interval {
        Interval {
            lo: std::cmp::min(&self.lo, &o.lo).clone(),
            hi: std::cmp::min(&self.hi, &o.hi).clone(),
            prec: self.prec.max(o.prec),
        }
    }

    /// Approximate number of correct leading bits, `log2(|mid| / width)`.
    pub fn accuracy_bits(&self) -> f64 {
        let w = self.width();
        if w.is_zero() {
            return f64::INFINITY;
        }
        let m = std::cmp::max(self.lo.abs(), self.hi.abs());
        m.log2_abs() - w.log2_abs()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: String,
    hi: String,
    prec: u32,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalRepr { lo: self.lo.to_hex(), hi: self.hi.to_hex(), prec: self.prec }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = IntervalRepr::deserialize(d)?;
        let lo = Dyadic::from_hex(&r.lo).map_err(D::Error::custom)?;
        let hi = Dyadic::from_hex(&r.hi).map_err(D::Error::custom)?;
        if r.prec < 2 {
            return Err(D::Error::custom("precision below 2 bits"));
        }
        Interval::new(lo, hi, r.prec).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::make_rational;

    #[test]
    fn rational_enclosure_is_tight() {
        let third = make_rational(1, 3).unwrap();
        let i = Interval::from_rational(&third, 128);
        assert!(i.contains_rational(&third));
        assert!(i.accuracy_bits() > 125.0);
        let half = Interval::from_rational(&make_rational(1, 2).unwrap(), 128);
        assert_eq!(half.lo(), half.hi());
    }

    #[test]
    fn arithmetic_contains_exact_results() {
        let a = make_rational(2, 7).unwrap();
        let b = make_rational(-5, 11).unwrap();
        let (ia, ib) = (Interval::from_rational(&a, 40), Interval::from_rational(&b, 40));
        assert!(ia.add(&ib).contains_rational(&(&a + &b)));
        assert!(ia.sub(&ib).contains_rational(&(&a - &b)));
        assert!(ia.mul(&ib).contains_rational(&(&a * &b)));
        assert!(ia.div(&ib).unwrap().contains_rational(&(&a / &b)));
        assert!(ib.abs().contains_rational(&b.abs()));
    }

    #[test]
    fn division_by_zero_interval_fails() {
        let z = Interval::new(Dyadic::from_int(-1), Dyadic::from_int(1), 64).unwrap();
        assert!(Interval::from_int(1, 64).div(&z).is_err());
    }

    #[test]
    fn json_round_trip() {
        let i = Interval::from_rational(&make_rational(1, 3).unwrap(), 64);
        let s = serde_json::to_string(&i).unwrap();
        assert_eq!(serde_json::from_str::<Interval>(&s).unwrap(), i);
    }
}
