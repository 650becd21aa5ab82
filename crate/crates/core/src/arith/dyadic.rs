//! Dyadic numbers `m * 2^e` with directed rounding to a fixed number of bits.
//!
//! The mantissa is an arbitrary-size integer and the exponent an `i128`, so
//! values far below `2^-(2^31)` stay representable.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::DivRounding;
use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Rounding direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

/// A dyadic rational `mant * 2^exp`, kept canonical: the mantissa is odd, or
/// zero with exponent zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: Integer,
    exp: i128,
}

/// Rounded results never fall below `2^-EXP_LIMIT` in magnitude, so
/// exponent sums stay far inside `i128`.
pub const EXP_LIMIT: i128 = 1 << 62;

fn shift_amount(s: i128) -> u32 {
    u32::try_from(s).expect("dyadic shift exceeds 2^32 bits")
}

impl Dyadic {
    /// Zero.
    pub fn zero() -> Self {
        Dyadic { mant: Integer::new(), exp: 0 }
    }

    /// The integer `v`.
    pub fn from_int(v: impl Into<Integer>) -> Self {
        Self::from_parts(v.into(), 0)
    }

    /// `mant * 2^exp`, canonicalised.
    pub fn from_parts(mut mant: Integer, mut exp: i128) -> Self {
        match mant.find_one(0) {
            None => Dyadic::zero(),
            Some(tz) => {
                if tz > 0 {
                    mant >>= tz;
                    exp += i128::from(tz);
                }
                Dyadic { mant, exp }
            }
        }
    }

    /// `±2^exp`.
    pub fn pow2(negative: bool, exp: i128) -> Self {
        Dyadic { mant: Integer::from(if negative { -1 } else { 1 }), exp }
    }

    /// The odd mantissa.
    pub fn mantissa(&self) -> &Integer {
        &self.mant
    }

    /// The binary exponent.
    pub fn exponent(&self) -> i128 {
        self.exp
    }

    /// True for zero.
    pub fn is_zero(&self) -> bool {
        self.mant.cmp0() == Ordering::Equal
    }

    /// Sign as an ordering against zero.
    pub fn sign(&self) -> Ordering {
        self.mant.cmp0()
    }

    /// Bits in the mantissa.
    pub fn bits(&self) -> u32 {
        self.mant.significant_bits()
    }

    /// The `t` with `2^(t-1) <= |x| < 2^t`; meaningless for zero.
    pub fn top(&self) -> i128 {
        i128::from(self.bits()) + self.exp
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        Dyadic { mant: Integer::from(-&self.mant), exp: self.exp }
    }

    /// Absolute value.
    pub fn abs(&self) -> Self {
        Dyadic { mant: Integer::from(self.mant.abs_ref()), exp: self.exp }
    }

    /// `mant * 2^exp` rounded to at most `prec` significant bits.
    ///
    /// Magnitudes below `2^-EXP_LIMIT` underflow outward: to zero, or to the
    /// same-signed `2^-EXP_LIMIT`, whichever lies in the rounding direction.
    pub fn round(mant: Integer, exp: i128, prec: u32, dir: Round) -> Self {
        let r = Self::round_unbounded(mant, exp, prec, dir);
        if r.is_zero() || r.top() >= -EXP_LIMIT {
            return r;
        }
        match (r.sign(), dir) {
            (Ordering::Greater, Round::Down) | (Ordering::Less, Round::Up) => Dyadic::zero(),
            (s, _) => Dyadic::pow2(s == Ordering::Less, -EXP_LIMIT),
        }
    }

    fn round_unbounded(mut mant: Integer, mut exp: i128, prec: u32, dir: Round) -> Self {
        let bits = mant.significant_bits();
        if bits > prec {
            let s = bits - prec;
            match dir {
                Round::Down => mant >>= s,
                Round::Up => {
                    mant = -mant;
                    mant >>= s;
                    mant = -mant;
                }
            }
            exp += i128::from(s);
        }
        Self::from_parts(mant, exp)
    }

    /// This value rounded to `prec` bits.
    pub fn rounded(&self, prec: u32, dir: Round) -> Self {
        if self.bits() <= prec {
            self.clone()
        } else {
            Self::round(self.mant.clone(), self.exp, prec, dir)
        }
    }

    /// Sum rounded to `prec` bits.
    ///
    /// An addend far below the last kept bit of the other is replaced by a
    /// same-signed power of two that is still below that bit; both sums then
    /// round to the same `prec`-bit value.
    pub fn add(&self, o: &Dyadic, prec: u32, dir: Round) -> Self {
        assert!(prec >= 2, "precision below 2 bits");
        if o.is_zero() {
            return self.rounded(prec, dir);
        }
        if self.is_zero() {
            return o.rounded(prec, dir);
        }
        let (big, small) = if self.top() >= o.top() { (self, o) } else { (o, self) };
        let k = big.exp.min(big.top() - i128::from(prec)) - 3;
        let sticky;
        let small = if small.top() < k {
            sticky = Dyadic::pow2(small.sign() == Ordering::Less, k);
            &sticky
        } else {
            small
        };
        let e = big.exp.min(small.exp);
        let mut m = Integer::from(&big.mant << shift_amount(big.exp - e));
        m += Integer::from(&small.mant << shift_amount(small.exp - e));
        Self::round(m, e, prec, dir)
    }

    /// Difference rounded to `prec` bits.
    pub fn sub(&self, o: &Dyadic, prec: u32, dir: Round) -> Self {
        self.add(&o.neg(), prec, dir)
    }

    /// Product rounded to `prec` bits.
    pub fn mul(&self, o: &Dyadic, prec: u32, dir: Round) -> Self {
        if self.is_zero() || o.is_zero() {
            return Dyadic::zero();
        }
        Self::round(Integer::from(&self.mant * &o.mant), self.exp + o.exp, prec, dir)
    }

    /// `self * 2^k`, exact.
    pub fn mul_pow2(&self, k: i128) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Quotient rounded to `prec` bits. Panics on a zero divisor.
    pub fn div(&self, o: &Dyadic, prec: u32, dir: Round) -> Self {
        assert!(!o.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let s = (i64::from(prec) + 2 + i64::from(o.bits()) - i64::from(self.bits())).max(0) + 2;
        let s = s as u32;
        let num = Integer::from(&self.mant << s);
        let q = match dir {
            Round::Down => num.div_floor(&o.mant),
            Round::Up => num.div_ceil(&o.mant),
        };
        Self::round(q, self.exp - o.exp - i128::from(s), prec, dir)
    }

    /// `num / den` rounded to `prec` bits.
    pub fn from_ratio(num: &Integer, den: &Integer, prec: u32, dir: Round) -> Self {
        Dyadic::from_int(num.clone()).div(&Dyadic::from_int(den.clone()), prec, dir)
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        let qs = q.cmp0();
        let s = self.sign();
        if s != qs {
            return s.cmp(&qs);
        }
        if s == Ordering::Equal {
            return Ordering::Equal;
        }
        let mag = self.cmp_abs_rational(q.numer(), q.denom());
        if s == Ordering::Less {
            mag.reverse()
        } else {
            mag
        }
    }

    fn cmp_abs_rational(&self, num: &Integer, den: &Integer) -> Ordering {
        let t = self.top();
        let l = i128::from(num.significant_bits()) - i128::from(den.significant_bits());
        if t > l + 1 {
            return Ordering::Greater;
        }
        if t < l {
            return Ordering::Less;
        }
        let m = Integer::from(self.mant.abs_ref());
        let n = Integer::from(num.abs_ref());
        if self.exp >= 0 {
            let lhs = Integer::from(&m * den) << shift_amount(self.exp);
            lhs.cmp(&n)
        } else {
            let lhs = m * den;
            let rhs = n << shift_amount(-self.exp);
            lhs.cmp(&rhs)
        }
    }

    /// Exact value as a rational.
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from(Integer::from(&self.mant << shift_amount(self.exp)))
        } else {
            Rational::from((self.mant.clone(), Integer::from(1) << shift_amount(-self.exp)))
        }
    }

    /// Nearest `f64`, saturating to zero or infinity outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits();
        let (m, e) = if bits > 64 {
            (Integer::from(&self.mant >> (bits - 64)).to_f64(), self.exp + i128::from(bits - 64))
        } else {
            (self.mant.to_f64(), self.exp)
        };
        let e = e.clamp(-4000, 4000) as i32;
        let half = e / 2;
        m * 2f64.powi(half) * 2f64.powi(e - half)
    }

    /// Approximate base-2 logarithm of `|x|`; negative infinity for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.bits();
        let keep = bits.min(64);
        let top = (Integer::from(self.mant.abs_ref()) >> (bits - keep)).to_f64();
        top.log2() + (self.exp + i128::from(bits - keep)) as f64
    }

    /// Hexadecimal float text `[-]0x<hex>p<exp>`.
    pub fn to_hex(&self) -> String {
        let sign = if self.sign() == Ordering::Less { "-" } else { "" };
        format!("{sign}0x{}p{}", Integer::from(self.mant.abs_ref()).to_string_radix(16), self.exp)
    }

    /// Parse text produced by [`Dyadic::to_hex`].
    pub fn from_hex(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid hex float `{s}`"));
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let body = body.strip_prefix("0x").ok_or_else(bad)?;
        let (m, e) = body.split_once('p').ok_or_else(bad)?;
        let mut mant = Integer::from_str_radix(m, 16).map_err(|_| bad())?;
        if mant.cmp0() == Ordering::Less {
            return Err(bad());
        }
        let exp: i128 = e.parse().map_err(|_| bad())?;
        if neg {
            mant = -mant;
        }
        Ok(Self::from_parts(mant, exp))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let (s, t) = (self.sign(), o.sign());
        if s != t {
            return s.cmp(&t);
        }
        if s == Ordering::Equal {
            return Ordering::Equal;
        }
        let mag = if self.top() != o.top() {
            self.top().cmp(&o.top())
        } else {
            let e = self.exp.min(o.exp);
            let a = Integer::from(self.mant.abs_ref()) << shift_amount(self.exp - e);
            let b = Integer::from(o.mant.abs_ref()) << shift_amount(o.exp - e);
            a.cmp(&b)
        };
        if s == Ordering::Less {
            mag.reverse()
        } else {
            mag
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Scientific decimal text with `digits` significant digits, truncated toward zero.
pub fn format_sci(q: &Rational, digits: u32) -> String {
    let digits = digits.max(1);
    if q.cmp0() == Ordering::Equal {
        return "0".to_string();
    }
    let sign = if q.cmp0() == Ordering::Less { "-" } else { "" };
    let num = Integer::from(q.numer().abs_ref());
    let den = q.denom();
    let l2 = f64::from(num.significant_bits()) - f64::from(den.significant_bits());
    let mut e = (l2 * std::f64::consts::LOG10_2).floor() as i64;
    let text = loop {
        let s = i64::from(digits) - 1 - e;
        let n = if s >= 0 {
            (&num * Integer::from(Integer::u_pow_u(10, s as u32))) / den
        } else {
            num.clone() / (den * Integer::from(Integer::u_pow_u(10, (-s) as u32)))
        };
        let t = n.to_string();
        match (t.len() as i64).cmp(&i64::from(digits)) {
            Ordering::Less => e -= 1,
            Ordering::Greater => e += 1,
            Ordering::Equal => break t,
        }
    };
    let (lead, rest) = text.split_at(1);
    if rest.is_empty() {
        format!("{sign}{lead}e{e}")
    } else {
        format!("{sign}{lead}.{rest}e{e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i128) -> Dyadic {
        Dyadic::from_parts(Integer::from(m), e)
    }

    #[test]
    fn underflow_rounds_outward() {
        let tiny = d(3, -EXP_LIMIT + 10);
        let sq_down = tiny.mul(&tiny, 64, Round::Down);
        let sq_up = tiny.mul(&tiny, 64, Round::Up);
        assert!(sq_down.is_zero());
        assert_eq!(sq_up, Dyadic::pow2(false, -EXP_LIMIT));
        let neg = tiny.neg();
        assert_eq!(neg.mul(&tiny, 64, Round::Down), Dyadic::pow2(true, -EXP_LIMIT));
        assert!(neg.mul(&tiny, 64, Round::Up).is_zero());
        let mut x = d(1, -1);
        for _ in 0..200 {
            x = x.mul(&x, 32, Round::Up);
        }
        assert_eq!(x, Dyadic::pow2(false, -EXP_LIMIT));
    }

    #[test]
    fn canonical_form_strips_trailing_zeros() {
        let x = d(12, 0);
        assert_eq!(x.mantissa(), &Integer::from(3));
        assert_eq!(x.exponent(), 2);
        assert_eq!(d(0, 7), Dyadic::zero());
    }

    #[test]
    fn rounding_is_directed() {
        // 11 = 0b1011 at 2 bits: floor 8, ceil 12
        assert_eq!(Dyadic::round(Integer::from(11), 0, 2, Round::Down), d(8, 0));
        assert_eq!(Dyadic::round(Integer::from(11), 0, 2, Round::Up), d(12, 0));
        assert_eq!(Dyadic::round(Integer::from(-11), 0, 2, Round::Down), d(-12, 0));
        assert_eq!(Dyadic::round(Integer::from(-11), 0, 2, Round::Up), d(-8, 0));
    }

    #[test]
    fn addition_with_a_tiny_addend_rounds_outward() {
        let one = d(1, 0);
        let tiny = Dyadic::pow2(false, -1000);
        let up = one.add(&tiny, 53, Round::Up);
        let down = one.add(&tiny, 53, Round::Down);
        assert_eq!(down, one);
        assert_eq!(up, d(1, 0).add(&Dyadic::pow2(false, -52), 64, Round::Up));
        let down_neg = one.sub(&tiny, 53, Round::Down);
        assert!(down_neg < one);
        assert_eq!(one.sub(&tiny, 53, Round::Up), one);
    }

    #[test]
    fn division_brackets_the_quotient() {
        let one = d(1, 0);
        let three = d(3, 0);
        let lo = one.div(&three, 64, Round::Down);
        let hi = one.div(&three, 64, Round::Up);
        let third = Rational::from((1, 3));
        assert_eq!(lo.cmp_rational(&third), Ordering::Less);
        assert_eq!(hi.cmp_rational(&third), Ordering::Greater);
        assert!(lo.bits() <= 64 && hi.bits() <= 64);
        let gap = hi.sub(&lo, 200, Round::Up);
        assert_eq!(gap, Dyadic::pow2(false, -65));
    }

    #[test]
    fn hex_round_trip() {
        for x in [d(0, 0), d(3, -2), d(-5, 40), Dyadic::pow2(false, -3_000_000_000)] {
            assert_eq!(Dyadic::from_hex(&x.to_hex()).unwrap(), x);
        }
        assert_eq!(d(3, -2).to_hex(), "0x3p-2");
        assert!(Dyadic::from_hex("0x1q3").is_err());
    }

    #[test]
    fn comparison_against_rationals() {
        let q = Rational::from((7, 8));
        assert_eq!(d(7, -3).cmp_rational(&q), Ordering::Equal);
        assert_eq!(d(1, 0).cmp_rational(&q), Ordering::Greater);
        assert_eq!(Dyadic::pow2(false, -100_000).cmp_rational(&q), Ordering::Less);
        assert_eq!(d(-1, 0).cmp_rational(&q), Ordering::Less);
    }

    #[test]
    fn scientific_formatting() {
        assert_eq!(format_sci(&Rational::from((1, 3)), 5), "3.3333e-1");
        assert_eq!(format_sci(&Rational::from((-250, 1)), 3), "-2.50e2");
        assert_eq!(format_sci(&Rational::from((1, 1)), 1), "1e0");
    }
}
