//! Closed-form constants from the proofs of the spiral propositions.
//!
//! Values too large to hold exactly are kept as symbolic powers.

use std::fmt;

use rug::Integer;
use serde::{Serialize, Serializer};

use crate::arith::{make_rational, ExactRational};
use crate::error::{Error, Result};

/// Default size cap, in bits, above which a power is kept symbolic.
pub const DEFAULT_BIT_CAP: u64 = 1 << 20;

/// Which formula produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `(eps/2)^(2^D)`.
    Skipcorner,
    /// `eps / 2^(2D)`.
    Skipcorner2,
    /// `ceil(eps^-15) + 2 ceil(10 ln(1/eps)) + 100`.
    Epsclose,
}

/// How a reported value relates to the quantity it stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// The value itself.
    Equal,
    /// The true quantity is at most the value.
    UpperBound,
    /// The true quantity is at least the value.
    LowerBound,
}

/// An exponent that may be a power of two too large to expand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    /// A plain integer.
    Integer(Integer),
    /// `2^k`.
    PowerOfTwo(Integer),
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Integer(e) => write!(f, "{e}"),
            Exponent::PowerOfTwo(k) => write!(f, "2^{k}"),
        }
    }
}

/// A rational, exact or as `base^exponent`.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundValue {
    /// An exact rational.
    Exact(ExactRational),
    /// `base^exponent`, unexpanded.
    SymbolicPower {
        /// The base.
        base: ExactRational,
        /// The exponent.
        exponent: Exponent,
    },
}

impl BoundValue {
    /// The exact value, if held.
    pub fn exact(&self) -> Option<&ExactRational> {
        match self {
            BoundValue::Exact(q) => Some(q),
            BoundValue::SymbolicPower { .. } => None,
        }
    }

    /// Whether the value is unexpanded.
    pub fn is_symbolic(&self) -> bool {
        matches!(self, BoundValue::SymbolicPower { .. })
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(q) => write!(f, "{q}"),
            BoundValue::SymbolicPower { base, exponent } => write!(f, "({base})^({exponent})"),
        }
    }
}

impl Serialize for BoundValue {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn ser_opt_int<Z: Serializer>(v: &Option<Integer>, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
    match v {
        Some(i) => s.serialize_str(&i.to_string()),
        None => s.serialize_none(),
    }
}

fn ser_int<Z: Serializer>(v: &Integer, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_q<Z: Serializer>(v: &ExactRational, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
    s.serialize_str(&v.to_string())
}

/// A bound with its intermediate constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    /// Formula used.
    pub kind: BoundKind,
    /// The `eps` parameter.
    #[serde(serialize_with = "ser_q")]
    pub eps: ExactRational,
    /// The step parameter `D` (input for the skip bounds, output for `Epsclose`).
    #[serde(serialize_with = "ser_int")]
    pub d: Integer,
    /// `C = ceil(eps^-15)`.
    #[serde(serialize_with = "ser_opt_int")]
    pub c: Option<Integer>,
    /// Bound on `N1`.
    #[serde(serialize_with = "ser_opt_int")]
    pub n1: Option<Integer>,
    /// Bound on `N2`.
    #[serde(serialize_with = "ser_opt_int")]
    pub n2: Option<Integer>,
    /// Bound on `N3`.
    #[serde(serialize_with = "ser_opt_int")]
    pub n3: Option<Integer>,
    /// The bound itself.
    pub result: BoundValue,
    /// How `result` relates to the quantity it bounds.
    pub relation: Relation,
    /// Set when `eps` lies outside the range the derivation assumes.
    pub heuristic_range: bool,
    /// Logarithm base, when one is used.
    pub log_base: Option<&'static str>,
}

fn check_small(eps: &ExactRational) -> Result<()> {
    if eps.sign() != std::cmp::Ordering::Greater || eps > &make_rational(1, 10)? {
        return Err(Error::Precondition(format!("eps = {eps} must lie in (0, 1/10]")));
    }
    Ok(())
}

fn bit_len(q: &ExactRational) -> u64 {
    u64::from(q.numer().significant_bits().max(q.denom().significant_bits()))
}

/// `(eps/2)^(2^D)`, symbolic once its size exceeds `bit_cap` bits.
pub fn skipcorner_eps_capped(eps: &ExactRational, d: &Integer, bit_cap: u64) -> Result<BoundReport> {
    check_small(eps)?;
    if d.cmp0().is_lt() {
        return Err(Error::Precondition("D must be non-negative".into()));
    }
    let base = eps / &ExactRational::from_integer(2);
    let exact = d.to_u32().filter(|&k| k < 64).and_then(|k| {
        let e = 1u64 << k;
        (e.saturating_mul(bit_len(&base)) <= bit_cap).then(|| base.pow(e as u32))
    });
    let result = match exact {
        Some(q) => BoundValue::Exact(q),
        None => BoundValue::SymbolicPower { base, exponent: Exponent::PowerOfTwo(d.clone()) },
    };
    Ok(BoundReport {
        kind: BoundKind::Skipcorner,
        eps: eps.clone(),
        d: d.clone(),
        c: None,
        n1: None,
        n2: None,
        n3: None,
        result,
        relation: Relation::Equal,
        heuristic_range: false,
        log_base: None,
    })
}

/// `(eps/2)^(2^D)` with the default bit cap.
pub fn skipcorner_eps(eps: &ExactRational, d: u64) -> Result<BoundReport> {
    skipcorner_eps_capped(eps, &Integer::from(d), DEFAULT_BIT_CAP)
}

/// `eps / 2^(2D)`, exact.
pub fn skipcorner2_eps(eps: &ExactRational, d: u64) -> Result<BoundReport> {
    check_small(eps)?;
    let shift = d.checked_mul(2).and_then(|s| u32::try_from(s).ok()).ok_or(Error::TooLarge {
        what: "D",
        value: d,
        cap: u64::from(u32::MAX / 2),
    })?;
    let q = ExactRational::from_rug(eps.as_rug().clone() >> shift);
    Ok(BoundReport {
        kind: BoundKind::Skipcorner2,
        eps: eps.clone(),
        d: Integer::from(d),
        c: None,
        n1: None,
        n2: None,
        n3: None,
        result: BoundValue::Exact(q),
        relation: Relation::Equal,
        heuristic_range: false,
        log_base: None,
    })
}

fn ln_integer(v: &Integer) -> f64 {
    let bits = v.significant_bits();
    if bits <= 60 {
        return v.to_f64().ln();
    }
    let shift = bits - 60;
    let top = Integer::from(v >> shift).to_f64();
    top.ln() + f64::from(shift) * std::f64::consts::LN_2
}

/// `ceil(10 ln(1/eps))` for `0 < eps < 1`.
pub fn ceil_ten_ln_inv(eps: &ExactRational) -> Result<Integer> {
    let x = 10.0 * (ln_integer(eps.denom()) - ln_integer(eps.numer()));
    let r = x.round();
    // 10 ln(1/eps) is irrational for rational eps != 1, so only rounding error can make this ambiguous.
    if (x - r).abs() < 1e-6 * x.max(1.0) {
        return Err(Error::Precondition(format!("10 ln(1/eps) too close to an integer at eps = {eps}")));
    }
    Ok(Integer::from_f64(x.ceil()).expect("finite"))
}

/// Hitting-time bound `D = C + N3` with `C = ceil(eps^-15)` and
/// `N3 = 2 ceil(10 ln(1/eps)) + 100`.
///
/// Accepts any `0 < eps < 1`; `heuristic_range` is set when `eps >= 2^-100`.
pub fn epsclose_d_bound(eps: &ExactRational) -> Result<BoundReport> {
    if eps.sign() != std::cmp::Ordering::Greater || eps >= &ExactRational::one() {
        return Err(Error::Precondition(format!("eps = {eps} must lie in (0, 1)")));
    }
    let inv15 = (&ExactRational::one() / eps).pow(15);
    let c = inv15.as_rug().clone().ceil().into_numer_denom().0;
    let l = ceil_ten_ln_inv(eps)?;
    let n1 = l.clone();
    let n2 = Integer::from(&n1 + 100);
    let n3 = Integer::from(&n2 + &l);
    let d = Integer::from(&c + &n3);
    let heuristic_range = eps.as_rug() >= &rug::Rational::from((Integer::from(1), Integer::from(1) << 100));
    Ok(BoundReport {
        kind: BoundKind::Epsclose,
        eps: eps.clone(),
        d: d.clone(),
        c: Some(c),
        n1: Some(n1),
        n2: Some(n2),
        n3: Some(n3),
        result: BoundValue::Exact(ExactRational::from_rug(rug::Rational::from(d))),
        relation: Relation::Equal,
        heuristic_range,
        log_base: Some("natural"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactRational {
        make_rational(n, d).unwrap()
    }

    #[test]
    fn skipcorner_examples() {
        let e = q(1, 10);
        assert_eq!(skipcorner_eps(&e, 0).unwrap().result, BoundValue::Exact(q(1, 20)));
        assert_eq!(skipcorner_eps(&e, 1).unwrap().result, BoundValue::Exact(q(1, 400)));
        assert_eq!(skipcorner_eps(&e, 3).unwrap().result, BoundValue::Exact(q(1, 20).pow(8)));
        let big = skipcorner_eps(&e, 100).unwrap();
        assert_eq!(
            big.result,
            BoundValue::SymbolicPower { base: q(1, 20), exponent: Exponent::PowerOfTwo(Integer::from(100)) }
        );
        assert_eq!(big.result.to_string(), "(1/20)^(2^100)");
        assert!(skipcorner_eps(&q(1, 5), 1).is_err());
    }

    #[test]
    fn skipcorner2_examples() {
        assert_eq!(skipcorner2_eps(&q(1, 10), 0).unwrap().result, BoundValue::Exact(q(1, 10)));
        assert_eq!(skipcorner2_eps(&q(1, 10), 3).unwrap().result, BoundValue::Exact(q(1, 640)));
        assert_eq!(skipcorner2_eps(&q(2, 25), 1).unwrap().result, BoundValue::Exact(q(1, 50)));
    }

    #[test]
    fn epsclose_examples() {
        let r = epsclose_d_bound(&q(1, 2)).unwrap();
        assert_eq!(r.c, Some(Integer::from(32768)));
        assert_eq!(r.n1, Some(Integer::from(7)));
        assert_eq!(r.n3, Some(Integer::from(114)));
        assert_eq!(r.d, 32882);
        assert!(r.heuristic_range);
        let tiny = ExactRational::from_rug(rug::Rational::from((Integer::from(1), Integer::from(1) << 101)));
        let t = epsclose_d_bound(&tiny).unwrap();
        assert!(!t.heuristic_range);
        assert_eq!(t.c, Some(Integer::from(1) << 1515));
        let mut prev: Option<Integer> = None;
        for k in 2..12 {
            let d = epsclose_d_bound(&q(1, k)).unwrap().d;
            if let Some(p) = prev {
                assert!(d > p);
            }
            prev = Some(d);
        }
    }
}
