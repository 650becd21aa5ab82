//! Number backends: exact rationals and outward-rounded intervals.
//!
//! Code above this module is generic over [`Scalar`], so every computation
//! runs unchanged on either backend. Comparisons return a [`Verdict`]; an
//! interval that straddles the threshold yields [`Verdict::Undecided`] and the
//! caller escalates precision through an [`EscalationPolicy`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rug::Integer;
use serde::{Deserialize, Serialize};

pub mod dyadic;
pub mod interval;
pub mod rational;
pub mod simplex;

pub use dyadic::{Dyadic, Round};
pub use interval::Interval;
pub use rational::{make_rational, ExactRational};
pub use simplex::{inf_dist, make_simplex, ExactVector, SimplexPoint};

use crate::error::{Error, Result};

/// Which number backend a computation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Exact rationals.
    Exact,
    /// Outward-rounded intervals.
    Interval,
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "interval" => Ok(Backend::Interval),
            _ => Err(Error::Config(format!("unknown backend `{s}`"))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Interval => "interval",
        })
    }
}

/// Three-valued outcome of a certified predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Proved to hold.
    True,
    /// Proved to fail.
    False,
    /// Not decided at the current precision.
    Undecided,
}

impl Verdict {
    /// From a plain boolean.
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    /// Kleene conjunction.
    pub fn and(self, o: Verdict) -> Verdict {
        match (self, o) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::True, Verdict::True) => Verdict::True,
            _ => Verdict::Undecided,
        }
    }

    /// Kleene disjunction.
    pub fn or(self, o: Verdict) -> Verdict {
        match (self, o) {
            (Verdict::True, _) | (_, Verdict::True) => Verdict::True,
            (Verdict::False, Verdict::False) => Verdict::False,
            _ => Verdict::Undecided,
        }
    }

    /// True when decided either way.
    pub fn is_decided(self) -> bool {
        self != Verdict::Undecided
    }

    /// `Some(bool)` when decided.
    pub fn to_bool(self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Undecided => None,
        }
    }
}

/// Negation; `Undecided` stays undecided.
impl std::ops::Not for Verdict {
    type Output = Verdict;

    fn not(self) -> Verdict {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            Verdict::Undecided => Verdict::Undecided,
        }
    }
}

fn verdict_of(decide_true: bool, decide_false: bool) -> Verdict {
    if decide_true {
        Verdict::True
    } else if decide_false {
        Verdict::False
    } else {
        Verdict::Undecided
    }
}

/// Arithmetic shared by the exact and interval backends.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + Serialize + 'static {
    /// The backend this type implements.
    const BACKEND: Backend;

    /// Enclosure of a rational (exact for the exact backend).
    fn from_rational(q: &ExactRational, prec: u32) -> Self;
    /// Enclosure of an integer.
    fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_rational(&ExactRational::from_integer(v), prec)
    }
    /// Working precision in bits; zero for exact values.
    fn precision(&self) -> u32;
    /// Sum.
    fn add(&self, o: &Self) -> Self;
    /// Difference.
    fn sub(&self, o: &Self) -> Self;
    /// Product.
    fn mul(&self, o: &Self) -> Self;
    /// Quotient; fails on a divisor that is or may be zero.
    fn div(&self, o: &Self) -> Result<Self>;
    /// Absolute value.
    fn abs(&self) -> Self;
    /// Maximum.
    fn max(&self, o: &Self) -> Self;
    /// Comparison of the lower and upper bound against `q`.
    fn bounds_cmp(&self, q: &ExactRational) -> (Ordering, Ordering);
    /// Certified `self <= o`.
    fn le(&self, o: &Self) -> Verdict;
    /// Certified `self < o`.
    fn lt(&self, o: &Self) -> Verdict;
    /// Refine with a second enclosure of the same quantity.
    fn refine(&self, o: &Self) -> Self;
    /// Enclosure as an interval.
    fn to_interval(&self, prec: u32) -> Interval;
    /// The exact value, when known.
    fn exact(&self) -> Option<&ExactRational>;
    /// A representative value: the value itself or the interval midpoint.
    fn representative(&self) -> ExactRational;
    /// Approximate `f64`.
    fn to_f64(&self) -> f64;
    /// Common-denominator form of a coordinate vector, when exact.
    fn to_common(_coords: &[Self]) -> Option<ExactVector> {
        None
    }
    /// Coordinates from a common-denominator form, when exact.
    fn from_common(_v: &ExactVector) -> Option<Vec<Self>> {
        None
    }
    /// Sharpen coordinates known to sum to one.
    fn tighten_simplex(_coords: &mut [Self]) {}

    /// Certified `self <= q`.
    fn le_q(&self, q: &ExactRational) -> Verdict {
        let (lo, hi) = self.bounds_cmp(q);
        verdict_of(hi != Ordering::Greater, lo == Ordering::Greater)
    }
    /// Certified `self < q`.
    fn lt_q(&self, q: &ExactRational) -> Verdict {
        let (lo, hi) = self.bounds_cmp(q);
        verdict_of(hi == Ordering::Less, lo != Ordering::Less)
    }
    /// Certified `self >= q`.
    fn ge_q(&self, q: &ExactRational) -> Verdict {
        !self.lt_q(q)
    }
    /// Certified `self > q`.
    fn gt_q(&self, q: &ExactRational) -> Verdict {
        !self.le_q(q)
    }
}

impl Scalar for ExactRational {
    const BACKEND: Backend = Backend::Exact;

    fn from_rational(q: &ExactRational, _prec: u32) -> Self {
        q.clone()
    }
    fn precision(&self) -> u32 {
        0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if o.sign() == Ordering::Equal {
            return Err(Error::DivisionByZero);
        }
        Ok(self / o)
    }
    fn abs(&self) -> Self {
        ExactRational::abs(self)
    }
    fn max(&self, o: &Self) -> Self {
        std::cmp::max(self, o).clone()
    }
    fn bounds_cmp(&self, q: &ExactRational) -> (Ordering, Ordering) {
        let c = self.cmp(q);
        (c, c)
    }
    fn le(&self, o: &Self) -> Verdict {
        Verdict::from_bool(self <= o)
    }
    fn lt(&self, o: &Self) -> Verdict {
        Verdict::from_bool(self < o)
    }
    fn refine(&self, _o: &Self) -> Self {
        self.clone()
    }
    fn to_interval(&self, prec: u32) -> Interval {
        Interval::from_rational(self, prec)
    }
    fn exact(&self) -> Option<&ExactRational> {
        Some(self)
    }
    fn representative(&self) -> ExactRational {
        self.clone()
    }
    fn to_f64(&self) -> f64 {
        ExactRational::to_f64(self)
    }
    fn to_common(coords: &[Self]) -> Option<ExactVector> {
        Some(ExactVector::from_rationals(coords))
    }
    fn from_common(v: &ExactVector) -> Option<Vec<Self>> {
        Some(v.to_rationals())
    }
}

impl Scalar for Interval {
    const BACKEND: Backend = Backend::Interval;

    fn from_rational(q: &ExactRational, prec: u32) -> Self {
        Interval::from_rational(q, prec)
    }
    fn precision(&self) -> u32 {
        self.prec()
    }
    fn add(&self, o: &Self) -> Self {
        Interval::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Interval::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Interval::mul(self, o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        Interval::div(self, o)
    }
    fn abs(&self) -> Self {
        Interval::abs(self)
    }
    fn max(&self, o: &Self) -> Self {
        Interval::max(self, o)
    }
    fn bounds_cmp(&self, q: &ExactRational) -> (Ordering, Ordering) {
        (self.lo().cmp_rational(q.as_rug()), self.hi().cmp_rational(q.as_rug()))
    }
    fn le(&self, o: &Self) -> Verdict {
        verdict_of(self.hi() <= o.lo(), self.lo() > o.hi())
    }
    fn lt(&self, o: &Self) -> Verdict {
        verdict_of(self.hi() < o.lo(), self.lo() >= o.hi())
    }
    fn refine(&self, o: &Self) -> Self {
        self.intersect(o).unwrap_or_else(|| self.clone())
    }
    fn to_interval(&self, prec: u32) -> Interval {
        if prec >= self.prec() {
            self.clone()
        } else {
            self.with_prec(prec)
        }
    }
    fn exact(&self) -> Option<&ExactRational> {
        None
    }
    fn representative(&self) -> ExactRational {
        self.midpoint()
    }
    fn to_f64(&self) -> f64 {
        (self.lo().to_f64() + self.hi().to_f64()) / 2.0
    }
    fn tighten_simplex(coords: &mut [Self]) {
        let n = coords.len();
        if n < 2 {
            return;
        }
        let prec = coords.iter().map(Interval::prec).max().unwrap_or(2);
        let unit = Interval::new(Dyadic::zero(), Dyadic::from_int(1), prec).expect("unit interval");
        let one = Interval::from_int(1, prec);
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(Interval::from_int(0, prec));
        for c in coords.iter() {
            let next = prefix.last().expect("nonempty").add(c);
            prefix.push(next);
        }
        let mut suffix = Interval::from_int(0, prec);
        for i in (0..n).rev() {
            let others = prefix[i].add(&suffix);
            let implied = one.sub(&others);
            let mut c = coords[i].refine(&unit);
            c = c.refine(&implied);
            suffix = suffix.add(&coords[i]);
            coords[i] = c;
        }
    }
}

/// Precision schedule for interval computations: start, double, stop at the cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscalationPolicy {
    /// First precision tried, in bits.
    pub start_bits: u32,
    /// Largest precision tried, in bits.
    pub cap_bits: u32,
}

impl Default for EscalationPolicy {
    fn default() -> Self {
        EscalationPolicy { start_bits: 128, cap_bits: 1 << 20 }
    }
}

impl EscalationPolicy {
    /// A policy with explicit bounds; `start` is raised to at least 16 bits.
    pub fn new(start_bits: u32, cap_bits: u32) -> Self {
        let start_bits = start_bits.max(16);
        EscalationPolicy { start_bits, cap_bits: cap_bits.max(start_bits) }
    }

    /// The precisions tried, in order.
    pub fn schedule(&self) -> impl Iterator<Item = u32> + '_ {
        let cap = self.cap_bits;
        std::iter::successors(Some(self.start_bits), move |&p| {
            (p < cap).then(|| p.saturating_mul(2).min(cap))
        })
    }

    /// The precision after `p`, if below the cap.
    pub fn next(&self, p: u32) -> Option<u32> {
        (p < self.cap_bits).then(|| p.saturating_mul(2).min(self.cap_bits))
    }
}

/// Evaluate `f` at increasing precision until it decides.
///
/// Returns the verdict and the last precision used; `Undecided` means the cap
/// was reached.
pub fn decide<F: FnMut(u32) -> Verdict>(policy: &EscalationPolicy, mut f: F) -> (Verdict, u32) {
    let mut last = (Verdict::Undecided, policy.start_bits);
    for p in policy.schedule() {
        let v = f(p);
        last = (v, p);
        if v.is_decided() {
            break;
        }
    }
    last
}

/// `floor(log2(q))` for `q > 0`.
pub fn floor_log2(q: &ExactRational) -> Result<i64> {
    if q.sign() != Ordering::Greater {
        return Err(Error::Precondition("logarithm of a non-positive number".into()));
    }
    let mut e = i64::from(q.numer().significant_bits()) - i64::from(q.denom().significant_bits());
    loop {
        let p = pow2_rational(e);
        let p1 = pow2_rational(e + 1);
        if &p > q {
            e -= 1;
        } else if &p1 <= q {
            e += 1;
        } else {
            return Ok(e);
        }
    }
}

/// `2^e` as an exact rational.
pub fn pow2_rational(e: i64) -> ExactRational {
    let m = Integer::from(1) << u32::try_from(e.unsigned_abs()).expect("exponent in range");
    if e >= 0 {
        ExactRational::from_integer(m)
    } else {
        ExactRational::new(Integer::from(1), m).expect("nonzero")
    }
}
