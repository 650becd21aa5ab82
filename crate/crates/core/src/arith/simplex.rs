//! Points of the probability simplex.

use std::cmp::Ordering;

use rug::Integer;
use serde::{Deserialize, Serialize};

use super::rational::ExactRational;
use super::{Interval, Scalar, Verdict};
use crate::error::{Error, Result};

/// A point of the simplex: nonnegative coordinates summing to one.
///
/// For intervals the requirement is that each coordinate meets `[0, 1]` and the
/// enclosure of the sum contains one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Deserialize<'de>"))]
pub struct SimplexPoint<S> {
    coords: Vec<S>,
}

/// Validate coordinates and build a simplex point.
pub fn make_simplex<S: Scalar>(coords: Vec<S>) -> Result<SimplexPoint<S>> {
    if coords.is_empty() {
        return Err(Error::NotOnSimplex("no coordinates".into()));
    }
    let zero = ExactRational::zero();
    let one = ExactRational::one();
    for (i, c) in coords.iter().enumerate() {
        if c.ge_q(&zero) == Verdict::False || c.le_q(&one) == Verdict::False {
            return Err(Error::NotOnSimplex(format!("coordinate {} outside [0, 1]", i + 1)));
        }
    }
    let sum = coords[1..].iter().fold(coords[0].clone(), |a, c| a.add(c));
    let (lo, hi) = sum.bounds_cmp(&one);
    if lo == Ordering::Greater || hi == Ordering::Less {
        return Err(Error::NotOnSimplex("coordinates do not sum to one".into()));
    }
    Ok(SimplexPoint { coords })
}

impl<S: Scalar> SimplexPoint<S> {
    /// Build without validation; callers guarantee the invariant.
    pub(crate) fn from_coords_unchecked(coords: Vec<S>) -> Self {
        SimplexPoint { coords }
    }

    /// The barycentre of the `n`-simplex.
    pub fn uniform(n: usize, prec: u32) -> Self {
        let q = ExactRational::new(Integer::from(1), Integer::from(n)).expect("n > 0");
        SimplexPoint { coords: vec![S::from_rational(&q, prec); n] }
    }

    /// The vertex `i` (zero-based) of the `n`-simplex.
    pub fn vertex(n: usize, i: usize, prec: u32) -> Self {
        let coords = (0..n).map(|j| S::from_i64(i64::from(i == j), prec)).collect();
        SimplexPoint { coords }
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The coordinates.
    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    /// Coordinate `i` (zero-based).
    pub fn coord(&self, i: usize) -> &S {
        &self.coords[i]
    }

    /// Consume into coordinates.
    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    /// Enclose every coordinate in an interval.
    pub fn to_interval(&self, prec: u32) -> SimplexPoint<Interval> {
        let mut coords: Vec<Interval> = self.coords.iter().map(|c| c.to_interval(prec)).collect();
        Interval::tighten_simplex(&mut coords);
        SimplexPoint { coords }
    }

    /// Representative exact coordinates (midpoints for intervals).
    pub fn representative(&self) -> Vec<ExactRational> {
        self.coords.iter().map(Scalar::representative).collect()
    }

    /// Approximate coordinates.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Scalar::to_f64).collect()
    }
}

impl SimplexPoint<ExactRational> {
    /// Parse `a/b` or decimal coordinate text.
    pub fn parse(texts: &[&str]) -> Result<Self> {
        let coords = texts.iter().map(|t| ExactRational::parse(t)).collect::<Result<Vec<_>>>()?;
        make_simplex(coords)
    }
}

/// Sup-norm distance between two points of equal dimension.
pub fn inf_dist<S: Scalar>(a: &SimplexPoint<S>, b: &SimplexPoint<S>) -> Result<S> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let mut it = a.coords.iter().zip(&b.coords).map(|(x, y)| x.sub(y).abs());
    let first = it.next().expect("nonempty");
    Ok(it.fold(first, |m, d| m.max(&d)))
}

/// Exact coordinates over a common denominator: `num[i] / den`.
///
/// Volterra steps map `den` to `den^2` without any gcd work, which keeps deep
/// exact iteration cheap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactVector {
    /// Numerators.
    pub num: Vec<Integer>,
    /// Positive common denominator.
    pub den: Integer,
}

impl ExactVector {
    /// Bring rationals to their least common denominator.
    pub fn from_rationals(coords: &[ExactRational]) -> Self {
        let mut den = Integer::from(1);
        for c in coords {
            den.lcm_mut(c.denom());
        }
        let num = coords.iter().map(|c| Integer::from(&den / c.denom()) * c.numer()).collect();
        ExactVector { num, den }
    }

    /// Canonical rationals.
    pub fn to_rationals(&self) -> Vec<ExactRational> {
        self.num
            .iter()
            .map(|n| ExactRational::new(n.clone(), self.den.clone()).expect("positive denominator"))
            .collect()
    }

    /// Canonical simplex point.
    pub fn to_point(&self) -> SimplexPoint<ExactRational> {
        SimplexPoint { coords: self.to_rationals() }
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.num.len()
    }

    /// Equality of the represented values.
    pub fn same_value(&self, o: &ExactVector) -> bool {
        self.dim() == o.dim()
            && self.num.iter().zip(&o.num).all(|(a, b)| Integer::from(a * &o.den) == Integer::from(b * &self.den))
    }

    /// Interval enclosures of the coordinates.
    pub fn to_interval(&self, prec: u32) -> SimplexPoint<Interval> {
        let den = super::Dyadic::from_int(self.den.clone());
        let mut coords: Vec<Interval> = self
            .num
            .iter()
            .map(|n| {
                let n = super::Dyadic::from_int(n.clone());
                Interval::new(
                    n.div(&den, prec, super::Round::Down),
                    n.div(&den, prec, super::Round::Up),
                    prec,
                )
                .expect("ordered endpoints")
            })
            .collect();
        Interval::tighten_simplex(&mut coords);
        SimplexPoint { coords }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::make_rational;

    fn q(n: i64, d: i64) -> ExactRational {
        make_rational(n, d).unwrap()
    }

    #[test]
    fn validation() {
        assert!(make_simplex(vec![q(1, 2), q(1, 4), q(1, 4)]).is_ok());
        assert!(make_simplex(vec![q(1, 2), q(1, 4), q(1, 3)]).is_err());
        assert!(make_simplex(vec![q(3, 2), q(-1, 4), q(-1, 4)]).is_err());
        assert!(make_simplex::<ExactRational>(vec![]).is_err());
    }

    #[test]
    fn distance() {
        let a = make_simplex(vec![q(1, 2), q(1, 4), q(1, 4)]).unwrap();
        let b = SimplexPoint::<ExactRational>::vertex(3, 0, 0);
        assert_eq!(inf_dist(&a, &b).unwrap(), q(1, 2));
        let c = SimplexPoint::<ExactRational>::vertex(2, 0, 0);
        assert!(matches!(inf_dist(&a, &c), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn common_denominator_round_trip() {
        let pts = vec![q(1, 6), q(1, 3), q(1, 2)];
        let v = ExactVector::from_rationals(&pts);
        assert_eq!(v.den, 6);
        assert_eq!(v.to_rationals(), pts);
        let w = ExactVector { num: v.num.iter().map(|n| Integer::from(n * 2)).collect(), den: Integer::from(12) };
        assert!(v.same_value(&w));
    }

    #[test]
    fn interval_points_validate_loosely() {
        let a = make_simplex(vec![q(1, 3), q(1, 3), q(1, 3)]).unwrap().to_interval(64);
        assert!(make_simplex(a.into_coords()).is_ok());
    }
}
