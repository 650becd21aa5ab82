//! The Stein-Ulam spiral `V(x, y, z) = (x(1+y-z), y(1+z-x), z(1+x-y))` on the
//! 2-simplex, its rotation and potential, closeness predicates, hitting times
//! and the bound formulas behind the four propositions about it.
//!
//! On the simplex the map equals `(x(x+2y), y(y+2z), z(z+2x))`, the form used
//! for evaluation because it never subtracts.

use std::fmt;
use std::str::FromStr;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{inf_dist, make_simplex, ExactRational, ExactVector, Interval, Scalar, SimplexPoint, Verdict};
use crate::error::{Error, Result};
use crate::qso::DEFAULT_EXACT_CAP;

pub mod bounds;
pub mod orbit;

pub use bounds::{epsclose_d_bound, skipcorner2_eps, skipcorner_eps, BoundKind, BoundReport, BoundValue, Exponent};
pub use orbit::{first_vertex_hit, hit_corner, Enclosure, NearAnyCorner, NearCorner, NearSide, OrbitScan, PhiBelow, PointTest};

/// A point of the 2-simplex with coordinates `(x, y, z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound(deserialize = "S: Deserialize<'de>"))]
pub struct SpiralPoint<S>(SimplexPoint<S>);

impl<S: Scalar> SpiralPoint<S> {
    /// Wrap a three-dimensional simplex point.
    pub fn new(p: SimplexPoint<S>) -> Result<Self> {
        if p.dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: p.dim() });
        }
        Ok(SpiralPoint(p))
    }

    /// Validate and wrap three coordinates.
    pub fn from_coords(c: [S; 3]) -> Result<Self> {
        Ok(SpiralPoint(make_simplex(c.to_vec())?))
    }

    pub(crate) fn from_unchecked(c: Vec<S>) -> Self {
        SpiralPoint(SimplexPoint::from_coords_unchecked(c))
    }

    /// The interior fixed point `(1/3, 1/3, 1/3)`.
    pub fn center(prec: u32) -> Self {
        SpiralPoint(SimplexPoint::uniform(3, prec))
    }

    /// A vertex.
    pub fn corner(c: Corner, prec: u32) -> Self {
        SpiralPoint(SimplexPoint::vertex(3, c.index(), prec))
    }

    /// First coordinate.
    pub fn x(&self) -> &S {
        self.0.coord(0)
    }

    /// Second coordinate.
    pub fn y(&self) -> &S {
        self.0.coord(1)
    }

    /// Third coordinate.
    pub fn z(&self) -> &S {
        self.0.coord(2)
    }

    /// Coordinates.
    pub fn coords(&self) -> &[S] {
        self.0.coords()
    }

    /// The underlying simplex point.
    pub fn as_simplex(&self) -> &SimplexPoint<S> {
        &self.0
    }

    /// Consume into the simplex point.
    pub fn into_simplex(self) -> SimplexPoint<S> {
        self.0
    }

    /// Interval enclosure.
    pub fn to_interval(&self, prec: u32) -> SpiralPoint<Interval> {
        SpiralPoint(self.0.to_interval(prec))
    }
}

impl SpiralPoint<ExactRational> {
    /// Parse three coordinates such as `1/2` or `0.25`.
    pub fn parse(texts: &[&str]) -> Result<Self> {
        SpiralPoint::new(SimplexPoint::parse(texts)?)
    }

    /// Exact point from small fractions.
    pub fn from_fracs(v: [(i64, i64); 3]) -> Result<Self> {
        let c = v.map(|(n, d)| crate::arith::make_rational(n, d)).into_iter().collect::<Result<Vec<_>>>()?;
        SpiralPoint::new(make_simplex(c)?)
    }

    /// Common-denominator form.
    pub fn to_common(&self) -> ExactVector {
        ExactVector::from_rationals(self.coords())
    }

    /// True when every coordinate is positive.
    pub fn is_interior(&self) -> bool {
        self.coords().iter().all(|c| c.sign() == std::cmp::Ordering::Greater)
    }
}

/// A vertex of the simplex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Corner {
    /// `(1, 0, 0)`.
    X,
    /// `(0, 1, 0)`.
    Y,
    /// `(0, 0, 1)`.
    Z,
}

impl Corner {
    /// All corners in order.
    pub const ALL: [Corner; 3] = [Corner::X, Corner::Y, Corner::Z];

    /// Coordinate index.
    pub fn index(self) -> usize {
        self as usize
    }

    /// The corner with coordinate index `i mod 3`.
    pub fn from_index(i: usize) -> Corner {
        Corner::ALL[i % 3]
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["x", "y", "z"][self.index()])
    }
}

impl FromStr for Corner {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Corner::X),
            "y" => Ok(Corner::Y),
            "z" => Ok(Corner::Z),
            _ => Err(Error::Parse(format!("unknown corner `{s}`"))),
        }
    }
}

/// A side of the simplex, named by the two corners it joins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `z = 0`.
    Xy,
    /// `x = 0`.
    Yz,
    /// `y = 0`.
    Xz,
}

impl Side {
    /// Index of the coordinate that vanishes on this side.
    pub fn opposite(self) -> usize {
        match self {
            Side::Xy => 2,
            Side::Yz => 0,
            Side::Xz => 1,
        }
    }
}

/// One step of the spiral.
pub fn v_step<S: Scalar>(p: &SpiralPoint<S>) -> SpiralPoint<S> {
    let c = p.coords();
    let mut out: Vec<S> = (0..3)
        .map(|i| {
            let j = (i + 1) % 3;
            c[i].mul(&c[i].add(&c[j]).add(&c[j]))
        })
        .collect();
    S::tighten_simplex(&mut out);
    SpiralPoint::from_unchecked(out)
}

/// One step on a common-denominator vector.
pub fn v_step_common(v: &ExactVector) -> ExactVector {
    let num = (0..3)
        .map(|i| {
            let j = (i + 1) % 3;
            let mut f = Integer::from(&v.num[j] << 1);
            f += &v.num[i];
            f * &v.num[i]
        })
        .collect();
    ExactVector { num, den: Integer::from(v.den.square_ref()) }
}

/// `t` steps of the spiral; exact iteration is limited to the default exact cap.
pub fn v_iterate<S: Scalar>(p: &SpiralPoint<S>, t: u64) -> Result<SpiralPoint<S>> {
    v_iterate_capped(p, t, DEFAULT_EXACT_CAP)
}

/// [`v_iterate`] with an explicit exact-step cap.
pub fn v_iterate_capped<S: Scalar>(p: &SpiralPoint<S>, t: u64, exact_cap: u64) -> Result<SpiralPoint<S>> {
    if let Some(mut v) = S::to_common(p.coords()) {
        if t > exact_cap {
            return Err(Error::ExactBlowup { steps: t, cap: exact_cap });
        }
        for _ in 0..t {
            v = v_step_common(&v);
        }
        return Ok(SpiralPoint::from_unchecked(S::from_common(&v).expect("exact backend")));
    }
    let mut q = p.clone();
    for _ in 0..t {
        q = v_step(&q);
    }
    Ok(q)
}

/// `R(x, y, z) = (y, z, x)`.
pub fn rotate<S: Scalar>(p: &SpiralPoint<S>) -> SpiralPoint<S> {
    let c = p.coords();
    SpiralPoint::from_unchecked(vec![c[1].clone(), c[2].clone(), c[0].clone()])
}

/// `phi(x, y, z) = xyz`.
pub fn phi<S: Scalar>(p: &SpiralPoint<S>) -> S {
    p.x().mul(p.y()).mul(p.z())
}

/// Sup-norm distance from the centre is at least `eps`.
pub fn in_m<S: Scalar>(p: &SpiralPoint<S>, eps: &ExactRational) -> Verdict {
    let prec = p.x().precision();
    let d = inf_dist(p.as_simplex(), SpiralPoint::<S>::center(prec).as_simplex()).expect("both three-dimensional");
    d.ge_q(eps)
}

/// Sup-norm distance to the corner is at most `eps`.
///
/// On the simplex the distance to the x corner is `max(1 - x, y, z) = y + z`,
/// which is the form evaluated.
pub fn close_corner<S: Scalar>(p: &SpiralPoint<S>, eps: &ExactRational, c: Corner) -> Verdict {
    let i = c.index();
    let dist = p.coords()[(i + 1) % 3].add(&p.coords()[(i + 2) % 3]);
    dist.le_q(eps)
}

/// Closeness to some corner.
pub fn close_any_corner<S: Scalar>(p: &SpiralPoint<S>, eps: &ExactRational) -> Verdict {
    Corner::ALL.iter().fold(Verdict::False, |v, &c| v.or(close_corner(p, eps, c)))
}

/// The coordinate opposite the side is at most `eps`.
pub fn close_side<S: Scalar>(p: &SpiralPoint<S>, eps: &ExactRational, s: Side) -> Verdict {
    p.coords()[s.opposite()].le_q(eps)
}

/// The six inequalities `c' <= 2c` and `(1-c)^2 <= 1-c'` for each coordinate.
pub fn easybounds_check(p: &SpiralPoint<ExactRational>) -> bool {
    let q = v_step(p);
    let one = ExactRational::one();
    let two = ExactRational::from_integer(2);
    (0..3).all(|i| {
        let (c, c1) = (p.coords()[i].clone(), q.coords()[i].clone());
        let gap = &one - &c;
        c1 <= &two * &c && &gap * &gap <= &one - &c1
    })
}

/// `phi(V(p)) <= (1 - eps^3) phi(p)`, exactly; `p` must lie in `M(eps)`.
pub fn decay_check(p: &SpiralPoint<ExactRational>, eps: &ExactRational) -> Result<bool> {
    if in_m(p, eps) != Verdict::True {
        return Err(Error::NotInM);
    }
    let bound = &(&ExactRational::one() - &eps.pow(3)) * &phi(p);
    Ok(phi(&v_step(p)) <= bound)
}

/// `phi(V(p)) <= (1 - eps^2/675)^3 phi(p)`, the constant inside the decay proof.
pub fn decay_check_strong(p: &SpiralPoint<ExactRational>, eps: &ExactRational) -> Result<bool> {
    if in_m(p, eps) != Verdict::True {
        return Err(Error::NotInM);
    }
    let k = &ExactRational::one() - &(&eps.pow(2) / &ExactRational::from_integer(675));
    Ok(phi(&v_step(p)) <= &k.pow(3) * &phi(p))
}

fn rotated(a: &SpiralPoint<ExactRational>, b: &SpiralPoint<ExactRational>) -> bool {
    &rotate(a) == b || &rotate(b) == a
}

/// Least `|i| <= window` such that `V^i(a)` and `b` are rotated.
///
/// Negative `i` is handled by iterating `b` forward: `V^-i(a)` and `b` are
/// rotated exactly when `a` and `V^i(b)` are, because `V` commutes with `R`.
pub fn rotation_distance(
    a: &SpiralPoint<ExactRational>,
    b: &SpiralPoint<ExactRational>,
    window: u64,
) -> Result<Option<u64>> {
    if window > DEFAULT_EXACT_CAP {
        return Err(Error::ExactBlowup { steps: window, cap: DEFAULT_EXACT_CAP });
    }
    let (mut fa, mut fb) = (a.clone(), b.clone());
    for i in 0..=window {
        if rotated(&fa, b) || rotated(a, &fb) {
            return Ok(Some(i));
        }
        fa = v_step(&fa);
        fb = v_step(&fb);
    }
    Ok(None)
}
