//! The Volterra quadratic stochastic operator of a tournament.
//!
//! For candidate `i` beaten by the set `A_i` and beating the set `B_i`,
//! `V(x)_i = x_i (1 - sum_{A_i} x_j + sum_{B_i} x_j)`. On the simplex this
//! equals `x_i (x_i + 2 sum_{B_i} x_j)`, which has no cancellation and is the
//! form evaluated here.

use rug::Integer;
use serde::Serialize;

use crate::arith::{ExactRational, ExactVector, Interval, Scalar, SimplexPoint};
use crate::error::{Error, Result};
use crate::tournament::{Tournament, TripartitePartition};

/// Default largest step count for exact iteration.
pub const DEFAULT_EXACT_CAP: u64 = 24;

/// Beater and beaten sets of every candidate, 0-based internally.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VolterraOperator {
    n: usize,
    beaters: Vec<Vec<usize>>,
    beaten: Vec<Vec<usize>>,
}

/// The operator `V_T`.
pub fn operator_of(t: &Tournament) -> VolterraOperator {
    let n = t.n();
    let mut beaters = vec![Vec::new(); n];
    let mut beaten = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && t.beats0(i, j) {
                beaten[i].push(j);
                beaters[j].push(i);
            }
        }
    }
    VolterraOperator { n, beaters, beaten }
}

impl VolterraOperator {
    /// Number of candidates.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `A_i`: candidates beating `i` (1-based).
    pub fn beaters(&self, i: usize) -> Vec<usize> {
        self.beaters[i - 1].iter().map(|j| j + 1).collect()
    }

    /// `B_i`: candidates beaten by `i` (1-based).
    pub fn beaten(&self, i: usize) -> Vec<usize> {
        self.beaten[i - 1].iter().map(|j| j + 1).collect()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found });
        }
        Ok(())
    }

    /// One application of the operator.
    pub fn apply<S: Scalar>(&self, x: &SimplexPoint<S>) -> Result<SimplexPoint<S>> {
        self.check_dim(x.dim())?;
        let c = x.coords();
        let mut out: Vec<S> = (0..self.n)
            .map(|i| {
                let mut f = c[i].clone();
                for &j in &self.beaten[i] {
                    f = f.add(&c[j]).add(&c[j]);
                }
                c[i].mul(&f)
            })
            .collect();
        S::tighten_simplex(&mut out);
        Ok(SimplexPoint::from_coords_unchecked(out))
    }

    /// One application using the defining formula `x_i (1 - sum_A + sum_B)`.
    pub fn apply_definition<S: Scalar>(&self, x: &SimplexPoint<S>) -> Result<SimplexPoint<S>> {
        self.check_dim(x.dim())?;
        let c = x.coords();
        let prec = c.iter().map(Scalar::precision).max().unwrap_or(0);
        let one = S::from_i64(1, prec);
        let out = (0..self.n)
            .map(|i| {
                let mut f = one.clone();
                for &j in &self.beaters[i] {
                    f = f.sub(&c[j]);
                }
                for &j in &self.beaten[i] {
                    f = f.add(&c[j]);
                }
                c[i].mul(&f)
            })
            .collect();
        Ok(SimplexPoint::from_coords_unchecked(out))
    }

    /// One application on a common-denominator vector; the denominator squares.
    pub fn apply_common(&self, v: &ExactVector) -> Result<ExactVector> {
        self.check_dim(v.dim())?;
        let num = (0..self.n)
            .map(|i| {
                let mut s = Integer::new();
                for &j in &self.beaten[i] {
                    s += &v.num[j];
                }
                s <<= 1;
                s += &v.num[i];
                s * &v.num[i]
            })
            .collect();
        Ok(ExactVector { num, den: Integer::from(v.den.square_ref()) })
    }

    /// `t` applications; the exact backend is limited to [`DEFAULT_EXACT_CAP`] steps.
    pub fn iterate<S: Scalar>(&self, x: &SimplexPoint<S>, t: u64) -> Result<SimplexPoint<S>> {
        self.iterate_capped(x, t, DEFAULT_EXACT_CAP)
    }

    /// [`VolterraOperator::iterate`] with an explicit exact-step cap.
    pub fn iterate_capped<S: Scalar>(&self, x: &SimplexPoint<S>, t: u64, exact_cap: u64) -> Result<SimplexPoint<S>> {
        self.check_dim(x.dim())?;
        if let Some(mut v) = S::to_common(x.coords()) {
            if t > exact_cap {
                return Err(Error::ExactBlowup { steps: t, cap: exact_cap });
            }
            for _ in 0..t {
                v = self.apply_common(&v)?;
            }
            let coords = S::from_common(&v).expect("exact backend");
            return Ok(SimplexPoint::from_coords_unchecked(coords));
        }
        let mut y = x.clone();
        for _ in 0..t {
            y = self.apply(&y)?;
        }
        Ok(y)
    }

    /// The whole trajectory `x, V(x), ..., V^t(x)`.
    pub fn trajectory<S: Scalar>(&self, x: &SimplexPoint<S>, t: u64, exact_cap: u64) -> Result<Vec<SimplexPoint<S>>> {
        self.check_dim(x.dim())?;
        if S::to_common(x.coords()).is_some() && t > exact_cap {
            return Err(Error::ExactBlowup { steps: t, cap: exact_cap });
        }
        let mut out = vec![x.clone()];
        if let Some(mut v) = S::to_common(x.coords()) {
            for _ in 0..t {
                v = self.apply_common(&v)?;
                out.push(SimplexPoint::from_coords_unchecked(S::from_common(&v).expect("exact backend")));
            }
            return Ok(out);
        }
        for _ in 0..t {
            let next = self.apply(out.last().expect("nonempty"))?;
            out.push(next);
        }
        Ok(out)
    }
}

/// Root label distribution of a height-`d` random tree: `V_T^d(uniform)`.
pub fn root_distribution(t: &Tournament, d: u64) -> Result<SimplexPoint<ExactRational>> {
    operator_of(t).iterate(&SimplexPoint::uniform(t.n(), 0), d)
}

/// All root distributions for heights `0..=d`, in common-denominator form.
pub fn root_distributions_common(t: &Tournament, d: u64, exact_cap: u64) -> Result<Vec<ExactVector>> {
    if d > exact_cap {
        return Err(Error::ExactBlowup { steps: d, cap: exact_cap });
    }
    let op = operator_of(t);
    let mut v = ExactVector { num: vec![Integer::from(1); t.n()], den: Integer::from(t.n()) };
    let mut out = Vec::with_capacity(d as usize + 1);
    out.push(v.clone());
    for _ in 0..d {
        v = op.apply_common(&v)?;
        out.push(v.clone());
    }
    Ok(out)
}

/// Certified enclosure of `V_T^d(uniform)` at `prec` bits.
pub fn root_distribution_interval(t: &Tournament, d: u64, prec: u32) -> Result<SimplexPoint<Interval>> {
    operator_of(t).iterate(&SimplexPoint::<Interval>::uniform(t.n(), prec), d)
}

/// Masses of the three parts.
pub fn aggregate<S: Scalar>(x: &SimplexPoint<S>, p: &TripartitePartition) -> Result<SimplexPoint<S>> {
    if p.n() != x.dim() {
        return Err(Error::BadPartition(format!("partition covers {} of {} coordinates", p.n(), x.dim())));
    }
    let c = x.coords();
    let sums: Vec<S> = (0..3)
        .map(|k| {
            let part = p.part(k);
            part[1..].iter().fold(c[part[0] - 1].clone(), |s, &v| s.add(&c[v - 1]))
        })
        .collect();
    Ok(SimplexPoint::from_coords_unchecked(sums))
}

/// Masses of the three parts of a common-denominator vector.
pub fn aggregate_common(v: &ExactVector, p: &TripartitePartition) -> Result<ExactVector> {
    if p.n() != v.dim() {
        return Err(Error::BadPartition(format!("partition covers {} of {} coordinates", p.n(), v.dim())));
    }
    let num = (0..3)
        .map(|k| p.part(k).iter().fold(Integer::new(), |s, &i| s + &v.num[i - 1]))
        .collect();
    Ok(ExactVector { num, den: v.den.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{make_rational, make_simplex};
    use crate::tournament::build_tripartite;

    fn q(n: i64, d: i64) -> ExactRational {
        make_rational(n, d).unwrap()
    }

    fn pt(v: &[(i64, i64)]) -> SimplexPoint<ExactRational> {
        make_simplex(v.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
    }

    #[test]
    fn operator_sets() {
        let op = operator_of(&Tournament::cycle3());
        assert_eq!((op.beaters(1), op.beaten(1)), (vec![2], vec![3]));
        assert_eq!((op.beaters(2), op.beaten(2)), (vec![3], vec![1]));
        let op = operator_of(&Tournament::transitive(3));
        assert_eq!((op.beaters(1), op.beaten(1)), (vec![], vec![2, 3]));
        let op = operator_of(&Tournament::transitive(1));
        assert!(op.beaters(1).is_empty() && op.beaten(1).is_empty());
    }

    #[test]
    fn apply_examples() {
        let op = operator_of(&Tournament::cycle3());
        let c = SimplexPoint::<ExactRational>::uniform(3, 0);
        assert_eq!(op.apply(&c).unwrap(), c);
        let v = SimplexPoint::<ExactRational>::vertex(3, 1, 0);
        assert_eq!(op.apply(&v).unwrap(), v);
        let a = pt(&[(1, 2), (1, 4), (1, 4)]);
        assert_eq!(op.apply(&a).unwrap(), pt(&[(1, 2), (5, 16), (3, 16)]));
        assert_eq!(op.apply_definition(&a).unwrap(), op.apply(&a).unwrap());
        assert_eq!(op.iterate(&a, 2).unwrap(), pt(&[(7, 16), (105, 256), (39, 256)]));
        assert_eq!(op.iterate(&a, 0).unwrap(), a);
        assert!(matches!(op.iterate(&a, 25), Err(Error::ExactBlowup { .. })));
    }

    #[test]
    fn root_distribution_examples() {
        let two = Tournament::build(2, &[(1, 2)]).unwrap();
        assert_eq!(root_distribution(&two, 0).unwrap(), pt(&[(1, 2), (1, 2)]));
        assert_eq!(root_distribution(&two, 1).unwrap(), pt(&[(3, 4), (1, 4)]));
        assert_eq!(root_distribution(&two, 3).unwrap(), pt(&[(255, 256), (1, 256)]));
        let c = Tournament::cycle3();
        assert_eq!(root_distribution(&c, 7).unwrap(), SimplexPoint::uniform(3, 0));
        let i = root_distribution_interval(&two, 3, 64).unwrap();
        assert!(i.coord(0).contains_rational(&q(255, 256)));
    }

    #[test]
    fn aggregation_examples() {
        let (t, p) = build_tripartite([1, 1, 2], &[(3, 4)]).unwrap();
        let u = SimplexPoint::<ExactRational>::uniform(4, 0);
        assert_eq!(aggregate(&u, &p).unwrap(), pt(&[(1, 4), (1, 4), (1, 2)]));
        let m = SimplexPoint::<ExactRational>::vertex(4, 0, 0);
        assert_eq!(aggregate(&m, &p).unwrap(), pt(&[(1, 1), (0, 1), (0, 1)]));
        let next = operator_of(&t).apply(&u).unwrap();
        assert_eq!(aggregate(&next, &p).unwrap(), pt(&[(3, 16), (5, 16), (1, 2)]));
        let common = root_distributions_common(&t, 1, 24).unwrap();
        assert_eq!(aggregate_common(&common[1], &p).unwrap().to_point(), pt(&[(3, 16), (5, 16), (1, 2)]));
    }
}
