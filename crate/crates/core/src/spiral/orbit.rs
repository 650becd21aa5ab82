//! Certified scans along forward orbits of exact starting points.
//!
//! The orbit is followed with interval arithmetic. A step whose verdict is
//! undecided is settled exactly when it lies within the exact-step cap (this
//! resolves ties on a predicate boundary); otherwise the whole orbit is
//! recomputed at doubled precision, up to the policy cap.

use crate::arith::{EscalationPolicy, ExactRational, ExactVector, Interval, Scalar, Verdict};
use crate::error::{Error, Result};
use crate::qso::DEFAULT_EXACT_CAP;

use super::{close_any_corner, close_corner, close_side, in_m, phi, v_step, v_step_common, Corner, Side, SpiralPoint};

/// A predicate on spiral points, evaluable on either backend.
pub trait PointTest: Sync {
    /// Certified verdict at `p`.
    fn eval<S: Scalar>(&self, p: &SpiralPoint<S>) -> Verdict;
}

/// `eps`-closeness to one corner.
#[derive(Clone, Debug, PartialEq)]
pub struct NearCorner {
    /// Closeness radius.
    pub eps: ExactRational,
    /// Target corner.
    pub corner: Corner,
}

impl PointTest for NearCorner {
    fn eval<S: Scalar>(&self, p: &SpiralPoint<S>) -> Verdict {
        close_corner(p, &self.eps, self.corner)
    }
}

/// `eps`-closeness to some corner.
#[derive(Clone, Debug, PartialEq)]
pub struct NearAnyCorner {
    /// Closeness radius.
    pub eps: ExactRational,
}

impl PointTest for NearAnyCorner {
    fn eval<S: Scalar>(&self, p: &SpiralPoint<S>) -> Verdict {
        close_any_corner(p, &self.eps)
    }
}

/// `eps`-closeness to one side.
#[derive(Clone, Debug, PartialEq)]
pub struct NearSide {
    /// Closeness radius.
    pub eps: ExactRational,
    /// Target side.
    pub side: Side,
}

impl PointTest for NearSide {
    fn eval<S: Scalar>(&self, p: &SpiralPoint<S>) -> Verdict {
        close_side(p, &self.eps, self.side)
    }
}

/// `phi(p) < threshold`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiBelow {
    /// Strict upper bound for the potential.
    pub threshold: ExactRational,
}

impl PointTest for PhiBelow {
    fn eval<S: Scalar>(&self, p: &SpiralPoint<S>) -> Verdict {
        phi(p).lt_q(&self.threshold)
    }
}

/// A point known exactly or by a certified enclosure.
#[derive(Clone, Debug, PartialEq)]
pub enum Enclosure {
    /// Exact coordinates.
    Exact(SpiralPoint<ExactRational>),
    /// Interval coordinates.
    Interval(SpiralPoint<Interval>),
}

impl Enclosure {
    /// Evaluate a test on whichever representation is held.
    pub fn eval<T: PointTest>(&self, t: &T) -> Verdict {
        match self {
            Enclosure::Exact(p) => t.eval(p),
            Enclosure::Interval(p) => t.eval(p),
        }
    }

    /// Interval form.
    pub fn to_interval(&self, prec: u32) -> SpiralPoint<Interval> {
        match self {
            Enclosure::Exact(p) => p.to_interval(prec),
            Enclosure::Interval(p) => p.clone(),
        }
    }
}

/// A certified first hit.
#[derive(Clone, Debug, PartialEq)]
pub struct Hit {
    /// Step index of the hit.
    pub step: u64,
    /// The orbit point at that step.
    pub point: Enclosure,
    /// Precision in force when the hit was certified.
    pub precision: u32,
}

/// Verdicts over a window of steps.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanOutcome {
    /// One verdict per step, in order.
    pub verdicts: Vec<Verdict>,
    /// Highest precision used.
    pub max_precision: u32,
    /// Steps settled by exact arithmetic.
    pub exact_fallbacks: u64,
}

struct IntervalWalk {
    step: u64,
    point: SpiralPoint<Interval>,
}

impl IntervalWalk {
    fn new(base: &SpiralPoint<ExactRational>, prec: u32) -> Self {
        IntervalWalk { step: 0, point: base.to_interval(prec) }
    }

    fn advance_to(&mut self, step: u64) {
        debug_assert!(step >= self.step);
        while self.step < step {
            self.point = v_step(&self.point);
            self.step += 1;
        }
    }
}

struct ExactWalk {
    step: u64,
    v: ExactVector,
}

impl ExactWalk {
    fn new(base: &SpiralPoint<ExactRational>) -> Self {
        ExactWalk { step: 0, v: base.to_common() }
    }

    fn at(&mut self, base: &SpiralPoint<ExactRational>, step: u64) -> SpiralPoint<ExactRational> {
        if step < self.step {
            *self = ExactWalk::new(base);
        }
        while self.step < step {
            self.v = v_step_common(&self.v);
            self.step += 1;
        }
        SpiralPoint::from_unchecked(self.v.to_rationals())
    }
}

/// Certified evaluation of tests along the orbit of an exact point.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitScan {
    base: SpiralPoint<ExactRational>,
    policy: EscalationPolicy,
    exact_cap: u64,
}

impl OrbitScan {
    /// Scanner for the orbit of `base`.
    pub fn new(base: SpiralPoint<ExactRational>, policy: EscalationPolicy) -> Self {
        OrbitScan { base, policy, exact_cap: DEFAULT_EXACT_CAP }
    }

    /// Override the largest step settled exactly.
    pub fn with_exact_cap(mut self, cap: u64) -> Self {
        self.exact_cap = cap;
        self
    }

    /// The starting point.
    pub fn base(&self) -> &SpiralPoint<ExactRational> {
        &self.base
    }

    /// The precision policy.
    pub fn policy(&self) -> &EscalationPolicy {
        &self.policy
    }

    /// The least step in `from..=cap` at which `test` is certified true.
    ///
    /// Every earlier step in the range is certified false.
    pub fn first<T: PointTest>(&self, test: &T, from: u64, cap: u64) -> Result<Hit> {
        let mut prec = self.policy.start_bits;
        let mut walk = IntervalWalk::new(&self.base, prec);
        let mut exact: Option<ExactWalk> = None;
        let mut i = from;
        loop {
            if i > cap {
                return Err(Error::CapExceeded(cap));
            }
            walk.advance_to(i);
            match test.eval(&walk.point) {
                Verdict::True => {
                    return Ok(Hit { step: i, point: Enclosure::Interval(walk.point), precision: prec });
                }
                Verdict::False => i += 1,
                Verdict::Undecided if i <= self.exact_cap => {
                    let p = exact.get_or_insert_with(|| ExactWalk::new(&self.base)).at(&self.base, i);
                    if test.eval(&p) == Verdict::True {
                        return Ok(Hit { step: i, point: Enclosure::Exact(p), precision: prec });
                    }
                    i += 1;
                }
                Verdict::Undecided => match self.policy.next(prec) {
                    Some(p) => {
                        prec = p;
                        walk = IntervalWalk::new(&self.base, prec);
                    }
                    None => {
                        return Err(Error::UndecidedAtCap { bits: prec, context: format!("orbit step {i}") });
                    }
                },
            }
        }
    }

    /// Certified verdicts of `test` at every step of `lo..=hi`.
    ///
    /// Verdicts still undecided at the precision cap stay `Undecided`.
    pub fn scan<T: PointTest>(&self, test: &T, lo: u64, hi: u64) -> ScanOutcome {
        assert!(lo <= hi, "empty window");
        let len = (hi - lo + 1) as usize;
        let mut verdicts = vec![Verdict::Undecided; len];
        let mut prec = self.policy.start_bits;
        let mut exact_fallbacks = 0;
        let mut exact: Option<ExactWalk> = None;
        loop {
            let mut walk = IntervalWalk::new(&self.base, prec);
            for (k, v) in verdicts.iter_mut().enumerate() {
                if *v == Verdict::Undecided {
                    walk.advance_to(lo + k as u64);
                    *v = test.eval(&walk.point);
                }
            }
            for (k, v) in verdicts.iter_mut().enumerate() {
                let step = lo + k as u64;
                if *v == Verdict::Undecided && step <= self.exact_cap {
                    let p = exact.get_or_insert_with(|| ExactWalk::new(&self.base)).at(&self.base, step);
                    *v = test.eval(&p);
                    exact_fallbacks += 1;
                }
            }
            if verdicts.iter().all(|v| v.is_decided()) {
                break;
            }
            match self.policy.next(prec) {
                Some(p) => prec = p,
                None => break,
            }
        }
        ScanOutcome { verdicts, max_precision: prec, exact_fallbacks }
    }

    /// Enclosure of the orbit point at `step` with every coordinate accurate to
    /// at least `min_bits` leading bits.
    pub fn enclosure(&self, step: u64, min_bits: f64) -> Result<(SpiralPoint<Interval>, u32)> {
        for prec in self.policy.schedule() {
            let mut walk = IntervalWalk::new(&self.base, prec);
            walk.advance_to(step);
            if walk.point.coords().iter().all(|c| c.accuracy_bits() >= min_bits) {
                return Ok((walk.point, prec));
            }
        }
        Err(Error::UndecidedAtCap {
            bits: self.policy.cap_bits,
            context: format!("enclosure of orbit step {step} to {min_bits} bits"),
        })
    }

    /// Enclosures of every step in `lo..=hi` at one precision, each accurate to
    /// at least `min_bits` bits.
    pub fn enclosures(&self, lo: u64, hi: u64, min_bits: f64) -> Result<(Vec<SpiralPoint<Interval>>, u32)> {
        for prec in self.policy.schedule() {
            let mut walk = IntervalWalk::new(&self.base, prec);
            let mut out = Vec::with_capacity((hi - lo + 1) as usize);
            let mut ok = true;
            for step in lo..=hi {
                walk.advance_to(step);
                if walk.point.coords().iter().any(|c| c.accuracy_bits() < min_bits) {
                    ok = false;
                    break;
                }
                out.push(walk.point.clone());
            }
            if ok {
                return Ok((out, prec));
            }
        }
        Err(Error::UndecidedAtCap {
            bits: self.policy.cap_bits,
            context: format!("enclosures of orbit steps {lo}..={hi} to {min_bits} bits"),
        })
    }
}

/// Least `i >= 1` with `V^i(p)` certified `eps`-close to corner `c`.
pub fn hit_corner(
    p: &SpiralPoint<ExactRational>,
    eps: &ExactRational,
    c: Corner,
    cap: u64,
    policy: &EscalationPolicy,
) -> Result<u64> {
    if !p.is_interior() || p == &SpiralPoint::center(0) {
        return Err(Error::Precondition("hitting times need an interior point other than the centre".into()));
    }
    if cap < 1 {
        return Err(Error::Precondition("step cap must be at least 1".into()));
    }
    let test = NearCorner { eps: eps.clone(), corner: c };
    Ok(OrbitScan::new(p.clone(), *policy).first(&test, 1, cap)?.step)
}

/// Least `f >= 0` with `V^f(p)` certified `eps`-close to a corner, and that corner.
pub fn first_vertex_hit(
    p: &SpiralPoint<ExactRational>,
    eps: &ExactRational,
    cap: u64,
    policy: &EscalationPolicy,
) -> Result<(u64, Corner)> {
    if in_m(p, eps) != Verdict::True {
        return Err(Error::NotInM);
    }
    let hit = OrbitScan::new(p.clone(), *policy).first(&NearAnyCorner { eps: eps.clone() }, 0, cap)?;
    let corner = Corner::ALL
        .into_iter()
        .find(|&c| hit.point.eval(&NearCorner { eps: eps.clone(), corner: c }) == Verdict::True)
        .expect("a certified hit names a corner");
    Ok((hit.step, corner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::make_rational;

    fn q(n: i64, d: i64) -> ExactRational {
        make_rational(n, d).unwrap()
    }

    fn p(v: [(i64, i64); 3]) -> SpiralPoint<ExactRational> {
        SpiralPoint::from_fracs(v).unwrap()
    }

    #[test]
    fn hitting_time_examples() {
        let pol = EscalationPolicy::default();
        assert_eq!(hit_corner(&p([(4, 5), (3, 20), (1, 20)]), &q(1, 5), Corner::X, 100, &pol).unwrap(), 1);
        assert_eq!(hit_corner(&p([(1, 20), (1, 20), (9, 10)]), &q(1, 10), Corner::X, 100, &pol).unwrap(), 19);
        assert!(matches!(
            hit_corner(&SpiralPoint::center(0), &q(1, 10), Corner::X, 100, &pol),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            hit_corner(&p([(1, 20), (1, 20), (9, 10)]), &q(1, 10), Corner::X, 5, &pol),
            Err(Error::CapExceeded(5))
        ));
    }

    #[test]
    fn first_vertex_hit_examples() {
        let pol = EscalationPolicy::default();
        let x = SpiralPoint::corner(Corner::X, 0);
        assert_eq!(first_vertex_hit(&x, &q(1, 10), 10, &pol).unwrap(), (0, Corner::X));
        assert_eq!(first_vertex_hit(&p([(9, 10), (1, 20), (1, 20)]), &q(1, 5), 10, &pol).unwrap(), (0, Corner::X));
        assert_eq!(first_vertex_hit(&p([(1, 2), (1, 4), (1, 4)]), &q(1, 10), 100, &pol).unwrap(), (14, Corner::X));
    }

    #[test]
    fn boundary_ties_are_settled_exactly() {
        // x' = x(x + 2y) = x when y = eps/2 and x = 1 - eps: the first step lands on the boundary.
        let c = p([(19, 20), (1, 40), (1, 40)]);
        let pol = EscalationPolicy::new(64, 256);
        assert_eq!(hit_corner(&c, &q(1, 20), Corner::X, 10, &pol).unwrap(), 1);
        let far = OrbitScan::new(c.clone(), pol).with_exact_cap(0);
        assert!(matches!(
            far.first(&NearCorner { eps: q(1, 20), corner: Corner::X }, 1, 10),
            Err(Error::UndecidedAtCap { .. })
        ));
    }

    #[test]
    fn scans_match_exact_iteration() {
        let a = p([(2, 5), (7, 20), (1, 4)]);
        let test = NearAnyCorner { eps: q(1, 5) };
        let scan = OrbitScan::new(a.clone(), EscalationPolicy::default()).scan(&test, 0, 16);
        let mut e = a;
        for v in &scan.verdicts {
            assert_eq!(*v, test.eval(&e));
            e = v_step(&e);
        }
    }
}
