//! Six orbit points whose iterates take turns near one corner, their coverage
//! certificates, and their realisation as tripartite tournaments.
//!
//! A seed `a0 = (eps/2, eps/2, 1 - eps)` and its two rotations are advanced to
//! their first visit to the target corner, giving `a, b, c`. Each is then
//! advanced once more around the spiral (by `D2` steps plus the next hitting
//! time) to give `A, B, C`. Points are kept as an exact seed plus a step count,
//! since their exact coordinates have denominators of size `den^(2^steps)`.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::Integer;
use serde::{Serialize, Serializer};

use crate::arith::{floor_log2, pow2_rational, EscalationPolicy, ExactRational, Interval, Scalar, Verdict};
use crate::error::{Error, Result};
use crate::qso::DEFAULT_EXACT_CAP;
use crate::spiral::bounds::{skipcorner_eps_capped, Relation, DEFAULT_BIT_CAP};
use crate::spiral::{
    epsclose_d_bound, rotate, skipcorner2_eps, v_iterate_capped, BoundReport, Corner, NearAnyCorner, NearCorner,
    OrbitScan, PhiBelow, PointTest, SpiralPoint,
};
use crate::tournament::{build_tripartite_transitive, Tournament, TripartitePartition};

/// Names of the six points, in order.
pub const POINT_NAMES: [&str; 6] = ["a", "b", "c", "A", "B", "C"];

/// `V^steps(base)` for an exact `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitPoint {
    /// Exact starting point.
    pub base: SpiralPoint<ExactRational>,
    /// Number of applications of `V`.
    pub steps: u64,
}

impl Serialize for OrbitPoint {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("OrbitPoint", 2)?;
        let base: Vec<String> = self.base.coords().iter().map(|c| c.to_string()).collect();
        st.serialize_field("base", &base)?;
        st.serialize_field("steps", &self.steps)?;
        st.end()
    }
}

impl OrbitPoint {
    /// `V^steps(base)`.
    pub fn new(base: SpiralPoint<ExactRational>, steps: u64) -> Self {
        OrbitPoint { base, steps }
    }

    /// `base` itself.
    pub fn seed(base: SpiralPoint<ExactRational>) -> Self {
        OrbitPoint { base, steps: 0 }
    }

    /// `V^k` of this point.
    pub fn advance(&self, k: u64) -> Self {
        OrbitPoint { base: self.base.clone(), steps: self.steps + k }
    }

    /// `R` of this point; `R` commutes with `V`, so only the seed rotates.
    pub fn rotate(&self) -> Self {
        OrbitPoint { base: rotate(&self.base), steps: self.steps }
    }

    /// Exact coordinates, when `steps <= exact_cap`.
    pub fn exact(&self, exact_cap: u64) -> Result<SpiralPoint<ExactRational>> {
        v_iterate_capped(&self.base, self.steps, exact_cap)
    }

    /// Certified scanner over the orbit of the seed.
    pub fn scanner(&self, policy: &EscalationPolicy) -> OrbitScan {
        OrbitScan::new(self.base.clone(), *policy)
    }

    /// Enclosure with every coordinate accurate to `min_bits` bits.
    pub fn enclosure(&self, policy: &EscalationPolicy, min_bits: f64) -> Result<(SpiralPoint<Interval>, u32)> {
        self.scanner(policy).enclosure(self.steps, min_bits)
    }

    /// Certified verdict of a test at this point.
    pub fn eval<T: PointTest>(&self, test: &T, policy: &EscalationPolicy) -> Verdict {
        self.scanner(policy).scan(test, self.steps, self.steps).verdicts[0]
    }

    /// Least `k` in `min_k..=cap` with `test` certified at `V^k` of this point.
    pub fn first<T: PointTest>(&self, test: &T, min_k: u64, cap: u64, policy: &EscalationPolicy) -> Result<u64> {
        match self.scanner(policy).first(test, self.steps + min_k, self.steps + cap) {
            Ok(hit) => Ok(hit.step - self.steps),
            Err(Error::CapExceeded(_)) => Err(Error::CapExceeded(cap)),
            Err(e) => Err(e),
        }
    }

    /// Floating-point coordinates from a 64-bit-accurate enclosure.
    pub fn approx(&self, policy: &EscalationPolicy) -> Result<[f64; 3]> {
        let (e, _) = self.enclosure(policy, 64.0)?;
        Ok([0, 1, 2].map(|i| Scalar::to_f64(&e.coords()[i])))
    }
}

/// `(eps/2, eps/2, 1 - eps)`.
pub fn seed_point(eps: &ExactRational) -> Result<SpiralPoint<ExactRational>> {
    let half = eps / &ExactRational::from_integer(2);
    SpiralPoint::from_coords([half.clone(), half, &ExactRational::one() - eps])
}

/// Three seed points and the hitting times that produced them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedTriple {
    /// Closeness radius.
    #[serde(serialize_with = "ser_q")]
    pub eps: ExactRational,
    /// Target corner.
    pub corner: Corner,
    /// `(eps/2, eps/2, 1 - eps)`.
    pub a0: OrbitPoint,
    /// `a, b, c`, on the orbits of `a0`, `R(a0)` and `R^2(a0)`.
    pub points: [OrbitPoint; 3],
    /// Steps from each seed rotation to its point.
    pub hits: [u64; 3],
}

fn ser_q<Z: Serializer>(v: &ExactRational, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
    s.serialize_str(&v.to_string())
}

fn check_seed_eps(eps: &ExactRational) -> Result<()> {
    if eps.sign() != Ordering::Greater || eps >= &crate::arith::make_rational(1, 2)? {
        return Err(Error::Precondition(format!("eps = {eps} must lie in (0, 1/2)")));
    }
    Ok(())
}

/// `a, b, c` near the x corner: each rotation of the seed advanced to its first
/// certified visit.
pub fn seed_triple(eps: &ExactRational, cap: u64, policy: &EscalationPolicy) -> Result<SeedTriple> {
    seed_triple_toward(eps, Corner::X, cap, policy)
}

/// `a, b, c` near `corner`.
///
/// `a` is `a0` itself if it is already `eps`-close to `corner`, otherwise its
/// first visit; `b` and `c` are the first visits (after at least one step) of
/// `R(a0)` and `R^2(a0)`.
pub fn seed_triple_toward(
    eps: &ExactRational,
    corner: Corner,
    cap: u64,
    policy: &EscalationPolicy,
) -> Result<SeedTriple> {
    check_seed_eps(eps)?;
    let a0 = OrbitPoint::seed(seed_point(eps)?);
    let test = NearCorner { eps: eps.clone(), corner };
    let seeds = [a0.clone(), a0.rotate(), a0.rotate().rotate()];
    let mut hits = [0u64; 3];
    for (k, s) in seeds.iter().enumerate() {
        hits[k] = s.first(&test, u64::from(k > 0), cap, policy)?;
    }
    let points = [0, 1, 2].map(|k| seeds[k].advance(hits[k]));
    Ok(SeedTriple { eps: eps.clone(), corner, a0, points, hits })
}

/// Largest first-vertex hitting time of the points at radius `eps1`.
pub fn empirical_d2(points: &[OrbitPoint], eps1: &ExactRational, cap: u64, policy: &EscalationPolicy) -> Result<u64> {
    let test = NearAnyCorner { eps: eps1.clone() };
    let mut d2 = 0;
    for p in points {
        d2 = d2.max(p.first(&test, 0, cap, policy)?);
    }
    Ok(d2)
}

/// `A, B, C` and the steps added to `a, b, c`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplifiedTriple {
    /// The amplified points.
    pub points: [OrbitPoint; 3],
    /// `D2 + d(V^D2(p))` for each source point.
    pub extra: [u64; 3],
}

/// `P = V^(D2 + d(V^D2(p)))(p)` for each `p`, with `d` the hitting time of
/// `corner` at radius `eps`.
pub fn amplify_triple(
    points: &[OrbitPoint; 3],
    d2: u64,
    eps: &ExactRational,
    corner: Corner,
    cap: u64,
    policy: &EscalationPolicy,
) -> Result<AmplifiedTriple> {
    let test = NearCorner { eps: eps.clone(), corner };
    let mut extra = [0u64; 3];
    for (k, p) in points.iter().enumerate() {
        extra[k] = d2 + p.advance(d2).first(&test, 1, cap, policy)?;
    }
    let amplified = [0, 1, 2].map(|k| points[k].advance(extra[k]));
    Ok(AmplifiedTriple { points: amplified, extra })
}

/// An integer entry of the parameter chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainInteger {
    /// The value.
    #[serde(serialize_with = "ser_int")]
    pub value: Integer,
    /// How the value relates to the quantity it stands for.
    pub relation: Relation,
    /// What produced the value.
    pub source: String,
}

fn ser_int<Z: Serializer>(v: &Integer, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
    s.serialize_str(&v.to_string())
}

/// The constants of the six-point construction, evaluated symbolically.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParameterChain {
    /// Closeness radius.
    #[serde(serialize_with = "ser_q")]
    pub eps: ExactRational,
    /// `D1 = max` of the seed hitting times.
    pub d1: ChainInteger,
    /// `eps1` from the skipcorner2 bound at `(eps, D1)`.
    pub eps1: BoundReport,
    /// `D2` from the epsclose bound at `eps1`.
    pub d2: BoundReport,
    /// `D3 = D2 + ` three hitting times, each at least one.
    pub d3: ChainInteger,
    /// `eps2` from the skipcorner bound at `(eps1, D3)`.
    pub eps2: BoundReport,
    /// The condition defining `d0`.
    pub d0_condition: String,
}

/// The chain `D1 -> eps1 -> D2 -> D3 -> eps2 -> d0` for `0 < eps < 1/10`.
///
/// `D3` depends on hitting times at depth `D2`, far beyond reach, so it is
/// reported by its lower bound `D2 + 3`; since the skipcorner bound decreases
/// in `D`, `eps2` is then an upper bound.
pub fn parameter_chain(eps: &ExactRational, cap: u64, policy: &EscalationPolicy) -> Result<ParameterChain> {
    if eps.sign() != Ordering::Greater || eps >= &crate::arith::make_rational(1, 10)? {
        return Err(Error::Precondition(format!("eps = {eps} must lie in (0, 1/10)")));
    }
    let seeds = seed_triple(eps, cap, policy)?;
    let d1 = *seeds.hits.iter().max().expect("three hits");
    let eps1 = skipcorner2_eps(eps, d1)?;
    let e1 = eps1.result.exact().expect("skipcorner2 is exact").clone();
    let d2 = epsclose_d_bound(&e1)?;
    let d3 = Integer::from(&d2.d + 3);
    let mut eps2 = skipcorner_eps_capped(&e1, &d3, DEFAULT_BIT_CAP)?;
    eps2.relation = Relation::UpperBound;
    Ok(ParameterChain {
        eps: eps.clone(),
        d1: ChainInteger {
            value: Integer::from(d1),
            relation: Relation::Equal,
            source: format!("max of seed hitting times {:?}", seeds.hits),
        },
        eps1,
        d2,
        d3: ChainInteger {
            value: d3,
            relation: Relation::LowerBound,
            source: "D2 plus three hitting times of at least one step each".into(),
        },
        eps2,
        d0_condition: "phi(V^d0(a)) < eps2^3".into(),
    })
}

/// A `phi` threshold, given directly or as a power of two.
#[derive(Clone, Debug, PartialEq)]
pub enum PhiThreshold {
    /// The threshold itself.
    Value(ExactRational),
    /// `2^k`.
    Log2(i64),
}

impl PhiThreshold {
    /// The threshold as a rational.
    pub fn value(&self) -> ExactRational {
        match self {
            PhiThreshold::Value(q) => q.clone(),
            PhiThreshold::Log2(k) => pow2_rational(*k),
        }
    }
}

/// `floor(log2((eps/10)^3))`: the threshold used in place of `eps2^3`, with
/// `eps/10` standing in for `eps2`.
pub fn empirical_d0_log2(eps: &ExactRational) -> Result<i64> {
    floor_log2(&(eps / &ExactRational::from_integer(10)).pow(3))
}

/// Least `d >= 1` with `phi(V^d(p))` certified below the threshold.
pub fn d0_search(p: &OrbitPoint, threshold: &PhiThreshold, cap: u64, policy: &EscalationPolicy) -> Result<u64> {
    if !p.base.is_interior() || p.base == SpiralPoint::center(0) {
        return Err(Error::Precondition("d0 search needs an interior point other than the centre".into()));
    }
    p.first(&PhiBelow { threshold: threshold.value() }, 1, cap, policy)
}

/// Outcome at one `d` of a coverage scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverageVerdict {
    /// Some point is certified close.
    Covered,
    /// Every point is certified not close.
    Uncovered,
    /// No point certified close and at least one undecided.
    Undecided,
}

/// One `d` of a coverage scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverageEntry {
    /// Iterate index.
    pub d: u64,
    /// Index of the first covering point.
    pub witness: Option<usize>,
    /// Outcome.
    pub verdict: CoverageVerdict,
}

/// Precision used per point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrecisionStats {
    /// Highest precision reached for each point.
    pub max_bits: Vec<u32>,
    /// Verdicts settled exactly for each point.
    pub exact_fallbacks: Vec<u64>,
}

/// A certified coverage record for six points over a window of iterates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SixPointCertificate {
    /// Closeness radius.
    #[serde(serialize_with = "ser_q")]
    pub eps: ExactRational,
    /// Target corner.
    pub corner: Corner,
    /// The six points `a, b, c, A, B, C`.
    pub points: Vec<OrbitPoint>,
    /// Certified closeness of each point itself.
    pub points_close: Vec<Verdict>,
    /// First scanned iterate.
    pub d_lo: u64,
    /// Last scanned iterate.
    pub d_hi: u64,
    /// The `d0` the window starts from.
    pub d0_used: u64,
    /// One entry per `d` in the window.
    pub coverage: Vec<CoverageEntry>,
    /// Iterates not certified covered.
    pub violations: Vec<u64>,
    /// Covered iterates over window length.
    pub covered: u64,
    /// Precision statistics.
    pub precision: PrecisionStats,
}

impl SixPointCertificate {
    /// Covered fraction of the window.
    pub fn coverage_fraction(&self) -> f64 {
        self.covered as f64 / self.coverage.len() as f64
    }

    /// Whether every verdict in the record is decided.
    pub fn fully_certified(&self) -> bool {
        self.coverage.iter().all(|e| e.verdict != CoverageVerdict::Undecided)
            && self.points_close.iter().all(|v| v.is_decided())
    }
}

/// For each `d` in `d_lo..=d_hi`, which of `V^d(points)` is certified
/// `eps`-close to `corner`.
pub fn coverage_scan(
    points: &[OrbitPoint],
    eps: &ExactRational,
    corner: Corner,
    d_lo: u64,
    d_hi: u64,
    d0_used: u64,
    policy: &EscalationPolicy,
) -> Result<SixPointCertificate> {
    if d_lo > d_hi {
        return Err(Error::Precondition(format!("empty window {d_lo}..={d_hi}")));
    }
    let test = NearCorner { eps: eps.clone(), corner };
    let scans: Vec<_> = points
        .par_iter()
        .map(|p| {
            let scan = p.scanner(policy);
            let own = scan.scan(&test, p.steps, p.steps);
            let window = scan.scan(&test, p.steps + d_lo, p.steps + d_hi);
            (own, window)
        })
        .collect();
    let mut coverage = Vec::with_capacity((d_hi - d_lo + 1) as usize);
    let mut violations = Vec::new();
    let mut covered = 0;
    for (k, d) in (d_lo..=d_hi).enumerate() {
        let verdicts = scans.iter().map(|(_, w)| w.verdicts[k]);
        let witness = verdicts.clone().position(|v| v == Verdict::True);
        let verdict = match witness {
            Some(_) => CoverageVerdict::Covered,
            None if verdicts.clone().all(|v| v == Verdict::False) => CoverageVerdict::Uncovered,
            None => CoverageVerdict::Undecided,
        };
        if verdict == CoverageVerdict::Covered {
            covered += 1;
        } else {
            violations.push(d);
        }
        coverage.push(CoverageEntry { d, witness, verdict });
    }
    Ok(SixPointCertificate {
        eps: eps.clone(),
        corner,
        points: points.to_vec(),
        points_close: scans.iter().map(|(own, _)| own.verdicts[0]).collect(),
        d_lo,
        d_hi,
        d0_used,
        coverage,
        violations,
        covered,
        precision: PrecisionStats {
            max_bits: scans.iter().map(|(o, w)| o.max_precision.max(w.max_precision)).collect(),
            exact_fallbacks: scans.iter().map(|(o, w)| o.exact_fallbacks + w.exact_fallbacks).collect(),
        },
    })
}

/// Settings of the full six-point pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    /// Closeness radius.
    pub eps: ExactRational,
    /// Radius for the `D2` hitting times, `eps / 10` by default.
    pub eps1: ExactRational,
    /// Target corner.
    pub corner: Corner,
    /// Window length beyond `d0`, so the window has `window + 1` entries.
    pub window: u64,
    /// Explicit `d0`; searched from the `phi` threshold when absent.
    pub d0: Option<u64>,
    /// Step cap for every hitting-time search.
    pub cap: u64,
    /// Precision policy.
    pub policy: EscalationPolicy,
}

impl PipelineConfig {
    /// Defaults for radius `eps`: x corner, window 100, cap 10^4.
    pub fn new(eps: ExactRational) -> Self {
        let eps1 = &eps / &ExactRational::from_integer(10);
        PipelineConfig {
            eps,
            eps1,
            corner: Corner::X,
            window: 100,
            d0: None,
            cap: 10_000,
            policy: EscalationPolicy::default(),
        }
    }
}

/// The six points with the data that produced them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SixPoints {
    /// `a, b, c` and their hitting times.
    pub seeds: SeedTriple,
    /// The `D2` used for amplification.
    pub d2: u64,
    /// `A, B, C` and their extra steps.
    pub amplified: AmplifiedTriple,
}

impl SixPoints {
    /// `a, b, c, A, B, C`.
    pub fn all(&self) -> Vec<OrbitPoint> {
        self.seeds.points.iter().chain(self.amplified.points.iter()).cloned().collect()
    }
}

/// Seed, then amplify.
pub fn six_points(cfg: &PipelineConfig) -> Result<SixPoints> {
    let seeds = seed_triple_toward(&cfg.eps, cfg.corner, cfg.cap, &cfg.policy)?;
    let d2 = empirical_d2(&seeds.points, &cfg.eps1, cfg.cap, &cfg.policy)?;
    let amplified = amplify_triple(&seeds.points, d2, &cfg.eps, cfg.corner, cfg.cap, &cfg.policy)?;
    Ok(SixPoints { seeds, d2, amplified })
}

/// `d0` from the config, or searched on `a` with threshold `(eps1)^3`.
pub fn pipeline_d0(cfg: &PipelineConfig, six: &SixPoints) -> Result<u64> {
    match cfg.d0 {
        Some(d) => Ok(d),
        None => {
            let k = floor_log2(&cfg.eps1.pow(3))?;
            d0_search(&six.seeds.points[0], &PhiThreshold::Log2(k), cfg.cap, &cfg.policy)
        }
    }
}

/// The whole pipeline: six points, `d0`, and the coverage scan over
/// `d0..=d0 + window`.
pub fn certify(cfg: &PipelineConfig) -> Result<(SixPoints, SixPointCertificate)> {
    let six = six_points(cfg)?;
    let d0 = pipeline_d0(cfg, &six)?;
    let cert = coverage_scan(&six.all(), &cfg.eps, cfg.corner, d0, d0 + cfg.window, d0, &cfg.policy)?;
    Ok((six, cert))
}

/// Rounding rule for grid points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Apportion {
    /// Largest remainder; a part rounding to zero is an error.
    Strict,
    /// Largest remainder after raising every floor to at least one.
    FloorOne,
}

fn distribute(mut fl: [i64; 3], order: &[usize], q: i64) -> [usize; 3] {
    let mut k = q - fl.iter().sum::<i64>();
    let mut it = order.iter().cycle();
    while k > 0 {
        fl[*it.next().expect("nonempty")] += 1;
        k -= 1;
    }
    let mut rev = order.iter().rev().cycle();
    while k < 0 {
        let i = *rev.next().expect("nonempty");
        if fl[i] > 1 {
            fl[i] -= 1;
            k += 1;
        }
    }
    fl.map(|v| v as usize)
}

fn finish(sizes: [usize; 3], mode: Apportion) -> Result<[usize; 3]> {
    if mode == Apportion::Strict {
        if let Some(k) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyPart(k + 1));
        }
    }
    Ok(sizes)
}

/// Part sizes summing to `q` from the largest-remainder rounding of `q * p`.
///
/// Remainder ties go to the lower index.
pub fn apportion(p: &SpiralPoint<ExactRational>, q: usize, mode: Apportion) -> Result<[usize; 3]> {
    if q < 3 && mode == Apportion::FloorOne {
        return Err(Error::Precondition("grid needs at least three cells per unit".into()));
    }
    let qq = ExactRational::from_integer(q as u64);
    let scaled = [0, 1, 2].map(|i| &p.coords()[i] * &qq);
    let mut fl = scaled.clone().map(|s| s.floor().to_i64().expect("bounded by q"));
    if mode == Apportion::FloorOne {
        fl = fl.map(|f| f.max(1));
    }
    let rem = [0, 1, 2].map(|i| &scaled[i] - &ExactRational::from_integer(fl[i]));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| rem[j].cmp(&rem[i]).then(i.cmp(&j)));
    finish(distribute(fl, &order, q as i64), mode)
}

/// [`apportion`] for an enclosed point; `None` unless every floor and the
/// remainder ranking are certain.
pub fn apportion_interval(p: &SpiralPoint<Interval>, q: usize, mode: Apportion) -> Result<Option<[usize; 3]>> {
    if q < 3 && mode == Apportion::FloorOne {
        return Err(Error::Precondition("grid needs at least three cells per unit".into()));
    }
    let qq = ExactRational::from_integer(q as u64);
    let mut fl = [0i64; 3];
    let mut rem = Vec::with_capacity(3);
    for (i, c) in p.coords().iter().enumerate() {
        let lo = &ExactRational::from_rug(c.lo().to_rational()) * &qq;
        let hi = &ExactRational::from_rug(c.hi().to_rational()) * &qq;
        let f = lo.floor();
        if f != hi.floor() {
            return Ok(None);
        }
        fl[i] = f.to_i64().expect("bounded by q");
        if mode == Apportion::FloorOne && fl[i] < 1 {
            fl[i] = 1;
        }
        let shift = ExactRational::from_integer(fl[i]);
        rem.push((&lo - &shift, &hi - &shift));
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| rem[j].0.cmp(&rem[i].0).then(i.cmp(&j)));
    for w in order.windows(2) {
        if rem[w[1]].1 >= rem[w[0]].0 {
            return Ok(None);
        }
    }
    Ok(Some(finish(distribute(fl, &order, q as i64), mode)?))
}

/// Grid rounding of an orbit point, refining its enclosure until certain and
/// falling back to exact arithmetic within the exact-step cap.
pub fn apportion_orbit(p: &OrbitPoint, q: usize, mode: Apportion, policy: &EscalationPolicy) -> Result<[usize; 3]> {
    let mut bits = 64.0;
    loop {
        let (e, prec) = p.enclosure(policy, bits)?;
        if let Some(s) = apportion_interval(&e, q, mode)? {
            return Ok(s);
        }
        // A remainder tie never separates under refinement; settle it exactly.
        if p.steps <= DEFAULT_EXACT_CAP {
            return apportion(&p.exact(DEFAULT_EXACT_CAP)?, q, mode);
        }
        if prec >= policy.cap_bits {
            return Err(Error::UndecidedAtCap { bits: prec, context: "grid rounding".into() });
        }
        bits *= 2.0;
    }
}

/// The grid point `sizes / q`.
pub fn grid_point(sizes: [usize; 3]) -> Result<SpiralPoint<ExactRational>> {
    let q: usize = sizes.iter().sum();
    let c = sizes.map(|s| ExactRational::new(Integer::from(s), Integer::from(q)).expect("q > 0"));
    SpiralPoint::from_coords(c)
}

/// Round each point to the grid `(1/q) Z^3` and realise it as a tripartite
/// tournament `A -> B -> C -> A` on `q` candidates, transitive inside parts.
pub fn points_to_tournaments(
    points: &[SpiralPoint<ExactRational>],
    q: usize,
    mode: Apportion,
) -> Result<Vec<(Tournament, TripartitePartition)>> {
    points
        .iter()
        .map(|p| build_tripartite_transitive(apportion(p, q, mode)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::make_rational;
    use crate::qso::{aggregate, root_distribution};
    use crate::spiral::{rotation_distance, v_step};

    fn q(n: i64, d: i64) -> ExactRational {
        make_rational(n, d).unwrap()
    }

    fn p(v: [(i64, i64); 3]) -> SpiralPoint<ExactRational> {
        SpiralPoint::from_fracs(v).unwrap()
    }

    fn pol() -> EscalationPolicy {
        EscalationPolicy::default()
    }

    #[test]
    fn seed_examples() {
        assert_eq!(seed_point(&q(1, 3)).unwrap(), p([(1, 6), (1, 6), (2, 3)]));
        let s = seed_triple(&q(1, 5), 1000, &pol()).unwrap();
        assert_eq!(s.a0.base, p([(1, 10), (1, 10), (4, 5)]));
        assert_eq!(s.hits, [13, 5, 1]);
        for pt in &s.points {
            assert_eq!(pt.eval(&NearCorner { eps: q(1, 5), corner: Corner::X }, &pol()), Verdict::True);
        }
        let z = seed_triple_toward(&q(1, 5), Corner::Z, 1000, &pol()).unwrap();
        assert_eq!(z.hits[0], 0);
        assert!(seed_triple(&q(1, 2), 10, &pol()).is_err());
    }

    #[test]
    fn seeds_are_weakly_rotated() {
        let s = seed_triple(&q(1, 3), 1000, &pol()).unwrap();
        let [a, b, _] = &s.points;
        let (ea, eb) = (a.exact(24).unwrap(), b.exact(24).unwrap());
        let lag = a.steps.abs_diff(b.steps);
        assert_eq!(rotation_distance(&ea, &eb, lag).unwrap(), Some(lag));
    }

    #[test]
    fn amplification_and_d2() {
        let s = seed_triple(&q(1, 5), 1000, &pol()).unwrap();
        let d2 = empirical_d2(&s.points, &q(1, 50), 1000, &pol()).unwrap();
        assert_eq!(d2, 13);
        let amp = amplify_triple(&s.points, d2, &q(1, 5), Corner::X, 1000, &pol()).unwrap();
        assert_eq!(amp.extra, [14, 212, 34]);
        let zero = amplify_triple(&s.points, 0, &q(1, 5), Corner::X, 1000, &pol()).unwrap();
        let first = s.points[0].first(&NearCorner { eps: q(1, 5), corner: Corner::X }, 1, 1000, &pol()).unwrap();
        assert_eq!(zero.extra[0], first);
    }

    #[test]
    fn d0_examples() {
        let pt = OrbitPoint::seed(p([(1, 2), (1, 4), (1, 4)]));
        assert_eq!(d0_search(&pt, &PhiThreshold::Value(q(1, 40)), 100, &pol()).unwrap(), 4);
        assert_eq!(d0_search(&pt, &PhiThreshold::Value(q(1, 10)), 100, &pol()).unwrap(), 1);
        assert_eq!(empirical_d0_log2(&q(1, 5)).unwrap(), -17);
        assert!(d0_search(&OrbitPoint::seed(SpiralPoint::center(0)), &PhiThreshold::Log2(-10), 10, &pol()).is_err());
    }

    #[test]
    fn coverage_trivial_cases() {
        let corner = vec![OrbitPoint::seed(SpiralPoint::corner(Corner::X, 0)); 6];
        let c = coverage_scan(&corner, &q(1, 5), Corner::X, 0, 9, 0, &pol()).unwrap();
        assert_eq!((c.covered, c.coverage.len()), (10, 10));
        let centre = vec![OrbitPoint::seed(SpiralPoint::center(0)); 6];
        let c = coverage_scan(&centre, &q(1, 5), Corner::X, 3, 3, 3, &pol()).unwrap();
        assert_eq!(c.covered, 0);
        assert_eq!(c.violations, vec![3]);
        assert!(c.fully_certified());
    }

    #[test]
    fn chain_is_symbolic() {
        let c = parameter_chain(&q(1, 20), 1000, &pol()).unwrap();
        // R^2(a0) = (1 - eps, eps/2, eps/2) maps to x' = 1 - eps exactly: a boundary hit at step 1.
        assert_eq!(c.d1.value, 25);
        assert_eq!(c.eps1.result.exact().unwrap(), &(&q(1, 20) * &pow2_rational(-50)));
        assert!(c.eps2.result.is_symbolic());
        assert!(c.d3.value > c.d2.d);
    }

    #[test]
    fn apportion_examples() {
        assert_eq!(apportion(&p([(1, 4), (1, 4), (1, 2)]), 4, Apportion::Strict).unwrap(), [1, 1, 2]);
        assert_eq!(apportion(&p([(1, 3), (1, 3), (1, 3)]), 3, Apportion::Strict).unwrap(), [1, 1, 1]);
        assert_eq!(apportion(&p([(1, 10), (1, 10), (4, 5)]), 1000, Apportion::Strict).unwrap(), [100, 100, 800]);
        assert_eq!(apportion(&p([(1, 3), (1, 3), (1, 3)]), 10, Apportion::Strict).unwrap(), [4, 3, 3]);
        let tiny = p([(999, 1000), (1, 2000), (1, 2000)]);
        assert!(matches!(apportion(&tiny, 10, Apportion::Strict), Err(Error::EmptyPart(2))));
        assert_eq!(apportion(&tiny, 10, Apportion::FloorOne).unwrap(), [8, 1, 1]);
        let e = p([(1, 3), (1, 6), (1, 2)]).to_interval(64);
        assert_eq!(apportion_interval(&e, 12, Apportion::Strict).unwrap(), None);
        let e = p([(3, 10), (1, 5), (1, 2)]).to_interval(64);
        assert_eq!(apportion_interval(&e, 7, Apportion::Strict).unwrap(), Some([2, 1, 4]));
    }

    #[test]
    fn grid_tournaments_follow_the_spiral() {
        let pts = [p([(1, 4), (1, 4), (1, 2)]), p([(1, 3), (1, 3), (1, 3)]), p([(1, 8), (3, 8), (1, 2)])];
        let ts = points_to_tournaments(&pts, 8, Apportion::Strict).unwrap();
        for (t, part) in &ts {
            let mut s = grid_point(part.sizes()).unwrap();
            for d in 0..5 {
                let agg = aggregate(&root_distribution(t, d).unwrap(), part).unwrap();
                assert_eq!(&agg, s.as_simplex());
                s = v_step(&s);
            }
        }
    }
}
