//! Six-point certificates and the small-scale theorem demonstration.
//!
//! The demonstration takes six points near the z corner, rounds them to part
//! sizes of tripartite tournaments `A -> B -> C -> A` on `q` candidates, and
//! asks, for each tree height `d` in a window, whether one of the six
//! tournaments puts probability at least `1 - delta` on the winner lying in
//! `A`. That probability is the x coordinate of `V^d` at the rounded point.

use rayon::prelude::*;
use rug::Integer;
use serde::Serialize;

use crate::arith::{floor_log2, EscalationPolicy, ExactRational, ExactVector, Interval, Verdict};
use crate::error::{Error, Result};
use crate::qso::{aggregate_common, operator_of, DEFAULT_EXACT_CAP};
use crate::sixpoints::{
    apportion, apportion_orbit, certify, d0_search, grid_point, parameter_chain, six_points, Apportion, CoverageVerdict,
    OrbitPoint, PhiThreshold, PipelineConfig, SixPointCertificate, SixPoints,
};
use crate::spiral::{v_step_common, Corner, NearCorner, OrbitScan};
use crate::tournament::{build_tripartite_transitive, verify_tripartite};

use super::{sci_rounded, to_json, Common, Rounding, Command, Outcome, OutputFile, Params, Status};

/// A certified enclosure printed with directed rounding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertifiedValue {
    /// Lower bound.
    pub lo: String,
    /// Upper bound.
    pub hi: String,
}

impl CertifiedValue {
    /// Outward-rounded decimal bounds of an interval.
    pub fn from_interval(v: &Interval, digits: u32) -> Self {
        let lo = ExactRational::from_rug(v.lo().to_rational());
        let hi = ExactRational::from_rug(v.hi().to_rational());
        CertifiedValue { lo: sci_rounded(&lo, digits, Rounding::Down), hi: sci_rounded(&hi, digits, Rounding::Up) }
    }
}

/// Significant digits of reported probabilities.
pub const PROB_DIGITS: u32 = 12;

#[derive(Serialize)]
struct SixpointsReport<'a> {
    eps: String,
    eps1: String,
    corner: Corner,
    window: u64,
    d0_rule: String,
    six_points: &'a SixPoints,
    certificate: &'a SixPointCertificate,
    coverage_fraction: f64,
    fully_certified: bool,
    parameter_chain: Option<crate::sixpoints::ParameterChain>,
}

/// Pass, violation or undecided for a certificate against a coverage target.
pub fn certificate_status(cert: &SixPointCertificate, min_coverage: f64) -> Status {
    if cert.points_close.contains(&Verdict::False) {
        return Status::Violation;
    }
    let undecided = cert.points_close.contains(&Verdict::Undecided)
        || cert.coverage.iter().any(|c| c.verdict == CoverageVerdict::Undecided);
    if undecided {
        Status::Undecided
    } else if cert.coverage_fraction() < min_coverage {
        Status::Violation
    } else {
        Status::Pass
    }
}

fn pipeline_config(p: &mut Params, eps_default: &str, corner: Corner, common: &Common) -> Result<PipelineConfig> {
    let eps = p.rational("eps", eps_default)?;
    let mut cfg = PipelineConfig::new(eps);
    if let Some(e1) = p.opt_rational("eps1")? {
        cfg.eps1 = e1;
    }
    cfg.corner = p.corner("corner", corner)?;
    cfg.window = p.u64("window", cfg.window)?;
    cfg.d0 = p.opt_u64("d0")?;
    cfg.cap = p.u64("cap", cfg.cap)?;
    cfg.policy = common.policy;
    Ok(cfg)
}

fn d0_rule(cfg: &PipelineConfig) -> Result<String> {
    Ok(match cfg.d0 {
        Some(d) => format!("given: d0 = {d}"),
        None => format!(
            "least d >= 1 with phi(V^d(a)) < 2^{} = 2^floor(log2(eps1^3))",
            floor_log2(&cfg.eps1.pow(3))?
        ),
    })
}

/// `sixpoints`.
///
/// Keys: `eps`, `eps1`, `corner`, `window`, `d0`, `cap`, `min_coverage`, plus
/// the common keys.
pub fn cmd_sixpoints(p: &mut Params) -> Result<Outcome> {
    let common = Common::read(p, crate::arith::Backend::Interval)?;
    let cfg = pipeline_config(p, "1/5", Corner::X, &common)?;
    let min_coverage = p.rational("min_coverage", "99/100")?.to_f64();
    let (six, cert) = certify(&cfg)?;
    let chain = if cfg.eps < crate::arith::make_rational(1, 10)? {
        Some(parameter_chain(&cfg.eps, cfg.cap, &cfg.policy)?)
    } else {
        None
    };
    let status = certificate_status(&cert, min_coverage);
    let report = SixpointsReport {
        eps: cfg.eps.to_string(),
        eps1: cfg.eps1.to_string(),
        corner: cfg.corner,
        window: cfg.window,
        d0_rule: d0_rule(&cfg)?,
        six_points: &six,
        certificate: &cert,
        coverage_fraction: cert.coverage_fraction(),
        fully_certified: cert.fully_certified(),
        parameter_chain: chain,
    };
    let summary = vec![
        format!("seed hits {:?}, D2 = {}, amplification steps {:?}", six.seeds.hits, six.d2, six.amplified.extra),
        format!("points close: {:?}", cert.points_close),
        format!(
            "window {}..={}: covered {}/{}, max precision {} bits",
            cert.d_lo,
            cert.d_hi,
            cert.covered,
            cert.coverage.len(),
            cert.precision.max_bits.iter().max().copied().unwrap_or(0)
        ),
    ];
    Ok(Outcome {
        command: Command::Sixpoints,
        status,
        files: vec![OutputFile { name: "certificate.json".into(), contents: to_json(&report)? }],
        summary,
    })
}

/// `x` coordinates of `V^d(sizes / q)` for `d = 0..=depth`: the exact
/// probability that a height-`d` random tree elects a member of `A`.
pub fn exact_part_probabilities(sizes: [usize; 3], depth: u64) -> Result<Vec<ExactRational>> {
    if depth > DEFAULT_EXACT_CAP {
        return Err(Error::ExactBlowup { steps: depth, cap: DEFAULT_EXACT_CAP });
    }
    let mut v = grid_point(sizes)?.to_common();
    let mut out = Vec::with_capacity(depth as usize + 1);
    for d in 0..=depth {
        out.push(ExactRational::new(v.num[0].clone(), v.den.clone())?);
        if d < depth {
            v = v_step_common(&v);
        }
    }
    Ok(out)
}

/// Whether the part masses of the full `n`-candidate dynamics equal the
/// three-dimensional spiral dynamics at every depth up to `depth`.
///
/// Only the current iterate is kept, so memory stays at two vectors.
pub fn crosscheck(sizes: [usize; 3], depth: u64) -> Result<bool> {
    if depth > DEFAULT_EXACT_CAP {
        return Err(Error::ExactBlowup { steps: depth, cap: DEFAULT_EXACT_CAP });
    }
    let (t, part) = build_tripartite_transitive(sizes)?;
    let op = operator_of(&t);
    let n = t.n();
    let mut full = ExactVector { num: vec![Integer::from(1); n], den: Integer::from(n) };
    let mut small = grid_point(sizes)?.to_common();
    for d in 0..=depth {
        if !aggregate_common(&full, &part)?.same_value(&small) {
            return Ok(false);
        }
        if d < depth {
            full = op.apply_common(&full)?;
            small = v_step_common(&small);
        }
    }
    Ok(true)
}

/// One of the six tournaments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DemoTournament {
    /// `|A|, |B|, |C|`.
    pub sizes: [usize; 3],
    /// Whether the edges follow `A -> B -> C -> A`.
    pub tripartite: bool,
    /// Largest out-degree of a member of `A`.
    pub max_outdegree_a: usize,
    /// `|A| <= delta n` and `|B| <= delta n`.
    pub small_parts: bool,
}

/// One tree height of the window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DemoRow {
    /// Tree height.
    pub d: u64,
    /// Index of the tournament with the largest probability.
    pub best: usize,
    /// Its probability that the winner lies in `A`.
    pub probability: CertifiedValue,
    /// Whether some tournament is certified to reach `1 - delta`.
    pub meets: Verdict,
    /// The first such tournament.
    pub witness: Option<usize>,
}

/// The demonstration report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremDemoReport {
    /// Number of candidates.
    pub n: usize,
    /// Target `delta`.
    pub delta: String,
    /// Six-point radius used for the z-corner points.
    pub eps1: String,
    /// The six tournaments.
    pub tournaments: Vec<DemoTournament>,
    /// `2 delta n`.
    pub outdegree_bound: String,
    /// How `d0` was chosen.
    pub d0_rule: String,
    /// First height of the window.
    pub d_lo: u64,
    /// Last height of the window.
    pub d_hi: u64,
    /// One row per height.
    pub rows: Vec<DemoRow>,
    /// Heights meeting `1 - delta`.
    pub met: u64,
    /// `met` over the window length.
    pub fraction: f64,
    /// Cross-check size.
    pub crosscheck_n: usize,
    /// Cross-check depth.
    pub crosscheck_depth: u64,
    /// Cross-check result for each tournament, `None` when skipped.
    pub crosscheck: Vec<Option<bool>>,
}

/// Settings of the demonstration.
#[derive(Clone, Debug, PartialEq)]
pub struct DemoConfig {
    /// Target `delta`; also the six-point radius.
    pub delta: ExactRational,
    /// Number of candidates.
    pub q: usize,
    /// Six-point pipeline settings, toward the z corner.
    pub pipeline: PipelineConfig,
    /// Accuracy of reported probabilities, in bits.
    pub prob_bits: f64,
    /// Size of the cross-check tournaments; zero skips it.
    pub crosscheck_q: usize,
    /// Cross-check depth.
    pub crosscheck_depth: u64,
}

impl DemoConfig {
    /// Defaults for `delta` and `q`.
    pub fn new(delta: ExactRational, q: usize) -> Self {
        let mut pipeline = PipelineConfig::new(delta.clone());
        pipeline.corner = Corner::Z;
        DemoConfig { delta, q, pipeline, prob_bits: 40.0, crosscheck_q: 30, crosscheck_depth: 12 }
    }
}

/// Build the six tournaments, choose `d0` on the first of them and scan the
/// window.
pub fn theorem_demo(cfg: &DemoConfig) -> Result<TheoremDemoReport> {
    let pc = &cfg.pipeline;
    let policy: &EscalationPolicy = &pc.policy;
    let six = six_points(pc)?;
    let points: Vec<OrbitPoint> = six.all();
    let qq = ExactRational::from_integer(cfg.q as u64);
    let limit = &cfg.delta * &qq;
    let mut tournaments = Vec::with_capacity(6);
    let mut sizes_list = Vec::with_capacity(6);
    for p in &points {
        let sizes = apportion_orbit(p, cfg.q, Apportion::FloorOne, policy)?;
        let (t, part) = build_tripartite_transitive(sizes)?;
        let max_outdegree_a = part.part(0).iter().map(|&i| t.outdeg(i)).collect::<Result<Vec<_>>>()?;
        let small = |s: usize| ExactRational::from_integer(s as u64) <= limit;
        tournaments.push(DemoTournament {
            sizes,
            tripartite: verify_tripartite(&t, &part)?,
            max_outdegree_a: max_outdegree_a.into_iter().max().unwrap_or(0),
            small_parts: small(sizes[0]) && small(sizes[1]),
        });
        sizes_list.push(sizes);
    }
    let grid: Vec<OrbitPoint> =
        sizes_list.iter().map(|&s| grid_point(s).map(OrbitPoint::seed)).collect::<Result<_>>()?;
    let (d0, rule) = match pc.d0 {
        Some(d) => (d, format!("given: d0 = {d}")),
        None => {
            let k = floor_log2(&pc.eps1.pow(3))?;
            let d = d0_search(&grid[0], &PhiThreshold::Log2(k), pc.cap, policy)?;
            (d, format!("least d >= 1 with phi(V^d(first grid point)) < 2^{k} = 2^floor(log2(eps1^3))"))
        }
    };
    let (d_lo, d_hi) = (d0, d0 + pc.window);
    let test = NearCorner { eps: cfg.delta.clone(), corner: Corner::X };
    let scans: Vec<_> = grid
        .iter()
        .map(|g| {
            let s = OrbitScan::new(g.base.clone(), *policy);
            let verdicts = s.scan(&test, d_lo, d_hi).verdicts;
            s.enclosures(d_lo, d_hi, cfg.prob_bits).map(|(e, _)| (verdicts, e))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity((d_hi - d_lo + 1) as usize);
    let mut met = 0;
    for (k, d) in (d_lo..=d_hi).enumerate() {
        let xs: Vec<&Interval> = scans.iter().map(|(_, e)| &e[k].coords()[0]).collect();
        let best = (0..xs.len()).fold(0, |b, i| if xs[i].midpoint() > xs[b].midpoint() { i } else { b });
        let witness = scans.iter().position(|(v, _)| v[k] == Verdict::True);
        let meets = match witness {
            Some(_) => Verdict::True,
            None if scans.iter().all(|(v, _)| v[k] == Verdict::False) => Verdict::False,
            None => Verdict::Undecided,
        };
        met += u64::from(meets == Verdict::True);
        rows.push(DemoRow {
            d,
            best: witness.unwrap_or(best),
            probability: CertifiedValue::from_interval(xs[witness.unwrap_or(best)], PROB_DIGITS),
            meets,
            witness,
        });
    }
    let crosscheck = sizes_list
        .par_iter()
        .map(|&s| {
            if cfg.crosscheck_q == 0 {
                return Ok(None);
            }
            let small = apportion(&grid_point(s)?, cfg.crosscheck_q, Apportion::FloorOne)?;
            crosscheck(small, cfg.crosscheck_depth).map(Some)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TheoremDemoReport {
        n: cfg.q,
        delta: cfg.delta.to_string(),
        eps1: pc.eps1.to_string(),
        tournaments,
        outdegree_bound: (&limit * &ExactRational::from_integer(2)).to_string(),
        d0_rule: rule,
        d_lo,
        d_hi,
        fraction: met as f64 / rows.len() as f64,
        rows,
        met,
        crosscheck_n: cfg.crosscheck_q,
        crosscheck_depth: cfg.crosscheck_depth,
        crosscheck,
    })
}

/// Pass, violation or undecided for a demonstration against a target fraction.
pub fn demo_status(r: &TheoremDemoReport, delta: &ExactRational, min_fraction: f64) -> Status {
    let bound = &(delta * &ExactRational::from_integer(r.n as u64)) * &ExactRational::from_integer(2);
    let structural = r.tournaments.iter().all(|t| {
        t.tripartite && t.small_parts && ExactRational::from_integer(t.max_outdegree_a as u64) <= bound
    });
    if !structural || r.crosscheck.contains(&Some(false)) {
        return Status::Violation;
    }
    if r.fraction >= min_fraction {
        Status::Pass
    } else if r.rows.iter().any(|row| row.meets == Verdict::Undecided) {
        Status::Undecided
    } else {
        Status::Violation
    }
}

/// `theorem-demo`.
///
/// Keys: `delta`, `q`, `eps1`, `window`, `d0`, `cap`, `min_fraction`,
/// `prob_bits`, `crosscheck_q`, `crosscheck_depth`, plus the common keys.
pub fn cmd_theorem_demo(p: &mut Params) -> Result<Outcome> {
    let common = Common::read(p, crate::arith::Backend::Interval)?;
    let delta = p.rational("delta", "3/10")?;
    let q = usize::try_from(p.u64("q", 1000)?).map_err(|_| Error::Config("q: too large".into()))?;
    let mut cfg = DemoConfig::new(delta.clone(), q);
    if let Some(e1) = p.opt_rational("eps1")? {
        cfg.pipeline.eps1 = e1;
    }
    cfg.pipeline.window = p.u64("window", cfg.pipeline.window)?;
    cfg.pipeline.d0 = p.opt_u64("d0")?;
    cfg.pipeline.cap = p.u64("cap", cfg.pipeline.cap)?;
    cfg.pipeline.policy = common.policy;
    let min_fraction = p.rational("min_fraction", "99/100")?.to_f64();
    cfg.prob_bits = p.u64("prob_bits", 40)? as f64;
    cfg.crosscheck_q = usize::try_from(p.u64("crosscheck_q", 30)?).map_err(|_| Error::Config("crosscheck_q".into()))?;
    cfg.crosscheck_depth = p.u64("crosscheck_depth", 12)?;
    let r = theorem_demo(&cfg)?;
    let status = demo_status(&r, &delta, min_fraction);
    let summary = vec![
        format!("part sizes {:?}", r.tournaments.iter().map(|t| t.sizes).collect::<Vec<_>>()),
        format!("window {}..={}: {} of {} heights reach 1 - delta", r.d_lo, r.d_hi, r.met, r.rows.len()),
        format!("cross-check at n = {}, depth {}: {:?}", r.crosscheck_n, r.crosscheck_depth, r.crosscheck),
    ];
    Ok(Outcome {
        command: Command::TheoremDemo,
        status,
        files: vec![OutputFile { name: "theorem_demo.json".into(), contents: to_json(&r)? }],
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::make_rational;

    fn q(n: i64, d: i64) -> ExactRational {
        make_rational(n, d).unwrap()
    }

    #[test]
    fn part_probabilities_for_a_four_candidate_tournament() {
        // a' = a(a + 2b) with a = b = 1/4.
        let ps = exact_part_probabilities([1, 1, 2], 3).unwrap();
        assert_eq!(ps[0], q(1, 4));
        assert_eq!(ps[1], q(3, 16));
        assert!(crosscheck([1, 1, 2], 6).unwrap());
    }

    #[test]
    fn crosscheck_agrees_on_uneven_parts() {
        assert!(crosscheck([2, 3, 5], 8).unwrap());
        assert!(crosscheck([1, 1, 28], 10).unwrap());
    }

    #[test]
    fn small_demo_runs() {
        let mut cfg = DemoConfig::new(q(3, 10), 200);
        cfg.pipeline.window = 10;
        cfg.crosscheck_depth = 4;
        let r = theorem_demo(&cfg).unwrap();
        assert_eq!(r.rows.len(), 11);
        assert!(r.tournaments.iter().all(|t| t.tripartite && t.sizes.iter().sum::<usize>() == 200));
        assert_eq!(r.crosscheck, vec![Some(true); 6]);
    }

    #[test]
    fn degenerate_sixpoints_window() {
        let mut p = Params::parse("eps = 1/5\nwindow = 0\nd0 = 20").unwrap();
        let out = cmd_sixpoints(&mut p).unwrap();
        let v: serde_json::Value = serde_json::from_str(out.file("certificate.json").unwrap()).unwrap();
        assert_eq!(v["certificate"]["coverage"].as_array().unwrap().len(), 1);
    }
}
