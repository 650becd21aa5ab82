//! Randomised sweeps of the spiral's invariants and propositions.
//!
//! Each check draws its samples from its own ChaCha8 stream, so enabling or
//! resizing one check never changes another's samples.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{Backend, EscalationPolicy, ExactRational, Verdict};
use crate::error::{Error, Result};
use crate::qso::{operator_of, DEFAULT_EXACT_CAP};
use crate::spiral::{
    decay_check, decay_check_strong, easybounds_check, epsclose_d_bound, first_vertex_hit, phi, rotate,
    skipcorner2_eps, skipcorner_eps, v_step, v_step_common, Corner, NearCorner, NearSide, OrbitScan, PointTest, Side,
    SpiralPoint,
};
use crate::tournament::Tournament;

use super::{
    point_strings, random_closed, random_in_m, random_interior, random_unit, to_json, Common, Command, Outcome,
    OutputFile, Params, Status,
};

/// Bits of resolution for sampled coordinates.
pub const SAMPLE_BITS: u32 = 20;

/// Result of one sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    /// Check name.
    pub name: String,
    /// Parameters, as text.
    pub params: BTreeMap<String, String>,
    /// Number of samples.
    pub samples: u64,
    /// Samples where the property failed.
    pub violations: u64,
    /// Samples left undecided at the precision cap.
    pub undecided: u64,
    /// The first failing sample.
    pub first_violation: Option<Vec<String>>,
    /// Extra statistics.
    pub notes: BTreeMap<String, String>,
}

impl CheckReport {
    /// Pass, violation or undecided.
    pub fn status(&self) -> Status {
        Status::from_counts(self.violations, self.undecided)
    }
}

/// Evaluate `f` on every sample in parallel and tally the verdicts in order.
pub fn sweep<F>(name: &str, params: BTreeMap<String, String>, pts: &[SpiralPoint<ExactRational>], f: F) -> CheckReport
where
    F: Fn(&SpiralPoint<ExactRational>) -> Verdict + Sync,
{
    let verdicts: Vec<Verdict> = pts.par_iter().map(&f).collect();
    let violations = verdicts.iter().filter(|&&v| v == Verdict::False).count() as u64;
    let undecided = verdicts.iter().filter(|&&v| v == Verdict::Undecided).count() as u64;
    let first_violation = verdicts.iter().position(|&v| v == Verdict::False).map(|i| point_strings(&pts[i]));
    CheckReport {
        name: name.into(),
        params,
        samples: pts.len() as u64,
        violations,
        undecided,
        first_violation,
        notes: BTreeMap::new(),
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn params(kv: &[(&str, String)]) -> BTreeMap<String, String> {
    kv.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Verdicts of `test` at steps `lo..=hi` of the orbit of `base`.
pub fn orbit_verdicts<T: PointTest>(
    base: &SpiralPoint<ExactRational>,
    test: &T,
    lo: u64,
    hi: u64,
    backend: Backend,
    policy: &EscalationPolicy,
) -> Result<Vec<Verdict>> {
    match backend {
        Backend::Exact => {
            if hi > DEFAULT_EXACT_CAP {
                return Err(Error::ExactBlowup { steps: hi, cap: DEFAULT_EXACT_CAP });
            }
            let mut v = base.to_common();
            let mut out = Vec::new();
            for step in 0..=hi {
                if step >= lo {
                    out.push(test.eval(&SpiralPoint::from_unchecked(v.to_rationals())));
                }
                if step < hi {
                    v = v_step_common(&v);
                }
            }
            Ok(out)
        }
        Backend::Interval => Ok(OrbitScan::new(base.clone(), *policy).scan(test, lo, hi).verdicts),
    }
}

/// Exact invariants: simplex preservation, rotation equivariance, potential
/// monotonicity and the coordinate bounds of one step.
pub fn invariant_checks(seed: u64, samples: u64) -> Vec<CheckReport> {
    let op = operator_of(&Tournament::spiral_cycle3());
    let n = [("samples", samples.to_string())];
    let closed = |stream| {
        let mut r = rng(seed, stream);
        (0..samples).map(|_| random_closed(&mut r, SAMPLE_BITS)).collect::<Vec<_>>()
    };
    let one = ExactRational::one();
    let zero = ExactRational::zero();
    let simplex = sweep("apply_preserves_simplex", params(&n), &closed(0), |p| {
        let y = op.apply(p.as_simplex()).expect("three coordinates");
        let sum = y.coords().iter().fold(ExactRational::zero(), |s, c| &s + c);
        let same = y == *v_step(p).as_simplex();
        Verdict::from_bool(sum == one && y.coords().iter().all(|c| c >= &zero) && same)
    });
    let equivariance = sweep("rotation_equivariance", params(&n), &closed(1), |p| {
        Verdict::from_bool(v_step(&rotate(p)) == rotate(&v_step(p)))
    });
    let monotone =
        sweep("phi_nonincreasing", params(&n), &closed(2), |p| Verdict::from_bool(phi(&v_step(p)) <= phi(p)));
    let mut r = rng(seed, 3);
    let interior: Vec<_> = (0..samples).map(|_| random_interior(&mut r, SAMPLE_BITS)).collect();
    let easy = sweep("easybounds", params(&n), &interior, |p| Verdict::from_bool(easybounds_check(p)));
    vec![simplex, equivariance, monotone, easy]
}

/// `phi(V(p)) <= (1 - eps^3) phi(p)` on samples of `M(eps)`; with `strong`,
/// also the sharper constant from the decay proof.
pub fn decay_checks(seed: u64, samples: u64, eps: &ExactRational, stream: u64, strong: bool) -> Vec<CheckReport> {
    let mut r = rng(seed, stream);
    let pts: Vec<_> = (0..samples).map(|_| random_in_m(&mut r, SAMPLE_BITS, eps)).collect();
    let kv = params(&[("eps", eps.to_string()), ("samples", samples.to_string())]);
    let mut out = vec![sweep("decay", kv.clone(), &pts, |p| {
        Verdict::from_bool(decay_check(p, eps).expect("sampled inside M(eps)"))
    })];
    if strong {
        out.push(sweep("decay_strong", kv, &pts, |p| {
            Verdict::from_bool(decay_check_strong(p, eps).expect("sampled inside M(eps)"))
        }));
    }
    out
}

fn all_false(vs: &[Verdict]) -> Verdict {
    vs.iter().fold(Verdict::True, |acc, v| acc.and(!*v))
}

fn all_true(vs: &[Verdict]) -> Verdict {
    vs.iter().fold(Verdict::True, |acc, &v| acc.and(v))
}

/// Points `eps'`-close to the xy side and not `eps`-close to the x corner,
/// with `eps' = (eps/2)^(2^D)`: no `V^d` with `0 < d < D` may be
/// `eps'`-close to the xz side.
pub fn skipcorner_check(
    seed: u64,
    samples: u64,
    eps: &ExactRational,
    d: u64,
    backend: Backend,
    policy: &EscalationPolicy,
) -> Result<CheckReport> {
    let report = skipcorner_eps(eps, d)?;
    let eps1 = report
        .result
        .exact()
        .ok_or(Error::TooLarge { what: "skipcorner radius exponent", value: d, cap: 20 })?
        .clone();
    let mut r = rng(seed, 10);
    let one = ExactRational::one();
    let mut pts = Vec::with_capacity(samples as usize);
    while (pts.len() as u64) < samples {
        let z = &eps1 * &random_unit(&mut r, SAMPLE_BITS);
        let rest = &one - &z;
        // Half the samples sit just beyond the x corner's eps-box, where y decays fastest.
        let y = if pts.len() % 2 == 0 {
            &rest * &random_unit(&mut r, SAMPLE_BITS)
        } else {
            &(eps - &z) + &(eps * &random_unit(&mut r, SAMPLE_BITS))
        };
        if y > rest || &y + &z <= *eps {
            continue;
        }
        let x = &rest - &y;
        pts.push(SpiralPoint::from_coords([x, y, z])?);
    }
    let test = NearSide { eps: eps1.clone(), side: Side::Xz };
    let kv = params(&[
        ("eps", eps.to_string()),
        ("D", d.to_string()),
        ("eps_prime", eps1.to_string()),
        ("samples", samples.to_string()),
    ]);
    let errors = std::sync::Mutex::new(None);
    let rep = sweep("skipcorner", kv, &pts, |p| {
        if d <= 1 {
            return Verdict::True;
        }
        match orbit_verdicts(p, &test, 1, d - 1, backend, policy) {
            Ok(v) => all_false(&v),
            Err(e) => {
                errors.lock().expect("unpoisoned").get_or_insert(e);
                Verdict::Undecided
            }
        }
    });
    match errors.into_inner().expect("unpoisoned") {
        Some(e) => Err(e),
        None => Ok(rep),
    }
}

/// Points `eps'`-close to the x corner with `eps' = eps / 2^(2D)`: every
/// `V^i`, `0 <= i <= D`, must be `eps`-close to the x corner.
pub fn skipcorner2_check(
    seed: u64,
    samples: u64,
    eps: &ExactRational,
    d: u64,
    backend: Backend,
    policy: &EscalationPolicy,
) -> Result<CheckReport> {
    let eps1 = skipcorner2_eps(eps, d)?.result.exact().expect("exact").clone();
    let mut r = rng(seed, 11);
    let one = ExactRational::one();
    let pts: Vec<_> = (0..samples)
        .map(|k| {
            // Every eighth sample lies on the boundary of the eps'-box.
            let s = if k % 8 == 0 { eps1.clone() } else { &eps1 * &random_unit(&mut r, SAMPLE_BITS) };
            let y = &s * &random_unit(&mut r, SAMPLE_BITS);
            let z = &s - &y;
            SpiralPoint::from_coords([&one - &s, y, z]).expect("inside the simplex")
        })
        .collect();
    let test = NearCorner { eps: eps.clone(), corner: Corner::X };
    let kv = params(&[
        ("eps", eps.to_string()),
        ("D", d.to_string()),
        ("eps_prime", eps1.to_string()),
        ("samples", samples.to_string()),
    ]);
    let errors = std::sync::Mutex::new(None);
    let rep = sweep("skipcorner2", kv, &pts, |p| match orbit_verdicts(p, &test, 0, d, backend, policy) {
        Ok(v) => all_true(&v),
        Err(e) => {
            errors.lock().expect("unpoisoned").get_or_insert(e);
            Verdict::Undecided
        }
    });
    match errors.into_inner().expect("unpoisoned") {
        Some(e) => Err(e),
        None => Ok(rep),
    }
}

/// Samples of `M(eps)` reach some corner's `eps`-box within `cap` steps and
/// no later than the closed-form bound.
pub fn first_vertex_hit_check(
    seed: u64,
    samples: u64,
    eps: &ExactRational,
    cap: u64,
    policy: &EscalationPolicy,
) -> Result<CheckReport> {
    let bound = epsclose_d_bound(eps)?;
    let mut r = rng(seed, 12);
    let pts: Vec<_> = (0..samples).map(|_| random_in_m(&mut r, SAMPLE_BITS, eps)).collect();
    let hits: Vec<Result<(u64, Corner)>> = pts.par_iter().map(|p| first_vertex_hit(p, eps, cap, policy)).collect();
    let mut rep = CheckReport {
        name: "first_vertex_hit".into(),
        params: params(&[
            ("eps", eps.to_string()),
            ("cap", cap.to_string()),
            ("samples", samples.to_string()),
            ("D_bound", bound.d.to_string()),
        ]),
        samples,
        violations: 0,
        undecided: 0,
        first_violation: None,
        notes: BTreeMap::new(),
    };
    let mut max_hit = 0;
    let mut counts = [0u64; 3];
    for (p, h) in pts.iter().zip(hits) {
        let ok = match h {
            Ok((f, c)) => {
                max_hit = max_hit.max(f);
                counts[c.index()] += 1;
                bound.d >= f
            }
            Err(Error::UndecidedAtCap { .. }) => {
                rep.undecided += 1;
                true
            }
            Err(Error::CapExceeded(_)) => false,
            Err(e) => return Err(e),
        };
        if !ok {
            rep.violations += 1;
            rep.first_violation.get_or_insert_with(|| point_strings(p));
        }
    }
    rep.notes.insert("max_hit".into(), max_hit.to_string());
    rep.notes.insert("heuristic_range".into(), bound.heuristic_range.to_string());
    rep.notes.insert("corner_counts_xyz".into(), format!("{counts:?}"));
    Ok(rep)
}

#[derive(Serialize)]
struct PropsReport {
    seed: u64,
    backend: Backend,
    policy: EscalationPolicy,
    status: Status,
    checks: Vec<CheckReport>,
}

/// `verify-props`.
///
/// Keys: `samples`, `eps` (list), `strong`, `skip_eps`, `skip_d`,
/// `skip_samples`, `fvh_eps`, `fvh_samples`, `fvh_cap`, plus the common keys.
pub fn cmd_verify_props(p: &mut Params) -> Result<Outcome> {
    let common = Common::read(p, Backend::Exact)?;
    let samples = p.u64("samples", 10_000)?;
    let eps_list = p.rationals("eps", "1/20, 1/10")?;
    let strong = p.bool("strong", false)?;
    let skip_eps = p.rational("skip_eps", "1/10")?;
    let skip_d = p.u64("skip_d", 3)?;
    let skip_samples = p.u64("skip_samples", 1000)?;
    let fvh_eps = p.rational("fvh_eps", "3/10")?;
    let fvh_samples = p.u64("fvh_samples", 1000)?;
    let fvh_cap = p.u64("fvh_cap", 10_000)?;
    let (seed, policy, backend) = (common.seed, common.policy, common.backend);

    let mut checks = invariant_checks(seed, samples);
    for (k, eps) in eps_list.iter().enumerate() {
        checks.extend(decay_checks(seed, samples, eps, 4 + k as u64 * 100, strong));
    }
    checks.push(skipcorner_check(seed, skip_samples, &skip_eps, skip_d, backend, &policy)?);
    checks.push(skipcorner2_check(seed, skip_samples, &skip_eps, skip_d, backend, &policy)?);
    checks.push(first_vertex_hit_check(seed, fvh_samples, &fvh_eps, fvh_cap, &policy)?);

    let status = checks.iter().fold(Status::Pass, |s, c| s.worst(c.status()));
    let summary = checks
        .iter()
        .map(|c| {
            let eps = c.params.get("eps").map(|e| format!(" at eps = {e}")).unwrap_or_default();
            format!("{}{eps}: {} samples, {} violations, {} undecided", c.name, c.samples, c.violations, c.undecided)
        })
        .collect();
    let report = PropsReport { seed, backend, policy, status, checks };
    Ok(Outcome {
        command: Command::VerifyProps,
        status,
        files: vec![OutputFile { name: "verify_props.json".into(), contents: to_json(&report)? }],
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> ExactRational {
        ExactRational::parse(s).unwrap()
    }

    #[test]
    fn invariants_hold_on_small_sweeps() {
        for c in invariant_checks(7, 300) {
            assert_eq!((c.violations, c.undecided), (0, 0), "{}", c.name);
        }
        for c in decay_checks(7, 200, &q("1/10"), 4, true) {
            assert_eq!(c.violations, 0, "{}", c.name);
        }
    }

    #[test]
    fn skip_sweeps_pass_on_both_backends() {
        let pol = EscalationPolicy::default();
        for backend in [Backend::Exact, Backend::Interval] {
            let a = skipcorner_check(3, 40, &q("1/10"), 3, backend, &pol).unwrap();
            assert_eq!(a.params["eps_prime"], q("1/20").pow(8).to_string());
            assert_eq!((a.violations, a.undecided), (0, 0));
            let b = skipcorner2_check(3, 40, &q("1/10"), 3, backend, &pol).unwrap();
            assert_eq!(b.params["eps_prime"], "1/640");
            assert_eq!((b.violations, b.undecided), (0, 0));
        }
    }

    #[test]
    fn skipcorner_detects_a_weak_radius() {
        // With eps' = 1/2 a point on the far side of the x corner's box reaches y <= 1/2 at once.
        let pol = EscalationPolicy::default();
        let start = SpiralPoint::parse(&["1/2", "499/1000", "1/1000"]).unwrap();
        let v = orbit_verdicts(&start, &NearSide { eps: q("1/2"), side: Side::Xz }, 1, 3, Backend::Exact, &pol).unwrap();
        assert!(v.contains(&Verdict::True));
    }

    #[test]
    fn first_vertex_hits_stay_under_the_bound() {
        let c = first_vertex_hit_check(5, 50, &q("3/10"), 10_000, &EscalationPolicy::default()).unwrap();
        assert_eq!((c.violations, c.undecided), (0, 0));
    }

    #[test]
    fn same_seed_same_report() {
        let mut a = Params::parse("samples = 50\nskip_samples = 10\nfvh_samples = 10\nseed = 9").unwrap();
        let mut b = a.clone();
        let ra = cmd_verify_props(&mut a).unwrap();
        let rb = cmd_verify_props(&mut b).unwrap();
        assert_eq!(ra.files, rb.files);
        assert_eq!(ra.status, Status::Pass);
    }
}
