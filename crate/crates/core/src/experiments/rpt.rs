//! Exact root distributions of random perfect voting trees against Monte
//! Carlo samples.

use std::fmt::Write as _;

use serde::Serialize;

use crate::arith::{ExactRational, ExactVector};
use crate::error::{Error, Result};
use crate::qso::{root_distributions_common, DEFAULT_EXACT_CAP};
use crate::tournament::Tournament;
use crate::votetree::{mc_winner_counts, DEFAULT_LEAF_BUDGET};

use super::{config::parse_u64, sci, to_json, Common, Command, Outcome, OutputFile, Params, Status};

/// Largest universe for the exact path.
pub const MAX_EXACT_N: usize = 10;

/// Parse a tournament description: `cycle3`, `spiral`, `transitive N`,
/// `index N K`, or an edge list such as `1>2, 2>3, 3>1`.
pub fn parse_tournament(s: &str) -> Result<Tournament> {
    let s = s.trim();
    let words: Vec<&str> = s.split_whitespace().collect();
    let num = |w: &str| parse_u64(w).and_then(|v| usize::try_from(v).map_err(|_| Error::Parse(w.into())));
    match words.as_slice() {
        ["cycle3"] => Ok(Tournament::cycle3()),
        ["spiral"] => Ok(Tournament::spiral_cycle3()),
        ["transitive", n] => Ok(Tournament::transitive(num(n)?)),
        ["index", n, k] => {
            let n = num(n)?;
            if n > 11 {
                return Err(Error::TooLarge { what: "indexed tournament size", value: n as u64, cap: 11 });
            }
            let k = parse_u64(k)?;
            let pairs = n * (n - 1) / 2;
            if pairs < 64 && k >> pairs != 0 {
                return Err(Error::Parse(format!("index {k} out of range for n = {n}")));
            }
            Ok(Tournament::from_index(n, k))
        }
        _ => {
            let mut edges = Vec::new();
            for e in s.split(',') {
                let (a, b) = e
                    .split_once('>')
                    .ok_or_else(|| Error::Parse(format!("expected `winner>loser`, found `{}`", e.trim())))?;
                edges.push((num(a.trim())?, num(b.trim())?));
            }
            let n = edges.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0);
            Tournament::build(n, &edges)
        }
    }
}

/// A comma-separated list of depths; `a..=b` ranges are allowed.
pub fn parse_depths(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        match part.split_once("..=") {
            Some((a, b)) => out.extend(parse_u64(a)?..=parse_u64(b)?),
            None => out.push(parse_u64(part)?),
        }
    }
    Ok(out)
}

/// Total-variation distance between a distribution and empirical counts.
pub fn tv_distance(p: &[ExactRational], counts: &[u64]) -> ExactRational {
    let total: u64 = counts.iter().sum();
    let sum = p.iter().zip(counts).fold(ExactRational::zero(), |acc, (pi, &c)| {
        let f = ExactRational::new(c.into(), total.into()).expect("positive total");
        &acc + &(pi - &f).abs()
    });
    &sum * &ExactRational::new(1.into(), 2.into()).expect("nonzero")
}

/// One depth of the comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthRow {
    /// Tree height.
    pub d: u64,
    /// `V^d(uniform)`, exact.
    pub exact: Vec<String>,
    /// Monte Carlo winner counts.
    pub counts: Vec<u64>,
    /// Distance between `V^d(uniform)` and the sample frequencies.
    pub tv: String,
    /// Distance between `V^(d-1)(uniform)` and the sample frequencies.
    pub tv_previous: Option<String>,
    /// `tv <= tolerance`.
    pub within_tolerance: bool,
}

/// Report for one tournament.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RptReport {
    /// Universe size.
    pub n: usize,
    /// Edges as `(winner, loser)`.
    pub edges: Vec<(usize, usize)>,
    /// Samples per depth.
    pub samples: u64,
    /// Seed.
    pub seed: u64,
    /// Tolerance on the distance.
    pub tv_tol: String,
    /// One row per depth.
    pub rows: Vec<DepthRow>,
    /// Depths where `V^d` is closer to the samples than `V^(d-1)`.
    pub prefers_vd: usize,
    /// Depths where `V^(d-1)` is closer.
    pub prefers_vd_minus_one: usize,
}

/// Compare `V^d(uniform)` with `samples` Monte Carlo trees for each depth.
pub fn rpt_report(
    t: &Tournament,
    depths: &[u64],
    samples: u64,
    seed: u64,
    tv_tol: &ExactRational,
    budget: u128,
) -> Result<RptReport> {
    if t.n() > MAX_EXACT_N {
        return Err(Error::TooLarge { what: "exact universe", value: t.n() as u64, cap: MAX_EXACT_N as u64 });
    }
    if samples == 0 {
        return Err(Error::Precondition("samples must be positive".into()));
    }
    let dmax = depths.iter().copied().max().unwrap_or(0);
    let dists: Vec<ExactVector> = root_distributions_common(t, dmax, DEFAULT_EXACT_CAP)?;
    let rats: Vec<Vec<ExactRational>> = dists.iter().map(ExactVector::to_rationals).collect();
    let (mut prefers_vd, mut prefers_vd_minus_one) = (0, 0);
    let mut rows = Vec::with_capacity(depths.len());
    for &d in depths {
        let height = u32::try_from(d).map_err(|_| Error::TooLarge { what: "depth", value: d, cap: 64 })?;
        let counts = mc_winner_counts(height, t, samples, seed, budget)?;
        let exact = &rats[d as usize];
        let tv = tv_distance(exact, &counts);
        let tv_previous = (d > 0).then(|| tv_distance(&rats[d as usize - 1], &counts));
        if let Some(prev) = &tv_previous {
            if tv < *prev {
                prefers_vd += 1;
            } else if *prev < tv {
                prefers_vd_minus_one += 1;
            }
        }
        rows.push(DepthRow {
            d,
            exact: exact.iter().map(ToString::to_string).collect(),
            counts,
            within_tolerance: tv <= *tv_tol,
            tv: tv.to_string(),
            tv_previous: tv_previous.map(|q| q.to_string()),
        });
    }
    Ok(RptReport {
        n: t.n(),
        edges: t.edges(),
        samples,
        seed,
        tv_tol: tv_tol.to_string(),
        rows,
        prefers_vd,
        prefers_vd_minus_one,
    })
}

/// CSV with one row per depth and candidate.
pub fn rpt_csv(r: &RptReport) -> String {
    let mut s = String::from("d,candidate,exact,exact_sci,mc_frequency\n");
    for row in &r.rows {
        for (i, (p, c)) in row.exact.iter().zip(&row.counts).enumerate() {
            let q = ExactRational::parse(p).expect("printed by ExactRational");
            let f = ExactRational::new((*c).into(), r.samples.into()).expect("positive samples");
            let _ = writeln!(s, "{},{},{},{},{}", row.d, i + 1, p, sci(&q, 12), sci(&f, 12));
        }
    }
    s
}

/// `rpt`.
///
/// Keys: `tournament`, `depths`, `samples`, `tv_tol`, `budget`, plus the
/// common keys.
pub fn cmd_rpt(p: &mut Params) -> Result<Outcome> {
    let common = Common::read(p, crate::arith::Backend::Exact)?;
    let t = parse_tournament(&p.string("tournament", "cycle3"))?;
    let depths = parse_depths(&p.string("depths", "0..=8"))?;
    let samples = p.u64("samples", 100_000)?;
    let tv_tol = p.rational("tv_tol", "1/100")?;
    let budget = p.opt_u64("budget")?.map_or(DEFAULT_LEAF_BUDGET, u128::from);
    let r = rpt_report(&t, &depths, samples, common.seed, &tv_tol, budget)?;
    let bad = r.rows.iter().filter(|row| !row.within_tolerance).count() as u64;
    let status = Status::from_counts(bad, 0);
    let summary = r
        .rows
        .iter()
        .map(|row| {
            let tv = ExactRational::parse(&row.tv).expect("printed by ExactRational");
            format!("d = {}: TV = {}", row.d, sci(&tv, 4))
        })
        .chain([format!("V^d closer at {} depths, V^(d-1) closer at {}", r.prefers_vd, r.prefers_vd_minus_one)])
        .collect();
    Ok(Outcome {
        command: Command::Rpt,
        status,
        files: vec![
            OutputFile { name: "rpt.json".into(), contents: to_json(&r)? },
            OutputFile { name: "rpt.csv".into(), contents: rpt_csv(&r) },
        ],
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
    fn parses_tournament_descriptions() {
        assert_eq!(parse_tournament("cycle3").unwrap(), Tournament::cycle3());
        assert_eq!(parse_tournament("transitive 4").unwrap(), Tournament::transitive(4));
        assert_eq!(parse_tournament("1>2, 2>3, 3>1").unwrap(), Tournament::spiral_cycle3());
        assert_eq!(parse_tournament("spiral").unwrap(), Tournament::spiral_cycle3());
        assert_eq!(parse_tournament("1 > 2").unwrap().n(), 2);
        assert!(parse_tournament("1>2, 2>3").is_err());
        assert!(parse_tournament("index 3 8").is_err());
        assert_eq!(parse_depths("0, 2..=4").unwrap(), vec![0, 2, 3, 4]);
    }

    #[test]
    fn depth_zero_is_uniform_and_two_players_match_the_recursion() {
        let two = parse_tournament("1>2").unwrap();
        let r = rpt_report(&two, &[0, 1, 3], 2000, 1, &q("1/20"), DEFAULT_LEAF_BUDGET).unwrap();
        assert_eq!(r.rows[0].exact, ["1/2", "1/2"]);
        // Player 2 survives a round only when both leaves are 2: p -> p^2.
        assert_eq!(r.rows[1].exact, ["3/4", "1/4"]);
        assert_eq!(r.rows[2].exact, ["255/256", "1/256"]);
        assert!(r.rows.iter().all(|row| row.within_tolerance));
    }

    #[test]
    fn total_variation_is_exact() {
        assert_eq!(tv_distance(&[q("1/2"), q("1/2")], &[3, 1]), q("1/4"));
        assert_eq!(tv_distance(&[q("1/3"), q("1/3"), q("1/3")], &[1, 1, 1]), q("0"));
    }

    #[test]
    fn rejects_large_universes_and_budgets() {
        let t = Tournament::transitive(11);
        assert!(matches!(rpt_report(&t, &[1], 10, 0, &q("1/100"), 1 << 20), Err(Error::TooLarge { .. })));
        let t = Tournament::cycle3();
        assert!(matches!(rpt_report(&t, &[8], 10, 0, &q("1/100"), 100), Err(Error::BudgetExceeded { .. })));
    }
}
