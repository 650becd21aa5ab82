//! One pass/fail line per acceptance criterion, with pinned tolerances.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use volterra_lab::arith::{make_simplex, Backend, EscalationPolicy, ExactRational};
use volterra_lab::experiments::props::{
    decay_checks, first_vertex_hit_check, invariant_checks, skipcorner2_check, skipcorner_check, CheckReport,
};
use volterra_lab::experiments::rpt::rpt_report;
use volterra_lab::experiments::{run, Command, Outcome, Params, Status};
use volterra_lab::qso::{aggregate, operator_of};
use volterra_lab::spiral::{v_step, SpiralPoint};
use volterra_lab::tournament::{build_tripartite, Tournament};
use volterra_lab::votetree::{guarantee, VotingTree, DEFAULT_LEAF_BUDGET};

const SEED: u64 = 20_261_017;
const INVARIANT_SAMPLES: u64 = 10_000;
const AGGREGATION_CASES: usize = 1000;
const MC_SAMPLES: u64 = 100_000;
const TV_TOL: &str = "1/100";
const SKIP_SAMPLES: u64 = 1000;
const FVH_SAMPLES: u64 = 1000;
const FVH_CAP: u64 = 10_000;
const MIN_COVERAGE: f64 = 0.99;
const MIN_FRACTION: f64 = 0.99;

const SIXPOINTS_CONFIG: &str = "eps = 1/5\nwindow = 100\nprecision_cap = 1048576\n";
const THEOREM_CONFIG: &str = "delta = 3/10\nq = 1000\nwindow = 100\ncrosscheck_q = 30\ncrosscheck_depth = 24\n";
const PROPS_CONFIG: &str = "samples = 10000\neps = 1/20, 1/10\nskip_eps = 1/10\nskip_d = 3\nskip_samples = 1000\nfvh_eps = 3/10\nfvh_samples = 1000\nfvh_cap = 10000\n";
const RPT_CONFIGS: [&str; 2] = [
    "tournament = cycle3\ndepths = 0..=8\nsamples = 100000\ntv_tol = 1/100\n",
    "tournament = 1>2\ndepths = 0..=8\nsamples = 100000\ntv_tol = 1/100\n",
];

fn q(s: &str) -> ExactRational {
    ExactRational::parse(s).unwrap()
}

struct Line {
    pass: bool,
    detail: String,
    limit: Duration,
}

fn clean(reports: &[CheckReport]) -> bool {
    reports.iter().all(|c| c.violations == 0 && c.undecided == 0)
}

fn describe(reports: &[CheckReport]) -> String {
    reports
        .iter()
        .map(|c| {
            let eps = c.params.get("eps").map(|e| format!("@{e}")).unwrap_or_default();
            format!("{}{eps} {}/{}/{}", c.name, c.samples, c.violations, c.undecided)
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn run_text(command: Command, config: &str) -> Outcome {
    run(command, Params::parse(config).unwrap()).unwrap()
}

fn json(out: &Outcome, name: &str) -> Value {
    serde_json::from_str(out.file(name).unwrap()).unwrap()
}

fn c1() -> Line {
    let mut reports = invariant_checks(SEED, INVARIANT_SAMPLES);
    reports.extend(decay_checks(SEED, INVARIANT_SAMPLES, &q("1/20"), 4, false));
    reports.extend(decay_checks(SEED, INVARIANT_SAMPLES, &q("1/10"), 104, false));
    Line {
        pass: clean(&reports),
        detail: format!("exact, zero tolerance; samples/violations/undecided: {}", describe(&reports)),
        limit: Duration::from_secs(120),
    }
}

fn intra_edges(rng: &mut ChaCha8Rng, sizes: [usize; 3]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    let mut start = 1;
    for s in sizes {
        for i in start..start + s {
            for j in i + 1..start + s {
                edges.push(if rng.gen() { (i, j) } else { (j, i) });
            }
        }
        start += s;
    }
    edges
}

fn c2() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = 0;
    let mut max_n = 0;
    for _ in 0..AGGREGATION_CASES {
        let n = rng.gen_range(3..=12);
        let a = rng.gen_range(1..=n - 2);
        let b = rng.gen_range(1..=n - a - 1);
        let sizes = [a, b, n - a - b];
        max_n = max_n.max(n);
        let (t, part) = build_tripartite(sizes, &intra_edges(&mut rng, sizes)).unwrap();
        let w: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=1 << 20)).collect();
        let s: u64 = w.iter().sum();
        let x = make_simplex(w.iter().map(|&v| ExactRational::new(v.into(), s.into()).unwrap()).collect()).unwrap();
        let lhs = aggregate(&operator_of(&t).apply(&x).unwrap(), &part).unwrap();
        let rhs = v_step(&SpiralPoint::new(aggregate(&x, &part).unwrap()).unwrap());
        if lhs.coords() != rhs.coords() {
            failures += 1;
        }
    }
    Line {
        pass: failures == 0,
        detail: format!("{AGGREGATION_CASES} random tripartite tournaments, n <= {max_n}, exact equality; {failures} mismatches"),
        limit: Duration::from_secs(60),
    }
}

fn c3() -> Line {
    let tree = VotingTree::new(4, vec![1, 2, 3, 4]).unwrap();
    let g = guarantee(&tree).unwrap();
    Line {
        pass: g.value == 2,
        detail: format!("balanced depth-2 tree on 4 candidates over all 64 tournaments: guarantee {} (expected 2)", g.value),
        limit: Duration::from_secs(1),
    }
}

fn c4() -> Line {
    let tol = q(TV_TOL);
    let mut pass = true;
    let mut arbitration = false;
    let mut parts = Vec::new();
    for (name, t) in [("3-cycle", Tournament::cycle3()), ("1>2", Tournament::build(2, &[(1, 2)]).unwrap())] {
        let r = rpt_report(&t, &(0..=8).collect::<Vec<_>>(), MC_SAMPLES, SEED, &tol, DEFAULT_LEAF_BUDGET).unwrap();
        let worst = r.rows.iter().map(|row| q(&row.tv)).max().unwrap();
        pass &= r.rows.iter().all(|row| row.within_tolerance);
        if t.n() == 2 {
            arbitration = r.prefers_vd > r.prefers_vd_minus_one;
        }
        parts.push(format!(
            "{name}: max TV {:.2e}, V^d closer at {} depths, V^(d-1) closer at {}",
            worst.to_f64(),
            r.prefers_vd,
            r.prefers_vd_minus_one
        ));
    }
    Line {
        pass: pass && arbitration,
        detail: format!(
            "d = 0..=8, {MC_SAMPLES} samples, TV <= {TV_TOL}, 1>2 favours V^d over V^(d-1): {arbitration}; {}",
            parts.join("; ")
        ),
        limit: Duration::from_secs(120),
    }
}

fn c5() -> Line {
    let pol = EscalationPolicy::default();
    let eps = q("1/10");
    let a = skipcorner_check(SEED, SKIP_SAMPLES, &eps, 3, Backend::Exact, &pol).unwrap();
    let b = skipcorner2_check(SEED, SKIP_SAMPLES, &eps, 3, Backend::Exact, &pol).unwrap();
    let constants = a.params["eps_prime"] == q("1/20").pow(8).to_string() && b.params["eps_prime"] == "1/640";
    let reports = [a, b];
    Line {
        pass: constants && clean(&reports),
        detail: format!(
            "eps = 1/10, D = 3, radii (1/20)^8 and 1/640 (match: {constants}), exact trajectories; {}",
            describe(&reports)
        ),
        limit: Duration::from_secs(300),
    }
}

fn c6() -> Line {
    let r = first_vertex_hit_check(SEED, FVH_SAMPLES, &q("3/10"), FVH_CAP, &EscalationPolicy::default()).unwrap();
    Line {
        pass: clean(std::slice::from_ref(&r)),
        detail: format!(
            "{FVH_SAMPLES} points of M(3/10), cap {FVH_CAP}: {} over bound {} or cap, {} undecided, max hit {}, heuristic range {}",
            r.violations, r.params["D_bound"], r.undecided, r.notes["max_hit"], r.notes["heuristic_range"]
        ),
        limit: Duration::from_secs(300),
    }
}

fn c7(out: &Outcome) -> Line {
    let v = json(out, "certificate.json");
    let cert = &v["certificate"];
    let close = cert["points_close"].as_array().unwrap();
    let coverage = cert["coverage"].as_array().unwrap();
    let undecided = coverage.iter().filter(|c| c["verdict"] == "undecided").count();
    let fraction = v["coverage_fraction"].as_f64().unwrap();
    let all_close = close.len() == 6 && close.iter().all(|c| c == "true");
    Line {
        pass: all_close && undecided == 0 && fraction >= MIN_COVERAGE && coverage.len() == 101,
        detail: format!(
            "eps = 1/5, window {}..={}: six points close {all_close}, coverage {fraction:.4} (>= {MIN_COVERAGE}), {undecided} undecided, max precision {} bits",
            cert["d_lo"],
            cert["d_hi"],
            cert["precision"]["max_bits"].as_array().unwrap().iter().map(|b| b.as_u64().unwrap()).max().unwrap()
        ),
        limit: Duration::from_secs(900),
    }
}

fn c8(out: &Outcome) -> Line {
    let v = json(out, "theorem_demo.json");
    let ts = v["tournaments"].as_array().unwrap();
    let small = ts.iter().all(|t| t["small_parts"] == true && t["tripartite"] == true);
    let fraction = v["fraction"].as_f64().unwrap();
    let cross = v["crosscheck"].as_array().unwrap();
    let agree = cross.len() == 6 && cross.iter().all(|c| c == true);
    let sizes: Vec<String> = ts.iter().map(|t| t["sizes"].to_string()).collect();
    Line {
        pass: small && fraction >= MIN_FRACTION && agree && out.status == Status::Pass,
        detail: format!(
            "delta = 3/10, q = 1000, parts {}; |A|,|B| <= delta n: {small}; window {}..={}: fraction {fraction:.4} (>= {MIN_FRACTION}); exact cross-check n = 30, d <= 24: {agree}",
            sizes.join(" "),
            v["d_lo"],
            v["d_hi"]
        ),
        limit: Duration::from_secs(1800),
    }
}

fn c9(first: &[(Command, &str, Outcome)]) -> Line {
    let mut same = 0;
    let mut names = Vec::new();
    for (command, config, out) in first {
        let again = run_text(*command, config);
        if again.files == out.files {
            same += 1;
        }
        names.extend(out.files.iter().map(|f| f.name.clone()));
    }
    Line {
        pass: same == first.len(),
        detail: format!("{same}/{} reruns byte-identical ({})", first.len(), names.join(", ")),
        limit: Duration::from_secs(1800),
    }
}

fn report(k: usize, f: impl FnOnce() -> Line, failed: &mut usize) {
    let t = Instant::now();
    let line = f();
    let took = t.elapsed();
    let on_time = took <= line.limit;
    let ok = line.pass && on_time;
    if !ok {
        *failed += 1;
    }
    println!(
        "criterion {k}: {} | {} | {:.1}s (limit {}s{})",
        if ok { "PASS" } else { "FAIL" },
        line.detail,
        took.as_secs_f64(),
        line.limit.as_secs(),
        if on_time { "" } else { ", exceeded" }
    );
}

fn main() -> ExitCode {
    let mut failed = 0;
    report(1, c1, &mut failed);
    report(2, c2, &mut failed);
    report(3, c3, &mut failed);
    report(4, c4, &mut failed);
    report(5, c5, &mut failed);
    report(6, c6, &mut failed);
    let mut runs = Vec::new();
    report(
        7,
        || {
            let out = run_text(Command::Sixpoints, SIXPOINTS_CONFIG);
            let line = c7(&out);
            runs.push((Command::Sixpoints, SIXPOINTS_CONFIG, out));
            line
        },
        &mut failed,
    );
    report(
        8,
        || {
            let out = run_text(Command::TheoremDemo, THEOREM_CONFIG);
            let line = c8(&out);
            runs.push((Command::TheoremDemo, THEOREM_CONFIG, out));
            line
        },
        &mut failed,
    );
    report(
        9,
        || {
            runs.push((Command::VerifyProps, PROPS_CONFIG, run_text(Command::VerifyProps, PROPS_CONFIG)));
            for c in RPT_CONFIGS {
                runs.push((Command::Rpt, c, run_text(Command::Rpt, c)));
            }
            c9(&runs)
        },
        &mut failed,
    );
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
