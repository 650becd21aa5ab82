//! Six tripartite tournaments whose random trees elect into a small part.

use volterra_lab::arith::make_rational;
use volterra_lab::experiments::demo::{exact_part_probabilities, theorem_demo, DemoConfig};

fn main() -> volterra_lab::error::Result<()> {
    let ps = exact_part_probabilities([1, 1, 2], 4)?;
    println!("parts (1, 1, 2): P(winner in A) for heights 0..=4 = {:?}", ps.iter().map(ToString::to_string).collect::<Vec<_>>());

    let mut cfg = DemoConfig::new(make_rational(3, 10)?, 1000);
    cfg.crosscheck_depth = 8;
    let r = theorem_demo(&cfg)?;
    for t in &r.tournaments {
        println!("parts {:?}, max out-degree in A {} (bound {})", t.sizes, t.max_outdegree_a, r.outdegree_bound);
    }
    println!("window {}..={}: {} of {} heights reach 1 - delta", r.d_lo, r.d_hi, r.met, r.rows.len());
    println!("cross-check at n = {}: {:?}", r.crosscheck_n, r.crosscheck);
    Ok(())
}
