//! Exact root distributions through the quadratic stochastic operator.

use volterra_lab::qso::{aggregate, operator_of, root_distribution, root_distribution_interval};
use volterra_lab::tournament::{build_tripartite_transitive, Tournament};

fn main() -> volterra_lab::error::Result<()> {
    let two = Tournament::build(2, &[(1, 2)])?;
    for d in 0..=4 {
        let x = root_distribution(&two, d)?;
        println!("1 beats 2, height {d}: {:?}", x.coords().iter().map(ToString::to_string).collect::<Vec<_>>());
    }

    let t = Tournament::transitive(5);
    let x = root_distribution_interval(&t, 12, 128)?;
    let c = &x.coords()[0];
    println!("transitive(5), height 12: candidate 1 wins with probability {} (certified to {:.0} bits)", c.midpoint().to_sci(20), c.accuracy_bits());

    let (t, p) = build_tripartite_transitive([1, 2, 3])?;
    let x = operator_of(&t).iterate(&root_distribution(&t, 0)?, 3)?;
    let parts = aggregate(&x, &p)?;
    println!("tripartite (1, 2, 3), height 3, part masses {:?}", parts.coords().iter().map(ToString::to_string).collect::<Vec<_>>());
    Ok(())
}
