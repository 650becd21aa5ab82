//! Closed-form radii and step bounds.

use volterra_lab::arith::make_rational;
use volterra_lab::spiral::{epsclose_d_bound, skipcorner2_eps, skipcorner_eps};

fn main() -> volterra_lab::error::Result<()> {
    let eps = make_rational(1, 10)?;
    println!("skipcorner radius at D = 3: {}", skipcorner_eps(&eps, 3)?.result);
    println!("skipcorner radius at D = 100: {}", skipcorner_eps(&eps, 100)?.result);
    println!("skipcorner2 radius at D = 3: {}", skipcorner2_eps(&eps, 3)?.result);

    let r = epsclose_d_bound(&make_rational(3, 10)?)?;
    println!("corner-hit bound at eps = 3/10: D = {} (C = {:?}, N3 = {:?})", r.d, r.c, r.n3);
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(())
}
