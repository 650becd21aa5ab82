//! Certified hitting times of corner boxes.

use volterra_lab::arith::{make_rational, EscalationPolicy};
use volterra_lab::spiral::{first_vertex_hit, hit_corner, Corner, SpiralPoint};

fn main() -> volterra_lab::error::Result<()> {
    let policy = EscalationPolicy::default();
    let p = SpiralPoint::from_fracs([(1, 20), (1, 20), (9, 10)])?;
    let eps = make_rational(1, 10)?;
    for c in Corner::ALL {
        println!("(1/20, 1/20, 9/10) reaches the {c:?} corner box at step {}", hit_corner(&p, &eps, c, 10_000, &policy)?);
    }

    let q = SpiralPoint::from_fracs([(1, 2), (1, 4), (1, 4)])?;
    let (step, corner) = first_vertex_hit(&q, &eps, 10_000, &policy)?;
    println!("(1/2, 1/4, 1/4) first reaches a corner box at step {step}, corner {corner:?}");
    Ok(())
}
