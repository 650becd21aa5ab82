//! Certify six-point coverage of the x corner at `eps = 1/5`.

use volterra_lab::arith::make_rational;
use volterra_lab::sixpoints::{certify, PipelineConfig, POINT_NAMES};

fn main() -> volterra_lab::error::Result<()> {
    let cfg = PipelineConfig::new(make_rational(1, 5)?);
    let (six, cert) = certify(&cfg)?;
    println!("seed hits {:?}, D2 = {}, amplification {:?}", six.seeds.hits, six.d2, six.amplified.extra);
    for (name, p) in POINT_NAMES.iter().zip(&cert.points) {
        println!("{name}: {} steps from seed", p.steps);
    }
    println!(
        "window {}..={}: {} of {} covered, violations {:?}, max precision {:?}",
        cert.d_lo,
        cert.d_hi,
        cert.covered,
        cert.coverage.len(),
        cert.violations,
        cert.precision.max_bits
    );
    Ok(())
}
