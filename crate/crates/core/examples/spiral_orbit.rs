//! Iterate the spiral map and write its orbit as CSV and SVG.

use volterra_lab::arith::{Backend, EscalationPolicy};
use volterra_lab::experiments::orbit::{orbit_csv, orbit_svg, orbit_table};
use volterra_lab::spiral::{phi, rotate, v_step, SpiralPoint};

fn main() -> volterra_lab::error::Result<()> {
    let p = SpiralPoint::parse(&["0.4", "0.35", "0.25"])?;
    println!("V(p) = {:?}", v_step(&p).coords().iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("V(R(p)) == R(V(p)): {}", v_step(&rotate(&p)) == rotate(&v_step(&p)));
    println!("phi(p) = {}, phi(V(p)) = {}", phi(&p), phi(&v_step(&p)));

    let t = orbit_table(&p, 200, Backend::Interval, &EscalationPolicy::default())?;
    println!("200 steps at {} bits, phi non-increasing: {:?}", t.precision, t.phi_nonincreasing);
    let dir = std::env::temp_dir().join("volterra-lab-orbit");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("orbit.csv"), orbit_csv(&t))?;
    std::fs::write(dir.join("orbit.svg"), orbit_svg(&t.floats, "orbit of (0.4, 0.35, 0.25)"))?;
    println!("wrote {}", dir.display());
    Ok(())
}
