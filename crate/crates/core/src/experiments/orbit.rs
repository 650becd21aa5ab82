//! Orbit tables and barycentric trajectory plots.

use std::fmt::Write as _;

use serde::Serialize;

use crate::arith::{decide, Backend, Dyadic, EscalationPolicy, ExactRational, Interval, Scalar, Verdict};
use crate::error::{Error, Result};
use crate::qso::DEFAULT_EXACT_CAP;
use crate::spiral::{phi, v_step, v_step_common, SpiralPoint};

use super::{point_strings, sci, to_json, Common, Outcome, OutputFile, Params, Status};

/// Significant digits printed for orbit values.
pub const ORBIT_DIGITS: u32 = 17;

/// One row of an orbit table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitRow {
    /// Step index.
    pub step: u64,
    /// Coordinates (midpoints for intervals, or the hexadecimal enclosure when
    /// too small for decimal output).
    pub coords: [String; 3],
    /// `phi` (midpoint for intervals).
    pub phi: String,
}

/// An orbit with its certified potential check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitTable {
    /// Backend used.
    pub backend: Backend,
    /// Precision of the final run (zero for exact).
    pub precision: u32,
    /// Rows for steps `0..=steps`.
    pub rows: Vec<OrbitRow>,
    /// Certified `phi(V(p)) <= phi(p)` along every consecutive pair.
    pub phi_nonincreasing: Verdict,
    /// Floating-point coordinates for plotting.
    #[serde(skip)]
    pub floats: Vec<[f64; 3]>,
}

fn walk<S: Scalar>(start: SpiralPoint<S>, steps: u64) -> Vec<SpiralPoint<S>> {
    let mut out = Vec::with_capacity(steps as usize + 1);
    out.push(start);
    for _ in 0..steps {
        let next = v_step(out.last().expect("nonempty"));
        out.push(next);
    }
    out
}

fn monotone<S: Scalar>(pts: &[SpiralPoint<S>]) -> Verdict {
    let phis: Vec<S> = pts.iter().map(phi).collect();
    phis.windows(2).fold(Verdict::True, |v, w| v.and(w[1].le(&w[0])))
}

/// Endpoints outside `2^-MAX_DECIMAL_EXP..2^MAX_DECIMAL_EXP` in magnitude are
/// printed as hexadecimal intervals.
const MAX_DECIMAL_EXP: i128 = 4096;

fn exact_text(q: &ExactRational) -> String {
    sci(q, ORBIT_DIGITS)
}

fn interval_text(c: &Interval) -> String {
    let extreme = |d: &Dyadic| !d.is_zero() && d.top().abs() > MAX_DECIMAL_EXP;
    if extreme(c.lo()) || extreme(c.hi()) {
        return c.to_string();
    }
    sci(&c.midpoint(), ORBIT_DIGITS)
}

fn table<S: Scalar>(
    backend: Backend,
    precision: u32,
    pts: &[SpiralPoint<S>],
    verdict: Verdict,
    text: impl Fn(&S) -> String,
) -> OrbitTable {
    let rows = pts
        .iter()
        .enumerate()
        .map(|(i, p)| OrbitRow { step: i as u64, coords: [0, 1, 2].map(|k| text(&p.coords()[k])), phi: text(&phi(p)) })
        .collect();
    let floats = pts.iter().map(|p| [0, 1, 2].map(|k| p.coords()[k].to_f64())).collect();
    OrbitTable { backend, precision, rows, phi_nonincreasing: verdict, floats }
}

/// The orbit of `start` for `steps` steps.
///
/// A fixed start gives constant rows under either backend. Otherwise the
/// exact backend is limited to the exact-step cap and the interval backend
/// escalates precision until the potential check is decided.
pub fn orbit_table(
    start: &SpiralPoint<ExactRational>,
    steps: u64,
    backend: Backend,
    policy: &EscalationPolicy,
) -> Result<OrbitTable> {
    if v_step(start) == *start {
        let pts = vec![start.clone(); steps as usize + 1];
        return Ok(table(backend, 0, &pts, Verdict::True, exact_text));
    }
    match backend {
        Backend::Exact => {
            if steps > DEFAULT_EXACT_CAP {
                return Err(Error::ExactBlowup { steps, cap: DEFAULT_EXACT_CAP });
            }
            let mut v = start.to_common();
            let mut pts = vec![start.clone()];
            for _ in 0..steps {
                v = v_step_common(&v);
                pts.push(SpiralPoint::from_unchecked(v.to_rationals()));
            }
            let v = monotone(&pts);
            Ok(table(backend, 0, &pts, v, exact_text))
        }
        Backend::Interval => {
            let (v, prec) = decide(policy, |p| monotone(&walk(start.to_interval(p), steps)));
            let pts: Vec<SpiralPoint<Interval>> = walk(start.to_interval(prec), steps);
            Ok(table(backend, prec, &pts, v, interval_text))
        }
    }
}

/// CSV with header `step,x,y,z,phi`.
pub fn orbit_csv(t: &OrbitTable) -> String {
    let mut s = String::from("step,x,y,z,phi\n");
    for r in &t.rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.step, r.coords[0], r.coords[1], r.coords[2], r.phi);
    }
    s
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 50.0;

fn project(p: [f64; 3]) -> (f64, f64) {
    let side = SIZE - 2.0 * MARGIN;
    let h = side * 3f64.sqrt() / 2.0;
    let bottom = MARGIN + (SIZE - 2.0 * MARGIN + h) / 2.0;
    let corners = [(MARGIN, bottom), (SIZE - MARGIN, bottom), (SIZE / 2.0, bottom - h)];
    let x = p[0] * corners[0].0 + p[1] * corners[1].0 + p[2] * corners[2].0;
    let y = p[0] * corners[0].1 + p[1] * corners[1].1 + p[2] * corners[2].1;
    (x, y)
}

/// An SVG of the simplex with the trajectory as a polyline.
///
/// Corners: x bottom left, y bottom right, z top.
pub fn orbit_svg(points: &[[f64; 3]], title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<title>{title}</title>"#);
    let c: Vec<(f64, f64)> = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]].into_iter().map(project).collect();
    let _ = writeln!(
        s,
        r#"<polygon points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        c[0].0, c[0].1, c[1].0, c[1].1, c[2].0, c[2].1
    );
    for ((x, y), (label, dx, dy)) in c.iter().zip([("x", -18.0, 18.0), ("y", 8.0, 18.0), ("z", -4.0, -10.0)]) {
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="16">{label}</text>"#, x + dx, y + dy);
    }
    let mut line = String::new();
    for p in points {
        let (x, y) = project(*p);
        let _ = write!(line, "{x:.3},{y:.3} ");
    }
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="0.8"/>"#,
        line.trim_end()
    );
    if let Some(p) = points.first() {
        let (x, y) = project(*p);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="crimson"/>"#);
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Serialize)]
struct OrbitSummary<'a> {
    command: &'a str,
    start: Vec<String>,
    steps: u64,
    backend: Backend,
    precision: u32,
    phi_nonincreasing: Verdict,
}

/// `orbit` (table, optional plot) and `plot` (plot only).
///
/// Keys: `start`, `steps`, `svg` (orbit only), plus the common keys.
pub fn cmd_orbit(p: &mut Params, plot_only: bool) -> Result<Outcome> {
    let common = Common::read(p, Backend::Interval)?;
    let default_start = if plot_only { "0.3, 0.33, 0.37" } else { "0.4, 0.35, 0.25" };
    let start = p.point("start", default_start)?;
    let steps = p.u64("steps", if plot_only { 400 } else { 200 })?;
    let svg = plot_only || p.bool("svg", false)?;
    let t = orbit_table(&start, steps, common.backend, &common.policy)?;
    let status = match t.phi_nonincreasing {
        Verdict::True => Status::Pass,
        Verdict::False => Status::Violation,
        Verdict::Undecided => Status::Undecided,
    };
    let command = if plot_only { "plot" } else { "orbit" };
    let mut files = Vec::new();
    if !plot_only {
        files.push(OutputFile { name: "orbit.csv".into(), contents: orbit_csv(&t) });
    }
    let summary = OrbitSummary {
        command,
        start: point_strings(&start),
        steps,
        backend: t.backend,
        precision: t.precision,
        phi_nonincreasing: t.phi_nonincreasing,
    };
    files.push(OutputFile { name: format!("{command}.json"), contents: to_json(&summary)? });
    if svg {
        let title = format!("Trajectory of ({}) under V, {steps} steps", point_strings(&start).join(", "));
        files.push(OutputFile { name: "orbit.svg".into(), contents: orbit_svg(&t.floats, &title) });
    }
    Ok(Outcome {
        command: if plot_only { super::Command::Plot } else { super::Command::Orbit },
        status,
        files,
        summary: vec![format!(
            "{steps} steps, backend {}, precision {}, phi non-increasing: {:?}",
            t.backend, t.precision, t.phi_nonincreasing
        )],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spiral::Corner;

    #[test]
    fn fixed_points_give_constant_rows() {
        for start in [SpiralPoint::center(0), SpiralPoint::corner(Corner::Y, 0)] {
            for backend in [Backend::Exact, Backend::Interval] {
                let t = orbit_table(&start, 20, backend, &EscalationPolicy::default()).unwrap();
                assert!(t.rows.windows(2).all(|w| w[0].coords == w[1].coords && w[0].phi == w[1].phi));
                assert_eq!(t.phi_nonincreasing, Verdict::True);
            }
        }
    }

    #[test]
    fn generic_orbit_has_decreasing_potential() {
        let start = SpiralPoint::parse(&["0.4", "0.35", "0.25"]).unwrap();
        let t = orbit_table(&start, 200, Backend::Interval, &EscalationPolicy::default()).unwrap();
        assert_eq!(t.rows.len(), 201);
        assert_eq!(t.phi_nonincreasing, Verdict::True);
        let csv = orbit_csv(&t);
        assert!(csv.starts_with("step,x,y,z,phi\n0,4.0000000000000000e-1,"));
        assert!(matches!(
            orbit_table(&start, 25, Backend::Exact, &EscalationPolicy::default()),
            Err(crate::error::Error::ExactBlowup { .. })
        ));
    }

    #[test]
    fn svg_is_well_formed() {
        let s = orbit_svg(&[[1.0 / 3.0; 3], [1.0, 0.0, 0.0]], "t");
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<polyline").count(), 1);
    }
}
