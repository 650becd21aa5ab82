//! Command layer: each command reads a flat configuration, runs one
//! experiment and returns its report files.
//!
//! Outputs depend only on the configuration, so reruns are byte-identical
//! regardless of thread count.
//!
//! Exit codes: 0 pass, 1 property violation, 2 undecided at the precision cap,
//! 3 usage or input error.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::arith::{floor_log2, ExactRational, Verdict};
use crate::error::{Error, Result};
use crate::spiral::{in_m, SpiralPoint};

pub mod config;
pub mod demo;
pub mod orbit;
pub mod props;
pub mod rpt;

pub use config::{Common, Params};

/// Subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    /// Orbit table, optionally with a plot.
    Orbit,
    /// Trajectory plot only.
    Plot,
    /// Property sweeps for the spiral propositions.
    VerifyProps,
    /// Exact root distributions against Monte Carlo.
    Rpt,
    /// Six-point coverage certificate.
    Sixpoints,
    /// Small-scale theorem demonstration on tripartite tournaments.
    TheoremDemo,
}

impl Command {
    /// Every command, in CLI order.
    pub const ALL: [Command; 6] =
        [Command::Orbit, Command::Plot, Command::VerifyProps, Command::Rpt, Command::Sixpoints, Command::TheoremDemo];

    /// CLI name.
    pub fn name(self) -> &'static str {
        match self {
            Command::Orbit => "orbit",
            Command::Plot => "plot",
            Command::VerifyProps => "verify-props",
            Command::Rpt => "rpt",
            Command::Sixpoints => "sixpoints",
            Command::TheoremDemo => "theorem-demo",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown command `{s}`")))
    }
}

/// Overall result of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Every check passed.
    Pass,
    /// Some verdict was undecided at the precision cap.
    Undecided,
    /// Some check failed.
    Violation,
}

impl Status {
    /// Process exit code.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Violation => 1,
            Status::Undecided => 2,
        }
    }

    /// Combine: a violation dominates an undecided verdict, which dominates a pass.
    pub fn worst(self, o: Status) -> Status {
        self.max(o)
    }

    /// From counts of violations and undecided cases.
    pub fn from_counts(violations: u64, undecided: u64) -> Status {
        if violations > 0 {
            Status::Violation
        } else if undecided > 0 {
            Status::Undecided
        } else {
            Status::Pass
        }
    }
}

/// Exit code for a failed run.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::UndecidedAtCap { .. } => 2,
        Error::CapExceeded(_) => 1,
        _ => 3,
    }
}

/// A named report file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputFile {
    /// File name inside the output directory.
    pub name: String,
    /// Contents.
    pub contents: String,
}

/// Files and summary of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// Command that ran.
    pub command: Command,
    /// Overall status.
    pub status: Status,
    /// Report files.
    pub files: Vec<OutputFile>,
    /// Human-readable summary lines.
    pub summary: Vec<String>,
}

impl Outcome {
    /// Write every file into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for f in &self.files {
            fs::write(dir.join(&f.name), &f.contents)?;
        }
        Ok(())
    }

    /// The contents of a file by name.
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }
}

/// Run a command on its parameters; every key must be consumed.
pub fn run(command: Command, mut params: Params) -> Result<Outcome> {
    let out = match command {
        Command::Orbit => orbit::cmd_orbit(&mut params, false)?,
        Command::Plot => orbit::cmd_orbit(&mut params, true)?,
        Command::VerifyProps => props::cmd_verify_props(&mut params)?,
        Command::Rpt => rpt::cmd_rpt(&mut params)?,
        Command::Sixpoints => demo::cmd_sixpoints(&mut params)?,
        Command::TheoremDemo => demo::cmd_theorem_demo(&mut params)?,
    };
    params.finish()?;
    Ok(out)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// A rational in scientific notation with `digits` significant digits,
/// rounded to nearest.
pub fn sci(q: &ExactRational, digits: u32) -> String {
    sci_rounded(q, digits, Rounding::Nearest)
}

fn pow10(e: u32) -> Integer {
    Integer::from(Integer::u_pow_u(10, e))
}

fn floor_log10(q: &Rational) -> i64 {
    let l2 = floor_log2(&ExactRational::from_rug(q.clone())).expect("positive");
    let mut e = (l2 as f64 * std::f64::consts::LOG10_2).floor() as i64 - 1;
    let ten_pow = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from(pow10(e as u32))
        } else {
            Rational::from((Integer::from(1), pow10((-e) as u32)))
        }
    };
    while ten_pow(e + 1) <= *q {
        e += 1;
    }
    while ten_pow(e) > *q {
        e -= 1;
    }
    e
}

/// Rounding direction for decimal output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    /// Towards minus infinity.
    Down,
    /// Towards plus infinity.
    Up,
    /// To nearest, ties away from zero.
    Nearest,
}

impl Rounding {
    fn flip(self) -> Rounding {
        match self {
            Rounding::Down => Rounding::Up,
            Rounding::Up => Rounding::Down,
            Rounding::Nearest => Rounding::Nearest,
        }
    }
}

/// `q` in scientific notation with `digits` significant digits.
pub fn sci_rounded(q: &ExactRational, digits: u32, mode: Rounding) -> String {
    let digits = digits.max(1);
    let q = q.as_rug();
    if *q == 0 {
        return "0".into();
    }
    if *q < 0 {
        let s = sci_rounded(&ExactRational::from_rug(Rational::from(-q)), digits, mode.flip());
        return format!("-{s}");
    }
    let mut e = floor_log10(q);
    let shift = i64::from(digits) - 1 - e;
    let scaled = if shift >= 0 {
        Rational::from(q * pow10(shift as u32))
    } else {
        Rational::from(q / pow10((-shift) as u32))
    };
    let mut m = match mode {
        Rounding::Down => scaled.floor(),
        Rounding::Up => scaled.ceil(),
        Rounding::Nearest => (scaled + Rational::from((1, 2))).floor(),
    }
    .into_numer_denom()
    .0;
    if m == pow10(digits) {
        m = pow10(digits - 1);
        e += 1;
    }
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    if tail.is_empty() {
        format!("{head}e{e}")
    } else {
        format!("{head}.{tail}e{e}")
    }
}


/// Random interior point with weights in `1..=2^bits`.
pub fn random_interior(rng: &mut ChaCha8Rng, bits: u32) -> SpiralPoint<ExactRational> {
    let top = 1u64 << bits;
    let w = [0; 3].map(|_| rng.gen_range(1..=top));
    weights_point(w)
}

/// Random point of the closed simplex with weights in `0..=2^bits`.
pub fn random_closed(rng: &mut ChaCha8Rng, bits: u32) -> SpiralPoint<ExactRational> {
    let top = 1u64 << bits;
    loop {
        let w = [0; 3].map(|_| rng.gen_range(0..=top));
        if w.iter().any(|&v| v > 0) {
            return weights_point(w);
        }
    }
}

/// Random interior point of `M(eps)`, by rejection.
pub fn random_in_m(rng: &mut ChaCha8Rng, bits: u32, eps: &ExactRational) -> SpiralPoint<ExactRational> {
    loop {
        let p = random_interior(rng, bits);
        if in_m(&p, eps) == Verdict::True {
            return p;
        }
    }
}

/// A random rational in `[0, 1]` with denominator `2^bits`.
pub fn random_unit(rng: &mut ChaCha8Rng, bits: u32) -> ExactRational {
    let top = 1u64 << bits;
    ExactRational::new(rng.gen_range(0..=top).into(), top.into()).expect("nonzero")
}

fn weights_point(w: [u64; 3]) -> SpiralPoint<ExactRational> {
    let s: u64 = w.iter().sum();
    let c = w.map(|v| ExactRational::new(v.into(), s.into()).expect("positive sum"));
    SpiralPoint::from_coords(c).expect("weights give a simplex point")
}

/// Point coordinates as exact strings.
pub fn point_strings(p: &SpiralPoint<ExactRational>) -> Vec<String> {
    p.coords().iter().map(|c| c.to_string()).collect()
}
