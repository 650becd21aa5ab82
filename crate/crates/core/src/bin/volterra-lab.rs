use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use volterra_lab::experiments::{error_exit_code, run, Command, Params};

/// Certified experiments on the spiral map and random voting trees.
#[derive(Parser, Debug)]
#[command(name = "volterra-lab", version)]
struct Cli {
    /// orbit, plot, verify-props, rpt, sixpoints or theorem-demo.
    command: String,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// exact or interval.
    #[arg(long)]
    backend: Option<String>,
    /// Initial interval precision in bits.
    #[arg(long)]
    precision_start: Option<u32>,
    /// Largest interval precision in bits.
    #[arg(long)]
    precision_cap: Option<u32>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}

fn execute(cli: &Cli) -> volterra_lab::error::Result<u8> {
    let command: Command = cli.command.parse()?;
    let mut params = match &cli.config {
        Some(path) => Params::parse(&std::fs::read_to_string(path)?)?,
        None => Params::default(),
    };
    if let Some(s) = cli.seed {
        params.set("seed", s.to_string());
    }
    if let Some(b) = &cli.backend {
        params.set("backend", b.clone());
    }
    if let Some(b) = cli.precision_start {
        params.set("precision_start", b.to_string());
    }
    if let Some(b) = cli.precision_cap {
        params.set("precision_cap", b.to_string());
    }
    let outcome = run(command, params)?;
    outcome.write(&cli.out)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for f in &outcome.files {
        println!("wrote {}", cli.out.join(&f.name).display());
    }
    println!("status: {:?}", outcome.status);
    Ok(outcome.status.exit_code() as u8)
}
