//! Drive a command from configuration text, as the CLI does.

use volterra_lab::experiments::{run, Command, Params};

fn main() -> volterra_lab::error::Result<()> {
    let text = "# two players, heights 0 to 6\ntournament = 1>2\ndepths = 0..=6\nsamples = 20000\nseed = 3\n";
    let out = run(Command::Rpt, Params::parse(text)?)?;
    for line in &out.summary {
        println!("{line}");
    }
    println!("status {:?}, exit code {}", out.status, out.status.exit_code());
    print!("{}", out.file("rpt.csv").unwrap_or_default());
    Ok(())
}
