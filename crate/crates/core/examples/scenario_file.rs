//! Run an analytic sweep from a scenario file and print the CSV.
//!
//! `cargo run --example scenario_file -- scenarios/figure2.toml`

use std::path::PathBuf;

use an_wiretap::experiment::cmd_analytic;
use an_wiretap::scenario::ScenarioFile;

fn main() -> an_wiretap::error::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/figure2.toml"));
    let scenario = ScenarioFile::load(&path)?;
    let table = cmd_analytic(&scenario)?;
    print!("{}", table.to_csv_string()?);
    Ok(())
}
