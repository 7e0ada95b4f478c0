//! Running a JSON configuration in-process, as the `semigroup-lab` binary does.
//!
//! `cargo run --example run_config -- [CONFIG]`

use semigroup_lab::cli::{parse_config, report_json, run, Command};

const DEFAULT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/constants_pair.json");

fn main() -> semigroup_lab::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| DEFAULT.into());
    let config = parse_config(&std::fs::read_to_string(&path)?)?;
    let out = run(&config, Command::Verify)?;
    for tuple in &out.report.tuples {
        println!("{}: {} analyses", tuple.name, tuple.analyses.len());
    }
    let s = &out.report.summary;
    println!("errors {}, failed checks {:?}, exit code {}", s.errors, s.failed_checks, s.exit_code);
    println!("report: {} bytes of JSON", report_json(&out.report)?.len());
    Ok(())
}
