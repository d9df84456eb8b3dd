//! Runs a JSON job file, or a built-in job by name, and prints the summary.
//!
//! ```text
//! cargo run --example run_job -- nil_circular_cylinder
//! cargo run --example run_job -- path/to/job.json
//! ```

use nilgauss::job::{builtin_job, run, JobConfig};

fn main() -> nilgauss::Result<()> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "nil_circular_cylinder".into());
    let config = match builtin_job(&arg) {
        Some(c) => c,
        None => JobConfig::from_json(&std::fs::read_to_string(&arg)?)?,
    };
    let report = run(&config)?;
    println!("{} rows, max defect {:.2e}, max oracle gap {:.2e}", report.rows.len(), report.summary.max_defect, report.summary.max_oracle_gap);
    for (name, check) in &report.summary.checks {
        println!("  {name:<14} {:.2e} (tol {:.0e}) {}", check.value, check.tol, if check.passed { "ok" } else { "FAILED" });
    }
    report.write_csv(std::io::stdout())?;
    Ok(())
}
