//! Runs every acceptance suite at its stated tolerance and prints one
//! pass/fail line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use cdconf_core::suites::{self, SuiteConfig};

const SEED: u64 = 7;

// Runs without the libtest harness so the table shows up in `cargo test`.
fn main() -> ExitCode {
    let cfg = SuiteConfig { seed: SEED, ..Default::default() };
    let mut failed = Vec::new();
    for (k, suite) in suites::SUITES.iter().enumerate() {
        let t = Instant::now();
        let report = suite.run(&cfg);
        let secs = t.elapsed().as_secs_f64();
        println!("[{:>2}] {:<5} {:<32} {:>7.2}s", k + 1, if report.passed { "PASS" } else { "FAIL" }, suite.name, secs);
        for c in &report.checks {
            println!("         {:<4} {:<60} {:>11.3e} (limit {:.1e})", if c.passed { "ok" } else { "FAIL" }, c.label, c.value, c.limit);
        }
        for n in &report.notes {
            println!("         note: {n}");
        }
        if !report.passed {
            failed.push(suite.name);
        }
    }
    println!("acceptance: {} of {} criteria passed", suites::SUITES.len() - failed.len(), suites::SUITES.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
