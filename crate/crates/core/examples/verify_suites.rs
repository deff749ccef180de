//! Run the property-verification suites, optionally filtered by name.
//!
//! ```bash
//! cargo run --release --example verify_suites
//! cargo run --release --example verify_suites -- weight
//! ```

use westervelt::verify::{run_suites, VerifyOptions};

pub fn run_example(filter: Option<&str>) -> bool {
    let reports = run_suites(filter, &VerifyOptions::default());
    for r in &reports {
        println!("{} {:<26} {:>3} checks {:>7.2}s", if r.passed { "PASS" } else { "FAIL" }, r.name, r.checks.len(), r.elapsed_s);
        for c in r.checks.iter().filter(|c| !c.passed) {
            println!("     {}: {}", c.name, c.detail);
        }
    }
    // an off-by-two zeta_q is caught by the weight-function suite
    let mutant = run_suites(Some("weight-function"), &VerifyOptions { zeta_scale: 2.0 });
    println!("zeta_q x 2 fixture detected: {}", mutant.iter().any(|r| !r.passed));
    reports.iter().all(|r| r.passed)
}

fn main() {
    let filter = std::env::args().nth(1);
    if !run_example(filter.as_deref()) {
        std::process::exit(1);
    }
}
