//! Large time steps (tau = 20, T = 100) on refined meshes: tau far exceeds h,
//! yet every run converges and the errors stay bounded.
//!
//! ```bash
//! cargo run --release --example cfl_robustness
//! WESTERVELT_OUT=results cargo run --release --example cfl_robustness   # also write CSV, JSON and SVG
//! ```

use std::path::Path;
use westervelt::study::{run_study, write_study, StudyResult, StudySpec, OUT_ENV};

pub fn run_example() -> westervelt::Result<StudyResult> {
    let spec: StudySpec = serde_json::from_str(include_str!("../configs/study-cfl.json"))?;
    let result = run_study(&spec)?;
    print!("{}", result.table());
    let finite = result.records().iter().all(|r| r.err_dt.is_finite() && r.err_grad.is_finite());
    println!("all errors finite: {finite}, failures: {}", result.failures.len());
    if let Some(dir) = std::env::var_os(OUT_ENV) {
        std::fs::create_dir_all(&dir)?;
        for f in write_study(&result, Path::new(&dir), "cfl_robustness")?.files {
            println!("wrote {}", f.display());
        }
    }
    Ok(result)
}

fn main() -> westervelt::Result<()> {
    run_example().map(|_| ())
}
