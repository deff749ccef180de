//! Time-step refinement on "smooth-fast" with p = 5 on the n = 5 mesh.
//!
//! The time-derivative error converges with order q and the gradient error
//! with order q + 1.
//!
//! ```bash
//! cargo run --release --example tau_convergence
//! WESTERVELT_OUT=results cargo run --release --example tau_convergence   # also write CSV, JSON and SVG
//! ```

use std::path::Path;
use westervelt::study::{run_study, write_study, StudyResult, StudySpec, OUT_ENV};

pub fn run_example() -> westervelt::Result<StudyResult> {
    let spec: StudySpec = serde_json::from_str(include_str!("../configs/study-tau.json"))?;
    let result = run_study(&spec)?;
    print!("{}", result.table());
    if let Some(dir) = std::env::var_os(OUT_ENV) {
        std::fs::create_dir_all(&dir)?;
        for f in write_study(&result, Path::new(&dir), "tau_convergence")?.files {
            println!("wrote {}", f.display());
        }
    }
    Ok(result)
}

fn main() -> westervelt::Result<()> {
    run_example().map(|_| ())
}
