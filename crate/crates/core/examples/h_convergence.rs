//! Mesh refinement on the manufactured "smooth" case with q = 3, tau = 0.2.
//!
//! Expected rates: p + 1 for the time-derivative error and p for the gradient
//! error, until the fixed temporal error takes over (visible for p = 2 at n = 32).
//!
//! ```bash
//! cargo run --release --example h_convergence
//! WESTERVELT_OUT=results cargo run --release --example h_convergence   # also write CSV, JSON and SVG
//! ```

use std::path::Path;
use westervelt::study::{run_study, write_study, StudyResult, StudySpec, OUT_ENV};

pub fn run_example() -> westervelt::Result<StudyResult> {
    let spec: StudySpec = serde_json::from_str(include_str!("../configs/study-h.json"))?;
    let result = run_study(&spec)?;
    print!("{}", result.table());
    if let Some(dir) = std::env::var_os(OUT_ENV) {
        std::fs::create_dir_all(&dir)?;
        for f in write_study(&result, Path::new(&dir), "h_convergence")?.files {
            println!("wrote {}", f.display());
        }
    }
    Ok(result)
}

fn main() -> westervelt::Result<()> {
    run_example().map(|_| ())
}
