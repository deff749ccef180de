//! Vanishing damping on the "standing-wave" case: the difference between the
//! damped and undamped discrete solutions shrinks linearly in delta.
//!
//! ```bash
//! cargo run --release --example delta_convergence
//! WESTERVELT_OUT=results cargo run --release --example delta_convergence   # also write CSV, JSON and SVG
//! ```

use std::path::Path;
use westervelt::study::{run_study, write_study, StudyResult, StudySpec, OUT_ENV};

pub fn run_example() -> westervelt::Result<StudyResult> {
    let spec: StudySpec = serde_json::from_str(include_str!("../configs/study-delta.json"))?;
    let result = run_study(&spec)?;
    print!("{}", result.table());
    if let Some(dir) = std::env::var_os(OUT_ENV) {
        std::fs::create_dir_all(&dir)?;
        for f in write_study(&result, Path::new(&dir), "delta_convergence")?.files {
            println!("wrote {}", f.display());
        }
    }
    Ok(result)
}

fn main() -> westervelt::Result<()> {
    run_example().map(|_| ())
}
