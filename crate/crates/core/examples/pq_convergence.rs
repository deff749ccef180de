//! Coupled degree refinement p = q on the n = 5 mesh with tau close to h / sqrt 2.
//!
//! Errors fall exponentially in the cube root of the number of unknowns; the
//! table ends with the fitted rate b of exp(-b N^(1/3)).
//!
//! ```bash
//! cargo run --release --example pq_convergence
//! WESTERVELT_OUT=results cargo run --release --example pq_convergence   # also write CSV, JSON and SVG
//! ```

use std::path::Path;
use westervelt::study::{run_study, write_study, StudyResult, StudySpec, OUT_ENV};

pub fn run_example() -> westervelt::Result<StudyResult> {
    let spec: StudySpec = serde_json::from_str(include_str!("../configs/study-pq.json"))?;
    let result = run_study(&spec)?;
    print!("{}", result.table());
    for s in &result.series {
        let e: Vec<f64> = s.records.iter().map(|r| r.err_dt).collect();
        let ratios: Vec<String> = e.windows(2).map(|w| format!("{:.2}", w[0] / w[1])).collect();
        println!("err_dt reduction per degree: {}", ratios.join(", "));
    }
    if let Some(dir) = std::env::var_os(OUT_ENV) {
        std::fs::create_dir_all(&dir)?;
        for f in write_study(&result, Path::new(&dir), "pq_convergence")?.files {
            println!("wrote {}", f.display());
        }
    }
    Ok(result)
}

fn main() -> westervelt::Result<()> {
    run_example().map(|_| ())
}
