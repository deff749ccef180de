//! The Gaussian pulse in water-like parameters (c = 2000, k = -10): no exact
//! solution, so the run reports the amplitude history and writes nodal
//! snapshots on a uniform grid.
//!
//! ```bash
//! cargo run --release --example gaussian_pulse
//! WESTERVELT_OUT=results cargo run --release --example gaussian_pulse
//! ```

use std::path::PathBuf;
use westervelt::cases::Case;
use westervelt::study::{write_snapshot, OUT_ENV};
use westervelt::timefe::Side;
use westervelt::{solve_westervelt, ProblemConfig};

pub fn run_example() -> westervelt::Result<()> {
    let case = Case::by_label("gaussian-pulse")?;
    let t_final = case.t_final;
    let config = ProblemConfig::new(case, 10, 2, 4, 1e-5);
    let (sol, report) = solve_westervelt(&config)?;
    println!("{} slabs, mean iterations {:.2}", report.iterations.len(), report.iters_mean());
    for i in 0..=8 {
        let t = t_final * i as f64 / 8.0;
        let u = sol.at_time(t, Side::Left);
        println!("t = {t:.3e}  max |u_h| = {:.4e}", sol.space().max_abs(&u));
    }
    if let Some(dir) = std::env::var_os(OUT_ENV).map(PathBuf::from) {
        std::fs::create_dir_all(&dir)?;
        for (i, t) in [0.0, 0.5 * t_final, t_final].into_iter().enumerate() {
            let path = dir.join(format!("gaussian_pulse_{i}.csv"));
            write_snapshot(&sol, t, 51, std::fs::File::create(&path)?)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> westervelt::Result<()> {
    run_example()
}
