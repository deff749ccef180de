//! Solve the manufactured "smooth" case once and compare with the exact solution.
//!
//! ```bash
//! cargo run --release --example solve_single
//! ```

use westervelt::analysis::{default_samples, err_linf_l2, ErrorMode, Reference};
use westervelt::cases::Case;
use westervelt::{solve_westervelt, ProblemConfig};

pub fn run_example() -> westervelt::Result<()> {
    let case = Case::by_label("smooth")?;
    let exact = *case.exact().expect("manufactured case");
    let mut config = ProblemConfig::new(case, 8, 2, 3, 0.125);
    config.controls.residuals = true;
    let (sol, report) = solve_westervelt(&config)?;
    let samples = default_samples(config.q);
    let err_dt = err_linf_l2(&sol, Reference::Exact(&exact), ErrorMode::Dt, samples)?;
    let err_grad = err_linf_l2(&sol, Reference::Exact(&exact), ErrorMode::Grad, samples)?;
    println!("slabs:              {}", sol.partition().num_slabs());
    println!("unknowns per slab:  {}", report.num_unknowns_per_slab);
    println!("factorizations:     {}", report.factorizations);
    println!("iterations:         {:?}", report.iterations);
    println!("max slab residual:  {:.2e}", report.residuals.iter().cloned().fold(0.0, f64::max));
    println!("max |u_t - u_ht|:   {err_dt:.4e}");
    println!("max |grad(u - u_h)|: {err_grad:.4e}");
    Ok(())
}

fn main() -> westervelt::Result<()> {
    run_example()
}
