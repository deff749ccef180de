//! Temporal building blocks: Legendre L2 projection, the projection P_tau and
//! the linear weight function used in the stability analysis.
//!
//! ```bash
//! cargo run --release --example time_projections
//! ```

use westervelt::timefe::{
    eval_modal, l2_project_time, ptau_project, weight_phi, zeta, Side, TimePartition,
};

pub fn run_example() -> westervelt::Result<()> {
    // Pi_1 s^2 on (0, 1) is s - 1/6
    let coeffs = l2_project_time(1, |s| s * s, 0.0, 1.0, 3);
    println!("Pi_1 s^2 at s = 0, 1/2, 1: {:.4} {:.4} {:.4}", eval_modal(&coeffs, 0.0), eval_modal(&coeffs, 0.5), eval_modal(&coeffs, 1.0));

    // P_tau t^3 on a single unit slab with q = 2 is 2 t^2 - t
    let one = TimePartition::uniform(1.0, 1)?;
    let p = ptau_project(2, |t| t * t * t, |t| 3.0 * t * t, &one)?;
    for t in [0.0, 0.25, 0.75, 1.0] {
        println!("P_tau t^3 ({t}) = {:.6}   2t^2 - t = {:.6}", p.eval(t, Side::Left), 2.0 * t * t - t);
    }

    // rate of P_tau for sin(3t) on refined partitions
    for q in [2, 3, 4] {
        let mut prev: Option<f64> = None;
        let mut line = format!("q = {q}: max |d/dt (P_tau v - v)|");
        for tau in [0.1, 0.05, 0.025] {
            let part = TimePartition::with_step(1.0, tau)?;
            let pv = ptau_project(q, |t| (3.0 * t).sin(), |t| 3.0 * (3.0 * t).cos(), &part)?;
            let err = (0..=400)
                .map(|i| i as f64 / 400.0)
                .map(|t| (pv.deriv(t, Side::Left) - 3.0 * (3.0 * t).cos()).abs())
                .fold(0.0, f64::max);
            line += &match prev {
                Some(e) => format!("  {err:.2e} (rate {:.2})", (e / err).log2()),
                None => format!("  {err:.2e}"),
            };
            prev = Some(err);
        }
        println!("{line}");
    }

    let part = TimePartition::uniform(1.0, 4)?;
    for q in 2..=4 {
        let phi = weight_phi(1, 2.0 * zeta(q), q, &part)?;
        println!(
            "q = {q}: zeta_q = {:.5}, phi on slab 1 from {:.5} to {:.5}, lambda = {:.4}",
            zeta(q),
            phi.eval(phi.t_start),
            phi.eval(phi.t_end),
            phi.lambda
        );
    }
    Ok(())
}

fn main() -> westervelt::Result<()> {
    run_example()
}
