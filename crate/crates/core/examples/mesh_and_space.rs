//! Meshes, Lagrange spaces, the Ritz projection and the interpolant.
//!
//! ```bash
//! cargo run --release --example mesh_and_space
//! ```

use std::f64::consts::PI;
use westervelt::analysis::eoc;
use westervelt::spacefe::{discrete_laplacian, ritz_project};
use westervelt::{FESpace, Mesh};

fn u(x: [f64; 2]) -> f64 {
    (PI * x[0]).sin() * (PI * x[1]).sin()
}

fn grad_u(x: [f64; 2]) -> [f64; 2] {
    [PI * (PI * x[0]).cos() * (PI * x[1]).sin(), PI * (PI * x[0]).sin() * (PI * x[1]).cos()]
}

pub fn run_example() -> westervelt::Result<()> {
    let mesh = Mesh::unit_square(4)?;
    let (h_max, h_min) = mesh.mesh_size();
    println!(
        "unit square, n = 4: {} vertices, {} triangles, {} edges, h in [{h_min:.4}, {h_max:.4}]",
        mesh.num_vertices(),
        mesh.num_triangles(),
        mesh.edges().len()
    );
    for p in 1..=3 {
        let mut hs = Vec::new();
        let (mut ritz, mut interp) = (Vec::new(), Vec::new());
        for n in [4, 8, 16] {
            let space = FESpace::new(Mesh::unit_square(n)?, p)?;
            let rh = ritz_project(&space, grad_u)?;
            let ih = space.interpolate(u);
            hs.push(space.mesh().h_max());
            ritz.push(space.grad_error(&rh, space.error_degree(), grad_u));
            interp.push(space.l2_error(&ih, space.error_degree(), u));
            if n == 16 {
                // -Lap_h of the Ritz projection approximates 2 pi^2 u in L2
                let lap = discrete_laplacian(&space, &rh)?;
                let err = space.l2_error(&lap, space.error_degree(), |x| -2.0 * PI * PI * u(x));
                println!("p = {p}: dofs {}, free {}, ||Lap_h R_h u - Lap u|| = {err:.3e}", space.num_dofs(), space.num_free());
            }
        }
        let rate = |e: &[f64]| eoc(e, &hs).last().copied().flatten().unwrap_or(f64::NAN);
        println!("  Ritz gradient error rate {:.3} (expect {p})", rate(&ritz));
        println!("  interpolant L2 error rate {:.3} (expect {})", rate(&interp), p + 1);
    }
    Ok(())
}

fn main() -> westervelt::Result<()> {
    run_example()
}
