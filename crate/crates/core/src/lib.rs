//! Space-time finite elements for the Westervelt equation
//!
//! ```text
//! d/dt((1 + k u) du/dt) - c^2 Lap u - delta Lap(du/dt) = f   in (0,1)^2 x (0,T)
//! ```
//!
//! with homogeneous Dirichlet conditions. Trial functions are continuous and
//! of degree `q` in time, test functions discontinuous of degree `q - 1`
//! (a DG-CG scheme), and the spatial discretization is a conforming
//! degree-`p` Lagrange space. The solution is marched slab by slab, and each
//! slab's quasilinear system is solved with a linearized fixed-point
//! iteration that reuses one sparse LU factorization.

pub mod analysis;
pub mod cases;
pub mod error;
pub mod mesh;
pub mod plot;
pub mod quadrature;
pub mod sparse;
pub mod slab;
pub mod solution;
pub mod solver;
pub mod spacefe;
pub mod study;
pub mod timefe;
pub mod verify;

pub use error::{Error, Result};
pub use mesh::Mesh;
pub use solution::DiscreteSolution;
pub use solver::{solve_westervelt, ProblemConfig, SolverControls, SolverReport};
pub use spacefe::FESpace;
pub use timefe::TimePartition;
