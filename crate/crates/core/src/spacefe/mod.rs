//! Continuous degree-`p` Lagrange space on a structured mesh with homogeneous
//! Dirichlet conditions, and the spatial operators built on it.

mod basis;

pub use basis::{reference_basis, NodeKind, ReferenceElement};
pub use crate::quadrature::{triangle_quadrature, TriangleRule};
pub use crate::sparse::{CsrMatrix, SparseLu};

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Global dof classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    Vertex,
    Edge,
    Interior,
}

/// Reference basis tabulated at the points of a triangle rule.
#[derive(Debug)]
pub struct Tabulation {
    pub rule: TriangleRule,
    pub values: Vec<Vec<f64>>,
    pub ref_grads: Vec<Vec<[f64; 2]>>,
}

/// Per-element quadrature data handed to assembly callbacks.
///
/// Buffers are reused between elements; `weights` already include the
/// Jacobian determinant and `grads` are physical gradients.
pub struct ElementQuadrature<'a> {
    pub element: usize,
    pub dofs: &'a [usize],
    pub points: &'a [[f64; 2]],
    pub weights: &'a [f64],
    pub values: &'a [Vec<f64>],
    pub grads: &'a [Vec<[f64; 2]>],
}

impl ElementQuadrature<'_> {
    pub fn num_points(&self) -> usize {
        self.weights.len()
    }

    /// Value of the finite element function `coeffs` at quadrature point `q`.
    pub fn eval(&self, coeffs: &[f64], q: usize) -> f64 {
        self.values[q]
            .iter()
            .zip(self.dofs)
            .map(|(phi, &d)| phi * coeffs[d])
            .sum()
    }

    pub fn eval_grad(&self, coeffs: &[f64], q: usize) -> [f64; 2] {
        self.grads[q]
            .iter()
            .zip(self.dofs)
            .fold([0.0, 0.0], |acc, (g, &d)| {
                [acc[0] + g[0] * coeffs[d], acc[1] + g[1] * coeffs[d]]
            })
    }
}

/// Degree-`p` H^1_0-conforming Lagrange space.
pub struct FESpace {
    mesh: Mesh,
    element: ReferenceElement,
    dof_coords: Vec<[f64; 2]>,
    dof_kinds: Vec<DofKind>,
    local_to_global: Vec<Vec<usize>>,
    dirichlet: Vec<bool>,
    free_dofs: Vec<usize>,
    free_position: Vec<Option<usize>>,
    tabulations: Mutex<HashMap<usize, Arc<Tabulation>>>,
    mass: OnceLock<CsrMatrix>,
    stiffness: OnceLock<CsrMatrix>,
    mass_free: OnceLock<CsrMatrix>,
    stiffness_free: OnceLock<CsrMatrix>,
}

impl std::fmt::Debug for FESpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FESpace")
            .field("degree", &self.degree())
            .field("subdivisions", &self.mesh.subdivisions())
            .field("num_dofs", &self.num_dofs())
            .field("num_free", &self.num_free())
            .finish()
    }
}

impl FESpace {
    pub fn new(mesh: Mesh, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::invalid("spatial degree must be at least 1"));
        }
        let element = ReferenceElement::new(degree);
        let p = degree;
        let nv = mesh.num_vertices();
        let edges = mesh.edges();
        let edge_index: HashMap<[usize; 2], usize> =
            edges.iter().enumerate().map(|(k, e)| (e.vertices, k)).collect();
        let per_edge = p - 1;
        let per_cell = (p - 1) * p.saturating_sub(2) / 2;
        let edge_base = nv;
        let cell_base = nv + edges.len() * per_edge;
        let num_dofs = cell_base + mesh.num_triangles() * per_cell;

        let mut dof_coords = vec![[f64::NAN; 2]; num_dofs];
        let mut dof_kinds = vec![DofKind::Interior; num_dofs];
        let mut dirichlet = vec![false; num_dofs];
        let mut local_to_global = Vec::with_capacity(mesh.num_triangles());

        for (t, tri) in mesh.triangles().iter().enumerate() {
            let coords = mesh.triangle_coords(t);
            let mut cell_counter = 0;
            let mut map = Vec::with_capacity(element.num_dofs());
            for (node, kind) in element.nodes().iter().zip(element.kinds()) {
                let g = match *kind {
                    NodeKind::Vertex(v) => {
                        let g = tri[v];
                        dof_kinds[g] = DofKind::Vertex;
                        dirichlet[g] = mesh.boundary_flags()[g];
                        g
                    }
                    NodeKind::Edge(e, k) => {
                        let (a, b) = (tri[e], tri[(e + 1) % 3]);
                        let key = if a < b { [a, b] } else { [b, a] };
                        let idx = edge_index[&key];
                        let pos = if a < b { k } else { p - k };
                        let g = edge_base + idx * per_edge + (pos - 1);
                        dof_kinds[g] = DofKind::Edge;
                        dirichlet[g] = edges[idx].multiplicity == 1;
                        g
                    }
                    NodeKind::Interior => {
                        let g = cell_base + t * per_cell + cell_counter;
                        cell_counter += 1;
                        g
                    }
                };
                if dof_coords[g][0].is_nan() {
                    dof_coords[g] = map_point(&coords, *node);
                }
                map.push(g);
            }
            local_to_global.push(map);
        }

        let free_dofs: Vec<usize> = (0..num_dofs).filter(|&d| !dirichlet[d]).collect();
        let mut free_position = vec![None; num_dofs];
        for (k, &d) in free_dofs.iter().enumerate() {
            free_position[d] = Some(k);
        }
        Ok(Self {
            mesh,
            element,
            dof_coords,
            dof_kinds,
            local_to_global,
            dirichlet,
            free_dofs,
            free_position,
            tabulations: Mutex::new(HashMap::new()),
            mass: OnceLock::new(),
            stiffness: OnceLock::new(),
            mass_free: OnceLock::new(),
            stiffness_free: OnceLock::new(),
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.element.degree()
    }

    pub fn element(&self) -> &ReferenceElement {
        &self.element
    }

    pub fn num_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn num_free(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn dof_coords(&self) -> &[[f64; 2]] {
        &self.dof_coords
    }

    pub fn dof_kinds(&self) -> &[DofKind] {
        &self.dof_kinds
    }

    pub fn local_to_global(&self, t: usize) -> &[usize] {
        &self.local_to_global[t]
    }

    pub fn dirichlet_mask(&self) -> &[bool] {
        &self.dirichlet
    }

    pub fn free_dofs(&self) -> &[usize] {
        &self.free_dofs
    }

    pub fn free_position(&self, dof: usize) -> Option<usize> {
        self.free_position[dof]
    }

    /// Restrict a full coefficient vector to the free dofs.
    pub fn restrict_free(&self, full: &[f64]) -> Vec<f64> {
        self.free_dofs.iter().map(|&d| full[d]).collect()
    }

    /// Extend free-dof coefficients by zero on the Dirichlet dofs.
    pub fn extend_free(&self, free: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.num_dofs()];
        for (&d, &v) in self.free_dofs.iter().zip(free) {
            full[d] = v;
        }
        full
    }

    /// Zero the Dirichlet entries of a full coefficient vector.
    pub fn apply_dirichlet(&self, full: &mut [f64]) {
        for (v, &fixed) in full.iter_mut().zip(&self.dirichlet) {
            if fixed {
                *v = 0.0;
            }
        }
    }

    /// Default assembly quadrature degree (`2p + 2`).
    pub fn assembly_degree(&self) -> usize {
        2 * self.degree() + 2
    }

    /// Quadrature degree for integrands with three finite element factors.
    pub fn triple_product_degree(&self) -> usize {
        3 * self.degree() + 2
    }

    /// Quadrature degree for errors against smooth non-polynomial functions.
    pub fn error_degree(&self) -> usize {
        (2 * self.degree() + 2).max(12)
    }

    pub fn tabulation(&self, degree: usize) -> Arc<Tabulation> {
        let mut cache = self.tabulations.lock().expect("tabulation cache poisoned");
        cache
            .entry(degree)
            .or_insert_with(|| {
                let rule = triangle_quadrature(degree);
                let (values, ref_grads) = rule
                    .points
                    .iter()
                    .map(|&pt| self.element.evaluate(pt))
                    .unzip();
                Arc::new(Tabulation {
                    rule,
                    values,
                    ref_grads,
                })
            })
            .clone()
    }

    /// Run `f` on every element with quadrature of the given degree.
    pub fn for_each_element(&self, degree: usize, mut f: impl FnMut(&ElementQuadrature<'_>)) {
        let tab = self.tabulation(degree);
        let nq = tab.rule.len();
        let nloc = self.element.num_dofs();
        let mut points = vec![[0.0; 2]; nq];
        let mut weights = vec![0.0; nq];
        let mut grads = vec![vec![[0.0; 2]; nloc]; nq];
        for t in 0..self.mesh.num_triangles() {
            let [a, b, c] = self.mesh.triangle_coords(t);
            let j = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            // rows of J^{-T}
            let inv_t = [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]];
            for q in 0..nq {
                let [xi, eta] = tab.rule.points[q];
                points[q] = [a[0] + j[0][0] * xi + j[0][1] * eta, a[1] + j[1][0] * xi + j[1][1] * eta];
                weights[q] = tab.rule.weights[q] * det.abs();
                for (g, r) in grads[q].iter_mut().zip(&tab.ref_grads[q]) {
                    *g = [
                        inv_t[0][0] * r[0] + inv_t[0][1] * r[1],
                        inv_t[1][0] * r[0] + inv_t[1][1] * r[1],
                    ];
                }
            }
            f(&ElementQuadrature {
                element: t,
                dofs: &self.local_to_global[t],
                points: &points,
                weights: &weights,
                values: &tab.values,
                grads: &grads,
            });
        }
    }

    fn assemble_bilinear(&self, kernel: impl Fn(&ElementQuadrature<'_>, usize, usize, usize) -> f64) -> CsrMatrix {
        let nloc = self.element.num_dofs();
        let mut triplets = Vec::with_capacity(self.mesh.num_triangles() * nloc * nloc);
        self.for_each_element(self.assembly_degree(), |eq| {
            for i in 0..nloc {
                for j in 0..nloc {
                    let v: f64 = (0..eq.num_points()).map(|q| kernel(eq, q, i, j)).sum();
                    triplets.push((eq.dofs[i], eq.dofs[j], v));
                }
            }
        });
        CsrMatrix::from_triplets(self.num_dofs(), self.num_dofs(), &triplets)
    }

    /// Mass matrix over all dofs.
    pub fn mass(&self) -> &CsrMatrix {
        self.mass.get_or_init(|| {
            self.assemble_bilinear(|eq, q, i, j| eq.weights[q] * eq.values[q][i] * eq.values[q][j])
        })
    }

    /// Stiffness matrix over all dofs.
    pub fn stiffness(&self) -> &CsrMatrix {
        self.stiffness.get_or_init(|| {
            self.assemble_bilinear(|eq, q, i, j| {
                let (a, b) = (eq.grads[q][i], eq.grads[q][j]);
                eq.weights[q] * (a[0] * b[0] + a[1] * b[1])
            })
        })
    }

    pub fn mass_free(&self) -> &CsrMatrix {
        self.mass_free
            .get_or_init(|| self.mass().restrict(&self.free_dofs, &self.free_dofs))
    }

    pub fn stiffness_free(&self) -> &CsrMatrix {
        self.stiffness_free
            .get_or_init(|| self.stiffness().restrict(&self.free_dofs, &self.free_dofs))
    }

    /// `(g, phi_i)` for all dofs, with `g` evaluated at physical quadrature points.
    pub fn load_vector(&self, degree: usize, g: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        let mut b = vec![0.0; self.num_dofs()];
        self.for_each_element(degree, |eq| {
            for q in 0..eq.num_points() {
                let gw = g(eq.points[q]) * eq.weights[q];
                for (phi, &d) in eq.values[q].iter().zip(eq.dofs) {
                    b[d] += gw * phi;
                }
            }
        });
        b
    }

    /// `(G, grad phi_i)` for a vector field `G`.
    pub fn load_vector_grad(&self, degree: usize, g: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
        let mut b = vec![0.0; self.num_dofs()];
        self.for_each_element(degree, |eq| {
            for q in 0..eq.num_points() {
                let gv = g(eq.points[q]);
                let w = eq.weights[q];
                for (gr, &d) in eq.grads[q].iter().zip(eq.dofs) {
                    b[d] += w * (gv[0] * gr[0] + gv[1] * gr[1]);
                }
            }
        });
        b
    }

    /// Nodal interpolant: coefficients are the values of `g` at the dof nodes.
    /// Boundary dofs keep `g`'s value.
    pub fn interpolate(&self, g: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        self.dof_coords.iter().map(|&x| g(x)).collect()
    }

    /// Evaluate a finite element function at a physical point.
    pub fn evaluate(&self, coeffs: &[f64], point: [f64; 2]) -> Option<f64> {
        let (t, xi) = self.mesh.locate(point)?;
        let (vals, _) = self.element.evaluate(xi);
        Some(
            vals.iter()
                .zip(&self.local_to_global[t])
                .map(|(v, &d)| v * coeffs[d])
                .sum(),
        )
    }

    pub fn l2_norm(&self, coeffs: &[f64]) -> f64 {
        self.mass().bilinear(coeffs, coeffs).max(0.0).sqrt()
    }

    pub fn h1_seminorm(&self, coeffs: &[f64]) -> f64 {
        self.stiffness().bilinear(coeffs, coeffs).max(0.0).sqrt()
    }

    /// `||u_h - g||_{L^2}` by quadrature of the given degree.
    pub fn l2_error(&self, coeffs: &[f64], degree: usize, g: impl Fn([f64; 2]) -> f64) -> f64 {
        let mut s = 0.0;
        self.for_each_element(degree, |eq| {
            for q in 0..eq.num_points() {
                let e = eq.eval(coeffs, q) - g(eq.points[q]);
                s += eq.weights[q] * e * e;
            }
        });
        s.sqrt()
    }

    /// `||grad u_h - G||_{L^2}` by quadrature of the given degree.
    pub fn grad_error(&self, coeffs: &[f64], degree: usize, g: impl Fn([f64; 2]) -> [f64; 2]) -> f64 {
        let mut s = 0.0;
        self.for_each_element(degree, |eq| {
            for q in 0..eq.num_points() {
                let gh = eq.eval_grad(coeffs, q);
                let gv = g(eq.points[q]);
                s += eq.weights[q] * ((gh[0] - gv[0]).powi(2) + (gh[1] - gv[1]).powi(2));
            }
        });
        s.sqrt()
    }

    /// Max of `|u_h|` over the dof nodes and the points of a degree-`2p` rule.
    pub fn max_abs(&self, coeffs: &[f64]) -> f64 {
        let mut m = coeffs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        self.for_each_element(2 * self.degree(), |eq| {
            for q in 0..eq.num_points() {
                m = m.max(eq.eval(coeffs, q).abs());
            }
        });
        m
    }
}

fn map_point(coords: &[[f64; 2]; 3], xi: [f64; 2]) -> [f64; 2] {
    let [a, b, c] = coords;
    [
        a[0] + (b[0] - a[0]) * xi[0] + (c[0] - a[0]) * xi[1],
        a[1] + (b[1] - a[1]) * xi[0] + (c[1] - a[1]) * xi[1],
    ]
}

/// Factorized free-dof stiffness matrix, reusable for many Ritz projections.
pub struct RitzProjector<'a> {
    space: &'a FESpace,
    lu: SparseLu,
}

impl<'a> RitzProjector<'a> {
    pub fn new(space: &'a FESpace) -> Result<Self> {
        if space.num_free() == 0 {
            return Err(Error::Internal("Ritz projection on a space without free dofs".into()));
        }
        let lu = SparseLu::factorize(space.stiffness_free())
            .map_err(|e| Error::Internal(format!("singular stiffness matrix: {e}")))?;
        Ok(Self { space, lu })
    }

    /// Ritz projection of a function given through its gradient.
    pub fn project(&self, grad_g: impl Fn([f64; 2]) -> [f64; 2]) -> Result<Vec<f64>> {
        let b = self.space.load_vector_grad(self.space.assembly_degree(), grad_g);
        self.project_load(&b)
    }

    /// Ritz projection from a precomputed full load vector `(grad g, grad phi_i)`.
    pub fn project_load(&self, load: &[f64]) -> Result<Vec<f64>> {
        let rhs = self.space.restrict_free(load);
        let x = self
            .lu
            .try_solve(&rhs)
            .map_err(|e| Error::Internal(format!("Ritz solve failed: {e}")))?;
        Ok(self.space.extend_free(&x))
    }
}

/// `R_h g` for `g` vanishing on the boundary, given through its gradient.
pub fn ritz_project(space: &FESpace, grad_g: impl Fn([f64; 2]) -> [f64; 2]) -> Result<Vec<f64>> {
    RitzProjector::new(space)?.project(grad_g)
}

/// Discrete Laplacian: `(-Delta_h v, z) = (grad v, grad z)` for all free `z`.
/// Returns `Delta_h v` as a full coefficient vector (zero on the boundary).
pub fn discrete_laplacian(space: &FESpace, v: &[f64]) -> Result<Vec<f64>> {
    let kv = space.stiffness().mul_vec(v);
    let rhs = space.restrict_free(&kv);
    let lu = SparseLu::factorize(space.mass_free())?;
    let x = lu.try_solve(&rhs)?;
    Ok(space.extend_free(&x.iter().map(|v| -v).collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn space(n: usize, p: usize) -> FESpace {
        FESpace::new(Mesh::unit_square(n).unwrap(), p).unwrap()
    }

    #[test]
    fn dof_counts() {
        for p in 1..=6 {
            for n in [1, 2, 3, 5] {
                let s = space(n, p);
                assert_eq!(s.num_dofs(), (p * n + 1).pow(2), "p={p} n={n}");
                assert_eq!(s.num_free(), (p * n - 1).pow(2));
            }
        }
        assert_eq!(space(1, 1).num_free(), 0);
    }

    #[test]
    fn shared_edges_agree() {
        for p in 1..=7 {
            let s = space(3, p);
            for t in 0..s.mesh().num_triangles() {
                let coords = s.mesh().triangle_coords(t);
                for (node, &g) in s.element().nodes().iter().zip(s.local_to_global(t)) {
                    let x = map_point(&coords, *node);
                    let y = s.dof_coords()[g];
                    assert!((x[0] - y[0]).abs() < 1e-14 && (x[1] - y[1]).abs() < 1e-14);
                }
            }
            for (c, &fixed) in s.dof_coords().iter().zip(s.dirichlet_mask()) {
                let on_boundary = c.iter().any(|&v| v.abs() < 1e-14 || (v - 1.0).abs() < 1e-14);
                assert_eq!(fixed, on_boundary);
            }
        }
    }

    #[test]
    fn mass_and_stiffness_basics() {
        for p in 1..=4 {
            let s = space(3, p);
            let m = s.mass();
            let k = s.stiffness();
            let total: f64 = m.values().iter().sum();
            assert!((total - 1.0).abs() < 1e-13);
            let ones = vec![1.0; s.num_dofs()];
            assert!(k.mul_vec(&ones).iter().all(|v| v.abs() < 1e-11));
            assert!(m.asymmetry() <= 1e-12 * m.max_abs());
            assert!(k.asymmetry() <= 1e-12 * k.max_abs());
        }
    }

    #[test]
    fn ritz_reproduces_members() {
        let s = space(4, 2);
        // x(1-x)y(1-y) is a degree-4 polynomial: use degree 4 to contain it
        let s4 = space(4, 4);
        let g = |x: [f64; 2]| x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]);
        let grad = |x: [f64; 2]| {
            [
                (1.0 - 2.0 * x[0]) * x[1] * (1.0 - x[1]),
                x[0] * (1.0 - x[0]) * (1.0 - 2.0 * x[1]),
            ]
        };
        let r = ritz_project(&s4, grad).unwrap();
        let nodal = s4.interpolate(g);
        for (a, b) in r.iter().zip(&nodal) {
            assert!((a - b).abs() < 1e-10);
        }
        // orthogonality on a space that does not contain g
        let r = ritz_project(&s, grad).unwrap();
        let kr = s.stiffness().mul_vec(&r);
        let kg = s.load_vector_grad(s.assembly_degree(), grad);
        let scale = s.h1_seminorm(&r);
        for &d in s.free_dofs() {
            assert!((kr[d] - kg[d]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn discrete_laplacian_identity() {
        let s = space(4, 3);
        let mut v = s.interpolate(|x| (PI * x[0]).sin() * x[1] * (1.0 - x[1]) + 0.1 * x[0]);
        s.apply_dirichlet(&mut v);
        let lap = discrete_laplacian(&s, &v).unwrap();
        let lhs = -s.mass().bilinear(&lap, &v);
        let rhs = s.h1_seminorm(&v).powi(2);
        assert!((lhs - rhs).abs() <= 1e-10 * rhs);
        let zero = discrete_laplacian(&s, &vec![0.0; s.num_dofs()]).unwrap();
        assert!(zero.iter().all(|&z| z == 0.0));
    }

    #[test]
    fn interpolation_exact_for_members() {
        let s = space(2, 3);
        let g = |x: [f64; 2]| x[0].powi(3) - 2.0 * x[0] * x[1] * x[1] + 0.5;
        let c = s.interpolate(g);
        for &pt in &[[0.1, 0.2], [0.77, 0.31], [0.5, 0.99]] {
            assert!((s.evaluate(&c, pt).unwrap() - g(pt)).abs() < 1e-12);
        }
    }
}
