//! Structured triangulations of the unit square.
//!
//! Every cell of the `n x n` grid is split along its `(+1, +1)` diagonal, so
//! the meshes are deterministic and uniform: `h_max = h_min = sqrt(2) / n`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    subdivisions: usize,
}

/// Edge of a mesh with its vertex pair stored in increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub vertices: [usize; 2],
    /// Number of triangles sharing this edge (1 on the boundary, 2 inside).
    pub multiplicity: usize,
}

impl Mesh {
    /// Structured mesh of `(0,1)^2` with `n` cells per side.
    pub fn unit_square(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("mesh subdivision count must be positive"));
        }
        let stride = n + 1;
        let h = 1.0 / n as f64;
        let mut vertices = Vec::with_capacity(stride * stride);
        let mut boundary = Vec::with_capacity(stride * stride);
        for j in 0..=n {
            for i in 0..=n {
                // i * h is not exactly 1 for every n; pin the last row/column.
                let x = if i == n { 1.0 } else { i as f64 * h };
                let y = if j == n { 1.0 } else { j as f64 * h };
                vertices.push([x, y]);
                boundary.push(i == 0 || j == 0 || i == n || j == n);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let v00 = i + j * stride;
                let v10 = v00 + 1;
                let v01 = v00 + stride;
                let v11 = v01 + 1;
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        Ok(Self {
            vertices,
            triangles,
            boundary,
            subdivisions: n,
        })
    }

    /// Uniform refinement: the structured mesh with twice as many cells per side.
    pub fn refine(&self) -> Self {
        Self::unit_square(2 * self.subdivisions).expect("subdivision count is positive")
    }

    pub fn subdivisions(&self) -> usize {
        self.subdivisions
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_coords(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Twice the signed area of triangle `t` (positive for counterclockwise).
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_coords(t);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Diameter (longest edge) of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_coords(t);
        let d = |p: [f64; 2], q: [f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        d(a, b).max(d(b, c)).max(d(c, a))
    }

    /// `(h_max, h_min)` over all triangles.
    pub fn mesh_size(&self) -> (f64, f64) {
        (0..self.num_triangles())
            .map(|t| self.diameter(t))
            .fold((0.0_f64, f64::INFINITY), |(hi, lo), d| (hi.max(d), lo.min(d)))
    }

    pub fn h_max(&self) -> f64 {
        self.mesh_size().0
    }

    /// Unique edges, sorted by vertex pair, with the number of adjacent triangles.
    pub fn edges(&self) -> Vec<Edge> {
        let mut all: Vec<[usize; 2]> = self
            .triangles
            .iter()
            .flat_map(|&[a, b, c]| [[a, b], [b, c], [c, a]])
            .map(|[u, v]| if u < v { [u, v] } else { [v, u] })
            .collect();
        all.sort_unstable();
        let mut edges: Vec<Edge> = Vec::new();
        for pair in all {
            match edges.last_mut() {
                Some(e) if e.vertices == pair => e.multiplicity += 1,
                _ => edges.push(Edge {
                    vertices: pair,
                    multiplicity: 1,
                }),
            }
        }
        edges
    }

    /// Locate the triangle containing `point` and return it with the reference
    /// coordinates of the point inside that triangle.
    pub fn locate(&self, point: [f64; 2]) -> Option<(usize, [f64; 2])> {
        let [x, y] = point;
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return None;
        }
        let n = self.subdivisions;
        let nf = n as f64;
        let i = ((x * nf).floor() as usize).min(n - 1);
        let j = ((y * nf).floor() as usize).min(n - 1);
        let lx = x * nf - i as f64;
        let ly = y * nf - j as f64;
        let cell = 2 * (i + j * n);
        // lower triangle (v00, v10, v11) holds points with ly <= lx
        let t = if ly <= lx { cell } else { cell + 1 };
        let [a, b, c] = self.triangle_coords(t);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let dx = x - a[0];
        let dy = y - a[1];
        let xi = ((c[1] - a[1]) * dx - (c[0] - a[0]) * dy) / det;
        let eta = (-(b[1] - a[1]) * dx + (b[0] - a[0]) * dy) / det;
        Some((t, [xi, eta]))
    }
}
