//! Nodal Lagrange basis of degree `p` on the reference triangle.
//!
//! Nodes are the warp-and-blend set (Gauss-Lobatto points on the edges,
//! blended into the interior), which keeps the Vandermonde matrix of the
//! orthonormal Dubiner basis well conditioned up to `p = 9` and beyond.

use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Where a local node sits on the reference triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// Reference vertex 0, 1 or 2.
    Vertex(usize),
    /// Local edge `e` (0: v0-v1, 1: v1-v2, 2: v2-v0) at lattice position
    /// `k` in `1..p`, counted from the first vertex of the edge.
    Edge(usize, usize),
    Interior,
}

/// Reference Lagrange element: nodes and the inverse Vandermonde matrix.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    degree: usize,
    nodes: Vec<[f64; 2]>,
    kinds: Vec<NodeKind>,
    inv_vandermonde: DMatrix<f64>,
}

/// Orthonormal Jacobi polynomial `P_n^{(a,b)}` on `[-1, 1]`, all degrees up to `n`.
fn jacobi_normalized(x: f64, alpha: f64, beta: f64, n: usize) -> Vec<f64> {
    let ab = alpha + beta;
    let mut p = Vec::with_capacity(n + 1);
    let gamma0 = 2f64.powf(ab + 1.0) / (ab + 1.0) * gamma_ratio(alpha, beta);
    p.push(1.0 / gamma0.sqrt());
    if n == 0 {
        return p;
    }
    let gamma1 = (alpha + 1.0) * (beta + 1.0) / (ab + 3.0) * gamma0;
    p.push(((ab + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / gamma1.sqrt());
    let mut aold = 2.0 / (2.0 + ab) * ((alpha + 1.0) * (beta + 1.0) / (ab + 3.0)).sqrt();
    for i in 1..n {
        let fi = i as f64;
        let h1 = 2.0 * fi + ab;
        let anew = 2.0 / (h1 + 2.0)
            * ((fi + 1.0) * (fi + 1.0 + ab) * (fi + 1.0 + alpha) * (fi + 1.0 + beta)
                / (h1 + 1.0)
                / (h1 + 3.0))
                .sqrt();
        let bnew = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0);
        let next = 1.0 / anew * (-aold * p[i - 1] + (x - bnew) * p[i]);
        p.push(next);
        aold = anew;
    }
    p
}

/// `Gamma(a+1) Gamma(b+1) / Gamma(a+b+1)` for nonnegative integer `a`, `b`.
fn gamma_ratio(alpha: f64, beta: f64) -> f64 {
    let fact = |k: f64| (1..=k.round() as u64).map(|v| v as f64).product::<f64>();
    fact(alpha) * fact(beta) / fact(alpha + beta)
}

fn jacobi_normalized_grad(x: f64, alpha: f64, beta: f64, n: usize) -> Vec<f64> {
    let mut d = vec![0.0; n + 1];
    if n == 0 {
        return d;
    }
    let lower = jacobi_normalized(x, alpha + 1.0, beta + 1.0, n - 1);
    for k in 1..=n {
        let kf = k as f64;
        d[k] = (kf * (kf + alpha + beta + 1.0)).sqrt() * lower[k - 1];
    }
    d
}

/// Gauss-Lobatto-Legendre points on `[-1, 1]` (ascending).
fn gauss_lobatto(n: usize) -> Vec<f64> {
    // interior points are the roots of P'_n; Newton from Chebyshev-Lobatto guesses
    let mut x: Vec<f64> = (0..=n).map(|i| -(PI * i as f64 / n as f64).cos()).collect();
    if n < 2 {
        return x;
    }
    for xi in x.iter_mut().take(n).skip(1) {
        for _ in 0..100 {
            // P_n, P_n', P_n'' by recurrence
            let (mut p0, mut p1) = (1.0, *xi);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * *xi * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let nf = n as f64;
            let d1 = nf * (*xi * p1 - p0) / (*xi * *xi - 1.0);
            let d2 = (2.0 * *xi * d1 - nf * (nf + 1.0) * p1) / (1.0 - *xi * *xi);
            let dx = d1 / d2;
            *xi -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
    }
    x
}

/// Warp function of the warp-and-blend construction: displacement from
/// equispaced to Gauss-Lobatto points, interpolated and divided by `1 - r^2`.
fn warp_factor(n: usize, gll: &[f64], r: f64) -> f64 {
    let req: Vec<f64> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();
    let mut warp = 0.0;
    for i in 0..=n {
        let mut l = 1.0;
        for j in 0..=n {
            if j != i {
                l *= (r - req[j]) / (req[i] - req[j]);
            }
        }
        warp += l * (gll[i] - req[i]);
    }
    if r.abs() < 1.0 - 1e-10 {
        warp / (1.0 - r * r)
    } else {
        0.0
    }
}

const ALPHA_OPT: [f64; 15] = [
    0.0000, 0.0000, 1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832, 1.3648, 1.4773, 1.4959,
    1.5743, 1.5770, 1.6223, 1.6258,
];

/// Warp-and-blend nodes of degree `p` in reference coordinates, lattice-ordered
/// by `(i, j)` with `j` outer, along with their classification.
fn warp_blend_nodes(p: usize) -> (Vec<[f64; 2]>, Vec<NodeKind>) {
    let alpha = if p < 16 { ALPHA_OPT[p - 1] } else { 5.0 / 3.0 };
    let gll = gauss_lobatto(p);
    let pf = p as f64;
    let (c2, s2) = ((2.0 * PI / 3.0).cos(), (2.0 * PI / 3.0).sin());
    let (c4, s4) = ((4.0 * PI / 3.0).cos(), (4.0 * PI / 3.0).sin());
    let mut nodes = Vec::new();
    let mut kinds = Vec::new();
    for j in 0..=p {
        for i in 0..=p - j {
            // barycentric coordinates in the equilateral construction:
            // l2 <-> reference vertex 0, l3 <-> vertex 1, l1 <-> vertex 2
            let l1 = j as f64 / pf;
            let l3 = i as f64 / pf;
            let l2 = 1.0 - l1 - l3;
            let mut x = -l2 + l3;
            let mut y = (-l2 - l3 + 2.0 * l1) / 3f64.sqrt();
            let w1 = 4.0 * l2 * l3 * warp_factor(p, &gll, l3 - l2) * (1.0 + (alpha * l1).powi(2));
            let w2 = 4.0 * l1 * l3 * warp_factor(p, &gll, l1 - l3) * (1.0 + (alpha * l2).powi(2));
            let w3 = 4.0 * l1 * l2 * warp_factor(p, &gll, l2 - l1) * (1.0 + (alpha * l3).powi(2));
            x += w1 + c2 * w2 + c4 * w3;
            y += s2 * w2 + s4 * w3;
            // back to reference coordinates (vertices (0,0), (1,0), (0,1))
            let eta = (3f64.sqrt() * y + 1.0) / 3.0;
            let xi = (x + 1.0 - eta) / 2.0;
            let (xi, eta) = snap(i, j, p, xi, eta);
            nodes.push([xi, eta]);
            kinds.push(classify(i, j, p));
        }
    }
    (nodes, kinds)
}

/// Put edge nodes exactly on their edge so that shared edges match bitwise.
fn snap(i: usize, j: usize, p: usize, xi: f64, eta: f64) -> (f64, f64) {
    if (i, j) == (0, 0) {
        (0.0, 0.0)
    } else if (i, j) == (p, 0) {
        (1.0, 0.0)
    } else if (i, j) == (0, p) {
        (0.0, 1.0)
    } else if j == 0 {
        (xi, 0.0)
    } else if i == 0 {
        (0.0, eta)
    } else if i + j == p {
        (1.0 - eta, eta)
    } else {
        (xi, eta)
    }
}

fn classify(i: usize, j: usize, p: usize) -> NodeKind {
    match (i, j) {
        (0, 0) => NodeKind::Vertex(0),
        (i, 0) if i == p => NodeKind::Vertex(1),
        (0, j) if j == p => NodeKind::Vertex(2),
        (i, 0) => NodeKind::Edge(0, i),
        (i, j) if i + j == p => NodeKind::Edge(1, j),
        (0, j) => NodeKind::Edge(2, p - j),
        _ => NodeKind::Interior,
    }
}

/// Orthonormal Dubiner basis on the reference triangle, in `(i, j)` order
/// with `i + j <= p`. Returns values and reference gradients.
fn dubiner(p: usize, point: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let r = 2.0 * point[0] - 1.0;
    let s = 2.0 * point[1] - 1.0;
    let a = if (1.0 - s).abs() > 1e-14 {
        2.0 * (1.0 + r) / (1.0 - s) - 1.0
    } else {
        -1.0
    };
    let b = s;
    let fa = jacobi_normalized(a, 0.0, 0.0, p);
    let dfa = jacobi_normalized_grad(a, 0.0, 0.0, p);
    let half = 0.5 * (1.0 - b);
    let mut vals = Vec::with_capacity((p + 1) * (p + 2) / 2);
    let mut grads = Vec::with_capacity((p + 1) * (p + 2) / 2);
    for i in 0..=p {
        let alpha = 2.0 * i as f64 + 1.0;
        let gb = jacobi_normalized(b, alpha, 0.0, p - i);
        let dgb = jacobi_normalized_grad(b, alpha, 0.0, p - i);
        let scale = 2f64.powf(i as f64 + 0.5);
        for j in 0..=p - i {
            vals.push(scale * fa[i] * gb[j] * half.powi(i as i32));
            let pow_m1 = if i > 0 { half.powi(i as i32 - 1) } else { 1.0 };
            let mut dr = dfa[i] * gb[j];
            let mut ds = dfa[i] * gb[j] * 0.5 * (1.0 + a);
            if i > 0 {
                dr *= pow_m1;
                ds *= pow_m1;
            }
            let mut tmp = dgb[j] * half.powi(i as i32);
            if i > 0 {
                tmp -= 0.5 * i as f64 * gb[j] * pow_m1;
            }
            ds += fa[i] * tmp;
            // chain rule: d/dx = 2 d/dr, d/dy = 2 d/ds
            grads.push([2.0 * scale * dr, 2.0 * scale * ds]);
        }
    }
    (vals, grads)
}

impl ReferenceElement {
    pub fn new(degree: usize) -> Self {
        assert!(degree >= 1, "polynomial degree must be at least 1");
        let (nodes, kinds) = warp_blend_nodes(degree);
        let n = nodes.len();
        let mut v = DMatrix::<f64>::zeros(n, n);
        for (row, node) in nodes.iter().enumerate() {
            let (vals, _) = dubiner(degree, *node);
            for (col, val) in vals.into_iter().enumerate() {
                v[(row, col)] = val;
            }
        }
        let inv_vandermonde = v
            .try_inverse()
            .expect("warp-and-blend Vandermonde matrix is invertible");
        Self {
            degree,
            nodes,
            kinds,
            inv_vandermonde,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_dofs(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    /// Values and reference gradients of every local basis function at `point`.
    pub fn evaluate(&self, point: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let (psi, dpsi) = dubiner(self.degree, point);
        let n = self.nodes.len();
        let mut vals = vec![0.0; n];
        let mut grads = vec![[0.0; 2]; n];
        for (k, (&pk, dk)) in psi.iter().zip(&dpsi).enumerate() {
            for i in 0..n {
                let c = self.inv_vandermonde[(k, i)];
                vals[i] += pk * c;
                grads[i][0] += dk[0] * c;
                grads[i][1] += dk[1] * c;
            }
        }
        (vals, grads)
    }
}

/// Lagrange basis values and gradients of degree `p` at a reference point.
pub fn reference_basis(p: usize, point: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    ReferenceElement::new(p).evaluate(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn p1_centroid() {
        let (v, _) = reference_basis(1, [1.0 / 3.0, 1.0 / 3.0]);
        for x in v {
            assert!((x - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn node_counts_and_kinds() {
        for p in 1..=9 {
            let e = ReferenceElement::new(p);
            assert_eq!(e.num_dofs(), (p + 1) * (p + 2) / 2);
            let interior = e.kinds().iter().filter(|k| **k == NodeKind::Interior).count();
            assert_eq!(interior, (p - 1) * p.saturating_sub(2) / 2);
            for (node, kind) in e.nodes().iter().zip(e.kinds()) {
                match kind {
                    NodeKind::Edge(0, _) => assert_eq!(node[1], 0.0),
                    NodeKind::Edge(1, _) => assert_eq!(node[0] + node[1], 1.0),
                    NodeKind::Edge(2, _) => assert_eq!(node[0], 0.0),
                    NodeKind::Interior => {
                        assert!(node[0] > 0.0 && node[1] > 0.0 && node[0] + node[1] < 1.0)
                    }
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn edge_nodes_symmetric() {
        // positions along each edge are symmetric so neighbours agree on them
        for p in 2..=9 {
            let e = ReferenceElement::new(p);
            let along: Vec<(usize, f64)> = e
                .nodes()
                .iter()
                .zip(e.kinds())
                .filter_map(|(n, k)| match k {
                    NodeKind::Edge(0, pos) => Some((*pos, n[0])),
                    _ => None,
                })
                .collect();
            for &(k, t) in &along {
                let mirror = along.iter().find(|(k2, _)| *k2 == p - k).unwrap().1;
                assert!((t + mirror - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kronecker_property() {
        for p in 1..=9 {
            let e = ReferenceElement::new(p);
            for (i, node) in e.nodes().iter().enumerate() {
                let (v, _) = e.evaluate(*node);
                for (j, val) in v.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((val - expect).abs() < 1e-10, "p={p} node {i} basis {j}: {val}");
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in 1..=9 {
            let e = ReferenceElement::new(p);
            for _ in 0..100 {
                let (mut x, mut y) = (rng.gen::<f64>(), rng.gen::<f64>());
                if x + y > 1.0 {
                    (x, y) = (1.0 - x, 1.0 - y);
                }
                let (v, g) = e.evaluate([x, y]);
                assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-11);
                let gs = g.iter().fold([0.0, 0.0], |a, b| [a[0] + b[0], a[1] + b[1]]);
                assert!(gs[0].abs() < 1e-9 && gs[1].abs() < 1e-9, "p={p}: {gs:?}");
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let e = ReferenceElement::new(4);
        let pt = [0.21, 0.37];
        let h = 1e-6;
        let (_, g) = e.evaluate(pt);
        let (vxp, _) = e.evaluate([pt[0] + h, pt[1]]);
        let (vxm, _) = e.evaluate([pt[0] - h, pt[1]]);
        let (vyp, _) = e.evaluate([pt[0], pt[1] + h]);
        let (vym, _) = e.evaluate([pt[0], pt[1] - h]);
        for i in 0..e.num_dofs() {
            let fx = (vxp[i] - vxm[i]) / (2.0 * h);
            let fy = (vyp[i] - vym[i]) / (2.0 * h);
            assert!((fx - g[i][0]).abs() < 1e-7 && (fy - g[i][1]).abs() < 1e-7);
        }
    }

    #[test]
    fn reproduces_polynomials() {
        // interpolating x^a y^b with a + b <= p is exact
        let p = 5;
        let e = ReferenceElement::new(p);
        let f = |q: [f64; 2]| q[0].powi(2) * q[1].powi(3) - 0.3 * q[0] * q[1] + 1.0;
        let coeffs: Vec<f64> = e.nodes().iter().map(|&n| f(n)).collect();
        let pt = [0.17, 0.55];
        let (v, _) = e.evaluate(pt);
        let val: f64 = v.iter().zip(&coeffs).map(|(a, b)| a * b).sum();
        assert!((val - f(pt)).abs() < 1e-12);
    }
}
