//! Per-slab algebraic systems of the space-time scheme.
//!
//! On slab `n` the trial function is `u(s) = u_start + sum_{j=1..q} b_j psi_j(s)`
//! with `psi_j = L~_j - (-1)^j`, so `psi_j(0) = 0` and continuity with the
//! previous slab holds by construction. Test functions are `L~_i(s) phi_m`,
//! `i < q`, `phi_m` a free spatial basis function. Unknowns are ordered
//! mode-major: `x[(j - 1) * N_free + m]`.

use crate::cases::Case;
use crate::spacefe::{CsrMatrix, FESpace};
use crate::timefe::{gauss_interval, legendre_table};

/// Temporal Gauss points used for every slab integral.
pub fn time_points(q: usize) -> usize {
    2 * q
}

/// Dimensionless `q x q` temporal matrices (row: test mode `i`, column: trial mode `j - 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalMatrices {
    /// `int psi_j'' L~_i ds`
    pub tt: Vec<Vec<f64>>,
    /// `psi_j'(0) L~_i(0)`
    pub trace: Vec<Vec<f64>>,
    /// `int psi_j L~_i ds`
    pub mass: Vec<Vec<f64>>,
    /// `int psi_j' L~_i ds`
    pub damp: Vec<Vec<f64>>,
}

pub fn temporal_matrices(q: usize, npts: usize) -> TemporalMatrices {
    let rule = gauss_interval(npts);
    let zero = vec![vec![0.0; q]; q];
    let (mut tt, mut trace, mut mass, mut damp) = (zero.clone(), zero.clone(), zero.clone(), zero);
    for (&s, w) in rule.iter() {
        let tab = legendre_table(q, s);
        for i in 0..q {
            for j in 1..=q {
                let psi = tab.values[j] - sign(j);
                tt[i][j - 1] += w * tab.d2[j] * tab.values[i];
                mass[i][j - 1] += w * psi * tab.values[i];
                damp[i][j - 1] += w * tab.d1[j] * tab.values[i];
            }
        }
    }
    let t0 = legendre_table(q, 0.0);
    for i in 0..q {
        for j in 1..=q {
            trace[i][j - 1] = t0.d1[j] * t0.values[i];
        }
    }
    TemporalMatrices {
        tt,
        trace,
        mass,
        damp,
    }
}

/// `(-1)^j`
pub(crate) fn sign(j: usize) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Left-hand side of the linearized slab problem.
#[derive(Debug, Clone)]
pub struct SlabSystem {
    pub tau: f64,
    pub c: f64,
    pub delta: f64,
    pub q: usize,
    pub num_free: usize,
    pub matrix: CsrMatrix,
}

impl SlabSystem {
    pub fn dim(&self) -> usize {
        self.q * self.num_free
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(x)
    }
}

/// `((T_tt + T_trace) / tau) (x) M_ff + (c^2 tau T_mass + delta T_damp) (x) K_ff`.
pub fn assemble_slab_lhs(space: &FESpace, tau: f64, c: f64, delta: f64, q: usize) -> SlabSystem {
    let tm = temporal_matrices(q, time_points(q));
    let m = space.mass_free();
    let k = space.stiffness_free();
    let nf = space.num_free();
    let mut triplets = Vec::with_capacity(q * q * (m.nnz() + k.nnz()));
    for i in 0..q {
        for j in 0..q {
            let a = (tm.tt[i][j] + tm.trace[i][j]) / tau;
            let b = c * c * tau * tm.mass[i][j] + delta * tm.damp[i][j];
            for r in 0..nf {
                for (col, v) in m.row(r) {
                    triplets.push((i * nf + r, j * nf + col, a * v));
                }
                for (col, v) in k.row(r) {
                    triplets.push((i * nf + r, j * nf + col, b * v));
                }
            }
        }
    }
    SlabSystem {
        tau,
        c,
        delta,
        q,
        num_free: nf,
        matrix: CsrMatrix::from_triplets(q * nf, q * nf, &triplets),
    }
}

/// Known trace data entering the first test mode row through `L~_i(0)`.
#[derive(Debug, Clone)]
pub enum TraceData {
    /// First slab: loads `(u1, phi)` and `(u0 u1, phi)` of the exact initial data.
    Initial { u1: Vec<f64>, u0_u1: Vec<f64> },
    /// Later slabs: `du/dt(t_{n-1}^-)` as a full coefficient vector.
    Interface { dt_left: Vec<f64> },
}

/// Everything a slab inherits from the past.
#[derive(Debug, Clone)]
pub struct SlabState {
    /// 0-based slab index.
    pub index: usize,
    pub t_start: f64,
    pub tau: f64,
    /// `u(t_{n-1})` over all dofs (Dirichlet entries zero); `R_h u0` on the first slab.
    pub u_start: Vec<f64>,
    pub trace: TraceData,
}

impl SlabState {
    /// First-slab state: `u(0) = R_h u0` and the weak initial-velocity loads.
    pub fn initial(space: &FESpace, case: &Case, u_start: Vec<f64>, tau: f64) -> Self {
        let deg = space.assembly_degree();
        let u1 = space.load_vector(deg, |x| case.u1(x));
        let u0_u1 = space.load_vector(deg, |x| case.u0(x) * case.u1(x));
        Self {
            index: 0,
            t_start: 0.0,
            tau,
            u_start,
            trace: TraceData::Initial { u1, u0_u1 },
        }
    }

    /// Trace loads `(base, nonlinear)` over all dofs; the trace term is `base + k * nonlinear`.
    pub fn trace_loads(&self, space: &FESpace) -> (Vec<f64>, Vec<f64>) {
        match &self.trace {
            TraceData::Initial { u1, u0_u1 } => (u1.clone(), u0_u1.clone()),
            TraceData::Interface { dt_left } => {
                let nd = space.num_dofs();
                let mut base = vec![0.0; nd];
                let mut nl = vec![0.0; nd];
                space.for_each_element(space.triple_product_degree(), |eq| {
                    for qp in 0..eq.num_points() {
                        let g = eq.eval(dt_left, qp);
                        let u = eq.eval(&self.u_start, qp);
                        let w = eq.weights[qp];
                        for (phi, &d) in eq.values[qp].iter().zip(eq.dofs) {
                            base[d] += w * g * phi;
                            nl[d] += w * u * g * phi;
                        }
                    }
                });
                (base, nl)
            }
        }
    }
}

/// `(f, L~_i phi_m)_{Q_n}` over free dofs, mode-major (`q * N_free`).
pub fn data_load(space: &FESpace, case: &Case, t_start: f64, tau: f64, q: usize) -> Vec<f64> {
    let nf = space.num_free();
    let mut out = vec![0.0; q * nf];
    if case.has_zero_data() {
        return out;
    }
    let rule = gauss_interval(time_points(q));
    let tabs: Vec<_> = rule.points.iter().map(|&s| legendre_table(q, s)).collect();
    let nd = space.num_dofs();
    let mut full = vec![vec![0.0; nd]; q];
    space.for_each_element(space.assembly_degree(), |eq| {
        for qp in 0..eq.num_points() {
            let x = eq.points[qp];
            let mut ft = vec![0.0; q];
            for ((&s, w), tab) in rule.iter().zip(&tabs) {
                let f = case.source(x, t_start + tau * s) * w * tau;
                for (i, fi) in ft.iter_mut().enumerate() {
                    *fi += f * tab.values[i];
                }
            }
            let wx = eq.weights[qp];
            for (phi, &d) in eq.values[qp].iter().zip(eq.dofs) {
                for i in 0..q {
                    full[i][d] += wx * ft[i] * phi;
                }
            }
        }
    });
    for (i, f) in full.iter().enumerate() {
        out[i * nf..(i + 1) * nf].copy_from_slice(&space.restrict_free(f));
    }
    out
}

/// Result of the lagged-term assembly.
#[derive(Debug, Clone)]
pub struct LaggedTerms {
    /// `(d/dt(u du/dt), L~_i phi)_{Q_n} + L~_i(0) (u_start du/dt(t_{n-1}^+), phi)`, `q * N_free`.
    pub load: Vec<f64>,
    /// Minimum of `u` and maximum of `u` over the quadrature points (for the degeneracy guard).
    pub u_min: f64,
    pub u_max: f64,
}

/// Lagged nonlinear products for a slab iterate given in modal form over all dofs.
pub fn lagged_terms(space: &FESpace, u_start: &[f64], modal: &[f64], tau: f64, q: usize) -> LaggedTerms {
    let nd = space.num_dofs();
    let nf = space.num_free();
    let rule = gauss_interval(time_points(q));
    let tabs: Vec<_> = rule.points.iter().map(|&s| legendre_table(q, s)).collect();
    let tab0 = legendre_table(q, 0.0);
    let mut full = vec![vec![0.0; nd]; q];
    let mut u_min = f64::INFINITY;
    let mut u_max = f64::NEG_INFINITY;
    let mut a = vec![0.0; q + 1];
    space.for_each_element(space.triple_product_degree(), |eq| {
        for qp in 0..eq.num_points() {
            for (j, aj) in a.iter_mut().enumerate() {
                *aj = eq.eval(&modal[j * nd..(j + 1) * nd], qp);
            }
            let mut vt = vec![0.0; q];
            for ((_, w), tab) in rule.iter().zip(&tabs) {
                let (mut u, mut us, mut uss) = (0.0, 0.0, 0.0);
                for j in 0..=q {
                    u += a[j] * tab.values[j];
                    us += a[j] * tab.d1[j];
                    uss += a[j] * tab.d2[j];
                }
                u_min = u_min.min(u);
                u_max = u_max.max(u);
                // tau dt * (1 / tau^2) d/ds(u u_s)
                let g = w * (us * us + u * uss) / tau;
                for (i, v) in vt.iter_mut().enumerate() {
                    *v += g * tab.values[i];
                }
            }
            let ustart = eq.eval(u_start, qp);
            let dt0: f64 = (0..=q).map(|j| a[j] * tab0.d1[j]).sum::<f64>() / tau;
            for (i, v) in vt.iter_mut().enumerate() {
                *v += tab0.values[i] * ustart * dt0;
            }
            let wx = eq.weights[qp];
            for (phi, &d) in eq.values[qp].iter().zip(eq.dofs) {
                for i in 0..q {
                    full[i][d] += wx * vt[i] * phi;
                }
            }
        }
    });
    let mut load = vec![0.0; q * nf];
    for (i, f) in full.iter().enumerate() {
        load[i * nf..(i + 1) * nf].copy_from_slice(&space.restrict_free(f));
    }
    LaggedTerms { load, u_min, u_max }
}

/// Right-hand side of one fixed-point step. `lagged` is `None` for the `k = 0` initial guess.
#[allow(clippy::too_many_arguments)]
pub fn assemble_slab_rhs(
    space: &FESpace,
    state: &SlabState,
    data: &[f64],
    trace: &(Vec<f64>, Vec<f64>),
    lagged: Option<&LaggedTerms>,
    k: f64,
    c: f64,
    q: usize,
) -> Vec<f64> {
    let nf = space.num_free();
    let mut rhs = data.to_vec();
    let tab0 = legendre_table(q, 0.0);
    let trace_full: Vec<f64> = trace.0.iter().zip(&trace.1).map(|(b, n)| b + k * n).collect();
    let trace_free = space.restrict_free(&trace_full);
    let ku = space.restrict_free(&space.stiffness().mul_vec(&state.u_start));
    for i in 0..q {
        let row = &mut rhs[i * nf..(i + 1) * nf];
        for m in 0..nf {
            row[m] += tab0.values[i] * trace_free[m];
        }
        if i == 0 {
            for m in 0..nf {
                row[m] -= c * c * state.tau * ku[m];
            }
        }
    }
    if let Some(l) = lagged {
        for (r, v) in rhs.iter_mut().zip(&l.load) {
            *r -= k * v;
        }
    }
    rhs
}

/// Modal coefficients over all dofs (`(q + 1) * N_dof`, mode-major) from the slab unknowns.
pub fn unknowns_to_modal(space: &FESpace, u_start: &[f64], x: &[f64], q: usize) -> Vec<f64> {
    let nd = space.num_dofs();
    let nf = space.num_free();
    let mut modal = vec![0.0; (q + 1) * nd];
    modal[..nd].copy_from_slice(u_start);
    for j in 1..=q {
        let b = space.extend_free(&x[(j - 1) * nf..j * nf]);
        let sj = sign(j);
        for d in 0..nd {
            modal[j * nd + d] = b[d];
            modal[d] -= sj * b[d];
        }
    }
    modal
}

/// Slab unknowns from modal coefficients (inverse of [`unknowns_to_modal`] on free dofs).
pub fn modal_to_unknowns(space: &FESpace, modal: &[f64], q: usize) -> Vec<f64> {
    let nd = space.num_dofs();
    let nf = space.num_free();
    let mut x = vec![0.0; q * nf];
    for j in 1..=q {
        x[(j - 1) * nf..j * nf].copy_from_slice(&space.restrict_free(&modal[j * nd..(j + 1) * nd]));
    }
    x
}

/// Residual of the full nonlinear slab equations.
#[derive(Debug, Clone)]
pub struct Residual {
    /// Residual against every test function, `q * N_free`.
    pub values: Vec<f64>,
    /// Largest entry of any single term group.
    pub scale: f64,
}

impl Residual {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |r| / scale`, zero when everything vanishes.
    pub fn relative(&self) -> f64 {
        let m = self.max_abs();
        if self.scale == 0.0 {
            if m == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            m / self.scale
        }
    }
}

/// Residual of the nonlinear slab equations at a candidate slab solution in modal form.
///
/// Assembled in one space-time element loop directly from the nonlinear form,
/// independently of the fixed-point matrices.
#[allow(clippy::too_many_arguments)]
pub fn nonlinear_residual(
    space: &FESpace,
    state: &SlabState,
    data: &[f64],
    modal: &[f64],
    k: f64,
    c: f64,
    delta: f64,
    q: usize,
) -> Residual {
    let nd = space.num_dofs();
    let nf = space.num_free();
    let tau = state.tau;
    let rule = gauss_interval(time_points(q));
    let tabs: Vec<_> = rule.points.iter().map(|&s| legendre_table(q, s)).collect();
    let tab0 = legendre_table(q, 0.0);
    // term groups: time derivative, jump, stiffness, damping
    let mut groups = vec![vec![vec![0.0; nd]; q]; 4];
    let mut a = vec![0.0; q + 1];
    let mut ga = vec![[0.0; 2]; q + 1];
    space.for_each_element(space.triple_product_degree(), |eq| {
        for qp in 0..eq.num_points() {
            for j in 0..=q {
                let mj = &modal[j * nd..(j + 1) * nd];
                a[j] = eq.eval(mj, qp);
                ga[j] = eq.eval_grad(mj, qp);
            }
            let wx = eq.weights[qp];
            let mut time_v = vec![0.0; q];
            let mut stiff_g = vec![[0.0; 2]; q];
            let mut damp_g = vec![[0.0; 2]; q];
            for ((_, w), tab) in rule.iter().zip(&tabs) {
                let (mut u, mut ut, mut utt) = (0.0, 0.0, 0.0);
                let (mut gu, mut gut) = ([0.0; 2], [0.0; 2]);
                for j in 0..=q {
                    u += a[j] * tab.values[j];
                    ut += a[j] * tab.d1[j] / tau;
                    utt += a[j] * tab.d2[j] / (tau * tau);
                    for r in 0..2 {
                        gu[r] += ga[j][r] * tab.values[j];
                        gut[r] += ga[j][r] * tab.d1[j] / tau;
                    }
                }
                let wt = w * tau;
                let dflux = (1.0 + k * u) * utt + k * ut * ut;
                for i in 0..q {
                    let li = tab.values[i] * wt;
                    time_v[i] += dflux * li;
                    for r in 0..2 {
                        stiff_g[i][r] += c * c * gu[r] * li;
                        damp_g[i][r] += delta * gut[r] * li;
                    }
                }
            }
            let ustart = eq.eval(&state.u_start, qp);
            let ut0: f64 = (0..=q).map(|j| a[j] * tab0.d1[j]).sum::<f64>() / tau;
            let jump = (1.0 + k * ustart) * ut0;
            for (l, (&phi, grad)) in eq.values[qp].iter().zip(&eq.grads[qp]).enumerate() {
                let d = eq.dofs[l];
                for i in 0..q {
                    groups[0][i][d] += wx * time_v[i] * phi;
                    groups[1][i][d] += wx * tab0.values[i] * jump * phi;
                    groups[2][i][d] += wx * (stiff_g[i][0] * grad[0] + stiff_g[i][1] * grad[1]);
                    groups[3][i][d] += wx * (damp_g[i][0] * grad[0] + damp_g[i][1] * grad[1]);
                }
            }
        }
    });
    let (base, nl) = state.trace_loads(space);
    let trace_full: Vec<f64> = base.iter().zip(&nl).map(|(b, n)| b + k * n).collect();
    let trace_free = space.restrict_free(&trace_full);
    let mut values = vec![0.0; q * nf];
    let mut scale: f64 = 0.0;
    for g in &groups {
        for (i, gi) in g.iter().enumerate() {
            let free = space.restrict_free(gi);
            for (m, v) in free.iter().enumerate() {
                values[i * nf + m] += v;
                scale = scale.max(v.abs());
            }
        }
    }
    for i in 0..q {
        for m in 0..nf {
            let tr = tab0.values[i] * trace_free[m];
            values[i * nf + m] -= data[i * nf + m] + tr;
            scale = scale.max(tr.abs());
        }
    }
    scale = data.iter().fold(scale, |s, v| s.max(v.abs()));
    Residual { values, scale }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;

    fn space(n: usize, p: usize) -> FESpace {
        FESpace::new(Mesh::unit_square(n).unwrap(), p).unwrap()
    }

    #[test]
    fn temporal_matrices_are_exact() {
        for q in 2..=6 {
            let a = temporal_matrices(q, 2 * q);
            let b = temporal_matrices(q, 3 * q);
            for (ma, mb) in [(&a.tt, &b.tt), (&a.mass, &b.mass), (&a.damp, &b.damp)] {
                let scale = ma.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
                for (ra, rb) in ma.iter().zip(mb) {
                    for (x, y) in ra.iter().zip(rb) {
                        assert!((x - y).abs() <= 1e-13 * scale);
                    }
                }
            }
        }
        // int psi_1 L~_0 = int (2s - 1 + 1) = 1
        let t = temporal_matrices(2, 4);
        assert!((t.mass[0][0] - 1.0).abs() < 1e-15);
        assert!((t.damp[0][0] - 2.0).abs() < 1e-15);
        assert!((t.trace[0][0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn lhs_dimensions_and_reuse() {
        let s = space(3, 2);
        for q in 2..=4 {
            let a = assemble_slab_lhs(&s, 0.1, 1.0, 0.0, q);
            assert_eq!(a.dim(), q * s.num_free());
            assert!(a.apply(&vec![0.0; a.dim()]).iter().all(|v| *v == 0.0));
        }
        let a = assemble_slab_lhs(&s, 0.25, 1.3, 1e-3, 3);
        let b = assemble_slab_lhs(&s, 0.25, 1.3, 1e-3, 3);
        assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn modal_round_trip() {
        let s = space(2, 2);
        let q = 3;
        let u_start = s.interpolate(|x| (x[0] * (1.0 - x[0])) * x[1] * (1.0 - x[1]));
        let x: Vec<f64> = (0..q * s.num_free()).map(|i| (i as f64 * 0.37).sin()).collect();
        let modal = unknowns_to_modal(&s, &u_start, &x, q);
        assert_eq!(modal_to_unknowns(&s, &modal, q), x);
        // value at s = 0 is u_start
        let nd = s.num_dofs();
        let tab = legendre_table(q, 0.0);
        for d in 0..nd {
            let v: f64 = (0..=q).map(|j| modal[j * nd + d] * tab.values[j]).sum();
            assert!((v - u_start[d]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_everything_gives_zero_rhs() {
        let s = space(2, 1);
        let q = 2;
        let mut case = Case::by_label("smooth").unwrap();
        case.scale_data(0.0);
        let state = SlabState::initial(&s, &case, vec![0.0; s.num_dofs()], 0.1);
        let data = data_load(&s, &case, 0.0, 0.1, q);
        let tr = state.trace_loads(&s);
        let rhs = assemble_slab_rhs(&s, &state, &data, &tr, None, 0.0, 1.0, q);
        assert!(rhs.iter().all(|v| *v == 0.0));
    }
}
