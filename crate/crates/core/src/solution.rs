//! Space-time discrete functions stored slab-wise in Legendre modal form.

use crate::error::{Error, Result};
use crate::spacefe::FESpace;
use crate::timefe::{legendre_table, Side, TimePartition};
use std::sync::Arc;

/// Member of the space-time trial space: per slab, `q + 1` modal coefficient
/// vectors over all spatial dofs, stored mode-major.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    space: Arc<FESpace>,
    partition: TimePartition,
    q: usize,
    slabs: Vec<Vec<f64>>,
    /// Fixed-point updates per slab.
    pub iterations: Vec<usize>,
    /// False if some slab stopped at the iteration cap.
    pub converged: bool,
    pub degenerate: bool,
}

impl DiscreteSolution {
    pub fn new(space: Arc<FESpace>, partition: TimePartition, q: usize, slabs: Vec<Vec<f64>>) -> Result<Self> {
        let len = (q + 1) * space.num_dofs();
        if slabs.len() != partition.num_slabs() || slabs.iter().any(|s| s.len() != len) {
            return Err(Error::invalid("slab blocks do not match the discretization"));
        }
        let n = slabs.len();
        Ok(Self {
            space,
            partition,
            q,
            slabs,
            iterations: vec![0; n],
            converged: true,
            degenerate: false,
        })
    }

    pub fn zeros(space: Arc<FESpace>, partition: TimePartition, q: usize) -> Self {
        let len = (q + 1) * space.num_dofs();
        let slabs = vec![vec![0.0; len]; partition.num_slabs()];
        Self::new(space, partition, q, slabs).expect("consistent by construction")
    }

    pub fn space(&self) -> &FESpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<FESpace> {
        &self.space
    }

    pub fn partition(&self) -> &TimePartition {
        &self.partition
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn num_dofs(&self) -> usize {
        self.space.num_dofs()
    }

    /// Modal block of slab `n` (mode-major).
    pub fn slab(&self, n: usize) -> &[f64] {
        &self.slabs[n]
    }

    pub fn slab_mut(&mut self, n: usize) -> &mut [f64] {
        &mut self.slabs[n]
    }

    /// Coefficient vector of mode `j` on slab `n`.
    pub fn mode(&self, n: usize, j: usize) -> &[f64] {
        let nd = self.num_dofs();
        &self.slabs[n][j * nd..(j + 1) * nd]
    }

    /// True if both solutions live on the same space and partition.
    pub fn same_discretization(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.space, &other.space)
            || (self.space.degree() == other.space.degree()
                && self.space.mesh().subdivisions() == other.space.mesh().subdivisions()))
            && self.partition == other.partition
            && self.q == other.q
    }

    fn combine(&self, n: usize, weights: &[f64]) -> Vec<f64> {
        let nd = self.num_dofs();
        let mut out = vec![0.0; nd];
        for (j, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(&self.slabs[n][j * nd..(j + 1) * nd]) {
                *o += w * v;
            }
        }
        out
    }

    /// Spatial coefficients of `u(., t)` at local coordinate `s` of slab `n`.
    pub fn eval(&self, n: usize, s: f64) -> Vec<f64> {
        self.combine(n, &legendre_table(self.q, s).values)
    }

    /// Spatial coefficients of `du/dt` at local coordinate `s` of slab `n`.
    pub fn eval_dt(&self, n: usize, s: f64) -> Vec<f64> {
        let tau = self.partition.step(n);
        let w: Vec<f64> = legendre_table(self.q, s).d1.iter().map(|v| v / tau).collect();
        self.combine(n, &w)
    }

    /// Spatial coefficients of `d^2u/dt^2` at local coordinate `s` of slab `n`.
    pub fn eval_dtt(&self, n: usize, s: f64) -> Vec<f64> {
        let tau = self.partition.step(n);
        let w: Vec<f64> = legendre_table(self.q, s).d2.iter().map(|v| v / (tau * tau)).collect();
        self.combine(n, &w)
    }

    pub fn at_time(&self, t: f64, side: Side) -> Vec<f64> {
        let (n, s) = self.partition.locate(t, side);
        self.eval(n, s)
    }

    pub fn dt_at_time(&self, t: f64, side: Side) -> Vec<f64> {
        let (n, s) = self.partition.locate(t, side);
        self.eval_dt(n, s)
    }

    /// Coefficient-wise difference `self - other` on a shared discretization.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if !self.same_discretization(other) {
            return Err(Error::invalid("solutions live on different discretizations"));
        }
        let slabs = self
            .slabs
            .iter()
            .zip(&other.slabs)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Self::new(self.space.clone(), self.partition.clone(), self.q, slabs)
    }

    /// Largest interface mismatch `max_n max |u(t_n^-) - u(t_n^+)|`.
    pub fn continuity_defect(&self) -> f64 {
        (1..self.partition.num_slabs())
            .map(|n| {
                let left = self.eval(n - 1, 1.0);
                let right = self.eval(n, 0.0);
                left.iter().zip(&right).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;

    #[test]
    fn modal_evaluation() {
        let space = Arc::new(FESpace::new(Mesh::unit_square(2).unwrap(), 1).unwrap());
        let part = TimePartition::uniform(1.0, 2).unwrap();
        let nd = space.num_dofs();
        let mut sol = DiscreteSolution::zeros(space, part, 2);
        // slab 0: u = t^2 = (s/2)^2, modal in s: s^2 = 1/3 + L1/2 + L2/6
        for (j, c) in [1.0 / 3.0, 0.5, 1.0 / 6.0].iter().enumerate() {
            for d in 0..nd {
                sol.slab_mut(0)[j * nd + d] = 0.25 * c;
            }
        }
        let v = sol.at_time(0.4, Side::Left);
        assert!((v[0] - 0.16).abs() < 1e-14);
        let d = sol.dt_at_time(0.4, Side::Left);
        assert!((d[3] - 0.8).abs() < 1e-13);
        let dd = sol.eval_dtt(0, 0.3);
        assert!((dd[1] - 2.0).abs() < 1e-12);
        // slab 1 is zero, so the jump at t = 1/2 is 1/4
        assert!((sol.continuity_defect() - 0.25).abs() < 1e-14);
    }
}
