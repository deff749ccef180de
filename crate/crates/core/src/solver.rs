//! Fixed-point slab solver and the time-marching driver.

use crate::cases::Case;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::slab::{
    assemble_slab_lhs, assemble_slab_rhs, data_load, lagged_terms, nonlinear_residual,
    unknowns_to_modal, SlabState, SlabSystem, TraceData,
};
use crate::solution::DiscreteSolution;
use crate::spacefe::{ritz_project, FESpace, SparseLu};
use crate::timefe::{legendre_table, TimePartition};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

/// Fixed-point iteration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverControls {
    pub s_max: usize,
    pub tol: f64,
    /// Abort when `min (1 + k u)` over quadrature points is at or below this value.
    pub degeneracy_threshold: f64,
    /// Fail instead of continuing when `s_max` is exhausted.
    pub strict: bool,
    /// Evaluate the nonlinear residual of every converged slab.
    pub residuals: bool,
}

impl Default for SolverControls {
    fn default() -> Self {
        Self {
            s_max: 15,
            tol: 1e-12,
            degeneracy_threshold: 0.1,
            strict: false,
            residuals: false,
        }
    }
}

/// A fully specified run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub case: Case,
    /// Cells per side of the mesh.
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub tau: f64,
    #[serde(default)]
    pub controls: SolverControls,
}

impl ProblemConfig {
    pub fn new(case: Case, n: usize, p: usize, q: usize, tau: f64) -> Self {
        Self {
            case,
            n,
            p,
            q,
            tau,
            controls: SolverControls::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.p == 0 {
            return bad("p must be at least 1".into());
        }
        if self.q < 2 {
            return bad("q must be at least 2".into());
        }
        let ph = self.case.physics;
        if !(ph.c > 0.0) || !(ph.delta >= 0.0) || !ph.k.is_finite() {
            return bad(format!("invalid physics c = {}, k = {}, delta = {}", ph.c, ph.k, ph.delta));
        }
        if self.controls.s_max == 0 || !(self.controls.tol > 0.0) {
            return bad("s_max must be positive and tol > 0".into());
        }
        TimePartition::with_step(self.case.t_final, self.tau)
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn partition(&self) -> Result<TimePartition> {
        TimePartition::with_step(self.case.t_final, self.tau)
    }

    pub fn build_space(&self) -> Result<FESpace> {
        FESpace::new(Mesh::unit_square(self.n)?, self.p)
    }
}

/// Diagnostics of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    /// Fixed-point updates per slab.
    pub iterations: Vec<usize>,
    /// Relative increment after the last update of each slab.
    pub increments: Vec<f64>,
    /// Increment after every update, per slab.
    pub increment_history: Vec<Vec<f64>>,
    pub wall_time_s: f64,
    /// Number of LU factorizations performed.
    pub factorizations: usize,
    /// Relative nonlinear residual per slab (only when requested).
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub num_unknowns_per_slab: usize,
}

impl SolverReport {
    pub fn iters_mean(&self) -> f64 {
        if self.iterations.is_empty() {
            return 0.0;
        }
        self.iterations.iter().sum::<usize>() as f64 / self.iterations.len() as f64
    }

    pub fn iters_max(&self) -> usize {
        self.iterations.iter().copied().max().unwrap_or(0)
    }
}

/// LU factorizations keyed by the slab length, so uniform partitions factorize once.
#[derive(Debug)]
pub struct FactorizationCache {
    space: Arc<FESpace>,
    q: usize,
    c: f64,
    delta: f64,
    entries: HashMap<u64, Arc<(SlabSystem, SparseLu)>>,
    count: usize,
}

impl FactorizationCache {
    pub fn new(space: Arc<FESpace>, q: usize, c: f64, delta: f64) -> Self {
        Self {
            space,
            q,
            c,
            delta,
            entries: HashMap::new(),
            count: 0,
        }
    }

    pub fn get(&mut self, tau: f64) -> Result<Arc<(SlabSystem, SparseLu)>> {
        if let Some(e) = self.entries.get(&tau.to_bits()) {
            return Ok(e.clone());
        }
        let sys = assemble_slab_lhs(&self.space, tau, self.c, self.delta, self.q);
        let lu = factorize(&sys)?;
        self.count += 1;
        let e = Arc::new((sys, lu));
        self.entries.insert(tau.to_bits(), e.clone());
        Ok(e)
    }

    /// Factorizations performed so far.
    pub fn count(&self) -> usize {
        self.count
    }
}

pub fn factorize(system: &SlabSystem) -> Result<SparseLu> {
    SparseLu::factorize(&system.matrix)
}

/// Outcome of the fixed-point iteration on one slab.
#[derive(Debug, Clone)]
pub struct SlabOutcome {
    /// Modal coefficients over all dofs, `(q + 1) * N_dof`.
    pub modal: Vec<f64>,
    pub iterations: usize,
    pub increments: Vec<f64>,
    pub converged: bool,
}

/// `tau sum_j d_j^T M d_j / (2j + 1)` for a modal block.
fn slab_l2_sq(space: &FESpace, modal: &[f64], tau: f64, q: usize) -> f64 {
    let nd = space.num_dofs();
    (0..=q)
        .map(|j| {
            let v = &modal[j * nd..(j + 1) * nd];
            space.mass().bilinear(v, v) / (2.0 * j as f64 + 1.0)
        })
        .sum::<f64>()
        * tau
}

/// Linearized fixed-point iteration on one slab, started from the `k = 0` solution.
#[allow(clippy::too_many_arguments)]
pub fn solve_slab_fixed_point(
    space: &FESpace,
    lu: &SparseLu,
    state: &SlabState,
    data: &[f64],
    k: f64,
    c: f64,
    q: usize,
    controls: &SolverControls,
) -> Result<SlabOutcome> {
    let tau = state.tau;
    let trace = state.trace_loads(space);
    let rhs0 = assemble_slab_rhs(space, state, data, &trace, None, 0.0, c, q);
    let x0 = lu.try_solve(&rhs0)?;
    let mut modal = unknowns_to_modal(space, &state.u_start, &x0, q);
    if k == 0.0 {
        // the update reproduces the initial guess exactly
        return Ok(SlabOutcome {
            modal,
            iterations: 1,
            increments: vec![0.0],
            converged: true,
        });
    }
    let mut increments = Vec::new();
    for s in 1..=controls.s_max {
        let lag = lagged_terms(space, &state.u_start, &modal, tau, q);
        let min_coeff = (1.0 + k * lag.u_min).min(1.0 + k * lag.u_max);
        if !(min_coeff > controls.degeneracy_threshold) {
            return Err(Error::DegenerateCoefficient {
                min_value: min_coeff,
                threshold: controls.degeneracy_threshold,
            });
        }
        let rhs = assemble_slab_rhs(space, state, data, &trace, Some(&lag), k, c, q);
        let x = lu.try_solve(&rhs)?;
        let next = unknowns_to_modal(space, &state.u_start, &x, q);
        let diff: Vec<f64> = next.iter().zip(&modal).map(|(a, b)| a - b).collect();
        let num = slab_l2_sq(space, &diff, tau, q);
        let den = slab_l2_sq(space, &next, tau, q);
        let inc = if num == 0.0 { 0.0 } else { (num / den).sqrt() };
        increments.push(inc);
        modal = next;
        if inc <= controls.tol {
            return Ok(SlabOutcome {
                modal,
                iterations: s,
                increments,
                converged: true,
            });
        }
    }
    if controls.strict {
        return Err(Error::SolverFailure(format!(
            "fixed-point iteration did not reach tol = {:e} in {} iterations (last increment {:e})",
            controls.tol,
            controls.s_max,
            increments.last().copied().unwrap_or(f64::NAN)
        )));
    }
    Ok(SlabOutcome {
        modal,
        iterations: controls.s_max,
        increments,
        converged: false,
    })
}

/// Build the space and march all slabs.
pub fn solve_westervelt(config: &ProblemConfig) -> Result<(DiscreteSolution, SolverReport)> {
    config.validate()?;
    let space = Arc::new(config.build_space()?);
    solve_on_space(space, config)
}

/// March all slabs on a prebuilt space (`config.n` and `config.p` must match it).
pub fn solve_on_space(space: Arc<FESpace>, config: &ProblemConfig) -> Result<(DiscreteSolution, SolverReport)> {
    config.validate()?;
    if space.degree() != config.p || space.mesh().subdivisions() != config.n {
        return Err(Error::invalid("space does not match the configuration"));
    }
    let start = Instant::now();
    let case = &config.case;
    let q = config.q;
    let ph = case.physics;
    let partition = config.partition()?;
    let nd = space.num_dofs();
    let mut cache = FactorizationCache::new(space.clone(), q, ph.c, ph.delta);
    let mut report = SolverReport {
        converged: true,
        num_unknowns_per_slab: q * space.num_free(),
        ..Default::default()
    };
    let mut slabs = Vec::with_capacity(partition.num_slabs());
    let u0 = if case.has_zero_data() {
        vec![0.0; nd]
    } else {
        ritz_project(&space, |x| case.grad_u0(x))?
    };
    let mut state = SlabState::initial(&space, case, u0, partition.step(0));
    let tab1 = legendre_table(q, 1.0);
    for n in 0..partition.num_slabs() {
        let (t0, t1) = partition.slab(n);
        let tau = partition.step(n);
        state.index = n;
        state.t_start = t0;
        state.tau = tau;
        let outcome = (|| {
            let entry = cache.get(tau)?;
            let data = data_load(&space, case, t0, tau, q);
            let out = solve_slab_fixed_point(&space, &entry.1, &state, &data, ph.k, ph.c, q, &config.controls)?;
            let res = if config.controls.residuals {
                Some(nonlinear_residual(&space, &state, &data, &out.modal, ph.k, ph.c, ph.delta, q).relative())
            } else {
                None
            };
            Ok::<_, Error>((out, res))
        })()
        .map_err(|e| e.in_slab(n))?;
        let (out, res) = outcome;
        if !out.converged {
            log::warn!(
                "slab {n}: fixed-point iteration stopped at s_max = {} (increment {:e})",
                config.controls.s_max,
                out.increments.last().copied().unwrap_or(f64::NAN)
            );
            report.converged = false;
        }
        report.iterations.push(out.iterations);
        report.increments.push(out.increments.last().copied().unwrap_or(0.0));
        report.increment_history.push(out.increments);
        if let Some(r) = res {
            report.residuals.push(r);
        }
        // hand the right trace to the next slab
        let mut u_end = vec![0.0; nd];
        let mut dt_end = vec![0.0; nd];
        for j in 0..=q {
            let mj = &out.modal[j * nd..(j + 1) * nd];
            for d in 0..nd {
                u_end[d] += tab1.values[j] * mj[d];
                dt_end[d] += tab1.d1[j] * mj[d] / tau;
            }
        }
        slabs.push(out.modal);
        state = SlabState {
            index: n + 1,
            t_start: t1,
            tau: 0.0,
            u_start: u_end,
            trace: TraceData::Interface { dt_left: dt_end },
        };
    }
    report.factorizations = cache.count();
    report.wall_time_s = start.elapsed().as_secs_f64();
    let mut sol = DiscreteSolution::new(space, partition, q, slabs)?;
    sol.iterations = report.iterations.clone();
    sol.converged = report.converged;
    Ok((sol, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::smooth_case;
    use std::f64::consts::PI;

    #[test]
    fn zero_data_gives_zero_solution() {
        let mut case = Case::by_label("smooth").unwrap();
        case.scale_data(0.0);
        let cfg = ProblemConfig::new(case, 3, 2, 3, 0.25);
        let (sol, rep) = solve_westervelt(&cfg).unwrap();
        for n in 0..4 {
            assert!(sol.slab(n).iter().all(|v| *v == 0.0));
        }
        assert_eq!(rep.factorizations, 1);
    }

    #[test]
    fn linear_problem_single_iteration() {
        let case = smooth_case(1e-2, PI / 3.0, PI, 0.0, 1.0, 0.0);
        let mut cfg = ProblemConfig::new(case, 4, 2, 2, 0.1);
        cfg.controls.residuals = true;
        let (sol, rep) = solve_westervelt(&cfg).unwrap();
        assert!(rep.iterations.iter().all(|&i| i == 1));
        assert_eq!(rep.factorizations, 1);
        assert!(rep.residuals.iter().all(|&r| r <= 1e-10), "{:?}", rep.residuals);
        assert!(sol.continuity_defect() <= 1e-14);
    }

    #[test]
    fn nonlinear_smooth_case_converges() {
        let case = Case::by_label("smooth").unwrap();
        let mut cfg = ProblemConfig::new(case, 4, 2, 3, 0.2);
        cfg.controls.residuals = true;
        let (_, rep) = solve_westervelt(&cfg).unwrap();
        assert!(rep.converged);
        assert!(rep.iterations.iter().all(|&i| i <= 5), "{:?}", rep.iterations);
        assert!(rep.residuals.iter().all(|&r| r <= 1e-9), "{:?}", rep.residuals);
    }

    #[test]
    fn invalid_step_is_config_error() {
        let cfg = ProblemConfig::new(Case::by_label("smooth").unwrap(), 2, 1, 2, 0.3);
        assert!(matches!(solve_westervelt(&cfg), Err(Error::Config(_))));
    }
}
