//! Error functionals, the jump functional, the energy norm and convergence rates.

use crate::cases::SpaceTimeFunction;
use crate::error::{Error, Result};
use crate::solution::DiscreteSolution;
use crate::timefe::modal_derivative;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which derivative the error functional measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorMode {
    /// `||d/dt (u - u_h)||_{L^inf(0,T; L^2)}`
    Dt,
    /// `||grad (u - u_h)||_{L^inf(0,T; L^2)}`
    Grad,
}

/// Reference against which a discrete solution is measured.
#[derive(Clone, Copy)]
pub enum Reference<'a> {
    Exact(&'a dyn SpaceTimeFunction),
    Discrete(&'a DiscreteSolution),
}

/// Default number of uniformly spaced samples per slab, endpoints included.
pub fn default_samples(q: usize) -> usize {
    2 * q + 3
}

fn sample_points(m: usize) -> Vec<f64> {
    if m <= 1 {
        return vec![0.5];
    }
    (0..m).map(|i| i as f64 / (m - 1) as f64).collect()
}

/// Maximum over sample times of the spatial L^2 error, each slab sampled with
/// its own polynomial (one-sided limits at breakpoints).
pub fn err_linf_l2(u_h: &DiscreteSolution, reference: Reference<'_>, mode: ErrorMode, samples_per_slab: usize) -> Result<f64> {
    let space = u_h.space();
    let part = u_h.partition();
    let ss = sample_points(samples_per_slab);
    let jobs: Vec<(usize, f64)> = (0..part.num_slabs())
        .flat_map(|n| ss.iter().map(move |&s| (n, s)))
        .collect();
    match reference {
        Reference::Discrete(other) => {
            if !u_h.same_discretization(other) {
                return Err(Error::invalid("error between solutions on different discretizations"));
            }
            let diff = u_h.difference(other)?;
            let errs: Vec<f64> = jobs
                .par_iter()
                .map(|&(n, s)| match mode {
                    ErrorMode::Dt => {
                        let v = diff.eval_dt(n, s);
                        space.mass().bilinear(&v, &v).max(0.0).sqrt()
                    }
                    ErrorMode::Grad => {
                        let v = diff.eval(n, s);
                        space.stiffness().bilinear(&v, &v).max(0.0).sqrt()
                    }
                })
                .collect();
            Ok(errs.into_iter().fold(0.0, f64::max))
        }
        Reference::Exact(u) => {
            let deg = space.error_degree();
            let errs: Vec<f64> = jobs
                .par_iter()
                .map(|&(n, s)| {
                    let (t0, _) = part.slab(n);
                    let t = t0 + part.step(n) * s;
                    match mode {
                        ErrorMode::Dt => {
                            let v = u_h.eval_dt(n, s);
                            space.l2_error(&v, deg, |x| u.dt(x, t))
                        }
                        ErrorMode::Grad => {
                            let v = u_h.eval(n, s);
                            space.grad_error(&v, deg, |x| u.grad(x, t))
                        }
                    }
                })
                .collect();
            Ok(errs.into_iter().fold(0.0, f64::max))
        }
    }
}

/// `sqrt(1/2 (||v(T)||^2 + sum_n ||[v]_n||^2 + ||v(0)||^2))` applied to `v = du_h/dt`.
pub fn jump_functional(u_h: &DiscreteSolution) -> f64 {
    (0.5 * jump_parts(u_h).iter().sum::<f64>()).sqrt()
}

/// Squared endpoint and interface contributions `[||v(T)||^2, sum ||[v]_n||^2, ||v(0)||^2]`.
pub fn jump_parts(u_h: &DiscreteSolution) -> [f64; 3] {
    let m = u_h.space().mass();
    let nsl = u_h.partition().num_slabs();
    let sq = |v: &[f64]| m.bilinear(v, v).max(0.0);
    let end = sq(&u_h.eval_dt(nsl - 1, 1.0));
    let start = sq(&u_h.eval_dt(0, 0.0));
    let inner: f64 = (1..nsl)
        .map(|n| {
            let l = u_h.eval_dt(n - 1, 1.0);
            let r = u_h.eval_dt(n, 0.0);
            let d: Vec<f64> = l.iter().zip(&r).map(|(a, b)| a - b).collect();
            sq(&d)
        })
        .sum();
    [end, inner, start]
}

/// `delta ||grad du_h/dt||^2_{L^2(Q_T)}` integrated exactly in time.
pub fn damping_energy(u_h: &DiscreteSolution, delta: f64) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    let k = u_h.space().stiffness();
    let nd = u_h.num_dofs();
    let q = u_h.q();
    let mut total = 0.0;
    for n in 0..u_h.partition().num_slabs() {
        let tau = u_h.partition().step(n);
        // modal derivative per dof
        let mut d = vec![vec![0.0; nd]; q];
        let mut col = vec![0.0; q + 1];
        for dof in 0..nd {
            for (j, c) in col.iter_mut().enumerate() {
                *c = u_h.mode(n, j)[dof];
            }
            for (j, v) in modal_derivative(&col).into_iter().enumerate() {
                d[j][dof] = v;
            }
        }
        for (j, dj) in d.iter().enumerate() {
            total += k.bilinear(dj, dj) / (2.0 * j as f64 + 1.0) / tau;
        }
    }
    delta * total
}

/// The six-term energy norm; L^inf parts sampled with `samples_per_slab` points per slab.
pub fn energy_norm(u_h: &DiscreteSolution, delta: f64, c: f64, samples_per_slab: usize) -> f64 {
    let space = u_h.space();
    let (m, k) = (space.mass(), space.stiffness());
    let nsl = u_h.partition().num_slabs();
    let ss = sample_points(samples_per_slab);
    let mut kin: f64 = 0.0;
    let mut pot: f64 = 0.0;
    for n in 0..nsl {
        for &s in &ss {
            let v = u_h.eval_dt(n, s);
            kin = kin.max(m.bilinear(&v, &v));
            let w = u_h.eval(n, s);
            pot = pot.max(k.bilinear(&w, &w));
        }
    }
    let jump: f64 = 0.5 * jump_parts(u_h).iter().sum::<f64>();
    let u_t = u_h.eval(nsl - 1, 1.0);
    let u_0 = u_h.eval(0, 0.0);
    let c2 = c * c;
    let total = kin + c2 * pot + jump + c2 * k.bilinear(&u_t, &u_t) + c2 * k.bilinear(&u_0, &u_0)
        + damping_energy(u_h, delta);
    total.max(0.0).sqrt()
}

/// `log(e_i / e_{i+1}) / log(x_i / x_{i+1})`; `None` where a rate is undefined.
pub fn eoc(errors: &[f64], params: &[f64]) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .zip(params.windows(2))
        .map(|(e, x)| {
            if e[0] > 0.0 && e[1] > 0.0 && x[0] > 0.0 && x[1] > 0.0 && x[0] != x[1] && e[0].is_finite() && e[1].is_finite() {
                Some((e[0] / e[1]).ln() / (x[0] / x[1]).ln())
            } else {
                None
            }
        })
        .collect()
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub case: String,
    pub n: usize,
    pub h: f64,
    pub tau: f64,
    pub p: usize,
    pub q: usize,
    pub delta: f64,
    pub k: f64,
    pub c: f64,
    pub err_dt: f64,
    pub err_grad: f64,
    pub eoc_dt: Option<f64>,
    pub eoc_grad: Option<f64>,
    pub iters_mean: f64,
    pub iters_max: usize,
    pub runtime_s: f64,
    /// Total spatial-temporal degrees of freedom.
    pub n_dofs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jump: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(default)]
    pub converged: bool,
    #[serde(default)]
    pub max_residual: Option<f64>,
}

/// Fill `eoc_dt` / `eoc_grad` of consecutive records against the given parameter values.
pub fn fill_eoc(records: &mut [ErrorRecord], params: &[f64]) {
    let dt: Vec<f64> = records.iter().map(|r| r.err_dt).collect();
    let gr: Vec<f64> = records.iter().map(|r| r.err_grad).collect();
    let rd = eoc(&dt, params);
    let rg = eoc(&gr, params);
    for (i, r) in records.iter_mut().enumerate() {
        r.eoc_dt = if i == 0 { None } else { rd[i - 1] };
        r.eoc_grad = if i == 0 { None } else { rg[i - 1] };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;
    use crate::spacefe::FESpace;
    use crate::timefe::TimePartition;
    use std::f64::consts::PI;
    use std::sync::Arc;

    struct Stationary;
    impl SpaceTimeFunction for Stationary {
        fn value(&self, x: [f64; 2], _t: f64) -> f64 {
            (PI * x[0]).sin() * (PI * x[1]).sin()
        }
        fn dt(&self, _x: [f64; 2], _t: f64) -> f64 {
            0.0
        }
        fn grad(&self, x: [f64; 2], _t: f64) -> [f64; 2] {
            [PI * (PI * x[0]).cos() * (PI * x[1]).sin(), PI * (PI * x[0]).sin() * (PI * x[1]).cos()]
        }
        fn grad_dt(&self, _x: [f64; 2], _t: f64) -> [f64; 2] {
            [0.0; 2]
        }
    }

    struct Linear;
    impl SpaceTimeFunction for Linear {
        fn value(&self, x: [f64; 2], t: f64) -> f64 {
            t * Stationary.value(x, t)
        }
        fn dt(&self, x: [f64; 2], t: f64) -> f64 {
            Stationary.value(x, t)
        }
        fn grad(&self, x: [f64; 2], t: f64) -> [f64; 2] {
            let g = Stationary.grad(x, t);
            [t * g[0], t * g[1]]
        }
        fn grad_dt(&self, x: [f64; 2], t: f64) -> [f64; 2] {
            Stationary.grad(x, t)
        }
    }

    fn zero_solution() -> DiscreteSolution {
        let space = Arc::new(FESpace::new(Mesh::unit_square(4).unwrap(), 2).unwrap());
        DiscreteSolution::zeros(space, TimePartition::uniform(1.0, 3).unwrap(), 2)
    }

    #[test]
    fn closed_form_errors() {
        let z = zero_solution();
        let g = err_linf_l2(&z, Reference::Exact(&Stationary), ErrorMode::Grad, 7).unwrap();
        assert!((g - PI / 2f64.sqrt()).abs() < 1e-6, "{g}");
        let d = err_linf_l2(&z, Reference::Exact(&Linear), ErrorMode::Dt, 7).unwrap();
        assert!((d - 0.5).abs() < 1e-6, "{d}");
        assert_eq!(err_linf_l2(&z, Reference::Discrete(&z), ErrorMode::Dt, 7).unwrap(), 0.0);
    }

    #[test]
    fn incompatible_discretizations_rejected() {
        let z = zero_solution();
        let space = Arc::new(FESpace::new(Mesh::unit_square(2).unwrap(), 1).unwrap());
        let other = DiscreteSolution::zeros(space, TimePartition::uniform(1.0, 3).unwrap(), 2);
        assert!(matches!(
            err_linf_l2(&z, Reference::Discrete(&other), ErrorMode::Grad, 5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn jump_and_energy_of_zero() {
        let z = zero_solution();
        assert_eq!(jump_functional(&z), 0.0);
        assert_eq!(energy_norm(&z, 1.0, 1.0, 7), 0.0);
    }

    #[test]
    fn single_slab_jump() {
        let space = Arc::new(FESpace::new(Mesh::unit_square(4).unwrap(), 2).unwrap());
        let g = space.interpolate(|x| x[0] * (1.0 - x[0]) * x[1]);
        let nd = space.num_dofs();
        let part = TimePartition::uniform(2.0, 1).unwrap();
        // u = t g, so du/dt = g on the whole slab; in s: u = 2 s g = g (L~_0 + L~_1)
        let mut block = vec![0.0; 3 * nd];
        block[..nd].copy_from_slice(&g);
        block[nd..2 * nd].copy_from_slice(&g);
        let sol = DiscreteSolution::new(space.clone(), part, 2, vec![block]).unwrap();
        let j = jump_functional(&sol);
        assert!((j - space.l2_norm(&g)).abs() < 1e-13);
        // delta term: delta * T * |g|_1^2
        let e = damping_energy(&sol, 0.5);
        let h1 = space.h1_seminorm(&g);
        assert!((e - 0.5 * 2.0 * h1 * h1).abs() < 1e-12);
        assert!(energy_norm(&sol, 1.0, 1.0, 7) >= energy_norm(&sol, 0.1, 1.0, 7));
    }

    #[test]
    fn rates() {
        let r = eoc(&[1.0, 0.125], &[0.5, 0.25]);
        assert!((r[0].unwrap() - 3.0).abs() < 1e-14);
        let r = eoc(&[1.0, 0.5], &[1e-2, 1e-3]);
        assert!((r[0].unwrap() - 2f64.log10()).abs() < 1e-14);
        assert_eq!(eoc(&[1.0, 1.0], &[1.0, 0.5])[0], Some(0.0));
        assert_eq!(eoc(&[0.0, 1.0], &[1.0, 0.5])[0], None);
    }
}
