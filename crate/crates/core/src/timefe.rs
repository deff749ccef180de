//! Time partitions, shifted Legendre modal bases and the temporal projections.
//!
//! On a slab `I_n = (t_{n-1}, t_n)` a polynomial is stored by its modal
//! coefficients in the shifted Legendre basis `L~_j(s) = L_j(2s - 1)`,
//! `s = (t - t_{n-1}) / tau_n`. In this basis the L^2 projection onto degree
//! `r` is a truncation and `||sum a_j L~_j||^2_{L^2(I_n)} = tau_n sum a_j^2 / (2j + 1)`.

use crate::cases::SpaceTimeFunction;
use crate::error::{Error, Result};
use crate::solution::DiscreteSolution;
use crate::spacefe::{FESpace, RitzProjector};
use std::sync::Arc;

pub use crate::quadrature::{gauss_interval, IntervalRule};

/// One-sided evaluation at breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Limit from the left, `t^-`.
    Left,
    /// Limit from the right, `t^+`.
    Right,
}

/// `(L~_q(s), dL~_q/ds)`.
pub fn legendre_shifted(q: usize, s: f64) -> (f64, f64) {
    let t = legendre_table(q, s);
    (t.values[q], t.d1[q])
}

/// Shifted Legendre polynomials of all degrees `<= q` with first and second
/// derivatives in `s`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    pub values: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

pub fn legendre_table(q: usize, s: f64) -> LegendreTable {
    let x = 2.0 * s - 1.0;
    let mut p = vec![0.0; q + 1];
    let mut dp = vec![0.0; q + 1];
    let mut ddp = vec![0.0; q + 1];
    p[0] = 1.0;
    if q >= 1 {
        p[1] = x;
        dp[1] = 1.0;
    }
    for j in 1..q {
        let jf = j as f64;
        p[j + 1] = ((2.0 * jf + 1.0) * x * p[j] - jf * p[j - 1]) / (jf + 1.0);
        dp[j + 1] = dp[j - 1] + (2.0 * jf + 1.0) * p[j];
        ddp[j + 1] = ddp[j - 1] + (2.0 * jf + 1.0) * dp[j];
    }
    // d/ds = 2 d/dx
    LegendreTable {
        values: p,
        d1: dp.into_iter().map(|v| 2.0 * v).collect(),
        d2: ddp.into_iter().map(|v| 4.0 * v).collect(),
    }
}

/// Value of a modal expansion at `s`.
pub fn eval_modal(coeffs: &[f64], s: f64) -> f64 {
    if coeffs.is_empty() {
        return 0.0;
    }
    let t = legendre_table(coeffs.len() - 1, s);
    coeffs.iter().zip(&t.values).map(|(a, l)| a * l).sum()
}

/// `d/ds` of a modal expansion at `s`.
pub fn eval_modal_ds(coeffs: &[f64], s: f64) -> f64 {
    if coeffs.is_empty() {
        return 0.0;
    }
    let t = legendre_table(coeffs.len() - 1, s);
    coeffs.iter().zip(&t.d1).map(|(a, l)| a * l).sum()
}

/// Squared `L^2(0,1)` norm of a modal expansion.
pub fn modal_norm_sq(coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| a * a / (2.0 * j as f64 + 1.0))
        .sum()
}

/// Modal coefficients of `s * p(s)` for a modal expansion `p` (degree grows by one).
pub fn multiply_by_s(coeffs: &[f64]) -> Vec<f64> {
    // s = (1 + x)/2 and x L_j = ((j+1) L_{j+1} + j L_{j-1}) / (2j+1)
    let mut out = vec![0.0; coeffs.len() + 1];
    for (j, &a) in coeffs.iter().enumerate() {
        let jf = j as f64;
        out[j] += 0.5 * a;
        out[j + 1] += 0.5 * a * (jf + 1.0) / (2.0 * jf + 1.0);
        if j > 0 {
            out[j - 1] += 0.5 * a * jf / (2.0 * jf + 1.0);
        }
    }
    out
}

/// Modal coefficients of `d/ds` of a modal expansion (degree drops by one).
pub fn modal_derivative(coeffs: &[f64]) -> Vec<f64> {
    // L_j' = sum_{k < j, j - k odd} (2k + 1) L_k, and d/ds = 2 d/dx
    let n = coeffs.len();
    let mut out = vec![0.0; n.saturating_sub(1)];
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        let mut j = k + 1;
        while j < n {
            acc += coeffs[j];
            j += 2;
        }
        *o = 2.0 * (2.0 * k as f64 + 1.0) * acc;
    }
    out
}

/// Truncation to degree `r`: the L^2 projection `Pi_r` in modal form.
pub fn truncate(coeffs: &[f64], r: usize) -> Vec<f64> {
    coeffs.iter().take(r + 1).copied().collect()
}

/// Ordered breakpoints `0 = t_0 < t_1 < ... < t_N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePartition {
    breakpoints: Vec<f64>,
    /// Common slab length of uniform partitions.
    uniform_step: Option<f64>,
}

impl TimePartition {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::invalid("a time partition needs at least one interval"));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::invalid("time partitions start at t = 0"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::invalid("breakpoints must be finite and strictly increasing"));
        }
        Ok(Self {
            breakpoints,
            uniform_step: None,
        })
    }

    /// `n` equal slabs of `(0, t_final)`; the last breakpoint is exactly `t_final`.
    pub fn uniform(t_final: f64, n: usize) -> Result<Self> {
        if n == 0 || !(t_final > 0.0) {
            return Err(Error::invalid("uniform partition needs n >= 1 and T > 0"));
        }
        let tau = t_final / n as f64;
        let mut b: Vec<f64> = (0..=n).map(|i| i as f64 * tau).collect();
        b[n] = t_final;
        let mut p = Self::new(b)?;
        p.uniform_step = Some(tau);
        Ok(p)
    }

    /// Uniform partition with step `tau`, which must divide `t_final`.
    pub fn with_step(t_final: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::invalid("time step must be positive"));
        }
        let n = (t_final / tau).round();
        if n < 1.0 || (n * tau - t_final).abs() > 1e-12 * t_final.max(1.0) {
            return Err(Error::invalid(format!(
                "time step {tau} does not divide T = {t_final}"
            )));
        }
        Self::uniform(t_final, n as usize)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn num_slabs(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn t_final(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// `(t_{n-1}, t_n)` for 0-based slab index `n`.
    pub fn slab(&self, n: usize) -> (f64, f64) {
        (self.breakpoints[n], self.breakpoints[n + 1])
    }

    /// Slab length; bit-identical across slabs of a uniform partition.
    pub fn step(&self, n: usize) -> f64 {
        self.uniform_step
            .unwrap_or(self.breakpoints[n + 1] - self.breakpoints[n])
    }

    pub fn tau_max(&self) -> f64 {
        (0..self.num_slabs()).map(|n| self.step(n)).fold(0.0, f64::max)
    }

    pub fn tau_min(&self) -> f64 {
        (0..self.num_slabs())
            .map(|n| self.step(n))
            .fold(f64::INFINITY, f64::min)
    }

    /// Slab index and local coordinate `s` of time `t` with the given one-sided limit.
    pub fn locate(&self, t: f64, side: Side) -> (usize, f64) {
        let n = self.num_slabs();
        let b = &self.breakpoints;
        let idx = match side {
            // first slab whose right end is >= t
            Side::Left => b[1..].partition_point(|&x| x < t).min(n - 1),
            // last slab whose left end is <= t
            Side::Right => b[..n].partition_point(|&x| x <= t).saturating_sub(1),
        };
        let (a, c) = self.slab(idx);
        (idx, ((t - a) / (c - a)).clamp(0.0, 1.0))
    }
}

/// Piecewise polynomial in time stored slab-wise in modal form.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePoly {
    pub partition: TimePartition,
    pub coeffs: Vec<Vec<f64>>,
}

impl TimePoly {
    pub fn eval(&self, t: f64, side: Side) -> f64 {
        let (n, s) = self.partition.locate(t, side);
        eval_modal(&self.coeffs[n], s)
    }

    /// Time derivative (in `t` units).
    pub fn deriv(&self, t: f64, side: Side) -> f64 {
        let (n, s) = self.partition.locate(t, side);
        eval_modal_ds(&self.coeffs[n], s) / self.partition.step(n)
    }
}

/// Modal coefficients of the `L^2(I_n)` projection of `v` onto degree `r`,
/// using an `npts`-point Gauss rule on the slab `(t0, t1)`.
pub fn l2_project_time(r: usize, v: impl Fn(f64) -> f64, t0: f64, t1: f64, npts: usize) -> Vec<f64> {
    let rule = gauss_interval(npts);
    let mut c = vec![0.0; r + 1];
    for (&s, w) in rule.iter() {
        let vt = v(t0 + (t1 - t0) * s);
        let tab = legendre_table(r, s);
        for (cj, lj) in c.iter_mut().zip(&tab.values) {
            *cj += w * vt * lj;
        }
    }
    for (j, cj) in c.iter_mut().enumerate() {
        *cj *= 2.0 * j as f64 + 1.0;
    }
    c
}

/// Modal coefficients (in `s`) of the antiderivative vanishing at `s = 0` of
/// `sum_j d_j L~_j`.
fn antiderivative(d: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; d.len() + 1];
    for (j, &dj) in d.iter().enumerate() {
        if j == 0 {
            out[0] += 0.5 * dj;
            out[1] += 0.5 * dj;
        } else {
            let c = dj / (2.0 * (2.0 * j as f64 + 1.0));
            out[j + 1] += c;
            out[j - 1] -= c;
        }
    }
    out
}

/// One slab of `P_tau`: the degree-`q` polynomial with value `start` at the
/// left end, derivative `dv_end` at the right end, and derivative moments
/// `dv_moments[j]` (modal coefficients of the projection of `v'` onto degree
/// `q - 2`, in `t` units).
pub fn ptau_slab(q: usize, tau: f64, start: f64, dv_end: f64, dv_moments: &[f64]) -> Vec<f64> {
    debug_assert!(q >= 2 && dv_moments.len() == q - 1);
    // P' = sum_{j<q} d_j L~_j; sum_j d_j L~_j(1) = sum_j d_j fixes the endpoint
    let mut d = dv_moments.to_vec();
    d.push(dv_end - dv_moments.iter().sum::<f64>());
    let mut coeffs: Vec<f64> = antiderivative(&d).into_iter().map(|c| tau * c).collect();
    coeffs[0] += start;
    coeffs
}

/// Number of Gauss points used for the derivative moments of `P_tau`.
pub(crate) fn ptau_moment_points(q: usize) -> usize {
    2 * q + 2
}

/// The projection `P_tau` of a scalar `C^1` function given with its derivative.
pub fn ptau_project(
    q: usize,
    v: impl Fn(f64) -> f64,
    dv: impl Fn(f64) -> f64,
    partition: &TimePartition,
) -> Result<TimePoly> {
    if q < 2 {
        return Err(Error::invalid("P_tau requires q >= 2"));
    }
    let mut start = v(0.0);
    let mut coeffs = Vec::with_capacity(partition.num_slabs());
    for n in 0..partition.num_slabs() {
        let (t0, t1) = partition.slab(n);
        let moments = l2_project_time(q - 2, &dv, t0, t1, ptau_moment_points(q));
        let c = ptau_slab(q, partition.step(n), start, dv(t1), &moments);
        start = eval_modal(&c, 1.0);
        coeffs.push(c);
    }
    Ok(TimePoly {
        partition: partition.clone(),
        coeffs,
    })
}

/// Combined projection `P_tau o R_h`: Ritz projection in space at the temporal
/// nodes the projection needs, then `P_tau` per spatial dof.
pub fn combined_project(
    space: Arc<FESpace>,
    partition: &TimePartition,
    q: usize,
    u: &dyn SpaceTimeFunction,
) -> Result<DiscreteSolution> {
    if q < 2 {
        return Err(Error::invalid("P_tau requires q >= 2"));
    }
    let nd = space.num_dofs();
    let mut slabs = Vec::with_capacity(partition.num_slabs());
    {
        let ritz = RitzProjector::new(&space)?;
        let rh_dt = |t: f64| ritz.project(|x| u.grad_dt(x, t));
        let mut start = ritz.project(|x| u.grad(x, 0.0))?;
        let rule = gauss_interval(ptau_moment_points(q));
        for n in 0..partition.num_slabs() {
            let (t0, t1) = partition.slab(n);
            let tau = partition.step(n);
            let mut moments = vec![vec![0.0; nd]; q - 1];
            for (&s, w) in rule.iter() {
                let v = rh_dt(t0 + tau * s)?;
                let tab = legendre_table(q - 2, s);
                for (j, m) in moments.iter_mut().enumerate() {
                    let f = w * (2.0 * j as f64 + 1.0) * tab.values[j];
                    for (mi, vi) in m.iter_mut().zip(&v) {
                        *mi += f * vi;
                    }
                }
            }
            let end = rh_dt(t1)?;
            let mut block = vec![0.0; (q + 1) * nd];
            let mut dm = vec![0.0; q - 1];
            for d in 0..nd {
                for (j, m) in moments.iter().enumerate() {
                    dm[j] = m[d];
                }
                let c = ptau_slab(q, tau, start[d], end[d], &dm);
                for (j, cj) in c.iter().enumerate() {
                    block[j * nd + d] = *cj;
                }
                start[d] = c.iter().sum();
            }
            slabs.push(block);
        }
    }
    DiscreteSolution::new(space, partition.clone(), q, slabs)
}

/// `zeta_q = 1 / (4 (2q + 1))`.
pub fn zeta(q: usize) -> f64 {
    1.0 / (4.0 * (2.0 * q as f64 + 1.0))
}

/// Linear weight `phi_n(t) = theta - lambda_n (t - t_{n-1})` on one slab.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFunction {
    pub theta: f64,
    pub lambda: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl WeightFunction {
    pub fn eval(&self, t: f64) -> f64 {
        self.theta - self.lambda * (t - self.t_start)
    }

    /// Modal coefficients (in `s` on the slab) of the linear function.
    pub fn modal(&self) -> [f64; 2] {
        // theta - lambda tau s, with s = (1 + L~_1)/2
        let slope = self.lambda * (self.t_end - self.t_start);
        [self.theta - 0.5 * slope, -0.5 * slope]
    }
}

/// Weight function on slab `n` (0-based) with `lambda_n = zeta_q / tau_n`.
pub fn weight_phi(n: usize, theta: f64, q: usize, partition: &TimePartition) -> Result<WeightFunction> {
    weight_phi_with(n, theta, zeta(q), partition)
}

/// As [`weight_phi`] with an explicit constant in place of `zeta_q`.
pub fn weight_phi_with(
    n: usize,
    theta: f64,
    zeta_q: f64,
    partition: &TimePartition,
) -> Result<WeightFunction> {
    if !(theta > zeta_q) {
        return Err(Error::invalid(format!(
            "weight parameter theta = {theta} must exceed zeta_q = {zeta_q}"
        )));
    }
    if n >= partition.num_slabs() {
        return Err(Error::invalid("slab index out of range"));
    }
    let (t0, t1) = partition.slab(n);
    Ok(WeightFunction {
        theta,
        lambda: zeta_q / (t1 - t0),
        t_start: t0,
        t_end: t1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_endpoints_and_values() {
        assert_eq!(legendre_shifted(1, 0.0), (-1.0, 2.0));
        for q in 0..10 {
            let (v1, _) = legendre_shifted(q, 1.0);
            let (v0, _) = legendre_shifted(q, 0.0);
            assert!((v1 - 1.0).abs() < 1e-14);
            assert!((v0 - (-1f64).powi(q as i32)).abs() < 1e-14);
        }
        let rule = gauss_interval(4);
        let sq: f64 = rule.iter().map(|(&s, w)| w * legendre_shifted(1, s).0.powi(2)).sum();
        assert!((sq - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn legendre_orthogonality() {
        let rule = gauss_interval(8);
        for a in 0..=6 {
            for b in 0..=6 {
                let ip: f64 = rule
                    .iter()
                    .map(|(&s, w)| w * legendre_shifted(a, s).0 * legendre_shifted(b, s).0)
                    .sum();
                let expect = if a == b { 1.0 / (2.0 * a as f64 + 1.0) } else { 0.0 };
                assert!((ip - expect).abs() < 1e-14, "({a},{b}): {ip}");
            }
        }
    }

    #[test]
    fn legendre_derivatives_fd() {
        let h = 1e-6;
        for q in 0..8 {
            for &s in &[0.1, 0.45, 0.9] {
                let t = legendre_table(q, s);
                let tp = legendre_table(q, s + h);
                let tm = legendre_table(q, s - h);
                let d1 = (tp.values[q] - tm.values[q]) / (2.0 * h);
                let d2 = (tp.d1[q] - tm.d1[q]) / (2.0 * h);
                assert!((d1 - t.d1[q]).abs() < 1e-6 * (1.0 + d1.abs()));
                assert!((d2 - t.d2[q]).abs() < 1e-5 * (1.0 + d2.abs()));
            }
        }
    }

    #[test]
    fn l2_projection_examples() {
        // Pi_1 of s^2 on [0,1] is s - 1/6
        let c = l2_project_time(1, |t| t * t, 0.0, 1.0, 3);
        for &s in &[0.0, 0.3, 1.0] {
            assert!((eval_modal(&c, s) - (s - 1.0 / 6.0)).abs() < 1e-15);
        }
        // Pi_{q-1} L~_q = 0
        for q in 1..7 {
            let c = l2_project_time(q - 1, |t| legendre_shifted(q, t).0, 0.0, 1.0, q + 1);
            assert!(c.iter().all(|v| v.abs() < 1e-14));
        }
        // reproduction on a shifted slab
        let c = l2_project_time(3, |t| 2.0 * t * t * t - t + 0.5, 1.0, 1.5, 4);
        let s = 0.37;
        let t = 1.0 + 0.5 * s;
        assert!((eval_modal(&c, s) - (2.0 * t * t * t - t + 0.5)).abs() < 1e-13);
    }

    #[test]
    fn multiply_by_s_matches_pointwise() {
        let c = [0.3, -1.2, 0.7, 2.0];
        let m = multiply_by_s(&c);
        for &s in &[0.0, 0.21, 0.5, 0.93, 1.0] {
            assert!((eval_modal(&m, s) - s * eval_modal(&c, s)).abs() < 1e-14);
        }
    }

    #[test]
    fn modal_derivative_matches_pointwise() {
        let c = [0.4, -1.0, 0.25, 2.0, -0.7];
        let d = modal_derivative(&c);
        for &s in &[0.0, 0.33, 0.8, 1.0] {
            assert!((eval_modal(&d, s) - eval_modal_ds(&c, s)).abs() < 1e-12);
        }
    }

    #[test]
    fn partition_locate() {
        let p = TimePartition::uniform(1.0, 4).unwrap();
        assert_eq!(p.locate(0.25, Side::Left), (0, 1.0));
        assert_eq!(p.locate(0.25, Side::Right), (1, 0.0));
        assert_eq!(p.locate(0.0, Side::Left), (0, 0.0));
        assert_eq!(p.locate(1.0, Side::Right), (3, 1.0));
        let (n, s) = p.locate(0.6, Side::Left);
        assert_eq!(n, 2);
        assert!((s - 0.4).abs() < 1e-14);
        assert!(TimePartition::with_step(1.0, 0.3).is_err());
        assert_eq!(TimePartition::with_step(1.0, 0.2).unwrap().num_slabs(), 5);
        assert!(TimePartition::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
    }

    #[test]
    fn ptau_cubic_example() {
        let p = TimePartition::uniform(1.0, 1).unwrap();
        let proj = ptau_project(2, |t| t * t * t, |t| 3.0 * t * t, &p).unwrap();
        for &t in &[0.0, 0.2, 0.5, 1.0] {
            assert!((proj.eval(t, Side::Left) - (2.0 * t * t - t)).abs() < 1e-14);
        }
    }

    #[test]
    fn ptau_requires_q_at_least_two() {
        let p = TimePartition::uniform(1.0, 2).unwrap();
        assert!(matches!(
            ptau_project(1, |t| t, |_| 1.0, &p),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn ptau_reproduces_and_is_continuous() {
        let p = TimePartition::new(vec![0.0, 0.3, 0.45, 1.0]).unwrap();
        let v = |t: f64| 1.0 - 2.0 * t + 0.5 * t.powi(3) - t.powi(4);
        let dv = |t: f64| -2.0 + 1.5 * t * t - 4.0 * t.powi(3);
        let proj = ptau_project(4, v, dv, &p).unwrap();
        for &t in &[0.0, 0.1, 0.3, 0.44, 0.7, 1.0] {
            assert!((proj.eval(t, Side::Left) - v(t)).abs() < 1e-13);
        }
        let sin = ptau_project(3, f64::sin, f64::cos, &p).unwrap();
        for &t in &p.breakpoints()[1..p.num_slabs()] {
            assert!((sin.eval(t, Side::Left) - sin.eval(t, Side::Right)).abs() < 1e-14);
        }
    }

    #[test]
    fn weight_function_basics() {
        assert!((zeta(2) - 1.0 / 20.0).abs() < 1e-16);
        assert!((zeta(5) - 1.0 / 44.0).abs() < 1e-16);
        let p = TimePartition::new(vec![0.0, 0.3, 1.0]).unwrap();
        let w = weight_phi(1, 1.0, 3, &p).unwrap();
        assert!((w.eval(0.3) - 1.0).abs() < 1e-15);
        assert!((w.eval(1.0) - w.eval(0.3) + zeta(3)).abs() < 1e-15);
        let m = w.modal();
        assert!((eval_modal(&m, 0.0) - w.eval(0.3)).abs() < 1e-15);
        assert!((eval_modal(&m, 1.0) - w.eval(1.0)).abs() < 1e-15);
        assert!(matches!(weight_phi(0, zeta(2), 2, &p), Err(Error::InvalidArgument(_))));
    }
}
