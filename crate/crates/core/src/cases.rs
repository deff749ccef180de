//! Manufactured solutions and the experiment data sets.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smooth space-time function with the derivatives the error functionals need.
pub trait SpaceTimeFunction: Sync {
    fn value(&self, x: [f64; 2], t: f64) -> f64;
    fn dt(&self, x: [f64; 2], t: f64) -> f64;
    fn grad(&self, x: [f64; 2], t: f64) -> [f64; 2];
    fn grad_dt(&self, x: [f64; 2], t: f64) -> [f64; 2];
}

/// Physical coefficients of the Westervelt equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Physics {
    pub c: f64,
    pub k: f64,
    pub delta: f64,
}

/// `A sin(omega t) sin(ell x) sin(ell y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothSolution {
    pub amplitude: f64,
    pub omega: f64,
    pub ell: f64,
}

impl SmoothSolution {
    fn s(&self, x: [f64; 2]) -> f64 {
        (self.ell * x[0]).sin() * (self.ell * x[1]).sin()
    }

    fn grad_s(&self, x: [f64; 2]) -> [f64; 2] {
        let l = self.ell;
        [
            l * (l * x[0]).cos() * (l * x[1]).sin(),
            l * (l * x[0]).sin() * (l * x[1]).cos(),
        ]
    }
}

impl SpaceTimeFunction for SmoothSolution {
    fn value(&self, x: [f64; 2], t: f64) -> f64 {
        self.amplitude * (self.omega * t).sin() * self.s(x)
    }

    fn dt(&self, x: [f64; 2], t: f64) -> f64 {
        self.amplitude * self.omega * (self.omega * t).cos() * self.s(x)
    }

    fn grad(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let a = self.amplitude * (self.omega * t).sin();
        let g = self.grad_s(x);
        [a * g[0], a * g[1]]
    }

    fn grad_dt(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let a = self.amplitude * self.omega * (self.omega * t).cos();
        let g = self.grad_s(x);
        [a * g[0], a * g[1]]
    }
}

/// Data of one of the shipped problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CaseData {
    /// Manufactured solution with closed-form source.
    Smooth(SmoothSolution),
    /// `f = 0`, `u0 = a0 S`, `u1 = a1 S` with `S = sin(pi x) sin(pi y)`.
    StandingWave { a0: f64, a1: f64 },
    /// `f = a / sqrt(sigma) exp(-alpha t) exp(-|x - (1/2,1/2)|^2 / (2 sigma^2))`, zero initial data.
    GaussianPulse { a: f64, alpha: f64, sigma: f64 },
}

/// A complete problem: data, coefficients and final time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub label: String,
    pub physics: Physics,
    pub t_final: f64,
    pub data: CaseData,
}

fn sin_sin(x: [f64; 2]) -> f64 {
    (PI * x[0]).sin() * (PI * x[1]).sin()
}

fn grad_sin_sin(x: [f64; 2]) -> [f64; 2] {
    [
        PI * (PI * x[0]).cos() * (PI * x[1]).sin(),
        PI * (PI * x[0]).sin() * (PI * x[1]).cos(),
    ]
}

impl Case {
    pub fn source(&self, x: [f64; 2], t: f64) -> f64 {
        let Physics { c, k, delta } = self.physics;
        match self.data {
            CaseData::Smooth(sol) => {
                let SmoothSolution { amplitude: a, omega: w, ell: l } = sol;
                let s = sol.s(x);
                -a * w * w * (w * t).sin() * s
                    + k * a * a * w * w * (2.0 * w * t).cos() * s * s
                    + 2.0 * c * c * l * l * a * (w * t).sin() * s
                    + 2.0 * delta * l * l * a * w * (w * t).cos() * s
            }
            CaseData::StandingWave { .. } => 0.0,
            CaseData::GaussianPulse { a, alpha, sigma } => {
                let r2 = (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2);
                a / sigma.sqrt() * (-alpha * t).exp() * (-r2 / (2.0 * sigma * sigma)).exp()
            }
        }
    }

    pub fn u0(&self, x: [f64; 2]) -> f64 {
        match self.data {
            CaseData::Smooth(sol) => sol.value(x, 0.0),
            CaseData::StandingWave { a0, .. } => a0 * sin_sin(x),
            CaseData::GaussianPulse { .. } => 0.0,
        }
    }

    pub fn grad_u0(&self, x: [f64; 2]) -> [f64; 2] {
        match self.data {
            CaseData::Smooth(sol) => sol.grad(x, 0.0),
            CaseData::StandingWave { a0, .. } => {
                let g = grad_sin_sin(x);
                [a0 * g[0], a0 * g[1]]
            }
            CaseData::GaussianPulse { .. } => [0.0, 0.0],
        }
    }

    pub fn u1(&self, x: [f64; 2]) -> f64 {
        match self.data {
            CaseData::Smooth(sol) => sol.dt(x, 0.0),
            CaseData::StandingWave { a1, .. } => a1 * sin_sin(x),
            CaseData::GaussianPulse { .. } => 0.0,
        }
    }

    pub fn exact(&self) -> Option<&SmoothSolution> {
        match &self.data {
            CaseData::Smooth(sol) => Some(sol),
            _ => None,
        }
    }

    /// True when source and initial data vanish identically.
    pub fn has_zero_data(&self) -> bool {
        match self.data {
            CaseData::Smooth(sol) => sol.amplitude == 0.0,
            CaseData::StandingWave { a0, a1 } => a0 == 0.0 && a1 == 0.0,
            CaseData::GaussianPulse { a, .. } => a == 0.0,
        }
    }

    /// Shipped case by label with its default parameters.
    pub fn by_label(label: &str) -> Result<Self> {
        match label {
            "smooth" => Ok(smooth_case(1e-2, PI / 3.0, PI, 0.5, 1.0, 6e-9)),
            "smooth-fast" => {
                let mut c = smooth_case(1e-2, 4.5 * PI, PI, 0.5, 1.0, 6e-9);
                c.label = "smooth-fast".into();
                Ok(c)
            }
            "standing-wave" => Ok(standing_wave_case()),
            "gaussian-pulse" => Ok(gaussian_pulse_case()),
            other => Err(Error::Config(format!(
                "unknown case '{other}' (expected smooth, smooth-fast, standing-wave or gaussian-pulse)"
            ))),
        }
    }

    /// Scale source and initial data by `factor` (the problem is not linear in it when `k != 0`).
    pub fn scale_data(&mut self, factor: f64) {
        match &mut self.data {
            CaseData::Smooth(sol) => sol.amplitude *= factor,
            CaseData::StandingWave { a0, a1 } => {
                *a0 *= factor;
                *a1 *= factor;
            }
            CaseData::GaussianPulse { a, .. } => *a *= factor,
        }
    }
}

pub const CASE_LABELS: [&str; 4] = ["smooth", "smooth-fast", "standing-wave", "gaussian-pulse"];

/// Manufactured smooth solution `A sin(omega t) sin(ell x) sin(ell y)` on `T = 1`.
pub fn smooth_case(amplitude: f64, omega: f64, ell: f64, k: f64, c: f64, delta: f64) -> Case {
    Case {
        label: "smooth".into(),
        physics: Physics { c, k, delta },
        t_final: 1.0,
        data: CaseData::Smooth(SmoothSolution {
            amplitude,
            omega,
            ell,
        }),
    }
}

/// Standing wave without source: `k = 0.3`, `c = 1`, `T = 1`.
pub fn standing_wave_case() -> Case {
    Case {
        label: "standing-wave".into(),
        physics: Physics {
            c: 1.0,
            k: 0.3,
            delta: 0.0,
        },
        t_final: 1.0,
        data: CaseData::StandingWave { a0: 1e-2, a1: 1.0 },
    }
}

/// Focused Gaussian source with zero initial data: `k = -10`, `c = 2000`, `T = 2e-4`.
pub fn gaussian_pulse_case() -> Case {
    Case {
        label: "gaussian-pulse".into(),
        physics: Physics {
            c: 2000.0,
            k: -10.0,
            delta: 0.0,
        },
        t_final: 2e-4,
        data: CaseData::GaussianPulse {
            a: 400.0,
            alpha: 5e4,
            sigma: 3e-2,
        },
    }
}

/// Fourth-order central difference of `g` at `0` with step `h`: first and second derivative.
fn fd4(g: impl Fn(f64) -> f64, h: f64) -> (f64, f64) {
    let (m2, m1, z, p1, p2) = (g(-2.0 * h), g(-h), g(0.0), g(h), g(2.0 * h));
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h);
    (d1, d2)
}

/// Maximum PDE residual of the stored exact solution against the stored source at
/// `samples` random interior space-time points, using fourth-order central differences.
pub fn verify_manufactured(case: &Case, samples: usize, step: f64, seed: u64) -> Result<f64> {
    let sol = case
        .exact()
        .ok_or_else(|| Error::invalid(format!("case '{}' has no exact solution", case.label)))?;
    verify_source(sol, |x, t| case.source(x, t), case.physics, case.t_final, samples, step, seed)
}

/// As [`verify_manufactured`] for an explicit exact solution and source.
pub fn verify_source(
    sol: &dyn SpaceTimeFunction,
    source: impl Fn([f64; 2], f64) -> f64,
    physics: Physics,
    t_final: f64,
    samples: usize,
    step: f64,
    seed: u64,
) -> Result<f64> {
    let Physics { c, k, delta } = physics;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let margin = 4.0 * step;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = [rng.gen_range(margin..1.0 - margin), rng.gen_range(margin..1.0 - margin)];
        let t = rng.gen_range(margin..t_final - margin);
        let u = |x: [f64; 2], t: f64| sol.value(x, t);
        let ut = |x: [f64; 2], t: f64| fd4(|d| u(x, t + d), step).0;
        let (u_t, u_tt) = fd4(|d| u(x, t + d), step);
        let lap = |g: &dyn Fn([f64; 2]) -> f64| {
            fd4(|d| g([x[0] + d, x[1]]), step).1 + fd4(|d| g([x[0], x[1] + d]), step).1
        };
        let lap_u = lap(&|y| u(y, t));
        let lap_ut = lap(&|y| ut(y, t));
        let uv = u(x, t);
        let lhs = (1.0 + k * uv) * u_tt + k * u_t * u_t - c * c * lap_u - delta * lap_ut;
        worst = worst.max((lhs - source(x, t)).abs());
    }
    Ok(worst)
}

/// `max |f|` over a uniform space-time sample grid.
pub fn source_sup(case: &Case, per_axis: usize) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..=per_axis {
        for j in 0..=per_axis {
            for l in 0..=per_axis {
                let x = [i as f64 / per_axis as f64, j as f64 / per_axis as f64];
                let t = case.t_final * l as f64 / per_axis as f64;
                m = m.max(case.source(x, t).abs());
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_source_examples() {
        let c = Case::by_label("smooth").unwrap();
        let f = c.source([0.5, 0.5], 0.0);
        assert!((f - 5.483e-5).abs() < 1e-8, "{f}");
        let lin = smooth_case(0.3, 2.0, PI, 0.0, 1.5, 0.0);
        let x = [0.3, 0.8];
        let t: f64 = 0.7;
        let s: f64 = (PI * x[0]).sin() * (PI * x[1]).sin();
        let expect = 0.3 * (2.0 * 2.25 * PI * PI - 4.0) * (2.0 * t).sin() * s;
        assert!((lin.source(x, t) - expect).abs() < 1e-13);
        assert!((c.u1([0.5, 0.5]) - 1e-2 * PI / 3.0).abs() < 1e-16);
    }

    #[test]
    fn manufactured_residual() {
        for case in [
            Case::by_label("smooth").unwrap(),
            Case::by_label("smooth-fast").unwrap(),
            smooth_case(1e-2, PI / 3.0, PI, 0.0, 1.0, 6e-9),
        ] {
            let fmax = source_sup(&case, 12);
            let r = verify_manufactured(&case, 50, 1e-4, 1).unwrap();
            assert!(r <= 1e-6 * fmax, "{}: {r} vs {fmax}", case.label);
        }
    }

    #[test]
    fn corrupted_source_is_detected() {
        let case = Case::by_label("smooth").unwrap();
        let sol = *case.exact().unwrap();
        let fmax = source_sup(&case, 12);
        let r = verify_source(&sol, |x, t| 1.01 * case.source(x, t), case.physics, 1.0, 200, 1e-4, 3).unwrap();
        assert!(r >= 1e-2 * fmax * 0.5, "{r} {fmax}");
    }

    #[test]
    fn other_cases() {
        let sw = standing_wave_case();
        assert!((sw.u0([0.5, 0.5]) - 1e-2).abs() < 1e-16);
        assert_eq!(sw.source([0.2, 0.4], 0.3), 0.0);
        assert!((sw.u1([0.5, 0.5]) - 1.0).abs() < 1e-16);
        let gp = gaussian_pulse_case();
        assert!((gp.source([0.5, 0.5], 0.0) - 400.0 / 0.03f64.sqrt()).abs() < 1e-9);
        let ratio = gp.source([0.5, 0.5], 1e-4) / gp.source([0.5, 0.5], 0.0);
        assert!((ratio - (-5.0f64).exp()).abs() < 1e-15);
        assert_eq!(gp.u0([0.3, 0.3]), 0.0);
        assert!(Case::by_label("nope").is_err());
    }

    #[test]
    fn boundary_and_initial_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for label in ["smooth", "smooth-fast"] {
            let case = Case::by_label(label).unwrap();
            let sol = case.exact().unwrap();
            for _ in 0..100 {
                let s: f64 = rng.gen();
                let side = rng.gen_range(0..4);
                let x = match side {
                    0 => [s, 0.0],
                    1 => [1.0, s],
                    2 => [s, 1.0],
                    _ => [0.0, s],
                };
                assert!(sol.value(x, rng.gen()).abs() <= 1e-14);
                let y = [rng.gen(), rng.gen()];
                assert!((case.u0(y) - sol.value(y, 0.0)).abs() <= 1e-12);
                assert!((case.u1(y) - sol.dt(y, 0.0)).abs() <= 1e-12);
            }
        }
    }
}
