//! JSON-configured single runs and convergence studies, with CSV, JSON and
//! SVG output.

use crate::analysis::{
    default_samples, energy_norm, err_linf_l2, fill_eoc, jump_functional, ErrorMode, ErrorRecord, Reference,
};
use crate::cases::Case;
use crate::error::{Error, Result};
use crate::plot::{Axes, Chart, Series};
use crate::solution::DiscreteSolution;
use crate::solver::{solve_on_space, ProblemConfig, SolverControls, SolverReport};
use crate::timefe::Side;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

/// Environment variable that overrides the output directory of configs.
pub const OUT_ENV: &str = "WESTERVELT_OUT";

/// CSV header of every rate table.
pub const CSV_COLUMNS: [&str; 16] = [
    "case", "n", "h", "tau", "p", "q", "delta", "k", "c", "err_dt", "err_grad", "eoc_dt", "eoc_grad", "iters_mean",
    "iters_max", "runtime_s",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// File name stem; defaults to the config file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

/// Physical overrides applied on top of a labelled case.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    /// Multiplies all data (source and initial conditions).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_scale: Option<f64>,
}

impl CaseOverrides {
    pub fn build(&self, label: &str) -> Result<Case> {
        let mut case = Case::by_label(label)?;
        if let Some(k) = self.k {
            case.physics.k = k;
        }
        if let Some(c) = self.c {
            case.physics.c = c;
        }
        if let Some(d) = self.delta {
            case.physics.delta = d;
        }
        if let Some(t) = self.t_final {
            if !(t > 0.0) {
                return Err(Error::Config(format!("t_final must be positive, got {t}")));
            }
            case.t_final = t;
        }
        if let Some(s) = self.data_scale {
            case.scale_data(s);
        }
        Ok(case)
    }
}

/// Nodal snapshots of `u_h` on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotSpec {
    pub times: Vec<f64>,
    /// Grid points per axis.
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_grid() -> usize {
    41
}

/// A single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: String,
    #[serde(default, skip_serializing_if = "is_default")]
    pub physics: CaseOverrides,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub tau: f64,
    #[serde(default)]
    pub controls: SolverControls,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<SnapshotSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

impl RunConfig {
    pub fn problem(&self) -> Result<ProblemConfig> {
        let cfg = ProblemConfig {
            case: self.physics.build(&self.case)?,
            n: self.n,
            p: self.p,
            q: self.q,
            tau: self.tau,
            controls: self.controls,
        };
        cfg.validate()?;
        if let Some(s) = &self.snapshots {
            if s.grid < 2 {
                return Err(Error::Config("snapshot grid needs at least 2 points per axis".into()));
            }
            if let Some(t) = s.times.iter().find(|t| !(**t >= 0.0 && **t <= cfg.case.t_final)) {
                return Err(Error::Config(format!("snapshot time {t} outside [0, {}]", cfg.case.t_final)));
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyKind {
    /// Mesh refinement; the sweep lists `n`.
    H,
    /// Time-step refinement; the sweep lists `tau`.
    Tau,
    /// Coupled degrees `p = q`; the sweep lists the degree.
    Pq,
    /// Vanishing damping; the sweep lists `delta`.
    Delta,
    /// Large steps on refined meshes; the sweep lists `n`.
    Cfl,
}

/// Per-series overrides of the fixed parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

/// A convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub kind: StudyKind,
    pub case: String,
    #[serde(default, skip_serializing_if = "is_default")]
    pub physics: CaseOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// pq-studies without a fixed `tau` use `tau = tau_over_h * h` (default `1/sqrt 2`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_over_h: Option<f64>,
    pub sweep: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesSpec>,
    #[serde(default)]
    pub controls: SolverControls,
    /// Abort the sweep on the first failed run.
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub plot: bool,
    #[serde(default)]
    pub output: OutputSpec,
}

/// One expanded sweep entry.
#[derive(Debug, Clone)]
pub struct StudyJob {
    pub series: usize,
    pub config: ProblemConfig,
}

fn as_count(v: f64, what: &str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e6 {
        Ok(v as usize)
    } else {
        Err(Error::Config(format!("{what} sweep values must be positive integers, got {v}")))
    }
}

impl StudySpec {
    fn series_list(&self) -> Vec<SeriesSpec> {
        if self.series.is_empty() {
            vec![SeriesSpec::default()]
        } else {
            self.series.clone()
        }
    }

    pub fn series_label(&self, s: &SeriesSpec) -> String {
        let mut parts = Vec::new();
        if let Some(n) = s.n {
            parts.push(format!("n={n}"));
        }
        if let Some(p) = s.p {
            parts.push(format!("p={p}"));
        }
        if let Some(q) = s.q {
            parts.push(format!("q={q}"));
        }
        if let Some(t) = s.tau {
            parts.push(format!("tau={t}"));
        }
        if parts.is_empty() {
            self.case.clone()
        } else {
            parts.join(" ")
        }
    }

    /// Parameter the EOC is measured against, per sweep entry.
    pub fn eoc_parameter(&self, cfg: &ProblemConfig) -> f64 {
        match self.kind {
            StudyKind::H | StudyKind::Cfl => std::f64::consts::SQRT_2 / cfg.n as f64,
            StudyKind::Tau => cfg.tau,
            StudyKind::Delta => cfg.case.physics.delta,
            StudyKind::Pq => f64::NAN,
        }
    }

    /// Validate and expand into one job per (series, sweep value), series-major.
    pub fn jobs(&self) -> Result<Vec<StudyJob>> {
        if self.sweep.is_empty() {
            return Err(Error::Config("sweep list is empty".into()));
        }
        if self.sweep.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sweep values must be finite".into()));
        }
        let increasing = self.sweep.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.sweep.windows(2).all(|w| w[1] < w[0]);
        match self.kind {
            StudyKind::H | StudyKind::Cfl | StudyKind::Pq if !increasing => {
                return Err(Error::Config("sweep must be strictly increasing".into()))
            }
            StudyKind::Tau | StudyKind::Delta if !decreasing => {
                return Err(Error::Config("sweep must be strictly decreasing".into()))
            }
            _ => {}
        }
        let base = self.physics.build(&self.case)?;
        let mut jobs = Vec::new();
        for (si, s) in self.series_list().iter().enumerate() {
            let n = s.n.or(self.n);
            let p = s.p.or(self.p);
            let q = s.q.or(self.q);
            let tau = s.tau.or(self.tau);
            let need = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| Error::Config(format!("{:?} study requires `{name}`", self.kind).to_lowercase()))
            };
            for &v in &self.sweep {
                let mut case = base.clone();
                let (n, p, q, tau) = match self.kind {
                    StudyKind::H | StudyKind::Cfl => (
                        as_count(v, "n")?,
                        need(p.map(|x| x as f64), "p")? as usize,
                        need(q.map(|x| x as f64), "q")? as usize,
                        need(tau, "tau")?,
                    ),
                    StudyKind::Tau => (
                        need(n.map(|x| x as f64), "n")? as usize,
                        need(p.map(|x| x as f64), "p")? as usize,
                        need(q.map(|x| x as f64), "q")? as usize,
                        v,
                    ),
                    StudyKind::Pq => {
                        let n = need(n.map(|x| x as f64), "n")? as usize;
                        let d = as_count(v, "degree")?;
                        let h = std::f64::consts::SQRT_2 / n as f64;
                        let tau = tau.unwrap_or_else(|| self.tau_over_h.unwrap_or(std::f64::consts::FRAC_1_SQRT_2) * h);
                        (n, d, d, fit_step(case.t_final, tau))
                    }
                    StudyKind::Delta => {
                        if v <= 0.0 {
                            return Err(Error::Config(format!("delta sweep values must be positive, got {v}")));
                        }
                        case.physics.delta = v;
                        (
                            need(n.map(|x| x as f64), "n")? as usize,
                            need(p.map(|x| x as f64), "p")? as usize,
                            need(q.map(|x| x as f64), "q")? as usize,
                            need(tau, "tau")?,
                        )
                    }
                };
                let mut controls = self.controls;
                controls.strict |= self.strict;
                let config = ProblemConfig {
                    case,
                    n,
                    p,
                    q,
                    tau,
                    controls,
                };
                config.validate()?;
                jobs.push(StudyJob { series: si, config });
            }
        }
        Ok(jobs)
    }
}

/// Largest step not exceeding `tau` that divides `t_final` into equal slabs.
fn fit_step(t_final: f64, tau: f64) -> f64 {
    t_final / (t_final / tau).ceil()
}

/// Number of space-time unknowns `N_free (q N + 1)`.
pub fn total_dofs(sol: &DiscreteSolution) -> usize {
    sol.space().num_free() * (sol.q() * sol.partition().num_slabs() + 1)
}

/// Build the error record of a finished run. Without a reference the error fields are NaN.
pub fn error_record(
    config: &ProblemConfig,
    sol: &DiscreteSolution,
    report: &SolverReport,
    reference: Option<Reference<'_>>,
    runtime_s: f64,
) -> Result<ErrorRecord> {
    let samples = default_samples(config.q);
    let (err_dt, err_grad) = match reference {
        Some(r) => (
            err_linf_l2(sol, r, ErrorMode::Dt, samples)?,
            err_linf_l2(sol, r, ErrorMode::Grad, samples)?,
        ),
        None => (f64::NAN, f64::NAN),
    };
    let ph = config.case.physics;
    Ok(ErrorRecord {
        case: config.case.label.clone(),
        n: config.n,
        h: sol.space().mesh().h_max(),
        tau: config.tau,
        p: config.p,
        q: config.q,
        delta: ph.delta,
        k: ph.k,
        c: ph.c,
        err_dt,
        err_grad,
        eoc_dt: None,
        eoc_grad: None,
        iters_mean: report.iters_mean(),
        iters_max: report.iters_max(),
        runtime_s,
        n_dofs: total_dofs(sol),
        jump: Some(jump_functional(sol)),
        energy: Some(energy_norm(sol, ph.delta, ph.c, samples)),
        converged: report.converged,
        max_residual: report.residuals.iter().cloned().reduce(f64::max),
    })
}

fn failed_record(config: &ProblemConfig) -> ErrorRecord {
    let ph = config.case.physics;
    ErrorRecord {
        case: config.case.label.clone(),
        n: config.n,
        h: std::f64::consts::SQRT_2 / config.n as f64,
        tau: config.tau,
        p: config.p,
        q: config.q,
        delta: ph.delta,
        k: ph.k,
        c: ph.c,
        err_dt: f64::NAN,
        err_grad: f64::NAN,
        eoc_dt: None,
        eoc_grad: None,
        iters_mean: f64::NAN,
        iters_max: 0,
        runtime_s: 0.0,
        n_dofs: 0,
        jump: None,
        energy: None,
        converged: false,
        max_residual: None,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write records as CSV with the fixed column set.
pub fn write_csv<W: std::io::Write>(records: &[ErrorRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.write_record([
            r.case.clone(),
            r.n.to_string(),
            r.h.to_string(),
            r.tau.to_string(),
            r.p.to_string(),
            r.q.to_string(),
            r.delta.to_string(),
            r.k.to_string(),
            r.c.to_string(),
            r.err_dt.to_string(),
            r.err_grad.to_string(),
            opt(r.eoc_dt),
            opt(r.eoc_grad),
            r.iters_mean.to_string(),
            r.iters_max.to_string(),
            r.runtime_s.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// A failed sweep entry.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub series: usize,
    pub index: usize,
    pub message: String,
}

/// Per-series summary.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesSummary {
    pub label: String,
    pub final_eoc_dt: Option<f64>,
    pub final_eoc_grad: Option<f64>,
    /// Least-squares `b` of `err_dt ~ a exp(-b N^(1/3))` (pq-studies).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exp_rate_dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exp_rate_grad: Option<f64>,
    pub records: Vec<ErrorRecord>,
}

/// Result of a study.
#[derive(Debug, Clone, Serialize)]
pub struct StudyResult {
    pub spec: StudySpec,
    pub series: Vec<SeriesSummary>,
    pub failures: Vec<Failure>,
    /// True when any run failed or produced a non-finite error.
    pub blow_up: bool,
}

impl StudyResult {
    /// All records, series-major.
    pub fn records(&self) -> Vec<ErrorRecord> {
        self.series.iter().flat_map(|s| s.records.iter().cloned()).collect()
    }

    /// Human-readable rate table.
    pub fn table(&self) -> String {
        let eoc = |v: Option<f64>| v.map(|x| format!("{x:6.3}")).unwrap_or_else(|| "     -".into());
        let mut out = String::new();
        for s in &self.series {
            out += &format!("{}\n", s.label);
            out += "     n  p  q        tau     delta      err_dt    eoc    err_grad    eoc   iters     dofs\n";
            for r in &s.records {
                out += &format!(
                    "  {:>4} {:>2} {:>2} {:>10.4e} {:>9.1e} {:>11.4e} {} {:>11.4e} {} {:>7.2} {:>8}\n",
                    r.n,
                    r.p,
                    r.q,
                    r.tau,
                    r.delta,
                    r.err_dt,
                    eoc(r.eoc_dt),
                    r.err_grad,
                    eoc(r.eoc_grad),
                    r.iters_mean,
                    r.n_dofs
                );
            }
            if let Some(b) = s.exp_rate_dt {
                out += &format!("  err_dt ~ exp(-{b:.3} N^(1/3))\n");
            }
            if let Some(b) = s.exp_rate_grad {
                out += &format!("  err_grad ~ exp(-{b:.3} N^(1/3))\n");
            }
        }
        for f in &self.failures {
            out += &format!("failed: series {} entry {}: {}\n", f.series, f.index, f.message);
        }
        out
    }
}

/// Slope of the least-squares line through `(x_i, ln y_i)`, negated.
pub fn exp_fit(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).filter(|(_, y)| **y > 0.0 && y.is_finite()).map(|(x, y)| (*x, y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

type Outcome = std::result::Result<ErrorRecord, String>;

fn run_job(job: &StudyJob, baseline: Option<&DiscreteSolution>, space: Arc<crate::FESpace>) -> Result<ErrorRecord> {
    let start = Instant::now();
    let (sol, report) = solve_on_space(space, &job.config)?;
    let reference = match (baseline, job.config.case.exact()) {
        (Some(b), _) => Some(Reference::Discrete(b)),
        (None, Some(e)) => Some(Reference::Exact(e)),
        (None, None) => None,
    };
    let elapsed = start.elapsed().as_secs_f64();
    error_record(&job.config, &sol, &report, reference, elapsed)
}

/// Execute a study. Entries run in parallel; results keep sweep order.
pub fn run_study(spec: &StudySpec) -> Result<StudyResult> {
    let jobs = spec.jobs()?;
    let nseries = spec.series_list().len();
    // delta-studies difference against one undamped solve per series, on a shared space
    let mut spaces: Vec<Option<Arc<crate::FESpace>>> = vec![None; nseries];
    let mut baselines: Vec<Option<DiscreteSolution>> = (0..nseries).map(|_| None).collect();
    if spec.kind == StudyKind::Delta {
        let firsts: Vec<&StudyJob> = (0..nseries).map(|s| jobs.iter().find(|j| j.series == s).expect("nonempty sweep")).collect();
        let solved: Vec<Result<(Arc<crate::FESpace>, DiscreteSolution)>> = firsts
            .par_iter()
            .map(|j| {
                let mut cfg = j.config.clone();
                cfg.case.physics.delta = 0.0;
                let space = Arc::new(cfg.build_space()?);
                let (sol, _) = solve_on_space(space.clone(), &cfg)?;
                Ok((space, sol))
            })
            .collect();
        for (s, r) in solved.into_iter().enumerate() {
            let (space, sol) = r.map_err(|e| Error::SolverFailure(format!("undamped baseline of series {s}: {e}")))?;
            spaces[s] = Some(space);
            baselines[s] = Some(sol);
        }
    }
    let outcomes: Vec<Outcome> = jobs
        .par_iter()
        .map(|job| {
            let space = match &spaces[job.series] {
                Some(s) => s.clone(),
                None => Arc::new(job.config.build_space().map_err(|e| e.to_string())?),
            };
            run_job(job, baselines[job.series].as_ref(), space).map_err(|e| e.to_string())
        })
        .collect();
    if spec.strict {
        if let Some((i, Err(m))) = outcomes.iter().enumerate().find(|(_, o)| o.is_err()) {
            return Err(Error::SolverFailure(format!("sweep entry {i}: {m}")));
        }
    }
    let mut failures = Vec::new();
    let mut series = Vec::new();
    let per = spec.sweep.len();
    for (s, ss) in spec.series_list().iter().enumerate() {
        let mut records = Vec::with_capacity(per);
        for (i, o) in outcomes[s * per..(s + 1) * per].iter().enumerate() {
            match o {
                Ok(r) => records.push(r.clone()),
                Err(m) => {
                    log::warn!("series {s}, entry {i} failed: {m}");
                    failures.push(Failure {
                        series: s,
                        index: i,
                        message: m.clone(),
                    });
                    records.push(failed_record(&jobs[s * per + i].config));
                }
            }
        }
        let (exp_dt, exp_grad) = if spec.kind == StudyKind::Pq {
            let x: Vec<f64> = records.iter().map(|r| (r.n_dofs as f64).cbrt()).collect();
            let dt: Vec<f64> = records.iter().map(|r| r.err_dt).collect();
            let gr: Vec<f64> = records.iter().map(|r| r.err_grad).collect();
            (exp_fit(&x, &dt), exp_fit(&x, &gr))
        } else {
            let params: Vec<f64> = jobs[s * per..(s + 1) * per].iter().map(|j| spec.eoc_parameter(&j.config)).collect();
            fill_eoc(&mut records, &params);
            (None, None)
        };
        series.push(SeriesSummary {
            label: spec.series_label(ss),
            final_eoc_dt: records.last().and_then(|r| r.eoc_dt),
            final_eoc_grad: records.last().and_then(|r| r.eoc_grad),
            exp_rate_dt: exp_dt,
            exp_rate_grad: exp_grad,
            records,
        });
    }
    let blow_up = !failures.is_empty()
        || (spec.case != "gaussian-pulse"
            && series.iter().flat_map(|s| &s.records).any(|r| !r.err_dt.is_finite() || !r.err_grad.is_finite()));
    Ok(StudyResult {
        spec: spec.clone(),
        series,
        failures,
        blow_up,
    })
}

/// Chart of a finished study.
pub fn study_chart(result: &StudyResult) -> Chart {
    let spec = &result.spec;
    let (x_label, axes) = match spec.kind {
        StudyKind::H | StudyKind::Cfl => ("h", Axes::LogLog),
        StudyKind::Tau => ("tau", Axes::LogLog),
        StudyKind::Delta => ("delta", Axes::LogLog),
        StudyKind::Pq => ("N_DoFs^(1/3)", Axes::SemiLogY),
    };
    let x_of = |r: &ErrorRecord| match spec.kind {
        StudyKind::H | StudyKind::Cfl => r.h,
        StudyKind::Tau => r.tau,
        StudyKind::Delta => r.delta,
        StudyKind::Pq => (r.n_dofs as f64).cbrt(),
    };
    let mut series = Vec::new();
    let mut guides = Vec::new();
    for s in &result.series {
        for (name, f) in [("dt", (|r: &ErrorRecord| r.err_dt) as fn(&ErrorRecord) -> f64), ("grad", |r| r.err_grad)] {
            series.push(Series {
                label: format!("{name} {}", s.label),
                points: s.records.iter().map(|r| (x_of(r), f(r))).collect(),
            });
        }
        if let Some(r) = s.records.first() {
            let add = match spec.kind {
                StudyKind::H => vec![r.p as f64, r.p as f64 + 1.0],
                StudyKind::Tau => vec![r.q as f64, r.q as f64 + 1.0],
                StudyKind::Delta => vec![1.0],
                StudyKind::Pq | StudyKind::Cfl => vec![],
            };
            for g in add {
                if !guides.contains(&g) {
                    guides.push(g);
                }
            }
        }
    }
    Chart {
        title: format!("{}-study, case {}", format!("{:?}", spec.kind).to_lowercase(), spec.case),
        x_label: x_label.into(),
        y_label: if spec.kind == StudyKind::Delta { "||u_delta - u_0||" } else { "error" }.into(),
        axes,
        series,
        guides,
    }
}

/// Read and parse a JSON config; parse errors carry line and column.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Output directory: explicit override, then the environment, then the config, then `results`.
pub fn output_dir(cli: Option<&Path>, config: &OutputSpec) -> PathBuf {
    if let Some(p) = cli {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    config.dir.clone().unwrap_or_else(|| PathBuf::from("results"))
}

fn stem(config: &OutputSpec, path: &Path) -> String {
    config
        .stem
        .clone()
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "run".into())
}

/// Files written by a command.
#[derive(Debug, Clone, Default)]
pub struct Written {
    pub files: Vec<PathBuf>,
}

/// Outcome of a single run as written to disk.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub config: RunConfig,
    pub record: ErrorRecord,
    pub report: SolverReport,
}

/// Solve a run config and write `<stem>.csv`, `<stem>.json` and snapshots.
pub fn execute_run(config_path: &Path, out: Option<&Path>, strict: bool) -> Result<(RunSummary, Written)> {
    let mut cfg: RunConfig = read_json(config_path)?;
    cfg.controls.strict |= strict;
    let problem = cfg.problem()?;
    let start = Instant::now();
    let space = Arc::new(problem.build_space()?);
    let (sol, report) = solve_on_space(space, &problem)?;
    let reference = problem.case.exact().map(|e| Reference::Exact(e));
    let record = error_record(&problem, &sol, &report, reference, start.elapsed().as_secs_f64())?;
    let dir = output_dir(out, &cfg.output);
    let stem = stem(&cfg.output, config_path);
    std::fs::create_dir_all(&dir)?;
    let mut written = Written::default();
    let csv_path = dir.join(format!("{stem}.csv"));
    write_csv(std::slice::from_ref(&record), std::fs::File::create(&csv_path)?)?;
    written.files.push(csv_path);
    if let Some(snap) = &cfg.snapshots {
        for (i, &t) in snap.times.iter().enumerate() {
            let path = dir.join(format!("{stem}_snapshot_{i:03}.csv"));
            write_snapshot(&sol, t, snap.grid, std::fs::File::create(&path)?)?;
            written.files.push(path);
        }
    }
    let summary = RunSummary {
        config: cfg,
        record,
        report,
    };
    let json_path = dir.join(format!("{stem}.json"));
    std::fs::write(&json_path, serde_json::to_string_pretty(&summary)?)?;
    written.files.push(json_path);
    Ok((summary, written))
}

/// Nodal values of `u_h(t)` on a `grid x grid` uniform grid, as `x,y,t,u` rows.
pub fn write_snapshot<W: std::io::Write>(sol: &DiscreteSolution, t: f64, grid: usize, out: W) -> Result<()> {
    let side = if t <= 0.0 { Side::Right } else { Side::Left };
    let u = sol.at_time(t, side);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "t", "u"])?;
    for j in 0..grid {
        for i in 0..grid {
            let x = [i as f64 / (grid - 1) as f64, j as f64 / (grid - 1) as f64];
            let v = sol.space().evaluate(&u, x).unwrap_or(0.0);
            w.write_record([x[0].to_string(), x[1].to_string(), t.to_string(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Run a study spec and write `<stem>.csv`, `<stem>.json` and optionally `<stem>.svg`.
pub fn execute_study(spec_path: &Path, out: Option<&Path>, strict: bool, plot: bool) -> Result<(StudyResult, Written)> {
    let mut spec: StudySpec = read_json(spec_path)?;
    spec.strict |= strict;
    spec.plot |= plot;
    spec.jobs()?;
    let result = run_study(&spec)?;
    let dir = output_dir(out, &spec.output);
    let stem = stem(&spec.output, spec_path);
    std::fs::create_dir_all(&dir)?;
    let written = write_study(&result, &dir, &stem)?;
    Ok((result, written))
}

/// Write the files of a finished study.
pub fn write_study(result: &StudyResult, dir: &Path, stem: &str) -> Result<Written> {
    let mut written = Written::default();
    let csv_path = dir.join(format!("{stem}.csv"));
    write_csv(&result.records(), std::fs::File::create(&csv_path)?)?;
    written.files.push(csv_path);
    let json_path = dir.join(format!("{stem}.json"));
    std::fs::write(&json_path, serde_json::to_string_pretty(result)?)?;
    written.files.push(json_path);
    if result.spec.plot {
        let svg_path = dir.join(format!("{stem}.svg"));
        std::fs::write(&svg_path, study_chart(result).to_svg())?;
        written.files.push(svg_path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(json: &str) -> StudySpec {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn h_study_expands_series_major() {
        let s = spec(r#"{"kind":"h","case":"smooth","q":3,"tau":0.2,"sweep":[2,4],"series":[{"p":1},{"p":2}]}"#);
        let jobs = s.jobs().unwrap();
        let tuples: Vec<(usize, usize, usize)> = jobs.iter().map(|j| (j.series, j.config.n, j.config.p)).collect();
        assert_eq!(tuples, vec![(0, 2, 1), (0, 4, 1), (1, 2, 2), (1, 4, 2)]);
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in [
            r#"{"kind":"h","case":"smooth","p":1,"q":3,"tau":0.2,"sweep":[]}"#,
            r#"{"kind":"h","case":"smooth","p":1,"q":3,"tau":0.2,"sweep":[8,4]}"#,
            r#"{"kind":"tau","case":"smooth","n":4,"p":1,"q":3,"sweep":[0.1,0.2]}"#,
            r#"{"kind":"h","case":"smooth","q":3,"tau":0.2,"sweep":[2,4]}"#,
            r#"{"kind":"h","case":"nope","p":1,"q":3,"tau":0.2,"sweep":[2,4]}"#,
            r#"{"kind":"h","case":"smooth","p":1,"q":3,"tau":0.3,"sweep":[2,4]}"#,
            r#"{"kind":"h","case":"smooth","p":1,"q":3,"tau":0.2,"sweep":[2.5]}"#,
        ] {
            assert!(matches!(spec(bad).jobs(), Err(Error::Config(_))), "{bad}");
        }
        assert!(serde_json::from_str::<StudySpec>(r#"{"kind":"h","case":"smooth","sweep":[2],"bogus":1}"#).is_err());
    }

    #[test]
    fn pq_step_divides_final_time() {
        let s = spec(r#"{"kind":"pq","case":"smooth-fast","n":5,"sweep":[2,3]}"#);
        let jobs = s.jobs().unwrap();
        let h = std::f64::consts::SQRT_2 / 5.0;
        assert!(jobs[0].config.tau <= h / std::f64::consts::SQRT_2 + 1e-15);
        assert_eq!((jobs[1].config.p, jobs[1].config.q), (3, 3));
    }

    #[test]
    fn csv_header_and_blank_eoc() {
        let r = failed_record(&ProblemConfig::new(Case::by_label("smooth").unwrap(), 4, 1, 2, 0.5));
        let mut buf = Vec::new();
        write_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert!(lines.next().unwrap().starts_with("smooth,4,"));
    }

    #[test]
    fn exponential_fit_recovers_rate() {
        let x: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|x| 3.0 * (-1.7 * x).exp()).collect();
        assert!((exp_fit(&x, &y).unwrap() - 1.7).abs() < 1e-12);
    }

    #[test]
    fn small_h_study_runs() {
        let s = spec(r#"{"kind":"h","case":"smooth","p":1,"q":2,"tau":0.5,"sweep":[2,4],"plot":true}"#);
        let r = run_study(&s).unwrap();
        assert!(r.failures.is_empty() && !r.blow_up);
        let recs = r.records();
        assert_eq!(recs.len(), 2);
        assert!(recs[1].eoc_dt.is_some() && recs[0].eoc_dt.is_none());
        assert!(study_chart(&r).to_svg().contains("slope 2"));
    }
}
