//! Acceptance criteria: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::Instant;
use westervelt::study::{run_study, StudyResult, StudySpec};
use westervelt::verify::{run_suites, VerifyOptions};

struct Verdict {
    passed: bool,
    detail: String,
}

fn study(json: &str) -> StudyResult {
    let spec: StudySpec = serde_json::from_str(json).expect("valid spec");
    run_study(&spec).expect("study runs")
}

fn within(v: Option<f64>, target: f64, tol: f64) -> bool {
    v.is_some_and(|x| (x - target).abs() <= tol)
}

fn fmt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into())
}

fn h_convergence() -> Verdict {
    let r = study(
        r#"{"kind": "h", "case": "smooth", "q": 3, "tau": 0.2,
            "series": [{"p": 1}, {"p": 2}], "sweep": [4, 8, 16, 32]}"#,
    );
    let mut passed = r.failures.is_empty();
    let mut parts = Vec::new();
    for s in &r.series {
        let p = s.records[0].p as f64;
        let ok_dt = within(s.final_eoc_dt, p + 1.0, 0.25);
        let ok_grad = within(s.final_eoc_grad, p, 0.25);
        passed &= ok_dt && ok_grad;
        parts.push(format!(
            "p={p}: eoc_dt {} (want {}±0.25{}) eoc_grad {} (want {p}±0.25{})",
            fmt(s.final_eoc_dt),
            p + 1.0,
            if ok_dt { "" } else { ", miss" },
            fmt(s.final_eoc_grad),
            if ok_grad { "" } else { ", miss" },
        ));
    }
    Verdict { passed, detail: parts.join("; ") }
}

fn tau_convergence() -> Verdict {
    let r = study(
        r#"{"kind": "tau", "case": "smooth-fast", "n": 5, "p": 5,
            "series": [{"q": 2}, {"q": 3}], "sweep": [0.25, 0.125, 0.0625, 0.03125]}"#,
    );
    let mut passed = r.failures.is_empty();
    let mut parts = Vec::new();
    for s in &r.series {
        let q = s.records[0].q as f64;
        let ok_dt = within(s.final_eoc_dt, q + 1.0, 0.3);
        let ok_grad = within(s.final_eoc_grad, q, 0.3);
        passed &= ok_dt && ok_grad;
        parts.push(format!(
            "q={q}: eoc_dt {} (want {}±0.3{}) eoc_grad {} (want {q}±0.3{})",
            fmt(s.final_eoc_dt),
            q + 1.0,
            if ok_dt { "" } else { ", miss" },
            fmt(s.final_eoc_grad),
            if ok_grad { "" } else { ", miss" },
        ));
    }
    Verdict { passed, detail: parts.join("; ") }
}

fn delta_convergence() -> Verdict {
    let r = study(
        r#"{"kind": "delta", "case": "standing-wave", "n": 10, "q": 4, "tau": 0.1,
            "series": [{"p": 1}, {"p": 2}], "sweep": [1e-2, 1e-4, 1e-6]}"#,
    );
    let mut passed = r.failures.is_empty();
    let mut parts = Vec::new();
    for s in &r.series {
        let rates: Vec<Option<f64>> = s.records[1..].iter().flat_map(|r| [r.eoc_dt, r.eoc_grad]).collect();
        let ok = rates.iter().all(|v| v.is_some_and(|x| (0.85..=1.15).contains(&x)));
        passed &= ok;
        let shown: Vec<String> = rates.iter().map(|v| fmt(*v)).collect();
        parts.push(format!("{}: eoc (dt, grad per step) [{}] in [0.85, 1.15]", s.label, shown.join(", ")));
    }
    Verdict { passed, detail: parts.join("; ") }
}

fn p_convergence() -> Verdict {
    let r = study(r#"{"kind": "pq", "case": "smooth-fast", "n": 5, "sweep": [2, 3, 4, 5, 6]}"#);
    let s = &r.series[0];
    let e: Vec<f64> = s.records.iter().map(|r| r.err_dt).collect();
    let monotone = e.windows(2).all(|w| w[1] < w[0]);
    let ratios: Vec<f64> = e.windows(2).map(|w| w[0] / w[1]).collect();
    let last3 = &ratios[ratios.len() - 3..];
    let passed = r.failures.is_empty() && monotone && last3.iter().all(|x| *x >= 3.0);
    let shown: Vec<String> = ratios.iter().map(|x| format!("{x:.2}")).collect();
    Verdict {
        passed,
        detail: format!(
            "err_dt strictly decreasing: {monotone}; reduction per degree [{}], last three >= 3; fit b = {}",
            shown.join(", "),
            fmt(s.exp_rate_dt)
        ),
    }
}

fn cfl_robustness() -> Verdict {
    let r = study(
        r#"{"kind": "cfl", "case": "smooth", "physics": {"t_final": 100.0}, "q": 2, "tau": 20.0,
            "series": [{"p": 1}, {"p": 2}, {"p": 3}], "sweep": [4, 8, 16]}"#,
    );
    let recs = r.records();
    let finite = recs.iter().all(|r| r.err_dt.is_finite() && r.err_grad.is_finite());
    let converged = recs.iter().all(|r| r.converged);
    let max_dt = recs.iter().map(|r| r.err_dt).fold(0.0, f64::max);
    let max_grad = recs.iter().map(|r| r.err_grad).fold(0.0, f64::max);
    Verdict {
        passed: r.failures.is_empty() && finite && !r.blow_up,
        detail: format!(
            "{} runs (tau = 20, T = 100, n in 4..16, p in 1..3), failures {}, all finite {finite}, \
             all converged {converged}, max err_dt {max_dt:.3e}, max err_grad {max_grad:.3e}",
            recs.len(),
            r.failures.len()
        ),
    }
}

fn property_suites() -> Verdict {
    let reports = run_suites(None, &VerifyOptions::default());
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.name.clone()).collect();
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    Verdict {
        passed: failed.is_empty() && reports.len() >= 12,
        detail: format!("{} suites, {checks} checks, failing: [{}]", reports.len(), failed.join(", ")),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 6] = [
        ("1 h-convergence", h_convergence),
        ("2 tau-convergence", tau_convergence),
        ("3 delta-convergence", delta_convergence),
        ("4 p-convergence", p_convergence),
        ("5 CFL robustness", cfl_robustness),
        ("6 property suites", property_suites),
    ];
    let mut all = true;
    for (name, f) in criteria {
        let start = Instant::now();
        let v = f();
        all &= v.passed;
        println!(
            "{} criterion {name} ({:.1}s): {}",
            if v.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    // context for the failing criteria; these lines do not affect the exit status
    let r = study(r#"{"kind": "h", "case": "smooth", "p": 2, "q": 5, "tau": 0.2, "sweep": [4, 8, 16, 32]}"#);
    let s = &r.series[0];
    println!(
        "INFO h-convergence p=2 with q=5 instead of q=3: eoc_dt {} eoc_grad {}",
        fmt(s.final_eoc_dt),
        fmt(s.final_eoc_grad)
    );
    let r = study(
        r#"{"kind": "tau", "case": "smooth-fast", "n": 5, "p": 5,
            "series": [{"q": 2}, {"q": 3}], "sweep": [0.25, 0.125, 0.0625, 0.03125]}"#,
    );
    for s in &r.series {
        let q = s.records[0].q as f64;
        println!(
            "INFO tau-convergence q={q} against dt ~ tau^q, grad ~ tau^(q+1): eoc_dt {} eoc_grad {} within 0.3: {}",
            fmt(s.final_eoc_dt),
            fmt(s.final_eoc_grad),
            within(s.final_eoc_dt, q, 0.3) && within(s.final_eoc_grad, q + 1.0, 0.3)
        );
    }
    if !all {
        std::process::exit(1);
    }
}
