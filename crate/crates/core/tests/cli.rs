use std::path::Path;
use std::process::{Command, Output};

fn westervelt(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_westervelt"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("WESTERVELT_OUT")
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    format!("{}/configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn run_writes_one_finite_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = westervelt(&["run", &config("run-smooth.json")], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("run-smooth.csv"));
    assert_eq!(rows.len(), 1);
    let err_dt: f64 = rows[0][9].parse().unwrap();
    let err_grad: f64 = rows[0][10].parse().unwrap();
    assert!(err_dt.is_finite() && err_dt > 0.0 && err_grad.is_finite() && err_grad > 0.0);
    assert_eq!(&rows[0][0], "smooth");
}

#[test]
fn zero_data_errors_are_exactly_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = westervelt(&["run", &config("run-zero-data.json")], dir.path());
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("run-zero-data.csv"));
    assert_eq!(&rows[0][9], "0");
    assert_eq!(&rows[0][10], "0");
}

#[test]
fn malformed_config_exits_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"case\": \"smooth\",\n  \"n\": 4,\n  \"p\": oops\n}").unwrap();
    let out_dir = dir.path().join("out");
    let out = westervelt(&["run", bad.to_str().unwrap()], &out_dir);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
    assert!(!out_dir.exists());

    std::fs::write(&bad, r#"{"case": "smooth", "n": 4, "p": 1, "q": 2, "tau": 0.3}"#).unwrap();
    let out = westervelt(&["run", bad.to_str().unwrap()], &out_dir);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out_dir.exists());
}

#[test]
fn degenerate_run_exits_2_with_slab_index() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("loud.json");
    std::fs::write(
        &cfg,
        r#"{"case": "gaussian-pulse", "physics": {"data_scale": 1e6}, "n": 10, "p": 2, "q": 4, "tau": 1e-5}"#,
    )
    .unwrap();
    let out = westervelt(&["run", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("slab") && err.contains("degenerate"), "{err}");
}

fn strip_runtime(path: &Path) -> Vec<Vec<String>> {
    csv_rows(path)
        .iter()
        .map(|r| r.iter().take(15).map(String::from).collect())
        .collect()
}

#[test]
fn study_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("small.json");
    std::fs::write(
        &spec,
        r#"{"kind": "h", "case": "smooth", "q": 2, "tau": 0.25, "series": [{"p": 1}, {"p": 2}], "sweep": [2, 4, 8]}"#,
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(westervelt(&["study", spec.to_str().unwrap(), "--plot"], &a).status.success());
    assert!(westervelt(&["study", spec.to_str().unwrap(), "--threads", "1"], &b).status.success());
    let ra = strip_runtime(&a.join("small.csv"));
    assert_eq!(ra.len(), 6);
    assert_eq!(ra, strip_runtime(&b.join("small.csv")));
    assert!(a.join("small.svg").exists() && !b.join("small.svg").exists());
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("small.json")).unwrap()).unwrap();
    assert_eq!(summary["series"].as_array().unwrap().len(), 2);
    assert!(summary["series"][0]["records"][2]["n_dofs"].as_u64().unwrap() > 0);
}

#[test]
fn csv_header_is_fixed() {
    let dir = tempfile::tempdir().unwrap();
    assert!(westervelt(&["run", &config("run-zero-data.json")], dir.path()).status.success());
    let text = std::fs::read_to_string(dir.path().join("run-zero-data.csv")).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "case,n,h,tau,p,q,delta,k,c,err_dt,err_grad,eoc_dt,eoc_grad,iters_mean,iters_max,runtime_s"
    );
}

#[test]
fn env_var_sets_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_westervelt"))
        .args(["run", &config("run-zero-data.json")])
        .env("WESTERVELT_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("run-zero-data.csv").exists());
}

#[test]
fn verify_filter_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = westervelt(&["verify", "--filter", "weight-function", "--json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report[0]["name"], "weight-function");
    assert_eq!(report[0]["passed"], true);
    assert!(dir.path().join("verify.json").exists());
    let none = westervelt(&["verify", "--filter", "no-such-suite"], dir.path());
    assert_eq!(none.status.code(), Some(1));
}

#[test]
fn shipped_configs_parse() {
    use westervelt::study::{RunConfig, StudySpec};
    for entry in std::fs::read_dir(format!("{}/configs", env!("CARGO_MANIFEST_DIR"))).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(&path).unwrap_or_default();
        if name.starts_with("run-") {
            let c: RunConfig = serde_json::from_str(&text).unwrap();
            c.problem().unwrap();
        } else if name.starts_with("study-") {
            let s: StudySpec = serde_json::from_str(&text).unwrap();
            s.jobs().unwrap();
        }
    }
}
