#[allow(dead_code)]
#[path = "../examples/solve_single.rs"]
mod solve_single;

#[allow(dead_code)]
#[path = "../examples/mesh_and_space.rs"]
mod mesh_and_space;

#[allow(dead_code)]
#[path = "../examples/time_projections.rs"]
mod time_projections;

#[allow(dead_code)]
#[path = "../examples/gaussian_pulse.rs"]
mod gaussian_pulse;

#[allow(dead_code)]
#[path = "../examples/cfl_robustness.rs"]
mod cfl_robustness;

#[test]
fn solve_single_runs() {
    solve_single::run_example().expect("example should run");
}

#[test]
fn mesh_and_space_runs() {
    mesh_and_space::run_example().expect("example should run");
}

#[test]
fn time_projections_runs() {
    time_projections::run_example().expect("example should run");
}

#[test]
fn gaussian_pulse_runs() {
    gaussian_pulse::run_example().expect("example should run");
}

#[test]
fn cfl_robustness_runs() {
    let r = cfl_robustness::run_example().expect("example should run");
    assert!(r.failures.is_empty() && !r.blow_up);
}
