//! Command-line driver: single runs, convergence studies and property verification.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use westervelt::study::{execute_run, execute_study, output_dir, OutputSpec};
use westervelt::verify::{run_suites, VerifyOptions};
use westervelt::Error;

#[derive(Parser)]
#[command(name = "westervelt", version, about = "Space-time finite elements for the Westervelt equation")]
struct Cli {
    /// Output directory (overrides the environment and the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parameter sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Fail on fixed-point non-convergence and abort sweeps on the first failure.
    #[arg(long, global = true)]
    strict: bool,
    /// Write an SVG log-log chart of study results.
    #[arg(long, global = true)]
    plot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and write its error record.
    Run { config: PathBuf },
    /// Run a convergence study and write the rate table.
    Study { spec: PathBuf },
    /// Run the property-verification suites.
    Verify {
        /// Only run suites whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Config(_) | Error::Io(_) | Error::Json(_) | Error::InvalidArgument(_) => 1,
        _ => 2,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Run { config } => match execute_run(&config, out, cli.strict) {
            Ok((summary, written)) => {
                let r = &summary.record;
                println!(
                    "{} n={} p={} q={} tau={}: err_dt={:.6e} err_grad={:.6e} iters(mean {:.2}, max {}) {:.2}s",
                    r.case, r.n, r.p, r.q, r.tau, r.err_dt, r.err_grad, r.iters_mean, r.iters_max, r.runtime_s
                );
                for f in written.files {
                    println!("wrote {}", f.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Study { spec } => match execute_study(&spec, out, cli.strict, cli.plot) {
            Ok((result, written)) => {
                print!("{}", result.table());
                for f in written.files {
                    println!("wrote {}", f.display());
                }
                if result.failures.is_empty() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(2)
                }
            }
            Err(e) => fail(e),
        },
        Command::Verify { filter, json } => {
            let reports = run_suites(filter.as_deref(), &VerifyOptions::default());
            if reports.is_empty() {
                eprintln!("error: no suite matches {:?}", filter.unwrap_or_default());
                return ExitCode::from(1);
            }
            if json {
                match serde_json::to_string_pretty(&reports) {
                    Ok(s) => println!("{s}"),
                    Err(e) => return fail(e.into()),
                }
            } else {
                for r in &reports {
                    let n_ok = r.checks.iter().filter(|c| c.passed).count();
                    println!(
                        "{} {:<26} {:>3}/{:<3} checks  {:.2}s",
                        if r.passed { "PASS" } else { "FAIL" },
                        r.name,
                        n_ok,
                        r.checks.len(),
                        r.elapsed_s
                    );
                    if let Some(e) = &r.error {
                        println!("     error: {e}");
                    }
                    for c in r.checks.iter().filter(|c| !c.passed) {
                        println!("     {}: {}", c.name, c.detail);
                    }
                }
            }
            if out.is_some() || std::env::var_os(westervelt::study::OUT_ENV).is_some() {
                let dir = output_dir(out, &OutputSpec::default());
                let written = std::fs::create_dir_all(&dir)
                    .map_err(Error::from)
                    .and_then(|_| Ok(serde_json::to_string_pretty(&reports)?))
                    .and_then(|s| Ok(std::fs::write(dir.join("verify.json"), s)?));
                if let Err(e) = written {
                    return fail(e);
                }
            }
            if reports.iter().all(|r| r.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
    }
}
