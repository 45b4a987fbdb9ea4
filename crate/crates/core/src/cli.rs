//! The `se2ocp` command line.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 solver failure or
//! failed check, 4 I/O error.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::continuous::{simulate_ivp, Actuation};
use crate::error::Error;
use crate::retraction::RetractionKind;
use crate::scenario::{check_solution_dir, load_scenario, write_solution, Scenario, SolutionRecord};
use crate::selftest;
use crate::solver::{solve_bvp, BoundaryMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RetractionArg {
    Cayley,
    Exp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Fixed start and goal poses.
    #[value(name = "fixed_pose")]
    FixedPose,
    /// Fixed poses and boundary velocities, solved in least squares.
    #[value(name = "fixed_pose_and_velocity")]
    FixedPoseAndVelocity,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ActuationArg {
    Underactuated,
    Full,
}

#[derive(Debug, Parser)]
#[command(name = "se2ocp", version, about = "Multi-agent obstacle avoidance on SE(2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Override the number of time steps.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Override the solver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    retraction: Option<RetractionArg>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Seed for `selftest`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(short, long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the discrete boundary value problem.
    Solve {
        scenario: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Integrate the continuous equations from the scenario's initial controls.
    Simulate {
        scenario: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ActuationArg::Underactuated)]
        actuation: ActuationArg,
    },
    /// Re-verify a stored solution directory.
    Check { dir: PathBuf },
    /// Run seeded property checks.
    Selftest {
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::Parse { .. } | Error::Validation(_) | Error::InvalidArgument(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn load_with_overrides(cli: &Cli, path: &std::path::Path) -> Result<Scenario, Error> {
    let mut sc = load_scenario(path)?;
    if let Some(n) = cli.steps {
        sc.steps = n;
    }
    if let Some(t) = cli.tol {
        sc.solver.tol = t;
    }
    if let Some(r) = cli.retraction {
        sc.retraction = match r {
            RetractionArg::Cayley => RetractionKind::Cayley,
            RetractionArg::Exp => RetractionKind::Exponential,
        };
    }
    if let Some(m) = cli.mode {
        sc.mode = match m {
            ModeArg::FixedPose => BoundaryMode::FixedPose,
            ModeArg::FixedPoseAndVelocity => BoundaryMode::FixedPoseAndVelocity,
        };
    }
    let issues = sc.validate();
    if issues.is_empty() {
        Ok(sc)
    } else {
        Err(Error::Validation(issues))
    }
}

fn execute(cli: &Cli) -> Result<i32, Error> {
    match &cli.command {
        Command::Solve { scenario, out } => {
            let sc = load_with_overrides(cli, scenario)?;
            let prob = sc.shooting_problem();
            match solve_bvp(&prob, &sc.solver) {
                Ok(bvp) => {
                    let d = &bvp.diagnostics;
                    write_solution(&SolutionRecord::from_bvp(&sc, &bvp), out)?;
                    if !cli.quiet {
                        println!(
                            "converged in {} iterations, residual {:.3e}, cost {:.6}, min pair distance {:.4}, min obstacle distance {:.4} ({:.2}s)",
                            d.iterations, d.residual_inf, d.cost, d.min_pair_distance, d.min_obstacle_distance, d.wall_time_s
                        );
                    }
                    Ok(EXIT_OK)
                }
                Err(Error::NoConvergence { iterations, residual, best }) => {
                    // keep the best iterate for inspection
                    write_solution(&SolutionRecord::from_bvp(&sc, &best), out)?;
                    eprintln!("error: no convergence after {iterations} iterations (residual {residual:.3e}); best iterate written");
                    Ok(EXIT_FAILURE)
                }
                Err(e) => Err(e),
            }
        }
        Command::Simulate { scenario, out, actuation } => {
            let sc = load_with_overrides(cli, scenario)?;
            let initial = sc.continuous_initial()?;
            let act = match actuation {
                ActuationArg::Underactuated => Actuation::Underactuated,
                ActuationArg::Full => Actuation::Full,
            };
            let started = Instant::now();
            let traj = simulate_ivp(&initial, &sc.system(), act, sc.horizon, sc.steps)?;
            let record = SolutionRecord::from_trajectory(&sc, &traj, started.elapsed().as_secs_f64());
            write_solution(&record, out)?;
            if !cli.quiet {
                println!(
                    "simulated {} steps, min pair distance {:.4}, min obstacle distance {:.4}",
                    sc.steps, traj.min_pair_distance, traj.min_obstacle_distance
                );
            }
            Ok(EXIT_OK)
        }
        Command::Check { dir } => {
            let report = check_solution_dir(dir)?;
            match report.first_failure() {
                None => {
                    if !cli.quiet {
                        println!("ok: {} checks passed", report.checks);
                    }
                    Ok(EXIT_OK)
                }
                Some(f) => {
                    eprintln!("check failed at step {}: {f}", f.step);
                    if !cli.quiet {
                        for other in report.failures.iter().take(10) {
                            eprintln!("  {other}");
                        }
                    }
                    Ok(EXIT_FAILURE)
                }
            }
        }
        Command::Selftest { samples } => {
            let results = selftest::run(cli.seed, *samples);
            let mut all = true;
            for r in &results {
                all &= r.passed();
                if !cli.quiet || !r.passed() {
                    println!("{r}");
                }
            }
            Ok(if all { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
