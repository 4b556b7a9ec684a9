use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cbeam_core::assembly::{assemble, AssemblyError};
use cbeam_core::benchmarks::{run_convergence, run_locking_study, BenchmarkError};
use cbeam_core::config::{ConfigError, ModelFile, StudyFile, StudyKind};
use cbeam_core::postprocess::{
    centerline_rows, gauss_samples, resultant_rows, summarize, uniform_samples, write_csv, PostprocessError, CENTERLINE_HEADER,
    RESULTANTS_HEADER,
};
use cbeam_core::solver::{solve, SolverError};
use cbeam_core::validation::{run_criterion, Tolerances, CRITERIA};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cbeam", version, about = "Linear curved-beam finite elements in global Cartesian coordinates")]
struct Cli {
    /// Output directory. The BEAM_OUT environment variable takes precedence.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Reserved; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one model file and write centerline.csv, resultants.csv and summary.json.
    Solve {
        model: PathBuf,
        /// Number of uniformly spaced samples along the midline.
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Sample resultants at the Gauss points instead.
        #[arg(long)]
        gauss_points: bool,
    },
    /// Run a convergence or locking study and write its CSV table.
    Converge { study: PathBuf },
    /// Run the built-in acceptance suite.
    Validate {
        /// Print the criterion names without running them.
        #[arg(long)]
        list: bool,
        /// Multiplies every tolerance band; for exercising the failure path.
        #[arg(long, hide = true, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl std::fmt::Display) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

const INPUT: u8 = 1;
const SINGULAR: u8 = 2;
const IO: u8 = 3;

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let code = match e {
            ConfigError::Schema { .. } => INPUT,
            ConfigError::Io { .. } => IO,
        };
        Self::new(code, e)
    }
}

impl From<AssemblyError> for Failure {
    fn from(e: AssemblyError) -> Self {
        Self::new(INPUT, e)
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        let code = match e {
            SolverError::Empty => INPUT,
            _ => SINGULAR,
        };
        Self::new(code, e)
    }
}

impl From<PostprocessError> for Failure {
    fn from(e: PostprocessError) -> Self {
        let code = match e {
            PostprocessError::Io { .. } => IO,
            _ => INPUT,
        };
        Self::new(code, e)
    }
}

impl From<BenchmarkError> for Failure {
    fn from(e: BenchmarkError) -> Self {
        match e {
            BenchmarkError::Solver(e) => e.into(),
            BenchmarkError::Postprocess(e) => e.into(),
            other => Self::new(INPUT, other),
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::new(IO, format!("{}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::new(IO, format!("{}: {e}", dir.display())))
}

fn cmd_solve(path: &Path, out: &Path, samples: usize, gauss_points: bool) -> Result<(), Failure> {
    if samples < 2 {
        return Err(Failure::new(INPUT, "--samples must be at least 2"));
    }
    let (model, disc) = ModelFile::load(path)?.to_problem()?;
    let system = assemble(&model, &disc)?;
    let sol = solve(&system)?;
    let along = uniform_samples(model.curve.length(), samples);
    let centerline = centerline_rows(&model, &sol, &along)?;
    let resultants = if gauss_points {
        resultant_rows(&model, &sol, &gauss_samples(&sol))?
    } else {
        resultant_rows(&model, &sol, &along)?
    };
    let summary = summarize(&model, &system, &sol)?;
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Failure::new(INPUT, e))?;

    create_dir(out)?;
    write_csv(&out.join("centerline.csv"), CENTERLINE_HEADER, &centerline)?;
    write_csv(&out.join("resultants.csv"), RESULTANTS_HEADER, &resultants)?;
    write_text(&out.join("summary.json"), &(json + "\n"))?;
    let u = summary.tip_displacement;
    println!(
        "{}, {} elements, {} quadrature: tip u = [{:.6e}, {:.6e}, {:.6e}], strain energy {:.6e}",
        summary.formulation, summary.elements, summary.quadrature, u.x, u.y, u.z, summary.energy.strain
    );
    Ok(())
}

fn cmd_converge(path: &Path, out: &Path) -> Result<(), Failure> {
    let file = StudyFile::load(path)?;
    let spec = file.to_spec()?;
    let (name, csv, failures) = match file.study {
        StudyKind::Convergence => {
            let report = run_convergence(&spec)?;
            for s in &report.series {
                let order = s.fitted_order.map_or("-".to_string(), |o| format!("{o:.3}"));
                println!("{} {} t={}: fitted order {order}", s.key.formulation, s.key.policy.name(), s.key.t);
            }
            ("convergence.csv", report.to_csv(), report.failures())
        }
        StudyKind::Locking => {
            let report = run_locking_study(&spec)?;
            for f in &spec.formulations {
                for &t in &spec.thickness {
                    if let Some(r) = report.policy_ratio(*f, t) {
                        println!("{f} t={t}: full/reduced error ratio {r:.3e}");
                    }
                }
            }
            let failures = report.rows.iter().filter(|r| r.rel_error.is_err()).count();
            ("locking.csv", report.to_csv(), failures)
        }
    };
    create_dir(out)?;
    write_text(&out.join(name), &csv)?;
    if failures > 0 {
        return Err(Failure::new(SINGULAR, format!("{failures} cell(s) failed to solve; see {name}")));
    }
    Ok(())
}

fn cmd_validate(list: bool, scale: f64) -> Result<(), Failure> {
    if list {
        for (i, name) in CRITERIA.iter().enumerate() {
            println!("{:>2}. {name}", i + 1);
        }
        return Ok(());
    }
    let tol = if scale == 1.0 { Tolerances::pinned() } else { Tolerances::scaled(scale) };
    let mut failed = 0;
    for id in 1..=CRITERIA.len() {
        let outcome = run_criterion(id, &tol);
        println!("{outcome}");
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed > 0 {
        return Err(Failure::new(1, format!("{failed} criteria failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = std::env::var_os("BEAM_OUT").map(PathBuf::from).unwrap_or(cli.out);
    if let Some(seed) = cli.seed {
        log::debug!("--seed {seed} ignored");
    }
    let result = match cli.command {
        Command::Solve {
            model,
            samples,
            gauss_points,
        } => cmd_solve(&model, &out, samples, gauss_points),
        Command::Converge { study } => cmd_converge(&study, &out),
        Command::Validate { list, tolerance_scale } => cmd_validate(list, tolerance_scale),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
