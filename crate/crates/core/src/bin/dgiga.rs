//! Command-line driver: refinement studies, geometry checks and solution
//! sampling.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dgiga::assembly::Scheme;
use dgiga::harness::{
    emit_report, run_study, sample_solution, write_samples, ConfigFile, OutputFormat, SolutionFile,
};
use dgiga::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "dgiga", version, about = "Multi-patch dG-IgA diffusion solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a refinement study and write the convergence report.
    Study {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        scheme: Option<Scheme>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        format: Option<OutputFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the finest-level coefficients for `sample`.
        #[arg(long)]
        save_coeffs: Option<PathBuf>,
    },
    /// Check geometry and interfaces only.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a saved solution on an N^d physical grid.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Solver and study failures exit with 3, everything else with 2.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Solver(_) => EXIT_SOLVER,
        _ => EXIT_VALIDATION,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e))
}

#[allow(clippy::too_many_arguments)]
fn study(
    config: PathBuf,
    degree: Option<usize>,
    levels: Option<usize>,
    scheme: Option<Scheme>,
    mu: Option<f64>,
    format: Option<OutputFormat>,
    out: Option<PathBuf>,
    save_coeffs: Option<PathBuf>,
) -> ExitCode {
    let file = match ConfigFile::read(&config) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let mut study = file.study();
    study.degree = degree.unwrap_or(study.degree);
    study.levels = levels.unwrap_or(study.levels);
    study.scheme = scheme.unwrap_or(study.scheme);
    study.mu = mu.or(study.mu);
    study.format = format.unwrap_or(study.format);
    let Some(out) = out.or(study.output.clone()) else {
        return fail(&Error::Config("no output path: pass --out".into()));
    };
    if let Err(e) = study.validate() {
        return fail(&e);
    }
    let domain = match file.domain(study.degree) {
        Ok(d) => d,
        Err(e) => return fail(&e),
    };
    match run_study(&study, &domain) {
        Ok(output) => {
            if let Err(e) = emit_report(&output.report, &out, study.format) {
                return fail(&e);
            }
            if let Some(path) = save_coeffs {
                if let Err(e) = SolutionFile::new(&output.domain, output.coefficients).write(&path) {
                    return fail(&e);
                }
            }
            ExitCode::SUCCESS
        }
        Err(failure) => {
            // keep whatever finished
            if !failure.partial.records.is_empty() {
                let _ = emit_report(&failure.partial, &out, study.format);
            }
            eprintln!("error: {failure}");
            if failure.level == 0 && failure.partial.records.is_empty() && !matches!(failure.source, Error::Solver(_)) {
                ExitCode::from(exit_code(&failure.source))
            } else {
                ExitCode::from(EXIT_SOLVER)
            }
        }
    }
}

fn verify(config: PathBuf) -> ExitCode {
    let result = ConfigFile::read(&config).and_then(|file| {
        let study = file.study();
        study.validate()?;
        file.domain(study.degree)
    });
    match result {
        Ok(domain) => {
            println!(
                "ok: {} patches, {} interfaces, {} boundary faces",
                domain.num_patches(),
                domain.interfaces().len(),
                domain.boundary_faces().len()
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn sample(config: PathBuf, coeffs: PathBuf, grid: usize, out: PathBuf) -> ExitCode {
    let result = (|| {
        let file = ConfigFile::read(&config)?;
        let solution = SolutionFile::read(&coeffs)?;
        let degree = solution
            .spaces
            .first()
            .map(|s| s.degree())
            .ok_or_else(|| Error::Config("solution file has no spaces".into()))?;
        let domain = solution.attach(&file.domain(degree)?)?;
        let samples = sample_solution(&domain, &solution.values, grid)?;
        write_samples(&samples, domain.dim(), &out)
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Study {
            config,
            degree,
            levels,
            scheme,
            mu,
            format,
            out,
            save_coeffs,
        } => study(config, degree, levels, scheme, mu, format, out, save_coeffs),
        Command::Verify { config } => verify(config),
        Command::Sample {
            config,
            coeffs,
            grid,
            out,
        } => sample(config, coeffs, grid, out),
    }
}
