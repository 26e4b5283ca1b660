//! Refinement study driver.

use std::fmt;

use log::{info, warn};

use super::config::StudyConfig;
use super::problems::ProblemSpec;
use crate::analysis::{dg_norm_error, l2_error, ConvergenceReport, ErrorRecord};
use crate::assembly::{probe_coercivity, Assembler, Scheme};
use crate::geometry::MultiPatchDomain;
use crate::solver::{SolveReport, SolverOptions};
use crate::{Error, Result};

/// Random vectors used by the per-level positivity probe.
const COERCIVITY_SAMPLES: usize = 16;

/// Result of a study that ran to the end.
#[derive(Debug, Clone)]
pub struct StudyOutput {
    pub report: ConvergenceReport,
    pub solves: Vec<SolveReport>,
    /// Domain and solution coefficients of the finest level.
    pub domain: MultiPatchDomain,
    pub coefficients: Vec<f64>,
}

/// A study stopped by an error; `partial` holds the levels that finished and
/// is flagged incomplete.
#[derive(Debug)]
pub struct StudyFailure {
    pub partial: ConvergenceReport,
    pub level: usize,
    pub source: Error,
}

impl fmt::Display for StudyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {} failed: {}", self.level, self.source)
    }
}

impl std::error::Error for StudyFailure {}

fn empty_report() -> ConvergenceReport {
    ConvergenceReport {
        records: vec![],
        dg_rates: vec![],
        l2_rates: vec![],
        predicted_rate: None,
        complete: false,
    }
}

struct Level {
    record: ErrorRecord,
    solve: SolveReport,
    coefficients: Vec<f64>,
}

fn run_level(study: &StudyConfig, problem: &ProblemSpec, domain: &MultiPatchDomain, level: usize) -> Result<Level> {
    let config = study.dg_config(domain.dim())?;
    let assembler = Assembler::new(domain, config)?;
    let system = assembler.assemble(&problem.f, &problem.u)?;
    if study.scheme == Scheme::Sip {
        let q = probe_coercivity(&system.matrix, COERCIVITY_SAMPLES, level as u64);
        if q <= 0.0 {
            warn!("level {level}: v^T A v = {q:.3e} |v|^2 for a random v; the penalty may be too small");
        }
    }
    let (coefficients, solve) = system.solve(&SolverOptions {
        max_iter: study.max_iterations,
        ..SolverOptions::default()
    })?;
    let dg_error = dg_norm_error(&assembler, &coefficients, problem.exact())?;
    let l2 = l2_error(&assembler, &coefficients, &problem.u)?;
    let record = ErrorRecord {
        level,
        h_max: domain.h_max(),
        dofs: assembler.dofmap().total_dofs(),
        dg_error,
        l2_error: l2,
    };
    info!(
        "level {level}: dofs {} dg {:.6e} l2 {:.6e} ({} iterations, {:.2}s)",
        record.dofs, record.dg_error, record.l2_error, solve.iterations, solve.wall_time
    );
    Ok(Level {
        record,
        solve,
        coefficients,
    })
}

/// Solves on `study.levels` successive dyadic refinements of `base` and
/// records the errors. `base` must use solution spaces of degree
/// `study.degree`.
pub fn run_study_on(
    study: &StudyConfig,
    problem: &ProblemSpec,
    base: &MultiPatchDomain,
) -> std::result::Result<StudyOutput, StudyFailure> {
    let fail = |records: Vec<ErrorRecord>, level: usize, source: Error| {
        let partial = ConvergenceReport::from_records(records, problem.predicted_rate(study.degree).ok(), false)
.unwrap_or_else(|_| empty_report());
        StudyFailure { partial, level, source }
    };
    if let Err(e) = study.validate() {
        return Err(fail(vec![], 0, e));
    }
    if base.degree() != study.degree {
        return Err(fail(
            vec![],
            0,
            Error::Config(format!("domain degree {} but study degree {}", base.degree(), study.degree)),
        ));
    }
    let predicted = match problem.predicted_rate(study.degree) {
        Ok(r) => r,
        Err(e) => return Err(fail(vec![], 0, e)),
    };
    let mut records = Vec::with_capacity(study.levels);
    let mut solves = Vec::with_capacity(study.levels);
    let mut domain = base.clone();
    let mut coefficients = vec![];
    for level in 0..study.levels {
        if level > 0 {
            domain = domain.refine_dyadic();
        }
        match run_level(study, problem, &domain, level) {
            Ok(out) => {
                records.push(out.record);
                solves.push(out.solve);
                coefficients = out.coefficients;
            }
            Err(e) => return Err(fail(records, level, e)),
        }
    }
    match ConvergenceReport::from_records(records.clone(), Some(predicted), true) {
        Ok(report) => Ok(StudyOutput {
            report,
            solves,
            domain,
            coefficients,
        }),
        Err(e) => Err(fail(records, study.levels - 1, e)),
    }
}

/// Builds the problem from the study and the domain coefficients, then runs
/// the study.
pub fn run_study(study: &StudyConfig, base: &MultiPatchDomain) -> std::result::Result<StudyOutput, StudyFailure> {
    match study.problem.build(base.dim(), study.degree, base.alpha()) {
        Ok(problem) => run_study_on(study, &problem, base),
        Err(source) => Err(StudyFailure {
partial: empty_report(),
            level: 0,
            source,
        }),
    }
}
