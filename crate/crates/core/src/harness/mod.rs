//! Manufactured problems, study configuration, the refinement driver and
//! report output.

mod config;
mod problems;
mod report;
mod study;

pub use config::{
    load_config, ConfigFile, FaceSpec, GeometrySpec, InterfaceSpec, OutputFormat, PatchSpec, StudyConfig,
    DEFAULT_BASE_ELEMENTS,
};
pub use problems::{
    lowreg_lambda, problem_alpha_jump, problem_lowreg, problem_polynomial, problem_smooth, ProblemKind, ProblemSpec,
    Regularity, SMOOTH_FREQUENCY,
};
pub use report::{
    emit_report, format_float, parse_report_json, report_csv, report_json, report_rows, sample_solution,
    write_samples, ReportFile, ReportRow, SolutionFile, CSV_HEADER,
};
pub use study::{run_study, run_study_on, StudyFailure, StudyOutput};
