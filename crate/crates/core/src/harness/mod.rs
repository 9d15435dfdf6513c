//! Problem configs, the expression evaluator, manufactured solutions, convergence
//! studies and report files.

mod config;
mod expr;
mod load;
mod manufacture;
mod run;

pub use config::{DomainConfig, FieldConfig, MatrixConfig, MethodConfig, OmegaConfig, ProblemConfig, SolverConfig, TaggedField};
pub use expr::Expr;
pub use load::{background_from_config, domain_from_config, load_problem, sample_field, LoadedProblem};
pub use manufacture::{manufacture, Manufactured};
pub use run::{
    continuation_csv, emit_report, residual_history_csv, run_convergence, slice_data, solve_problem,
    ConvergenceRow, ConvergenceTable, Slice, EXACT_ERROR,
};
