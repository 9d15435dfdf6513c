//! Monotone Bellman scheme, Newton/explicit solvers, the Dirichlet problem, the
//! `ε ↓ 0` continuation and the psh projection.

mod continuation;
mod linear;
mod projection;
mod report;
mod scheme;
mod solve;
mod stencil;

pub use continuation::{continuation_to_calabi, continuation_with, default_schedule, omega_mass, MASS_TOLERANCE};
pub use projection::{psh_projection, ProjectionReport};
pub use report::{Certification, ContinuationStage, SolveMethod, SolveOptions, SolveReport, SolveStatus};
pub use scheme::scheme_operator;
pub use solve::{dirichlet_solve, dirichlet_solve_with, solve_positive, solve_positive_with};
pub use stencil::StencilSet;
