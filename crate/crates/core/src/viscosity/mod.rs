//! Grid verifiers: plurisubharmonicity, sub/supersolution residuals, jet tests, the
//! Monge–Ampère proxy and the doubling-of-variables diagnostic.

mod doubling;
mod jet;
mod mixed;
mod problem;
mod psh;
mod residual;

pub use doubling::{comparison_diagnostic, DoublingReport, DoublingRow};
pub use jet::{jet_test, jet_test_with_tol, touching_paraboloid, JetSide, JetVerdict, Paraboloid, KINK_THRESHOLD};
pub use mixed::{verify_mixed_subsolution, MixedReport};
pub use problem::ProblemSpec;
pub use psh::{discrete_psh_test, discrete_psh_test_with, PshOptions, PshReport, PshViolation};
pub use residual::{
    is_certified_subsolution, is_certified_supersolution, ma_measure, max_interior, min_interior,
    subsolution_residual, supersolution_residual,
};
