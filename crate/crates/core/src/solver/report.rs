use crate::grid::GridFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Diverged,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIter => "max_iter",
            SolveStatus::Diverged => "diverged",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SolveMethod {
    /// Policy iteration: Newton steps on the min-of-linear operator.
    #[default]
    Policy,
    /// Damped explicit map `u ← u + τ S[u]` with the monotonicity bound on `τ`.
    Explicit,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub method: SolveMethod,
    /// Starting iterate; defaults to the constant subsolution (torus) or the
    /// boundary data (ball).
    pub initial: Option<GridFunction>,
}

impl SolveOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        SolveOptions {
            tol,
            max_iter,
            method: SolveMethod::Policy,
            initial: None,
        }
    }

    pub fn method(mut self, method: SolveMethod) -> Self {
        self.method = method;
        self
    }

    pub fn initial(mut self, u: GridFunction) -> Self {
        self.initial = Some(u);
        self
    }
}

/// Residuals of the returned solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Certification {
    /// `‖S[u]‖_∞` over interior points.
    pub scheme_residual: f64,
    /// `max F` of the determinant-form subsolution residual.
    pub subsolution_residual: f64,
    /// `min F₊` of the determinant-form supersolution residual.
    pub supersolution_residual: f64,
    /// `10·tol`.
    pub threshold: f64,
    /// `scheme_residual ≤ threshold`.
    pub certified: bool,
}

/// One stage of the `ε ↓ 0` continuation.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationStage {
    pub epsilon: f64,
    pub sup_u: f64,
    /// `∫ φ_ε dW`.
    pub normalization: f64,
    /// `∫ e^{εφ_ε} dW`.
    pub mass: f64,
    /// `max(u_ε − u_{previous ε})`, absent for the first stage.
    pub monotonicity_violation: Option<f64>,
    pub iterations: usize,
    pub status: SolveStatus,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: GridFunction,
    /// Sup-norm scheme residual before each step and after the last one.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub continuation_trace: Option<Vec<ContinuationStage>>,
    /// Unshifted stage solutions of a continuation run.
    pub stage_solutions: Vec<GridFunction>,
    pub status: SolveStatus,
    pub certification: Certification,
}

impl SolveReport {
    pub fn is_certified(&self) -> bool {
        self.status == SolveStatus::Converged && self.certification.certified
    }

    /// Final scheme residual.
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }
}
