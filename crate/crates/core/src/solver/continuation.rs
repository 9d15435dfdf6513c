use super::report::{ContinuationStage, SolveOptions, SolveReport, SolveStatus};
use super::solve::{certify, solve_positive_with};
use super::stencil::StencilSet;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::viscosity::ProblemSpec;

/// Relative tolerance of the compatibility condition `∫W = ∫det ω`.
pub const MASS_TOLERANCE: f64 = 1e-6;

/// `ε_k = 2^{-k}` for `k = 0..=10`.
pub fn default_schedule() -> Vec<f64> {
    (0..=10).map(|k| 0.5f64.powi(k)).collect()
}

/// `∫ det ω` over the grid.
pub fn omega_mass(p: &ProblemSpec) -> f64 {
    let d = &p.domain;
    d.interior_points()
        .iter()
        .map(|&x| p.background.at(x).det())
        .sum::<f64>()
        * d.cell_volume()
}

pub fn continuation_to_calabi(
    p: &ProblemSpec,
    s: &StencilSet,
    eps_schedule: &[f64],
    tol: f64,
) -> Result<SolveReport> {
    continuation_with(p, s, eps_schedule, &SolveOptions::new(tol, 100))
}

/// Solves the problem at each `ε` of a decreasing schedule, warm-starting every stage
/// from the previous one, and returns the last stage shifted to `∫φ dW = 0`.
///
/// `opts.initial` (if any) seeds the first stage.
pub fn continuation_with(
    p: &ProblemSpec,
    s: &StencilSet,
    eps_schedule: &[f64],
    opts: &SolveOptions,
) -> Result<SolveReport> {
    if !p.domain.is_torus() {
        return Err(Error::invalid("continuation runs on the torus"));
    }
    if p.epsilon != 0.0 {
        return Err(Error::invalid("continuation targets the ε = 0 problem"));
    }
    if eps_schedule.is_empty()
        || eps_schedule.iter().any(|&e| !(e > 0.0 && e.is_finite()))
        || eps_schedule.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::invalid("schedule must be positive and strictly decreasing"));
    }
    let density_mass = p.density.total_mass();
    let om = omega_mass(p);
    if !((density_mass - om).abs() <= MASS_TOLERANCE * om.abs()) {
        return Err(Error::IncompatibleMasses {
            density_mass,
            omega_mass: om,
        });
    }
    let w = p.density.values();
    let mut stages = Vec::with_capacity(eps_schedule.len());
    let mut solutions: Vec<GridFunction> = Vec::with_capacity(eps_schedule.len());
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut status = SolveStatus::Converged;
    let mut current = opts.initial.clone();
    for &eps in eps_schedule {
        let pe = p.with_epsilon(eps)?;
        let stage_opts = SolveOptions {
            initial: current.take(),
            ..opts.clone()
        };
        let r = solve_positive_with(&pe, s, &stage_opts)?;
        let u = r.solution;
        let violation = match solutions.last() {
            Some(prev) => Some(
                u.values()
                    .iter()
                    .zip(prev.values())
                    .map(|(a, b)| a - b)
                    .fold(f64::NEG_INFINITY, f64::max),
            ),
            None => None,
        };
        stages.push(ContinuationStage {
            epsilon: eps,
            sup_u: u.sup_norm(),
            normalization: u.integrate_against(w),
            mass: u.map(|v| (eps * v).exp()).integrate_against(w),
            monotonicity_violation: violation,
            iterations: r.iterations,
            status: r.status,
        });
        history.extend(r.residual_history);
        iterations += r.iterations;
        if r.status != SolveStatus::Converged && status == SolveStatus::Converged {
            status = r.status;
        }
        current = Some(u.clone());
        solutions.push(u);
        if r.status == SolveStatus::Diverged {
            break;
        }
    }
    let last = solutions.last().expect("schedule is non-empty");
    let certification = certify(last, &p.with_epsilon(stages.last().unwrap().epsilon)?, s, opts.tol)?;
    let shift = last.integrate_against(w) / density_mass;
    let solution = last.map(|v| v - shift);
    Ok(SolveReport {
        solution,
        residual_history: history,
        iterations,
        continuation_trace: Some(stages),
        stage_solutions: solutions,
        status,
        certification,
    })
}
