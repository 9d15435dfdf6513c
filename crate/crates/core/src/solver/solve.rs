use super::linear::{bicgstab, Csr};
use super::report::{Certification, SolveMethod, SolveOptions, SolveReport, SolveStatus};
use super::scheme::{evaluate, rhs_and_derivative, SchemeGrid};
use super::stencil::StencilSet;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::viscosity::{max_interior, min_interior, subsolution_residual, supersolution_residual, ProblemSpec};

const MAX_LINEAR_ITER: usize = 20_000;

/// Solves the `ε > 0` problem on the torus.
pub fn solve_positive(p: &ProblemSpec, s: &StencilSet, tol: f64, max_iter: usize) -> Result<SolveReport> {
    solve_positive_with(p, s, &SolveOptions::new(tol, max_iter))
}

pub fn solve_positive_with(p: &ProblemSpec, s: &StencilSet, opts: &SolveOptions) -> Result<SolveReport> {
    if !p.domain.is_torus() {
        return Err(Error::invalid("ball problems are solved with dirichlet_solve"));
    }
    if p.epsilon <= 0.0 {
        return Err(Error::invalid(
            "the ε = 0 problem on the torus is only reachable through continuation",
        ));
    }
    if !p.density.is_strictly_positive() {
        return Err(Error::DensityNotPositive { min: p.density.min() });
    }
    let g = SchemeGrid::new(&p.domain, Some(&p.background), s)?;
    let u0 = match &opts.initial {
        Some(u) => {
            u.check_same_domain(&GridFunction::constant(&p.domain, 0.0))?;
            u.clone()
        }
        None => GridFunction::constant(&p.domain, constant_subsolution(&g, s, p)),
    };
    iterate(p, s, &g, u0, opts)
}

/// Solves the problem on the ball with the collar held at the boundary data.
pub fn dirichlet_solve(p: &ProblemSpec, s: &StencilSet, tol: f64, max_iter: usize) -> Result<SolveReport> {
    dirichlet_solve_with(p, s, &SolveOptions::new(tol, max_iter))
}

pub fn dirichlet_solve_with(p: &ProblemSpec, s: &StencilSet, opts: &SolveOptions) -> Result<SolveReport> {
    if p.domain.is_torus() {
        return Err(Error::invalid("dirichlet_solve needs a ball domain"));
    }
    let bdry = p.boundary.as_ref().ok_or(Error::MissingBoundary)?;
    let g = SchemeGrid::new(&p.domain, Some(&p.background), s)?;
    let mut u0 = opts.initial.clone().unwrap_or_else(|| bdry.clone());
    u0.check_same_domain(bdry)?;
    for x in 0..p.domain.num_points() {
        if g.unknown[x] == usize::MAX {
            u0.values_mut()[x] = bdry.get(x);
        }
    }
    iterate(p, s, &g, u0, opts)
}

/// `min_x [n ln b_ω(x) − ln W(x)] / ε`, the largest constant subsolution; `0` when
/// `ω` has a degenerate Bellman value somewhere.
pub(crate) fn constant_subsolution(g: &SchemeGrid, s: &StencilSet, p: &ProblemSpec) -> f64 {
    let n = p.n() as f64;
    let mut c = f64::INFINITY;
    for (k, &x) in g.interior.iter().enumerate() {
        let (b, _) = s.family().minimize(&g.bq[k * g.ndir..(k + 1) * g.ndir]);
        if b <= 0.0 {
            return 0.0;
        }
        c = c.min((n * b.ln() - p.density.at(x).ln()) / p.epsilon);
    }
    if c.is_finite() {
        c
    } else {
        0.0
    }
}

fn iterate(p: &ProblemSpec, s: &StencilSet, g: &SchemeGrid, mut u: GridFunction, opts: &SolveOptions) -> Result<SolveReport> {
    let tol = opts.tol;
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let nu = g.interior.len();
    let mut history = Vec::new();
    let mut status = SolveStatus::MaxIter;
    let mut steps = 0;
    let mut delta = vec![0.0; nu];
    loop {
        let eval = evaluate(g, s, u.values(), |x, ux| rhs_and_derivative(p, x, ux).0);
        let res = eval.iter().map(|e| e.0.abs()).fold(0.0, f64::max);
        let res = if eval.iter().any(|e| !e.0.is_finite()) { f64::NAN } else { res };
        history.push(res);
        if !res.is_finite() {
            status = SolveStatus::Diverged;
            break;
        }
        if res <= tol {
            status = SolveStatus::Converged;
            break;
        }
        if steps >= opts.max_iter {
            break;
        }
        steps += 1;
        let vals = u.values_mut();
        match opts.method {
            SolveMethod::Explicit => {
                let mut rmax: f64 = 0.0;
                for &x in &g.interior {
                    rmax = rmax.max(rhs_and_derivative(p, x, vals[x]).1);
                }
                let tau = 1.0 / (s.family().max_weight_sum() / g.h2 + rmax);
                for (k, &x) in g.interior.iter().enumerate() {
                    vals[x] += tau * eval[k].0;
                }
            }
            SolveMethod::Policy => {
                let a = newton_matrix(p, s, g, vals, &eval);
                let b: Vec<f64> = eval.iter().map(|e| e.0).collect();
                let b2 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
                let atol = (0.1 * tol).max(res.min(1e-2) * b2);
                delta.iter_mut().for_each(|d| *d = 0.0);
                bicgstab(&a, &b, &mut delta, atol, MAX_LINEAR_ITER);
                for (k, &x) in g.interior.iter().enumerate() {
                    vals[x] += delta[k];
                }
            }
        }
    }
    let certification = certify(&u, p, s, tol)?;
    Ok(SolveReport {
        solution: u,
        residual_history: history,
        iterations: steps,
        continuation_trace: None,
        stage_solutions: Vec::new(),
        status,
        certification,
    })
}

/// `−J` for the policy fixed by `eval`: an M-matrix over the interior unknowns.
fn newton_matrix(
    p: &ProblemSpec,
    s: &StencilSet,
    g: &SchemeGrid,
    u: &[f64],
    eval: &[(f64, crate::bellman::MemberRef)],
) -> Csr {
    let nu = g.interior.len();
    let mut a = Csr::with_capacity(nu, nu * (1 + 4 * p.n()));
    let scale = 0.25 / g.h2;
    for (k, &x) in g.interior.iter().enumerate() {
        let mut diag = rhs_and_derivative(p, x, u[x]).1;
        for (d, lambda) in s.family().member_terms(eval[k].1) {
            diag += lambda / g.h2;
            for &q in &g.arms[(k * g.ndir + d) * 4..][..4] {
                let j = g.unknown[q];
                if j != usize::MAX {
                    a.push(j, -lambda * scale);
                }
            }
        }
        a.push(k, diag);
        a.end_row();
    }
    a
}

pub(crate) fn certify(u: &GridFunction, p: &ProblemSpec, s: &StencilSet, tol: f64) -> Result<Certification> {
    let g = SchemeGrid::new(&p.domain, Some(&p.background), s)?;
    let eval = evaluate(&g, s, u.values(), |x, ux| rhs_and_derivative(p, x, ux).0);
    let scheme_residual = eval.iter().map(|e| e.0.abs()).fold(0.0, f64::max);
    let threshold = 10.0 * tol;
    Ok(Certification {
        scheme_residual,
        subsolution_residual: max_interior(&subsolution_residual(u, p)?),
        supersolution_residual: min_interior(&supersolution_residual(u, p)?),
        threshold,
        certified: scheme_residual <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BackgroundField, DensityField, DomainSpec};
    use crate::hermitian::HermitianForm;
    use crate::solver::scheme_operator;

    fn torus_problem(n: usize, res: usize, w: impl FnMut(&[f64]) -> f64, eps: f64) -> ProblemSpec {
        let d = DomainSpec::torus(n, res, 1.0).unwrap();
        ProblemSpec::new(
            BackgroundField::identity(&d),
            DensityField::from_fn(&d, w).unwrap(),
            eps,
            None,
        )
        .unwrap()
    }

    #[test]
    fn constant_problems() {
        let s = StencilSet::new(1, 1).unwrap();
        let p = torus_problem(1, 8, |_| 1.0, 1.0);
        let r = solve_positive(&p, &s, 1e-12, 50).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.solution.sup_norm() <= 1e-10);
        let c: f64 = 0.8;
        let p = torus_problem(1, 8, |_| c.exp(), 1.0);
        let r = solve_positive(&p, &s, 1e-12, 50).unwrap();
        assert!(r.solution.values().iter().all(|v| (v + c).abs() <= 1e-8));
        assert!(r.is_certified());
    }

    #[test]
    fn preconditions() {
        let s = StencilSet::new(1, 1).unwrap();
        let p = torus_problem(1, 4, |_| 1.0, 0.0);
        assert!(matches!(solve_positive(&p, &s, 1e-8, 10), Err(Error::InvalidArgument(_))));
        let p = torus_problem(1, 4, |x| x[0], 1.0);
        assert!(matches!(solve_positive(&p, &s, 1e-8, 10), Err(Error::DensityNotPositive { .. })));
        let b = DomainSpec::ball(1, 4, 1.0).unwrap();
        let pb = ProblemSpec::new(
            BackgroundField::zero(&b),
            DensityField::constant(&b, 1.0).unwrap(),
            0.0,
            None,
        )
        .unwrap();
        assert!(matches!(dirichlet_solve(&pb, &s, 1e-8, 10), Err(Error::MissingBoundary)));
        assert!(solve_positive(&pb, &s, 1e-8, 10).is_err());
    }

    #[test]
    fn newton_and_explicit_agree() {
        let s = StencilSet::new(1, 1).unwrap();
        let p = torus_problem(1, 8, |x| 1.0 + 0.3 * (6.283185307179586 * x[0]).cos(), 1.0);
        let a = solve_positive(&p, &s, 1e-11, 50).unwrap();
        let opts = SolveOptions::new(1e-11, 200_000).method(SolveMethod::Explicit);
        let b = solve_positive_with(&p, &s, &opts).unwrap();
        assert_eq!(a.status, SolveStatus::Converged);
        assert_eq!(b.status, SolveStatus::Converged);
        assert!(a.solution.max_abs_diff(&b.solution, None).unwrap() < 1e-9);
        assert!(a.iterations < 20);
        // Monotone from below: every explicit iterate is a subsolution.
        assert!(b.residual_history.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn dirichlet_quadratic_is_exact() {
        let d = DomainSpec::ball(2, 6, 1.0).unwrap();
        let g = GridFunction::from_fn(&d, |x| x.iter().map(|v| v * v).sum());
        let p = ProblemSpec::new(
            BackgroundField::zero(&d),
            DensityField::constant(&d, 1.0).unwrap(),
            0.0,
            Some(g.clone()),
        )
        .unwrap();
        let s = StencilSet::new(2, 1).unwrap();
        let opts = SolveOptions::new(1e-11, 50).initial(GridFunction::constant(&d, 0.0));
        let r = dirichlet_solve_with(&p, &s, &opts).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.solution.max_abs_diff(&g, None).unwrap() < 1e-8);
        let sres = scheme_operator(&r.solution, &p, &s).unwrap();
        assert!(sres.sup_norm() <= 1e-11);
    }

    #[test]
    fn dirichlet_pluriharmonic_data_with_zero_density() {
        let d = DomainSpec::ball(2, 6, 1.0).unwrap();
        let g = GridFunction::from_fn(&d, |x| x[0] * x[0] - x[1] * x[1]);
        let p = ProblemSpec::new(
            BackgroundField::zero(&d),
            DensityField::constant(&d, 0.0).unwrap(),
            0.0,
            Some(g.clone()),
        )
        .unwrap();
        let s = StencilSet::new(2, 1).unwrap();
        let r = dirichlet_solve(&p, &s, 1e-11, 50).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.solution.max_abs_diff(&g, None).unwrap() < 1e-8);
    }

    #[test]
    fn constant_subsolution_uses_the_background() {
        let d = DomainSpec::torus(2, 4, 1.0).unwrap();
        let p = ProblemSpec::new(
            BackgroundField::constant(&d, HermitianForm::scaled_identity(2, 2.0)).unwrap(),
            DensityField::constant(&d, 1.0).unwrap(),
            0.5,
            None,
        )
        .unwrap();
        let s = StencilSet::new(2, 1).unwrap();
        let g = SchemeGrid::new(&d, Some(&p.background), &s).unwrap();
        // b_ω = 2, so 2 ln 2 / 0.5.
        assert!((constant_subsolution(&g, &s, &p) - 4.0 * 2f64.ln()).abs() < 1e-12);
        let r = solve_positive(&p, &s, 1e-12, 20).unwrap();
        assert!(r.iterations == 0 && r.status == SolveStatus::Converged);
    }
}
