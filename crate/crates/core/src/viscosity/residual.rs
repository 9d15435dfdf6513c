use rayon::prelude::*;

use super::problem::ProblemSpec;
use super::psh::discrete_psh_test;
use crate::error::{Error, Result};
use crate::grid::{complex_hessian, BackgroundField, GridFunction};
use crate::hermitian::{det_plus, is_semipositive, HermitianForm};

fn hessian_with_background(u: &GridFunction, p: usize, bg: Option<&BackgroundField>) -> Result<HermitianForm> {
    let h = complex_hessian(u, p)?;
    Ok(match bg {
        Some(b) => b.at(p).add(&h),
        None => h,
    })
}

fn interior_map(
    u: &GridFunction,
    f: impl Fn(usize) -> Result<f64> + Sync,
) -> Result<GridFunction> {
    let d = u.domain();
    let vals: Vec<Result<f64>> = (0..d.num_points())
        .into_par_iter()
        .map(|p| if d.is_interior(p) { f(p) } else { Ok(0.0) })
        .collect();
    let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(GridFunction::from_values_unchecked(d.clone(), vals))
}

fn check_domain(u: &GridFunction, p: &ProblemSpec) -> Result<()> {
    if u.domain() != &p.domain {
        return Err(Error::DomainMismatch("function and problem".into()));
    }
    Ok(())
}

/// `F(x) = e^{εu}W − det(ω + u_{zz̄})` where the form is semipositive, `+∞` elsewhere.
///
/// Collar points of the ball carry `0`. `u` is a discrete subsolution when every
/// value is `≤ tol`.
pub fn subsolution_residual(u: &GridFunction, p: &ProblemSpec) -> Result<GridFunction> {
    check_domain(u, p)?;
    interior_map(u, |x| {
        let h = hessian_with_background(u, x, Some(&p.background))?;
        Ok(if is_semipositive(&h).semipositive {
            (p.epsilon * u.get(x)).exp() * p.density.at(x) - h.det()
        } else {
            f64::INFINITY
        })
    })
}

/// `F₊(x) = e^{εu}W − det₊(ω + u_{zz̄})`; `u` is a discrete supersolution when every
/// value is `≥ −tol`.
pub fn supersolution_residual(u: &GridFunction, p: &ProblemSpec) -> Result<GridFunction> {
    check_domain(u, p)?;
    interior_map(u, |x| {
        let h = hessian_with_background(u, x, Some(&p.background))?;
        Ok((p.epsilon * u.get(x)).exp() * p.density.at(x) - det_plus(&h))
    })
}

/// `max F` over interior points.
pub fn max_interior(r: &GridFunction) -> f64 {
    let d = r.domain();
    (0..d.num_points())
        .filter(|&p| d.is_interior(p))
        .map(|p| r.get(p))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `min F₊` over interior points.
pub fn min_interior(r: &GridFunction) -> f64 {
    let d = r.domain();
    (0..d.num_points())
        .filter(|&p| d.is_interior(p))
        .map(|p| r.get(p))
        .fold(f64::INFINITY, f64::min)
}

pub fn is_certified_subsolution(u: &GridFunction, p: &ProblemSpec, tol: f64) -> Result<bool> {
    Ok(max_interior(&subsolution_residual(u, p)?) <= tol)
}

pub fn is_certified_supersolution(u: &GridFunction, p: &ProblemSpec, tol: f64) -> Result<bool> {
    Ok(min_interior(&supersolution_residual(u, p)?) >= -tol)
}

/// Pointwise `det₊(ω + u_{zz̄})`, the grid proxy of the Monge–Ampère measure density.
///
/// Fails with [`Error::NotPsh`] unless `u` passes the (ω-)psh test.
pub fn ma_measure(u: &GridFunction, background: Option<&BackgroundField>) -> Result<GridFunction> {
    let r = discrete_psh_test(u, background)?;
    if !r.passed {
        return Err(Error::NotPsh {
            count: r.violations.len(),
            worst: r.min_value,
        });
    }
    interior_map(u, |x| Ok(det_plus(&hessian_with_background(u, x, background)?)))
}
