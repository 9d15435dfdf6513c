use super::residual::min_interior;
use crate::error::{Error, Result};
use crate::grid::{complex_hessian, DensityField, GridFunction};
use crate::hermitian::det_plus;

#[derive(Clone, Debug, PartialEq)]
pub struct MixedReport {
    pub passed: bool,
    /// Smallest `LHS − RHS` over interior points.
    pub worst_margin: f64,
}

/// Checks that `Φ = φ + t·ψ` satisfies
///
/// ```text
/// e^{−Φ} det₊(Φ_{zz̄}) ≥ (1 − t)ⁿ e^{−C t} v + c tⁿ w − tol
/// ```
///
/// at every interior point, with `tol = 1e-7·(1 + ‖v‖_∞ + ‖w‖_∞)`.
#[allow(clippy::too_many_arguments)]
pub fn verify_mixed_subsolution(
    phi: &GridFunction,
    psi: &GridFunction,
    t: f64,
    v: &DensityField,
    w: &DensityField,
    big_c: f64,
    small_c: f64,
) -> Result<MixedReport> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("mixing parameter {t} outside [0, 1]")));
    }
    phi.check_same_domain(psi)?;
    if v.domain() != phi.domain() || w.domain() != phi.domain() {
        return Err(Error::DomainMismatch("mixed subsolution densities".into()));
    }
    let d = phi.domain();
    let n = d.dim() as i32;
    let tol = 1e-7 * (1.0 + v.max() + w.max());
    let mix = phi.zip_with(psi, |a, b| a + t * b)?;
    let mut margins = vec![0.0; d.num_points()];
    for p in d.interior_points() {
        let lhs = (-mix.get(p)).exp() * det_plus(&complex_hessian(&mix, p)?);
        let rhs = (1.0 - t).powi(n) * (-big_c * t).exp() * v.at(p) + small_c * t.powi(n) * w.at(p);
        margins[p] = lhs - rhs;
    }
    let worst_margin = min_interior(&GridFunction::from_values_unchecked(d.clone(), margins));
    Ok(MixedReport {
        passed: worst_margin >= -tol,
        worst_margin,
    })
}
