use crate::error::Result;
use crate::grid::{levi_form_along, BackgroundField, DirectionSet, GridFunction};

/// One failed directional test.
#[derive(Clone, Debug, PartialEq)]
pub struct PshViolation {
    pub point: usize,
    pub direction: usize,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct PshReport {
    pub passed: bool,
    pub tol: f64,
    pub violations: Vec<PshViolation>,
    /// Smallest `L_w u + w*ωw` seen.
    pub min_value: f64,
}

/// Options for [`discrete_psh_test_with`].
#[derive(Clone, Debug)]
pub struct PshOptions<'a> {
    /// Stencil refinement of the tested directions.
    pub refinement: usize,
    /// Absolute tolerance; `None` means `1e-9·(1 + ‖u‖_∞)`.
    pub tol: Option<f64>,
    /// Restrict the test to these points (default: all interior points).
    pub region: Option<&'a [usize]>,
}

impl Default for PshOptions<'_> {
    fn default() -> Self {
        PshOptions {
            refinement: 1,
            tol: None,
            region: None,
        }
    }
}

/// `L_w u(x) + w*ω(x)w ≥ −tol` at every interior point and level-1 direction.
pub fn discrete_psh_test(u: &GridFunction, background: Option<&BackgroundField>) -> Result<PshReport> {
    discrete_psh_test_with(u, background, &PshOptions::default())
}

pub fn discrete_psh_test_with(
    u: &GridFunction,
    background: Option<&BackgroundField>,
    opts: &PshOptions,
) -> Result<PshReport> {
    let d = u.domain();
    let dirs = DirectionSet::new(d.dim(), opts.refinement)?;
    let tol = opts.tol.unwrap_or(1e-9 * (1.0 + u.sup_norm()));
    let owned;
    let points: &[usize] = match opts.region {
        Some(r) => r,
        None => {
            owned = d.interior_points();
            &owned
        }
    };
    let complex: Vec<_> = dirs.directions().iter().map(|w| w.as_complex()).collect();
    let mut violations = Vec::new();
    let mut min_value = f64::INFINITY;
    for &p in points {
        for (k, w) in dirs.directions().iter().enumerate() {
            let mut v = levi_form_along(u, p, w)?;
            if let Some(b) = background {
                v += b.at(p).quad(&complex[k]);
            }
            min_value = min_value.min(v);
            if v < -tol {
                violations.push(PshViolation {
                    point: p,
                    direction: k,
                    value: v,
                });
            }
        }
    }
    Ok(PshReport {
        passed: violations.is_empty(),
        tol,
        violations,
        min_value,
    })
}
