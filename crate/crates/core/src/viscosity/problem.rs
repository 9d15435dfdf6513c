use crate::error::{Error, Result};
use crate::grid::{BackgroundField, DensityField, DomainSpec, GridFunction};

/// `(ω + dd^c φ)^n = e^{εφ} W` on a grid, with Dirichlet data on ball collars.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub domain: DomainSpec,
    pub background: BackgroundField,
    pub density: DensityField,
    pub epsilon: f64,
    pub boundary: Option<GridFunction>,
}

impl ProblemSpec {
    pub fn new(
        background: BackgroundField,
        density: DensityField,
        epsilon: f64,
        boundary: Option<GridFunction>,
    ) -> Result<Self> {
        let domain = background.domain().clone();
        if density.domain() != &domain {
            return Err(Error::DomainMismatch("density and background".into()));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be ≥ 0, got {epsilon}")));
        }
        if let Some(b) = &boundary {
            if domain.is_torus() {
                return Err(Error::invalid("torus problems carry no boundary data"));
            }
            if b.domain() != &domain {
                return Err(Error::DomainMismatch("boundary data".into()));
            }
        }
        Ok(ProblemSpec {
            domain,
            background,
            density,
            epsilon,
            boundary,
        })
    }

    pub fn n(&self) -> usize {
        self.domain.dim()
    }

    /// Same problem with another exponent.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(
            self.background.clone(),
            self.density.clone(),
            epsilon,
            self.boundary.clone(),
        )
    }

    /// Default residual certification tolerance `1e-7·(1 + ‖W‖_∞)`.
    pub fn residual_tol(&self) -> f64 {
        1e-7 * (1.0 + self.density.max())
    }
}
