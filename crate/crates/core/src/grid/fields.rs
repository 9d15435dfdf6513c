use super::domain::DomainSpec;
use super::function::GridFunction;
use crate::error::{Error, Result};
use crate::hermitian::HermitianForm;

/// The background form `ω`, sampled as one Hermitian matrix per grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct BackgroundField {
    domain: DomainSpec,
    omega: Vec<HermitianForm>,
    potential: Option<GridFunction>,
}

impl BackgroundField {
    pub fn new(domain: DomainSpec, omega: Vec<HermitianForm>) -> Result<Self> {
        if omega.len() != domain.num_points() {
            return Err(Error::invalid("background field length does not match the grid"));
        }
        if omega.iter().any(|h| h.dim() != domain.dim()) {
            return Err(Error::invalid("background field has the wrong matrix dimension"));
        }
        Ok(BackgroundField {
            domain,
            omega,
            potential: None,
        })
    }

    pub fn constant(domain: &DomainSpec, form: HermitianForm) -> Result<Self> {
        Self::new(domain.clone(), vec![form; domain.num_points()])
    }

    pub fn identity(domain: &DomainSpec) -> Self {
        Self::constant(domain, HermitianForm::identity(domain.dim())).expect("identity field")
    }

    pub fn zero(domain: &DomainSpec) -> Self {
        Self::constant(domain, HermitianForm::zeros(domain.dim())).expect("zero field")
    }

    pub fn from_fn(domain: &DomainSpec, mut f: impl FnMut(&[f64]) -> HermitianForm) -> Result<Self> {
        let omega = (0..domain.num_points())
            .map(|p| f(&domain.position(p)))
            .collect();
        Self::new(domain.clone(), omega)
    }

    /// Attaches a local potential `h_ω` (ball charts).
    pub fn with_potential(mut self, h: GridFunction) -> Result<Self> {
        if h.domain() != &self.domain {
            return Err(Error::DomainMismatch("background potential".into()));
        }
        self.potential = Some(h);
        Ok(self)
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn at(&self, p: usize) -> &HermitianForm {
        &self.omega[p]
    }

    pub fn potential(&self) -> Option<&GridFunction> {
        self.potential.as_ref()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.omega
            .iter()
            .map(HermitianForm::min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }

    /// `min eig ≥ −1e-10` at every point.
    pub fn is_semipositive(&self) -> bool {
        self.min_eigenvalue() >= -1e-10
    }
}

/// The density `W ≥ 0` with respect to Lebesgue measure.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityField {
    domain: DomainSpec,
    values: Vec<f64>,
    strictly_positive: bool,
}

impl DensityField {
    pub fn new(domain: DomainSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.num_points() {
            return Err(Error::invalid("density length does not match the grid"));
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::NegativeDensity { index, value });
            }
        }
        let strictly_positive = values.iter().all(|&v| v > 0.0);
        Ok(DensityField {
            domain,
            values,
            strictly_positive,
        })
    }

    pub fn constant(domain: &DomainSpec, c: f64) -> Result<Self> {
        Self::new(domain.clone(), vec![c; domain.num_points()])
    }

    pub fn from_fn(domain: &DomainSpec, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let values = (0..domain.num_points())
            .map(|p| f(&domain.position(p)))
            .collect();
        Self::new(domain.clone(), values)
    }

    pub fn from_grid(g: &GridFunction) -> Result<Self> {
        Self::new(g.domain().clone(), g.values().to_vec())
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, p: usize) -> f64 {
        self.values[p]
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.strictly_positive
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `Σ W·h^{2n}` over interior points.
    pub fn total_mass(&self) -> f64 {
        let vol = self.domain.cell_volume();
        (0..self.values.len())
            .filter(|&p| self.domain.is_interior(p))
            .map(|p| self.values[p])
            .sum::<f64>()
            * vol
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.domain.clone(), self.values.iter().map(|v| v * s).collect())
    }

    pub fn as_grid(&self) -> GridFunction {
        GridFunction::from_values_unchecked(self.domain.clone(), self.values.clone())
    }
}
