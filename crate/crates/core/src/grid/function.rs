use super::domain::DomainSpec;
use crate::error::{Error, Result};

/// Real values sampled at every stored point of a [`DomainSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    domain: DomainSpec,
    values: Vec<f64>,
}

impl GridFunction {
    /// Validates length and finiteness.
    pub fn new(domain: DomainSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.num_points() {
            return Err(Error::invalid(format!(
                "grid function has {} values, domain has {} points",
                values.len(),
                domain.num_points()
            )));
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value at grid index {p}")));
        }
        Ok(GridFunction { domain, values })
    }

    /// Used for residual maps, which carry `+∞` where the Hessian leaves the cone.
    pub(crate) fn from_values_unchecked(domain: DomainSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), domain.num_points());
        GridFunction { domain, values }
    }

    pub fn constant(domain: &DomainSpec, c: f64) -> Self {
        GridFunction {
            values: vec![c; domain.num_points()],
            domain: domain.clone(),
        }
    }

    /// Samples `f` at the real coordinates of every point.
    pub fn from_fn(domain: &DomainSpec, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let values = (0..domain.num_points())
            .map(|p| f(&domain.position(p)))
            .collect();
        GridFunction {
            domain: domain.clone(),
            values,
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, p: usize) -> f64 {
        self.values[p]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max(u) − min(u)`.
    pub fn oscillation(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> GridFunction {
        GridFunction {
            domain: self.domain.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &GridFunction, mut f: impl FnMut(f64, f64) -> f64) -> Result<GridFunction> {
        self.check_same_domain(other)?;
        Ok(GridFunction {
            domain: self.domain.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn check_same_domain(&self, other: &GridFunction) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch(format!(
                "{:?} vs {:?}",
                self.domain, other.domain
            )));
        }
        Ok(())
    }

    /// `max |u − v|` over the given points (all points when `points` is `None`).
    pub fn max_abs_diff(&self, other: &GridFunction, points: Option<&[usize]>) -> Result<f64> {
        self.check_same_domain(other)?;
        let diff = |p: usize| (self.values[p] - other.values[p]).abs();
        Ok(match points {
            Some(ps) => ps.iter().map(|&p| diff(p)).fold(0.0, f64::max),
            None => (0..self.values.len()).map(diff).fold(0.0, f64::max),
        })
    }

    /// Cyclic translation on the torus: `out(x) = u(x − offset)`.
    pub fn translate(&self, offset: &[i32]) -> Result<GridFunction> {
        if !self.domain.is_torus() {
            return Err(Error::invalid("translation is only defined on the torus"));
        }
        let neg: Vec<i32> = offset.iter().map(|x| -x).collect();
        let values = (0..self.values.len())
            .map(|p| self.values[self.domain.shift(p, &neg).expect("torus shift")])
            .collect();
        Ok(GridFunction {
            domain: self.domain.clone(),
            values,
        })
    }

    /// `Σ u(x)·weight(x)·h^{2n}` over interior points.
    pub fn integrate_against(&self, weight: &[f64]) -> f64 {
        let vol = self.domain.cell_volume();
        (0..self.values.len())
            .filter(|&p| self.domain.is_interior(p))
            .map(|p| self.values[p] * weight[p])
            .sum::<f64>()
            * vol
    }
}
