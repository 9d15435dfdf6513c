use std::path::Path;

use num_complex::Complex64;

use super::config::{DomainConfig, FieldConfig, MatrixConfig, OmegaConfig, ProblemConfig, TaggedField};
use super::expr::Expr;
use crate::error::{Error, Result};
use crate::grid::{read_grid_csv, BackgroundField, DensityField, DomainSpec, GridFunction};
use crate::hermitian::HermitianForm;
use crate::solver::{SolveOptions, StencilSet};
use crate::viscosity::ProblemSpec;

/// A config turned into grid objects.
#[derive(Clone, Debug)]
pub struct LoadedProblem {
    pub config: ProblemConfig,
    pub spec: ProblemSpec,
    pub obstacle: Option<GridFunction>,
    pub reference: Option<GridFunction>,
}

impl LoadedProblem {
    pub fn stencil(&self) -> Result<StencilSet> {
        StencilSet::new(self.spec.n(), self.config.solver.stencil_k)
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions::new(self.config.solver.tol, self.config.solver.max_iter)
            .method((&self.config.solver.method).into())
    }
}

fn config_err(pointer: &str, e: Error) -> Error {
    match e {
        Error::NegativeDensity { .. } | Error::Io { .. } | Error::Config { .. } => e,
        other => Error::Config {
            pointer: pointer.into(),
            msg: other.to_string(),
        },
    }
}

pub fn domain_from_config(c: &DomainConfig) -> Result<DomainSpec> {
    match *c {
        DomainConfig::Torus { dim, resolution, side } => DomainSpec::torus(dim, resolution, side),
        DomainConfig::Ball {
            dim,
            resolution,
            radius,
            margin,
        } => DomainSpec::ball_with_margin(dim, resolution, radius, margin),
    }
    .map_err(|e| config_err("/domain", e))
}

/// Samples a scalar field on the grid.
pub fn sample_field(cfg: &ProblemConfig, f: &FieldConfig, domain: &DomainSpec, pointer: &str) -> Result<GridFunction> {
    match f.tagged() {
        TaggedField::Constant(c) => {
            if !c.is_finite() {
                return Err(Error::Config {
                    pointer: pointer.into(),
                    msg: "constant must be finite".into(),
                });
            }
            Ok(GridFunction::constant(domain, c))
        }
        TaggedField::Expression(s) => {
            let e = Expr::parse(&s, domain.dim()).map_err(|e| config_err(pointer, e))?;
            let vals: Vec<f64> = (0..domain.num_points()).map(|p| e.eval(&domain.position(p))).collect();
            GridFunction::new(domain.clone(), vals).map_err(|e| config_err(pointer, e))
        }
        TaggedField::File(path) => read_grid_csv(&cfg.resolve(&path), domain).map_err(|e| config_err(pointer, e)),
    }
}

fn matrix_at<T>(m: &MatrixConfig<T>, n: usize, pointer: &str, mut value: impl FnMut(&T) -> Result<f64>) -> Result<HermitianForm> {
    let shape_ok = |rows: &Vec<Vec<T>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
    if !shape_ok(&m.re) || !m.im.as_ref().is_none_or(shape_ok) {
        return Err(Error::Config {
            pointer: pointer.into(),
            msg: format!("omega must be {n}×{n}"),
        });
    }
    let mut a = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let re = value(&m.re[j][k])?;
            let im = match &m.im {
                Some(im) => value(&im[j][k])?,
                None => 0.0,
            };
            a.push(Complex64::new(re, im));
        }
    }
    for j in 0..n {
        for k in 0..n {
            let d = a[j * n + k] - a[k * n + j].conj();
            if d.norm() > 1e-12 * (1.0 + a[j * n + k].norm()) {
                return Err(Error::Config {
                    pointer: pointer.into(),
                    msg: format!("omega is not Hermitian at entry ({j}, {k})"),
                });
            }
        }
    }
    HermitianForm::new(n, a).map_err(|e| config_err(pointer, e))
}

pub fn background_from_config(c: &OmegaConfig, domain: &DomainSpec) -> Result<BackgroundField> {
    let n = domain.dim();
    match c {
        OmegaConfig::Identity => Ok(BackgroundField::identity(domain)),
        OmegaConfig::Zero => Ok(BackgroundField::zero(domain)),
        OmegaConfig::Constant(m) => {
            let f = matrix_at(m, n, "/omega/constant", |v| Ok(*v))?;
            BackgroundField::constant(domain, f)
        }
        OmegaConfig::Expression(m) => {
            let parse = |s: &String| Expr::parse(s, n).map_err(|e| config_err("/omega/expression", e));
            let re = m
                .re
                .iter()
                .map(|r| r.iter().map(parse).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let im = match &m.im {
                Some(im) => Some(
                    im.iter()
                        .map(|r| r.iter().map(parse).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()?,
                ),
                None => None,
            };
            let parsed = MatrixConfig { re, im };
            let forms = (0..domain.num_points())
                .map(|p| {
                    let x = domain.position(p);
                    matrix_at(&parsed, n, "/omega/expression", |e: &Expr| Ok(e.eval(&x)))
                })
                .collect::<Result<Vec<_>>>()?;
            BackgroundField::new(domain.clone(), forms)
        }
    }
}

impl ProblemConfig {
    /// Builds every grid object named in the config.
    pub fn build(&self) -> Result<LoadedProblem> {
        let domain = domain_from_config(&self.domain)?;
        let background = background_from_config(&self.omega, &domain)?;
        let w = sample_field(self, &self.density, &domain, "/density")?;
        let density = DensityField::from_grid(&w)?;
        let boundary = match &self.boundary {
            Some(b) => Some(sample_field(self, b, &domain, "/boundary")?),
            None => None,
        };
        let obstacle = match &self.obstacle {
            Some(b) => Some(sample_field(self, b, &domain, "/obstacle")?),
            None => None,
        };
        let reference = match &self.reference {
            Some(s) => Some(sample_field(self, &FieldConfig::Text(s.clone()), &domain, "/reference")?),
            None => None,
        };
        let spec = ProblemSpec::new(background, density, self.epsilon, boundary).map_err(|e| config_err("/", e))?;
        Ok(LoadedProblem {
            config: self.clone(),
            spec,
            obstacle,
            reference,
        })
    }
}

/// Reads and builds a JSON config.
pub fn load_problem(path: &Path) -> Result<ProblemSpec> {
    Ok(ProblemConfig::load(path)?.build()?.spec)
}
