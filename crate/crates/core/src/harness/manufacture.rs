use std::path::Path;

use super::config::{FieldConfig, ProblemConfig, TaggedField};
use super::expr::Expr;
use super::load::{background_from_config, domain_from_config};
use crate::error::{Error, Result};
use crate::grid::{write_grid_csv, DensityField, GridFunction};
use crate::solver::{scheme_operator, StencilSet};
use crate::viscosity::ProblemSpec;

/// A problem whose discrete solution is known exactly.
#[derive(Clone, Debug)]
pub struct Manufactured {
    /// Config pointing at `density.csv`, with `reference` set to the solution.
    pub config: ProblemConfig,
    pub density: GridFunction,
    pub reference: GridFunction,
    /// Constant subtracted from `φ*` to enforce `∫φ* dW = 0` (`ε = 0` torus only).
    pub shift: f64,
}

/// Builds `W = B[φ*]ⁿ e^{−εφ*}` where `B[φ*]` is the scheme's Bellman value of the
/// Levi forms of `ω + dd^c φ*` on the grid, so `φ*` is an exact fixed point of the
/// discrete scheme.
///
/// Ball problems get `φ*` as boundary data and collar density `min W`. For `ε = 0`
/// on the torus `φ*` is shifted so that `∫φ* dW = 0`.
pub fn manufacture(phistar: &str, base: &ProblemConfig) -> Result<Manufactured> {
    let domain = domain_from_config(&base.domain)?;
    let n = domain.dim();
    let expr = Expr::parse(phistar, n)?;
    let background = background_from_config(&base.omega, &domain)?;
    let phi = GridFunction::from_fn(&domain, |x| expr.eval(x));
    let zero_rhs = ProblemSpec::new(
        background,
        DensityField::constant(&domain, 0.0)?,
        0.0,
        None,
    )?;
    let stencil = StencilSet::new(n, base.solver.stencil_k)?;
    let b = scheme_operator(&phi, &zero_rhs, &stencil)?;
    let interior = domain.interior_points();
    let (worst, wval) = interior
        .iter()
        .map(|&p| (p, b.get(p)))
        .fold((usize::MAX, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
    if wval <= 0.0 || !wval.is_finite() {
        return Err(Error::HessianNotPositive { index: worst, value: wval });
    }
    let eps = base.epsilon;
    let mut w = vec![0.0; domain.num_points()];
    for &p in &interior {
        w[p] = b.get(p).powi(n as i32) * (-eps * phi.get(p)).exp();
    }
    let wmin = interior.iter().map(|&p| w[p]).fold(f64::INFINITY, f64::min);
    for (p, v) in w.iter_mut().enumerate() {
        if !domain.is_interior(p) {
            *v = wmin;
        }
    }
    let density = GridFunction::new(domain.clone(), w)?;

    let mut reference = phi;
    let mut shift = 0.0;
    let mut ref_src = phistar.to_string();
    if eps == 0.0 && domain.is_torus() {
        let wv = density.values();
        let mass: f64 = DensityField::from_grid(&density)?.total_mass();
        shift = reference.integrate_against(wv) / mass;
        reference = reference.map(|v| v - shift);
        ref_src = format!("({phistar}) - ({shift:e})");
    }

    let mut config = base.clone();
    config.density = FieldConfig::Tagged(TaggedField::File("density.csv".into()));
    config.reference = Some(ref_src.clone());
    config.obstacle = None;
    config.boundary = if domain.is_torus() {
        None
    } else {
        Some(FieldConfig::Tagged(TaggedField::Expression(ref_src)))
    };
    Ok(Manufactured {
        config,
        density,
        reference,
        shift,
    })
}

impl Manufactured {
    /// Writes `config.json`, `density.csv` and `reference.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_grid_csv(&self.density, &dir.join("density.csv"))?;
        write_grid_csv(&self.reference, &dir.join("reference.csv"))?;
        let path = dir.join("config.json");
        std::fs::write(&path, self.config.to_json_string()).map_err(|e| Error::io(&path, e))
    }
}
