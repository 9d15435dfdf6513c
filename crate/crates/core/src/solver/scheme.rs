use rayon::prelude::*;

use super::stencil::StencilSet;
use crate::bellman::MemberRef;
use crate::error::{Error, Result};
use crate::grid::{BackgroundField, DomainSpec, GridFunction};
use crate::viscosity::ProblemSpec;

/// Neighbor tables and background values of one (domain, ω, stencil) triple.
///
/// Only interior points carry equations; on the ball, collar points are data.
pub(crate) struct SchemeGrid {
    pub h2: f64,
    pub ndir: usize,
    pub interior: Vec<usize>,
    /// Position of each point in `interior`, or `usize::MAX` for collar points.
    pub unknown: Vec<usize>,
    /// `arms[(k·ndir + d)·4 + a]`: the four neighbors of interior point `k` along
    /// direction `d` (`+v, −v, +iv, −iv`).
    pub arms: Vec<usize>,
    /// `bq[k·ndir + d] = w_d* ω w_d` at interior point `k`.
    pub bq: Vec<f64>,
}

impl SchemeGrid {
    pub fn new(domain: &DomainSpec, background: Option<&BackgroundField>, s: &StencilSet) -> Result<Self> {
        if s.dim() != domain.dim() {
            return Err(Error::DomainMismatch(format!(
                "stencil for n = {} on a grid with n = {}",
                s.dim(),
                domain.dim()
            )));
        }
        if let Some(b) = background {
            if b.domain() != domain {
                return Err(Error::DomainMismatch("background field".into()));
            }
        }
        let dirs = s.directions();
        let ndir = dirs.len();
        let offsets: Vec<[Vec<i32>; 4]> = dirs
            .iter()
            .map(|w| {
                let [v, r] = w.levi_offsets();
                let nv = v.iter().map(|x| -x).collect();
                let nr = r.iter().map(|x| -x).collect();
                [v, nv, r, nr]
            })
            .collect();
        let complex: Vec<_> = dirs.iter().map(|w| w.as_complex()).collect();
        let interior = domain.interior_points();
        let mut unknown = vec![usize::MAX; domain.num_points()];
        for (k, &p) in interior.iter().enumerate() {
            unknown[p] = k;
        }
        let mut arms = Vec::with_capacity(interior.len() * ndir * 4);
        let mut bq = Vec::with_capacity(interior.len() * ndir);
        for &p in &interior {
            for (d, offs) in offsets.iter().enumerate() {
                for o in offs {
                    let q = domain.shift(p, o).ok_or_else(|| Error::StencilExitsDomain {
                        point: p,
                        offset: o.clone(),
                    })?;
                    arms.push(q);
                }
                bq.push(background.map_or(0.0, |b| b.at(p).quad(&complex[d])));
            }
        }
        let h = domain.spacing();
        Ok(SchemeGrid {
            h2: h * h,
            ndir,
            interior,
            unknown,
            arms,
            bq,
        })
    }

    /// `L_{w_d} u + w_d*ω w_d` for every direction at interior point `k`.
    pub fn levi_values(&self, u: &[f64], k: usize, out: &mut [f64]) {
        let p = self.interior[k];
        let c = 4.0 * u[p];
        let scale = 0.25 / self.h2;
        for d in 0..self.ndir {
            let a = &self.arms[(k * self.ndir + d) * 4..][..4];
            out[d] = (u[a[0]] + u[a[1]] + u[a[2]] + u[a[3]] - c) * scale + self.bq[k * self.ndir + d];
        }
    }
}

/// Value of the scheme at every interior point together with the minimizing member.
pub(crate) fn evaluate(
    g: &SchemeGrid,
    s: &StencilSet,
    u: &[f64],
    rhs: impl Fn(usize, f64) -> f64 + Sync,
) -> Vec<(f64, MemberRef)> {
    let fam = s.family();
    (0..g.interior.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; g.ndir],
            |buf, k| {
                g.levi_values(u, k, buf);
                let (b, m) = fam.minimize(buf);
                let p = g.interior[k];
                (b - rhs(p, u[p]), m)
            },
        )
        .collect()
}

/// `(e^{εu}W)^{1/n}` at point `p` and its derivative in `u`.
pub(crate) fn rhs_and_derivative(p: &ProblemSpec, x: usize, u: f64) -> (f64, f64) {
    let n = p.n() as f64;
    let v = ((p.epsilon * u).exp() * p.density.at(x)).powf(1.0 / n);
    (v, p.epsilon / n * v)
}

/// `S[u](x) = min_H Σ_m λ_m (L_{w_m} u(x) + w_m*ω(x) w_m) − (e^{εu(x)} W(x))^{1/n}` at
/// interior points; collar points of the ball carry `0`.
///
/// `S[u] ≥ 0` is the discrete subsolution inequality.
pub fn scheme_operator(u: &GridFunction, p: &ProblemSpec, s: &StencilSet) -> Result<GridFunction> {
    if u.domain() != &p.domain {
        return Err(Error::DomainMismatch("function and problem".into()));
    }
    let g = SchemeGrid::new(&p.domain, Some(&p.background), s)?;
    let vals = evaluate(&g, s, u.values(), |x, ux| rhs_and_derivative(p, x, ux).0);
    let mut out = vec![0.0; p.domain.num_points()];
    for (k, (v, _)) in vals.into_iter().enumerate() {
        out[g.interior[k]] = v;
    }
    Ok(GridFunction::from_values_unchecked(p.domain.clone(), out))
}
