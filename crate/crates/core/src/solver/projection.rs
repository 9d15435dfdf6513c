use super::linear::{bicgstab, Csr};
use super::report::SolveStatus;
use super::scheme::SchemeGrid;
use super::stencil::StencilSet;
use crate::error::{Error, Result};
use crate::grid::{BackgroundField, DomainKind, DomainSpec, GridFunction};

#[derive(Clone, Debug)]
pub struct ProjectionReport {
    pub projection: GridFunction,
    pub status: SolveStatus,
    /// Policy-iteration steps plus fixed-point sweeps.
    pub iterations: usize,
    /// `max(ψ − T[ψ])⁺ / h²` before the feasibility correction, where `T` is the
    /// obstacle update.
    pub defect: f64,
    /// Coefficient of the final correction (`0` when none was needed).
    pub correction: f64,
}

/// Largest discrete ω-psh function below `obstacle` (level-1 directions).
///
/// The fixed point of `ψ ← min(φ, min_w [¼ Σ_arms ψ + h² w*ωw])` is computed by
/// policy iteration followed by sweeps of the same map until the change drops below
/// `tol·h²`. A last correction makes the output exactly discrete ω-psh: on the ball
/// `c(|x|² − max|x|²)` is added, on the torus the output is mixed with `min φ`
/// (needs `ω ≻ 0`). Ball collar values are held at the obstacle.
pub fn psh_projection(
    obstacle: &GridFunction,
    background: Option<&BackgroundField>,
    tol: f64,
    max_iter: usize,
) -> Result<ProjectionReport> {
    let d = obstacle.domain().clone();
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let s = StencilSet::new(d.dim(), 1)?;
    let g = SchemeGrid::new(&d, background, &s)?;
    let phi = obstacle.values();
    let h2 = g.h2;

    let mut psi = phi.to_vec();
    if is_fixed(&g, phi, &psi) {
        return Ok(ProjectionReport {
            projection: obstacle.clone(),
            status: SolveStatus::Converged,
            iterations: 0,
            defect: 0.0,
            correction: 0.0,
        });
    }

    let mut iterations = 0;
    let mut policy: Vec<usize> = Vec::new();
    let mut status = SolveStatus::MaxIter;
    while iterations < max_iter {
        let next = choose_policy(&g, phi, &psi);
        if next == policy {
            break;
        }
        policy = next;
        iterations += 1;
        let (a, b) = policy_system(&g, phi, &policy);
        let mut x: Vec<f64> = g.interior.iter().map(|&p| psi[p]).collect();
        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let atol = (1e-2 * tol * h2).max(1e-15 * bnorm);
        bicgstab(&a, &b, &mut x, atol, 50_000);
        if x.iter().any(|v| !v.is_finite()) {
            status = SolveStatus::Diverged;
            break;
        }
        for (k, &p) in g.interior.iter().enumerate() {
            psi[p] = x[k];
        }
    }

    if status != SolveStatus::Diverged {
        let mut change = f64::INFINITY;
        while iterations < max_iter.max(1) * 4 {
            let next = sweep(&g, phi, &psi);
            change = psi.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            psi = next;
            iterations += 1;
            if change <= tol * h2 {
                break;
            }
        }
        status = if change <= tol * h2 {
            SolveStatus::Converged
        } else {
            SolveStatus::MaxIter
        };
    }

    // ψ = T[previous] ≤ φ; measure how far it is from being a fixed point.
    let t = sweep(&g, phi, &psi);
    let defect = psi
        .iter()
        .zip(&t)
        .map(|(a, b)| a - b)
        .fold(0.0, f64::max);
    let mut correction = 0.0;
    if defect > 0.0 && status != SolveStatus::Diverged {
        correction = restore(&d, &g, background, phi, &mut psi, defect)?;
    }
    Ok(ProjectionReport {
        projection: GridFunction::new(d, psi)?,
        status,
        iterations,
        defect: defect / h2,
        correction,
    })
}

/// `T[ψ]`: obstacle at collar points, the min of obstacle and directional
/// averages at interior points.
fn sweep(g: &SchemeGrid, phi: &[f64], psi: &[f64]) -> Vec<f64> {
    let mut out = phi.to_vec();
    for (k, &p) in g.interior.iter().enumerate() {
        out[p] = phi[p].min(best_average(g, psi, k).0);
    }
    out
}

fn best_average(g: &SchemeGrid, psi: &[f64], k: usize) -> (f64, usize) {
    let mut best = (f64::INFINITY, 0);
    for d in 0..g.ndir {
        let a = &g.arms[(k * g.ndir + d) * 4..][..4];
        let v = 0.25 * (psi[a[0]] + psi[a[1]] + psi[a[2]] + psi[a[3]]) + g.h2 * g.bq[k * g.ndir + d];
        if v < best.0 {
            best = (v, d);
        }
    }
    best
}

fn is_fixed(g: &SchemeGrid, phi: &[f64], psi: &[f64]) -> bool {
    g.interior
        .iter()
        .enumerate()
        .all(|(k, &p)| psi[p] <= phi[p] && psi[p] <= best_average(g, psi, k).0)
}

/// Active piece at each interior point: a direction index, or `ndir` for the
/// obstacle (which wins ties).
fn choose_policy(g: &SchemeGrid, phi: &[f64], psi: &[f64]) -> Vec<usize> {
    (0..g.interior.len())
        .map(|k| {
            let (v, d) = best_average(g, psi, k);
            if phi[g.interior[k]] <= v {
                g.ndir
            } else {
                d
            }
        })
        .collect()
}

fn policy_system(g: &SchemeGrid, phi: &[f64], policy: &[usize]) -> (Csr, Vec<f64>) {
    let nu = g.interior.len();
    let mut a = Csr::with_capacity(nu, 5 * nu);
    let mut b = vec![0.0; nu];
    for (k, &p) in g.interior.iter().enumerate() {
        let d = policy[k];
        if d == g.ndir {
            a.push(k, 1.0);
            b[k] = phi[p];
        } else {
            let mut diag = 1.0;
            let mut rhs = g.h2 * g.bq[k * g.ndir + d];
            for &q in &g.arms[(k * g.ndir + d) * 4..][..4] {
                match g.unknown[q] {
                    usize::MAX => rhs += 0.25 * phi[q],
                    j if j == k => diag -= 0.25,
                    j => a.push(j, -0.25),
                }
            }
            a.push(k, diag);
            b[k] = rhs;
        }
        a.end_row();
    }
    (a, b)
}

/// Turns a near-fixed point `ψ ≤ φ` with `ψ − T[ψ] ≤ defect` into an exact one.
fn restore(
    d: &DomainSpec,
    g: &SchemeGrid,
    background: Option<&BackgroundField>,
    phi: &[f64],
    psi: &mut [f64],
    defect: f64,
) -> Result<f64> {
    let base = psi.to_vec();
    match d.kind() {
        DomainKind::Ball { .. } => {
            let r2: Vec<f64> = (0..d.num_points())
                .map(|p| d.position(p).iter().map(|x| x * x).sum())
                .collect();
            let rmax = r2.iter().copied().fold(0.0, f64::max);
            let mut c = 2.0 * defect / g.h2;
            for _ in 0..60 {
                for p in 0..psi.len() {
                    psi[p] = base[p] + c * (r2[p] - rmax);
                }
                if is_fixed(g, phi, psi) {
                    return Ok(c);
                }
                c *= 2.0;
            }
            psi.copy_from_slice(&base);
            Ok(0.0)
        }
        DomainKind::Torus { .. } => {
            let delta = background.map_or(0.0, |b| b.min_eigenvalue());
            if delta <= 0.0 {
                return Ok(0.0);
            }
            let floor = phi.iter().copied().fold(f64::INFINITY, f64::min);
            let mut t = (2.0 * defect / (g.h2 * delta)).min(1.0);
            for _ in 0..60 {
                for p in 0..psi.len() {
                    psi[p] = (1.0 - t) * base[p] + t * floor;
                }
                if is_fixed(g, phi, psi) {
                    return Ok(t);
                }
                if t >= 1.0 {
                    break;
                }
                t = (2.0 * t).min(1.0);
            }
            psi.copy_from_slice(&base);
            Ok(0.0)
        }
    }
}
