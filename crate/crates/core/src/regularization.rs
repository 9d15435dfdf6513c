//! Sup/inf-convolution, mollification and the smoothed maximum.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{DomainSpec, GridFunction, MAX_AXES};

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("delta must be positive, got {delta}")))
    }
}

/// Per-axis displacement `|i − j|·h`, minimum-image on the torus.
fn axis_gap(domain: &DomainSpec, i: usize, j: usize) -> f64 {
    let mut d = i.abs_diff(j);
    if domain.is_torus() {
        d = d.min(domain.axis_len() - d);
    }
    d as f64 * domain.spacing()
}

/// `u^δ(x) = max_y [u(y) − d(x, y)² / (2δ²)]` over all stored points `y`.
///
/// Since `d²` is a sum of per-axis terms the maximum is computed as a sequence of
/// one-dimensional transforms, one per axis; the result equals the brute-force
/// maximum exactly (see [`sup_convolution_brute`]).
pub fn sup_convolution(u: &GridFunction, delta: f64) -> Result<GridFunction> {
    check_delta(delta)?;
    let d = u.domain();
    let len = d.axis_len();
    let m = d.real_dim();
    let c = 1.0 / (2.0 * delta * delta);
    let pen: Vec<f64> = (0..len * len)
        .map(|k| {
            let g = axis_gap(d, k / len, k % len);
            c * g * g
        })
        .collect();

    let mut cur = u.values().to_vec();
    for axis in 0..m {
        let stride = len.pow((m - 1 - axis) as u32);
        let next: Vec<f64> = (0..cur.len())
            .into_par_iter()
            .map(|p| {
                let i = (p / stride) % len;
                let base = p - i * stride;
                (0..len)
                    .map(|j| cur[base + j * stride] - pen[i * len + j])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        cur = next;
    }
    Ok(GridFunction::from_values_unchecked(d.clone(), cur))
}

/// Direct evaluation of the definition, `O(N²)`.
pub fn sup_convolution_brute(u: &GridFunction, delta: f64) -> Result<GridFunction> {
    check_delta(delta)?;
    let d = u.domain();
    let c = 1.0 / (2.0 * delta * delta);
    let v = u.values();
    let out = (0..d.num_points())
        .into_par_iter()
        .map(|x| {
            (0..d.num_points())
                .map(|y| v[y] - c * d.distance2(x, y))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(GridFunction::from_values_unchecked(d.clone(), out))
}

/// `u_δ(x) = min_y [u(y) + d(x, y)² / (2δ²)] = −((−u)^δ)(x)`.
pub fn inf_convolution(u: &GridFunction, delta: f64) -> Result<GridFunction> {
    let neg = u.map(|v| -v);
    Ok(sup_convolution(&neg, delta)?.map(|v| -v))
}

/// The constant `A = ⌈√(2·osc u)⌉ + 1`, which satisfies `A² > 2·osc u`.
pub fn window_constant(u: &GridFunction) -> f64 {
    (2.0 * u.oscillation()).sqrt().ceil() + 1.0
}

/// Points of the shrunken domain `{x interior : dist(x, ∂Ω) > radius}` (all points on
/// the torus).
pub fn shrunken_points(domain: &DomainSpec, radius: f64) -> Vec<usize> {
    domain
        .interior_points()
        .into_iter()
        .filter(|&p| domain.boundary_distance(p) > radius)
        .collect()
}

/// Region where `u^δ` is a faithful sup-convolution: distance `> A·δ` from the
/// sphere, so every maximizer `y` stays inside the ball.
pub fn sup_convolution_region(u: &GridFunction, delta: f64) -> Vec<usize> {
    shrunken_points(u.domain(), window_constant(u) * delta)
}

fn bump(r2: f64) -> f64 {
    if r2 < 1.0 {
        (-1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

/// Convolution with the normalized bump `exp(−1/(1 − |s/ε|²))` sampled at grid
/// offsets.
///
/// On the ball only points at distance `> eps` from the sphere are smoothed; the
/// others keep their values.
pub fn mollify(u: &GridFunction, eps: f64) -> Result<GridFunction> {
    let d = u.domain();
    let h = d.spacing();
    if !(eps >= h) {
        return Err(Error::KernelUnderResolved { eps, h });
    }
    let m = d.real_dim();
    let reach = (eps / h).floor() as i32;
    let mut kernel: Vec<([i32; MAX_AXES], f64)> = Vec::new();
    let side = 2 * reach + 1;
    for k in 0..(side as usize).pow(m as u32) {
        let mut off = [0i32; MAX_AXES];
        let mut r = k;
        for a in (0..m).rev() {
            off[a] = (r % side as usize) as i32 - reach;
            r /= side as usize;
        }
        let r2: f64 = off[..m].iter().map(|&o| (o as f64 * h / eps).powi(2)).sum();
        let w = bump(r2);
        if w > 0.0 {
            kernel.push((off, w));
        }
    }
    let total: f64 = kernel.iter().map(|(_, w)| w).sum();
    for k in &mut kernel {
        k.1 /= total;
    }

    let targets: Vec<bool> = if d.is_torus() {
        vec![true; d.num_points()]
    } else {
        let mut t = vec![false; d.num_points()];
        for p in shrunken_points(d, eps) {
            t[p] = true;
        }
        t
    };
    let v = u.values();
    let out = (0..d.num_points())
        .into_par_iter()
        .map(|p| {
            if !targets[p] {
                return v[p];
            }
            kernel
                .iter()
                .map(|(off, w)| w * v[d.shift(p, &off[..m]).expect("kernel inside domain")])
                .sum()
        })
        .collect();
    Ok(GridFunction::from_values_unchecked(d.clone(), out))
}

/// `t·F(t) − t/2 − M(t)` for the kernel `ρ(s) = (35/32)(1 − s²)³` on `[−1, 1]`,
/// where `F = ∫ρ` and `M = ∫sρ` from `−1`. Equals `|t|/2` for `|t| ≥ 1` and is
/// strictly larger inside.
fn smoothed_half_abs(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        return 0.5 * t.abs();
    }
    let t2 = t * t;
    let p = 35.0 / 32.0 * t * (1.0 - t2 + 0.6 * t2 * t2 - t2 * t2 * t2 / 7.0);
    let q = 1.0 - t2;
    t * p + 35.0 / 256.0 * q * q * q * q
}

/// A symmetric smooth maximum: `max(a, b)` exactly when `|a − b| ≥ η`, strictly
/// above `max(a, b)` otherwise.
pub fn smooth_max(a: f64, b: f64, eta: f64) -> f64 {
    if (a - b).abs() >= eta {
        return a.max(b);
    }
    0.5 * (a + b) + eta * smoothed_half_abs((a - b) / eta)
}
