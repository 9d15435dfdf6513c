//! Finite-difference Levi forms and complex Hessians.

use num_complex::Complex64;

use super::directions::Direction;
use super::domain::MAX_AXES;
use super::function::GridFunction;
use crate::error::{Error, Result};
use crate::hermitian::HermitianForm;

fn value_at(u: &GridFunction, p: usize, offset: &[i32]) -> Result<f64> {
    u.domain()
        .shift(p, offset)
        .map(|q| u.get(q))
        .ok_or_else(|| Error::StencilExitsDomain {
            point: p,
            offset: offset.to_vec(),
        })
}

/// `(u(x + he) − 2u(x) + u(x − he)) / h²` for an integer grid offset `e`.
pub fn second_difference(u: &GridFunction, p: usize, e: &[i32]) -> Result<f64> {
    let h = u.domain().spacing();
    let neg: Vec<i32> = e.iter().map(|x| -x).collect();
    let plus = value_at(u, p, e)?;
    let minus = value_at(u, p, &neg)?;
    Ok((plus - 2.0 * u.get(p) + minus) / (h * h))
}

/// `¼ (D²_{w̄} u + D²_{iw̄} u)`, which equals `w* u_{zz̄} w` on quadratics.
///
/// `w` is not normalized: the result scales like `|w|²`.
pub fn levi_form_along(u: &GridFunction, p: usize, w: &Direction) -> Result<f64> {
    let [v, r] = w.levi_offsets();
    let a = second_difference(u, p, &v)?;
    let b = second_difference(u, p, &r)?;
    Ok(0.25 * (a + b))
}

/// Real `2n × 2n` Hessian from 3-point and mixed central differences, row-major.
pub fn real_hessian(u: &GridFunction, p: usize) -> Result<Vec<f64>> {
    let m = u.domain().real_dim();
    let h = u.domain().spacing();
    let mut s = vec![0.0; m * m];
    let mut off = [0i32; MAX_AXES];
    for a in 0..m {
        off[a] = 1;
        s[a * m + a] = second_difference(u, p, &off[..m])?;
        off[a] = 0;
        for b in (a + 1)..m {
            let corner = |sa: i32, sb: i32| {
                let mut o = [0i32; MAX_AXES];
                o[a] = sa;
                o[b] = sb;
                value_at(u, p, &o[..m])
            };
            let mixed = (corner(1, 1)? + corner(-1, -1)? - corner(1, -1)? - corner(-1, 1)?)
                / (4.0 * h * h);
            s[a * m + b] = mixed;
            s[b * m + a] = mixed;
        }
    }
    Ok(s)
}

/// Complex Hessian `u_{z_j z̄_k}` of a real Hessian in the interleaved layout.
///
/// ```text
/// Q_jk = ¼ (S[xj,xk] + S[yj,yk]) + (i/4) (S[xj,yk] − S[yj,xk])
/// ```
pub fn complex_from_real_hessian(s: &[f64], n: usize) -> HermitianForm {
    let m = 2 * n;
    let at = |a: usize, b: usize| s[a * m + b];
    HermitianForm::from_fn(n, |j, k| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        Complex64::new(
            0.25 * (at(xj, xk) + at(yj, yk)),
            0.25 * (at(xj, yk) - at(yj, xk)),
        )
    })
}

/// The discrete complex Hessian at `p`; exact on real quadratics.
pub fn complex_hessian(u: &GridFunction, p: usize) -> Result<HermitianForm> {
    let s = real_hessian(u, p)?;
    Ok(complex_from_real_hessian(&s, u.domain().dim()))
}
