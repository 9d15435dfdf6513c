use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{format_value, GridFunction};

#[derive(Clone, Debug, PartialEq)]
pub struct DoublingRow {
    pub alpha: f64,
    pub m_alpha: f64,
    pub x: usize,
    pub y: usize,
    /// `α·d(x_α, y_α)²`.
    pub penalty: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoublingReport {
    pub rows: Vec<DoublingRow>,
    /// `M_α` at the largest `α`.
    pub final_gap: f64,
}

impl DoublingReport {
    /// CSV with header `alpha,M_alpha,x_idx,y_idx,penalty`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha,M_alpha,x_idx,y_idx,penalty\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                format_value(r.alpha),
                format_value(r.m_alpha),
                r.x,
                r.y,
                format_value(r.penalty)
            );
        }
        s
    }
}

/// `M_α = max_{x,y} [u_sub(x) − u_super(y) − ½ α d(x, y)²]` by brute force over all
/// pairs of stored points, for each `α` of an increasing schedule.
///
/// Ties are broken towards the lexicographically smallest `(x, y)`, so the result
/// does not depend on the number of worker threads.
pub fn comparison_diagnostic(
    u_sub: &GridFunction,
    u_super: &GridFunction,
    alphas: &[f64],
) -> Result<DoublingReport> {
    u_sub.check_same_domain(u_super)?;
    if alphas.is_empty() {
        return Err(Error::invalid("empty alpha schedule"));
    }
    if alphas.windows(2).any(|w| w[1] <= w[0]) || alphas[0] <= 0.0 {
        return Err(Error::invalid("alpha schedule must be positive and increasing"));
    }
    let d = u_sub.domain();
    let np = d.num_points();
    let (a, b) = (u_sub.values(), u_super.values());
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let best = (0..np)
            .into_par_iter()
            .map(|x| {
                let mut best = (f64::NEG_INFINITY, x, 0usize);
                for y in 0..np {
                    let v = a[x] - b[y] - 0.5 * alpha * d.distance2(x, y);
                    if v > best.0 {
                        best = (v, x, y);
                    }
                }
                best
            })
            .reduce(
                || (f64::NEG_INFINITY, usize::MAX, usize::MAX),
                |p, q| {
                    if q.0 > p.0 || (q.0 == p.0 && (q.1, q.2) < (p.1, p.2)) {
                        q
                    } else {
                        p
                    }
                },
            );
        rows.push(DoublingRow {
            alpha,
            m_alpha: best.0,
            x: best.1,
            y: best.2,
            penalty: alpha * d.distance2(best.1, best.2),
        });
    }
    let final_gap = rows.last().map(|r| r.m_alpha).unwrap_or(f64::NAN);
    Ok(DoublingReport { rows, final_gap })
}
