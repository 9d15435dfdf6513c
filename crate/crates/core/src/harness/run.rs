use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::ProblemConfig;
use super::load::LoadedProblem;
use crate::error::{Error, Result};
use crate::grid::{format_value, write_grid_csv, GridFunction};
use crate::solver::{
    continuation_with, default_schedule, dirichlet_solve_with, solve_positive_with, SolveReport,
};

/// Dispatches on the problem: Dirichlet on the ball, continuation for `ε = 0` on
/// the torus, the direct solve otherwise.
pub fn solve_problem(l: &LoadedProblem) -> Result<SolveReport> {
    let s = l.stencil()?;
    let opts = l.solve_options();
    if !l.spec.domain.is_torus() {
        dirichlet_solve_with(&l.spec, &s, &opts)
    } else if l.spec.epsilon == 0.0 {
        let sched = l.config.solver.schedule.clone().unwrap_or_else(default_schedule);
        continuation_with(&l.spec, &s, &sched, &opts)
    } else {
        solve_positive_with(&l.spec, &s, &opts)
    }
}

/// Errors at or below this are reported as exact.
pub const EXACT_ERROR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub resolution: usize,
    /// Sup-norm error against the reference over interior points.
    pub error: f64,
    /// `log(e_prev / e) / log(r / r_prev)`; absent on the first row.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn is_exact(&self) -> bool {
        self.rows.iter().all(|r| r.error <= EXACT_ERROR)
    }

    /// CSV `resolution,error,order`. The order column is `exact` once errors reach
    /// round-off, and empty on the first row otherwise.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("resolution,error,order\n");
        for r in &self.rows {
            let order = if r.error <= EXACT_ERROR {
                "exact".to_string()
            } else {
                r.order.map(format_value).unwrap_or_default()
            };
            let _ = writeln!(s, "{},{},{}", r.resolution, format_value(r.error), order);
        }
        s
    }
}

/// Solves the config at each resolution and compares with its `reference`.
pub fn run_convergence(cfg: &ProblemConfig, resolutions: &[usize]) -> Result<ConvergenceTable> {
    if resolutions.len() < 2 {
        return Err(Error::invalid("convergence study needs at least two resolutions"));
    }
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("resolutions must be increasing"));
    }
    if cfg.reference.is_none() {
        return Err(Error::Config {
            pointer: "/reference".into(),
            msg: "convergence study needs a reference solution".into(),
        });
    }
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &res in resolutions {
        let l = cfg.with_resolution(res).build()?;
        let report = solve_problem(&l)?;
        let reference = l.reference.as_ref().expect("checked above");
        let interior = l.spec.domain.interior_points();
        let error = report.solution.max_abs_diff(reference, Some(&interior))?;
        let order = rows.last().map(|prev: &ConvergenceRow| {
            (prev.error / error).ln() / (res as f64 / prev.resolution as f64).ln()
        });
        rows.push(ConvergenceRow {
            resolution: res,
            error,
            order,
        });
    }
    Ok(ConvergenceTable { rows })
}

/// A 1-D slice through the grid along `axis`, with every other index fixed at
/// `index` (default: the middle of the axis).
#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    pub axis: usize,
    pub index: Option<usize>,
}

pub fn residual_history_csv(r: &SolveReport) -> String {
    let mut s = String::from("iter,residual\n");
    for (i, v) in r.residual_history.iter().enumerate() {
        let _ = writeln!(s, "{i},{}", format_value(*v));
    }
    s
}

pub fn continuation_csv(r: &SolveReport) -> Option<String> {
    let trace = r.continuation_trace.as_ref()?;
    let mut s = String::from("epsilon,sup_u,normalization\n");
    for st in trace {
        let _ = writeln!(
            s,
            "{},{},{}",
            format_value(st.epsilon),
            format_value(st.sup_u),
            format_value(st.normalization)
        );
    }
    Some(s)
}

/// Two whitespace-separated columns: coordinate along the axis and value.
pub fn slice_data(u: &GridFunction, slice: &Slice) -> Result<String> {
    let d = u.domain();
    if slice.axis >= d.real_dim() {
        return Err(Error::invalid(format!("slice axis {} out of range", slice.axis)));
    }
    let fixed = slice.index.unwrap_or(d.axis_len() / 2);
    if fixed >= d.axis_len() {
        return Err(Error::invalid(format!("slice index {fixed} out of range")));
    }
    let mut s = String::new();
    let mut c = vec![fixed; d.real_dim()];
    for i in 0..d.axis_len() {
        c[slice.axis] = i;
        let p = d.index(&c);
        let _ = writeln!(s, "{} {}", format_value(d.axis_coord(i)), format_value(u.get(p)));
    }
    Ok(s)
}

fn write(path: PathBuf, text: &str, out: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    out.push(path);
    Ok(())
}

/// Writes `solution.csv`, `residuals.csv`, `continuation.csv` (continuation runs)
/// and `slice_<axis>.dat` per requested slice; returns the written paths.
pub fn emit_report(report: &SolveReport, dir: &Path, slices: &[Slice]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    let sol = dir.join("solution.csv");
    write_grid_csv(&report.solution, &sol)?;
    out.push(sol);
    write(dir.join("residuals.csv"), &residual_history_csv(report), &mut out)?;
    if let Some(c) = continuation_csv(report) {
        write(dir.join("continuation.csv"), &c, &mut out)?;
    }
    for sl in slices {
        write(dir.join(format!("slice_{}.dat", sl.axis)), &slice_data(&report.solution, sl)?, &mut out)?;
    }
    Ok(out)
}
