//! `cmavisc`: solve, certify and compare grid solutions of complex Monge–Ampère
//! equations.
//!
//! Exit codes: 0 when the run converged and every certification passed, 2 when a
//! certification failed, 1 on usage or config errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cmavisc::grid::{parse_grid_csv, read_grid_csv, write_grid_csv, DomainSpec, GridFunction};
use cmavisc::harness::{
    emit_report, manufacture, run_convergence, LoadedProblem, ProblemConfig, Slice,
};
use cmavisc::solver::{
    continuation_with, default_schedule, dirichlet_solve_with, psh_projection, scheme_operator,
    solve_positive_with, SolveReport, SolveStatus,
};
use cmavisc::viscosity::{
    comparison_diagnostic, discrete_psh_test, max_interior, min_interior, subsolution_residual,
    supersolution_residual,
};

#[derive(Parser, Debug)]
#[command(name = "cmavisc", version, about = "Monotone grid solvers for (ω + dd^c φ)^n = e^{εφ} W")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Overrides the solver tolerance of the config.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Overrides the iteration cap of the config.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Overrides the stencil refinement K of the config.
    #[arg(long, global = true)]
    stencil_k: Option<usize>,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Direct solve of an ε > 0 torus problem.
    Solve {
        config: PathBuf,
        /// Axis for a 1-D slice file (repeatable).
        #[arg(long = "slice")]
        slices: Vec<usize>,
    },
    /// ε ↓ 0 continuation for an ε = 0 torus problem.
    Continue {
        config: PathBuf,
        #[arg(long = "slice")]
        slices: Vec<usize>,
    },
    /// Dirichlet problem on the ball.
    Dirichlet {
        config: PathBuf,
        #[arg(long = "slice")]
        slices: Vec<usize>,
    },
    /// Largest discrete ω-psh function below the config's obstacle.
    Project { config: PathBuf },
    /// Certifies a grid function against the config's equation.
    Check {
        config: PathBuf,
        #[arg(long)]
        function: PathBuf,
        /// Which certification decides the exit code.
        #[arg(long = "as", value_enum, default_value = "solution")]
        role: Role,
    },
    /// Doubling-of-variables diagnostic `M_α` for a sub/supersolution pair.
    Compare {
        sub: PathBuf,
        sup: PathBuf,
        /// Config supplying the domain; otherwise a torus of side 1 is inferred.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
        alphas: Vec<f64>,
    },
    /// Writes a config whose discrete solution is the given potential.
    Manufacture {
        config: PathBuf,
        #[arg(long)]
        phistar: String,
    },
    /// Convergence study against the config's reference solution.
    Converge {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        resolutions: Vec<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Role {
    Sub,
    Super,
    Solution,
}

fn load(path: &Path, c: &Common) -> Result<ProblemConfig> {
    let mut cfg = ProblemConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(t) = c.tol {
        cfg.solver.tol = t;
    }
    if let Some(m) = c.max_iter {
        cfg.solver.max_iter = m;
    }
    if let Some(k) = c.stencil_k {
        cfg.solver.stencil_k = k;
    }
    Ok(cfg)
}

fn print_report(r: &SolveReport) {
    println!("status: {}", r.status.as_str());
    println!("iterations: {}", r.iterations);
    println!("final residual: {:e}", r.final_residual());
    let c = &r.certification;
    println!("scheme residual: {:e} (threshold {:e})", c.scheme_residual, c.threshold);
    println!("subsolution residual max F: {:e}", c.subsolution_residual);
    println!("supersolution residual min F+: {:e}", c.supersolution_residual);
    if let Some(trace) = &r.continuation_trace {
        for st in trace {
            println!(
                "epsilon {:e}: sup|u| {:e}, normalization {:e}, mass {:e}, iterations {}",
                st.epsilon, st.sup_u, st.normalization, st.mass, st.iterations
            );
        }
    }
}

fn finish_solve(r: SolveReport, out: &Path, slices: &[usize]) -> Result<u8> {
    let slices: Vec<Slice> = slices.iter().map(|&axis| Slice { axis, index: None }).collect();
    emit_report(&r, out, &slices)?;
    print_report(&r);
    Ok(if r.is_certified() { 0 } else { 2 })
}

fn build(cfg: &ProblemConfig) -> Result<(LoadedProblem, cmavisc::solver::StencilSet)> {
    let l = cfg.build()?;
    let s = l.stencil()?;
    Ok((l, s))
}

fn infer_domain(path: &Path) -> Result<DomainSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw = parse_grid_csv(&text)?;
    if raw.real_dim % 2 != 0 {
        bail!("{}: odd number of axes", path.display());
    }
    Ok(DomainSpec::torus(raw.real_dim / 2, raw.axis_len, 1.0)?)
}

fn run(cli: Cli) -> Result<u8> {
    let c = &cli.common;
    if let Some(w) = c.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| anyhow!("cannot configure {w} workers: {e}"))?;
    }
    match &cli.command {
        Command::Solve { config, slices } => {
            let (l, s) = build(&load(config, c)?)?;
            let r = solve_positive_with(&l.spec, &s, &l.solve_options())?;
            finish_solve(r, &c.out, slices)
        }
        Command::Continue { config, slices } => {
            let (l, s) = build(&load(config, c)?)?;
            let sched = l.config.solver.schedule.clone().unwrap_or_else(default_schedule);
            let r = continuation_with(&l.spec, &s, &sched, &l.solve_options())?;
            finish_solve(r, &c.out, slices)
        }
        Command::Dirichlet { config, slices } => {
            let (l, s) = build(&load(config, c)?)?;
            let r = dirichlet_solve_with(&l.spec, &s, &l.solve_options())?;
            finish_solve(r, &c.out, slices)
        }
        Command::Project { config } => {
            let cfg = load(config, c)?;
            let l = cfg.build()?;
            let obstacle = l
                .obstacle
                .as_ref()
                .ok_or_else(|| anyhow!("config has no \"obstacle\" field"))?;
            let r = psh_projection(obstacle, Some(&l.spec.background), cfg.solver.tol, cfg.solver.max_iter)?;
            std::fs::create_dir_all(&c.out)?;
            write_grid_csv(&r.projection, &c.out.join("projection.csv"))?;
            let psh = discrete_psh_test(&r.projection, Some(&l.spec.background))?;
            println!("status: {}", r.status.as_str());
            println!("iterations: {}", r.iterations);
            println!("defect: {:e}", r.defect);
            println!("psh test: {}", if psh.passed { "pass" } else { "fail" });
            Ok(if r.status == SolveStatus::Converged && psh.passed { 0 } else { 2 })
        }
        Command::Check { config, function, role } => {
            let cfg = load(config, c)?;
            let (l, s) = build(&cfg)?;
            let p = &l.spec;
            let u = read_grid_csv(function, &p.domain)?;
            let tol = c.tol.unwrap_or_else(|| p.residual_tol());
            let sub = max_interior(&subsolution_residual(&u, p)?);
            let sup = min_interior(&supersolution_residual(&u, p)?);
            let scheme = scheme_operator(&u, p, &s)?;
            let sres = max_interior(&scheme.map(f64::abs));
            let psh = discrete_psh_test(&u, Some(&p.background))?;
            println!("subsolution residual max F: {sub:e}");
            println!("supersolution residual min F+: {sup:e}");
            println!("scheme residual: {sres:e}");
            println!("omega-psh test: {} ({} violations)", if psh.passed { "pass" } else { "fail" }, psh.violations.len());
            println!("tolerance: {tol:e}");
            let ok = match role {
                Role::Sub => sub <= tol,
                Role::Super => sup >= -tol,
                Role::Solution => sres <= 10.0 * tol,
            };
            println!("certified: {}", if ok { "yes" } else { "no" });
            Ok(if ok { 0 } else { 2 })
        }
        Command::Compare { sub, sup, config, alphas } => {
            let domain = match config {
                Some(cfg) => build(&load(cfg, c)?)?.0.spec.domain,
                None => infer_domain(sub)?,
            };
            let u: GridFunction = read_grid_csv(sub, &domain)?;
            let v = read_grid_csv(sup, &domain)?;
            let r = comparison_diagnostic(&u, &v, alphas)?;
            std::fs::create_dir_all(&c.out)?;
            let csv = r.to_csv();
            std::fs::write(c.out.join("doubling.csv"), &csv)?;
            print!("{csv}");
            Ok(0)
        }
        Command::Manufacture { config, phistar } => {
            let cfg = load(config, c)?;
            let m = manufacture(phistar, &cfg)?;
            m.write(&c.out)?;
            println!("wrote {}", c.out.join("config.json").display());
            if m.shift != 0.0 {
                println!("normalization shift: {:e}", m.shift);
            }
            Ok(0)
        }
        Command::Converge { config, resolutions } => {
            let cfg = load(config, c)?;
            let t = run_convergence(&cfg, resolutions)?;
            std::fs::create_dir_all(&c.out)?;
            let csv = t.to_csv();
            std::fs::write(c.out.join("convergence.csv"), &csv)?;
            print!("{csv}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
