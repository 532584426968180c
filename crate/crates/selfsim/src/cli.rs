//! Argument parsing and subcommand dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use selfsim_core::boundary::{boundary_layer_check, solve_boundary, BoundaryData};
use selfsim_core::eigen::{
    admissibility_check, generalized_eigen, lax_equivalence, perturbation_scaling, transformed_diffusion,
    two_by_two_closed_form,
};
use selfsim_core::limit::{assemble_sweep, detect_jumps, JumpReport, JUMP_FACTOR};
use selfsim_core::linalg::Matrix;
use selfsim_core::nsystem::solve_nsystem;
use selfsim_core::oracle::{evolve, self_similar_compare, OracleConfig};
use selfsim_core::riemann::solve_profile;
use selfsim_core::{SelfSimilarSolution, SolverConfig};

use crate::config::{ConfigError, RunConfig};
use crate::output::{gnuplot, jnum, num, OutDir};
use crate::{check, system, Failure};

#[derive(Debug, Parser)]
#[command(
    name = "selfsim",
    version,
    about = "Self-similar viscous and capillary Riemann profiles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Riemann profile on the line.
    Solve(RunArgs),
    /// Profiles for a decreasing list of eps, with distances and jumps.
    Sweep(RunArgs),
    /// Boundary Riemann problem on the half line.
    Boundary(RunArgs),
    /// Generalized eigenstructure report for a system file.
    Eigen(SystemArgs),
    /// Small-amplitude boundary profile of an N-system file.
    Nsystem(SystemArgs),
    /// Time-dependent run compared against the self-similar profile.
    Oracle(RunArgs),
    /// Built-in invariant suite.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// linear, hardening, cubic or custom.
    #[arg(long)]
    pub law: Option<String>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub params: Option<Vec<f64>>,
    #[arg(long)]
    pub table_file: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub vl: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub wl: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub vr: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub wr: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub wb: Option<f64>,
    /// One value, or a comma-separated decreasing list for `sweep`.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Excision half-width.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long = "L")]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub damping: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub dump_measures: bool,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long = "X")]
    pub domain: Option<f64>,
    #[arg(long)]
    pub cells: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    /// TOML system file.
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long = "L")]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Also write the table as CSV here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Single,
    Sweep,
}

/// File values first, then flags.
pub fn resolve(args: &RunArgs, sweep: bool) -> Result<RunConfig, ConfigError> {
    let mode = if sweep { Mode::Sweep } else { Mode::Single };
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let l = &mut cfg.law;
    if let Some(k) = &args.law {
        l.kind = k.clone();
    }
    if args.c0.is_some() {
        l.c0 = args.c0;
    }
    if let Some(p) = &args.params {
        l.params = p.clone();
    }
    if args.table_file.is_some() {
        l.table_file = args.table_file.clone();
    }
    let s = &mut cfg.solver;
    for (flag, slot) in [
        (args.vl, &mut s.vl),
        (args.wl, &mut s.wl),
        (args.vr, &mut s.vr),
        (args.wr, &mut s.wr),
        (args.wb, &mut s.wb),
        (args.delta, &mut s.delta),
        (args.half_width, &mut s.half_width),
        (args.tol, &mut s.tol),
        (args.damping, &mut s.damping),
    ] {
        if let Some(x) = flag {
            *slot = x;
        }
    }
    if let Some(g) = args.grid {
        s.grid = g;
    }
    if let Some(m) = args.max_iter {
        s.max_iter = m;
    }
    match (&args.eps, mode) {
        (Some(list), Mode::Sweep) => cfg.sweep.eps = list.clone(),
        (Some(list), Mode::Single) if list.len() == 1 => cfg.solver.eps = list[0],
        (Some(_), Mode::Single) => return Err(ConfigError::new("--eps takes a single value outside sweep")),
        (None, _) => {}
    }
    if let Some(g) = args.gamma {
        match mode {
            Mode::Sweep => cfg.sweep.gamma = g,
            Mode::Single => cfg.solver.gamma = g,
        }
    }
    if let Some(j) = args.jobs {
        cfg.sweep.jobs = j;
    }
    if let Some(r) = args.r0 {
        cfg.sweep.r0 = r;
        cfg.oracle.r0 = r;
    }
    if let Some(d) = &args.out_dir {
        cfg.output.out_dir = d.clone();
    }
    if args.dump_measures {
        cfg.output.dump_measures = true;
    }
    let o = &mut cfg.oracle;
    if let Some(t) = args.t_final {
        o.t_final = t;
    }
    if let Some(c) = args.cfl {
        o.cfl = c;
    }
    if let Some(x) = args.domain {
        o.half_width = x;
    }
    if let Some(c) = args.cells {
        o.cells = c;
    }
    Ok(cfg)
}

pub fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve(a) => solve(&resolve(&a, false)?),
        Command::Sweep(a) => sweep(&resolve(&a, true)?),
        Command::Boundary(a) => boundary(&resolve(&a, false)?),
        Command::Oracle(a) => oracle(&resolve(&a, false)?),
        Command::Eigen(a) => eigen(&a),
        Command::Nsystem(a) => nsystem(&a),
        Command::Check(a) => check::run_suite(a.out_dir.as_deref()),
    }
}

fn solution_summary(s: &SelfSimilarSolution) -> serde_json::Value {
    json!({
        "branch": s.branch.as_str(),
        "w_star": jnum(s.w_star),
        "v_star": jnum(s.v_star),
        "tv_w": jnum(s.tv_w),
        "tv_v": jnum(s.tv_v),
        "weighted_tv_w": jnum(s.weighted_tv_w),
        "near_axis_sup": jnum(s.near_axis_sup),
        "conservation_defect": jnum(s.conservation_defect),
        "residual_ode": jnum(s.residual_ode),
        "fixed_point_residual": jnum(s.fixed_point_residual),
        "iterations": s.iterations,
        "converged": s.converged,
        "final_damping": jnum(s.final_damping),
        "rho_minus": jnum(s.rho_minus()),
        "rho_plus": jnum(s.rho_plus()),
        "denominator_D": jnum(s.denominator()),
        "lambda_min": jnum(s.lambda_min),
        "lambda_max": jnum(s.lambda_max),
        "phi_error_estimate": s.phi_error_estimate.map(jnum),
        "domain_ok": s.domain_ok,
    })
}

fn blanks(n: usize) -> Vec<String> {
    vec![String::new(); n]
}

const PROFILE_PLOT: &[(usize, &str)] = &[(2, "w"), (3, "v")];

fn solve(cfg: &RunConfig) -> Result<(), Failure> {
    let law = cfg.stress_law()?;
    let sol = solve_profile(&law, &cfg.solver_config(), &cfg.riemann_data())?;
    let out = OutDir::create(&cfg.output.out_dir)?;
    let (pm, pp) = sol.nodal_measures();
    out.columns(
        "profile.csv",
        &["y", "w", "v", "phi_minus", "phi_plus"],
        &[sol.grid.nodes(), &sol.grid.w, &sol.grid.v, &pm, &pp],
    )?;
    if cfg.output.dump_measures {
        for (m, name) in [(&sol.minus, "measure_minus.csv"), (&sol.plus, "measure_plus.csv")] {
            out.columns(
                name,
                &["y", "exponent", "density"],
                &[&m.support_nodes, &m.exponent, &m.density],
            )?;
        }
    }
    let mut summary = solution_summary(&sol);
    summary["config"] = serde_json::to_value(cfg).expect("config serializes");
    out.json("summary.json", &summary)?;
    out.text(
        "plot.gp",
        &gnuplot("profile.png", "y", &[("profile.csv", PROFILE_PLOT)], false),
    )?;
    println!("w_star = {}  iterations = {}", num(sol.w_star), sol.iterations);
    Ok(())
}

fn boundary(cfg: &RunConfig) -> Result<(), Failure> {
    let law = cfg.stress_law()?;
    let s = &cfg.solver;
    let sol = solve_boundary(&law, &cfg.solver_config(), &BoundaryData::new(s.wb, s.vr, s.wr))?;
    let out = OutDir::create(&cfg.output.out_dir)?;
    let phi = sol.nodal_measure();
    out.columns(
        "profile.csv",
        &["y", "w", "v", "phi_plus"],
        &[sol.grid.nodes(), &sol.grid.w, &sol.grid.v, &phi],
    )?;
    if cfg.output.dump_measures {
        let m = &sol.measure;
        out.columns(
            "measure_plus.csv",
            &["y", "exponent", "density"],
            &[&m.support_nodes, &m.exponent, &m.density],
        )?;
    }
    let layer = boundary_layer_check(&sol);
    let summary = json!({
        "v0_trace": jnum(sol.v0_trace),
        "tv_w": jnum(sol.tv_w),
        "tv_v": jnum(sol.tv_v),
        "rho_plus": jnum(sol.measure.rho),
        "lambda_min": jnum(sol.lambda_min),
        "lambda_max": jnum(sol.lambda_max),
        "iterations": sol.iterations,
        "fixed_point_residual": jnum(sol.fixed_point_residual),
        "phi_error_estimate": sol.phi_error_estimate.map(jnum),
        "layer": format!("{layer:?}"),
        "config": cfg,
    });
    out.json("summary.json", &summary)?;
    out.text(
        "plot.gp",
        &gnuplot("profile.png", "y", &[("profile.csv", PROFILE_PLOT)], false),
    )?;
    println!("v0_trace = {}", num(sol.v0_trace));
    Ok(())
}

fn jump_cells(report: &Result<JumpReport, selfsim_core::Error>, slots: usize) -> Vec<String> {
    let mut cells = Vec::new();
    match report {
        Ok(r) => {
            cells.push(r.jumps.len().to_string());
            cells.push(String::new());
            for k in 0..slots {
                match r.jumps.get(k) {
                    Some(j) => {
                        for x in [j.s, j.w_minus, j.w_plus, j.v_minus, j.v_plus, j.rh_w, j.rh_v] {
                            cells.push(num(x));
                        }
                        cells.push(j.classification.as_str().to_string());
                    }
                    None => cells.extend(blanks(8)),
                }
            }
        }
        Err(e) => {
            cells.push(String::new());
            cells.push(e.name().to_string());
            cells.extend(blanks(8 * slots));
        }
    }
    cells
}

fn sweep(cfg: &RunConfig) -> Result<(), Failure> {
    let law = cfg.stress_law()?;
    let sw = &cfg.sweep;
    if sw.eps.is_empty() || sw.eps.windows(2).any(|p| p[1] >= p[0]) {
        return Err(ConfigError::new("sweep.eps must be a non-empty strictly decreasing list").into());
    }
    if sw.jobs == 0 {
        return Err(ConfigError::new("sweep.jobs must be at least 1").into());
    }
    let base = cfg.solver_config();
    let data = cfg.riemann_data();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sw.jobs)
        .build()
        .map_err(std::io::Error::other)?;
    let results: Vec<_> = pool.install(|| {
        sw.eps
            .par_iter()
            .map(|&eps| {
                let c = SolverConfig {
                    eps,
                    gamma: sw.gamma,
                    ..base
                };
                solve_profile(&law, &c, &data)
            })
            .collect()
    });
    let mut solutions = Vec::new();
    let mut failure = None;
    for (eps, r) in sw.eps.iter().zip(results) {
        match r {
            Ok(s) => solutions.push(s),
            Err(e) => {
                failure = Some((*eps, e));
                break;
            }
        }
    }
    let report = assemble_sweep(&law, &data, solutions, sw.r0, failure);
    let out = OutDir::create(&cfg.output.out_dir)?;

    let jumps: Vec<_> = report
        .solutions
        .iter()
        .map(|s| detect_jumps(s, &law, JUMP_FACTOR))
        .collect();
    let slots = jumps
        .iter()
        .map(|j| j.as_ref().map_or(0, |r| r.jumps.len()))
        .max()
        .unwrap_or(0);
    let mut header: Vec<String> = [
        "eps",
        "gamma",
        "delta",
        "w_star",
        "tv_w",
        "tv_v",
        "weighted_tv",
        "iterations",
        "n_jumps",
        "jump_error",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for k in 0..slots {
        for f in ["s", "w_minus", "w_plus", "v_minus", "v_plus", "rh_w", "rh_v", "class"] {
            header.push(format!("jump{k}_{f}"));
        }
    }
    let mut rows = Vec::new();
    let mut plots = Vec::new();
    for (k, (s, j)) in report.solutions.iter().zip(&jumps).enumerate() {
        let mut row = vec![
            num(s.eps),
            num(s.gamma),
            num(s.gamma * s.eps * s.eps),
            num(s.w_star),
            num(s.tv_w),
            num(s.tv_v),
            num(s.weighted_tv_w),
            s.iterations.to_string(),
        ];
        row.extend(jump_cells(j, slots));
        rows.push(row);
        let name = format!("profile_{k}.csv");
        out.columns(&name, &["y", "w", "v"], &[s.grid.nodes(), &s.grid.w, &s.grid.v])?;
        plots.push(name);
    }
    out.csv("sweep_summary.csv", &header, &rows)?;

    let summary = json!({
        "eps": report.eps,
        "distances_w": report.distances_w.iter().map(|x| jnum(*x)).collect::<Vec<_>>(),
        "distances_v": report.distances_v.iter().map(|x| jnum(*x)).collect::<Vec<_>>(),
        "ratios": report.ratios.iter().map(|x| jnum(*x)).collect::<Vec<_>>(),
        "cauchy": report.cauchy,
        "monotone": report.monotone,
        "max_tv_w": jnum(report.max_tv_w),
        "tv_bound": jnum(report.tv_bound),
        "failure": report.failure.as_ref().map(|(eps, e)| json!({"eps": eps, "error": e.name(), "message": e.to_string()})),
        "members": report.solutions.iter().map(solution_summary).collect::<Vec<_>>(),
        "config": cfg,
    });
    out.json("sweep_summary.json", &summary)?;

    let titles: Vec<[(usize, String); 1]> = report.eps.iter().map(|e| [(2, format!("w, eps={e}"))]).collect();
    let titles: Vec<[(usize, &str); 1]> = titles.iter().map(|[(c, t)]| [(*c, t.as_str())]).collect();
    let members: Vec<(&str, &[(usize, &str)])> = plots.iter().zip(&titles).map(|(f, t)| (f.as_str(), &t[..])).collect();
    let mut script = gnuplot("sweep_profiles.png", "y", &members, false);
    script.push_str(&gnuplot(
        "sweep_tv.png",
        "eps",
        &[("sweep_summary.csv", &[(5, "tv_w"), (6, "tv_v"), (7, "weighted_tv")])],
        true,
    ));
    out.text("plot.gp", &script)?;

    println!(
        "distances_w = [{}]  cauchy = {}  monotone = {}",
        report
            .distances_w
            .iter()
            .map(|d| num(*d))
            .collect::<Vec<_>>()
            .join(", "),
        report.cauchy,
        report.monotone
    );
    match report.failure {
        Some((_, e)) => Err(e.into()),
        None => Ok(()),
    }
}

fn oracle(cfg: &RunConfig) -> Result<(), Failure> {
    let law = cfg.stress_law()?;
    let scfg = cfg.solver_config();
    let data = cfg.riemann_data();
    let o = &cfg.oracle;
    let ocfg = OracleConfig {
        eps: scfg.eps,
        delta: scfg.gamma * scfg.eps * scfg.eps,
        half_width: o.half_width,
        cells: o.cells,
        t_final: o.t_final,
        cfl: o.cfl,
    };
    let evo = evolve(&law, &data, &ocfg)?;
    let sol = solve_profile(&law, &scfg, &data)?;
    let cmp = self_similar_compare(&evo, &sol, o.r0);
    let out = OutDir::create(&cfg.output.out_dir)?;

    let reach = o.half_width / evo.t;
    let (mut y, mut we, mut ve, mut wp, mut vp) = (vec![], vec![], vec![], vec![], vec![]);
    for (k, &yk) in sol.grid.nodes().iter().enumerate() {
        if yk.abs() <= reach {
            let (w, v) = evo.rescaled(yk);
            y.push(yk);
            we.push(w);
            ve.push(v);
            wp.push(sol.grid.w[k]);
            vp.push(sol.grid.v[k]);
        }
    }
    out.columns(
        "oracle_profile.csv",
        &["y", "w_evolved", "v_evolved", "w_profile", "v_profile"],
        &[&y, &we, &ve, &wp, &vp],
    )?;
    let a = &evo.audit;
    let summary = json!({
        "distance_w": jnum(cmp.distance_w),
        "distance_v": jnum(cmp.distance_v),
        "relative_distance_w": jnum(if cmp.jump_w > 0.0 { cmp.distance_w / cmp.jump_w } else { f64::NAN }),
        "t": jnum(evo.t),
        "steps": evo.steps,
        "w_defect": jnum(a.w_defect),
        "v_defect": jnum(a.v_defect),
        "w_star": jnum(sol.w_star),
        "config": cfg,
    });
    out.json("oracle_summary.json", &summary)?;
    out.text(
        "plot.gp",
        &gnuplot(
            "oracle.png",
            "y",
            &[(
                "oracle_profile.csv",
                &[(2, "w evolved"), (4, "w profile"), (3, "v evolved"), (5, "v profile")],
            )],
            false,
        ),
    )?;
    println!(
        "distance_w = {}  distance_v = {}",
        num(cmp.distance_w),
        num(cmp.distance_v)
    );
    Ok(())
}

fn eigen(args: &SystemArgs) -> Result<(), Failure> {
    let input = system::load_eigen(&args.system)?;
    let sys = input.system.as_ref();
    let n = sys.dim();
    let y = input.spec.y;
    let out = OutDir::create(args.out_dir.as_deref().unwrap_or("out".as_ref()))?;

    let mut header: Vec<String> = vec!["sample".into()];
    header.extend((1..=n).map(|i| format!("u{i}")));
    header.push("y".into());
    header.extend((1..=n).map(|i| format!("mu{i}")));
    header.extend((1..=n).map(|i| format!("lambda{i}")));
    if n == 2 {
        for h in [
            "b11",
            "b22",
            "b12_b21",
            "beta",
            "admissible",
            "closed_mu1",
            "closed_mu2",
            "closed_deviation",
        ] {
            header.push(h.into());
        }
    }
    header.push("error".into());

    let admissibility = if n == 2 {
        Some(admissibility_check(sys, &input.samples))
    } else {
        None
    };
    let mut rows = Vec::new();
    let mut failures = 0usize;
    for (k, u) in input.samples.iter().enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(u.iter().map(|x| num(*x)));
        row.push(num(y));
        let pairs = generalized_eigen(sys, u, y);
        let td = transformed_diffusion(sys, u);
        let mut err = String::new();
        let mus: Vec<f64> = match &pairs {
            Ok(p) => p.iter().map(|e| e.mu).collect(),
            Err(e) => {
                err = e.name().to_string();
                vec![f64::NAN; n]
            }
        };
        row.extend(mus.iter().map(|x| num(*x)));
        match &td {
            Ok((_, lam)) => row.extend(lam.iter().map(|x| num(*x))),
            Err(e) => {
                if err.is_empty() {
                    err = e.name().to_string();
                }
                row.extend(vec![num(f64::NAN); n]);
            }
        }
        if n == 2 {
            match (&admissibility, &td) {
                (Some(Ok(rows_a)), Ok((b, lam))) => {
                    let a = &rows_a[k];
                    row.extend([
                        num(a.b11),
                        num(a.b22),
                        num(a.b12_b21),
                        num(a.beta),
                        a.passes().to_string(),
                    ]);
                    match two_by_two_closed_form(b, lam[0], lam[1], y) {
                        Ok((m1, m2)) => {
                            let dev = if mus.len() == 2 {
                                (m1 - mus[0]).abs().max((m2 - mus[1]).abs())
                            } else {
                                f64::NAN
                            };
                            row.extend([num(m1), num(m2), num(dev)]);
                        }
                        Err(e) => {
                            if err.is_empty() {
                                err = e.name().to_string();
                            }
                            row.extend(blanks(3));
                        }
                    }
                }
                (Some(Err(e)), _) => {
                    if err.is_empty() {
                        err = e.name().to_string();
                    }
                    row.extend(blanks(8));
                }
                _ => row.extend(blanks(8)),
            }
        }
        if !err.is_empty() {
            failures += 1;
        }
        row.push(err);
        rows.push(row);
    }
    out.csv("eigen_report.csv", &header, &rows)?;

    let shocks = input.shocks();
    let mut lax_rows = Vec::new();
    for (k, sh) in shocks.iter().enumerate() {
        let mut row = vec![k.to_string(), num(sh.s)];
        match lax_equivalence(sys, sh) {
            Ok(v) => {
                row.extend([
                    (v.family + 1).to_string(),
                    v.standard_lax.to_string(),
                    v.generalized_lax.to_string(),
                    v.marginal.to_string(),
                    num(v.lambda_minus),
                    num(v.lambda_plus),
                    num(v.lambda_hat_minus),
                    num(v.lambda_hat_plus),
                    v.rh_residual.map(num).unwrap_or_default(),
                    String::new(),
                ]);
            }
            Err(e) => {
                row.extend(blanks(9));
                row.push(e.name().to_string());
            }
        }
        lax_rows.push(row);
    }
    if !shocks.is_empty() {
        let h: Vec<String> = [
            "shock",
            "s",
            "family",
            "standard_lax",
            "generalized_lax",
            "marginal",
            "lambda_minus",
            "lambda_plus",
            "lambda_hat_minus",
            "lambda_hat_plus",
            "rh_residual",
            "error",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        out.csv("lax_report.csv", &h, &lax_rows)?;
    }

    let mut perturbation = serde_json::Value::Null;
    if let (Some(p), Some(a)) = (&input.spec.perturbation, &input.perturbation_a) {
        let t = Matrix::from_fn(n, |i, j| p.t[i][j]);
        let rep = perturbation_scaling(a, &t, p.y, &p.etas)?;
        out.columns(
            "perturbation.csv",
            &["eta", "mu_deviation", "r_deviation", "l_deviation", "coupling"],
            &[
                &rep.etas,
                &rep.mu_deviation,
                &rep.r_deviation,
                &rep.l_deviation,
                &rep.coupling,
            ],
        )?;
        perturbation = json!({ "slopes": rep.slopes.iter().map(|x| jnum(*x)).collect::<Vec<_>>() });
    }

    let summary = json!({
        "samples": input.samples.len(),
        "sample_failures": failures,
        "shocks": shocks.len(),
        "perturbation": perturbation,
        "system": input.spec,
    });
    out.json("eigen_summary.json", &summary)?;
    println!(
        "{} samples, {} with errors, {} shocks",
        input.samples.len(),
        failures,
        shocks.len()
    );
    Ok(())
}

fn nsystem(args: &SystemArgs) -> Result<(), Failure> {
    let mut input = system::load_nsystem(&args.system)?;
    let s = &mut input.spec;
    if let Some(e) = args.eps {
        s.eps = e;
    }
    if let Some(g) = args.gamma {
        s.gamma = g;
    }
    if let Some(l) = args.half_width {
        s.half_width = l;
    }
    if let Some(g) = args.grid {
        s.grid = g;
    }
    let flux = input.closure();
    let run = solve_nsystem(&flux, &input.spec.w_b, &input.spec.w_r, &input.config())?;
    let out = OutDir::create(args.out_dir.as_deref().unwrap_or("out".as_ref()))?;

    let n = input.spec.n;
    let mut header: Vec<String> = vec!["y".into()];
    header.extend((1..=n).map(|i| format!("w{i}")));
    header.extend((1..=n).map(|i| format!("a{i}")));
    let mut rows = Vec::new();
    for (k, y) in run.nodes.iter().enumerate() {
        let mut row = vec![num(*y)];
        row.extend((0..n).map(|c| num(run.w[k][c])));
        row.extend((0..n).map(|j| num(run.a[j][k])));
        rows.push(row);
    }
    out.csv("nsystem_profile.csv", &header, &rows)?;

    let summary = json!({
        "boundary_coefficients": run.boundary_coefficients.iter().map(|x| jnum(*x)).collect::<Vec<_>>(),
        "contraction": run.contraction.iter().map(|x| jnum(*x)).collect::<Vec<_>>(),
        "d1_l1": run.d1_l1.iter().map(|x| jnum(*x)).collect::<Vec<_>>(),
        "rho": run.measures.iter().map(|m| jnum(m.rho)).collect::<Vec<_>>(),
        "cross_mass": run.cross_mass.map(jnum),
        "reconstruction_residual": jnum(run.reconstruction_residual),
        "far_field_mismatch": jnum(run.far_field_mismatch),
        "system": input.spec,
    });
    out.json("nsystem_summary.json", &summary)?;
    let cols: Vec<(usize, String)> = (0..n).map(|c| (c + 2, format!("w{}", c + 1))).collect();
    let cols: Vec<(usize, &str)> = cols.iter().map(|(c, t)| (*c, t.as_str())).collect();
    out.text(
        "plot.gp",
        &gnuplot("nsystem.png", "y", &[("nsystem_profile.csv", &cols)], false),
    )?;
    println!(
        "far_field_mismatch = {}  contraction = [{}]",
        num(run.far_field_mismatch),
        run.contraction.iter().map(|c| num(*c)).collect::<Vec<_>>().join(", ")
    );
    Ok(())
}
