//! Built-in invariant suite behind `selfsim check`.

use std::path::Path;

use selfsim_core::boundary::{solve_boundary, BoundaryData};
use selfsim_core::eigen::{
    generalized_eigen, lax_equivalence, pencil_eigen, perturbation_scaling, standard_eigen, two_by_two_closed_form,
    DiffusionSystem, PSystem, Shock,
};
use selfsim_core::limit::{detect_jumps, JUMP_FACTOR};
use selfsim_core::linalg::Matrix;
use selfsim_core::nsystem::{solve_nsystem, ClosureFlux, NSystemConfig};
use selfsim_core::oracle::{evolve, OracleConfig};
use selfsim_core::riemann::{delta_cutoff, solve_profile};
use selfsim_core::{Error, RiemannData, SolverConfig, StressLaw};

use crate::output::OutDir;
use crate::Failure;

pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Case = fn() -> Result<(bool, String), Error>;

fn solver(eps: f64, gamma: f64, grid: usize) -> SolverConfig {
    SolverConfig {
        eps,
        gamma,
        n_nodes: grid,
        ..SolverConfig::default()
    }
}

fn linear_middle_state() -> Result<(bool, String), Error> {
    let law = StressLaw::linear(2.0)?;
    let mut worst: f64 = 0.0;
    for gamma in [0.0, 0.125] {
        let s = solve_profile(&law, &solver(0.05, gamma, 2001), &RiemannData::new(0.0, 0.0, 0.0, 1.0))?;
        worst = worst.max((s.w_star - 0.5).abs());
    }
    Ok((worst <= 0.25, format!("max |w* - 0.5| = {worst:.3e} (bound 0.25)")))
}

fn measures_normalized() -> Result<(bool, String), Error> {
    let law = StressLaw::hardening(1.0, 1.0)?;
    let s = solve_profile(&law, &solver(0.02, 0.0, 2001), &RiemannData::new(0.1, -0.3, -0.2, 0.4))?;
    let err = (s.minus.mass() - 1.0).abs().max((s.plus.mass() - 1.0).abs());
    Ok((err <= 1e-12, format!("mass error {err:.1e}")))
}

fn tv_bound() -> Result<(bool, String), Error> {
    let law = StressLaw::hardening(1.0, 1.0)?;
    let d = RiemannData::new(0.1, -0.3, -0.2, 0.4);
    let s = solve_profile(&law, &solver(0.02, 0.0, 2001), &d)?;
    let bound = (d.w_r - d.w_l).abs() + 2.0 / law.c0() * (d.v_r - d.v_l).abs();
    Ok((
        s.tv_w <= 1.05 * bound,
        format!("tv_w = {:.4} <= {:.4}", s.tv_w, 1.05 * bound),
    ))
}

fn jumps_close_rh() -> Result<(bool, String), Error> {
    let law = StressLaw::hardening(1.0, 1.0)?;
    let s = solve_profile(&law, &solver(0.01, 0.0, 4001), &RiemannData::new(0.3, 0.6, -0.2, -0.1))?;
    let r = detect_jumps(&s, &law, JUMP_FACTOR)?;
    let ok = r.jumps.iter().all(|j| j.rh_accepted(s.eps));
    Ok((
        ok,
        format!("{} jump(s), sum rule {:.1e}", r.jumps.len(), r.sum_rule_residual),
    ))
}

fn boundary_trace() -> Result<(bool, String), Error> {
    let law = StressLaw::linear(2.0)?;
    let cfg = solver(0.02, 0.0, 2001);
    let s = solve_boundary(&law, &cfg, &BoundaryData::new(1.0, 0.0, 0.0))?;
    let err = (s.v0_trace + 2.0).abs();
    Ok((err <= 5.0 * cfg.eps, format!("|v(0) + 2| = {err:.3e}")))
}

fn identity_diffusion() -> Result<(bool, String), Error> {
    let sys = PSystem::identity_diffusion(StressLaw::hardening(1.0, 1.0)?);
    let u = [0.3, 0.7];
    let g = generalized_eigen(&sys, &u, 0.4)?;
    let s = standard_eigen(&sys.jacobian(&u))?;
    let dev = g
        .iter()
        .zip(&s)
        .map(|(a, b)| (a.mu - (b.mu - 0.4)).abs())
        .fold(0.0, f64::max);
    Ok((dev <= 1e-12, format!("eigenvalue deviation {dev:.1e}")))
}

fn closed_form() -> Result<(bool, String), Error> {
    let b = Matrix::from_rows(&[&[1.0, 0.1], &[0.1, 1.0]]);
    let a = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 4.0]]);
    let (m1, m2) = two_by_two_closed_form(&b, 1.0, 4.0, 0.0)?;
    let p = pencil_eigen(&a, &b, 0.0)?;
    let dev = (p[0].mu - m1).abs().max((p[1].mu - m2).abs());
    Ok((dev <= 1e-10, format!("closed form vs pencil {dev:.1e}")))
}

fn lax_agreement() -> Result<(bool, String), Error> {
    let law = StressLaw::hardening(1.0, 1.0)?;
    let t = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let sys = PSystem::new(law, Matrix::identity(2).add(&t.scale(0.05)), 0.05);
    let mut agree = 0;
    let total = 10;
    for k in 0..total {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let u_minus = [0.1, 0.3 + 0.02 * k as f64];
        let Some((up, s)) = sys.hugoniot(u_minus, u_minus[1] + 0.1 * sign, sign) else {
            continue;
        };
        let v = lax_equivalence(
            &sys,
            &Shock {
                u_minus: u_minus.to_vec(),
                u_plus: up.to_vec(),
                s,
            },
        )?;
        if v.standard_lax == v.generalized_lax {
            agree += 1;
        }
    }
    Ok((agree == total, format!("{agree}/{total} verdicts agree")))
}

fn perturbation_order() -> Result<(bool, String), Error> {
    let a = Matrix::from_rows(&[&[0.0, -4.0], &[-1.0, 0.0]]);
    let t = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let rep = perturbation_scaling(&a, &t, 0.5, &[1e-2, 5e-3, 2.5e-3, 1.25e-3])?;
    let ok = rep.slopes.iter().all(|s| (s - 1.0).abs() <= 0.1);
    Ok((ok, format!("slopes {:.3?}", rep.slopes)))
}

fn nsystem_contracts() -> Result<(bool, String), Error> {
    let flux = ClosureFlux::new(2, |w| {
        vec![
            4.0 * w[0] + 0.5 * w[1] * w[1] + w[0] * w[1],
            9.0 * w[1] + 0.5 * w[0] * w[0],
        ]
    });
    let cfg = NSystemConfig {
        n_nodes: 1201,
        ..NSystemConfig::default()
    };
    let run = solve_nsystem(&flux, &[0.0, 0.0], &[0.03, -0.02], &cfg)?;
    let worst = run.contraction.iter().copied().fold(0.0, f64::max);
    Ok((worst < 1.0, format!("max contraction {worst:.3e}")))
}

fn oracle_conserves() -> Result<(bool, String), Error> {
    let law = StressLaw::linear(2.0)?;
    let cfg = OracleConfig {
        half_width: 4.0,
        cells: 400,
        t_final: 1.0,
        ..OracleConfig::default()
    };
    let e = evolve(&law, &RiemannData::new(0.0, 0.0, 0.0, 1.0), &cfg)?;
    let d = e.audit.w_defect.abs().max(e.audit.v_defect.abs());
    Ok((d <= 1e-10, format!("conservation defect {d:.1e}")))
}

fn cutoff_formula() -> Result<(bool, String), Error> {
    let d = delta_cutoff(1.0, 0.05);
    Ok(((d - 0.5).abs() <= 1e-15, format!("delta0(c = 1, gamma = 0.05) = {d}")))
}

const CASES: &[(&str, Case)] = &[
    ("linear middle state", linear_middle_state),
    ("wave measures normalized", measures_normalized),
    ("total variation bound", tv_bound),
    ("jump Rankine-Hugoniot closure", jumps_close_rh),
    ("boundary trace", boundary_trace),
    ("identity diffusion reduction", identity_diffusion),
    ("2x2 closed form", closed_form),
    ("Lax verdict agreement", lax_agreement),
    ("perturbation order", perturbation_order),
    ("N-system contraction", nsystem_contracts),
    ("oracle conservation", oracle_conserves),
    ("capillary cutoff", cutoff_formula),
];

pub fn outcomes() -> Vec<Outcome> {
    CASES
        .iter()
        .map(|(name, case)| match case() {
            Ok((passed, detail)) => Outcome { name, passed, detail },
            Err(e) => Outcome {
                name,
                passed: false,
                detail: format!("{}: {e}", e.name()),
            },
        })
        .collect()
}

pub fn run_suite(out_dir: Option<&Path>) -> Result<(), Failure> {
    let results = outcomes();
    println!("{:<32} {:<6} detail", "case", "result");
    for o in &results {
        println!(
            "{:<32} {:<6} {}",
            o.name,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failed = results.iter().filter(|o| !o.passed).count();
    println!("{} of {} cases passed", results.len() - failed, results.len());
    if let Some(dir) = out_dir {
        let out = OutDir::create(dir)?;
        let header = ["case", "passed", "detail"].map(String::from);
        let rows: Vec<Vec<String>> = results
            .iter()
            .map(|o| vec![o.name.to_string(), o.passed.to_string(), o.detail.clone()])
            .collect();
        out.csv("check.csv", &header, &rows)?;
    }
    if failed > 0 {
        Err(Failure::Check(failed))
    } else {
        Ok(())
    }
}
