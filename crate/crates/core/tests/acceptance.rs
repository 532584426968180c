//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selfsim_core::boundary::{boundary_layer_check, layer_constants_bounded, solve_boundary, BoundaryData};
use selfsim_core::eigen::{
    generalized_eigen, lax_equivalence, perturbation_scaling, standard_eigen, transformed_diffusion,
    two_by_two_closed_form, DiffusionSystem, PSystem, Shock,
};
use selfsim_core::limit::{concentration_diagnostics, detect_jumps, excision_sequence, JUMP_FACTOR};
use selfsim_core::linalg::Matrix;
use selfsim_core::nsystem::{assemble_sources, decompose, solve_nsystem, ClosureFlux, NSystemConfig};
use selfsim_core::oracle::{evolve, self_similar_compare, OracleConfig};
use selfsim_core::riemann::{delta_cutoff, solve_profile};
use selfsim_core::wave_measure::envelope_check;
use selfsim_core::{Error, RiemannData, SelfSimilarSolution, SolverConfig, StressLaw};

type Verdict = Result<(bool, String), Error>;
type Criterion = (&'static str, fn() -> Verdict);

fn cfg(eps: f64, gamma: f64) -> SolverConfig {
    SolverConfig {
        eps,
        gamma,
        ..SolverConfig::default()
    }
}

fn hardening() -> StressLaw {
    StressLaw::hardening(1.0, 1.0).unwrap()
}

/// 20 data sets with all states in [-1, 1], fixed seed.
fn random_data() -> Vec<RiemannData> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..20)
        .map(|_| {
            let mut x = || rng.gen_range(-1.0..=1.0);
            RiemannData::new(x(), x(), x(), x())
        })
        .collect()
}

fn linear_middle_state() -> Verdict {
    let law = StressLaw::linear(2.0)?;
    let data = RiemannData::new(0.0, 0.0, 0.0, 1.0);
    let mut ok = true;
    let mut parts = Vec::new();
    for eps in [0.1, 0.05, 0.025] {
        let t = Instant::now();
        let s = solve_profile(&law, &cfg(eps, 0.0), &data)?;
        let secs = t.elapsed().as_secs_f64();
        let err = (s.w_star - 0.5).abs();
        ok &= err <= 5.0 * eps && secs < 5.0;
        parts.push(format!("eps={eps}: |w*-0.5|={err:.1e} in {secs:.2}s"));
    }
    Ok((ok, parts.join(", ")))
}

fn tv_bounds() -> Verdict {
    let law = hardening();
    let mut worst_w: f64 = 0.0;
    let mut worst_v: f64 = 0.0;
    for gamma in [0.0, 0.125] {
        for d in random_data() {
            let s = solve_profile(&law, &cfg(0.02, gamma), &d)?;
            let bound = (d.w_r - d.w_l).abs() + 2.0 / law.c0() * (d.v_r - d.v_l).abs();
            worst_w = worst_w.max(s.tv_w / bound);
            worst_v = worst_v.max(s.tv_v / ((s.lambda_max + 1.0) * bound));
        }
    }
    Ok((
        worst_w <= 1.05 && worst_v <= 1.05,
        format!("40 solves, max tv_w/bound = {worst_w:.3}, max tv_v/bound = {worst_v:.3}"),
    ))
}

fn measure_invariants() -> Verdict {
    let data = RiemannData::new(0.2, -0.3, -0.1, 0.4);
    let mut ok = true;
    let mut worst_mass: f64 = 0.0;
    let mut worst_c1: f64 = 0.0;
    for law in [StressLaw::linear(2.0)?, hardening()] {
        for gamma in [0.0, 0.125] {
            let s = solve_profile(&law, &cfg(0.02, gamma), &data)?;
            let (sw_min, sw_max) = s
                .grid
                .w
                .iter()
                .map(|&w| law.sigma_w(w))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
            for m in [&s.minus, &s.plus] {
                worst_mass = worst_mass.max((m.mass() - 1.0).abs());
                ok &= m.density.iter().all(|p| *p >= 0.0);
                let env = envelope_check(m, sw_min, sw_max, s.eps, (gamma > 0.0).then_some(gamma));
                ok &= env.passed && env.fitted_c1 <= 100.0;
                worst_c1 = worst_c1.max(env.fitted_c1);
            }
        }
    }
    ok &= worst_mass <= 1e-12;
    Ok((
        ok,
        format!("max |mass-1| = {worst_mass:.1e}, max fitted C1 = {worst_c1:.2}"),
    ))
}

fn rankine_hugoniot() -> Verdict {
    let law = hardening();
    let eps = 0.01;
    let mut ok = true;
    let mut count = 0;
    let mut worst: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for gamma in [0.0, 0.125] {
        for d in random_data() {
            let s = solve_profile(&law, &cfg(eps, gamma), &d)?;
            let r = detect_jumps(&s, &law, JUMP_FACTOR)?;
            worst_sum = worst_sum.max(r.sum_rule_residual);
            for j in &r.jumps {
                count += 1;
                ok &= j.rh_accepted(eps);
                worst = worst.max(j.rh_total() / (20.0 * eps * (1.0 + j.s.abs())));
            }
        }
    }
    ok &= worst_sum <= 1e-6;
    Ok((
        ok,
        format!("{count} jumps, max residual/gate = {worst:.3}, max sum rule = {worst_sum:.1e}"),
    ))
}

fn oracle_equivalence() -> Verdict {
    let t0 = Instant::now();
    let law = StressLaw::linear(2.0)?;
    let data = RiemannData::new(0.0, 0.0, 0.0, 1.0);
    let sol = solve_profile(&law, &cfg(0.02, 0.0), &data)?;
    let run = |t_final: f64| -> Result<f64, Error> {
        let o = OracleConfig {
            t_final,
            ..OracleConfig::default()
        };
        Ok(self_similar_compare(&evolve(&law, &data, &o)?, &sol, 0.0).distance_w)
    };
    let d2 = run(2.0)?;
    let d4 = run(4.0)?;
    let secs = t0.elapsed().as_secs_f64();
    let ratio = d4 / d2;
    Ok((
        d2 <= 0.05 * (data.w_r - data.w_l).abs() && ratio <= 0.8 && secs < 60.0,
        format!("distance {d2:.2e} at t=2, ratio t=4/t=2 {ratio:.2}, {secs:.1}s"),
    ))
}

fn capillary_consistency() -> Verdict {
    let law = hardening();
    let data = RiemannData::new(0.2, 0.3, -0.2, 0.5);
    let eps = 0.02;
    let solve = |gamma: f64| -> Result<SelfSimilarSolution, Error> {
        solve_profile(
            &law,
            &SolverConfig {
                half_width: 4.0,
                ..cfg(eps, gamma)
            },
            &data,
        )
    };
    let full = solve(0.125)?;
    // linear extrapolation to γ → 0⁺ from two small ratios
    let a = solve(1.0 / 32.0)?.w_star;
    let b = solve(1.0 / 64.0)?.w_star;
    let limit = 2.0 * b - a;
    let diff = (full.w_star - limit).abs();
    let phi = full.phi_error_estimate.unwrap_or(f64::INFINITY);
    Ok((
        diff <= 10.0 * eps && phi < 0.1,
        format!("|w*(1/8) - w*(0+)| = {diff:.1e}, Phi estimate {phi:.3}"),
    ))
}

fn boundary_solver() -> Verdict {
    let law = StressLaw::linear(2.0)?;
    let data = BoundaryData::new(1.0, 0.0, 0.0);
    let mut ok = true;
    let mut constants = Vec::new();
    let mut parts = Vec::new();
    for eps in [0.04, 0.02, 0.01] {
        let s = solve_boundary(&law, &cfg(eps, 0.0), &data)?;
        let err = (s.v0_trace + 2.0).abs();
        ok &= err <= 5.0 * eps;
        let c = boundary_layer_check(&s).c;
        constants.push(c);
        parts.push(format!("eps={eps}: |v0+2|={err:.1e} C={c:.1e}"));
    }
    ok &= layer_constants_bounded(&constants);
    Ok((ok, parts.join(", ")))
}

fn phase_diagnostics() -> Verdict {
    let law = StressLaw::cubic();
    let gamma = 0.05;
    let delta0 = delta_cutoff(law.c_lower(), gamma);
    let mut formula_err: f64 = 0.0;
    for (c, g) in [(1.0f64, 0.05f64), (1.0, 0.125), (0.5, 0.2), (2.0, 0.01)] {
        let direct = (4.0 * c * g / (1.0 - 4.0 * g)).sqrt();
        formula_err = formula_err.max((delta_cutoff(c, g) - direct).abs());
    }
    // at ε = 0.02 the δ₀/8 member settles into a damped two-cycle
    let config = SolverConfig {
        half_width: 4.0,
        ..cfg(0.04, 0.0)
    };
    let data = RiemannData::new(0.0, -1.2, 0.0, 1.2);
    let seq = excision_sequence(&law, &config, &data, delta0, 4)?;
    let rep = concentration_diagnostics(&seq, &law);
    let sup: Vec<String> = rep.rows.iter().map(|r| format!("{:.3}", r.sup_yw)).collect();
    let wtv: Vec<String> = rep.rows.iter().map(|r| format!("{:.3}", r.weighted_tv)).collect();
    Ok((
        rep.sup_bounded && rep.weighted_bounded && rep.tv_v_bounded && formula_err <= 1e-12,
        format!(
            "delta0 = {delta0}, sup|yw| = [{}], weighted tv = [{}], tv_v bounded = {}",
            sup.join(", "),
            wtv.join(", "),
            rep.tv_v_bounded
        ),
    ))
}

fn eigen_suite() -> Verdict {
    let law = hardening();
    // B = I
    let sys = PSystem::identity_diffusion(law.clone());
    let mut id_err: f64 = 0.0;
    for k in 0..20 {
        let u = [0.05 * k as f64 - 0.5, 0.1 * k as f64 - 1.0];
        let y = 0.1 * k as f64 - 1.0;
        let g = generalized_eigen(&sys, &u, y)?;
        let s = standard_eigen(&sys.jacobian(&u))?;
        for (a, b) in g.iter().zip(&s) {
            id_err = id_err.max((a.mu - (b.mu - y)).abs());
            for i in 0..2 {
                id_err = id_err
                    .max((a.r_hat[i] - b.r_hat[i]).abs())
                    .max((a.l_hat[i] - b.l_hat[i]).abs());
            }
        }
    }

    // closed form against the pencil on admissible samples
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut admissible = 0;
    let mut tried = 0;
    let mut cf_err: f64 = 0.0;
    while admissible < 1000 && tried < 100_000 {
        tried += 1;
        let e: [f64; 4] = rng.gen();
        let t = Matrix::from_fn(2, |i, j| 2.0 * e[2 * i + j] - 1.0);
        let eta = rng.gen_range(0.0..0.3);
        let sys = PSystem::new(law.clone(), t, eta);
        let u = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let y = rng.gen_range(-2.0..2.0);
        let (b, lam) = transformed_diffusion(&sys, &u)?;
        let Ok((m1, m2)) = two_by_two_closed_form(&b, lam[0], lam[1], y) else {
            continue;
        };
        let Ok(p) = generalized_eigen(&sys, &u, y) else {
            continue;
        };
        admissible += 1;
        cf_err = cf_err.max((p[0].mu - m1).abs()).max((p[1].mu - m2).abs());
    }

    // O(η) perturbation
    let a = Matrix::from_rows(&[&[0.0, -4.0], &[-1.0, 0.0]]);
    let t = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let rep = perturbation_scaling(&a, &t, 0.5, &[1e-2, 5e-3, 2.5e-3, 1.25e-3])?;
    let slopes_ok = rep.slopes.iter().all(|s| (0.9..=1.1).contains(s));

    // Lax verdicts on small shocks
    let eta = 0.05;
    let sys = PSystem::new(law, Matrix::identity(2).add(&t.scale(eta)), eta);
    let mut agree = 0;
    let mut shocks = 0;
    for k in 0..50 {
        let w_minus = 0.3 + 0.01 * k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let amp = if k % 4 < 2 { 1.0 } else { -1.0 } * (0.05 + 0.002 * k as f64);
        let u_minus = [0.1, w_minus];
        let Some((up, s)) = sys.hugoniot(u_minus, w_minus + amp, sign) else {
            continue;
        };
        shocks += 1;
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
    Ok((
        id_err <= 1e-12 && admissible == 1000 && cf_err <= 1e-10 && slopes_ok && shocks == 50 && agree == 50,
        format!(
            "B=I error {id_err:.1e}, closed form error {cf_err:.1e} on {admissible} samples, slopes {:.3?}, Lax agreement {agree}/{shocks}",
            rep.slopes
        ),
    ))
}

fn nsystem_machinery() -> Verdict {
    let flux = ClosureFlux::new(2, |w| {
        vec![
            4.0 * w[0] + 0.5 * w[1] * w[1] + w[0] * w[1],
            9.0 * w[1] + 0.5 * w[0] * w[0],
        ]
    });
    let y: Vec<f64> = (0..301).map(|k| 0.05 + 4.0 * k as f64 / 300.0).collect();
    let bump = |amp: f64| -> Vec<Vec<f64>> {
        y.iter()
            .map(|&t| vec![amp * (t - 2.0).tanh(), -0.5 * amp * (2.0 * (t - 2.5)).tanh()])
            .collect()
    };
    let residual = decompose(&flux, &y, &bump(0.2))?.reconstruction_residual();
    let norms = [0.02, 0.01]
        .iter()
        .map(|&amp| {
            let d = decompose(&flux, &y, &bump(amp))?;
            Ok(assemble_sources(&flux, &d, 0.01, 0.0)?.d1_l1(&y))
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    let slope = (norms[0] / norms[1]).ln() / 2f64.ln();
    let cfg = NSystemConfig {
        eps: 0.01,
        ..NSystemConfig::default()
    };
    let run = solve_nsystem(&flux, &[0.0, 0.0], &[0.03, -0.02], &cfg)?;
    let cross = run.cross_mass.unwrap_or(f64::INFINITY);
    Ok((
        residual <= 1e-10 && (slope - 2.0).abs() <= 0.1 && cross < 1e-3,
        format!("reconstruction {residual:.1e}, D1 slope {slope:.3}, cross-mass {cross:.1e}"),
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("linear-law middle state", linear_middle_state),
        ("total variation bounds", tv_bounds),
        ("measure invariants", measure_invariants),
        ("Rankine-Hugoniot closure", rankine_hugoniot),
        ("oracle equivalence", oracle_equivalence),
        ("capillary consistency", capillary_consistency),
        ("boundary solver", boundary_solver),
        ("phase-dynamics diagnostics", phase_diagnostics),
        ("eigen suite", eigen_suite),
        ("N-system machinery", nsystem_machinery),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = match f() {
            Ok(v) => v,
            Err(e) => (false, format!("{}: {e}", e.name())),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<28} {}  ({detail}; {:.1}s)",
            k + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
