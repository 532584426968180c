//! The fixed-point map `T` and the self-similar Riemann solver.
//!
//! Given the current profile `w`, `T` builds the two wave measures, picks the
//! middle state
//!
//! ```text
//!     w* = (v_r - v_l + w_r M+ - w_l M-) / (M+ - M-),    M± = ∫ y φ± dy,
//! ```
//!
//! and returns
//!
//! ```text
//!     w(y) = w_l + (w* - w_l) ∫_{-L}^y φ-     (y < 0)
//!     w(y) = w_r + (w* - w_r) ∫_y^L φ+        (y > 0).
//! ```
//!
//! `v` follows from `v' = -y w'`. The same map serves the viscous, the
//! viscous-capillary (`δ = γε²`) and the excised (`|y| ≥ δ`) problems; the
//! branch is picked from `gamma` and `excision_delta`.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::constitutive::StressLaw;
use crate::error::{invalid, Error, Result};
use crate::grid::{ProfileGrid, Side};
use crate::wave_measure::{capillary_measure_field, viscous_measure_field, WaveMeasure};

/// Far-field states of the Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannData {
    pub v_l: f64,
    pub w_l: f64,
    pub v_r: f64,
    pub w_r: f64,
}

impl RiemannData {
    pub fn new(v_l: f64, w_l: f64, v_r: f64, w_r: f64) -> Self {
        RiemannData { v_l, w_l, v_r, w_r }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.v_l, self.w_l, self.v_r, self.w_r].iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(invalid("Riemann states must be finite"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub eps: f64,
    /// Capillarity ratio; the dispersive coefficient is `γ ε²`. Zero selects
    /// the viscous branch.
    pub gamma: f64,
    pub half_width: f64,
    pub n_nodes: usize,
    pub excision_delta: f64,
    /// Initial Picard damping `θ ∈ (0, 1]`.
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps: 0.01,
            gamma: 0.0,
            half_width: 6.0,
            n_nodes: 4001,
            excision_delta: 0.0,
            damping: 1.0,
            tol: 1e-10,
            max_iter: 5000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(invalid("eps must be positive"));
        }
        if !(self.gamma >= 0.0 && self.gamma < 0.25) {
            return Err(invalid("gamma must lie in [0, 1/4)"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(invalid("damping must lie in (0, 1]"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        if !(self.excision_delta >= 0.0) {
            return Err(invalid("excision delta must be non-negative"));
        }
        Ok(())
    }

    pub fn branch(&self) -> Branch {
        match (self.gamma > 0.0, self.excision_delta > 0.0) {
            (false, false) => Branch::Viscous,
            (true, false) => Branch::Capillary,
            (false, true) => Branch::ExcisedViscous,
            (true, true) => Branch::ExcisedCapillary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Viscous,
    Capillary,
    ExcisedViscous,
    ExcisedCapillary,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Viscous => "viscous",
            Branch::Capillary => "capillary",
            Branch::ExcisedViscous => "excised_viscous",
            Branch::ExcisedCapillary => "excised_capillary",
        }
    }

    pub fn is_capillary(self) -> bool {
        matches!(self, Branch::Capillary | Branch::ExcisedCapillary)
    }
}

/// Cutoff `δ₀ = (4cγ/(1 - 4γ))^(1/2)` below which the WKB frequency may
/// vanish for a law with `σ_w ≥ -c`.
pub fn delta_cutoff(c_lower: f64, gamma: f64) -> f64 {
    (4.0 * c_lower * gamma / (1.0 - 4.0 * gamma)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiddleState {
    pub w_star: f64,
    pub m_minus: f64,
    pub m_plus: f64,
    /// `D = M+ - M-`.
    pub denominator: f64,
    /// `max(|w_l|, |w_r|) + |v_r - v_l| / D`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Threshold on `D` below which the measures are taken to have collapsed
/// onto the axis.
pub const DENOMINATOR_MIN: f64 = 1e-8;

pub fn middle_state(phi_minus: &WaveMeasure, phi_plus: &WaveMeasure, data: &RiemannData) -> Result<MiddleState> {
    let m_minus = phi_minus.first_moment();
    let m_plus = phi_plus.first_moment();
    let d = m_plus - m_minus;
    if !(d >= DENOMINATOR_MIN) {
        return Err(Error::DenominatorCollapse { denominator: d });
    }
    let w_star = (data.v_r - data.v_l + data.w_r * m_plus - data.w_l * m_minus) / d;
    let bound = data.w_l.abs().max(data.w_r.abs()) + (data.v_r - data.v_l).abs() / d;
    Ok(MiddleState {
        w_star,
        m_minus,
        m_plus,
        denominator: d,
        bound,
        within_bound: w_star.abs() <= bound * (1.0 + 1e-12),
    })
}

/// One application of `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TStep {
    pub grid: ProfileGrid,
    pub middle: MiddleState,
    pub minus: WaveMeasure,
    pub plus: WaveMeasure,
}

fn build_measure(law: &StressLaw, grid: &ProfileGrid, config: &SolverConfig, side: Side) -> Result<WaveMeasure> {
    let support = grid.support(side);
    let w = grid.on_support(&support, &grid.w);
    let s: Vec<f64> = w.iter().map(|&x| law.sigma_w(x)).collect();
    if config.gamma > 0.0 {
        capillary_measure_field(&support.nodes, &s, config.eps, config.gamma, side)
    } else {
        viscous_measure_field(&support.nodes, &s, config.eps, side)
    }
}

/// Writes the representation formula for given measures and `w*`.
fn represent(grid: &mut ProfileGrid, minus: &WaveMeasure, plus: &WaveMeasure, w_star: f64, data: &RiemannData) {
    let sm = grid.support(Side::Minus);
    let cum = minus.cumulative();
    for (k, g) in sm.grid.iter().enumerate() {
        if let Some(i) = g {
            grid.w[*i] = data.w_l + (w_star - data.w_l) * cum[k];
        }
    }
    let sp = grid.support(Side::Plus);
    let tail = plus.tail();
    for (k, g) in sp.grid.iter().enumerate() {
        if let Some(i) = g {
            grid.w[*i] = data.w_r + (w_star - data.w_r) * tail[k];
        }
    }
    if let Some(o) = grid.origin_index() {
        grid.w[o] = w_star;
    }
}

pub fn apply_t(current: &ProfileGrid, law: &StressLaw, config: &SolverConfig, data: &RiemannData) -> Result<TStep> {
    let minus = build_measure(law, current, config, Side::Minus)?;
    let plus = build_measure(law, current, config, Side::Plus)?;
    let middle = middle_state(&minus, &plus, data)?;
    let mut grid = current.clone();
    represent(&mut grid, &minus, &plus, middle.w_star, data);
    Ok(TStep {
        grid,
        middle,
        minus,
        plus,
    })
}

/// Linear-law Riemann profile with speed `c0`, smoothed by one `(1, 2, 1)/4`
/// pass.
pub fn initial_guess(grid: &mut ProfileGrid, law: &StressLaw, data: &RiemannData) {
    let avg = 0.5 * (data.w_l + data.w_r);
    let s = law
        .sigma_w(avg)
        .max(0.5 * (law.sigma_w(data.w_l) + law.sigma_w(data.w_r)))
        .max(1e-2);
    let c0 = s.sqrt();
    let w_star = avg + (data.v_r - data.v_l) / (2.0 * c0);
    let raw: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&y| {
            if y < -c0 {
                data.w_l
            } else if y > c0 {
                data.w_r
            } else {
                w_star
            }
        })
        .collect();
    let n = raw.len();
    let mut w = raw.clone();
    for i in 1..n - 1 {
        w[i] = 0.25 * raw[i - 1] + 0.5 * raw[i] + 0.25 * raw[i + 1];
    }
    w[0] = data.w_l;
    w[n - 1] = data.w_r;
    grid.w = w;
}

/// `v(y) = v_l + ∫_{-L}^y (-x) w'(x) dx` with `w'` constant per cell.
///
/// Returns the nodal `v` and the conservation defect `|v(L) - v_r|`. Across
/// an excised gap `w` does not change, so the same recursion applies.
pub fn reconstruct_v(grid: &ProfileGrid, data: &RiemannData) -> (Vec<f64>, f64) {
    let y = grid.nodes();
    let w = &grid.w;
    let mut v = Vec::with_capacity(y.len());
    v.push(data.v_l);
    for i in 0..y.len() - 1 {
        let xm = 0.5 * (y[i] + y[i + 1]);
        let next = v[i] - xm * (w[i + 1] - w[i]);
        v.push(next);
    }
    let defect = (v[y.len() - 1] - data.v_r).abs();
    (v, defect)
}

/// Converged profile and its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarSolution {
    pub branch: Branch,
    pub eps: f64,
    pub gamma: f64,
    pub data: RiemannData,
    pub grid: ProfileGrid,
    pub w_star: f64,
    pub v_star: f64,
    pub tv_w: f64,
    pub tv_v: f64,
    /// `∫ |y| |dw|`.
    pub weighted_tv_w: f64,
    /// `sup |y w(y)|` over `δ ≤ |y| ≤ 1`.
    pub near_axis_sup: f64,
    pub conservation_defect: f64,
    pub residual_ode: f64,
    /// `sup |T(w) - w|` at the returned profile.
    pub fixed_point_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
    pub final_damping: f64,
    pub middle: MiddleState,
    pub minus: WaveMeasure,
    pub plus: WaveMeasure,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `ε √γ k`, larger of the two half-axes, in the capillary branches.
    pub phi_error_estimate: Option<f64>,
    /// `L > λ_M + 1` for the converged profile.
    pub domain_ok: bool,
}

impl SelfSimilarSolution {
    pub fn rho_minus(&self) -> f64 {
        self.minus.rho
    }

    pub fn rho_plus(&self) -> f64 {
        self.plus.rho
    }

    pub fn denominator(&self) -> f64 {
        self.middle.denominator
    }

    /// `φ-` and `φ+` at every grid node (zero off their half-axis).
    pub fn nodal_measures(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.len();
        let mut pm = alloc::vec![0.0; n];
        let mut pp = alloc::vec![0.0; n];
        for (measure, out, side) in [(&self.minus, &mut pm, Side::Minus), (&self.plus, &mut pp, Side::Plus)] {
            let support = self.grid.support(side);
            for (k, g) in support.grid.iter().enumerate() {
                if let Some(i) = g {
                    out[*i] = measure.density[k];
                }
            }
        }
        (pm, pp)
    }
}

pub(crate) fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub(crate) fn total_variation(f: &[f64]) -> f64 {
    f.windows(2).map(|p| (p[1] - p[0]).abs()).sum()
}

/// Floor for the adaptive Picard damping.
pub const DAMPING_MIN: f64 = 1.0 / 64.0;

/// Iterations over which the change must shrink before `θ` is cut again.
pub const STALL_WINDOW: usize = 10;

/// Adaptive damping shared by the Picard loops.
#[derive(Debug, Clone)]
pub(crate) struct DampingControl {
    pub theta: f64,
    pub history: Vec<f64>,
    last_cut: usize,
}

impl DampingControl {
    pub fn new(theta: f64) -> Self {
        DampingControl {
            theta,
            history: Vec::new(),
            last_cut: 0,
        }
    }

    /// Records `residual = sup |T(w) - w|` and moves `w` toward `tw`.
    pub fn relax(&mut self, w: &mut [f64], tw: &[f64], residual: f64) {
        let k = self.history.len();
        let increased = self.history.last().is_some_and(|&prev| residual > prev);
        let stalled = k >= self.last_cut + STALL_WINDOW && residual >= 0.999 * self.history[k - STALL_WINDOW];
        if (increased || stalled) && self.theta > DAMPING_MIN {
            self.theta = (0.5 * self.theta).max(DAMPING_MIN);
            self.last_cut = k;
        }
        self.history.push(residual);
        let theta = self.theta;
        for (a, b) in w.iter_mut().zip(tw) {
            *a = (1.0 - theta) * *a + theta * b;
        }
    }

    pub fn not_converged(self, iterations: usize, last_w: Vec<f64>) -> Error {
        Error::NotConverged {
            iterations,
            last_change: self.history.last().copied().unwrap_or(f64::NAN),
            history: self.history,
            last_w,
        }
    }
}

/// Damped Picard iteration `w ← (1 - θ) w + θ T(w)` for any branch, stopped
/// once `sup |T(w) - w| ≤ tol`.
///
/// `θ` starts at `config.damping` and is halved, down to
/// [`DAMPING_MIN`], after every iteration whose change exceeds the previous
/// one, or after [`STALL_WINDOW`] iterations without progress. Strongly
/// nonlinear laws otherwise settle into a two-cycle.
pub fn solve_profile(law: &StressLaw, config: &SolverConfig, data: &RiemannData) -> Result<SelfSimilarSolution> {
    config.validate()?;
    data.validate()?;
    let branch = config.branch();
    if branch == Branch::ExcisedCapillary {
        let cutoff = delta_cutoff(law.c_lower(), config.gamma);
        if config.excision_delta < cutoff {
            return Err(Error::DeltaBelowCutoff {
                delta: config.excision_delta,
                cutoff,
            });
        }
    }
    let mut grid = ProfileGrid::new(config.half_width, config.excision_delta, config.n_nodes)?;
    initial_guess(&mut grid, law, data);

    let check_bound = law.is_uniformly_hyperbolic() && config.excision_delta == 0.0;
    let lambda0 = data.w_l.abs().max(data.w_r.abs()) + (data.v_r - data.v_l).abs() / law.c0();

    let mut damping = DampingControl::new(config.damping);
    let mut finished: Option<(TStep, f64)> = None;
    let mut iterations = 0;
    while iterations < config.max_iter {
        iterations += 1;
        let step = apply_t(&grid, law, config, data)?;
        if step.grid.w.iter().any(|x| !x.is_finite()) {
            return Err(Error::NanDetected { iteration: iterations });
        }
        let residual = sup_diff(&step.grid.w, &grid.w);
        if residual <= config.tol {
            damping.history.push(residual);
            finished = Some((step, residual));
            break;
        }
        damping.relax(&mut grid.w, &step.grid.w, residual);
        if check_bound {
            let sup_w = grid.w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if sup_w > 1.1 * lambda0 {
                return Err(Error::BoundViolated { sup_w, bound: lambda0 });
            }
        }
    }
    match finished {
        Some((step, residual)) => finish(law, config, data, step, iterations, damping, residual),
        None => Err(damping.not_converged(iterations, grid.w)),
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    law: &StressLaw,
    config: &SolverConfig,
    data: &RiemannData,
    step: TStep,
    iterations: usize,
    damping: DampingControl,
    fixed_point_residual: f64,
) -> Result<SelfSimilarSolution> {
    let TStep {
        mut grid,
        middle,
        minus,
        plus,
    } = step;
    let (v, defect) = reconstruct_v(&grid, data);
    grid.v = v;
    let y = grid.nodes();
    let (inner_m, _) = grid.inner_indices();
    let v_star = grid.v[inner_m];
    let tv_w = total_variation(&grid.w);
    let tv_v = total_variation(&grid.v);
    let weighted_tv_w = (0..y.len() - 1)
        .map(|i| 0.5 * (y[i] + y[i + 1]).abs() * (grid.w[i + 1] - grid.w[i]).abs())
        .sum();
    let delta = grid.excision();
    let near_axis_sup = y
        .iter()
        .zip(&grid.w)
        .filter(|(t, _)| t.abs() >= delta && t.abs() <= 1.0)
        .map(|(t, w)| (t * w).abs())
        .fold(0.0, f64::max);
    let shift = if config.gamma > 0.0 {
        0.5 * config.eps
    } else {
        config.eps
    };
    let (sw_min, sw_max) = grid
        .w
        .iter()
        .map(|&w| law.sigma_w(w))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s), b.max(s)));
    let lambda_min = (sw_min - shift).max(0.0).sqrt();
    let lambda_max = (sw_max - shift).max(0.0).sqrt();
    let phi_error_estimate = match (minus.phi_error_estimate, plus.phi_error_estimate) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
    let mut solution = SelfSimilarSolution {
        branch: config.branch(),
        eps: config.eps,
        gamma: config.gamma,
        data: *data,
        w_star: middle.w_star,
        v_star,
        tv_w,
        tv_v,
        weighted_tv_w,
        near_axis_sup,
        conservation_defect: defect,
        residual_ode: 0.0,
        fixed_point_residual,
        iterations,
        converged: true,
        history: damping.history,
        final_damping: damping.theta,
        middle,
        minus,
        plus,
        lambda_min,
        lambda_max,
        phi_error_estimate,
        domain_ok: config.half_width > lambda_max + 1.0,
        grid,
    };
    solution.residual_ode = ode_residual(&solution, law, config);
    Ok(solution)
}

/// Excised solve on `δ ≤ |y| ≤ L`.
///
/// In the capillary branch `δ` must not be below [`delta_cutoff`].
pub fn solve_excised(
    law: &StressLaw,
    config: &SolverConfig,
    data: &RiemannData,
    delta: f64,
) -> Result<SelfSimilarSolution> {
    if !(delta > 0.0) {
        return Err(invalid("excised solve needs delta > 0"));
    }
    if delta >= config.half_width {
        return Err(Error::InvalidGrid(format!(
            "delta = {delta} must be below L = {}",
            config.half_width
        )));
    }
    let mut cfg = *config;
    cfg.excision_delta = delta;
    solve_profile(law, &cfg, data)
}

/// Mesh-weighted L¹ norm of
/// `(y² + ε - σ_w(w)) w' + ε y w'' + γ ε² w'''` on interior nodes.
///
/// Centered differences; nodes whose stencil reaches the three nodes
/// nearest the axis (or the excised gap) are skipped.
pub fn ode_residual(solution: &SelfSimilarSolution, law: &StressLaw, config: &SolverConfig) -> f64 {
    let grid = &solution.grid;
    let y = grid.nodes();
    let w = &grid.w;
    let n = y.len();
    let h = grid.mesh_width();
    let dispersive = config.gamma * config.eps * config.eps;
    let (a, b) = grid.inner_indices();
    let excised = grid.origin_index().is_none();
    let mut total = 0.0;
    for i in 2..n.saturating_sub(2) {
        let skip = if excised {
            // stencil i-2..=i+2 must not straddle the gap and stay 3 nodes off it
            (i <= a && i + 5 > a) || (i >= b && i < b + 5)
        } else {
            i + 5 > a && i < a + 5
        };
        if skip {
            continue;
        }
        let d1 = (w[i + 1] - w[i - 1]) / (2.0 * h);
        let d2 = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h);
        let d3 = (w[i + 2] - 2.0 * w[i + 1] + 2.0 * w[i - 1] - w[i - 2]) / (2.0 * h * h * h);
        let r = (y[i] * y[i] + config.eps - law.sigma_w(w[i])) * d1 + config.eps * y[i] * d2 + dispersive * d3;
        total += r.abs() * h;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear() -> StressLaw {
        StressLaw::linear(2.0).unwrap()
    }

    #[test]
    fn constant_data_is_a_fixed_point() {
        let data = RiemannData::new(0.3, 0.7, 0.3, 0.7);
        let cfg = SolverConfig {
            n_nodes: 801,
            ..SolverConfig::default()
        };
        let sol = solve_profile(&linear(), &cfg, &data).unwrap();
        assert!((sol.w_star - 0.7).abs() < 1e-13);
        assert!(sol.grid.w.iter().all(|w| (w - 0.7).abs() < 1e-13));
        assert!(sol.grid.v.iter().all(|v| (v - 0.3).abs() < 1e-13));
        assert!(sol.conservation_defect < 1e-13);
        assert!(sol.residual_ode < 1e-10);
    }

    #[test]
    fn linear_law_middle_state() {
        let data = RiemannData::new(0.0, 0.0, 0.0, 1.0);
        let cfg = SolverConfig {
            eps: 0.01,
            ..SolverConfig::default()
        };
        let sol = solve_profile(&linear(), &cfg, &data).unwrap();
        assert!(sol.iterations <= 2);
        assert!((sol.w_star - 0.5).abs() <= 0.05);
        assert!((sol.v_star - 1.0).abs() <= 0.1);
        let g = &sol.grid;
        assert_eq!(g.w[0], 0.0);
        assert_eq!(*g.w.last().unwrap(), 1.0);
        assert_eq!(g.v[0], 0.0);
        assert!(sol.conservation_defect < 1e-6);
    }

    #[test]
    fn velocity_jump_gives_middle_state() {
        let data = RiemannData::new(0.0, 0.0, 2.0, 0.0);
        let sol = solve_profile(&linear(), &SolverConfig::default(), &data).unwrap();
        assert!((sol.w_star - 0.5).abs() <= 0.05);
    }

    #[test]
    fn representation_pins_endpoints_and_is_monotone() {
        let law = StressLaw::hardening(1.0, 1.0).unwrap();
        let data = RiemannData::new(0.1, 0.2, -0.3, 0.6);
        let cfg = SolverConfig {
            eps: 0.05,
            n_nodes: 1201,
            ..SolverConfig::default()
        };
        let mut grid = ProfileGrid::new(cfg.half_width, 0.0, cfg.n_nodes).unwrap();
        initial_guess(&mut grid, &law, &data);
        let step = apply_t(&grid, &law, &cfg, &data).unwrap();
        let w = &step.grid.w;
        assert_eq!(w[0], data.w_l);
        assert_eq!(*w.last().unwrap(), data.w_r);
        let o = step.grid.origin_index().unwrap();
        let mono = |s: &[f64]| s.windows(2).all(|p| p[1] >= p[0] - 1e-12) || s.windows(2).all(|p| p[1] <= p[0] + 1e-12);
        assert!(mono(&w[..=o]));
        assert!(mono(&w[o..]));
    }

    #[test]
    fn delta_cutoff_values() {
        assert!((delta_cutoff(1.0, 0.125) - 1.0).abs() < 1e-12);
        assert!((delta_cutoff(1.0, 0.01) - (0.04f64 / 0.96).sqrt()).abs() < 1e-12);
        assert!((delta_cutoff(1.0, 0.01) - 0.2041).abs() < 1e-4);
    }

    #[test]
    fn excised_capillary_rejects_small_delta() {
        let cfg = SolverConfig {
            gamma: 0.125,
            ..SolverConfig::default()
        };
        let err = solve_excised(&StressLaw::cubic(), &cfg, &RiemannData::new(0.0, 1.0, 0.1, 1.0), 0.5).unwrap_err();
        assert_eq!(err.name(), "delta_below_cutoff");
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = SolverConfig {
            eps: 0.0,
            ..SolverConfig::default()
        };
        assert!(solve_profile(&linear(), &cfg, &RiemannData::new(0.0, 0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn v_reconstruction_of_constant_data() {
        let mut g = ProfileGrid::new(2.0, 0.0, 101).unwrap();
        g.w = alloc::vec![1.5; g.len()];
        let (v, d) = reconstruct_v(&g, &RiemannData::new(0.2, 1.5, 0.2, 1.5));
        assert!(v.iter().all(|x| *x == 0.2));
        assert_eq!(d, 0.0);
    }
}
