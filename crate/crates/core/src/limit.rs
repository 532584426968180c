//! ε → 0 sweeps and the structure of limit profiles: jump detection,
//! Rankine-Hugoniot residuals, wave classification, kinetic sampling and
//! near-axis concentration diagnostics.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::constitutive::StressLaw;
use crate::error::{invalid, Error, Result};
use crate::riemann::{solve_excised, solve_profile, RiemannData, SelfSimilarSolution, SolverConfig};

/// Nodes between a jump core and the inner end of its trace window.
pub const PLATEAU_NODES: usize = 10;
/// Shortest usable trace window.
pub const MIN_PLATEAU: usize = 5;
/// Default factor in the jump threshold.
pub const JUMP_FACTOR: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub eps: Vec<f64>,
    pub solutions: Vec<SelfSimilarSolution>,
    /// `‖w_k - w_{k+1}‖_{L¹(|y| > r0)}`.
    pub distances_w: Vec<f64>,
    pub distances_v: Vec<f64>,
    /// `d_k / d_{k+1}`.
    pub ratios: Vec<f64>,
    /// Every ratio is at least 1.5.
    pub cauchy: bool,
    /// Distances decrease.
    pub monotone: bool,
    pub max_tv_w: f64,
    /// `|w_r - w_l| + (2/c0)|v_r - v_l|`.
    pub tv_bound: f64,
    /// First failing member, if any; later members are not attempted.
    pub failure: Option<(f64, Error)>,
}

/// L¹ distance between two fields on the same grid over `|y| > r0`.
///
/// Cells wider than 1.5 mesh widths (the excised gap) are skipped.
pub fn l1_distance(nodes: &[f64], a: &[f64], b: &[f64], r0: f64, h: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..nodes.len().saturating_sub(1) {
        let (y0, y1) = (nodes[i], nodes[i + 1]);
        if y1 - y0 > 1.5 * h || y0.abs() <= r0 || y1.abs() <= r0 {
            continue;
        }
        total += 0.5 * (y1 - y0) * ((a[i] - b[i]).abs() + (a[i + 1] - b[i + 1]).abs());
    }
    total
}

/// Pairwise distances and verdicts for already computed sweep members.
pub fn assemble_sweep(
    law: &StressLaw,
    data: &RiemannData,
    solutions: Vec<SelfSimilarSolution>,
    r0: f64,
    failure: Option<(f64, Error)>,
) -> SweepReport {
    let mut distances_w = Vec::new();
    let mut distances_v = Vec::new();
    for p in solutions.windows(2) {
        let (a, b) = (&p[0], &p[1]);
        let h = a.grid.mesh_width();
        let y = a.grid.nodes();
        distances_w.push(l1_distance(y, &a.grid.w, &b.grid.w, r0, h));
        distances_v.push(l1_distance(y, &a.grid.v, &b.grid.v, r0, h));
    }
    let ratios: Vec<f64> = distances_w
        .windows(2)
        .map(|d| if d[1] > 0.0 { d[0] / d[1] } else { f64::INFINITY })
        .collect();
    let all_zero = distances_w.iter().all(|d| *d == 0.0);
    let c0 = law.c0();
    SweepReport {
        eps: solutions.iter().map(|s| s.eps).collect(),
        cauchy: all_zero || (!ratios.is_empty() && ratios.iter().all(|r| *r >= 1.5)),
        monotone: distances_w.windows(2).all(|d| d[1] <= d[0]),
        max_tv_w: solutions.iter().map(|s| s.tv_w).fold(0.0, f64::max),
        tv_bound: (data.w_r - data.w_l).abs()
            + if c0 > 0.0 {
                2.0 / c0 * (data.v_r - data.v_l).abs()
            } else {
                f64::INFINITY
            },
        solutions,
        distances_w,
        distances_v,
        ratios,
        failure,
    }
}

/// Solves every member `ε_k` with `δ = γ ε_k²` and compares neighbours.
///
/// `base.excision_delta` is kept, so phase runs sweep the excised problem.
pub fn epsilon_sweep(
    law: &StressLaw,
    base: &SolverConfig,
    data: &RiemannData,
    eps_list: &[f64],
    gamma: f64,
    r0: f64,
) -> Result<SweepReport> {
    if eps_list.is_empty() || eps_list.windows(2).any(|p| p[1] >= p[0]) {
        return Err(invalid("eps list must be non-empty and strictly decreasing"));
    }
    if !(r0 >= 0.0) {
        return Err(invalid("r0 must be non-negative"));
    }
    let mut solutions = Vec::new();
    let mut failure = None;
    for &eps in eps_list {
        let cfg = SolverConfig { eps, gamma, ..*base };
        match solve_profile(law, &cfg, data) {
            Ok(s) => solutions.push(s),
            Err(e) => {
                failure = Some((eps, e));
                break;
            }
        }
    }
    Ok(assemble_sweep(law, data, solutions, r0, failure))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveClass {
    ClassicalLax,
    Nonclassical,
    PhaseBoundary,
    Marginal,
}

impl WaveClass {
    pub fn as_str(self) -> &'static str {
        match self {
            WaveClass::ClassicalLax => "classical_lax",
            WaveClass::Nonclassical => "nonclassical",
            WaveClass::PhaseBoundary => "phase_boundary",
            WaveClass::Marginal => "marginal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpRecord {
    /// Extent of the jump core.
    pub start: f64,
    pub end: f64,
    /// Speed: centroid of `|w'|` over the core.
    pub s: f64,
    pub v_minus: f64,
    pub w_minus: f64,
    pub v_plus: f64,
    pub w_plus: f64,
    /// `|s[w] + [v]|`.
    pub rh_w: f64,
    /// `|s[v] + [σ(w)]|`.
    pub rh_v: f64,
    pub classification: WaveClass,
}

impl JumpRecord {
    pub fn rh_total(&self) -> f64 {
        self.rh_w + self.rh_v
    }

    /// `|s[w] + [v]| + |s[v] + [σ]| ≤ 20 ε (1 + |s|)`.
    pub fn rh_accepted(&self, eps: f64) -> bool {
        self.rh_total() <= 20.0 * eps * (1.0 + self.s.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpReport {
    pub jumps: Vec<JumpRecord>,
    /// Threshold on `|w'|` actually used.
    pub threshold: f64,
    /// `|Σ[w] over cores + Σ∫w' elsewhere - (w_r - w_l)|`.
    pub sum_rule_residual: f64,
}

fn segments(solution: &SelfSimilarSolution) -> Vec<(usize, usize)> {
    let n = solution.grid.len();
    let (a, b) = solution.grid.inner_indices();
    if a == b {
        alloc::vec![(0, n)]
    } else {
        alloc::vec![(0, a + 1), (b, n)]
    }
}

fn derivative_on(y: &[f64], w: &[f64], (lo, hi): (usize, usize), out: &mut [f64]) {
    for i in lo..hi {
        let (a, b) = (if i > lo { i - 1 } else { i }, if i + 1 < hi { i + 1 } else { i });
        if b > a {
            out[i] = (w[b] - w[a]) / (y[b] - y[a]);
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Jump cores are maximal runs of nodes with
/// `|w'| > factor (|w_r - w_l| + |w* - w_l|) / √ε`.
///
/// Traces average `w`, `v` over the nodes `[i0 - 3P, i0 - P]` left of a
/// core starting at `i0` and symmetrically on the right, with
/// `P = PLATEAU_NODES`; windows are clipped at neighbouring cores and at the
/// domain ends. Two cores touching the excised gap from both sides are
/// merged.
pub fn detect_jumps(solution: &SelfSimilarSolution, law: &StressLaw, factor: f64) -> Result<JumpReport> {
    let grid = &solution.grid;
    let y = grid.nodes();
    let (w, v) = (&grid.w, &grid.v);
    let n = y.len();
    let d = &solution.data;
    let scale = (d.w_r - d.w_l).abs() + (solution.w_star - d.w_l).abs();
    let threshold = factor * scale / solution.eps.sqrt();
    let mut dw = alloc::vec![0.0; n];
    let segs = segments(solution);
    for s in &segs {
        derivative_on(y, w, *s, &mut dw);
    }
    let mut cores: Vec<(usize, usize)> = Vec::new();
    if scale > 0.0 {
        for &(lo, hi) in &segs {
            let mut i = lo;
            while i < hi {
                if dw[i].abs() > threshold {
                    let start = i;
                    while i + 1 < hi && dw[i + 1].abs() > threshold {
                        i += 1;
                    }
                    cores.push((start, i));
                }
                i += 1;
            }
        }
    }
    // cores meeting across the excised gap are one wave straddling the axis
    if segs.len() == 2 {
        let (edge_l, edge_r) = (segs[0].1 - 1, segs[1].0);
        if let Some(k) = cores.windows(2).position(|c| c[0].1 == edge_l && c[1].0 == edge_r) {
            cores[k].1 = cores[k + 1].1;
            cores.remove(k + 1);
        }
    }
    let mut jumps = Vec::with_capacity(cores.len());
    for (k, &(i0, i1)) in cores.iter().enumerate() {
        let (mut num, mut den) = (0.0, 0.0);
        for i in i0..=i1 {
            num += y[i] * dw[i].abs();
            den += dw[i].abs();
        }
        let s = num / den;
        let left_floor = if k == 0 { 0 } else { cores[k - 1].1 + 1 };
        let right_ceiling = if k + 1 == cores.len() {
            n - 1
        } else {
            cores[k + 1].0 - 1
        };
        let l_hi = i0.saturating_sub(PLATEAU_NODES);
        let l_lo = i0.saturating_sub(3 * PLATEAU_NODES).max(left_floor);
        let r_lo = (i1 + PLATEAU_NODES).min(n - 1);
        let r_hi = (i1 + 3 * PLATEAU_NODES).min(right_ceiling);
        if l_hi < l_lo + MIN_PLATEAU - 1 || r_hi < r_lo + MIN_PLATEAU - 1 || i0 < PLATEAU_NODES {
            return Err(Error::NoPlateau { location: s });
        }
        let (wm, vm) = (mean(&w[l_lo..=l_hi]), mean(&v[l_lo..=l_hi]));
        let (wp, vp) = (mean(&w[r_lo..=r_hi]), mean(&v[r_lo..=r_hi]));
        let mut rec = JumpRecord {
            start: y[i0],
            end: y[i1],
            s,
            v_minus: vm,
            w_minus: wm,
            v_plus: vp,
            w_plus: wp,
            rh_w: (s * (wp - wm) + (vp - vm)).abs(),
            rh_v: (s * (vp - vm) + (law.sigma(wp) - law.sigma(wm))).abs(),
            classification: WaveClass::Marginal,
        };
        rec.classification = classify_wave(&rec, law, solution.eps);
        jumps.push(rec);
    }
    // jumps counted from their core ends, everything else cell by cell
    let mut in_core = alloc::vec![false; n];
    let mut total = 0.0;
    for &(i0, i1) in &cores {
        total += w[i1] - w[i0];
        for flag in &mut in_core[i0..=i1] {
            *flag = true;
        }
    }
    for i in 0..n - 1 {
        if !(in_core[i] && in_core[i + 1]) {
            total += w[i + 1] - w[i];
        }
    }
    let tails = (w[0] - d.w_l) + (d.w_r - w[n - 1]);
    Ok(JumpReport {
        jumps,
        threshold,
        sum_rule_residual: (total + tails - (d.w_r - d.w_l)).abs(),
    })
}

fn same_component(law: &StressLaw, a: f64, b: f64) -> bool {
    (0..=200).all(|k| law.sigma_w(a + (b - a) * k as f64 / 200.0) > 0.0)
}

/// Phase boundary first, then the `10ε` band around Lax equality, then the
/// Lax inequalities for the family `sign(s)`, `λ = ±√σ_w`.
pub fn classify_wave(jump: &JumpRecord, law: &StressLaw, eps: f64) -> WaveClass {
    let (wm, wp) = (jump.w_minus, jump.w_plus);
    if law.sigma_w(wm) <= 0.0 || law.sigma_w(wp) <= 0.0 || !same_component(law, wm, wp) {
        return WaveClass::PhaseBoundary;
    }
    let sign = if jump.s >= 0.0 { 1.0 } else { -1.0 };
    let lam = |w: f64| sign * law.sigma_w(w).sqrt();
    let tol = 10.0 * eps;
    let behind = jump.s - lam(wp);
    let ahead = lam(wm) - jump.s;
    if behind >= -tol && ahead >= -tol && (behind.abs() <= tol || ahead.abs() <= tol) {
        WaveClass::Marginal
    } else if behind >= 0.0 && ahead >= 0.0 {
        WaveClass::ClassicalLax
    } else {
        WaveClass::Nonclassical
    }
}

/// Excision used for capillary phase runs: the smallest `δ` with
/// `μ ≥ ε/2` whenever `σ_w ≥ -c`.
///
/// At `δ₀` itself `μ` only stays above `-ε/2`.
pub fn kinetic_delta(c_lower: f64, gamma: f64, eps: f64) -> f64 {
    (4.0 * gamma * (c_lower + eps) / (1.0 - 4.0 * gamma)).sqrt()
}

#[derive(Debug, Clone)]
pub struct KineticRow {
    pub data_index: usize,
    pub gamma: f64,
    pub delta: f64,
    pub outcome: core::result::Result<Vec<JumpRecord>, Error>,
}

impl KineticRow {
    /// First phase-boundary record, if one was detected.
    pub fn phase_boundary(&self) -> Option<&JumpRecord> {
        self.outcome
            .as_ref()
            .ok()?
            .iter()
            .find(|j| j.classification == WaveClass::PhaseBoundary)
    }
}

/// Excised capillary solves for every `(data, γ)` pair, reporting detected
/// waves. Member failures are kept in the table.
pub fn kinetic_sample(
    law: &StressLaw,
    base: &SolverConfig,
    data_family: &[RiemannData],
    gamma_list: &[f64],
    eps: f64,
) -> Vec<KineticRow> {
    let mut rows = Vec::new();
    for (i, data) in data_family.iter().enumerate() {
        for &gamma in gamma_list {
            let delta = kinetic_delta(law.c_lower(), gamma, eps);
            let cfg = SolverConfig { eps, gamma, ..*base };
            let outcome = solve_excised(law, &cfg, data, delta)
                .and_then(|s| detect_jumps(&s, law, JUMP_FACTOR))
                .map(|r| r.jumps);
            rows.push(KineticRow {
                data_index: i,
                gamma,
                delta,
                outcome,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationRow {
    pub delta: f64,
    /// `sup |y w|` over `δ ≤ |y| ≤ 1`.
    pub sup_yw: f64,
    /// `∫ |y| |dw|`.
    pub weighted_tv: f64,
    pub tv_w: f64,
    pub tv_v: f64,
    /// `2 + sup (σ_w - ε)⁺^(1/2)` over the profile.
    pub c1: f64,
    /// `|v_r - v_l| + C₁ |w_r - w_l|`.
    pub v_bound: f64,
    /// Sign changes of `w'` on `δ ≤ |y| ≤ 1`.
    pub oscillations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub rows: Vec<ConcentrationRow>,
    pub sup_bounded: bool,
    pub weighted_bounded: bool,
    pub tv_v_bounded: bool,
    /// Unweighted `tv_w` increases at every step of the δ-sequence
    /// (reported, not a failure).
    pub tv_w_grows: bool,
}

fn ratios_bounded(values: &[f64]) -> bool {
    values.windows(2).all(|p| {
        let (a, b) = (p[0], p[1]);
        if a <= f64::EPSILON {
            b <= f64::EPSILON
        } else {
            b / a <= 2.0
        }
    })
}

fn row(solution: &SelfSimilarSolution, law: &StressLaw) -> ConcentrationRow {
    let grid = &solution.grid;
    let y = grid.nodes();
    let d = &solution.data;
    let delta = grid.excision();
    let lam = grid
        .w
        .iter()
        .map(|&w| (law.sigma_w(w) - solution.eps).max(0.0).sqrt())
        .fold(0.0, f64::max);
    let c1 = 2.0 + lam;
    let mut oscillations = 0;
    let mut last = 0.0f64;
    for i in 0..y.len() - 1 {
        let mid = 0.5 * (y[i] + y[i + 1]);
        if mid.abs() < delta || mid.abs() > 1.0 || y[i + 1] - y[i] > 1.5 * grid.mesh_width() {
            continue;
        }
        let dw = grid.w[i + 1] - grid.w[i];
        if dw != 0.0 {
            if last != 0.0 && dw.signum() != last.signum() {
                oscillations += 1;
            }
            last = dw;
        }
    }
    ConcentrationRow {
        delta,
        sup_yw: solution.near_axis_sup,
        weighted_tv: solution.weighted_tv_w,
        tv_w: solution.tv_w,
        tv_v: solution.tv_v,
        c1,
        v_bound: (d.v_r - d.v_l).abs() + c1 * (d.w_r - d.w_l).abs(),
        oscillations,
    }
}

/// Diagnostics along excised solves ordered by decreasing `δ`.
pub fn concentration_diagnostics(solutions: &[SelfSimilarSolution], law: &StressLaw) -> ConcentrationReport {
    let rows: Vec<ConcentrationRow> = solutions.iter().map(|s| row(s, law)).collect();
    let sup: Vec<f64> = rows.iter().map(|r| r.sup_yw).collect();
    let wtv: Vec<f64> = rows.iter().map(|r| r.weighted_tv).collect();
    ConcentrationReport {
        sup_bounded: ratios_bounded(&sup),
        weighted_bounded: ratios_bounded(&wtv),
        tv_v_bounded: rows.iter().all(|r| r.tv_v <= r.v_bound * (1.0 + 1e-12)),
        tv_w_grows: rows.len() > 1 && rows.windows(2).all(|p| p[1].tv_w > p[0].tv_w),
        rows,
    }
}

/// Excised solves at `δ₀ 2^(-j)`, `j = 0..count`.
pub fn excision_sequence(
    law: &StressLaw,
    config: &SolverConfig,
    data: &RiemannData,
    delta0: f64,
    count: usize,
) -> Result<Vec<SelfSimilarSolution>> {
    (0..count)
        .map(|j| solve_excised(law, config, data, delta0 / (1u64 << j) as f64))
        .collect()
}
