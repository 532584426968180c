//! Wave measures `φ±`.
//!
//! On each half-axis the profile derivative is proportional to a normalized
//! density. With `s(y) = σ_w(w(y))` the viscous density is
//!
//! ```text
//!     φ(y) ∝ exp(-P(y)/ε),   P(y) = ∫ (x - (s(x) - ε)/x) dx,
//! ```
//!
//! and the viscous-capillary (WKB, `δ = γε²`) density is
//!
//! ```text
//!     φ(y) ∝ (4γμ)^(-1/4) exp(p(y)/ε),   μ = s + y²(1/(4γ) - 1) - ε/2,
//!     p(y) = ∫_ρ^y (-x/(2γ) ± sqrt(μ/γ)) dx     (+ on the plus side).
//! ```
//!
//! Both are formed in the log domain with the maximum removed before
//! exponentiation, since the exponents scale like `1/ε`.
//!
//! The `*_field` functions take the speed-squared field `s` directly so the
//! same builders serve the scalar law and the per-family measures of
//! [`crate::nsystem`].

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::constitutive::StressLaw;
use crate::error::{invalid, Error, Result};
use crate::grid::ProfileGrid;
pub use crate::grid::{HalfSupport, Side};
use crate::quad;

/// Normalized density on one half-axis.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveMeasure {
    pub side: Side,
    pub support_nodes: Vec<f64>,
    /// `φ` at the support nodes; integrates to one under the trapezoid rule.
    pub density: Vec<f64>,
    /// `ln φ`, finite everywhere even where `density` underflows to zero.
    pub log_density: Vec<f64>,
    /// Un-normalized log-density without the amplitude prefactor:
    /// `-(P - P_min)/ε` (viscous) or `p(y, ρ)/ε` (capillary).
    pub exponent: Vec<f64>,
    /// `(4γμ)^(-1/4)` in the capillary branch, `1` in the viscous branch.
    pub amplitude_prefactor: Vec<f64>,
    /// Concentration point `ρ±`.
    pub rho: f64,
    /// `ρ` sits on the innermost support node (`±δ` or `±h/2`).
    pub degenerate_minimizer: bool,
    /// All tied global extremizers, innermost first.
    pub rho_candidates: Vec<f64>,
    /// `ε √γ k` for this half-axis (capillary branch only).
    pub phi_error_estimate: Option<f64>,
}

impl WaveMeasure {
    pub fn mass(&self) -> f64 {
        quad::trapezoid(&self.support_nodes, &self.density)
    }

    /// `∫ y φ dy`.
    pub fn first_moment(&self) -> f64 {
        quad::first_moment(&self.support_nodes, &self.density)
    }

    /// `∫ |y| φ dy`.
    pub fn abs_first_moment(&self) -> f64 {
        self.first_moment().abs()
    }

    /// `∫ φ` restricted to `[a, b]` (linear interpolation at the ends).
    pub fn mass_in(&self, a: f64, b: f64) -> f64 {
        let x = &self.support_nodes;
        let f = &self.density;
        let mut total = 0.0;
        for i in 0..x.len().saturating_sub(1) {
            let (x0, x1) = (x[i], x[i + 1]);
            let lo = x0.max(a);
            let hi = x1.min(b);
            if hi <= lo {
                continue;
            }
            let at = |t: f64| f[i] + (f[i + 1] - f[i]) * (t - x0) / (x1 - x0);
            total += 0.5 * (hi - lo) * (at(lo) + at(hi));
        }
        total
    }

    /// `∫_{y_0}^{y} φ` at every support node.
    pub fn cumulative(&self) -> Vec<f64> {
        quad::cumulative(&self.support_nodes, &self.density)
    }

    /// `∫_{y}^{y_last} φ` at every support node.
    pub fn tail(&self) -> Vec<f64> {
        quad::tail(&self.support_nodes, &self.density)
    }

    /// Half-grid estimate of the quadrature error in `∫ y φ`.
    pub fn moment_quadrature_error(&self) -> f64 {
        let yf: Vec<f64> = self
            .support_nodes
            .iter()
            .zip(&self.density)
            .map(|(y, f)| y * f)
            .collect();
        quad::richardson_error(&self.support_nodes, &yf)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(invalid("eps must be positive"))
    }
}

fn check_support(nodes: &[f64]) -> Result<()> {
    if nodes.len() < 2 {
        return Err(Error::InvalidGrid("half-axis support needs at least two nodes".into()));
    }
    if nodes.contains(&0.0) {
        return Err(Error::InvalidGrid(
            "support contains y = 0; apply the origin offset before building a measure".into(),
        ));
    }
    Ok(())
}

/// Viscous exponent `P(y) = ∫ a(x) dx`, `a(y) = y - (s(y) - ε)/y`, based at
/// the first support node.
pub fn viscous_exponent_field(nodes: &[f64], s: &[f64], eps: f64) -> Result<Vec<f64>> {
    check_eps(eps)?;
    check_support(nodes)?;
    let q: Vec<f64> = s.iter().map(|v| v - eps).collect();
    Ok(quad::singular_exponent(nodes, &q))
}

/// Location of the concentration point of a log-density.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoLocation {
    pub rho: f64,
    /// Support index of the extremal node.
    pub node: usize,
    /// `ρ² - s(ρ) + shift` at the returned point.
    pub residual: f64,
    /// Bisection was possible (a sign change brackets the node).
    pub refined: bool,
    pub degenerate: bool,
    pub candidates: Vec<f64>,
}

/// Maximizer of `log_density` refined on `ρ² = s(ρ) - shift`.
///
/// `shift` is `ε` for the viscous and `ε/2` for the capillary branch. Ties
/// are broken toward the smallest `|y|`.
pub fn locate_rho_field(nodes: &[f64], s: &[f64], log_density: &[f64], shift: f64, side: Side) -> RhoLocation {
    let n = nodes.len();
    let max = log_density.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * (1.0 + max.abs());
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&k| {
            let left = k == 0 || log_density[k] >= log_density[k - 1];
            let right = k + 1 == n || log_density[k] >= log_density[k + 1];
            left && right && log_density[k] >= max - tol
        })
        .collect();
    candidates.sort_by(|&a, &b| nodes[a].abs().total_cmp(&nodes[b].abs()));
    let node = candidates[0];
    let inner = match side {
        Side::Minus => n - 1,
        Side::Plus => 0,
    };
    let g = |k: usize, t: f64| {
        // s is linear on the cell [k, k+1]
        let sv = s[k] + (s[k + 1] - s[k]) * (t - nodes[k]) / (nodes[k + 1] - nodes[k]);
        t * t - sv + shift
    };
    let mut best = (nodes[node], nodes[node] * nodes[node] - s[node] + shift, false);
    for k in [node.wrapping_sub(1), node] {
        if k >= n - 1 {
            continue;
        }
        let (mut a, mut b) = (nodes[k], nodes[k + 1]);
        let (ga, gb) = (g(k, a), g(k, b));
        if ga == 0.0 {
            best = (a, 0.0, true);
            break;
        }
        if gb == 0.0 {
            best = (b, 0.0, true);
            break;
        }
        if ga.signum() == gb.signum() {
            continue;
        }
        let mut fa = ga;
        let mut m = 0.5 * (a + b);
        let mut gm = g(k, m);
        for _ in 0..200 {
            m = 0.5 * (a + b);
            gm = g(k, m);
            if gm.abs() <= 1e-13 || (b - a).abs() < 1e-15 {
                break;
            }
            if gm.signum() == fa.signum() {
                a = m;
                fa = gm;
            } else {
                b = m;
            }
        }
        best = (m, gm, true);
        break;
    }
    RhoLocation {
        rho: best.0,
        node,
        residual: best.1,
        refined: best.2,
        degenerate: node == inner && !best.2,
        candidates: candidates.iter().map(|&k| nodes[k]).collect(),
    }
}

/// Normalizes a log-density (max subtracted first) into a measure.
fn assemble(
    side: Side,
    nodes: &[f64],
    exponent: Vec<f64>,
    prefactor: Vec<f64>,
    rho: &RhoLocation,
    phi_error_estimate: Option<f64>,
) -> WaveMeasure {
    let raw: Vec<f64> = exponent.iter().zip(&prefactor).map(|(e, a)| e + a.ln()).collect();
    let top = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let unnorm: Vec<f64> = raw.iter().map(|r| (r - top).exp()).collect();
    let z = quad::trapezoid(nodes, &unnorm);
    let log_z = z.ln() + top;
    let density: Vec<f64> = unnorm.iter().map(|u| u / z).collect();
    let log_density: Vec<f64> = raw.iter().map(|r| r - log_z).collect();
    WaveMeasure {
        side,
        support_nodes: nodes.to_vec(),
        density,
        log_density,
        exponent,
        amplitude_prefactor: prefactor,
        rho: rho.rho,
        degenerate_minimizer: rho.degenerate,
        rho_candidates: rho.candidates.clone(),
        phi_error_estimate,
    }
}

/// Viscous wave measure from a speed-squared field on a support.
pub fn viscous_measure_field(nodes: &[f64], s: &[f64], eps: f64, side: Side) -> Result<WaveMeasure> {
    let p = viscous_exponent_field(nodes, s, eps)?;
    let p_min = p.iter().copied().fold(f64::INFINITY, f64::min);
    let exponent: Vec<f64> = p.iter().map(|v| -(v - p_min) / eps).collect();
    if exponent.iter().any(|e| !e.is_finite()) {
        return Err(Error::NanDetected { iteration: 0 });
    }
    let rho = locate_rho_field(nodes, s, &exponent, eps, side);
    let ones = alloc::vec![1.0; nodes.len()];
    Ok(assemble(side, nodes, exponent, ones, &rho, None))
}

/// `μ(w(y), y) = s + y²(1/(4γ) - 1) - ε/2`.
pub fn mu_field(nodes: &[f64], s: &[f64], eps: f64, gamma: f64) -> Vec<f64> {
    nodes
        .iter()
        .zip(s)
        .map(|(y, sv)| sv + y * y * (0.25 / gamma - 1.0) - 0.5 * eps)
        .collect()
}

fn check_mu(nodes: &[f64], mu: &[f64]) -> Result<()> {
    let bad: Vec<usize> = (0..mu.len()).filter(|&k| !(mu[k] > 0.0)).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::MuNonpositive {
            first_y: nodes[bad[0]],
            nodes: bad,
        })
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 0.25 {
        Ok(())
    } else {
        Err(invalid("capillarity ratio gamma must lie in (0, 1/4)"))
    }
}

/// Integrand of the WKB exponent written without cancellation:
/// `-x/(2γ) ± sqrt(μ/γ) = ±((s - ε/2 - x²)/γ) / (sqrt(μ/γ) ± x/(2γ))`.
fn wkb_integrand(y: f64, s: f64, mu: f64, eps: f64, gamma: f64, side: Side) -> f64 {
    let root = (mu / gamma).sqrt();
    let num = (s - 0.5 * eps - y * y) / gamma;
    match side {
        Side::Plus => num / (root + y / (2.0 * gamma)),
        Side::Minus => -num / (root - y / (2.0 * gamma)),
    }
}

/// WKB exponent `p(y, ρ)` on a support, with `p(ρ, ρ) = 0`.
pub fn wkb_exponent_field(
    nodes: &[f64],
    s: &[f64],
    eps: f64,
    gamma: f64,
    side: Side,
) -> Result<(Vec<f64>, RhoLocation)> {
    check_eps(eps)?;
    check_gamma(gamma)?;
    if nodes.len() < 2 {
        return Err(Error::InvalidGrid("half-axis support needs at least two nodes".into()));
    }
    let mu = mu_field(nodes, s, eps, gamma);
    check_mu(nodes, &mu)?;
    let f: Vec<f64> = (0..nodes.len())
        .map(|k| wkb_integrand(nodes[k], s[k], mu[k], eps, gamma, side))
        .collect();
    let base = quad::cumulative(nodes, &f);
    let loc = locate_rho_field(nodes, s, &base, 0.5 * eps, side);
    // value of the antiderivative at ρ, with f linear on the cell
    let k = loc.node;
    let p_rho = if loc.rho == nodes[k] {
        base[k]
    } else {
        let (a, b) = if loc.rho > nodes[k] { (k, k + 1) } else { (k - 1, k) };
        let t = loc.rho;
        let fa = f[a];
        let ft = fa + (f[b] - fa) * (t - nodes[a]) / (nodes[b] - nodes[a]);
        base[a] + 0.5 * (t - nodes[a]) * (fa + ft)
    };
    let p: Vec<f64> = base.iter().map(|b| b - p_rho).collect();
    Ok((p, loc))
}

/// `k = ∫ μ^(-5/4) |μ'|² + ∫ μ^(-3/2) |μ''|` from nodal finite differences.
pub fn wkb_k(nodes: &[f64], mu: &[f64]) -> f64 {
    let n = nodes.len();
    if n < 3 {
        return 0.0;
    }
    let mut d1 = alloc::vec![0.0; n];
    let mut d2 = alloc::vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = nodes[i] - nodes[i - 1];
        let h1 = nodes[i + 1] - nodes[i];
        d1[i] = (-h1 / (h0 * (h0 + h1))) * mu[i - 1]
            + ((h1 - h0) / (h0 * h1)) * mu[i]
            + (h0 / (h1 * (h0 + h1))) * mu[i + 1];
        d2[i] = 2.0 * (mu[i - 1] / (h0 * (h0 + h1)) - mu[i] / (h0 * h1) + mu[i + 1] / (h1 * (h0 + h1)));
    }
    d1[0] = (mu[1] - mu[0]) / (nodes[1] - nodes[0]);
    d1[n - 1] = (mu[n - 1] - mu[n - 2]) / (nodes[n - 1] - nodes[n - 2]);
    d2[0] = d2[1];
    d2[n - 1] = d2[n - 2];
    let f1: Vec<f64> = (0..n).map(|i| mu[i].powf(-1.25) * d1[i] * d1[i]).collect();
    let f2: Vec<f64> = (0..n).map(|i| mu[i].powf(-1.5) * d2[i].abs()).collect();
    quad::trapezoid(nodes, &f1) + quad::trapezoid(nodes, &f2)
}

/// Viscous-capillary (WKB, leading order) wave measure on a support.
///
/// The correction `Φ` is dropped; its bound `ε √γ k` is stored in
/// [`WaveMeasure::phi_error_estimate`].
pub fn capillary_measure_field(nodes: &[f64], s: &[f64], eps: f64, gamma: f64, side: Side) -> Result<WaveMeasure> {
    let (p, loc) = wkb_exponent_field(nodes, s, eps, gamma, side)?;
    let mu = mu_field(nodes, s, eps, gamma);
    let prefactor: Vec<f64> = mu.iter().map(|m| (4.0 * gamma * m).powf(-0.25)).collect();
    let exponent: Vec<f64> = p.iter().map(|v| v / eps).collect();
    let estimate = eps * gamma.sqrt() * wkb_k(nodes, &mu);
    Ok(assemble(side, nodes, exponent, prefactor, &loc, Some(estimate)))
}

fn law_field(law: &StressLaw, grid: &ProfileGrid, side: Side) -> (HalfSupport, Vec<f64>) {
    let support = grid.support(side);
    let w = grid.on_support(&support, &grid.w);
    let s = w.iter().map(|&x| law.sigma_w(x)).collect();
    (support, s)
}

/// `P(y)` on one half-axis of `grid` using its current `w`.
pub fn viscous_exponent(law: &StressLaw, grid: &ProfileGrid, eps: f64, side: Side) -> Result<Vec<f64>> {
    let (support, s) = law_field(law, grid, side);
    viscous_exponent_field(&support.nodes, &s, eps)
}

/// Global minimizer `ρ` of `P` on one half-axis.
pub fn locate_rho(law: &StressLaw, grid: &ProfileGrid, eps: f64, side: Side) -> Result<RhoLocation> {
    let (support, s) = law_field(law, grid, side);
    let p = viscous_exponent_field(&support.nodes, &s, eps)?;
    let neg: Vec<f64> = p.iter().map(|v| -v / eps).collect();
    Ok(locate_rho_field(&support.nodes, &s, &neg, eps, side))
}

pub fn build_phi_viscous(law: &StressLaw, grid: &ProfileGrid, eps: f64, side: Side) -> Result<WaveMeasure> {
    let (support, s) = law_field(law, grid, side);
    viscous_measure_field(&support.nodes, &s, eps, side)
}

/// `μ` at every grid node; fails with `mu_nonpositive` listing bad nodes.
pub fn wkb_mu(law: &StressLaw, grid: &ProfileGrid, eps: f64, gamma: f64) -> Result<Vec<f64>> {
    check_eps(eps)?;
    check_gamma(gamma)?;
    let s: Vec<f64> = grid.w.iter().map(|&w| law.sigma_w(w)).collect();
    let mu = mu_field(grid.nodes(), &s, eps, gamma);
    check_mu(grid.nodes(), &mu)?;
    Ok(mu)
}

pub fn wkb_exponent(
    law: &StressLaw,
    grid: &ProfileGrid,
    eps: f64,
    gamma: f64,
    side: Side,
) -> Result<(Vec<f64>, RhoLocation)> {
    let (support, s) = law_field(law, grid, side);
    wkb_exponent_field(&support.nodes, &s, eps, gamma, side)
}

pub fn build_phi_capillary(
    law: &StressLaw,
    grid: &ProfileGrid,
    eps: f64,
    gamma: f64,
    side: Side,
) -> Result<WaveMeasure> {
    let (support, s) = law_field(law, grid, side);
    capillary_measure_field(&support.nodes, &s, eps, gamma, side)
}

/// Envelope regime a measure is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeRegime {
    Viscous,
    Capillary,
    /// `min σ_w` does not exceed the shift: no hyperbolic envelope exists.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionFit {
    /// 1: near axis, 2: rising flank, 3: plateau `[λ_m, λ_M]`, 4: far tail.
    pub region: u8,
    pub nodes: usize,
    /// `max φ ε / shape` over the region.
    pub c1: f64,
    /// Exponent constant used in the shape (fitted where none is known).
    pub decay: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub regime: EnvelopeRegime,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub fitted_c1: f64,
    pub regions: Vec<RegionFit>,
    /// Regions whose fitted constant exceeds the threshold, or whose decay
    /// constant is not positive.
    pub violations: Vec<u8>,
    pub passed: bool,
}

/// Threshold on the fitted envelope constant.
pub const ENVELOPE_C1_MAX: f64 = 100.0;

/// Piecewise envelope check of a measure.
///
/// `sw_min`, `sw_max` are the extreme values of `σ_w(w(y))` over the
/// profile. With `gamma = None` the viscous envelope is used
/// (`λ = (σ_w - ε)^(1/2)`), otherwise the capillary one
/// (`λ = (σ_w - ε/2)^(1/2)`). Capillary exponent constants that are not
/// known in closed form are fitted as the largest admissible value.
pub fn envelope_check(measure: &WaveMeasure, sw_min: f64, sw_max: f64, eps: f64, gamma: Option<f64>) -> EnvelopeReport {
    let shift = if gamma.is_some() { 0.5 * eps } else { eps };
    if !(sw_min - shift > 0.0) {
        return EnvelopeReport {
            regime: EnvelopeRegime::NotApplicable,
            lambda_min: f64::NAN,
            lambda_max: (sw_max - shift).max(0.0).sqrt(),
            fitted_c1: f64::INFINITY,
            regions: Vec::new(),
            violations: alloc::vec![1],
            passed: false,
        };
    }
    let lm = (sw_min - shift).sqrt();
    let lmax = (sw_max - shift).sqrt();
    let y: Vec<f64> = measure.support_nodes.iter().map(|v| v.abs()).collect();
    let ln_eps = eps.ln();

    // region membership and log-shape per node; None = fitted below
    let (regime, edge1) = match gamma {
        None => (EnvelopeRegime::Viscous, 0.25 * lm),
        Some(g) => (EnvelopeRegime::Capillary, g.sqrt() * lm),
    };
    let region_of = |t: f64| -> u8 {
        if t <= edge1 {
            1
        } else if t < lm {
            2
        } else if t <= lmax {
            3
        } else {
            4
        }
    };

    // decay constants; capillary regions 1 and 2 are fitted from the exponent
    let mut decay = [0.0f64; 5];
    match gamma {
        None => {
            decay[1] = 0.75 * lm * lm;
            decay[2] = 0.5;
            decay[4] = 0.5;
        }
        Some(_) => {
            decay[4] = 0.5 * lmax;
            for r in [1u8, 2] {
                let mut c = f64::INFINITY;
                for (k, &t) in y.iter().enumerate() {
                    if region_of(t) != r {
                        continue;
                    }
                    let shape = if r == 1 { (t - edge1).abs() } else { (t - lm) * (t - lm) };
                    if shape > 0.0 {
                        // exponent = p/ε, bound p ≤ -C shape
                        c = c.min(-measure.exponent[k] * eps / shape);
                    }
                }
                decay[r as usize] = if c.is_finite() { c } else { 0.0 };
            }
        }
    }

    let log_shape = |t: f64, r: u8| -> f64 {
        match (gamma, r) {
            (_, 3) => 0.0,
            (None, 1) => {
                if t <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    decay[1] / eps * (2.0 * t / lm).ln()
                }
            }
            (None, 2) => -decay[2] * (t - lm) * (t - lm) / eps,
            (None, _) => -decay[4] * (t - lmax) * (t - lmax) / eps,
            (Some(_), 1) => -decay[1] * (t - edge1).abs() / eps,
            (Some(_), 2) => -decay[2] * (t - lm) * (t - lm) / eps,
            (Some(_), _) => -decay[4] * (t - lmax) * (t - lmax) / (eps * t),
        }
    };

    let mut regions: Vec<RegionFit> = (1..=4)
        .map(|r| RegionFit {
            region: r,
            nodes: 0,
            c1: 0.0,
            decay: decay[r as usize],
        })
        .collect();
    for (k, &t) in y.iter().enumerate() {
        let r = region_of(t);
        let ls = log_shape(t, r);
        let log_ratio = measure.log_density[k] + ln_eps - ls;
        let ratio = if ls == f64::NEG_INFINITY { 0.0 } else { log_ratio.exp() };
        let fit = &mut regions[(r - 1) as usize];
        fit.nodes += 1;
        fit.c1 = fit.c1.max(ratio);
    }
    let fitted_c1 = regions.iter().map(|r| r.c1).fold(0.0, f64::max);
    let violations: Vec<u8> = regions
        .iter()
        .filter(|r| r.c1 > ENVELOPE_C1_MAX || (r.nodes > 0 && r.region != 3 && !(r.decay > 0.0)))
        .map(|r| r.region)
        .collect();
    EnvelopeReport {
        regime,
        lambda_min: lm,
        lambda_max: lmax,
        fitted_c1,
        passed: violations.is_empty() && fitted_c1 <= ENVELOPE_C1_MAX,
        regions,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn plus_support(l: f64, n: usize) -> Vec<f64> {
        let h = l / n as f64;
        let mut v = vec![0.5 * h];
        v.extend((1..=n).map(|i| i as f64 * h));
        v
    }

    #[test]
    fn viscous_exponent_closed_form() {
        let nodes: Vec<f64> = (0..=1000).map(|i| 1.0 + i as f64 * 1e-3).collect();
        let s = vec![4.0; nodes.len()];
        let p = viscous_exponent_field(&nodes, &s, 0.04).unwrap();
        let exact = 1.5 - 3.96 * core::f64::consts::LN_2;
        assert!((p[1000] - p[0] - exact).abs() < 1e-12);
        assert!((exact + 1.2448).abs() < 1e-4);
    }

    #[test]
    fn phase_example_exponent_increases() {
        // a(y) = y + c/y with c = 1: s - ε = -1
        let nodes = plus_support(3.0, 600);
        let s = vec![0.04 - 1.0; nodes.len()];
        let p = viscous_exponent_field(&nodes, &s, 0.04).unwrap();
        assert!(p.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rho_closed_form() {
        let nodes = plus_support(6.0, 3000);
        let s = vec![4.0; nodes.len()];
        let m = viscous_measure_field(&nodes, &s, 0.04, Side::Plus).unwrap();
        assert!((m.rho - 3.96f64.sqrt()).abs() < 1e-10);
        assert!(!m.degenerate_minimizer);
    }

    #[test]
    fn degenerate_minimizer_at_excision() {
        let delta = 0.01;
        let nodes: Vec<f64> = (0..=2000).map(|i| delta + i as f64 * (3.0 - delta) / 2000.0).collect();
        let s = vec![0.04 - 1.0; nodes.len()];
        let m = viscous_measure_field(&nodes, &s, 0.04, Side::Plus).unwrap();
        assert_eq!(m.rho, delta);
        assert!(m.degenerate_minimizer);
        // measure sits at the boundary
        assert!(m.mass_in(delta, delta + 0.05) > 0.9);
    }

    #[test]
    fn rejects_nonpositive_eps_and_origin() {
        assert!(viscous_exponent_field(&[0.1, 0.2], &[1.0, 1.0], 0.0).is_err());
        assert!(viscous_exponent_field(&[0.0, 0.2], &[1.0, 1.0], 0.1).is_err());
    }

    #[test]
    fn mu_direct_evaluation() {
        let mu = mu_field(&[1.0], &[4.0], 0.04, 0.125);
        assert!((mu[0] - 4.98).abs() < 1e-14);
    }

    #[test]
    fn mu_nonpositive_is_reported() {
        let nodes = [0.05, 0.1, 0.5];
        let err = capillary_measure_field(&nodes, &[-1.0, -1.0, -1.0], 0.02, 0.125, Side::Plus).unwrap_err();
        match err {
            Error::MuNonpositive { nodes, .. } => assert_eq!(nodes, vec![0, 1, 2]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn capillary_rho_and_zero_at_rho() {
        let nodes = plus_support(6.0, 3000);
        let s = vec![4.0; nodes.len()];
        let (p, loc) = wkb_exponent_field(&nodes, &s, 0.04, 0.125, Side::Plus).unwrap();
        assert!((loc.rho - 3.98f64.sqrt()).abs() < 1e-10);
        assert!((loc.rho - 1.99499).abs() < 1e-5);
        assert!(p.iter().all(|&v| v <= 1e-8));
    }

    #[test]
    fn capillary_minus_side_mirrors_plus() {
        let plus = plus_support(6.0, 1200);
        let minus: Vec<f64> = plus.iter().rev().map(|y| -y).collect();
        let s = vec![4.0; plus.len()];
        let mp = capillary_measure_field(&plus, &s, 0.02, 0.125, Side::Plus).unwrap();
        let mm = capillary_measure_field(&minus, &s, 0.02, 0.125, Side::Minus).unwrap();
        let n = plus.len();
        for k in 0..n {
            assert!((mp.density[k] - mm.density[n - 1 - k]).abs() <= 1e-12 * (1.0 + mp.density[k]));
        }
        assert!((mp.rho + mm.rho).abs() < 1e-12);
    }
}
