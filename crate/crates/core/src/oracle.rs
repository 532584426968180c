//! Brute-force time integration of
//!
//! ```text
//!     v_t - σ(w)_x = ε t v_xx - δ t² w_xxx,    w_t - v_x = 0,
//! ```
//!
//! whose Riemann solutions are exactly self-similar, so that `w(t, y t)`
//! can be compared with the profile computed in `y`.
//!
//! Cell averages on `[-X, X]`, central interface fluxes, two clamped ghost
//! cells on each side and SSP-RK3 in time.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::constitutive::StressLaw;
use crate::error::{invalid, Error, Result};
use crate::riemann::{RiemannData, SelfSimilarSolution};

const GHOST: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub eps: f64,
    /// Capillarity `δ` (`γ ε²` for a matched comparison).
    pub delta: f64,
    /// Half-width `X` of the domain.
    pub half_width: f64,
    pub cells: usize,
    pub t_final: f64,
    pub cfl: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            eps: 0.02,
            delta: 0.0,
            half_width: 10.0,
            cells: 2000,
            t_final: 2.0,
            cfl: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConservationAudit {
    pub w_initial: f64,
    pub w_final: f64,
    /// `∫ (F_w(X) - F_w(-X)) dt`.
    pub w_boundary_flux: f64,
    /// `|w_final - w_initial - w_boundary_flux|` relative to `∫|w(0)|`.
    pub w_defect: f64,
    pub v_initial: f64,
    pub v_final: f64,
    pub v_boundary_flux: f64,
    pub v_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    /// Cell centres.
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub t: f64,
    pub steps: usize,
    pub audit: ConservationAudit,
}

struct Scheme<'a> {
    law: &'a StressLaw,
    data: RiemannData,
    eps: f64,
    delta: f64,
    h: f64,
    n: usize,
}

impl Scheme<'_> {
    /// Copies interior values into a buffer with clamped ghosts.
    fn padded(&self, u: &[f64], left: f64, right: f64) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n + 2 * GHOST);
        p.extend([left; GHOST]);
        p.extend_from_slice(u);
        p.extend([right; GHOST]);
        p
    }

    /// Interface fluxes `F_{i+1/2}` for `i = -1..n` (n + 1 values).
    fn fluxes(&self, v: &[f64], w: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
        let d = &self.data;
        let vp = self.padded(v, d.v_l, d.v_r);
        let wp = self.padded(w, d.w_l, d.w_r);
        let h = self.h;
        let visc = self.eps * t / h;
        let cap = self.delta * t * t / (2.0 * h * h);
        let mut fv = Vec::with_capacity(self.n + 1);
        let mut fw = Vec::with_capacity(self.n + 1);
        for k in 0..=self.n {
            // interface between padded cells j and j + 1
            let j = k + GHOST - 1;
            let sig = 0.5 * (self.law.sigma(wp[j]) + self.law.sigma(wp[j + 1]));
            let mut f = sig + visc * (vp[j + 1] - vp[j]);
            if cap != 0.0 {
                f -= cap * (wp[j + 2] - wp[j + 1] - wp[j] + wp[j - 1]);
            }
            fv.push(f);
            fw.push(0.5 * (vp[j] + vp[j + 1]));
        }
        (fv, fw)
    }

    /// Right-hand sides and the net boundary fluxes `(F_v, F_w)` at `t`.
    fn rhs(&self, v: &[f64], w: &[f64], t: f64) -> (Vec<f64>, Vec<f64>, f64, f64) {
        let (fv, fw) = self.fluxes(v, w, t);
        let inv = 1.0 / self.h;
        let dv = (0..self.n).map(|i| (fv[i + 1] - fv[i]) * inv).collect();
        let dw = (0..self.n).map(|i| (fw[i + 1] - fw[i]) * inv).collect();
        (dv, dw, fv[self.n] - fv[0], fw[self.n] - fw[0])
    }
}

fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

/// Largest characteristic speed over the data range.
fn speed_bound(law: &StressLaw, data: &RiemannData) -> f64 {
    let (lo, hi) = (data.w_l.min(data.w_r), data.w_l.max(data.w_r));
    let mut s = law.c0_sq().abs();
    for k in 0..=200 {
        s = s.max(law.sigma_w(lo + (hi - lo) * k as f64 / 200.0).abs());
    }
    s.sqrt().max(1e-12)
}

/// Integrates from mollified Riemann data at `t = 0` to `t_final`.
pub fn evolve(law: &StressLaw, data: &RiemannData, config: &OracleConfig) -> Result<Evolution> {
    data.validate()?;
    let OracleConfig {
        eps,
        delta,
        half_width: x_max,
        cells: n,
        t_final,
        cfl,
    } = *config;
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::CflViolation(format!("cfl = {cfl} must lie in (0, 1]")));
    }
    if !(eps > 0.0) || delta < 0.0 || !(t_final > 0.0) || !(x_max > 0.0) || n < 8 {
        return Err(invalid(
            "oracle needs eps > 0, delta >= 0, t_final > 0, X > 0 and at least 8 cells",
        ));
    }
    let lam = speed_bound(law, data);
    if lam * t_final >= 0.9 * x_max {
        return Err(Error::InvalidParameter(format!(
            "waves reach the boundary: max speed {lam} times t_final {t_final} exceeds 0.9 X = {}",
            0.9 * x_max
        )));
    }
    let h = 2.0 * x_max / n as f64;
    let x: Vec<f64> = (0..n).map(|i| -x_max + (i as f64 + 0.5) * h).collect();
    let ramp = |xi: f64| smoothstep((xi + 2.0 * h) / (4.0 * h));
    let mut v: Vec<f64> = x
        .iter()
        .map(|&xi| data.v_l + (data.v_r - data.v_l) * ramp(xi))
        .collect();
    let mut w: Vec<f64> = x
        .iter()
        .map(|&xi| data.w_l + (data.w_r - data.w_l) * ramp(xi))
        .collect();
    let c0 = law.c0();
    let lambda0 = data.w_l.abs().max(data.w_r.abs())
        + if c0 > 0.0 {
            (data.v_r - data.v_l).abs() / c0
        } else {
            (data.v_r - data.v_l).abs()
        };
    let scheme = Scheme {
        law,
        data: *data,
        eps,
        delta,
        h,
        n,
    };
    let sum = |u: &[f64]| h * u.iter().sum::<f64>();
    let abs_sum = |u: &[f64]| h * u.iter().map(|a| a.abs()).sum::<f64>();
    let mut audit = ConservationAudit {
        w_initial: sum(&w),
        v_initial: sum(&v),
        ..ConservationAudit::default()
    };
    let (w_scale, v_scale) = (abs_sum(&w), abs_sum(&v));
    let mut t = 0.0;
    let mut steps = 0;
    while t < t_final {
        let t_end = (t + h / lam).min(t_final);
        let mut dt = h / lam;
        if eps > 0.0 {
            dt = dt.min(h * h / (2.0 * eps * t_end));
        }
        if delta > 0.0 {
            dt = dt.min(h.powi(4) / (8.0 * delta * t_end * t_end));
        }
        dt = (cfl * dt).min(t_final - t);
        // SSP-RK3
        let (a0v, a0w, b0v, b0w) = scheme.rhs(&v, &w, t);
        let v1: Vec<f64> = (0..n).map(|i| v[i] + dt * a0v[i]).collect();
        let w1: Vec<f64> = (0..n).map(|i| w[i] + dt * a0w[i]).collect();
        let (a1v, a1w, b1v, b1w) = scheme.rhs(&v1, &w1, t + dt);
        let v2: Vec<f64> = (0..n).map(|i| 0.75 * v[i] + 0.25 * (v1[i] + dt * a1v[i])).collect();
        let w2: Vec<f64> = (0..n).map(|i| 0.75 * w[i] + 0.25 * (w1[i] + dt * a1w[i])).collect();
        let (a2v, a2w, b2v, b2w) = scheme.rhs(&v2, &w2, t + 0.5 * dt);
        for i in 0..n {
            v[i] = v[i] / 3.0 + 2.0 / 3.0 * (v2[i] + dt * a2v[i]);
            w[i] = w[i] / 3.0 + 2.0 / 3.0 * (w2[i] + dt * a2w[i]);
        }
        audit.v_boundary_flux += dt * (b0v / 6.0 + b1v / 6.0 + 2.0 / 3.0 * b2v);
        audit.w_boundary_flux += dt * (b0w / 6.0 + b1w / 6.0 + 2.0 / 3.0 * b2w);
        t += dt;
        steps += 1;
        if w.iter().chain(&v).any(|a| !a.is_finite()) || w.iter().any(|a| a.abs() > 10.0 * lambda0) {
            return Err(Error::BlowupDetected { time: t });
        }
    }
    audit.w_final = sum(&w);
    audit.v_final = sum(&v);
    let defect = |a: f64, b: f64, f: f64, scale: f64| {
        let d = (b - a - f).abs();
        if scale > 0.0 {
            d / scale
        } else {
            d
        }
    };
    audit.w_defect = defect(audit.w_initial, audit.w_final, audit.w_boundary_flux, w_scale);
    audit.v_defect = defect(audit.v_initial, audit.v_final, audit.v_boundary_flux, v_scale);
    Ok(Evolution {
        x,
        v,
        w,
        t,
        steps,
        audit,
    })
}

fn interpolate(x: &[f64], f: &[f64], at: f64) -> f64 {
    let n = x.len();
    if at <= x[0] {
        return f[0];
    }
    if at >= x[n - 1] {
        return f[n - 1];
    }
    let h = x[1] - x[0];
    let k = (((at - x[0]) / h) as usize).min(n - 2);
    let s = (at - x[k]) / h;
    f[k] + s * (f[k + 1] - f[k])
}

impl Evolution {
    /// `w(t, y t)` and `v(t, y t)` by linear interpolation.
    pub fn rescaled(&self, y: f64) -> (f64, f64) {
        let x = y * self.t;
        (interpolate(&self.x, &self.w, x), interpolate(&self.x, &self.v, x))
    }

    /// L¹ distance in `x` to another run, interpolated on this run's cells.
    pub fn l1_to(&self, other: &Evolution) -> (f64, f64) {
        let h = self.x[1] - self.x[0];
        let mut dw = 0.0;
        let mut dv = 0.0;
        for (i, &xi) in self.x.iter().enumerate() {
            dw += h * (self.w[i] - interpolate(&other.x, &other.w, xi)).abs();
            dv += h * (self.v[i] - interpolate(&other.x, &other.v, xi)).abs();
        }
        (dw, dv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    /// `∫_{|y|>r0} |w_evolved(y) - w(y)| dy`.
    pub distance_w: f64,
    pub distance_v: f64,
    /// `|w_r - w_l|`, for relative statements.
    pub jump_w: f64,
}

/// L¹ distance in `y = x/t` between an evolved state and a profile, over
/// the profile nodes with `|y| > r0` that the evolution domain covers.
pub fn self_similar_compare(evolution: &Evolution, solution: &SelfSimilarSolution, r0: f64) -> Comparison {
    let y = solution.grid.nodes();
    let h = solution.grid.mesh_width();
    let reach = evolution.x[evolution.x.len() - 1] / evolution.t;
    let mut dw = vec![0.0; y.len()];
    let mut dv = vec![0.0; y.len()];
    for (k, &yk) in y.iter().enumerate() {
        let (we, ve) = evolution.rescaled(yk);
        dw[k] = (we - solution.grid.w[k]).abs();
        dv[k] = (ve - solution.grid.v[k]).abs();
    }
    let mut distance_w = 0.0;
    let mut distance_v = 0.0;
    for i in 0..y.len() - 1 {
        let (a, b) = (y[i], y[i + 1]);
        if b - a > 1.5 * h || a.abs() <= r0 || b.abs() <= r0 || a.abs() > reach || b.abs() > reach {
            continue;
        }
        distance_w += 0.5 * (b - a) * (dw[i] + dw[i + 1]);
        distance_v += 0.5 * (b - a) * (dv[i] + dv[i + 1]);
    }
    Comparison {
        distance_w,
        distance_v,
        jump_w: (solution.data.w_r - solution.data.w_l).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_state_is_kept() {
        let law = StressLaw::linear(2.0).unwrap();
        let cfg = OracleConfig {
            cells: 200,
            t_final: 0.5,
            ..OracleConfig::default()
        };
        let e = evolve(&law, &RiemannData::new(0.3, -0.2, 0.3, -0.2), &cfg).unwrap();
        assert!(e.w.iter().all(|w| (w + 0.2).abs() < 1e-14));
        assert!(e.v.iter().all(|v| (v - 0.3).abs() < 1e-14));
    }

    #[test]
    fn rejects_bad_cfl_and_small_domain() {
        let law = StressLaw::linear(2.0).unwrap();
        let d = RiemannData::new(0.0, 0.0, 0.0, 1.0);
        let bad = OracleConfig {
            cfl: 1.5,
            ..OracleConfig::default()
        };
        assert_eq!(evolve(&law, &d, &bad).unwrap_err().name(), "cfl_violation");
        let small = OracleConfig {
            half_width: 2.0,
            ..OracleConfig::default()
        };
        assert!(evolve(&law, &d, &small).is_err());
    }

    #[test]
    fn linear_waves_travel_at_sound_speed() {
        let law = StressLaw::linear(2.0).unwrap();
        let cfg = OracleConfig {
            eps: 0.01,
            half_width: 4.0,
            cells: 800,
            t_final: 1.0,
            ..OracleConfig::default()
        };
        let e = evolve(&law, &RiemannData::new(0.0, 0.0, 0.0, 1.0), &cfg).unwrap();
        // w = 1/2 between the waves, 0 and 1 outside
        assert!((e.rescaled(0.0).0 - 0.5).abs() < 0.01);
        assert!((e.rescaled(-3.0).0).abs() < 0.01);
        assert!((e.rescaled(3.0).0 - 1.0).abs() < 0.01);
        assert!((e.rescaled(-2.0).0 - 0.25).abs() < 0.05);
        assert!(e.audit.w_defect < 1e-6 && e.audit.v_defect < 1e-6);
    }
}
