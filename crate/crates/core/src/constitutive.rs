//! Stress laws `σ(w)` for the p-system.
//!
//! A law is immutable once built and cheap to clone. Besides `σ` and `σ_w` it
//! carries the regime constants used by the solvers:
//!
//! * `c0_sq`: a lower bound for `σ_w` on the hyperbolic working range,
//! * `c_lower`: a constant `c ≥ 0` with `σ_w ≥ -c` everywhere,
//! * `growth`: optional `(c1, η)` with `|σ_w(w)| ≤ c1 |w|^(2-η)` for `|w| > 1`.

use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    /// `σ = c0² w`
    Linear,
    /// `σ = a w + b w³`
    Hardening,
    /// `σ = w³ - w`, hyperbolic for `|w| > 1/√3`
    Cubic,
    /// Monotone cubic interpolant of tabulated `(w, σ)` pairs.
    Custom,
}

impl LawKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LawKind::Linear => "linear",
            LawKind::Hardening => "hardening",
            LawKind::Cubic => "cubic",
            LawKind::Custom => "custom",
        }
    }
}

impl core::str::FromStr for LawKind {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "linear" => Ok(LawKind::Linear),
            "hardening" => Ok(LawKind::Hardening),
            "cubic" => Ok(LawKind::Cubic),
            "custom" => Ok(LawKind::Custom),
            other => Err(alloc::format!("unknown law kind `{other}`")),
        }
    }
}

/// Growth metadata `|σ_w(w)| ≤ c1 |w|^(2-η)` on `|w| > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub c1: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StressLaw {
    kind: LawKind,
    params: Vec<f64>,
    table: Option<Pchip>,
    c0_sq: f64,
    c_lower: f64,
    growth: Option<Growth>,
}

impl StressLaw {
    /// `σ(w) = c0² w`.
    pub fn linear(c0: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(invalid("linear law needs c0 > 0"));
        }
        Ok(StressLaw {
            kind: LawKind::Linear,
            params: alloc::vec![c0],
            table: None,
            c0_sq: c0 * c0,
            c_lower: 0.0,
            growth: Some(Growth { c1: c0 * c0, eta: 1.0 }),
        })
    }

    /// `σ(w) = a w + b w³` with `a > 0`, `b ≥ 0`.
    pub fn hardening(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return Err(invalid("hardening law needs a > 0 and b >= 0"));
        }
        Ok(StressLaw {
            kind: LawKind::Hardening,
            params: alloc::vec![a, b],
            table: None,
            c0_sq: a,
            c_lower: 0.0,
            growth: Some(Growth {
                c1: a + 3.0 * b,
                eta: 0.0,
            }),
        })
    }

    /// `σ(w) = w³ - w`.
    ///
    /// `c0_sq = 2` is the bound `inf_{|w| ≥ 1} σ_w`. The growth entry is the
    /// `(3, 0)` marker: the law grows exactly quadratically in `σ_w`.
    pub fn cubic() -> Self {
        StressLaw {
            kind: LawKind::Cubic,
            params: Vec::new(),
            table: None,
            c0_sq: 2.0,
            c_lower: 1.0,
            growth: Some(Growth { c1: 3.0, eta: 0.0 }),
        }
    }

    /// Monotone (Fritsch-Carlson) cubic interpolant through `(w_i, σ_i)`.
    ///
    /// Outside the table the law is extended linearly with the end slopes.
    pub fn tabulated(w: &[f64], sigma: &[f64]) -> Result<Self> {
        let table = Pchip::new(w, sigma)?;
        let n = 4 * w.len().max(250);
        let (lo, hi) = (w[0], w[w.len() - 1]);
        let mut min_d = f64::INFINITY;
        for i in 0..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            min_d = min_d.min(table.deriv(x));
        }
        Ok(StressLaw {
            kind: LawKind::Custom,
            params: Vec::new(),
            table: Some(table),
            c0_sq: min_d.max(0.0),
            c_lower: (-min_d).max(0.0),
            growth: None,
        })
    }

    /// Builds a law from a kind name and its parameter list.
    pub fn from_kind(kind: LawKind, params: &[f64]) -> Result<Self> {
        match kind {
            LawKind::Linear => Self::linear(*params.first().unwrap_or(&1.0)),
            LawKind::Hardening => Self::hardening(*params.first().unwrap_or(&1.0), *params.get(1).unwrap_or(&1.0)),
            LawKind::Cubic => Ok(Self::cubic()),
            LawKind::Custom => Err(invalid("custom laws are built from a table")),
        }
    }

    pub fn with_growth(mut self, c1: f64, eta: f64) -> Self {
        self.growth = Some(Growth { c1, eta });
        self
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn c0_sq(&self) -> f64 {
        self.c0_sq
    }

    pub fn c0(&self) -> f64 {
        self.c0_sq.sqrt()
    }

    pub fn c_lower(&self) -> f64 {
        self.c_lower
    }

    pub fn growth(&self) -> Option<Growth> {
        self.growth
    }

    /// True when `σ_w ≥ c0² > 0` everywhere, i.e. the law has no elliptic
    /// region.
    pub fn is_uniformly_hyperbolic(&self) -> bool {
        self.c_lower == 0.0 && self.c0_sq > 0.0
    }

    pub fn sigma(&self, w: f64) -> f64 {
        match self.kind {
            LawKind::Linear => self.c0_sq * w,
            LawKind::Hardening => self.params[0] * w + self.params[1] * w * w * w,
            LawKind::Cubic => w * w * w - w,
            LawKind::Custom => self.table.as_ref().map_or(0.0, |t| t.eval(w)),
        }
    }

    pub fn sigma_w(&self, w: f64) -> f64 {
        match self.kind {
            LawKind::Linear => self.c0_sq,
            LawKind::Hardening => self.params[0] + 3.0 * self.params[1] * w * w,
            LawKind::Cubic => 3.0 * w * w - 1.0,
            LawKind::Custom => self.table.as_ref().map_or(0.0, |t| t.deriv(w)),
        }
    }

    pub fn sigma_ww(&self, w: f64) -> f64 {
        match self.kind {
            LawKind::Linear => 0.0,
            LawKind::Hardening => 6.0 * self.params[1] * w,
            LawKind::Cubic => 6.0 * w,
            LawKind::Custom => {
                let h = 1e-5;
                (self.sigma_w(w + h) - self.sigma_w(w - h)) / (2.0 * h)
            }
        }
    }
}

/// Monotone piecewise cubic Hermite interpolant.
#[derive(Debug, Clone, PartialEq)]
struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(invalid("a law table needs at least two (w, sigma) rows"));
        }
        if x.windows(2).any(|p| !(p[1] > p[0])) || y.iter().any(|v| !v.is_finite()) {
            return Err(invalid("law table w column must be strictly increasing and finite"));
        }
        let h: Vec<f64> = x.windows(2).map(|p| p[1] - p[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = alloc::vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Pchip {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        })
    }

    fn cell(&self, t: f64) -> usize {
        let n = self.x.len();
        match self
            .x
            .binary_search_by(|v| v.partial_cmp(&t).unwrap_or(core::cmp::Ordering::Less))
        {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0] + self.d[0] * (t - self.x[0]);
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1] + self.d[n - 1] * (t - self.x[n - 1]);
        }
        let k = self.cell(t);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.y[k]
            + (s3 - 2.0 * s2 + s) * h * self.d[k]
            + (-2.0 * s3 + 3.0 * s2) * self.y[k + 1]
            + (s3 - s2) * h * self.d[k + 1]
    }

    fn deriv(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.d[0];
        }
        if t >= self.x[n - 1] {
            return self.d[n - 1];
        }
        let k = self.cell(t);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        (6.0 * s2 - 6.0 * s) / h * self.y[k]
            + (3.0 * s2 - 4.0 * s + 1.0) * self.d[k]
            + (-6.0 * s2 + 6.0 * s) / h * self.y[k + 1]
            + (3.0 * s2 - 2.0 * s) * self.d[k + 1]
    }
}

fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() || m0 == 0.0 {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

const REGION_SAMPLES: usize = 10_001;

/// Maximal sub-intervals of `[lo, hi]` on which `σ_w > 0`.
///
/// Sign changes are located on a 10 001-point sample and then bisected to
/// `1e-13`. An empty result means the range is fully elliptic (or
/// degenerate, `σ_w ≡ 0`).
pub fn hyperbolic_region(law: &StressLaw, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return out;
    }
    let n = REGION_SAMPLES - 1;
    let at = |i: usize| lo + (hi - lo) * i as f64 / n as f64;
    let positive = |w: f64| law.sigma_w(w) > 0.0;
    let mut start: Option<f64> = if positive(lo) { Some(lo) } else { None };
    for i in 0..n {
        let (a, b) = (at(i), at(i + 1));
        match (positive(a), positive(b)) {
            (false, true) => start = Some(bisect_sign(law, a, b)),
            (true, false) => {
                let end = bisect_sign(law, a, b);
                if let Some(s) = start.take() {
                    out.push((s, end));
                }
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, hi));
    }
    out
}

fn bisect_sign(law: &StressLaw, mut a: f64, mut b: f64) -> f64 {
    let fa_pos = law.sigma_w(a) > 0.0;
    for _ in 0..200 {
        if b - a <= 1e-13 {
            break;
        }
        let m = 0.5 * (a + b);
        if (law.sigma_w(m) > 0.0) == fa_pos {
            a = m;
        } else {
            b = m;
        }
    }
    // report whichever bracket end has the smaller |σ_w|
    if law.sigma_w(a).abs() <= law.sigma_w(b).abs() {
        a
    } else {
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthReport {
    pub satisfied: bool,
    pub worst_ratio: f64,
    pub c1: f64,
    pub eta: f64,
}

/// Samples `|σ_w(w)| / |w|^(2-η)` on `1 < |w| ≤ w_max` against the law's
/// growth metadata (or the `(3, 0)` marker when the law carries none).
pub fn growth_check(law: &StressLaw, w_max: f64) -> GrowthReport {
    let Growth { c1, eta } = law.growth().unwrap_or(Growth { c1: 3.0, eta: 0.0 });
    let mut worst = 0.0f64;
    if w_max > 1.0 {
        let n = REGION_SAMPLES - 1;
        for i in 1..=n {
            let m = 1.0 + (w_max - 1.0) * i as f64 / n as f64;
            for w in [m, -m] {
                let ratio = law.sigma_w(w).abs() / w.abs().powf(2.0 - eta);
                worst = worst.max(ratio);
            }
        }
    }
    GrowthReport {
        satisfied: worst <= c1 * (1.0 + 1e-12),
        worst_ratio: worst,
        c1,
        eta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn cubic_region_matches_bisection_oracle() {
        let root = bisect_root(|w| 3.0 * w * w - 1.0, 0.0, 1.0);
        assert!((root - 0.577_350_269_189_625_8).abs() < 1e-15);
        let r = hyperbolic_region(&StressLaw::cubic(), -2.0, 2.0);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].0, -2.0);
        assert!((r[0].1 + root).abs() < 1e-10);
        assert!((r[1].0 - root).abs() < 1e-10);
        assert_eq!(r[1].1, 2.0);
        for (a, b) in [r[0].1, r[1].0].iter().map(|&e| (e, e)) {
            assert!(StressLaw::cubic().sigma_w(a).abs() <= 1e-9, "{b}");
        }
    }

    #[test]
    fn linear_region_is_full_range() {
        let law = StressLaw::linear(2.0).unwrap();
        assert_eq!(hyperbolic_region(&law, -3.0, 5.0), alloc::vec![(-3.0, 5.0)]);
    }

    #[test]
    fn degenerate_table_is_elliptic() {
        let law = StressLaw::tabulated(&[-1.0, 0.0, 1.0], &[2.0, 2.0, 2.0]).unwrap();
        assert!(hyperbolic_region(&law, -1.0, 1.0).is_empty());
    }

    #[test]
    fn growth_examples() {
        let cubic = growth_check(&StressLaw::cubic(), 10.0);
        assert!(cubic.satisfied && cubic.worst_ratio <= 3.0);
        let lin = growth_check(&StressLaw::linear(2.0).unwrap(), 100.0);
        assert!(lin.satisfied);
        assert_eq!((lin.c1, lin.eta), (4.0, 1.0));

        let w: Vec<f64> = (0..=400).map(|i| -12.0 + 24.0 * i as f64 / 400.0).collect();
        let s: Vec<f64> = w.iter().map(|x| x.powi(5)).collect();
        let quintic = StressLaw::tabulated(&w, &s).unwrap().with_growth(5.0, 0.0);
        let rep = growth_check(&quintic, 10.0);
        assert!(!rep.satisfied);
        // 5 w⁴ / w² peaks at w = 10
        assert!((rep.worst_ratio - 500.0).abs() < 5.0, "{}", rep.worst_ratio);
    }

    #[test]
    fn cubic_growth_with_positive_eta_fails() {
        let law = StressLaw::cubic().with_growth(3.0, 0.1);
        assert!(!growth_check(&law, 10.0).satisfied);
    }

    #[test]
    fn regime_constants() {
        let c = StressLaw::cubic();
        assert_eq!(c.c_lower(), 1.0);
        assert!(!c.is_uniformly_hyperbolic());
        let h = StressLaw::hardening(1.0, 1.0).unwrap();
        assert_eq!(h.c0_sq(), 1.0);
        for i in 0..=100 {
            let w = -3.0 + 0.06 * i as f64;
            assert!(h.sigma_w(w) >= h.c0_sq());
        }
        assert!(StressLaw::linear(0.0).is_err());
    }

    #[test]
    fn pchip_is_monotone_and_interpolating() {
        let w = [0.0, 1.0, 2.0, 3.0, 4.0];
        let s = [0.0, 0.1, 2.0, 2.05, 5.0];
        let law = StressLaw::tabulated(&w, &s).unwrap();
        for (a, b) in w.iter().zip(s.iter()) {
            assert!((law.sigma(*a) - b).abs() < 1e-14);
        }
        let mut prev = law.sigma(0.0);
        for i in 1..=4000 {
            let x = i as f64 * 1e-3;
            let v = law.sigma(x);
            assert!(v >= prev - 1e-14);
            prev = v;
        }
    }
}
