//! Composite quadrature on (possibly non-uniform) node sets.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Composite trapezoid rule.
pub fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), f.len());
    x.windows(2)
        .zip(f.windows(2))
        .map(|(xs, fs)| 0.5 * (xs[1] - xs[0]) * (fs[0] + fs[1]))
        .sum()
}

/// Running trapezoid integral from the first node, `out[0] = 0`.
pub fn cumulative(x: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for i in 1..x.len() {
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (f[i - 1] + f[i]);
    }
    out
}

/// Running trapezoid integral from each node to the last one, `out[n-1] = 0`.
pub fn tail(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    for i in (0..n.saturating_sub(1)).rev() {
        out[i] = out[i + 1] + 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
    }
    out
}

/// `∫ x f(x) dx` by the trapezoid rule.
pub fn first_moment(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(xs, fs)| 0.5 * (xs[1] - xs[0]) * (xs[0] * fs[0] + xs[1] * fs[1]))
        .sum()
}

/// Half-grid comparison for the trapezoid rule: `|T_h - T_2h| / 3`.
///
/// The coarse rule uses every other node (the last node is always kept).
pub fn richardson_error(x: &[f64], f: &[f64]) -> f64 {
    if x.len() < 3 {
        return 0.0;
    }
    let (xc, fc) = coarsen(x, f);
    (trapezoid(x, f) - trapezoid(&xc, &fc)).abs() / 3.0
}

pub(crate) fn coarsen(x: &[f64], f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let mut xc = Vec::with_capacity(n / 2 + 2);
    let mut fc = Vec::with_capacity(n / 2 + 2);
    for i in (0..n).step_by(2) {
        xc.push(x[i]);
        fc.push(f[i]);
    }
    if (n - 1) % 2 != 0 {
        xc.push(x[n - 1]);
        fc.push(f[n - 1]);
    }
    (xc, fc)
}

/// Antiderivative of `a(x) = x - q(x)/x` on a half-axis, with `q` linear on
/// every cell.
///
/// The `1/x` factor is integrated exactly against the linear interpolant of
/// `q`, so the rule stays accurate on cells adjacent to the origin. All nodes
/// must share one sign and be nonzero. `out[0] = 0`.
pub fn singular_exponent(x: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for i in 1..x.len() {
        let (x0, x1) = (x[i - 1], x[i]);
        let dx = x1 - x0;
        let slope = (q[i] - q[i - 1]) / dx;
        let log_ratio = (dx / x0).ln_1p();
        let q_over_x = (q[i - 1] - slope * x0) * log_ratio + slope * dx;
        out[i] = out[i - 1] + 0.5 * (x1 * x1 - x0 * x0) - q_over_x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let x = linspace(-1.0, 3.0, 17);
        let f: Vec<f64> = x.iter().map(|&t| 2.0 * t + 1.0).collect();
        assert!((trapezoid(&x, &f) - 12.0).abs() < 1e-13);
        let c = cumulative(&x, &f);
        let t = tail(&x, &f);
        for i in 0..x.len() {
            assert!((c[i] + t[i] - 12.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_exponent_matches_closed_form() {
        // q ≡ 3.96: ∫_1^2 (x - 3.96/x) dx = 1.5 - 3.96 ln 2
        let x = linspace(1.0, 2.0, 11);
        let q = vec![3.96; x.len()];
        let p = singular_exponent(&x, &q);
        let exact = 1.5 - 3.96 * core::f64::consts::LN_2;
        assert!((p[10] - exact).abs() < 1e-13, "{} vs {}", p[10], exact);
    }

    #[test]
    fn singular_exponent_negative_axis() {
        // ∫_{-2}^{-1} (x - c/x) dx = (1 - 4)/2 - c ln(1/2)
        let x = linspace(-2.0, -1.0, 7);
        let q = vec![1.5; x.len()];
        let p = singular_exponent(&x, &q);
        let exact = -1.5 + 1.5 * core::f64::consts::LN_2;
        assert!((p[6] - exact).abs() < 1e-13);
    }

    #[test]
    fn richardson_estimate_tracks_error() {
        let x = linspace(0.0, 1.0, 101);
        let f: Vec<f64> = x.iter().map(|&t| (3.0 * t).exp()).collect();
        let exact = ((3.0f64).exp() - 1.0) / 3.0;
        let err = (trapezoid(&x, &f) - exact).abs();
        let est = richardson_error(&x, &f);
        assert!(est > 0.5 * err && est < 2.0 * err, "{est} vs {err}");
    }
}
