//! Generalized eigenstructure for `-y u' + A(u) u' = ε (B(u) u')'`.
//!
//! The pencil `(-y + A) r̂ = μ B r̂`, `l̂ (-y + A) = μ l̂ B` is solved through
//! its characteristic polynomial `det((A - y) - μB)`. Eigenvalues come out
//! ascending, `r̂` has unit length with its largest entry positive, and `l̂`
//! is scaled so that `l̂ B r̂ = 1`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::constitutive::StressLaw;
use crate::error::{Error, Result};
use crate::linalg::{dot, null_vector, pencil_polynomial, real_roots, Matrix};

/// A system `u_t + f(u)_x = ε (B(u) u_x)_x` seen through its Jacobian and
/// diffusion matrix.
pub trait DiffusionSystem {
    fn dim(&self) -> usize;
    /// `A(u) = D f(u)`.
    fn jacobian(&self, u: &[f64]) -> Matrix;
    fn diffusion(&self, u: &[f64]) -> Matrix;
    /// Flux `f(u)`, when known; used for Rankine-Hugoniot residuals.
    fn flux(&self, _u: &[f64]) -> Option<Vec<f64>> {
        None
    }
    /// Nominal size of `|B - I|`.
    fn eta(&self) -> f64 {
        0.0
    }
}

/// The p-system in `u = (v, w)`: `f(u) = (-σ(w), -v)`, with
/// `B = I + η T` for a constant `T`.
#[derive(Debug, Clone)]
pub struct PSystem {
    pub law: StressLaw,
    pub t: Matrix,
    pub eta: f64,
}

impl PSystem {
    pub fn new(law: StressLaw, t: Matrix, eta: f64) -> Self {
        PSystem { law, t, eta }
    }

    /// `B = I`.
    pub fn identity_diffusion(law: StressLaw) -> Self {
        PSystem {
            law,
            t: Matrix::zeros(2),
            eta: 0.0,
        }
    }

    /// State behind a shock of the family with sign `family_sign` (`-1` for
    /// the first, `+1` for the second) reaching `w_plus` from `u_minus`.
    ///
    /// Returns `(u_plus, s)` with `s = ±([σ]/[w])^(1/2)` and
    /// `v+ = v- - s (w+ - w-)`.
    pub fn hugoniot(&self, u_minus: [f64; 2], w_plus: f64, family_sign: f64) -> Option<([f64; 2], f64)> {
        let dw = w_plus - u_minus[1];
        if dw == 0.0 {
            return None;
        }
        let ratio = (self.law.sigma(w_plus) - self.law.sigma(u_minus[1])) / dw;
        if ratio <= 0.0 {
            return None;
        }
        let s = family_sign.signum() * ratio.sqrt();
        Some(([u_minus[0] - s * dw, w_plus], s))
    }
}

impl DiffusionSystem for PSystem {
    fn dim(&self) -> usize {
        2
    }

    fn jacobian(&self, u: &[f64]) -> Matrix {
        Matrix::from_rows(&[&[0.0, -self.law.sigma_w(u[1])], &[-1.0, 0.0]])
    }

    fn diffusion(&self, _u: &[f64]) -> Matrix {
        Matrix::identity(2).add(&self.t.scale(self.eta))
    }

    fn flux(&self, u: &[f64]) -> Option<Vec<f64>> {
        Some(vec![-self.law.sigma(u[1]), -u[0]])
    }

    fn eta(&self) -> f64 {
        self.eta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub mu: f64,
    pub l_hat: Vec<f64>,
    pub r_hat: Vec<f64>,
}

fn orient(r: &mut [f64]) {
    let big = r
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if big < 0.0 {
        r.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Eigen-decomposition of the pencil `(A - y, B)`.
pub fn pencil_eigen(a: &Matrix, b: &Matrix, y: f64) -> Result<Vec<EigenPair>> {
    let n = a.dim();
    let det_b = b.det();
    let scale = b.norm_inf().powi(n as i32).max(f64::MIN_POSITIVE);
    if det_b.abs() <= 1e-12 * scale {
        return Err(Error::PencilDegenerate { det: det_b });
    }
    let m = a.sub(&Matrix::identity(n).scale(y));
    let coeffs = pencil_polynomial(&m, b);
    let mus = real_roots(&coeffs)?;
    let spread = 1.0 + mus.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    if mus.windows(2).any(|p| p[1] - p[0] <= 1e-12 * spread) {
        return Err(Error::ComplexPencil);
    }
    let mut pairs = Vec::with_capacity(n);
    for &mu in &mus {
        let shifted = m.sub(&b.scale(mu));
        let mut r = null_vector(&shifted);
        orient(&mut r);
        let l0 = null_vector(&shifted.transpose());
        let norm = dot(&l0, &b.mul_vec(&r));
        let l = l0.iter().map(|x| x / norm).collect();
        pairs.push(EigenPair { mu, l_hat: l, r_hat: r });
    }
    Ok(pairs)
}

/// `(μ_j, l̂_j, r̂_j)` at state `u` and speed `y`, ascending in `μ`.
pub fn generalized_eigen(sys: &dyn DiffusionSystem, u: &[f64], y: f64) -> Result<Vec<EigenPair>> {
    pencil_eigen(&sys.jacobian(u), &sys.diffusion(u), y)
}

/// Eigenvalues `λ_j` and eigenvectors of `A` alone (`B = I`, `y = 0`).
pub fn standard_eigen(a: &Matrix) -> Result<Vec<EigenPair>> {
    pencil_eigen(a, &Matrix::identity(a.dim()), 0.0)
}

/// `λ̂ = ⟨r̂, A r̂⟩`.
pub fn generalized_speed(a: &Matrix, r_hat: &[f64]) -> f64 {
    dot(r_hat, &a.mul_vec(r_hat))
}

/// `b_ij = [L B R]_ij` in the eigenbasis of `A(u)`.
pub fn transformed_diffusion(sys: &dyn DiffusionSystem, u: &[f64]) -> Result<(Matrix, Vec<f64>)> {
    let a = sys.jacobian(u);
    let pairs = standard_eigen(&a)?;
    let n = a.dim();
    let b = sys.diffusion(u);
    let bt = Matrix::from_fn(n, |i, j| dot(&pairs[i].l_hat, &b.mul_vec(&pairs[j].r_hat)));
    Ok((bt, pairs.iter().map(|p| p.mu).collect()))
}

/// `μ₁ ≤ μ₂` from the closed form for two equations.
///
/// With `β = b12 b21/(b11 b22)` and `a_i = (λ_i - y)/b_ii` the roots solve
/// `(1 - β) μ² - (a1 + a2) μ + a1 a2 = 0`.
pub fn two_by_two_closed_form(b: &Matrix, lambda1: f64, lambda2: f64, y: f64) -> Result<(f64, f64)> {
    let beta = b[(0, 1)] * b[(1, 0)] / (b[(0, 0)] * b[(1, 1)]);
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::BetaOutOfRange { beta });
    }
    let a1 = (lambda1 - y) / b[(0, 0)];
    let a2 = (lambda2 - y) / b[(1, 1)];
    let lead = 1.0 - beta;
    let sum = a1 + a2;
    let disc = (a2 - a1) * (a2 - a1) + 4.0 * beta * a1 * a2;
    if disc < 0.0 {
        return Err(Error::ComplexPencil);
    }
    let q = 0.5 * (sum + sum.signum() * disc.sqrt());
    let (m1, m2) = if q == 0.0 {
        let h = 0.5 * disc.sqrt() / lead;
        (-h, h)
    } else {
        (q / lead, a1 * a2 / q)
    };
    Ok(if m1 <= m2 { (m1, m2) } else { (m2, m1) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityRow {
    pub u: Vec<f64>,
    pub b11: f64,
    pub b22: f64,
    pub b12_b21: f64,
    pub beta: f64,
    pub b11_positive: bool,
    pub b22_positive: bool,
    pub coupling_positive: bool,
    pub beta_in_range: bool,
}

impl AdmissibilityRow {
    pub fn passes(&self) -> bool {
        self.b11_positive && self.b22_positive && self.coupling_positive && self.beta_in_range
    }
}

/// Sign conditions `b11 > 0`, `b22 > 0`, `b12 b21 > 0`, `β ∈ (0, 1)` at each
/// sample state of a two-equation system.
pub fn admissibility_check(sys: &dyn DiffusionSystem, samples: &[Vec<f64>]) -> Result<Vec<AdmissibilityRow>> {
    if sys.dim() != 2 {
        return Err(crate::error::invalid(
            "admissibility check is defined for two equations",
        ));
    }
    samples
        .iter()
        .map(|u| {
            let (b, _) = transformed_diffusion(sys, u)?;
            let (b11, b22, c) = (b[(0, 0)], b[(1, 1)], b[(0, 1)] * b[(1, 0)]);
            let beta = c / (b11 * b22);
            Ok(AdmissibilityRow {
                u: u.clone(),
                b11,
                b22,
                b12_b21: c,
                beta,
                b11_positive: b11 > 0.0,
                b22_positive: b22 > 0.0,
                coupling_positive: c > 0.0,
                beta_in_range: beta > 0.0 && beta < 1.0,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    pub etas: Vec<f64>,
    /// `max_j |μ_j - (-y + λ_j)|` per η.
    pub mu_deviation: Vec<f64>,
    /// `max_j |r̂_j - r_j|`.
    pub r_deviation: Vec<f64>,
    /// `max_j |l̂_j - l_j|`.
    pub l_deviation: Vec<f64>,
    /// `max_ij |l̂_i B ∂_y r̂_j|`.
    pub coupling: Vec<f64>,
    /// Log-log slopes of the four quantities against η (NaN when undefined).
    pub slopes: [f64; 4],
}

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Least-squares slope of `ln e` against `ln η`.
pub fn loglog_slope(x: &[f64], e: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(e)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Measured size of the deviations from the `B = I` eigenstructure for
/// `B = I + η T` along `etas`.
///
/// `∂_y r̂` is taken by centered differences with step `1e-4`.
pub fn perturbation_scaling(a: &Matrix, t: &Matrix, y: f64, etas: &[f64]) -> Result<PerturbationReport> {
    let n = a.dim();
    let base = standard_eigen(a)?;
    let mut rep = PerturbationReport {
        etas: etas.to_vec(),
        mu_deviation: Vec::new(),
        r_deviation: Vec::new(),
        l_deviation: Vec::new(),
        coupling: Vec::new(),
        slopes: [f64::NAN; 4],
    };
    let h = 1e-4;
    for &eta in etas {
        let b = Matrix::identity(n).add(&t.scale(eta));
        let pairs = pencil_eigen(a, &b, y)?;
        let up = pencil_eigen(a, &b, y + h)?;
        let down = pencil_eigen(a, &b, y - h)?;
        let mut mu_dev = 0.0f64;
        let mut r_dev = 0.0f64;
        let mut l_dev = 0.0f64;
        let mut coupling = 0.0f64;
        for j in 0..n {
            mu_dev = mu_dev.max((pairs[j].mu - (base[j].mu - y)).abs());
            r_dev = r_dev.max(norm_diff(&pairs[j].r_hat, &base[j].r_hat));
            l_dev = l_dev.max(norm_diff(&pairs[j].l_hat, &base[j].l_hat));
            let dr: Vec<f64> = (0..n)
                .map(|k| (up[j].r_hat[k] - down[j].r_hat[k]) / (2.0 * h))
                .collect();
            let bdr = b.mul_vec(&dr);
            for pi in &pairs {
                coupling = coupling.max(dot(&pi.l_hat, &bdr).abs());
            }
        }
        rep.mu_deviation.push(mu_dev);
        rep.r_deviation.push(r_dev);
        rep.l_deviation.push(l_dev);
        rep.coupling.push(coupling);
    }
    rep.slopes = [
        loglog_slope(etas, &rep.mu_deviation),
        loglog_slope(etas, &rep.r_deviation),
        loglog_slope(etas, &rep.l_deviation),
        loglog_slope(etas, &rep.coupling),
    ];
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shock {
    pub u_minus: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaxVerdict {
    /// Zero-based family index.
    pub family: usize,
    pub standard_lax: bool,
    pub generalized_lax: bool,
    /// Some inequality holds with equality (characteristic jump).
    pub marginal: bool,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub lambda_hat_minus: f64,
    pub lambda_hat_plus: f64,
    /// `|s [u] - [f(u)]|` when the flux is known.
    pub rh_residual: Option<f64>,
}

fn family_speed(sys: &dyn DiffusionSystem, u: &[f64], j: usize) -> Result<f64> {
    Ok(standard_eigen(&sys.jacobian(u))?[j].mu)
}

/// Checks that `∇λ_j · r_j` keeps one sign on 101 points of the segment.
///
/// Identically vanishing values (linear degeneracy) are not a violation.
pub fn gnl_check(sys: &dyn DiffusionSystem, u_minus: &[f64], u_plus: &[f64], j: usize) -> Result<(f64, f64)> {
    let n = sys.dim();
    let h = 1e-6;
    let mut prev: Option<Vec<f64>> = None;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..=100 {
        let t = k as f64 / 100.0;
        let u: Vec<f64> = (0..n).map(|i| u_minus[i] + t * (u_plus[i] - u_minus[i])).collect();
        let mut r = standard_eigen(&sys.jacobian(&u))?[j].r_hat.clone();
        if let Some(p) = &prev {
            if dot(p, &r) < 0.0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let mut g = 0.0;
        for i in 0..n {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[i] += h;
            dn[i] -= h;
            g += r[i] * (family_speed(sys, &up, j)? - family_speed(sys, &dn, j)?) / (2.0 * h);
        }
        lo = lo.min(g);
        hi = hi.max(g);
        prev = Some(r);
    }
    let tol = 1e-6;
    if lo < -tol && hi > tol {
        return Err(Error::GnlViolated { family: j });
    }
    Ok((lo, hi))
}

/// Standard and generalized Lax verdicts for a shock triple.
///
/// The family is the one whose mean characteristic speed is nearest `s`.
pub fn lax_equivalence(sys: &dyn DiffusionSystem, shock: &Shock) -> Result<LaxVerdict> {
    let am = sys.jacobian(&shock.u_minus);
    let ap = sys.jacobian(&shock.u_plus);
    let em = standard_eigen(&am)?;
    let ep = standard_eigen(&ap)?;
    let s = shock.s;
    let family = (0..sys.dim())
        .min_by(|&a, &b| {
            let da = (0.5 * (em[a].mu + ep[a].mu) - s).abs();
            let db = (0.5 * (em[b].mu + ep[b].mu) - s).abs();
            da.total_cmp(&db)
        })
        .unwrap_or(0);
    gnl_check(sys, &shock.u_minus, &shock.u_plus, family)?;
    let gm = generalized_eigen(sys, &shock.u_minus, s)?;
    let gp = generalized_eigen(sys, &shock.u_plus, s)?;
    let lambda_minus = em[family].mu;
    let lambda_plus = ep[family].mu;
    let lambda_hat_minus = generalized_speed(&am, &gm[family].r_hat);
    let lambda_hat_plus = generalized_speed(&ap, &gp[family].r_hat);
    let tol = 1e-8 * (1.0 + s.abs());
    let rh_residual = match (sys.flux(&shock.u_minus), sys.flux(&shock.u_plus)) {
        (Some(fm), Some(fp)) => Some(
            (0..sys.dim())
                .map(|i| (s * (shock.u_plus[i] - shock.u_minus[i]) - (fp[i] - fm[i])).abs())
                .fold(0.0, f64::max),
        ),
        _ => None,
    };
    Ok(LaxVerdict {
        family,
        standard_lax: lambda_plus <= s + tol && s <= lambda_minus + tol,
        generalized_lax: lambda_hat_plus <= s + tol && s <= lambda_hat_minus + tol,
        marginal: (s - lambda_plus).abs() <= tol || (s - lambda_minus).abs() <= tol,
        lambda_minus,
        lambda_plus,
        lambda_hat_minus,
        lambda_hat_plus,
        rh_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(a: f64, b: f64) -> Matrix {
        Matrix::from_rows(&[&[a, 0.0], &[0.0, b]])
    }

    #[test]
    fn diagonal_pencil() {
        let p = pencil_eigen(&diag(1.0, 4.0), &Matrix::identity(2), 0.0).unwrap();
        assert_eq!(p[0].mu, 1.0);
        assert_eq!(p[1].mu, 4.0);
        assert_eq!(p[0].r_hat, vec![1.0, 0.0]);
    }

    #[test]
    fn identity_diffusion_reduces_to_standard() {
        let sys = PSystem::identity_diffusion(StressLaw::hardening(1.0, 1.0).unwrap());
        let u = [0.3, 0.7];
        let y = 0.4;
        let g = generalized_eigen(&sys, &u, y).unwrap();
        let s = standard_eigen(&sys.jacobian(&u)).unwrap();
        for j in 0..2 {
            assert!((g[j].mu - (s[j].mu - y)).abs() < 1e-12);
            for k in 0..2 {
                assert!((g[j].r_hat[k] - s[j].r_hat[k]).abs() < 1e-12);
                assert!((g[j].l_hat[k] - s[j].l_hat[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_matches_quadratic_oracle() {
        let b = Matrix::from_rows(&[&[1.0, 0.1], &[0.1, 1.0]]);
        let (m1, m2) = two_by_two_closed_form(&b, 1.0, 4.0, 0.0).unwrap();
        // det(B) μ² - (b11 λ2 + b22 λ1) μ + λ1 λ2 = 0
        let (qa, qb, qc) = (0.99, -5.0, 4.0);
        let d = (qb * qb - 4.0 * qa * qc).sqrt();
        let r1 = (-qb - d) / (2.0 * qa);
        let r2 = (-qb + d) / (2.0 * qa);
        assert!((m1 - r1).abs() < 1e-12 && (m2 - r2).abs() < 1e-12);
        let p = pencil_eigen(&diag(1.0, 4.0), &b, 0.0).unwrap();
        assert!((p[0].mu - m1).abs() < 1e-12 && (p[1].mu - m2).abs() < 1e-12);
    }

    #[test]
    fn beta_out_of_range() {
        assert!(matches!(
            two_by_two_closed_form(&Matrix::identity(2), 1.0, 4.0, 0.0),
            Err(Error::BetaOutOfRange { .. })
        ));
    }

    #[test]
    fn biorthonormal_vectors() {
        let a = Matrix::from_rows(&[&[0.5, 1.0, 0.0], &[0.2, 2.0, 0.3], &[0.0, 0.1, 3.5]]);
        let b = Matrix::from_rows(&[&[1.0, 0.05, 0.0], &[0.02, 1.1, 0.01], &[0.0, 0.03, 0.9]]);
        let p = pencil_eigen(&a, &b, 0.3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v = dot(&p[i].l_hat, &b.mul_vec(&p[j].r_hat));
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((v - e).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_diffusion_is_degenerate() {
        let b = Matrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(
            pencil_eigen(&diag(1.0, 2.0), &b, 0.0),
            Err(Error::PencilDegenerate { .. })
        ));
    }

    #[test]
    fn linear_law_jumps_are_marginal() {
        let sys = PSystem::identity_diffusion(StressLaw::linear(2.0).unwrap());
        let (up, s) = sys.hugoniot([0.0, 0.5], 0.0, 1.0).unwrap();
        let v = lax_equivalence(
            &sys,
            &Shock {
                u_minus: vec![0.0, 0.5],
                u_plus: up.to_vec(),
                s,
            },
        )
        .unwrap();
        assert!(v.marginal && v.standard_lax && v.generalized_lax);
        assert!(v.rh_residual.unwrap() < 1e-14);
    }

    #[test]
    fn zero_eta_has_no_deviation() {
        let a = Matrix::from_rows(&[&[0.0, -4.0], &[-1.0, 0.0]]);
        let t = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let rep = perturbation_scaling(&a, &t, 0.5, &[0.0]).unwrap();
        assert_eq!(rep.mu_deviation[0], 0.0);
        assert_eq!(rep.r_deviation[0], 0.0);
        assert!(rep.coupling[0] < 1e-8);
    }
}
