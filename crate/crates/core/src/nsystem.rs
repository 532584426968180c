//! Family decomposition for `v_t - F(w)_x = 0`, `w_t - v_x = 0` with
//! `w ∈ R^N`, on the half line `y > 0`.
//!
//! With `w' = Σ a_j r_j(w)` each coefficient solves
//!
//! ```text
//!     ε y a_j' + (y² + ε - λ_j²) a_j = D1_j + D2_j + D3_j,
//! ```
//!
//! where `λ_j²` are the eigenvalues of `D_w F` and the right side collects the
//! interaction terms. The linear part is inverted family by family with the
//! kernel `exp(-P_j/ε)` of the family's viscous wave measure.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::eigen::standard_eigen;
use crate::error::{invalid, Error, Result};
use crate::grid::{ProfileGrid, Side};
use crate::linalg::{dot, Matrix};
use crate::quad;
use crate::wave_measure::{capillary_measure_field, viscous_exponent_field, viscous_measure_field, WaveMeasure};

/// Flux `F(w)` through its Jacobian.
pub trait FluxModel {
    fn dim(&self) -> usize;
    fn jacobian(&self, w: &[f64]) -> Matrix;
}

/// `F(w) = M w`.
#[derive(Debug, Clone)]
pub struct LinearFlux(pub Matrix);

impl FluxModel for LinearFlux {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jacobian(&self, _w: &[f64]) -> Matrix {
        self.0.clone()
    }
}

type FluxFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Flux given as a function; the Jacobian is taken by centered differences.
pub struct ClosureFlux {
    n: usize,
    f: FluxFn,
}

impl ClosureFlux {
    pub fn new(n: usize, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        ClosureFlux { n, f: Box::new(f) }
    }

    pub fn eval(&self, w: &[f64]) -> Vec<f64> {
        (self.f)(w)
    }
}

impl FluxModel for ClosureFlux {
    fn dim(&self) -> usize {
        self.n
    }

    fn jacobian(&self, w: &[f64]) -> Matrix {
        let h = 1e-6;
        let mut m = Matrix::zeros(self.n);
        for k in 0..self.n {
            let mut up = w.to_vec();
            let mut dn = w.to_vec();
            up[k] += h;
            dn[k] -= h;
            let (fu, fd) = ((self.f)(&up), (self.f)(&dn));
            for i in 0..self.n {
                m[(i, k)] = (fu[i] - fd[i]) / (2.0 * h);
            }
        }
        m
    }
}

/// Eigen-frames of `D_w F` at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// `λ_j > 0`, ascending.
    pub lambdas: Vec<f64>,
    pub r: Vec<Vec<f64>>,
    pub l: Vec<Vec<f64>>,
}

impl Frame {
    /// Flips every `r_j` (and `l_j`) that points against `reference`.
    pub fn align(&mut self, reference: &Frame) {
        for j in 0..self.r.len() {
            if dot(&self.r[j], &reference.r[j]) < 0.0 {
                self.r[j].iter_mut().for_each(|x| *x = -*x);
                self.l[j].iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
}

pub fn frame_at(flux: &dyn FluxModel, w: &[f64]) -> Result<Frame> {
    let a = flux.jacobian(w);
    let pairs = standard_eigen(&a).map_err(|e| match e {
        Error::ComplexPencil => Error::EigenGapCollapse { gap: 0.0 },
        other => other,
    })?;
    let gap = pairs
        .windows(2)
        .map(|p| p[1].mu - p[0].mu)
        .fold(f64::INFINITY, f64::min);
    if gap < 1e-8 {
        return Err(Error::EigenGapCollapse { gap });
    }
    if pairs[0].mu <= 0.0 {
        return Err(invalid("D_w F must have positive eigenvalues"));
    }
    Ok(Frame {
        lambdas: pairs.iter().map(|p| p.mu.sqrt()).collect(),
        r: pairs.iter().map(|p| p.r_hat.clone()).collect(),
        l: pairs.iter().map(|p| p.l_hat.clone()).collect(),
    })
}

/// Three-point derivative on a non-uniform grid, two-point at the ends.
pub fn derivative(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n];
    if n < 2 {
        return d;
    }
    d[0] = (f[1] - f[0]) / (x[1] - x[0]);
    d[n - 1] = (f[n - 1] - f[n - 2]) / (x[n - 1] - x[n - 2]);
    for i in 1..n - 1 {
        let h1 = x[i] - x[i - 1];
        let h2 = x[i + 1] - x[i];
        d[i] = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] + h1 / (h2 * (h1 + h2)) * f[i + 1];
    }
    d
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyDecomposition {
    pub nodes: Vec<f64>,
    /// Profile, `w[node][component]`.
    pub w: Vec<Vec<f64>>,
    /// `w'` by finite differences, `dw[node][component]`.
    pub dw: Vec<Vec<f64>>,
    /// `a[family][node] = l_j · w'`.
    pub a: Vec<Vec<f64>>,
    pub frames: Vec<Frame>,
    /// `lambdas[family][node]`.
    pub lambdas: Vec<Vec<f64>>,
}

impl FamilyDecomposition {
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// `max |Σ a_j r_j - w'|` over nodes and components.
    pub fn reconstruction_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (k, f) in self.frames.iter().enumerate() {
            for c in 0..self.dim() {
                let s: f64 = (0..self.dim()).map(|j| self.a[j][k] * f.r[j][c]).sum();
                worst = worst.max((s - self.dw[k][c]).abs());
            }
        }
        worst
    }

    /// `Σ_j ‖a_j‖_{L¹}`.
    pub fn amplitude(&self) -> f64 {
        self.a.iter().map(|aj| l1(&self.nodes, aj)).sum()
    }
}

fn l1(x: &[f64], f: &[f64]) -> f64 {
    let abs: Vec<f64> = f.iter().map(|v| v.abs()).collect();
    quad::trapezoid(x, &abs)
}

/// Projects `w'` on nodal eigen-frames whose signs follow the first node.
pub fn decompose(flux: &dyn FluxModel, nodes: &[f64], w: &[Vec<f64>]) -> Result<FamilyDecomposition> {
    let n = flux.dim();
    if nodes.len() != w.len() || nodes.len() < 3 {
        return Err(Error::InvalidGrid(
            "profile and nodes disagree or fewer than 3 nodes".into(),
        ));
    }
    if w.iter().any(|wk| wk.len() != n) {
        return Err(invalid("profile components must match the flux dimension"));
    }
    let mut frames: Vec<Frame> = Vec::with_capacity(nodes.len());
    for wk in w {
        let mut f = frame_at(flux, wk)?;
        if let Some(prev) = frames.last() {
            f.align(prev);
        }
        frames.push(f);
    }
    let mut dw = vec![vec![0.0; n]; nodes.len()];
    for c in 0..n {
        let comp: Vec<f64> = w.iter().map(|wk| wk[c]).collect();
        for (k, d) in derivative(nodes, &comp).into_iter().enumerate() {
            dw[k][c] = d;
        }
    }
    let a = (0..n)
        .map(|j| frames.iter().zip(&dw).map(|(f, d)| dot(&f.l[j], d)).collect())
        .collect();
    let lambdas = (0..n).map(|j| frames.iter().map(|f| f.lambdas[j]).collect()).collect();
    Ok(FamilyDecomposition {
        nodes: nodes.to_vec(),
        w: w.to_vec(),
        dw,
        a,
        frames,
        lambdas,
    })
}

const FRAME_STEP: f64 = 1e-5;
const SECOND_STEP: f64 = 1e-3;

/// `J_i = D_w r_i` for every family at `w`, with frames aligned to `base`.
fn frame_jacobians(flux: &dyn FluxModel, w: &[f64], base: &Frame) -> Result<Vec<Matrix>> {
    let n = w.len();
    let mut jac = vec![Matrix::zeros(n); n];
    for m in 0..n {
        let mut up = w.to_vec();
        let mut dn = w.to_vec();
        up[m] += FRAME_STEP;
        dn[m] -= FRAME_STEP;
        let mut fu = frame_at(flux, &up)?;
        let mut fd = frame_at(flux, &dn)?;
        fu.align(base);
        fd.align(base);
        for (i, ji) in jac.iter_mut().enumerate() {
            for c in 0..n {
                ji[(c, m)] = (fu.r[i][c] - fd.r[i][c]) / (2.0 * FRAME_STEP);
            }
        }
    }
    Ok(jac)
}

/// `g[i][k] = (D r_i) r_k` at `w`.
fn frame_products(flux: &dyn FluxModel, w: &[f64], base: &Frame) -> Result<(Frame, Vec<Vec<Vec<f64>>>)> {
    let mut f = frame_at(flux, w)?;
    f.align(base);
    let jac = frame_jacobians(flux, w, &f)?;
    let g = jac
        .iter()
        .map(|ji| f.r.iter().map(|rk| ji.mul_vec(rk)).collect())
        .collect();
    Ok((f, g))
}

/// Projected interaction terms, `d[family][node]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sources {
    pub d1: Vec<Vec<f64>>,
    pub d2: Vec<Vec<f64>>,
    pub d3: Vec<Vec<f64>>,
}

impl Sources {
    pub fn total(&self, j: usize) -> Vec<f64> {
        (0..self.d1[j].len())
            .map(|k| self.d1[j][k] + self.d2[j][k] + self.d3[j][k])
            .collect()
    }

    /// `Σ_j ‖D1_j‖_{L¹}`.
    pub fn d1_l1(&self, nodes: &[f64]) -> f64 {
        self.d1.iter().map(|d| l1(nodes, d)).sum()
    }
}

/// `D1 = -ε y Σ a_i a_k (D r_i) r_k` and, for `γ > 0`,
/// `D2 = -γε² Σ (a_i a_k' + (a_i a_k)') (D r_i) r_k`,
/// `D3 = -γε² Σ a_i a_k a_l D((D r_i) r_k) r_l`, each projected with `l_j`.
pub fn assemble_sources(flux: &dyn FluxModel, decomp: &FamilyDecomposition, eps: f64, gamma: f64) -> Result<Sources> {
    let n = decomp.dim();
    let m = decomp.nodes.len();
    let mut d1 = vec![vec![0.0; m]; n];
    let mut d2 = vec![vec![0.0; m]; n];
    let mut d3 = vec![vec![0.0; m]; n];
    let da: Vec<Vec<f64>> = decomp.a.iter().map(|aj| derivative(&decomp.nodes, aj)).collect();
    let capillary = gamma > 0.0;
    for k in 0..m {
        let y = decomp.nodes[k];
        let frame = &decomp.frames[k];
        let (_, g) = frame_products(flux, &decomp.w[k], frame)?;
        let a: Vec<f64> = (0..n).map(|j| decomp.a[j][k]).collect();
        if a.iter().all(|x| *x == 0.0) {
            continue;
        }
        let mut v1 = vec![0.0; n];
        let mut v2 = vec![0.0; n];
        let mut v3 = vec![0.0; n];
        for i in 0..n {
            for kk in 0..n {
                let q = a[i] * a[kk];
                let q2 = a[i] * da[kk][k] + (da[i][k] * a[kk] + a[i] * da[kk][k]);
                for c in 0..n {
                    v1[c] -= eps * y * q * g[i][kk][c];
                    if capillary {
                        v2[c] -= gamma * eps * eps * q2 * g[i][kk][c];
                    }
                }
            }
        }
        if capillary {
            for (l, rl) in frame.r.iter().enumerate() {
                let up: Vec<f64> = decomp.w[k].iter().zip(rl).map(|(w, r)| w + SECOND_STEP * r).collect();
                let dn: Vec<f64> = decomp.w[k].iter().zip(rl).map(|(w, r)| w - SECOND_STEP * r).collect();
                let (_, gu) = frame_products(flux, &up, frame)?;
                let (_, gd) = frame_products(flux, &dn, frame)?;
                for i in 0..n {
                    for kk in 0..n {
                        let q = a[i] * a[kk] * a[l];
                        for c in 0..n {
                            let dd = (gu[i][kk][c] - gd[i][kk][c]) / (2.0 * SECOND_STEP);
                            v3[c] -= gamma * eps * eps * q * dd;
                        }
                    }
                }
            }
        }
        for j in 0..n {
            d1[j][k] = dot(&frame.l[j], &v1);
            d2[j][k] = dot(&frame.l[j], &v2);
            d3[j][k] = dot(&frame.l[j], &v3);
        }
    }
    Ok(Sources { d1, d2, d3 })
}

/// Wave measure of one family: the scalar construction with `σ_w` replaced
/// by `λ_j²`.
pub fn family_wave_measure(nodes: &[f64], lambda: &[f64], eps: f64, gamma: f64, side: Side) -> Result<WaveMeasure> {
    let s: Vec<f64> = lambda.iter().map(|l| l * l).collect();
    if gamma > 0.0 {
        capillary_measure_field(nodes, &s, eps, gamma, side)
    } else {
        viscous_measure_field(nodes, &s, eps, side)
    }
}

/// Largest mass any family measure puts on the far side of the midpoint
/// between its `λ`-range and a neighbouring family's range.
///
/// `None` when two consecutive ranges overlap.
pub fn cross_mass(measures: &[WaveMeasure], lambdas: &[Vec<f64>]) -> Option<f64> {
    let range = |l: &Vec<f64>| {
        l.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)))
    };
    let mut worst = 0.0f64;
    for j in 0..lambdas.len().saturating_sub(1) {
        let (_, hi) = range(&lambdas[j]);
        let (lo, _) = range(&lambdas[j + 1]);
        if hi >= lo {
            return None;
        }
        let mid = 0.5 * (hi + lo);
        worst = worst.max(measures[j].mass_in(mid, f64::INFINITY));
        worst = worst.max(measures[j + 1].mass_in(f64::NEG_INFINITY, mid));
    }
    Some(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledStep {
    /// Updated `a[family][node]`.
    pub a: Vec<Vec<f64>>,
    /// `Σ‖a_new - a_old‖_{L¹} / Σ‖a_old‖_{L¹}` (zero when `a_old = 0`).
    pub contraction: f64,
    pub amplitude: f64,
}

/// Solution of `ε y a' + (y² + ε - λ²) a = R` with `a(ρ) = 0`, marched
/// outward from the node `k0`.
fn particular(nodes: &[f64], p: &[f64], rhs: &[f64], eps: f64, k0: usize) -> Vec<f64> {
    let m = nodes.len();
    let mut a = vec![0.0; m];
    let step = |from: usize, to: usize, a: &mut Vec<f64>| {
        let h = nodes[to] - nodes[from];
        let decay = (-(p[to] - p[from]) / eps).exp();
        let src0 = rhs[from] / (eps * nodes[from]);
        let src1 = rhs[to] / (eps * nodes[to]);
        a[to] = a[from] * decay + 0.5 * h * (src0 * decay + src1);
    };
    for k in k0..m - 1 {
        step(k, k + 1, &mut a);
    }
    for k in (1..=k0).rev() {
        step(k, k - 1, &mut a);
    }
    a
}

/// One inversion of the linear part for every family.
///
/// `c[j]` is the prescribed total `∫ a_j`; the homogeneous multiple of the
/// family measure is chosen to meet it.
pub fn coupled_iteration(
    decomp: &FamilyDecomposition,
    sources: &Sources,
    c: &[f64],
    eps: f64,
    amplitude_cap: f64,
) -> Result<CoupledStep> {
    let amplitude = decomp.amplitude();
    if amplitude > amplitude_cap {
        return Err(Error::AmplitudeCapExceeded {
            amplitude,
            cap: amplitude_cap,
        });
    }
    let nodes = &decomp.nodes;
    let mut out = Vec::with_capacity(decomp.dim());
    for j in 0..decomp.dim() {
        let s: Vec<f64> = decomp.lambdas[j].iter().map(|l| l * l).collect();
        let p = viscous_exponent_field(nodes, &s, eps)?;
        let phi = viscous_measure_field(nodes, &s, eps, Side::Plus)?;
        let k0 = p
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        let ap = particular(nodes, &p, &sources.total(j), eps, k0);
        let lift = c[j] - quad::trapezoid(nodes, &ap);
        out.push(
            ap.iter()
                .zip(&phi.density)
                .map(|(x, f)| x + lift * f)
                .collect::<Vec<f64>>(),
        );
    }
    let old: f64 = decomp.a.iter().map(|aj| l1(nodes, aj)).sum();
    let diff: f64 = out
        .iter()
        .zip(&decomp.a)
        .map(|(n, o)| {
            let d: Vec<f64> = n.iter().zip(o).map(|(x, y)| x - y).collect();
            l1(nodes, &d)
        })
        .sum();
    Ok(CoupledStep {
        a: out,
        contraction: if old > 0.0 { diff / old } else { 0.0 },
        amplitude,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NSystemConfig {
    pub eps: f64,
    pub gamma: f64,
    pub half_width: f64,
    pub n_nodes: usize,
    /// Bound on `Σ‖a_j‖_{L¹}`.
    pub amplitude_cap: f64,
    pub iterations: usize,
}

impl Default for NSystemConfig {
    fn default() -> Self {
        NSystemConfig {
            eps: 0.01,
            gamma: 0.0,
            half_width: 6.0,
            n_nodes: 2001,
            amplitude_cap: 0.1,
            iterations: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NSystemRun {
    pub nodes: Vec<f64>,
    /// Final profile `w[node][component]`.
    pub w: Vec<Vec<f64>>,
    pub a: Vec<Vec<f64>>,
    /// Boundary coefficients `l_j(w_b) · (w_r - w_b)`.
    pub boundary_coefficients: Vec<f64>,
    /// Contraction estimate of every iteration after the first.
    pub contraction: Vec<f64>,
    /// `Σ‖D1_j‖_{L¹}` per iteration.
    pub d1_l1: Vec<f64>,
    pub measures: Vec<WaveMeasure>,
    pub cross_mass: Option<f64>,
    pub reconstruction_residual: f64,
    /// `|w(L) - w_r|` (max component).
    pub far_field_mismatch: f64,
}

fn rebuild(decomp_frames: &[Frame], nodes: &[f64], a: &[Vec<f64>], w_b: &[f64]) -> Vec<Vec<f64>> {
    let n = w_b.len();
    let m = nodes.len();
    let mut w = vec![vec![0.0; n]; m];
    for c in 0..n {
        let dc: Vec<f64> = (0..m)
            .map(|k| (0..a.len()).map(|j| a[j][k] * decomp_frames[k].r[j][c]).sum())
            .collect();
        let cum = quad::cumulative(nodes, &dc);
        for k in 0..m {
            w[k][c] = w_b[c] + nodes[0] * dc[0] + cum[k];
        }
    }
    w
}

/// Small-amplitude boundary problem `w(0) = w_b`, `w(∞) = w_r`, iterated
/// `config.iterations` times from the decoupled guess `a_j = c_j φ_j`.
pub fn solve_nsystem(flux: &dyn FluxModel, w_b: &[f64], w_r: &[f64], config: &NSystemConfig) -> Result<NSystemRun> {
    let n = flux.dim();
    if w_b.len() != n || w_r.len() != n {
        return Err(invalid("boundary states must match the flux dimension"));
    }
    if !(config.eps > 0.0) || config.gamma < 0.0 || config.iterations == 0 {
        return Err(invalid("nsystem needs eps > 0, gamma >= 0 and at least one iteration"));
    }
    let nodes = ProfileGrid::half_line(config.half_width, config.n_nodes)?
        .support(Side::Plus)
        .nodes;
    let base = frame_at(flux, w_b)?;
    let jump: Vec<f64> = w_r.iter().zip(w_b).map(|(r, b)| r - b).collect();
    let c: Vec<f64> = base.l.iter().map(|l| dot(l, &jump)).collect();
    let mut frames = vec![base.clone(); nodes.len()];
    let mut a = Vec::with_capacity(n);
    for j in 0..n {
        let lam = vec![base.lambdas[j]; nodes.len()];
        let phi = family_wave_measure(&nodes, &lam, config.eps, 0.0, Side::Plus)?;
        a.push(phi.density.iter().map(|f| c[j] * f).collect::<Vec<f64>>());
    }
    let mut w = rebuild(&frames, &nodes, &a, w_b);
    let mut contraction = Vec::new();
    let mut d1_l1 = Vec::new();
    let mut decomp = decompose(flux, &nodes, &w)?;
    for it in 0..config.iterations {
        let sources = assemble_sources(flux, &decomp, config.eps, config.gamma)?;
        d1_l1.push(sources.d1_l1(&nodes));
        let step = coupled_iteration(&decomp, &sources, &c, config.eps, config.amplitude_cap)?;
        if it > 0 {
            contraction.push(step.contraction);
        }
        a = step.a;
        frames.clone_from(&decomp.frames);
        w = rebuild(&frames, &nodes, &a, w_b);
        decomp = decompose(flux, &nodes, &w)?;
    }
    let measures = (0..n)
        .map(|j| family_wave_measure(&nodes, &decomp.lambdas[j], config.eps, config.gamma, Side::Plus))
        .collect::<Result<Vec<_>>>()?;
    let last = w.last().cloned().unwrap_or_default();
    Ok(NSystemRun {
        cross_mass: cross_mass(&measures, &decomp.lambdas),
        reconstruction_residual: decomp.reconstruction_residual(),
        far_field_mismatch: last.iter().zip(w_r).map(|(x, r)| (x - r).abs()).fold(0.0, f64::max),
        nodes,
        w,
        a,
        boundary_coefficients: c,
        contraction,
        d1_l1,
        measures,
    })
}
