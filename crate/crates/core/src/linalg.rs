//! Small dense square matrices (`n ≤ 4`) and the pieces the pencil solver
//! needs: determinants, the characteristic polynomial of `(M, B)`, real
//! polynomial roots and null vectors.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Panics if `rows` is not square.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend_from_slice(r);
        }
        Matrix { n, data }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, a: f64) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| a * x).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Self {
        Self::from_fn(self.n, |i, j| (0..self.n).map(|k| self[(i, k)] * other[(k, j)]).sum())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|k| self[(i, k)] * x[k]).sum())
            .collect()
    }

    /// `x^T M`.
    pub fn vec_mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|k| x[k] * self[(k, j)]).sum())
            .collect()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Determinant by partial-pivot elimination.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))
                .unwrap_or(c);
            if a[p * n + c] == 0.0 {
                return 0.0;
            }
            if p != c {
                for k in 0..n {
                    a.swap(p * n + k, c * n + k);
                }
                det = -det;
            }
            let piv = a[c * n + c];
            det *= piv;
            for r in c + 1..n {
                let f = a[r * n + c] / piv;
                for k in c..n {
                    a[r * n + k] -= f * a[c * n + k];
                }
            }
        }
        det
    }

    /// Solves `M x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))
                .unwrap_or(c);
            if a[p * n + c].abs() <= 1e-300 {
                return Err(Error::PencilDegenerate { det: 0.0 });
            }
            if p != c {
                for k in 0..n {
                    a.swap(p * n + k, c * n + k);
                }
                x.swap(p, c);
            }
            for r in c + 1..n {
                let f = a[r * n + c] / a[c * n + c];
                for k in c..n {
                    a[r * n + k] -= f * a[c * n + k];
                }
                x[r] -= f * x[c];
            }
        }
        for c in (0..n).rev() {
            let s: f64 = (c + 1..n).map(|k| a[c * n + k] * x[k]).sum();
            x[c] = (x[c] - s) / a[c * n + c];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut inv = Self::zeros(n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = self.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Coefficients `c[k]` of `det(M - μB) = Σ c[k] μ^k`.
///
/// The determinant is multilinear in the columns, so every subset `S` of
/// columns taken from `-B` contributes `μ^|S| det(...)`.
pub fn pencil_polynomial(m: &Matrix, b: &Matrix) -> Vec<f64> {
    let n = m.dim();
    let mut coeffs = vec![0.0; n + 1];
    for mask in 0u32..(1 << n) {
        let mixed = Matrix::from_fn(n, |i, j| if mask & (1 << j) != 0 { -b[(i, j)] } else { m[(i, j)] });
        coeffs[mask.count_ones() as usize] += mixed.det();
    }
    coeffs
}

/// Horner evaluation, `c[k]` is the coefficient of `x^k`.
pub fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect()
}

fn bisect(c: &[f64], mut a: f64, mut b: f64) -> f64 {
    let mut fa = poly_eval(c, a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = poly_eval(c, m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// All roots of a real polynomial, which must all be real and simple.
///
/// Roots interlace with the critical points (Rolle), so they are found by
/// recursion on the derivative and bracketed bisection between consecutive
/// critical points. Fails with `complex_pencil` when fewer than `deg` real
/// roots exist or two roots coincide.
pub fn real_roots(coeffs: &[f64]) -> Result<Vec<f64>> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    let c: Vec<f64> = c.iter().map(|a| a / lead).collect();
    if deg == 1 {
        return Ok(vec![-c[0]]);
    }
    if deg == 2 {
        let (b, q) = (c[1], c[0]);
        let disc = b * b - 4.0 * q;
        if disc <= 0.0 {
            return Err(Error::ComplexPencil);
        }
        let t = -0.5 * (b + b.signum() * disc.sqrt());
        let (r1, r2) = if t == 0.0 {
            (-disc.sqrt() / 2.0, disc.sqrt() / 2.0)
        } else {
            (t, q / t)
        };
        return Ok(if r1 < r2 { vec![r1, r2] } else { vec![r2, r1] });
    }
    let crit = real_roots(&poly_derivative(&c)).map_err(|_| Error::ComplexPencil)?;
    let bound = 1.0 + c[..deg].iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let mut points = vec![-bound];
    points.extend(crit.iter().copied());
    points.push(bound);
    let mut roots = Vec::with_capacity(deg);
    for p in points.windows(2) {
        let (a, b) = (p[0], p[1]);
        let (fa, fb) = (poly_eval(&c, a), poly_eval(&c, b));
        if (fa < 0.0) != (fb < 0.0) && fa != 0.0 && fb != 0.0 {
            roots.push(polish(&c, bisect(&c, a, b)));
        }
    }
    if roots.len() != deg {
        return Err(Error::ComplexPencil);
    }
    Ok(roots)
}

fn polish(c: &[f64], mut x: f64) -> f64 {
    let d = poly_derivative(c);
    for _ in 0..3 {
        let fp = poly_eval(&d, x);
        if fp == 0.0 {
            break;
        }
        let step = poly_eval(c, x) / fp;
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    x
}

/// Unit vector spanning the null space of a rank `n - 1` matrix.
///
/// Full-pivot elimination; the column with the smallest final pivot is
/// taken as the free variable.
pub fn null_vector(m: &Matrix) -> Vec<f64> {
    let n = m.dim();
    let mut a = m.clone();
    let mut col: Vec<usize> = (0..n).collect();
    for k in 0..n - 1 {
        let (mut pr, mut pc, mut best) = (k, k, -1.0);
        for i in k..n {
            for j in k..n {
                let v = a[(i, col[j])].abs();
                if v > best {
                    best = v;
                    pr = i;
                    pc = j;
                }
            }
        }
        if best == 0.0 {
            break;
        }
        for j in 0..n {
            let t = a[(k, j)];
            a[(k, j)] = a[(pr, j)];
            a[(pr, j)] = t;
        }
        col.swap(k, pc);
        let piv = a[(k, col[k])];
        for i in k + 1..n {
            let f = a[(i, col[k])] / piv;
            if f != 0.0 {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= f * t;
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    x[col[n - 1]] = 1.0;
    for k in (0..n - 1).rev() {
        let s: f64 = (k + 1..n).map(|j| a[(k, col[j])] * x[col[j]]).sum();
        x[col[k]] = -s / a[(k, col[k])];
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter().map(|v| v / norm).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
