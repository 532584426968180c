//! System files for the `eigen` and `nsystem` subcommands.
//!
//! Matrix entries and flux components are expressions in the state
//! variables `u1, ..., un`, evaluated with meval's built-in functions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use selfsim_core::eigen::{DiffusionSystem, Shock};
use selfsim_core::linalg::Matrix;
use selfsim_core::nsystem::NSystemConfig;

use crate::config::{line_of, ConfigError};

thread_local! {
    static BUILTINS: meval::Context<'static> = meval::Context::new();
}

struct State<'a>(&'a [f64]);

impl meval::ContextProvider for State<'_> {
    fn get_var(&self, name: &str) -> Option<f64> {
        let k: usize = name.strip_prefix('u')?.parse().ok()?;
        if k >= 1 {
            self.0.get(k - 1).copied()
        } else {
            None
        }
    }
}

/// Parsed expression in `u1..un`.
#[derive(Debug, Clone)]
pub struct Expression {
    source: String,
    expr: meval::Expr,
}

impl Expression {
    /// Parses `source` and checks that every variable is one of `u1..un`.
    pub fn parse(source: &str, n: usize) -> Result<Self, String> {
        let expr: meval::Expr = source.parse().map_err(|e| format!("`{source}`: {e}"))?;
        let e = Expression {
            source: source.to_string(),
            expr,
        };
        e.try_eval(&vec![0.5; n]).map_err(|m| format!("`{source}`: {m}"))?;
        Ok(e)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn try_eval(&self, u: &[f64]) -> Result<f64, String> {
        BUILTINS
            .with(|b| self.expr.eval_with_context((State(u), b)))
            .map_err(|e| e.to_string())
    }

    /// NaN on evaluation failure; the numerical routines reject it.
    pub fn eval(&self, u: &[f64]) -> f64 {
        self.try_eval(u).unwrap_or(f64::NAN)
    }
}

fn parse_matrix(rows: &[Vec<String>], n: usize, what: &str) -> Result<Vec<Expression>, String> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(format!("{what} must be {n}x{n}"));
    }
    rows.iter()
        .flatten()
        .map(|s| Expression::parse(s, n).map_err(|m| format!("{what}: {m}")))
        .collect()
}

fn eval_matrix(entries: &[Expression], n: usize, u: &[f64]) -> Matrix {
    Matrix::from_fn(n, |i, j| entries[i * n + j].eval(u))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShockSpec {
    pub u_minus: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    /// State at which `A` is evaluated.
    pub u: Vec<f64>,
    /// Direction `T` in `B = I + η T`.
    pub t: Vec<Vec<f64>>,
    pub etas: Vec<f64>,
    #[serde(default)]
    pub y: f64,
}

/// `eigen` input. Either expression matrices `A`, `B` or a `table_file`
/// with one row per sample: `u1..un`, `A` row-major, `B` row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenSpec {
    pub n: usize,
    #[serde(rename = "A", default)]
    pub a: Option<Vec<Vec<String>>>,
    #[serde(rename = "B", default)]
    pub b: Option<Vec<Vec<String>>>,
    /// Flux components, for Rankine-Hugoniot residuals.
    #[serde(default)]
    pub flux: Option<Vec<String>>,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default)]
    pub samples: Vec<Vec<f64>>,
    #[serde(default)]
    pub table_file: Option<std::path::PathBuf>,
    #[serde(default, rename = "shock")]
    pub shocks: Vec<ShockSpec>,
    #[serde(default)]
    pub perturbation: Option<PerturbationSpec>,
}

/// `nsystem` input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NSystemSpec {
    pub n: usize,
    pub flux: Vec<String>,
    pub w_b: Vec<f64>,
    pub w_r: Vec<f64>,
    #[serde(default = "defaults::eps")]
    pub eps: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(rename = "L", default = "defaults::half_width")]
    pub half_width: f64,
    #[serde(default = "defaults::grid")]
    pub grid: usize,
    #[serde(default = "defaults::cap")]
    pub amplitude_cap: f64,
    #[serde(default = "defaults::iterations")]
    pub iterations: usize,
}

mod defaults {
    use selfsim_core::nsystem::NSystemConfig;

    pub fn eps() -> f64 {
        NSystemConfig::default().eps
    }
    pub fn half_width() -> f64 {
        NSystemConfig::default().half_width
    }
    pub fn grid() -> usize {
        NSystemConfig::default().n_nodes
    }
    pub fn cap() -> f64 {
        NSystemConfig::default().amplitude_cap
    }
    pub fn iterations() -> usize {
        NSystemConfig::default().iterations
    }
}

fn parse_toml<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        match e.span() {
            Some(span) => ConfigError::at(line_of(text, span.start), msg),
            None => ConfigError::new(msg),
        }
    })
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))
}

/// System built from expressions.
pub struct ExprSystem {
    n: usize,
    a: Vec<Expression>,
    b: Vec<Expression>,
    flux: Option<Vec<Expression>>,
    eta: f64,
}

impl DiffusionSystem for ExprSystem {
    fn dim(&self) -> usize {
        self.n
    }

    fn jacobian(&self, u: &[f64]) -> Matrix {
        eval_matrix(&self.a, self.n, u)
    }

    fn diffusion(&self, u: &[f64]) -> Matrix {
        eval_matrix(&self.b, self.n, u)
    }

    fn flux(&self, u: &[f64]) -> Option<Vec<f64>> {
        self.flux.as_ref().map(|f| f.iter().map(|e| e.eval(u)).collect())
    }

    fn eta(&self) -> f64 {
        self.eta
    }
}

/// Tabulated matrices; lookups use the nearest sample state.
pub struct TableSystem {
    n: usize,
    rows: Vec<(Vec<f64>, Matrix, Matrix)>,
    eta: f64,
}

impl TableSystem {
    fn nearest(&self, u: &[f64]) -> &(Vec<f64>, Matrix, Matrix) {
        let dist = |r: &Vec<f64>| r.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        self.rows
            .iter()
            .min_by(|x, y| dist(&x.0).total_cmp(&dist(&y.0)))
            .expect("table has rows")
    }
}

impl DiffusionSystem for TableSystem {
    fn dim(&self) -> usize {
        self.n
    }

    fn jacobian(&self, u: &[f64]) -> Matrix {
        self.nearest(u).1.clone()
    }

    fn diffusion(&self, u: &[f64]) -> Matrix {
        self.nearest(u).2.clone()
    }

    fn eta(&self) -> f64 {
        self.eta
    }
}

/// Loaded `eigen` input.
pub struct EigenInput {
    pub spec: EigenSpec,
    pub system: Box<dyn DiffusionSystem>,
    pub samples: Vec<Vec<f64>>,
    /// `A` at the perturbation state, when requested.
    pub perturbation_a: Option<Matrix>,
}

impl EigenInput {
    pub fn shocks(&self) -> Vec<Shock> {
        self.spec
            .shocks
            .iter()
            .map(|s| Shock {
                u_minus: s.u_minus.clone(),
                u_plus: s.u_plus.clone(),
                s: s.s,
            })
            .collect()
    }
}

pub fn load_eigen(path: &Path) -> Result<EigenInput, ConfigError> {
    let spec: EigenSpec = parse_toml(&read(path)?)?;
    let n = spec.n;
    if n == 0 {
        return Err(ConfigError::new("n must be positive"));
    }
    let check_len = |u: &[f64], what: &str| {
        if u.len() == n {
            Ok(())
        } else {
            Err(ConfigError::new(format!(
                "{what} has {} components, expected {n}",
                u.len()
            )))
        }
    };
    for s in &spec.samples {
        check_len(s, "sample")?;
    }
    for s in &spec.shocks {
        check_len(&s.u_minus, "shock u_minus")?;
        check_len(&s.u_plus, "shock u_plus")?;
    }

    let (system, samples, a_expr): (Box<dyn DiffusionSystem>, _, Option<Vec<Expression>>) =
        match (&spec.a, &spec.b, &spec.table_file) {
            (Some(a), Some(b), None) => {
                let a = parse_matrix(a, n, "A").map_err(ConfigError::new)?;
                let b = parse_matrix(b, n, "B").map_err(ConfigError::new)?;
                let flux = match &spec.flux {
                    Some(f) if f.len() != n => return Err(ConfigError::new(format!("flux must have {n} components"))),
                    Some(f) => Some(
                        f.iter()
                            .map(|s| Expression::parse(s, n).map_err(|m| ConfigError::new(format!("flux: {m}"))))
                            .collect::<Result<Vec<_>, _>>()?,
                    ),
                    None => None,
                };
                let sys = ExprSystem {
                    n,
                    a: a.clone(),
                    b,
                    flux,
                    eta: spec.eta,
                };
                (Box::new(sys), spec.samples.clone(), Some(a))
            }
            (None, None, Some(t)) => {
                let t = if t.is_relative() {
                    path.parent().map(|d| d.join(t)).unwrap_or_else(|| t.clone())
                } else {
                    t.clone()
                };
                let rows = read_matrix_table(&t, n)?;
                let samples = rows.iter().map(|r| r.0.clone()).collect();
                (Box::new(TableSystem { n, rows, eta: spec.eta }), samples, None)
            }
            _ => return Err(ConfigError::new("give either A and B, or table_file")),
        };

    let perturbation_a = match &spec.perturbation {
        None => None,
        Some(p) => {
            check_len(&p.u, "perturbation u")?;
            if p.t.len() != n || p.t.iter().any(|r| r.len() != n) {
                return Err(ConfigError::new(format!("perturbation t must be {n}x{n}")));
            }
            if p.etas.len() < 2 {
                return Err(ConfigError::new("perturbation needs at least two etas"));
            }
            Some(match &a_expr {
                Some(a) => eval_matrix(a, n, &p.u),
                None => system.jacobian(&p.u),
            })
        }
    };
    Ok(EigenInput {
        spec,
        system,
        samples,
        perturbation_a,
    })
}

fn read_matrix_table(path: &Path, n: usize) -> Result<Vec<(Vec<f64>, Matrix, Matrix)>, ConfigError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| ConfigError::new(format!("cannot read table {}: {e}", path.display())))?;
    let width = n + 2 * n * n;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| ConfigError::new(format!("table {}: {e}", path.display())))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(i + 1);
        let vals: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        let vals = match vals {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(ConfigError::at(
                    line,
                    format!("table {}: non-numeric entry", path.display()),
                ))
            }
        };
        if vals.len() != width {
            return Err(ConfigError::at(
                line,
                format!(
                    "table {}: expected {width} columns, found {}",
                    path.display(),
                    vals.len()
                ),
            ));
        }
        let u = vals[..n].to_vec();
        let a = Matrix::from_fn(n, |r, c| vals[n + r * n + c]);
        let b = Matrix::from_fn(n, |r, c| vals[n + n * n + r * n + c]);
        rows.push((u, a, b));
    }
    if rows.is_empty() {
        return Err(ConfigError::new(format!("table {} has no rows", path.display())));
    }
    Ok(rows)
}

/// Loaded `nsystem` input.
pub struct NSystemInput {
    pub spec: NSystemSpec,
    pub flux: Vec<Expression>,
}

impl NSystemInput {
    pub fn config(&self) -> NSystemConfig {
        NSystemConfig {
            eps: self.spec.eps,
            gamma: self.spec.gamma,
            half_width: self.spec.half_width,
            n_nodes: self.spec.grid,
            amplitude_cap: self.spec.amplitude_cap,
            iterations: self.spec.iterations,
        }
    }

    pub fn closure(&self) -> selfsim_core::nsystem::ClosureFlux {
        let f = self.flux.clone();
        selfsim_core::nsystem::ClosureFlux::new(self.spec.n, move |w| f.iter().map(|e| e.eval(w)).collect())
    }
}

pub fn load_nsystem(path: &Path) -> Result<NSystemInput, ConfigError> {
    let spec: NSystemSpec = parse_toml(&read(path)?)?;
    let n = spec.n;
    if n == 0 || spec.flux.len() != n || spec.w_b.len() != n || spec.w_r.len() != n {
        return Err(ConfigError::new(format!(
            "flux, w_b and w_r must all have n = {n} components"
        )));
    }
    let flux = spec
        .flux
        .iter()
        .map(|s| Expression::parse(s, n).map_err(|m| ConfigError::new(format!("flux: {m}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NSystemInput { spec, flux })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions_use_state_variables() {
        let e = Expression::parse("-(1 + 3*u2^2) + sin(0)", 2).unwrap();
        assert_eq!(e.eval(&[0.0, 1.0]), -4.0);
    }

    #[test]
    fn unknown_variable_is_rejected() {
        assert!(Expression::parse("u3 + 1", 2).is_err());
        assert!(Expression::parse("x", 1).is_err());
        assert!(Expression::parse("u1 +", 1).is_err());
    }

    #[test]
    fn matrix_shape_is_checked() {
        let rows = vec![vec!["1".to_string()], vec!["0".to_string(), "1".to_string()]];
        assert!(parse_matrix(&rows, 2, "B").is_err());
    }

    #[test]
    fn eigen_spec_line_numbers() {
        let err = parse_toml::<EigenSpec>("n = 2\nA = [[\"0\", \"1\"], [\"1\", \"0\"]]\nbogus = 1\n").unwrap_err();
        assert_eq!(err.line, Some(3));
    }
}
