//! Run configuration: a TOML file with `[law]`, `[solver]`, `[sweep]`,
//! `[output]` and `[oracle]` sections whose keys mirror the command-line
//! flags. Flags override file values.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use selfsim_core::{LawKind, SolverConfig, StressLaw};

/// Config problem with an optional 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            message: message.into(),
        }
    }

    pub fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LawSection {
    pub kind: String,
    pub params: Vec<f64>,
    pub c0: Option<f64>,
    pub table_file: Option<PathBuf>,
}

impl Default for LawSection {
    fn default() -> Self {
        LawSection {
            kind: "linear".into(),
            params: Vec::new(),
            c0: None,
            table_file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub vl: f64,
    pub wl: f64,
    pub vr: f64,
    pub wr: f64,
    pub wb: f64,
    pub eps: f64,
    pub gamma: f64,
    /// Excision half-width (`0` for the full line).
    pub delta: f64,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub grid: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        SolverSection {
            vl: 0.0,
            wl: 0.0,
            vr: 0.0,
            wr: 1.0,
            wb: 1.0,
            eps: d.eps,
            gamma: d.gamma,
            delta: d.excision_delta,
            half_width: d.half_width,
            grid: d.n_nodes,
            tol: d.tol,
            max_iter: d.max_iter,
            damping: d.damping,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub eps: Vec<f64>,
    pub gamma: f64,
    pub r0: f64,
    pub jobs: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            eps: vec![0.08, 0.04, 0.02, 0.01],
            gamma: 0.0,
            r0: 0.1,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub out_dir: PathBuf,
    pub dump_measures: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            out_dir: PathBuf::from("out"),
            dump_measures: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    pub t_final: f64,
    pub cfl: f64,
    #[serde(rename = "X")]
    pub half_width: f64,
    pub cells: usize,
    pub r0: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        let d = selfsim_core::oracle::OracleConfig::default();
        OracleSection {
            t_final: d.t_final,
            cfl: d.cfl,
            half_width: d.half_width,
            cells: d.cells,
            r0: 0.0,
        }
    }
}

/// Fully resolved configuration, embedded in every summary.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub law: LawSection,
    pub solver: SolverSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
    pub oracle: OracleSection,
}

/// 1-based line of a byte offset.
pub fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            match e.span() {
                Some(span) => ConfigError::at(line_of(text, span.start), msg),
                None => ConfigError::new(msg),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        // table paths are relative to the config file
        if let (Some(t), Some(dir)) = (&cfg.law.table_file, path.parent()) {
            if t.is_relative() {
                cfg.law.table_file = Some(dir.join(t));
            }
        }
        Ok(cfg)
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            eps: s.eps,
            gamma: s.gamma,
            half_width: s.half_width,
            n_nodes: s.grid,
            excision_delta: s.delta,
            damping: s.damping,
            tol: s.tol,
            max_iter: s.max_iter,
        }
    }

    pub fn riemann_data(&self) -> selfsim_core::RiemannData {
        let s = &self.solver;
        selfsim_core::RiemannData::new(s.vl, s.wl, s.vr, s.wr)
    }

    /// Builds the stress law; table files are read here.
    pub fn stress_law(&self) -> Result<StressLaw, ConfigError> {
        let l = &self.law;
        let kind = match l.kind.as_str() {
            "linear" => LawKind::Linear,
            "hardening" => LawKind::Hardening,
            "cubic" => LawKind::Cubic,
            "custom" | "tabulated" => LawKind::Custom,
            other => {
                return Err(ConfigError::new(format!(
                    "unknown law kind `{other}` (expected linear, hardening, cubic or custom)"
                )))
            }
        };
        let law = match kind {
            LawKind::Custom => {
                let path = l
                    .table_file
                    .as_ref()
                    .ok_or_else(|| ConfigError::new("custom law needs law.table_file"))?;
                let (w, sigma) = read_table(path)?;
                StressLaw::tabulated(&w, &sigma)
            }
            LawKind::Linear => {
                let c0 = l.c0.or_else(|| l.params.first().copied()).unwrap_or(1.0);
                StressLaw::linear(c0)
            }
            _ => StressLaw::from_kind(kind, &l.params),
        };
        law.map_err(|e| ConfigError::new(format!("law: {e}")))
    }
}

/// Two-column CSV `w, sigma`; a header row is allowed.
pub fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), ConfigError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| ConfigError::new(format!("cannot read table {}: {e}", path.display())))?;
    let (mut w, mut s) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| ConfigError::new(format!("table {}: {e}", path.display())))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(i + 1);
        if rec.len() < 2 {
            return Err(ConfigError::at(
                line,
                format!("table {}: expected two columns", path.display()),
            ));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                w.push(a);
                s.push(b);
            }
            // header
            _ if i == 0 => continue,
            _ => {
                return Err(ConfigError::at(
                    line,
                    format!("table {}: non-numeric entry `{}`", path.display(), rec.as_slice()),
                ))
            }
        }
    }
    Ok((w, s))
}
