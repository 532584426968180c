//! CSV, JSON and gnuplot writers.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Round-trip representation: 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Output directory, created on demand.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(OutDir {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes a header and rows of preformatted cells.
    pub fn csv(&self, name: &str, header: &[String], rows: &[Vec<String>]) -> io::Result<PathBuf> {
        let path = self.path(name);
        let mut w = csv::WriterBuilder::new().flexible(false).from_path(&path)?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Numeric columns, all of equal length.
    pub fn columns(&self, name: &str, header: &[&str], cols: &[&[f64]]) -> io::Result<PathBuf> {
        let n = cols.first().map_or(0, |c| c.len());
        let rows: Vec<Vec<String>> = (0..n).map(|i| cols.iter().map(|c| num(c[i])).collect()).collect();
        let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        self.csv(name, &header, &rows)
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> io::Result<PathBuf> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        fs::write(&path, text + "\n")?;
        Ok(path)
    }

    pub fn text(&self, name: &str, body: &str) -> io::Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, body)?;
        Ok(path)
    }
}

/// JSON number, with non-finite values as null.
pub fn jnum(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

/// Gnuplot script drawing columns `2..` of each CSV against column 1.
pub fn gnuplot(png: &str, xlabel: &str, plots: &[(&str, &[(usize, &str)])], logx: bool) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 1000,640\n");
    s.push_str(&format!("set output '{png}'\n"));
    s.push_str(&format!("set xlabel '{xlabel}'\n"));
    s.push_str("set key outside right\n");
    if logx {
        s.push_str("set logscale x\n");
    }
    let mut parts = Vec::new();
    for (file, cols) in plots {
        for (c, title) in cols.iter() {
            parts.push(format!("'{file}' using 1:{c} skip 1 with lines title '{title}'"));
        }
    }
    s.push_str("plot ");
    s.push_str(&parts.join(", \\\n     "));
    s.push('\n');
    s
}
