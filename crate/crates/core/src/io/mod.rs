//! Text formats: spec files, reconstruction data directories and OBJ meshes.

mod data;
mod mesh;
mod specfile;

pub use data::{read_data_dir, write_data_dir, MANIFEST};
pub use mesh::{write_obj, write_obj_file};
pub use specfile::{format_spec, parse_spec, read_spec_file, SpecFileError};

use crate::grid::GridSpec;
use std::fmt;

#[derive(Debug)]
pub enum IoError {
    Io { path: String, source: std::io::Error },
    Csv { path: String, source: csv::Error },
    Format { path: String, line: usize, message: String },
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::Io { path, source } => write!(f, "{path}: {source}"),
            IoError::Csv { path, source } => write!(f, "{path}: {source}"),
            IoError::Format { path, line, message } => write!(f, "{path}:{line}: {message}"),
        }
    }
}

impl std::error::Error for IoError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            IoError::Io { source, .. } => Some(source),
            IoError::Csv { source, .. } => Some(source),
            IoError::Format { .. } => None,
        }
    }
}

/// Float text with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `u0:u1:nu,v0:v1:nv`.
pub fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let axes: Vec<&str> = s.split(',').collect();
    let [a, b] = axes[..] else {
        return Err(format!("grid '{s}' is not of the form u0:u1:nu,v0:v1:nv"));
    };
    let axis = |t: &str| -> Result<(f64, f64, usize), String> {
        let p: Vec<&str> = t.split(':').map(str::trim).collect();
        let [lo, hi, n] = p[..] else {
            return Err(format!("axis '{t}' is not of the form lo:hi:n"));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|_| format!("'{x}' is not a number"));
        let n = n.parse::<usize>().map_err(|_| format!("'{n}' is not a node count"))?;
        Ok((num(lo)?, num(hi)?, n))
    };
    let (u0, u1, nu) = axis(a)?;
    let (v0, v1, nv) = axis(b)?;
    GridSpec::new(u0, u1, nu, v0, v1, nv).map_err(|e| e.0)
}

pub fn format_grid(g: &GridSpec) -> String {
    format!("{}:{}:{},{}:{}:{}", g.u0, g.u1, g.nu, g.v0, g.v1, g.nv)
}

/// Comma-separated floats, exactly `n` of them.
pub fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("'{}' is not a number", t.trim())))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

/// Splits `key = value` lines, skipping blanks and `#` comments. Returns
/// `(line number, key, value)`.
pub(crate) fn key_values(text: &str) -> Result<Vec<(usize, String, String)>, (usize, String)> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err((i + 1, format!("expected 'key = value', got '{line}'")));
        };
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}
