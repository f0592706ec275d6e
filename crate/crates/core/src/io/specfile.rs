//! Plain-text frontal specs.
//!
//! One `key = value` per line; blank lines and lines starting with `#` are
//! ignored. Required keys: `name`, `x.1`–`x.3`, `omega.11`–`omega.32`
//! (`omega.ij` is coordinate `i` of `w_j`), `domain.u0`, `domain.u1`,
//! `domain.v0`, `domain.v1`. Optional: `expect_violation = true|false`,
//! `grid.nu` and `grid.nv` (both or neither).

use super::{key_values, IoError};
use crate::exprmap::{parse, ParseError};
use crate::frontal::{Domain, FrontalSpec};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("line {line}: `{key}`: {source}")]
    Expression { line: usize, key: String, source: ParseError },
    #[error("line {line}: `{key}`: {message}")]
    BadValue { line: usize, key: String, message: String },
    #[error("empty domain [{u0}, {u1}] × [{v0}, {v1}]")]
    EmptyDomain { u0: f64, u1: f64, v0: f64, v1: f64 },
}

const X_KEYS: [&str; 3] = ["x.1", "x.2", "x.3"];
const OMEGA_KEYS: [[&str; 2]; 3] = [["omega.11", "omega.12"], ["omega.21", "omega.22"], ["omega.31", "omega.32"]];
const DOMAIN_KEYS: [&str; 4] = ["domain.u0", "domain.u1", "domain.v0", "domain.v1"];

fn known(key: &str) -> bool {
    key == "name"
        || key == "expect_violation"
        || key == "grid.nu"
        || key == "grid.nv"
        || X_KEYS.contains(&key)
        || OMEGA_KEYS.iter().flatten().any(|k| *k == key)
        || DOMAIN_KEYS.contains(&key)
}

pub fn parse_spec(text: &str) -> Result<FrontalSpec, SpecFileError> {
    let pairs = key_values(text).map_err(|(line, message)| SpecFileError::Syntax { line, message })?;
    let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (line, k, v) in pairs {
        if !known(&k) {
            return Err(SpecFileError::UnknownKey { line, key: k });
        }
        if map.contains_key(&k) {
            return Err(SpecFileError::DuplicateKey { line, key: k });
        }
        map.insert(k, (line, v));
    }
    let get = |k: &str| map.get(k).ok_or_else(|| SpecFileError::MissingKey(k.to_string()));
    let expr = |k: &str| {
        let (line, v) = get(k)?;
        parse(v).map_err(|source| SpecFileError::Expression { line: *line, key: k.to_string(), source })
    };
    let number = |k: &str| {
        let (line, v) = get(k)?;
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| SpecFileError::BadValue { line: *line, key: k.to_string(), message: format!("'{v}' is not a finite number") })
    };
    let count = |k: &str| -> Result<Option<usize>, SpecFileError> {
        match map.get(k) {
            None => Ok(None),
            Some((line, v)) => v.parse::<usize>().ok().filter(|n| *n >= 2).map(Some).ok_or_else(|| {
                SpecFileError::BadValue { line: *line, key: k.to_string(), message: format!("'{v}' is not a node count ≥ 2") }
            }),
        }
    };

    let name = get("name")?.1.clone();
    let x = [expr(X_KEYS[0])?, expr(X_KEYS[1])?, expr(X_KEYS[2])?];
    let mut omega = Vec::with_capacity(3);
    for row in OMEGA_KEYS {
        omega.push([expr(row[0])?, expr(row[1])?]);
    }
    let [u0, u1, v0, v1] = [0, 1, 2, 3].map(|i| number(DOMAIN_KEYS[i]));
    let (u0, u1, v0, v1) = (u0?, u1?, v0?, v1?);
    if !(u0 < u1 && v0 < v1) {
        return Err(SpecFileError::EmptyDomain { u0, u1, v0, v1 });
    }
    let expect_violation = match map.get("expect_violation") {
        None => false,
        Some((line, v)) => match v.as_str() {
            "true" => true,
            "false" => false,
            _ => {
                return Err(SpecFileError::BadValue {
                    line: *line,
                    key: "expect_violation".into(),
                    message: format!("'{v}' is not true or false"),
                })
            }
        },
    };
    let grid = match (count("grid.nu")?, count("grid.nv")?) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        (Some(_), None) => return Err(SpecFileError::MissingKey("grid.nv".into())),
        (None, Some(_)) => return Err(SpecFileError::MissingKey("grid.nu".into())),
    };
    Ok(FrontalSpec {
        name,
        x,
        omega: omega.try_into().expect("three rows"),
        domain: Domain::new(u0, u1, v0, v1),
        expect_violation,
        grid,
    })
}

/// The spec as text that [`parse_spec`] reads back.
pub fn format_spec(spec: &FrontalSpec) -> String {
    let mut s = format!("name = {}\n", spec.name);
    for (k, e) in X_KEYS.iter().zip(&spec.x) {
        s += &format!("{k} = {e}\n");
    }
    for (row, keys) in spec.omega.iter().zip(OMEGA_KEYS) {
        for (e, k) in row.iter().zip(keys) {
            s += &format!("{k} = {e}\n");
        }
    }
    let d = spec.domain;
    for (k, v) in DOMAIN_KEYS.iter().zip([d.u0, d.u1, d.v0, d.v1]) {
        s += &format!("{k} = {v}\n");
    }
    if spec.expect_violation {
        s += "expect_violation = true\n";
    }
    if let Some((nu, nv)) = spec.grid {
        s += &format!("grid.nu = {nu}\ngrid.nv = {nv}\n");
    }
    s
}

/// Reads and parses a spec file. The outer error is I/O, the inner one the
/// file's content.
pub fn read_spec_file(path: &std::path::Path) -> Result<Result<FrontalSpec, SpecFileError>, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Io { path: path.display().to_string(), source })?;
    Ok(parse_spec(&text))
}
