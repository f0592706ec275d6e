//! Reconstruction data as a directory: a manifest plus one CSV per field.
//!
//! ```text
//! grid = u0:u1:nu,v0:v1:nv
//! origin = u,v
//! seed = x,y,z
//! field.E_omega = E_omega.csv
//! ...
//! ```
//!
//! Each field file has the header `u,v,value,du,dv,duu,duv,dvv` and one row
//! per node in grid order.

use super::{fmt_f64, format_grid, key_values, parse_floats, parse_grid, IoError};
use crate::exprmap::Jet2;
use crate::grid::GridSpec;
use crate::linalg::Vec3;
use crate::reconstruct::{ReconstructionData, FIELD_NAMES};
use std::path::Path;

pub const MANIFEST: &str = "manifest.txt";
const HEADER: [&str; 8] = ["u", "v", "value", "du", "dv", "duu", "duv", "dvv"];

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> IoError + '_ {
    move |source| IoError::Csv { path: path.display().to_string(), source }
}

pub fn write_data_dir(dir: &Path, data: &ReconstructionData) -> Result<(), IoError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let g = &data.grid;
    let (ou, ov) = g.point(g.index(data.origin.0, data.origin.1));
    let s = data.seed.0;
    let mut manifest = format!(
        "grid = {}\norigin = {},{}\nseed = {},{},{}\n",
        format_grid(g),
        fmt_f64(ou),
        fmt_f64(ov),
        fmt_f64(s[0]),
        fmt_f64(s[1]),
        fmt_f64(s[2])
    );
    for (i, name) in FIELD_NAMES.iter().enumerate() {
        let file = format!("{name}.csv");
        manifest += &format!("field.{name} = {file}\n");
        let path = dir.join(&file);
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(&path).map_err(csv_err(&path))?;
        w.write_record(HEADER).map_err(csv_err(&path))?;
        for (k, j) in data.scalar(i).iter().enumerate() {
            let (u, v) = g.point(k);
            let row = [u, v, j.value, j.du, j.dv, j.duu, j.duv, j.dvv].map(fmt_f64);
            w.write_record(&row).map_err(csv_err(&path))?;
        }
        w.flush().map_err(io_err(&path))?;
    }
    let path = dir.join(MANIFEST);
    std::fs::write(&path, manifest).map_err(io_err(&path))
}

fn read_field(path: &Path, grid: &GridSpec) -> Result<Vec<Jet2>, IoError> {
    let fmt = |line: usize, message: String| IoError::Format { path: path.display().to_string(), line, message };
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?;
    if header.iter().ne(HEADER) {
        return Err(fmt(1, format!("header must be {}", HEADER.join(","))));
    }
    let mut out = Vec::with_capacity(grid.len());
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let line = k + 2;
        if rec.len() != HEADER.len() {
            return Err(fmt(line, format!("expected {} columns, got {}", HEADER.len(), rec.len())));
        }
        let mut x = [0.0; 8];
        for (c, t) in rec.iter().enumerate() {
            x[c] = t.parse().map_err(|_| fmt(line, format!("'{t}' is not a number")))?;
        }
        if k >= grid.len() {
            return Err(fmt(line, format!("more rows than the {} grid nodes", grid.len())));
        }
        let (u, v) = grid.point(k);
        let tol = 1e-9 * (1.0 + u.abs().max(v.abs()));
        if (x[0] - u).abs() > tol || (x[1] - v).abs() > tol {
            return Err(fmt(line, format!("node ({}, {}) does not match grid node ({u}, {v})", x[0], x[1])));
        }
        out.push(Jet2 { value: x[2], du: x[3], dv: x[4], duu: x[5], duv: x[6], dvv: x[7] });
    }
    if out.len() != grid.len() {
        return Err(fmt(out.len() + 1, format!("{} rows, grid has {} nodes", out.len(), grid.len())));
    }
    Ok(out)
}

pub fn read_data_dir(dir: &Path) -> Result<ReconstructionData, IoError> {
    let mpath = dir.join(MANIFEST);
    let text = std::fs::read_to_string(&mpath).map_err(io_err(&mpath))?;
    let fmt = |line: usize, message: String| IoError::Format { path: mpath.display().to_string(), line, message };
    let pairs = key_values(&text).map_err(|(l, m)| fmt(l, m))?;
    let find = |key: &str| pairs.iter().find(|(_, k, _)| k == key).ok_or_else(|| fmt(0, format!("missing key '{key}'")));

    let (gl, _, gs) = find("grid")?;
    let grid = parse_grid(gs).map_err(|m| fmt(*gl, m))?;
    let mut fields: Vec<Vec<Jet2>> = Vec::with_capacity(FIELD_NAMES.len());
    for name in FIELD_NAMES {
        let (_, _, file) = find(&format!("field.{name}"))?;
        fields.push(read_field(&dir.join(file), &grid)?);
    }
    let fields: [Vec<Jet2>; 11] = fields.try_into().expect("eleven fields");
    let mut data = ReconstructionData::from_scalars(grid, fields).map_err(|e| fmt(0, e.to_string()))?;
    if let Ok((l, _, s)) = find("origin") {
        let [u, v] = parse_floats::<2>(s).map_err(|m| fmt(*l, m))?;
        data = data.with_origin(u, v);
    }
    if let Ok((l, _, s)) = find("seed") {
        let q = parse_floats::<3>(s).map_err(|m| fmt(*l, m))?;
        data = data.with_seed(Vec3(q));
    }
    Ok(data)
}
