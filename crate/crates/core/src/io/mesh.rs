use super::IoError;
use crate::grid::GridSpec;
use crate::linalg::Vec3;
use std::io::Write;

/// Grid points as OBJ vertices and one quad per grid cell, 1-indexed.
pub fn write_obj(mut out: impl Write, grid: &GridSpec, points: &[Vec3]) -> std::io::Result<()> {
    for p in points {
        writeln!(out, "v {} {} {}", super::fmt_f64(p.0[0]), super::fmt_f64(p.0[1]), super::fmt_f64(p.0[2]))?;
    }
    for j in 0..grid.nv - 1 {
        for i in 0..grid.nu - 1 {
            let a = grid.index(i, j) + 1;
            let b = grid.index(i + 1, j) + 1;
            let c = grid.index(i + 1, j + 1) + 1;
            let d = grid.index(i, j + 1) + 1;
            writeln!(out, "f {a} {b} {c} {d}")?;
        }
    }
    Ok(())
}

pub fn write_obj_file(path: &std::path::Path, grid: &GridSpec, points: &[Vec3]) -> Result<(), IoError> {
    let err = |source| IoError::Io { path: path.display().to_string(), source };
    let f = std::fs::File::create(path).map_err(err)?;
    let mut w = std::io::BufWriter::new(f);
    write_obj(&mut w, grid, points).map_err(err)?;
    w.flush().map_err(err)
}
