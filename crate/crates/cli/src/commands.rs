use crate::summary::{Check, CheckKind, ErrorKind, RunSummary};
use frontal_core::catalog::{self, lookup};
use frontal_core::classify::{classify_grid, ClassifyError, DEFAULT_TOL_CLASS};
use frontal_core::compat::{
    classical_compatibility_residuals, ideal_membership_report, omega_fields, reports_from_fields,
    weingarten_residuals, CompatError, EquationId, ResidualReport, DEFAULT_REFINEMENT_LEVELS,
};
use frontal_core::frontal::{sample_jets, FrontalError, FrontalSpec, DEFAULT_TOL_SING};
use frontal_core::io::{
    fmt_f64, format_grid, format_spec, read_data_dir, read_spec_file, write_data_dir, write_obj_file,
};
use frontal_core::linalg::Vec3;
use frontal_core::reconstruct::{derive_data, reconstruct, roundtrip, ReconstructError, ReconstructionData};
use frontal_core::GridSpec;
use std::io::Write;
use std::path::Path;

/// Nodes per side when neither `--grid` nor `grid.nu`/`grid.nv` fix the grid.
pub const DEFAULT_NODES: usize = 101;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-7;
pub const DEFAULT_CLASSICAL_TOL: f64 = 1e-6;
pub const DEFAULT_ROUNDTRIP_TOL: f64 = 1e-4;
pub const DEFAULT_ROUNDTRIP_H: f64 = 0.01;
pub const DEFAULT_FROBENIUS_TOL: f64 = 1e-3;
/// Prefix naming a built-in surface instead of a spec file.
pub const CATALOG_PREFIX: &str = "catalog:";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Rce,
    Sce,
    Gauss,
    Ideal,
    Classical,
    All,
}

type Fatal = (ErrorKind, String, String);
/// A fatal error and the summary gathered before it, if any.
type Failure = (Fatal, Option<Box<RunSummary>>);

fn fatal(kind: ErrorKind, stage: &str, message: impl ToString) -> Fatal {
    (kind, stage.to_string(), message.to_string())
}

fn frontal_kind(e: &FrontalError) -> ErrorKind {
    match e {
        FrontalError::Eval(_) | FrontalError::RankDeficientBase { .. } | FrontalError::DegenerateNormal { .. } => {
            ErrorKind::Eval
        }
        _ => ErrorKind::Pipeline,
    }
}

fn compat_fatal(e: &CompatError) -> Fatal {
    match e {
        CompatError::Frontal(f) => fatal(frontal_kind(f), "evaluate", f),
        CompatError::NonFinite { .. } => fatal(ErrorKind::Eval, "evaluate", e),
        CompatError::MembershipViolation { .. } => fatal(ErrorKind::Pipeline, "ideal", e),
    }
}

fn reconstruct_fatal(e: &ReconstructError) -> Fatal {
    use ReconstructError::*;
    match e {
        Frontal(f) => fatal(frontal_kind(f), "derive", f),
        NotPositiveDefinite { .. } | Data(_) => fatal(ErrorKind::Input, "data", e),
        MembershipViolation { .. } | InterpolationGap { .. } => fatal(ErrorKind::NotIntegrable, "tau", e),
        StepFailure { .. } => fatal(ErrorKind::NotIntegrable, "integrate", e),
        DegenerateCloud(_) => fatal(ErrorKind::Pipeline, "align", e),
    }
}

/// A spec file, or `catalog:NAME` for a built-in.
pub fn load_spec(arg: &str) -> Result<FrontalSpec, Fatal> {
    if let Some(name) = arg.strip_prefix(CATALOG_PREFIX) {
        return lookup(name).ok_or_else(|| {
            fatal(ErrorKind::Input, "spec", format!("no catalog entry '{name}'; known: {}", catalog::names().join(", ")))
        });
    }
    match read_spec_file(Path::new(arg)) {
        Err(e) => Err(fatal(ErrorKind::Input, "spec", e)),
        Ok(Err(e)) => Err(fatal(ErrorKind::Input, "spec", format!("{arg}: {e}"))),
        Ok(Ok(s)) => Ok(s),
    }
}

fn pick_grid(spec: &FrontalSpec, grid: Option<GridSpec>) -> GridSpec {
    grid.unwrap_or_else(|| spec.default_grid(DEFAULT_NODES))
}

fn spacing_grid(spec: &FrontalSpec, grid: Option<GridSpec>, h: f64) -> Result<GridSpec, Fatal> {
    match grid {
        Some(g) => Ok(g),
        None => {
            let d = spec.domain;
            GridSpec::with_spacing(d.u0, d.u1, d.v0, d.v1, h).map_err(|e| fatal(ErrorKind::Input, "grid", e.0))
        }
    }
}

fn start(command: &str, spec: &FrontalSpec, grid: &GridSpec) -> RunSummary {
    let mut s = RunSummary::new(command);
    s.name = spec.name.clone();
    s.grid = format_grid(grid);
    s.expect_violation = spec.expect_violation;
    s
}

fn ensure_dir(dir: &Path) -> Result<(), Fatal> {
    std::fs::create_dir_all(dir).map_err(|e| fatal(ErrorKind::Input, "output", format!("{}: {e}", dir.display())))
}

fn write_obj(s: &mut RunSummary, dir: &Path, file: &str, grid: &GridSpec, pts: &[Vec3]) -> Result<(), Fatal> {
    let path = dir.join(file);
    write_obj_file(&path, grid, pts).map_err(|e| fatal(ErrorKind::Input, "output", e))?;
    s.files.push(path.display().to_string());
    Ok(())
}

fn write_summary(s: &mut RunSummary, dir: &Path) -> Result<(), Fatal> {
    let path = dir.join("summary.json");
    s.files.push(path.display().to_string());
    s.finish();
    std::fs::write(&path, s.to_json() + "\n").map_err(|e| fatal(ErrorKind::Input, "output", format!("{}: {e}", path.display())))
}

/// Runs `body`; a fatal error replaces the summary's outcome.
fn guarded(command: &str, body: impl FnOnce() -> Result<RunSummary, Failure>) -> RunSummary {
    let mut s = match body() {
        Ok(s) => s,
        Err(((kind, stage, msg), partial)) => {
            let mut s = partial.map(|b| *b).unwrap_or_else(|| RunSummary::new(command));
            s.fail(kind, &stage, msg);
            s
        }
    };
    s.finish();
    s
}

fn bare(f: Fatal) -> Failure {
    (f, None)
}

fn residual_check(r: &ResidualReport, tol: f64) -> Check {
    Check {
        name: r.id.as_str().to_string(),
        kind: CheckKind::Residual,
        value: r.max_abs_residual,
        tol,
        at: Some([r.argmax.0, r.argmax.1]),
        passed: r.passes(tol),
        detail: (r.skipped > 0).then(|| format!("{} nodes skipped", r.skipped)),
    }
}

/// Per-node classification: CSV of `u, v, lambda_det, K_rel, H_rel, verdict`,
/// the OBJ mesh of `x` and the summary.
pub fn analyze(spec_arg: &str, grid: Option<GridSpec>, tol: Option<f64>, out: &Path) -> RunSummary {
    guarded("analyze", || {
        let spec = load_spec(spec_arg).map_err(bare)?;
        let grid = pick_grid(&spec, grid);
        let mut s = start("analyze", &spec, &grid);
        let tol_class = tol.unwrap_or(DEFAULT_TOL_CLASS);
        let gc = classify_grid(&spec, &grid, DEFAULT_TOL_SING, tol_class);
        let mut rows = Vec::with_capacity(grid.len());
        let mut inconsistent = Vec::new();
        for r in &gc.nodes {
            match r {
                Ok(r) => rows.push(r.clone()),
                Err(ClassifyError::Frontal(f)) => return Err((fatal(frontal_kind(f), "classify", f), Some(Box::new(s)))),
                Err(e) => inconsistent.push(e.to_string()),
            }
        }
        if !inconsistent.is_empty() {
            s.push(Check {
                name: "classification".into(),
                kind: CheckKind::Classification,
                value: inconsistent.len() as f64,
                tol: 0.0,
                at: None,
                passed: false,
                detail: Some(inconsistent[0].clone()),
            });
        }
        let pts: Vec<Vec3> = sample_jets(&spec, &grid)
            .into_iter()
            .map(|j| j.map(|j| j.x.map(|c| c.value)))
            .collect::<Result<_, _>>()
            .map_err(|f| (fatal(frontal_kind(&f), "evaluate", &f), None))?;

        s.singular_nodes = Some(rows.iter().filter(|r| r.verdict.is_singular()).count());
        s.histogram = Some(gc.histogram());
        s.metrics.insert("crossings".into(), gc.crossings.len() as f64);
        s.metrics.insert("tol_class".into(), tol_class);

        ensure_dir(out).map_err(bare)?;
        let path = out.join("fields.csv");
        write_fields_csv(&path, &rows).map_err(|e| (fatal(ErrorKind::Input, "output", format!("{}: {e}", path.display())), None))?;
        s.files.push(path.display().to_string());
        write_obj(&mut s, out, "surface.obj", &grid, &pts).map_err(bare)?;
        write_summary(&mut s, out).map_err(bare)?;
        Ok(s)
    })
}

fn write_fields_csv(path: &Path, rows: &[frontal_core::classify::ClassificationReport]) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "u,v,lambda_det,K_rel,H_rel,verdict")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_f64(r.point.0),
            fmt_f64(r.point.1),
            fmt_f64(r.lambda_det),
            fmt_f64(r.k_rel),
            fmt_f64(r.h_rel),
            r.verdict
        )?;
    }
    w.flush()
}

fn suite_ids(suite: Suite) -> Vec<EquationId> {
    let mut ids = Vec::new();
    if matches!(suite, Suite::Rce | Suite::All) {
        ids.extend(EquationId::RCE);
        ids.extend(EquationId::COMPACT);
    }
    if matches!(suite, Suite::Gauss | Suite::All) {
        ids.extend([EquationId::GaussT, EquationId::PropEU, EquationId::PropEV]);
    }
    if matches!(suite, Suite::Sce | Suite::All) {
        ids.extend(EquationId::SCE);
    }
    ids
}

/// Runs the selected identity suites. `--tol` overrides the default
/// tolerance of every residual suite.
pub fn check(spec_arg: &str, grid: Option<GridSpec>, suite: Suite, tol: Option<f64>, out: Option<&Path>) -> RunSummary {
    guarded("check", || {
        let spec = load_spec(spec_arg).map_err(bare)?;
        let grid = pick_grid(&spec, grid);
        let mut s = start("check", &spec, &grid);
        let tol_rel = tol.unwrap_or(DEFAULT_RESIDUAL_TOL);
        let tol_classical = tol.unwrap_or(DEFAULT_CLASSICAL_TOL);

        // Evaluation failures abort unless a violation is expected, in which
        // case they are recorded and the remaining suites still run.
        let suite_error = |s: &mut RunSummary, name: &str, e: &CompatError| -> Result<(), Failure> {
            if spec.expect_violation {
                s.suite_errors.push(format!("{name}: {e}"));
                Ok(())
            } else {
                Err((compat_fatal(e), Some(Box::new(s.clone()))))
            }
        };

        let ids = suite_ids(suite);
        if !ids.is_empty() {
            match omega_fields(&spec, &grid).and_then(|f| reports_from_fields(&f, &ids)) {
                Ok(reports) => reports.iter().for_each(|r| s.push(residual_check(r, tol_rel))),
                Err(e) => suite_error(&mut s, "relative", &e)?,
            }
        }
        if matches!(suite, Suite::Gauss | Suite::All) {
            match weingarten_residuals(&spec, &grid) {
                Ok(r) => s.push(residual_check(&r, tol_rel)),
                Err(e) => suite_error(&mut s, "wo", &e)?,
            }
        }
        if matches!(suite, Suite::Classical | Suite::All) {
            match classical_compatibility_residuals(&spec, &grid) {
                Ok(reports) => reports.iter().for_each(|r| s.push(residual_check(r, tol_classical))),
                Err(e) => suite_error(&mut s, "classical", &e)?,
            }
        }
        if matches!(suite, Suite::Ideal | Suite::All) {
            let m = ideal_membership_report(&spec, &grid, DEFAULT_REFINEMENT_LEVELS);
            s.singular_nodes = Some(m.singular_nodes);
            if let Some(last) = m.levels.iter().rev().find(|l| l.band_pairs > 0) {
                s.metrics.insert("ideal_tau_osc".into(), last.tau_osc);
            }
            s.metrics.insert("ideal_theta_defect".into(), m.theta_defect);
            let (passed, at, detail) = match &m.violation {
                None => (true, None, None),
                Some((failure, (u, v), detail)) => {
                    (false, Some([*u, *v]), Some(format!("MembershipViolation: {failure}; {detail}")))
                }
            };
            s.push(Check {
                name: "ideal".into(),
                kind: CheckKind::Membership,
                value: m.n_max_on_sigma,
                tol: frontal_core::reconstruct::N_TOL,
                at,
                passed,
                detail,
            });
        }
        if let Some(dir) = out {
            ensure_dir(dir).map_err(bare)?;
            write_summary(&mut s, dir).map_err(bare)?;
        }
        Ok(s)
    })
}

/// Derive, reconstruct and align; passes when the aligned rms is within
/// `tol`.
pub fn roundtrip_cmd(spec_arg: &str, grid: Option<GridSpec>, h: f64, tol: f64, out: Option<&Path>) -> RunSummary {
    guarded("roundtrip", || {
        let spec = load_spec(spec_arg).map_err(bare)?;
        let grid = spacing_grid(&spec, grid, h).map_err(bare)?;
        let mut s = start("roundtrip", &spec, &grid);
        let rt = roundtrip(&spec, &grid).map_err(|e| (reconstruct_fatal(&e), Some(Box::new(s.clone()))))?;
        let a = &rt.alignment;
        s.push(Check {
            name: "alignment_rms".into(),
            kind: CheckKind::Alignment,
            value: a.rms_error,
            tol,
            at: None,
            passed: a.rms_error <= tol,
            detail: None,
        });
        frame_metrics(&mut s, &rt.frame);
        s.metrics.insert("alignment_max".into(), a.max_error);
        s.metrics.insert("rotation_det".into(), a.rotation.det());
        if let Some(dir) = out {
            ensure_dir(dir).map_err(bare)?;
            let aligned: Vec<Vec3> = rt.frame.x.iter().map(|p| a.rotation.mul_vec(p) + a.translation).collect();
            write_obj(&mut s, dir, "original.obj", &grid, &rt.original).map_err(bare)?;
            write_obj(&mut s, dir, "reconstructed.obj", &grid, &aligned).map_err(bare)?;
            write_summary(&mut s, dir).map_err(bare)?;
        }
        Ok(s)
    })
}

fn frame_metrics(s: &mut RunSummary, f: &frontal_core::reconstruct::FrameField) {
    for (k, v) in [
        ("frobenius_residual", f.frobenius_residual),
        ("gram_defect", f.gram_defect),
        ("normal_defect", f.normal_defect),
        ("min_det", f.min_det),
        ("mixed_partial_residual", f.mixed_partial_residual),
        ("position_discrepancy", f.position_discrepancy),
        ("interpolated_nodes", f.tau_theta.interpolated as f64),
    ] {
        s.metrics.insert(k.into(), v);
    }
}

/// Reconstructs from a data directory; exit 4 when the Frobenius residual
/// exceeds `tol`.
pub fn reconstruct_cmd(
    data_dir: &Path,
    origin: Option<[f64; 2]>,
    seed: Option<[f64; 3]>,
    tol: f64,
    out: &Path,
) -> RunSummary {
    guarded("reconstruct", || {
        let mut data: ReconstructionData =
            read_data_dir(data_dir).map_err(|e| bare(fatal(ErrorKind::Input, "data", e)))?;
        if let Some([u, v]) = origin {
            data = data.with_origin(u, v);
        }
        if let Some(q) = seed {
            data = data.with_seed(Vec3(q));
        }
        let mut s = RunSummary::new("reconstruct");
        s.name = data_dir.display().to_string();
        s.grid = format_grid(&data.grid);
        data.check_positive().map_err(|e| (reconstruct_fatal(&e), Some(Box::new(s.clone()))))?;
        let f = reconstruct(&data, None).map_err(|e| (reconstruct_fatal(&e), Some(Box::new(s.clone()))))?;
        s.push(Check {
            name: "frobenius".into(),
            kind: CheckKind::Frobenius,
            value: f.frobenius_residual,
            tol,
            at: Some([f.frobenius_argmax.0, f.frobenius_argmax.1]),
            passed: f.frobenius_residual <= tol,
            detail: None,
        });
        frame_metrics(&mut s, &f);
        ensure_dir(out).map_err(bare)?;
        write_obj(&mut s, out, "reconstructed.obj", &data.grid, &f.x).map_err(bare)?;
        write_summary(&mut s, out).map_err(bare)?;
        Ok(s)
    })
}

/// Writes the reconstruction data of a spec as a data directory.
pub fn export(spec_arg: &str, grid: Option<GridSpec>, h: f64, out: &Path) -> RunSummary {
    guarded("export", || {
        let spec = load_spec(spec_arg).map_err(bare)?;
        let grid = spacing_grid(&spec, grid, h).map_err(bare)?;
        let mut s = start("export", &spec, &grid);
        let data = derive_data(&spec, &grid).map_err(|e| (reconstruct_fatal(&e), Some(Box::new(s.clone()))))?;
        write_data_dir(out, &data).map_err(|e| (fatal(ErrorKind::Input, "output", e), Some(Box::new(s.clone()))))?;
        s.files.push(out.display().to_string());
        Ok(s)
    })
}

/// Every built-in as a spec document, separated by `---` lines.
pub fn catalog_listing() -> String {
    catalog::catalog()
        .iter()
        .map(|e| format!("# {}\n{}", e.description, format_spec(&e.spec)))
        .collect::<Vec<_>>()
        .join("---\n")
}

/// Splits a [`catalog_listing`] back into documents.
pub fn split_listing(text: &str) -> Vec<&str> {
    text.split("---\n").filter(|d| !d.trim().is_empty()).collect()
}

pub fn catalog_entry(name: &str) -> Option<String> {
    lookup(name).map(|s| format_spec(&s))
}

