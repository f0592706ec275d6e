use frontal_core::catalog::{catalog, lookup};
use frontal_core::frontal::sample_jets;
use frontal_core::io::{format_spec, parse_spec};
use frontal_core::linalg::Vec3;
use frontal_core::reconstruct::align_rigid;
use frontal_core::GridSpec;
use serde_json::Value;
use std::path::Path;
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn frontals(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_frontals")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_obj(path: &Path) -> (Vec<Vec3>, Vec<[usize; 4]>) {
    let text = std::fs::read_to_string(path).unwrap();
    let (mut v, mut f) = (Vec::new(), Vec::new());
    for line in text.lines() {
        let mut it = line.split(' ');
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.map(|t| t.parse().unwrap()).collect();
                v.push(Vec3([c[0], c[1], c[2]]));
            }
            Some("f") => {
                let c: Vec<usize> = it.map(|t| t.parse().unwrap()).collect();
                f.push([c[0], c[1], c[2], c[3]]);
            }
            other => panic!("unexpected OBJ line {other:?}"),
        }
    }
    (v, f)
}

fn read_fields(path: &Path) -> Vec<(f64, f64, String)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,v,lambda_det,K_rel,H_rel,verdict"));
    lines
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            assert_eq!(c.len(), 6);
            (c[0].parse().unwrap(), c[1].parse().unwrap(), c[5].to_string())
        })
        .collect()
}

fn failed_checks(j: &Value) -> Vec<Value> {
    j["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).cloned().collect()
}

#[test]
fn catalog_listing_round_trips() {
    let r = frontals(&["catalog"]);
    assert_eq!(r.code, 0);
    let docs = frontal_cli::commands::split_listing(&r.stdout);
    assert_eq!(docs.len(), 7);
    for (doc, e) in docs.iter().zip(catalog()) {
        assert_eq!(parse_spec(doc).unwrap(), e.spec);
    }
    let one = frontals(&["catalog", "--name", "swallowtail"]);
    assert_eq!(one.stdout, format_spec(&lookup("swallowtail").unwrap()));
    assert_eq!(frontals(&["catalog", "--name", "torus"]).code, 2);
}

#[test]
fn analyze_plane_is_regular() {
    let dir = tempfile::tempdir().unwrap();
    let r = frontals(&["analyze", "catalog:plane", "--grid", "-1:1:11,-1:1:11", "--out", p(dir.path())]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = read_fields(&dir.path().join("fields.csv"));
    assert_eq!(rows.len(), 121);
    assert!(rows.iter().all(|r| r.2 == "Regular"));
    assert_eq!(r.json()["histogram"]["Regular"], 121);
    assert_eq!(r.json()["singular_nodes"], 0);

    let (v, f) = read_obj(&dir.path().join("surface.obj"));
    assert_eq!((v.len(), f.len()), (121, 100));
    assert!(f.iter().flatten().all(|&i| (1..=121).contains(&i)));
    assert!(v.iter().all(|q| q.0[2] == 0.0));
}

#[test]
fn analyze_singular_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let r = frontals(&["analyze", "catalog:corank2_front", "--out", p(dir.path())]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = read_fields(&dir.path().join("fields.csv"));
    let at = |u: f64, v: f64| rows.iter().find(|r| (r.0 - u).abs() < 1e-12 && (r.1 - v).abs() < 1e-12).unwrap();
    assert_eq!(at(0.0, 0.0).2, "FrontRank0");

    let r = frontals(&["analyze", "catalog:corank2_nonfront", "--out", p(dir.path())]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = read_fields(&dir.path().join("fields.csv"));
    let hit = rows.iter().find(|r| (r.0 + 1.0).abs() < 1e-12 && r.1.abs() < 1e-12).unwrap();
    assert_eq!(hit.2, "NotFrontHere");
}

#[test]
fn analyze_output_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let r = frontals(&["analyze", "catalog:swallowtail", "--grid", "-1:1:31,-1:1:31", "--out", p(d.path())]);
        assert_eq!(r.code, 0);
    }
    let read = |d: &tempfile::TempDir, f: &str| std::fs::read(d.path().join(f)).unwrap();
    assert_eq!(read(&a, "fields.csv"), read(&b, "fields.csv"));
    assert_eq!(read(&a, "surface.obj"), read(&b, "surface.obj"));
    let csv = String::from_utf8(read(&a, "fields.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let first = csv.lines().nth(1).unwrap();
    let mantissa = first.split(',').next().unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17);
}

#[test]
fn check_genuine_frontal_passes() {
    let dir = tempfile::tempdir().unwrap();
    let r = frontals(&["check", "catalog:cuspidal_crosscap", "--suite", "all", "--out", p(dir.path())]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let j = r.json();
    let names: Vec<&str> = j["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for id in ["c1", "c9", "gaussT", "cs3", "propE_u", "wo", "gauss_classical", "mc2", "ideal"] {
        assert!(names.contains(&id), "{id} missing from {names:?}");
    }
    assert!(failed_checks(&j).is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(written["exit_status"], 0);
    assert_eq!(written["checks"], j["checks"]);
}

#[test]
fn check_single_suites() {
    for suite in ["rce", "sce", "gauss", "ideal", "classical"] {
        let r = frontals(&["check", "catalog:swallowtail", "--suite", suite, "--grid", "-1:1:41,-1:1:41"]);
        assert_eq!(r.code, 0, "{suite}: {}", r.stdout);
        assert!(!r.json()["checks"].as_array().unwrap().is_empty());
    }
}

#[test]
fn whitney_violation_is_expected() {
    let r = frontals(&["check", "catalog:whitney_crosscap", "--suite", "all"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let j = r.json();
    let failed = failed_checks(&j);
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "ideal");
    assert!(failed[0]["detail"].as_str().unwrap().starts_with("MembershipViolation"));
    let at = failed[0]["at"].as_array().unwrap();
    assert!(at[0].as_f64().unwrap().hypot(at[1].as_f64().unwrap()) <= 0.1);

    // Without the ideal suite nothing is violated, only unevaluable.
    let r = frontals(&["check", "catalog:whitney_crosscap", "--suite", "rce"]);
    assert_eq!(r.code, 1);
    assert!(!r.json()["suite_errors"].as_array().unwrap().is_empty());
}

#[test]
fn whitney_without_flag_is_an_eval_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = lookup("whitney_crosscap").unwrap();
    spec.expect_violation = false;
    let path = dir.path().join("whitney.txt");
    std::fs::write(&path, format_spec(&spec)).unwrap();
    let r = frontals(&["check", p(&path), "--suite", "rce"]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("(0, 0)"), "{}", r.stderr);
    assert_eq!(r.json()["error"]["kind"], "eval");
}

/// The plane spec with `x.3` replaced.
fn with_x3(expr: &str) -> String {
    let text = format_spec(&lookup("plane").unwrap());
    text.lines().map(|l| if l.starts_with("x.3 ") { format!("x.3 = {expr}\n") } else { format!("{l}\n") }).collect()
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let r = frontals(&["check", p(&dir.path().join("missing.txt"))]);
    assert_eq!(r.code, 2);
    assert!(!r.stderr.is_empty());

    let bad = with_x3("(u");
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, bad).unwrap();
    let r = frontals(&["analyze", p(&path), "--out", p(dir.path())]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 4"), "{}", r.stderr);

    assert_eq!(frontals(&["check", "catalog:nothing"]).code, 2);
    assert_eq!(frontals(&["check", "catalog:plane", "--grid", "0:1"]).code, 2);
    assert_eq!(frontals(&["check", "catalog:plane", "--suite", "everything"]).code, 2);
}

#[test]
fn eval_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = with_x3("sqrt(u)");
    let path = dir.path().join("root.txt");
    std::fs::write(&path, text).unwrap();
    let r = frontals(&["analyze", p(&path), "--grid", "-1:1:5,-1:1:5", "--out", p(dir.path())]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("(u, v) = (-1"), "{}", r.stderr);
}

#[test]
fn tight_tolerance_fails_check() {
    let r = frontals(&["check", "catalog:swallowtail", "--suite", "rce", "--grid", "-1:1:21,-1:1:21", "--tol", "1e-300"]);
    assert_eq!(r.code, 1);
    assert!(!failed_checks(&r.json()).is_empty());
}

fn rms(r: &Run) -> f64 {
    let j = r.json();
    let c = j["checks"].as_array().unwrap().iter().find(|c| c["name"] == "alignment_rms").unwrap().clone();
    c["value"].as_f64().unwrap()
}

#[test]
fn roundtrip_examples() {
    let dir = tempfile::tempdir().unwrap();
    let r = frontals(&["roundtrip", "catalog:plane", "--out", p(dir.path())]);
    assert_eq!(r.code, 0);
    assert!(rms(&r) <= 1e-10);
    let (a, fa) = read_obj(&dir.path().join("original.obj"));
    let (b, fb) = read_obj(&dir.path().join("reconstructed.obj"));
    assert_eq!((a.len(), fa), (201 * 201, fb));
    assert_eq!(b.len(), a.len());

    let r = frontals(&["roundtrip", "catalog:cuspidal_edge", "--h", "0.01"]);
    assert_eq!(r.code, 0);
    assert!(rms(&r) <= 1e-5);
    let r = frontals(&["roundtrip", "catalog:corank2_front", "--h", "0.01"]);
    assert_eq!(r.code, 0);
    assert!(rms(&r) <= 1e-4);

    let r = frontals(&["roundtrip", "catalog:cuspidal_edge", "--h", "0.1", "--tol", "1e-14"]);
    assert_eq!(r.code, 1);
    assert_eq!(frontals(&["roundtrip", "catalog:plane", "--h", "-1"]).code, 2);
}

fn export(name: &str, dir: &Path) {
    let r = frontals(&["export", &format!("catalog:{name}"), "--h", "0.02", "--out", p(dir)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn reconstruct_exported_cuspidal_edge() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    export("cuspidal_edge", &data);
    let out = dir.path().join("rec");
    let r = frontals(&["reconstruct", p(&data), "--out", p(&out)]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let (x, _) = read_obj(&out.join("reconstructed.obj"));

    let spec = lookup("cuspidal_edge").unwrap();
    let d = spec.domain;
    let grid = GridSpec::with_spacing(d.u0, d.u1, d.v0, d.v1, 0.02).unwrap();
    let original: Vec<Vec3> = sample_jets(&spec, &grid).into_iter().map(|j| j.unwrap().x.map(|c| c.value)).collect();
    let a = align_rigid(&x, &original).unwrap();
    assert!(a.rms_error <= 1e-5, "{}", a.rms_error);
    assert!((a.rotation.det() - 1.0).abs() <= 1e-10);
}

#[test]
fn reconstruct_origin_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    export("cuspidal_crosscap", &data);
    let out = dir.path().join("rec");
    let r = frontals(&["reconstruct", p(&data), "--origin", "-0.5,0.5", "--seed", "1,2,-3", "--out", p(&out)]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let (x, _) = read_obj(&out.join("reconstructed.obj"));
    let grid = frontal_core::io::parse_grid(r.json()["grid"].as_str().unwrap()).unwrap();
    let (i, j) = grid.nearest(-0.5, 0.5);
    assert_eq!(x[grid.index(i, j)].0, [1.0, 2.0, -3.0]);
}

#[test]
fn reconstruct_plane_is_planar() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    export("plane", &data);
    let out = dir.path().join("rec");
    assert_eq!(frontals(&["reconstruct", p(&data), "--out", p(&out)]).code, 0);
    let (x, _) = read_obj(&out.join("reconstructed.obj"));
    let n = (x[1] - x[0]).cross(&(x[x.len() - 1] - x[0]));
    let n = n.scale(1.0 / n.norm());
    assert!(x.iter().all(|q| n.dot(&(*q - x[0])).abs() <= 1e-12));
}

#[test]
fn corrupted_data_exits_4() {
    // A shifted g_Ω stays integrable where I_Ω is flat and e_Ω = f_Ω = 0,
    // as on the cuspidal edge; the cross-cap has neither.
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    export("cuspidal_crosscap", &data);
    let g = data.join("g_omega.csv");
    let text = std::fs::read_to_string(&g).unwrap();
    let mut lines = text.lines();
    let mut out = format!("{}\n", lines.next().unwrap());
    for l in lines {
        let mut c: Vec<String> = l.split(',').map(str::to_string).collect();
        c[2] = format!("{:.16e}", c[2].parse::<f64>().unwrap() + 0.1);
        out += &(c.join(",") + "\n");
    }
    std::fs::write(&g, out).unwrap();
    let r = frontals(&["reconstruct", p(&data), "--out", p(&dir.path().join("rec"))]);
    assert_eq!(r.code, 4, "{}", r.stdout);
    assert_eq!(failed_checks(&r.json())[0]["kind"], "frobenius");
}

#[test]
fn reconstruct_missing_dir_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let r = frontals(&["reconstruct", p(&dir.path().join("none")), "--out", p(dir.path())]);
    assert_eq!(r.code, 2);
}
