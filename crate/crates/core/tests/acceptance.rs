//! One pass/fail line per acceptance criterion. Exits non-zero if any fails.

use frontal_core::catalog::{catalog, genuine, lookup};
use frontal_core::classify::*;
use frontal_core::compat::{
    classical_compatibility_residuals, ideal_membership_check, relative_residuals, CompatError,
    DEFAULT_REFINEMENT_LEVELS,
};
use frontal_core::exprmap::{eval_f64, eval_jet, parse, Expr};
use frontal_core::frontal::{evaluate, Domain, FrontalSpec, DEFAULT_TOL_SING};
use frontal_core::linalg::{Mat2, Mat3, Vec3};
use frontal_core::reconstruct::{align_rigid, derive_data, init_frame, reconstruct, roundtrip};
use frontal_core::GridSpec;
use std::time::Instant;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn spec(name: &str) -> FrontalSpec {
    lookup(name).unwrap()
}

/// Deterministic points in `[a, b]²`.
fn points(n: usize, seed: u64, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut s = seed;
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        a + (b - a) * ((s >> 11) as f64 / (1u64 << 53) as f64)
    };
    (0..n).map(|_| (next(), next())).collect()
}

fn curvatures(name: &str, u: f64, v: f64) -> (f64, f64) {
    relative_curvatures(&evaluate(&spec(name), u, v, DEFAULT_TOL_SING).unwrap())
}

fn c1_curvature_values() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for (u, v) in points(25, 1, -1.0, 1.0) {
        let (k, _) = curvatures("corank2_front", u, v);
        let e = 36.0 * u * u + 36.0 * v * v + 16.0;
        let want = 144.0 / (e * e);
        worst = worst.max(((k - want) / want).abs());
    }
    let (_, h0) = curvatures("corank2_front", 0.0, 0.0);
    let (kn, hn) = curvatures("corank2_nonfront", -1.0, 0.0);
    let secs = t.elapsed().as_secs_f64();
    let ok = worst <= 1e-9 && h0.abs() <= 1e-10 && kn.abs() <= 1e-10 && hn.abs() <= 1e-10 && secs < 1.0;
    outcome(
        ok,
        format!("K rel err {worst:.1e}, |H(0,0)| {:.1e}, nonfront |K| {:.1e} |H| {:.1e}, {secs:.3} s", h0.abs(), kn.abs(), hn.abs()),
    )
}

fn singular_verdicts(s: &FrontalSpec, n: usize, tol_class: f64) -> Vec<((f64, f64), Verdict)> {
    classify_grid(s, &s.grid_n(n), DEFAULT_TOL_SING, tol_class)
        .nodes
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .filter(|r| r.verdict.is_singular())
        .map(|r| (r.point, r.verdict))
        .collect()
}

fn c2_classification() -> Outcome {
    let mut failures = Vec::new();
    for (n, tol) in [(101, DEFAULT_TOL_CLASS), (101, DEFAULT_TOL_CLASS / 2.0), (201, DEFAULT_TOL_CLASS)] {
        let at = |name: &str, u: f64, v: f64| {
            let s = spec(name);
            classify_grid(&s, &s.grid_n(n), DEFAULT_TOL_SING, tol).nearest(u, v).map(|r| r.verdict)
        };
        if at("corank2_front", 0.0, 0.0) != Some(Verdict::FrontRank0) {
            failures.push(format!("corank2_front n={n} tol={tol:e}"));
        }
        if at("corank2_nonfront", -1.0, 0.0) != Some(Verdict::NotFrontHere) {
            failures.push(format!("corank2_nonfront n={n} tol={tol:e}"));
        }
        let edge = singular_verdicts(&spec("cuspidal_edge"), n, tol);
        if edge.len() != n || !edge.iter().all(|(p, v)| p.1 == 0.0 && *v == Verdict::FrontRank1) {
            failures.push(format!("cuspidal_edge n={n} tol={tol:e}"));
        }
        let sw = spec("swallowtail");
        let gc = classify_grid(&sw, &sw.grid_n(n), DEFAULT_TOL_SING, tol);
        let sing: Vec<_> = gc.singular().collect();
        if sing.is_empty() || !sing.iter().all(|r| r.verdict == Verdict::FrontRank1) {
            failures.push(format!("swallowtail n={n} tol={tol:e}"));
        }
    }
    let detail = if failures.is_empty() {
        "all four verdicts hold at n=101, n=101 with tol/2, n=201".to_string()
    } else {
        format!("failed: {}", failures.join("; "))
    };
    outcome(failures.is_empty(), detail)
}

fn c3_decomposition() -> Outcome {
    let mut worst: f64 = 0.0;
    for (u, v) in points(25, 3, -1.0, 1.0) {
        let b = evaluate(&spec("cuspidal_crosscap"), u, v, DEFAULT_TOL_SING).unwrap();
        let io = Mat2::new(1.0 + v.powi(6), 1.5 * u * v.powi(4), 1.5 * u * v.powi(4), 1.0 + 2.25 * u * u * v * v);
        let lam = Mat2::diag(1.0, 2.0 * v);
        let s = (1.0 + v.powi(6) + 2.25 * u * u * v * v).sqrt();
        let iio = Mat2::new(0.0, 3.0 * v * v / s, 1.5 * v / s, 1.5 * u / s);
        worst = worst.max((b.i_omega - io).max_abs()).max((b.lambda - lam).max_abs()).max((b.ii_omega - iio).max_abs());
    }
    outcome(worst <= 1e-10, format!("largest entry error {worst:.1e} over 25 points"))
}

fn c4_identity_suites() -> Outcome {
    let t = Instant::now();
    let (mut rel, mut rel_at) = (0.0f64, String::new());
    let (mut cla, mut cla_at) = (0.0f64, String::new());
    let mut errors = Vec::new();
    for s in genuine() {
        let g = s.grid_n(101);
        match relative_residuals(&s, &g) {
            Ok(reports) => {
                for r in reports {
                    if r.max_abs_residual > rel {
                        rel = r.max_abs_residual;
                        rel_at = format!("{} {}", s.name, r.id);
                    }
                }
            }
            Err(e) => errors.push(format!("{}: {e}", s.name)),
        }
        match classical_compatibility_residuals(&s, &g) {
            Ok(reports) => {
                for r in reports {
                    if r.max_abs_residual > cla {
                        cla = r.max_abs_residual;
                        cla_at = format!("{} {}", s.name, r.id);
                    }
                }
            }
            Err(e) => errors.push(format!("{}: {e}", s.name)),
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let ok = errors.is_empty() && rel <= 1e-7 && cla <= 1e-6 && secs < 30.0;
    outcome(
        ok,
        format!("relative max {rel:.1e} ({rel_at}), classical max {cla:.1e} ({cla_at}), {secs:.1} s{}", if errors.is_empty() { String::new() } else { format!(", errors: {}", errors.join("; ")) }),
    )
}

fn c5_negative_control() -> Outcome {
    let s = spec("whitney_crosscap");
    match ideal_membership_check(&s, &s.grid_n(41), DEFAULT_REFINEMENT_LEVELS) {
        Err(CompatError::MembershipViolation { u, v, failure, .. }) => {
            outcome(u.hypot(v) <= 0.1, format!("MembershipViolation at ({u:.3}, {v:.3}): {failure}"))
        }
        Err(e) => outcome(false, format!("unexpected error {e}")),
        Ok(_) => outcome(false, "no violation found".into()),
    }
}

fn c6_limit_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in genuine() {
        match prop_lim_residual(&s, &s.grid_n(101), 1e-3) {
            Ok(r) => worst = worst.max(r),
            Err(e) => return outcome(false, format!("{}: {e}", s.name)),
        }
    }
    let mut radial = Vec::new();
    let mut monotone = true;
    for name in ["cuspidal_edge", "corank2_front"] {
        match limit_identity_check(&spec(name), (0.0, 0.0), &DEFAULT_RADII) {
            Ok(rep) => {
                monotone &= rep.converges(1e-4);
                let last = rep.rows.last().map(|r| r.k_err.max(r.h_err)).unwrap_or(f64::NAN);
                radial.push(format!("{name} final {last:.1e}"));
            }
            Err(e) => return outcome(false, format!("{name}: {e}")),
        }
    }
    outcome(worst <= 1e-8 && monotone, format!("regular-node rel residual {worst:.1e}; radial: {}", radial.join(", ")))
}

fn grid_h(s: &FrontalSpec, h: f64) -> GridSpec {
    let d = s.domain;
    GridSpec::with_spacing(d.u0, d.u1, d.v0, d.v1, h).unwrap()
}

/// Errors at or below this are rounding noise; halving `h` cannot shrink
/// them further.
const ROUNDOFF: f64 = 1e-12;

fn c7_round_trip() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, tol) in [("plane", 1e-10), ("cuspidal_edge", 1e-5), ("cuspidal_crosscap", 1e-5), ("corank2_front", 1e-5)] {
        let s = spec(name);
        let square = s.domain == Domain::new(-1.0, 1.0, -1.0, 1.0);
        let t = Instant::now();
        let a = roundtrip(&s, &grid_h(&s, 0.01));
        let secs_a = t.elapsed().as_secs_f64();
        let t = Instant::now();
        let b = roundtrip(&s, &grid_h(&s, 0.005));
        let secs_b = t.elapsed().as_secs_f64();
        let (a, b) = match (a, b) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
                continue;
            }
        };
        let (rms, gram) = (a.alignment.rms_error, a.frame.gram_defect);
        let (rms2, gram2) = (b.alignment.rms_error, b.frame.gram_defect);
        let shrinks = |x: f64, y: f64| y <= ROUNDOFF || x / y >= 12.0;
        let pass = square
            && rms <= tol
            && gram <= 1e-6
            && shrinks(rms, rms2)
            && shrinks(gram, gram2)
            && (a.alignment.rotation.det() - 1.0).abs() <= 1e-10
            && secs_a.max(secs_b) < 60.0;
        ok &= pass;
        parts.push(format!(
            "{name} rms {rms:.1e} (x{:.1}) gram {gram:.1e} (x{:.1}) {:.1} s",
            rms / rms2,
            gram / gram2,
            secs_a.max(secs_b)
        ));
    }
    outcome(ok, parts.join("; "))
}

fn rotation(axis: [f64; 3], angle: f64) -> Mat3 {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = axis.map(|a| a / n);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    Mat3::from_rows([
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ])
}

fn c8_rigidity() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["cuspidal_edge", "cuspidal_crosscap", "corank2_front"] {
        let s = spec(name);
        let d = derive_data(&s, &grid_h(&s, 0.01)).unwrap();
        let w0 = init_frame(&d).unwrap();
        let r = rotation([0.3, -1.0, 0.5], 2.1);
        let w1 = r * w0;
        let same_gram = ((w1.transpose() * w1) - (w0.transpose() * w0)).max_abs() <= 1e-12 && w1.det() > 0.0;
        let a = reconstruct(&d, None);
        let b = reconstruct(&d.clone().with_seed(Vec3::new(5.0, -1.0, 2.0)), Some(w1));
        match (a, b) {
            (Ok(a), Ok(b)) => match align_rigid(&b.x, &a.x) {
                Ok(al) => {
                    let det = al.rotation.det();
                    ok &= same_gram && al.rms_error <= 1e-5 && (det - 1.0).abs() <= 1e-10;
                    parts.push(format!("{name} rms {:.1e} det-1 {:.1e}", al.rms_error, det - 1.0));
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("{name}: {e}"));
                }
            },
            (Err(e), _) | (_, Err(e)) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn cm(entries: [&str; 4]) -> [[Expr; 2]; 2] {
    let p = |s: &str| parse(s).unwrap();
    [[p(entries[0]), p(entries[1])], [p(entries[2]), p(entries[3])]]
}

fn c9_invariance() -> Outcome {
    let tol = (DEFAULT_TOL_SING, DEFAULT_TOL_CLASS);
    let mut failures = Vec::new();
    let bases = [
        ("cuspidal_edge", cm(["2", "0", "0", "2"])),
        ("corank2_front", cm(["2 + u^2", "v", "0", "1 + v^2"])),
        ("swallowtail", cm(["exp(u)", "0", "u*v", "1"])),
    ];
    for (name, c) in bases {
        let s = spec(name);
        if !base_change_invariance_check(&s, &c, &s.grid_n(41), tol.0, tol.1).passes() {
            failures.push(format!("base change {name}"));
        }
    }
    let rot_z = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
    let a = [0.5, -1.0, 2.0];
    let flip = [parse("v").unwrap(), parse("u").unwrap()];
    let square = Domain::new(-1.0, 1.0, -1.0, 1.0);
    for name in ["cuspidal_edge", "corank2_front", "cuspidal_crosscap"] {
        let s = spec(name);
        match symmetry_invariance_check(&s, Some((&rot_z, &a)), Some((&flip, square)), 41, tol.0, tol.1) {
            Ok(rep) if rep.passes() => {}
            Ok(_) => failures.push(format!("isometry+reparametrization {name}")),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    let detail = if failures.is_empty() {
        "base change on 3 surfaces, isometry with reparametrization on 3 surfaces".to_string()
    } else {
        format!("failed: {}", failures.join("; "))
    };
    outcome(failures.is_empty(), detail)
}

fn fd(e: &Expr, u: f64, v: f64, h: f64) -> [f64; 5] {
    let f = |a: f64, b: f64| eval_f64(e, a, b).unwrap();
    let f0 = f(u, v);
    [
        (f(u + h, v) - f(u - h, v)) / (2.0 * h),
        (f(u, v + h) - f(u, v - h)) / (2.0 * h),
        (f(u + h, v) - 2.0 * f0 + f(u - h, v)) / (h * h),
        (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4.0 * h * h),
        (f(u, v + h) - 2.0 * f0 + f(u, v - h)) / (h * h),
    ]
}

fn c10_ad() -> Outcome {
    let (mut plain, mut whitney_plain, mut whitney_rich): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for entry in catalog() {
        let s = &entry.spec;
        let d = s.domain;
        for (a, b) in points(100, 10, 0.0, 1.0) {
            let u = d.u0 + 0.02 + (d.u1 - d.u0 - 0.04) * a;
            let v = d.v0 + 0.02 + (d.v1 - d.v0 - 0.04) * b;
            for (i, e) in s.x.iter().chain(s.omega.iter().flatten()).enumerate() {
                let j = eval_jet(e, u, v).unwrap();
                let got = [j.du, j.dv, j.duu, j.duv, j.dvv];
                let gap = |want: [f64; 5]| got.iter().zip(want).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                let g = gap(fd(e, u, v, 1e-4));
                if s.expect_violation && i >= 3 {
                    whitney_plain = whitney_plain.max(g);
                    let (p, q) = (fd(e, u, v, 1e-4), fd(e, u, v, 5e-5));
                    whitney_rich = whitney_rich.max(gap(std::array::from_fn(|c| (4.0 * q[c] - p[c]) / 3.0)));
                } else {
                    plain = plain.max(g);
                }
            }
        }
    }
    outcome(
        plain <= 1e-5 && whitney_rich <= 1e-5,
        format!(
            "h=1e-4 central FD gap {plain:.1e} on all expressions but the Whitney base; Whitney base {whitney_plain:.1e} plain, {whitney_rich:.1e} Richardson"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("curvature values", c1_curvature_values),
        ("classification", c2_classification),
        ("decomposition fidelity", c3_decomposition),
        ("identity suites", c4_identity_suites),
        ("negative control", c5_negative_control),
        ("limit identity", c6_limit_identity),
        ("round trip", c7_round_trip),
        ("rigidity", c8_rigidity),
        ("invariance", c9_invariance),
        ("AD correctness", c10_ad),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        failed += usize::from(!o.passed);
        println!("criterion {:>2} {:<24} {}  {}", i + 1, name, if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
