use frontal_core::catalog::{genuine, lookup};
use frontal_core::classify::*;
use frontal_core::exprmap::{parse, Expr};
use frontal_core::frontal::{evaluate, Domain, DEFAULT_TOL_SING};
use frontal_core::linalg::Mat2;

fn bundle(name: &str, u: f64, v: f64) -> frontal_core::frontal::FormBundle {
    evaluate(&lookup(name).unwrap(), u, v, DEFAULT_TOL_SING).unwrap()
}

fn params(name: &str, n: usize) -> ClassifyParams {
    let s = lookup(name).unwrap();
    grid_params(&s, &s.grid_n(n), DEFAULT_TOL_SING, DEFAULT_TOL_CLASS)
}

#[test]
fn corank2_front_curvature_formula() {
    let (k, _) = relative_curvatures(&bundle("corank2_front", 1.0, 0.0));
    assert!((k - 144.0 / (52.0 * 52.0)).abs() < 1e-15);
    assert!((k - 0.0532544).abs() < 1e-7);
    let (_, h) = relative_curvatures(&bundle("corank2_front", 0.0, 0.0));
    assert!(h.abs() <= 1e-10);
    for i in 0..5 {
        for j in 0..5 {
            let (u, v) = (-0.9 + 0.45 * i as f64, -0.8 + 0.4 * j as f64);
            let (k, _) = relative_curvatures(&bundle("corank2_front", u, v));
            let e = 36.0 * u * u + 36.0 * v * v + 16.0;
            let want = 144.0 / (e * e);
            assert!(((k - want) / want).abs() <= 1e-9);
        }
    }
}

#[test]
fn cuspidal_edge_curvatures_on_singular_line() {
    for u in [-0.7, 0.0, 0.2, 0.9] {
        let b = bundle("cuspidal_edge", u, 0.0);
        // μ = diag(0, -3/2 (1 + 9/4 v²)^{-3/2}), adj Λ = diag(2v, 1)
        assert!((b.mu - Mat2::diag(0.0, -1.5)).max_abs() < 1e-15);
        let (k, h) = relative_curvatures(&b);
        assert!(k.abs() < 1e-15);
        assert!((h - 0.75).abs() < 1e-15);
    }
}

#[test]
fn corank2_nonfront_vanishing_curvatures() {
    let b = bundle("corank2_nonfront", -1.0, 0.0);
    let (k, h) = relative_curvatures(&b);
    assert!(k.abs() <= 1e-10 && h.abs() <= 1e-10);
    assert!(b.lambda.max_abs() < 1e-15);
    assert!((b.ii_omega - Mat2::diag(0.0, -1.5)).max_abs() < 1e-12);
    assert!((b.mu - Mat2::diag(0.0, 0.375)).max_abs() < 1e-12);
}

#[test]
fn point_verdicts() {
    let p = params("corank2_front", 101);
    let r = classify_with(&bundle("corank2_front", 0.0, 0.0), &p).unwrap();
    assert_eq!(r.verdict, Verdict::FrontRank0);
    assert_eq!(r.dx_rank, 0);

    let p = params("corank2_nonfront", 101);
    let r = classify_with(&bundle("corank2_nonfront", -1.0, 0.0), &p).unwrap();
    assert_eq!(r.verdict, Verdict::NotFrontHere);
    assert_eq!(r.dx_rank, 0);

    let p = params("cuspidal_edge", 101);
    let r = classify_with(&bundle("cuspidal_edge", 0.2, 0.0), &p).unwrap();
    assert_eq!(r.verdict, Verdict::FrontRank1);
    assert_eq!(r.dx_rank, 1);

    let r = classify_point(&bundle("plane", 0.1, 0.1), DEFAULT_TOL_SING, DEFAULT_TOL_CLASS).unwrap();
    assert_eq!(r.verdict, Verdict::Regular);
    assert_eq!((r.k_classical, r.h_classical), (Some(0.0), Some(0.0)));
}

#[test]
fn crosscap_singular_line_is_not_front() {
    let s = lookup("cuspidal_crosscap").unwrap();
    let gc = classify_grid(&s, &s.grid_n(41), DEFAULT_TOL_SING, DEFAULT_TOL_CLASS);
    for r in gc.singular() {
        assert_eq!(r.point.1, 0.0);
        // H_Ω = -3u/2 ... vanishes only at u = 0 on the line; K_Ω = 0 there
        if r.point.0.abs() > 1e-9 {
            assert_eq!(r.verdict, Verdict::FrontRank1, "{:?}", r.point);
        }
    }
}

fn singular_verdicts(name: &str, n: usize, tol_sing: f64, tol_class: f64) -> Vec<((f64, f64), Verdict)> {
    let s = lookup(name).unwrap();
    let gc = classify_grid(&s, &s.grid_n(n), tol_sing, tol_class);
    gc.nodes
        .iter()
        .map(|r| r.as_ref().unwrap())
        .filter(|r| r.verdict.is_singular())
        .map(|r| (r.point, r.verdict))
        .collect()
}

#[test]
fn grid_verdicts_and_stability() {
    let cases = [
        ("corank2_front", (0.0, 0.0), Verdict::FrontRank0),
        ("corank2_nonfront", (-1.0, 0.0), Verdict::NotFrontHere),
        ("cuspidal_edge", (0.5, 0.0), Verdict::FrontRank1),
    ];
    for (name, p, want) in cases {
        for (n, tol) in [(101, DEFAULT_TOL_CLASS), (101, DEFAULT_TOL_CLASS / 2.0), (201, DEFAULT_TOL_CLASS)] {
            let s = lookup(name).unwrap();
            let gc = classify_grid(&s, &s.grid_n(n), DEFAULT_TOL_SING, tol);
            assert_eq!(gc.nearest(p.0, p.1).unwrap().verdict, want, "{name} n={n} tol={tol}");
        }
    }
    // cuspidal edge: whole line v = 0 is FrontRank1, nothing else singular
    let sv = singular_verdicts("cuspidal_edge", 101, DEFAULT_TOL_SING, DEFAULT_TOL_CLASS);
    assert_eq!(sv.len(), 101);
    assert!(sv.iter().all(|(p, v)| p.1 == 0.0 && *v == Verdict::FrontRank1));

    // coarse verdicts survive grid doubling and tol halving on shared nodes
    for s in genuine() {
        let base = singular_verdicts(&s.name, 51, DEFAULT_TOL_SING, DEFAULT_TOL_CLASS);
        let half = singular_verdicts(&s.name, 51, DEFAULT_TOL_SING, DEFAULT_TOL_CLASS / 2.0);
        assert_eq!(base, half, "{}", s.name);
        let fine = singular_verdicts(&s.name, 101, DEFAULT_TOL_SING, DEFAULT_TOL_CLASS);
        for (p, v) in &base {
            let f = fine.iter().find(|(q, _)| (q.0 - p.0).abs() < 1e-12 && (q.1 - p.1).abs() < 1e-12);
            assert_eq!(f.map(|x| x.1), Some(*v), "{} at {:?}", s.name, p);
        }
    }
}

#[test]
fn swallowtail_singular_points_are_rank1_fronts() {
    let s = lookup("swallowtail").unwrap();
    for n in [101, 201] {
        let gc = classify_grid(&s, &s.grid_n(n), DEFAULT_TOL_SING, DEFAULT_TOL_CLASS);
        let sing: Vec<_> = gc.singular().collect();
        assert!(sing.len() > 50);
        assert!(!gc.crossings.is_empty());
        for r in sing {
            assert_eq!(r.verdict, Verdict::FrontRank1, "{:?}", r.point);
            assert!(r.lambda_det.abs() < 1e-8);
        }
    }
}

#[test]
fn regular_limit_identity_on_catalog() {
    for s in genuine() {
        let r = prop_lim_residual(&s, &s.grid_n(101), 1e-3).unwrap();
        assert!(r <= 1e-8, "{}: {r:e}", s.name);
    }
}

#[test]
fn radial_limits_converge() {
    for (name, k0) in [("cuspidal_edge", 0.0), ("corank2_front", 0.5625)] {
        let s = lookup(name).unwrap();
        let rep = limit_identity_check(&s, (0.0, 0.0), &DEFAULT_RADII).unwrap();
        assert!((rep.k_rel - k0).abs() < 1e-12);
        assert!(rep.converges(1e-4), "{name}: {:?}", rep.rows);
    }
    let s = lookup("plane").unwrap();
    let rep = limit_identity_check(&s, (0.0, 0.0), &DEFAULT_RADII).unwrap();
    assert!(rep.rows.iter().all(|r| r.k_err == 0.0 && r.h_err == 0.0));
}

#[test]
fn no_regular_neighbors() {
    let s = frontal_core::frontal::FrontalSpec::from_strs(
        "flat_degenerate",
        ["0", "0", "0"],
        [["1", "0"], ["0", "1"], ["0", "0"]],
        Domain::new(-1.0, 1.0, -1.0, 1.0),
    )
    .unwrap();
    assert!(matches!(
        limit_identity_check(&s, (0.0, 0.0), &[0.1, 0.01]),
        Err(ClassifyError::NoRegularNeighbors { .. })
    ));
}

fn c(entries: [&str; 4]) -> [[Expr; 2]; 2] {
    let p = |s: &str| parse(s).unwrap();
    [[p(entries[0]), p(entries[1])], [p(entries[2]), p(entries[3])]]
}

#[test]
fn base_change_invariance() {
    let tol = (DEFAULT_TOL_SING, DEFAULT_TOL_CLASS);
    let cases = [
        ("cuspidal_edge", c(["1", "0", "0", "1"])),
        ("cuspidal_edge", c(["2", "0", "0", "2"])),
        ("cuspidal_crosscap", c(["1", "1", "0", "1"])),
        ("corank2_front", c(["2 + u^2", "v", "0", "1 + v^2"])),
        ("swallowtail", c(["exp(u)", "0", "u*v", "1"])),
    ];
    for (name, cm) in cases {
        let s = lookup(name).unwrap();
        let rep = base_change_invariance_check(&s, &cm, &s.grid_n(41), tol.0, tol.1);
        assert!(rep.passes(), "{name}: {rep:?}");
    }
}

#[test]
fn base_change_rescales_curvatures() {
    let s = lookup("cuspidal_edge").unwrap();
    let s2 = s.with_base_change(&c(["2", "0", "0", "2"]));
    for (u, v) in [(0.3, 0.0), (0.1, 0.4), (-0.5, -0.2)] {
        let (k, h) = relative_curvatures(&evaluate(&s, u, v, 0.0).unwrap());
        let (k2, h2) = relative_curvatures(&evaluate(&s2, u, v, 0.0).unwrap());
        assert!((k2 - k / 4.0).abs() < 1e-14 && (h2 - h / 4.0).abs() < 1e-14);
    }
}

#[test]
fn symmetry_invariance() {
    let tol = (DEFAULT_TOL_SING, DEFAULT_TOL_CLASS);
    let id3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let rot_z = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
    let mirror = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
    let a = [0.5, -1.0, 2.0];
    for name in ["cuspidal_edge", "corank2_front", "swallowtail"] {
        let s = lookup(name).unwrap();
        for o in [&id3, &rot_z, &mirror] {
            let rep = symmetry_invariance_check(&s, Some((o, &a)), None, 41, tol.0, tol.1).unwrap();
            assert!(rep.passes(), "{name}: {rep:?}");
        }
    }
    let s = lookup("corank2_front").unwrap();
    let rot = lookup("corank2_front").unwrap().with_isometry(&rot_z, &[0.0; 3]);
    let gc = classify_grid(&rot, &rot.grid_n(101), tol.0, tol.1);
    assert_eq!(gc.nearest(0.0, 0.0).unwrap().verdict, Verdict::FrontRank0);
    drop(s);

    let h = [parse("u + v^3").unwrap(), parse("v").unwrap()];
    let dom = Domain::new(-0.5, 0.5, -0.5, 0.5);
    let s = lookup("cuspidal_edge").unwrap();
    let rep = symmetry_invariance_check(&s, None, Some((&h, dom)), 41, tol.0, tol.1).unwrap();
    assert!(rep.passes(), "{rep:?}");
    let flip = [parse("v").unwrap(), parse("u").unwrap()];
    for name in ["corank2_front", "cuspidal_crosscap"] {
        let s = lookup(name).unwrap();
        let rep = symmetry_invariance_check(&s, Some((&rot_z, &a)), Some((&flip, Domain::new(-1.0, 1.0, -1.0, 1.0))), 41, tol.0, tol.1).unwrap();
        assert!(rep.passes(), "{name}: {rep:?}");
    }
}

#[test]
fn omega_scaling_keeps_verdicts() {
    for s in genuine() {
        let g = s.grid_n(41);
        let a = classify_grid(&s, &g, DEFAULT_TOL_SING, DEFAULT_TOL_CLASS);
        let scaled = s.with_base_change(&c(["1 + u^2 + v^2", "0", "0", "1 + u^2 + v^2"]));
        let b = classify_grid(&scaled, &g, DEFAULT_TOL_SING, DEFAULT_TOL_CLASS);
        assert_eq!(a.verdicts(), b.verdicts(), "{}", s.name);
    }
}
