use frontal_core::catalog::{catalog, lookup};
use frontal_core::io::{
    format_spec, parse_grid, parse_spec, read_data_dir, read_spec_file, write_data_dir, write_obj, IoError,
    SpecFileError, MANIFEST,
};
use frontal_core::linalg::Vec3;
use frontal_core::reconstruct::{derive_data, FIELD_NAMES};
use frontal_core::GridSpec;

const PLANE: &str = "\
# flat
name = plane
x.1 = u
x.2 = v
x.3 = 0
omega.11 = 1
omega.12 = 0
omega.21 = 0
omega.22 = 1
omega.31 = 0
omega.32 = 0
domain.u0 = -1
domain.u1 = 1
domain.v0 = -1
domain.v1 = 1
";

#[test]
fn catalog_specs_round_trip_through_text() {
    for e in catalog() {
        let text = format_spec(&e.spec);
        let back = parse_spec(&text).unwrap_or_else(|err| panic!("{}: {err}\n{text}", e.spec.name));
        assert_eq!(back, e.spec);
    }
}

#[test]
fn grid_and_flag_round_trip() {
    let mut spec = lookup("whitney_crosscap").unwrap();
    spec.grid = Some((31, 17));
    let back = parse_spec(&format_spec(&spec)).unwrap();
    assert!(back.expect_violation);
    assert_eq!(back.grid, Some((31, 17)));
}

#[test]
fn plain_spec_parses() {
    let spec = parse_spec(PLANE).unwrap();
    assert_eq!(spec, lookup("plane").unwrap());
    assert!(!spec.expect_violation);
    assert_eq!(spec.grid, None);
}

fn without(key: &str) -> String {
    PLANE.lines().filter(|l| !l.starts_with(&format!("{key} "))).map(|l| format!("{l}\n")).collect()
}

#[test]
fn spec_errors() {
    for key in ["name", "x.2", "omega.31", "domain.v1"] {
        assert_eq!(parse_spec(&without(key)), Err(SpecFileError::MissingKey(key.into())), "{key}");
    }
    assert!(matches!(
        parse_spec(&format!("{PLANE}x.1 = u\n")),
        Err(SpecFileError::DuplicateKey { line: 16, .. })
    ));
    assert!(matches!(parse_spec(&format!("{PLANE}colour = red\n")), Err(SpecFileError::UnknownKey { .. })));
    assert!(matches!(parse_spec(&format!("{PLANE}just words\n")), Err(SpecFileError::Syntax { line: 16, .. })));
    let bad = PLANE.replace("x.3 = 0", "x.3 = u*(v");
    assert!(matches!(parse_spec(&bad), Err(SpecFileError::Expression { line: 5, .. })));
    let bad = PLANE.replace("x.3 = 0", "x.3 = w");
    assert!(matches!(parse_spec(&bad), Err(SpecFileError::Expression { .. })));
    let bad = PLANE.replace("domain.u1 = 1", "domain.u1 = -1");
    assert!(matches!(parse_spec(&bad), Err(SpecFileError::EmptyDomain { .. })));
    let bad = PLANE.replace("domain.u1 = 1", "domain.u1 = one");
    assert!(matches!(parse_spec(&bad), Err(SpecFileError::BadValue { .. })));
    assert!(matches!(parse_spec(&format!("{PLANE}grid.nu = 5\n")), Err(SpecFileError::MissingKey(_))));
    assert!(matches!(
        parse_spec(&format!("{PLANE}grid.nu = 1\ngrid.nv = 5\n")),
        Err(SpecFileError::BadValue { .. })
    ));
    assert!(matches!(
        parse_spec(&format!("{PLANE}expect_violation = maybe\n")),
        Err(SpecFileError::BadValue { .. })
    ));
}

#[test]
fn missing_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(read_spec_file(&dir.path().join("nope.txt")), Err(IoError::Io { .. })));
    let p = dir.path().join("plane.txt");
    std::fs::write(&p, PLANE).unwrap();
    assert_eq!(read_spec_file(&p).unwrap().unwrap().name, "plane");
}

#[test]
fn grid_flag() {
    let g = parse_grid("-1:1:21,0:2:11").unwrap();
    assert_eq!((g.u0, g.u1, g.nu, g.v0, g.v1, g.nv), (-1.0, 1.0, 21, 0.0, 2.0, 11));
    assert!(parse_grid("-1:1:21").is_err());
    assert!(parse_grid("-1:1:x,0:1:3").is_err());
    assert!(parse_grid("1:-1:5,0:1:3").is_err());
}

#[test]
fn data_dir_round_trip_is_exact() {
    let spec = lookup("cuspidal_edge").unwrap();
    let grid = GridSpec::new(-1.0, 1.0, 9, -1.0, 1.0, 7).unwrap();
    let data = derive_data(&spec, &grid).unwrap().with_origin(0.5, -1.0 / 3.0).with_seed(Vec3([1.0, -2.0, 0.1]));
    let dir = tempfile::tempdir().unwrap();
    write_data_dir(dir.path(), &data).unwrap();
    let back = read_data_dir(dir.path()).unwrap();
    assert_eq!(back.grid, data.grid);
    assert_eq!(back.origin, data.origin);
    assert_eq!(back.seed.0, data.seed.0);
    for i in 0..FIELD_NAMES.len() {
        assert_eq!(back.scalar(i), data.scalar(i), "{}", FIELD_NAMES[i]);
    }

    let first = std::fs::read(dir.path().join("g_omega.csv")).unwrap();
    write_data_dir(dir.path(), &back).unwrap();
    assert_eq!(std::fs::read(dir.path().join("g_omega.csv")).unwrap(), first);
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("u,v,value,du,dv,duu,duv,dvv\n"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 1 + grid.len());
}

#[test]
fn data_dir_errors() {
    let spec = lookup("plane").unwrap();
    let grid = GridSpec::new(-1.0, 1.0, 5, -1.0, 1.0, 5).unwrap();
    let data = derive_data(&spec, &grid).unwrap();
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(read_data_dir(dir.path()), Err(IoError::Io { .. })));
    write_data_dir(dir.path(), &data).unwrap();

    let f = dir.path().join("E_omega.csv");
    let good = std::fs::read_to_string(&f).unwrap();
    let short: String = good.lines().take(10).map(|l| format!("{l}\n")).collect();
    std::fs::write(&f, short).unwrap();
    assert!(matches!(read_data_dir(dir.path()), Err(IoError::Format { .. })));

    let shifted = good.replacen("\n-1.0000000000000000e0,", "\n-2.0000000000000000e0,", 1);
    assert_ne!(shifted, good);
    std::fs::write(&f, shifted).unwrap();
    assert!(matches!(read_data_dir(dir.path()), Err(IoError::Format { line: 2, .. })));

    std::fs::write(&f, &good).unwrap();
    let m = dir.path().join(MANIFEST);
    let manifest = std::fs::read_to_string(&m).unwrap();
    std::fs::write(&m, manifest.replace("field.G_omega", "field.H_omega")).unwrap();
    assert!(matches!(read_data_dir(dir.path()), Err(IoError::Format { .. })));
    std::fs::write(&m, &manifest).unwrap();
    assert!(read_data_dir(dir.path()).is_ok());
}

#[test]
fn obj_layout() {
    let grid = GridSpec::new(0.0, 1.0, 3, 0.0, 1.0, 2).unwrap();
    let pts: Vec<Vec3> = grid.points().map(|(u, v)| Vec3([u, v, 0.0])).collect();
    let mut buf = Vec::new();
    write_obj(&mut buf, &grid, &pts).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6 + 2);
    assert!(lines[..6].iter().all(|l| l.starts_with("v ") && l.split(' ').count() == 4));
    assert_eq!(lines[6], "f 1 2 5 4");
    assert_eq!(lines[7], "f 2 3 6 5");
}
