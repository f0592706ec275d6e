//! Built-in frontals with their tangent moving bases.

use crate::frontal::{Domain, FrontalSpec};

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub spec: FrontalSpec,
    pub description: &'static str,
}

type Raw = (&'static str, &'static str, [&'static str; 3], [[&'static str; 2]; 3], Domain, bool);

const SQUARE: Domain = Domain::new(-1.0, 1.0, -1.0, 1.0);

const RAW: [Raw; 7] = [
    (
        "plane",
        "flat plane (u, v, 0)",
        ["u", "v", "0"],
        [["1", "0"], ["0", "1"], ["0", "0"]],
        SQUARE,
        false,
    ),
    (
        "cuspidal_edge",
        "cuspidal edge (u, v^2, v^3)",
        ["u", "v^2", "v^3"],
        [["1", "0"], ["0", "1"], ["0", "1.5*v"]],
        SQUARE,
        false,
    ),
    (
        "swallowtail",
        "swallowtail (3u^4 + u^2 v, 4u^3 + 2uv, v)",
        ["3*u^4 + u^2*v", "4*u^3 + 2*u*v", "v"],
        [["u", "u^2"], ["1", "2*u"], ["0", "1"]],
        SQUARE,
        false,
    ),
    (
        "cuspidal_crosscap",
        "cuspidal cross-cap (u, v^2, u v^3)",
        ["u", "v^2", "u*v^3"],
        [["1", "0"], ["0", "1"], ["v^3", "1.5*u*v"]],
        SQUARE,
        false,
    ),
    (
        "corank2_front",
        "corank-2 front (u^2, v^2, v^3 + u^3)",
        ["u^2", "v^2", "v^3 + u^3"],
        [["2", "0"], ["0", "2"], ["3*u", "3*v"]],
        SQUARE,
        false,
    ),
    (
        "corank2_nonfront",
        "corank-2 frontal, not a front at (-1, 0): (u e^u, v^2, (u^2/2 + u) v^3)",
        ["u*exp(u)", "v^2", "(u^2/2 + u)*v^3"],
        [["exp(u)", "0"], ["0", "2"], ["v^3", "3*(u^2/2 + u)*v"]],
        Domain::new(-2.0, 0.0, -1.0, 1.0),
        false,
    ),
    (
        "whitney_crosscap",
        "Whitney cross-cap (u, v^2, u v), orthonormal base built from Dx; not a frontal",
        ["u", "v^2", "u*v"],
        [
            ["1/sqrt(1 + v^2)", "-u*v/sqrt((1 + v^2)*(u^2 + 4*v^2*(1 + v^2)))"],
            ["0", "2*v*(1 + v^2)/sqrt((1 + v^2)*(u^2 + 4*v^2*(1 + v^2)))"],
            ["v/sqrt(1 + v^2)", "u/sqrt((1 + v^2)*(u^2 + 4*v^2*(1 + v^2)))"],
        ],
        SQUARE,
        true,
    ),
];

pub fn catalog() -> Vec<CatalogEntry> {
    RAW.iter()
        .map(|&(name, description, x, omega, domain, expect_violation)| {
            let mut spec = FrontalSpec::from_strs(name, x, omega, domain)
                .expect("catalog expressions parse");
            spec.expect_violation = expect_violation;
            CatalogEntry { spec, description }
        })
        .collect()
}

pub fn names() -> Vec<&'static str> {
    RAW.iter().map(|r| r.0).collect()
}

pub fn lookup(name: &str) -> Option<FrontalSpec> {
    catalog().into_iter().find(|e| e.spec.name == name).map(|e| e.spec)
}

/// The six catalog entries that are genuine frontals.
pub fn genuine() -> Vec<FrontalSpec> {
    catalog().into_iter().filter(|e| !e.spec.expect_violation).map(|e| e.spec).collect()
}
