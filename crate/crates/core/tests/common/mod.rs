#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spraygeom_core::residual::{self, Residual};
use spraygeom_core::{AlgebroidStructure, BaseSection, Field, PullbackSection, Sampling, Space, Spray, SprayKind};

pub struct Case {
    pub name: &'static str,
    pub a: AlgebroidStructure,
    pub spray: Spray,
    pub symmetry: Option<BaseSection>,
    pub tol: f64,
}

pub fn f(text: &str, sp: Space) -> Field {
    Field::parse(text, sp).unwrap_or_else(|e| panic!("{text}: {e:?}"))
}

fn spray(a: &AlgebroidStructure, comps: &[&str]) -> Spray {
    Spray::new(comps.iter().map(|t| f(t, a.space())).collect(), SprayKind::Spray)
}

fn section(a: &AlgebroidStructure, comps: &[&str]) -> BaseSection {
    a.section(comps.iter().map(|t| f(t, a.space())).collect()).unwrap()
}

pub fn levi_civita(g: usize, a: usize, b: usize) -> f64 {
    match (a, b, g) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (1, 0, 2) | (2, 1, 0) | (0, 2, 1) => -1.0,
        _ => 0.0,
    }
}

pub fn so3_structure() -> AlgebroidStructure {
    AlgebroidStructure::lie_algebra(3, levi_civita)
}

pub fn anchored_structure() -> AlgebroidStructure {
    let sp = Space::new(1, 2);
    AlgebroidStructure::from_sparse(sp, vec![vec![Field::one(), f("x1", sp)]], &[(0, 0, 1, Field::one())]).unwrap()
}

pub fn flat() -> Case {
    let a = AlgebroidStructure::tangent(2);
    Case {
        name: "flat plane",
        spray: spray(&a, &["0", "0"]),
        symmetry: Some(section(&a, &["-x2", "x1"])),
        a,
        tol: 1e-8,
    }
}

pub fn curved_plane() -> Case {
    let a = AlgebroidStructure::tangent(2);
    Case {
        name: "curved plane",
        spray: spray(&a, &["-(y1^2 + y2^2)*x1", "-(y1^2 + y2^2)*x2"]),
        symmetry: Some(section(&a, &["-x2", "x1"])),
        a,
        tol: 1e-8,
    }
}

pub fn so3_free() -> Case {
    let a = so3_structure();
    Case {
        name: "so(3) free",
        spray: spray(&a, &["0", "0", "0"]),
        symmetry: Some(section(&a, &["0", "0", "1"])),
        a,
        tol: 1e-8,
    }
}

pub fn so3_equivariant() -> Case {
    let a = so3_structure();
    Case {
        name: "so(3) equivariant",
        spray: spray(&a, &["y1*y3", "y2*y3", "y1^2 + y2^2"]),
        symmetry: Some(section(&a, &["0", "0", "1"])),
        a,
        tol: 1e-8,
    }
}

pub fn so3_quadratic() -> Case {
    let a = so3_structure();
    Case {
        name: "so(3) quadratic",
        spray: spray(&a, &["0", "0", "1.5*y1*y2"]),
        symmetry: None,
        a,
        tol: 1e-8,
    }
}

pub fn anchored() -> Case {
    let a = anchored_structure();
    Case {
        name: "anchored",
        spray: spray(&a, &["x1*y1*y2 - y2^2", "(1 + x1^2)*y1^2"]),
        symmetry: None,
        a,
        tol: 1e-8,
    }
}

pub fn transcendental() -> Case {
    let a = AlgebroidStructure::tangent(2);
    Case {
        name: "transcendental",
        spray: spray(&a, &["-exp(x1)*y1*y2", "cos(x2)*y1^2 - sin(x1)*y2^2"]),
        symmetry: None,
        a,
        tol: 1e-6,
    }
}

/// Every scenario with a genuine quadratic spray.
pub fn all() -> Vec<Case> {
    vec![flat(), curved_plane(), so3_free(), so3_equivariant(), so3_quadratic(), anchored(), transcendental()]
}

pub fn points(sp: Space, count: usize) -> Vec<Vec<f64>> {
    Sampling::default().with_points(count).generate(sp)
}

/// Max residual over all points; panics if any point fails to evaluate.
pub fn max_abs(sp: Space, r: Residual, pts: &[Vec<f64>]) -> f64 {
    let name = r.name.clone();
    let s = residual::evaluate(sp, &[r], pts).pop().unwrap();
    assert_eq!(s.skipped, 0, "{name}: {:?}", s.first_error);
    s.max
}

pub fn assert_small(sp: Space, name: &str, comps: Vec<Field>, pts: &[Vec<f64>], tol: f64) {
    let m = max_abs(sp, Residual::new(name, comps), pts);
    assert!(m <= tol, "{name}: residual {m:e} > {tol:e}");
}

pub fn assert_same(sp: Space, name: &str, lhs: &[Field], rhs: &[Field], pts: &[Vec<f64>], tol: f64) {
    let m = max_abs(sp, Residual::difference(name, lhs, rhs), pts);
    assert!(m <= tol, "{name}: residual {m:e} > {tol:e}");
}

fn coefficient(rng: &mut ChaCha8Rng) -> String {
    format!("{:.3}", rng.gen_range(-1.5..1.5))
}

/// A random polynomial of degree <= 2 in the given variable names.
fn polynomial(rng: &mut ChaCha8Rng, vars: &[String]) -> String {
    let mut terms = vec![coefficient(rng)];
    for (i, v) in vars.iter().enumerate() {
        terms.push(format!("{}*{}", coefficient(rng), v));
        for w in &vars[i..] {
            terms.push(format!("{}*{}*{}", coefficient(rng), v, w));
        }
    }
    terms.join(" + ")
}

fn base_vars(sp: Space) -> Vec<String> {
    (1..=sp.n).map(|i| format!("x{i}")).collect()
}

pub fn random_base_section(a: &AlgebroidStructure, seed: u64) -> BaseSection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sp = a.space();
    let vars = base_vars(sp);
    a.section((0..sp.m).map(|_| f(&polynomial(&mut rng, &vars), sp)).collect()).unwrap()
}

pub fn random_base_function(a: &AlgebroidStructure, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    f(&polynomial(&mut rng, &base_vars(a.space())), a.space())
}

pub fn random_function(sp: Space, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vars = base_vars(sp);
    vars.extend((1..=sp.m).map(|a| format!("y{a}")));
    f(&polynomial(&mut rng, &vars), sp)
}

pub fn random_pullback(sp: Space, seed: u64) -> PullbackSection {
    PullbackSection::new((0..sp.m).map(|a| random_function(sp, seed * 31 + a as u64)).collect())
}
