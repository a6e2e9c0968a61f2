mod common;

use common::*;
use spraygeom_core::prolong::{self, ProlongSection};
use spraygeom_core::residual::Residual;
use spraygeom_core::symmetry::{a_tensor, a_tensor_local, collineation_residuals, fn_bracket_j, fn_bracket_v, lie_symmetry};
use spraygeom_core::{BaseSection, BerwaldConnection, CurvatureSuite, Field, Plan, ProjectiveDimension};

fn symmetric_cases() -> Vec<Case> {
    all().into_iter().filter(|c| c.symmetry.is_some()).collect()
}

fn max_of(sp: spraygeom_core::Space, name: &str, comps: Vec<Field>, pts: &[Vec<f64>]) -> f64 {
    max_abs(sp, Residual::new(name, comps), pts)
}

#[test]
fn bracket_and_local_form_agree() {
    for case in all() {
        let a = &case.a;
        let sp = a.space();
        let pts = points(sp, 100);
        let bc = BerwaldConnection::new(a, &case.spray);
        for seed in 0..3 {
            let r = lie_symmetry(&bc, &random_base_section(a, 200 + seed));
            assert!(max_abs(sp, r.cancellation(), &pts) <= 1e-10, "{}", case.name);
            assert!(max_abs(sp, r.consistency(), &pts) <= 1e-10, "{}", case.name);
        }
    }
}

#[test]
fn built_in_symmetries_are_symmetries() {
    for case in symmetric_cases() {
        let sp = case.a.space();
        let bc = BerwaldConnection::new(&case.a, &case.spray);
        let r = lie_symmetry(&bc, case.symmetry.as_ref().unwrap());
        assert!(max_abs(sp, r.residual(), &points(sp, 100)) <= 1e-10, "{}", case.name);
    }
    let flat = flat();
    let bc = BerwaldConnection::new(&flat.a, &flat.spray);
    let r = lie_symmetry(&bc, &flat.a.basis(0));
    assert!(r.bracket.components().iter().all(Field::is_zero));
}

#[test]
fn quadratic_section_is_not_a_symmetry() {
    let case = flat();
    let sp = case.a.space();
    let eta = case.a.section(vec![f("x1^2", sp), Field::zero()]).unwrap();
    let bc = BerwaldConnection::new(&case.a, &case.spray);
    let r = lie_symmetry(&bc, &eta);
    let want = [f("2*y1^2", sp), Field::zero()];
    assert_same(sp, "negative control", &r.bracket.v, &want, &points(sp, 100), 1e-10);
    let at_one = Plan::values_of(sp, &r.bracket.v).values(&[0.3, -0.4, 1.0, 0.5]).unwrap();
    assert!((at_one[0] - 2.0).abs() <= 1e-12 && at_one[1] == 0.0);

    let a = a_tensor(&bc, &eta, &case.a.basis(0));
    assert!(max_of(sp, "A", a.v, &points(sp, 100)) > 1e-3);
}

#[test]
fn a_tensor_local_form_is_its_negative() {
    for case in all() {
        let a = &case.a;
        let sp = a.space();
        let pts = points(sp, 100);
        let bc = BerwaldConnection::new(a, &case.spray);
        let eta = random_base_section(a, 300);
        let xi = random_base_section(a, 301);
        let lifted = a_tensor(&bc, &eta, &xi);
        assert!(max_of(sp, "A x part", lifted.z.clone(), &pts) <= 1e-12);
        let neg: Vec<Field> = a_tensor_local(&bc, &eta, &xi).iter().map(|f| -f).collect();
        assert_same(sp, case.name, &lifted.v, &neg, &pts, 1e-10);

        let g = random_base_function(a, 302);
        let scaled = a_tensor(&bc, &eta, &xi.scaled(&g));
        assert_same(sp, "tensorial", &scaled.components(), &lifted.times(&g).components(), &pts, 1e-10);
    }
}

#[test]
fn vertical_endomorphism_commutes_with_lifts() {
    for case in all() {
        let a = &case.a;
        let sp = a.space();
        let m = a.m();
        let pts = points(sp, 50);
        let bc = BerwaldConnection::new(a, &case.spray);
        let eta = random_base_section(a, 400);
        let xi = ProlongSection::new(
            (0..m).map(|b| random_function(sp, 410 + b as u64)).collect(),
            (0..m).map(|b| random_function(sp, 420 + b as u64)).collect(),
        );
        for lift in [prolong::complete_lift(a, &eta), prolong::vertical_lift(&eta)] {
            assert!(max_of(sp, "J, lift", fn_bracket_j(&bc, &lift, &xi).components(), &pts) <= 1e-10, "{}", case.name);
            for b in 0..m {
                let r = fn_bracket_j(&bc, &lift, &ProlongSection::basis_x(m, b));
                assert!(max_of(sp, "J, lift on X", r.components(), &pts) <= 1e-10);
            }
        }
    }
}

#[test]
fn vertical_projector_bracket_is_minus_a() {
    for case in all() {
        let a = &case.a;
        let sp = a.space();
        let m = a.m();
        let pts = points(sp, 100);
        let bc = BerwaldConnection::new(a, &case.spray);
        let eta = random_base_section(a, 500);
        let ec = prolong::complete_lift(a, &eta);
        for b in 0..m {
            let on_v = fn_bracket_v(&bc, &ec, &ProlongSection::basis_v(m, b));
            assert!(max_of(sp, "v on V", on_v.components(), &pts) <= 1e-10);
            let minus_a = a_tensor(&bc, &eta, &a.basis(b)).scale(-1.0);
            for arg in [ProlongSection::basis_x(m, b), bc.adapted_delta(b)] {
                let on_x = fn_bracket_v(&bc, &ec, &arg);
                assert_same(sp, case.name, &on_x.components(), &minus_a.components(), &pts, 1e-10);
            }
        }
    }
}

#[test]
fn symmetry_equivalences() {
    let budget = 10.0;
    let mut candidates: Vec<(Case, BaseSection)> = Vec::new();
    for case in all() {
        let rnd = random_base_section(&case.a, 600);
        if let Some(s) = case.symmetry.clone() {
            candidates.push((clone_case(&case), s));
        }
        candidates.push((case, rnd));
    }
    for (case, eta) in candidates {
        let a = &case.a;
        let sp = a.space();
        let m = a.m();
        let pts = points(sp, 100);
        let bc = BerwaldConnection::new(a, &case.spray);
        let ec = prolong::complete_lift(a, &eta);
        let sym = max_abs(sp, lie_symmetry(&bc, &eta).residual(), &pts);
        let mut am = 0.0f64;
        let mut fm = 0.0f64;
        for b in 0..m {
            am = am.max(max_of(sp, "A", a_tensor(&bc, &eta, &a.basis(b)).components(), &pts));
            fm = fm.max(max_of(sp, "FN", fn_bracket_v(&bc, &ec, &ProlongSection::basis_x(m, b)).components(), &pts));
        }
        let eps = 1e-10;
        if sym <= eps {
            assert!(am <= budget * eps && fm <= budget * eps, "{}: {am:e} {fm:e}", case.name);
        }
        if am <= eps {
            assert!(sym <= budget * eps && fm <= budget * eps, "{}", case.name);
        }
        if fm <= eps {
            assert!(sym <= budget * eps && am <= budget * eps, "{}", case.name);
        }
        assert_eq!(sym <= eps, am <= eps, "{}", case.name);
    }
}

fn clone_case(c: &Case) -> Case {
    Case { name: c.name, a: c.a.clone(), spray: c.spray.clone(), symmetry: c.symmetry.clone(), tol: c.tol }
}

#[test]
fn symmetries_are_curvature_collineations() {
    for case in symmetric_cases() {
        let sp = case.a.space();
        let pts = points(sp, 100);
        let bc = BerwaldConnection::new(&case.a, &case.spray);
        let suite = CurvatureSuite::new(&bc, ProjectiveDimension::Rank).unwrap();
        for r in collineation_residuals(&bc, &suite, case.symmetry.as_ref().unwrap()) {
            let name = r.name.clone();
            let v = max_abs(sp, r, &pts);
            assert!(v <= case.tol, "{} {name}: {v:e}", case.name);
        }
    }
}

#[test]
fn zero_section_is_a_trivial_collineation() {
    let case = curved_plane();
    let bc = BerwaldConnection::new(&case.a, &case.spray);
    let suite = CurvatureSuite::new(&bc, ProjectiveDimension::Rank).unwrap();
    for r in collineation_residuals(&bc, &suite, &BaseSection::zero(2)) {
        assert!(r.components.iter().all(Field::is_zero), "{}", r.name);
    }
}

#[test]
fn non_symmetry_moves_the_jacobi_endomorphism() {
    let case = curved_plane();
    let sp = case.a.space();
    let eta = case.a.section(vec![f("x1^2", sp), Field::zero()]).unwrap();
    let bc = BerwaldConnection::new(&case.a, &case.spray);
    let suite = CurvatureSuite::new(&bc, ProjectiveDimension::Rank).unwrap();
    let k = collineation_residuals(&bc, &suite, &eta).into_iter().find(|r| r.name.ends_with(" K")).unwrap();
    assert!(max_abs(sp, k, &points(sp, 100)) > case.tol);
}
