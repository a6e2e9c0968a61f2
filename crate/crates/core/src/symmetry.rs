//! Lie symmetries of a semispray and the curvature-collineation residuals.

use crate::algebroid::BaseSection;
use crate::connection::BerwaldConnection;
use crate::curvature::CurvatureSuite;
use crate::derivation::{LieDerivation, ProjectableSection};
use crate::field::Field;
use crate::prolong::{self, ProlongSection};
use crate::residual::Residual;
use crate::tensor::Tensor;

/// `[S, eta^C]` together with its closed-form vertical part.
#[derive(Debug, Clone)]
pub struct SymmetryBracket {
    pub bracket: ProlongSection,
    pub local: Vec<Field>,
}

impl SymmetryBracket {
    /// The `X` part of the bracket, which cancels for every section.
    pub fn cancellation(&self) -> Residual {
        Residual::new("symmetry bracket X part", self.bracket.z.clone())
    }

    /// The `V` part of the bracket; zero exactly for symmetries.
    pub fn residual(&self) -> Residual {
        Residual::new("lie symmetry", self.bracket.v.clone())
    }

    pub fn consistency(&self) -> Residual {
        Residual::difference("symmetry bracket vs local form", &self.bracket.v, &self.local)
    }
}

pub fn lie_symmetry(bc: &BerwaldConnection, eta: &BaseSection) -> SymmetryBracket {
    let a = bc.structure();
    let sp = a.space();
    let m = a.m();
    let s = bc.spray().section(a);
    let bracket = prolong::bracket(a, &s, &prolong::complete_lift(a, eta));

    let cov = a.covariant_components(eta);
    let y: Vec<Field> = (0..m).map(|b| Field::coord(sp.y(b))).collect();
    let ss = &bc.spray().s;
    let local = (0..m)
        .map(|al| {
            let mut terms = Vec::new();
            for be in 0..m {
                for la in 0..m {
                    terms.push(y[be].mul(&y[la]).mul(&a.anchor_derivative(la, &cov[al][be])));
                    terms.push(-(y[be].mul(&cov[la][be]).mul(&ss[al].d(sp.y(la)))));
                }
            }
            for la in 0..m {
                terms.push(-(eta.comp[la].mul(&a.anchor_derivative(la, &ss[al]))));
                terms.push(ss[la].mul(&cov[al][la]));
            }
            Field::sum(terms)
        })
        .collect();
    SymmetryBracket { bracket, local }
}

/// `A(eta, xi) = [eta, xi]^h - [eta^C, xi^h]`, from lifts and brackets.
pub fn a_tensor(bc: &BerwaldConnection, eta: &BaseSection, xi: &BaseSection) -> ProlongSection {
    let a = bc.structure();
    let lhs = bc.horizontal_lift(&a.bracket_e(eta, xi));
    let rhs = prolong::bracket(a, &prolong::complete_lift(a, eta), &bc.horizontal_lift(xi));
    lhs.sub(&rhs)
}

/// The closed local expression for the `V` components of `A(eta, xi)`,
/// in the sign convention in which it is usually quoted. It equals the
/// negative of [`a_tensor`].
pub fn a_tensor_local(bc: &BerwaldConnection, eta: &BaseSection, xi: &BaseSection) -> Vec<Field> {
    let a = bc.structure();
    let sp = a.space();
    let m = a.m();
    let cov = a.covariant_components(eta);
    let y: Vec<Field> = (0..m).map(|b| Field::coord(sp.y(b))).collect();
    let b = |g: usize, p: usize| bc.coeff(g, p);
    (0..m)
        .map(|al| {
            let mut terms = Vec::new();
            for be in 0..m {
                if xi.comp[be].is_zero() {
                    continue;
                }
                let mut inner = Vec::new();
                for la in 0..m {
                    inner.push(eta.comp[la].mul(&a.anchor_derivative(la, b(al, be))));
                    inner.push(-(b(la, be).mul(&cov[al][la])));
                    inner.push(cov[la][be].mul(b(al, la)));
                    for ga in 0..m {
                        inner.push(y[ga].mul(&cov[la][ga]).mul(&b(al, be).d(sp.y(la))));
                    }
                }
                for ga in 0..m {
                    inner.push(-(y[ga].mul(&a.anchor_derivative(be, &cov[al][ga]))));
                }
                terms.push(xi.comp[be].mul(&Field::sum(inner)));
            }
            Field::sum(terms)
        })
        .collect()
}

/// `[J, eta]^{F-N} xi = [J xi, eta] - J [xi, eta]`.
pub fn fn_bracket_j(bc: &BerwaldConnection, eta: &ProlongSection, xi: &ProlongSection) -> ProlongSection {
    let a = bc.structure();
    let jxi = prolong::vertical_endomorphism(xi);
    prolong::bracket(a, &jxi, eta).sub(&prolong::vertical_endomorphism(&prolong::bracket(a, xi, eta)))
}

/// `[v, eta]^{F-N} xi = [v xi, eta] - v [xi, eta]`, by analogy with `J`.
pub fn fn_bracket_v(bc: &BerwaldConnection, eta: &ProlongSection, xi: &ProlongSection) -> ProlongSection {
    let a = bc.structure();
    prolong::bracket(a, &bc.v(xi), eta).sub(&bc.v(&prolong::bracket(a, xi, eta)))
}

/// `L̃_{eta^C} T` for each of the eight curvature tensors.
pub fn collineation(bc: &BerwaldConnection, suite: &CurvatureSuite, eta: &BaseSection) -> Vec<(&'static str, Tensor)> {
    let a = bc.structure();
    let lift = ProjectableSection::new(a.space(), prolong::complete_lift(a, eta)).expect("complete lifts are projectable");
    let lie = LieDerivation::new(a, &lift);
    suite.tensors().into_iter().map(|(name, t)| (name, lie.on_tensor(t))).collect()
}

/// Collineation residuals as named residual sets.
pub fn collineation_residuals(bc: &BerwaldConnection, suite: &CurvatureSuite, eta: &BaseSection) -> Vec<Residual> {
    collineation(bc, suite, eta)
        .into_iter()
        .map(|(name, t)| Residual::new(format!("collineation {name}"), t.components().to_vec()))
        .collect()
}
