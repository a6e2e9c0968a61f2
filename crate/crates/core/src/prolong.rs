//! Sections of the prolongation bundle in the `{X_a, V_a}` basis, with its
//! anchor, bracket, the maps `i`, `j`, `J`, and the lifts of base sections.

use crate::algebroid::{AlgebroidStructure, BaseSection, PullbackSection, VectorField};
use crate::field::{Field, Space};

/// `Z^a X_a + V^a V_a`.
#[derive(Debug, Clone)]
pub struct ProlongSection {
    pub z: Vec<Field>,
    pub v: Vec<Field>,
}

impl ProlongSection {
    pub fn new(z: Vec<Field>, v: Vec<Field>) -> ProlongSection {
        assert_eq!(z.len(), v.len(), "component count mismatch");
        ProlongSection { z, v }
    }

    pub fn zero(m: usize) -> ProlongSection {
        ProlongSection::new(vec![Field::zero(); m], vec![Field::zero(); m])
    }

    pub fn basis_x(m: usize, a: usize) -> ProlongSection {
        ProlongSection::new(PullbackSection::basis(m, a).comp, vec![Field::zero(); m])
    }

    pub fn basis_v(m: usize, a: usize) -> ProlongSection {
        ProlongSection::new(vec![Field::zero(); m], PullbackSection::basis(m, a).comp)
    }

    /// The Liouville section `y^a V_a`.
    pub fn liouville(space: Space) -> ProlongSection {
        map_i(&PullbackSection::canonical(space))
    }

    pub fn rank(&self) -> usize {
        self.z.len()
    }

    pub fn add(&self, other: &ProlongSection) -> ProlongSection {
        let zip = |a: &[Field], b: &[Field]| a.iter().zip(b).map(|(p, q)| p + q).collect();
        ProlongSection::new(zip(&self.z, &other.z), zip(&self.v, &other.v))
    }

    pub fn sub(&self, other: &ProlongSection) -> ProlongSection {
        let zip = |a: &[Field], b: &[Field]| a.iter().zip(b).map(|(p, q)| p - q).collect();
        ProlongSection::new(zip(&self.z, &other.z), zip(&self.v, &other.v))
    }

    pub fn scale(&self, c: f64) -> ProlongSection {
        ProlongSection::new(
            self.z.iter().map(|f| f.scale(c)).collect(),
            self.v.iter().map(|f| f.scale(c)).collect(),
        )
    }

    pub fn times(&self, f: &Field) -> ProlongSection {
        ProlongSection::new(
            self.z.iter().map(|c| c.mul(f)).collect(),
            self.v.iter().map(|c| c.mul(f)).collect(),
        )
    }

    /// `Z` components followed by `V` components.
    pub fn components(&self) -> Vec<Field> {
        self.z.iter().chain(&self.v).cloned().collect()
    }
}

/// The anchor `rho_L(s)` as a vector field on `E`.
pub fn rho_l(a: &AlgebroidStructure, s: &ProlongSection) -> VectorField {
    let (n, m) = (a.n(), a.m());
    VectorField {
        x: (0..n)
            .map(|i| Field::dot((0..m).map(|b| (&s.z[b], a.rho(i, b)))))
            .collect(),
        y: s.v.clone(),
    }
}

/// `rho_L(s) F = Z^a rho^i_a dF/dx^i + V^a dF/dy^a`.
pub fn rho_apply(a: &AlgebroidStructure, s: &ProlongSection, f: &Field) -> Field {
    let sp = a.space();
    let horizontal = (0..a.m())
        .filter(|&b| !s.z[b].is_zero())
        .map(|b| s.z[b].mul(&a.anchor_derivative(b, f)));
    let vertical = (0..a.m())
        .filter(|&b| !s.v[b].is_zero())
        .map(|b| s.v[b].mul(&f.d(sp.y(b))));
    Field::sum(horizontal.chain(vertical))
}

/// The bracket of two sections, from the basis table and the Leibniz rule.
pub fn bracket(a: &AlgebroidStructure, xi: &ProlongSection, eta: &ProlongSection) -> ProlongSection {
    let m = a.m();
    let lie = |f: &Field, g: &Field| rho_apply(a, xi, g) - rho_apply(a, eta, f);
    let z = (0..m)
        .map(|g| {
            let quad = Field::sum((0..m).flat_map(|p| {
                (0..m)
                    .filter(move |&q| !a.l(g, p, q).is_zero() && !xi.z[p].is_zero() && !eta.z[q].is_zero())
                    .map(move |q| xi.z[p].mul(&eta.z[q]).mul(a.l(g, p, q)))
            }));
            lie(&xi.z[g], &eta.z[g]) + quad
        })
        .collect();
    let v = (0..m).map(|g| lie(&xi.v[g], &eta.v[g])).collect();
    ProlongSection::new(z, v)
}

/// `i`: pullback sections into the vertical subbundle.
pub fn map_i(s: &PullbackSection) -> ProlongSection {
    ProlongSection::new(vec![Field::zero(); s.comp.len()], s.comp.clone())
}

/// `j`: the `X` components.
pub fn map_j(s: &ProlongSection) -> PullbackSection {
    PullbackSection::new(s.z.clone())
}

/// The vertical endomorphism `J = i ∘ j`.
pub fn vertical_endomorphism(s: &ProlongSection) -> ProlongSection {
    map_i(&map_j(s))
}

/// `eta^V = eta^a V_a`.
pub fn vertical_lift(eta: &BaseSection) -> ProlongSection {
    ProlongSection::new(vec![Field::zero(); eta.comp.len()], eta.comp.clone())
}

/// `eta^C = eta^a X_a + y^b eta^a_{|b} V_a`.
pub fn complete_lift(a: &AlgebroidStructure, eta: &BaseSection) -> ProlongSection {
    let m = a.m();
    let sp = a.space();
    let cov = a.covariant_components(eta);
    let ys: Vec<Field> = (0..m).map(|b| Field::coord(sp.y(b))).collect();
    let v = (0..m)
        .map(|g| Field::dot((0..m).map(|b| (&ys[b], &cov[g][b]))))
        .collect();
    ProlongSection::new(eta.comp.clone(), v)
}

/// `[C, s] - (r - 1) s`; vanishes when `s` is homogeneous of degree `r`.
pub fn homogeneity_defect(a: &AlgebroidStructure, s: &ProlongSection, r: i32) -> ProlongSection {
    let c = ProlongSection::liouville(a.space());
    bracket(a, &c, s).sub(&s.scale(f64::from(r - 1)))
}
