//! Semisprays, the Berwald connection they induce, the adapted basis,
//! horizontal and vertical projectors, and the connection curvature.

use crate::algebroid::{AlgebroidStructure, BaseSection, PullbackSection};
use crate::field::Field;
use crate::prolong::{self, ProlongSection};
use crate::residual::Residual;
use crate::tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SprayKind {
    /// Only `J(S) = C` is assumed.
    Semispray,
    /// Additionally homogeneous of degree two.
    Spray,
}

/// `S = y^a X_a + S^a V_a`, stored by its `V` components.
#[derive(Debug, Clone)]
pub struct Spray {
    pub s: Vec<Field>,
    pub kind: SprayKind,
}

impl Spray {
    pub fn new(s: Vec<Field>, kind: SprayKind) -> Spray {
        Spray { s, kind }
    }

    pub fn section(&self, a: &AlgebroidStructure) -> ProlongSection {
        let sp = a.space();
        ProlongSection::new((0..a.m()).map(|b| Field::coord(sp.y(b))).collect(), self.s.clone())
    }

    /// `y^a dS^b/dy^a - 2 S^b`.
    pub fn euler_defect(&self, a: &AlgebroidStructure) -> Residual {
        let sp = a.space();
        Residual::new(
            "spray homogeneity",
            self.s.iter().map(|s| tensor::euler(sp, s) - s.scale(2.0)).collect(),
        )
    }
}

/// Berwald connection coefficients `B[g][a]` of a semispray.
#[derive(Debug, Clone)]
pub struct BerwaldConnection {
    structure: AlgebroidStructure,
    spray: Spray,
    b: Vec<Vec<Field>>,
}

impl BerwaldConnection {
    /// `2 B^g_a = dS^g/dy^a - y^b L^g_{ab}`.
    pub fn new(structure: &AlgebroidStructure, spray: &Spray) -> BerwaldConnection {
        let m = structure.m();
        let sp = structure.space();
        let b = (0..m)
            .map(|g| {
                (0..m)
                    .map(|a| {
                        let l = Field::sum((0..m).map(|q| Field::coord(sp.y(q)).mul(structure.l(g, a, q))));
                        (spray.s[g].d(sp.y(a)) - l).scale(0.5)
                    })
                    .collect()
            })
            .collect();
        BerwaldConnection {
            structure: structure.clone(),
            spray: spray.clone(),
            b,
        }
    }

    pub fn structure(&self) -> &AlgebroidStructure {
        &self.structure
    }

    pub fn spray(&self) -> &Spray {
        &self.spray
    }

    pub fn m(&self) -> usize {
        self.structure.m()
    }

    /// `B^g_a`.
    pub fn coeff(&self, g: usize, a: usize) -> &Field {
        &self.b[g][a]
    }

    /// `B^g_a w^a` for each `g`.
    fn contract(&self, w: &[Field]) -> Vec<Field> {
        (0..self.m())
            .map(|g| Field::dot((0..self.m()).map(|a| (&self.b[g][a], &w[a]))))
            .collect()
    }

    /// `δ_a = X_a + B^b_a V_b`.
    pub fn adapted_delta(&self, a: usize) -> ProlongSection {
        let m = self.m();
        ProlongSection::new(
            PullbackSection::basis(m, a).comp,
            (0..m).map(|g| self.b[g][a].clone()).collect(),
        )
    }

    /// The Ehresmann map `ℋ(w) = w^a δ_a`.
    pub fn ehresmann(&self, w: &PullbackSection) -> ProlongSection {
        ProlongSection::new(w.comp.clone(), self.contract(&w.comp))
    }

    /// `eta^h = eta^a δ_a`.
    pub fn horizontal_lift(&self, eta: &BaseSection) -> ProlongSection {
        self.ehresmann(&PullbackSection::new(eta.comp.clone()))
    }

    /// Horizontal projector `h(s) = Z^a δ_a`.
    pub fn h(&self, s: &ProlongSection) -> ProlongSection {
        self.ehresmann(&prolong::map_j(s))
    }

    /// Vertical projector `v = Id - h`.
    pub fn v(&self, s: &ProlongSection) -> ProlongSection {
        prolong::map_i(&self.vertical_map(s))
    }

    /// The vertical map `𝒱`, with `i ∘ 𝒱 = v`: components `V - B Z`.
    pub fn vertical_map(&self, s: &ProlongSection) -> PullbackSection {
        let bz = self.contract(&s.z);
        PullbackSection::new(s.v.iter().zip(bz).map(|(v, b)| v - &b).collect())
    }

    /// `½(eta^C + [eta^V, S])`, which should reproduce `eta^h`.
    pub fn half_lift(&self, eta: &BaseSection) -> ProlongSection {
        let a = &self.structure;
        let c = prolong::complete_lift(a, eta);
        let br = prolong::bracket(a, &prolong::vertical_lift(eta), &self.spray.section(a));
        c.add(&br).scale(0.5)
    }

    /// `R[g][a][b]`, the curvature of the connection.
    pub fn curvature(&self) -> Vec<Vec<Vec<Field>>> {
        let a = &self.structure;
        let m = self.m();
        let deltas: Vec<ProlongSection> = (0..m).map(|p| self.adapted_delta(p)).collect();
        (0..m)
            .map(|g| {
                (0..m)
                    .map(|p| {
                        (0..m)
                            .map(|q| {
                                let direct = prolong::rho_apply(a, &deltas[p], &self.b[g][q])
                                    - prolong::rho_apply(a, &deltas[q], &self.b[g][p]);
                                let l = Field::dot((0..m).map(|r| (a.l(r, q, p), &self.b[g][r])));
                                direct + l
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::field::Space;
    use crate::plan::Plan;

    fn so3() -> AlgebroidStructure {
        AlgebroidStructure::lie_algebra(3, |g, a, b| match (a, b, g) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (1, 0, 2) | (2, 1, 0) | (0, 2, 1) => -1.0,
            _ => 0.0,
        })
    }

    fn values(sp: Space, fs: &[Field], p: &[f64]) -> Vec<f64> {
        Plan::values_of(sp, fs).values(p).unwrap()
    }

    #[test]
    fn berwald_coefficients() {
        let a = AlgebroidStructure::tangent(2);
        let sp = a.space();
        let s = Spray::new(
            vec![Field::from_expr(&parse("-y1^2", 2, 2).unwrap(), sp), Field::zero()],
            SprayKind::Spray,
        );
        let bc = BerwaldConnection::new(&a, &s);
        let p = [0.2, 0.3, 1.4, -0.6];
        assert_eq!(values(sp, &[bc.coeff(0, 0).clone()], &p), vec![-1.4]);

        let a = so3();
        let bc = BerwaldConnection::new(&a, &Spray::new(vec![Field::zero(); 3], SprayKind::Spray));
        let p = [0.7, -1.3, 0.9];
        assert_eq!(values(a.space(), &[bc.coeff(2, 0).clone()], &p), vec![0.65]);
        let d1 = bc.adapted_delta(0);
        let got = values(a.space(), &d1.components(), &p);
        assert_eq!(got, vec![1.0, 0.0, 0.0, 0.0, 0.45, 0.65]);
    }
}
