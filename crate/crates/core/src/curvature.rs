//! Curvature tensors derived from the Jacobi endomorphism and the Berwald
//! connection. All tensors are materialized on the hat-lifted basis.
//!
//! Slot convention: a vertical differential puts its direction in the first
//! slot, so `R^o_{ab} = ⅓(dK^o_a/dy^b - dK^o_b/dy^a)`, `H^o_{abc} = dR^o_{ab}/dy^c`,
//! `B^o_{abc} = d/dy^a (∇^h_{ê_b} ê_c)^o`.

use crate::algebroid::{PullbackSection, StructureError};
use crate::connection::BerwaldConnection;
use crate::field::Field;
use crate::prolong;
use crate::tensor::{CoTensor, Tensor};

/// Which dimension the projective formulas divide by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectiveDimension {
    /// The rank `m` of the bundle, over which the traces run.
    #[default]
    Rank,
    /// The dimension `n` of the base.
    Base,
}

#[derive(Debug, Clone)]
pub struct CurvatureSuite {
    /// Jacobi endomorphism from its bracket definition.
    pub k: Tensor,
    /// Jacobi endomorphism from the coordinate formula.
    pub k_local: Tensor,
    pub r: Tensor,
    pub h: Tensor,
    pub k_ring: Field,
    /// Projective deviation from the defining formula.
    pub w0: Tensor,
    /// Projective deviation from the rewritten formula.
    pub w0_rewritten: Tensor,
    pub w: Tensor,
    pub w_star: Tensor,
    pub berwald: Tensor,
    pub douglas: Tensor,
    pub dimension: usize,
}

/// `K(ê_c) = 𝒱[S, δ_c]`.
pub fn jacobi_endomorphism(bc: &BerwaldConnection) -> Tensor {
    let a = bc.structure();
    let s = bc.spray().section(a);
    let columns: Vec<PullbackSection> = (0..a.m())
        .map(|c| bc.vertical_map(&prolong::bracket(a, &s, &bc.adapted_delta(c))))
        .collect();
    Tensor::from_fn(a.m(), 1, |o, t| columns[t[0]].comp[o].clone())
}

/// The coordinate expression of the Jacobi endomorphism.
pub fn jacobi_endomorphism_local(bc: &BerwaldConnection) -> Tensor {
    let a = bc.structure();
    let m = a.m();
    let sp = a.space();
    let y: Vec<Field> = (0..m).map(|b| Field::coord(sp.y(b))).collect();
    let s = &bc.spray().s;
    let b = |g: usize, p: usize| bc.coeff(g, p);
    Tensor::from_fn(m, 1, |al, t| {
        let ga = t[0];
        let mut terms = Vec::new();
        for be in 0..m {
            for th in 0..m {
                if !a.l(th, be, ga).is_zero() {
                    terms.push(-(y[be].mul(a.l(th, be, ga)).mul(b(al, th))));
                }
            }
            terms.push(b(be, ga).mul(b(al, be)));
            terms.push(y[be].mul(&a.anchor_derivative(be, b(al, ga))));
            terms.push(s[be].mul(&b(al, ga).d(sp.y(be))));
            terms.push(-(b(be, ga).mul(&s[al].d(sp.y(be)))));
        }
        terms.push(-a.anchor_derivative(ga, &s[al]));
        Field::sum(terms)
    })
}

/// `⅓(∇^vT(ê_b, ê_a) - ∇^vT(ê_a, ê_b))` for a `(1,1)` tensor `T`.
fn fundamental(t: &Tensor, bc: &BerwaldConnection) -> Tensor {
    let dt = t.nabla_v(bc.structure().space());
    Tensor::from_fn(t.rank(), 2, |o, ab| (dt.get(o, &[ab[1], ab[0]]) - dt.get(o, &[ab[0], ab[1]])).scale(1.0 / 3.0))
}

/// `T'(η, ξ)σ = ∇^vT(σ, η, ξ)` for a `(1,2)` tensor `T`.
fn derived(t: &Tensor, bc: &BerwaldConnection) -> Tensor {
    let dt = t.nabla_v(bc.structure().space());
    Tensor::from_fn(t.rank(), 3, |o, abc| dt.get(o, &[abc[2], abc[0], abc[1]]).clone())
}

impl CurvatureSuite {
    pub fn new(bc: &BerwaldConnection, dim: ProjectiveDimension) -> Result<CurvatureSuite, StructureError> {
        let a = bc.structure();
        let sp = a.space();
        let m = a.m();
        let nd = match dim {
            ProjectiveDimension::Rank if m < 2 => return Err(StructureError::RankOne),
            ProjectiveDimension::Rank => m,
            ProjectiveDimension::Base if a.n() < 2 => return Err(StructureError::BaseDimension(a.n())),
            ProjectiveDimension::Base => a.n(),
        };
        let d = nd as f64;

        let k = jacobi_endomorphism(bc);
        let k_local = jacobi_endomorphism_local(bc);
        let r = fundamental(&k, bc);
        let h = derived(&r, bc);

        let id = Tensor::identity(m);
        let tr_k = k.trace().expect("arity 1").get(&[]).clone();
        let k_ring = tr_k.scale(1.0 / (d - 1.0));
        let tr_r = r.trace().expect("arity 2");
        let dtr_k = CoTensor::scalar(m, tr_k.clone()).nabla_v(sp);
        let w0 = k
            .sub(&id.times(&k_ring))
            .add(&tr_r.tensor_delta(sp).scale(3.0 / (d + 1.0)))
            .add(&dtr_k.tensor_delta(sp).scale((2.0 - d) / (d * d - 1.0)));
        let dk_ring = CoTensor::scalar(m, k_ring.clone()).nabla_v(sp);
        let tr_dk = k.nabla_v(sp).trace().expect("arity 2");
        let w0_rewritten = k
            .sub(&id.times(&k_ring))
            .add(&dk_ring.sub(&tr_dk).tensor_delta(sp).scale(1.0 / (d + 1.0)));
        let w = fundamental(&w0, bc);
        let w_star = derived(&w, bc);

        let berwald = Tensor::from_fn(m, 3, |o, abc| -bc.coeff(o, abc[1]).d(sp.y(abc[2])).d(sp.y(abc[0])));
        let tr_b = berwald.trace().expect("arity 3");
        let dtr_b = tr_b.nabla_v(sp);
        let douglas = Tensor::from_fn(m, 3, |o, abc| {
            let (x, y, z) = (abc[0], abc[1], abc[2]);
            let mut fix = Vec::new();
            if o == z {
                fix.push(tr_b.get(&[x, y]).clone());
            }
            if o == x {
                fix.push(tr_b.get(&[y, z]).clone());
            }
            if o == y {
                fix.push(tr_b.get(&[z, x]).clone());
            }
            fix.push(dtr_b.get(&[x, y, z]).mul(&Field::coord(sp.y(o))));
            berwald.get(o, abc) - &Field::sum(fix).scale(1.0 / (d + 1.0))
        });

        Ok(CurvatureSuite {
            k,
            k_local,
            r,
            h,
            k_ring,
            w0,
            w0_rewritten,
            w,
            w_star,
            berwald,
            douglas,
            dimension: nd,
        })
    }

    /// The eight tensors checked for curvature collineations, by name.
    pub fn tensors(&self) -> [(&'static str, &Tensor); 8] {
        [
            ("K", &self.k),
            ("R", &self.r),
            ("H", &self.h),
            ("W0", &self.w0),
            ("W", &self.w),
            ("Wstar", &self.w_star),
            ("B", &self.berwald),
            ("D", &self.douglas),
        ]
    }

    pub fn tensor(&self, name: &str) -> Option<&Tensor> {
        self.tensors().into_iter().find(|(n, _)| *n == name).map(|(_, t)| t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::AlgebroidStructure;
    use crate::connection::{Spray, SprayKind};

    #[test]
    fn rank_one_is_rejected() {
        let a = AlgebroidStructure::tangent(1);
        let bc = BerwaldConnection::new(&a, &Spray::new(vec![Field::zero()], SprayKind::Spray));
        assert_eq!(CurvatureSuite::new(&bc, ProjectiveDimension::Rank).unwrap_err(), StructureError::RankOne);
    }

    #[test]
    fn flat_suite_vanishes_structurally() {
        let a = AlgebroidStructure::tangent(2);
        let bc = BerwaldConnection::new(&a, &Spray::new(vec![Field::zero(); 2], SprayKind::Spray));
        let suite = CurvatureSuite::new(&bc, ProjectiveDimension::Rank).unwrap();
        for (name, t) in suite.tensors() {
            assert!(t.components().iter().all(Field::is_zero), "{name}");
        }
    }
}
