//! Derivations along the prolongation projection: the vertical and
//! h-Berwald differentials and the Lie derivation along projectable sections.

use thiserror::Error;

use crate::algebroid::{AlgebroidStructure, PullbackSection};
use crate::connection::BerwaldConnection;
use crate::field::{Field, Space};
use crate::plan::Plan;
use crate::prolong::{self, ProlongSection};
use crate::tensor::{CoTensor, Tensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DerivationError {
    #[error("section is not projectable: X component {component} depends on y (|dZ/dy| = {value:e})")]
    NotProjectable { component: usize, value: f64 },
    #[error("projectability could not be evaluated: {0}")]
    Evaluation(String),
}

/// `∇^v F`: the one-form `ê_a ↦ dF/dy^a`.
pub fn nabla_v_fn(space: Space, f: &Field) -> CoTensor {
    CoTensor::from_fn(space.m, 1, |a| f.d(space.y(a[0])))
}

/// `∇^v_ξ η = ξ^a dη^b/dy^a ê_b`.
pub fn nabla_v_sec(space: Space, xi: &PullbackSection, eta: &PullbackSection) -> PullbackSection {
    PullbackSection::new(
        eta.comp
            .iter()
            .map(|e| Field::sum((0..space.m).filter(|&a| !xi.comp[a].is_zero()).map(|a| xi.comp[a].mul(&e.d(space.y(a))))))
            .collect(),
    )
}

/// `∇^h F`: the one-form `ê_a ↦ rho^i_a dF/dx^i + B^g_a dF/dy^g`.
pub fn nabla_h_fn(bc: &BerwaldConnection, f: &Field) -> CoTensor {
    let a = bc.structure();
    CoTensor::from_fn(a.m(), 1, |t| prolong::rho_apply(a, &bc.adapted_delta(t[0]), f))
}

/// `∇^h_ξ η`.
pub fn nabla_h_sec(bc: &BerwaldConnection, xi: &PullbackSection, eta: &PullbackSection) -> PullbackSection {
    let a = bc.structure();
    let m = a.m();
    let sp = a.space();
    let direction = bc.ehresmann(xi);
    PullbackSection::new(
        (0..m)
            .map(|g| {
                let transport = prolong::rho_apply(a, &direction, &eta.comp[g]);
                let twist = Field::sum((0..m).filter(|&p| !xi.comp[p].is_zero()).flat_map(|p| {
                    (0..m)
                        .filter(|&q| !eta.comp[q].is_zero())
                        .map(move |q| xi.comp[p].mul(&eta.comp[q]).mul(&bc.coeff(g, p).d(sp.y(q))))
                        .collect::<Vec<_>>()
                }));
                transport - twist
            })
            .collect(),
    )
}

/// A prolongation section whose `X` components do not depend on `y`.
#[derive(Debug, Clone)]
pub struct ProjectableSection {
    section: ProlongSection,
}

impl ProjectableSection {
    /// Accept `s` if its `X` components are structurally independent of `y`.
    pub fn new(space: Space, s: ProlongSection) -> Result<ProjectableSection, DerivationError> {
        match s.z.iter().position(|z| z.deps() & space.fiber_mask() != 0) {
            None => Ok(ProjectableSection { section: s }),
            Some(component) => Err(DerivationError::NotProjectable {
                component,
                value: f64::NAN,
            }),
        }
    }

    /// Accept `s` if `|dZ^a/dy^b| <= tol` at every point. Used when the
    /// `X` components carry a `y` dependence that cancels.
    pub fn verified(space: Space, s: ProlongSection, points: &[Vec<f64>], tol: f64) -> Result<ProjectableSection, DerivationError> {
        if let Ok(p) = ProjectableSection::new(space, s.clone()) {
            return Ok(p);
        }
        let m = space.m;
        let partials: Vec<Field> = s.z.iter().flat_map(|z| (0..m).map(move |b| z.d(space.y(b)))).collect();
        let plan = Plan::values_of(space, &partials);
        for p in points {
            let v = plan.values(p).map_err(|e| DerivationError::Evaluation(e.to_string()))?;
            if let Some((k, val)) = v.iter().enumerate().find(|(_, x)| x.abs() > tol) {
                return Err(DerivationError::NotProjectable {
                    component: k / m,
                    value: val.abs(),
                });
            }
        }
        Ok(ProjectableSection { section: s })
    }

    pub fn section(&self) -> &ProlongSection {
        &self.section
    }
}

/// The Lie derivation `L̃_ξ` along a projectable section.
#[derive(Debug, Clone)]
pub struct LieDerivation<'a> {
    algebroid: &'a AlgebroidStructure,
    xi: ProlongSection,
    // d V^c / d y^a, indexed [c][a].
    dv: Vec<Vec<Field>>,
}

impl<'a> LieDerivation<'a> {
    pub fn new(algebroid: &'a AlgebroidStructure, xi: &ProjectableSection) -> LieDerivation<'a> {
        let sp = algebroid.space();
        let s = xi.section().clone();
        let dv = s.v.iter().map(|v| (0..sp.m).map(|a| v.d(sp.y(a))).collect()).collect();
        LieDerivation { algebroid, xi: s, dv }
    }

    /// `L̃ F = rho_L(ξ) F`.
    pub fn on_fn(&self, f: &Field) -> Field {
        prolong::rho_apply(self.algebroid, &self.xi, f)
    }

    /// `L̃ σ = i^{-1}[ξ, iσ]`, expanded: `rho_L(ξ)σ^g - σ^b dV^g/dy^b`.
    pub fn on_sec(&self, s: &PullbackSection) -> PullbackSection {
        let m = self.algebroid.m();
        PullbackSection::new(
            (0..m)
                .map(|g| {
                    let pull = Field::dot((0..m).map(|b| (&s.comp[b], &self.dv[g][b])));
                    self.on_fn(&s.comp[g]) - pull
                })
                .collect(),
        )
    }

    /// `L̃ ê_a = -dV^c/dy^a ê_c`, as `[c]`.
    fn on_basis(&self, a: usize) -> Vec<Field> {
        (0..self.algebroid.m()).map(|c| -&self.dv[c][a]).collect()
    }

    /// `(L̃T)(ê..) = L̃(T(ê..)) - Σ_i T(.., L̃ê_{a_i}, ..)`.
    pub fn on_tensor(&self, t: &Tensor) -> Tensor {
        let m = self.algebroid.m();
        let k = t.arity();
        let basis: Vec<Vec<Field>> = (0..m).map(|a| self.on_basis(a)).collect();
        Tensor::from_fn(m, k, |o, args| {
            let head = self.on_sec(&t.on_basis(args)).comp[o].clone();
            let mut tail = Vec::new();
            let mut shifted = args.to_vec();
            for slot in 0..k {
                for c in 0..m {
                    let w = &basis[args[slot]][c];
                    if w.is_zero() {
                        continue;
                    }
                    shifted[slot] = c;
                    tail.push(w.mul(t.get(o, &shifted)));
                }
                shifted[slot] = args[slot];
            }
            head - Field::sum(tail)
        })
    }

    pub fn on_cotensor(&self, t: &CoTensor) -> CoTensor {
        let m = self.algebroid.m();
        let k = t.arity();
        let basis: Vec<Vec<Field>> = (0..m).map(|a| self.on_basis(a)).collect();
        CoTensor::from_fn(m, k, |args| {
            let head = self.on_fn(t.get(args));
            let mut tail = Vec::new();
            let mut shifted = args.to_vec();
            for slot in 0..k {
                for c in 0..m {
                    let w = &basis[args[slot]][c];
                    if w.is_zero() {
                        continue;
                    }
                    shifted[slot] = c;
                    tail.push(w.mul(t.get(&shifted)));
                }
                shifted[slot] = args[slot];
            }
            head - Field::sum(tail)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{Spray, SprayKind};
    use crate::expr::parse;

    fn values(sp: Space, fs: &[Field], p: &[f64]) -> Vec<f64> {
        Plan::values_of(sp, fs).values(p).unwrap()
    }

    #[test]
    fn vertical_differential() {
        let sp = Space::new(0, 2);
        let f = |t: &str| Field::from_expr(&parse(t, 0, 2).unwrap(), sp);
        let w = nabla_v_fn(sp, &f("y1"));
        assert_eq!(w.get(&[0]).as_constant(), Some(1.0));
        assert!(w.get(&[1]).is_zero());
        let r = nabla_v_sec(sp, &PullbackSection::basis(2, 0), &PullbackSection::new(vec![f("y1*y2"), Field::zero()]));
        assert_eq!(values(sp, &r.comp, &[0.5, 1.5]), vec![1.5, 0.0]);
    }

    #[test]
    fn horizontal_differential_on_flat_plane() {
        let a = AlgebroidStructure::tangent(2);
        let sp = a.space();
        let bc = BerwaldConnection::new(&a, &Spray::new(vec![Field::zero(); 2], SprayKind::Spray));
        let r = nabla_h_sec(&bc, &PullbackSection::basis(2, 0), &PullbackSection::basis(2, 1));
        assert!(r.comp.iter().all(Field::is_zero));
        let w = nabla_h_fn(&bc, &Field::coord(sp.x(0)));
        assert_eq!(values(sp, w.components(), &[0.1, 0.2, 0.7, 0.8]), vec![1.0, 0.0]);
    }

    #[test]
    fn non_projectable_is_rejected() {
        let sp = Space::new(1, 1);
        let s = ProlongSection::new(vec![Field::coord(sp.y(0))], vec![Field::zero()]);
        assert!(matches!(
            ProjectableSection::new(sp, s.clone()),
            Err(DerivationError::NotProjectable { component: 0, .. })
        ));
        let pts = vec![vec![0.0, 1.0]];
        assert!(ProjectableSection::verified(sp, s, &pts, 1e-12).is_err());
        // y-dependence that cancels passes the numeric check.
        let y = Field::coord(sp.y(0));
        let z = &(&y + &Field::coord(sp.x(0))) - &y;
        let cancel = ProlongSection::new(vec![z], vec![Field::zero()]);
        assert!(ProjectableSection::verified(sp, cancel, &pts, 1e-12).is_ok());
    }
}
