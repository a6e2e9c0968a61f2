//! Local data of a Lie algebroid: anchor, structure functions, sections,
//! the bracket on sections, and lifts of functions and sections to `E`.

use thiserror::Error;

use crate::field::{Field, Space};
use crate::residual::{self, Residual, ResidualStats};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("{what} has {got} entries, expected {expected}")]
    Shape {
        what: String,
        got: usize,
        expected: usize,
    },
    #[error("{0} must depend on the base coordinates only")]
    FiberDependence(String),
    #[error("projective tensors undefined at rank 1")]
    RankOne,
    #[error("projective tensors undefined for base dimension {0}")]
    BaseDimension(usize),
}

/// Anchor components `rho[i][a]` and structure functions `L[g][a][b]` over a
/// chart with `n` base and `m` fiber coordinates.
#[derive(Debug, Clone)]
pub struct AlgebroidStructure {
    space: Space,
    rho: Vec<Vec<Field>>,
    l: Vec<Vec<Vec<Field>>>,
}

fn base_only(f: &Field, space: Space, what: impl FnOnce() -> String) -> Result<(), StructureError> {
    if f.deps() & space.fiber_mask() != 0 {
        return Err(StructureError::FiberDependence(what()));
    }
    Ok(())
}

fn check_len<T>(v: &[T], expected: usize, what: impl FnOnce() -> String) -> Result<(), StructureError> {
    if v.len() != expected {
        return Err(StructureError::Shape {
            what: what(),
            got: v.len(),
            expected,
        });
    }
    Ok(())
}

impl AlgebroidStructure {
    /// Build from `rho[i][a]` (an `n x m` array) and `l[g][a][b]`. Only the
    /// entries with `a < b` are read; the rest is filled in by antisymmetry.
    pub fn new(
        space: Space,
        rho: Vec<Vec<Field>>,
        l: Vec<Vec<Vec<Field>>>,
    ) -> Result<AlgebroidStructure, StructureError> {
        let (n, m) = (space.n, space.m);
        check_len(&rho, n, || "rho".into())?;
        for (i, row) in rho.iter().enumerate() {
            check_len(row, m, || format!("rho[{}]", i + 1))?;
            for (a, f) in row.iter().enumerate() {
                base_only(f, space, || format!("rho[{}][{}]", i + 1, a + 1))?;
            }
        }
        check_len(&l, m, || "L".into())?;
        let mut full = vec![vec![vec![Field::zero(); m]; m]; m];
        for (g, plane) in l.iter().enumerate() {
            check_len(plane, m, || format!("L[{}]", g + 1))?;
            for (a, row) in plane.iter().enumerate() {
                check_len(row, m, || format!("L[{}][{}]", g + 1, a + 1))?;
                for b in a + 1..m {
                    let f = &row[b];
                    base_only(f, space, || format!("L[{}][{},{}]", g + 1, a + 1, b + 1))?;
                    full[g][a][b] = f.clone();
                    full[g][b][a] = -f;
                }
            }
        }
        Ok(AlgebroidStructure { space, rho, l: full })
    }

    /// Structure with sparse structure functions `(g, a, b, L^g_{ab})`,
    /// `a < b`, all other entries zero.
    pub fn from_sparse(
        space: Space,
        rho: Vec<Vec<Field>>,
        entries: &[(usize, usize, usize, Field)],
    ) -> Result<AlgebroidStructure, StructureError> {
        let m = space.m;
        let mut l = vec![vec![vec![Field::zero(); m]; m]; m];
        for (g, a, b, f) in entries {
            assert!(a < b && *b < m && *g < m, "structure function index out of range");
            l[*g][*a][*b] = f.clone();
        }
        AlgebroidStructure::new(space, rho, l)
    }

    /// The tangent algebroid of `R^n`: identity anchor, vanishing bracket.
    pub fn tangent(n: usize) -> AlgebroidStructure {
        let space = Space::new(n, n);
        let rho = (0..n)
            .map(|i| (0..n).map(|a| Field::constant(if i == a { 1.0 } else { 0.0 })).collect())
            .collect();
        AlgebroidStructure::from_sparse(space, rho, &[]).expect("tangent algebroid")
    }

    /// A Lie algebra over a point with structure constants `c(g, a, b)`.
    pub fn lie_algebra(m: usize, c: impl Fn(usize, usize, usize) -> f64) -> AlgebroidStructure {
        let space = Space::new(0, m);
        let l = (0..m)
            .map(|g| (0..m).map(|a| (0..m).map(|b| Field::constant(c(g, a, b))).collect()).collect())
            .collect();
        AlgebroidStructure::new(space, Vec::new(), l).expect("Lie algebra")
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn m(&self) -> usize {
        self.space.m
    }

    pub fn rho(&self, i: usize, a: usize) -> &Field {
        &self.rho[i][a]
    }

    pub fn l(&self, g: usize, a: usize, b: usize) -> &Field {
        &self.l[g][a][b]
    }

    /// `rho^i_a d F / d x^i` for any field `F` on `E`.
    pub fn anchor_derivative(&self, a: usize, f: &Field) -> Field {
        let sp = self.space;
        Field::sum((0..sp.n).filter(|&i| !self.rho[i][a].is_zero()).map(|i| self.rho[i][a].mul(&f.d(sp.x(i)))))
    }

    /// Residuals of the two structure equations: compatibility of the anchor
    /// with the bracket, and the cyclic identity for `L`.
    pub fn structure_residuals(&self) -> (Residual, Residual) {
        let (n, m) = (self.n(), self.m());
        let mut first = Vec::new();
        for i in 0..n {
            for a in 0..m {
                for b in a + 1..m {
                    let lhs = self.anchor_derivative(a, &self.rho[i][b]) - self.anchor_derivative(b, &self.rho[i][a]);
                    let rhs = Field::dot((0..m).map(|g| (&self.rho[i][g], &self.l[g][a][b])));
                    first.push(lhs - rhs);
                }
            }
        }
        let mut second = Vec::new();
        for nu in 0..m {
            for a in 0..m {
                for b in a + 1..m {
                    for c in b + 1..m {
                        let cyclic = [(a, b, c), (b, c, a), (c, a, b)];
                        let terms = cyclic.iter().map(|&(p, q, r)| {
                            let anchor = self.anchor_derivative(p, &self.l[nu][q][r]);
                            let quad = Field::dot((0..m).map(|mu| (&self.l[nu][p][mu], &self.l[mu][q][r])));
                            anchor + quad
                        });
                        second.push(Field::sum(terms));
                    }
                }
            }
        }
        (
            Residual::new("structure equation (anchor)", first),
            Residual::new("structure equation (cyclic)", second),
        )
    }

    pub fn check_structure_equations(&self, points: &[Vec<f64>], tol: f64) -> StructureReport {
        let (a, b) = self.structure_residuals();
        let mut stats = residual::evaluate(self.space, &[a, b], points).into_iter();
        let anchor = stats.next().expect("two stats");
        let cyclic = stats.next().expect("two stats");
        let pass = anchor.within(tol) && cyclic.within(tol);
        StructureReport { anchor, cyclic, pass }
    }

    /// `rho(xi) f = xi^a rho^i_a df/dx^i`.
    pub fn anchor_apply(&self, xi: &BaseSection, f: &Field) -> Field {
        Field::sum((0..self.m()).filter(|&a| !xi.comp[a].is_zero()).map(|a| xi.comp[a].mul(&self.anchor_derivative(a, f))))
    }

    /// `[xi, eta]_E` from the basis table and the Leibniz rule.
    pub fn bracket_e(&self, xi: &BaseSection, eta: &BaseSection) -> BaseSection {
        let m = self.m();
        let comp = (0..m)
            .map(|g| {
                let quad = Field::sum((0..m).flat_map(|a| {
                    (0..m)
                        .filter(move |&b| !self.l[g][a][b].is_zero())
                        .map(move |b| xi.comp[a].mul(&eta.comp[b]).mul(&self.l[g][a][b]))
                }));
                self.anchor_apply(xi, &eta.comp[g]) - self.anchor_apply(eta, &xi.comp[g]) + quad
            })
            .collect();
        BaseSection { comp }
    }

    /// Complete lift of a base function: `f^c = y^a rho^i_a df/dx^i`.
    pub fn complete_lift_fn(&self, f: &Field) -> Field {
        let sp = self.space;
        Field::sum((0..self.m()).map(|a| Field::coord(sp.y(a)).mul(&self.anchor_derivative(a, f))))
    }

    /// Vertical lift of a section as a vector field on `E`.
    pub fn vertical_lift_vf(&self, xi: &BaseSection) -> VectorField {
        VectorField {
            x: vec![Field::zero(); self.n()],
            y: xi.comp.clone(),
        }
    }

    /// `eta^a_{|b} = rho^j_b d eta^a / dx^j - eta^g L^a_{gb}`.
    pub fn covariant_components(&self, eta: &BaseSection) -> Vec<Vec<Field>> {
        let m = self.m();
        (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| {
                        let l = Field::dot((0..m).map(|g| (&eta.comp[g], &self.l[a][g][b])));
                        self.anchor_derivative(b, &eta.comp[a]) - l
                    })
                    .collect()
            })
            .collect()
    }

    /// Complete lift of a section as a vector field on `E`. The fiber part
    /// uses the section's own components in the linear term.
    pub fn complete_lift_vf(&self, xi: &BaseSection) -> VectorField {
        let (n, m) = (self.n(), self.m());
        let sp = self.space;
        let x = (0..n)
            .map(|i| Field::dot((0..m).map(|a| (&xi.comp[a], &self.rho[i][a]))))
            .collect();
        let cov = self.covariant_components(xi);
        let ys: Vec<Field> = (0..m).map(|b| Field::coord(sp.y(b))).collect();
        let y = (0..m)
            .map(|a| Field::dot((0..m).map(|b| (&ys[b], &cov[a][b]))))
            .collect();
        VectorField { x, y }
    }

    pub fn hat_lift(&self, xi: &BaseSection) -> PullbackSection {
        PullbackSection { comp: xi.comp.clone() }
    }

    pub fn section(&self, comp: Vec<Field>) -> Result<BaseSection, StructureError> {
        BaseSection::new(self.space, comp)
    }

    /// The basis section `e_a`.
    pub fn basis(&self, a: usize) -> BaseSection {
        BaseSection::basis(self.m(), a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub anchor: ResidualStats,
    pub cyclic: ResidualStats,
    pub pass: bool,
}

/// A section of `E`, components depending on `x` only.
#[derive(Debug, Clone)]
pub struct BaseSection {
    pub comp: Vec<Field>,
}

impl BaseSection {
    pub fn new(space: Space, comp: Vec<Field>) -> Result<BaseSection, StructureError> {
        check_len(&comp, space.m, || "section".into())?;
        for (a, f) in comp.iter().enumerate() {
            base_only(f, space, || format!("section component {}", a + 1))?;
        }
        Ok(BaseSection { comp })
    }

    pub fn basis(m: usize, a: usize) -> BaseSection {
        BaseSection {
            comp: (0..m).map(|b| Field::constant(if a == b { 1.0 } else { 0.0 })).collect(),
        }
    }

    pub fn zero(m: usize) -> BaseSection {
        BaseSection {
            comp: vec![Field::zero(); m],
        }
    }

    pub fn scaled(&self, f: &Field) -> BaseSection {
        BaseSection {
            comp: self.comp.iter().map(|c| c.mul(f)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comp.iter().all(Field::is_zero)
    }
}

/// A section of the pullback bundle, components depending on `(x, y)`.
#[derive(Debug, Clone)]
pub struct PullbackSection {
    pub comp: Vec<Field>,
}

impl PullbackSection {
    pub fn new(comp: Vec<Field>) -> PullbackSection {
        PullbackSection { comp }
    }

    pub fn basis(m: usize, a: usize) -> PullbackSection {
        PullbackSection {
            comp: BaseSection::basis(m, a).comp,
        }
    }

    pub fn zero(m: usize) -> PullbackSection {
        PullbackSection {
            comp: vec![Field::zero(); m],
        }
    }

    /// The canonical section with components `y^a`.
    pub fn canonical(space: Space) -> PullbackSection {
        PullbackSection {
            comp: (0..space.m).map(|a| Field::coord(space.y(a))).collect(),
        }
    }

    pub fn scaled(&self, f: &Field) -> PullbackSection {
        PullbackSection {
            comp: self.comp.iter().map(|c| c.mul(f)).collect(),
        }
    }

    pub fn sub(&self, other: &PullbackSection) -> PullbackSection {
        PullbackSection {
            comp: self.comp.iter().zip(&other.comp).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &PullbackSection) -> PullbackSection {
        PullbackSection {
            comp: self.comp.iter().zip(&other.comp).map(|(a, b)| a + b).collect(),
        }
    }
}

/// A vector field on `E` with components along `d/dx^i` and `d/dy^a`.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub x: Vec<Field>,
    pub y: Vec<Field>,
}

impl VectorField {
    pub fn apply(&self, space: Space, f: &Field) -> Field {
        let xs = self.x.iter().enumerate().map(|(i, c)| (c, space.x(i)));
        let ys = self.y.iter().enumerate().map(|(a, c)| (c, space.y(a)));
        Field::sum(xs.chain(ys).filter(|(c, _)| !c.is_zero()).map(|(c, v)| c.mul(&f.d(v))))
    }

    /// Componentwise commutator `[X, Y]`.
    pub fn commutator(&self, other: &VectorField, space: Space) -> VectorField {
        let comp = |a: &Field, b: &Field| self.apply(space, b) - other.apply(space, a);
        VectorField {
            x: self.x.iter().zip(&other.x).map(|(a, b)| comp(a, b)).collect(),
            y: self.y.iter().zip(&other.y).map(|(a, b)| comp(a, b)).collect(),
        }
    }

    pub fn components(&self) -> Vec<Field> {
        self.x.iter().chain(&self.y).cloned().collect()
    }
}
