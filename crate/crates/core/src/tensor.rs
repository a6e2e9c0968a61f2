//! Tensor fields on the pullback bundle, stored by components against the
//! hat-lifted basis `ê_a`.

use crate::algebroid::PullbackSection;
use crate::field::{Field, Space};

fn strides(m: usize, k: usize) -> usize {
    m.pow(k as u32)
}

/// All argument tuples of length `k` over `0..m`, in row-major order.
pub fn index_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    let count = strides(m, k);
    (0..count)
        .map(|mut flat| {
            let mut t = vec![0; k];
            for slot in (0..k).rev() {
                t[slot] = flat % m;
                flat /= m;
            }
            t
        })
        .collect()
}

fn flat_index(m: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * m + a)
}

/// A `(1, k)` tensor: `comp[o][a_1..a_k]` is the `o`-th component of
/// `T(ê_{a_1}, .., ê_{a_k})`.
#[derive(Debug, Clone)]
pub struct Tensor {
    m: usize,
    k: usize,
    comp: Vec<Field>,
}

impl Tensor {
    pub fn from_fn(m: usize, k: usize, mut f: impl FnMut(usize, &[usize]) -> Field) -> Tensor {
        let tuples = index_tuples(m, k);
        let mut comp = Vec::with_capacity(m * tuples.len());
        for o in 0..m {
            for t in &tuples {
                comp.push(f(o, t));
            }
        }
        Tensor { m, k, comp }
    }

    pub fn zero(m: usize, k: usize) -> Tensor {
        Tensor::from_fn(m, k, |_, _| Field::zero())
    }

    /// The identity endomorphism.
    pub fn identity(m: usize) -> Tensor {
        Tensor::from_fn(m, 1, |o, a| Field::constant(if o == a[0] { 1.0 } else { 0.0 }))
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn get(&self, o: usize, args: &[usize]) -> &Field {
        debug_assert_eq!(args.len(), self.k);
        &self.comp[o * strides(self.m, self.k) + flat_index(self.m, args)]
    }

    /// `T(ê_{a_1}, ..)` as a pullback section.
    pub fn on_basis(&self, args: &[usize]) -> PullbackSection {
        PullbackSection::new((0..self.m).map(|o| self.get(o, args).clone()).collect())
    }

    pub fn components(&self) -> &[Field] {
        &self.comp
    }

    /// Evaluate on arbitrary pullback sections by multilinear contraction.
    pub fn eval(&self, args: &[PullbackSection]) -> PullbackSection {
        assert_eq!(args.len(), self.k, "argument count");
        let tuples = index_tuples(self.m, self.k);
        let weights: Vec<Field> = tuples
            .iter()
            .map(|t| t.iter().enumerate().fold(Field::one(), |w, (slot, &a)| w.mul(&args[slot].comp[a])))
            .collect();
        PullbackSection::new(
            (0..self.m)
                .map(|o| Field::dot(tuples.iter().zip(&weights).map(|(t, w)| (self.get(o, t), w))))
                .collect(),
        )
    }

    pub fn map(&self, f: impl Fn(&Field) -> Field) -> Tensor {
        Tensor {
            m: self.m,
            k: self.k,
            comp: self.comp.iter().map(f).collect(),
        }
    }

    pub fn zip(&self, other: &Tensor, f: impl Fn(&Field, &Field) -> Field) -> Tensor {
        assert_eq!((self.m, self.k), (other.m, other.k), "tensor shape mismatch");
        Tensor {
            m: self.m,
            k: self.k,
            comp: self.comp.iter().zip(&other.comp).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Tensor {
        self.map(|a| a.scale(c))
    }

    pub fn times(&self, f: &Field) -> Tensor {
        self.map(|a| a.mul(f))
    }

    /// Vertical differential, derivative direction in the first slot:
    /// `(∇^v T)(ê_d, ê_{a..}) = d T^o_{a..} / d y^d`.
    pub fn nabla_v(&self, space: Space) -> Tensor {
        Tensor::from_fn(self.m, self.k + 1, |o, t| self.get(o, &t[1..]).d(space.y(t[0])))
    }

    /// Contraction of the output index with the first argument slot.
    pub fn trace(&self) -> Option<CoTensor> {
        (self.k >= 1).then(|| {
            CoTensor::from_fn(self.m, self.k - 1, |rest| {
                let mut args = Vec::with_capacity(self.k);
                Field::sum((0..self.m).map(|a| {
                    args.clear();
                    args.push(a);
                    args.extend_from_slice(rest);
                    self.get(a, &args).clone()
                }))
            })
        })
    }

    /// Euler operator `y^a d/dy^a` minus `degree`, componentwise; vanishes
    /// for components homogeneous of that degree.
    pub fn homogeneity_defect(&self, space: Space, degree: f64) -> Vec<Field> {
        self.comp.iter().map(|c| euler(space, c) - c.scale(degree)).collect()
    }
}

/// `y^a dF/dy^a`.
pub fn euler(space: Space, f: &Field) -> Field {
    Field::sum((0..space.m).map(|a| Field::coord(space.y(a)).mul(&f.d(space.y(a)))))
}

/// A `(0, k)` tensor.
#[derive(Debug, Clone)]
pub struct CoTensor {
    m: usize,
    k: usize,
    comp: Vec<Field>,
}

impl CoTensor {
    pub fn from_fn(m: usize, k: usize, mut f: impl FnMut(&[usize]) -> Field) -> CoTensor {
        CoTensor {
            m,
            k,
            comp: index_tuples(m, k).iter().map(|t| f(t)).collect(),
        }
    }

    pub fn scalar(m: usize, f: Field) -> CoTensor {
        CoTensor { m, k: 0, comp: vec![f] }
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn get(&self, args: &[usize]) -> &Field {
        &self.comp[flat_index(self.m, args)]
    }

    pub fn components(&self) -> &[Field] {
        &self.comp
    }

    pub fn eval(&self, args: &[PullbackSection]) -> Field {
        assert_eq!(args.len(), self.k, "argument count");
        let tuples = index_tuples(self.m, self.k);
        Field::sum(tuples.iter().map(|t| {
            t.iter()
                .enumerate()
                .fold(self.get(t).clone(), |w, (slot, &a)| w.mul(&args[slot].comp[a]))
        }))
    }

    pub fn nabla_v(&self, space: Space) -> CoTensor {
        CoTensor::from_fn(self.m, self.k + 1, |t| self.get(&t[1..]).d(space.y(t[0])))
    }

    pub fn sub(&self, other: &CoTensor) -> CoTensor {
        assert_eq!((self.m, self.k), (other.m, other.k), "tensor shape mismatch");
        CoTensor {
            m: self.m,
            k: self.k,
            comp: self.comp.iter().zip(&other.comp).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> CoTensor {
        CoTensor {
            m: self.m,
            k: self.k,
            comp: self.comp.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// `ω ⊗ δ`: the `(1, k)` tensor `X ↦ ω(X) δ` with `δ` the canonical
    /// section `y^o ê_o`.
    pub fn tensor_delta(&self, space: Space) -> Tensor {
        Tensor::from_fn(self.m, self.k, |o, t| self.get(t).mul(&Field::coord(space.y(o))))
    }
}
