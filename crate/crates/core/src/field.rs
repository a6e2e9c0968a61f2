//! Scalar fields on the total space `E`, in coordinates `(x, y)`.
//!
//! A [`Field`] is an immutable node in a shared DAG. Leaves are constants,
//! coordinates, or translated [`Expr`] trees; interior nodes are linear
//! combinations, products, quotients, integer powers, elementary functions,
//! and partial derivatives. Nothing is differentiated symbolically: a
//! derivative node asks its child for a jet one order higher and shifts it
//! (see [`crate::plan`]).
//!
//! Coordinates are numbered `0..n` for `x` and `n..n+m` for `y`. Each node
//! carries the bit set of coordinates it can depend on, so derivatives in
//! other directions fold to zero at construction time.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, Weak};

use crate::expr::{BinOp, Expr, Func, Var};

/// Dimensions of the chart: `n` base coordinates, `m` fiber coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Space {
    pub n: usize,
    pub m: usize,
}

impl Space {
    pub const MAX_VARS: usize = 64;

    pub fn new(n: usize, m: usize) -> Space {
        assert!(n + m <= Self::MAX_VARS, "at most {} coordinates", Self::MAX_VARS);
        Space { n, m }
    }

    pub fn nvars(&self) -> usize {
        self.n + self.m
    }

    /// Coordinate number of `x^{i+1}`.
    pub fn x(&self, i: usize) -> usize {
        debug_assert!(i < self.n);
        i
    }

    /// Coordinate number of `y^{a+1}`.
    pub fn y(&self, a: usize) -> usize {
        debug_assert!(a < self.m);
        self.n + a
    }

    pub fn base_mask(&self) -> u64 {
        mask_range(0, self.n)
    }

    pub fn fiber_mask(&self) -> u64 {
        mask_range(self.n, self.n + self.m)
    }

    pub fn var(&self, v: Var) -> usize {
        match v {
            Var::X(i) => self.x(i),
            Var::Y(a) => self.y(a),
        }
    }
}

fn mask_range(lo: usize, hi: usize) -> u64 {
    (lo..hi).fold(0u64, |acc, v| acc | (1u64 << v))
}

#[derive(Debug)]
pub(crate) enum Kind {
    Const(f64),
    Var(usize),
    /// `sum_k c_k f_k`
    Linear(Vec<(f64, Field)>),
    Product(Field, Field),
    Quotient(Field, Field),
    Powi(Field, i32),
    Func(Func, Field),
    Deriv(Field, usize),
}

pub(crate) struct Node {
    pub(crate) kind: Kind,
    pub(crate) deps: u64,
    // Weak, because a derivative node holds its parent strongly.
    derivs: Mutex<Vec<(usize, Weak<Node>)>>,
}

/// Immutable, cheaply clonable handle to a scalar field.
#[derive(Clone)]
pub struct Field(pub(crate) Arc<Node>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            Kind::Const(c) => write!(f, "Const({c})"),
            Kind::Var(v) => write!(f, "Var({v})"),
            other => write!(f, "Field({} deps={:#x})", kind_name(other), self.0.deps),
        }
    }
}

fn kind_name(kind: &Kind) -> &'static str {
    match kind {
        Kind::Const(_) => "const",
        Kind::Var(_) => "var",
        Kind::Linear(_) => "linear",
        Kind::Product(..) => "product",
        Kind::Quotient(..) => "quotient",
        Kind::Powi(..) => "powi",
        Kind::Func(..) => "func",
        Kind::Deriv(..) => "deriv",
    }
}

impl Field {
    fn make(kind: Kind, deps: u64) -> Field {
        Field(Arc::new(Node {
            kind,
            deps,
            derivs: Mutex::new(Vec::new()),
        }))
    }

    pub fn constant(c: f64) -> Field {
        Field::make(Kind::Const(c), 0)
    }

    pub fn zero() -> Field {
        Field::constant(0.0)
    }

    pub fn one() -> Field {
        Field::constant(1.0)
    }

    /// Coordinate function number `v` (see [`Space::x`], [`Space::y`]).
    pub fn coord(v: usize) -> Field {
        assert!(v < Space::MAX_VARS);
        Field::make(Kind::Var(v), 1u64 << v)
    }

    /// Translate a parsed expression.
    pub fn from_expr(e: &Expr, space: Space) -> Field {
        match e {
            Expr::Num(c) => Field::constant(*c),
            Expr::Var(v) => Field::coord(space.var(*v)),
            Expr::Neg(a) => -&Field::from_expr(a, space),
            Expr::Bin(op, a, b) => {
                let a = Field::from_expr(a, space);
                let b = Field::from_expr(b, space);
                match op {
                    BinOp::Add => &a + &b,
                    BinOp::Sub => &a - &b,
                    BinOp::Mul => &a * &b,
                    BinOp::Div => a.div(&b),
                }
            }
            Expr::Pow(a, k) => Field::from_expr(a, space).powi(*k),
            Expr::Call(f, a) => Field::from_expr(a, space).apply(*f),
        }
    }

    /// Bit set of coordinates this field may depend on.
    /// Parse `text` against the chart's dimensions.
    pub fn parse(text: &str, space: Space) -> Result<Field, crate::expr::ParseError> {
        Ok(Field::from_expr(&crate::expr::parse(text, space.n, space.m)?, space))
    }

    pub fn deps(&self) -> u64 {
        self.0.deps
    }

    pub fn depends_on(&self, v: usize) -> bool {
        self.0.deps & (1u64 << v) != 0
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.0.kind {
            Kind::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    pub fn ptr_eq(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub(crate) fn node_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub(crate) fn children(&self) -> Vec<&Field> {
        match self.kind() {
            Kind::Const(_) | Kind::Var(_) => vec![],
            Kind::Linear(terms) => terms.iter().map(|(_, g)| g).collect(),
            Kind::Product(a, b) | Kind::Quotient(a, b) => vec![a, b],
            Kind::Powi(a, _) | Kind::Func(_, a) | Kind::Deriv(a, _) => vec![a],
        }
    }

    /// `Some((f, v))` when this node is the partial `df/dv`.
    pub fn as_derivative(&self) -> Option<(&Field, usize)> {
        match self.kind() {
            Kind::Deriv(f, v) => Some((f, *v)),
            _ => None,
        }
    }

    /// Every distinct node reachable from `roots`, children before parents.
    pub fn reachable(roots: &[Field]) -> Vec<Field> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for root in roots {
            let mut stack = vec![(root.clone(), false)];
            while let Some((f, expanded)) = stack.pop() {
                if seen.contains(&f.node_id()) {
                    continue;
                }
                if expanded {
                    seen.insert(f.node_id());
                    out.push(f);
                    continue;
                }
                stack.push((f.clone(), true));
                for c in f.children() {
                    if !seen.contains(&c.node_id()) {
                        stack.push((c.clone(), false));
                    }
                }
            }
        }
        out
    }

    /// Linear combination `sum c_k f_k`, flattening nested combinations and
    /// folding constants.
    pub fn linear<I>(terms: I) -> Field
    where
        I: IntoIterator<Item = (f64, Field)>,
    {
        let mut constant = 0.0;
        let mut out: Vec<(f64, Field)> = Vec::new();
        let push = |c: f64, f: Field, out: &mut Vec<(f64, Field)>, constant: &mut f64| {
            if c == 0.0 {
                return;
            }
            match f.kind() {
                Kind::Const(k) => *constant += c * k,
                _ => out.push((c, f)),
            }
        };
        for (c, f) in terms {
            if let Kind::Linear(inner) = f.kind() {
                for (ci, fi) in inner {
                    push(c * ci, fi.clone(), &mut out, &mut constant);
                }
            } else {
                push(c, f, &mut out, &mut constant);
            }
        }
        if out.is_empty() {
            return Field::constant(constant);
        }
        if constant != 0.0 {
            out.push((constant, Field::one()));
        }
        match out.len() {
            0 => Field::zero(),
            1 if out[0].0 == 1.0 => out.pop().unwrap().1,
            _ => {
                let deps = out.iter().fold(0, |d, (_, f)| d | f.deps());
                Field::make(Kind::Linear(out), deps)
            }
        }
    }

    pub fn sum<I: IntoIterator<Item = Field>>(terms: I) -> Field {
        Field::linear(terms.into_iter().map(|f| (1.0, f)))
    }

    pub fn scale(&self, c: f64) -> Field {
        Field::linear([(c, self.clone())])
    }

    pub fn mul(&self, other: &Field) -> Field {
        match (self.as_constant(), other.as_constant()) {
            (Some(a), Some(b)) => return Field::constant(a * b),
            (Some(a), None) => return other.scale(a),
            (None, Some(b)) => return self.scale(b),
            _ => {}
        }
        Field::make(
            Kind::Product(self.clone(), other.clone()),
            self.deps() | other.deps(),
        )
    }

    pub fn div(&self, other: &Field) -> Field {
        if self.is_zero() {
            return Field::zero();
        }
        if let Some(b) = other.as_constant() {
            if b != 0.0 {
                return self.scale(1.0 / b);
            }
        }
        Field::make(
            Kind::Quotient(self.clone(), other.clone()),
            self.deps() | other.deps(),
        )
    }

    pub fn powi(&self, k: i32) -> Field {
        if k == 0 {
            return Field::one();
        }
        if k == 1 {
            return self.clone();
        }
        if let Some(c) = self.as_constant() {
            if c != 0.0 || k > 0 {
                return Field::constant(c.powi(k));
            }
        }
        Field::make(Kind::Powi(self.clone(), k), self.deps())
    }

    pub fn apply(&self, f: Func) -> Field {
        Field::make(Kind::Func(f, self.clone()), self.deps())
    }

    /// Partial derivative along coordinate `v`. Memoized per node, so
    /// repeated requests share one derivative node.
    pub fn d(&self, v: usize) -> Field {
        if !self.depends_on(v) {
            return Field::zero();
        }
        if let Kind::Var(w) = self.kind() {
            return if *w == v { Field::one() } else { Field::zero() };
        }
        let mut cache = self.0.derivs.lock().expect("derivative cache poisoned");
        if let Some(node) = cache.iter().find(|(w, _)| *w == v).and_then(|(_, f)| f.upgrade()) {
            return Field(node);
        }
        let f = Field::make(Kind::Deriv(self.clone(), v), self.deps());
        cache.retain(|(w, _)| *w != v);
        cache.push((v, Arc::downgrade(&f.0)));
        f
    }

    /// `sum_k a_k b_k`, skipping structurally zero products.
    pub fn dot<'a, I>(pairs: I) -> Field
    where
        I: IntoIterator<Item = (&'a Field, &'a Field)>,
    {
        Field::sum(
            pairs
                .into_iter()
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .map(|(a, b)| a.mul(b)),
        )
    }
}

impl From<f64> for Field {
    fn from(c: f64) -> Field {
        Field::constant(c)
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        Field::linear([(1.0, self.clone()), (1.0, rhs.clone())])
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        Field::linear([(1.0, self.clone()), (-1.0, rhs.clone())])
    }
}

impl Mul for &Field {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        Field::mul(self, rhs)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}

impl Add for Field {
    type Output = Field;
    fn add(self, rhs: Field) -> Field {
        &self + &rhs
    }
}

impl Sub for Field {
    type Output = Field;
    fn sub(self, rhs: Field) -> Field {
        &self - &rhs
    }
}

impl Mul for Field {
    type Output = Field;
    fn mul(self, rhs: Field) -> Field {
        &self * &rhs
    }
}

impl Neg for Field {
    type Output = Field;
    fn neg(self) -> Field {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_folding() {
        let x = Field::coord(0);
        assert!((&x * &Field::zero()).is_zero());
        assert!((&x - &x).deps() != 0); // no symbolic cancellation
        assert_eq!((Field::constant(2.0) * Field::constant(3.0)).as_constant(), Some(6.0));
        assert!(x.ptr_eq(&(&x * &Field::one())));
        assert!(x.ptr_eq(&Field::linear([(1.0, x.clone())])));
    }

    #[test]
    fn derivative_folding() {
        let s = Space::new(1, 2);
        let x = Field::coord(s.x(0));
        let y = Field::coord(s.y(1));
        let f = &x * &y;
        assert!(f.d(s.y(0)).is_zero());
        assert!(!f.d(s.y(1)).is_zero());
        assert!(f.d(s.y(1)).ptr_eq(&f.d(s.y(1))));
        assert_eq!(x.d(0).as_constant(), Some(1.0));
    }

    #[test]
    fn dependency_masks() {
        let s = Space::new(2, 2);
        let e = crate::expr::parse("sin(x2) * y1 + 3", 2, 2).unwrap();
        let f = Field::from_expr(&e, s);
        assert_eq!(f.deps(), (1 << s.x(1)) | (1 << s.y(0)));
        assert_eq!(s.base_mask(), 0b0011);
        assert_eq!(s.fiber_mask(), 0b1100);
    }
}
