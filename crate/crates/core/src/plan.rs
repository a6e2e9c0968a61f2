//! Compiled evaluation of a batch of fields.
//!
//! [`Plan::compile`] flattens the DAG under a set of root fields into a
//! topological instruction list and works out, for every node, the jet order
//! it must be evaluated at: a derivative node at order `k` needs its child at
//! order `k + 1`. Evaluation at a point then visits each node exactly once.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{EvalError, Func};
use crate::field::{Field, Kind, Space};
use crate::jet::{self, Jet, Layout};

/// Highest order accepted by [`eval_jet`].
pub const MAX_JET_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet order {0} exceeds the supported maximum {MAX_JET_ORDER}")]
    OrderTooHigh(usize),
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone)]
enum Op {
    Const(f64),
    Var(usize),
    Linear(Vec<(f64, usize)>),
    Product(usize, usize),
    Quotient(usize, usize),
    Powi(usize, i32),
    Func(Func, usize),
    Deriv(usize, usize),
}

#[derive(Debug)]
pub struct Plan {
    space: Space,
    layout: Arc<Layout>,
    ops: Vec<Op>,
    orders: Vec<usize>,
    roots: Vec<(usize, usize)>,
    // Keeps every compiled node alive so node addresses stay unique.
    _hold: Vec<Field>,
}

impl Plan {
    /// Compile `roots`, each to be evaluated at the paired jet order.
    pub fn compile(space: Space, roots: &[(Field, usize)]) -> Plan {
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut fields: Vec<Field> = Vec::new();
        let mut ops: Vec<Op> = Vec::new();

        // Iterative post-order DFS.
        for (root, _) in roots {
            if index.contains_key(&root.node_id()) {
                continue;
            }
            let mut stack: Vec<(Field, bool)> = vec![(root.clone(), false)];
            while let Some((f, expanded)) = stack.pop() {
                let id = f.node_id();
                if index.contains_key(&id) {
                    continue;
                }
                if !expanded {
                    stack.push((f.clone(), true));
                    for c in f.children() {
                        if !index.contains_key(&c.node_id()) {
                            stack.push((c.clone(), false));
                        }
                    }
                    continue;
                }
                let at = |c: &Field| index[&c.node_id()];
                let op = match f.kind() {
                    Kind::Const(c) => Op::Const(*c),
                    Kind::Var(v) => Op::Var(*v),
                    Kind::Linear(terms) => Op::Linear(terms.iter().map(|(c, g)| (*c, at(g))).collect()),
                    Kind::Product(a, b) => Op::Product(at(a), at(b)),
                    Kind::Quotient(a, b) => Op::Quotient(at(a), at(b)),
                    Kind::Powi(a, k) => Op::Powi(at(a), *k),
                    Kind::Func(func, a) => Op::Func(*func, at(a)),
                    Kind::Deriv(a, v) => Op::Deriv(at(a), *v),
                };
                index.insert(id, ops.len());
                ops.push(op);
                fields.push(f);
            }
        }

        let mut orders = vec![0usize; ops.len()];
        let roots: Vec<(usize, usize)> = roots
            .iter()
            .map(|(f, k)| {
                let i = index[&f.node_id()];
                orders[i] = orders[i].max(*k);
                (i, *k)
            })
            .collect();
        for i in (0..ops.len()).rev() {
            let k = orders[i];
            let mut lift = |c: usize, need: usize| orders[c] = orders[c].max(need);
            match &ops[i] {
                Op::Const(_) | Op::Var(_) => {}
                Op::Linear(terms) => terms.iter().for_each(|(_, c)| lift(*c, k)),
                Op::Product(a, b) | Op::Quotient(a, b) => {
                    lift(*a, k);
                    lift(*b, k);
                }
                Op::Powi(a, _) | Op::Func(_, a) => lift(*a, k),
                Op::Deriv(a, _) => lift(*a, k + 1),
            }
        }
        let max_order = orders.iter().copied().max().unwrap_or(0);

        Plan {
            space,
            layout: jet::layout(space.nvars(), max_order),
            ops,
            orders,
            roots,
            _hold: fields,
        }
    }

    /// Compile roots for plain value evaluation.
    pub fn values_of(space: Space, roots: &[Field]) -> Plan {
        let pairs: Vec<(Field, usize)> = roots.iter().map(|f| (f.clone(), 0)).collect();
        Plan::compile(space, &pairs)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Highest internal jet order any node is evaluated at.
    pub fn max_order(&self) -> usize {
        self.layout.max_order()
    }

    fn run(&self, point: &[f64]) -> Result<Vec<Vec<f64>>, EvalError> {
        assert_eq!(point.len(), self.space.nvars(), "point dimension");
        let l = &*self.layout;
        let mut vals: Vec<Vec<f64>> = Vec::with_capacity(self.ops.len());
        for (op, &k) in self.ops.iter().zip(&self.orders) {
            let len = l.len(k);
            let out = match op {
                Op::Const(c) => {
                    let mut v = vec![0.0; len];
                    v[0] = *c;
                    v
                }
                Op::Var(var) => {
                    let mut v = vec![0.0; len];
                    v[0] = point[*var];
                    if k >= 1 {
                        v[1 + var] = 1.0;
                    }
                    v
                }
                Op::Linear(terms) => {
                    let mut v = vec![0.0; len];
                    for (c, i) in terms {
                        for (o, x) in v.iter_mut().zip(&vals[*i]) {
                            *o += c * x;
                        }
                    }
                    v
                }
                Op::Product(a, b) => jet::mul(l, k, &vals[*a], &vals[*b]),
                Op::Quotient(a, b) => {
                    let inv = reciprocal(l, k, &vals[*b])?;
                    jet::mul(l, k, &vals[*a], &inv)
                }
                Op::Powi(a, e) => {
                    if *e >= 0 {
                        jet::powi(l, k, &vals[*a], *e as u32)
                    } else {
                        let inv = reciprocal(l, k, &vals[*a])?;
                        jet::powi(l, k, &inv, e.unsigned_abs())
                    }
                }
                Op::Func(f, a) => apply(l, k, *f, &vals[*a])?,
                Op::Deriv(a, v) => jet::derivative(l, k, *v, &vals[*a]),
            };
            if out.iter().any(|c| !c.is_finite()) {
                return Err(EvalError::NonFinite);
            }
            vals.push(out);
        }
        Ok(vals)
    }

    /// Root values at `point` (`x` then `y`).
    pub fn values(&self, point: &[f64]) -> Result<Vec<f64>, EvalError> {
        let vals = self.run(point)?;
        Ok(self.roots.iter().map(|(i, _)| vals[*i][0]).collect())
    }

    /// Root jets at `point`, each at its requested order.
    pub fn jets(&self, point: &[f64]) -> Result<Vec<Jet>, EvalError> {
        let vals = self.run(point)?;
        Ok(self
            .roots
            .iter()
            .map(|(i, k)| Jet::new(self.layout.clone(), *k, point.to_vec(), vals[*i].clone()))
            .collect())
    }
}

fn reciprocal(l: &Layout, k: usize, u: &[f64]) -> Result<Vec<f64>, EvalError> {
    let u0 = u[0];
    if u0 == 0.0 {
        return Err(EvalError::DivisionByZero);
    }
    // (-1)^j / u0^(j+1)
    let mut t = Vec::with_capacity(k + 1);
    let mut c = 1.0 / u0;
    for _ in 0..=k {
        t.push(c);
        c *= -1.0 / u0;
    }
    Ok(jet::compose(l, k, u, &t))
}

fn apply(l: &Layout, k: usize, f: Func, u: &[f64]) -> Result<Vec<f64>, EvalError> {
    let u0 = u[0];
    let inv_fact = |j: usize| 1.0 / (1..=j).map(|i| i as f64).product::<f64>();
    let taylor: Vec<f64> = match f {
        Func::Sin | Func::Cos => {
            let (s, c) = u0.sin_cos();
            let cycle = if f == Func::Sin { [s, c, -s, -c] } else { [c, -s, -c, s] };
            (0..=k).map(|j| cycle[j % 4] * inv_fact(j)).collect()
        }
        Func::Exp => {
            let e = u0.exp();
            (0..=k).map(|j| e * inv_fact(j)).collect()
        }
        Func::Sinh | Func::Cosh => {
            let (sh, ch) = (u0.sinh(), u0.cosh());
            let pair = if f == Func::Sinh { [sh, ch] } else { [ch, sh] };
            (0..=k).map(|j| pair[j % 2] * inv_fact(j)).collect()
        }
        Func::Log => {
            if u0 <= 0.0 {
                return Err(EvalError::Domain { func: "log", arg: u0 });
            }
            let mut t = vec![u0.ln()];
            let mut p = 1.0;
            for j in 1..=k {
                p /= u0;
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                t.push(sign * p / j as f64);
            }
            t
        }
        Func::Sqrt => {
            if u0 < 0.0 || (u0 == 0.0 && k > 0) {
                return Err(EvalError::Domain { func: "sqrt", arg: u0 });
            }
            // binom(1/2, j) u0^(1/2 - j)
            let mut t = Vec::with_capacity(k + 1);
            let mut binom = 1.0;
            let mut p = u0.sqrt();
            for j in 0..=k {
                t.push(binom * p);
                binom *= (0.5 - j as f64) / (j as f64 + 1.0);
                p /= u0;
            }
            t
        }
        Func::Tan => {
            let c = u0.cos();
            if c == 0.0 {
                return Err(EvalError::Domain { func: "tan", arg: u0 });
            }
            let sin = apply(l, k, Func::Sin, u)?;
            let cos = apply(l, k, Func::Cos, u)?;
            let inv = reciprocal(l, k, &cos)?;
            return Ok(jet::mul(l, k, &sin, &inv));
        }
    };
    Ok(jet::compose(l, k, u, &taylor))
}

/// Value and all mixed partials of `f` up to `order` at `(x, y)`.
pub fn eval_jet(f: &Field, space: Space, x: &[f64], y: &[f64], order: usize) -> Result<Jet, JetError> {
    if order > MAX_JET_ORDER {
        return Err(JetError::OrderTooHigh(order));
    }
    if x.len() != space.n || y.len() != space.m {
        return Err(JetError::DimensionMismatch {
            got: x.len() + y.len(),
            expected: space.nvars(),
        });
    }
    let point: Vec<f64> = x.iter().chain(y).copied().collect();
    let plan = Plan::compile(space, &[(f.clone(), order)]);
    Ok(plan.jets(&point)?.pop().expect("one root"))
}
