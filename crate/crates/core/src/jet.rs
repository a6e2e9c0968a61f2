//! Truncated multivariate Taylor arithmetic.
//!
//! A jet of order `k` in `d` variables is stored as the dense vector of
//! Taylor coefficients `c_a = (d^a f)(p) / a!` for every multi-index `a`
//! with `|a| <= k`. Multi-indices are laid out in graded order (total degree
//! first, lexicographic inside a degree), so the jet of order `r < k` is a
//! prefix of the jet of order `k`. Every kernel in this module relies on that.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Multi-index over the `n + m` coordinates `(x, y)`.
pub type MultiIndex = Vec<u8>;

/// Index tables for all multi-indices of `nvars` variables up to `max_order`.
#[derive(Debug)]
pub struct Layout {
    nvars: usize,
    max_order: usize,
    indices: Vec<MultiIndex>,
    /// `offsets[r]` = number of multi-indices of total degree `< r`.
    offsets: Vec<usize>,
    lookup: HashMap<MultiIndex, usize>,
    /// `shift[v][a]` = position of `a + e_v`, or `usize::MAX` past the top order.
    shift: Vec<Vec<usize>>,
    /// Product triples `(a, b, c)` with `a + b = c`, sorted by `c`.
    triples: Vec<(u32, u32, u32)>,
    /// `triple_end[r]` = number of triples whose `c` has degree `<= r`.
    triple_end: Vec<usize>,
    /// `a!` for every position.
    factorials: Vec<f64>,
}

impl Layout {
    fn build(nvars: usize, max_order: usize) -> Layout {
        let mut indices: Vec<MultiIndex> = Vec::new();
        let mut offsets = Vec::with_capacity(max_order + 2);
        for degree in 0..=max_order {
            offsets.push(indices.len());
            let mut current = vec![0u8; nvars];
            push_degree(&mut indices, &mut current, 0, degree);
        }
        offsets.push(indices.len());

        let lookup: HashMap<MultiIndex, usize> = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();

        let mut shift = vec![vec![usize::MAX; indices.len()]; nvars];
        for (pos, a) in indices.iter().enumerate() {
            for (v, row) in shift.iter_mut().enumerate() {
                let mut up = a.clone();
                up[v] += 1;
                if let Some(&q) = lookup.get(&up) {
                    row[pos] = q;
                }
            }
        }

        let mut triples = Vec::new();
        let mut triple_end = Vec::with_capacity(max_order + 1);
        for degree in 0..=max_order {
            for c in offsets[degree]..offsets[degree + 1] {
                let target = &indices[c];
                for a in 0..=c {
                    let ia = &indices[a];
                    if ia.iter().zip(target).all(|(x, t)| x <= t) {
                        let ib: MultiIndex = target.iter().zip(ia).map(|(t, x)| t - x).collect();
                        let b = lookup[&ib];
                        triples.push((a as u32, b as u32, c as u32));
                    }
                }
            }
            triple_end.push(triples.len());
        }

        let factorials = indices
            .iter()
            .map(|a| a.iter().map(|&k| factorial(k as usize)).product())
            .collect();

        Layout {
            nvars,
            max_order,
            indices,
            offsets,
            lookup,
            shift,
            triples,
            triple_end,
            factorials,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of coefficients of a jet of the given order.
    pub fn len(&self, order: usize) -> usize {
        self.offsets[order + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn multi_index(&self, pos: usize) -> &MultiIndex {
        &self.indices[pos]
    }

    pub fn position(&self, a: &[u8]) -> Option<usize> {
        self.lookup.get(a).copied()
    }

    pub fn factorial_at(&self, pos: usize) -> f64 {
        self.factorials[pos]
    }
}

fn push_degree(out: &mut Vec<MultiIndex>, current: &mut MultiIndex, var: usize, remaining: usize) {
    if current.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if var == current.len() - 1 {
        current[var] = remaining as u8;
        out.push(current.clone());
        current[var] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[var] = k as u8;
        push_degree(out, current, var + 1, remaining - k);
    }
    current[var] = 0;
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Shared layout for `(nvars, max_order)`; layouts are built once per process.
pub fn layout(nvars: usize, max_order: usize) -> Arc<Layout> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Layout>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("layout cache poisoned");
    guard
        .entry((nvars, max_order))
        .or_insert_with(|| Arc::new(Layout::build(nvars, max_order)))
        .clone()
}

// ── Kernels ────────────────────────────────────────────────────
//
// All kernels write `layout.len(order)` coefficients and read only the
// prefixes of their inputs, which must hold at least that many entries.

pub(crate) fn mul_into(layout: &Layout, order: usize, a: &[f64], b: &[f64], out: &mut [f64]) {
    let len = layout.len(order);
    out[..len].iter_mut().for_each(|c| *c = 0.0);
    for &(ia, ib, ic) in &layout.triples[..layout.triple_end[order]] {
        out[ic as usize] += a[ia as usize] * b[ib as usize];
    }
}

pub(crate) fn mul(layout: &Layout, order: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; layout.len(order)];
    mul_into(layout, order, a, b, &mut out);
    out
}

/// Coefficients of `d/dv` of a jet; the input must be one order higher.
pub(crate) fn derivative(layout: &Layout, order: usize, v: usize, a: &[f64]) -> Vec<f64> {
    let len = layout.len(order);
    let shift = &layout.shift[v];
    (0..len)
        .map(|pos| {
            let up = shift[pos];
            let k = layout.indices[pos][v] as f64 + 1.0;
            k * a[up]
        })
        .collect()
}

/// `f(u)` where `taylor[k] = f^(k)(u_0) / k!` for `k = 0..=order`.
pub(crate) fn compose(layout: &Layout, order: usize, u: &[f64], taylor: &[f64]) -> Vec<f64> {
    let len = layout.len(order);
    let mut du = u[..len].to_vec();
    du[0] = 0.0;
    // Horner: t_0 + du (t_1 + du (t_2 + ...)).
    let mut acc = vec![0.0; len];
    acc[0] = taylor[order];
    let mut scratch = vec![0.0; len];
    for k in (0..order).rev() {
        mul_into(layout, order, &acc, &du, &mut scratch);
        std::mem::swap(&mut acc, &mut scratch);
        acc[0] += taylor[k];
    }
    acc
}

pub(crate) fn powi(layout: &Layout, order: usize, base: &[f64], exp: u32) -> Vec<f64> {
    let len = layout.len(order);
    let mut result = vec![0.0; len];
    result[0] = 1.0;
    let mut square = base[..len].to_vec();
    let mut e = exp;
    let mut scratch = vec![0.0; len];
    while e > 0 {
        if e & 1 == 1 {
            mul_into(layout, order, &result, &square, &mut scratch);
            std::mem::swap(&mut result, &mut scratch);
        }
        e >>= 1;
        if e > 0 {
            mul_into(layout, order, &square, &square, &mut scratch);
            std::mem::swap(&mut square, &mut scratch);
        }
    }
    result
}

// ── Jet ────────────────────────────────────────────────────────

/// Value and all mixed partial derivatives of a scalar field at one point.
#[derive(Debug, Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    order: usize,
    point: Vec<f64>,
    coeffs: Vec<f64>,
}

impl Jet {
    pub(crate) fn new(layout: Arc<Layout>, order: usize, point: Vec<f64>, mut coeffs: Vec<f64>) -> Jet {
        coeffs.truncate(layout.len(order));
        Jet {
            layout,
            order,
            point,
            coeffs,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// The partial derivative for a multi-index over `(x, y)`; zero-padded
    /// multi-indices shorter than `n + m` are accepted.
    ///
    /// Returns `None` when the total order exceeds the jet order.
    pub fn partial(&self, alpha: &[u8]) -> Option<f64> {
        let mut full = vec![0u8; self.layout.nvars()];
        if alpha.len() > full.len() {
            return None;
        }
        full[..alpha.len()].copy_from_slice(alpha);
        let total: usize = full.iter().map(|&k| k as usize).sum();
        if total > self.order {
            return None;
        }
        let pos = self.layout.position(&full)?;
        Some(self.coeffs[pos] * self.layout.factorial_at(pos))
    }

    /// Every `(multi-index, partial)` pair, in graded order.
    pub fn partials(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(pos, &c)| (self.layout.multi_index(pos), c * self.layout.factorial_at(pos)))
    }

    /// Raw Taylor coefficients `d^a f / a!`.
    pub fn taylor_coefficients(&self) -> &[f64] {
        &self.coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_layout_counts() {
        let l = layout(3, 4);
        // C(3 + r, r)
        assert_eq!(l.len(0), 1);
        assert_eq!(l.len(1), 4);
        assert_eq!(l.len(2), 10);
        assert_eq!(l.len(4), 35);
        assert_eq!(l.multi_index(0), &vec![0, 0, 0]);
        assert_eq!(l.multi_index(1), &vec![1, 0, 0]);
        assert_eq!(l.multi_index(3), &vec![0, 0, 1]);
    }

    #[test]
    fn zero_variable_layout() {
        let l = layout(0, 3);
        assert_eq!(l.len(3), 1);
        let p = mul(&l, 3, &[2.0], &[3.0]);
        assert_eq!(p, vec![6.0]);
    }

    #[test]
    fn product_of_linear_series() {
        // (1 + x)(2 + y) = 2 + 2x + y + xy
        let l = layout(2, 2);
        let a = vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        let b = vec![2.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let p = mul(&l, 2, &a, &b);
        let xy = l.position(&[1, 1]).unwrap();
        assert_eq!(p[0], 2.0);
        assert_eq!(p[1], 2.0);
        assert_eq!(p[2], 1.0);
        assert_eq!(p[xy], 1.0);
    }

    #[test]
    fn compose_exp_matches_series() {
        // exp(x) around 0 in one variable: coefficients 1/k!
        let l = layout(1, 5);
        let u = vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        let taylor: Vec<f64> = (0..=5).map(|k| 1.0 / factorial(k)).collect();
        let e = compose(&l, 5, &u, &taylor);
        for k in 0..=5 {
            assert!((e[k] - 1.0 / factorial(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn powi_cubes() {
        // (1 + x)^3 = 1 + 3x + 3x^2 + x^3
        let l = layout(1, 4);
        let u = vec![1.0, 1.0, 0.0, 0.0, 0.0];
        assert_eq!(powi(&l, 4, &u, 3), vec![1.0, 3.0, 3.0, 1.0, 0.0]);
        assert_eq!(powi(&l, 4, &u, 0), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn derivative_shifts() {
        // f = x^2 y: coeff at [2,1] is 1; df/dx = 2xy
        let l = layout(2, 3);
        let mut f = vec![0.0; l.len(3)];
        f[l.position(&[2, 1]).unwrap()] = 1.0;
        let d = derivative(&l, 2, 0, &f);
        assert_eq!(d[l.position(&[1, 1]).unwrap()], 2.0);
        assert_eq!(d.iter().filter(|c| **c != 0.0).count(), 1);
    }
}
