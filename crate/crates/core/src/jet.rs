//! Truncated multivariate Taylor arithmetic up to third order.
//!
//! A [`Jet`] stores the Taylor coefficients `∂^α f / α!` of a scalar function
//! at a chart point for every multi-index `|α| ≤ order`. Coefficients are laid
//! out densely in graded order (degree 0, then 1, then 2, then 3), so the
//! coefficients of a lower-order jet are a prefix of the higher-order layout.
//! Differentiating a jet lowers its order by one; arithmetic between jets of
//! different orders truncates to the smaller one.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use smallvec::SmallVec;
use thiserror::Error;

/// Highest derivative order carried by any jet.
pub const MAX_ORDER: usize = 3;
/// Largest supported chart dimension.
pub const MAX_DIM: usize = 12;

const NONE: u16 = u16::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("cannot differentiate a jet of order 0 (derivative information exhausted)")]
    Exhausted,
    #[error("jet order {needed} required but only {available} available")]
    OrderTooLow { needed: usize, available: usize },
}

/// Multi-index bookkeeping for one chart dimension.
#[derive(Debug)]
pub struct Layout {
    n: usize,
    /// Each multi-index as a sorted tuple of variable indices.
    indices: Vec<SmallVec<[u8; 3]>>,
    /// Number of coefficients carried by a jet of order 0..=3.
    prefix: [usize; MAX_ORDER + 1],
    /// Triples `(a, b, out)` with `α_a + α_b = α_out`, sorted by `out`.
    product: Vec<(u16, u16, u16)>,
    product_prefix: [usize; MAX_ORDER + 1],
    /// `raise[idx * n + i]` is the index of `α + e_i`, or `NONE` past order 3.
    raise: Vec<u16>,
    /// For `|α| ≥ 1`: index of `α` with its last variable removed, and that variable.
    parent: Vec<(u16, u8)>,
    /// `α!` for each multi-index.
    factorial: Vec<f64>,
}

impl Layout {
    fn build(n: usize) -> Self {
        let mut indices: Vec<SmallVec<[u8; 3]>> = vec![SmallVec::new()];
        let mut prefix = [1usize; MAX_ORDER + 1];
        for i in 0..n {
            indices.push(SmallVec::from_slice(&[i as u8]));
        }
        prefix[1] = indices.len();
        for i in 0..n {
            for j in i..n {
                indices.push(SmallVec::from_slice(&[i as u8, j as u8]));
            }
        }
        prefix[2] = indices.len();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    indices.push(SmallVec::from_slice(&[i as u8, j as u8, k as u8]));
                }
            }
        }
        prefix[3] = indices.len();

        let lookup: BTreeMap<SmallVec<[u8; 3]>, u16> = indices
            .iter()
            .enumerate()
            .map(|(pos, a)| (a.clone(), pos as u16))
            .collect();

        let mut product = Vec::new();
        let mut product_prefix = [0usize; MAX_ORDER + 1];
        for (out, gamma) in indices.iter().enumerate() {
            // distinct sub-multisets of gamma
            let len = gamma.len();
            let mut seen = BTreeMap::new();
            for mask in 0u32..(1 << len) {
                let mut alpha: SmallVec<[u8; 3]> = SmallVec::new();
                let mut beta: SmallVec<[u8; 3]> = SmallVec::new();
                for (bit, &v) in gamma.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        alpha.push(v);
                    } else {
                        beta.push(v);
                    }
                }
                seen.insert(alpha, beta);
            }
            for (alpha, beta) in seen {
                product.push((lookup[&alpha], lookup[&beta], out as u16));
            }
        }
        for (order, slot) in product_prefix.iter_mut().enumerate() {
            *slot = product
                .iter()
                .filter(|&&(_, _, out)| (out as usize) < prefix[order])
                .count();
        }

        let mut raise = vec![NONE; indices.len() * n];
        for (pos, a) in indices.iter().enumerate() {
            if a.len() == MAX_ORDER {
                continue;
            }
            for i in 0..n {
                let mut b = a.clone();
                b.push(i as u8);
                b.sort_unstable();
                raise[pos * n + i] = lookup[&b];
            }
        }

        let parent = indices
            .iter()
            .map(|a| match a.split_last() {
                Some((&last, rest)) => (lookup[&SmallVec::from_slice(rest)], last),
                None => (NONE, 0),
            })
            .collect();

        let factorial = indices
            .iter()
            .map(|a| {
                let mut f = 1.0;
                let mut run = 1.0;
                for w in 1..a.len() {
                    if a[w] == a[w - 1] {
                        run += 1.0;
                        f *= run;
                    } else {
                        run = 1.0;
                    }
                }
                f
            })
            .collect();

        Layout {
            n,
            indices,
            prefix,
            product,
            product_prefix,
            raise,
            parent,
            factorial,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of coefficients of a jet of the given order.
    pub fn len(&self, order: usize) -> usize {
        self.prefix[order]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of the multi-index given as a list of variables (any order).
    pub fn index_of(&self, vars: &[usize]) -> Option<usize> {
        let mut key: SmallVec<[u8; 3]> = vars.iter().map(|&v| v as u8).collect();
        key.sort_unstable();
        self.indices.iter().position(|a| *a == key)
    }

    pub fn multi_index(&self, pos: usize) -> &[u8] {
        &self.indices[pos]
    }
}

static LAYOUTS: [OnceLock<Layout>; MAX_DIM + 1] = [const { OnceLock::new() }; MAX_DIM + 1];

/// Shared multi-index layout for chart dimension `n`.
pub fn layout(n: usize) -> &'static Layout {
    assert!(n <= MAX_DIM, "chart dimension {n} exceeds supported maximum {MAX_DIM}");
    LAYOUTS[n].get_or_init(|| Layout::build(n))
}

/// Truncated Taylor expansion of a scalar function at a point.
#[derive(Clone, PartialEq)]
pub struct Jet {
    n: u8,
    order: u8,
    c: SmallVec<[f64; 16]>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("dim", &self.n)
            .field("order", &self.order)
            .field("coeffs", &self.c.as_slice())
            .finish()
    }
}

impl Jet {
    pub fn zero(n: usize, order: usize) -> Self {
        let len = layout(n).len(order);
        Jet {
            n: n as u8,
            order: order as u8,
            c: SmallVec::from_elem(0.0, len),
        }
    }

    pub fn constant(n: usize, order: usize, value: f64) -> Self {
        let mut j = Self::zero(n, order);
        j.c[0] = value;
        j
    }

    /// The coordinate function `x_i` expanded at `value`.
    pub fn variable(n: usize, order: usize, i: usize, value: f64) -> Self {
        assert!(i < n);
        let mut j = Self::constant(n, order, value);
        if order >= 1 {
            j.c[1 + i] = 1.0;
        }
        j
    }

    /// Coordinate seeds `x_0, …, x_{n-1}` at `point`.
    pub fn seeds(point: &[f64], order: usize) -> Vec<Jet> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet::variable(n, order, i, v))
            .collect()
    }

    /// Build from raw Taylor coefficients in layout order.
    pub fn from_coeffs(n: usize, order: usize, coeffs: &[f64]) -> Self {
        assert_eq!(coeffs.len(), layout(n).len(order));
        Jet {
            n: n as u8,
            order: order as u8,
            c: SmallVec::from_slice(coeffs),
        }
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn layout(&self) -> &'static Layout {
        layout(self.n as usize)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    /// The partial derivative `∂^α f` for `α` given as a list of variables.
    pub fn partial(&self, vars: &[usize]) -> Result<f64, JetError> {
        if vars.len() > self.order() {
            return Err(JetError::OrderTooLow {
                needed: vars.len(),
                available: self.order(),
            });
        }
        let lay = self.layout();
        let pos = lay.index_of(vars).expect("variable index out of range");
        Ok(self.c[pos] * lay.factorial[pos])
    }

    /// Gradient `∂_i f` for all `i`.
    pub fn gradient(&self) -> Result<Vec<f64>, JetError> {
        if self.order == 0 {
            return Err(JetError::OrderTooLow { needed: 1, available: 0 });
        }
        Ok(self.c[1..1 + self.dim()].to_vec())
    }

    /// The jet of `∂_i f`, one order lower.
    pub fn derivative(&self, i: usize) -> Result<Jet, JetError> {
        if self.order == 0 {
            return Err(JetError::Exhausted);
        }
        let n = self.dim();
        let lay = self.layout();
        let new_order = self.order() - 1;
        let len = lay.len(new_order);
        let mut c = SmallVec::from_elem(0.0, len);
        for (pos, slot) in c.iter_mut().enumerate() {
            let up = lay.raise[pos * n + i] as usize;
            // multiplicity of i in α + e_i
            let mult = lay.indices[up].iter().filter(|&&v| v as usize == i).count() as f64;
            *slot = mult * self.c[up];
        }
        Ok(Jet {
            n: self.n,
            order: new_order as u8,
            c,
        })
    }

    /// Drop coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order() {
            return self.clone();
        }
        let len = self.layout().len(order);
        Jet {
            n: self.n,
            order: order as u8,
            c: SmallVec::from_slice(&self.c[..len]),
        }
    }

    fn binary_order(&self, other: &Jet) -> usize {
        assert_eq!(self.n, other.n, "jet dimension mismatch");
        self.order.min(other.order) as usize
    }

    fn mul_jet(&self, other: &Jet) -> Jet {
        let order = self.binary_order(other);
        if self.is_zero() || other.is_zero() {
            return Jet::zero(self.dim(), order);
        }
        let lay = self.layout();
        let mut out = Jet::zero(self.dim(), order);
        for &(a, b, k) in &lay.product[..lay.product_prefix[order]] {
            out.c[k as usize] += self.c[a as usize] * other.c[b as usize];
        }
        out
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let order = self.binary_order(other);
        let len = self.layout().len(order);
        Jet {
            n: self.n,
            order: order as u8,
            c: (0..len).map(|k| f(self.c[k], other.c[k])).collect(),
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Jet {
        Jet {
            n: self.n,
            order: self.order,
            c: self.c.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        self.map(|x| x * s)
    }

    /// `f(self)` where `derivs = [f(u₀), f'(u₀), f''(u₀), f'''(u₀)]`.
    pub fn compose_univariate(&self, derivs: [f64; 4]) -> Jet {
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut out = Jet::constant(self.dim(), self.order(), derivs[0]);
        let mut power = h.clone();
        let mut fact = 1.0;
        for (k, &d) in derivs.iter().enumerate().skip(1) {
            if k > self.order() {
                break;
            }
            fact *= k as f64;
            if d != 0.0 {
                out += &power.scale(d / fact);
            }
            if k < self.order() {
                power = power.mul_jet(&h);
            }
        }
        out
    }

    pub fn recip(&self) -> Jet {
        let u = self.value();
        let r = 1.0 / u;
        self.compose_univariate([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn sqrt(&self) -> Jet {
        let u = self.value();
        let s = u.sqrt();
        self.compose_univariate([
            s,
            0.5 / s,
            -0.25 / (u * s),
            0.375 / (u * u * s),
        ])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose_univariate([e, e, e, e])
    }

    pub fn ln(&self) -> Jet {
        let u = self.value();
        self.compose_univariate([u.ln(), 1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u)])
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose_univariate([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose_univariate([c, -s, -c, s])
    }

    pub fn powi(&self, k: i32) -> Jet {
        let u = self.value();
        let kf = k as f64;
        self.compose_univariate([
            u.powi(k),
            kf * u.powi(k - 1),
            kf * (kf - 1.0) * u.powi(k - 2),
            kf * (kf - 1.0) * (kf - 2.0) * u.powi(k - 3),
        ])
    }

    pub fn square(&self) -> Jet {
        self.mul_jet(self)
    }
}

/// Substitute inner jets into several outer jets: `outer_r(y₀ + h(x))`.
///
/// Each outer jet is an expansion in `m` variables about `y₀`, where `y₀` is
/// the vector of inner values. The inner jets are expansions in `n` variables.
pub fn compose_many(outers: &[Jet], inner: &[Jet]) -> Vec<Jet> {
    let Some(first) = outers.first() else {
        return Vec::new();
    };
    let m = first.dim();
    assert_eq!(inner.len(), m, "inner map has wrong number of components");
    let n = inner[0].dim();
    let inner_order = inner.iter().map(Jet::order).min().unwrap_or(MAX_ORDER);
    let outer_order = outers.iter().map(Jet::order).min().unwrap_or(MAX_ORDER);
    let order = inner_order.min(outer_order);
    let lay = layout(m);
    let count = lay.len(order);

    let shifted: Vec<Jet> = inner
        .iter()
        .map(|j| {
            let mut h = j.truncate(order);
            h.c[0] = 0.0;
            h
        })
        .collect();

    // monomials h^α in graded order; h^α = h^{parent} · h_last
    let mut monomials: Vec<Jet> = Vec::with_capacity(count);
    monomials.push(Jet::constant(n, order, 1.0));
    for pos in 1..count {
        let (par, var) = lay.parent[pos];
        let mono = if par == 0 {
            shifted[var as usize].clone()
        } else {
            monomials[par as usize].mul_jet(&shifted[var as usize])
        };
        monomials.push(mono);
    }

    outers
        .iter()
        .map(|o| {
            assert_eq!(o.dim(), m);
            let mut acc = Jet::zero(n, order);
            for (pos, mono) in monomials.iter().enumerate() {
                let coef = o.c[pos];
                if coef != 0.0 && !mono.is_zero() {
                    for (a, &b) in acc.c.iter_mut().zip(mono.c.iter()) {
                        *a += coef * b;
                    }
                }
            }
            acc
        })
        .collect()
}

pub fn compose(outer: &Jet, inner: &[Jet]) -> Jet {
    compose_many(std::slice::from_ref(outer), inner).remove(0)
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.zip(b, |x, y| x + y));
forward_binop!(Sub, sub, |a, b| a.zip(b, |x, y| x - y));
forward_binop!(Mul, mul, |a, b| a.mul_jet(b));
forward_binop!(Div, div, |a, b| a.mul_jet(&b.recip()));

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<&Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.c[0] += rhs;
        out
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map(|x| -x)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map(|x| -x)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        assert_eq!(self.n, rhs.n, "jet dimension mismatch");
        if rhs.order < self.order {
            *self = self.truncate(rhs.order());
        }
        for (a, &b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self += &rhs;
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        assert_eq!(self.n, rhs.n, "jet dimension mismatch");
        if rhs.order < self.order {
            *self = self.truncate(rhs.order());
        }
        for (a, &b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
    }
}

impl SubAssign<Jet> for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self -= &rhs;
    }
}

/// Multiply-accumulate `acc += a · b`, skipping exact zeros.
pub fn fma_into(acc: &mut Jet, a: &Jet, b: &Jet) {
    if a.is_zero() || b.is_zero() {
        let order = acc.order().min(a.order()).min(b.order());
        if order < acc.order() {
            *acc = acc.truncate(order);
        }
        return;
    }
    *acc += &(a * b);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_sizes() {
        // C(n+3, 3)
        assert_eq!(layout(4).len(3), 35);
        assert_eq!(layout(8).len(3), 165);
        assert_eq!(layout(12).len(3), 455);
        assert_eq!(layout(8).len(1), 9);
    }

    #[test]
    fn product_of_polynomials() {
        // f = x + 2y, g = x*y at (1, 2); f*g = x²y + 2xy²
        let x = Jet::variable(2, 3, 0, 1.0);
        let y = Jet::variable(2, 3, 1, 2.0);
        let f = &x + &(&y * 2.0);
        let g = &x * &y;
        let h = &f * &g;
        assert_eq!(h.value(), 10.0);
        // ∂x = 2xy + 2y² = 4 + 8
        assert_eq!(h.partial(&[0]).unwrap(), 12.0);
        // ∂y = x² + 4xy = 1 + 8
        assert_eq!(h.partial(&[1]).unwrap(), 9.0);
        // ∂xx = 2y = 4, ∂xy = 2x + 4y = 10, ∂yy = 4x = 4
        assert_eq!(h.partial(&[0, 0]).unwrap(), 4.0);
        assert_eq!(h.partial(&[0, 1]).unwrap(), 10.0);
        assert_eq!(h.partial(&[1, 1]).unwrap(), 4.0);
        // ∂xxy = 2, ∂xyy = 4
        assert_eq!(h.partial(&[0, 0, 1]).unwrap(), 2.0);
        assert_eq!(h.partial(&[1, 0, 1]).unwrap(), 4.0);
        assert_eq!(h.partial(&[0, 0, 0]).unwrap(), 0.0);
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let x = Jet::variable(1, 3, 0, 0.7);
        let e = x.exp();
        for k in 0..=3 {
            let vars = vec![0; k];
            assert!((e.partial(&vars).unwrap() - 0.7f64.exp()).abs() < 1e-14);
        }
        let r = x.recip();
        assert!((r.partial(&[0, 0, 0]).unwrap() + 6.0 / 0.7f64.powi(4)).abs() < 1e-12);
        let s = x.sin();
        assert!((s.partial(&[0, 0, 0]).unwrap() + 0.7f64.cos()).abs() < 1e-14);
        let q = x.sqrt().square();
        assert!((q.partial(&[0]).unwrap() - 1.0).abs() < 1e-14);
        assert!(q.partial(&[0, 0]).unwrap().abs() < 1e-13);
    }

    #[test]
    fn derivative_lowers_order() {
        let x = Jet::variable(2, 3, 0, 1.5);
        let y = Jet::variable(2, 3, 1, -0.5);
        let f = (&x * &x) * &y;
        let fx = f.derivative(0).unwrap();
        assert_eq!(fx.order(), 2);
        // ∂x(x²y) = 2xy
        assert_eq!(fx.value(), 2.0 * 1.5 * -0.5);
        assert_eq!(fx.partial(&[1]).unwrap(), 3.0);
        assert_eq!(fx.partial(&[0, 1]).unwrap(), 2.0);
        let fxxy = fx.derivative(0).unwrap().derivative(1).unwrap();
        assert_eq!(fxxy.order(), 0);
        assert_eq!(fxxy.value(), 2.0);
        assert_eq!(fxxy.derivative(0), Err(JetError::Exhausted));
    }

    #[test]
    fn composition_matches_direct_evaluation() {
        // outer F(u, v) = u² v expanded at (u0, v0); inner u = sin x, v = x + y
        let p = [0.3, 1.1];
        let xs = Jet::seeds(&p, 3);
        let u = xs[0].sin();
        let v = &xs[0] + &xs[1];
        let us = Jet::seeds(&[u.value(), v.value()], 3);
        let outer = (&us[0] * &us[0]) * &us[1];
        let composed = compose(&outer, &[u.clone(), v.clone()]);
        let direct = (&u * &u) * &v;
        for (a, b) in composed.coeffs().iter().zip(direct.coeffs()) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn mixed_order_truncates() {
        let x = Jet::variable(3, 3, 0, 2.0);
        let y = Jet::variable(3, 1, 1, 1.0);
        let z = &x * &y;
        assert_eq!(z.order(), 1);
        assert_eq!(z.coeffs().len(), 4);
    }
}
