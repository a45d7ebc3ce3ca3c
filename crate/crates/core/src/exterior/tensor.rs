use std::fmt;
use std::sync::Arc;

use super::{check_point, FieldError, ScalarField};
use crate::jet::{Jet, MAX_ORDER};

/// Jets of all `n^(r+s)` components of an `(r, s)` tensor at a point.
///
/// Components are stored row-major with the contravariant indices first, so a
/// (1,1) tensor `T` has `T^a_b` at position `a * n + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorJet {
    dim: usize,
    contra: usize,
    co: usize,
    comps: Vec<Jet>,
}

impl TensorJet {
    pub fn new(dim: usize, contra: usize, co: usize, comps: Vec<Jet>) -> Self {
        assert_eq!(comps.len(), dim.pow((contra + co) as u32), "wrong component count");
        TensorJet { dim, contra, co, comps }
    }

    pub fn zero(dim: usize, contra: usize, co: usize, order: usize) -> Self {
        TensorJet::new(dim, contra, co, vec![Jet::zero(dim, order); dim.pow((contra + co) as u32)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contravariant(&self) -> usize {
        self.contra
    }

    pub fn covariant(&self) -> usize {
        self.co
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(Jet::order).min().unwrap_or(MAX_ORDER)
    }

    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Jet> {
        self.comps
    }

    fn flat(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.contra + self.co);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Jet {
        &self.comps[self.flat(idx)]
    }

    pub fn value(&self, idx: &[usize]) -> f64 {
        self.get(idx).value()
    }

    /// Values as a dense `n × n` matrix (only for rank-2 tensors).
    pub fn matrix_values(&self) -> nalgebra::DMatrix<f64> {
        assert_eq!(self.contra + self.co, 2);
        let n = self.dim;
        nalgebra::DMatrix::from_fn(n, n, |i, j| self.comps[i * n + j].value())
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(|c| c.value().abs()).fold(0.0, f64::max)
    }
}

type TensorEval = dyn Fn(&[f64], usize) -> Result<TensorJet, FieldError> + Send + Sync;

/// A tensor field of type `(r, s)` on a chart.
#[derive(Clone)]
pub struct TensorField {
    dim: usize,
    contra: usize,
    co: usize,
    eval: Arc<TensorEval>,
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TensorField(({}, {}), dim = {})", self.contra, self.co, self.dim)
    }
}

impl TensorField {
    pub fn from_eval(
        dim: usize,
        contra: usize,
        co: usize,
        eval: impl Fn(&[f64], usize) -> Result<TensorJet, FieldError> + Send + Sync + 'static,
    ) -> Self {
        TensorField {
            dim,
            contra,
            co,
            eval: Arc::new(eval),
        }
    }

    /// Tensor whose dense components are an expression in the coordinates.
    pub fn from_expr(dim: usize, contra: usize, co: usize, expr: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static) -> Self {
        TensorField::from_eval(dim, contra, co, move |p, order| {
            Ok(TensorJet::new(dim, contra, co, expr(&Jet::seeds(p, order))))
        })
    }

    pub fn from_scalars(dim: usize, contra: usize, co: usize, comps: Vec<ScalarField>) -> Self {
        assert_eq!(comps.len(), dim.pow((contra + co) as u32));
        TensorField::from_eval(dim, contra, co, move |p, order| {
            let jets = comps.iter().map(|c| c.eval_order(p, order)).collect::<Result<Vec<_>, _>>()?;
            Ok(TensorJet::new(dim, contra, co, jets))
        })
    }

    /// A constant tensor with the given dense component values.
    pub fn constant(dim: usize, contra: usize, co: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), dim.pow((contra + co) as u32));
        TensorField::from_expr(dim, contra, co, move |x| {
            let order = x.first().map_or(MAX_ORDER, Jet::order);
            values.iter().map(|&v| Jet::constant(dim, order, v)).collect()
        })
    }

    /// The coordinate vector field `∂_i`.
    pub fn coordinate_vector(dim: usize, i: usize) -> Self {
        TensorField::constant(dim, 1, 0, (0..dim).map(|k| if k == i { 1.0 } else { 0.0 }).collect())
    }

    /// Vector field with the given component expressions.
    pub fn vector(dim: usize, expr: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static) -> Self {
        TensorField::from_expr(dim, 1, 0, expr)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contravariant(&self) -> usize {
        self.contra
    }

    pub fn covariant(&self) -> usize {
        self.co
    }

    pub fn eval_order(&self, p: &[f64], order: usize) -> Result<TensorJet, FieldError> {
        check_point(self.dim, p)?;
        let v = (self.eval)(p, order)?;
        if v.comps.iter().any(|c| !c.is_finite()) {
            return Err(FieldError::NonFinite { point: p.to_vec() });
        }
        Ok(v)
    }

    pub fn eval(&self, p: &[f64]) -> Result<TensorJet, FieldError> {
        self.eval_order(p, MAX_ORDER)
    }
}

/// `[X,Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i` on vector jets.
pub fn lie_bracket_jets(x: &[Jet], y: &[Jet]) -> Result<Vec<Jet>, FieldError> {
    let n = x.len();
    if y.len() != n {
        return Err(FieldError::DimensionMismatch {
            context: "lie bracket",
            left: n,
            right: y.len(),
        });
    }
    let order = x.iter().chain(y).map(Jet::order).min().unwrap_or(MAX_ORDER);
    if order == 0 {
        return Err(crate::jet::JetError::Exhausted.into());
    }
    let mut out = vec![Jet::zero(n, order - 1); n];
    for j in 0..n {
        let (xj, yj) = (&x[j], &y[j]);
        for i in 0..n {
            if !xj.is_zero() && !y[i].is_zero() {
                out[i] += &(xj * &y[i].derivative(j)?);
            }
            if !yj.is_zero() && !x[i].is_zero() {
                out[i] -= &(yj * &x[i].derivative(j)?);
            }
        }
    }
    Ok(out)
}

/// Lie bracket of two vector fields.
pub fn lie_bracket(x: &TensorField, y: &TensorField) -> Result<TensorField, FieldError> {
    for v in [x, y] {
        if v.contra != 1 || v.co != 0 {
            return Err(FieldError::Degree {
                context: "lie bracket",
                detail: format!("expected vector fields, got a ({}, {}) tensor", v.contra, v.co),
            });
        }
    }
    if x.dim != y.dim {
        return Err(FieldError::DimensionMismatch {
            context: "lie bracket",
            left: x.dim,
            right: y.dim,
        });
    }
    let (a, b) = (x.clone(), y.clone());
    let dim = x.dim;
    Ok(TensorField::from_eval(dim, 1, 0, move |p, order| {
        let xa = (a.eval)(p, order)?;
        let yb = (b.eval)(p, order)?;
        Ok(TensorJet::new(dim, 1, 0, lie_bracket_jets(&xa.comps, &yb.comps)?))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_fields_commute() {
        let e0 = TensorField::coordinate_vector(3, 0);
        let e1 = TensorField::coordinate_vector(3, 1);
        let b = lie_bracket(&e0, &e1).unwrap().eval(&[0.2, 0.3, 0.4]).unwrap();
        assert_eq!(b.max_abs(), 0.0);
    }

    #[test]
    fn bracket_of_linear_field() {
        // [x₁∂₂, ∂₁] = −∂₂
        let x = TensorField::vector(2, |c| vec![Jet::zero(2, c[0].order()), c[0].clone()]);
        let e0 = TensorField::coordinate_vector(2, 0);
        let b = lie_bracket(&x, &e0).unwrap().eval(&[0.7, -0.1]).unwrap();
        assert_eq!(b.value(&[0]), 0.0);
        assert_eq!(b.value(&[1]), -1.0);
    }

    #[test]
    fn bracket_rejects_covectors() {
        let g = TensorField::constant(2, 0, 2, vec![1.0, 0.0, 0.0, 1.0]);
        let e0 = TensorField::coordinate_vector(2, 0);
        assert!(lie_bracket(&g, &e0).is_err());
    }
}
