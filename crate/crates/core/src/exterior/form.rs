use std::fmt;
use std::sync::Arc;

use super::basis::{increasing, merge_sign, rank, sort_with_sign};
use super::{check_point, FieldError, ScalarField, TensorField};
use crate::jet::{Jet, JetError, MAX_ORDER};

/// Jets of every strictly increasing component of a `k`-form at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct FormJet {
    dim: usize,
    degree: usize,
    comps: Vec<Jet>,
}

const DENSE_LIMIT: usize = 1 << 16;

impl FormJet {
    pub fn zero(dim: usize, degree: usize, order: usize) -> Self {
        FormJet {
            dim,
            degree,
            comps: vec![Jet::zero(dim, order); increasing(dim, degree).len()],
        }
    }

    /// Components listed in the lexicographic order of [`increasing`].
    pub fn from_components(dim: usize, degree: usize, comps: Vec<Jet>) -> Self {
        assert_eq!(comps.len(), increasing(dim, degree).len(), "wrong number of form components");
        FormJet { dim, degree, comps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(Jet::order).min().unwrap_or(MAX_ORDER)
    }

    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    /// Component on a strictly increasing tuple.
    pub fn component(&self, increasing_idx: &[usize]) -> &Jet {
        &self.comps[rank(self.dim, increasing_idx)]
    }

    pub fn component_mut(&mut self, increasing_idx: &[usize]) -> &mut Jet {
        let r = rank(self.dim, increasing_idx);
        &mut self.comps[r]
    }

    /// Antisymmetric extension to an arbitrary index tuple.
    pub fn get(&self, idx: &[usize]) -> Jet {
        assert_eq!(idx.len(), self.degree);
        match sort_with_sign(idx) {
            Some((sorted, sign)) => self.comps[rank(self.dim, &sorted)].scale(sign),
            None => Jet::zero(self.dim, self.order()),
        }
    }

    /// Value of the form on coordinate vectors `∂_{idx₀}, …`.
    pub fn value(&self, idx: &[usize]) -> f64 {
        match sort_with_sign(idx) {
            Some((sorted, sign)) => sign * self.comps[rank(self.dim, &sorted)].value(),
            None => 0.0,
        }
    }

    /// Evaluate on arbitrary vectors (given by their coordinate components).
    pub fn apply(&self, vectors: &[&[f64]]) -> f64 {
        assert_eq!(vectors.len(), self.degree);
        let mut total = 0.0;
        let mut idx = vec![0usize; self.degree];
        self.apply_rec(vectors, 0, 1.0, &mut idx, &mut total);
        total
    }

    fn apply_rec(&self, vectors: &[&[f64]], slot: usize, weight: f64, idx: &mut Vec<usize>, total: &mut f64) {
        if slot == self.degree {
            *total += weight * self.value(idx);
            return;
        }
        for m in 0..self.dim {
            let w = vectors[slot][m];
            if w != 0.0 {
                idx[slot] = m;
                self.apply_rec(vectors, slot + 1, weight * w, idx, total);
            }
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.comps.iter().map(Jet::value).collect()
    }

    /// Largest absolute component value.
    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(|c| c.value().abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> FormJet {
        FormJet {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &FormJet) -> FormJet {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        FormJet {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &FormJet) -> FormJet {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        FormJet {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn wedge(&self, other: &FormJet) -> Result<FormJet, FieldError> {
        if self.dim != other.dim {
            return Err(FieldError::DimensionMismatch {
                context: "wedge",
                left: self.dim,
                right: other.dim,
            });
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(FieldError::Degree {
                context: "wedge",
                detail: format!("degree {degree} exceeds chart dimension {}", self.dim),
            });
        }
        let order = self.order().min(other.order());
        let mut out = FormJet::zero(self.dim, degree, order);
        let left = increasing(self.dim, self.degree);
        let right = increasing(self.dim, other.degree);
        for (a_idx, a) in left.iter().zip(&self.comps) {
            if a.is_zero() {
                continue;
            }
            for (b_idx, b) in right.iter().zip(&other.comps) {
                if b.is_zero() {
                    continue;
                }
                if let Some((merged, sign)) = merge_sign(a_idx, b_idx) {
                    let r = rank(self.dim, &merged);
                    out.comps[r] += &(a * b).scale(sign);
                }
            }
        }
        Ok(out)
    }

    /// `(da)_{i₀…i_k} = Σ_j (−1)^j ∂_{i_j} a_{i₀…î_j…i_k}`.
    pub fn exterior_derivative(&self) -> Result<FormJet, FieldError> {
        let n = self.dim;
        let k = self.degree;
        if k + 1 > n {
            return Err(FieldError::Degree {
                context: "exterior derivative",
                detail: format!("a top-degree form in dimension {n} has no derivative"),
            });
        }
        if self.order() == 0 {
            return Err(JetError::Exhausted.into());
        }
        let order = self.order() - 1;
        // cache partials of each component
        let mut partials: Vec<Vec<Option<Jet>>> = vec![vec![None; n]; self.comps.len()];
        let mut out = FormJet::zero(n, k + 1, order);
        for (slot, idx) in increasing(n, k + 1).iter().enumerate() {
            let mut acc = Jet::zero(n, order);
            for j in 0..=k {
                let mut rest = idx.clone();
                let i = rest.remove(j);
                let r = rank(n, &rest);
                if self.comps[r].is_zero() {
                    continue;
                }
                if partials[r][i].is_none() {
                    partials[r][i] = Some(self.comps[r].derivative(i)?);
                }
                let term = partials[r][i].as_ref().expect("cached partial");
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            out.comps[slot] = acc;
        }
        Ok(out)
    }

    /// `(ι_X a)(v₂,…) = a(X, v₂, …)`.
    pub fn interior(&self, x: &[Jet]) -> Result<FormJet, FieldError> {
        if self.degree == 0 {
            return Err(FieldError::Degree {
                context: "interior product",
                detail: "cannot contract a 0-form".into(),
            });
        }
        if x.len() != self.dim {
            return Err(FieldError::DimensionMismatch {
                context: "interior product",
                left: self.dim,
                right: x.len(),
            });
        }
        let order = self.order().min(x.iter().map(Jet::order).min().unwrap_or(MAX_ORDER));
        let mut out = FormJet::zero(self.dim, self.degree - 1, order);
        let mut full = Vec::with_capacity(self.degree);
        for (slot, idx) in increasing(self.dim, self.degree - 1).iter().enumerate() {
            let mut acc = Jet::zero(self.dim, order);
            for (m, xm) in x.iter().enumerate() {
                if xm.is_zero() || idx.contains(&m) {
                    continue;
                }
                full.clear();
                full.push(m);
                full.extend_from_slice(idx);
                acc += &(xm * &self.get(&full));
            }
            out.comps[slot] = acc;
        }
        Ok(out)
    }

    fn to_dense(&self) -> Vec<Jet> {
        let n = self.dim;
        let k = self.degree;
        let size = n.pow(k as u32);
        assert!(size <= DENSE_LIMIT, "dense expansion of a {k}-form in dimension {n} is too large");
        let order = self.order();
        let mut dense = vec![Jet::zero(n, order); size];
        let mut idx = vec![0usize; k];
        for (flat, slot) in dense.iter_mut().enumerate() {
            let mut rem = flat;
            for pos in (0..k).rev() {
                idx[pos] = rem % n;
                rem /= n;
            }
            if let Some((sorted, sign)) = sort_with_sign(&idx) {
                *slot = self.comps[rank(n, &sorted)].scale(sign);
            }
        }
        dense
    }

    /// `(M^* a)(e_{i₁}, …, e_{i_k}) = a(M e_{i₁}, …, M e_{i_k})`.
    ///
    /// `matrix[a * new_dim + i]` is the `a`-th component (in this form's
    /// chart) of the image of the `i`-th new basis vector.
    pub fn transform_slots(&self, matrix: &[Jet], new_dim: usize) -> FormJet {
        let n = self.dim;
        let k = self.degree;
        assert_eq!(matrix.len(), n * new_dim);
        let mat_order = matrix.iter().map(Jet::order).min().unwrap_or(MAX_ORDER);
        let order = self.order().min(mat_order);
        if k == 0 {
            return FormJet {
                dim: new_dim,
                degree: 0,
                comps: vec![self.comps[0].truncate(order)],
            };
        }
        let dense = transform_dense(self.to_dense(), k, n, matrix, new_dim, order);
        let comps = increasing(new_dim, k)
            .iter()
            .map(|idx| {
                let flat = idx.iter().fold(0, |acc, &i| acc * new_dim + i);
                dense[flat].truncate(order)
            })
            .collect();
        FormJet {
            dim: new_dim,
            degree: k,
            comps,
        }
    }
}

/// Contract every slot of a dense `n_old^k` array with `matrix`, where
/// `matrix[a * n_new + i]` is the `a`-th old component of the `i`-th new vector.
pub(crate) fn transform_dense(mut dense: Vec<Jet>, k: usize, n_old: usize, matrix: &[Jet], n_new: usize, order: usize) -> Vec<Jet> {
    let mut dims = vec![n_old; k];
    for slot in 0..k {
        let mut new_dims = dims.clone();
        new_dims[slot] = n_new;
        let size: usize = new_dims.iter().product();
        let mut next = vec![Jet::zero(n_new, order); size];
        let stride_old: usize = dims[slot + 1..].iter().product();
        let stride_new: usize = new_dims[slot + 1..].iter().product();
        let outer: usize = dims[..slot].iter().product();
        for o in 0..outer {
            for i in 0..n_new {
                for a in 0..n_old {
                    let m = &matrix[a * n_new + i];
                    if m.is_zero() {
                        continue;
                    }
                    for inner in 0..stride_old {
                        let src = &dense[(o * n_old + a) * stride_old + inner];
                        if src.is_zero() {
                            continue;
                        }
                        let dst = &mut next[(o * n_new + i) * stride_new + inner];
                        *dst += &(m * src);
                    }
                }
            }
        }
        dense = next;
        dims = new_dims;
    }
    dense
}

type FormEval = dyn Fn(&[f64], usize) -> Result<FormJet, FieldError> + Send + Sync;

/// A differential form on a chart.
#[derive(Clone)]
pub struct DifferentialForm {
    dim: usize,
    degree: usize,
    eval: Arc<FormEval>,
}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DifferentialForm(degree = {}, dim = {})", self.degree, self.dim)
    }
}

impl DifferentialForm {
    pub fn from_eval(
        dim: usize,
        degree: usize,
        eval: impl Fn(&[f64], usize) -> Result<FormJet, FieldError> + Send + Sync + 'static,
    ) -> Self {
        assert!(degree <= dim, "degree {degree} exceeds dimension {dim}");
        DifferentialForm {
            dim,
            degree,
            eval: Arc::new(eval),
        }
    }

    /// Form whose increasing components are given by an expression in the
    /// coordinate functions.
    pub fn from_expr(dim: usize, degree: usize, expr: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static) -> Self {
        DifferentialForm::from_eval(dim, degree, move |p, order| {
            Ok(FormJet::from_components(dim, degree, expr(&Jet::seeds(p, order))))
        })
    }

    /// Sum of `coefficient · dx_{idx}` terms; indices may be unordered.
    pub fn from_terms(dim: usize, degree: usize, terms: Vec<(Vec<usize>, ScalarField)>) -> Self {
        DifferentialForm::from_eval(dim, degree, move |p, order| {
            let mut out = FormJet::zero(dim, degree, order);
            for (idx, f) in &terms {
                if let Some((sorted, sign)) = sort_with_sign(idx) {
                    let v = (f.eval)(p, order)?;
                    *out.component_mut(&sorted) += &v.scale(sign);
                }
            }
            Ok(out)
        })
    }

    /// The constant coordinate form `dx_{i₁} ∧ … ∧ dx_{i_k}`.
    pub fn coordinate(dim: usize, idx: &[usize]) -> Self {
        DifferentialForm::from_terms(dim, idx.len(), vec![(idx.to_vec(), ScalarField::constant(dim, 1.0))])
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        DifferentialForm::from_eval(dim, degree, move |_, order| Ok(FormJet::zero(dim, degree, order)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval_order(&self, p: &[f64], order: usize) -> Result<FormJet, FieldError> {
        check_point(self.dim, p)?;
        let v = (self.eval)(p, order)?;
        if v.comps.iter().any(|c| !c.is_finite()) {
            return Err(FieldError::NonFinite { point: p.to_vec() });
        }
        Ok(v)
    }

    pub fn eval(&self, p: &[f64]) -> Result<FormJet, FieldError> {
        self.eval_order(p, MAX_ORDER)
    }

    /// Coefficient field of one increasing component.
    pub fn component(&self, increasing_idx: &[usize]) -> ScalarField {
        let this = self.clone();
        let idx = increasing_idx.to_vec();
        ScalarField::from_eval(self.dim, move |p, order| Ok((this.eval)(p, order)?.component(&idx).clone()))
    }

    pub fn wedge(&self, other: &DifferentialForm) -> Result<DifferentialForm, FieldError> {
        if self.dim != other.dim {
            return Err(FieldError::DimensionMismatch {
                context: "wedge",
                left: self.dim,
                right: other.dim,
            });
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(FieldError::Degree {
                context: "wedge",
                detail: format!("degree {degree} exceeds chart dimension {}", self.dim),
            });
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(DifferentialForm::from_eval(self.dim, degree, move |p, order| {
            (a.eval)(p, order)?.wedge(&(b.eval)(p, order)?)
        }))
    }

    pub fn exterior_derivative(&self) -> Result<DifferentialForm, FieldError> {
        if self.degree == self.dim {
            return Err(FieldError::Degree {
                context: "exterior derivative",
                detail: format!("a top-degree form in dimension {} has no derivative", self.dim),
            });
        }
        let a = self.clone();
        Ok(DifferentialForm::from_eval(self.dim, self.degree + 1, move |p, order| {
            (a.eval)(p, order)?.exterior_derivative()
        }))
    }

    pub fn interior_product(&self, x: &TensorField) -> Result<DifferentialForm, FieldError> {
        if x.contravariant() != 1 || x.covariant() != 0 {
            return Err(FieldError::Degree {
                context: "interior product",
                detail: "expected a vector field".into(),
            });
        }
        if self.degree == 0 {
            return Err(FieldError::Degree {
                context: "interior product",
                detail: "cannot contract a 0-form".into(),
            });
        }
        if x.dim() != self.dim {
            return Err(FieldError::DimensionMismatch {
                context: "interior product",
                left: self.dim,
                right: x.dim(),
            });
        }
        let (a, v) = (self.clone(), x.clone());
        Ok(DifferentialForm::from_eval(self.dim, self.degree - 1, move |p, order| {
            let vj = v.eval_order(p, order)?;
            (a.eval)(p, order)?.interior(vj.components())
        }))
    }

    pub fn add(&self, other: &DifferentialForm) -> DifferentialForm {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        let (a, b) = (self.clone(), other.clone());
        DifferentialForm::from_eval(self.dim, self.degree, move |p, order| {
            Ok((a.eval)(p, order)?.add(&(b.eval)(p, order)?))
        })
    }

    pub fn sub(&self, other: &DifferentialForm) -> DifferentialForm {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        let (a, b) = (self.clone(), other.clone());
        DifferentialForm::from_eval(self.dim, self.degree, move |p, order| {
            Ok((a.eval)(p, order)?.sub(&(b.eval)(p, order)?))
        })
    }

    pub fn scale(&self, s: f64) -> DifferentialForm {
        let a = self.clone();
        DifferentialForm::from_eval(self.dim, self.degree, move |p, order| Ok((a.eval)(p, order)?.scale(s)))
    }

    /// `(T^* a)(v₁,…) = a(T v₁, …)` for a (1,1) tensor field `T`.
    pub fn transform_slots(&self, t: &TensorField) -> Result<DifferentialForm, FieldError> {
        if t.contravariant() != 1 || t.covariant() != 1 || t.dim() != self.dim {
            return Err(FieldError::Degree {
                context: "slot transform",
                detail: "expected a (1,1) tensor on the same chart".into(),
            });
        }
        let (a, t) = (self.clone(), t.clone());
        let n = self.dim;
        Ok(DifferentialForm::from_eval(self.dim, self.degree, move |p, order| {
            let tj = t.eval_order(p, order)?;
            Ok((a.eval)(p, order)?.transform_slots(tj.components(), n))
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dx(n: usize, idx: &[usize]) -> FormJet {
        DifferentialForm::coordinate(n, idx).eval(&vec![0.3; n]).unwrap()
    }

    #[test]
    fn wedge_repeated_factor_vanishes() {
        let a = dx(4, &[0]);
        assert_eq!(a.wedge(&a).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn wedge_anticommutes_on_one_forms() {
        let a = dx(4, &[0]);
        let b = dx(4, &[1]);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        assert_eq!(ab.add(&ba).max_abs(), 0.0);
        assert_eq!(ab.value(&[0, 1]), 1.0);
    }

    #[test]
    fn four_form_on_coordinate_frame_matches_permutation_sum() {
        let a = dx(4, &[0, 1]);
        let b = dx(4, &[2, 3]);
        let w = a.wedge(&b).unwrap();
        // brute force: Σ_σ sign(σ) Π (dx_{τ(i)})(∂_{σ(i)}) with τ = identity
        let mut perms = vec![];
        permute(&mut vec![0, 1, 2, 3], 0, &mut perms);
        let brute: f64 = perms
            .iter()
            .map(|p| {
                let sign = sort_with_sign(p).unwrap().1;
                let hits = p.iter().enumerate().all(|(slot, &v)| slot == v);
                if hits {
                    sign
                } else {
                    0.0
                }
            })
            .sum();
        assert_eq!(brute, 1.0);
        assert_eq!(w.value(&[0, 1, 2, 3]), brute);
    }

    fn permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == v.len() {
            out.push(v.clone());
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, out);
            v.swap(k, i);
        }
    }

    #[test]
    fn d_of_constant_and_linear_forms() {
        let c = DifferentialForm::from_terms(4, 2, vec![(vec![0, 1], ScalarField::constant(4, 3.5))]);
        assert_eq!(c.exterior_derivative().unwrap().eval(&[0.1, 0.2, 0.3, 0.4]).unwrap().max_abs(), 0.0);
        let a = DifferentialForm::from_terms(4, 1, vec![(vec![1], ScalarField::coordinate(4, 0))]);
        let da = a.exterior_derivative().unwrap().eval(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(da.value(&[0, 1]), 1.0);
        assert_eq!(da.max_abs(), 1.0);
    }

    #[test]
    fn interior_of_coordinate_two_form() {
        let a = dx(4, &[0, 1]);
        let e0: Vec<Jet> = (0..4).map(|i| Jet::constant(4, 3, if i == 0 { 1.0 } else { 0.0 })).collect();
        let i = a.interior(&e0).unwrap();
        assert_eq!(i.values(), vec![0.0, 1.0, 0.0, 0.0]);
        let scalar = DifferentialForm::zero(4, 0).eval(&[0.0; 4]).unwrap();
        assert!(matches!(scalar.interior(&e0), Err(FieldError::Degree { .. })));
    }

    #[test]
    fn wedge_dimension_mismatch_is_reported() {
        let a = DifferentialForm::coordinate(4, &[0]);
        let b = DifferentialForm::coordinate(5, &[0]);
        let err = a.wedge(&b).unwrap_err();
        assert_eq!(
            err,
            FieldError::DimensionMismatch {
                context: "wedge",
                left: 4,
                right: 5
            }
        );
    }

    #[test]
    fn truncation_is_an_error() {
        let a = DifferentialForm::from_terms(3, 0, vec![(vec![], ScalarField::coordinate(3, 0))]);
        let ddd = a
            .exterior_derivative()
            .and_then(|f| f.exterior_derivative())
            .and_then(|f| f.exterior_derivative())
            .unwrap();
        // degree 3 after three d's; the third derivative needs an order-3 base
        assert!(ddd.eval_order(&[0.0, 0.0, 0.0], 2).is_err());
        assert!(ddd.eval_order(&[0.0, 0.0, 0.0], 3).is_ok());
    }

    #[test]
    fn slot_transform_identity() {
        let n = 4;
        let a = DifferentialForm::from_expr(n, 2, |x| {
            increasing(4, 2)
                .iter()
                .map(|idx| &x[idx[0]] * &x[idx[1]] + 1.0)
                .collect()
        });
        let v = a.eval(&[0.2, -0.4, 1.3, 0.7]).unwrap();
        let id: Vec<Jet> = (0..n * n)
            .map(|f| Jet::constant(n, 3, if f / n == f % n { 1.0 } else { 0.0 }))
            .collect();
        let w = v.transform_slots(&id, n);
        assert_eq!(v, w);
    }
}
