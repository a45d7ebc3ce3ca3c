use std::fmt;
use std::sync::Arc;

use super::form::transform_dense;
use super::{check_point, DifferentialForm, FieldError, FormJet, TensorField, TensorJet};
use crate::jet::{compose_many, Jet, MAX_ORDER};

/// Jets of each target coordinate of a map, expanded in the source variables.
#[derive(Clone, Debug, PartialEq)]
pub struct MapJet {
    src_dim: usize,
    comps: Vec<Jet>,
}

impl MapJet {
    pub fn new(src_dim: usize, comps: Vec<Jet>) -> Self {
        assert!(comps.iter().all(|c| c.dim() == src_dim));
        MapJet { src_dim, comps }
    }

    pub fn target_dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    /// Image point (order-zero part of the jet).
    pub fn point(&self) -> Vec<f64> {
        self.comps.iter().map(Jet::value).collect()
    }

    /// `jac[a * src + i] = ∂_i F^a`, one order below the map jet.
    pub fn jacobian(&self) -> Result<Vec<Jet>, FieldError> {
        let mut out = Vec::with_capacity(self.comps.len() * self.src_dim);
        for c in &self.comps {
            for i in 0..self.src_dim {
                out.push(c.derivative(i)?);
            }
        }
        Ok(out)
    }

    pub fn jacobian_values(&self) -> Result<nalgebra::DMatrix<f64>, FieldError> {
        let jac = self.jacobian()?;
        let (m, n) = (self.comps.len(), self.src_dim);
        Ok(nalgebra::DMatrix::from_fn(m, n, |a, i| jac[a * n + i].value()))
    }
}

type MapEval = dyn Fn(&[f64], usize) -> Result<MapJet, FieldError> + Send + Sync;

/// A smooth map between charts.
#[derive(Clone)]
pub struct SmoothMap {
    src: usize,
    tgt: usize,
    eval: Arc<MapEval>,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothMap({} -> {})", self.src, self.tgt)
    }
}

impl SmoothMap {
    pub fn from_expr(src: usize, tgt: usize, expr: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static) -> Self {
        SmoothMap {
            src,
            tgt,
            eval: Arc::new(move |p, order| {
                let comps = expr(&Jet::seeds(p, order));
                assert_eq!(comps.len(), tgt, "map expression returned wrong target dimension");
                Ok(MapJet::new(src, comps))
            }),
        }
    }

    pub fn identity(dim: usize) -> Self {
        SmoothMap::from_expr(dim, dim, |x| x.to_vec())
    }

    /// `x ↦ M x` with `matrix` given row-major (`tgt × src`).
    pub fn linear(src: usize, tgt: usize, matrix: Vec<f64>) -> Self {
        assert_eq!(matrix.len(), src * tgt);
        SmoothMap::from_expr(src, tgt, move |x| {
            let order = x[0].order();
            (0..tgt)
                .map(|a| {
                    let mut acc = Jet::zero(src, order);
                    for i in 0..src {
                        let m = matrix[a * src + i];
                        if m != 0.0 {
                            acc += &x[i].scale(m);
                        }
                    }
                    acc
                })
                .collect()
        })
    }

    pub fn source_dim(&self) -> usize {
        self.src
    }

    pub fn target_dim(&self) -> usize {
        self.tgt
    }

    pub fn eval_order(&self, p: &[f64], order: usize) -> Result<MapJet, FieldError> {
        check_point(self.src, p)?;
        let v = (self.eval)(p, order)?;
        if v.comps.iter().any(|c| !c.is_finite()) {
            return Err(FieldError::NonFinite { point: p.to_vec() });
        }
        Ok(v)
    }

    pub fn eval(&self, p: &[f64]) -> Result<MapJet, FieldError> {
        self.eval_order(p, MAX_ORDER)
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &SmoothMap) -> Result<SmoothMap, FieldError> {
        if inner.tgt != self.src {
            return Err(FieldError::DimensionMismatch {
                context: "map composition",
                left: inner.tgt,
                right: self.src,
            });
        }
        let (outer, inner) = (self.clone(), inner.clone());
        Ok(SmoothMap {
            src: inner.src,
            tgt: outer.tgt,
            eval: Arc::new(move |p, order| {
                let f = (inner.eval)(p, order)?;
                let g = (outer.eval)(&f.point(), order)?;
                Ok(MapJet::new(inner.src, compose_many(&g.comps, &f.comps)))
            }),
        })
    }

    fn chart_check(&self, what: &'static str, dim: usize) -> Result<(), FieldError> {
        if dim != self.tgt {
            return Err(FieldError::DimensionMismatch {
                context: what,
                left: self.tgt,
                right: dim,
            });
        }
        Ok(())
    }

    /// `(f^*a)(v₁,…,v_k) = a(df v₁, …, df v_k)`.
    pub fn pullback(&self, a: &DifferentialForm) -> Result<DifferentialForm, FieldError> {
        self.chart_check("pullback", a.dim())?;
        if a.degree() > self.src {
            return Err(FieldError::Degree {
                context: "pullback",
                detail: format!("a {}-form cannot be pulled back to dimension {}", a.degree(), self.src),
            });
        }
        let (map, form) = (self.clone(), a.clone());
        let (src, degree) = (self.src, a.degree());
        Ok(DifferentialForm::from_eval(src, degree, move |p, order| {
            let f = (map.eval)(p, order)?;
            let at_image = form.eval_order(&f.point(), order)?;
            let composed = compose_many(at_image.components(), &f.comps);
            let composed = FormJet::from_components(map.tgt, degree, composed);
            if degree == 0 {
                return Ok(FormJet::from_components(src, 0, composed.components().to_vec()));
            }
            let jac = f.jacobian()?;
            Ok(composed.transform_slots(&jac, src))
        }))
    }

    /// Pullback of a covariant `(0, s)` tensor field.
    pub fn pullback_tensor(&self, t: &TensorField) -> Result<TensorField, FieldError> {
        self.chart_check("tensor pullback", t.dim())?;
        if t.contravariant() != 0 {
            return Err(FieldError::Degree {
                context: "tensor pullback",
                detail: "only covariant tensors pull back".into(),
            });
        }
        let (map, field) = (self.clone(), t.clone());
        let (src, tgt, s) = (self.src, self.tgt, t.covariant());
        Ok(TensorField::from_eval(src, 0, s, move |p, order| {
            let f = (map.eval)(p, order)?;
            let at_image = field.eval_order(&f.point(), order)?;
            let composed = compose_many(at_image.components(), &f.comps);
            if s == 0 {
                return Ok(TensorJet::new(src, 0, 0, composed));
            }
            let jac = f.jacobian()?;
            let out_order = composed.iter().chain(&jac).map(Jet::order).min().unwrap_or(0);
            Ok(TensorJet::new(src, 0, s, transform_dense(composed, s, tgt, &jac, src, out_order)))
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::ScalarField;

    #[test]
    fn identity_pullback_is_identity() {
        let a = DifferentialForm::from_expr(3, 2, |x| vec![x[0].sin(), &x[1] * &x[2], x[0].exp()]);
        let id = SmoothMap::identity(3);
        let p = [0.4, -0.2, 1.1];
        let lhs = id.pullback(&a).unwrap().eval(&p).unwrap();
        let rhs = a.eval(&p).unwrap();
        for (l, r) in lhs.components().iter().zip(rhs.components()) {
            for (x, y) in l.coeffs().iter().zip(r.coeffs()) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn polar_pullback_of_area_form() {
        // (r, θ) ↦ (r cos θ, r sin θ); pullback of dx∧dy is r dr∧dθ
        let polar = SmoothMap::from_expr(2, 2, |x| vec![&x[0] * &x[1].cos(), &x[0] * &x[1].sin()]);
        let area = DifferentialForm::coordinate(2, &[0, 1]);
        let pulled = polar.pullback(&area).unwrap().eval(&[1.7, 0.3]).unwrap();
        assert!((pulled.value(&[0, 1]) - 1.7).abs() < 1e-14);
    }

    #[test]
    fn pullback_of_function_is_composition() {
        let f = DifferentialForm::from_terms(2, 0, vec![(vec![], ScalarField::from_expr(2, |x| &x[0] * &x[1]))]);
        let m = SmoothMap::linear(2, 2, vec![2.0, 0.0, 0.0, 3.0]);
        let v = m.pullback(&f).unwrap().eval(&[1.0, 1.0]).unwrap();
        assert_eq!(v.components()[0].value(), 6.0);
    }

    #[test]
    fn chart_mismatch_rejected() {
        let a = DifferentialForm::coordinate(3, &[0]);
        let m = SmoothMap::identity(2);
        assert!(matches!(m.pullback(&a), Err(FieldError::DimensionMismatch { .. })));
    }
}
