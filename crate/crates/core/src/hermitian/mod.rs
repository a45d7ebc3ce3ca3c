//! Hermitian structures, the Gauduchon line of connections, Bismut torsion and
//! curvature, and the condition checkers built on them.
//!
//! Sign conventions used throughout:
//!
//! * `ω(X, Y) = g(JX, Y)`
//! * `dᶜa = −(da)(J·, …, J·)`, so the Bismut torsion is `H = −dᶜω`
//! * `R(X, Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]}` and `R(X,Y,Z,W) = g(R(X,Y)Z, W)`
//! * connection coefficients: `∇_{∂_i} ∂_j = Γ^k_{ij} ∂_k`

mod checks;
mod connection;
mod curvature;
mod gk;
mod matrix;

use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::exterior::{ChartPoint, DifferentialForm, FieldError, FormJet, Locus, Sampler, TensorField, TensorJet};
use crate::jet::Jet;

pub use checks::{condition_report, kernel_distribution_rank, CheckName, ConditionReport, PointGeometry, Residual};
pub use connection::{gauduchon_connection, levi_civita, ConnectionKind, ConnectionValue};
pub use curvature::{
    bismut_curvature_via_formula, bismut_ricci, bismut_ricci_with_frame, curvature, orthonormal_frame, CurvatureValue,
    FormulaCurvature,
};
pub use gk::{generalized_kahler_check, GeneralizedKahlerReport};
pub(crate) use matrix::mat_mul as mat_mul_jets;

/// Tolerance used when validating `J² = −Id` and `g(J·,J·) = g`.
pub const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HermitianError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("metric is singular at {point:?}")]
    SingularMetric { point: Vec<f64> },
    #[error("metric is not symmetric at {point:?} (residual {residual:e})")]
    NotSymmetric { point: Vec<f64>, residual: f64 },
    #[error("metric is not positive definite at {point:?} (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { point: Vec<f64>, min_eigenvalue: f64 },
    #[error("J² ≠ −Id at {point:?} (residual {residual:e})")]
    NotAlmostComplex { point: Vec<f64>, residual: f64 },
    #[error("metric is not J-invariant at {point:?} (residual {residual:e})")]
    Incompatible { point: Vec<f64>, residual: f64 },
    #[error("structure mismatch: {0}")]
    Mismatch(String),
}

/// A chart with a Riemannian metric and an orthogonal almost-complex structure.
#[derive(Clone)]
pub struct HermitianStructure {
    name: String,
    dim: usize,
    metric: TensorField,
    complex: TensorField,
    locus: Option<Locus>,
    sampler: Sampler,
}

impl fmt::Debug for HermitianStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianStructure")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("locus", &self.locus)
            .finish()
    }
}

impl HermitianStructure {
    pub fn new(
        name: impl Into<String>,
        metric: TensorField,
        complex: TensorField,
        locus: Option<Locus>,
        sampler: Sampler,
    ) -> Result<Self, HermitianError> {
        let dim = metric.dim();
        if dim % 2 != 0 {
            return Err(HermitianError::Mismatch(format!("odd chart dimension {dim}")));
        }
        if (metric.contravariant(), metric.covariant()) != (0, 2) {
            return Err(HermitianError::Mismatch("metric must be a (0,2) tensor".into()));
        }
        if (complex.contravariant(), complex.covariant()) != (1, 1) || complex.dim() != dim {
            return Err(HermitianError::Mismatch("J must be a (1,1) tensor on the metric's chart".into()));
        }
        if sampler.dim != dim {
            return Err(HermitianError::Mismatch("sampler dimension differs from chart".into()));
        }
        Ok(HermitianStructure {
            name: name.into(),
            dim,
            metric,
            complex,
            locus,
            sampler,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &TensorField {
        &self.metric
    }

    pub fn complex_structure(&self) -> &TensorField {
        &self.complex
    }

    pub fn locus(&self) -> Option<&Locus> {
        self.locus.as_ref()
    }

    pub fn sampler(&self) -> &Sampler {
        &self.sampler
    }

    /// The same metric with a different almost-complex structure.
    pub fn with_complex_structure(&self, name: impl Into<String>, complex: TensorField) -> Result<Self, HermitianError> {
        HermitianStructure::new(name, self.metric.clone(), complex, self.locus.clone(), self.sampler.clone())
    }

    /// Seeded sample points respecting the excluded locus.
    pub fn sample_points(&self, seed: u64, count: usize) -> Vec<ChartPoint> {
        self.sampler.sample(seed, count, self.locus.as_ref())
    }

    pub(crate) fn admit(&self, p: &[f64]) -> Result<(), HermitianError> {
        if let Some(locus) = &self.locus {
            if !locus.admits(p) {
                return Err(FieldError::Excluded {
                    point: p.to_vec(),
                    locus: locus.description.clone(),
                }
                .into());
            }
        }
        Ok(())
    }

    /// Metric and complex-structure jets at `p`, with the locus enforced.
    pub fn eval_order(&self, p: &[f64], order: usize) -> Result<(TensorJet, TensorJet), HermitianError> {
        self.admit(p)?;
        Ok((self.metric.eval_order(p, order)?, self.complex.eval_order(p, order)?))
    }

    /// Check the pointwise type invariants at `p`.
    pub fn validate_at(&self, p: &[f64]) -> Result<(), HermitianError> {
        let (g, j) = self.eval_order(p, 0)?;
        let g = g.matrix_values();
        let j = j.matrix_values();
        let point = p.to_vec();
        let n = self.dim;
        let asym = (&g - g.transpose()).amax();
        if asym > STRUCTURE_TOL * g.amax().max(1.0) {
            return Err(HermitianError::NotSymmetric { point, residual: asym });
        }
        let eig = nalgebra::SymmetricEigen::new(g.clone()).eigenvalues;
        let min = eig.min();
        if min.is_nan() || min <= 0.0 {
            return Err(HermitianError::NotPositiveDefinite {
                point,
                min_eigenvalue: min,
            });
        }
        let jj = (&j * &j + DMatrix::identity(n, n)).amax();
        if jj > STRUCTURE_TOL {
            return Err(HermitianError::NotAlmostComplex { point, residual: jj });
        }
        // g(JX, JY) = (Jᵀ g J)_{XY}
        let compat = (j.transpose() * &g * &j - &g).amax();
        if compat > STRUCTURE_TOL * g.amax().max(1.0) {
            return Err(HermitianError::Incompatible { point, residual: compat });
        }
        Ok(())
    }
}

/// `ω(X, Y) = g(JX, Y)`.
pub fn fundamental_form(hs: &HermitianStructure) -> DifferentialForm {
    let this = hs.clone();
    let n = hs.dim;
    DifferentialForm::from_eval(n, 2, move |p, order| {
        let (g, j) = this.eval_order(p, order).map_err(into_field_error)?;
        Ok(fundamental_form_jet(&g, &j))
    })
}

pub(crate) fn fundamental_form_jet(g: &TensorJet, j: &TensorJet) -> FormJet {
    let n = g.dim();
    let order = g.order().min(j.order());
    let comps = crate::exterior::basis::increasing(n, 2)
        .iter()
        .map(|idx| {
            let (a, b) = (idx[0], idx[1]);
            let mut acc = Jet::zero(n, order);
            for m in 0..n {
                crate::jet::fma_into(&mut acc, j.get(&[m, a]), g.get(&[m, b]));
            }
            acc
        })
        .collect();
    FormJet::from_components(n, 2, comps)
}

/// `(dᶜa)(X₀,…,X_k) = −(da)(JX₀, …, JX_k)`.
pub fn dc_form(hs: &HermitianStructure, a: &DifferentialForm) -> Result<DifferentialForm, HermitianError> {
    if a.dim() != hs.dim {
        return Err(HermitianError::Mismatch(format!(
            "form lives on a {}-dimensional chart, structure on {}",
            a.dim(),
            hs.dim
        )));
    }
    let da = a.exterior_derivative()?;
    Ok(da.transform_slots(hs.complex_structure())?.scale(-1.0))
}

pub(crate) fn dc_jet(form: &FormJet, j: &TensorJet) -> Result<FormJet, FieldError> {
    Ok(form.exterior_derivative()?.transform_slots(j.components(), j.dim()).scale(-1.0))
}

/// Bismut torsion `H = −dᶜω = dω(J·, J·, J·)`.
pub fn torsion_3form(hs: &HermitianStructure) -> DifferentialForm {
    let this = hs.clone();
    DifferentialForm::from_eval(hs.dim, 3, move |p, order| {
        let (g, j) = this.eval_order(p, order).map_err(into_field_error)?;
        Ok(dc_jet(&fundamental_form_jet(&g, &j), &j)?.scale(-1.0))
    })
}

fn into_field_error(e: HermitianError) -> FieldError {
    match e {
        HermitianError::Field(f) => f,
        other => FieldError::Degree {
            context: "hermitian structure",
            detail: other.to_string(),
        },
    }
}

/// Nijenhuis tensor `N(X,Y) = [JX,JY] − J[JX,Y] − J[X,JY] − [X,Y]` on the
/// coordinate frame. Entry `[k * n² + i * n + j]` is `N(∂_i, ∂_j)^k`.
pub fn nijenhuis_tensor(hs: &HermitianStructure, p: &[f64]) -> Result<Vec<f64>, HermitianError> {
    let (_, j) = hs.eval_order(p, crate::jet::MAX_ORDER)?;
    Ok(nijenhuis_from_jet(&j)?)
}

pub(crate) fn nijenhuis_from_jet(j: &TensorJet) -> Result<Vec<f64>, FieldError> {
    use crate::exterior::lie_bracket_jets;
    let n = j.dim();
    let order = j.order();
    let coord = |i: usize| -> Vec<Jet> {
        (0..n)
            .map(|k| Jet::constant(n, order, if k == i { 1.0 } else { 0.0 }))
            .collect()
    };
    let jcol = |i: usize| -> Vec<Jet> { (0..n).map(|k| j.get(&[k, i]).clone()).collect() };
    let apply_j = |v: &[Jet]| -> Vec<f64> {
        (0..n)
            .map(|k| (0..n).map(|m| j.value(&[k, m]) * v[m].value()).sum())
            .collect()
    };
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            let t1 = lie_bracket_jets(&jcol(a), &jcol(b))?;
            let t2 = apply_j(&lie_bracket_jets(&jcol(a), &coord(b))?);
            let t3 = apply_j(&lie_bracket_jets(&coord(a), &jcol(b))?);
            let t4 = lie_bracket_jets(&coord(a), &coord(b))?;
            for k in 0..n {
                out[k * n * n + a * n + b] = t1[k].value() - t2[k] - t3[k] - t4[k].value();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn flat_t4_fundamental_form() {
        let hs = models::flat_t4();
        let w = fundamental_form(&hs).eval(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        for idx in crate::exterior::basis::increasing(4, 2) {
            let expected = match idx.as_slice() {
                [0, 1] => 1.0,
                [2, 3] => -1.0,
                _ => 0.0,
            };
            assert_eq!(w.component(idx).value(), expected, "{idx:?}");
        }
    }

    #[test]
    fn euclidean_plane_fundamental_form() {
        let hs = models::euclidean(2);
        let w = fundamental_form(&hs).eval(&[0.5, -0.5]).unwrap();
        assert_eq!(w.value(&[0, 1]), 1.0);
    }

    #[test]
    fn fundamental_form_is_j_invariant() {
        for hs in [models::hopf_c2(models::Variant::Minus), models::su2_r_chart()] {
            let w = fundamental_form(&hs);
            for p in hs.sample_points(3, 100) {
                let wj = w.eval(p.coords()).unwrap();
                let (_, j) = hs.eval_order(p.coords(), 0).unwrap();
                let rotated = wj.transform_slots(j.components(), hs.dim());
                assert!(rotated.sub(&wj).max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn kahler_torsion_vanishes() {
        let hs = models::flat_t4();
        let h = torsion_3form(&hs).eval(&[0.3; 4]).unwrap();
        assert_eq!(h.max_abs(), 0.0);
        let dc = dc_form(&hs, &fundamental_form(&hs)).unwrap().eval(&[0.3; 4]).unwrap();
        assert_eq!(dc.max_abs(), 0.0);
    }

    #[test]
    fn constant_and_standard_j_are_integrable() {
        let hs = models::flat_t4();
        assert!(nijenhuis_tensor(&hs, &[0.1; 4]).unwrap().iter().all(|&x| x == 0.0));
        for v in [models::Variant::Minus, models::Variant::Plus] {
            let hs = models::product_t4_hopf(v);
            for p in hs.sample_points(11, 20) {
                let n = nijenhuis_tensor(&hs, p.coords()).unwrap();
                assert!(n.iter().all(|x| x.abs() < 1e-10));
            }
        }
    }

    #[test]
    fn validation_rejects_bad_structures() {
        let n = 2;
        let g = TensorField::constant(n, 0, 2, vec![1.0, 0.0, 0.0, -1.0]);
        let j = TensorField::constant(n, 1, 1, vec![0.0, -1.0, 1.0, 0.0]);
        let hs = HermitianStructure::new("bad", g, j.clone(), None, Sampler::unit_box(2)).unwrap();
        assert!(matches!(hs.validate_at(&[0.0, 0.0]), Err(HermitianError::NotPositiveDefinite { .. })));

        let g = TensorField::constant(n, 0, 2, vec![1.0, 0.0, 0.0, 2.0]);
        let hs = HermitianStructure::new("bad", g, j, None, Sampler::unit_box(2)).unwrap();
        assert!(matches!(hs.validate_at(&[0.0, 0.0]), Err(HermitianError::Incompatible { .. })));

        let g = TensorField::constant(n, 0, 2, vec![1.0, 0.0, 0.0, 1.0]);
        let j = TensorField::constant(n, 1, 1, vec![1.0, 0.0, 0.0, 1.0]);
        let hs = HermitianStructure::new("bad", g, j, None, Sampler::unit_box(2)).unwrap();
        assert!(matches!(hs.validate_at(&[0.0, 0.0]), Err(HermitianError::NotAlmostComplex { .. })));
    }

    #[test]
    fn excluded_locus_is_enforced() {
        let hs = models::hopf_c2(models::Variant::Minus);
        let err = hs.eval_order(&[0.0; 4], 1).unwrap_err();
        assert!(matches!(err, HermitianError::Field(FieldError::Excluded { .. })));
    }
}
