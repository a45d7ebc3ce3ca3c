//! Pointwise exterior calculus over real coordinate charts.
//!
//! Every field here is a deterministic function from a chart point to jets.
//! Leaf fields evaluate their coefficient expressions on coordinate seeds of a
//! requested base order; derived fields (exterior derivatives, brackets,
//! pullbacks) consume one order per derivative they take. Asking for more
//! derivatives than the base order provides is an error, never silent
//! truncation.

pub mod basis;
mod chart;
mod form;
mod map;
mod tensor;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::jet::{Jet, JetError, MAX_ORDER};

pub use chart::{ChartPoint, Locus, SampleBlock, Sampler};
pub use form::{DifferentialForm, FormJet};
pub use map::{MapJet, SmoothMap};
pub use tensor::{lie_bracket, lie_bracket_jets, TensorField, TensorJet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("non-finite value encountered at point {point:?}")]
    NonFinite { point: Vec<f64> },
    #[error("point {point:?} lies in the excluded locus ({locus})")]
    Excluded { point: Vec<f64>, locus: String },
    #[error(transparent)]
    Truncated(#[from] JetError),
    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },
    #[error("degree error in {context}: {detail}")]
    Degree { context: &'static str, detail: String },
}

type ScalarEval = dyn Fn(&[f64], usize) -> Result<Jet, FieldError> + Send + Sync;

/// A smooth coefficient function on a chart.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    eval: Arc<ScalarEval>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField(dim = {})", self.dim)
    }
}

impl ScalarField {
    /// Field given by an expression in the coordinate functions.
    pub fn from_expr(dim: usize, expr: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static) -> Self {
        ScalarField {
            dim,
            eval: Arc::new(move |p, order| Ok(expr(&Jet::seeds(p, order)))),
        }
    }

    pub fn from_eval(dim: usize, eval: impl Fn(&[f64], usize) -> Result<Jet, FieldError> + Send + Sync + 'static) -> Self {
        ScalarField {
            dim,
            eval: Arc::new(eval),
        }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        ScalarField::from_expr(dim, move |x| Jet::constant(x.len(), x[0].order(), value))
    }

    pub fn coordinate(dim: usize, i: usize) -> Self {
        ScalarField::from_expr(dim, move |x| x[i].clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Jet at `p` with base order `order`.
    pub fn eval_order(&self, p: &[f64], order: usize) -> Result<Jet, FieldError> {
        check_point(self.dim, p)?;
        let j = (self.eval)(p, order)?;
        if !j.is_finite() {
            return Err(FieldError::NonFinite { point: p.to_vec() });
        }
        Ok(j)
    }

    /// Full third-order jet at `p`.
    pub fn eval(&self, p: &[f64]) -> Result<Jet, FieldError> {
        self.eval_order(p, MAX_ORDER)
    }
}

pub(crate) fn check_point(dim: usize, p: &[f64]) -> Result<(), FieldError> {
    if p.len() != dim {
        return Err(FieldError::DimensionMismatch {
            context: "chart point",
            left: dim,
            right: p.len(),
        });
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(FieldError::NonFinite { point: p.to_vec() });
    }
    Ok(())
}
