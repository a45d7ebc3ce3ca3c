use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::{dc_jet, fundamental_form_jet, HermitianError, HermitianStructure, STRUCTURE_TOL};
use crate::exterior::{ChartPoint, FormJet};

/// Residuals of the generalized Kähler conditions over a point set.
#[derive(Clone, Debug, Serialize)]
pub struct GeneralizedKahlerReport {
    pub points: usize,
    /// `max |dᶜ₊ω₊ + dᶜ₋ω₋|`
    pub torsion_identity: f64,
    /// `max |ddᶜ₊ω₊|`
    pub pluriclosed: f64,
    /// `max |J₊J₋ − J₋J₊|`
    pub commutator: f64,
    /// `ω₊^m / ω₋^m` at each point, `m` the complex dimension.
    pub orientation_ratios: Vec<f64>,
}

impl GeneralizedKahlerReport {
    /// The common sign of the orientation ratios, if they share one.
    pub fn orientation(&self) -> Option<f64> {
        let first = self.orientation_ratios.first()?.signum();
        self.orientation_ratios
            .iter()
            .all(|r| r.signum() == first && r.abs() > 0.0)
            .then_some(first)
    }
}

fn top_power(omega: &FormJet) -> Result<f64, HermitianError> {
    let m = omega.dim() / 2;
    let values = omega.components().iter().map(|c| c.truncate(0)).collect();
    let omega = &FormJet::from_components(omega.dim(), 2, values);
    let mut acc = omega.clone();
    for _ in 1..m {
        acc = acc.wedge(omega)?;
    }
    Ok(acc.components()[0].value())
}

struct PointGk {
    torsion_identity: f64,
    pluriclosed: f64,
    commutator: f64,
    ratio: f64,
}

fn at_point(plus: &HermitianStructure, minus: &HermitianStructure, p: &[f64]) -> Result<PointGk, HermitianError> {
    plus.validate_at(p)?;
    minus.validate_at(p)?;
    let (gp, jp) = plus.eval_order(p, 3)?;
    let (gm, jm) = minus.eval_order(p, 3)?;
    let metric_gap = (gp.matrix_values() - gm.matrix_values()).amax();
    if metric_gap > STRUCTURE_TOL {
        return Err(HermitianError::Mismatch(format!(
            "the two structures carry different metrics at {p:?} (gap {metric_gap:e})"
        )));
    }
    let wp = fundamental_form_jet(&gp, &jp);
    let wm = fundamental_form_jet(&gm, &jm);
    let dcp = dc_jet(&wp, &jp)?;
    let dcm = dc_jet(&wm, &jm)?;
    let torsion_identity = dcp.add(&dcm).max_abs();
    let pluriclosed = dcp.exterior_derivative()?.max_abs();
    let (a, b): (DMatrix<f64>, DMatrix<f64>) = (jp.matrix_values(), jm.matrix_values());
    let commutator = (&a * &b - &b * &a).amax();
    let top_p = top_power(&wp)?;
    let top_m = top_power(&wm)?;
    Ok(PointGk {
        torsion_identity,
        pluriclosed,
        commutator,
        ratio: top_p / top_m,
    })
}

/// Check `dᶜ₊ω₊ = −dᶜ₋ω₋` and `ddᶜ₊ω₊ = 0` for two complex structures sharing one metric.
pub fn generalized_kahler_check(
    plus: &HermitianStructure,
    minus: &HermitianStructure,
    points: &[ChartPoint],
) -> Result<GeneralizedKahlerReport, HermitianError> {
    if plus.dim() != minus.dim() {
        return Err(HermitianError::Mismatch(format!(
            "chart dimensions differ: {} vs {}",
            plus.dim(),
            minus.dim()
        )));
    }
    let per: Vec<PointGk> = points
        .par_iter()
        .map(|p| at_point(plus, minus, p.coords()))
        .collect::<Result<_, _>>()?;
    let max = |f: fn(&PointGk) -> f64| per.iter().map(f).fold(0.0, f64::max);
    Ok(GeneralizedKahlerReport {
        points: points.len(),
        torsion_identity: max(|x| x.torsion_identity),
        pluriclosed: max(|x| x.pluriclosed),
        commutator: max(|x| x.commutator),
        orientation_ratios: per.iter().map(|x| x.ratio).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{Sampler, TensorField};
    use crate::models::{self, Variant};

    #[test]
    fn kahler_pair_is_trivially_generalized_kahler() {
        let hs = models::flat_t4();
        let rep = generalized_kahler_check(&hs, &hs, &hs.sample_points(0, 5)).unwrap();
        assert_eq!(rep.torsion_identity, 0.0);
        assert_eq!(rep.pluriclosed, 0.0);
        assert_eq!(rep.commutator, 0.0);
        assert_eq!(rep.orientation(), Some(1.0));
    }

    #[test]
    fn hopf_pair_has_opposite_orientations() {
        let plus = models::hopf_c2(Variant::Plus);
        let minus = models::hopf_c2(Variant::Minus);
        let rep = generalized_kahler_check(&plus, &minus, &minus.sample_points(6, 20)).unwrap();
        assert!(rep.torsion_identity < 1e-8);
        assert!(rep.pluriclosed < 1e-8);
        assert!(rep.commutator < 1e-10);
        assert_eq!(rep.orientation(), Some(-1.0));
    }

    #[test]
    fn different_metrics_are_rejected() {
        let a = models::euclidean(2);
        let g = TensorField::constant(2, 0, 2, vec![2.0, 0.0, 0.0, 2.0]);
        let b = HermitianStructure::new("scaled", g, a.complex_structure().clone(), None, Sampler::unit_box(2)).unwrap();
        let pts = a.sample_points(0, 2);
        assert!(matches!(generalized_kahler_check(&a, &b, &pts), Err(HermitianError::Mismatch(_))));
    }
}
