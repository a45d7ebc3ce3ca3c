use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::connection::{connection, ConnectionKind};
use super::curvature::{covariant_derivative_3form, curvature_of, orthonormal_frame, ricci_from, CurvatureValue};
use super::{dc_jet, fundamental_form_jet, HermitianError, HermitianStructure};
use crate::exterior::ChartPoint;

/// The conditions reported by [`condition_report`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckName {
    Kahler,
    Skt,
    Cyt,
    Btp,
    Bianchi1,
    Type,
    Bkl,
}

impl CheckName {
    pub const ALL: [CheckName; 7] = [
        CheckName::Kahler,
        CheckName::Skt,
        CheckName::Cyt,
        CheckName::Btp,
        CheckName::Bianchi1,
        CheckName::Type,
        CheckName::Bkl,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Kahler => "KAHLER",
            CheckName::Skt => "SKT",
            CheckName::Cyt => "CYT",
            CheckName::Btp => "BTP",
            CheckName::Bianchi1 => "BIANCHI1",
            CheckName::Type => "TYPE",
            CheckName::Bkl => "BKL",
        }
    }

    pub fn parse(s: &str) -> Option<CheckName> {
        CheckName::ALL.into_iter().find(|c| c.as_str().eq_ignore_ascii_case(s))
    }

    /// First-derivative identities get the tighter default.
    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckName::Kahler | CheckName::Skt => 1e-8,
            _ => 1e-7,
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// All pointwise quantities the condition checkers consume.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub point: Vec<f64>,
    /// `max |dω|`
    pub d_omega: f64,
    /// `max |ddᶜω|`
    pub ddc_omega: f64,
    pub bismut_curvature: CurvatureValue,
    pub bismut_ricci: DMatrix<f64>,
    /// `(∇^B_i H)(a, b, c)`
    pub nabla_h: Vec<f64>,
    pub complex: DMatrix<f64>,
}

impl PointGeometry {
    pub fn compute(hs: &HermitianStructure, p: &[f64]) -> Result<Self, HermitianError> {
        hs.validate_at(p)?;
        let conn = connection(hs, ConnectionKind::Bismut, p)?;
        let (g, j) = (conn.metric(), conn.complex());
        let omega = fundamental_form_jet(g, j);
        let d_omega = omega.exterior_derivative()?.max_abs();
        let dc = dc_jet(&omega, j)?;
        let ddc_omega = dc.exterior_derivative()?.max_abs();
        let h = dc.scale(-1.0);
        let nabla_h = covariant_derivative_3form(&conn, &h)?;
        let r = curvature_of(&conn)?;
        let jm = j.matrix_values();
        let frame = orthonormal_frame(&g.matrix_values())?;
        let ricci = ricci_from(&r, &jm, &frame);
        Ok(PointGeometry {
            point: p.to_vec(),
            d_omega,
            ddc_omega,
            bismut_curvature: r,
            bismut_ricci: ricci,
            nabla_h,
            complex: jm,
        })
    }

    /// Largest cyclic sum `R(X,Y,Z,W) + R(Y,Z,X,W) + R(Z,X,Y,W)`.
    pub fn bianchi_defect(&self) -> f64 {
        let r = &self.bismut_curvature;
        let n = r.dim();
        let mut m: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        let s = r.get(x, y, z, w) + r.get(y, z, x, w) + r.get(z, x, y, w);
                        m = m.max(s.abs());
                    }
                }
            }
        }
        m
    }

    /// Largest `|R(X,Y,Z,W) − R(JX,JY,Z,W)|`.
    pub fn type_defect(&self) -> f64 {
        let r = &self.bismut_curvature;
        let j = &self.complex;
        let n = r.dim();
        let mut m: f64 = 0.0;
        for z in 0..n {
            for w in 0..n {
                let slice = DMatrix::from_fn(n, n, |x, y| r.get(x, y, z, w));
                // (JX, JY) slots: Σ J^a_x J^b_y R_ab = (Jᵀ R J)_xy
                let rotated = j.transpose() * &slice * j;
                m = m.max((slice - rotated).amax());
            }
        }
        m
    }

    pub fn residual(&self, check: CheckName) -> f64 {
        match check {
            CheckName::Kahler => self.d_omega,
            CheckName::Skt => self.ddc_omega,
            CheckName::Cyt => self.bismut_ricci.amax(),
            CheckName::Btp => self.nabla_h.iter().fold(0.0, |m, v| m.max(v.abs())),
            CheckName::Bianchi1 => self.bianchi_defect(),
            CheckName::Type => self.type_defect(),
            CheckName::Bkl => self.bianchi_defect().max(self.type_defect()),
        }
    }
}

/// Per-point residuals of one condition.
#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub check: CheckName,
    pub max: f64,
    pub per_point: Vec<f64>,
}

/// Residuals of every condition over a point set.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub structure: String,
    pub points: usize,
    pub residuals: Vec<Residual>,
}

impl ConditionReport {
    pub fn max(&self, check: CheckName) -> f64 {
        self.residuals.iter().find(|r| r.check == check).map_or(f64::NAN, |r| r.max)
    }

    pub fn passes(&self, check: CheckName, tol: f64) -> bool {
        self.max(check) < tol
    }
}

/// Evaluate every condition at every point (in parallel).
pub fn condition_report(hs: &HermitianStructure, points: &[ChartPoint]) -> Result<ConditionReport, HermitianError> {
    let geometry: Vec<PointGeometry> = points
        .par_iter()
        .map(|p| PointGeometry::compute(hs, p.coords()))
        .collect::<Result<_, _>>()?;
    let residuals = CheckName::ALL
        .into_iter()
        .map(|check| {
            let per_point: Vec<f64> = geometry.iter().map(|g| g.residual(check)).collect();
            Residual {
                check,
                max: per_point.iter().copied().fold(0.0, f64::max),
                per_point,
            }
        })
        .collect();
    Ok(ConditionReport {
        structure: hs.name().to_string(),
        points: points.len(),
        residuals,
    })
}

/// Dimension of `{X : ι_X H = 0}` at `p`, by singular-value thresholding.
pub fn kernel_distribution_rank(hs: &HermitianStructure, p: &[f64]) -> Result<usize, HermitianError> {
    let h = super::torsion_3form(hs).eval_order(p, 1)?;
    let n = hs.dim();
    let pairs = crate::exterior::basis::increasing(n, 2);
    // column X, row (b<c): H(X, b, c)
    let m = DMatrix::from_fn(pairs.len(), n, |r, x| h.value(&[x, pairs[r][0], pairs[r][1]]));
    let sv = m.singular_values();
    let threshold = 1e-8 * sv.max().max(1.0);
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    Ok(n - rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{self, Variant};

    #[test]
    fn flat_torus_passes_everything() {
        let hs = models::flat_t4();
        let rep = condition_report(&hs, &hs.sample_points(1, 5)).unwrap();
        for c in CheckName::ALL {
            assert_eq!(rep.max(c), 0.0, "{c}");
        }
    }

    #[test]
    fn hopf_is_skt_but_not_kahler() {
        let hs = models::hopf_c2(Variant::Minus);
        let rep = condition_report(&hs, &hs.sample_points(2, 10)).unwrap();
        assert!(rep.passes(CheckName::Skt, 1e-8));
        assert!(rep.max(CheckName::Kahler) > 1e-2);
        assert!(rep.passes(CheckName::Btp, 1e-7));
        assert!(rep.passes(CheckName::Bkl, 1e-7));
    }

    #[test]
    fn kernel_rank_of_kahler_is_full() {
        assert_eq!(kernel_distribution_rank(&models::flat_t4(), &[0.5; 4]).unwrap(), 4);
    }

    #[test]
    fn kernel_of_product_torsion_is_torus_plus_radial_line() {
        // a nonzero 3-form on ℂ² always has a one-dimensional kernel; here it is
        // spanned by the radial field, on top of the four torus directions
        let hs = models::product_t4_hopf(Variant::Minus);
        let h = crate::hermitian::torsion_3form(&hs);
        for p in hs.sample_points(3, 10) {
            assert_eq!(kernel_distribution_rank(&hs, p.coords()).unwrap(), 5);
            let mut radial = vec![0.0; 8];
            radial[4..].copy_from_slice(&p.coords()[4..]);
            let hv = h.eval_order(p.coords(), 1).unwrap();
            for (a, b) in [(4, 5), (5, 6), (6, 7), (4, 7)] {
                let (ea, eb) = (unit(a), unit(b));
                assert!(hv.apply(&[&radial, &ea, &eb]).abs() < 1e-12);
            }
        }
    }

    fn unit(i: usize) -> Vec<f64> {
        (0..8).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
    }

    #[test]
    fn check_names_round_trip() {
        for c in CheckName::ALL {
            assert_eq!(CheckName::parse(c.as_str()), Some(c));
        }
        assert_eq!(CheckName::parse("skt"), Some(CheckName::Skt));
        assert_eq!(CheckName::parse("nope"), None);
    }
}
