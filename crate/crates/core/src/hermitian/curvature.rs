use nalgebra::DMatrix;

use super::connection::{connection, levi_civita, ConnectionKind, ConnectionValue};
use super::{dc_jet, fundamental_form_jet, HermitianError, HermitianStructure};
use crate::exterior::FormJet;

/// `R(X,Y,Z,W) = g(R(X,Y)Z, W)` on the coordinate frame at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureValue {
    point: Vec<f64>,
    dim: usize,
    values: Vec<f64>,
}

impl CurvatureValue {
    pub(crate) fn new(point: Vec<f64>, dim: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), dim.pow(4));
        CurvatureValue { point, dim, values }
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize, z: usize, w: usize) -> f64 {
        let n = self.dim;
        self.values[((x * n + y) * n + z) * n + w]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest componentwise difference.
    pub fn distance(&self, other: &CurvatureValue) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest `|R(X,Y,Z,W) + R(X,Y,W,Z)|`.
    pub fn pair_antisymmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut m: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        m = m.max((self.get(x, y, z, w) + self.get(x, y, w, z)).abs());
                    }
                }
            }
        }
        m
    }
}

/// Curvature of an already computed connection.
pub(crate) fn curvature_of(conn: &ConnectionValue) -> Result<CurvatureValue, HermitianError> {
    let n = conn.dim();
    // dgamma[(l n² + j n + k) n + i] = ∂_i Γ^l_{jk}
    let mut dgamma = vec![0.0; n.pow(4)];
    for l in 0..n {
        for j in 0..n {
            for k in 0..n {
                let grad = conn
                    .coefficient(l, j, k)
                    .gradient()
                    .map_err(|e| HermitianError::Field(e.into()))?;
                let base = ((l * n + j) * n + k) * n;
                dgamma[base..base + n].copy_from_slice(&grad);
            }
        }
    }
    let dg = |l: usize, j: usize, k: usize, i: usize| dgamma[((l * n + j) * n + k) * n + i];
    let gamma: Vec<f64> = (0..n * n * n).map(|f| conn.gamma(f / (n * n), (f / n) % n, f % n)).collect();
    let gm = |l: usize, i: usize, j: usize| gamma[l * n * n + i * n + j];
    let g = conn.metric().matrix_values();

    // upper[l][k][i][j] = R^l_{kij}
    let mut values = vec![0.0; n.pow(4)];
    let mut upper = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                for (l, slot) in upper.iter_mut().enumerate() {
                    let mut r = dg(l, j, k, i) - dg(l, i, k, j);
                    for m in 0..n {
                        r += gm(l, i, m) * gm(m, j, k) - gm(l, j, m) * gm(m, i, k);
                    }
                    *slot = r;
                }
                for w in 0..n {
                    values[((i * n + j) * n + k) * n + w] = (0..n).map(|l| upper[l] * g[(l, w)]).sum();
                }
            }
        }
    }
    Ok(CurvatureValue::new(conn.point().to_vec(), n, values))
}

/// Curvature of the chosen connection at `p`.
pub fn curvature(hs: &HermitianStructure, kind: ConnectionKind, p: &[f64]) -> Result<CurvatureValue, HermitianError> {
    curvature_of(&connection(hs, kind, p)?)
}

/// Bismut curvature assembled from Levi-Civita data and the torsion.
#[derive(Clone, Debug)]
pub struct FormulaCurvature {
    pub curvature: CurvatureValue,
    /// Largest component of `dH` at the point; the formula assumes it is zero.
    pub dh_residual: f64,
    pub warning: Option<String>,
}

/// `R^B = R^LC + ½∇_X H(Y,Z,W) − ½∇_Y H(X,Z,W) − ¼ g(H(X,W),H(Y,Z)) + ¼ g(H(Y,W),H(X,Z))`.
pub fn bismut_curvature_via_formula(hs: &HermitianStructure, p: &[f64], dh_tol: f64) -> Result<FormulaCurvature, HermitianError> {
    let lc = levi_civita(hs, p)?;
    let r_lc = curvature_of(&lc)?;
    let n = hs.dim();
    let omega = fundamental_form_jet(lc.metric(), lc.complex());
    let h = dc_jet(&omega, lc.complex())?.scale(-1.0);
    let dh = h.exterior_derivative()?.max_abs();
    let nabla_h = covariant_derivative_3form(&lc, &h)?;
    let nh = |i: usize, a: usize, b: usize, c: usize| nabla_h[((i * n + a) * n + b) * n + c];
    let hv: Vec<f64> = dense3(&h);
    let hh = |a: usize, b: usize, c: usize| hv[(a * n + b) * n + c];
    let ginv = super::matrix::values(lc.inverse_metric(), n);
    // raised[(a n + b) n + c] = H(a, b, ·)^c
    let mut raised = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                raised[(a * n + b) * n + c] = (0..n).map(|d| hh(a, b, d) * ginv[(d, c)]).sum();
            }
        }
    }
    let quad = |a: usize, b: usize, c: usize, d: usize| -> f64 {
        (0..n).map(|m| raised[(a * n + b) * n + m] * hh(c, d, m)).sum()
    };
    let mut values = r_lc.values().to_vec();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    values[((x * n + y) * n + z) * n + w] += 0.5 * nh(x, y, z, w) - 0.5 * nh(y, x, z, w)
                        - 0.25 * quad(x, w, y, z)
                        + 0.25 * quad(y, w, x, z);
                }
            }
        }
    }
    let warning = (dh > dh_tol).then(|| format!("torsion is not closed at {p:?}: |dH| = {dh:e}"));
    Ok(FormulaCurvature {
        curvature: CurvatureValue::new(p.to_vec(), n, values),
        dh_residual: dh,
        warning,
    })
}

/// Dense values `H(a, b, c)` of a 3-form.
pub(crate) fn dense3(h: &FormJet) -> Vec<f64> {
    let n = h.dim();
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                out[(a * n + b) * n + c] = h.value(&[a, b, c]);
            }
        }
    }
    out
}

/// `(∇_i H)(a, b, c)`, entry `[((i n + a) n + b) n + c]`.
pub(crate) fn covariant_derivative_3form(conn: &ConnectionValue, h: &FormJet) -> Result<Vec<f64>, HermitianError> {
    let n = conn.dim();
    let hv = dense3(h);
    let hh = |a: usize, b: usize, c: usize| hv[(a * n + b) * n + c];
    // dh[(a n + b) n + c] = gradient of H_abc
    let mut grads = vec![Vec::new(); n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                grads[(a * n + b) * n + c] = h.get(&[a, b, c]).gradient().map_err(|e| HermitianError::Field(e.into()))?;
            }
        }
    }
    let mut out = vec![0.0; n.pow(4)];
    for i in 0..n {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut v = grads[(a * n + b) * n + c][i];
                    for m in 0..n {
                        v -= conn.gamma(m, i, a) * hh(m, b, c) + conn.gamma(m, i, b) * hh(a, m, c) + conn.gamma(m, i, c) * hh(a, b, m);
                    }
                    out[((i * n + a) * n + b) * n + c] = v;
                }
            }
        }
    }
    Ok(out)
}

/// Gram–Schmidt on the coordinate frame; column `a` is `e_a`.
pub fn orthonormal_frame(g: &DMatrix<f64>) -> Result<DMatrix<f64>, HermitianError> {
    let n = g.nrows();
    let mut frame = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        let mut v = nalgebra::DVector::<f64>::zeros(n);
        v[a] = 1.0;
        for b in 0..a {
            let e = frame.column(b).into_owned();
            let proj = (v.transpose() * g * &e)[(0, 0)];
            v -= e * proj;
        }
        let norm2 = (v.transpose() * g * &v)[(0, 0)];
        if !(norm2 > 0.0) {
            return Err(HermitianError::NotPositiveDefinite {
                point: Vec::new(),
                min_eigenvalue: norm2,
            });
        }
        frame.set_column(a, &(v / norm2.sqrt()));
    }
    Ok(frame)
}

/// `ρ(X,Y) = ½ Σ_a R(X, Y, J e_a, e_a)` for a given `g`-orthonormal frame.
pub(crate) fn ricci_from(curv: &CurvatureValue, j: &DMatrix<f64>, frame: &DMatrix<f64>) -> DMatrix<f64> {
    let n = curv.dim();
    let jframe = j * frame;
    // Σ_a (J e_a)^z e_a^w
    let pairing = &jframe * frame.transpose();
    DMatrix::from_fn(n, n, |x, y| {
        let mut s = 0.0;
        for z in 0..n {
            for w in 0..n {
                let c = pairing[(z, w)];
                if c != 0.0 {
                    s += c * curv.get(x, y, z, w);
                }
            }
        }
        0.5 * s
    })
}

/// Bismut Ricci form at `p` on the Gram–Schmidt frame.
pub fn bismut_ricci(hs: &HermitianStructure, p: &[f64]) -> Result<DMatrix<f64>, HermitianError> {
    let conn = connection(hs, ConnectionKind::Bismut, p)?;
    let frame = orthonormal_frame(&conn.metric().matrix_values())?;
    Ok(ricci_from(&curvature_of(&conn)?, &conn.complex().matrix_values(), &frame))
}

/// Bismut Ricci form traced over a caller-supplied orthonormal frame.
pub fn bismut_ricci_with_frame(hs: &HermitianStructure, p: &[f64], frame: &DMatrix<f64>) -> Result<DMatrix<f64>, HermitianError> {
    let conn = connection(hs, ConnectionKind::Bismut, p)?;
    let g = conn.metric().matrix_values();
    let n = hs.dim();
    let gram = frame.transpose() * &g * frame;
    if (gram - DMatrix::identity(n, n)).amax() > 1e-9 {
        return Err(HermitianError::Mismatch("frame is not orthonormal".into()));
    }
    Ok(ricci_from(&curvature_of(&conn)?, &conn.complex().matrix_values(), frame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{self, Variant};
    use rand::{Rng, SeedableRng};

    #[test]
    fn flat_curvatures_vanish() {
        let hs = models::flat_t4();
        for kind in [ConnectionKind::LeviCivita, ConnectionKind::Bismut, ConnectionKind::Chern] {
            assert_eq!(curvature(&hs, kind, &[0.2, 0.4, 0.6, 0.8]).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn round_sphere_factor_has_levi_civita_curvature() {
        // g_E/R² is the product of a round unit S³ with a line; it is not flat
        let hs = models::hopf_c2(Variant::Minus);
        let p = [0.7, 0.2, -0.4, 0.9];
        let r = curvature(&hs, ConnectionKind::LeviCivita, &p).unwrap();
        assert!(r.max_abs() > 0.1);
        assert!(r.pair_antisymmetry_defect() < 1e-9);
    }

    #[test]
    fn hopf_bismut_flat_both_ways() {
        let hs = models::hopf_c2(Variant::Minus);
        for p in hs.sample_points(4, 20) {
            let direct = curvature(&hs, ConnectionKind::Bismut, p.coords()).unwrap();
            let formula = bismut_curvature_via_formula(&hs, p.coords(), 1e-8).unwrap();
            assert!(direct.max_abs() < 1e-7, "{}", direct.max_abs());
            assert!(formula.curvature.max_abs() < 1e-7);
            assert!(formula.warning.is_none());
        }
    }

    #[test]
    fn formula_matches_direct_on_su2_chart() {
        let hs = models::su2_r_chart();
        for p in hs.sample_points(8, 10) {
            let direct = curvature(&hs, ConnectionKind::Bismut, p.coords()).unwrap();
            let formula = bismut_curvature_via_formula(&hs, p.coords(), 1e-8).unwrap();
            assert!(direct.distance(&formula.curvature) < 1e-7);
        }
    }

    #[test]
    fn ricci_is_frame_independent_and_antisymmetric() {
        let hs = models::su2_r_chart();
        let p = hs.sample_points(13, 1).remove(0);
        let base = bismut_ricci(&hs, p.coords()).unwrap();
        assert!((&base + base.transpose()).amax() < 1e-9);
        let (g, _) = hs.eval_order(p.coords(), 0).unwrap();
        let frame = orthonormal_frame(&g.matrix_values()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = hs.dim();
        let q = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
        let rotated = bismut_ricci_with_frame(&hs, p.coords(), &(&frame * q)).unwrap();
        assert!((rotated - base).amax() < 1e-9);
    }

    #[test]
    fn gram_schmidt_is_orthonormal() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.0, 0.2, 0.1, 0.2, 1.5]);
        let e = orthonormal_frame(&g).unwrap();
        assert!((e.transpose() * &g * &e - DMatrix::identity(3, 3)).amax() < 1e-14);
    }
}
