use super::matrix;
use super::{dc_jet, fundamental_form_jet, HermitianError, HermitianStructure};
use crate::exterior::{FormJet, TensorJet};
use crate::jet::{fma_into, Jet, MAX_ORDER};

/// Which metric connection to build.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConnectionKind {
    LeviCivita,
    /// The point `t` of the Gauduchon line.
    Gauduchon(f64),
    /// `t = −1`.
    Bismut,
    /// `t = 1`.
    Chern,
}

impl ConnectionKind {
    pub fn parameter(self) -> Option<f64> {
        match self {
            ConnectionKind::LeviCivita => None,
            ConnectionKind::Gauduchon(t) => Some(t),
            ConnectionKind::Bismut => Some(-1.0),
            ConnectionKind::Chern => Some(1.0),
        }
    }
}

/// Connection coefficients at a base point, together with their first jets.
#[derive(Clone, Debug)]
pub struct ConnectionValue {
    point: Vec<f64>,
    dim: usize,
    /// `gamma[k * n² + i * n + j] = Γ^k_{ij}`.
    gamma: Vec<Jet>,
    metric: TensorJet,
    complex: TensorJet,
    inverse_metric: Vec<Jet>,
}

impl ConnectionValue {
    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^k_{ij}` as a jet.
    pub fn coefficient(&self, k: usize, i: usize, j: usize) -> &Jet {
        let n = self.dim;
        &self.gamma[k * n * n + i * n + j]
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.coefficient(k, i, j).value()
    }

    pub fn metric(&self) -> &TensorJet {
        &self.metric
    }

    pub fn complex(&self) -> &TensorJet {
        &self.complex
    }

    pub(crate) fn inverse_metric(&self) -> &[Jet] {
        &self.inverse_metric
    }

    /// `(∇_i g)_{jk}`; entry `[i * n² + j * n + k]`.
    pub fn metric_derivative(&self) -> Vec<f64> {
        let n = self.dim;
        let g = |a: usize, b: usize| self.metric.value(&[a, b]);
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = self.metric.get(&[j, k]).gradient().map_or(0.0, |d| d[i]);
                    for m in 0..n {
                        v -= self.gamma(m, i, j) * g(m, k) + self.gamma(m, i, k) * g(j, m);
                    }
                    out[i * n * n + j * n + k] = v;
                }
            }
        }
        out
    }

    /// `(∇_i J)^a_b`; entry `[i * n² + a * n + b]`.
    pub fn complex_derivative(&self) -> Vec<f64> {
        let n = self.dim;
        let jv = |a: usize, b: usize| self.complex.value(&[a, b]);
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut v = self.complex.get(&[a, b]).gradient().map_or(0.0, |d| d[i]);
                    for m in 0..n {
                        v += self.gamma(a, i, m) * jv(m, b) - self.gamma(m, i, b) * jv(a, m);
                    }
                    out[i * n * n + a * n + b] = v;
                }
            }
        }
        out
    }

    /// Lowered torsion `g(T(∂_i, ∂_j), ∂_k)`; entry `[i * n² + j * n + k]`.
    pub fn lowered_torsion(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[i * n * n + j * n + k] = (0..n)
                        .map(|m| (self.gamma(m, i, j) - self.gamma(m, j, i)) * self.metric.value(&[m, k]))
                        .sum();
                }
            }
        }
        out
    }
}

/// Lowered Levi-Civita symbols `g(∇_{∂i}∂j, ∂k)`, entry `[i n² + j n + k]`.
fn lowered_levi_civita(g: &TensorJet) -> Result<Vec<Jet>, HermitianError> {
    let n = g.dim();
    let order = g.order();
    if order == 0 {
        return Err(crate::jet::JetError::Exhausted.into_field().into());
    }
    let mut dg = Vec::with_capacity(n * n * n);
    // dg[(a n + b) n + c] = ∂_c g_ab
    for a in 0..n {
        for b in 0..n {
            let gab = g.get(&[a, b]);
            for c in 0..n {
                dg.push(gab.derivative(c).map_err(|e| e.into_field())?);
            }
        }
    }
    let d = |a: usize, b: usize, c: usize| &dg[(a * n + b) * n + c];
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let s = d(j, k, i) + d(i, k, j) - d(i, j, k);
                out.push(s.scale(0.5));
            }
        }
    }
    Ok(out)
}

fn raise(lowered: &[Jet], ginv: &[Jet], n: usize) -> Vec<Jet> {
    let dim = lowered[0].dim();
    let order = lowered.iter().chain(ginv).map(Jet::order).min().unwrap_or(0);
    let mut gamma = vec![Jet::zero(dim, order); n * n * n];
    for k in 0..n {
        for l in 0..n {
            let inv = &ginv[k * n + l];
            if inv.is_zero() {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    fma_into(&mut gamma[k * n * n + i * n + j], inv, &lowered[i * n * n + j * n + l]);
                }
            }
        }
    }
    gamma
}

fn base(hs: &HermitianStructure, p: &[f64]) -> Result<(TensorJet, TensorJet, Vec<Jet>), HermitianError> {
    let (g, j) = hs.eval_order(p, MAX_ORDER)?;
    let n = hs.dim();
    let ginv = matrix::inverse(g.components(), n).ok_or_else(|| HermitianError::SingularMetric { point: p.to_vec() })?;
    Ok((g, j, ginv))
}

/// Levi-Civita connection at `p`.
pub fn levi_civita(hs: &HermitianStructure, p: &[f64]) -> Result<ConnectionValue, HermitianError> {
    let (g, j, ginv) = base(hs, p)?;
    let n = hs.dim();
    let lowered = lowered_levi_civita(&g)?;
    Ok(ConnectionValue {
        point: p.to_vec(),
        dim: n,
        gamma: raise(&lowered, &ginv, n),
        metric: g,
        complex: j,
        inverse_metric: ginv,
    })
}

/// Lowered Gauduchon symbols from the Levi-Civita ones and `C = dᶜω`:
/// `g(∇^t_X Y, Z) = g(∇_X Y, Z) + (t−1)/4 C(X,Y,Z) + (t+1)/4 C(X,JY,JZ)`.
pub(crate) fn lowered_gauduchon(lc: &[Jet], c: &FormJet, j: &TensorJet, t: f64) -> Vec<Jet> {
    let n = j.dim();
    let mut out = lc.to_vec();
    let a = (t - 1.0) / 4.0;
    let b = (t + 1.0) / 4.0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let slot = &mut out[x * n * n + y * n + z];
                if a != 0.0 {
                    *slot += &c.get(&[x, y, z]).scale(a);
                }
                if b != 0.0 {
                    // C(X, JY, JZ) = Σ J^p_y J^q_z C(X, ∂p, ∂q)
                    for pidx in 0..n {
                        let jp = j.get(&[pidx, y]);
                        if jp.is_zero() {
                            continue;
                        }
                        for q in 0..n {
                            let jq = j.get(&[q, z]);
                            if jq.is_zero() {
                                continue;
                            }
                            *slot += &(&(jp * jq) * &c.get(&[x, pidx, q])).scale(b);
                        }
                    }
                }
            }
        }
    }
    out
}

/// The connection `∇^t` of the Gauduchon line at `p`.
pub fn gauduchon_connection(hs: &HermitianStructure, t: f64, p: &[f64]) -> Result<ConnectionValue, HermitianError> {
    let (g, j, ginv) = base(hs, p)?;
    let n = hs.dim();
    let lc = lowered_levi_civita(&g)?;
    let omega = fundamental_form_jet(&g, &j);
    let c = dc_jet(&omega, &j)?;
    let lowered = lowered_gauduchon(&lc, &c, &j, t);
    Ok(ConnectionValue {
        point: p.to_vec(),
        dim: n,
        gamma: raise(&lowered, &ginv, n),
        metric: g,
        complex: j,
        inverse_metric: ginv,
    })
}

pub(crate) fn connection(hs: &HermitianStructure, kind: ConnectionKind, p: &[f64]) -> Result<ConnectionValue, HermitianError> {
    match kind.parameter() {
        None => levi_civita(hs, p),
        Some(t) => gauduchon_connection(hs, t, p),
    }
}

trait IntoFieldError {
    fn into_field(self) -> crate::exterior::FieldError;
}

impl IntoFieldError for crate::jet::JetError {
    fn into_field(self) -> crate::exterior::FieldError {
        self.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::torsion_3form;
    use crate::models::{self, Variant};

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn flat_metrics_have_vanishing_christoffels() {
        for hs in [models::flat_t4(), models::euclidean(6)] {
            let n = hs.dim();
            let lc = levi_civita(&hs, &vec![0.25; n]).unwrap();
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(lc.gamma(k, i, j), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn conformal_metric_levi_civita_is_compatible_and_symmetric() {
        let hs = models::hopf_c2(Variant::Minus);
        for p in hs.sample_points(5, 100) {
            let lc = levi_civita(&hs, p.coords()).unwrap();
            assert!(max_abs(&lc.metric_derivative()) < 1e-9);
            assert!(max_abs(&lc.lowered_torsion()) < 1e-12);
        }
    }

    #[test]
    fn kahler_line_collapses() {
        let hs = models::flat_t4();
        let p = [0.1, 0.7, 0.3, 0.9];
        let lc = levi_civita(&hs, &p).unwrap();
        for t in [-1.0, 0.0, 0.5, 1.0] {
            let gt = gauduchon_connection(&hs, t, &p).unwrap();
            for (a, b) in gt.gamma.iter().zip(&lc.gamma) {
                assert_eq!(a.value(), b.value());
            }
        }
    }

    #[test]
    fn bismut_torsion_is_the_torsion_three_form() {
        let hs = models::product_t4_hopf(Variant::Minus);
        let h = torsion_3form(&hs);
        let n = hs.dim();
        for p in hs.sample_points(9, 10) {
            let b = gauduchon_connection(&hs, -1.0, p.coords()).unwrap();
            let t = b.lowered_torsion();
            let hv = h.eval(p.coords()).unwrap();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        assert!((t[i * n * n + j * n + k] - hv.value(&[i, j, k])).abs() < 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn hopf_gauduchon_zero_preserves_j() {
        let hs = models::hopf_c2(Variant::Minus);
        for p in hs.sample_points(21, 100) {
            let c = gauduchon_connection(&hs, 0.0, p.coords()).unwrap();
            assert!(max_abs(&c.complex_derivative()) < 1e-8);
        }
    }

    #[test]
    fn singular_metric_is_reported() {
        let g = crate::exterior::TensorField::constant(2, 0, 2, vec![0.0; 4]);
        let j = crate::exterior::TensorField::constant(2, 1, 1, vec![0.0, -1.0, 1.0, 0.0]);
        let hs = HermitianStructure::new("degenerate", g, j, None, crate::exterior::Sampler::unit_box(2)).unwrap();
        assert!(matches!(levi_civita(&hs, &[0.0, 0.0]), Err(HermitianError::SingularMetric { .. })));
    }
}
