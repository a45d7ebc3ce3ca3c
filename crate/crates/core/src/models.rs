//! Chart-level models: the flat torus, the Hopf structures on ℂ²∖{0}, their
//! product, a chart on SU(2) × ℝ, the torus rotation and the deck maps.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exterior::{ChartPoint, FieldError, Locus, SampleBlock, Sampler, SmoothMap, TensorField};
use crate::hermitian::{fundamental_form, torsion_3form, HermitianError, HermitianStructure};
use crate::jet::Jet;
use crate::quadrature::rule_on;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error(transparent)]
    Hermitian(#[from] HermitianError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("sphere quadrature did not converge: value {value}, error estimate {error_estimate:e} > {tolerance:e}")]
    Quadrature { value: f64, error_estimate: f64, tolerance: f64 },
}

/// Which complex structure on ℂ²∖{0}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// The standard structure.
    Minus,
    /// Orientation of the second complex line reversed (`ζ₂ = z̄₂`).
    Plus,
}

impl FromStr for Variant {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "minus" | "-" => Ok(Variant::Minus),
            "plus" | "+" => Ok(Variant::Plus),
            other => Err(ModelError::UnknownModel(format!("variant {other}"))),
        }
    }
}

impl<'de> serde::Deserialize<'de> for Variant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Minus => "minus",
            Variant::Plus => "plus",
        })
    }
}

/// A named model with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelSpec {
    FlatT4,
    HopfC2(Variant),
    ProductT4Hopf(Variant),
    Su2RChart,
}

impl ModelSpec {
    pub const NAMES: [&'static str; 5] = ["flat_t4", "hopf_c2_minus", "hopf_c2_plus", "product_t4_hopf", "su2_r_chart"];

    /// Parse a model name; `variant` only matters for `product_t4_hopf`.
    pub fn parse(name: &str, variant: Option<Variant>) -> Result<Self, ModelError> {
        match name {
            "flat_t4" => Ok(ModelSpec::FlatT4),
            "hopf_c2_minus" => Ok(ModelSpec::HopfC2(Variant::Minus)),
            "hopf_c2_plus" => Ok(ModelSpec::HopfC2(Variant::Plus)),
            "product_t4_hopf" => Ok(ModelSpec::ProductT4Hopf(variant.unwrap_or(Variant::Minus))),
            "su2_r_chart" => Ok(ModelSpec::Su2RChart),
            other => Err(ModelError::UnknownModel(other.to_string())),
        }
    }

    pub fn name(self) -> String {
        match self {
            ModelSpec::FlatT4 => "flat_t4".into(),
            ModelSpec::HopfC2(v) => format!("hopf_c2_{v}"),
            ModelSpec::ProductT4Hopf(v) => format!("product_t4_hopf({v})"),
            ModelSpec::Su2RChart => "su2_r_chart".into(),
        }
    }

    pub fn build(self) -> HermitianStructure {
        match self {
            ModelSpec::FlatT4 => flat_t4(),
            ModelSpec::HopfC2(v) => hopf_c2(v),
            ModelSpec::ProductT4Hopf(v) => product_t4_hopf(v),
            ModelSpec::Su2RChart => su2_r_chart(),
        }
    }

    /// Every shipped structure, with both product variants.
    pub fn all() -> Vec<ModelSpec> {
        vec![
            ModelSpec::FlatT4,
            ModelSpec::HopfC2(Variant::Minus),
            ModelSpec::HopfC2(Variant::Plus),
            ModelSpec::ProductT4Hopf(Variant::Minus),
            ModelSpec::ProductT4Hopf(Variant::Plus),
            ModelSpec::Su2RChart,
        ]
    }
}

fn constant_structure(name: &str, g: Vec<f64>, j: Vec<f64>, sampler: Sampler) -> HermitianStructure {
    let n = sampler.dim;
    HermitianStructure::new(name, TensorField::constant(n, 0, 2, g), TensorField::constant(n, 1, 1, j), None, sampler)
        .expect("constant structure has consistent shapes")
}

fn identity(n: usize) -> Vec<f64> {
    (0..n * n).map(|f| if f / n == f % n { 1.0 } else { 0.0 }).collect()
}

/// `J^a_b` of the torus structure: `J∂₁ = ∂₂`, `J∂₃ = −∂₄`.
pub fn torus_complex_matrix() -> Vec<f64> {
    let mut j = vec![0.0; 16];
    j[4] = 1.0; // J∂₀ = ∂₁
    j[1] = -1.0;
    j[3 * 4 + 2] = -1.0; // J∂₂ = −∂₃
    j[2 * 4 + 3] = 1.0;
    j
}

/// `J^a_b` on ℝ⁴ = ℂ² in coordinates `(x₁, y₁, x₂, y₂)`.
pub fn hopf_complex_matrix(v: Variant) -> Vec<f64> {
    let mut j = vec![0.0; 16];
    j[4] = 1.0;
    j[1] = -1.0;
    let s = match v {
        Variant::Minus => 1.0,
        Variant::Plus => -1.0,
    };
    j[3 * 4 + 2] = s;
    j[2 * 4 + 3] = -s;
    j
}

/// The flat torus chart with `J∂₁ = ∂₂`, `J∂₃ = −∂₄`.
pub fn flat_t4() -> HermitianStructure {
    constant_structure("flat_t4", identity(4), torus_complex_matrix(), Sampler::unit_box(4))
}

/// Euclidean `ℝⁿ = ℂ^{n/2}` with `J∂_{2k} = ∂_{2k+1}`.
pub fn euclidean(n: usize) -> HermitianStructure {
    assert!(n % 2 == 0 && n > 0);
    let mut j = vec![0.0; n * n];
    for k in (0..n).step_by(2) {
        j[(k + 1) * n + k] = 1.0;
        j[k * n + k + 1] = -1.0;
    }
    constant_structure(&format!("euclidean_{n}"), identity(n), j, Sampler::unit_box(n))
}

fn radius_squared(x: &[Jet]) -> Jet {
    let mut r2 = x[0].square();
    for c in &x[1..] {
        r2 += &c.square();
    }
    r2
}

fn puncture(offset: usize) -> Locus {
    Locus::new("R² = 0 (origin of ℂ²)", move |p| p[offset..offset + 4].iter().map(|x| x * x).sum())
}

fn shell(offset: usize) -> SampleBlock {
    SampleBlock::Shell {
        coords: (offset..offset + 4).collect(),
        r_min: 0.5,
        r_max: 2.0,
    }
}

/// `g_E / R²` on ℂ²∖{0}.
fn hopf_metric() -> TensorField {
    TensorField::from_expr(4, 0, 2, |x| {
        let inv = radius_squared(x).recip();
        let zero = Jet::zero(4, x[0].order());
        (0..16).map(|f| if f / 4 == f % 4 { inv.clone() } else { zero.clone() }).collect()
    })
}

/// `(ℂ²∖{0}, g_E/R², J_±)` in real coordinates `(x₁, y₁, x₂, y₂)`.
pub fn hopf_c2(v: Variant) -> HermitianStructure {
    HermitianStructure::new(
        format!("hopf_c2_{v}"),
        hopf_metric(),
        TensorField::constant(4, 1, 1, hopf_complex_matrix(v)),
        Some(puncture(0)),
        Sampler {
            dim: 4,
            blocks: vec![shell(0)],
        },
    )
    .expect("hopf structure has consistent shapes")
}

/// `T⁴ × ℂ²∖{0}` with the block metric `g + g_E/R²` and block complex structure.
pub fn product_t4_hopf(v: Variant) -> HermitianStructure {
    let n = 8;
    let metric = TensorField::from_expr(n, 0, 2, |x| {
        let order = x[0].order();
        let inv = radius_squared(&x[4..]).recip();
        (0..64)
            .map(|f| {
                let (a, b) = (f / 8, f % 8);
                match (a == b, a < 4) {
                    (true, true) => Jet::constant(8, order, 1.0),
                    (true, false) => inv.clone(),
                    _ => Jet::zero(8, order),
                }
            })
            .collect()
    });
    let (jt, jh) = (torus_complex_matrix(), hopf_complex_matrix(v));
    let mut j = vec![0.0; 64];
    for a in 0..4 {
        for b in 0..4 {
            j[a * 8 + b] = jt[a * 4 + b];
            j[(a + 4) * 8 + b + 4] = jh[a * 4 + b];
        }
    }
    let sampler = Sampler {
        dim: 8,
        blocks: vec![
            SampleBlock::Box {
                coords: (0..4).collect(),
                lo: 0.0,
                hi: 1.0,
            },
            shell(4),
        ],
    };
    HermitianStructure::new(
        format!("product_t4_hopf_{v}"),
        metric,
        TensorField::constant(8, 1, 1, j),
        Some(puncture(4)),
        sampler,
    )
    .expect("product structure has consistent shapes")
}

/// Flat `ℝ⁸` with the same constant complex structure as the product chart; `H = 0`.
pub fn kahler_control() -> HermitianStructure {
    let jt = torus_complex_matrix();
    let jh = hopf_complex_matrix(Variant::Minus);
    let mut j = vec![0.0; 64];
    for a in 0..4 {
        for b in 0..4 {
            j[a * 8 + b] = jt[a * 4 + b];
            j[(a + 4) * 8 + b + 4] = jh[a * 4 + b];
        }
    }
    let sampler = Sampler {
        dim: 8,
        blocks: vec![
            SampleBlock::Box {
                coords: (0..4).collect(),
                lo: 0.0,
                hi: 1.0,
            },
            shell(4),
        ],
    };
    constant_structure("kahler_control", identity(8), j, sampler)
}

/// Left-invariant frame of SU(2) × ℝ in the chart `(s, u₁, u₂, u₃)`, where the
/// unit quaternion is `(√(1 − |u|²), u)`. Column `a` is `e_a`, with `e₀ = ∂_s`.
fn su2_frame(x: &[Jet]) -> (Vec<Jet>, Vec<Jet>) {
    let order = x[0].order();
    let zero = Jet::zero(4, order);
    let one = Jet::constant(4, order, 1.0);
    let u = &x[1..4];
    let w = (1.0 - radius_squared(u)).sqrt();
    let mut e = vec![zero.clone(); 16];
    let mut inv = vec![zero.clone(); 16];
    e[0] = one.clone();
    inv[0] = one;
    // e_a = w ε_a + u × ε_a, i.e. the block w I + [u]_×
    // inverse block (w I + [u]_×)⁻¹ = w I − [u]_× + u uᵀ / w
    let wr = w.recip();
    for r in 0..3 {
        for c in 0..3 {
            let cross = match (r, c) {
                (0, 1) => -&u[2],
                (0, 2) => u[1].clone(),
                (1, 0) => u[2].clone(),
                (1, 2) => -&u[0],
                (2, 0) => -&u[1],
                (2, 1) => u[0].clone(),
                _ => zero.clone(),
            };
            let diag = if r == c { w.clone() } else { zero.clone() };
            e[(r + 1) * 4 + c + 1] = &diag + &cross;
            inv[(r + 1) * 4 + c + 1] = &(&diag - &cross) + &(&(&u[r] * &u[c]) * &wr);
        }
    }
    (e, inv)
}

/// `J₀` in the frame `(e₀, e₁, e₂, e₃)`: `J e₁ = e₂`, `J e₃ = e₀`.
pub fn su2_frame_complex_matrix() -> Vec<f64> {
    let mut j = vec![0.0; 16];
    j[2 * 4 + 1] = 1.0; // J e₁ = e₂
    j[4 + 2] = -1.0; // J e₂ = −e₁
    j[3] = 1.0; // J e₃ = e₀
    j[3 * 4] = -1.0; // J e₀ = −e₃
    j
}

/// SU(2) × ℝ near the identity, with the bi-invariant metric `ds² + round S³`
/// and the left-invariant complex structure `J e₁ = e₂`, `J e₃ = e₀`.
pub fn su2_r_chart() -> HermitianStructure {
    let metric = TensorField::from_expr(4, 0, 2, |x| {
        let order = x[0].order();
        let u = &x[1..4];
        let w2 = 1.0 - radius_squared(u);
        let w2r = w2.recip();
        (0..16)
            .map(|f| {
                let (a, b) = (f / 4, f % 4);
                match (a, b) {
                    (0, 0) => Jet::constant(4, order, 1.0),
                    (0, _) | (_, 0) => Jet::zero(4, order),
                    _ => {
                        let mut v = &(&u[a - 1] * &u[b - 1]) * &w2r;
                        if a == b {
                            v = v + 1.0;
                        }
                        v
                    }
                }
            })
            .collect()
    });
    let j0 = su2_frame_complex_matrix();
    let complex = TensorField::from_expr(4, 1, 1, move |x| {
        let (e, inv) = su2_frame(x);
        let order = x[0].order();
        let j0: Vec<Jet> = j0.iter().map(|&v| Jet::constant(4, order, v)).collect();
        let m = crate::hermitian::mat_mul_jets(&e, &j0, 4);
        crate::hermitian::mat_mul_jets(&m, &inv, 4)
    });
    let locus = Locus::new("|u|² = 1 (edge of the chart)", |p| 1.0 - p[1..4].iter().map(|x| x * x).sum::<f64>());
    let sampler = Sampler {
        dim: 4,
        blocks: vec![
            SampleBlock::Box {
                coords: vec![0],
                lo: -1.0,
                hi: 1.0,
            },
            SampleBlock::Shell {
                coords: vec![1, 2, 3],
                r_min: 0.0,
                r_max: 0.8,
            },
        ],
    };
    HermitianStructure::new("su2_r_chart", metric, complex, Some(locus), sampler).expect("su2 chart has consistent shapes")
}

/// Left-invariant frame vectors of the SU(2) × ℝ chart at `p`; column `a` is `e_a`.
pub fn su2_frame_at(p: &[f64]) -> nalgebra::DMatrix<f64> {
    let (e, _) = su2_frame(&Jet::seeds(p, 0));
    nalgebra::DMatrix::from_fn(4, 4, |r, c| e[r * 4 + c].value())
}

/// Row-major matrix of `(x₁,x₂,x₃,x₄) ↦ (x₂,−x₁,x₄,−x₃)`.
pub fn psi_matrix() -> [[i64; 4]; 4] {
    [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
}

fn psi_power(n: i32) -> Vec<f64> {
    let p = psi_matrix();
    // P⁻¹ = Pᵀ
    let step = |a: usize, b: usize| (if n >= 0 { p[a][b] } else { p[b][a] }) as f64;
    let mut m = identity(4);
    for _ in 0..n.unsigned_abs() {
        let mut next = vec![0.0; 16];
        for a in 0..4 {
            for b in 0..4 {
                next[a * 4 + b] = (0..4).map(|k| step(a, k) * m[k * 4 + b]).sum();
            }
        }
        m = next;
    }
    m
}

/// The torus rotation `ψ`.
pub fn psi_rotation_t4() -> SmoothMap {
    SmoothMap::linear(4, 4, psi_power(1))
}

/// The deck transformation `(x, z) ↦ (ψⁿ x, 2ⁿ z)` on the product chart.
pub fn deck_map(n: i32) -> SmoothMap {
    let p = psi_power(n);
    let scale = 2f64.powi(n);
    let mut m = vec![0.0; 64];
    for a in 0..4 {
        for b in 0..4 {
            m[a * 8 + b] = p[a * 4 + b];
        }
        m[(a + 4) * 8 + a + 4] = scale;
    }
    SmoothMap::linear(8, 8, m)
}

/// Largest deviations of the deck-transformed structure from the original.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DeckResiduals {
    pub metric: f64,
    pub fundamental_form: f64,
    pub complex_structure: f64,
}

/// `‖φₙ*h − h‖`, `‖φₙ*Ω − Ω‖` and `‖dφₙ∘J − J∘dφₙ‖` over `points`.
pub fn deck_invariance(v: Variant, n: i32, points: &[ChartPoint]) -> Result<DeckResiduals, ModelError> {
    let hs = product_t4_hopf(v);
    let phi = deck_map(n);
    let h_pull = phi.pullback_tensor(hs.metric())?;
    let omega = fundamental_form(&hs);
    let omega_pull = phi.pullback(&omega)?;
    let per: Vec<[f64; 3]> = points
        .par_iter()
        .map(|p| -> Result<[f64; 3], ModelError> {
            let x = p.coords();
            let image = phi.eval_order(x, 1)?;
            let (g, j) = hs.eval_order(x, 0)?;
            let metric = (h_pull.eval_order(x, 1)?.matrix_values() - g.matrix_values()).amax();
            let form = omega_pull.eval_order(x, 1)?.sub(&omega.eval_order(x, 1)?).max_abs();
            let dphi = image.jacobian_values()?;
            let (_, j_image) = hs.eval_order(&image.point(), 0)?;
            let complex = (&dphi * j.matrix_values() - j_image.matrix_values() * &dphi).amax();
            Ok([metric, form, complex])
        })
        .collect::<Result<_, _>>()?;
    let max = |k: usize| per.iter().map(|r| r[k]).fold(0.0, f64::max);
    Ok(DeckResiduals {
        metric: max(0),
        fundamental_form: max(1),
        complex_structure: max(2),
    })
}

/// Embedding `(ξ₁, η, ξ₂) ↦ (p, r cos η e^{iξ₁}, r sin η e^{iξ₂})`, `r = 2^t`,
/// of the sphere of radius `r` into the 8-dimensional product chart.
pub fn sphere_embedding(p: [f64; 4], t: f64) -> SmoothMap {
    let r = 2f64.powf(t);
    SmoothMap::from_expr(3, 8, move |a| {
        let order = a[0].order();
        let (c1, s1) = (a[0].cos(), a[0].sin());
        let (ce, se) = (a[1].cos(), a[1].sin());
        let (c2, s2) = (a[2].cos(), a[2].sin());
        let mut out: Vec<Jet> = p.iter().map(|&v| Jet::constant(3, order, v)).collect();
        out.push((&ce * &c1).scale(r));
        out.push((&ce * &s1).scale(r));
        out.push((&se * &c2).scale(r));
        out.push((&se * &s2).scale(r));
        out
    })
}

/// Result of a sphere quadrature.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SphereIntegral {
    pub value: f64,
    /// `|I(n) − I(n/2)|`
    pub error_estimate: f64,
    pub nodes: usize,
}

/// Tensor-product Gauss–Legendre rule on `(ξ₁, η, ξ₂) ∈ [0,2π) × [0,π/2] × [0,2π)`.
fn sphere_quadrature<F>(integrand: F, nodes: usize) -> Result<f64, ModelError>
where
    F: Fn(&[f64; 3]) -> Result<f64, ModelError> + Sync,
{
    let (x1, w1) = rule_on(nodes, 0.0, 2.0 * PI);
    let (xe, we) = rule_on(nodes, 0.0, 0.5 * PI);
    let rows: Vec<f64> = (0..nodes)
        .into_par_iter()
        .map(|i| -> Result<f64, ModelError> {
            let mut acc = 0.0;
            for k in 0..nodes {
                for l in 0..nodes {
                    acc += we[k] * w1[l] * integrand(&[x1[i], xe[k], x1[l]])?;
                }
            }
            Ok(acc * w1[i])
        })
        .collect::<Result<_, _>>()?;
    Ok(rows.iter().sum())
}

#[cfg(test)]
fn pulled_density(pulled: &crate::exterior::DifferentialForm) -> impl Fn(&[f64; 3]) -> Result<f64, ModelError> + Sync + '_ {
    move |a| Ok(pulled.eval_order(a, 1)?.components()[0].value())
}

/// `∫_{S³} ι*H` for the sphere of radius `2^t` over the torus point `p`,
/// with `nodes` Gauss–Legendre points per direction.
pub fn integrate_h_over_sphere3(
    hs: &HermitianStructure,
    p: [f64; 4],
    t: f64,
    nodes: usize,
    tolerance: f64,
) -> Result<SphereIntegral, ModelError> {
    if hs.dim() != 8 {
        return Err(HermitianError::Mismatch(format!("sphere integral needs the 8-dimensional product chart, got {}", hs.dim())).into());
    }
    // H at the image point on the pushed-forward coordinate vectors, which
    // skips composing the 8-variable jets with the embedding
    let (embedding, h) = (sphere_embedding(p, t), torsion_3form(hs));
    let density = |a: &[f64; 3]| -> Result<f64, ModelError> {
        let image = embedding.eval_order(a, 1)?;
        let jac = image.jacobian_values()?;
        let col = |i: usize| jac.column(i).iter().copied().collect::<Vec<f64>>();
        let (c0, c1, c2) = (col(0), col(1), col(2));
        Ok(h.eval_order(&image.point(), 1)?.apply(&[&c0, &c1, &c2]))
    };
    let fine = sphere_quadrature(&density, nodes)?;
    let coarse = sphere_quadrature(&density, (nodes / 2).max(1))?;
    let error_estimate = (fine - coarse).abs();
    if error_estimate > tolerance {
        return Err(ModelError::Quadrature {
            value: fine,
            error_estimate,
            tolerance,
        });
    }
    Ok(SphereIntegral {
        value: fine,
        error_estimate,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::DifferentialForm;

    #[test]
    fn every_model_is_a_valid_hermitian_structure() {
        for spec in ModelSpec::all() {
            let hs = spec.build();
            for p in hs.sample_points(17, 200) {
                hs.validate_at(p.coords()).unwrap_or_else(|e| panic!("{}: {e}", spec.name()));
            }
        }
        kahler_control().validate_at(&[0.1; 8]).unwrap();
    }

    #[test]
    fn hopf_variants_share_the_metric_bitwise() {
        let (a, b) = (hopf_c2(Variant::Minus), hopf_c2(Variant::Plus));
        for p in a.sample_points(2, 50) {
            let ga = a.metric().eval(p.coords()).unwrap();
            let gb = b.metric().eval(p.coords()).unwrap();
            assert_eq!(ga, gb);
        }
    }

    #[test]
    fn plus_fundamental_form_flips_second_line() {
        let w = fundamental_form(&hopf_c2(Variant::Plus)).eval(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert_eq!(w.value(&[0, 1]), 1.0);
        assert_eq!(w.value(&[2, 3]), -1.0);
    }

    #[test]
    fn hopf_torsion_at_base_point() {
        let h = torsion_3form(&hopf_c2(Variant::Minus)).eval(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        for idx in crate::exterior::basis::increasing(4, 3) {
            let expected = if idx == &[1, 2, 3] { 2.0 } else { 0.0 };
            assert!((h.component(idx).value() - expected).abs() < 1e-14, "{idx:?}");
        }
    }

    #[test]
    fn product_torsion_has_no_torus_legs() {
        let hs = product_t4_hopf(Variant::Minus);
        let h = torsion_3form(&hs);
        for p in hs.sample_points(5, 20) {
            let hv = h.eval(p.coords()).unwrap();
            for idx in crate::exterior::basis::increasing(8, 3) {
                if idx[0] < 4 {
                    assert_eq!(hv.component(idx).value(), 0.0);
                }
            }
            for i in 0..4 {
                let x = TensorField::coordinate_vector(8, i);
                assert_eq!(h.interior_product(&x).unwrap().eval(p.coords()).unwrap().max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn psi_is_a_holomorphic_isometry_of_order_four() {
        let psi = psi_rotation_t4();
        let p = [0.3, 0.1, 0.7, 0.2];
        let jac = psi.eval(&p).unwrap().jacobian_values().unwrap();
        let j = nalgebra::DMatrix::from_row_slice(4, 4, &torus_complex_matrix());
        assert_eq!(&jac * &j - &j * &jac, nalgebra::DMatrix::zeros(4, 4));
        let g = psi.pullback_tensor(flat_t4().metric()).unwrap().eval(&p).unwrap();
        assert_eq!(g.matrix_values(), nalgebra::DMatrix::identity(4, 4));
        let four = psi.after(&psi).unwrap().after(&psi).unwrap().after(&psi).unwrap();
        assert_eq!(four.eval(&p).unwrap().point(), p.to_vec());
    }

    #[test]
    fn deck_group_action() {
        let p = [0.2, 0.4, 0.6, 0.8, 0.5, -0.7, 1.1, 0.3];
        assert_eq!(deck_map(0).eval(&p).unwrap().point(), p.to_vec());
        let round = deck_map(1).after(&deck_map(-1)).unwrap().eval(&p).unwrap().point();
        for (a, b) in round.iter().zip(&p) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn deck_maps_preserve_the_structure() {
        let pts = product_t4_hopf(Variant::Minus).sample_points(3, 10);
        for n in -2..=2 {
            for v in [Variant::Minus, Variant::Plus] {
                let r = deck_invariance(v, n, &pts).unwrap();
                assert!(r.metric < 1e-9 && r.fundamental_form < 1e-9 && r.complex_structure < 1e-9, "{n} {r:?}");
            }
        }
    }

    #[test]
    fn su2_frame_is_orthonormal() {
        let hs = su2_r_chart();
        for p in hs.sample_points(1, 20) {
            let e = su2_frame_at(p.coords());
            let (g, _) = hs.eval_order(p.coords(), 0).unwrap();
            let gram = e.transpose() * g.matrix_values() * &e;
            assert!((gram - nalgebra::DMatrix::identity(4, 4)).amax() < 1e-12);
        }
    }

    #[test]
    fn su2_chart_torsion_matches_cartan_form() {
        let hs = su2_r_chart();
        let h = torsion_3form(&hs);
        for p in hs.sample_points(4, 10) {
            let e = su2_frame_at(p.coords());
            let hv = h.eval(p.coords()).unwrap();
            let col = |a: usize| e.column(a).iter().copied().collect::<Vec<_>>();
            let (e1, e2, e3, e0) = (col(1), col(2), col(3), col(0));
            assert!((hv.apply(&[&e1, &e2, &e3]) + 2.0).abs() < 1e-10);
            assert!(hv.apply(&[&e0, &e1, &e2]).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_form_has_no_flux() {
        // dy₁∧dx₂∧dy₂ = d(y₁ dx₂∧dy₂) is exact, so its flux through S³ vanishes
        let form = DifferentialForm::coordinate(8, &[5, 6, 7]);
        let pulled = sphere_embedding([0.0; 4], 0.0).pullback(&form).unwrap();
        assert!(sphere_quadrature(pulled_density(&pulled), 16).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pushed_forward_density_matches_pullback() {
        let hs = product_t4_hopf(Variant::Minus);
        let (p, t) = ([0.3, 0.1, 0.7, 0.2], 0.4);
        let pulled = sphere_embedding(p, t).pullback(&torsion_3form(&hs)).unwrap();
        let via_pullback = sphere_quadrature(pulled_density(&pulled), 8).unwrap();
        let direct = integrate_h_over_sphere3(&hs, p, t, 8, 1.0).unwrap();
        assert!((via_pullback - direct.value).abs() < 1e-10);
        assert!((direct.value - 4.0 * PI * PI).abs() < 1e-9);
    }

    #[test]
    fn unknown_model_is_reported() {
        assert!(matches!(ModelSpec::parse("k3", None), Err(ModelError::UnknownModel(_))));
        assert_eq!(ModelSpec::parse("product_t4_hopf", Some(Variant::Plus)).unwrap(), ModelSpec::ProductT4Hopf(Variant::Plus));
    }
}
