#![allow(dead_code)]

use std::collections::BTreeMap;

use bismut::cohomology::HodgeTable;
use bismut::exterior::TensorField;
use bismut::hermitian::HermitianStructure;

/// Step for first differences; second differences extrapolate from `20·H1` and `10·H1`.
pub const H1: f64 = 1e-5;

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn values(field: &TensorField, p: &[f64]) -> Vec<f64> {
    field
        .eval_order(p, 0)
        .unwrap()
        .components()
        .iter()
        .map(|c| c.value())
        .collect()
}

fn shifted(p: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut q = p.to_vec();
    for &(i, d) in moves {
        q[i] += d;
    }
    q
}

/// Largest relative gap between jet derivatives (orders 1 and 2) of every
/// component of `field` and central differences of its plain values.
pub fn jet_vs_differences(field: &TensorField, p: &[f64]) -> f64 {
    let n = field.dim();
    let jets = field.eval_order(p, 2).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let (a, b) = (values(field, &shifted(p, &[(i, H1)])), values(field, &shifted(p, &[(i, -H1)])));
        for (c, jet) in jets.components().iter().enumerate() {
            let fd = (a[c] - b[c]) / (2.0 * H1);
            worst = worst.max(relative(jet.partial(&[i]).unwrap(), fd));
        }
    }
    // four-point mixed differences at h and h/2, Richardson-combined to cancel the h² term
    let mixed = |i: usize, j: usize, h: f64| -> Vec<f64> {
        let pp = values(field, &shifted(p, &[(i, h), (j, h)]));
        let pm = values(field, &shifted(p, &[(i, h), (j, -h)]));
        let mp = values(field, &shifted(p, &[(i, -h), (j, h)]));
        let mm = values(field, &shifted(p, &[(i, -h), (j, -h)]));
        (0..pp.len()).map(|c| (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h * h)).collect()
    };
    let h = 20.0 * H1;
    for i in 0..n {
        for j in i..n {
            let (coarse, fine) = (mixed(i, j, h), mixed(i, j, h / 2.0));
            for (c, jet) in jets.components().iter().enumerate() {
                let fd = (4.0 * fine[c] - coarse[c]) / 3.0;
                worst = worst.max(relative(jet.partial(&[i, j]).unwrap(), fd));
            }
        }
    }
    worst
}

pub fn model_vs_differences(hs: &HermitianStructure, points: usize, seed: u64) -> f64 {
    hs.sample_points(seed, points)
        .iter()
        .map(|p| jet_vs_differences(hs.metric(), p.coords()).max(jet_vs_differences(hs.complex_structure(), p.coords())))
        .fold(0.0, f64::max)
}

/// `E₂` dimensions by scattering every pair of Hodge numbers:
/// `h^{a,b}(B)·h^{c,d}(F)` lands at `(p, q, u, v) = (a+c, b+d, a+b, c+d)`.
pub fn scatter_e2(base: &HodgeTable, fiber: &HodgeTable) -> BTreeMap<(i64, i64, i64, i64), u64> {
    let mut out = BTreeMap::new();
    for ((a, b), hb) in base.entries() {
        for ((c, d), hf) in fiber.entries() {
            let (a, b, c, d) = (a as i64, b as i64, c as i64, d as i64);
            *out.entry((a + c, b + d, a + b, c + d)).or_insert(0) += hb * hf;
        }
    }
    out.retain(|_, v| *v > 0);
    out
}

/// `H_{abc} = Σ J^i_a J^j_b J^k_c (dω)_{ijk}` with `dω` from central differences of
/// `ω_{ab} = g(J∂_a, ∂_b)` built from plain values.
pub fn torsion_by_differences(hs: &HermitianStructure, p: &[f64]) -> Vec<f64> {
    let n = hs.dim();
    let omega = |q: &[f64]| -> Vec<f64> {
        let g = values(hs.metric(), q);
        let j = values(hs.complex_structure(), q);
        let mut w = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                // g(J∂_a, ∂_b) = Σ_i J^i_a g_{ib}
                w[a * n + b] = (0..n).map(|i| j[i * n + a] * g[i * n + b]).sum();
            }
        }
        w
    };
    let mut dw = vec![0.0; n * n * n];
    let grads: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let (a, b) = (omega(&shifted(p, &[(i, H1)])), omega(&shifted(p, &[(i, -H1)])));
            a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * H1)).collect()
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                dw[(i * n + j) * n + k] = grads[i][j * n + k] + grads[j][k * n + i] + grads[k][i * n + j];
            }
        }
    }
    let jm = values(hs.complex_structure(), p);
    let mut h = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            s += jm[i * n + a] * jm[j * n + b] * jm[k * n + c] * dw[(i * n + j) * n + k];
                        }
                    }
                }
                h[(a * n + b) * n + c] = s;
            }
        }
    }
    h
}
