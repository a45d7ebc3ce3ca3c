//! Square matrices of jets.

use nalgebra::DMatrix;

use crate::jet::{fma_into, Jet};

pub(crate) fn mat_mul(a: &[Jet], b: &[Jet], n: usize) -> Vec<Jet> {
    let dim = a[0].dim();
    let order = a.iter().chain(b).map(Jet::order).min().unwrap_or(0);
    let mut out = vec![Jet::zero(dim, order); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                fma_into(&mut out[i * n + j], aik, &b[k * n + j]);
            }
        }
    }
    out
}

pub(crate) fn values(a: &[Jet], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| a[i * n + j].value())
}

/// Inverse of a jet matrix via the terminating Neumann series around its value.
pub(crate) fn inverse(a: &[Jet], n: usize) -> Option<Vec<Jet>> {
    let dim = a[0].dim();
    let order = a.iter().map(Jet::order).min().unwrap_or(0);
    let a0 = values(a, n);
    let inv0 = a0.clone().try_inverse()?;
    if !inv0.iter().all(|x| x.is_finite()) {
        return None;
    }
    let inv0_jets: Vec<Jet> = (0..n * n)
        .map(|f| Jet::constant(dim, order, inv0[(f / n, f % n)]))
        .collect();
    // E = A − A₀ has no constant term, so (−A₀⁻¹E)^m vanishes beyond `order`
    let step: Vec<Jet> = {
        let e: Vec<Jet> = a
            .iter()
            .map(|x| {
                let mut y = x.clone();
                let c = y.value();
                y = y - c;
                y
            })
            .collect();
        mat_mul(&inv0_jets, &e, n).into_iter().map(|x| -x).collect()
    };
    let mut term = inv0_jets.clone();
    let mut sum = inv0_jets;
    for _ in 0..order {
        term = mat_mul(&step, &term, n);
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
    }
    Some(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_times_matrix_is_identity_jet() {
        let p = [0.3, -0.8];
        let x = Jet::seeds(&p, 3);
        let a = vec![
            x[0].exp() + 2.0,
            &x[0] * &x[1],
            x[1].sin(),
            (&x[1] * &x[1]) + 3.0,
        ];
        let inv = inverse(&a, 2).unwrap();
        let prod = mat_mul(&a, &inv, 2);
        for (f, e) in prod.iter().enumerate() {
            let id = if f / 2 == f % 2 { 1.0 } else { 0.0 };
            assert!((e.value() - id).abs() < 1e-14);
            assert!(e.coeffs()[1..].iter().all(|c| c.abs() < 1e-13), "{e:?}");
        }
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let a = vec![Jet::constant(1, 3, 1.0), Jet::constant(1, 3, 2.0), Jet::constant(1, 3, 2.0), Jet::constant(1, 3, 4.0)];
        assert!(inverse(&a, 2).is_none());
    }
}
