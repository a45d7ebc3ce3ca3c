mod common;

use std::collections::BTreeMap;

use bismut::cohomology::{
    borel_e2, mapping_torus_cohomology, parity_check_b1, product_betti_two_ways, smith_normal_form, GradedIntegerMap,
    HodgeTable, IntegerMatrix,
};
use bismut::exterior::{lie_bracket, DifferentialForm, SmoothMap, TensorField};
use bismut::lie::{su2_su2_r2, AlgebraForm, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

const DIM: usize = 4;

/// Component `c` of a random smooth form: `a₀ + a₁ x_{c mod n} x_{(c+1) mod n} + a₂ sin(a₃ x_{(c+2) mod n})`.
fn smooth_form(degree: usize, coeffs: Vec<f64>) -> DifferentialForm {
    let count = bismut::exterior::basis::increasing(DIM, degree).len();
    DifferentialForm::from_expr(DIM, degree, move |x| {
        (0..count)
            .map(|c| {
                let a = &coeffs[(4 * c) % coeffs.len()..];
                let (i, j, k) = (c % DIM, (c + 1) % DIM, (c + 2) % DIM);
                (&x[i] * &x[j]).scale(a[1]) + (x[k].scale(a[3])).sin().scale(a[2]) + a[0]
            })
            .collect()
    })
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 32)
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, DIM)
}

/// A smooth map `ℝ⁴ → ℝ⁴`: a linear part plus a small sine perturbation.
fn smooth_map(m: Vec<f64>) -> SmoothMap {
    SmoothMap::from_expr(DIM, DIM, move |x| {
        (0..DIM)
            .map(|a| {
                let mut y = x[(a + 1) % DIM].sin().scale(0.3 * m[16 + a]);
                for b in 0..DIM {
                    y += &x[b].scale(m[a * DIM + b]);
                }
                y
            })
            .collect()
    })
}

fn map_coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 20)
}

fn close(a: &bismut::exterior::FormJet, b: &bismut::exterior::FormJet) -> bool {
    a.sub(b).max_abs() <= 1e-10 * (1.0 + a.max_abs().max(b.max_abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squared_vanishes(c in coeffs(), degree in 0usize..3, p in point()) {
        let a = smooth_form(degree, c);
        let dda = a.exterior_derivative().unwrap().exterior_derivative().unwrap();
        prop_assert!(dda.eval(&p).unwrap().max_abs() < 1e-11);
    }

    #[test]
    fn leibniz_rule(c1 in coeffs(), c2 in coeffs(), k in 0usize..3, p in point()) {
        let (a, b) = (smooth_form(k, c1), smooth_form(1, c2));
        let lhs = a.wedge(&b).unwrap().exterior_derivative().unwrap();
        let da_b = a.exterior_derivative().unwrap().wedge(&b).unwrap();
        let a_db = a.wedge(&b.exterior_derivative().unwrap()).unwrap();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = da_b.add(&a_db.scale(sign));
        prop_assert!(close(&lhs.eval(&p).unwrap(), &rhs.eval(&p).unwrap()));
    }

    #[test]
    fn pullback_is_functorial(m1 in map_coeffs(), m2 in map_coeffs(), c in coeffs(), p in point()) {
        let (f, g) = (smooth_map(m1), smooth_map(m2));
        let a = smooth_form(2, c);
        let composite = f.after(&g).unwrap().pullback(&a).unwrap();
        let stepwise = g.pullback(&f.pullback(&a).unwrap()).unwrap();
        prop_assert!(close(&composite.eval(&p).unwrap(), &stepwise.eval(&p).unwrap()));
    }

    #[test]
    fn pullback_commutes_with_d(m in map_coeffs(), c in coeffs(), p in point()) {
        let f = smooth_map(m);
        let a = smooth_form(1, c);
        let lhs = f.pullback(&a).unwrap().exterior_derivative().unwrap();
        let rhs = f.pullback(&a.exterior_derivative().unwrap()).unwrap();
        prop_assert!(close(&lhs.eval(&p).unwrap(), &rhs.eval(&p).unwrap()));
    }

    #[test]
    fn bracket_is_antisymmetric(c1 in coeffs(), c2 in coeffs(), p in point()) {
        let field = |c: Vec<f64>| TensorField::vector(DIM, move |x| {
            (0..DIM).map(|a| (&x[a] * &x[(a + 1) % DIM]).scale(c[a]) + x[(a + 2) % DIM].cos().scale(c[a + 4])).collect()
        });
        let (x, y) = (field(c1), field(c2));
        let xy = lie_bracket(&x, &y).unwrap().eval(&p).unwrap();
        let yx = lie_bracket(&y, &x).unwrap().eval(&p).unwrap();
        for (a, b) in xy.components().iter().zip(yx.components()) {
            prop_assert!((a.value() + b.value()).abs() < 1e-12);
        }
    }

    #[test]
    fn jets_agree_with_differences(c in prop::collection::vec(-1.0f64..1.0, 6), p in point()) {
        let t = TensorField::from_expr(DIM, 0, 1, move |x| {
            vec![
                (&x[0] * &x[1]).exp().scale(c[0]),
                (x[2].square() + 1.0).ln().scale(c[1]),
                (x[3].scale(c[2])).sin() * &x[0],
                (x[1].square() + 2.0).sqrt().scale(c[3]) + x[2].powi(3).scale(c[4]),
            ]
        });
        prop_assert!(common::jet_vs_differences(&t, &p) < 1e-6);
    }
}

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntegerMatrix> {
    prop::collection::vec(-6i64..7, rows * cols)
        .prop_map(move |v| IntegerMatrix::from_fn(rows, cols, |r, c| BigInt::from(v[r * cols + c])))
}

/// Unimodular matrix as a product of elementary row operations.
fn unimodular(n: usize) -> impl Strategy<Value = IntegerMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..4, any::<bool>()), 0..12).prop_map(move |ops| {
        let mut m = IntegerMatrix::identity(n);
        for (i, j, k, neg) in ops {
            let mut rows: Vec<Vec<i64>> = (0..n).map(|r| (0..n).map(|c| i64::from(r == c)).collect()).collect();
            if i != j {
                rows[i][j] = k;
            } else if neg {
                rows[i][i] = -1;
            }
            m = IntegerMatrix::from_rows(&rows).mul(&m);
        }
        m
    })
}

/// `det` by expansion over permutations.
fn leibniz_det(a: &IntegerMatrix) -> BigInt {
    fn perms(n: usize) -> Vec<(Vec<usize>, i32)> {
        if n == 0 {
            return vec![(vec![], 1)];
        }
        let mut out = Vec::new();
        for (p, s) in perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                // inserting at `pos` passes over n − 1 − pos larger-indexed slots
                let sign = if (n - 1 - pos) % 2 == 0 { s } else { -s };
                out.push((q, sign));
            }
        }
        out
    }
    perms(a.rows())
        .into_iter()
        .map(|(p, s)| {
            let prod: BigInt = p.iter().enumerate().map(|(r, &c)| a.get(r, c).clone()).product();
            prod * s
        })
        .sum()
}

fn hodge_table(n: usize) -> impl Strategy<Value = HodgeTable> {
    prop::collection::vec(0u64..4, (n + 1) * (n + 1)).prop_map(move |h| {
        let mut e = BTreeMap::new();
        for p in 0..=n {
            for q in 0..=n {
                e.insert((p, q), h[p * (n + 1) + q]);
            }
        }
        HodgeTable::new("random", n, e).unwrap()
    })
}

/// Realification of a Gaussian-integer matrix, and the complex structure it commutes with.
fn complex_linear(n: usize) -> impl Strategy<Value = (IntegerMatrix, IntegerMatrix)> {
    prop::collection::vec((-2i64..3, -2i64..3), n * n).prop_map(move |z| {
        let m = IntegerMatrix::from_fn(2 * n, 2 * n, |r, c| {
            let (a, b) = z[(r / 2) * n + c / 2];
            BigInt::from(match (r % 2, c % 2) {
                (0, 0) | (1, 1) => a,
                (0, 1) => -b,
                _ => b,
            })
        });
        let j = IntegerMatrix::from_fn(2 * n, 2 * n, |r, c| {
            BigInt::from(if r / 2 != c / 2 {
                0
            } else {
                match (r % 2, c % 2) {
                    (0, 1) => -1,
                    (1, 0) => 1,
                    _ => 0,
                }
            })
        });
        (m, j)
    })
}

fn inverse_unimodular(s: &IntegerMatrix) -> IntegerMatrix {
    // adjugate over det = ±1
    let n = s.rows();
    let det = s.determinant();
    IntegerMatrix::from_fn(n, n, |r, c| {
        let minor = IntegerMatrix::from_fn(n - 1, n - 1, |i, j| {
            s.get(if i < c { i } else { i + 1 }, if j < r { j } else { j + 1 }).clone()
        });
        let sign = if (r + c) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        sign * minor.determinant() * &det
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_multiplies_back(a in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| small_matrix(r, c))) {
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert!(s.u.determinant().abs().is_one());
        prop_assert!(s.v.determinant().abs().is_one());
        let f = s.invariant_factors();
        for w in f.windows(2) {
            prop_assert!(w[0].is_zero() && w[1].is_zero() || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero()));
        }
        for r in 0..s.d.rows() {
            for c in 0..s.d.cols() {
                prop_assert!(r == c || s.d.get(r, c).is_zero());
            }
        }
    }

    #[test]
    fn determinant_matches_permutation_expansion(a in (1usize..6).prop_flat_map(|n| small_matrix(n, n))) {
        prop_assert_eq!(a.determinant(), leibniz_det(&a));
    }

    #[test]
    fn mapping_tori_have_zero_euler_characteristic(
        maps in prop::collection::vec((1usize..4).prop_flat_map(unimodular), 1..5)
    ) {
        let psi = GradedIntegerMap::new(maps, None).unwrap();
        let mt = mapping_torus_cohomology(&psi);
        prop_assert_eq!(mt.euler_characteristic, 0);
        let alt: i64 = mt.betti.iter().enumerate().map(|(r, b)| if r % 2 == 0 { *b as i64 } else { -(*b as i64) }).sum();
        prop_assert_eq!(alt, 0);
        let (a, b) = product_betti_two_ways(&psi);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn e2_matches_scatter_oracle(base in hodge_table(2), fiber in (0usize..3).prop_flat_map(hodge_table)) {
        let oracle = common::scatter_e2(&base, &fiber);
        for p in -1..=5 {
            for q in -1..=5 {
                for u in -1..=5 {
                    for v in -1..=5 {
                        let expected = oracle.get(&(p, q, u, v)).copied().unwrap_or(0);
                        prop_assert_eq!(borel_e2(&base, &fiber, p, q, u, v), expected, "({},{},{},{})", p, q, u, v);
                    }
                }
            }
        }
    }

    #[test]
    fn commuting_complex_structure_forces_even_fixed_space(
        (c, j0) in complex_linear(2),
        s in unimodular(4),
    ) {
        let si = inverse_unimodular(&s);
        prop_assert!(s.mul(&si).is_identity());
        let psi = s.mul(&c).mul(&si);
        let j = s.mul(&j0).mul(&si);
        let v = parity_check_b1(&psi, &j).unwrap();
        prop_assert!(v.n1_even);
        prop_assert!(v.b1_odd);
    }

    #[test]
    fn chevalley_eilenberg_d_squares_to_zero(vals in prop::collection::vec(-5i64..6, 70), degree in 0usize..4) {
        let la = su2_su2_r2();
        let basis = bismut::exterior::basis::increasing(8, degree);
        let a = AlgebraForm::from_fn(8, degree, |idx| {
            let pos = basis.iter().position(|b| b.as_slice() == idx).unwrap();
            Q::from_integer(BigInt::from(vals[pos % vals.len()]))
        });
        prop_assert!(la.d(&la.d(&a)).is_zero());
    }
}
