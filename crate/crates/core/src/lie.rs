//! Exact invariant geometry on Lie algebras with a bi-invariant metric.
//!
//! Everything is rational arithmetic; a failed assertion here is a
//! counterexample, not round-off.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exterior::basis::{increasing, rank, sort_with_sign};

pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("structure constants are not antisymmetric: c^{k}_{{{i}{j}}} ≠ −c^{k}_{{{j}{i}}}")]
    Antisymmetry { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails on (e{i}, e{j}, e{k})")]
    Jacobi { i: usize, j: usize, k: usize },
    #[error("metric is not symmetric at ({i}, {j})")]
    MetricNotSymmetric { i: usize, j: usize },
    #[error("metric is degenerate")]
    MetricDegenerate,
    #[error("metric is not ad-invariant: b([e{x},e{y}],e{z}) + b(e{y},[e{x},e{z}]) ≠ 0")]
    NotInvariant { x: usize, y: usize, z: usize },
    #[error("J² ≠ −Id")]
    NotComplex,
    #[error("metric is not J-invariant")]
    NotCompatible,
    #[error("the algebra has no complex structure")]
    MissingComplexStructure,
    #[error("{field}: {detail}")]
    Input { field: String, detail: String },
}

fn input(field: impl Into<String>, detail: impl Into<String>) -> LieError {
    LieError::Input {
        field: field.into(),
        detail: detail.into(),
    }
}

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Structure constants, bi-invariant metric and optional complex structure.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraModel {
    name: String,
    dim: usize,
    /// `c[k m² + i m + j] = c^k_{ij}`
    c: Vec<Q>,
    /// `b[i m + j]`
    b: Vec<Q>,
    /// `J^a_b` at `a m + b`
    j: Option<Vec<Q>>,
}

impl LieAlgebraModel {
    /// Validate antisymmetry, Jacobi, metric symmetry, nondegeneracy,
    /// ad-invariance and (if given) `J² = −Id` and `b(J·,J·) = b`.
    pub fn new(name: impl Into<String>, dim: usize, c: Vec<Q>, b: Vec<Q>, j: Option<Vec<Q>>) -> Result<Self, LieError> {
        let m = dim;
        if c.len() != m * m * m {
            return Err(input("brackets", format!("expected {} structure constants", m * m * m)));
        }
        if b.len() != m * m {
            return Err(input("metric", format!("expected a {m}×{m} matrix")));
        }
        if let Some(j) = &j {
            if j.len() != m * m {
                return Err(input("complex_structure", format!("expected a {m}×{m} matrix")));
            }
        }
        let la = LieAlgebraModel {
            name: name.into(),
            dim,
            c,
            b,
            j,
        };
        la.validate()?;
        Ok(la)
    }

    fn validate(&self) -> Result<(), LieError> {
        let m = self.dim;
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    if self.cst(k, i, j) != &-self.cst(k, j, i) {
                        return Err(LieError::Antisymmetry { i, j, k });
                    }
                }
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let (ei, ej, ek) = (self.unit(i), self.unit(j), self.unit(k));
                    let s = add(
                        &add(&self.bracket(&ei, &self.bracket(&ej, &ek)), &self.bracket(&ej, &self.bracket(&ek, &ei))),
                        &self.bracket(&ek, &self.bracket(&ei, &ej)),
                    );
                    if s.iter().any(|x| !x.is_zero()) {
                        return Err(LieError::Jacobi { i, j, k });
                    }
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                if self.b[i * m + j] != self.b[j * m + i] {
                    return Err(LieError::MetricNotSymmetric { i, j });
                }
            }
        }
        if inverse(&self.b, m).is_none() {
            return Err(LieError::MetricDegenerate);
        }
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    let (ex, ey, ez) = (self.unit(x), self.unit(y), self.unit(z));
                    let s = self.inner(&self.bracket(&ex, &ey), &ez) + self.inner(&ey, &self.bracket(&ex, &ez));
                    if !s.is_zero() {
                        return Err(LieError::NotInvariant { x, y, z });
                    }
                }
            }
        }
        if let Some(j) = &self.j {
            let jj = mat_mul(j, j, m);
            for a in 0..m {
                for b in 0..m {
                    let expected = if a == b { -Q::one() } else { Q::zero() };
                    if jj[a * m + b] != expected {
                        return Err(LieError::NotComplex);
                    }
                }
            }
            for x in 0..m {
                for y in 0..m {
                    let (jx, jy) = (self.apply_j(&self.unit(x)), self.apply_j(&self.unit(y)));
                    if self.inner(&jx, &jy) != self.b[x * m + y] {
                        return Err(LieError::NotCompatible);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c^k_{ij}`
    pub fn cst(&self, k: usize, i: usize, j: usize) -> &Q {
        let m = self.dim;
        &self.c[k * m * m + i * m + j]
    }

    pub fn metric(&self) -> &[Q] {
        &self.b
    }

    pub fn complex_structure(&self) -> Option<&[Q]> {
        self.j.as_deref()
    }

    fn require_j(&self) -> Result<&[Q], LieError> {
        self.j.as_deref().ok_or(LieError::MissingComplexStructure)
    }

    pub fn unit(&self, i: usize) -> Vec<Q> {
        (0..self.dim).map(|k| if k == i { Q::one() } else { Q::zero() }).collect()
    }

    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let m = self.dim;
        let mut out = vec![Q::zero(); m];
        for i in 0..m {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..m {
                if y[j].is_zero() {
                    continue;
                }
                let w = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.cst(k, i, j);
                    if !c.is_zero() {
                        *o += &w * c;
                    }
                }
            }
        }
        out
    }

    pub fn inner(&self, x: &[Q], y: &[Q]) -> Q {
        let m = self.dim;
        let mut s = Q::zero();
        for i in 0..m {
            for j in 0..m {
                if !x[i].is_zero() && !y[j].is_zero() {
                    s += &x[i] * &self.b[i * m + j] * &y[j];
                }
            }
        }
        s
    }

    fn apply_j(&self, x: &[Q]) -> Vec<Q> {
        let j = self.j.as_ref().expect("complex structure present");
        mat_vec(j, x, self.dim)
    }

    /// The algebra of right-invariant fields: structure constants negated.
    pub fn right(&self) -> LieAlgebraModel {
        LieAlgebraModel {
            name: format!("{} (right)", self.name),
            dim: self.dim,
            c: self.c.iter().map(|x| -x).collect(),
            b: self.b.clone(),
            j: self.j.clone(),
        }
    }

    /// Jacobi identity, rechecked on demand.
    pub fn jacobi_holds(&self) -> bool {
        self.validate().is_ok()
    }

    /// `ω(X, Y) = b(JX, Y)`.
    pub fn fundamental_form(&self) -> Result<AlgebraForm, LieError> {
        self.require_j()?;
        let m = self.dim;
        Ok(AlgebraForm::from_fn(m, 2, |idx| self.inner(&self.apply_j(&self.unit(idx[0])), &self.unit(idx[1]))))
    }

    /// Chevalley–Eilenberg differential of an invariant form.
    pub fn d(&self, a: &AlgebraForm) -> AlgebraForm {
        let m = self.dim;
        let k = a.degree;
        if k + 1 > m {
            return AlgebraForm::zero(m, k + 1);
        }
        AlgebraForm::from_fn(m, k + 1, |xs| {
            let mut total = Q::zero();
            for i in 0..xs.len() {
                for j in i + 1..xs.len() {
                    let rest: Vec<usize> = xs.iter().enumerate().filter(|&(t, _)| t != i && t != j).map(|(_, &v)| v).collect();
                    let sign = if (i + j) % 2 == 0 { Q::one() } else { -Q::one() };
                    for l in 0..m {
                        let c = self.cst(l, xs[i], xs[j]);
                        if c.is_zero() {
                            continue;
                        }
                        let mut idx = vec![l];
                        idx.extend_from_slice(&rest);
                        total += &sign * c * a.get(&idx);
                    }
                }
            }
            total
        })
    }

    /// `dᶜa = −(da)(J·, …, J·)`.
    pub fn dc(&self, a: &AlgebraForm) -> Result<AlgebraForm, LieError> {
        let j = self.require_j()?;
        Ok(self.d(a).pull_by(j).scale(&-Q::one()))
    }

    /// `[JX,JY] − J[JX,Y] − J[X,JY] − [X,Y]`.
    pub fn nijenhuis(&self, x: &[Q], y: &[Q]) -> Result<Vec<Q>, LieError> {
        self.require_j()?;
        let (jx, jy) = (self.apply_j(x), self.apply_j(y));
        let t1 = self.bracket(&jx, &jy);
        let t2 = self.apply_j(&self.bracket(&jx, y));
        let t3 = self.apply_j(&self.bracket(x, &jy));
        let t4 = self.bracket(x, y);
        Ok((0..self.dim).map(|k| &t1[k] - &t2[k] - &t3[k] - &t4[k]).collect())
    }

    pub fn is_integrable(&self) -> Result<bool, LieError> {
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                if self.nijenhuis(&self.unit(i), &self.unit(j))?.iter().any(|x| !x.is_zero()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Display for LieAlgebraModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dim {})", self.name, self.dim)
    }
}

fn add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn mat_vec(a: &[Q], x: &[Q], m: usize) -> Vec<Q> {
    (0..m)
        .map(|r| {
            let mut s = Q::zero();
            for c in 0..m {
                if !a[r * m + c].is_zero() && !x[c].is_zero() {
                    s += &a[r * m + c] * &x[c];
                }
            }
            s
        })
        .collect()
}

fn mat_mul(a: &[Q], b: &[Q], m: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); m * m];
    for r in 0..m {
        for k in 0..m {
            if a[r * m + k].is_zero() {
                continue;
            }
            for c in 0..m {
                out[r * m + c] += &a[r * m + k] * &b[k * m + c];
            }
        }
    }
    out
}

/// Gauss–Jordan inverse over ℚ.
pub fn inverse(a: &[Q], m: usize) -> Option<Vec<Q>> {
    let mut lhs = a.to_vec();
    let mut rhs: Vec<Q> = (0..m * m).map(|f| if f / m == f % m { Q::one() } else { Q::zero() }).collect();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !lhs[r * m + col].is_zero())?;
        for c in 0..m {
            lhs.swap(pivot * m + c, col * m + c);
            rhs.swap(pivot * m + c, col * m + c);
        }
        let p = lhs[col * m + col].clone();
        for c in 0..m {
            lhs[col * m + c] /= &p;
            rhs[col * m + c] /= &p;
        }
        for r in 0..m {
            if r == col || lhs[r * m + col].is_zero() {
                continue;
            }
            let f = lhs[r * m + col].clone();
            for c in 0..m {
                let (l, rr) = (&lhs[col * m + c] * &f, &rhs[col * m + c] * &f);
                lhs[r * m + c] -= l;
                rhs[r * m + c] -= rr;
            }
        }
    }
    Some(rhs)
}

/// An exact alternating form on the algebra, stored on increasing index tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraForm {
    dim: usize,
    degree: usize,
    comps: Vec<Q>,
}

impl AlgebraForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        let len = if degree > dim { 0 } else { increasing(dim, degree).len() };
        AlgebraForm {
            dim,
            degree,
            comps: vec![Q::zero(); len],
        }
    }

    pub fn from_fn(dim: usize, degree: usize, f: impl Fn(&[usize]) -> Q) -> Self {
        AlgebraForm {
            dim,
            degree,
            comps: increasing(dim, degree).iter().map(|idx| f(idx)).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[Q] {
        &self.comps
    }

    /// Value on basis vectors, antisymmetrically extended.
    pub fn get(&self, idx: &[usize]) -> Q {
        match sort_with_sign(idx) {
            Some((sorted, sign)) => {
                let v = &self.comps[rank(self.dim, &sorted)];
                if sign < 0.0 {
                    -v
                } else {
                    v.clone()
                }
            }
            None => Q::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &Q) -> AlgebraForm {
        AlgebraForm {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &AlgebraForm) -> AlgebraForm {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        AlgebraForm {
            dim: self.dim,
            degree: self.degree,
            comps: add(&self.comps, &other.comps),
        }
    }

    /// `a(M·, …, M·)` with `M^a_b` at `a m + b`.
    pub fn pull_by(&self, mat: &[Q]) -> AlgebraForm {
        let m = self.dim;
        AlgebraForm::from_fn(m, self.degree, |idx| {
            // expand multilinearly over the columns M e_{idx_s}
            let mut total = Q::zero();
            let mut slots = vec![0usize; idx.len()];
            self.expand(mat, idx, 0, Q::one(), &mut slots, &mut total);
            total
        })
    }

    fn expand(&self, mat: &[Q], idx: &[usize], s: usize, w: Q, slots: &mut Vec<usize>, total: &mut Q) {
        if s == idx.len() {
            *total += w * self.get(slots);
            return;
        }
        let m = self.dim;
        for a in 0..m {
            let e = &mat[a * m + idx[s]];
            if e.is_zero() || slots[..s].contains(&a) {
                continue;
            }
            slots[s] = a;
            self.expand(mat, idx, s + 1, &w * e, slots, total);
        }
    }

    pub fn wedge(&self, other: &AlgebraForm) -> AlgebraForm {
        let (k, l) = (self.degree, other.degree);
        let m = self.dim;
        let mut out = AlgebraForm::zero(m, k + l);
        for (ia, a) in increasing(m, k).iter().enumerate() {
            if self.comps[ia].is_zero() {
                continue;
            }
            for (ib, b) in increasing(m, l).iter().enumerate() {
                if other.comps[ib].is_zero() {
                    continue;
                }
                let mut joined = a.clone();
                joined.extend_from_slice(b);
                if let Some((sorted, sign)) = sort_with_sign(&joined) {
                    let v = &self.comps[ia] * &other.comps[ib];
                    let slot = &mut out.comps[rank(m, &sorted)];
                    if sign < 0.0 {
                        *slot -= v;
                    } else {
                        *slot += v;
                    }
                }
            }
        }
        out
    }

    /// `a ∧ … ∧ a` (`p` factors).
    pub fn power(&self, p: usize) -> AlgebraForm {
        let mut acc = self.clone();
        for _ in 1..p {
            acc = acc.wedge(self);
        }
        acc
    }
}

/// `H(X, Y, Z) = −b([X,Y], Z)`.
pub fn cartan_torsion(la: &LieAlgebraModel) -> Result<AlgebraForm, LieError> {
    la.require_j()?;
    Ok(AlgebraForm::from_fn(la.dim, 3, |idx| {
        -la.inner(&la.bracket(&la.unit(idx[0]), &la.unit(idx[1])), &la.unit(idx[2]))
    }))
}

/// Invariant connection: `∇_{e_i} e_j = Γ^k_{ij} e_k`, entry `[k m² + i m + j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantConnection {
    dim: usize,
    gamma: Vec<Q>,
}

impl InvariantConnection {
    fn from_lowered(la: &LieAlgebraModel, lowered: impl Fn(usize, usize, usize) -> Q) -> Self {
        let m = la.dim;
        let binv = inverse(&la.b, m).expect("validated metric is nondegenerate");
        let mut gamma = vec![Q::zero(); m * m * m];
        for i in 0..m {
            for j in 0..m {
                let low: Vec<Q> = (0..m).map(|z| lowered(i, j, z)).collect();
                for k in 0..m {
                    let mut s = Q::zero();
                    for z in 0..m {
                        if !low[z].is_zero() {
                            s += &binv[k * m + z] * &low[z];
                        }
                    }
                    gamma[k * m * m + i * m + j] = s;
                }
            }
        }
        InvariantConnection { dim: m, gamma }
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Q {
        let m = self.dim;
        &self.gamma[k * m * m + i * m + j]
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.iter().all(Zero::is_zero)
    }

    /// `∇_X Y` for invariant fields.
    pub fn apply(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let m = self.dim;
        let mut out = vec![Q::zero(); m];
        for i in 0..m {
            for j in 0..m {
                if x[i].is_zero() || y[j].is_zero() {
                    continue;
                }
                let w = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    *o += &w * self.gamma(k, i, j);
                }
            }
        }
        out
    }

    /// `R(e_i, e_j) e_k`, entry `[((i m + j) m + k) m + l]` is the `e_l` component.
    pub fn curvature(&self, la: &LieAlgebraModel) -> Vec<Q> {
        let m = self.dim;
        let mut out = vec![Q::zero(); m.pow(4)];
        for i in 0..m {
            for j in 0..m {
                let (ei, ej) = (la.unit(i), la.unit(j));
                let br = la.bracket(&ei, &ej);
                for k in 0..m {
                    let ek = la.unit(k);
                    let a = self.apply(&ei, &self.apply(&ej, &ek));
                    let b = self.apply(&ej, &self.apply(&ei, &ek));
                    let c = self.apply(&br, &ek);
                    for l in 0..m {
                        out[((i * m + j) * m + k) * m + l] = &a[l] - &b[l] - &c[l];
                    }
                }
            }
        }
        out
    }

    /// `(∇_X b)(Y, Z) = −b(∇_X Y, Z) − b(Y, ∇_X Z)` vanishes identically.
    pub fn preserves_metric(&self, la: &LieAlgebraModel) -> bool {
        let m = self.dim;
        (0..m).all(|x| {
            (0..m).all(|y| {
                (0..m).all(|z| {
                    let (ex, ey, ez) = (la.unit(x), la.unit(y), la.unit(z));
                    (la.inner(&self.apply(&ex, &ey), &ez) + la.inner(&ey, &self.apply(&ex, &ez))).is_zero()
                })
            })
        })
    }

    /// `∇_X (JY) = J ∇_X Y` for all basis vectors.
    pub fn preserves_complex_structure(&self, la: &LieAlgebraModel) -> Result<bool, LieError> {
        la.require_j()?;
        let m = self.dim;
        Ok((0..m).all(|x| {
            (0..m).all(|y| {
                let (ex, ey) = (la.unit(x), la.unit(y));
                self.apply(&ex, &la.apply_j(&ey)) == la.apply_j(&self.apply(&ex, &ey))
            })
        }))
    }

    /// `(∇_X a)(Y₁, …) = −Σ a(…, ∇_X Y_s, …)` for an invariant 3-form.
    pub fn derivative_of_3form(&self, la: &LieAlgebraModel, a: &AlgebraForm) -> Vec<Q> {
        let m = self.dim;
        let mut out = vec![Q::zero(); m.pow(4)];
        for x in 0..m {
            let ex = la.unit(x);
            let nab: Vec<Vec<Q>> = (0..m).map(|y| self.apply(&ex, &la.unit(y))).collect();
            for y in 0..m {
                for z in 0..m {
                    for w in 0..m {
                        let mut s = Q::zero();
                        for t in 0..m {
                            s -= &nab[y][t] * a.get(&[t, z, w]) + &nab[z][t] * a.get(&[y, t, w]) + &nab[w][t] * a.get(&[y, z, t]);
                        }
                        out[((x * m + y) * m + z) * m + w] = s;
                    }
                }
            }
        }
        out
    }
}

/// Levi-Civita and Bismut connections of the invariant structure.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantConnections {
    pub levi_civita: InvariantConnection,
    pub bismut: InvariantConnection,
}

/// `b(∇_X Y, Z) = ½(b([X,Y],Z) − b([Y,Z],X) + b([Z,X],Y))` and
/// `b(∇^B_X Y, Z) = b(∇_X Y, Z) + ½ H(X,Y,Z)` with `H = −dᶜω`.
pub fn invariant_bismut_connection(la: &LieAlgebraModel) -> Result<InvariantConnections, LieError> {
    let half = Q::new(BigInt::from(1), BigInt::from(2));
    let e = |i: usize| la.unit(i);
    let koszul = |x: usize, y: usize, z: usize| -> Q {
        &half
            * (la.inner(&la.bracket(&e(x), &e(y)), &e(z)) - la.inner(&la.bracket(&e(y), &e(z)), &e(x))
                + la.inner(&la.bracket(&e(z), &e(x)), &e(y)))
    };
    let h = la.dc(&la.fundamental_form()?)?.scale(&-Q::one());
    let levi_civita = InvariantConnection::from_lowered(la, koszul);
    let bismut = InvariantConnection::from_lowered(la, |x, y, z| koszul(x, y, z) + &half * h.get(&[x, y, z]));
    Ok(InvariantConnections { levi_civita, bismut })
}

/// Exact comparison of the left- and right-invariant structures.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeftRightReport {
    /// `dᶜ_Lω_L + dᶜ_Rω_R = 0`
    pub torsion_identity: bool,
    /// `ddᶜ_Lω_L = 0`
    pub pluriclosed: bool,
    /// Sign of `ω_L^top / ω_R^top` (`0` if either top power vanishes).
    pub orientation_ratio: i32,
}

pub fn left_right_gk_check(la: &LieAlgebraModel) -> Result<LeftRightReport, LieError> {
    let right = la.right();
    let wl = la.fundamental_form()?;
    let wr = right.fundamental_form()?;
    let dcl = la.dc(&wl)?;
    let dcr = right.dc(&wr)?;
    let top = la.dim / 2;
    let (tl, tr) = (wl.power(top).comps[0].clone(), wr.power(top).comps[0].clone());
    let orientation_ratio = if tl.is_zero() || tr.is_zero() {
        0
    } else if tl.is_positive() == tr.is_positive() {
        1
    } else {
        -1
    };
    Ok(LeftRightReport {
        torsion_identity: dcl.add(&dcr).is_zero(),
        pluriclosed: la.d(&dcl).is_zero(),
        orientation_ratio,
    })
}

/// A nonzero component of the torsion, if there is one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionWitness {
    pub nonzero: bool,
    pub triple: Option<(usize, usize, usize)>,
    pub value: Option<String>,
}

pub fn torsion_nonexactness_witness(la: &LieAlgebraModel) -> Result<TorsionWitness, LieError> {
    let h = cartan_torsion(la)?;
    for (idx, v) in increasing(la.dim, 3).iter().zip(&h.comps) {
        if !v.is_zero() {
            return Ok(TorsionWitness {
                nonzero: true,
                triple: Some((idx[0], idx[1], idx[2])),
                value: Some(v.to_string()),
            });
        }
    }
    Ok(TorsionWitness {
        nonzero: false,
        triple: None,
        value: None,
    })
}

fn su2_block(c: &mut [Q], m: usize, base: [usize; 3]) {
    for s in 0..3 {
        let (i, j, k) = (base[s], base[(s + 1) % 3], base[(s + 2) % 3]);
        c[k * m * m + i * m + j] = q(2);
        c[k * m * m + j * m + i] = q(-2);
    }
}

fn identity(m: usize) -> Vec<Q> {
    (0..m * m).map(|f| if f / m == f % m { Q::one() } else { Q::zero() }).collect()
}

fn complex_from_pairs(m: usize, pairs: &[(usize, usize)]) -> Vec<Q> {
    // J e_a = e_b, J e_b = −e_a
    let mut j = vec![Q::zero(); m * m];
    for &(a, b) in pairs {
        j[b * m + a] = Q::one();
        j[a * m + b] = -Q::one();
    }
    j
}

/// `su(2) ⊕ ℝ` with basis `(e₀, e₁, e₂, e₃)`, `[e₁,e₂] = 2e₃` cyclically,
/// `b = Id`, `J e₁ = e₂`, `J e₃ = e₀`.
pub fn samelson_su2_r() -> LieAlgebraModel {
    let m = 4;
    let mut c = vec![Q::zero(); m * m * m];
    su2_block(&mut c, m, [1, 2, 3]);
    LieAlgebraModel::new("su2+r", m, c, identity(m), Some(complex_from_pairs(m, &[(1, 2), (3, 0)])))
        .expect("su(2) ⊕ ℝ is valid")
}

/// `su(2) ⊕ su(2) ⊕ ℝ²`: basis `e₀, e₁` abelian, then two `su(2)` triples.
pub fn su2_su2_r2() -> LieAlgebraModel {
    let m = 8;
    let mut c = vec![Q::zero(); m * m * m];
    su2_block(&mut c, m, [2, 3, 4]);
    su2_block(&mut c, m, [5, 6, 7]);
    LieAlgebraModel::new(
        "su2+su2+r2",
        m,
        c,
        identity(m),
        Some(complex_from_pairs(m, &[(2, 3), (4, 0), (5, 6), (7, 1)])),
    )
    .expect("su(2) ⊕ su(2) ⊕ ℝ² is valid")
}

/// The abelian algebra `ℝⁿ` with its standard complex structure.
pub fn abelian(n: usize) -> LieAlgebraModel {
    assert!(n % 2 == 0);
    let pairs: Vec<(usize, usize)> = (0..n).step_by(2).map(|a| (a, a + 1)).collect();
    LieAlgebraModel::new(format!("r{n}"), n, vec![Q::zero(); n * n * n], identity(n), Some(complex_from_pairs(n, &pairs)))
        .expect("abelian algebra is valid")
}

/// Parse `"p/q"`, `"n"` or an integer.
pub fn parse_rational(v: &toml::Value, field: &str) -> Result<Q, LieError> {
    match v {
        toml::Value::Integer(n) => Ok(q(*n)),
        toml::Value::String(s) => {
            let s = s.trim();
            let (num, den) = match s.split_once('/') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (s, "1"),
            };
            let num: BigInt = num.parse().map_err(|_| input(field, format!("`{s}` is not a rational")))?;
            let den: BigInt = den.parse().map_err(|_| input(field, format!("`{s}` is not a rational")))?;
            if den.is_zero() {
                return Err(input(field, "zero denominator"));
            }
            Ok(Q::new(num, den))
        }
        other => Err(input(field, format!("expected an integer or a \"p/q\" string, got {other}"))),
    }
}

fn parse_matrix(v: Option<&toml::Value>, m: usize, field: &str) -> Result<Option<Vec<Q>>, LieError> {
    let Some(v) = v else { return Ok(None) };
    let rows = v.as_array().ok_or_else(|| input(field, "expected an array of rows"))?;
    if rows.len() != m {
        return Err(input(field, format!("expected {m} rows, got {}", rows.len())));
    }
    let mut out = Vec::with_capacity(m * m);
    for (r, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| input(format!("{field}[{r}]"), "expected an array"))?;
        if row.len() != m {
            return Err(input(format!("{field}[{r}]"), format!("expected {m} entries, got {}", row.len())));
        }
        for (c, x) in row.iter().enumerate() {
            out.push(parse_rational(x, &format!("{field}[{r}][{c}]"))?);
        }
    }
    Ok(Some(out))
}

/// Parse an algebra description:
///
/// ```toml
/// name = "su2+r"
/// dim = 4
/// # [i, j, k, c^k_ij]; the antisymmetric partner is filled in
/// brackets = [[1, 2, 3, 2], [2, 3, 1, 2], [3, 1, 2, 2]]
/// metric = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
/// # row a, column b holds J^a_b
/// complex_structure = [[0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]]
/// ```
pub fn parse_algebra(text: &str) -> Result<LieAlgebraModel, LieError> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| input("file", e.message().to_string()))?;
    let dim = doc
        .get("dim")
        .and_then(toml::Value::as_integer)
        .ok_or_else(|| input("dim", "missing or not an integer"))?;
    if !(1..=64).contains(&dim) {
        return Err(input("dim", format!("{dim} is out of range")));
    }
    let m = dim as usize;
    let name = doc.get("name").and_then(toml::Value::as_str).unwrap_or("algebra").to_string();
    let mut c: Vec<Option<Q>> = vec![None; m * m * m];
    let brackets = match doc.get("brackets") {
        Some(v) => v.as_array().ok_or_else(|| input("brackets", "expected an array"))?.clone(),
        None => Vec::new(),
    };
    for (t, entry) in brackets.iter().enumerate() {
        let field = format!("brackets[{t}]");
        let e = entry
            .as_array()
            .filter(|e| e.len() == 4)
            .ok_or_else(|| input(&field, "expected [i, j, k, value]"))?;
        let mut idx = [0usize; 3];
        for s in 0..3 {
            let v = e[s].as_integer().ok_or_else(|| input(&field, "indices must be integers"))?;
            if v < 0 || v >= dim {
                return Err(input(&field, format!("index {v} outside 0..{dim}")));
            }
            idx[s] = v as usize;
        }
        let [i, j, k] = idx;
        let val = parse_rational(&e[3], &field)?;
        if i == j && !val.is_zero() {
            return Err(input(&field, "[e_i, e_i] must vanish"));
        }
        for (slot, v) in [(k * m * m + i * m + j, val.clone()), (k * m * m + j * m + i, -val)] {
            match &c[slot] {
                Some(existing) if *existing != v => {
                    return Err(input(&field, "conflicts with an earlier entry"));
                }
                _ => c[slot] = Some(v),
            }
        }
    }
    let c: Vec<Q> = c.into_iter().map(|x| x.unwrap_or_else(Q::zero)).collect();
    let b = parse_matrix(doc.get("metric"), m, "metric")?.unwrap_or_else(|| identity(m));
    let j = parse_matrix(doc.get("complex_structure"), m, "complex_structure")?;
    LieAlgebraModel::new(name, m, c, b, j)
}

pub fn load_algebra(path: &Path) -> Result<LieAlgebraModel, LieError> {
    let text = std::fs::read_to_string(path).map_err(|e| input(path.display().to_string(), e.to_string()))?;
    parse_algebra(&text)
}
