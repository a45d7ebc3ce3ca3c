//! Integer linear algebra for mapping-torus cohomology and Borel `E₂` pages.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exterior::basis::increasing;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CohomologyError {
    #[error("{field}: {detail}")]
    Input { field: String, detail: String },
    #[error("degree {degree}: expected a {expected}×{expected} matrix, got {rows}×{cols}")]
    DegreeMismatch {
        degree: usize,
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("degree {degree}: map is not invertible over ℚ")]
    NotInvertible { degree: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

fn input(field: impl Into<String>, detail: impl Into<String>) -> CohomologyError {
    CohomologyError::Input {
        field: field.into(),
        detail: detail.into(),
    }
}

/// Dense matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigInt) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: (0..rows * cols).map(|k| f(k / cols, k % cols)).collect(),
        }
    }

    /// Build from rows of machine integers; all rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == cols), "ragged rows");
        IntegerMatrix::from_fn(rows.len(), cols, |r, c| BigInt::from(rows[r].as_ref()[c]))
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        IntegerMatrix::from_fn(n, n, |r, c| if r == c { BigInt::from(entries[r]) } else { BigInt::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    fn at(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }

    pub fn transpose(&self) -> Self {
        IntegerMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        *out.at(r, c) += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntegerMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == IntegerMatrix::identity(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !a.get(r, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    *a.at(i, j) = v;
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// `row[dst] += f · row[src]`
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for c in 0..self.cols {
            let v = self.get(src, c) * f;
            *self.at(dst, c) += v;
        }
    }

    /// `col[dst] += f · col[src]`
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for r in 0..self.rows {
            let v = self.get(r, src) * f;
            *self.at(r, dst) += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c).clone();
            *self.at(r, c) = v;
        }
    }

    /// `r`-th exterior power on the lexicographic basis of `Λ^r`: entries are `r × r` minors.
    pub fn exterior_power(&self, r: usize) -> IntegerMatrix {
        assert!(self.is_square());
        let n = self.rows;
        let basis = increasing(n, r);
        IntegerMatrix::from_fn(basis.len(), basis.len(), |i, j| {
            let (rows, cols) = (&basis[i], &basis[j]);
            IntegerMatrix::from_fn(r, r, |a, b| self.get(rows[a], cols[b]).clone()).determinant()
        })
    }

    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank()
    }
}

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal, `dᵢ | dᵢ₊₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for r in t..m {
                for c in t..n {
                    let x = d.get(r, c);
                    if !x.is_zero() && best.map_or(true, |(br, bc)| x.abs() < d.get(br, bc).abs()) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = best else { break };
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);
            let p = d.get(t, t).clone();
            let mut clean = true;
            for r in t + 1..m {
                let q = d.get(r, t).div_floor(&p);
                if !q.is_zero() {
                    d.add_row(r, t, &-&q);
                    u.add_row(r, t, &-&q);
                }
                clean &= d.get(r, t).is_zero();
            }
            for c in t + 1..n {
                let q = d.get(t, c).div_floor(&p);
                if !q.is_zero() {
                    d.add_col(c, t, &-&q);
                    v.add_col(c, t, &-&q);
                }
                clean &= d.get(t, c).is_zero();
            }
            if !clean {
                continue;
            }
            // enforce divisibility of the remaining block by the pivot
            let offending = (t + 1..m).find(|&r| (t + 1..n).any(|c| !d.get(r, c).is_multiple_of(&p)));
            match offending {
                Some(r) => {
                    d.add_row(t, r, &BigInt::one());
                    u.add_row(t, r, &BigInt::one());
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { u, d, v }
}

/// Dimension over ℚ of `ker(A)` for a square matrix.
pub fn kernel_dimension(a: &IntegerMatrix) -> usize {
    a.cols - a.rank()
}

/// `ψ*_r` on `H^r(K, ℤ)/torsion` for each degree `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedIntegerMap {
    maps: Vec<IntegerMatrix>,
}

impl GradedIntegerMap {
    /// Check squareness, agreement with `betti` and invertibility over ℚ.
    pub fn new(maps: Vec<IntegerMatrix>, betti: Option<&[usize]>) -> Result<Self, CohomologyError> {
        if let Some(b) = betti {
            if b.len() != maps.len() {
                return Err(input(
                    "psi",
                    format!("{} matrices given for a Betti vector of length {}", maps.len(), b.len()),
                ));
            }
        }
        for (degree, m) in maps.iter().enumerate() {
            let expected = betti.map_or(m.rows, |b| b[degree]);
            if m.rows != expected || m.cols != expected {
                return Err(CohomologyError::DegreeMismatch {
                    degree,
                    expected,
                    rows: m.rows,
                    cols: m.cols,
                });
            }
            if m.rank() != m.rows {
                return Err(CohomologyError::NotInvertible { degree });
            }
        }
        Ok(GradedIntegerMap { maps })
    }

    pub fn degree(&self, r: usize) -> &IntegerMatrix {
        &self.maps[r]
    }

    pub fn top_degree(&self) -> usize {
        self.maps.len().saturating_sub(1)
    }

    pub fn betti(&self) -> Vec<usize> {
        self.maps.iter().map(IntegerMatrix::rows).collect()
    }

    pub fn maps(&self) -> &[IntegerMatrix] {
        &self.maps
    }

    /// The induced map on `H(K × S³) = H(K) ⊗ H(S³)`, i.e. `ψ × Id`.
    pub fn times_s3(&self) -> GradedIntegerMap {
        let top = self.maps.len() + 3;
        let maps = (0..top)
            .map(|r| {
                let a = self.maps.get(r);
                let b = r.checked_sub(3).and_then(|s| self.maps.get(s));
                block_diagonal(a, b)
            })
            .collect();
        GradedIntegerMap { maps }
    }
}

fn block_diagonal(a: Option<&IntegerMatrix>, b: Option<&IntegerMatrix>) -> IntegerMatrix {
    let (na, nb) = (a.map_or(0, |m| m.rows), b.map_or(0, |m| m.rows));
    IntegerMatrix::from_fn(na + nb, na + nb, |r, c| match (r < na, c < na) {
        (true, true) => a.unwrap().get(r, c).clone(),
        (false, false) => b.unwrap().get(r - na, c - na).clone(),
        _ => BigInt::zero(),
    })
}

/// Cohomology of the mapping torus from the Wang decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MappingTorusCohomology {
    /// `dim ker(ψ*_r − Id)`
    pub n_dims: Vec<usize>,
    /// `dim coker(ψ*_r − Id) ⊗ ℚ`
    pub c_dims: Vec<usize>,
    /// `b_r = dim N^r + dim C^{r−1}`, for `r = 0 … top + 1`
    pub betti: Vec<usize>,
    /// Torsion invariant factors of `C^{r−1}`, contributing to `H^r(M_ψ, ℤ)`
    pub torsion: Vec<Vec<String>>,
    pub euler_characteristic: i64,
}

pub fn mapping_torus_cohomology(psi: &GradedIntegerMap) -> MappingTorusCohomology {
    let mut n_dims = Vec::new();
    let mut c_dims = Vec::new();
    let mut torsion_c = Vec::new();
    for m in &psi.maps {
        let shifted = m.sub(&IntegerMatrix::identity(m.rows));
        let snf = smith_normal_form(&shifted);
        let rank = snf.rank();
        n_dims.push(m.cols - rank);
        c_dims.push(m.rows - rank);
        torsion_c.push(
            snf.invariant_factors()
                .into_iter()
                .filter(|f| !f.is_one())
                .map(|f| f.to_string())
                .collect::<Vec<_>>(),
        );
    }
    let top = psi.maps.len();
    let mut betti = Vec::with_capacity(top + 1);
    let mut torsion = Vec::with_capacity(top + 1);
    for r in 0..=top {
        let n = n_dims.get(r).copied().unwrap_or(0);
        let c = r.checked_sub(1).map_or(0, |s| c_dims[s]);
        betti.push(n + c);
        torsion.push(r.checked_sub(1).map_or_else(Vec::new, |s| torsion_c[s].clone()));
    }
    let euler_characteristic = betti
        .iter()
        .enumerate()
        .map(|(r, &b)| if r % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum();
    MappingTorusCohomology {
        n_dims,
        c_dims,
        betti,
        torsion,
        euler_characteristic,
    }
}

/// `ψ*` for the torus rotation `(x₁,x₂,x₃,x₄) ↦ (x₂,−x₁,x₄,−x₃)`: exterior powers
/// of the transpose, since `ψ*dxᵢ = Σⱼ Pᵢⱼ dxⱼ`.
pub fn induced_map_t4_rotation() -> GradedIntegerMap {
    let p = crate::models::psi_matrix();
    let pt = IntegerMatrix::from_rows(&p).transpose();
    let maps = (0..=4).map(|r| pt.exterior_power(r)).collect();
    GradedIntegerMap::new(maps, Some(&[1, 4, 6, 4, 1])).expect("rotation is invertible")
}

/// `b_r(M × S³) = b_r(M) + b_{r−3}(M)`.
pub fn kunneth_with_s3(betti: &[usize]) -> Vec<usize> {
    (0..betti.len() + 3)
        .map(|r| betti.get(r).copied().unwrap_or(0) + r.checked_sub(3).and_then(|s| betti.get(s)).copied().unwrap_or(0))
        .collect()
}

/// `b(M_f)` for `f = ψ × Id` on `K × S³`, computed as `M_ψ × S³` and as the
/// mapping torus of the product map; both are returned.
pub fn product_betti_two_ways(psi: &GradedIntegerMap) -> (Vec<usize>, Vec<usize>) {
    let via_kunneth = kunneth_with_s3(&mapping_torus_cohomology(psi).betti);
    let direct = mapping_torus_cohomology(&psi.times_s3()).betti;
    (via_kunneth, direct)
}

/// Parity of `dim N¹` under a commuting complex structure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParityVerdict {
    pub n1: usize,
    pub n1_even: bool,
    /// `b₁(M_ψ) = dim N¹ + 1`
    pub b1: usize,
    pub b1_odd: bool,
}

pub fn parity_check_b1(psi1: &IntegerMatrix, j: &IntegerMatrix) -> Result<ParityVerdict, CohomologyError> {
    if !psi1.is_square() || !j.is_square() || psi1.rows != j.rows {
        return Err(CohomologyError::Precondition(format!(
            "ψ₁ is {}×{} and J is {}×{}; both must be square of the same size",
            psi1.rows, psi1.cols, j.rows, j.cols
        )));
    }
    let n = j.rows;
    let minus_id = IntegerMatrix::from_fn(n, n, |r, c| if r == c { -BigInt::one() } else { BigInt::zero() });
    if j.mul(j) != minus_id {
        return Err(CohomologyError::Precondition("J² ≠ −Id".into()));
    }
    if psi1.mul(j) != j.mul(psi1) {
        return Err(CohomologyError::Precondition("ψ₁ does not commute with J".into()));
    }
    let n1 = kernel_dimension(&psi1.sub(&IntegerMatrix::identity(n)));
    Ok(ParityVerdict {
        n1,
        n1_even: n1 % 2 == 0,
        b1: n1 + 1,
        b1_odd: (n1 + 1) % 2 == 1,
    })
}

/// `dim ker(A − Id)` for an isometry of the K3 lattice, `A ≠ Id`.
pub fn k3_fixed_space(a: &IntegerMatrix) -> Result<usize, CohomologyError> {
    if a.rows != 22 || a.cols != 22 {
        return Err(CohomologyError::Precondition(format!(
            "expected a 22×22 matrix on H²(K3, ℤ), got {}×{}",
            a.rows, a.cols
        )));
    }
    if a.is_identity() {
        return Err(CohomologyError::Precondition(
            "A = Id: the bound needs ψ* ≠ Id on H², which is what a nontrivial ψ provides".into(),
        ));
    }
    Ok(kernel_dimension(&a.sub(&IntegerMatrix::identity(22))))
}

/// Hodge numbers `h^{p,q}` of a compact complex manifold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HodgeTable {
    pub name: String,
    pub complex_dim: usize,
    entries: BTreeMap<(usize, usize), u64>,
}

impl HodgeTable {
    pub fn new(name: impl Into<String>, complex_dim: usize, entries: BTreeMap<(usize, usize), u64>) -> Result<Self, CohomologyError> {
        if let Some(((p, q), _)) = entries.iter().find(|((p, q), _)| *p > complex_dim || *q > complex_dim) {
            return Err(input("entries", format!("h^{{{p},{q}}} lies outside 0..={complex_dim}")));
        }
        Ok(HodgeTable {
            name: name.into(),
            complex_dim,
            entries,
        })
    }

    /// A point: `h^{0,0} = 1`.
    pub fn point() -> Self {
        HodgeTable::new("point", 0, BTreeMap::from([((0, 0), 1)])).expect("valid")
    }

    pub fn get(&self, p: i64, q: i64) -> u64 {
        if p < 0 || q < 0 {
            return 0;
        }
        self.entries.get(&(p as usize, q as usize)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }
}

/// `^{p,q}E₂^{u,v} = Σ_k h^{k,u−k}(B) · h^{p−k,q−u+k}(F)`; zero if `p+q ≠ u+v` or an index is negative.
pub fn borel_e2(base: &HodgeTable, fiber: &HodgeTable, p: i64, q: i64, u: i64, v: i64) -> u64 {
    if p + q != u + v || p < 0 || q < 0 || u < 0 || v < 0 {
        return 0;
    }
    (0..=u).map(|k| base.get(k, u - k) * fiber.get(p - k, q - u + k)).sum()
}

/// One nonzero entry of an `E₂` table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E2Entry {
    pub p: i64,
    pub q: i64,
    pub u: i64,
    pub v: i64,
    pub dim: u64,
}

/// All nonzero `^{p,q}E₂^{u,v}` with `p ∈ [p0, p1]`, `q ∈ [q0, q1]`.
pub fn e2_table(base: &HodgeTable, fiber: &HodgeTable, p: (i64, i64), q: (i64, i64)) -> Vec<E2Entry> {
    let mut out = Vec::new();
    for pp in p.0..=p.1 {
        for qq in q.0..=q.1 {
            for u in 0..=(pp + qq).max(0) {
                let v = pp + qq - u;
                let dim = borel_e2(base, fiber, pp, qq, u, v);
                if dim > 0 {
                    out.push(E2Entry { p: pp, q: qq, u, v, dim });
                }
            }
        }
    }
    out
}

fn as_usize(v: &toml::Value, field: &str) -> Result<usize, CohomologyError> {
    v.as_integer()
        .filter(|x| *x >= 0)
        .map(|x| x as usize)
        .ok_or_else(|| input(field, "expected a nonnegative integer"))
}

fn parse_int_matrix(v: &toml::Value, field: &str) -> Result<IntegerMatrix, CohomologyError> {
    let rows = v.as_array().ok_or_else(|| input(field, "expected an array of rows"))?;
    let mut parsed = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| input(format!("{field}[{r}]"), "expected an array"))?;
        let mut out = Vec::with_capacity(row.len());
        for (c, x) in row.iter().enumerate() {
            let f = format!("{field}[{r}][{c}]");
            let n = match x {
                toml::Value::Integer(n) => BigInt::from(*n),
                toml::Value::String(s) => s.trim().parse().map_err(|_| input(&f, format!("`{s}` is not an integer")))?,
                _ => return Err(input(&f, "expected an integer")),
            };
            out.push(n);
        }
        parsed.push(out);
    }
    let cols = parsed.first().map_or(0, Vec::len);
    if let Some(r) = parsed.iter().position(|row| row.len() != cols) {
        return Err(input(format!("{field}[{r}]"), format!("expected {cols} entries")));
    }
    Ok(IntegerMatrix::from_fn(parsed.len(), cols, |r, c| parsed[r][c].clone()))
}

/// Parse a Hodge table given as `complex_dim` and `entries = [[p, q, h], …]`.
pub fn parse_hodge_table(v: &toml::Value, field: &str) -> Result<HodgeTable, CohomologyError> {
    let t = v.as_table().ok_or_else(|| input(field, "expected a table"))?;
    let name = t.get("name").and_then(toml::Value::as_str).unwrap_or(field).to_string();
    let complex_dim = as_usize(
        t.get("complex_dim").ok_or_else(|| input(format!("{field}.complex_dim"), "missing"))?,
        &format!("{field}.complex_dim"),
    )?;
    let mut entries = BTreeMap::new();
    let list = t
        .get("entries")
        .and_then(toml::Value::as_array)
        .ok_or_else(|| input(format!("{field}.entries"), "missing or not an array"))?;
    for (i, e) in list.iter().enumerate() {
        let f = format!("{field}.entries[{i}]");
        let e = e.as_array().filter(|e| e.len() == 3).ok_or_else(|| input(&f, "expected [p, q, h]"))?;
        let (p, q, h) = (as_usize(&e[0], &f)?, as_usize(&e[1], &f)?, as_usize(&e[2], &f)?);
        if entries.insert((p, q), h as u64).is_some() {
            return Err(input(&f, format!("duplicate entry for h^{{{p},{q}}}")));
        }
    }
    HodgeTable::new(name, complex_dim, entries)
}

/// A pair of Hodge tables for a Borel computation.
#[derive(Clone, Debug, PartialEq)]
pub struct HodgeFile {
    pub base: HodgeTable,
    pub fiber: HodgeTable,
}

pub fn parse_hodge_file(text: &str) -> Result<HodgeFile, CohomologyError> {
    let doc: toml::Value = text.parse::<toml::Table>().map(toml::Value::Table).map_err(|e| input("file", e.message()))?;
    let get = |k: &str| doc.get(k).ok_or_else(|| input(k, "missing table"));
    Ok(HodgeFile {
        base: parse_hodge_table(get("base")?, "base")?,
        fiber: parse_hodge_table(get("fiber")?, "fiber")?,
    })
}

/// A cohomology job: Betti vector of `K`, `ψ*_r` matrices, optional complex
/// structure on degree 1 and optional Hodge tables.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyJob {
    pub name: String,
    pub betti_k: Vec<usize>,
    pub psi: GradedIntegerMap,
    pub j_matrix: Option<IntegerMatrix>,
    pub hodge: Option<HodgeFile>,
}

pub fn parse_cohomology_job(text: &str, base_dir: Option<&Path>) -> Result<CohomologyJob, CohomologyError> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| input("file", e.message()))?;
    let name = doc.get("name").and_then(toml::Value::as_str).unwrap_or("cohomology").to_string();
    let betti_k = doc
        .get("betti_k")
        .and_then(toml::Value::as_array)
        .ok_or_else(|| input("betti_k", "missing or not an array"))?
        .iter()
        .enumerate()
        .map(|(i, v)| as_usize(v, &format!("betti_k[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let psi_list = doc
        .get("psi")
        .and_then(toml::Value::as_array)
        .ok_or_else(|| input("psi", "missing or not an array of matrices"))?;
    let maps = psi_list
        .iter()
        .enumerate()
        .map(|(r, m)| parse_int_matrix(m, &format!("psi[{r}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let psi = GradedIntegerMap::new(maps, Some(&betti_k))?;
    let j_matrix = doc.get("j_matrix").map(|v| parse_int_matrix(v, "j_matrix")).transpose()?;
    let hodge = match doc.get("hodge_file").and_then(toml::Value::as_str) {
        Some(rel) => {
            let path: PathBuf = base_dir.map_or_else(|| PathBuf::from(rel), |d| d.join(rel));
            let text = std::fs::read_to_string(&path).map_err(|e| input("hodge_file", format!("{}: {e}", path.display())))?;
            Some(parse_hodge_file(&text)?)
        }
        None => None,
    };
    Ok(CohomologyJob {
        name,
        betti_k,
        psi,
        j_matrix,
        hodge,
    })
}

pub fn load_cohomology_job(path: &Path) -> Result<CohomologyJob, CohomologyError> {
    let text = std::fs::read_to_string(path).map_err(|e| input(path.display().to_string(), e.to_string()))?;
    parse_cohomology_job(&text, path.parent())
}

pub fn load_hodge_file(path: &Path) -> Result<HodgeFile, CohomologyError> {
    let text = std::fs::read_to_string(path).map_err(|e| input(path.display().to_string(), e.to_string()))?;
    parse_hodge_file(&text)
}
