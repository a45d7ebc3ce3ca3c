//! Strictly increasing index tuples and permutation signs.

use std::sync::OnceLock;

use crate::jet::MAX_DIM;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

type TupleTable = Vec<Vec<Vec<Vec<usize>>>>;

static TUPLES: OnceLock<TupleTable> = OnceLock::new();

fn build_tuples() -> TupleTable {
    (0..=MAX_DIM)
        .map(|n| {
            (0..=n)
                .map(|k| {
                    let mut out = Vec::with_capacity(binomial(n, k));
                    let mut cur = Vec::with_capacity(k);
                    push_tuples(n, k, 0, &mut cur, &mut out);
                    out
                })
                .collect()
        })
        .collect()
}

fn push_tuples(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for v in start..n {
        cur.push(v);
        push_tuples(n, k, v + 1, cur, out);
        cur.pop();
    }
}

/// All strictly increasing `k`-tuples in `0..n`, lexicographically ordered.
pub fn increasing(n: usize, k: usize) -> &'static [Vec<usize>] {
    assert!(n <= MAX_DIM && k <= n, "no {k}-tuples in dimension {n}");
    &TUPLES.get_or_init(build_tuples)[n][k]
}

/// Lexicographic position of a strictly increasing tuple.
pub fn rank(n: usize, tuple: &[usize]) -> usize {
    let k = tuple.len();
    let mut r = 0;
    let mut start = 0;
    for (j, &i) in tuple.iter().enumerate() {
        for v in start..i {
            r += binomial(n - 1 - v, k - 1 - j);
        }
        start = i + 1;
    }
    r
}

/// Sort an index tuple, returning the permutation sign, or `None` on a repeat.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    // insertion sort counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Merge two increasing tuples into one, with the sign of the shuffle.
pub fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut joined = Vec::with_capacity(a.len() + b.len());
    joined.extend_from_slice(a);
    joined.extend_from_slice(b);
    sort_with_sign(&joined)
}
