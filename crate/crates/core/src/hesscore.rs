//! Hessenberg vectors, Jordan types, and the canonical representatives in
//! highest form and permuted Jordan form.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ffla::{int, ExactMatrix, FpMatrix};

/// A weakly increasing `m = (m(1), ..., m(n))` with `m(i) >= i` and
/// `m(n) = n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HessenbergVector {
    m: Vec<usize>,
}

impl HessenbergVector {
    pub fn new(m: Vec<usize>) -> Result<Self> {
        let n = m.len();
        if n == 0 {
            return Err(Error::invalid("Hessenberg vector must be nonempty"));
        }
        for (i, &v) in m.iter().enumerate() {
            if v < i + 1 || v > n {
                return Err(Error::invalid(format!(
                    "m({}) = {v} must lie in [{}, {n}]",
                    i + 1,
                    i + 1
                )));
            }
            if i > 0 && v < m[i - 1] {
                return Err(Error::invalid(format!("{m:?} is not weakly increasing")));
            }
        }
        Ok(HessenbergVector { m })
    }

    /// `(n, ..., n)`: the whole Lie algebra.
    pub fn full(n: usize) -> Self {
        HessenbergVector { m: vec![n; n] }
    }

    /// `(n-1, n, ..., n)`.
    pub fn m_max(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("m_max needs n >= 2, got {n}")));
        }
        let mut m = vec![n; n];
        m[0] = n - 1;
        Ok(HessenbergVector { m })
    }

    /// `(1, n-1, ..., n-1, n)`.
    pub fn m_sing(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid(format!("m_sing needs n >= 3, got {n}")));
        }
        let mut m = vec![n - 1; n];
        m[0] = 1;
        m[n - 1] = n;
        Ok(HessenbergVector { m })
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    /// `m(i)` for 1-based `i`.
    pub fn value(&self, i: usize) -> usize {
        self.m[i - 1]
    }

    /// Largest 0-based row allowed in 0-based column `col`.
    #[inline]
    pub fn bound(&self, col: usize) -> usize {
        self.m[col] - 1
    }

    pub fn values(&self) -> &[usize] {
        &self.m
    }

    /// `dim H(m) - dim b`: the number of admissible below-diagonal slots.
    pub fn excess(&self) -> usize {
        self.m.iter().enumerate().map(|(i, &v)| v - (i + 1)).sum()
    }
}

/// All Hessenberg vectors of size `n` (a Catalan number of them), in
/// lexicographic order.
pub fn all_hessenberg_vectors(n: usize) -> Vec<HessenbergVector> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<HessenbergVector>) {
        if i == n {
            out.push(HessenbergVector { m: cur.clone() });
            return;
        }
        let lo = cur.last().copied().unwrap_or(0).max(i + 1);
        let lo = if i + 1 == n { n } else { lo };
        for v in lo..=n {
            cur.push(v);
            go(i + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for HessenbergVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.m.iter().join(","))
    }
}

impl fmt::Debug for HessenbergVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for HessenbergVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .trim_start_matches(['(', '['])
            .trim_end_matches([')', ']']);
        let m = body
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad Hessenberg entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        HessenbergVector::new(m)
    }
}

impl Serialize for HessenbergVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HessenbergVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// A Hessenberg vector as given on the command line: explicit, or one of the
/// size-relative aliases `max`, `sing`, `full`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HessenbergSpec {
    Explicit(HessenbergVector),
    Max,
    Sing,
    Full,
}

impl HessenbergSpec {
    pub fn resolve(&self, n: usize) -> Result<HessenbergVector> {
        match self {
            HessenbergSpec::Explicit(m) if m.n() == n => Ok(m.clone()),
            HessenbergSpec::Explicit(m) => Err(Error::SizeMismatch {
                expected: n,
                found: m.n(),
            }),
            HessenbergSpec::Max => HessenbergVector::m_max(n),
            HessenbergSpec::Sing => HessenbergVector::m_sing(n),
            HessenbergSpec::Full => Ok(HessenbergVector::full(n)),
        }
    }
}

impl FromStr for HessenbergSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "max" | "m_max" => Ok(HessenbergSpec::Max),
            "sing" | "m_sing" => Ok(HessenbergSpec::Sing),
            "full" => Ok(HessenbergSpec::Full),
            other => other.parse().map(HessenbergSpec::Explicit),
        }
    }
}

/// Jordan type of `x`: one partition of Jordan block sizes per distinct
/// eigenvalue.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JordanType {
    partitions: Vec<Vec<usize>>,
    eigenvalues: Vec<i64>,
}

impl JordanType {
    /// Parts are sorted into descending order; eigenvalues default to `1..=r`.
    pub fn new(partitions: Vec<Vec<usize>>, eigenvalues: Option<Vec<i64>>) -> Result<Self> {
        if partitions.is_empty() {
            return Err(Error::invalid("Jordan type needs at least one partition"));
        }
        let mut parts = Vec::with_capacity(partitions.len());
        for mut lambda in partitions {
            if lambda.is_empty() || lambda.contains(&0) {
                return Err(Error::invalid(
                    "partitions must be nonempty with positive parts",
                ));
            }
            lambda.sort_unstable_by(|a, b| b.cmp(a));
            parts.push(lambda);
        }
        let r = parts.len();
        let eigenvalues = eigenvalues.unwrap_or_else(|| (1..=r as i64).collect());
        if eigenvalues.len() != r {
            return Err(Error::SizeMismatch {
                expected: r,
                found: eigenvalues.len(),
            });
        }
        if eigenvalues.iter().collect::<BTreeSet<_>>().len() != r {
            return Err(Error::invalid("eigenvalues must be pairwise distinct"));
        }
        Ok(JordanType {
            partitions: parts,
            eigenvalues,
        })
    }

    /// Nilpotent type of a single partition (eigenvalue 0).
    pub fn nilpotent(lambda: Vec<usize>) -> Result<Self> {
        JordanType::new(vec![lambda], Some(vec![0]))
    }

    pub fn with_eigenvalues(&self, eigenvalues: Vec<i64>) -> Result<Self> {
        JordanType::new(self.partitions.clone(), Some(eigenvalues))
    }

    pub fn partitions(&self) -> &[Vec<usize>] {
        &self.partitions
    }

    pub fn eigenvalues(&self) -> &[i64] {
        &self.eigenvalues
    }

    pub fn n(&self) -> usize {
        self.partitions
            .iter()
            .map(|l| l.iter().sum::<usize>())
            .sum()
    }

    /// Number of distinct eigenvalues.
    pub fn r(&self) -> usize {
        self.partitions.len()
    }

    /// Geometric multiplicities `dim ker(x - c_j I)`: the number of Jordan
    /// blocks for each eigenvalue.
    pub fn geometric_multiplicities(&self) -> Vec<usize> {
        self.partitions.iter().map(Vec::len).collect()
    }

    /// Algebraic multiplicities `|lambda^j|`.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.partitions.iter().map(|l| l.iter().sum()).collect()
    }

    pub fn is_scalar(&self) -> bool {
        self.r() == 1 && self.partitions[0].iter().all(|&k| k == 1)
    }

    pub fn is_semisimple(&self) -> bool {
        self.partitions.iter().flatten().all(|&k| k == 1)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.r() == 1 && self.eigenvalues[0] == 0
    }

    /// The same type with partitions in a canonical order, for deduplication.
    #[cfg(test)]
    fn canonical_key(&self) -> Vec<Vec<usize>> {
        let mut key = self.partitions.clone();
        key.sort();
        key
    }
}

/// All integer partitions of `n`, parts descending, in reverse lexicographic
/// order.
pub fn partitions_of(n: usize) -> Vec<Vec<usize>> {
    fn go(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=rem.min(max)).rev() {
            cur.push(k);
            go(rem - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Every Jordan type of size `n` up to reordering of the eigenvalue blocks,
/// with the default eigenvalues `1..=r`.
pub fn all_jordan_types(n: usize) -> Vec<JordanType> {
    fn go(rem: usize, min: &[usize], cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for size in 1..=rem {
            for lambda in partitions_of(size) {
                // Blocks are listed in nondecreasing (size, partition) order.
                let key = [vec![size], lambda.clone()].concat();
                if key.as_slice() < min {
                    continue;
                }
                cur.push(lambda);
                go(rem - size, &key, cur, out);
                cur.pop();
            }
        }
    }
    let mut raw = Vec::new();
    go(n, &[], &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|parts| JordanType::new(parts, None).expect("valid by construction"))
        .collect()
}

impl fmt::Display for JordanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self
            .partitions
            .iter()
            .map(|l| format!("[{}]", l.iter().join(",")))
            .join(",");
        write!(f, "[{parts}] @ [{}]", self.eigenvalues.iter().join(","))
    }
}

impl fmt::Debug for JordanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for JordanType {
    type Err = Error;

    /// `[[2,2],[2]] @ [1,-1]`; the eigenvalue list is optional.
    fn from_str(s: &str) -> Result<Self> {
        let (parts, eig) = match s.split_once('@') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s.trim(), None),
        };
        let partitions: Vec<Vec<usize>> = serde_json::from_str(parts)
            .map_err(|e| Error::invalid(format!("bad Jordan type {parts:?}: {e}")))?;
        let eigenvalues = eig
            .map(|e| {
                serde_json::from_str::<Vec<i64>>(e)
                    .map_err(|err| Error::invalid(format!("bad eigenvalue list {e:?}: {err}")))
            })
            .transpose()?;
        JordanType::new(partitions, eigenvalues)
    }
}

impl Serialize for JordanType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for JordanType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Positions `(i, j)` (0-based) of the ones in the highest form of the
/// nilpotent with Jordan blocks `lambda`, offset by `offset`.
fn highest_form_ones(lambda: &[usize], offset: usize) -> Vec<(usize, usize)> {
    let mut rows: Vec<usize> = lambda.to_vec();
    rows.sort_unstable_by(|a, b| b.cmp(a));
    let width = rows.first().copied().unwrap_or(0);
    // Label boxes column by column, each column from the bottom up.
    let mut label = vec![vec![0usize; width]; rows.len()];
    let mut next = 0;
    for c in 0..width {
        let height = rows.iter().filter(|&&len| len > c).count();
        for r in (0..height).rev() {
            label[r][c] = next;
            next += 1;
        }
    }
    let mut ones = Vec::new();
    for (r, &len) in rows.iter().enumerate() {
        for c in 0..len.saturating_sub(1) {
            ones.push((offset + label[r][c], offset + label[r][c + 1]));
        }
    }
    ones.sort_unstable();
    ones
}

/// The highest-form nilpotent of Jordan type `lambda`: `n_ij = 1` exactly when
/// box `i` sits immediately left of box `j` in the labeled Young diagram.
pub fn highest_form(lambda: &[usize]) -> ExactMatrix {
    let n = lambda.iter().sum();
    let mut out = ExactMatrix::zero(n);
    for (i, j) in highest_form_ones(lambda, 0) {
        out.set(i, j, int(1));
    }
    out
}

/// `x = s + nil` in highest form and permuted Jordan form.
#[derive(Clone, PartialEq, Eq)]
pub struct CanonicalMatrix {
    diag: Vec<i64>,
    ones: Vec<(usize, usize)>,
    jordan_type: JordanType,
    pivot_in_row: Vec<Option<usize>>,
}

pub fn hfpjf(jordan_type: &JordanType) -> CanonicalMatrix {
    let n = jordan_type.n();
    let mut diag = Vec::with_capacity(n);
    let mut ones = Vec::new();
    for (lambda, &c) in jordan_type
        .partitions()
        .iter()
        .zip(jordan_type.eigenvalues())
    {
        let offset = diag.len();
        ones.extend(highest_form_ones(lambda, offset));
        diag.extend(std::iter::repeat_n(c, lambda.iter().sum()));
    }
    let mut pivot_in_row = vec![None; n];
    // Every one of a highest form is a pivot, and they sit in distinct rows.
    for &(i, j) in &ones {
        pivot_in_row[i] = Some(j);
    }
    CanonicalMatrix {
        diag,
        ones,
        jordan_type: jordan_type.clone(),
        pivot_in_row,
    }
}

impl CanonicalMatrix {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn jordan_type(&self) -> &JordanType {
        &self.jordan_type
    }

    /// `s_ii` for 0-based `i`.
    pub fn diag(&self, i: usize) -> i64 {
        self.diag[i]
    }

    pub fn diagonal(&self) -> &[i64] {
        &self.diag
    }

    /// 0-based positions of the nonzero entries of `nil`.
    pub fn nil_ones(&self) -> &[(usize, usize)] {
        &self.ones
    }

    /// Column of the pivot of `nil` in 0-based row `k`, if any.
    pub fn pivot_col_of_row(&self, k: usize) -> Option<usize> {
        self.pivot_in_row[k]
    }

    /// `m_s = max |s_ii|`.
    pub fn m_s(&self) -> u64 {
        self.diag
            .iter()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn s(&self) -> ExactMatrix {
        ExactMatrix::diagonal(&self.diag)
    }

    pub fn nil(&self) -> ExactMatrix {
        let mut out = ExactMatrix::zero(self.n());
        for &(i, j) in &self.ones {
            out.set(i, j, int(1));
        }
        out
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        let n = self.n();
        let mut rows = vec![vec![0i64; n]; n];
        for (i, &c) in self.diag.iter().enumerate() {
            rows[i][i] = c;
        }
        for &(i, j) in &self.ones {
            rows[i][j] = 1;
        }
        rows
    }

    /// `x = s + nil`.
    pub fn matrix(&self) -> ExactMatrix {
        ExactMatrix::from_i64_rows(&self.to_i64_rows()).expect("square by construction")
    }

    pub fn to_fp(&self, p: u64) -> Result<FpMatrix> {
        FpMatrix::new(p, &self.to_i64_rows())
    }
}

impl fmt::Debug for CanonicalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CanonicalMatrix({}, {:?})",
            self.jordan_type,
            self.to_i64_rows()
        )
    }
}

/// Pivots of `x` (1-based): nonzero entries with only zeros below them in
/// their column and to their left in their row.
pub fn pivots(x: &ExactMatrix) -> BTreeSet<(usize, usize)> {
    let n = x.n();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if x.get(i, j).is_zero() {
                continue;
            }
            let below = (i + 1..n).all(|k| x.get(k, j).is_zero());
            let left = (0..j).all(|k| x.get(i, k).is_zero());
            if below && left {
                out.insert((i + 1, j + 1));
            }
        }
    }
    out
}

#[cfg(test)]
fn same_type_up_to_order(a: &JordanType, b: &JordanType) -> bool {
    a.canonical_key() == b.canonical_key()
}
