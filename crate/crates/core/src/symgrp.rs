//! Symmetric-group combinatorics: inversions, Bruhat order through the
//! tableau criterion, Schubert-variety Poincaré polynomials and the
//! Lakshmibai–Sandhya description of Schubert singular loci.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qpoly::BettiPolynomial;

/// A permutation in one-line notation `[w_1, ..., w_n]` (values 1-based).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<usize>,
}

impl Permutation {
    pub fn new(word: Vec<usize>) -> Result<Self> {
        let n = word.len();
        let mut seen = vec![false; n];
        for &v in &word {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::invalid(format!(
                    "{word:?} is not a permutation of 1..{n}"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { word })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            word: (1..=n).collect(),
        }
    }

    /// The longest element `w_0 = [n, n-1, ..., 1]`.
    pub fn longest(n: usize) -> Self {
        Permutation {
            word: (1..=n).rev().collect(),
        }
    }

    /// The simple reflection `s_i = (i, i+1)`, `1 <= i < n`.
    pub fn simple(i: usize, n: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::invalid(format!("s_{i} does not exist in S_{n}")));
        }
        let mut word: Vec<usize> = (1..=n).collect();
        word.swap(i - 1, i);
        Ok(Permutation { word })
    }

    /// `s_i w_0`: the codimension-one Schubert index obtained by swapping the
    /// values `i` and `i+1` in `w_0`.
    pub fn codim_one(i: usize, n: usize) -> Result<Self> {
        Permutation::simple(i, n)?.compose(&Permutation::longest(n))
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    /// `w(i)` for 1-based `i`.
    pub fn value(&self, i: usize) -> usize {
        self.word[i - 1]
    }

    /// 0-based image of a 0-based position.
    #[inline]
    pub fn at(&self, i0: usize) -> usize {
        self.word[i0] - 1
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.word.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { word: inv }
    }

    /// `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(Permutation {
            word: other.word.iter().map(|&j| self.word[j - 1]).collect(),
        })
    }

    /// All pairs `(i, j)`, `i < j` (1-based), with `w_i > w_j`.
    pub fn inversions(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.word[i] > self.word[j] {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    pub fn length(&self) -> usize {
        let n = self.n();
        (0..n)
            .map(|i| (i + 1..n).filter(|&j| self.word[i] > self.word[j]).count())
            .sum()
    }

    /// `I_{p,q}(w)`: the `p`-th smallest of `{w_1, ..., w_q}`.
    pub fn tableau_entry(&self, p: usize, q: usize) -> Result<usize> {
        if p == 0 || p > q || q > self.n() {
            return Err(Error::invalid(format!(
                "tableau entry ({p},{q}) out of range for n = {}",
                self.n()
            )));
        }
        let mut prefix = self.word[..q].to_vec();
        prefix.sort_unstable();
        Ok(prefix[p - 1])
    }

    /// Replaces the values at the given 0-based positions.
    fn with_values(&self, positions: [usize; 4], values: [usize; 4]) -> Permutation {
        let mut word = self.word.clone();
        for (pos, val) in positions.into_iter().zip(values) {
            word[pos] = val;
        }
        Permutation { word }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.word.iter().join(","))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts one-line notation `5,2,1,4,3` (brackets optional), and the
    /// aliases `w0@n=5`, `id@n=5`, `s2@n=5`, `s2w0@n=5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((name, size)) = s.split_once('@') {
            let n: usize = size
                .trim()
                .trim_start_matches("n=")
                .parse()
                .map_err(|_| Error::invalid(format!("bad size in {s:?}")))?;
            let name = name.trim();
            return match name {
                "w0" => Ok(Permutation::longest(n)),
                "id" | "e" => Ok(Permutation::identity(n)),
                _ => {
                    let rest = name.strip_prefix('s').ok_or_else(|| {
                        Error::invalid(format!("unknown permutation alias {name:?}"))
                    })?;
                    let (idx, times_w0) = match rest.strip_suffix("w0") {
                        Some(idx) => (idx, true),
                        None => (rest, false),
                    };
                    let i: usize = idx
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad reflection index in {name:?}")))?;
                    if times_w0 {
                        Permutation::codim_one(i, n)
                    } else {
                        Permutation::simple(i, n)
                    }
                }
            };
        }
        let body = s.trim_start_matches('[').trim_end_matches(']');
        let word = body
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad permutation entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(word)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All of `S_n` in lexicographic order of one-line words.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    (1..=n)
        .permutations(n)
        .map(|word| Permutation { word })
        .collect()
}

pub fn inversions(w: &Permutation) -> Vec<(usize, usize)> {
    w.inversions()
}

pub fn length(w: &Permutation) -> usize {
    w.length()
}

pub fn tableau_entry(w: &Permutation, p: usize, q: usize) -> Result<usize> {
    w.tableau_entry(p, q)
}

/// Bruhat comparison `v <= w` by the tableau criterion. Each prefix is kept
/// sorted incrementally, so the sweep is quadratic.
pub fn bruhat_leq(v: &Permutation, w: &Permutation) -> Result<bool> {
    if v.n() != w.n() {
        return Err(Error::SizeMismatch {
            expected: v.n(),
            found: w.n(),
        });
    }
    Ok(bruhat_leq_unchecked(v.word(), w.word()))
}

pub(crate) fn bruhat_leq_unchecked(v: &[usize], w: &[usize]) -> bool {
    let n = v.len();
    let mut pv: Vec<usize> = Vec::with_capacity(n);
    let mut pw: Vec<usize> = Vec::with_capacity(n);
    for q in 0..n {
        let at = pv.partition_point(|&x| x < v[q]);
        pv.insert(at, v[q]);
        let at = pw.partition_point(|&x| x < w[q]);
        pw.insert(at, w[q]);
        if pv.iter().zip(&pw).any(|(a, b)| a > b) {
            return false;
        }
    }
    true
}

/// `sum_{u <= w} t^{l(u)}`, the Poincaré polynomial of `X_w` in `t = q^2`.
pub fn schubert_poincare(w: &Permutation) -> BettiPolynomial {
    let mut coeffs = vec![0i64; w.length() + 1];
    for u in all_permutations(w.n()) {
        if bruhat_leq_unchecked(u.word(), w.word()) {
            coeffs[u.length()] += 1;
        }
    }
    BettiPolynomial::from_coeffs(coeffs)
}

/// Euler characteristic of `X_w`: the number of `u <= w`.
pub fn schubert_euler(w: &Permutation) -> u64 {
    all_permutations(w.n())
        .iter()
        .filter(|u| bruhat_leq_unchecked(u.word(), w.word()))
        .count() as u64
}

fn quadruples(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..n).combinations(4).map(|c| [c[0], c[1], c[2], c[3]])
}

fn leq(a: &Permutation, b: &Permutation) -> bool {
    bruhat_leq_unchecked(a.word(), b.word())
}

/// Whether `v` lies in the Lakshmibai–Sandhya set `Z_w`: some pair of index
/// quadruples realizes one of the two 4-point patterns together with the
/// chain `v' <= v <= w' <= w`.
pub fn in_ls_set(w: &Permutation, v: &Permutation) -> bool {
    let n = w.n();
    let wv = w.word();
    let vv = v.word();
    for [i, j, k, l] in quadruples(n) {
        // Pattern (1): w_k < w_l < w_i < w_j.
        if wv[k] < wv[l] && wv[l] < wv[i] && wv[i] < wv[j] {
            for [i2, j2, k2, l2] in quadruples(n) {
                if vv[i2] == wv[k] && vv[j2] == wv[i] && vv[k2] == wv[l] && vv[l2] == wv[j] {
                    let v_low = w.with_values([i, j, k, l], [wv[k], wv[i], wv[l], wv[j]]);
                    let w_high = v.with_values([i2, j2, k2, l2], [vv[j2], vv[l2], vv[i2], vv[k2]]);
                    if leq(&v_low, v) && leq(v, &w_high) && leq(&w_high, w) {
                        return true;
                    }
                }
            }
        }
        // Pattern (2): w_l < w_j < w_k < w_i.
        if wv[l] < wv[j] && wv[j] < wv[k] && wv[k] < wv[i] {
            for [i2, j2, k2, l2] in quadruples(n) {
                if vv[i2] == wv[j] && vv[j2] == wv[l] && vv[k2] == wv[i] && vv[l2] == wv[k] {
                    let v_low = w.with_values([i, j, k, l], [wv[j], wv[l], wv[i], wv[k]]);
                    let w_high = v.with_values([i2, j2, k2, l2], [vv[k2], vv[i2], vv[l2], vv[j2]]);
                    if leq(&v_low, v) && leq(v, &w_high) && leq(&w_high, w) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// `Z_w` by brute force over all of `S_n`.
pub fn ls_set(w: &Permutation) -> BTreeSet<Permutation> {
    all_permutations(w.n())
        .into_par_iter()
        .filter(|v| in_ls_set(w, v))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Bruhat-maximal elements of `Z_w`; `X_w` is singular exactly along the
/// union of the `X_v` for these `v`.
pub fn ls_singular_maximal(w: &Permutation) -> BTreeSet<Permutation> {
    let z = ls_set(w);
    z.iter()
        .filter(|v| !z.iter().any(|u| u != *v && leq(v, u)))
        .cloned()
        .collect()
}

/// `[n, n-1, ..., 5, 2, 1, 4, 3]`.
pub fn v2(n: usize) -> Result<Permutation> {
    if n < 4 {
        return Err(Error::invalid(format!("v(2) needs n >= 4, got {n}")));
    }
    let mut word: Vec<usize> = (0..n - 4).map(|i| n - i).collect();
    word.extend([2, 1, 4, 3]);
    Permutation::new(word)
}

/// `[n-2, n-3, n, n-1, n-4, ..., 1]`.
pub fn vn2(n: usize) -> Result<Permutation> {
    if n < 4 {
        return Err(Error::invalid(format!("v(n-2) needs n >= 4, got {n}")));
    }
    let mut word = vec![n - 2, n - 3, n, n - 1];
    word.extend((1..=n - 4).rev());
    Permutation::new(word)
}
