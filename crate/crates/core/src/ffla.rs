//! Exact linear algebra over prime fields `F_p` and over the rationals.
//!
//! Matrices are square and dense. `FpMatrix` uses machine words (the modulus
//! must be a prime below 2^61 so products fit in `u128`), `ExactMatrix` uses
//! arbitrary-precision rationals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hesscore::HessenbergVector;

const MAX_MODULUS: u64 = 1 << 61;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The primes in `[2, bound]`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&p| is_prime(p)).collect()
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo the prime `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

pub(crate) fn reduce_i64(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

/// `[k]_p = 1 + p + ... + p^(k-1)`, the number of lines in `F_p^k`.
pub fn q_integer_at(k: usize, p: u64) -> u64 {
    (0..k).map(|e| p.pow(e as u32)).sum()
}

/// Read access shared by the two matrix types.
pub trait SquareMatrix {
    fn dim(&self) -> usize;
    /// 0-based indices.
    fn is_zero_at(&self, row: usize, col: usize) -> bool;
    fn rank(&self) -> usize;
}

pub fn mat_rank<M: SquareMatrix>(m: &M) -> usize {
    m.rank()
}

/// True iff every entry strictly below the staircase of `m` vanishes, i.e.
/// `a[i][j] == 0` whenever `i > m(j)` (1-based).
pub fn in_hessenberg<M: SquareMatrix>(a: &M, m: &HessenbergVector) -> Result<bool> {
    if a.dim() != m.n() {
        return Err(Error::SizeMismatch {
            expected: m.n(),
            found: a.dim(),
        });
    }
    let n = a.dim();
    for col in 0..n {
        for row in m.bound(col) + 1..n {
            if !a.is_zero_at(row, col) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: u64,
    n: usize,
    entries: Vec<u64>,
}

impl FpMatrix {
    /// Builds a matrix from integer rows, reducing every entry modulo `p`.
    pub fn new(p: u64, rows: &[Vec<i64>]) -> Result<Self> {
        check_modulus(p)?;
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend(row.iter().map(|&v| reduce_i64(v, p)));
        }
        Ok(FpMatrix { p, n, entries })
    }

    pub fn from_fn(p: u64, n: usize, mut f: impl FnMut(usize, usize) -> u64) -> Result<Self> {
        check_modulus(p)?;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j) % p);
            }
        }
        Ok(FpMatrix { p, n, entries })
    }

    pub(crate) fn from_raw(p: u64, n: usize, entries: Vec<u64>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        FpMatrix { p, n, entries }
    }

    pub fn zero(p: u64, n: usize) -> Result<Self> {
        Self::from_fn(p, n, |_, _| 0)
    }

    pub fn identity(p: u64, n: usize) -> Result<Self> {
        Self::from_fn(p, n, |i, j| u64::from(i == j))
    }

    /// Permutation matrix sending `e_j` to `e_{w(j)}`; `word` is 1-based
    /// one-line notation.
    pub fn permutation(p: u64, word: &[usize]) -> Result<Self> {
        let n = word.len();
        Self::from_fn(p, n, |i, j| u64::from(word[j] == i + 1))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.n + j] = v % self.p;
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    fn check_same_shape(&self, other: &FpMatrix) -> Result<()> {
        if self.p != other.p {
            return Err(Error::invalid(format!(
                "moduli differ: {} vs {}",
                self.p, other.p
            )));
        }
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.check_same_shape(other)?;
        let (n, p) = (self.n, self.p);
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let idx = i * n + j;
                    out[idx] = add_mod(out[idx], mul_mod(a, other.get(k, j), p), p);
                }
            }
        }
        Ok(FpMatrix::from_raw(p, n, out))
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(0, |acc, k| {
                    add_mod(acc, mul_mod(self.get(i, k), v[k], self.p), self.p)
                })
            })
            .collect()
    }

    /// `self - lambda * I`.
    pub fn shift(&self, lambda: u64) -> FpMatrix {
        let mut out = self.clone();
        let l = lambda % self.p;
        for i in 0..self.n {
            let v = sub_mod(out.get(i, i), l, self.p);
            out.set(i, i, v);
        }
        out
    }

    /// Row-reduces a copy and returns `(rank, determinant)`.
    fn eliminate(&self) -> (usize, u64) {
        let (n, p) = (self.n, self.p);
        let mut a = self.entries.clone();
        let mut rank = 0;
        let mut det = 1u64;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| a[r * n + col] != 0) else {
                det = 0;
                continue;
            };
            if piv != rank {
                for j in 0..n {
                    a.swap(piv * n + j, rank * n + j);
                }
                det = sub_mod(0, det, p);
            }
            let pv = a[rank * n + col];
            det = mul_mod(det, pv, p);
            let inv = inv_mod(pv, p);
            for r in rank + 1..n {
                let f = mul_mod(a[r * n + col], inv, p);
                if f == 0 {
                    continue;
                }
                for j in col..n {
                    let s = mul_mod(f, a[rank * n + j], p);
                    a[r * n + j] = sub_mod(a[r * n + j], s, p);
                }
            }
            rank += 1;
        }
        if rank < n {
            det = 0;
        }
        (rank, det)
    }

    pub fn det(&self) -> u64 {
        self.eliminate().1
    }

    /// `dim ker(self - lambda I)`.
    pub fn kernel_dim(&self, lambda: u64) -> usize {
        self.n - self.shift(lambda).rank()
    }

    pub fn inverse(&self) -> Result<FpMatrix> {
        let (n, p) = (self.n, self.p);
        let mut a = self.entries.clone();
        let mut inv = FpMatrix::identity(p, n)?.entries;
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| a[r * n + col] != 0)
                .ok_or(Error::Singular)?;
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let pinv = inv_mod(a[col * n + col], p);
            for j in 0..n {
                a[col * n + j] = mul_mod(a[col * n + j], pinv, p);
                inv[col * n + j] = mul_mod(inv[col * n + j], pinv, p);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = sub_mod(a[r * n + j], mul_mod(f, a[col * n + j], p), p);
                    inv[r * n + j] = sub_mod(inv[r * n + j], mul_mod(f, inv[col * n + j], p), p);
                }
            }
        }
        Ok(FpMatrix::from_raw(p, n, inv))
    }

    /// Lifts residues to integers in `[0, p)`.
    pub fn to_exact(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.n, |i, j| {
            BigRational::from_integer(self.get(i, j).into())
        })
    }
}

impl SquareMatrix for FpMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn is_zero_at(&self, row: usize, col: usize) -> bool {
        self.get(row, col) == 0
    }

    fn rank(&self) -> usize {
        self.eliminate().0
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpMatrix(p={}, {:?})", self.p, self.rows())
    }
}

fn check_modulus(p: u64) -> Result<()> {
    if p >= MAX_MODULUS || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// `g^{-1} x g`.
pub fn conjugate(g: &FpMatrix, x: &FpMatrix) -> Result<FpMatrix> {
    g.inverse()?.mul(x)?.mul(g)
}

/// Number of `y`-invariant lines in `F_p^n`, via eigenspace dimensions:
/// the sum over `lambda` in `F_p` of `[dim ker(y - lambda)]_p`.
pub fn fixed_line_count(y: &FpMatrix) -> u64 {
    (0..y.p())
        .map(|lambda| q_integer_at(y.kernel_dim(lambda), y.p()))
        .sum()
}

/// All lines of `F_p^n`, each given by its representative whose first
/// nonzero coordinate is 1.
pub fn lines(p: u64, n: usize) -> impl Iterator<Item = Vec<u64>> {
    (0..n).flat_map(move |lead| {
        let free = n - lead - 1;
        let total = p.pow(free as u32);
        (0..total).map(move |mut code| {
            let mut v = vec![0u64; n];
            v[lead] = 1;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = code % p;
                code /= p;
            }
            v
        })
    })
}

/// Whether `y` maps the line spanned by `v` into itself.
pub fn fixes_line(y: &FpMatrix, v: &[u64]) -> bool {
    let p = y.p();
    let yv = y.mul_vec(v);
    let lead = v.iter().position(|&c| c != 0).expect("nonzero vector");
    let c = mul_mod(yv[lead], inv_mod(v[lead], p), p);
    yv.iter().zip(v).all(|(&a, &b)| a == mul_mod(c, b, p))
}

/// Exhaustive scan over all `[n]_p` lines.
pub fn fixed_line_count_by_scan(y: &FpMatrix) -> u64 {
    lines(y.p(), y.n()).filter(|v| fixes_line(y, v)).count() as u64
}

/// Square matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl ExactMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        ExactMatrix { n, entries }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::SizeMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(Self::from_fn(n, |i, j| int(rows[i][j])))
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(ExactMatrix { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        Self::from_fn(n, |_, _| BigRational::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| {
            if i == j {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
    }

    pub fn diagonal(values: &[i64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                int(values[i])
            } else {
                BigRational::zero()
            }
        })
    }

    /// Permutation matrix sending `e_j` to `e_{w(j)}` (1-based one-line word).
    pub fn permutation(word: &[usize]) -> Self {
        Self::from_fn(word.len(), |i, j| {
            if word[j] == i + 1 {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<BigRational>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<BigRational>]) -> Result<Self> {
        let n = cols.len();
        if let Some(bad) = cols.iter().find(|c| c.len() != n) {
            return Err(Error::SizeMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(Self::from_fn(n, |i, j| cols[j][i].clone()))
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let n = self.n;
        Ok(Self::from_fn(n, |i, j| {
            (0..n).fold(BigRational::zero(), |acc, k| {
                acc + self.get(i, k) * other.get(k, j)
            })
        }))
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.n)
            .map(|i| (0..self.n).fold(BigRational::zero(), |acc, k| acc + self.get(i, k) * &v[k]))
            .collect()
    }

    pub fn sub(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(Self::from_fn(self.n, |i, j| {
            self.get(i, j) - other.get(i, j)
        }))
    }

    fn eliminate(&self) -> (usize, BigRational) {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut rank = 0;
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| !a[r * n + col].is_zero()) else {
                continue;
            };
            if piv != rank {
                for j in 0..n {
                    a.swap(piv * n + j, rank * n + j);
                }
                det = -det;
            }
            let pv = a[rank * n + col].clone();
            det *= &pv;
            for r in rank + 1..n {
                if a[r * n + col].is_zero() {
                    continue;
                }
                let f = &a[r * n + col] / &pv;
                for j in col..n {
                    let s = &f * &a[rank * n + j];
                    a[r * n + j] -= s;
                }
            }
            rank += 1;
        }
        if rank < n {
            det = BigRational::zero();
        }
        (rank, det)
    }

    pub fn det(&self) -> BigRational {
        self.eliminate().1
    }

    pub fn inverse(&self) -> Result<ExactMatrix> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut inv = ExactMatrix::identity(n).entries;
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a[r * n + col].is_zero())
                .ok_or(Error::Singular)?;
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let pv = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] /= &pv;
                inv[col * n + j] /= &pv;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for j in 0..n {
                    let s = &f * &a[col * n + j];
                    a[r * n + j] -= s;
                    let t = &f * &inv[col * n + j];
                    inv[r * n + j] -= t;
                }
            }
        }
        Ok(ExactMatrix { n, entries: inv })
    }

    /// `g^{-1} self g`.
    pub fn conjugate_by(&self, g: &ExactMatrix) -> Result<ExactMatrix> {
        g.inverse()?.mul(self)?.mul(g)
    }

    /// Reduces modulo `p`. Fails if some denominator is divisible by `p`.
    pub fn to_fp(&self, p: u64) -> Result<FpMatrix> {
        check_modulus(p)?;
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            entries.push(rational_mod(e, p).ok_or_else(|| {
                Error::invalid(format!("entry {e} has a denominator divisible by {p}"))
            })?);
        }
        Ok(FpMatrix::from_raw(p, self.n, entries))
    }

    /// Integer entries as `i64`, if they all are.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.rows()
            .into_iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        if e.is_integer() {
                            e.to_integer().to_i64()
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

impl SquareMatrix for ExactMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn is_zero_at(&self, row: usize, col: usize) -> bool {
        self.get(row, col).is_zero()
    }

    fn rank(&self) -> usize {
        self.eliminate().0
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|e| e.to_string()).collect())
            .collect();
        write!(f, "ExactMatrix({rows:?})")
    }
}

pub(crate) fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Residue of a rational modulo `p`, or `None` when the denominator vanishes.
pub(crate) fn rational_mod(r: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let num = r.numer().mod_floor_big(&pb);
    let den = r.denom().mod_floor_big(&pb);
    if den == 0 {
        return None;
    }
    Some(mul_mod(num, inv_mod(den, p), p))
}

trait ModFloor {
    fn mod_floor_big(&self, m: &BigInt) -> u64;
}

impl ModFloor for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> u64 {
        let r = self % m;
        let r = if r.is_negative() { r + m } else { r };
        r.to_u64().expect("residue fits in u64")
    }
}

/// Serialized form: row-major integer rows, with the modulus carried beside
/// them (never inside the entries).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    pub rows: Vec<Vec<i64>>,
}
