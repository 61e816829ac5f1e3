//! Brute-force point counts of Hessenberg varieties over `F_p`, by walking
//! every Schubert cell representative `u w` and testing `(uw)^{-1} x (uw)`
//! against the Hessenberg space.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ffla::{is_prime, FpMatrix};
use crate::hesscore::{hfpjf, CanonicalMatrix, HessenbergVector, JordanType};
use crate::paving::cell_dimension;
use crate::qpoly::{q_factorial_at, BettiPolynomial};
use crate::symgrp::{all_permutations, Permutation};

/// Largest size the census kernel handles (stack-allocated scratch).
pub const MAX_CENSUS_N: usize = 6;
const CHUNK: u64 = 1 << 12;

/// An exact count that serializes as a JSON number when it fits in `u64`
/// and as a decimal string otherwise.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Count(pub BigUint);

impl Count {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl From<u64> for Count {
    fn from(v: u64) -> Self {
        Count(BigUint::from(v))
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.collect_str(&self.0),
        }
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Count::from(v)),
            Raw::Str(s) => s
                .parse::<BigUint>()
                .map(Count)
                .map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub p: u64,
    pub total: Count,
    /// Points per Schubert cell, keyed by `w` in one-line notation; empty
    /// cells are omitted.
    pub per_cell: BTreeMap<String, Count>,
    pub admissible: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub p: u64,
    /// No two distinct entries of `x` are congruent mod `p`.
    pub admissible: bool,
    /// The cruder sufficient condition `p > 2 m_s`.
    pub exceeds_bound: bool,
}

fn check_census_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p >= 1 << 32 {
        return Err(Error::invalid(format!("census modulus {p} too large")));
    }
    Ok(())
}

/// Admissibility of `p` for the integer matrix with the given entries.
pub fn entries_admissible(rows: &[Vec<i64>], p: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut distinct: Vec<i64> = rows.iter().flatten().copied().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let mut residues: Vec<u64> = distinct
        .iter()
        .map(|&v| v.rem_euclid(p as i64) as u64)
        .collect();
    residues.sort_unstable();
    let before = residues.len();
    residues.dedup();
    Ok(residues.len() == before)
}

pub fn admissible_prime(x: &CanonicalMatrix, p: u64) -> Result<Admissibility> {
    Ok(Admissibility {
        p,
        admissible: entries_admissible(&x.to_i64_rows(), p)?,
        exceeds_bound: p > 2 * x.m_s(),
    })
}

/// The free positions `(i, k)` (0-based, `i < k`) of `U_w`: those with
/// `w^{-1}(i) > w^{-1}(k)`, in lexicographic order.
pub fn free_positions(w: &Permutation) -> Vec<(usize, usize)> {
    let winv = w.inverse();
    let n = w.n();
    let mut out = Vec::new();
    for i in 0..n {
        for k in i + 1..n {
            if winv.at(i) > winv.at(k) {
                out.push((i, k));
            }
        }
    }
    out
}

/// A flag `u w B` given by its cell and the values of `u` on the free
/// positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlagRep {
    pub w: Permutation,
    /// `((i, k), value)` with 0-based positions.
    pub free_values: Vec<((usize, usize), u64)>,
}

impl FlagRep {
    pub fn unipotent(&self, p: u64) -> Result<FpMatrix> {
        let mut u = FpMatrix::identity(p, self.w.n())?;
        for &((i, k), v) in &self.free_values {
            u.set(i, k, v % p);
        }
        Ok(u)
    }

    /// `g = u w`, whose `j`-th column is `u e_{w(j)}`.
    pub fn matrix(&self, p: u64) -> Result<FpMatrix> {
        let u = self.unipotent(p)?;
        u.mul(&FpMatrix::permutation(p, self.w.word())?)
    }
}

fn digits(mut index: u64, p: u64, len: usize, out: &mut [u64]) {
    for slot in out[..len].iter_mut().rev() {
        *slot = index % p;
        index /= p;
    }
}

fn cell_size(p: u64, len: usize) -> Result<u64> {
    p.checked_pow(len as u32)
        .ok_or_else(|| Error::invalid("cell too large to enumerate"))
}

/// The `p^{l(w)}` representatives of `C_w`, free values in odometer order
/// (last position fastest).
pub fn enumerate_cell(w: &Permutation, p: u64) -> Result<impl Iterator<Item = FlagRep> + '_> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let positions = free_positions(w);
    let size = cell_size(p, positions.len())?;
    Ok((0..size).map(move |index| {
        let mut vals = vec![0u64; positions.len()];
        digits(index, p, positions.len(), &mut vals);
        FlagRep {
            w: w.clone(),
            free_values: positions.iter().copied().zip(vals).collect(),
        }
    }))
}

type Scratch = [[u64; MAX_CENSUS_N]; MAX_CENSUS_N];

/// Conjugation kernel for one cell: computes `z = u^{-1} x u` for each `u`
/// in `U_w` without forming `u^{-1}`, by back substitution in `u z = x u`.
struct CellKernel<'a> {
    n: usize,
    p: u64,
    x: &'a Scratch,
    positions: Vec<(usize, usize)>,
    /// Free positions grouped by row: `(column, index into positions)`.
    by_row: Vec<Vec<(usize, usize)>>,
}

impl<'a> CellKernel<'a> {
    fn new(n: usize, p: u64, x: &'a Scratch, positions: Vec<(usize, usize)>) -> Self {
        let mut by_row = vec![Vec::new(); n];
        for (idx, &(i, k)) in positions.iter().enumerate() {
            by_row[i].push((k, idx));
        }
        CellKernel {
            n,
            p,
            x,
            positions,
            by_row,
        }
    }

    fn conjugate(&self, vals: &[u64], z: &mut Scratch) {
        let (n, p) = (self.n, self.p);
        let mut xu = *self.x;
        for (&(k, c), &v) in self.positions.iter().zip(vals) {
            if v == 0 {
                continue;
            }
            for r in 0..n {
                xu[r][c] = (xu[r][c] + self.x[r][k] * v) % p;
            }
        }
        for i in (0..n).rev() {
            let mut row = xu[i];
            for &(k, idx) in &self.by_row[i] {
                let v = vals[idx];
                if v == 0 {
                    continue;
                }
                let neg = p - v;
                for c in 0..n {
                    row[c] = (row[c] + neg * z[k][c]) % p;
                }
            }
            z[i] = row;
        }
    }
}

fn to_scratch(x: &FpMatrix) -> Result<Scratch> {
    if x.n() > MAX_CENSUS_N {
        return Err(Error::invalid(format!(
            "census supports n <= {MAX_CENSUS_N}, got {}",
            x.n()
        )));
    }
    let mut s = [[0u64; MAX_CENSUS_N]; MAX_CENSUS_N];
    for (i, row) in s.iter_mut().enumerate().take(x.n()) {
        for (j, slot) in row.iter_mut().enumerate().take(x.n()) {
            *slot = x.get(i, j);
        }
    }
    Ok(s)
}
/// Per-flag summary: for each column `j` of `z = u^{-1} x u`, the largest
/// `w^{-1}(i)` over nonzero `z_ij` (or -1). The flag lies in `B(x, H(m))`
/// iff every entry is at most `m(w^{-1}(j)) - 1` (0-based).
#[inline]
fn profile(z: &Scratch, n: usize, winv: &[usize]) -> [i8; MAX_CENSUS_N] {
    let mut out = [-1i8; MAX_CENSUS_N];
    for (i, row) in z.iter().enumerate().take(n) {
        let wi = winv[i] as i8;
        for j in 0..n {
            if row[j] != 0 && out[j] < wi {
                out[j] = wi;
            }
        }
    }
    out
}

struct CellTask {
    cell: usize,
    start: u64,
    end: u64,
}

/// Counts, for every `m` in `ms` and every cell (permutations in
/// lexicographic order), the flags `g` in the cell with `g^{-1} x g` in
/// `H(m)`.
fn census_table(x: &FpMatrix, ms: &[HessenbergVector]) -> Result<Vec<Vec<u64>>> {
    let p = x.p();
    check_census_prime(p)?;
    let n = x.n();
    for m in ms {
        if m.n() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: m.n(),
            });
        }
    }
    let xs = to_scratch(x)?;
    let perms = all_permutations(n);
    let winvs: Vec<Vec<usize>> = perms
        .iter()
        .map(|w| (0..n).map(|i| w.inverse().at(i)).collect())
        .collect();
    let positions: Vec<Vec<(usize, usize)>> = perms.iter().map(free_positions).collect();
    let mut tasks = Vec::new();
    for (cell, pos) in positions.iter().enumerate() {
        let size = cell_size(p, pos.len())?;
        let mut start = 0;
        while start < size {
            let end = (start + CHUNK).min(size);
            tasks.push(CellTask { cell, start, end });
            start = end;
        }
    }
    let partials: Vec<(usize, Vec<u64>)> = tasks
        .par_iter()
        .map(|task| {
            let winv = &winvs[task.cell];
            let kernel = CellKernel::new(n, p, &xs, positions[task.cell].clone());
            let thresholds: Vec<[i8; MAX_CENSUS_N]> = ms
                .iter()
                .map(|m| {
                    let mut t = [0i8; MAX_CENSUS_N];
                    for j in 0..n {
                        t[j] = m.bound(winv[j]) as i8;
                    }
                    t
                })
                .collect();
            let len = kernel.positions.len();
            let mut vals = vec![0u64; len];
            digits(task.start, p, len, &mut vals);
            let mut z = [[0u64; MAX_CENSUS_N]; MAX_CENSUS_N];
            let mut counts = vec![0u64; ms.len()];
            for _ in task.start..task.end {
                kernel.conjugate(&vals, &mut z);
                let prof = profile(&z, n, winv);
                for (count, t) in counts.iter_mut().zip(&thresholds) {
                    if (0..n).all(|j| prof[j] <= t[j]) {
                        *count += 1;
                    }
                }
                // Odometer step, last position fastest.
                for slot in vals.iter_mut().rev() {
                    *slot += 1;
                    if *slot < p {
                        break;
                    }
                    *slot = 0;
                }
            }
            (task.cell, counts)
        })
        .collect();
    let mut table = vec![vec![0u64; perms.len()]; ms.len()];
    for (cell, counts) in partials {
        for (mi, c) in counts.into_iter().enumerate() {
            table[mi][cell] += c;
        }
    }
    Ok(table)
}

fn report_from_cells(p: u64, n: usize, cells: &[u64], admissible: bool) -> CountReport {
    let perms = all_permutations(n);
    let mut per_cell = BTreeMap::new();
    let mut total = BigUint::zero();
    for (w, &c) in perms.iter().zip(cells) {
        if c > 0 {
            per_cell.insert(w.to_string(), Count::from(c));
            total += c;
        }
    }
    CountReport {
        p,
        total: Count(total),
        per_cell,
        admissible,
    }
}

/// Exhaustive count of `B_p(x, H(m))` for a matrix given over `F_p`.
/// Such a matrix carries no integer lift, so `admissible` is reported true.
pub fn count_points(x: &FpMatrix, m: &HessenbergVector) -> Result<CountReport> {
    let table = census_table(x, std::slice::from_ref(m))?;
    Ok(report_from_cells(x.p(), x.n(), &table[0], true))
}

/// One census pass shared by several Hessenberg vectors.
pub fn count_points_multi(x: &FpMatrix, ms: &[HessenbergVector]) -> Result<Vec<CountReport>> {
    let table = census_table(x, ms)?;
    Ok(table
        .iter()
        .map(|cells| report_from_cells(x.p(), x.n(), cells, true))
        .collect())
}

/// Census of the canonical representative of `jordan_type` reduced mod `p`.
/// Runs whether or not `p` is admissible; the report records which.
pub fn count_type(jordan_type: &JordanType, m: &HessenbergVector, p: u64) -> Result<CountReport> {
    Ok(count_type_multi(jordan_type, std::slice::from_ref(m), p)?.remove(0))
}

pub fn count_type_multi(
    jordan_type: &JordanType,
    ms: &[HessenbergVector],
    p: u64,
) -> Result<Vec<CountReport>> {
    let x = hfpjf(jordan_type);
    let adm = admissible_prime(&x, p)?;
    let mut reports = count_points_multi(&x.to_fp(p)?, ms)?;
    for r in &mut reports {
        r.admissible = adm.admissible;
    }
    Ok(reports)
}

/// `|Z_i|`: unipotents of `U_w` supported on rows `>= i` (1-based) whose
/// conjugate `u^{-1} x u` vanishes at every `(j, k)` with `k > j >= i` and
/// `m(w^{-1}(k)) < w^{-1}(j)`.
pub fn count_partial_solutions(
    w: &Permutation,
    x: &FpMatrix,
    m: &HessenbergVector,
    i: usize,
) -> Result<u64> {
    let n = x.n();
    let p = x.p();
    check_census_prime(p)?;
    if w.n() != n || m.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: if w.n() != n { w.n() } else { m.n() },
        });
    }
    if i == 0 || i > n {
        return Err(Error::invalid(format!(
            "row index {i} out of range 1..={n}"
        )));
    }
    let xs = to_scratch(x)?;
    let winv: Vec<usize> = (0..n).map(|a| w.inverse().at(a)).collect();
    let positions: Vec<(usize, usize)> = free_positions(w)
        .into_iter()
        .filter(|&(r, _)| r + 1 >= i)
        .collect();
    let len = positions.len();
    let kernel = CellKernel::new(n, p, &xs, positions);
    let mut vals = vec![0u64; len];
    let mut z = [[0u64; MAX_CENSUS_N]; MAX_CENSUS_N];
    let mut count = 0;
    for index in 0..cell_size(p, len)? {
        digits(index, p, len, &mut vals);
        kernel.conjugate(&vals, &mut z);
        let ok =
            (i - 1..n).all(|j| (j + 1..n).all(|k| m.bound(winv[k]) >= winv[j] || z[j][k] == 0));
        if ok {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellMismatch {
    pub w: Permutation,
    pub counted: u64,
    /// `p^d` for a nonempty cell, 0 otherwise.
    pub predicted: Count,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicReport {
    pub jordan_type: JordanType,
    pub m: HessenbergVector,
    pub p: u64,
    pub census_total: Count,
    pub poincare: BettiPolynomial,
    pub poincare_at_p: Count,
    pub cell_mismatches: Vec<CellMismatch>,
    pub pass: bool,
}

/// Compares the census over `F_p` with the paving: the total against the
/// Poincaré polynomial at `t = p`, and each cell against `p^{d_w}`.
pub fn verify_heuristic(
    jordan_type: &JordanType,
    m: &HessenbergVector,
    p: u64,
) -> Result<HeuristicReport> {
    let x = hfpjf(jordan_type);
    let adm = admissible_prime(&x, p)?;
    if !adm.admissible {
        return Err(Error::InadmissiblePrime {
            p,
            reason: "two distinct entries of x are congruent mod p".into(),
        });
    }
    let report = count_type(jordan_type, m, p)?;
    Ok(compare_with_paving(&x, m, &report))
}

pub(crate) fn compare_with_paving(
    x: &CanonicalMatrix,
    m: &HessenbergVector,
    report: &CountReport,
) -> HeuristicReport {
    let p = report.p;
    let mut coeffs = vec![0i64; x.n() * x.n()];
    let mut cell_mismatches = Vec::new();
    for w in all_permutations(x.n()) {
        let cell = cell_dimension(&w, x, m);
        let predicted = if cell.nonempty {
            coeffs[cell.dim] += 1;
            BigUint::from(p).pow(cell.dim as u32)
        } else {
            BigUint::zero()
        };
        let counted = report
            .per_cell
            .get(&w.to_string())
            .map(|c| c.0.clone())
            .unwrap_or_default();
        if counted != predicted {
            cell_mismatches.push(CellMismatch {
                w,
                counted: counted.to_u64().unwrap_or(u64::MAX),
                predicted: Count(predicted),
            });
        }
    }
    let poincare = BettiPolynomial::from_coeffs(coeffs);
    let at_p = poincare
        .eval_u64(p)
        .to_biguint()
        .expect("nonnegative coefficients");
    let pass = cell_mismatches.is_empty() && at_p == report.total.0;
    HeuristicReport {
        jordan_type: x.jordan_type().clone(),
        m: m.clone(),
        p,
        census_total: report.total.clone(),
        poincare,
        poincare_at_p: Count(at_p),
        cell_mismatches,
        pass,
    }
}

/// `[n]_p!`, the number of `F_p`-points of the flag variety.
pub fn flag_count(n: usize, p: u64) -> BigUint {
    q_factorial_at(n, p)
        .to_biguint()
        .expect("q-factorials are positive")
}

/// Exact Lagrange interpolation: the coefficients of the unique polynomial
/// of degree `< points.len()` through the given points.
pub fn interpolate(points: &[(BigInt, BigInt)]) -> Vec<BigRational> {
    let k = points.len();
    let mut out = vec![BigRational::zero(); k];
    for (a, (xa, ya)) in points.iter().enumerate() {
        // basis = prod_{b != a} (t - x_b) / (x_a - x_b)
        let mut basis = vec![BigRational::one()];
        let mut denom = BigInt::one();
        for (b, (xb, _)) in points.iter().enumerate() {
            if a == b {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (e, c) in basis.iter().enumerate() {
                next[e + 1] += c;
                next[e] -= c * BigRational::from_integer(xb.clone());
            }
            basis = next;
            denom *= xa - xb;
        }
        let scale = BigRational::new(ya.clone(), denom);
        for (e, c) in basis.iter().enumerate() {
            out[e] += c * &scale;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusMode {
    /// Interpolate totals at `n(n-1)/2 + 1` admissible primes.
    Interpolation,
    /// Read each cell's dimension off its counts at two admissible primes.
    Cellwise,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusPoincare {
    pub polynomial: BettiPolynomial,
    pub mode: CensusMode,
    pub primes: Vec<u64>,
    pub totals: Vec<Count>,
}

/// Default number of flags an automatic census may visit before falling
/// back from interpolation to the cellwise mode.
pub const DEFAULT_FLAG_BUDGET: u64 = 100_000_000;

/// The first `count` primes admissible for `x`.
pub fn admissible_primes(x: &CanonicalMatrix, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut p = 2;
    while out.len() < count {
        if is_prime(p)
            && admissible_prime(x, p)
                .map(|a| a.admissible)
                .unwrap_or(false)
        {
            out.push(p);
        }
        p += 1;
    }
    out
}

pub fn interpolation_primes(x: &CanonicalMatrix) -> Vec<u64> {
    let n = x.n();
    admissible_primes(x, n * (n - 1) / 2 + 1)
}

/// Number of flags an interpolation census of `x` would visit.
pub fn interpolation_cost(x: &CanonicalMatrix) -> BigUint {
    interpolation_primes(x)
        .into_iter()
        .map(|p| flag_count(x.n(), p))
        .sum()
}

/// Picks interpolation when it fits in `budget` flags, else cellwise.
pub fn auto_mode(x: &CanonicalMatrix, budget: u64) -> CensusMode {
    if interpolation_cost(x) <= BigUint::from(budget) {
        CensusMode::Interpolation
    } else {
        CensusMode::Cellwise
    }
}

/// The Poincaré polynomial recovered from point counts alone, without the
/// paving dimension formula.
pub fn census_poincare(
    jordan_type: &JordanType,
    m: &HessenbergVector,
    mode: CensusMode,
) -> Result<CensusPoincare> {
    let x = hfpjf(jordan_type);
    let n = x.n();
    match mode {
        CensusMode::Interpolation => {
            let primes = interpolation_primes(&x);
            let mut totals = Vec::new();
            let mut points = Vec::new();
            for &p in &primes {
                let r = count_points(&x.to_fp(p)?, m)?;
                points.push((BigInt::from(p), BigInt::from(r.total.0.clone())));
                totals.push(r.total);
            }
            let coeffs = interpolate(&points)
                .into_iter()
                .map(|c| {
                    if c.is_integer() {
                        c.to_integer().to_i64().ok_or_else(|| {
                            Error::Inconsistent("interpolated coefficient overflow".into())
                        })
                    } else {
                        Err(Error::Inconsistent(format!(
                            "census counts interpolate to a non-integral coefficient {c}"
                        )))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CensusPoincare {
                polynomial: BettiPolynomial::from_coeffs(coeffs),
                mode,
                primes,
                totals,
            })
        }
        CensusMode::Cellwise => {
            let primes = admissible_primes(&x, 2);
            let tables = primes
                .iter()
                .map(|&p| census_table(&x.to_fp(p)?, std::slice::from_ref(m)))
                .collect::<Result<Vec<_>>>()?;
            let (a, b) = (&tables[0][0], &tables[1][0]);
            let mut coeffs = vec![0i64; n * n];
            for (cell, (&ca, &cb)) in a.iter().zip(b).enumerate() {
                if ca == 0 && cb == 0 {
                    continue;
                }
                let d = exact_log(ca, primes[0])
                    .filter(|&d| BigUint::from(primes[1]).pow(d as u32) == BigUint::from(cb));
                match d {
                    Some(d) => coeffs[d] += 1,
                    None => {
                        return Err(Error::Inconsistent(format!(
                            "cell {} has counts {ca} at p={} and {cb} at p={}, not p^d for one d",
                            all_permutations(n)[cell],
                            primes[0],
                            primes[1]
                        )))
                    }
                }
            }
            let totals = vec![
                Count::from(a.iter().sum::<u64>()),
                Count::from(b.iter().sum::<u64>()),
            ];
            Ok(CensusPoincare {
                polynomial: BettiPolynomial::from_coeffs(coeffs),
                mode,
                primes,
                totals,
            })
        }
    }
}

/// `d` with `p^d = c`, if any.
fn exact_log(mut c: u64, p: u64) -> Option<usize> {
    if c == 0 {
        return None;
    }
    let mut d = 0;
    while c.is_multiple_of(p) {
        c /= p;
        d += 1;
    }
    (c == 1).then_some(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffla::{conjugate, fixed_line_count};
    use crate::hesscore::{all_hessenberg_vectors, all_jordan_types};
    use crate::paving::poincare_tymoczko;
    use crate::qpoly::q_int;
    use std::collections::HashSet;

    fn ty(s: &str) -> JordanType {
        s.parse().unwrap()
    }

    /// Membership by the definition: form `g`, invert it, conjugate.
    fn slow_count(x: &FpMatrix, m: &HessenbergVector) -> u64 {
        let mut count = 0;
        for w in all_permutations(x.n()) {
            for rep in enumerate_cell(&w, x.p()).unwrap() {
                let g = rep.matrix(x.p()).unwrap();
                if crate::ffla::in_hessenberg(&conjugate(&g, x).unwrap(), m).unwrap() {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn admissibility_examples() {
        let nil = hfpjf(&JordanType::nilpotent(vec![3, 1]).unwrap());
        for p in [2, 3, 5, 7] {
            assert!(admissible_prime(&nil, p).unwrap().admissible);
        }
        let s = [vec![0, 0], vec![0, 3]];
        assert!(!entries_admissible(&s, 3).unwrap());
        assert!(entries_admissible(&s, 5).unwrap());
        let t = ty("[[2,2],[2]] @ [1,-1]");
        let a = admissible_prime(&hfpjf(&t), 2).unwrap();
        assert!(!a.admissible);
        assert!(!a.exceeds_bound);
        assert!(matches!(
            verify_heuristic(&t, &HessenbergVector::m_max(6).unwrap(), 2),
            Err(Error::InadmissiblePrime { p: 2, .. })
        ));
        assert!(admissible_prime(&nil, 4).is_err());
    }

    #[test]
    fn cell_enumeration() {
        assert_eq!(
            enumerate_cell(&Permutation::identity(3), 5)
                .unwrap()
                .count(),
            1
        );
        assert_eq!(
            enumerate_cell(&"2,1".parse().unwrap(), 3).unwrap().count(),
            3
        );
        let total: usize = all_permutations(3)
            .iter()
            .map(|w| enumerate_cell(w, 2).unwrap().count())
            .sum();
        assert_eq!(total, 21);
    }

    /// Canonical form of the flag `gB`: column-reduce `g` so that each
    /// column has a pivot row whose other entries to the right are cleared.
    fn flag_key(g: &FpMatrix) -> Vec<Vec<u64>> {
        let p = g.p();
        let n = g.n();
        let mut cols: Vec<Vec<u64>> = (0..n).map(|j| g.column(j)).collect();
        let mut used = vec![false; n];
        for j in 0..n {
            // Reduce column j by earlier columns (allowed: V_j fixed mod V_{j-1}).
            let pivot = (0..n).rev().find(|&r| cols[j][r] != 0 && !used[r]).unwrap();
            used[pivot] = true;
            let inv = crate::ffla::inv_mod(cols[j][pivot], p);
            for v in cols[j].iter_mut() {
                *v = crate::ffla::mul_mod(*v, inv, p);
            }
            for later in j + 1..n {
                let c = cols[later][pivot];
                if c != 0 {
                    for r in 0..n {
                        let sub = crate::ffla::mul_mod(c, cols[j][r], p);
                        cols[later][r] = crate::ffla::sub_mod(cols[later][r], sub, p);
                    }
                }
            }
        }
        cols
    }

    #[test]
    fn every_flag_exactly_once() {
        for n in 1..=4 {
            for p in [2, 3, 5] {
                let total: u64 = all_permutations(n)
                    .iter()
                    .map(|w| enumerate_cell(w, p).unwrap().count() as u64)
                    .sum();
                assert_eq!(BigUint::from(total), flag_count(n, p));
            }
        }
        for n in 1..=3 {
            for p in [2, 3] {
                let mut seen = HashSet::new();
                for w in all_permutations(n) {
                    for rep in enumerate_cell(&w, p).unwrap() {
                        assert!(seen.insert(flag_key(&rep.matrix(p).unwrap())));
                    }
                }
                assert_eq!(BigUint::from(seen.len()), flag_count(n, p));
            }
        }
    }

    #[test]
    fn count_examples() {
        let m = HessenbergVector::m_max(3).unwrap();
        let scalar = FpMatrix::identity(3, 3).unwrap();
        assert_eq!(count_points(&scalar, &m).unwrap().total.0, flag_count(3, 3));
        let j3 = hfpjf(&ty("[[3]]")).to_fp(2).unwrap();
        let r = count_points(&j3, &m).unwrap();
        assert_eq!(r.total, Count::from(9));
        assert_eq!(slow_count(&j3, &m), 9);
        let nil = FpMatrix::new(2, &[vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]).unwrap();
        assert_eq!(fixed_line_count(&nil), 1);
        // [1]_2! ([3]_2 [1]_2 + 1 * 2) = 9.
        assert_eq!(count_points(&nil, &m).unwrap().total, Count::from(9));
    }

    #[test]
    fn fast_kernel_matches_definition() {
        for n in 2..=3 {
            for t in all_jordan_types(n) {
                for m in all_hessenberg_vectors(n) {
                    let x = hfpjf(&t).to_fp(5).unwrap();
                    assert_eq!(
                        count_points(&x, &m).unwrap().total.0,
                        BigUint::from(slow_count(&x, &m))
                    );
                }
            }
        }
    }

    #[test]
    fn partial_solutions() {
        let t = ty("[[3]]");
        let x = hfpjf(&t);
        let m = HessenbergVector::m_max(3).unwrap();
        let w0 = Permutation::longest(3);
        let fx = x.to_fp(2).unwrap();
        let cell = cell_dimension(&w0, &x, &m);
        assert_eq!(count_partial_solutions(&w0, &fx, &m, 3).unwrap(), 1);
        assert_eq!(
            count_partial_solutions(&w0, &fx, &m, 2).unwrap(),
            1 << cell.row_dims[1]
        );
        let report = count_points(&fx, &m).unwrap();
        assert_eq!(
            Count::from(count_partial_solutions(&w0, &fx, &m, 1).unwrap()),
            report.per_cell[&w0.to_string()]
        );
    }

    #[test]
    fn partial_solutions_follow_row_dims() {
        for t in all_jordan_types(4) {
            let x = hfpjf(&t);
            for m in all_hessenberg_vectors(4).into_iter().step_by(3) {
                for p in [5u64] {
                    let fx = x.to_fp(p).unwrap();
                    for w in all_permutations(4).into_iter().step_by(5) {
                        let cell = cell_dimension(&w, &x, &m);
                        if !cell.nonempty {
                            continue;
                        }
                        for i in 1..=4 {
                            let expected: usize = cell.row_dims.iter().skip(i - 1).sum();
                            assert_eq!(
                                count_partial_solutions(&w, &fx, &m, i).unwrap(),
                                p.pow(expected as u32),
                                "{t} {m:?} {w} i={i}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn heuristic_examples() {
        let m = HessenbergVector::m_max(3).unwrap();
        let r = verify_heuristic(&ty("[[3]]"), &m, 2).unwrap();
        assert!(r.pass);
        assert_eq!(r.census_total, Count::from(9));
        let r = verify_heuristic(&ty("[[1],[1],[1]]"), &m, 5).unwrap();
        assert!(r.pass);
        assert_eq!(r.census_total, Count::from(46));
    }

    #[test]
    fn interpolation_recovers_polynomials() {
        let pts: Vec<(BigInt, BigInt)> = [1i64, 2, 3, 4]
            .iter()
            .map(|&t| (BigInt::from(t), BigInt::from(3 - 2 * t + t * t * t)))
            .collect();
        let c = interpolate(&pts);
        let ints: Vec<BigInt> = c.iter().map(|r| r.to_integer()).collect();
        assert_eq!(ints, vec![3.into(), (-2).into(), 0.into(), 1.into()]);
    }

    #[test]
    fn census_routes_agree_at_n3() {
        for t in all_jordan_types(3) {
            for m in all_hessenberg_vectors(3) {
                let expected = poincare_tymoczko(&t, &m);
                let a = census_poincare(&t, &m, CensusMode::Interpolation).unwrap();
                let b = census_poincare(&t, &m, CensusMode::Cellwise).unwrap();
                assert_eq!(a.polynomial, expected, "{t} {m:?}");
                assert_eq!(b.polynomial, expected, "{t} {m:?}");
            }
        }
    }

    #[test]
    fn exact_log_cases() {
        assert_eq!(exact_log(1, 3), Some(0));
        assert_eq!(exact_log(27, 3), Some(3));
        assert_eq!(exact_log(6, 3), None);
        assert_eq!(exact_log(0, 3), None);
        assert_eq!(q_int(2).eval_u64(3), BigInt::from(4));
    }
}
