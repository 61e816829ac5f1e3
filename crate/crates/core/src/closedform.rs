//! Closed formulas: the Poincaré polynomial of codimension-one Hessenberg
//! varieties, the eigenline point count, Schubert codimension-one
//! polynomials, Euler characteristics of singular loci, and the
//! irreducibility classification.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hesscore::{HessenbergVector, JordanType};
use crate::paving::{euler_characteristic, poincare_tymoczko};
use crate::qpoly::BettiPolynomial;
pub use crate::qpoly::{q_factorial, q_int};
use crate::symgrp::{schubert_euler, schubert_poincare, v2, vn2, Permutation};

fn t_pow(k: usize) -> BettiPolynomial {
    BettiPolynomial::monomial(k, 1)
}

/// `[n-2]! ([n][n-2] + t^{n-2} sum_j [d_j])`, the Poincaré polynomial of
/// `B(x, H(m_max))` when `x` has geometric multiplicities `d_1, ..., d_l`.
pub fn poincare_mmax_closed(n: usize, multiplicities: &[usize]) -> Result<BettiPolynomial> {
    if n < 2 {
        return Err(Error::invalid(format!("need n >= 2, got {n}")));
    }
    if multiplicities.is_empty()
        || multiplicities.contains(&0)
        || multiplicities.iter().sum::<usize>() > n
    {
        return Err(Error::invalid(format!(
            "multiplicities {multiplicities:?} must be positive with sum at most {n}"
        )));
    }
    let sum: BettiPolynomial = multiplicities.iter().map(|&d| q_int(d)).sum();
    let inner = &(&q_int(n) * &q_int(n - 2)) + &(&t_pow(n - 2) * &sum);
    Ok(&q_factorial(n - 2) * &inner)
}

/// Closed form for the Jordan type's own multiplicities.
pub fn poincare_mmax_for_type(jordan_type: &JordanType) -> Result<BettiPolynomial> {
    poincare_mmax_closed(jordan_type.n(), &jordan_type.geometric_multiplicities())
}

/// `[n-2]_p! ([n]_p [n-2]_p + k p^{n-2})`.
pub fn eigenline_count_formula(n: usize, k: &BigUint, p: u64) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::invalid(format!("need n >= 2, got {n}")));
    }
    let at = |poly: &BettiPolynomial| {
        poly.eval_u64(p)
            .to_biguint()
            .expect("q-analogues are positive at primes")
    };
    let q_n = at(&q_int(n));
    if k > &q_n {
        return Err(Error::invalid(format!("k = {k} exceeds [n]_p = {q_n}")));
    }
    let pp = BigUint::from(p).pow((n - 2) as u32);
    let q_fact = if n == 2 {
        BigUint::one()
    } else {
        at(&q_factorial(n - 2))
    };
    let q_n2 = if n == 2 {
        BigUint::zero()
    } else {
        at(&q_int(n - 2))
    };
    Ok(q_fact * (q_n * q_n2 + k * pp))
}

/// `[n-2]! ([n][n-1] - t^{2n-3} - t^{2n-4})`, the Poincaré polynomial of
/// `X_{s_i w_0}` for `i` in `{2, n-2}`.
pub fn schubert_codim1_poincare(n: usize, i: usize) -> Result<BettiPolynomial> {
    if n < 4 {
        return Err(Error::invalid(format!("need n >= 4, got {n}")));
    }
    if i != 2 && i != n - 2 {
        return Err(Error::invalid(format!("i must be 2 or n-2, got {i}")));
    }
    let inner = &(&(&q_int(n) * &q_int(n - 1)) - &t_pow(2 * n - 3)) - &t_pow(2 * n - 4);
    Ok(&q_factorial(n - 2) * &inner)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Irreducibility {
    Irreducible,
    Reducible,
    /// `x` is scalar, so `B(x, H(m_max))` is the whole flag variety rather
    /// than a hypersurface.
    DegenerateScalar,
}

/// Irreducibility of `B(x, H(m_max))` from the Jordan type: reducible iff
/// some eigenvalue has geometric multiplicity `n - 1`, i.e. `x - c I` has
/// rank one. For `n = 2` the variety is a set of points and is reducible iff
/// `x` has two eigenvalues.
pub fn irreducible_mmax(jordan_type: &JordanType) -> Irreducibility {
    let n = jordan_type.n();
    if jordan_type.is_scalar() {
        return Irreducibility::DegenerateScalar;
    }
    let reducible = if n == 2 {
        jordan_type.r() >= 2
    } else {
        jordan_type.geometric_multiplicities().contains(&(n - 1))
    };
    if reducible {
        Irreducibility::Reducible
    } else {
        Irreducibility::Irreducible
    }
}

/// Coefficient of `q^{n^2-n-2}` (top degree of the hypersurface) in the
/// closed-form Poincaré polynomial. Irreducible equidimensional varieties
/// have exactly one top-dimensional cell.
pub fn top_coefficient_mmax(jordan_type: &JordanType) -> Result<i64> {
    let n = jordan_type.n();
    let poly = poincare_mmax_for_type(jordan_type)?;
    Ok(poly.coeff((n * n - n - 2) / 2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankTwoCase {
    /// `x^2 = 0`: Jordan type `(2, 2, 1^{n-4})`.
    SquareZero,
    /// `x^2 != 0`: Jordan type `(3, 1^{n-3})`.
    NonSquareZero,
}

impl RankTwoCase {
    pub fn jordan_type(self, n: usize) -> Result<JordanType> {
        let lambda = match self {
            RankTwoCase::SquareZero if n >= 4 => [vec![2, 2], vec![1; n - 4]].concat(),
            RankTwoCase::NonSquareZero if n >= 3 => [vec![3], vec![1; n - 3]].concat(),
            _ => {
                return Err(Error::invalid(format!(
                    "no rank-two type of this case at n = {n}"
                )))
            }
        };
        JordanType::nilpotent(lambda)
    }
}

/// Poincaré polynomial of `B(x, H(1, n-1, ..., n-1, n))` for `x` nilpotent of
/// rank two.
pub fn echess_poincare(n: usize, case: RankTwoCase) -> Result<BettiPolynomial> {
    if n < 4 {
        return Err(Error::invalid(format!("need n >= 4, got {n}")));
    }
    let inner = match case {
        RankTwoCase::SquareZero => &(&q_int(n - 2) * &q_int(n - 3)) + &(&q_int(2) * &t_pow(n - 3)),
        RankTwoCase::NonSquareZero => &q_int(n - 2) + &(&t_pow(1) * &q_int(n - 3).pow(2)),
    };
    Ok(&q_factorial(n - 2) * &inner)
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// `(n-2)! (n^2 - 5n + 6)`: Euler characteristic of the singular locus of
/// `X_{s_2 w_0}` and of `X_{s_{n-2} w_0}`.
pub fn schubert_singular_euler(n: usize) -> u64 {
    factorial(n - 2) * ((n * n + 6) - 5 * n) as u64
}

/// `(n-2)! (n^2 - 5n + 8)` and `(n-2)! (n^2 - 5n + 7)`.
pub fn echess_euler(n: usize, case: RankTwoCase) -> u64 {
    let c = match case {
        RankTwoCase::SquareZero => 8,
        RankTwoCase::NonSquareZero => 7,
    };
    factorial(n - 2) * ((n * n + c) - 5 * n) as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchubertComparison {
    pub n: usize,
    /// Closed form for `B(x, H(m_max))` with one eigenvalue of geometric
    /// multiplicity `n - 2`.
    pub hessenberg_closed: BettiPolynomial,
    /// The same, from the paving, for both nilpotent types with `n - 2`
    /// blocks.
    pub hessenberg_paving: Vec<(JordanType, BettiPolynomial)>,
    pub schubert_closed: BettiPolynomial,
    /// Bruhat-interval sums for `s_2 w_0` and `s_{n-2} w_0`.
    pub schubert_bruhat: Vec<(Permutation, BettiPolynomial)>,
    pub poincare_equal: bool,
    pub schubert_singular_euler: u64,
    /// `#{u <= v(2)}` and `#{u <= v(n-2)}`.
    pub schubert_singular_euler_bruhat: Vec<u64>,
    pub hessenberg_singular_euler: Vec<(RankTwoCase, u64)>,
    /// Euler characteristics of `B(x, m_sing)` from the paving.
    pub hessenberg_singular_euler_paving: Vec<(RankTwoCase, u64)>,
    pub euler_all_distinct: bool,
}

/// Checks that Schubert codimension-one varieties and rank-two Hessenberg
/// varieties share Poincaré polynomials while their singular loci have
/// different Euler characteristics.
pub fn schubert_vs_hessenberg_report(n: usize) -> Result<SchubertComparison> {
    if n < 4 {
        return Err(Error::invalid(format!("need n >= 4, got {n}")));
    }
    let hessenberg_closed = poincare_mmax_closed(n, &[n - 2])?;
    let schubert_closed = schubert_codim1_poincare(n, 2)?;
    let m_max = HessenbergVector::m_max(n)?;
    let m_sing = HessenbergVector::m_sing(n)?;
    let cases = [RankTwoCase::SquareZero, RankTwoCase::NonSquareZero];
    let mut hessenberg_paving = Vec::new();
    let mut hessenberg_singular_euler_paving = Vec::new();
    for case in cases {
        let t = case.jordan_type(n)?;
        hessenberg_paving.push((t.clone(), poincare_tymoczko(&t, &m_max)));
        hessenberg_singular_euler_paving.push((case, euler_characteristic(&t, &m_sing)));
    }
    let mut schubert_bruhat = Vec::new();
    for i in [2, n - 2] {
        let w = Permutation::codim_one(i, n)?;
        let poly = schubert_poincare(&w);
        schubert_bruhat.push((w, poly));
    }
    let poincare_equal = hessenberg_closed == schubert_closed
        && hessenberg_paving
            .iter()
            .all(|(_, p)| *p == hessenberg_closed)
        && schubert_bruhat.iter().all(|(_, p)| *p == schubert_closed);
    let hessenberg_singular_euler: Vec<(RankTwoCase, u64)> =
        cases.iter().map(|&c| (c, echess_euler(n, c))).collect();
    let schubert_euler_value = schubert_singular_euler(n);
    let euler_all_distinct = {
        let a = schubert_euler_value;
        let b = hessenberg_singular_euler[0].1;
        let c = hessenberg_singular_euler[1].1;
        a != b && a != c && b != c
    };
    Ok(SchubertComparison {
        n,
        hessenberg_closed,
        hessenberg_paving,
        schubert_closed,
        schubert_bruhat,
        poincare_equal,
        schubert_singular_euler: schubert_euler_value,
        schubert_singular_euler_bruhat: vec![schubert_euler(&v2(n)?), schubert_euler(&vn2(n)?)],
        hessenberg_singular_euler,
        hessenberg_singular_euler_paving,
        euler_all_distinct,
    })
}
