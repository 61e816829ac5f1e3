//! Local equations of `B(x, H(m_max))` on the affine patches `g U_- B / B`.
//!
//! The patch around `gB` has coordinates `z_ji` (`i < j`) through the lower
//! unitriangular `u`; the variety is cut out by `det(A_g)` with
//! `A_g = [x g u_1 | g u_1 | ... | g u_{n-1}]`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffla::{in_hessenberg, mat_rank, rational_mod, ExactMatrix, FpMatrix};
use crate::hesscore::HessenbergVector;
use crate::multipoly::{
    determinant, is_square_free, monomial_string, variables, MultiPoly, Var, VarOrder,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatchReport {
    pub determinant: MultiPoly,
    pub linear_part: MultiPoly,
    pub smooth: bool,
    pub in_sing_candidate: bool,
}

fn check_pair(x: &ExactMatrix, g: &ExactMatrix) -> Result<usize> {
    let n = x.n();
    if g.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: g.n(),
        });
    }
    if n < 2 {
        return Err(Error::invalid("patches need n >= 2"));
    }
    if g.det().is_zero() {
        return Err(Error::Singular);
    }
    Ok(n)
}

/// Column `i` (0-based) of `u`: `e_i + sum_{j > i} z_ji e_j`.
fn u_column(n: usize, i: usize) -> Vec<MultiPoly> {
    (0..n)
        .map(|r| match r.cmp(&i) {
            std::cmp::Ordering::Less => MultiPoly::zero(n),
            std::cmp::Ordering::Equal => MultiPoly::one(n),
            std::cmp::Ordering::Greater => MultiPoly::var(n, Var::new(r + 1, i + 1)),
        })
        .collect()
}

/// `a * col` for a constant matrix and a polynomial column.
fn apply(n: usize, a: &ExactMatrix, col: &[MultiPoly]) -> Vec<MultiPoly> {
    (0..n)
        .map(|r| {
            (0..n).fold(MultiPoly::zero(n), |acc, k| {
                acc.add(&col[k].scale(a.get(r, k)))
            })
        })
        .collect()
}

/// `A_g` as a matrix of polynomials (row-major).
pub fn patch_matrix(x: &ExactMatrix, g: &ExactMatrix) -> Result<Vec<Vec<MultiPoly>>> {
    let n = check_pair(x, g)?;
    let xg = x.mul(g)?;
    let mut cols = vec![apply(n, &xg, &u_column(n, 0))];
    for i in 0..n - 1 {
        cols.push(apply(n, g, &u_column(n, i)));
    }
    Ok((0..n)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect())
}

pub fn patch_determinant(x: &ExactMatrix, g: &ExactMatrix) -> Result<MultiPoly> {
    let a = patch_matrix(x, g)?;
    Ok(determinant(x.n(), &a))
}

/// Whether `gB` lies in `B(x, H(m_max))`, i.e. `(g^{-1} x g)_{n1} = 0`.
pub fn in_mmax(x: &ExactMatrix, g: &ExactMatrix) -> Result<bool> {
    let n = check_pair(x, g)?;
    let y = x.conjugate_by(g)?;
    Ok(y.get(n - 1, 0).is_zero())
}

fn columns_det(cols: &[Vec<BigRational>]) -> Result<BigRational> {
    Ok(ExactMatrix::from_columns(cols)?.det())
}

/// The degree-one coefficients predicted by the `D_0`, `D_i` formulas, as
/// `(variable, coefficient)` pairs (repeats are summed by the caller).
fn d_formula_terms(x: &ExactMatrix, g: &ExactMatrix) -> Result<Vec<(Var, BigRational)>> {
    let n = x.n();
    let v: Vec<Vec<BigRational>> = (0..n).map(|j| g.column(j)).collect();
    let xv: Vec<Vec<BigRational>> = v.iter().map(|c| x.mul_vec(c)).collect();
    let mut out = Vec::new();
    // D_0: sum_{j >= 2} z_j1 det[x v_j | v_1 .. v_{n-1}].
    for j in 1..n {
        let mut cols = vec![xv[j].clone()];
        cols.extend(v[..n - 1].iter().cloned());
        out.push((Var::new(j + 1, 1), columns_det(&cols)?));
    }
    // D_i: z_ni det[x v_1 | v_1 .. v_n (in slot i) .. v_{n-1}].
    for i in 0..n - 1 {
        let mut cols = vec![xv[0].clone()];
        for k in 0..n - 1 {
            cols.push(if k == i {
                v[n - 1].clone()
            } else {
                v[k].clone()
            });
        }
        out.push((Var::new(n, i + 1), columns_det(&cols)?));
    }
    Ok(out)
}

/// Degree-one part of `det(A_g)` from the `D`-formulas, checked against the
/// truncation of the full expansion.
pub fn linear_part(x: &ExactMatrix, g: &ExactMatrix) -> Result<MultiPoly> {
    let n = check_pair(x, g)?;
    if !in_mmax(x, g)? {
        return Err(Error::NotInVariety);
    }
    let mut by_formula = MultiPoly::zero(n);
    for (var, c) in d_formula_terms(x, g)? {
        by_formula = by_formula.add(&MultiPoly::var(n, var).scale(&c));
    }
    let det = patch_determinant(x, g)?;
    if !det.constant_term().is_zero() {
        return Err(Error::Inconsistent(
            "constant term of det(A_g) nonzero on a point of the variety".into(),
        ));
    }
    let truncated = det.homogeneous_part(1);
    if truncated != by_formula {
        return Err(Error::Inconsistent(format!(
            "linear part mismatch: formula {by_formula}, expansion {truncated}"
        )));
    }
    Ok(by_formula)
}

pub fn is_smooth_point_mmax(x: &ExactMatrix, g: &ExactMatrix) -> Result<bool> {
    Ok(!linear_part(x, g)?.is_zero())
}

/// `v_1` spans an `x`-eigenline and `span(v_1..v_{n-1})` is `x`-stable.
/// Decided by ranks and cross-checked against `g^{-1} x g in H(m_sing)`.
pub fn in_sing_candidate(x: &ExactMatrix, g: &ExactMatrix) -> Result<bool> {
    let n = check_pair(x, g)?;
    let v: Vec<Vec<BigRational>> = (0..n).map(|j| g.column(j)).collect();
    let rank_of = |cols: Vec<Vec<BigRational>>| -> Result<usize> {
        let mut square = cols;
        while square.len() < n {
            square.push(vec![BigRational::zero(); n]);
        }
        Ok(mat_rank(&ExactMatrix::from_columns(&square)?))
    };
    let eigenline = rank_of(vec![v[0].clone(), x.mul_vec(&v[0])])? == 1;
    let mut stable = true;
    for vi in &v[..n - 1] {
        let mut cols: Vec<Vec<BigRational>> = v[..n - 1].to_vec();
        cols.push(x.mul_vec(vi));
        if rank_of(cols)? != n - 1 {
            stable = false;
            break;
        }
    }
    let by_rank = eigenline && stable;
    let by_shape = in_hessenberg(&x.conjugate_by(g)?, &HessenbergVector::m_sing(n)?)?;
    if by_rank != by_shape {
        return Err(Error::Inconsistent(
            "rank test and Hessenberg shape disagree on the singular candidate locus".into(),
        ));
    }
    Ok(by_rank)
}

pub fn patch_report(x: &ExactMatrix, g: &ExactMatrix) -> Result<PatchReport> {
    let linear = linear_part(x, g)?;
    Ok(PatchReport {
        determinant: patch_determinant(x, g)?,
        smooth: !linear.is_zero(),
        linear_part: linear,
        in_sing_candidate: in_sing_candidate(x, g)?,
    })
}

/// Outcome of the search for a term order with a square-free initial term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SquarefreeWitness {
    Witness {
        order: VarOrder,
        initial_term: String,
        /// The determinant is linear, so every order works.
        linear: bool,
    },
    /// `det(A_g) = 0`: the zero ideal, trivially radical.
    Degenerate { order: VarOrder },
    /// No order can help: the determinant is `c z21^2 + ...` in one variable.
    Failure {
        determinant: MultiPoly,
        reason: String,
    },
}

impl SquarefreeWitness {
    pub fn is_failure(&self) -> bool {
        matches!(self, SquarefreeWitness::Failure { .. })
    }

    pub fn order(&self) -> Option<&VarOrder> {
        match self {
            SquarefreeWitness::Witness { order, .. } | SquarefreeWitness::Degenerate { order } => {
                Some(order)
            }
            SquarefreeWitness::Failure { .. } => None,
        }
    }
}

/// Whether the first `k` entries of `l = y u_1` equal `c u_1` for a constant
/// `c`, which is exactly when the leading `k x k` block of `[l | u_1 ..]` is
/// singular. `y` is 0-based; `k >= 1`.
fn leading_block_vanishes(y: &ExactMatrix, k: usize) -> bool {
    let n = y.n();
    let c = y.get(0, 0);
    if (1..n).any(|j| !y.get(0, j).is_zero()) {
        return false;
    }
    (1..k).all(|i| {
        y.get(i, 0).is_zero() && y.get(i, i) == c && (1..n).all(|j| j == i || y.get(i, j).is_zero())
    })
}

enum Plan {
    Priority(Vec<Var>),
    /// The block determinant is linear.
    Linear,
}

/// Variable priorities making the initial term of the leading `k x k` block
/// determinant square-free; assumes that block is nonsingular.
fn plan(y: &ExactMatrix, k: usize) -> Plan {
    if k == 3 {
        let a12 = y.get(0, 1);
        let a13 = y.get(0, 2);
        return if !a13.is_zero() {
            Plan::Priority(vec![Var::new(3, 2), Var::new(3, 1)])
        } else if !a12.is_zero() {
            // z31 on top: the initial term is then z31 z21.
            Plan::Priority(vec![Var::new(3, 1), Var::new(2, 1)])
        } else {
            Plan::Priority(Vec::new())
        };
    }
    if leading_block_vanishes(y, k - 1) {
        return Plan::Linear;
    }
    match plan(y, k - 1) {
        Plan::Priority(mut p) => {
            p.insert(0, Var::new(k, k - 1));
            Plan::Priority(p)
        }
        Plan::Linear => Plan::Priority(vec![Var::new(k, k - 1)]),
    }
}

/// A lexicographic order whose initial term of `det(A_g)` is square-free,
/// built by recursion on the size of the leading block and verified against
/// the full expansion.
pub fn squarefree_witness(x: &ExactMatrix, g: &ExactMatrix) -> Result<SquarefreeWitness> {
    let n = check_pair(x, g)?;
    let det = patch_determinant(x, g)?;
    let y = x.conjugate_by(g)?;
    let vanishes = leading_block_vanishes(&y, n);
    if vanishes != det.is_zero() {
        return Err(Error::Inconsistent(
            "zero test disagrees with the expanded determinant".into(),
        ));
    }
    if vanishes {
        return Ok(SquarefreeWitness::Degenerate {
            order: VarOrder::canonical(n),
        });
    }
    let (order, linear) = if n == 2 {
        if !y.get(0, 1).is_zero() {
            return Ok(SquarefreeWitness::Failure {
                reason: format!("the only variable z21 appears squared: det = {det}"),
                determinant: det,
            });
        }
        (VarOrder::canonical(2), true)
    } else {
        match plan(&y, n) {
            Plan::Priority(p) => (VarOrder::with_priority(n, &p), false),
            Plan::Linear => (VarOrder::canonical(n), true),
        }
    };
    let initial = verify_witness(&det, &order)?;
    Ok(SquarefreeWitness::Witness {
        initial_term: monomial_string(n, &initial),
        order,
        linear,
    })
}

/// Checks that the `order`-largest monomial of `det` is square-free and
/// dominates every other monomial; returns it.
pub fn verify_witness(det: &MultiPoly, order: &VarOrder) -> Result<Vec<u32>> {
    let (initial, _) = det
        .initial_term(order)
        .ok_or_else(|| Error::Inconsistent("no initial term of the zero polynomial".into()))?;
    if !is_square_free(&initial) {
        return Err(Error::Inconsistent(format!(
            "initial term {} is not square-free",
            monomial_string(det.n(), &initial)
        )));
    }
    for (e, _) in det.terms() {
        if e != &initial && order.compare(e, &initial) != std::cmp::Ordering::Less {
            return Err(Error::Inconsistent("initial term is not maximal".into()));
        }
    }
    Ok(initial)
}

/// The same linear-part algebra with coefficients in `F_p`: coefficient of
/// each variable, in canonical variable order.
pub fn linear_part_fp(x: &FpMatrix, g: &FpMatrix) -> Result<Vec<u64>> {
    let (n, p) = (x.n(), x.p());
    if g.n() != n || g.p() != p {
        return Err(Error::invalid("x and g must share size and modulus"));
    }
    if n < 2 {
        return Err(Error::invalid("patches need n >= 2"));
    }
    if g.det() == 0 {
        return Err(Error::Singular);
    }
    let v: Vec<Vec<u64>> = (0..n).map(|j| g.column(j)).collect();
    let xv: Vec<Vec<u64>> = v.iter().map(|c| x.mul_vec(c)).collect();
    let det_cols = |cols: &[Vec<u64>]| -> Result<u64> {
        Ok(FpMatrix::from_fn(p, n, |r, c| cols[c][r])?.det())
    };
    let mut first = vec![xv[0].clone()];
    first.extend(v[..n - 1].iter().cloned());
    if det_cols(&first)? != 0 {
        return Err(Error::NotInVariety);
    }
    let mut coeffs = vec![0u64; crate::multipoly::num_vars(n)];
    for j in 1..n {
        let mut cols = vec![xv[j].clone()];
        cols.extend(v[..n - 1].iter().cloned());
        let k = Var::new(j + 1, 1).index();
        coeffs[k] = (coeffs[k] + det_cols(&cols)?) % p;
    }
    for i in 0..n - 1 {
        let mut cols = vec![xv[0].clone()];
        for k in 0..n - 1 {
            cols.push(if k == i {
                v[n - 1].clone()
            } else {
                v[k].clone()
            });
        }
        let k = Var::new(n, i + 1).index();
        coeffs[k] = (coeffs[k] + det_cols(&cols)?) % p;
    }
    Ok(coeffs)
}

/// The linear part of the symbolic determinant for the integer lifts of
/// `x` and `g`, reduced mod `p`.
pub fn linear_part_fp_via_lift(x: &FpMatrix, g: &FpMatrix) -> Result<Vec<u64>> {
    let p = x.p();
    let det = patch_determinant(&x.to_exact(), &g.to_exact())?;
    let n = x.n();
    let mut coeffs = vec![0u64; crate::multipoly::num_vars(n)];
    for v in variables(n) {
        coeffs[v.index()] = rational_mod(&det.linear_coefficient(v), p)
            .ok_or_else(|| Error::Inconsistent("integral determinant has a denominator".into()))?;
    }
    Ok(coeffs)
}

pub fn in_sing_candidate_fp(x: &FpMatrix, g: &FpMatrix) -> Result<bool> {
    let y = crate::ffla::conjugate(g, x)?;
    in_hessenberg(&y, &HessenbergVector::m_sing(x.n())?)
}

/// Smoothness against the candidate locus over every `F_p`-point of
/// `B(x, H(m_max))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FpSurvey {
    pub p: u64,
    pub points: u64,
    /// Points whose linear part vanishes.
    pub nonsmooth: u64,
    pub candidates: u64,
    /// Every nonsmooth point is a candidate.
    pub containment: bool,
    /// The two sets coincide.
    pub equality: bool,
}

/// Walks all flags over `F_p` (one representative `u w` per flag). With
/// `cross_check`, each linear part is recomputed from the symbolic
/// determinant of the integer lifts.
pub fn fp_survey(x: &FpMatrix, cross_check: bool) -> Result<FpSurvey> {
    let (n, p) = (x.n(), x.p());
    let mut s = FpSurvey {
        p,
        points: 0,
        nonsmooth: 0,
        candidates: 0,
        containment: true,
        equality: true,
    };
    let mmax = HessenbergVector::m_max(n)?;
    for w in crate::symgrp::all_permutations(n) {
        for flag in crate::census::enumerate_cell(&w, p)? {
            let g = flag.matrix(p)?;
            if !in_hessenberg(&crate::ffla::conjugate(&g, x)?, &mmax)? {
                continue;
            }
            s.points += 1;
            let lin = linear_part_fp(x, &g)?;
            if cross_check && lin != linear_part_fp_via_lift(x, &g)? {
                return Err(Error::Inconsistent(
                    "F_p linear part differs from the lift".into(),
                ));
            }
            let singular = lin.iter().all(|&c| c == 0);
            let candidate = in_sing_candidate_fp(x, &g)?;
            s.nonsmooth += u64::from(singular);
            s.candidates += u64::from(candidate);
            if singular && !candidate {
                s.containment = false;
            }
            if singular != candidate {
                s.equality = false;
            }
        }
    }
    Ok(s)
}

/// The `n x n` identity scaled by `c`.
pub fn scalar_matrix(n: usize, c: i64) -> ExactMatrix {
    ExactMatrix::diagonal(&vec![c; n])
}

/// Coordinate-flag representative `w` as a matrix.
pub fn coordinate_flag(w: &crate::symgrp::Permutation) -> ExactMatrix {
    ExactMatrix::permutation(w.word())
}
