//! Affine paving of `B(x, H(m))` by Schubert cells: which cells meet the
//! Hessenberg variety, their dimensions, and the resulting Poincaré
//! polynomials.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hesscore::{hfpjf, CanonicalMatrix, HessenbergVector, JordanType};
use crate::qpoly::BettiPolynomial;
use crate::symgrp::{all_permutations, Permutation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDatum {
    pub w: Permutation,
    pub nonempty: bool,
    pub dim: usize,
    /// `d_1, ..., d_{n-1}`: the inversions counted by `dim`, grouped by their
    /// first index.
    pub row_dims: Vec<usize>,
}

fn inverse_word0(w: &Permutation) -> Vec<usize> {
    let mut inv = vec![0; w.n()];
    for i in 0..w.n() {
        inv[w.at(i)] = i;
    }
    inv
}

/// The cell `C_w` meets `B(x, H(m))` iff `nil` lies in `w H(m) w^{-1}`, i.e.
/// `w^{-1}(i) <= m(w^{-1}(j))` for every nonzero `nil_ij`.
pub fn cell_nonempty(w: &Permutation, x: &CanonicalMatrix, m: &HessenbergVector) -> bool {
    let winv = inverse_word0(w);
    x.nil_ones()
        .iter()
        .all(|&(i, j)| winv[i] <= m.bound(winv[j]))
}

pub fn cell_dimension(w: &Permutation, x: &CanonicalMatrix, m: &HessenbergVector) -> CellDatum {
    let n = w.n();
    let winv = inverse_word0(w);
    let nonempty = x
        .nil_ones()
        .iter()
        .all(|&(i, j)| winv[i] <= m.bound(winv[j]));
    let mut row_dims = vec![0; n.saturating_sub(1)];
    if nonempty {
        for i in 0..n {
            for k in i + 1..n {
                if winv[i] <= winv[k] {
                    continue;
                }
                let counts = if x.diag(i) == x.diag(k) {
                    match x.pivot_col_of_row(k) {
                        Some(j) => m.bound(winv[j]) >= winv[i],
                        None => true,
                    }
                } else {
                    m.bound(winv[k]) >= winv[i]
                };
                if counts {
                    row_dims[i] += 1;
                }
            }
        }
    }
    CellDatum {
        w: w.clone(),
        nonempty,
        dim: row_dims.iter().sum(),
        row_dims,
    }
}

/// Cell data for every `w` in `S_n`, in lexicographic order of `w`.
pub fn cell_data(x: &CanonicalMatrix, m: &HessenbergVector) -> Vec<CellDatum> {
    all_permutations(x.n())
        .par_iter()
        .map(|w| cell_dimension(w, x, m))
        .collect()
}

/// `sum_w t^{d_w}` over the nonempty cells.
pub fn poincare_of(x: &CanonicalMatrix, m: &HessenbergVector) -> BettiPolynomial {
    let mut coeffs = vec![0i64; x.n() * x.n()];
    for cell in cell_data(x, m) {
        if cell.nonempty {
            coeffs[cell.dim] += 1;
        }
    }
    BettiPolynomial::from_coeffs(coeffs)
}

pub fn poincare_tymoczko(jordan_type: &JordanType, m: &HessenbergVector) -> BettiPolynomial {
    poincare_of(&hfpjf(jordan_type), m)
}

pub fn euler_characteristic(jordan_type: &JordanType, m: &HessenbergVector) -> u64 {
    let x = hfpjf(jordan_type);
    all_permutations(x.n())
        .par_iter()
        .filter(|w| cell_nonempty(w, &x, m))
        .count() as u64
}
