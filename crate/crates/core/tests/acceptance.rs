//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line before asserting. Run with `--nocapture` to see the lines.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hesslab::census::{
    admissible_prime, auto_mode, census_poincare, count_points, count_type_multi, CensusMode,
    DEFAULT_FLAG_BUDGET,
};
use hesslab::closedform::{
    echess_poincare, eigenline_count_formula, irreducible_mmax, poincare_mmax_for_type,
    schubert_codim1_poincare, top_coefficient_mmax, Irreducibility, RankTwoCase,
};
use hesslab::ffla::{fixed_line_count_by_scan, ExactMatrix, FpMatrix};
use hesslab::hesscore::{
    all_hessenberg_vectors, all_jordan_types, hfpjf, partitions_of, HessenbergVector, JordanType,
};
use hesslab::patches::{
    fp_survey, in_mmax, in_sing_candidate, is_smooth_point_mmax, patch_determinant, patch_report,
    squarefree_witness, verify_witness, SquarefreeWitness,
};
use hesslab::paving::{cell_data, euler_characteristic, poincare_tymoczko};
use hesslab::qpoly::{q_factorial, q_factorial_at};
use hesslab::symgrp::{
    all_permutations, bruhat_leq, ls_singular_maximal, schubert_euler, schubert_poincare, v2, vn2,
    Permutation,
};

fn report(criterion: u32, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion:>2}: {verdict} | {detail}");
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    rat(rng.gen_range(-3..=3), rng.gen_range(1..=2))
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> ExactMatrix {
    loop {
        let g = ExactMatrix::from_fn(n, |_, _| small_rational(rng));
        if g.inverse().is_ok() {
            return g;
        }
    }
}

/// `u w` with `u` upper unitriangular with random rational entries.
fn random_translate(rng: &mut ChaCha8Rng, w: &Permutation) -> ExactMatrix {
    let n = w.n();
    let u = ExactMatrix::from_fn(n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => small_rational(rng),
        std::cmp::Ordering::Equal => rat(1, 1),
        std::cmp::Ordering::Greater => rat(0, 1),
    });
    u.mul(&ExactMatrix::permutation(w.word())).unwrap()
}

#[test]
fn criterion_01_point_count_heuristic() {
    let mut checked = 0;
    let mut skipped = 0;
    let mut failures = Vec::new();
    for n in 2..=4 {
        let ms = all_hessenberg_vectors(n);
        for t in all_jordan_types(n) {
            let x = hfpjf(&t);
            for p in [2u64, 3, 5] {
                if !admissible_prime(&x, p).unwrap().admissible {
                    skipped += 1;
                    continue;
                }
                let reports = count_type_multi(&t, &ms, p).unwrap();
                for (m, r) in ms.iter().zip(&reports) {
                    checked += 1;
                    let poly = poincare_tymoczko(&t, m);
                    let mut ok = BigInt::from(r.total.value().clone()) == poly.eval_u64(p);
                    let mut nonempty = 0;
                    for cell in cell_data(&x, m) {
                        let counted = r.per_cell.get(&cell.w.to_string());
                        if cell.nonempty {
                            nonempty += 1;
                            let expected = BigUint::from(p).pow(cell.dim as u32);
                            ok &= counted.map(|c| c.value() == &expected).unwrap_or(false);
                        } else {
                            ok &= counted.is_none();
                        }
                    }
                    ok &= r.per_cell.len() == nonempty;
                    if !ok {
                        failures.push(format!("{t} m={m} p={p}"));
                    }
                }
            }
        }
    }
    let ok = failures.is_empty() && checked > 0;
    report(
        1,
        ok,
        &format!("{checked} (type, m, p) censuses match totals and per-cell p^d; {skipped} inadmissible (type, p) skipped; failures {failures:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_02_flag_variety_baseline() {
    let mut ok = true;
    let mut checked = 0;
    for n in 1..=4 {
        let scalar = JordanType::new(vec![vec![1; n]], None).unwrap();
        for p in [2u64, 3, 5] {
            let expected = q_factorial_at(n, p);
            let by_length: BigInt = all_permutations(n)
                .iter()
                .map(|w| BigInt::from(p).pow(w.length() as u32))
                .sum();
            ok &= by_length == expected;
            ok &= q_factorial(n).eval_u64(p) == expected;
            let ms = all_hessenberg_vectors(n);
            for r in count_type_multi(&scalar, &ms, p).unwrap() {
                ok &= BigInt::from(r.total.value().clone()) == expected;
                checked += 1;
            }
        }
    }
    report(
        2,
        ok,
        &format!("sum_w p^l(w) = [n]_p! and {checked} scalar censuses = [n]_p! for n <= 4, p in {{2,3,5}}"),
    );
    assert!(ok);
}

#[test]
fn criterion_03_closed_form_vs_paving() {
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in 2..=5 {
        let m = HessenbergVector::m_max(n).unwrap();
        for t in all_jordan_types(n) {
            checked += 1;
            if poincare_mmax_for_type(&t).unwrap() != poincare_tymoczko(&t, &m) {
                failures.push(t.to_string());
            }
        }
    }
    let ok = failures.is_empty();
    report(
        3,
        ok,
        &format!("{checked} Jordan types with 2 <= n <= 5; failures {failures:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_04_eigenline_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in [3usize, 4] {
        let m = HessenbergVector::m_max(n).unwrap();
        for p in [2u64, 3] {
            for _ in 0..100 {
                let y = FpMatrix::from_fn(p, n, |_, _| rng.gen_range(0..p)).unwrap();
                let k = BigUint::from(fixed_line_count_by_scan(&y));
                let total = count_points(&y, &m).unwrap().total.value().clone();
                let formula = eigenline_count_formula(n, &k, p).unwrap();
                checked += 1;
                if total != formula {
                    failures.push(format!("{y:?}"));
                }
            }
        }
    }
    let ok = failures.is_empty();
    report(
        4,
        ok,
        &format!("{checked} random matrices over F_2, F_3 at n = 3, 4; failures {failures:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_05_irreducibility() {
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in 2..=6 {
        for t in all_jordan_types(n) {
            let class = irreducible_mmax(&t);
            if class == Irreducibility::DegenerateScalar {
                continue;
            }
            checked += 1;
            let top = top_coefficient_mmax(&t).unwrap();
            let monic = top == 1;
            if monic != (class == Irreducibility::Irreducible) {
                failures.push(format!("{t}: {class:?}, top coefficient {top}"));
            }
        }
    }
    let mut families_ok = true;
    for n in 3..=6 {
        let hook = JordanType::nilpotent([vec![2], vec![1; n - 2]].concat()).unwrap();
        let two_eigen = JordanType::new(vec![vec![1; n - 1], vec![1]], None).unwrap();
        families_ok &= irreducible_mmax(&hook) == Irreducibility::Reducible;
        families_ok &= irreducible_mmax(&two_eigen) == Irreducibility::Reducible;
    }
    let ok = failures.is_empty() && families_ok;
    report(
        5,
        ok,
        &format!("{checked} non-scalar types with n <= 6 agree with monicity; named reducible families ok: {families_ok}; failures {failures:?}"),
    );
    assert!(ok);
}

struct LocusTally {
    points: usize,
    mismatches: Vec<String>,
}

/// Compares smoothness with the candidate locus at one point of the
/// variety. `equality` demands the sets coincide, otherwise only
/// nonsmooth => candidate.
fn check_point(
    x: &ExactMatrix,
    g: &ExactMatrix,
    equality: bool,
    tally: &mut LocusTally,
    label: &str,
) {
    tally.points += 1;
    let smooth = is_smooth_point_mmax(x, g).unwrap();
    let candidate = in_sing_candidate(x, g).unwrap();
    let ok = if equality {
        !smooth == candidate
    } else {
        smooth || candidate
    };
    if !ok {
        tally
            .mismatches
            .push(format!("{label}: smooth={smooth} candidate={candidate}"));
    }
}

#[test]
fn criterion_06_singular_locus() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut nil = LocusTally {
        points: 0,
        mismatches: Vec::new(),
    };
    let mut other = LocusTally {
        points: 0,
        mismatches: Vec::new(),
    };
    let mut translates_short = Vec::new();
    let mut fp_failures = Vec::new();
    let mut fp_points = 0;
    for n in [3usize, 4] {
        let nilpotent = partitions_of(n)
            .into_iter()
            .map(|lambda| JordanType::nilpotent(lambda).unwrap());
        let types: Vec<JordanType> = all_jordan_types(n).into_iter().chain(nilpotent).collect();
        for t in types {
            if t.is_scalar() {
                continue;
            }
            let equality = t.is_nilpotent();
            let canon = hfpjf(&t);
            let x = canon.matrix();
            let tally = if equality { &mut nil } else { &mut other };
            let mut in_variety = Vec::new();
            for w in all_permutations(n) {
                let g = ExactMatrix::permutation(w.word());
                if in_mmax(&x, &g).unwrap() {
                    check_point(&x, &g, equality, tally, &format!("{t} w={w}"));
                    in_variety.push(w);
                }
            }
            let mut found = 0;
            let mut attempts = 0;
            while found < 50 && attempts < 20_000 {
                attempts += 1;
                let w = &in_variety[rng.gen_range(0..in_variety.len())];
                let g = random_translate(&mut rng, w);
                if in_mmax(&x, &g).unwrap() {
                    found += 1;
                    check_point(&x, &g, equality, tally, &format!("{t} translate of {w}"));
                }
            }
            if found < 50 {
                translates_short.push(format!("{t}: {found}"));
            }
            for p in [2u64, 3] {
                let s = fp_survey(&canon.to_fp(p).unwrap(), true).unwrap();
                fp_points += s.points;
                let ok = if equality { s.equality } else { s.containment };
                if !ok {
                    fp_failures.push(format!("{t} p={p}: {s:?}"));
                }
            }
        }
    }
    let r = patch_report(
        &ExactMatrix::diagonal(&[1, 0, 0]),
        &ExactMatrix::identity(3),
    )
    .unwrap();
    let example_ok =
        r.determinant.to_string() == "z21*z32 - z31" && r.smooth && r.in_sing_candidate;
    let ok = nil.mismatches.is_empty()
        && other.mismatches.is_empty()
        && translates_short.is_empty()
        && fp_failures.is_empty()
        && example_ok;
    report(
        6,
        ok,
        &format!(
            "nilpotent equality at {} rational points, containment at {} non-nilpotent points, {fp_points} F_p points; diag(1,0,0) example ok: {example_ok}; mismatches {:?} {:?}; short translate samples {translates_short:?}; F_p failures {fp_failures:?}",
            nil.points, other.points, nil.mismatches, other.mismatches
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_07_squarefree_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut witnesses = 0;
    let mut degenerate = 0;
    let mut failures = Vec::new();
    for n in [3usize, 4] {
        for t in all_jordan_types(n) {
            let x = hfpjf(&t).matrix();
            let mut gs: Vec<(String, ExactMatrix)> = all_permutations(n)
                .into_iter()
                .map(|w| (format!("w={w}"), ExactMatrix::permutation(w.word())))
                .collect();
            for k in 0..20 {
                gs.push((format!("random #{k}"), random_invertible(&mut rng, n)));
            }
            for (label, g) in gs {
                match squarefree_witness(&x, &g) {
                    Ok(SquarefreeWitness::Witness { order, .. }) => {
                        let det = patch_determinant(&x, &g).unwrap();
                        match verify_witness(&det, &order) {
                            Ok(_) => witnesses += 1,
                            Err(e) => failures.push(format!("{t} {label}: {e}")),
                        }
                    }
                    Ok(SquarefreeWitness::Degenerate { .. }) => {
                        if patch_determinant(&x, &g).unwrap().is_zero() {
                            degenerate += 1;
                        } else {
                            failures.push(format!("{t} {label}: degenerate with nonzero det"));
                        }
                    }
                    Ok(SquarefreeWitness::Failure { reason, .. }) => {
                        failures.push(format!("{t} {label}: {reason}"))
                    }
                    Err(e) => failures.push(format!("{t} {label}: {e}")),
                }
            }
        }
    }
    let x2 = hfpjf(&JordanType::nilpotent(vec![2]).unwrap()).matrix();
    let n2_ok = match squarefree_witness(&x2, &ExactMatrix::identity(2)).unwrap() {
        SquarefreeWitness::Failure { determinant, .. } => determinant.to_string() == "z21^2",
        _ => false,
    };
    let ok = failures.is_empty() && n2_ok;
    report(
        7,
        ok,
        &format!("{witnesses} verified witnesses, {degenerate} degenerate (det = 0); n = 2 failure with det z21^2: {n2_ok}; failures {failures:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_08_schubert_singular_loci() {
    let expected_euler = [(4usize, 4u64), (5, 36), (6, 288)];
    let mut ok = true;
    let mut details = Vec::new();
    for (n, chi) in expected_euler {
        let s2 = Permutation::codim_one(2, n).unwrap();
        let sn2 = Permutation::codim_one(n - 2, n).unwrap();
        let a = ls_singular_maximal(&s2) == BTreeSet::from([v2(n).unwrap()]);
        let b = ls_singular_maximal(&sn2) == BTreeSet::from([vn2(n).unwrap()]);
        let e2 = schubert_euler(&v2(n).unwrap());
        let en2 = schubert_euler(&vn2(n).unwrap());
        ok &= a && b && e2 == chi && en2 == chi;
        details.push(format!("n={n}: loci {a}/{b}, chi {e2}/{en2} (want {chi})"));
    }
    report(8, ok, &details.join("; "));
    assert!(ok);
}

#[test]
fn criterion_09_rank_two_census() {
    let expected_euler = BTreeMap::from([
        ((4usize, RankTwoCase::SquareZero as u8), 8i64),
        ((4, RankTwoCase::NonSquareZero as u8), 6),
        ((5, RankTwoCase::SquareZero as u8), 48),
        ((5, RankTwoCase::NonSquareZero as u8), 42),
    ]);
    let mut ok = true;
    let mut details = Vec::new();
    for n in [4usize, 5] {
        let m = HessenbergVector::m_sing(n).unwrap();
        for case in [RankTwoCase::SquareZero, RankTwoCase::NonSquareZero] {
            let t = case.jordan_type(n).unwrap();
            let mode = auto_mode(&hfpjf(&t), DEFAULT_FLAG_BUDGET);
            let census = census_poincare(&t, &m, mode).unwrap();
            let formula = echess_poincare(n, case).unwrap();
            let chi = census.polynomial.sum_of_coeffs();
            let want = expected_euler[&(n, case as u8)];
            let good = census.polynomial == formula && chi == want;
            ok &= good;
            let mode_name = match mode {
                CensusMode::Interpolation => "interpolation",
                CensusMode::Cellwise => "cellwise",
            };
            details.push(format!(
                "n={n} {t}: {} via {mode_name} at primes {:?}, chi {chi} (want {want})",
                census.polynomial, census.primes
            ));
        }
    }
    report(9, ok, &details.join("; "));
    assert!(ok);
}

#[test]
fn criterion_10_schubert_vs_hessenberg() {
    // Values as printed in the criterion.
    let table = [
        (4usize, 4u64, [8u64, 6]),
        (5, 36, [48, 42]),
        (6, 288, [384, 360]),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for (n, schubert_chi, hess_chi) in table {
        let hess = poincare_mmax_for_type(
            &JordanType::nilpotent([vec![2, 2], vec![1; n - 4]].concat()).unwrap(),
        )
        .unwrap();
        let hess_hook = poincare_tymoczko(
            &RankTwoCase::NonSquareZero.jordan_type(n).unwrap(),
            &HessenbergVector::m_max(n).unwrap(),
        );
        let schubert = schubert_codim1_poincare(n, 2).unwrap();
        let bruhat_ok = [2, n - 2]
            .iter()
            .all(|&i| schubert_poincare(&Permutation::codim_one(i, n).unwrap()) == schubert);
        let poincare_ok = hess == schubert && hess_hook == schubert && bruhat_ok;
        let s_chi = schubert_euler(&v2(n).unwrap());
        let m_sing = HessenbergVector::m_sing(n).unwrap();
        let h_chi: Vec<u64> = [RankTwoCase::SquareZero, RankTwoCase::NonSquareZero]
            .iter()
            .map(|c| euler_characteristic(&c.jordan_type(n).unwrap(), &m_sing))
            .collect();
        let values_ok = s_chi == schubert_chi && h_chi == hess_chi;
        let differ = !h_chi.contains(&s_chi);
        ok &= poincare_ok && values_ok && differ;
        details.push(format!(
            "n={n}: Poincare equal {poincare_ok}, chi {s_chi} vs {h_chi:?} (printed {schubert_chi} vs {hess_chi:?}), distinct {differ}"
        ));
    }
    report(10, ok, &details.join("; "));
    assert!(
        ok,
        "computed Euler characteristics differ from the printed values"
    );
}

/// Bruhat order as the transitive closure of covering relations
/// `v < v t` with `l(v t) = l(v) + 1`.
fn bruhat_by_closure(n: usize) -> HashMap<Vec<usize>, BTreeSet<Vec<usize>>> {
    let perms: Vec<Vec<usize>> = all_permutations(n)
        .iter()
        .map(|p| p.word().to_vec())
        .collect();
    let inv = |w: &[usize]| {
        let mut c = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                c += usize::from(w[i] > w[j]);
            }
        }
        c
    };
    let mut covers: HashMap<Vec<usize>, Vec<Vec<usize>>> = HashMap::new();
    for v in &perms {
        let lv = inv(v);
        let mut ups = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut w = v.clone();
                w.swap(i, j);
                if inv(&w) == lv + 1 {
                    ups.push(w);
                }
            }
        }
        covers.insert(v.clone(), ups);
    }
    let mut above = HashMap::new();
    for v in &perms {
        let mut seen = BTreeSet::from([v.clone()]);
        let mut queue = VecDeque::from([v.clone()]);
        while let Some(u) = queue.pop_front() {
            for w in &covers[&u] {
                if seen.insert(w.clone()) {
                    queue.push_back(w.clone());
                }
            }
        }
        above.insert(v.clone(), seen);
    }
    above
}

#[test]
fn criterion_11_bruhat_tableau_criterion() {
    let mut pairs = 0;
    let mut failures = Vec::new();
    for n in 1..=5 {
        let above = bruhat_by_closure(n);
        let perms = all_permutations(n);
        for v in &perms {
            for w in &perms {
                pairs += 1;
                let oracle = above[v.word()].contains(w.word());
                if bruhat_leq(v, w).unwrap() != oracle {
                    failures.push(format!("{v} <= {w}"));
                }
            }
        }
    }
    let ok = failures.is_empty();
    report(
        11,
        ok,
        &format!("{pairs} pairs over S_1..S_5; failures {failures:?}"),
    );
    assert!(ok);
}
