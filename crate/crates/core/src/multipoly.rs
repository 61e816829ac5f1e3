//! Sparse polynomials with rational coefficients in the patch coordinates
//! `z_ji` (`1 <= i < j <= n`), lexicographic term orders, and determinants
//! of polynomial matrices.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ffla::rational_mod;

/// The coordinate `z_ji` below the diagonal (1-based, `i < j`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub j: usize,
    pub i: usize,
}

impl Var {
    pub fn new(j: usize, i: usize) -> Self {
        debug_assert!(i >= 1 && i < j);
        Var { j, i }
    }

    /// Position in the canonical ordering by `(j, i)`.
    pub fn index(self) -> usize {
        (self.j - 1) * (self.j - 2) / 2 + (self.i - 1)
    }

    pub fn name(self) -> String {
        if self.j < 10 {
            format!("z{}{}", self.j, self.i)
        } else {
            format!("z{}_{}", self.j, self.i)
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('z')
            .ok_or_else(|| Error::invalid(format!("bad variable {s:?}")))?;
        let body = body.trim_start_matches('_');
        let (j, i) = match body.split_once('_') {
            Some((j, i)) => (j.parse(), i.parse()),
            None if body.len() == 2 => (body[..1].parse(), body[1..].parse()),
            None => return Err(Error::invalid(format!("bad variable {s:?}"))),
        };
        match (j, i) {
            (Ok(j), Ok(i)) if i >= 1 && i < j => Ok(Var { j, i }),
            _ => Err(Error::invalid(format!("bad variable {s:?}"))),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// All variables for size `n`, ordered by `(j, i)`.
pub fn variables(n: usize) -> Vec<Var> {
    let mut out = Vec::new();
    for j in 2..=n {
        for i in 1..j {
            out.push(Var { j, i });
        }
    }
    out
}

pub fn num_vars(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A total order on the variables, listed from largest to smallest; it
/// induces the lexicographic term order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<String>", try_from = "Vec<String>")]
pub struct VarOrder {
    vars: Vec<Var>,
}

impl From<VarOrder> for Vec<String> {
    fn from(o: VarOrder) -> Self {
        o.vars.iter().map(|v| v.name()).collect()
    }
}

impl TryFrom<Vec<String>> for VarOrder {
    type Error = Error;
    fn try_from(names: Vec<String>) -> Result<Self> {
        let vars = names
            .iter()
            .map(|s| Var::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let n = vars.iter().map(|v| v.j).max().unwrap_or(1);
        VarOrder::new(n, vars)
    }
}

impl VarOrder {
    /// `vars` must list every variable for size `n` exactly once.
    pub fn new(n: usize, vars: Vec<Var>) -> Result<Self> {
        let mut sorted = vars.clone();
        sorted.sort();
        if sorted != variables(n) {
            return Err(Error::invalid(
                "variable order is not a permutation of the variables",
            ));
        }
        Ok(VarOrder { vars })
    }

    /// `z21 > z31 > z32 > z41 > ...`.
    pub fn canonical(n: usize) -> Self {
        VarOrder { vars: variables(n) }
    }

    /// Puts `priority` on top (in the given order), then the remaining
    /// variables in canonical order.
    pub fn with_priority(n: usize, priority: &[Var]) -> Self {
        let mut vars: Vec<Var> = Vec::new();
        for &v in priority {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        for v in variables(n) {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        VarOrder { vars }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    /// Lexicographic comparison of exponent vectors.
    pub fn compare(&self, a: &[u32], b: &[u32]) -> Ordering {
        for v in &self.vars {
            let k = v.index();
            match a[k].cmp(&b[k]) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }
}

/// Sparse polynomial over `Q` in the `z_ji` for a fixed `n`; exponent vectors
/// are indexed canonically and zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MultiPoly {
    pub fn zero(n: usize) -> Self {
        MultiPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: BigRational) -> Self {
        let mut p = MultiPoly::zero(n);
        p.add_term(vec![0; num_vars(n)], c);
        p
    }

    pub fn one(n: usize) -> Self {
        MultiPoly::constant(n, BigRational::one())
    }

    pub fn var(n: usize, v: Var) -> Self {
        let mut e = vec![0; num_vars(n)];
        e[v.index()] = 1;
        let mut p = MultiPoly::zero(n);
        p.add_term(e, BigRational::one());
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn coefficient(&self, e: &[u32]) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Coefficient of the single variable `v`.
    pub fn linear_coefficient(&self, v: Var) -> BigRational {
        let mut e = vec![0; num_vars(self.n)];
        e[v.index()] = 1;
        self.coefficient(&e)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coefficient(&vec![0; num_vars(self.n)])
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v.index()]).max().unwrap_or(0)
    }

    /// The homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> MultiPoly {
        MultiPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.n);
        }
        MultiPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// The `order`-largest monomial and its coefficient.
    pub fn initial_term(&self, order: &VarOrder) -> Option<(Vec<u32>, BigRational)> {
        self.terms
            .iter()
            .max_by(|a, b| order.compare(a.0, b.0))
            .map(|(e, c)| (e.clone(), c.clone()))
    }

    /// Coefficients reduced mod `p`, or `None` if a denominator vanishes.
    pub fn reduce_mod(&self, p: u64) -> Option<BTreeMap<Vec<u32>, u64>> {
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let r = rational_mod(c, p)?;
            if r != 0 {
                out.insert(e.clone(), r);
            }
        }
        Some(out)
    }

    /// Terms sorted by total degree (descending), then lexicographically in
    /// the canonical order (descending).
    pub fn sorted_terms(&self) -> Vec<(&Vec<u32>, &BigRational)> {
        let order = VarOrder::canonical(self.n);
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| order.compare(b.0, a.0))
        });
        terms
    }

    pub fn exponents_map(&self, e: &[u32]) -> BTreeMap<String, u32> {
        variables(self.n)
            .into_iter()
            .filter(|v| e[v.index()] > 0)
            .map(|v| (v.name(), e[v.index()]))
            .collect()
    }
}

pub fn monomial_string(n: usize, e: &[u32]) -> String {
    let parts: Vec<String> = variables(n)
        .into_iter()
        .filter(|v| e[v.index()] > 0)
        .map(|v| match e[v.index()] {
            1 => v.name(),
            k => format!("{}^{k}", v.name()),
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

pub fn is_square_free(e: &[u32]) -> bool {
    e.iter().all(|&k| k <= 1)
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let constant = e.iter().all(|&x| x == 0);
            if constant {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&monomial_string(self.n, e))?;
            } else {
                write!(f, "{abs}*{}", monomial_string(self.n, e))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exponents: BTreeMap<String, u32>,
    coeff: String,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self.sorted_terms();
        let mut seq = s.serialize_seq(Some(terms.len()))?;
        for (e, c) in terms {
            seq.serialize_element(&TermJson {
                exponents: self.exponents_map(e),
                coeff: c.to_string(),
            })?;
        }
        seq.end()
    }
}

impl MultiPoly {
    /// Inverse of the JSON serialization; `n` fixes the variable set.
    pub fn from_json(n: usize, value: &serde_json::Value) -> Result<Self> {
        let terms: Vec<TermJson> = serde_json::from_value(value.clone())?;
        let mut p = MultiPoly::zero(n);
        for t in terms {
            let mut e = vec![0; num_vars(n)];
            for (name, k) in t.exponents {
                let v = Var::parse(&name)?;
                if v.j > n {
                    return Err(Error::invalid(format!("variable {name} out of range")));
                }
                e[v.index()] = k;
            }
            let c: BigRational = t
                .coeff
                .parse()
                .map_err(|_| Error::invalid(format!("bad coefficient {:?}", t.coeff)))?;
            p.add_term(e, c);
        }
        Ok(p)
    }
}

/// Determinant of a square matrix of polynomials by Laplace expansion along
/// rows, memoized on the set of remaining columns.
pub fn determinant(n_vars_of: usize, entries: &[Vec<MultiPoly>]) -> MultiPoly {
    let size = entries.len();
    assert!(size <= 20, "determinant expansion limited to 20 columns");
    let mut memo: HashMap<u32, MultiPoly> = HashMap::new();
    fn go(
        row: usize,
        cols: u32,
        entries: &[Vec<MultiPoly>],
        n: usize,
        memo: &mut HashMap<u32, MultiPoly>,
    ) -> MultiPoly {
        if row == entries.len() {
            return MultiPoly::one(n);
        }
        if let Some(hit) = memo.get(&cols) {
            return hit.clone();
        }
        let mut acc = MultiPoly::zero(n);
        let mut sign_positive = true;
        for c in 0..entries.len() {
            if cols & (1 << c) == 0 {
                continue;
            }
            let a = &entries[row][c];
            if !a.is_zero() {
                let minor = go(row + 1, cols & !(1 << c), entries, n, memo);
                let term = a.mul(&minor);
                acc = if sign_positive {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            sign_positive = !sign_positive;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    let all = if size == 0 { 0 } else { (1u32 << size) - 1 };
    go(0, all, entries, n_vars_of, &mut memo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffla::int;

    fn z(j: usize, i: usize) -> MultiPoly {
        MultiPoly::var(3, Var::new(j, i))
    }

    #[test]
    fn variable_indexing() {
        let vars = variables(4);
        for (k, v) in vars.iter().enumerate() {
            assert_eq!(v.index(), k);
            assert_eq!(Var::parse(&v.name()).unwrap(), *v);
        }
        assert_eq!(Var::parse("z_12_3").unwrap(), Var::new(12, 3));
        assert!(Var::parse("z12").is_err());
    }

    #[test]
    fn display_matches_convention() {
        let p = z(2, 1).mul(&z(3, 2)).sub(&z(3, 1));
        assert_eq!(p.to_string(), "z21*z32 - z31");
        let q = z(2, 1)
            .mul(&z(2, 1))
            .scale(&int(-2))
            .add(&MultiPoly::constant(3, int(5)));
        assert_eq!(q.to_string(), "-2*z21^2 + 5");
        assert_eq!(MultiPoly::zero(3).to_string(), "0");
    }

    #[test]
    fn json_round_trip() {
        let p = z(2, 1)
            .mul(&z(3, 2))
            .sub(&z(3, 1).scale(&BigRational::new(3.into(), 2.into())));
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v[0]["exponents"]["z21"], 1);
        assert_eq!(v[1]["coeff"], "-3/2");
        assert_eq!(MultiPoly::from_json(3, &v).unwrap(), p);
    }

    #[test]
    fn lex_order_and_initial_terms() {
        let p = z(3, 2)
            .mul(&z(2, 1))
            .mul(&z(2, 1))
            .sub(&z(3, 1).mul(&z(2, 1)));
        let top_z21 = VarOrder::with_priority(3, &[Var::new(2, 1)]);
        let (e, _) = p.initial_term(&top_z21).unwrap();
        assert_eq!(monomial_string(3, &e), "z21^2*z32");
        let top_z31 = VarOrder::with_priority(3, &[Var::new(3, 1), Var::new(2, 1)]);
        let (e, c) = p.initial_term(&top_z31).unwrap();
        assert_eq!(monomial_string(3, &e), "z21*z31");
        assert_eq!(c, int(-1));
        assert!(VarOrder::new(3, vec![Var::new(2, 1)]).is_err());
    }

    #[test]
    fn determinant_of_small_matrices() {
        let n = 3;
        let c = |v: i64| MultiPoly::constant(n, int(v));
        let m = vec![
            vec![c(1), c(1), c(0)],
            vec![c(0), z(2, 1), c(1)],
            vec![c(0), z(3, 1), z(3, 2)],
        ];
        assert_eq!(determinant(n, &m).to_string(), "z21*z32 - z31");
        let numeric = vec![
            vec![c(2), c(0), c(1)],
            vec![c(1), c(3), c(2)],
            vec![c(1), c(1), c(1)],
        ];
        // 2(3-2) - 0 + 1(1-3) = 0.
        assert!(determinant(n, &numeric).is_zero());
    }
}
