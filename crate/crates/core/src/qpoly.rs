//! Integer polynomials in the half-degree variable `t = q^2`, plus the
//! q-integers and q-factorials.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense polynomial `c_0 + c_1 t + ...` with no trailing zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<i64>", into = "Vec<i64>")]
pub struct BettiPolynomial {
    coeffs: Vec<i64>,
}

pub type QPolynomial = BettiPolynomial;

impl From<Vec<i64>> for BettiPolynomial {
    fn from(coeffs: Vec<i64>) -> Self {
        BettiPolynomial::from_coeffs(coeffs)
    }
}

impl From<BettiPolynomial> for Vec<i64> {
    fn from(p: BettiPolynomial) -> Self {
        p.coeffs
    }
}

impl BettiPolynomial {
    pub fn from_coeffs(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        BettiPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        BettiPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        BettiPolynomial { coeffs: vec![1] }
    }

    /// `c t^k`.
    pub fn monomial(k: usize, c: i64) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c;
        BettiPolynomial::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> i64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn scale(&self, c: i64) -> Self {
        BettiPolynomial::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        BettiPolynomial { coeffs }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(BettiPolynomial::one(), |acc, _| &acc * self)
    }

    /// Value at an integer point, exactly.
    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, &c| acc * t + BigInt::from(c))
    }

    pub fn eval_u64(&self, t: u64) -> BigInt {
        self.eval(&BigInt::from(t))
    }

    /// Value at `t = 1`.
    pub fn sum_of_coeffs(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    /// Renders in `q`, doubling every exponent.
    pub fn render_q(&self) -> String {
        render(&self.coeffs, "q", 2)
    }

    /// Coefficients in `q` (odd positions zero).
    pub fn q_coeffs(&self) -> Vec<i64> {
        let mut out = vec![0; (2 * self.coeffs.len()).saturating_sub(1)];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[2 * k] = c;
        }
        out
    }
}

fn superscript(mut k: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let mut out = Vec::new();
    loop {
        out.push(DIGITS[k % 10]);
        k /= 10;
        if k == 0 {
            break;
        }
    }
    out.iter().rev().collect()
}

fn render(coeffs: &[i64], var: &str, stride: usize) -> String {
    let mut out = String::new();
    for (k, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let e = k * stride;
        if c < 0 {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        let a = c.unsigned_abs();
        if e == 0 || a != 1 {
            out.push_str(&a.to_string());
        }
        if e >= 1 {
            out.push_str(var);
        }
        if e >= 2 {
            out.push_str(&superscript(e));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for BettiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.coeffs, "t", 1))
    }
}

impl fmt::Debug for BettiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn from_superscript(c: char) -> Option<u32> {
    "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().position(|d| d == c).map(|i| i as u32)
}

impl FromStr for BettiPolynomial {
    type Err = Error;

    /// Parses strings such as `1+2t+t²`, `1 + 2t + t^2` or `3 - t^4`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::invalid(format!("bad polynomial {s:?}: {msg}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut coeffs: Vec<i64> = Vec::new();
        let chars: Vec<char> = compact.chars().collect();
        let mut pos = 0;
        while pos < chars.len() {
            let mut sign = 1i64;
            if chars[pos] == '+' || chars[pos] == '-' {
                if chars[pos] == '-' {
                    sign = -1;
                }
                pos += 1;
            } else if pos != 0 {
                return Err(bad("expected '+' or '-'"));
            }
            let start = pos;
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            let digits: String = chars[start..pos].iter().collect();
            let has_var = pos < chars.len() && chars[pos] == 't';
            if digits.is_empty() && !has_var {
                return Err(bad("missing term"));
            }
            let c: i64 = if digits.is_empty() {
                1
            } else {
                digits.parse().map_err(|_| bad("coefficient overflow"))?
            };
            if pos < chars.len() && chars[pos] == '*' {
                pos += 1;
            }
            let mut e = 0usize;
            if pos < chars.len() && chars[pos] == 't' {
                pos += 1;
                e = 1;
                if pos < chars.len() && chars[pos] == '^' {
                    pos += 1;
                    let st = pos;
                    while pos < chars.len() && chars[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let ds: String = chars[st..pos].iter().collect();
                    e = ds.parse().map_err(|_| bad("bad exponent"))?;
                } else if pos < chars.len() && from_superscript(chars[pos]).is_some() {
                    e = 0;
                    while let Some(d) = chars.get(pos).and_then(|&c| from_superscript(c)) {
                        e = e * 10 + d as usize;
                        pos += 1;
                    }
                }
            }
            if coeffs.len() <= e {
                coeffs.resize(e + 1, 0);
            }
            coeffs[e] += sign * c;
        }
        Ok(BettiPolynomial::from_coeffs(coeffs))
    }
}

impl Add for &BettiPolynomial {
    type Output = BettiPolynomial;
    fn add(self, rhs: &BettiPolynomial) -> BettiPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        BettiPolynomial::from_coeffs((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &BettiPolynomial {
    type Output = BettiPolynomial;
    fn sub(self, rhs: &BettiPolynomial) -> BettiPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        BettiPolynomial::from_coeffs((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &BettiPolynomial {
    type Output = BettiPolynomial;
    fn mul(self, rhs: &BettiPolynomial) -> BettiPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return BettiPolynomial::zero();
        }
        let mut out = vec![0i64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        BettiPolynomial::from_coeffs(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BettiPolynomial {
            type Output = BettiPolynomial;
            fn $m(self, rhs: BettiPolynomial) -> BettiPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::iter::Sum for BettiPolynomial {
    fn sum<I: Iterator<Item = BettiPolynomial>>(iter: I) -> Self {
        iter.fold(BettiPolynomial::zero(), |a, b| &a + &b)
    }
}

/// `[n]_t = 1 + t + ... + t^{n-1}`; `[0]_t = 0`.
pub fn q_int(n: usize) -> BettiPolynomial {
    BettiPolynomial::from_coeffs(vec![1; n])
}

/// `[n]_t! = [1]_t [2]_t ... [n]_t`; `[0]_t! = 1`.
pub fn q_factorial(n: usize) -> BettiPolynomial {
    (1..=n).fold(BettiPolynomial::one(), |acc, k| &acc * &q_int(k))
}

/// `[n]_p!` as an exact integer.
pub fn q_factorial_at(n: usize, p: u64) -> BigInt {
    let p = BigInt::from(p);
    let mut acc = BigInt::one();
    let mut qint = BigInt::zero();
    let mut power = BigInt::one();
    for _ in 1..=n {
        qint += &power;
        power *= &p;
        acc *= &qint;
    }
    acc
}
