//! Exact carrier for distances: integer-coefficient polynomials in alpha.
//!
//! Every word distance in this crate is a polynomial in alpha with small
//! integer coefficients, so comparisons at a rational alpha can be decided
//! exactly. The fast path evaluates both sides in f64 and only falls back
//! to rational arithmetic inside a guard band around the tie.

use crate::alpha::{Alpha, Rat};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Width of the float guard band. Differences smaller than this are decided
/// by exact rational evaluation.
pub const FLOAT_GUARD: f64 = 1e-9;

/// A distance value represented exactly as `sum c_j * alpha^j` with integer
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExactDistance {
    coeffs: Vec<i64>,
}

impl ExactDistance {
    pub fn zero() -> ExactDistance {
        ExactDistance { coeffs: vec![] }
    }

    pub fn constant(c: i64) -> ExactDistance {
        ExactDistance { coeffs: vec![c] }.trimmed()
    }

    /// The monomial `c * alpha^j`.
    pub fn monomial(c: i64, j: u32) -> ExactDistance {
        let mut coeffs = vec![0i64; j as usize + 1];
        coeffs[j as usize] = c;
        ExactDistance { coeffs }.trimmed()
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> ExactDistance {
        ExactDistance { coeffs }.trimmed()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn trimmed(mut self) -> ExactDistance {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        self
    }

    /// Multiplies by `alpha^j` (shifts all exponents up).
    pub fn shift_up(&self, j: u32) -> ExactDistance {
        if self.is_zero() {
            return ExactDistance::zero();
        }
        let mut coeffs = vec![0i64; self.coeffs.len() + j as usize];
        coeffs[j as usize..].copy_from_slice(&self.coeffs);
        ExactDistance { coeffs }
    }

    /// Multiplies by the linear factor `a + b*alpha`.
    pub fn mul_linear(&self, a: i64, b: i64) -> ExactDistance {
        let mut coeffs = vec![0i64; self.coeffs.len() + 1];
        for (j, &c) in self.coeffs.iter().enumerate() {
            coeffs[j] += a * c;
            coeffs[j + 1] += b * c;
        }
        ExactDistance { coeffs }.trimmed()
    }

    pub fn scale(&self, c: i64) -> ExactDistance {
        ExactDistance {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
        .trimmed()
    }

    /// Horner evaluation in f64.
    pub fn eval_f64(&self, alpha: &Alpha) -> f64 {
        let a = alpha.to_f64();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * a + c as f64)
    }

    /// Exact rational evaluation at the given alpha.
    pub fn eval_rat(&self, alpha: &Alpha) -> Rat {
        let p = BigInt::from(alpha.numer());
        let q = BigInt::from(alpha.denom());
        // sum c_j p^j q^(d-j) / q^d
        let d = self.coeffs.len();
        if d == 0 {
            return Rat::zero();
        }
        let mut num = BigInt::zero();
        let mut p_pow = BigInt::from(1);
        let mut q_pows = vec![BigInt::from(1); d];
        for j in (0..d - 1).rev() {
            q_pows[j] = &q_pows[j + 1] * &q;
        }
        for (j, &c) in self.coeffs.iter().enumerate() {
            num += BigInt::from(c) * &p_pow * &q_pows[j];
            p_pow *= &p;
        }
        Rat::new(num, q.pow(d as u32 - 1))
    }

    /// Compares two distances at a rational alpha: float fast path with an
    /// exact fallback inside the guard band.
    pub fn cmp_at(&self, other: &ExactDistance, alpha: &Alpha) -> Ordering {
        let diff = self - other;
        diff.sign_at(alpha)
    }

    /// Sign of the polynomial value at alpha, decided exactly at the boundary.
    pub fn sign_at(&self, alpha: &Alpha) -> Ordering {
        let approx = self.eval_f64(alpha);
        if approx > FLOAT_GUARD {
            return Ordering::Greater;
        }
        if approx < -FLOAT_GUARD {
            return Ordering::Less;
        }
        let exact = self.eval_rat(alpha);
        if exact.is_zero() {
            Ordering::Equal
        } else if exact.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    /// `self <= bound` at alpha, with bound given as an exact rational.
    pub fn le_rat(&self, bound: &Rat, alpha: &Alpha) -> bool {
        let approx = self.eval_f64(alpha);
        let b = rat_to_f64(bound);
        if approx < b - FLOAT_GUARD {
            return true;
        }
        if approx > b + FLOAT_GUARD {
            return false;
        }
        self.eval_rat(alpha) <= *bound
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // num-rational's to_f64 goes through i64 and saturates on big values;
    // string round-trip keeps ~17 digits which is plenty here.
    let n = r.numer();
    let d = r.denom();
    if let (Some(nf), Some(df)) = (to_f64_checked(n), to_f64_checked(d)) {
        return nf / df;
    }
    // widen via f64 parsing of the decimal expansion
    let s = format!("{}", r);
    let parts: Vec<&str> = s.split('/').collect();
    let nf: f64 = parts[0].parse().unwrap_or(f64::NAN);
    let df: f64 = parts.get(1).map_or(1.0, |p| p.parse().unwrap_or(f64::NAN));
    nf / df
}

fn to_f64_checked(x: &BigInt) -> Option<f64> {
    use num_traits::ToPrimitive;
    x.to_f64().filter(|f| f.is_finite())
}

impl Add for &ExactDistance {
    type Output = ExactDistance;
    fn add(self, rhs: &ExactDistance) -> ExactDistance {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![0i64; n];
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeffs.get(j).copied().unwrap_or(0) + rhs.coeffs.get(j).copied().unwrap_or(0);
        }
        ExactDistance { coeffs }.trimmed()
    }
}

impl Sub for &ExactDistance {
    type Output = ExactDistance;
    fn sub(self, rhs: &ExactDistance) -> ExactDistance {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![0i64; n];
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeffs.get(j).copied().unwrap_or(0) - rhs.coeffs.get(j).copied().unwrap_or(0);
        }
        ExactDistance { coeffs }.trimmed()
    }
}

impl Neg for &ExactDistance {
    type Output = ExactDistance;
    fn neg(self) -> ExactDistance {
        self.scale(-1)
    }
}

impl fmt::Display for ExactDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0 { "-" } else { "+" })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            let mag = c.unsigned_abs();
            match j {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != 1 {
                        write!(f, "{mag}*")?;
                    }
                    if j == 1 {
                        write!(f, "a")?;
                    } else {
                        write!(f, "a^{j}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}
