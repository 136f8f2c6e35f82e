//! The gap sequence `a_i = (1/alpha)^(v2(i))` and its partial sums.
//!
//! `a_i`, scaled by `alpha^(k-1) (1 - 2 alpha)`, is the length of the gap
//! between the intervals of gamma-order i and i+1, which yields a second,
//! summation-based route to the word distance rho.

use crate::alpha::{Alpha, Rat};
use crate::error::{Error, Result};
use crate::exact::ExactDistance;
use crate::words::Word;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// One term of the gap sequence: `a_i = (1/alpha)^j` where `i = 2^j (2m+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapTerm {
    pub i: u64,
    /// Dyadic valuation of i.
    pub j: u32,
}

impl GapTerm {
    pub fn eval_rat(&self, alpha: &Alpha) -> Rat {
        Rat::new(
            BigInt::from(alpha.denom()).pow(self.j),
            BigInt::from(alpha.numer()).pow(self.j),
        )
    }

    pub fn eval_f64(&self, alpha: &Alpha) -> f64 {
        (1.0 / alpha.to_f64()).powi(self.j as i32)
    }
}

/// The i-th gap term; the index is 1-based.
pub fn gap(i: u64) -> Result<GapTerm> {
    if i == 0 {
        return Err(Error::GapIndexZero);
    }
    Ok(GapTerm {
        i,
        j: i.trailing_zeros(),
    })
}

/// Partial sum `A(m, n) = a_m + ... + a_(m+n-1)` kept exactly as counts of
/// each power of 1/alpha.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapSum {
    pub m: u64,
    pub n: u64,
    /// counts[j] = number of indices in [m, m+n) with dyadic valuation j.
    counts: Vec<u64>,
}

impl GapSum {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Exact value `sum counts[j] (1/alpha)^j`.
    pub fn eval_rat(&self, alpha: &Alpha) -> Rat {
        let p = BigInt::from(alpha.numer());
        let q = BigInt::from(alpha.denom());
        let mut acc = Rat::zero();
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for &c in &self.counts {
            if c != 0 {
                acc += Rat::new(BigInt::from(c) * &num, den.clone());
            }
            num *= &q;
            den *= &p;
        }
        acc
    }

    pub fn eval_f64(&self, alpha: &Alpha) -> f64 {
        let r = 1.0 / alpha.to_f64();
        let mut acc = 0.0;
        let mut pw = 1.0;
        for &c in &self.counts {
            acc += c as f64 * pw;
            pw *= r;
        }
        acc
    }

    /// `alpha^(k-1) * A(m, n)` as an integer-coefficient polynomial in alpha.
    /// Requires every valuation in the sum to be at most k-1, which holds
    /// whenever the summed indices stay below 2^k.
    pub fn to_poly_scaled(&self, k: u32) -> ExactDistance {
        let mut coeffs = vec![0i64; k as usize];
        for (j, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                assert!(
                    (j as u32) < k,
                    "valuation {j} too large for scale alpha^{}",
                    k - 1
                );
                coeffs[(k - 1) as usize - j] += c as i64;
            }
        }
        ExactDistance::from_coeffs(coeffs)
    }
}

/// `A(m, n)` by dyadic counting: the number of indices in [m, m+n) with
/// valuation exactly j is the count of multiples of 2^j minus the count of
/// multiples of 2^(j+1). O(log(m+n)) regardless of n.
pub fn gap_sum(m: u64, n: u64) -> Result<GapSum> {
    if m == 0 {
        return Err(Error::GapIndexZero);
    }
    let lo = m;
    let hi = m + n; // exclusive
    let multiples = |p: u32| -> u64 {
        if p >= 64 {
            return 0;
        }
        let step = 1u64 << p;
        (hi - 1) / step - (lo - 1) / step
    };
    let mut counts = Vec::new();
    if n > 0 {
        let max_j = 63 - hi.leading_zeros();
        for j in 0..=max_j {
            counts.push(multiples(j) - multiples(j + 1));
        }
        while counts.last() == Some(&0) {
            counts.pop();
        }
    }
    Ok(GapSum { m, n, counts })
}

/// `A(m, n)` by direct summation; the O(n) reference route.
pub fn gap_sum_direct(m: u64, n: u64) -> Result<GapSum> {
    if m == 0 {
        return Err(Error::GapIndexZero);
    }
    let mut counts = Vec::new();
    for i in m..m + n {
        let j = i.trailing_zeros() as usize;
        if counts.len() <= j {
            counts.resize(j + 1, 0);
        }
        counts[j] += 1;
    }
    while counts.last() == Some(&0) {
        counts.pop();
    }
    Ok(GapSum { m, n, counts })
}

/// Word distance through the gap sequence: for gamma(u) <= gamma(v),
/// `rho(u, v) = (gamma(v) - gamma(u)) alpha^k
///            + alpha^(k-1) (1 - 2 alpha) A(gamma(u), gamma(v) - gamma(u))`.
/// Returns the same exact polynomial as `Word::rho`.
pub fn rho_gap(u: &Word, v: &Word) -> Result<ExactDistance> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    let k = u.len() as u32;
    let (gu, gv) = (u.gamma()?, v.gamma()?);
    let (lo, hi) = if gu <= gv { (gu, gv) } else { (gv, gu) };
    if lo == hi {
        return Ok(ExactDistance::zero());
    }
    let steps = ExactDistance::monomial((hi - lo) as i64, k);
    let gaps = gap_sum(lo, hi - lo)?.to_poly_scaled(k).mul_linear(1, -2);
    Ok(&steps + &gaps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::rat;

    #[test]
    fn gap_examples() {
        let a = Alpha::new(1, 3).unwrap();
        assert_eq!(gap(1).unwrap().eval_rat(&a), rat(1, 1));
        assert_eq!(gap(4).unwrap().eval_rat(&a), rat(9, 1));
        assert_eq!(gap(6).unwrap().eval_rat(&a), rat(3, 1));
        assert!(gap(0).is_err());
    }

    #[test]
    fn gap_sum_examples() {
        let a = Alpha::new(1, 3).unwrap();
        assert!(gap_sum(7, 0).unwrap().eval_rat(&a).is_zero());
        // a1 + a2 + a3 = 1 + 3 + 1
        assert_eq!(gap_sum(1, 3).unwrap().eval_rat(&a), rat(5, 1));
    }

    #[test]
    fn fast_and_direct_agree() {
        for m in 1..=300u64 {
            for n in [0, 1, 2, 3, 17, 64, 100] {
                assert_eq!(gap_sum(m, n).unwrap(), gap_sum_direct(m, n).unwrap());
            }
        }
    }

    #[test]
    fn shift_identity() {
        // a_s = a_(h 2^m +/- s) for 1 <= s < 2^m
        for m in 1..=10u32 {
            for h in 0..=8u64 {
                if h == 0 {
                    continue;
                }
                let base = h << m;
                for s in 1..(1u64 << m).min(200) {
                    let a_s = gap(s).unwrap().j;
                    assert_eq!(a_s, gap(base + s).unwrap().j);
                    assert_eq!(a_s, gap(base - s).unwrap().j);
                }
            }
        }
    }

    #[test]
    fn first_sum_is_minimal() {
        // A(1, n) <= A(s, n)
        for alpha in [Alpha::new(1, 5), Alpha::new(1, 3), Alpha::new(2, 5)] {
            let alpha = alpha.unwrap();
            for n in 1..=128u64 {
                let first = gap_sum(1, n).unwrap().eval_rat(&alpha);
                for s in 1..=128u64 {
                    assert!(first <= gap_sum(s, n).unwrap().eval_rat(&alpha));
                }
            }
        }
    }

    #[test]
    fn power_of_two_start_is_maximal() {
        // A(2^m, n - 2^m) >= A(2^m + t 2^s - h, n - 2^m)
        let alpha = Alpha::new(1, 3).unwrap();
        for s in 1..=7u32 {
            for m in 0..s {
                let start = 1u64 << m;
                for n in (start + 1)..=(1u64 << s) {
                    let reference = gap_sum(start, n - start).unwrap().eval_rat(&alpha);
                    for t in 0..=2u64 {
                        for h in 0..start {
                            let shifted = start + t * (1u64 << s) - h;
                            let val = gap_sum(shifted, n - start).unwrap().eval_rat(&alpha);
                            assert!(reference >= val, "m={m} s={s} t={t} h={h} n={n}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rho_gap_equals_rho_as_polynomials() {
        for k in 1..=8usize {
            for u in Word::all(k) {
                for v in Word::all(k) {
                    assert_eq!(rho_gap(&u, &v).unwrap(), u.rho(&v).unwrap());
                }
            }
        }
    }

    #[test]
    fn rho_gap_worked_example() {
        let a = Alpha::new(1, 3).unwrap();
        let u: Word = "000".parse().unwrap();
        let v: Word = "010".parse().unwrap();
        // 2 a^3 + a^2 (1-2a) (a1 + a2) = 2/9
        assert_eq!(rho_gap(&u, &v).unwrap().eval_rat(&a), rat(2, 9));
    }
}
