//! The map parameter `alpha`: an exact rational strictly inside (0, 1/2).

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use std::fmt;
use std::str::FromStr;

/// Exact rational threshold/value type used throughout the crate.
pub type Rat = Ratio<BigInt>;

pub fn rat(num: i64, den: i64) -> Rat {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

/// The slope parameter of the map family, an exact rational in (0, 1/2),
/// stored in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alpha {
    num: u64,
    den: u64,
}

impl Alpha {
    /// Builds an alpha from a fraction, reducing to lowest terms.
    /// Fails unless 0 < num/den < 1/2.
    pub fn new(num: u64, den: u64) -> Result<Alpha> {
        if den == 0 {
            return Err(Error::ZeroDenominator(format!("{num}/{den}")));
        }
        if num == 0 || 2 * num >= den {
            return Err(Error::AlphaOutOfRange(format!("{num}/{den}")));
        }
        let g = num.gcd(&den);
        Ok(Alpha {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_rat(&self) -> Rat {
        rat(self.num as i64, self.den as i64)
    }

    /// alpha^j as an exact rational.
    pub fn pow(&self, j: u32) -> Rat {
        Ratio::new(BigInt::from(self.num).pow(j), BigInt::from(self.den).pow(j))
    }

    /// 1 - 2*alpha, exact. Positive by the domain restriction.
    pub fn one_minus_two(&self) -> Rat {
        rat(self.den as i64 - 2 * self.num as i64, self.den as i64)
    }

    /// 1 - alpha, exact.
    pub fn one_minus(&self) -> Rat {
        rat(self.den as i64 - self.num as i64, self.den as i64)
    }
}

impl FromStr for Alpha {
    type Err = Error;

    /// Accepts `p/q` or a decimal literal such as `0.35` (converted exactly).
    fn from_str(s: &str) -> Result<Alpha> {
        let s = s.trim();
        let parse_err = || Error::Parse {
            what: "alpha",
            input: s.to_string(),
        };
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p.trim().parse().map_err(|_| parse_err())?;
            let q: u64 = q.trim().parse().map_err(|_| parse_err())?;
            return Alpha::new(p, q);
        }
        if let Some((int, frac)) = s.split_once('.') {
            let int: u64 = if int.is_empty() {
                0
            } else {
                int.parse().map_err(|_| parse_err())?
            };
            if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(parse_err());
            }
            let scale = 10u64.pow(frac.len() as u32);
            let frac_val: u64 = frac.parse().map_err(|_| parse_err())?;
            let num = int
                .checked_mul(scale)
                .and_then(|v| v.checked_add(frac_val))
                .ok_or_else(parse_err)?;
            return Alpha::new(num, scale);
        }
        let p: u64 = s.parse().map_err(|_| parse_err())?;
        Alpha::new(p, 1)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_interior_rationals() {
        let a = Alpha::new(1, 3).unwrap();
        assert_eq!((a.numer(), a.denom()), (1, 3));
        let a = Alpha::new(2, 6).unwrap();
        assert_eq!((a.numer(), a.denom()), (1, 3));
    }

    #[test]
    fn rejects_boundary_and_outside() {
        assert!(Alpha::new(0, 3).is_err());
        assert!(Alpha::new(1, 2).is_err());
        assert!(Alpha::new(3, 5).is_err());
        assert!(Alpha::new(1, 0).is_err());
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("1/3".parse::<Alpha>().unwrap(), Alpha::new(1, 3).unwrap());
        assert_eq!("0.2".parse::<Alpha>().unwrap(), Alpha::new(1, 5).unwrap());
        assert_eq!("0.35".parse::<Alpha>().unwrap(), Alpha::new(7, 20).unwrap());
        assert_eq!(".25".parse::<Alpha>().unwrap(), Alpha::new(1, 4).unwrap());
        assert!("3/5".parse::<Alpha>().is_err());
        assert!("0.5".parse::<Alpha>().is_err());
        assert!("abc".parse::<Alpha>().is_err());
    }

    #[test]
    fn exact_helpers() {
        let a = Alpha::new(1, 3).unwrap();
        assert_eq!(a.pow(2), rat(1, 9));
        assert_eq!(a.one_minus(), rat(2, 3));
        assert_eq!(a.one_minus_two(), rat(1, 3));
    }
}
