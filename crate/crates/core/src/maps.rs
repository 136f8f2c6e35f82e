//! The interval maps: the limit map `f` and its periodic approximations
//! `f_k`, plus the nested interval system addressed by words.
//!
//! `f` is piecewise linear with countably many slope-one branches
//! accumulating at 1, joined by steep decreasing connectors. `f_k` agrees
//! with `f` up to the k-th branch and closes the cycle with one last
//! slope-one piece, which makes every point of the k-th interval system
//! 2^k-periodic.

use crate::alpha::{Alpha, Rat};
use crate::error::{Error, Result};
use crate::exact::ExactDistance;
use crate::words::Word;
use num_traits::{One, Signed, Zero};

/// Default cap on the branch search; branches shrink geometrically so the
/// cap is only reachable for points within alpha^cap of 1.
pub const BRANCH_CAP: u32 = 64;

fn check_unit_interval(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain(format!("x = {x} outside [0, 1]")));
    }
    Ok(())
}

/// The limit map of the family.
#[derive(Debug, Clone, Copy)]
pub struct DelahayeMap {
    alpha: Alpha,
    branch_cap: u32,
}

impl DelahayeMap {
    pub fn new(alpha: Alpha) -> DelahayeMap {
        DelahayeMap {
            alpha,
            branch_cap: BRANCH_CAP,
        }
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }

    /// Float evaluation. Branch j is located by iterating powers of alpha,
    /// no logarithms involved; x within 1e-15 of 1 is treated as 1.
    pub fn eval(&self, x: f64) -> Result<f64> {
        check_unit_interval(x)?;
        if x >= 1.0 - 1e-15 {
            return Ok(0.0);
        }
        let a = self.alpha.to_f64();
        // find j >= 1 with 1 - a^(j-1) <= x < 1 - a^j
        let mut pow_prev = 1.0; // a^(j-1)
        for _ in 1..=self.branch_cap {
            let pow = pow_prev * a; // a^j
            if x < 1.0 - pow {
                return Ok(if x <= 1.0 - pow_prev + pow {
                    // translation branch
                    x - 1.0 + 2.0 * pow_prev - pow
                } else {
                    // decreasing connector between branch j and branch j+1
                    let two_a = 2.0 * a - 1.0;
                    (1.0 - a + a * a) / two_a * (x - 1.0) + pow * a * (2.0 - a) / two_a
                });
            }
            pow_prev = pow;
        }
        Err(Error::BranchCapExceeded {
            cap: self.branch_cap,
        })
    }

    /// Exact rational evaluation of the same piecewise definition.
    pub fn eval_rat(&self, x: &Rat) -> Result<Rat> {
        if x.is_negative() || x > &Rat::one() {
            return Err(Error::OutOfDomain(format!("x = {x} outside [0, 1]")));
        }
        if x == &Rat::one() {
            return Ok(Rat::zero());
        }
        let a = self.alpha.to_rat();
        let one = Rat::one();
        let mut pow_prev = Rat::one();
        for _ in 1..=self.branch_cap {
            let pow = &pow_prev * &a;
            if *x < &one - &pow {
                if *x <= &one - &pow_prev + &pow {
                    return Ok(x - &one + Rat::from_integer(2.into()) * &pow_prev - &pow);
                }
                let two_a = Rat::from_integer(2.into()) * &a - &one;
                let slope = (&one - &a + &a * &a) / &two_a;
                return Ok(
                    slope * (x - &one) + &pow * &a * (Rat::from_integer(2.into()) - &a) / &two_a
                );
            }
            pow_prev = pow;
        }
        Err(Error::BranchCapExceeded {
            cap: self.branch_cap,
        })
    }
}

/// The k-th approximation map; `k = 0` is the identity.
#[derive(Debug, Clone, Copy)]
pub struct ApproxMap {
    alpha: Alpha,
    k: u32,
}

impl ApproxMap {
    pub fn new(alpha: Alpha, k: u32) -> ApproxMap {
        ApproxMap { alpha, k }
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Float evaluation: equal to `f` on [0, 1 - a^(k-1) + a^k], equal to
    /// `x - 1 + a^k` on [1 - a^k, 1], linear between.
    pub fn eval(&self, x: f64) -> Result<f64> {
        check_unit_interval(x)?;
        if self.k == 0 {
            return Ok(x);
        }
        let a = self.alpha.to_f64();
        let ak1 = a.powi(self.k as i32 - 1);
        let ak = ak1 * a;
        if x <= 1.0 - ak1 + ak {
            return DelahayeMap::new(self.alpha).eval(x);
        }
        if x >= 1.0 - ak {
            return Ok(x - 1.0 + ak);
        }
        // connector from (1 - a^(k-1) + a^k, a^(k-1)) down to (1 - a^k, 0)
        Ok((1.0 - ak - x) * ak1 / (ak1 - 2.0 * ak))
    }

    /// Exact rational evaluation.
    pub fn eval_rat(&self, x: &Rat) -> Result<Rat> {
        if x.is_negative() || x > &Rat::one() {
            return Err(Error::OutOfDomain(format!("x = {x} outside [0, 1]")));
        }
        if self.k == 0 {
            return Ok(x.clone());
        }
        let one = Rat::one();
        let ak1 = self.alpha.pow(self.k - 1);
        let ak = self.alpha.pow(self.k);
        if *x <= &one - &ak1 + &ak {
            return DelahayeMap::new(self.alpha).eval_rat(x);
        }
        if *x >= &one - &ak {
            return Ok(x - &one + &ak);
        }
        let two = Rat::from_integer(2.into());
        Ok((&one - &ak - x) * &ak1 / (&ak1 - two * &ak))
    }

    /// One exact step on the symbolic skeleton: `kappa(v)` maps to
    /// `kappa(v add_lr 1)` for every word v of length k.
    pub fn step_word(&self, v: &Word) -> Result<Word> {
        if v.len() != self.k as usize {
            return Err(Error::LengthMismatch {
                left: v.len(),
                right: self.k as usize,
            });
        }
        Ok(v.add_lr_n(1))
    }
}

/// Either map, for orbit generation.
#[derive(Debug, Clone, Copy)]
pub enum Map {
    Limit(DelahayeMap),
    Approx(ApproxMap),
}

impl Map {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Map::Limit(m) => m.eval(x),
            Map::Approx(m) => m.eval(x),
        }
    }

    pub fn eval_rat(&self, x: &Rat) -> Result<Rat> {
        match self {
            Map::Limit(m) => m.eval_rat(x),
            Map::Approx(m) => m.eval_rat(x),
        }
    }
}

/// `[x, f(x), ..., f^(n-1)(x)]` in floats.
pub fn orbit(map: &Map, x: f64, n: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    let mut cur = x;
    for i in 0..n {
        if i > 0 {
            cur = map.eval(cur)?;
        }
        out.push(cur);
    }
    Ok(out)
}

/// Exact orbit in rationals.
pub fn orbit_rat(map: &Map, x: &Rat, n: usize) -> Result<Vec<Rat>> {
    let mut out = Vec::with_capacity(n);
    let mut cur = x.clone();
    for i in 0..n {
        if i > 0 {
            cur = map.eval_rat(&cur)?;
        }
        out.push(cur.clone());
    }
    Ok(out)
}

/// The compact interval `I(u) = [kappa(u), kappa(u) + alpha^|u|]`.
#[derive(Debug, Clone)]
pub struct IntervalU {
    pub u: Word,
    pub left: ExactDistance,
    pub right: ExactDistance,
}

pub fn interval_of(u: &Word) -> IntervalU {
    let left = u.kappa();
    let right = &left + &ExactDistance::monomial(1, u.len() as u32);
    IntervalU { u: *u, left, right }
}

/// Finds the depth-k word whose interval contains x, or None when x falls
/// in a gap (outside the k-th interval system). Float comparisons carry a
/// 1e-12 tolerance so exact endpoints land inside.
pub fn locate(x: f64, k: usize, alpha: &Alpha) -> Result<Option<Word>> {
    check_unit_interval(x)?;
    let a = alpha.to_f64();
    let tol = 1e-12;
    let mut u = Word::EMPTY;
    let mut left = 0.0;
    let mut scale = 1.0; // alpha^depth
    for _ in 0..k {
        // inside I(u): the two children occupy [0, a] and [1-a, 1] of it
        let t = (x - left) / scale;
        if t <= a + tol {
            u = u.concat(&"0".parse().unwrap())?;
        } else if t >= 1.0 - a - tol {
            u = u.concat(&"1".parse().unwrap())?;
            left += scale * (1.0 - a);
        } else {
            return Ok(None);
        }
        scale *= a;
    }
    Ok(Some(u))
}

/// The unique fixed point of `f` (period 1, in the top-level gap):
/// `(1 - alpha^2) / (2 - alpha)` on the first connector.
pub fn fixed_point(alpha: &Alpha) -> Rat {
    let a = alpha.to_rat();
    let one = Rat::one();
    (&one - &a * &a) / (Rat::from_integer(2.into()) - &a)
}

/// Locates the unique 2^k-periodic point of `f` inside I(0^k) by bisection
/// on `f^(2^k)(x) - x`. Certified only to float accuracy `tol`.
pub fn periodic_point(alpha: &Alpha, k: u32, tol: f64) -> Result<f64> {
    let map = DelahayeMap::new(*alpha);
    let n = 1u64 << k;
    let iterate = |x: f64| -> Result<f64> {
        let mut cur = x;
        for _ in 0..n {
            cur = map.eval(cur)?;
        }
        Ok(cur)
    };
    let mut lo = 0.0f64;
    let mut hi = alpha.to_f64().powi(k as i32);
    // g(0) > 0, g(alpha^k) < 0
    let mut g_lo = iterate(lo)? - lo;
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo < tol {
            return Ok(mid);
        }
        let g_mid = iterate(mid)? - mid;
        if (g_mid >= 0.0) == (g_lo >= 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
}
