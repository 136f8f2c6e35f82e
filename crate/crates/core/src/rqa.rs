//! Recurrence quantification on finite orbits and exact correlation
//! integrals.
//!
//! Finite-orbit statistics (correlation sum, recurrence rate, determinism)
//! are exact rational counts. Integrals for the approximation maps come
//! from the distance-matrix counting shortcuts; integrals for the limit
//! map carry certified error radii from the approximation bounds.

use crate::alpha::{Alpha, Rat};
use crate::distmatrix::{self, Ell};
use crate::error::{Error, Result};
use crate::exact::rat_to_f64;
use crate::words::Word;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

// ---------------------------------------------------------------------------
// Finite orbits
// ---------------------------------------------------------------------------

/// A finite trajectory with enough structure to answer one-step closeness
/// queries exactly (symbolic orbits) or in floats (real seeds).
pub enum Orbit {
    /// Orbit of kappa(start) under the |start|-th approximation map;
    /// 2^|start|-periodic, distances exact.
    Symbolic { alpha: Alpha, start: Word },
    /// A float trajectory (no known period).
    Real { points: Vec<f64> },
}

impl Orbit {
    pub fn symbolic(alpha: Alpha, start: Word) -> Orbit {
        Orbit::Symbolic { alpha, start }
    }

    pub fn period(&self) -> Option<u64> {
        match self {
            Orbit::Symbolic { start, .. } => Some(1u64 << start.len()),
            Orbit::Real { .. } => None,
        }
    }
}

/// How the sup-distance treats steps beyond the sampled window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizonMode {
    /// The horizon is truncated at the end of the n-sample (finite
    /// recurrence-plot convention).
    Windowed,
    /// Steps continue along the periodic extension of the orbit
    /// (trajectory convention; symbolic orbits only).
    Periodic,
}

/// One-step closeness of orbit positions, prepared per index difference.
struct Closeness {
    period: Option<usize>,
    /// table[d][i] = close(i, i+d).
    table: Vec<Vec<bool>>,
}

impl Closeness {
    fn build(orbit: &Orbit, n: usize, eps: &Rat) -> Result<Closeness> {
        match orbit {
            Orbit::Symbolic { alpha, start } => {
                let k = start.len();
                if k == 0 {
                    return Err(Error::EmptyWord);
                }
                let p = 1usize << k;
                // scaled integer kappas by orbit position, with an f64
                // mirror so only near-tie pairs pay for exact comparison
                let q = BigInt::from(alpha.denom());
                let mult = eps.denom().clone();
                let bound = eps.numer() * q.pow(k as u32);
                let kap = scaled_kappa_by_position(*alpha, start, &mult);
                let kf: Vec<f64> = (0..p)
                    .map(|t| start.add_lr_n(t as u64).kappa().eval_f64(alpha))
                    .collect();
                let eps_f = rat_to_f64(eps);
                let close = |i: usize, j: usize| -> bool {
                    let d = (kf[i % p] - kf[j % p]).abs();
                    if d < eps_f - crate::exact::FLOAT_GUARD {
                        return true;
                    }
                    if d > eps_f + crate::exact::FLOAT_GUARD {
                        return false;
                    }
                    let (x, y) = (&kap[i % p], &kap[j % p]);
                    let diff = if x >= y { x - y } else { y - x };
                    !eps.is_negative() && diff <= bound
                };
                let mut table = Vec::with_capacity(p);
                for d in 0..p {
                    let ones: Vec<bool> = (0..p).map(|i| close(i, i + d)).collect();
                    table.push(ones);
                }
                Ok(Closeness {
                    period: Some(p),
                    table,
                })
            }
            Orbit::Real { points } => {
                if points.len() < n {
                    return Err(Error::OutOfDomain(format!(
                        "real orbit has {} points, needs {n}",
                        points.len()
                    )));
                }
                let eps_f = rat_to_f64(eps);
                let m = points.len();
                let mut table = Vec::with_capacity(m);
                for d in 0..m {
                    let ones: Vec<bool> = (0..m - d)
                        .map(|i| (points[i] - points[i + d]).abs() <= eps_f)
                        .collect();
                    table.push(ones);
                }
                Ok(Closeness {
                    period: None,
                    table,
                })
            }
        }
    }

    fn one(&self, d: usize, i: usize) -> bool {
        match self.period {
            Some(p) => self.table[d % p][i % p],
            None => self.table[d][i],
        }
    }
}

fn scaled_kappa_by_position(alpha: Alpha, start: &Word, mult: &BigInt) -> Vec<BigInt> {
    let k = start.len();
    let p = 1usize << k;
    let q = BigInt::from(alpha.numer());
    let qq = BigInt::from(alpha.denom());
    let mut digits = Vec::with_capacity(k);
    // digit of u_i: (den - num) num^(i-1) den^(k-i) * mult
    for i in 1..=k {
        digits.push((&qq - &q) * q.pow(i as u32 - 1) * qq.pow((k - i) as u32) * mult);
    }
    (0..p)
        .map(|t| {
            let w = start.add_lr_n(t as u64);
            let mut acc = BigInt::zero();
            for i in 1..=k {
                if w.bit(i) == 1 {
                    acc += &digits[i - 1];
                }
            }
            acc
        })
        .collect()
}

/// Per-diagonal counting of correlation pairs and recurrence pairs.
/// Returns (corr_count for ell, rr_count for ell).
fn diagonal_counts(closeness: &Closeness, n: u64, ell: Ell, mode: HorizonMode) -> (u64, u64) {
    let n = n as usize;
    let mut corr: u64 = 0;
    let mut rr: u64 = 0;
    for d in 0..n {
        let window = n - d; // starts i with both i, i+d < n
                            // available ones sequence
        let (limit, all_ones_cycle) = match (mode, closeness.period) {
            (HorizonMode::Periodic, Some(p)) => {
                let all = (0..p).all(|i| closeness.one(d, i));
                (window + p.min(ell_len(ell, p)), all)
            }
            _ => (window, false),
        };
        // run lengths to the right over [0, limit)
        let mut runs = vec![0u64; limit + 1];
        for i in (0..limit).rev() {
            runs[i] = if closeness.one(d, i) {
                1 + runs[i + 1]
            } else {
                0
            };
        }
        let need = |i: usize| -> u64 {
            // window-truncated horizon is min(ell, n - max(i, j)) = steps
            // available before the sample ends; periodic mode always has a
            // full period available
            match (mode, ell) {
                (HorizonMode::Windowed, Ell::Finite(l)) => l.min((n - (i + d)) as u64),
                (HorizonMode::Windowed, Ell::Inf) => (n - (i + d)) as u64,
                (HorizonMode::Periodic, Ell::Finite(l)) => l.min(closeness.period.unwrap() as u64),
                (HorizonMode::Periodic, Ell::Inf) => closeness.period.unwrap() as u64,
            }
        };
        // corr pairs on this diagonal
        let mut starts = vec![false; window];
        for (i, start_flag) in starts.iter_mut().enumerate() {
            let ok = if all_ones_cycle {
                true
            } else if mode == HorizonMode::Periodic && ell == Ell::Inf {
                false
            } else {
                runs[i] >= need(i)
            };
            *start_flag = ok;
        }
        let c = starts.iter().filter(|&&b| b).count() as u64;
        // recurrence pairs: position i is recurrent if some start within the
        // backtracking range is a full correlation start
        let back = match ell {
            Ell::Finite(l) => (l - 1) as usize,
            Ell::Inf => usize::MAX,
        };
        let mut last_start: Option<usize> = None;
        let mut r = 0u64;
        for (i, &flag) in starts.iter().enumerate() {
            if flag {
                last_start = Some(i);
            }
            if let Some(s) = last_start {
                if back == usize::MAX || i - s <= back {
                    r += 1;
                }
            }
        }
        let weight = if d == 0 { 1 } else { 2 };
        corr += weight * c;
        rr += weight * r;
    }
    (corr, rr)
}

fn ell_len(ell: Ell, p: usize) -> usize {
    match ell {
        Ell::Finite(l) => (l as usize).min(p),
        Ell::Inf => p,
    }
}

fn counts(orbit: &Orbit, ell: Ell, n: u64, eps: &Rat, mode: HorizonMode) -> Result<(u64, u64)> {
    if n == 0 {
        return Err(Error::OutOfDomain("orbit length n must be >= 1".into()));
    }
    if mode == HorizonMode::Periodic && orbit.period().is_none() {
        return Err(Error::OutOfDomain(
            "periodic horizon needs a symbolic orbit".into(),
        ));
    }
    let closeness = Closeness::build(orbit, n as usize, eps)?;
    Ok(diagonal_counts(&closeness, n, ell, mode))
}

/// The ell-correlation sum over the first n iterates, an exact rational.
pub fn corr_sum(orbit: &Orbit, ell: Ell, n: u64, eps: &Rat, mode: HorizonMode) -> Result<Rat> {
    let (c, _) = counts(orbit, ell, n, eps, mode)?;
    Ok(Rat::new(BigInt::from(c), BigInt::from(n) * BigInt::from(n)))
}

/// The ell-recurrence rate by the diagonal-backtracking definition.
pub fn rec_rate(orbit: &Orbit, ell: Ell, n: u64, eps: &Rat, mode: HorizonMode) -> Result<Rat> {
    let (_, r) = counts(orbit, ell, n, eps, mode)?;
    Ok(Rat::new(BigInt::from(r), BigInt::from(n) * BigInt::from(n)))
}

/// Determinism `DET_ell = RR_ell / RR_1`.
pub fn det(orbit: &Orbit, ell: Ell, n: u64, eps: &Rat, mode: HorizonMode) -> Result<Rat> {
    let rr1 = rec_rate(orbit, Ell::Finite(1), n, eps, mode)?;
    if rr1.is_zero() {
        return Err(Error::ZeroDenominator("RR_1 = 0".into()));
    }
    Ok(rec_rate(orbit, ell, n, eps, mode)? / rr1)
}

// ---------------------------------------------------------------------------
// Point classification
// ---------------------------------------------------------------------------

/// A starting point for recurrence statistics, given symbolically.
#[derive(Debug, Clone, PartialEq)]
pub enum RqaPoint {
    /// x = kappa(u), a point of the minimal set (never eventually periodic).
    Symbolic(Word),
    /// The unique 2^k-periodic point of the limit map.
    Periodic { k: u32 },
    /// A raw float seed; classification is refused except for the exact
    /// endpoints 0 and 1.
    Seed(f64),
}

/// Which limit the correlation sums of a point converge to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitClass {
    /// Limits are the limit-map integrals.
    LimitMap,
    /// Limits are the k-th approximation-map integrals.
    ApproxMap { k: u32 },
}

/// Classifies a point by the limit its correlation sums reach: eventually
/// periodic points of period 2^k get the approximation-map integrals,
/// everything else the limit-map integrals.
pub fn classify_point(x: &RqaPoint) -> Result<LimitClass> {
    match x {
        RqaPoint::Symbolic(_) => Ok(LimitClass::LimitMap),
        RqaPoint::Periodic { k } => Ok(LimitClass::ApproxMap { k: *k }),
        RqaPoint::Seed(v) if *v == 0.0 || *v == 1.0 => Ok(LimitClass::LimitMap),
        RqaPoint::Seed(v) => Err(Error::Unclassifiable(format!(
            "cannot decide eventual periodicity of the float seed {v}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Exact integrals for the approximation maps
// ---------------------------------------------------------------------------

/// Exact correlation integral of the k-th approximation map: the fraction
/// of eps-close ordered word pairs at horizon ell.
pub fn corr_integral_fk(alpha: &Alpha, k: u32, ell: Ell, eps: &Rat) -> Result<Rat> {
    let count = distmatrix::count_close_pairs(k, alpha, ell, eps)?;
    Ok(Rat::new(
        BigInt::from(count),
        BigInt::one() << (2 * k as usize),
    ))
}

/// Exact infinite-horizon determinism of the k-th approximation map.
pub fn det_inf_fk(alpha: &Alpha, k: u32, eps: &Rat) -> Result<Rat> {
    let c_inf = corr_integral_fk(alpha, k, Ell::Inf, eps)?;
    let c_one = corr_integral_fk(alpha, k, Ell::Finite(1), eps)?;
    Ok(c_inf / c_one) // c_one >= 2^-k > 0, the diagonal is always close
}

/// A sufficient threshold below which the determinism at horizon ell is
/// exactly 1: `(1 - 2 alpha) alpha^(h-1)` where h is minimal with
/// `ell <= 2^h`. Constructive bound only; sharpness is not claimed.
pub fn det_one_threshold(alpha: &Alpha, ell: u64) -> Rat {
    let mut h = 0u32;
    while (1u64 << h) < ell {
        h += 1;
    }
    if h == 0 {
        // ell = 1: DET_1 = 1 at every threshold; the h = 1 bound is still a
        // valid (conservative) witness value
        return alpha.one_minus_two();
    }
    alpha.one_minus_two() * alpha.pow(h - 1)
}

/// Conditional correlation integral `c^(ell2 | ell1) = c_(ell1+ell2) / c_(ell1)`.
pub fn cond_corr_integral_fk(
    alpha: &Alpha,
    k: u32,
    ell1: u64,
    ell2: Ell,
    eps: &Rat,
) -> Result<Rat> {
    let num_ell = match ell2 {
        Ell::Inf => Ell::Inf,
        Ell::Finite(l2) => Ell::Finite(ell1 + l2),
    };
    let num = corr_integral_fk(alpha, k, num_ell, eps)?;
    let den = corr_integral_fk(alpha, k, Ell::Finite(ell1), eps)?;
    if den.is_zero() {
        return Err(Error::ZeroDenominator("c_ell1 = 0".into()));
    }
    Ok(num / den)
}

// ---------------------------------------------------------------------------
// Certified values for the limit map
// ---------------------------------------------------------------------------

/// A value together with a certified error radius: the true quantity lies
/// in [value - error_radius, value + error_radius].
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxValue {
    pub value: Rat,
    pub error_radius: Rat,
    pub k_used: u32,
}

impl ApproxValue {
    pub fn value_f64(&self) -> f64 {
        rat_to_f64(&self.value)
    }

    pub fn radius_f64(&self) -> f64 {
        rat_to_f64(&self.error_radius)
    }

    pub fn contains(&self, x: &Rat) -> bool {
        (&self.value - x).abs() <= self.error_radius
    }
}

/// The scale index h with `alpha^(h+1) < eps <= alpha^h`; needs eps in (0, 1].
pub fn scale_index(alpha: &Alpha, eps: &Rat) -> Result<u32> {
    if !eps.is_positive() || *eps > Rat::one() {
        return Err(Error::OutOfDomain(format!("eps = {eps} outside (0, 1]")));
    }
    let mut h = 0u32;
    let mut pow = alpha.to_rat(); // alpha^(h+1)
    let a = alpha.to_rat();
    while *eps <= pow {
        h += 1;
        pow *= &a;
        if h > 4096 {
            return Err(Error::OutOfDomain("eps too small to scale".into()));
        }
    }
    Ok(h)
}

/// Approximation error of `c_ell` when the k-th map replaces the limit map.
pub fn c_error_bound(ell: Ell, k: u32) -> Rat {
    let denom = BigInt::one() << k as usize;
    match ell {
        Ell::Finite(1) => Rat::new(BigInt::from(8), denom),
        Ell::Finite(l) => Rat::new(BigInt::from(16) * BigInt::from(l), denom),
        Ell::Inf => Rat::new(BigInt::from(4), denom),
    }
}

fn count_cap(ell: Ell) -> u32 {
    match ell {
        Ell::Finite(1) | Ell::Inf => distmatrix::INF_COUNT_K_CAP,
        Ell::Finite(_) => distmatrix::FINITE_COUNT_K_CAP,
    }
}

/// Correlation integral of the limit map with a certified radius:
/// picks the smallest k with `bound(ell, k) < tol` and `eps > alpha^k`,
/// then returns the exact k-th integral with that radius.
pub fn corr_integral_f(alpha: &Alpha, ell: Ell, eps: &Rat, tol: f64) -> Result<ApproxValue> {
    corr_integral_f_capped(alpha, ell, eps, tol, u32::MAX)
}

/// Same as [`corr_integral_f`] with an additional user cap on the level k.
pub fn corr_integral_f_capped(
    alpha: &Alpha,
    ell: Ell,
    eps: &Rat,
    tol: f64,
    k_cap: u32,
) -> Result<ApproxValue> {
    if tol <= 0.0 {
        return Err(Error::OutOfDomain("tol must be positive".into()));
    }
    if !eps.is_positive() {
        return Err(Error::OutOfDomain("eps must be positive".into()));
    }
    let cap = count_cap(ell).min(k_cap);
    let mut k = 1u32;
    // eps > alpha^k keeps us inside the proven bound's hypotheses
    let mut pow = alpha.to_rat();
    let a = alpha.to_rat();
    while pow >= *eps {
        k += 1;
        pow *= &a;
        if k > cap {
            return Err(Error::OutOfDomain(format!(
                "eps = {eps} needs k > {cap} before the error bound applies"
            )));
        }
    }
    while rat_to_f64(&c_error_bound(ell, k)) >= tol {
        k += 1;
        if k > cap {
            let best = c_error_bound(ell, cap);
            return Err(Error::TolUnreachable {
                tol,
                best_radius: rat_to_f64(&best),
                k_used: cap,
            });
        }
    }
    Ok(ApproxValue {
        value: corr_integral_fk(alpha, k, ell, eps)?,
        error_radius: c_error_bound(ell, k),
        k_used: k,
    })
}

/// Certified radius for the infinite-horizon determinism at level k and
/// scale h: `24 / (2^(k-h-1) - 8)`; defined for k >= h + 5.
pub fn det_error_bound(k: u32, h: u32) -> Option<Rat> {
    if k < h + 5 {
        return None;
    }
    let denom = (BigInt::one() << (k - h - 1) as usize) - BigInt::from(8);
    Some(Rat::new(BigInt::from(24), denom))
}

/// Infinite-horizon determinism of the limit map at a fixed level k,
/// with its honest radius.
pub fn det_inf_f_at(alpha: &Alpha, eps: &Rat, k: u32) -> Result<ApproxValue> {
    let h = scale_index(alpha, eps)?;
    let radius = det_error_bound(k, h).ok_or_else(|| {
        Error::OutOfDomain(format!(
            "k = {k} too small for scale h = {h}; need k >= h + 5"
        ))
    })?;
    if k > distmatrix::INF_COUNT_K_CAP {
        return Err(Error::KTooLarge {
            k,
            cap: distmatrix::INF_COUNT_K_CAP,
        });
    }
    Ok(ApproxValue {
        value: det_inf_fk(alpha, k, eps)?,
        error_radius: radius,
        k_used: k,
    })
}

/// Certified infinite-horizon determinism of the limit map: smallest k
/// whose radius beats tol. Errors with the best achievable radius when the
/// level cap is hit.
pub fn det_inf_f(alpha: &Alpha, eps: &Rat, tol: f64) -> Result<ApproxValue> {
    det_inf_f_capped(alpha, eps, tol, u32::MAX)
}

/// Same as [`det_inf_f`] with an additional user cap on the level k.
pub fn det_inf_f_capped(alpha: &Alpha, eps: &Rat, tol: f64, k_cap: u32) -> Result<ApproxValue> {
    if tol <= 0.0 {
        return Err(Error::OutOfDomain("tol must be positive".into()));
    }
    let h = scale_index(alpha, eps)?;
    let cap = distmatrix::INF_COUNT_K_CAP.min(k_cap);
    if cap < h + 5 {
        return Err(Error::KTooLarge { k: h + 5, cap });
    }
    let mut k = h + 5;
    loop {
        if k > cap {
            let best = det_error_bound(cap, h).expect("cap >= h + 5");
            return Err(Error::TolUnreachable {
                tol,
                best_radius: rat_to_f64(&best),
                k_used: cap,
            });
        }
        let radius = det_error_bound(k, h).expect("k >= h + 5");
        if rat_to_f64(&radius) < tol {
            return det_inf_f_at(alpha, eps, k);
        }
        k += 1;
    }
}

// ---------------------------------------------------------------------------
// Sandwich bounds on c1 from boundary words
// ---------------------------------------------------------------------------

/// Validates the boundary-word configuration for the c1 sandwich at scale h
/// and returns (lower, upper) enclosing the exact one-step integral of the
/// (k+h)-level map.
///
/// words[0] must lie in the gamma window (2^(k-1), 2^k] and be the last
/// eps-close word of the first row; words[m-1] (m >= 2) in
/// [2^(k+m-2), 2^(k+m-1)) and be the last eps-close word of the row of
/// `0^(h-m+2) 1^(k+m-2)`.
pub fn c1_bounds(alpha: &Alpha, k: u32, h: u32, eps: &Rat, words: &[Word]) -> Result<(Rat, Rat)> {
    if words.len() != h as usize + 1 {
        return Err(Error::BoundaryCondition(format!(
            "need {} boundary words, got {}",
            h + 1,
            words.len()
        )));
    }
    if scale_index(alpha, eps)? != h {
        return Err(Error::BoundaryCondition(format!(
            "eps = {eps} is not in the scale-(h = {h}) band"
        )));
    }
    let big_k = (k + h) as usize;
    let n = 1u64 << big_k;
    let check_row = |row: &Word, u: &Word| -> Result<()> {
        if u.len() != big_k {
            return Err(Error::LengthMismatch {
                left: u.len(),
                right: big_k,
            });
        }
        if !row.rho(u)?.le_rat(eps, alpha) {
            return Err(Error::BoundaryCondition(format!(
                "expected rho({row}, {u}) <= eps"
            )));
        }
        let g = u.gamma()?;
        if g < n {
            let next = u.succ_rl(1)?;
            if row.rho(&next)?.le_rat(eps, alpha) {
                return Err(Error::BoundaryCondition(format!(
                    "expected rho({row}, {next}) > eps"
                )));
            }
        }
        Ok(())
    };

    let u1 = &words[0];
    let g1 = u1.gamma()?;
    // closed left end: the first-row boundary can sit exactly at the
    // half-way word, where j1 = 2^(k-1)
    if !(g1 >= (1u64 << (k - 1)) && g1 <= (1u64 << k)) {
        return Err(Error::BoundaryCondition(format!(
            "gamma(u1) = {g1} outside [2^(k-1), 2^k]"
        )));
    }
    check_row(&Word::zeros(big_k), u1)?;
    let j1 = BigInt::from((1u64 << k) - g1);

    let mut lower = BigInt::from(2u64) << h as usize; // 2^(h+1)
    lower *= (BigInt::one() << (2 * k - 1) as usize) - &j1 * &j1;
    let mut upper = BigInt::one() << h as usize;
    upper *= (BigInt::one() << (2 * k) as usize) - &j1 * &j1;

    for m in 2..=(h + 1) as usize {
        let um = &words[m - 1];
        let g = um.gamma()?;
        let lo = 1u64 << (k as usize + m - 2);
        let hi = 1u64 << (k as usize + m - 1);
        if !(g >= lo && g < hi) {
            return Err(Error::BoundaryCondition(format!(
                "gamma(u{m}) = {g} outside [2^(k+{m}-2), 2^(k+{m}-1))"
            )));
        }
        let row = Word::zeros(h as usize + 2 - m).concat(&Word::ones(k as usize + m - 2))?;
        check_row(&row, um)?;
        let jm = BigInt::from(g - lo);
        lower += (BigInt::one() << (h as usize + 1 - m)) * &jm * &jm;
        upper += (BigInt::one() << (h as usize + 2 - m)) * &jm * &jm;
    }
    let denom = BigInt::one() << (2 * big_k);
    Ok((Rat::new(lower, denom.clone()), Rat::new(upper, denom)))
}

/// Searches the boundary words for `c1_bounds` directly from the threshold.
pub fn find_c1_boundary_words(alpha: &Alpha, k: u32, h: u32, eps: &Rat) -> Result<Vec<Word>> {
    let big_k = k + h;
    let mut words = Vec::with_capacity(h as usize + 1);
    let g_star = distmatrix::gamma_max_close(big_k, alpha, eps);
    if !(g_star >= (1u64 << (k - 1)) && g_star <= (1u64 << k)) {
        return Err(Error::BoundaryCondition(format!(
            "first-row boundary gamma {g_star} misses the window [2^(k-1), 2^k]"
        )));
    }
    words.push(Word::from_gamma(big_k as usize, g_star)?);
    for m in 2..=(h + 1) as usize {
        let row = Word::zeros(h as usize + 2 - m).concat(&Word::ones(k as usize + m - 2))?;
        let bound = row.kappa().eval_rat(alpha) + eps;
        let g = distmatrix::gamma_max_close(big_k, alpha, &bound);
        let lo = 1u64 << (k as usize + m - 2);
        let hi = 1u64 << (k as usize + m - 1);
        if !(g >= lo && g < hi) {
            return Err(Error::BoundaryCondition(format!(
                "row-{m} boundary gamma {g} misses [2^(k+m-2), 2^(k+m-1))"
            )));
        }
        words.push(Word::from_gamma(big_k as usize, g)?);
    }
    Ok(words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::rat;
    use crate::maps::{orbit, DelahayeMap, Map};

    fn third() -> Alpha {
        Alpha::new(1, 3).unwrap()
    }

    fn zero_orbit(alpha: Alpha, k: usize) -> Orbit {
        Orbit::symbolic(alpha, Word::zeros(k))
    }

    #[test]
    fn corr_sum_trivia() {
        let o = zero_orbit(third(), 4);
        // single pair (0, 0)
        assert_eq!(
            corr_sum(&o, Ell::Finite(3), 1, &rat(1, 100), HorizonMode::Periodic).unwrap(),
            Rat::one()
        );
        // eps at the diameter closes everything
        for ell in [Ell::Finite(1), Ell::Finite(5), Ell::Inf] {
            assert_eq!(
                corr_sum(&o, ell, 16, &rat(1, 1), HorizonMode::Periodic).unwrap(),
                Rat::one()
            );
        }
    }

    #[test]
    fn corr_sum_periodic_multiples_collapse() {
        // n = m p gives exactly the n = p value under the periodic horizon
        for alpha in [third(), Alpha::new(2, 5).unwrap()] {
            for k in 1..=5usize {
                let o = zero_orbit(alpha, k);
                let p = 1u64 << k;
                for eps in [rat(1, 7), alpha.to_rat(), rat(4, 5)] {
                    for ell in [Ell::Finite(1), Ell::Finite(3), Ell::Inf] {
                        let base = corr_sum(&o, ell, p, &eps, HorizonMode::Periodic).unwrap();
                        for m in 2..=4 {
                            assert_eq!(
                                corr_sum(&o, ell, m * p, &eps, HorizonMode::Periodic).unwrap(),
                                base
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn recurrence_identity_periodic_at_full_periods() {
        // RR_l = l C_l - (l-1) C_(l+1) and RR_inf = C_inf, exactly
        for alpha in [third(), Alpha::new(2, 5).unwrap()] {
            for k in 1..=6usize {
                let o = zero_orbit(alpha, k);
                let n = 1u64 << k;
                let mut epss: Vec<Rat> = (1..=8).map(|j| rat(j, 9)).collect();
                epss.push(alpha.to_rat());
                epss.push(Rat::one() - alpha.pow(2));
                for eps in &epss {
                    for l in 1..=8u64 {
                        let rr =
                            rec_rate(&o, Ell::Finite(l), n, eps, HorizonMode::Periodic).unwrap();
                        let cl =
                            corr_sum(&o, Ell::Finite(l), n, eps, HorizonMode::Periodic).unwrap();
                        let cl1 = corr_sum(&o, Ell::Finite(l + 1), n, eps, HorizonMode::Periodic)
                            .unwrap();
                        assert_eq!(
                            rr,
                            Rat::from_integer(l.into()) * cl
                                - Rat::from_integer((l - 1).into()) * cl1
                        );
                    }
                    assert_eq!(
                        rec_rate(&o, Ell::Inf, n, eps, HorizonMode::Periodic).unwrap(),
                        corr_sum(&o, Ell::Inf, n, eps, HorizonMode::Periodic).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn recurrence_identity_windowed_any_n() {
        // the finite-plot estimator satisfies the identity at every n
        let alpha = Alpha::new(2, 5).unwrap();
        for k in 2..=5usize {
            let o = zero_orbit(alpha, k);
            for n in [3u64, 5, (1 << k) - 1, (1 << k) + 3] {
                for eps in [rat(1, 4), rat(3, 5)] {
                    for l in 1..=6u64 {
                        let rr =
                            rec_rate(&o, Ell::Finite(l), n, &eps, HorizonMode::Windowed).unwrap();
                        let cl =
                            corr_sum(&o, Ell::Finite(l), n, &eps, HorizonMode::Windowed).unwrap();
                        let cl1 = corr_sum(&o, Ell::Finite(l + 1), n, &eps, HorizonMode::Windowed)
                            .unwrap();
                        assert_eq!(
                            rr,
                            Rat::from_integer(l.into()) * cl
                                - Rat::from_integer((l - 1).into()) * cl1
                        );
                    }
                    assert_eq!(
                        rec_rate(&o, Ell::Inf, n, &eps, HorizonMode::Windowed).unwrap(),
                        corr_sum(&o, Ell::Inf, n, &eps, HorizonMode::Windowed).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn det_is_one_at_horizon_one_and_below_spacing() {
        let alpha = third();
        for k in 1..=5usize {
            let o = zero_orbit(alpha, k);
            let n = 1u64 << k;
            // DET_1 = 1 always
            assert_eq!(
                det(&o, Ell::Finite(1), n, &rat(1, 3), HorizonMode::Periodic).unwrap(),
                Rat::one()
            );
            // below the minimal spacing of orbit points only exact returns
            // recur, so DET_ell = 1 for every ell
            let mut min_space: Option<Rat> = None;
            for i in 0..(1u64 << k) {
                for j in 0..i {
                    let d = Word::zeros(k)
                        .add_lr_n(i)
                        .rho(&Word::zeros(k).add_lr_n(j))
                        .unwrap()
                        .eval_rat(&alpha);
                    min_space = Some(match min_space {
                        None => d.clone(),
                        Some(m) => m.min(d.clone()),
                    });
                }
            }
            if let Some(spacing) = min_space {
                let eps = spacing / rat(2, 1);
                for ell in [Ell::Finite(2), Ell::Finite(7), Ell::Inf] {
                    assert_eq!(
                        det(&o, ell, n, &eps, HorizonMode::Periodic).unwrap(),
                        Rat::one(),
                        "k={k} ell={ell}"
                    );
                }
            }
        }
    }

    #[test]
    fn finite_horizon_determinism_below_threshold() {
        // DET_l = 1 exactly for l <= 2^h and eps = 0.9 (1-2a) a^(h-1)
        for alpha in [Alpha::new(1, 5).unwrap(), third()] {
            for h in 1..=3u32 {
                let eps = rat(9, 10) * alpha.one_minus_two() * alpha.pow(h - 1);
                for k in (h + 1)..=6 {
                    let o = zero_orbit(alpha, k as usize);
                    let n = 1u64 << k;
                    for l in [1u64, 2, 1 << (h - 1), 1 << h] {
                        for mode in [HorizonMode::Periodic, HorizonMode::Windowed] {
                            assert_eq!(
                                det(&o, Ell::Finite(l), n, &eps, mode).unwrap(),
                                Rat::one(),
                                "alpha={alpha} h={h} k={k} l={l} mode={mode:?}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn real_orbit_windowed_matches_symbolic() {
        // float trajectory of kappa(0^k) under the limit map gives the same
        // counts as the exact symbolic orbit at a tie-free eps
        let alpha = third();
        let k = 6usize;
        let n = 1u64 << k;
        let f = Map::Limit(DelahayeMap::new(alpha));
        let pts = orbit(&f, 0.0, n as usize).unwrap();
        let real = Orbit::Real { points: pts };
        let sym = zero_orbit(alpha, k);
        let eps = rat(37, 100);
        for ell in [Ell::Finite(1), Ell::Finite(4), Ell::Inf] {
            assert_eq!(
                corr_sum(&real, ell, n, &eps, HorizonMode::Windowed).unwrap(),
                corr_sum(&sym, ell, n, &eps, HorizonMode::Windowed).unwrap()
            );
            assert_eq!(
                rec_rate(&real, ell, n, &eps, HorizonMode::Windowed).unwrap(),
                rec_rate(&sym, ell, n, &eps, HorizonMode::Windowed).unwrap()
            );
        }
        assert!(corr_sum(&real, Ell::Inf, n, &eps, HorizonMode::Periodic).is_err());
    }

    #[test]
    fn integral_equals_full_period_corr_sum() {
        // trajectory oracle for the matrix-count integrals
        for alpha in [third(), Alpha::new(2, 5).unwrap()] {
            for k in 1..=7u32 {
                let o = zero_orbit(alpha, k as usize);
                let n = 1u64 << k;
                for eps in [rat(1, 8), alpha.to_rat(), rat(5, 6)] {
                    for ell in [Ell::Finite(1), Ell::Finite(3), Ell::Inf] {
                        assert_eq!(
                            corr_integral_fk(&alpha, k, ell, &eps).unwrap(),
                            corr_sum(&o, ell, n, &eps, HorizonMode::Periodic).unwrap(),
                            "alpha={alpha} k={k} ell={ell} eps={eps}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_integrals_at_distinguished_thresholds() {
        let a = third();
        let one = Rat::one();
        for k in [8u32, 10] {
            let n = BigInt::one() << k as usize;
            // c1(alpha) = 1/2 exactly
            assert_eq!(
                corr_integral_fk(&a, k, Ell::Finite(1), &a.to_rat()).unwrap(),
                rat(1, 2)
            );
            // c1(1 - alpha) = 1 - 2^(k-1) (2^(k-1) - 1) / 2^(2k); verified
            // against literal pair counts (14/16 at k = 2, 52/64 at k = 3)
            let half: BigInt = &n >> 1;
            let expect = &one - Rat::new(&half * (&half - BigInt::one()), &n * &n);
            assert_eq!(
                corr_integral_fk(&a, k, Ell::Finite(1), &(&one - a.to_rat())).unwrap(),
                expect
            );
            // c1(1 - alpha + alpha^2) = 1 - 2 (2^(k-2))^2 / 2^(2k) = 7/8
            assert_eq!(
                corr_integral_fk(&a, k, Ell::Finite(1), &(&one - a.to_rat() + a.pow(2))).unwrap(),
                rat(7, 8)
            );
            // c1(1 - alpha^2) = 1 - 2^(k-2) (2^(k-2) - 1) / 2^(2k)
            let quarter: BigInt = &n >> 2;
            let expect = &one - Rat::new(&quarter * (&quarter - BigInt::one()), &n * &n);
            assert_eq!(
                corr_integral_fk(&a, k, Ell::Finite(1), &(&one - a.pow(2))).unwrap(),
                expect
            );
        }
    }

    #[test]
    fn certified_integrals_hit_the_table() {
        let a = third();
        let one = Rat::one();
        // eps = 1: everything close
        let v = corr_integral_f(&a, Ell::Finite(1), &one, 0.05).unwrap();
        assert_eq!(v.value, one);
        // c1_f(1 - alpha) = 3/4
        let v = corr_integral_f(&a, Ell::Finite(1), &(&one - a.to_rat()), 0.02).unwrap();
        assert!((v.value_f64() - 0.75).abs() < 0.02);
        // c_inf_f(1 - alpha^2) = 1/2
        let v = corr_integral_f(&a, Ell::Inf, &(&one - a.pow(2)), 0.01).unwrap();
        assert!((v.value_f64() - 0.5).abs() < 0.01);
        // a finite-horizon value sits between c_inf and c1
        let eps = &one - a.to_rat();
        let c1 = corr_integral_f(&a, Ell::Finite(1), &eps, 0.02).unwrap();
        let c3 = corr_integral_f(&a, Ell::Finite(3), &eps, 0.05).unwrap();
        let ci = corr_integral_f(&a, Ell::Inf, &eps, 0.02).unwrap();
        assert!(ci.value <= c3.value && c3.value <= c1.value);
    }

    #[test]
    fn certified_determinism_hits_the_table() {
        let a = third();
        let one = Rat::one();
        let cases = [
            (a.to_rat(), rat(1, 1)),
            (&one - a.to_rat(), rat(2, 3)),
            (&one - a.to_rat() + a.pow(2), rat(4, 7)),
            (&one - a.pow(2), rat(8, 15)),
        ];
        for (eps, expect) in cases {
            let v = det_inf_f(&a, &eps, 0.01).unwrap();
            assert!(
                v.contains(&expect),
                "eps={eps}: got {} +- {}",
                v.value_f64(),
                v.radius_f64()
            );
            assert!((v.value_f64() - rat_to_f64(&expect)).abs() < 0.01);
            assert!(v.radius_f64() < 0.01);
        }
    }

    #[test]
    fn tolerance_failures_are_reported() {
        let a = third();
        match det_inf_f(&a, &rat(1, 3), 1e-12) {
            Err(Error::TolUnreachable {
                best_radius,
                k_used,
                ..
            }) => {
                assert!(best_radius > 1e-12);
                assert_eq!(k_used, distmatrix::INF_COUNT_K_CAP);
            }
            other => panic!("expected TolUnreachable, got {other:?}"),
        }
        // the best achievable value at a given level stays available
        let best = det_inf_f_at(&a, &rat(1, 3), 10).unwrap();
        assert!(best.radius_f64() > 0.0);
        assert!(det_inf_f_at(&a, &rat(1, 3), 4).is_err()); // k < h + 5
        assert!(det_inf_f(&a, &rat(1, 3), 0.0).is_err());
    }

    #[test]
    fn identity_between_det_and_cond_integrals() {
        // det_inf = c_inf / c1 = c^(inf|1)
        let a = Alpha::new(2, 5).unwrap();
        for k in [6u32, 9] {
            for eps in [rat(1, 5), rat(2, 5), rat(7, 10)] {
                assert_eq!(
                    det_inf_fk(&a, k, &eps).unwrap(),
                    cond_corr_integral_fk(&a, k, 1, Ell::Inf, &eps).unwrap()
                );
            }
        }
    }

    #[test]
    fn c1_sandwich_on_found_boundary_words() {
        for alpha in [third(), Alpha::new(2, 5).unwrap()] {
            let mut exercised = 0;
            for h in 0..=2u32 {
                for k in 3..=5u32 {
                    // sample thresholds inside the scale-h band
                    for frac in [rat(11, 10), rat(3, 2), rat(19, 10)] {
                        let eps = alpha.pow(h + 1) * frac;
                        if scale_index(&alpha, &eps).unwrap() != h {
                            continue;
                        }
                        let words = match find_c1_boundary_words(&alpha, k, h, &eps) {
                            Ok(w) => w,
                            Err(_) => continue,
                        };
                        let (lo, hi) = c1_bounds(&alpha, k, h, &eps, &words).unwrap();
                        let exact = corr_integral_fk(&alpha, k + h, Ell::Finite(1), &eps).unwrap();
                        assert!(lo <= exact && exact <= hi, "alpha={alpha} k={k} h={h}");
                        exercised += 1;
                    }
                }
            }
            assert!(exercised >= 4, "too few sandwich configurations exercised");
        }
    }

    #[test]
    fn c1_sandwich_worked_figure() {
        // k = 4, h = 1 with boundary words 01011 and 10101
        let alpha = Alpha::new(2, 5).unwrap();
        let eps = rat(33, 100);
        let words = find_c1_boundary_words(&alpha, 4, 1, &eps).unwrap();
        assert_eq!(words[0].to_string(), "01011");
        assert_eq!(words[1].to_string(), "10101");
        assert_eq!(words[0].gamma().unwrap(), 12);
        assert_eq!(words[1].gamma().unwrap(), 22);
        let (lo, hi) = c1_bounds(&alpha, 4, 1, &eps, &words).unwrap();
        assert_eq!(lo, rat(484, 1024));
        assert_eq!(hi, rat(552, 1024));
        let exact = corr_integral_fk(&alpha, 5, Ell::Finite(1), &eps).unwrap();
        assert!(lo <= exact && exact <= hi);
    }

    #[test]
    fn h_zero_reduction_of_the_sandwich() {
        // h = 0: (1/2^2k)[2 (2^(2k-1) - j1^2)] <= c1 <= (1/2^2k)[2^2k - j1^2]
        let alpha = third();
        let k = 5u32;
        let eps = rat(7, 10); // h = 0 band for alpha = 1/3
        let words = find_c1_boundary_words(&alpha, k, 0, &eps).unwrap();
        let g1 = words[0].gamma().unwrap();
        let j1 = (1u64 << k) - g1;
        let (lo, hi) = c1_bounds(&alpha, k, 0, &eps, &words).unwrap();
        let n2 = 1u64 << (2 * k);
        assert_eq!(lo, rat(2 * ((n2 / 2) as i64 - (j1 * j1) as i64), n2 as i64));
        assert_eq!(hi, rat((n2 - j1 * j1) as i64, n2 as i64));
    }

    #[test]
    fn boundary_condition_violations_are_rejected() {
        let alpha = third();
        let eps = rat(7, 10);
        let words = find_c1_boundary_words(&alpha, 5, 0, &eps).unwrap();
        // wrong count
        assert!(c1_bounds(&alpha, 5, 1, &eps, &words).is_err());
        // word outside the window
        let bad = vec![Word::zeros(5)];
        assert!(c1_bounds(&alpha, 5, 0, &eps, &bad).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(
            classify_point(&RqaPoint::Symbolic(Word::zeros(4))).unwrap(),
            LimitClass::LimitMap
        );
        assert_eq!(
            classify_point(&RqaPoint::Periodic { k: 3 }).unwrap(),
            LimitClass::ApproxMap { k: 3 }
        );
        assert_eq!(
            classify_point(&RqaPoint::Seed(0.0)).unwrap(),
            LimitClass::LimitMap
        );
        assert_eq!(
            classify_point(&RqaPoint::Seed(1.0)).unwrap(),
            LimitClass::LimitMap
        );
        assert!(classify_point(&RqaPoint::Seed(0.37)).is_err());
    }

    #[test]
    fn monotonicity_of_integrals() {
        let a = Alpha::new(2, 5).unwrap();
        let k = 7u32;
        // nondecreasing in eps, nonincreasing in ell
        let mut last = Rat::zero();
        for j in 1..=10 {
            let eps = rat(j, 10);
            let c = corr_integral_fk(&a, k, Ell::Finite(1), &eps).unwrap();
            assert!(c >= last);
            last = c;
        }
        for eps in [rat(1, 4), rat(1, 2), rat(3, 4)] {
            let c1 = corr_integral_fk(&a, k, Ell::Finite(1), &eps).unwrap();
            let c2 = corr_integral_fk(&a, k, Ell::Finite(2), &eps).unwrap();
            let c5 = corr_integral_fk(&a, k, Ell::Finite(5), &eps).unwrap();
            let ci = corr_integral_fk(&a, k, Ell::Inf, &eps).unwrap();
            assert!(ci <= c5 && c5 <= c2 && c2 <= c1);
        }
    }
}

#[cfg(test)]
mod approximation_tests {
    use super::*;
    use crate::alpha::rat;

    #[test]
    fn finer_levels_respect_the_sandwich() {
        // exact values at k' > k stay inside [c_k(eps - a^k), c_k(eps + a^k)]
        for alpha in [Alpha::new(1, 3).unwrap(), Alpha::new(2, 5).unwrap()] {
            for ell in [Ell::Finite(1), Ell::Finite(2), Ell::Inf] {
                for eps in [rat(1, 4), rat(3, 5), rat(9, 10)] {
                    for k in [6u32, 8, 10] {
                        let ak = alpha.pow(k);
                        let lo = corr_integral_fk(&alpha, k, ell, &(&eps - &ak)).unwrap();
                        let hi = corr_integral_fk(&alpha, k, ell, &(&eps + &ak)).unwrap();
                        for kp in (k + 1)..=12 {
                            let v = corr_integral_fk(&alpha, kp, ell, &eps).unwrap();
                            assert!(
                                lo <= v && v <= hi,
                                "alpha={alpha} ell={ell} eps={eps} k={k} k'={kp}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sandwich_width_vanishes_with_k() {
        // c_k(eps + a^k) - c_k(eps - a^k) decreases towards zero over k
        for alpha in [Alpha::new(1, 3).unwrap(), Alpha::new(2, 5).unwrap()] {
            for ell in [Ell::Finite(1), Ell::Inf] {
                for eps in [rat(2, 5), rat(4, 5)] {
                    let mut last: Option<Rat> = None;
                    for k in 6..=12u32 {
                        let ak = alpha.pow(k);
                        let width = corr_integral_fk(&alpha, k, ell, &(&eps + &ak)).unwrap()
                            - corr_integral_fk(&alpha, k, ell, &(&eps - &ak)).unwrap();
                        assert!(!width.is_negative());
                        if let Some(prev) = last {
                            assert!(
                                width <= prev,
                                "width grew at alpha={alpha} ell={ell} eps={eps} k={k}"
                            );
                        }
                        last = Some(width);
                    }
                    // and the final width is below the certified bound
                    let bound = c_error_bound(ell, 12);
                    assert!(last.unwrap() <= bound);
                }
            }
        }
    }

    #[test]
    fn eps_continuity_proxy() {
        // |c_k(eps) - c_k(eps')| <= bound(ell, k) whenever |eps - eps'| <= a^k
        let alpha = Alpha::new(1, 3).unwrap();
        for ell in [Ell::Finite(1), Ell::Finite(3), Ell::Inf] {
            for k in [6u32, 9, 12] {
                if matches!(ell, Ell::Finite(l) if l > 1) && k > 10 {
                    continue;
                }
                let ak = alpha.pow(k);
                for eps in [rat(1, 3), rat(7, 10)] {
                    let shifted = &eps + &ak / rat(2, 1);
                    let d = (corr_integral_fk(&alpha, k, ell, &eps).unwrap()
                        - corr_integral_fk(&alpha, k, ell, &shifted).unwrap())
                    .abs();
                    assert!(d <= c_error_bound(ell, k), "ell={ell} k={k} eps={eps}");
                }
            }
        }
    }
}
