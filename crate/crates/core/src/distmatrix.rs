//! Distance matrices over word pairs, the fast period-max distance, the
//! six structural patterns, and counting shortcuts.
//!
//! Trajectories of length-k words are 2^k-periodic, so the infinite-horizon
//! distance of a pair is a maximum over one period. That maximum is always
//! attained at the alignment that sends one word to 0^k while the other
//! becomes `0^h 1 1 w`; since the aligned word depends only on the index
//! difference of the pair, the whole infinite-horizon matrix is determined
//! by its first row, and the first row by a single digit expansion of the
//! threshold. Counting close pairs this way is O(k) after the expansion,
//! versus O(4^k) for brute force.

use crate::alpha::{Alpha, Rat};
use crate::error::{Error, Result};
use crate::exact::{rat_to_f64, ExactDistance, FLOAT_GUARD};
use crate::words::Word;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::cmp::Ordering;
use std::fmt;

/// Horizon parameter: a finite number of steps or the full (periodic) orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ell {
    Finite(u64),
    Inf,
}

impl Ell {
    /// Number of shifts that matter for words of length k.
    pub fn effective(&self, k: usize) -> u64 {
        let period = 1u64 << k;
        match self {
            Ell::Finite(l) => (*l).min(period),
            Ell::Inf => period,
        }
    }
}

impl fmt::Display for Ell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ell::Finite(l) => write!(f, "{l}"),
            Ell::Inf => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Ell {
    type Err = Error;
    fn from_str(s: &str) -> Result<Ell> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Ell::Inf);
        }
        let l: u64 = s.parse().map_err(|_| Error::Parse {
            what: "ell",
            input: s.to_string(),
        })?;
        if l == 0 {
            return Err(Error::OutOfDomain("ell must be >= 1 or inf".into()));
        }
        Ok(Ell::Finite(l))
    }
}

/// Full matrices are capped here; 2^15 x 2^15 bits is 128 MB.
pub const MATRIX_K_CAP: u32 = 15;
/// Finite-horizon pair counting is O(4^k); capped independently.
pub const FINITE_COUNT_K_CAP: u32 = 14;
/// First-row counting works to the global word-length cap.
pub const INF_COUNT_K_CAP: u32 = 30;

/// `rho_ell(u, v) = max over i < min(ell, 2^k) of rho(u+i, v+i)`;
/// the reference evaluator, linear in the number of shifts.
pub fn rho_ell(u: &Word, v: &Word, ell: Ell, alpha: &Alpha) -> Result<ExactDistance> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    let k = u.len();
    let shifts = ell.effective(k);
    let mut best = u.rho(v)?;
    for i in 1..shifts {
        let cand = u.add_lr_n(i).rho(&v.add_lr_n(i))?;
        if cand.cmp_at(&best, alpha) == Ordering::Greater {
            best = cand;
        }
    }
    Ok(best)
}

/// The canonical word of an index difference d in (0, 2^k): the unique
/// element of {d, 2^k - d} whose word has the shape `0^h 1 1 ...`
/// (for d = 2^(k-1) both coincide in `0^(k-1) 1`).
pub fn canonical_diff_word(k: usize, d: u64) -> Word {
    debug_assert!(k >= 1 && d >= 1 && d < (1u64 << k));
    let half = 1u64 << (k - 1);
    if d == half {
        return Word::from_index(k, d).expect("valid");
    }
    let t = d.trailing_zeros();
    let odd = d >> t;
    let idx = if odd & 3 == 3 { d } else { (1u64 << k) - d };
    Word::from_index(k, idx).expect("valid")
}

/// Infinite-horizon distance in O(k): aligns the pair so one word becomes
/// 0^k and reads the distance off the canonical difference word.
pub fn rho_inf_fast(u: &Word, v: &Word) -> Result<ExactDistance> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    if u == v {
        return Err(Error::OutOfDomain(
            "rho_inf_fast needs distinct words".into(),
        ));
    }
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    let k = u.len();
    let n = 1u64 << k;
    let d = (v.index_of() + n - u.index_of()) & (n - 1);
    Ok(canonical_diff_word(k, d).kappa())
}

// ---------------------------------------------------------------------------
// Scaled-integer kappa machinery
// ---------------------------------------------------------------------------

/// Increments of kappa along gamma order, scaled by `mult * denom^k` so all
/// values are integers: kappa(g+1) - kappa(g) = alpha^k + alpha^(k-1)
/// (1 - 2 alpha) (1/alpha)^(v2(g)).
struct KappaSteps {
    /// step[j] for dyadic valuation j of the gamma index.
    by_valuation: Vec<BigInt>,
}

impl KappaSteps {
    fn new(k: u32, alpha: &Alpha, mult: &BigInt) -> KappaSteps {
        let p = BigInt::from(alpha.numer());
        let q = BigInt::from(alpha.denom());
        let gap_factor = &q - BigInt::from(2) * &p; // q - 2p > 0
        let mut by_valuation = Vec::with_capacity(k as usize);
        let p_k = p.pow(k);
        for j in 0..k {
            // p^k + (q - 2p) p^(k-1-j) q^j
            let val = &p_k + &gap_factor * p.pow(k - 1 - j) * q.pow(j);
            by_valuation.push(val * mult);
        }
        KappaSteps { by_valuation }
    }

    fn step(&self, g: u64) -> &BigInt {
        &self.by_valuation[g.trailing_zeros() as usize]
    }
}

/// Threshold scaled to the same integer grid as the kappa steps:
/// returns (mult, bound) with `kappa <= eps  iff  kappa * denom^k * mult <= bound`.
fn scaled_threshold(k: u32, alpha: &Alpha, eps: &Rat) -> (BigInt, BigInt) {
    let q = BigInt::from(alpha.denom());
    let mult = eps.denom().clone();
    let bound = eps.numer() * q.pow(k);
    (mult, bound)
}

/// Number of ordered pairs (u, v) with rho(u, v) <= eps: two monotone
/// pointers along gamma order, exact integer arithmetic, O(2^k).
pub fn count_close_pairs_l1(k: u32, alpha: &Alpha, eps: &Rat) -> Result<u64> {
    if k == 0 || k > INF_COUNT_K_CAP {
        return Err(Error::KTooLarge {
            k,
            cap: INF_COUNT_K_CAP,
        });
    }
    if eps.is_negative() {
        return Ok(1u64 << k); // only the diagonal at negative thresholds
    }
    let n = 1u64 << k;
    let (mult, bound) = scaled_threshold(k, alpha, eps);
    let steps = KappaSteps::new(k, alpha, &mult);
    let mut count: u64 = 0;
    let mut lo: u64 = 0;
    let mut hi_val = BigInt::zero();
    let mut lo_val = BigInt::zero();
    for hi in 0..n {
        if hi > 0 {
            hi_val += steps.step(hi);
        }
        while &hi_val - &lo_val > bound {
            lo_val += steps.step(lo + 1);
            lo += 1;
        }
        count += 2 * (hi - lo) + 1;
    }
    Ok(count)
}

/// Gamma order of the largest word whose kappa is <= eps (>= 1 always,
/// since kappa(0^k) = 0). Greedy digit expansion, exact.
pub fn gamma_max_close(k: u32, alpha: &Alpha, eps: &Rat) -> u64 {
    if eps.is_negative() {
        return 1;
    }
    let one_minus_a = alpha.one_minus();
    let a = alpha.to_rat();
    let mut acc = Rat::zero();
    let mut apow = Rat::from_integer(1.into());
    let mut bits: u64 = 0;
    for i in 1..=k {
        let digit = &one_minus_a * &apow;
        let cand = &acc + &digit;
        if cand <= *eps {
            bits |= 1 << (k - i);
            acc = cand;
        }
        apow *= &a;
    }
    bits + 1
}

/// Number of canonical difference words (shape `0^h 1 1 ...`) with gamma
/// order at most gamma_star. Level h words occupy the gamma range
/// (3 * 2^(k-h-2), 2^(k-h)].
fn close_canonical_count(k: u32, gamma_star: u64) -> u64 {
    let mut total = 0;
    for h in 0..k.saturating_sub(1) {
        let base = 1u64 << (k - h - 2);
        total += gamma_star.saturating_sub(3 * base).min(base);
    }
    total
}

/// Number of ordered pairs with `rho_inf <= eps`, from the first row only.
///
/// Each first-row entry is decided by the canonical word of its index
/// difference, and kappa is monotone in gamma order, so one digit expansion
/// of eps determines the whole count.
pub fn close_pair_count_inf(k: u32, alpha: &Alpha, eps: &Rat) -> Result<u64> {
    if k == 0 || k > INF_COUNT_K_CAP {
        return Err(Error::KTooLarge {
            k,
            cap: INF_COUNT_K_CAP,
        });
    }
    if eps.is_negative() {
        return Ok(1u64 << k);
    }
    let gamma_star = gamma_max_close(k, alpha, eps);
    let per_row = 1 + u64::from(gamma_star >= 2) + 2 * close_canonical_count(k, gamma_star);
    Ok(per_row << k)
}

/// The boundary word `0^h 1 1 u` of the first row: the gamma-largest canonical
/// word still eps-close to 0^k, when one exists.
pub fn boundary_word(k: u32, alpha: &Alpha, eps: &Rat) -> Option<Word> {
    let gamma_star = gamma_max_close(k, alpha, eps);
    if gamma_star < 4 || k < 2 {
        return None;
    }
    let w = Word::from_gamma(k as usize, gamma_star).expect("gamma in range");
    let h = (1..=k as usize).take_while(|&i| w.bit(i) == 0).count();
    debug_assert!(h < k as usize && w.bit(h + 1) == 1);
    if h + 2 <= k as usize && w.bit(h + 2) == 1 {
        Some(w) // already canonical
    } else {
        // drop to the largest canonical below: 0^(h+1) 1^(k-h-1)
        let ones = k as usize - h - 1;
        if ones < 2 {
            return None;
        }
        Some(
            Word::zeros(h + 1)
                .concat(&Word::ones(ones))
                .expect("length k"),
        )
    }
}

// ---------------------------------------------------------------------------
// Finite-horizon counting: circular sliding-window maxima per index difference
// ---------------------------------------------------------------------------

/// Per-difference closeness data used by counting and matrix assembly.
fn kappa_f64_by_index_table(k: u32, alpha: &Alpha) -> Vec<f64> {
    let n = 1usize << k;
    let a = alpha.to_f64();
    let one_minus = 1.0 - a;
    // kappa(index) = (1-a) * sum bit_i(index) a^i  (bit 0 = u_1)
    let mut table = vec![0.0f64; n];
    let mut pow = one_minus;
    for bit in 0..k as usize {
        let stride = 1usize << bit;
        let mut i = stride;
        while i < n {
            for entry in &mut table[i..i + stride] {
                *entry += pow;
            }
            i += 2 * stride;
        }
        pow *= a;
    }
    table
}

fn kappa_rat_by_index_table(k: u32, alpha: &Alpha, mult: &BigInt) -> Vec<BigInt> {
    let n = 1usize << k;
    let p = BigInt::from(alpha.numer());
    let q = BigInt::from(alpha.denom());
    // digit value of u_i (1-based): (q - p) p^(i-1) q^(k-i) * mult
    let mut digit = (&q - &p) * q.pow(k - 1) * mult;
    let mut table = vec![BigInt::zero(); n];
    for bit in 0..k as usize {
        let stride = 1usize << bit;
        let mut i = stride;
        while i < n {
            for entry in &mut table[i..i + stride] {
                *entry += &digit;
            }
            i += 2 * stride;
        }
        digit = digit * &p / &q;
    }
    table
}

/// Exact verdict for one pair at a finite horizon.
fn pair_close_exact(
    table: &[BigInt],
    bound: &BigInt,
    n: usize,
    a: usize,
    b: usize,
    len: usize,
) -> bool {
    for m in 0..len {
        let x = &table[(a + m) & (n - 1)];
        let y = &table[(b + m) & (n - 1)];
        let diff = if x >= y { x - y } else { y - x };
        if &diff > bound {
            return false;
        }
    }
    true
}

/// For one index difference d, marks which starting indices a give
/// `rho_ell(word(a), word(a+d)) <= eps`. Float sliding-window max with an
/// exact recheck inside the guard band.
fn close_starts_for_diff(
    k: u32,
    d: u64,
    len: usize,
    eps_f: f64,
    kf: &[f64],
    exact: &dyn Fn(usize, usize) -> bool,
    out: &mut [bool],
) {
    let n = 1usize << k;
    let d = d as usize;
    // seq[i] = |kf[(i+d) % n] - kf[i]|, window max over [a, a+len)
    let mut deque: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    let total = n + len - 1;
    let seq = |i: usize| -> f64 {
        let i = i & (n - 1);
        (kf[(i + d) & (n - 1)] - kf[i]).abs()
    };
    for i in 0..total {
        while let Some(&back) = deque.back() {
            if seq(back) <= seq(i) {
                deque.pop_back();
            } else {
                break;
            }
        }
        deque.push_back(i);
        if i + 1 >= len {
            let a = i + 1 - len;
            while *deque.front().unwrap() < a {
                deque.pop_front();
            }
            let max = seq(*deque.front().unwrap());
            out[a] = if (max - eps_f).abs() <= FLOAT_GUARD {
                exact(a, a + d)
            } else {
                max <= eps_f
            };
        }
    }
}

/// Ordered close-pair count for a finite horizon 1 < ell < inf. O(4^k).
pub fn count_close_pairs_finite(k: u32, alpha: &Alpha, ell: u64, eps: &Rat) -> Result<u64> {
    if k == 0 || k > FINITE_COUNT_K_CAP {
        return Err(Error::KTooLarge {
            k,
            cap: FINITE_COUNT_K_CAP,
        });
    }
    if eps.is_negative() {
        return Ok(1u64 << k);
    }
    let n = 1usize << k;
    let len = Ell::Finite(ell).effective(k as usize) as usize;
    let kf = kappa_f64_by_index_table(k, alpha);
    let (mult, bound) = scaled_threshold(k, alpha, eps);
    let exact_table = kappa_rat_by_index_table(k, alpha, &mult);
    let eps_f = rat_to_f64(eps);
    let counts: u64 = (1..n as u64)
        .into_par_iter()
        .map(|d| {
            let mut marks = vec![false; n];
            let exact = |a: usize, b: usize| pair_close_exact(&exact_table, &bound, n, a, b, len);
            close_starts_for_diff(k, d, len, eps_f, &kf, &exact, &mut marks);
            marks.iter().filter(|&&m| m).count() as u64
        })
        .sum();
    Ok(counts + n as u64) // diagonal pairs are always close
}

/// Dispatches the close-pair count for any horizon.
pub fn count_close_pairs(k: u32, alpha: &Alpha, ell: Ell, eps: &Rat) -> Result<u64> {
    match ell {
        Ell::Finite(1) => count_close_pairs_l1(k, alpha, eps),
        Ell::Finite(l) => {
            if l >= 1u64 << k {
                close_pair_count_inf(k, alpha, eps)
            } else {
                count_close_pairs_finite(k, alpha, l, eps)
            }
        }
        Ell::Inf => close_pair_count_inf(k, alpha, eps),
    }
}

// ---------------------------------------------------------------------------
// Materialized bit matrices
// ---------------------------------------------------------------------------

/// Symmetric 2^k x 2^k bit matrix of eps-closeness, indexed by gamma order.
pub struct DistanceMatrix {
    pub k: u32,
    pub alpha: Alpha,
    pub ell: Ell,
    pub eps: Rat,
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry at 1-based gamma coordinates.
    pub fn get(&self, i: u64, j: u64) -> bool {
        debug_assert!(i >= 1 && j >= 1 && i <= self.n as u64 && j <= self.n as u64);
        let (r, c) = ((i - 1) as usize, (j - 1) as usize);
        self.bits[r * self.words_per_row + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn ones_count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (1..=self.n as u64).all(|i| (1..=self.n as u64).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Portable bitmap (P1) rendering, one pixel per entry, 1 = close.
    pub fn write_pbm<W: std::io::Write>(&self, header: &str, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "P1")?;
        if !header.is_empty() {
            writeln!(out, "# {header}")?;
        }
        writeln!(out, "{} {}", self.n, self.n)?;
        for i in 1..=self.n as u64 {
            let mut line = String::with_capacity(self.n * 2);
            for j in 1..=self.n as u64 {
                line.push(if self.get(i, j) { '1' } else { '0' });
                if j < self.n as u64 {
                    line.push(' ');
                }
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Builds the full matrix. Capped at k <= 15.
pub fn build_matrix(k: u32, alpha: &Alpha, ell: Ell, eps: &Rat) -> Result<DistanceMatrix> {
    if k == 0 || k > MATRIX_K_CAP {
        return Err(Error::KTooLarge {
            k,
            cap: MATRIX_K_CAP,
        });
    }
    let n = 1usize << k;
    let words_per_row = n.div_ceil(64);
    let mut bits = vec![0u64; n * words_per_row];

    match ell {
        Ell::Finite(1) => {
            // each row's close set is a contiguous gamma interval around the
            // diagonal; sweep it with two monotone pointers
            let (mult, bound) = scaled_threshold(k, alpha, eps);
            let steps = KappaSteps::new(k, alpha, &mult);
            let mut kappa = Vec::with_capacity(n);
            kappa.push(BigInt::zero());
            for g in 1..n as u64 {
                let prev = kappa.last().unwrap().clone();
                kappa.push(prev + steps.step(g));
            }
            if eps.is_negative() {
                for r in 0..n {
                    set_bit(&mut bits, words_per_row, r, r);
                }
            } else {
                let mut lo = 0usize;
                let mut hi = 0usize;
                for r in 0..n {
                    while &kappa[r] - &kappa[lo] > bound {
                        lo += 1;
                    }
                    hi = hi.max(r);
                    while hi + 1 < n && &kappa[hi + 1] - &kappa[r] <= bound {
                        hi += 1;
                    }
                    for c in lo..=hi {
                        set_bit(&mut bits, words_per_row, r, c);
                    }
                }
            }
        }
        Ell::Inf => {
            // closeness depends only on the index difference
            let close_d: Vec<bool> = {
                let mut v = vec![false; n];
                v[0] = true;
                for d in 1..n as u64 {
                    let w = canonical_diff_word(k as usize, d);
                    v[d as usize] = w.kappa().le_rat(eps, alpha);
                }
                v
            };
            fill_by_difference(k, &close_d, &mut bits, words_per_row);
        }
        Ell::Finite(l) => {
            if l >= 1u64 << k {
                return build_matrix(k, alpha, Ell::Inf, eps);
            }
            let len = l as usize;
            let kf = kappa_f64_by_index_table(k, alpha);
            let (mult, bound) = scaled_threshold(k, alpha, eps);
            let exact_table = kappa_rat_by_index_table(k, alpha, &mult);
            let eps_f = rat_to_f64(eps);
            let rev = |idx: usize| -> usize {
                Word::from_index(k as usize, idx as u64).unwrap().packed() as usize
            };
            for r in 0..n {
                set_bit(&mut bits, words_per_row, r, r);
            }
            let mut marks = vec![false; n];
            for d in 1..n as u64 {
                let exact =
                    |a: usize, b: usize| pair_close_exact(&exact_table, &bound, n, a, b, len);
                close_starts_for_diff(k, d, len, eps_f, &kf, &exact, &mut marks);
                for (a, &close) in marks.iter().enumerate() {
                    if close {
                        let r = rev(a);
                        let c = rev((a + d as usize) & (n - 1));
                        set_bit(&mut bits, words_per_row, r, c);
                    }
                }
            }
        }
    }

    Ok(DistanceMatrix {
        k,
        alpha: *alpha,
        ell,
        eps: eps.clone(),
        n,
        words_per_row,
        bits,
    })
}

fn set_bit(bits: &mut [u64], words_per_row: usize, r: usize, c: usize) {
    bits[r * words_per_row + c / 64] |= 1 << (c % 64);
}

fn fill_by_difference(k: u32, close_d: &[bool], bits: &mut [u64], words_per_row: usize) {
    let n = 1usize << k;
    let close_list: Vec<usize> = (0..n).filter(|&d| close_d[d]).collect();
    bits.par_chunks_mut(words_per_row)
        .enumerate()
        .for_each(|(r, row)| {
            // r is the 0-based gamma index; its word has packed value r
            let a = Word::from_packed(k as usize, r as u32).unwrap().index_of() as usize;
            for &d in &close_list {
                let b = (a + d) & (n - 1);
                let c = Word::from_index(k as usize, b as u64).unwrap().packed() as usize;
                row[c / 64] |= 1 << (c % 64);
            }
        });
}

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

/// Outcome of one pattern check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternCheck {
    pub holds: bool,
    /// (source entry, implied entry) of the first violation.
    pub first_violation: Option<((u64, u64), (u64, u64))>,
}

impl PatternCheck {
    fn ok() -> PatternCheck {
        PatternCheck {
            holds: true,
            first_violation: None,
        }
    }

    fn fail(src: (u64, u64), at: (u64, u64)) -> PatternCheck {
        PatternCheck {
            holds: false,
            first_violation: Some((src, at)),
        }
    }
}

/// One check per pattern, deterministic for fixed inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternReport {
    pub a0: PatternCheck,
    pub a1: PatternCheck,
    pub b0: PatternCheck,
    pub b1: PatternCheck,
    pub c0: PatternCheck,
    pub c1: PatternCheck,
}

impl PatternReport {
    pub fn all_hold(&self) -> bool {
        self.a0.holds
            && self.a1.holds
            && self.b0.holds
            && self.b1.holds
            && self.c0.holds
            && self.c1.holds
    }
}

/// s_j: the integer with 2^(s_j) < j <= 2^(s_j + 1), defined for j >= 2.
fn s_index(j: u64) -> u32 {
    debug_assert!(j >= 2);
    63 - (j - 1).leading_zeros()
}

trait BitGrid: Sync {
    fn n(&self) -> u64;
    fn at(&self, i: u64, j: u64) -> bool;
}

impl BitGrid for DistanceMatrix {
    fn n(&self) -> u64 {
        self.n as u64
    }
    fn at(&self, i: u64, j: u64) -> bool {
        self.get(i, j)
    }
}

/// A plain boolean grid, used by the fuzz tests.
pub struct RawMatrix {
    pub n: u64,
    pub data: Vec<bool>,
}

impl BitGrid for RawMatrix {
    fn n(&self) -> u64 {
        self.n
    }
    fn at(&self, i: u64, j: u64) -> bool {
        self.data[((i - 1) * self.n + (j - 1)) as usize]
    }
}

fn check_a0(m: &dyn BitGrid) -> PatternCheck {
    let n = m.n();
    // zeros spread away from the diagonal; adjacency form, induction closes it
    for i in 1..=n {
        for j in 1..=n {
            if i == j || m.at(i, j) {
                continue;
            }
            if i > j {
                if i < n && m.at(i + 1, j) {
                    return PatternCheck::fail((i, j), (i + 1, j));
                }
                if j > 1 && m.at(i, j - 1) {
                    return PatternCheck::fail((i, j), (i, j - 1));
                }
            } else {
                if i > 1 && m.at(i - 1, j) {
                    return PatternCheck::fail((i, j), (i - 1, j));
                }
                if j < n && m.at(i, j + 1) {
                    return PatternCheck::fail((i, j), (i, j + 1));
                }
            }
        }
    }
    PatternCheck::ok()
}

fn check_a1(m: &dyn BitGrid) -> PatternCheck {
    let n = m.n();
    // ones spread towards the diagonal
    for i in 1..=n {
        for j in 1..=n {
            if i == j || !m.at(i, j) {
                continue;
            }
            if i > j {
                if !m.at(i - 1, j) {
                    return PatternCheck::fail((i, j), (i - 1, j));
                }
                if !m.at(i, j + 1) {
                    return PatternCheck::fail((i, j), (i, j + 1));
                }
            } else {
                if !m.at(i + 1, j) {
                    return PatternCheck::fail((i, j), (i + 1, j));
                }
                if !m.at(i, j - 1) {
                    return PatternCheck::fail((i, j), (i, j - 1));
                }
            }
        }
    }
    PatternCheck::ok()
}

fn check_b0(m: &dyn BitGrid) -> PatternCheck {
    let n = m.n();
    for j in 1..=n {
        if m.at(1, j) {
            continue;
        }
        for t in 1..=(n - j) {
            if m.at(1 + t, j + t) {
                return PatternCheck::fail((1, j), (1 + t, j + t));
            }
        }
    }
    PatternCheck::ok()
}

fn check_b1(m: &dyn BitGrid) -> PatternCheck {
    let n = m.n();
    for j in 2..=n {
        if !m.at(1, j) {
            continue;
        }
        let step = 1u64 << (s_index(j) + 1);
        let mut h = 0u64;
        while j + h * step <= n {
            if !m.at(1 + h * step, j + h * step) {
                return PatternCheck::fail((1, j), (1 + h * step, j + h * step));
            }
            if (h + 1) * step <= n {
                let (r, c) = (1 + (h + 1) * step - j, (h + 1) * step);
                if !m.at(r, c) {
                    return PatternCheck::fail((1, j), (r, c));
                }
            }
            h += 1;
        }
    }
    PatternCheck::ok()
}

fn check_c0(m: &dyn BitGrid) -> PatternCheck {
    let n = m.n();
    for j in 2..=n {
        let s = s_index(j);
        let step = 1u64 << (s + 1);
        for mm in 0..=s {
            let row = 1u64 << mm;
            if m.at(row, j) {
                continue;
            }
            let mut h = 0u64;
            while j + h * step <= n {
                if !(!m.at(row + h * step, j + h * step)) {
                    return PatternCheck::fail((row, j), (row + h * step, j + h * step));
                }
                if (h + 1) * step <= n {
                    let (r, c) = (1 + (h + 1) * step - j, 1 + (h + 1) * step - row);
                    if m.at(r, c) {
                        return PatternCheck::fail((row, j), (r, c));
                    }
                }
                h += 1;
            }
        }
    }
    PatternCheck::ok()
}

fn check_c1(m: &dyn BitGrid) -> PatternCheck {
    let n = m.n();
    for j in 2..=n {
        let s = s_index(j);
        let step = 1u64 << (s + 1);
        for mm in 0..=s {
            let row = 1u64 << mm;
            if !m.at(row, j) {
                continue;
            }
            let n_cap = row.min(j - (1u64 << s));
            let mut h = 0u64;
            while j + h * step <= n {
                for t in 0..n_cap {
                    let (r, c) = (row + h * step - t, j + h * step - t);
                    if !m.at(r, c) {
                        return PatternCheck::fail((row, j), (r, c));
                    }
                }
                h += 1;
            }
        }
    }
    PatternCheck::ok()
}

fn verify_patterns_grid(m: &dyn BitGrid) -> PatternReport {
    PatternReport {
        a0: check_a0(m),
        a1: check_a1(m),
        b0: check_b0(m),
        b1: check_b1(m),
        c0: check_c0(m),
        c1: check_c1(m),
    }
}

/// Checks all six patterns on a one-step distance matrix.
pub fn verify_patterns(m: &DistanceMatrix) -> Result<PatternReport> {
    if m.ell != Ell::Finite(1) {
        return Err(Error::WrongEll {
            expected: "1".into(),
        });
    }
    Ok(verify_patterns_grid(m))
}

/// Pattern checks on a raw 0/1 grid; used to show the checker is not vacuous.
pub fn verify_patterns_raw(m: &RawMatrix) -> PatternReport {
    verify_patterns_grid(m)
}

// ---------------------------------------------------------------------------
// Existence of close-but-eventually-distant pairs (alpha > 1/3)
// ---------------------------------------------------------------------------

/// For 1/3 < alpha < 1/2 and eps < 1, constructs a pair with
/// `rho(u, v) <= eps` but `rho_inf(u, v) > eps`, following the two cases
/// of the constructive proof. Both properties are re-verified exactly.
pub fn existence_pair(alpha: &Alpha, eps: &Rat) -> Result<(Word, Word)> {
    if 3 * alpha.numer() <= alpha.denom() {
        return Err(Error::OutOfDomain(
            "existence pair requires alpha > 1/3".into(),
        ));
    }
    if !eps.is_positive() || *eps >= Rat::from_integer(1.into()) {
        return Err(Error::OutOfDomain("eps must lie in (0, 1)".into()));
    }
    // h with alpha^(h+1) < eps <= alpha^h
    let mut h: u32 = 0;
    while !(alpha.pow(h + 1) < *eps && *eps <= alpha.pow(h)) {
        h += 1;
        if h as usize > crate::words::MAX_K * 4 {
            return Err(Error::OutOfDomain("eps too small".into()));
        }
    }
    let max_k = crate::words::MAX_K as u32;

    if *eps < alpha.pow(h) {
        // find k with alpha^h (1 - 2 alpha) + alpha^k <= eps < alpha^h - alpha^k
        let base = alpha.pow(h) * alpha.one_minus_two();
        let mut k = h + 2;
        loop {
            if k > max_k {
                return Err(Error::OutOfDomain(
                    "no witness length below the word-length cap".into(),
                ));
            }
            let ak = alpha.pow(k);
            if &base + &ak <= *eps && *eps < alpha.pow(h) - &ak {
                break;
            }
            k += 1;
        }
        let k = k as usize;
        let hu = h as usize;
        let u = Word::zeros(hu + 1).concat(&Word::ones(k - hu - 1))?;
        let v = Word::zeros(hu)
            .concat(&Word::ones(1))?
            .concat(&Word::zeros(k - hu - 1))?;
        let (u, v) = if rho_inf_fast(&u, &v)?.le_rat(eps, alpha) {
            // fall back to the aligned pair (0^k, v)
            (Word::zeros(k), v)
        } else {
            (u, v)
        };
        debug_assert!(u.rho(&v)?.le_rat(eps, alpha));
        if rho_inf_fast(&u, &v)?.le_rat(eps, alpha) {
            return Err(Error::OutOfDomain("witness construction failed".into()));
        }
        Ok((u, v))
    } else {
        // eps = alpha^h exactly; needs h > 0, guaranteed since eps < 1
        debug_assert!(h > 0);
        // k with alpha^(h-1) (1 - 2 alpha) + alpha^k <= alpha^h
        let base = alpha.pow(h - 1) * alpha.one_minus_two();
        let mut k = h + 1;
        loop {
            if k > max_k {
                return Err(Error::OutOfDomain(
                    "no witness length below the word-length cap".into(),
                ));
            }
            if &base + alpha.pow(k) <= alpha.pow(h) {
                break;
            }
            k += 1;
        }
        let k = k as usize;
        let hu = h as usize;
        let u = Word::zeros(hu).concat(&Word::ones(k - hu))?;
        let v = Word::zeros(hu - 1)
            .concat(&Word::ones(1))?
            .concat(&Word::zeros(k - hu))?;
        debug_assert!(u.rho(&v)?.le_rat(eps, alpha));
        if rho_inf_fast(&u, &v)?.le_rat(eps, alpha) {
            return Err(Error::OutOfDomain("witness construction failed".into()));
        }
        Ok((u, v))
    }
}
