//! Binary words and the two additions of the adding machine.
//!
//! A word `u = u_1 u_2 ... u_k` is stored bit-packed with `u_1` in the most
//! significant used position, so comparing packed values is exactly the
//! gamma order. Two group structures live on words of a fixed length:
//!
//! * `add_lr` — carry runs from u_1 towards u_k ("odometer" addition);
//!   in the packed value this is addition of bit-reversed integers.
//! * `add_rl` — ordinary binary addition with u_k as the low digit;
//!   in the packed value this is plain machine addition.

use crate::alpha::Alpha;
use crate::error::{Error, Result};
use crate::exact::ExactDistance;
use std::fmt;
use std::str::FromStr;

/// Maximum supported word length. 2^k indexing stays comfortably inside
/// machine integers and row-based matrix work stays in memory.
pub const MAX_K: usize = 30;

/// A fixed-length binary word, the symbolic address of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    len: u8,
    /// u_1 at bit (len-1), u_k at bit 0.
    bits: u32,
}

impl Word {
    /// The empty word (identity for concatenation).
    pub const EMPTY: Word = Word { len: 0, bits: 0 };

    pub fn zeros(k: usize) -> Word {
        Word::checked(k, 0).expect("length within cap")
    }

    pub fn ones(k: usize) -> Word {
        Word::checked(k, if k == 0 { 0 } else { (1u32 << k) - 1 }).expect("length within cap")
    }

    fn checked(k: usize, bits: u32) -> Result<Word> {
        if k > MAX_K {
            return Err(Error::WordTooLong { len: k, max: MAX_K });
        }
        debug_assert!(k == 32 || bits >> k == 0);
        Ok(Word { len: k as u8, bits })
    }

    /// Word with the given packed value (`u_1` = most significant used bit).
    pub fn from_packed(k: usize, bits: u32) -> Result<Word> {
        if k > MAX_K {
            return Err(Error::WordTooLong { len: k, max: MAX_K });
        }
        if k < 32 && bits >> k != 0 {
            return Err(Error::OutOfDomain(format!(
                "packed value {bits} does not fit in {k} bits"
            )));
        }
        Word::checked(k, bits)
    }

    /// The word `u` of length `k` with `index_of(u) = n mod 2^k`.
    pub fn from_index(k: usize, n: u64) -> Result<Word> {
        if k > MAX_K {
            return Err(Error::WordTooLong { len: k, max: MAX_K });
        }
        if k == 0 {
            return Ok(Word::EMPTY);
        }
        let m = (n & ((1u64 << k) - 1)) as u32;
        Word::checked(k, m.reverse_bits() >> (32 - k))
    }

    /// The word with `gamma(u) = g` (requires 1 <= g <= 2^k).
    pub fn from_gamma(k: usize, g: u64) -> Result<Word> {
        if k > MAX_K {
            return Err(Error::WordTooLong { len: k, max: MAX_K });
        }
        if g < 1 || g > (1u64 << k) {
            return Err(Error::OutOfDomain(format!(
                "gamma value {g} outside [1, 2^{k}]"
            )));
        }
        Word::checked(k, (g - 1) as u32)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The digit u_i, 1-based from the left.
    pub fn bit(&self, i: usize) -> u8 {
        debug_assert!(i >= 1 && i <= self.len());
        ((self.bits >> (self.len() - i)) & 1) as u8
    }

    /// Packed value; lexicographic comparison of packed values is gamma order.
    pub fn packed(&self) -> u32 {
        self.bits
    }

    /// The order gamma(u) = 1 + u_k + 2 u_{k-1} + ... + 2^{k-1} u_1, in [1, 2^k].
    pub fn gamma(&self) -> Result<u64> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(self.bits as u64 + 1)
    }

    /// The unique n in [0, 2^k) with `zeros(k) add_lr_n n == u`.
    pub fn index_of(&self) -> u64 {
        if self.is_empty() {
            return 0;
        }
        (self.bits.reverse_bits() >> (32 - self.len())) as u64
    }

    fn mask(&self) -> u64 {
        if self.len == 0 {
            0
        } else {
            (1u64 << self.len()) - 1
        }
    }

    fn require_same_len(&self, other: &Word) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// Addition with the carry running left to right, e.g. `100 + 110 = 001`.
    pub fn add_lr(&self, other: &Word) -> Result<Word> {
        self.require_same_len(other)?;
        Word::from_index(self.len(), self.index_of() + other.index_of())
    }

    /// n-fold `add_lr` of `1 0^(k-1)`; the odometer advanced n ticks.
    pub fn add_lr_n(&self, n: u64) -> Word {
        Word::from_index(self.len(), self.index_of().wrapping_add(n)).expect("length preserved")
    }

    /// Inverse element for `add_lr`: `u add_lr neg_lr(u) = 0^k`.
    pub fn neg_lr(&self) -> Word {
        if self.is_empty() {
            return *self;
        }
        let idx = (self.mask() + 1 - self.index_of()) & self.mask();
        Word::from_index(self.len(), idx).expect("length preserved")
    }

    /// Ordinary binary addition (u_k is the low digit), overflow dropped,
    /// e.g. `100 + 110 = 010`.
    pub fn add_rl(&self, other: &Word) -> Result<Word> {
        self.require_same_len(other)?;
        let bits = (self.bits as u64 + other.bits as u64) & self.mask();
        Word::checked(self.len(), bits as u32)
    }

    /// `u` moved n places up in gamma order; errors past `1^k`.
    pub fn succ_rl(&self, n: u64) -> Result<Word> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        let g = self.gamma()?;
        if n > (self.mask() + 1) - g {
            return Err(Error::SuccOverflow);
        }
        Word::checked(self.len(), (self.bits as u64 + n) as u32)
    }

    /// `u` moved n places down in gamma order; errors below `0^k`.
    pub fn pred_rl(&self, n: u64) -> Result<Word> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        let g = self.gamma()?;
        if n >= g {
            return Err(Error::PredUnderflow);
        }
        Word::checked(self.len(), (self.bits as u64 - n) as u32)
    }

    /// Concatenation `u v`.
    pub fn concat(&self, suffix: &Word) -> Result<Word> {
        let k = self.len() + suffix.len();
        if k > MAX_K {
            return Err(Error::WordTooLong { len: k, max: MAX_K });
        }
        Word::checked(k, (self.bits << suffix.len()) | suffix.bits)
    }

    /// The prefix `u_1 .. u_m`.
    pub fn prefix(&self, m: usize) -> Word {
        assert!(m <= self.len());
        Word {
            len: m as u8,
            bits: if m == 0 {
                0
            } else {
                self.bits >> (self.len() - m)
            },
        }
    }

    /// True if `self` begins with `v`.
    pub fn begins_with(&self, v: &Word) -> bool {
        v.len() <= self.len() && self.prefix(v.len()) == *v
    }

    /// Length of the common prefix of two same-length words.
    pub fn common_prefix_len(&self, other: &Word) -> Result<usize> {
        self.require_same_len(other)?;
        if self.bits == other.bits {
            return Ok(self.len());
        }
        let x = self.bits ^ other.bits;
        Ok(self.len() - (32 - x.leading_zeros() as usize))
    }

    /// kappa(u 0^inf) as an exact polynomial in alpha:
    /// `(1 - alpha) * sum u_i alpha^(i-1)`.
    pub fn kappa(&self) -> ExactDistance {
        let mut coeffs = vec![0i64; self.len() + 1];
        for i in 1..=self.len() {
            if self.bit(i) == 1 {
                coeffs[i - 1] += 1;
                coeffs[i] -= 1;
            }
        }
        ExactDistance::from_coeffs(coeffs)
    }

    /// Word distance `rho(u, v) = |kappa(u) - kappa(v)|` as an exact
    /// polynomial. The sign is decided by gamma order, which agrees with
    /// kappa order for every alpha in (0, 1/2).
    pub fn rho(&self, other: &Word) -> Result<ExactDistance> {
        self.require_same_len(other)?;
        if self.bits >= other.bits {
            Ok(&self.kappa() - &other.kappa())
        } else {
            Ok(&other.kappa() - &self.kappa())
        }
    }

    /// Iterator over all words of a length in gamma order.
    pub fn all(k: usize) -> impl Iterator<Item = Word> {
        assert!(k <= MAX_K);
        (0..(1u64 << k)).map(move |b| Word {
            len: k as u8,
            bits: b as u32,
        })
    }
}

/// Convenience: kappa evaluated as f64 for a word given by index.
pub fn kappa_f64_by_index(k: usize, index: u64, alpha: &Alpha) -> f64 {
    let w = Word::from_index(k, index).expect("valid length");
    w.kappa().eval_f64(alpha)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "(empty)");
        }
        for i in 1..=self.len() {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses a 0/1 string with u_1 first, e.g. `100`.
    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.len() > MAX_K {
            return Err(Error::WordTooLong {
                len: s.len(),
                max: MAX_K,
            });
        }
        let mut bits = 0u32;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => {
                        return Err(Error::Parse {
                            what: "word",
                            input: s.to_string(),
                        })
                    }
                };
        }
        Word::checked(s.len(), bits)
    }
}
