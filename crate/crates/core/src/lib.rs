//! Correlation integrals, recurrence rates and asymptotic determinism for a
//! family of slope-one interval maps driven by the binary adding machine.
//!
//! The crate computes these quantities exactly for the periodic
//! approximation maps (rational arithmetic throughout, ties at the
//! threshold decided exactly) and with certified error radii for the limit
//! map. A bit-matrix layer provides the distance matrices, their structural
//! patterns, and a first-row counting shortcut that replaces brute-force
//! pair enumeration.

pub mod alpha;
pub mod analysis;
pub mod distmatrix;
pub mod error;
pub mod exact;
pub mod gapseq;
pub mod maps;
pub mod rqa;
pub mod words;

pub use alpha::{Alpha, Rat};
pub use distmatrix::Ell;
pub use error::{Error, Result};
pub use exact::ExactDistance;
pub use rqa::ApproxValue;
pub use words::Word;
