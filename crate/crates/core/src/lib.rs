//! Exact evaluation of bilinear exponential sums with modular square roots
//! over prime fields, the counting quantities that control them, and
//! empirical checks of the associated inequalities.

pub mod counting;
pub mod error;
pub mod expsum;
pub mod field;
pub mod harness;
pub mod sieve;
pub mod verify;

pub use error::{Error, Result};
pub use expsum::{CoeffSeq, IntervalSpec, PhaseFamily, PhaseFn};
pub use field::{PrimeContext, Residue, Roots};
