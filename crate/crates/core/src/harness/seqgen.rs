//! Seeded coefficient sequences. Each (master_seed, index) pair selects an
//! independent ChaCha stream, so instances can be generated in any order.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expsum::{unit_phase, CoeffSeq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeqTag {
    Ones,
    UnitPhase,
    Rademacher,
}

impl SeqTag {
    pub const ALL: [SeqTag; 3] = [SeqTag::Ones, SeqTag::UnitPhase, SeqTag::Rademacher];

    pub fn as_str(self) -> &'static str {
        match self {
            SeqTag::Ones => "ones",
            SeqTag::UnitPhase => "unit_phase",
            SeqTag::Rademacher => "rademacher",
        }
    }
}

impl fmt::Display for SeqTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeqTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeqTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTag(s.to_string()))
    }
}

/// The generator for stream `index` under `master_seed`.
pub fn stream_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

pub fn gen_sequence(tag: SeqTag, support: &[i64], master_seed: u64, index: u64) -> Result<CoeffSeq> {
    let mut rng = stream_rng(master_seed, index);
    let pairs: Vec<(i64, Complex64)> = support
        .iter()
        .map(|&l| {
            let w = match tag {
                SeqTag::Ones => Complex64::new(1.0, 0.0),
                SeqTag::UnitPhase => unit_phase(rng.random::<f64>()),
                SeqTag::Rademacher => {
                    if rng.random::<bool>() {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(-1.0, 0.0)
                    }
                }
            };
            (l, w)
        })
        .collect();
    CoeffSeq::new(pairs)
}

/// `amount` distinct integers from [lo, hi], ascending.
pub fn random_subset(lo: i64, hi: i64, amount: usize, master_seed: u64, index: u64) -> Result<Vec<i64>> {
    let len = (hi - lo + 1).max(0) as usize;
    if amount > len {
        return Err(Error::InvalidParams(format!(
            "cannot draw {amount} elements from [{lo}, {hi}]"
        )));
    }
    let mut rng = stream_rng(master_seed, index);
    let mut out: Vec<i64> = index::sample(&mut rng, len, amount)
        .into_iter()
        .map(|i| lo + i as i64)
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Keeps each element with probability 1/2; the largest survives if all drop.
pub fn random_half(items: &[i64], master_seed: u64, index: u64) -> Vec<i64> {
    let mut rng = stream_rng(master_seed, index);
    let mut out: Vec<i64> = items.iter().copied().filter(|_| rng.random::<bool>()).collect();
    if out.is_empty() {
        if let Some(&last) = items.last() {
            out.push(last);
        }
    }
    out
}
