//! Seeded Monte Carlo coincidence counting.
//!
//! Trials are generated in fixed-size chunks. Chunk `j` of block `k` draws
//! from its own PCG-64 (`Lcg128Xsl64`) stream seeded with
//! `seed ^ (0x9E3779B97F4A7C15 · ((k << 32) | j))`, so the merged counts do
//! not depend on how many worker threads processed the chunks. Uniform
//! variates take the top 53 bits of each 64-bit output.

use std::ops::{Add, AddAssign};

use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlate::JointDistribution;
use crate::error::{Error, Result};

/// Odd multiplier separating substreams.
pub const SUBSTREAM_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;
/// Trials drawn from one substream.
pub const CHUNK_TRIALS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn substream(self, k: u64) -> RngSeed {
        RngSeed(self.0 ^ SUBSTREAM_MULTIPLIER.wrapping_mul(k))
    }

    fn generator(self) -> Pcg64 {
        Pcg64::seed_from_u64(self.0)
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}

fn uniform(rng: &mut Pcg64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Counts per coincidence outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrialCounts {
    pub n11: u64,
    pub n22: u64,
    pub n12: u64,
    pub n21: u64,
}

impl TrialCounts {
    pub fn total(&self) -> u64 {
        self.n11 + self.n22 + self.n12 + self.n21
    }

    fn record(&mut self, outcome: usize) {
        match outcome {
            0 => self.n11 += 1,
            1 => self.n22 += 1,
            2 => self.n12 += 1,
            _ => self.n21 += 1,
        }
    }
}

impl Add for TrialCounts {
    type Output = TrialCounts;

    fn add(self, o: TrialCounts) -> TrialCounts {
        TrialCounts {
            n11: self.n11 + o.n11,
            n22: self.n22 + o.n22,
            n12: self.n12 + o.n12,
            n21: self.n21 + o.n21,
        }
    }
}

impl AddAssign for TrialCounts {
    fn add_assign(&mut self, o: TrialCounts) {
        *self = *self + o;
    }
}

/// Cumulative thresholds in the order (11, 22, 12, 21). Everything from the
/// last outcome with nonzero probability onward is pinned to 1, so rounding
/// in the running sum can never select an impossible outcome.
fn thresholds(jd: &JointDistribution) -> [f64; 4] {
    let p = jd.to_array();
    let last = p.iter().rposition(|&x| x > 0.0).unwrap_or(3);
    let mut cum = [1.0; 4];
    let mut acc = 0.0;
    for i in 0..last {
        acc += p[i].max(0.0);
        cum[i] = acc;
    }
    cum
}

fn sample_chunk(cum: &[f64; 4], trials: u64, seed: RngSeed) -> TrialCounts {
    let mut rng = seed.generator();
    let mut counts = TrialCounts::default();
    for _ in 0..trials {
        let u = uniform(&mut rng);
        let outcome = cum.iter().position(|&c| u < c).unwrap_or(3);
        counts.record(outcome);
    }
    counts
}

/// `n` independent coincidence trials drawn from `jd`.
pub fn sample_outcomes(jd: &JointDistribution, n: u64, seed: RngSeed) -> Result<TrialCounts> {
    sample_outcomes_in_block(jd, n, seed, 0)
}

/// As [`sample_outcomes`], drawing from substream block `block` so that
/// several independent samples (one per sweep point, say) can share a seed.
pub fn sample_outcomes_in_block(
    jd: &JointDistribution,
    n: u64,
    seed: RngSeed,
    block: u32,
) -> Result<TrialCounts> {
    if n == 0 {
        return Err(Error::Input("trial count must be at least 1".into()));
    }
    let cum = thresholds(jd);
    let chunks = n.div_ceil(CHUNK_TRIALS);
    let base = u64::from(block) << 32;
    Ok((0..chunks)
        .into_par_iter()
        .map(|j| {
            let len = CHUNK_TRIALS.min(n - j * CHUNK_TRIALS);
            sample_chunk(&cum, len, seed.substream(base | j))
        })
        .reduce(TrialCounts::default, Add::add))
}

/// Sample degree of correlation with its plug-in standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub c_hat: f64,
    pub std_err: f64,
    pub n: u64,
}

pub fn estimate_correlation(tc: &TrialCounts) -> Result<EstimateWithError> {
    let n = tc.total();
    if n == 0 {
        return Err(Error::Input("no trials to estimate from".into()));
    }
    let agree = (tc.n11 + tc.n22) as f64;
    let disagree = (tc.n12 + tc.n21) as f64;
    let c_hat = (agree - disagree) / n as f64;
    let std_err = ((1.0 - c_hat * c_hat).max(0.0) / n as f64).sqrt();
    Ok(EstimateWithError { c_hat, std_err, n })
}
