//! Seeded sampling from kernel rows.
//!
//! The stream is ChaCha20 (`rand_chacha::ChaCha20Rng::seed_from_u64`), and
//! each draw takes one `f64` uniform in `[0, 1)` and returns the first
//! index whose cumulative probability exceeds it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::Result;
use crate::prob::{FiniteDistribution, Label, StochasticKernel};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20190925;

pub struct Sampler {
    rng: ChaCha20Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn sample_index(&mut self, dist: &FiniteDistribution) -> usize {
        let u: f64 = self.rng.gen();
        let mut cum = 0.0;
        for (i, &p) in dist.probs().iter().enumerate() {
            cum += p;
            if u < cum {
                return i;
            }
        }
        // rounding left u above the total mass
        dist.probs().iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    pub fn sample<'a>(&mut self, dist: &'a FiniteDistribution) -> &'a Label {
        let i = self.sample_index(dist);
        dist.ground().label(i)
    }
}

/// One output label per input label, drawn from the kernel's rows.
pub fn obfuscate(kernel: &StochasticKernel, inputs: &[Label], seed: u64) -> Result<Vec<Label>> {
    let mut sampler = Sampler::new(seed);
    inputs
        .iter()
        .map(|x| {
            let row = kernel.row_of(x)?;
            Ok(sampler.sample(row).clone())
        })
        .collect()
}
