//! Batched Monte-Carlo estimation with reproducible RNG streams.
//!
//! Batch `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream
//! `stream_base + i`. Batch statistics are merged in index order, so the
//! estimate does not depend on how an [`Executor`] schedules batches.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Executor;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub samples: u64,
    pub batches: u32,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            batches: 64,
            seed: DEFAULT_SEED,
        }
    }
}

impl McSettings {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 10_000 {
            return Err(Error::invalid("mc_samples", "must be at least 10000"));
        }
        if self.batches == 0 || u64::from(self.batches) > self.samples {
            return Err(Error::invalid("mc_batches", "must be in 1..=mc_samples"));
        }
        Ok(())
    }
}

/// Running mean and sum of squared deviations (Welford).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BatchStats {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl BatchStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise merge.
    pub fn merge(self, other: BatchStats) -> BatchStats {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let (na, nb, nf) = (self.n as f64, other.n as f64, n as f64);
        BatchStats {
            n,
            mean: self.mean + d * nb / nf,
            m2: self.m2 + other.m2 + d * d * na * nb / nf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    pub fn from_stats(s: BatchStats) -> Self {
        let var = if s.n > 1 { s.m2 / (s.n - 1) as f64 } else { 0.0 };
        McEstimate {
            mean: s.mean,
            stderr: libm::sqrt(var / s.n as f64),
            samples: s.n,
        }
    }

    /// Estimate scaled by a constant factor.
    pub fn scaled(self, k: f64) -> Self {
        McEstimate {
            mean: self.mean * k,
            stderr: self.stderr * k.abs(),
            samples: self.samples,
        }
    }
}

pub(crate) fn batch_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn batch_size(settings: &McSettings, i: usize) -> u64 {
    let b = u64::from(settings.batches);
    let base = settings.samples / b;
    let extra = settings.samples % b;
    base + u64::from((i as u64) < extra)
}

/// Estimates `E[sample(rng)]` over `settings.samples` draws.
pub fn estimate<E, S>(exec: &E, settings: &McSettings, stream_base: u64, sample: S) -> Result<McEstimate>
where
    E: Executor,
    S: Fn(&mut ChaCha8Rng) -> f64 + Sync + Send,
{
    settings.validate()?;
    let stats: Vec<BatchStats> = exec.map_indexed(settings.batches as usize, |i| {
        let mut rng = batch_rng(settings.seed, stream_base + i as u64);
        let mut st = BatchStats::default();
        for _ in 0..batch_size(settings, i) {
            st.push(sample(&mut rng));
        }
        st
    });
    let total = stats.into_iter().fold(BatchStats::default(), BatchStats::merge);
    let est = McEstimate::from_stats(total);
    if !(est.mean.is_finite() && est.stderr.is_finite()) {
        return Err(Error::NonFinite("monte-carlo estimate"));
    }
    Ok(est)
}
