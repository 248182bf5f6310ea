//! Reproducible random streams and the variate samplers used by the model.
//!
//! Each replication owns one stream derived deterministically from
//! (base seed, condition index, replication index), so replications use
//! separate random number sequences while staying reproducible run to run.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EngineError;
use crate::Minutes;

/// Generator identifier recorded in run metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

// SplitMix64 finalizer; used to expand seed material.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One reproducible random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    /// Derives a stream from a base seed and an arbitrary list of indices.
    /// Identical inputs produce identical variate sequences; any change to an
    /// index yields a statistically independent stream.
    pub fn from_seed_parts(base_seed: u64, parts: &[u64]) -> Self {
        let mut state = splitmix(base_seed);
        for &p in parts {
            state = splitmix(state ^ splitmix(p));
        }
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            state = splitmix(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        RngStream {
            inner: ChaCha8Rng::from_seed(seed),
        }
    }

    /// Stream for one (condition, replication) cell of an experiment.
    pub fn for_replication(base_seed: u64, condition: u64, replication: u64) -> Self {
        Self::from_seed_parts(base_seed, &[condition, replication])
    }

    /// Compact label for reports; derived from the same material as the
    /// stream itself.
    pub fn seed_label(base_seed: u64, condition: u64, replication: u64) -> u64 {
        let mut state = splitmix(base_seed);
        for p in [condition, replication] {
            state = splitmix(state ^ splitmix(p));
        }
        state
    }

    /// True with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> Result<bool, EngineError> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(EngineError::InvalidProbability(p));
        }
        Ok(self.inner.gen::<f64>() < p)
    }

    fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Triangular distribution sampled by inverse CDF. Parameters are validated
/// once at construction so sampling is infallible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangular {
    min: f64,
    mode: f64,
    max: f64,
}

impl Triangular {
    pub fn new(min: f64, mode: f64, max: f64) -> Result<Self, EngineError> {
        let ordered = min <= mode && mode <= max;
        if !ordered || !min.is_finite() || !mode.is_finite() || !max.is_finite() {
            return Err(EngineError::InvalidTriangular { min, mode, max });
        }
        Ok(Triangular { min, mode, max })
    }

    pub fn mean(&self) -> f64 {
        (self.min + self.mode + self.max) / 3.0
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let range = self.max - self.min;
        if range == 0.0 {
            return self.min;
        }
        let u = rng.uniform();
        let cut = (self.mode - self.min) / range;
        if u < cut {
            self.min + (u * range * (self.mode - self.min)).sqrt()
        } else {
            self.max - ((1.0 - u) * range * (self.max - self.mode)).sqrt()
        }
    }

    /// Analytic CDF; used by distribution tests.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.min {
            0.0
        } else if x >= self.max {
            1.0
        } else if x < self.mode {
            (x - self.min).powi(2) / ((self.max - self.min) * (self.mode - self.min))
        } else {
            1.0 - (self.max - x).powi(2) / ((self.max - self.min) * (self.max - self.mode))
        }
    }
}

/// Exponential inter-event gaps for a rate expressed in events per hour,
/// sampled in minutes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    mean_minutes: f64,
}

impl Exponential {
    pub fn from_rate_per_hour(rate: f64) -> Result<Self, EngineError> {
        if rate <= 0.0 || !rate.is_finite() || rate.is_nan() {
            return Err(EngineError::InvalidRate(rate));
        }
        Ok(Exponential {
            mean_minutes: 60.0 / rate,
        })
    }

    pub fn mean_minutes(&self) -> Minutes {
        self.mean_minutes
    }

    pub fn sample(&self, rng: &mut RngStream) -> Minutes {
        // 1 - u lies in (0, 1], so ln() is finite; resample the measure-zero
        // u == 0 case to keep the variate strictly positive.
        loop {
            let u = rng.uniform();
            let x = -(1.0 - u).ln() * self.mean_minutes;
            if x > 0.0 {
                return x;
            }
        }
    }
}
