//! Poisson detector counts.
//!
//! Every bin draws from its own SplitMix64 stream keyed by `(seed, bin)`, so
//! counts do not depend on evaluation order or thread count. Means below 10
//! use sequential inversion; larger means use Hörmann's PTRS transformed
//! rejection.

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::interferometer::IntensityTrace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountingConfig {
    /// counts/s at unit normalized intensity
    pub mean_rate: f64,
    /// s per bin
    pub dwell: f64,
    pub seed: u64,
}

impl CountingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mean_rate > 0.0) || !self.mean_rate.is_finite() {
            return Err(Error::config(
                "counting.mean_rate",
                format!("must be positive, got {}", self.mean_rate),
            ));
        }
        if !(self.dwell > 0.0) || !self.dwell.is_finite() {
            return Err(Error::config(
                "counting.dwell",
                format!("must be positive, got {}", self.dwell),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTrace {
    pub bin_centers: Vec<f64>,
    pub counts: Vec<u64>,
    /// Bin width, s.
    pub dwell: f64,
}

impl CountTrace {
    pub fn new(bin_centers: Vec<f64>, counts: Vec<u64>, dwell: f64) -> Result<Self> {
        if bin_centers.len() != counts.len() {
            return Err(Error::Parse(format!(
                "{} bin centers but {} counts",
                bin_centers.len(),
                counts.len()
            )));
        }
        if !(dwell > 0.0) {
            return Err(Error::Parse(format!("dwell must be positive, got {dwell}")));
        }
        Ok(CountTrace {
            bin_centers,
            counts,
            dwell,
        })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// RNG stream for one bin.
pub fn bin_rng(seed: u64, bin: usize) -> SplitMix64 {
    let salt = SplitMix64::seed_from_u64(bin as u64).next_u64();
    SplitMix64::seed_from_u64(seed ^ salt)
}

/// Uniform on [0, 1) with 53 random bits.
fn uniform<R: Rng>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `ln k!`
fn ln_factorial(k: u64) -> f64 {
    const TABLE: [f64; 10] = [
        0.0,
        0.0,
        std::f64::consts::LN_2,
        1.791_759_469_228_055,
        3.178_053_830_347_146,
        4.787_491_742_782_046,
        6.579_251_212_010_101,
        8.525_161_361_065_415,
        10.604_602_902_745_25,
        12.801_827_480_081_469,
    ];
    if k < 10 {
        return TABLE[k as usize];
    }
    let x = k as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// One Poisson variate with mean `mean` (nonnegative, finite).
pub fn sample_poisson<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    if mean < 10.0 {
        let u = uniform(rng);
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut k = 0u64;
        // the tail beyond 200 is below f64 resolution for mean < 10
        while u > cdf && k < 200 {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
        }
        return k;
    }
    let smu = mean.sqrt();
    let b = 0.931 + 2.53 * smu;
    let a = -0.059 + 0.024_83 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let v_r = 0.9277 - 3.6224 / (b - 2.0);
    let ln_mean = mean.ln();
    loop {
        let u = uniform(rng) - 0.5;
        let v = uniform(rng);
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mean + k * ln_mean - ln_factorial(k as u64);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

pub fn sample_counts(trace: &IntensityTrace, cfg: &CountingConfig) -> CountTrace {
    sample_counts_with(trace, cfg, Execution::default())
}

/// Draw `Poisson(mean_rate · intensity[k] · dwell)` for every sample of the
/// trace. Bin centers are the trace times.
pub fn sample_counts_with(
    trace: &IntensityTrace,
    cfg: &CountingConfig,
    exec: Execution,
) -> CountTrace {
    let counts = map_indexed(trace.len(), exec, |k| {
        let mean = cfg.mean_rate * trace.intensity[k].max(0.0) * cfg.dwell;
        sample_poisson(&mut bin_rng(cfg.seed, k), mean)
    });
    CountTrace {
        bin_centers: trace.times.clone(),
        counts,
        dwell: cfg.dwell,
    }
}
