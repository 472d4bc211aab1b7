//! Synthetic detector counts and beat-parameter recovery.

mod fit;
mod poisson;

pub use fit::{energy_shift_report, fit_beat, fit_intensity, BeatFit, EnergyShift};
pub use poisson::{
    bin_rng, sample_counts, sample_counts_with, sample_poisson, CountTrace, CountingConfig,
};
