//! Spin-rotation coupling in a two-path neutron interferometer.
//!
//! The crate follows a spin-1/2 neutron through static and rotating
//! π-spin flippers, superposes the two interferometer paths, and turns the
//! resulting intensity beat into synthetic detector counts that can be fitted
//! back to a rotation frequency and an energy splitting `ħΩ`.
//!
//! Layout:
//!
//! * [`spinor`], [`propagator`], [`constants`], [`element`], [`beam`],
//!   [`flipper`], [`numeric`]: spin algebra, field elements and their exact
//!   and numerically integrated propagators.
//! * [`wave`]: photon-sector helicity-rotation formulas.
//! * [`interferometer`]: path composition and intensity traces.
//! * [`detection`]: Poisson counting and sinusoid fitting.
//! * [`config`], [`report`]: JSON experiment configuration, CSV and text
//!   reports used by the `spinrot` binary.
//!
//! Data-parallel loops (trace samples, seeds, sweep points) go through
//! [`exec`], which uses rayon when the `parallel` feature is enabled and
//! falls back to plain iteration otherwise.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beam;
pub mod config;
pub mod constants;
pub mod detection;
pub mod element;
pub mod error;
pub mod exec;
pub mod flipper;
pub mod interferometer;
pub mod numeric;
pub mod propagator;
pub mod report;
pub mod spinor;
pub mod wave;

pub use beam::{neutron_speed, BeamSpec};
pub use constants::PhysicalConstants;
pub use detection::{
    energy_shift_report, fit_beat, fit_intensity, sample_counts, BeatFit, CountTrace,
    CountingConfig, EnergyShift,
};
pub use element::{FieldElement, QuadratureCoil, RotatingFlipper, RotationProfile, StaticFlipper};
pub use error::{Error, Result};
pub use exec::Execution;
pub use flipper::{
    flipper_width, oscillating_flipper_propagator, quadrature_coil_propagator,
    rotating_flipper_propagator, rotating_frame_hamiltonian, spin_flip_energy_shift,
    static_flipper_propagator,
};
pub use interferometer::{
    larmor_equivalent_field, output_intensity, path_propagator, simulate_trace, BeamPath,
    IntensityTrace, InterferometerConfig, PathLabel, Sampling,
};
pub use numeric::{evolve_numeric, evolve_numeric_propagator, NumericEvolution, StepControl};
pub use propagator::SpinPropagator;
pub use spinor::Spinor;
pub use wave::{
    doppler_shift, half_wave_plate_shift, rotating_observer_energy, Helicity, RotatingObserver,
};
