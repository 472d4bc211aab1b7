#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use spinrot_core::element::{QuadratureCoil, RotatingFlipper, RotationProfile, StaticFlipper};
use spinrot_core::{
    flipper_width, BeamPath, BeamSpec, FieldElement, InterferometerConfig, PathLabel,
    PhysicalConstants, Sampling,
};

pub const FIELD: f64 = 2e-3;
pub const WAVELENGTH: f64 = 2e-10;
pub const LEG: f64 = 0.1;

pub fn beam(c: &PhysicalConstants) -> BeamSpec {
    BeamSpec::longitudinal(WAVELENGTH, c).unwrap()
}

pub fn width(c: &PhysicalConstants) -> f64 {
    flipper_width(beam(c).speed, FIELD, c).unwrap()
}

pub fn rotating(omega: f64, c: &PhysicalConstants) -> RotatingFlipper {
    RotatingFlipper {
        field: FIELD,
        omega,
        alpha0: FRAC_PI_2,
        width: width(c),
        profile: RotationProfile::Continuous,
    }
}

pub fn quadrature(omega: f64, c: &PhysicalConstants) -> QuadratureCoil {
    QuadratureCoil {
        field: FIELD,
        omega,
        alpha0: FRAC_PI_2,
        width: width(c),
    }
}

pub fn static_flipper(c: &PhysicalConstants) -> StaticFlipper {
    StaticFlipper {
        field: FIELD,
        axis_angle: FRAC_PI_2,
        width: width(c),
    }
}

/// Two-path setup: `coil` in path I, a static flipper aligned with the coil's
/// starting axis in path II, equal free-flight legs on either side.
pub fn setup(
    coil: FieldElement,
    sampling: Sampling,
    c: &PhysicalConstants,
) -> InterferometerConfig {
    let leg = FieldElement::FreeFlight { length: LEG };
    InterferometerConfig {
        path_i: BeamPath::new(PathLabel::I, vec![leg, coil, leg]),
        path_ii: BeamPath::new(
            PathLabel::II,
            vec![leg, FieldElement::StaticFlipper(static_flipper(c)), leg],
        ),
        beam: beam(c),
        phase_shifter_chi: 0.0,
        sampling,
        wavelength_spread: None,
    }
}

pub fn sampling(t_start: f64, t_end: f64, n_samples: usize) -> Sampling {
    Sampling {
        t_start,
        t_end,
        n_samples,
    }
}

/// Small deterministic uniform source for randomized checks.
pub struct Draws(SplitMix64);

impl Draws {
    pub fn new(seed: u64) -> Self {
        Draws(SplitMix64::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + (hi.ln() - lo.ln()) * self.unit()).exp()
    }
}
