use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::spinor::Spinor;

/// de Broglie speed `h / (m_n λ)`.
pub fn neutron_speed(wavelength: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(wavelength > 0.0) || !wavelength.is_finite() {
        return Err(Error::NonPositiveWavelength(wavelength));
    }
    Ok(constants.planck_h / (constants.neutron_mass * wavelength))
}

/// Monochromatic neutron beam with a fixed initial spin state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    /// m
    pub wavelength: f64,
    /// m/s
    pub speed: f64,
    pub initial_spin: Spinor,
    /// J
    pub kinetic_energy: f64,
}

impl BeamSpec {
    /// Derives speed and kinetic energy; the spin is normalized.
    pub fn new(
        wavelength: f64,
        initial_spin: Spinor,
        constants: &PhysicalConstants,
    ) -> Result<Self> {
        let speed = neutron_speed(wavelength, constants)?;
        Ok(BeamSpec {
            wavelength,
            speed,
            initial_spin: initial_spin.normalize()?,
            kinetic_energy: 0.5 * constants.neutron_mass * speed * speed,
        })
    }

    /// Longitudinally polarized beam (spin along +z).
    pub fn longitudinal(wavelength: f64, constants: &PhysicalConstants) -> Result<Self> {
        Self::new(wavelength, Spinor::up(), constants)
    }

    /// Same spin state at another wavelength.
    pub fn with_wavelength(&self, wavelength: f64, constants: &PhysicalConstants) -> Result<Self> {
        Self::new(wavelength, self.initial_spin, constants)
    }

    pub fn transit_time(&self, length: f64) -> f64 {
        length / self.speed
    }
}
