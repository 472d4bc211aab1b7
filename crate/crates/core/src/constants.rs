use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants in SI units. `Default` gives the CODATA 2018 values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalConstants {
    /// J·s
    pub hbar: f64,
    /// kg
    pub neutron_mass: f64,
    /// J·s
    pub planck_h: f64,
    /// rad·s⁻¹·T⁻¹, negative for the neutron.
    pub gyromagnetic_ratio_neutron: f64,
    /// eV per J
    pub ev_per_joule: f64,
}

pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            hbar: 1.054_571_817e-34,
            neutron_mass: 1.674_927_498_04e-27,
            planck_h: 6.626_070_15e-34,
            gyromagnetic_ratio_neutron: -1.832_471_71e8,
            ev_per_joule: 1.0 / ELEMENTARY_CHARGE,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        let entries = [
            ("hbar", self.hbar),
            ("neutron_mass", self.neutron_mass),
            ("planck_h", self.planck_h),
            (
                "gyromagnetic_ratio_neutron",
                self.gyromagnetic_ratio_neutron,
            ),
            ("ev_per_joule", self.ev_per_joule),
        ];
        for (name, value) in entries {
            if !value.is_finite() || value == 0.0 {
                return Err(Error::config(
                    format!("constants.{name}"),
                    format!("must be finite and nonzero, got {value}"),
                ));
            }
        }
        if self.gyromagnetic_ratio_neutron >= 0.0 {
            return Err(Error::config(
                "constants.gyromagnetic_ratio_neutron",
                "must be negative for the neutron",
            ));
        }
        Ok(())
    }

    /// Signed Larmor angular frequency `-γ_n B` for a field magnitude `field`.
    pub fn larmor_frequency(&self, field: f64) -> f64 {
        -self.gyromagnetic_ratio_neutron * field
    }

    pub fn joules_to_ev(&self, energy: f64) -> f64 {
        energy * self.ev_per_joule
    }
}
