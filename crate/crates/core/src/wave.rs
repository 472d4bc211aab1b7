//! Helicity-rotation coupling for waves seen by a rotating observer, and the
//! frequency shift of circularly polarized light through a rotating
//! half-wave plate.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Helicity {
    Positive,
    Negative,
}

impl Helicity {
    pub fn value(self) -> f64 {
        match self {
            Helicity::Positive => 1.0,
            Helicity::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Helicity {
        match self {
            Helicity::Positive => Helicity::Negative,
            Helicity::Negative => Helicity::Positive,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Helicity::Positive => "+",
            Helicity::Negative => "-",
        }
    }
}

impl std::str::FromStr for Helicity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "+1" | "1" | "positive" => Ok(Helicity::Positive),
            "-" | "-1" | "negative" => Ok(Helicity::Negative),
            other => Err(Error::Parse(format!("unknown helicity `{other}`"))),
        }
    }
}

/// Observer rotating at `omega` about the propagation axis with Lorentz
/// factor `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatingObserver {
    pub omega: f64,
    pub gamma: f64,
}

impl RotatingObserver {
    pub fn new(omega: f64, gamma: f64) -> Result<Self> {
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidElement(format!(
                "Lorentz factor must be >= 1, got {gamma}"
            )));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidElement(
                "rotation frequency must be finite".into(),
            ));
        }
        Ok(RotatingObserver { omega, gamma })
    }

    pub fn nonrelativistic(omega: f64) -> Self {
        RotatingObserver { omega, gamma: 1.0 }
    }
}

/// Frequency `γ(ω − hΩ)` measured by the rotating observer. Negative
/// results are returned as-is.
pub fn doppler_shift(omega: f64, obs: &RotatingObserver, helicity: Helicity) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    Ok(obs.gamma * (omega - helicity.value() * obs.omega))
}

/// Energy `γ(E − ħMΩ)` measured by the rotating observer, where `M` is the
/// total angular momentum quantum number along the rotation axis.
pub fn rotating_observer_energy(
    energy: f64,
    m: f64,
    obs: &RotatingObserver,
    constants: &PhysicalConstants,
) -> Result<f64> {
    let twice = 2.0 * m;
    if !m.is_finite() || (twice - twice.round()).abs() > 2e-9 {
        return Err(Error::InvalidQuantumNumber(m));
    }
    Ok(obs.gamma * (energy - constants.hbar * m * obs.omega))
}

/// Frequency and helicity after a half-wave plate rotating at `omega`
/// (γ = 1). The rotating-frame frequency `ω_in − h_in Ω` is conserved
/// through the plate and the helicity reverses, so
/// `ω_out = ω_in − 2 h_in Ω`.
pub fn half_wave_plate_shift(omega_in: f64, omega: f64, h_in: Helicity) -> Result<(f64, Helicity)> {
    if !(omega_in > 0.0) {
        return Err(Error::NonPositiveFrequency(omega_in));
    }
    let inside = omega_in - h_in.value() * omega;
    let h_out = h_in.flipped();
    let omega_out = inside + h_out.value() * omega;
    if !(omega_out > 0.0) {
        return Err(Error::NonPositiveOutput(omega_out));
    }
    Ok((omega_out, h_out))
}
