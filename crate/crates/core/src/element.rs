//! Beamline elements and coil rotation profiles.
//!
//! Angles of transverse fields are measured in the x–y plane from +x toward
//! +y; the beam and the rotation axis are +z. A positive `omega` turns the
//! coil counterclockwise about +z.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Field ratio `|Ω| / |γ_n B|` above which a rotating element is flagged as
/// outside the slow-rotation regime.
pub const SLOW_ROTATION_LIMIT: f64 = 0.1;

pub const DEFAULT_SWING: f64 = 2.0 * PI / 3.0;
pub const DEFAULT_SWING_PERIOD: f64 = 60.0;

/// Map from lab time to coil axis angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RotationProfile {
    /// `α(t) = α₀ + Ωt`.
    #[default]
    Continuous,
    /// Triangle wave: the axis swings from `α₀` to `α₀ ± amplitude_angle`
    /// during the first half period and back during the second. The sign of
    /// the swing follows the sign of the element's `omega` (positive when
    /// `omega` is zero); the magnitude of `omega` is not used.
    Oscillating { amplitude_angle: f64, period: f64 },
}

impl RotationProfile {
    pub fn oscillating_default() -> Self {
        RotationProfile::Oscillating {
            amplitude_angle: DEFAULT_SWING,
            period: DEFAULT_SWING_PERIOD,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            RotationProfile::Continuous => Ok(()),
            RotationProfile::Oscillating {
                amplitude_angle,
                period,
            } => {
                if !(amplitude_angle.is_finite() && amplitude_angle >= 0.0) {
                    return Err(Error::InvalidElement(format!(
                        "oscillation amplitude must be finite and nonnegative, got {amplitude_angle}"
                    )));
                }
                if !(period.is_finite() && period > 0.0) {
                    return Err(Error::InvalidElement(format!(
                        "oscillation period must be positive, got {period}"
                    )));
                }
                Ok(())
            }
        }
    }

    fn direction(omega: f64) -> f64 {
        if omega < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Coil axis angle at lab time `t`.
    pub fn angle(&self, alpha0: f64, omega: f64, t: f64) -> f64 {
        match *self {
            RotationProfile::Continuous => alpha0 + omega * t,
            RotationProfile::Oscillating {
                amplitude_angle,
                period,
            } => {
                let phase = (t / period).rem_euclid(1.0);
                let tri = if phase < 0.5 {
                    2.0 * phase
                } else {
                    2.0 * (1.0 - phase)
                };
                alpha0 + Self::direction(omega) * amplitude_angle * tri
            }
        }
    }

    /// Angular rate `dα/dt` on the linear piece that starts at `t`.
    pub fn rate(&self, omega: f64, t: f64) -> f64 {
        match *self {
            RotationProfile::Continuous => omega,
            RotationProfile::Oscillating {
                amplitude_angle,
                period,
            } => {
                let phase = (t / period).rem_euclid(1.0);
                let slope = 2.0 * amplitude_angle / period;
                let sign = if phase < 0.5 { 1.0 } else { -1.0 };
                Self::direction(omega) * sign * slope
            }
        }
    }

    /// Largest `|dα/dt|` the profile reaches.
    pub fn max_rate(&self, omega: f64) -> f64 {
        match *self {
            RotationProfile::Continuous => omega.abs(),
            RotationProfile::Oscillating {
                amplitude_angle,
                period,
            } => 2.0 * amplitude_angle / period,
        }
    }

    /// Split the window `[t0, t0 + duration]` into pieces on which the angle
    /// is linear in time. Returns `(start, end, rate)` with `start`/`end` as
    /// offsets from `t0`, in time order; the last `end` is exactly
    /// `duration`.
    pub fn linear_pieces(&self, omega: f64, t0: f64, duration: f64) -> Vec<(f64, f64, f64)> {
        match *self {
            RotationProfile::Continuous => vec![(0.0, duration, omega)],
            RotationProfile::Oscillating { period, .. } => {
                let half = 0.5 * period;
                let mut pieces = Vec::new();
                let mut start = 0.0;
                // first corner strictly after t0
                let mut k = (t0 / half).floor() + 1.0;
                while start < duration {
                    let corner = k * half - t0;
                    let end = if corner < duration { corner } else { duration };
                    if end > start {
                        let mid = t0 + 0.5 * (start + end);
                        pieces.push((start, end, self.rate(omega, mid)));
                    }
                    start = end;
                    k += 1.0;
                }
                if pieces.is_empty() {
                    pieces.push((0.0, duration, self.rate(omega, t0)));
                }
                pieces
            }
        }
    }
}

/// Static π-flipper: uniform transverse field over a fixed width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticFlipper {
    /// T
    pub field: f64,
    /// rad
    pub axis_angle: f64,
    /// m
    pub width: f64,
}

/// Physically rotating flipper coil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatingFlipper {
    pub field: f64,
    /// rad/s, signed, about +z.
    pub omega: f64,
    /// Axis angle at t = 0.
    pub alpha0: f64,
    pub width: f64,
    #[serde(default)]
    pub profile: RotationProfile,
}

/// Stationary coil pair whose field vector turns at `omega`.
///
/// The field is `B(−sin(Ωt + α₀ − π/2), cos(Ωt + α₀ − π/2), 0)`; with
/// `α₀ = π/2` this is `B(−sin Ωt, cos Ωt, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureCoil {
    pub field: f64,
    pub omega: f64,
    pub alpha0: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FieldElement {
    StaticFlipper(StaticFlipper),
    RotatingFlipper(RotatingFlipper),
    QuadratureCoil(QuadratureCoil),
    PhaseShifter { chi: f64 },
    FreeFlight { length: f64 },
}

fn check_field(field: f64) -> Result<()> {
    if field.is_finite() && field >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidElement(format!(
            "field magnitude must be finite and nonnegative, got {field} T"
        )))
    }
}

fn check_width(width: f64) -> Result<()> {
    if width.is_finite() && width > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidElement(format!(
            "width must be positive, got {width} m"
        )))
    }
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidElement(format!("{name} must be finite")))
    }
}

impl StaticFlipper {
    pub fn validate(&self) -> Result<()> {
        check_field(self.field)?;
        check_width(self.width)?;
        check_finite("axis_angle", self.axis_angle)
    }
}

impl RotatingFlipper {
    pub fn validate(&self) -> Result<()> {
        check_field(self.field)?;
        check_width(self.width)?;
        check_finite("omega", self.omega)?;
        check_finite("alpha0", self.alpha0)?;
        self.profile.validate()
    }

    pub fn angle(&self, t: f64) -> f64 {
        self.profile.angle(self.alpha0, self.omega, t)
    }
}

impl QuadratureCoil {
    pub fn validate(&self) -> Result<()> {
        check_field(self.field)?;
        check_width(self.width)?;
        check_finite("omega", self.omega)?;
        check_finite("alpha0", self.alpha0)
    }

    /// Lab-frame field vector at time `t`, in T.
    pub fn field_vector(&self, t: f64) -> [f64; 3] {
        let phi = self.omega * t + self.alpha0 - 0.5 * PI;
        [-self.field * phi.sin(), self.field * phi.cos(), 0.0]
    }
}

impl FieldElement {
    pub fn validate(&self) -> Result<()> {
        match self {
            FieldElement::StaticFlipper(e) => e.validate(),
            FieldElement::RotatingFlipper(e) => e.validate(),
            FieldElement::QuadratureCoil(e) => e.validate(),
            FieldElement::PhaseShifter { chi } => check_finite("chi", *chi),
            FieldElement::FreeFlight { length } => {
                if length.is_finite() && *length >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidElement(format!(
                        "free-flight length must be nonnegative, got {length} m"
                    )))
                }
            }
        }
    }

    /// Geometric length along the beam, m.
    pub fn length(&self) -> f64 {
        match self {
            FieldElement::StaticFlipper(e) => e.width,
            FieldElement::RotatingFlipper(e) => e.width,
            FieldElement::QuadratureCoil(e) => e.width,
            FieldElement::PhaseShifter { .. } => 0.0,
            FieldElement::FreeFlight { length } => *length,
        }
    }

    /// Warning text when a rotating element is not slow compared to the
    /// Larmor precession in its own field.
    pub fn slow_rotation_warning(&self, constants: &PhysicalConstants) -> Option<String> {
        let (kind, field, rate) = match self {
            FieldElement::RotatingFlipper(e) => {
                ("rotating flipper", e.field, e.profile.max_rate(e.omega))
            }
            FieldElement::QuadratureCoil(e) => ("quadrature coil", e.field, e.omega.abs()),
            _ => return None,
        };
        let larmor = constants.larmor_frequency(field).abs();
        if rate >= SLOW_ROTATION_LIMIT * larmor {
            Some(format!(
                "{kind}: rotation rate {rate:.6e} rad/s is not small compared to |gamma_n|B = {larmor:.6e} rad/s"
            ))
        } else {
            None
        }
    }
}
