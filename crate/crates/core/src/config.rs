//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "constants": { "hbar": 1.054571817e-34 },
//!   "beam": { "wavelength_angstrom": 2.0 },
//!   "path_I": [
//!     { "type": "free_flight", "length": 0.1 },
//!     { "type": "rotating_flipper", "field": 0.002, "rotation_period_s": 60,
//!       "alpha0": 1.5707963267948966, "width": "auto" },
//!     { "type": "free_flight", "length": 0.1 }
//!   ],
//!   "path_II": [ ... ],
//!   "phase_shifter": { "chi": 0.0 },
//!   "sampling": { "t_start": 0, "t_end": 180, "n_samples": 181 },
//!   "counting": { "mean_rate": 60, "dwell": 1, "seed": 7 }
//! }
//! ```
//!
//! All quantities are SI except the two conveniences `wavelength_angstrom`
//! (and `wavelength_spread_angstrom`) and `rotation_period_s`, which is
//! converted to `omega = 2π/period`. A flipper `width` of `"auto"` (the
//! default) is the π-flip width at the beam's central wavelength.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::beam::BeamSpec;
use crate::constants::PhysicalConstants;
use crate::detection::CountingConfig;
use crate::element::{
    FieldElement, QuadratureCoil, RotatingFlipper, RotationProfile, StaticFlipper,
};
use crate::error::{Error, Result};
use crate::flipper::flipper_width;
use crate::interferometer::{BeamPath, InterferometerConfig, PathLabel, Sampling};
use crate::spinor::Spinor;

const ANGSTROM: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WidthSpec {
    Metres(f64),
    /// Only `"auto"` is accepted.
    Keyword(String),
}

impl Default for WidthSpec {
    fn default() -> Self {
        WidthSpec::Keyword("auto".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpinSpec {
    /// `"up"` or `"down"`.
    Named(String),
    /// `[re, im]` pairs.
    Amplitudes { up: [f64; 2], down: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BeamSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_angstrom: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_spread: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_spread_angstrom: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_spin: Option<SpinSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementSpec {
    StaticFlipper {
        field: f64,
        axis_angle: f64,
        #[serde(default)]
        width: WidthSpec,
    },
    RotatingFlipper {
        field: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rotation_period_s: Option<f64>,
        #[serde(default)]
        alpha0: f64,
        #[serde(default)]
        width: WidthSpec,
        #[serde(default)]
        profile: RotationProfile,
    },
    QuadratureCoil {
        field: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rotation_period_s: Option<f64>,
        #[serde(default)]
        alpha0: f64,
        #[serde(default)]
        width: WidthSpec,
    },
    PhaseShifter {
        chi: f64,
    },
    FreeFlight {
        length: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PhaseShifterSection {
    pub chi: f64,
}

/// Parsed, not yet resolved, configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<PhysicalConstants>,
    pub beam: BeamSection,
    #[serde(rename = "path_I")]
    pub path_i: Vec<ElementSpec>,
    #[serde(rename = "path_II")]
    pub path_ii: Vec<ElementSpec>,
    #[serde(default)]
    pub phase_shifter: PhaseShifterSection,
    pub sampling: Sampling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counting: Option<CountingConfig>,
}

/// Everything a run needs, with derived quantities filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub constants: PhysicalConstants,
    pub interferometer: InterferometerConfig,
    pub counting: Option<CountingConfig>,
}

fn rotation_rate(omega: Option<f64>, period: Option<f64>, field: &str) -> Result<f64> {
    match (omega, period) {
        (Some(w), None) if w.is_finite() => Ok(w),
        (None, Some(p)) if p.is_finite() && p != 0.0 => Ok(2.0 * PI / p),
        (Some(_), Some(_)) => Err(Error::config(
            field,
            "give either `omega` or `rotation_period_s`, not both",
        )),
        (None, None) => Err(Error::config(
            field,
            "missing `omega` or `rotation_period_s`",
        )),
        _ => Err(Error::config(
            field,
            "rotation rate must be finite and period nonzero",
        )),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::config(
                format!("line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config(
                path.display().to_string(),
                format!("cannot read config: {e}"),
            )
        })?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn constants(&self) -> Result<PhysicalConstants> {
        let c = self.constants.unwrap_or_default();
        c.validate()?;
        Ok(c)
    }

    fn wavelength(&self) -> Result<f64> {
        let lambda = match (self.beam.wavelength, self.beam.wavelength_angstrom) {
            (Some(m), None) => m,
            (None, Some(a)) => a * ANGSTROM,
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "beam.wavelength",
                    "give either `wavelength` or `wavelength_angstrom`, not both",
                ))
            }
            (None, None) => return Err(Error::config("beam.wavelength", "missing")),
        };
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::config(
                "beam.wavelength",
                format!("must be positive, got {lambda}"),
            ));
        }
        Ok(lambda)
    }

    fn spread(&self) -> Result<Option<f64>> {
        match (
            self.beam.wavelength_spread,
            self.beam.wavelength_spread_angstrom,
        ) {
            (Some(_), Some(_)) => Err(Error::config(
                "beam.wavelength_spread",
                "give either `wavelength_spread` or `wavelength_spread_angstrom`, not both",
            )),
            (Some(m), None) => Ok(Some(m)),
            (None, Some(a)) => Ok(Some(a * ANGSTROM)),
            (None, None) => Ok(None),
        }
    }

    fn initial_spin(&self) -> Result<Spinor> {
        let spin = match &self.beam.initial_spin {
            None => Spinor::up(),
            Some(SpinSpec::Named(name)) => match name.as_str() {
                "up" => Spinor::up(),
                "down" => Spinor::down(),
                other => {
                    return Err(Error::config(
                        "beam.initial_spin",
                        format!("unknown spin state `{other}`; use \"up\", \"down\" or amplitudes"),
                    ))
                }
            },
            Some(SpinSpec::Amplitudes { up, down }) => Spinor::new(
                Complex64::new(up[0], up[1]),
                Complex64::new(down[0], down[1]),
            ),
        };
        spin.normalize()
            .map_err(|_| Error::config("beam.initial_spin", "spin state has zero norm"))
    }

    fn resolve_path(
        specs: &[ElementSpec],
        name: &str,
        label: PathLabel,
        speed: f64,
        constants: &PhysicalConstants,
    ) -> Result<BeamPath> {
        let mut elements = Vec::with_capacity(specs.len());
        for (k, spec) in specs.iter().enumerate() {
            let at = format!("{name}[{k}]");
            let width = |w: &WidthSpec, field: f64| -> Result<f64> {
                match w {
                    WidthSpec::Metres(m) => Ok(*m),
                    WidthSpec::Keyword(s) if s == "auto" => flipper_width(speed, field, constants)
                        .map_err(|e| Error::config(format!("{at}.width"), e.to_string())),
                    WidthSpec::Keyword(s) => Err(Error::config(
                        format!("{at}.width"),
                        format!("expected a number or \"auto\", got `{s}`"),
                    )),
                }
            };
            let element = match spec {
                ElementSpec::StaticFlipper {
                    field,
                    axis_angle,
                    width: w,
                } => FieldElement::StaticFlipper(StaticFlipper {
                    field: *field,
                    axis_angle: *axis_angle,
                    width: width(w, *field)?,
                }),
                ElementSpec::RotatingFlipper {
                    field,
                    omega,
                    rotation_period_s,
                    alpha0,
                    width: w,
                    profile,
                } => FieldElement::RotatingFlipper(RotatingFlipper {
                    field: *field,
                    omega: rotation_rate(*omega, *rotation_period_s, &format!("{at}.omega"))?,
                    alpha0: *alpha0,
                    width: width(w, *field)?,
                    profile: *profile,
                }),
                ElementSpec::QuadratureCoil {
                    field,
                    omega,
                    rotation_period_s,
                    alpha0,
                    width: w,
                } => FieldElement::QuadratureCoil(QuadratureCoil {
                    field: *field,
                    omega: rotation_rate(*omega, *rotation_period_s, &format!("{at}.omega"))?,
                    alpha0: *alpha0,
                    width: width(w, *field)?,
                }),
                ElementSpec::PhaseShifter { chi } => FieldElement::PhaseShifter { chi: *chi },
                ElementSpec::FreeFlight { length } => FieldElement::FreeFlight { length: *length },
            };
            element
                .validate()
                .map_err(|e| Error::config(at.clone(), e.to_string()))?;
            elements.push(element);
        }
        Ok(BeamPath::new(label, elements))
    }

    /// Validate and derive the simulation inputs.
    pub fn resolve(&self) -> Result<Experiment> {
        let constants = self.constants()?;
        let wavelength = self.wavelength()?;
        let beam = BeamSpec::new(wavelength, self.initial_spin()?, &constants)?;
        let path_i =
            Self::resolve_path(&self.path_i, "path_I", PathLabel::I, beam.speed, &constants)?;
        let path_ii = Self::resolve_path(
            &self.path_ii,
            "path_II",
            PathLabel::II,
            beam.speed,
            &constants,
        )?;
        let interferometer = InterferometerConfig {
            path_i,
            path_ii,
            beam,
            phase_shifter_chi: self.phase_shifter.chi,
            sampling: self.sampling,
            wavelength_spread: self.spread()?,
        };
        interferometer.validate().map_err(|e| match e {
            Error::UnequalPathLengths { path_i, path_ii } => Error::config(
                "path_II",
                format!("total length {path_ii} m differs from path_I length {path_i} m"),
            ),
            other => other,
        })?;
        if let Some(counting) = &self.counting {
            counting.validate()?;
        }
        Ok(Experiment {
            constants,
            interferometer,
            counting: self.counting,
        })
    }
}

/// SHA-256 of the key-sorted compact JSON form of `text`, as lowercase hex.
pub fn config_digest(text: &str) -> Result<String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
        Error::config(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let canonical = serde_json::to_string(&value).expect("json value serializes");
    let hash = Sha256::digest(canonical.as_bytes());
    Ok(hash.iter().map(|b| format!("{b:02x}")).collect())
}

/// Parameters that `sweep` may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Omega,
    Field,
    Wavelength,
    Chi,
    Seed,
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Omega" | "omega" => Ok(SweepParameter::Omega),
            "B" | "field" => Ok(SweepParameter::Field),
            "wavelength" => Ok(SweepParameter::Wavelength),
            "chi" => Ok(SweepParameter::Chi),
            "seed" => Ok(SweepParameter::Seed),
            other => Err(Error::config(
                "parameter",
                format!("unknown sweep parameter `{other}`; expected one of Omega, B, wavelength, chi, seed"),
            )),
        }
    }
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Omega => "Omega",
            SweepParameter::Field => "B",
            SweepParameter::Wavelength => "wavelength",
            SweepParameter::Chi => "chi",
            SweepParameter::Seed => "seed",
        }
    }
}

impl ExperimentConfig {
    /// Copy of the configuration with one parameter replaced everywhere it
    /// appears. `Omega` applies to every rotating element, `B` to every
    /// flipper and coil (auto widths follow), `wavelength` is in metres.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64) -> Result<Self> {
        let mut cfg = self.clone();
        let paths = cfg.path_i.iter_mut().chain(cfg.path_ii.iter_mut());
        match parameter {
            SweepParameter::Omega => {
                for spec in paths {
                    if let ElementSpec::RotatingFlipper {
                        omega,
                        rotation_period_s,
                        ..
                    }
                    | ElementSpec::QuadratureCoil {
                        omega,
                        rotation_period_s,
                        ..
                    } = spec
                    {
                        *omega = Some(value);
                        *rotation_period_s = None;
                    }
                }
            }
            SweepParameter::Field => {
                for spec in paths {
                    match spec {
                        ElementSpec::StaticFlipper { field, .. }
                        | ElementSpec::RotatingFlipper { field, .. }
                        | ElementSpec::QuadratureCoil { field, .. } => *field = value,
                        _ => {}
                    }
                }
            }
            SweepParameter::Wavelength => {
                cfg.beam.wavelength = Some(value);
                cfg.beam.wavelength_angstrom = None;
            }
            SweepParameter::Chi => cfg.phase_shifter.chi = value,
            SweepParameter::Seed => {
                if !(value >= 0.0 && value.fract() == 0.0 && value <= u64::MAX as f64) {
                    return Err(Error::config("seed", format!("not a valid seed: {value}")));
                }
                // noiseless runs have no seed to vary
                if let Some(counting) = cfg.counting.as_mut() {
                    counting.seed = value as u64;
                }
            }
        }
        Ok(cfg)
    }
}
