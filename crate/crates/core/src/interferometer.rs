//! Two-path interferometer: path composition, output-port intensity and
//! time traces.
//!
//! The trace parameter `t` is the time at which a neutron enters the
//! interferometer. Elements downstream are entered at `t` plus the transit
//! time of everything upstream on the same path. Both paths must have equal
//! geometric length, so the common kinetic phase drops out.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beam::BeamSpec;
use crate::constants::PhysicalConstants;
use crate::element::FieldElement;
use crate::element::RotationProfile;
use crate::error::{Error, Result};
use crate::exec::{try_map_indexed, Execution};
use crate::flipper::{
    oscillating_flipper_propagator, quadrature_coil_propagator, rotating_flipper_propagator,
    static_flipper_propagator,
};
use crate::propagator::SpinPropagator;
use crate::spinor::Spinor;

/// Relative tolerance on the equal-length requirement.
const PATH_LENGTH_TOLERANCE: f64 = 1e-12;

/// Gauss–Hermite nodes for wavelength-spread averaging.
pub const SPREAD_QUADRATURE_NODES: usize = 33;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathLabel {
    I,
    II,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamPath {
    pub label: PathLabel,
    pub elements: Vec<FieldElement>,
}

impl BeamPath {
    pub fn new(label: PathLabel, elements: Vec<FieldElement>) -> Self {
        BeamPath { label, elements }
    }

    pub fn length(&self) -> f64 {
        self.elements.iter().map(FieldElement::length).sum()
    }

    pub fn validate(&self) -> Result<()> {
        self.elements.iter().try_for_each(FieldElement::validate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
}

impl Sampling {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::config(
                "sampling.n_samples",
                format!("must be at least 2, got {}", self.n_samples),
            ));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite()) {
            return Err(Error::config(
                "sampling.t_end",
                "sampling window must be finite",
            ));
        }
        if !(self.t_end > self.t_start) {
            return Err(Error::config(
                "sampling.t_end",
                format!("must exceed t_start ({} <= {})", self.t_end, self.t_start),
            ));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_samples - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.n_samples {
            self.t_end
        } else {
            self.t_start + k as f64 * self.step()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples).map(|k| self.time(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    pub path_i: BeamPath,
    pub path_ii: BeamPath,
    pub beam: BeamSpec,
    /// Working-point phase applied to path II, rad.
    pub phase_shifter_chi: f64,
    pub sampling: Sampling,
    /// Standard deviation of a Gaussian wavelength distribution, m. `None`
    /// for a monochromatic beam.
    #[serde(default)]
    pub wavelength_spread: Option<f64>,
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.path_i.label != PathLabel::I || self.path_ii.label != PathLabel::II {
            return Err(Error::config("path_I", "paths must be labelled I and II"));
        }
        self.path_i
            .validate()
            .map_err(|e| Error::config("path_I", e.to_string()))?;
        self.path_ii
            .validate()
            .map_err(|e| Error::config("path_II", e.to_string()))?;
        let (li, lii) = (self.path_i.length(), self.path_ii.length());
        if (li - lii).abs() > PATH_LENGTH_TOLERANCE * li.abs().max(lii.abs()).max(1e-3) {
            return Err(Error::UnequalPathLengths {
                path_i: li,
                path_ii: lii,
            });
        }
        if !self.phase_shifter_chi.is_finite() {
            return Err(Error::config("phase_shifter.chi", "must be finite"));
        }
        if let Some(sigma) = self.wavelength_spread {
            if !(sigma >= 0.0) || !sigma.is_finite() {
                return Err(Error::config(
                    "beam.wavelength_spread",
                    format!("must be nonnegative, got {sigma}"),
                ));
            }
            let (nodes, _) = gauss_hermite(SPREAD_QUADRATURE_NODES);
            let lowest = self.beam.wavelength + std::f64::consts::SQRT_2 * sigma * nodes[0];
            if !(lowest > 0.0) {
                return Err(Error::config(
                    "beam.wavelength_spread",
                    "spread too wide: quadrature reaches nonpositive wavelengths",
                ));
            }
        }
        self.sampling.validate()
    }

    /// Same configuration with another working-point phase.
    pub fn with_chi(&self, chi: f64) -> Self {
        InterferometerConfig {
            phase_shifter_chi: chi,
            ..self.clone()
        }
    }

    /// Warnings for rotating elements outside the slow-rotation regime.
    pub fn warnings(&self, constants: &PhysicalConstants) -> Vec<String> {
        [(&self.path_i, "I"), (&self.path_ii, "II")]
            .into_iter()
            .flat_map(|(path, name)| {
                path.elements
                    .iter()
                    .filter_map(|e| e.slow_rotation_warning(constants))
                    .map(move |w| format!("path {name}: {w}"))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityTrace {
    pub times: Vec<f64>,
    pub intensity: Vec<f64>,
}

impl IntensityTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Propagator of a single element entered at `t_entry`.
pub fn element_propagator(
    element: &FieldElement,
    beam: &BeamSpec,
    t_entry: f64,
    constants: &PhysicalConstants,
) -> Result<SpinPropagator> {
    match element {
        FieldElement::StaticFlipper(e) => static_flipper_propagator(e, beam, constants),
        FieldElement::RotatingFlipper(e) => match e.profile {
            RotationProfile::Continuous => rotating_flipper_propagator(e, beam, t_entry, constants),
            RotationProfile::Oscillating { .. } => {
                oscillating_flipper_propagator(e, beam, t_entry, constants)
            }
        },
        FieldElement::QuadratureCoil(e) => quadrature_coil_propagator(e, beam, t_entry, constants),
        FieldElement::PhaseShifter { chi } => Ok(SpinPropagator::phase(*chi)),
        FieldElement::FreeFlight { length } => {
            FieldElement::FreeFlight { length: *length }.validate()?;
            Ok(SpinPropagator::identity())
        }
    }
}

/// Ordered product of element propagators along one path.
pub fn path_propagator(
    path: &BeamPath,
    beam: &BeamSpec,
    t_entry: f64,
    constants: &PhysicalConstants,
) -> Result<SpinPropagator> {
    if !(beam.speed > 0.0) {
        return Err(Error::NonPositiveSpeed(beam.speed));
    }
    let mut u = SpinPropagator::identity();
    let mut t = t_entry;
    for element in &path.elements {
        u = element_propagator(element, beam, t, constants)? * u;
        t += element.length() / beam.speed;
    }
    Ok(u)
}

/// Spinors arriving at the recombination point from each path, before the
/// working-point phase.
fn path_states(
    cfg: &InterferometerConfig,
    beam: &BeamSpec,
    t: f64,
    constants: &PhysicalConstants,
) -> Result<(Spinor, Spinor)> {
    let psi = beam.initial_spin;
    let a = path_propagator(&cfg.path_i, beam, t, constants)?.apply(&psi);
    let b = path_propagator(&cfg.path_ii, beam, t, constants)?.apply(&psi);
    Ok((a, b))
}

fn port_intensity(a: &Spinor, b: &Spinor, chi: f64) -> f64 {
    0.25 * a
        .add(&b.mul_complex(Complex64::from_polar(1.0, chi)))
        .norm_sqr()
}

fn averaged<F>(cfg: &InterferometerConfig, constants: &PhysicalConstants, f: F) -> Result<f64>
where
    F: Fn(&BeamSpec) -> Result<f64>,
{
    match cfg.wavelength_spread {
        Some(sigma) if sigma > 0.0 => {
            let (nodes, weights) = gauss_hermite(SPREAD_QUADRATURE_NODES);
            let mut acc = 0.0;
            for (x, w) in nodes.iter().zip(&weights) {
                let lambda = cfg.beam.wavelength + std::f64::consts::SQRT_2 * sigma * x;
                let beam = cfg.beam.with_wavelength(lambda, constants)?;
                acc += w * f(&beam)?;
            }
            Ok(acc / std::f64::consts::PI.sqrt())
        }
        _ => f(&cfg.beam),
    }
}

/// Forward-port intensity `¼‖U_I ψ + e^{iχ} U_II ψ‖²` for a neutron entering
/// at `t`, normalized to unit input flux.
pub fn output_intensity(
    cfg: &InterferometerConfig,
    t: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    averaged(cfg, constants, |beam| {
        let (a, b) = path_states(cfg, beam, t, constants)?;
        Ok(port_intensity(&a, &b, cfg.phase_shifter_chi))
    })
}

/// Intensity at the complementary port (relative phase `χ + π`).
pub fn complementary_intensity(
    cfg: &InterferometerConfig,
    t: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    averaged(cfg, constants, |beam| {
        let (a, b) = path_states(cfg, beam, t, constants)?;
        Ok(port_intensity(
            &a,
            &b,
            cfg.phase_shifter_chi + std::f64::consts::PI,
        ))
    })
}

/// Overlap `⟨U_II ψ | U_I ψ⟩` of the two path states for the central
/// wavelength. Its argument is the interference phase between the paths.
pub fn interference_term(
    cfg: &InterferometerConfig,
    t: f64,
    constants: &PhysicalConstants,
) -> Result<Complex64> {
    let (a, b) = path_states(cfg, &cfg.beam, t, constants)?;
    Ok(b.inner(&a))
}

pub fn simulate_trace(
    cfg: &InterferometerConfig,
    constants: &PhysicalConstants,
) -> Result<IntensityTrace> {
    simulate_trace_with(cfg, constants, Execution::default())
}

/// Sample [`output_intensity`] on the configured time grid.
pub fn simulate_trace_with(
    cfg: &InterferometerConfig,
    constants: &PhysicalConstants,
    exec: Execution,
) -> Result<IntensityTrace> {
    cfg.validate()?;
    let times = cfg.sampling.times();
    let intensity = try_map_indexed(times.len(), exec, |k| {
        output_intensity(cfg, times[k], constants)
    })?;
    Ok(IntensityTrace { times, intensity })
}

/// Longitudinal field `B′ = Ω/γ_n` whose Larmor precession matches a frame
/// rotation at `omega`. Signed, T.
pub fn larmor_equivalent_field(omega: f64, constants: &PhysicalConstants) -> f64 {
    omega / constants.gyromagnetic_ratio_neutron
}

/// Gauss–Hermite nodes (ascending) and weights for `∫ e^{−x²} f(x) dx`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on orthonormal Hermite recurrences with the usual
    // asymptotic starting guesses for the largest roots.
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.reverse();
    w.reverse();
    (x, w)
}
