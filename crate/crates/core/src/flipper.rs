//! Closed-form propagators for flipper coils.
//!
//! A transverse field `B` along axis angle `α` acts on the spin through
//! `H = −γ_n B·S`; over a transit time `τ` this is the SU(2) rotation by
//! `−γ_n B τ` about the field axis. A rotating coil becomes time-independent
//! in the frame that co-rotates with its axis, at the cost of the
//! spin-rotation term `−Ω S_z`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::beam::BeamSpec;
use crate::constants::PhysicalConstants;
use crate::element::{QuadratureCoil, RotatingFlipper, RotationProfile, StaticFlipper};
use crate::error::{Error, Result};
use crate::propagator::{pauli, Matrix2, SpinPropagator};

/// Width of a uniform field region that turns the spin by exactly π at `speed`.
pub fn flipper_width(speed: f64, field: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(speed > 0.0) || !speed.is_finite() {
        return Err(Error::NonPositiveSpeed(speed));
    }
    if !(field > 0.0) || !field.is_finite() {
        return Err(Error::NonPositiveField(field));
    }
    Ok(PI * speed / (constants.gyromagnetic_ratio_neutron.abs() * field))
}

fn check_beam(beam: &BeamSpec) -> Result<()> {
    if beam.speed > 0.0 && beam.speed.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveSpeed(beam.speed))
    }
}

pub fn static_flipper_propagator(
    e: &StaticFlipper,
    beam: &BeamSpec,
    constants: &PhysicalConstants,
) -> Result<SpinPropagator> {
    e.validate()?;
    check_beam(beam)?;
    let tau = e.width / beam.speed;
    let angle = constants.larmor_frequency(e.field) * tau;
    Ok(SpinPropagator::rotation(
        angle,
        [e.axis_angle.cos(), e.axis_angle.sin(), 0.0],
    ))
}

/// Hamiltonian (J) in the frame co-rotating with the coil axis:
/// `H_rot = −γ_n B S_x′ − Ω S_z`. Time independent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingFrameHamiltonian {
    pub matrix: Matrix2,
}

impl RotatingFrameHamiltonian {
    fn from_rates(transverse: f64, omega: f64, hbar: f64) -> Self {
        // H = ħ/2 (a σ_x + c σ_z), a = −γ_n B, c = −Ω
        let [sx, _, sz] = pauli();
        let mut matrix = [[Complex64::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for k in 0..2 {
                matrix[r][k] = (sx[r][k] * transverse - sz[r][k] * omega) * (0.5 * hbar);
            }
        }
        RotatingFrameHamiltonian { matrix }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = &self.matrix;
        let mean = 0.5 * (m[0][0].re + m[1][1].re);
        let half_diff = 0.5 * (m[0][0].re - m[1][1].re);
        let r = half_diff.hypot(m[0][1].norm());
        [mean - r, mean + r]
    }

    pub fn splitting(&self) -> f64 {
        let [lo, hi] = self.eigenvalues();
        hi - lo
    }
}

/// Rotating-frame Hamiltonian for a rotating coil or quadrature coil. Both
/// are described by a field magnitude and a rotation rate.
pub trait RotatingField {
    fn field(&self) -> f64;
    fn omega(&self) -> f64;
}

impl RotatingField for RotatingFlipper {
    fn field(&self) -> f64 {
        self.field
    }
    fn omega(&self) -> f64 {
        self.omega
    }
}

impl RotatingField for QuadratureCoil {
    fn field(&self) -> f64 {
        self.field
    }
    fn omega(&self) -> f64 {
        self.omega
    }
}

pub fn rotating_frame_hamiltonian<E: RotatingField>(
    e: &E,
    constants: &PhysicalConstants,
) -> RotatingFrameHamiltonian {
    RotatingFrameHamiltonian::from_rates(
        constants.larmor_frequency(e.field()),
        e.omega(),
        constants.hbar,
    )
}

/// `R_z(α_end) · exp(−i H_rot τ/ħ) · R_z(−α_start)` for a coil turning at a
/// constant `rate` while the neutron is inside, with `α_end = α_start + rate·τ`.
fn co_rotating_segment(larmor: f64, rate: f64, alpha_start: f64, duration: f64) -> SpinPropagator {
    // exp(−i τ/2 (a σ_x + c σ_z)): rotation by τ·|(a, 0, c)| about (a, 0, c)
    let axis = [larmor, 0.0, -rate];
    let angle = duration * larmor.hypot(rate);
    // R_z(α_end) split as R_z(α_start)·R_z(rate·τ): fast coils at late times
    // have large angles, and their sum would round away the transit rotation
    let entry = SpinPropagator::rotation_z(alpha_start);
    entry
        * SpinPropagator::rotation_z(rate * duration)
        * SpinPropagator::rotation(angle, axis)
        * entry.adjoint()
}

/// Exact lab-frame propagator of a uniformly rotating coil entered at
/// `t_entry`. Oscillating profiles are rejected; see
/// [`oscillating_flipper_propagator`].
pub fn rotating_flipper_propagator(
    e: &RotatingFlipper,
    beam: &BeamSpec,
    t_entry: f64,
    constants: &PhysicalConstants,
) -> Result<SpinPropagator> {
    e.validate()?;
    check_beam(beam)?;
    if e.profile != RotationProfile::Continuous {
        return Err(Error::UnsupportedProfile);
    }
    let tau = e.width / beam.speed;
    Ok(co_rotating_segment(
        constants.larmor_frequency(e.field),
        e.omega,
        e.angle(t_entry),
        tau,
    ))
}

/// Exact propagator for a coil on any profile, composed from constant-rate
/// pieces of the transit window.
pub fn oscillating_flipper_propagator(
    e: &RotatingFlipper,
    beam: &BeamSpec,
    t_entry: f64,
    constants: &PhysicalConstants,
) -> Result<SpinPropagator> {
    e.validate()?;
    check_beam(beam)?;
    let tau = e.width / beam.speed;
    let larmor = constants.larmor_frequency(e.field);
    let mut u = SpinPropagator::identity();
    for (start, end, rate) in e.profile.linear_pieces(e.omega, t_entry, tau) {
        let segment = co_rotating_segment(larmor, rate, e.angle(t_entry + start), end - start);
        u = segment * u;
    }
    Ok(u)
}

/// Quadrature coil propagator.
///
/// Same physics as [`rotating_flipper_propagator`], evaluated independently:
/// the frame turns by `Ωt` only, the field keeps its phase offset inside the
/// frame, and the exponential is taken from the spectral projectors of the
/// frame Hamiltonian.
pub fn quadrature_coil_propagator(
    e: &QuadratureCoil,
    beam: &BeamSpec,
    t_entry: f64,
    constants: &PhysicalConstants,
) -> Result<SpinPropagator> {
    e.validate()?;
    check_beam(beam)?;
    let tau = e.width / beam.speed;
    let gamma = constants.gyromagnetic_ratio_neutron;

    // Field direction at Ωt = 0: (−sin φ, cos φ, 0) with φ = α₀ − π/2.
    let phi = e.alpha0 - 0.5 * PI;
    let (bx, by) = (-e.field * phi.sin(), e.field * phi.cos());

    // H_frame/ħ = h·σ with h = (−γ bx/2, −γ by/2, −Ω/2)
    let h = [-0.5 * gamma * bx, -0.5 * gamma * by, -0.5 * e.omega];
    let h_len = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();

    let [sx, sy, sz] = pauli();
    let one = Complex64::new(1.0, 0.0);
    let frame_step = if h_len == 0.0 {
        SpinPropagator::identity()
    } else {
        // exp(−i τ h·σ) = e^{−iλτ} P₊ + e^{+iλτ} P₋, P± = (I ± ĥ·σ)/2
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        let plus = Complex64::from_polar(1.0, -h_len * tau);
        let minus = Complex64::from_polar(1.0, h_len * tau);
        for r in 0..2 {
            for k in 0..2 {
                let id = if r == k {
                    one
                } else {
                    Complex64::new(0.0, 0.0)
                };
                let n_sigma = (sx[r][k] * h[0] + sy[r][k] * h[1] + sz[r][k] * h[2]) / h_len;
                let p_plus = (id + n_sigma) * 0.5;
                let p_minus = (id - n_sigma) * 0.5;
                m[r][k] = plus * p_plus + minus * p_minus;
            }
        }
        SpinPropagator::from_matrix(m)
    };

    // Lab ← frame: V(t) = diag(e^{−iΩt/2}, e^{iΩt/2})
    let frame = |t: f64| {
        let half = 0.5 * e.omega * t;
        let zero = Complex64::new(0.0, 0.0);
        SpinPropagator::from_matrix([
            [Complex64::new(half.cos(), -half.sin()), zero],
            [zero, Complex64::new(half.cos(), half.sin())],
        ])
    };
    let entry_frame = frame(t_entry);
    Ok(entry_frame * frame(tau) * frame_step * entry_frame.adjoint())
}

/// Energy shift `−2 Ω S_∥` picked up by a particle whose spin projection
/// `spin_projection` (in units of ħ) along the rotation axis is reversed by a
/// rotating π-flipper. For a neutron (`±½`) the magnitude is `ħ|Ω|`; for a
/// photon (`±1`) it is `2ħ|Ω|`. Returns J.
pub fn spin_flip_energy_shift(
    omega: f64,
    spin_projection: f64,
    constants: &PhysicalConstants,
) -> f64 {
    -2.0 * constants.hbar * omega * spin_projection
}
