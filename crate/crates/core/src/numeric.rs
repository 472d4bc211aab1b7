//! Direct time integration of `iħ dψ/dt = −γ_n B(t)·S ψ`.
//!
//! Fixed-step classical RK4; the step count doubles until two successive
//! solutions agree to the requested tolerance, and the finer one is then
//! Richardson-corrected. Independent of the closed forms in
//! [`crate::flipper`], which it is used to check.

use num_complex::Complex64;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::propagator::SpinPropagator;
use crate::spinor::Spinor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Convergence threshold on the norm distance between refinements.
    pub tolerance: f64,
    pub initial_steps: u64,
    pub max_steps: u64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            tolerance: 1e-10,
            initial_steps: 64,
            max_steps: 1 << 24,
        }
    }
}

impl StepControl {
    pub fn with_tolerance(tolerance: f64) -> Self {
        StepControl {
            tolerance,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericEvolution {
    pub spinor: Spinor,
    /// Step count of the finest accepted solution.
    pub steps: u64,
    /// `|‖ψ‖ − 1|` before any renormalization.
    pub norm_deviation: f64,
    pub renormalized: bool,
}

/// `dψ/dt = (iγ/2)(B·σ)ψ`
#[inline]
fn derivative(half_gamma: f64, b: [f64; 3], psi: (Complex64, Complex64)) -> (Complex64, Complex64) {
    let (u, d) = psi;
    // (B·σ)ψ = (bz u + (bx − i by) d, (bx + i by) u − bz d)
    let bm = Complex64::new(b[0], -b[1]);
    let bp = Complex64::new(b[0], b[1]);
    let su = u * b[2] + bm * d;
    let sd = bp * u - d * b[2];
    let k = Complex64::new(0.0, half_gamma);
    (k * su, k * sd)
}

fn rk4_fixed<F>(field: &F, psi0: Spinor, t0: f64, t1: f64, steps: u64, half_gamma: f64) -> Spinor
where
    F: Fn(f64) -> [f64; 3],
{
    let h = (t1 - t0) / steps as f64;
    let mut psi = (psi0.up, psi0.down);
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        let b0 = field(t);
        let bm = field(t + 0.5 * h);
        let b1 = field(t + h);
        let k1 = derivative(half_gamma, b0, psi);
        let y2 = (psi.0 + k1.0 * (0.5 * h), psi.1 + k1.1 * (0.5 * h));
        let k2 = derivative(half_gamma, bm, y2);
        let y3 = (psi.0 + k2.0 * (0.5 * h), psi.1 + k2.1 * (0.5 * h));
        let k3 = derivative(half_gamma, bm, y3);
        let y4 = (psi.0 + k3.0 * h, psi.1 + k3.1 * h);
        let k4 = derivative(half_gamma, b1, y4);
        let w = h / 6.0;
        psi.0 += (k1.0 + (k2.0 + k3.0) * 2.0 + k4.0) * w;
        psi.1 += (k1.1 + (k2.1 + k3.1) * 2.0 + k4.1) * w;
    }
    Spinor::new(psi.0, psi.1)
}

/// Integrate the spin through the lab-frame field `field(t)` (T) from `t0`
/// to `t1`.
pub fn evolve_numeric<F>(
    field: F,
    spin0: &Spinor,
    t0: f64,
    t1: f64,
    control: &StepControl,
    constants: &PhysicalConstants,
) -> Result<NumericEvolution>
where
    F: Fn(f64) -> [f64; 3],
{
    if !(t1 >= t0) {
        return Err(Error::InvalidElement(format!(
            "integration window must satisfy t1 >= t0, got [{t0}, {t1}]"
        )));
    }
    let start_norm = spin0.norm();
    if t1 == t0 {
        return Ok(NumericEvolution {
            spinor: *spin0,
            steps: 0,
            norm_deviation: 0.0,
            renormalized: false,
        });
    }
    let half_gamma = 0.5 * constants.gyromagnetic_ratio_neutron;
    let mut steps = control.initial_steps.max(1);
    let mut coarse = rk4_fixed(&field, *spin0, t0, t1, steps, half_gamma);
    loop {
        let fine_steps = steps * 2;
        if fine_steps > control.max_steps {
            return Err(Error::NoConvergence {
                max_steps: control.max_steps,
            });
        }
        let fine = rk4_fixed(&field, *spin0, t0, t1, fine_steps, half_gamma);
        if fine.distance(&coarse) < control.tolerance {
            // 4th order: error(fine) ≈ (fine − coarse)/15
            let corrected = Spinor::new(
                fine.up + (fine.up - coarse.up) / 15.0,
                fine.down + (fine.down - coarse.down) / 15.0,
            );
            let norm = corrected.norm();
            let norm_deviation = (norm - start_norm).abs();
            let renormalized = norm_deviation > 10.0 * control.tolerance * start_norm.max(1.0);
            let spinor = if renormalized {
                corrected.scale(start_norm / norm)
            } else {
                corrected
            };
            return Ok(NumericEvolution {
                spinor,
                steps: fine_steps,
                norm_deviation,
                renormalized,
            });
        }
        coarse = fine;
        steps = fine_steps;
    }
}

/// Full 2×2 propagator by integrating both basis states.
pub fn evolve_numeric_propagator<F>(
    field: F,
    t0: f64,
    t1: f64,
    control: &StepControl,
    constants: &PhysicalConstants,
) -> Result<SpinPropagator>
where
    F: Fn(f64) -> [f64; 3],
{
    let up = evolve_numeric(&field, &Spinor::up(), t0, t1, control, constants)?;
    let down = evolve_numeric(&field, &Spinor::down(), t0, t1, control, constants)?;
    Ok(SpinPropagator::from_columns(up.spinor, down.spinor))
}
