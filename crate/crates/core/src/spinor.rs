//! Two-component spin state in the `S_z` basis, with `z` along the beam.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spinor {
    pub up: Complex64,
    pub down: Complex64,
}

const MIN_NORM: f64 = 1e-300;

impl Spinor {
    pub const fn new(up: Complex64, down: Complex64) -> Self {
        Spinor { up, down }
    }

    /// Spin along +z (longitudinal polarization).
    pub const fn up() -> Self {
        Spinor::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub const fn down() -> Self {
        Spinor::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.up.norm().hypot(self.down.norm())
    }

    /// Rescale to unit norm, keeping the ray.
    pub fn normalize(&self) -> Result<Spinor> {
        let n = self.norm();
        if !(n >= MIN_NORM) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn scale(&self, factor: f64) -> Spinor {
        Spinor::new(self.up * factor, self.down * factor)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    pub fn add(&self, other: &Spinor) -> Spinor {
        Spinor::new(self.up + other.up, self.down + other.down)
    }

    pub fn mul_complex(&self, c: Complex64) -> Spinor {
        Spinor::new(self.up * c, self.down * c)
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &Spinor) -> f64 {
        (self.up - other.up)
            .norm()
            .hypot((self.down - other.down).norm())
    }

    /// Spin expectation `⟨σ⟩` (Bloch vector) of a normalized state.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let cross = self.up.conj() * self.down;
        [
            2.0 * cross.re,
            2.0 * cross.im,
            self.up.norm_sqr() - self.down.norm_sqr(),
        ]
    }
}
