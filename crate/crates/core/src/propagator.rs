//! 2×2 unitary transfer matrices acting on [`Spinor`]s.

use std::ops::Mul;

use num_complex::Complex64;

use crate::spinor::Spinor;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major 2×2 complex matrix; `m[row][col]`.
pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinPropagator {
    pub m: Matrix2,
}

impl SpinPropagator {
    pub const fn from_matrix(m: Matrix2) -> Self {
        SpinPropagator { m }
    }

    pub const fn identity() -> Self {
        SpinPropagator {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    /// Global phase `e^{iχ}·I`.
    pub fn phase(chi: f64) -> Self {
        let p = Complex64::from_polar(1.0, chi);
        SpinPropagator {
            m: [[p, ZERO], [ZERO, p]],
        }
    }

    /// `exp(−iθ n̂·σ/2) = cos(θ/2) I − i sin(θ/2) n̂·σ`.
    ///
    /// `axis` need not be normalized; a zero axis gives the identity.
    pub fn rotation(angle: f64, axis: [f64; 3]) -> Self {
        let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if len == 0.0 || angle == 0.0 {
            return SpinPropagator::identity();
        }
        let [nx, ny, nz] = axis.map(|a| a / len);
        let (s, c) = (0.5 * angle).sin_cos();
        // n̂·σ = [[nz, nx − i ny], [nx + i ny, −nz]]
        SpinPropagator {
            m: [
                [Complex64::new(c, -s * nz), Complex64::new(-s * ny, -s * nx)],
                [Complex64::new(s * ny, -s * nx), Complex64::new(c, s * nz)],
            ],
        }
    }

    /// `R_z(φ) = exp(−iφσ_z/2)`.
    pub fn rotation_z(angle: f64) -> Self {
        let half = 0.5 * angle;
        SpinPropagator {
            m: [
                [Complex64::from_polar(1.0, -half), ZERO],
                [ZERO, Complex64::from_polar(1.0, half)],
            ],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    /// Amplitude `⟨down|U|up⟩`.
    pub fn flip_amplitude(&self) -> Complex64 {
        self.m[1][0]
    }

    pub fn apply(&self, s: &Spinor) -> Spinor {
        Spinor::new(
            self.m[0][0] * s.up + self.m[0][1] * s.down,
            self.m[1][0] * s.up + self.m[1][1] * s.down,
        )
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        SpinPropagator {
            m: [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ],
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        SpinPropagator {
            m: self.m.map(|row| row.map(|x| x * c)),
        }
    }

    /// `max |(U U†) − I|` over entries.
    pub fn unitarity_error(&self) -> f64 {
        let p = *self * self.adjoint();
        let id = SpinPropagator::identity();
        p.max_abs_diff(&id)
    }

    pub fn max_abs_diff(&self, other: &SpinPropagator) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }

    pub fn frobenius_distance(&self, other: &SpinPropagator) -> f64 {
        let mut acc = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                acc += (self.m[r][c] - other.m[r][c]).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Build from the images of `|up⟩` and `|down⟩` (the matrix columns).
    pub fn from_columns(up_image: Spinor, down_image: Spinor) -> Self {
        SpinPropagator {
            m: [
                [up_image.up, down_image.up],
                [up_image.down, down_image.down],
            ],
        }
    }
}

impl Mul for SpinPropagator {
    type Output = SpinPropagator;

    /// Matrix product; `a * b` applies `b` first.
    fn mul(self, rhs: SpinPropagator) -> SpinPropagator {
        let a = &self.m;
        let b = &rhs.m;
        let mut m = [[ZERO; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, out) in row.iter_mut().enumerate() {
                *out = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        SpinPropagator { m }
    }
}

impl Mul<Spinor> for SpinPropagator {
    type Output = Spinor;

    fn mul(self, rhs: Spinor) -> Spinor {
        self.apply(&rhs)
    }
}

/// Pauli matrices σ_x, σ_y, σ_z.
pub fn pauli() -> [Matrix2; 3] {
    [
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -I], [I, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ]
}
