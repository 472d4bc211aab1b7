//! Least-squares fit of `rate(t) = offset + amplitude·cos(ωt + φ)`.
//!
//! For fixed ω the model is linear in `(1, cos ωt, sin ωt)`, so the search is
//! one-dimensional: a zero-padded discrete Fourier scan picks the coarse
//! peak, then golden-section search refines ω on the weighted residual.
//! Count data are fitted with Poisson weights: `1/max(n_k, 1)` to start,
//! then reweighted by the fitted model rate, which removes the low bias of
//! count-based weights in low-count bins.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::interferometer::IntensityTrace;

use super::poisson::CountTrace;

const MIN_BINS: usize = 8;
const MIN_PERIODS: f64 = 1.5;
const ZERO_PADDING: usize = 4;
const PEAK_OVER_FLOOR: f64 = 3.0;
const REWEIGHT_PASSES: usize = 3;
/// Variance floor relative to the mean count; keeps bins at a fringe zero
/// from swamping the normal equations at high rates.
const RELATIVE_VARIANCE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeatFit {
    /// counts/s (or intensity units for [`fit_intensity`])
    pub offset: f64,
    pub amplitude: f64,
    /// rad/s
    pub angular_frequency: f64,
    /// rad, in (−π, π]
    pub phase: f64,
    pub residual_rms: f64,
    pub amplitude_stderr: f64,
}

impl BeatFit {
    /// Fringe visibility `amplitude / offset`.
    pub fn visibility(&self) -> f64 {
        if self.offset == 0.0 {
            0.0
        } else {
            self.amplitude / self.offset
        }
    }

    pub fn model(&self, t: f64) -> f64 {
        self.offset + self.amplitude * (self.angular_frequency * t + self.phase).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyShift {
    pub joules: f64,
    pub electronvolts: f64,
}

/// Energy splitting `ħω` implied by the fitted beat frequency.
pub fn energy_shift_report(fit: &BeatFit, constants: &PhysicalConstants) -> EnergyShift {
    let joules = constants.hbar * fit.angular_frequency;
    EnergyShift {
        joules,
        electronvolts: constants.joules_to_ev(joules),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Noise {
    /// No noise model; errors from the residual scatter.
    Unknown,
    /// Values are Poisson counts.
    Poisson,
}

struct LinearFit {
    params: [f64; 3],
    /// `(AᵀWA)⁻¹`
    inverse_normal: [[f64; 3]; 3],
    weighted_rss: f64,
}

fn basis(omega: f64, t: f64) -> [f64; 3] {
    let (s, c) = (omega * t).sin_cos();
    [1.0, c, s]
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let cof =
        |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let c00 = cof(1, 2, 1, 2);
    let c01 = -cof(1, 2, 0, 2);
    let c02 = cof(1, 2, 0, 1);
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    let scale = m.iter().flatten().fold(0.0f64, |a, &x| a.max(x.abs()));
    if !(det.abs() > 1e-14 * scale.powi(3)) {
        return None;
    }
    let adj = [
        [c00, -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [c01, cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [c02, -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    Some(adj.map(|row| row.map(|x| x / det)))
}

fn linear_fit(t: &[f64], y: &[f64], w: &[f64], omega: f64) -> Option<LinearFit> {
    let mut normal = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for ((&tk, &yk), &wk) in t.iter().zip(y).zip(w) {
        let b = basis(omega, tk);
        for r in 0..3 {
            rhs[r] += wk * b[r] * yk;
            for c in 0..3 {
                normal[r][c] += wk * b[r] * b[c];
            }
        }
    }
    let inverse_normal = invert3(&normal)?;
    let mut params = [0.0; 3];
    for r in 0..3 {
        params[r] = (0..3).map(|c| inverse_normal[r][c] * rhs[c]).sum();
    }
    let weighted_rss = t
        .iter()
        .zip(y)
        .zip(w)
        .map(|((&tk, &yk), &wk)| {
            let b = basis(omega, tk);
            let r = yk - (params[0] + params[1] * b[1] + params[2] * b[2]);
            wk * r * r
        })
        .sum();
    Some(LinearFit {
        params,
        inverse_normal,
        weighted_rss,
    })
}

fn rss_at(t: &[f64], y: &[f64], w: &[f64], omega: f64) -> f64 {
    linear_fit(t, y, w, omega).map_or(f64::INFINITY, |f| f.weighted_rss)
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-14 * hi.abs() {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Power `|Σ (y − ȳ) e^{−iωt}|²` on the zero-padded grid `ω_k = k·dω`,
/// `k = 1..=padding·N/2`. Returns `(dω, powers)`.
fn padded_spectrum(t: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
    let n = t.len();
    let span = t[n - 1] - t[0];
    let step = span / (n - 1) as f64;
    let d_omega = 2.0 * PI / (ZERO_PADDING as f64 * n as f64 * step);
    let mean = y.iter().sum::<f64>() / n as f64;
    let uniform = t
        .iter()
        .enumerate()
        .all(|(k, &tk)| (tk - (t[0] + k as f64 * step)).abs() <= 1e-9 * step);
    let n_freq = ZERO_PADDING * n / 2;
    let powers = (1..=n_freq)
        .map(|k| {
            let omega = k as f64 * d_omega;
            let mut acc = Complex64::new(0.0, 0.0);
            if uniform {
                let rot = Complex64::from_polar(1.0, -omega * step);
                let mut z = Complex64::from_polar(1.0, -omega * t[0]);
                for &yk in y {
                    acc += z * (yk - mean);
                    z *= rot;
                }
            } else {
                for (&tk, &yk) in t.iter().zip(y) {
                    acc += Complex64::from_polar(1.0, -omega * tk) * (yk - mean);
                }
            }
            acc.norm_sqr()
        })
        .collect();
    (d_omega, powers)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

fn coarse_frequency(t: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let (d_omega, powers) = padded_spectrum(t, y);
    let (peak_index, &peak) = powers
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("spectrum is nonempty");
    let floor = median(&powers);
    if !(peak > PEAK_OVER_FLOOR * floor) {
        return Err(Error::DegenerateFit(format!(
            "spectral peak {peak:.3e} is not above {PEAK_OVER_FLOOR}x the noise floor {floor:.3e}"
        )));
    }
    Ok(((peak_index + 1) as f64 * d_omega, d_omega))
}

fn refine_frequency(t: &[f64], y: &[f64], w: &[f64], coarse: f64, d_omega: f64) -> f64 {
    let lo = (coarse - d_omega).max(0.5 * d_omega);
    golden_section(|omega| rss_at(t, y, w, omega), lo, coarse + d_omega)
}

fn wrap_phase(phi: f64) -> f64 {
    let wrapped = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if wrapped <= -PI {
        wrapped + 2.0 * PI
    } else {
        wrapped
    }
}

fn model_weights(t: &[f64], params: &[f64; 3], omega: f64, floor: f64) -> Vec<f64> {
    t.iter()
        .map(|&tk| {
            let b = basis(omega, tk);
            let m = params[0] + params[1] * b[1] + params[2] * b[2];
            1.0 / m.max(floor)
        })
        .collect()
}

fn fit_series(t: &[f64], y: &[f64], noise: Noise, freq_hint: Option<f64>) -> Result<BeatFit> {
    let n = t.len();
    if n < MIN_BINS {
        return Err(Error::InsufficientData(format!(
            "{n} bins, need at least {MIN_BINS}"
        )));
    }
    if t.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::InsufficientData(
            "bin times must be strictly increasing".into(),
        ));
    }
    let span = t[n - 1] - t[0];
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(hi - lo > 1e-12 * lo.abs().max(hi.abs())) {
        return Err(Error::DegenerateFit("input is constant".into()));
    }

    let mean = y.iter().sum::<f64>() / n as f64;
    let variance_floor = (RELATIVE_VARIANCE_FLOOR * mean).max(1.0);
    let mut weights: Vec<f64> = match noise {
        Noise::Unknown => vec![1.0; n],
        Noise::Poisson => y.iter().map(|&c| 1.0 / c.max(variance_floor)).collect(),
    };

    let check_span = |omega: f64| {
        if span * omega < MIN_PERIODS * 2.0 * PI {
            Err(Error::InsufficientData(format!(
                "data span {span} s covers fewer than {MIN_PERIODS} periods at ω = {omega} rad/s"
            )))
        } else {
            Ok(())
        }
    };

    let search = match freq_hint {
        Some(hint) => {
            if !(hint > 0.0) || !hint.is_finite() {
                return Err(Error::InsufficientData(format!(
                    "frequency hint must be positive, got {hint}"
                )));
            }
            check_span(hint)?;
            None
        }
        None => {
            let (coarse, d_omega) = coarse_frequency(t, y)?;
            // the putative frequency is only known to within the search window
            check_span(coarse + d_omega)?;
            Some((coarse, d_omega))
        }
    };

    let singular = || Error::DegenerateFit("normal equations are singular".into());
    let mut omega = match search {
        Some((coarse, d_omega)) => refine_frequency(t, y, &weights, coarse, d_omega),
        None => freq_hint.unwrap_or_default(),
    };
    let mut fit = linear_fit(t, y, &weights, omega).ok_or_else(singular)?;

    if noise == Noise::Poisson {
        for _ in 0..REWEIGHT_PASSES {
            weights = model_weights(t, &fit.params, omega, variance_floor);
            fit = linear_fit(t, y, &weights, omega).ok_or_else(singular)?;
        }
        if let Some((coarse, d_omega)) = search {
            omega = refine_frequency(t, y, &weights, coarse, d_omega);
            fit = linear_fit(t, y, &weights, omega).ok_or_else(singular)?;
            weights = model_weights(t, &fit.params, omega, variance_floor);
            fit = linear_fit(t, y, &weights, omega).ok_or_else(singular)?;
        }
    }

    let [offset, a, b] = fit.params;
    let amplitude = a.hypot(b);
    let phase = if amplitude > 0.0 {
        wrap_phase((-b).atan2(a))
    } else {
        0.0
    };
    let cov_scale = match noise {
        Noise::Poisson => 1.0,
        Noise::Unknown => fit.weighted_rss / (n - 3) as f64,
    };
    let cov = fit.inverse_normal.map(|row| row.map(|x| x * cov_scale));
    let amplitude_var = if amplitude > 0.0 {
        (a * a * cov[1][1] + b * b * cov[2][2] + 2.0 * a * b * cov[1][2]) / (amplitude * amplitude)
    } else {
        0.5 * (cov[1][1] + cov[2][2])
    };
    let residual_rms = (t
        .iter()
        .zip(y)
        .map(|(&tk, &yk)| {
            let bk = basis(omega, tk);
            (yk - (offset + a * bk[1] + b * bk[2])).powi(2)
        })
        .sum::<f64>()
        / n as f64)
        .sqrt();

    Ok(BeatFit {
        offset,
        amplitude,
        angular_frequency: omega,
        phase,
        residual_rms,
        amplitude_stderr: amplitude_var.max(0.0).sqrt(),
    })
}

/// Fit a count trace. Rates are reported in counts/s.
pub fn fit_beat(counts: &CountTrace, freq_hint: Option<f64>) -> Result<BeatFit> {
    if counts.bin_centers.len() != counts.counts.len() {
        return Err(Error::InsufficientData(
            "bin centers and counts differ in length".into(),
        ));
    }
    let y: Vec<f64> = counts.counts.iter().map(|&c| c as f64).collect();
    let fit = fit_series(&counts.bin_centers, &y, Noise::Poisson, freq_hint)?;
    let per_second = 1.0 / counts.dwell;
    Ok(BeatFit {
        offset: fit.offset * per_second,
        amplitude: fit.amplitude * per_second,
        residual_rms: fit.residual_rms * per_second,
        amplitude_stderr: fit.amplitude_stderr * per_second,
        ..fit
    })
}

/// Fit a noiseless intensity trace with uniform weights.
pub fn fit_intensity(trace: &IntensityTrace, freq_hint: Option<f64>) -> Result<BeatFit> {
    fit_series(&trace.times, &trace.intensity, Noise::Unknown, freq_hint)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(n: usize, dt: f64, f: impl Fn(f64) -> f64) -> IntensityTrace {
        let times: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
        let intensity = times.iter().map(|&t| f(t)).collect();
        IntensityTrace { times, intensity }
    }

    #[test]
    fn noiseless_sinusoid_recovered() {
        let trace = synthetic(300, 1.0, |t| 50.0 + 30.0 * (0.1047 * t).cos());
        let fit = fit_intensity(&trace, None).unwrap();
        assert!((fit.angular_frequency - 0.1047).abs() < 1e-3 * 0.1047);
        assert!((fit.amplitude - 30.0).abs() < 1e-3 * 30.0);
        assert!((fit.offset - 50.0).abs() < 1e-6);
        assert!(fit.phase.abs() < 1e-6);
        assert!(fit.residual_rms < 1e-8);
    }

    #[test]
    fn phase_convention() {
        let trace = synthetic(400, 0.5, |t| 1.0 + 0.5 * (0.3 * t + 2.0).cos());
        let fit = fit_intensity(&trace, Some(0.3)).unwrap();
        assert!((fit.phase - 2.0).abs() < 1e-10);
        let trace = synthetic(400, 0.5, |t| 1.0 + 0.5 * (0.3 * t - 3.0).cos());
        let fit = fit_intensity(&trace, None).unwrap();
        assert!((fit.phase + 3.0).abs() < 1e-8);
        assert!(fit.phase > -PI && fit.phase <= PI);
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn constant_input_is_degenerate() {
        let trace = synthetic(100, 1.0, |_| 7.0);
        assert!(matches!(
            fit_intensity(&trace, None),
            Err(Error::DegenerateFit(_))
        ));
        let counts =
            CountTrace::new((0..100).map(|k| k as f64).collect(), vec![12; 100], 1.0).unwrap();
        assert!(matches!(
            fit_beat(&counts, None),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn too_few_bins_or_periods() {
        let trace = synthetic(7, 1.0, |t| (t).cos());
        assert!(matches!(
            fit_intensity(&trace, None),
            Err(Error::InsufficientData(_))
        ));
        let trace = synthetic(100, 1.0, |t| (0.01 * t).cos());
        assert!(matches!(
            fit_intensity(&trace, Some(0.01)),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn count_fit_scales_by_dwell() {
        // deterministic counts following 40 + 20 cos(0.2 t) per 2 s bin
        let centers: Vec<f64> = (0..400).map(|k| 2.0 * k as f64 + 1.0).collect();
        let counts: Vec<u64> = centers
            .iter()
            .map(|&t| (2.0 * (40.0 + 20.0 * (0.2 * t).cos())).round() as u64)
            .collect();
        let trace = CountTrace::new(centers, counts, 2.0).unwrap();
        let fit = fit_beat(&trace, None).unwrap();
        assert!((fit.angular_frequency - 0.2).abs() < 1e-3 * 0.2);
        assert!((fit.amplitude - 20.0).abs() < 0.1);
        assert!((fit.offset - 40.0).abs() < 0.1);
        assert!(fit.amplitude_stderr > 0.0);
    }

    #[test]
    fn energy_report() {
        let c = PhysicalConstants::default();
        let fit = BeatFit {
            offset: 1.0,
            amplitude: 0.5,
            angular_frequency: 2.0 * PI / 60.0,
            phase: 0.0,
            residual_rms: 0.0,
            amplitude_stderr: 0.0,
        };
        let e = energy_shift_report(&fit, &c);
        assert!(
            (e.electronvolts - 6.8927e-17).abs() < 0.001e-17,
            "{}",
            e.electronvolts
        );
        let doubled = energy_shift_report(
            &BeatFit {
                angular_frequency: 2.0 * fit.angular_frequency,
                ..fit
            },
            &c,
        );
        assert!((doubled.joules - 2.0 * e.joules).abs() < 1e-15 * e.joules);
        let zero = energy_shift_report(
            &BeatFit {
                angular_frequency: 0.0,
                ..fit
            },
            &c,
        );
        assert_eq!(zero.joules, 0.0);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn invert3_identity_and_singular() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(invert3(&id).unwrap(), id);
        let m = [[4.0, 1.0, 2.0], [1.0, 3.0, 0.5], [2.0, 0.5, 5.0]];
        let inv = invert3(&m).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let p: f64 = (0..3).map(|k| m[r][k] * inv[k][c]).sum();
                assert!((p - if r == c { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(invert3(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]]).is_none());
    }
}
