//! Propagator and interferometer properties against closed forms and the
//! numerical integrator.

mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use spinrot_core::element::{QuadratureCoil, RotatingFlipper, RotationProfile, StaticFlipper};
use spinrot_core::interferometer::{complementary_intensity, element_propagator};
use spinrot_core::{
    evolve_numeric, evolve_numeric_propagator, fit_intensity, output_intensity, path_propagator,
    quadrature_coil_propagator, rotating_flipper_propagator, rotating_frame_hamiltonian,
    simulate_trace, static_flipper_propagator, BeamPath, BeamSpec, FieldElement, PathLabel,
    PhysicalConstants, SpinPropagator, Spinor, StepControl,
};

use common::*;

const SIXTY_SECONDS: f64 = 2.0 * PI / 60.0;

fn constants() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

fn lab_field(e: &RotatingFlipper, t_entry: f64) -> impl Fn(f64) -> [f64; 3] + '_ {
    let (s0, c0) = e.angle(t_entry).sin_cos();
    move |s| {
        let (ss, cs) = (e.profile.angle(0.0, e.omega, t_entry + s)
            - e.profile.angle(0.0, e.omega, t_entry))
        .sin_cos();
        [
            e.field * (c0 * cs - s0 * ss),
            e.field * (s0 * cs + c0 * ss),
            0.0,
        ]
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn propagators_are_unitary(
        field in 0.0..0.1f64,
        omega in 0.0..1e3f64,
        width in 1e-3..1e-1f64,
        alpha0 in -PI..PI,
        t_entry in 0.0..1e3f64,
        wavelength in 1e-10..1e-9f64,
    ) {
        let c = constants();
        let beam = BeamSpec::longitudinal(wavelength, &c).unwrap();
        let rot = RotatingFlipper { field, omega, alpha0, width, profile: RotationProfile::Continuous };
        let osc = RotatingFlipper { profile: RotationProfile::oscillating_default(), ..rot };
        let quad = QuadratureCoil { field, omega, alpha0, width };
        let stat = StaticFlipper { field, axis_angle: alpha0, width };
        for u in [
            rotating_flipper_propagator(&rot, &beam, t_entry, &c).unwrap(),
            element_propagator(&FieldElement::RotatingFlipper(osc), &beam, t_entry, &c).unwrap(),
            quadrature_coil_propagator(&quad, &beam, t_entry, &c).unwrap(),
            static_flipper_propagator(&stat, &beam, &c).unwrap(),
        ] {
            prop_assert!(u.unitarity_error() < 1e-10, "{}", u.unitarity_error());
        }
    }

    #[test]
    fn splitting_a_coil_composes(
        field in 1e-4..0.1f64,
        omega in -1e3..1e3f64,
        width in 1e-3..1e-1f64,
        split in 0.01..0.99f64,
        t_entry in 0.0..100.0f64,
        oscillating in any::<bool>(),
    ) {
        let c = constants();
        let beam = beam(&c);
        let (profile, t_entry) = if oscillating {
            // enter just before a turning point so the transit straddles it
            let period = 0.01;
            let corner = (t_entry / (0.5 * period)).ceil() * 0.5 * period;
            let tau = width / beam.speed;
            (
                RotationProfile::Oscillating { amplitude_angle: 2.0 * PI / 3.0, period },
                corner - (1.0 - split) * tau,
            )
        } else {
            (RotationProfile::Continuous, t_entry)
        };
        let whole = RotatingFlipper { field, omega, alpha0: 0.3, width, profile };
        let first = RotatingFlipper { width: split * width, ..whole };
        let second = RotatingFlipper { width: width - first.width, ..whole };
        let u_whole = element_propagator(&FieldElement::RotatingFlipper(whole), &beam, t_entry, &c).unwrap();
        let halves = BeamPath::new(
            PathLabel::I,
            vec![FieldElement::RotatingFlipper(first), FieldElement::RotatingFlipper(second)],
        );
        let u_split = path_propagator(&halves, &beam, t_entry, &c).unwrap();
        prop_assert!(u_whole.max_abs_diff(&u_split) < 1e-9, "{}", u_whole.max_abs_diff(&u_split));
    }

    #[test]
    fn quadrature_coil_matches_rotating_flipper(
        field in 1e-4..0.1f64,
        omega in -1e3..1e3f64,
        width in 1e-3..1e-1f64,
        alpha0 in -PI..PI,
        t_entry in 0.0..1e3f64,
    ) {
        let c = constants();
        let beam = beam(&c);
        let rot = RotatingFlipper { field, omega, alpha0, width, profile: RotationProfile::Continuous };
        let quad = QuadratureCoil { field, omega, alpha0, width };
        let a = rotating_flipper_propagator(&rot, &beam, t_entry, &c).unwrap();
        let b = quadrature_coil_propagator(&quad, &beam, t_entry, &c).unwrap();
        prop_assert!(a.frobenius_distance(&b) < 1e-10, "{}", a.frobenius_distance(&b));
    }

    #[test]
    fn pi_flip_degrades_quadratically_with_rotation(
        ratio in 0.0..0.3f64,
        t_entry in 0.0..100.0f64,
    ) {
        let c = constants();
        let beam = beam(&c);
        let omega = ratio * c.gyromagnetic_ratio_neutron.abs() * FIELD;
        let u = rotating_flipper_propagator(&rotating(omega, &c), &beam, t_entry, &c).unwrap();
        let p = u.apply(&Spinor::up()).down.norm_sqr();
        prop_assert!(p > 1.0 - 10.0 * ratio * ratio - 1e-9, "p = {p} at Ω/|γB| = {ratio}");
    }

    #[test]
    fn flip_phase_advances_with_entry_time(
        omega in -10.0..10.0f64,
        t1 in 0.0..100.0f64,
        dt in 0.0..100.0f64,
    ) {
        let c = constants();
        let beam = beam(&c);
        let coil = rotating(omega, &c);
        let a1 = rotating_flipper_propagator(&coil, &beam, t1, &c).unwrap().flip_amplitude();
        let a2 = rotating_flipper_propagator(&coil, &beam, t1 + dt, &c).unwrap().flip_amplitude();
        let advance = wrap(a2.arg() - a1.arg() - omega * dt);
        prop_assert!(advance.abs() < 1e-9, "{advance}");
    }

    #[test]
    fn ports_share_the_flux(
        omega in -1.0..1.0f64,
        chi in -PI..PI,
        t in 0.0..500.0f64,
        up_re in -1.0..1.0f64,
        down_im in -1.0..1.0f64,
    ) {
        let c = constants();
        let mut cfg = setup(FieldElement::RotatingFlipper(rotating(omega, &c)), sampling(0.0, 1.0, 2), &c)
            .with_chi(chi);
        if let Ok(spin) = Spinor::new(Complex64::new(up_re, 0.3), Complex64::new(0.1, down_im)).normalize() {
            cfg.beam.initial_spin = spin;
        }
        let forward = output_intensity(&cfg, t, &c).unwrap();
        let back = complementary_intensity(&cfg, t, &c).unwrap();
        prop_assert!((forward + back - 1.0).abs() < 1e-12, "{forward} + {back}");
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&forward));
    }
}

#[test]
fn entry_time_phase_law_holds_for_integrated_states() {
    let c = constants();
    let beam = beam(&c);
    let coil = rotating(0.5, &c);
    let tau = coil.width / beam.speed;
    let control = StepControl::default();
    let amplitude = |t: f64| {
        evolve_numeric(lab_field(&coil, t), &Spinor::up(), 0.0, tau, &control, &c)
            .unwrap()
            .spinor
            .down
    };
    let (t1, t2) = (3.0, 17.25);
    let advance = wrap(amplitude(t2).arg() - amplitude(t1).arg() - 0.5 * (t2 - t1));
    assert!(advance.abs() < 1e-9, "{advance}");
}

#[test]
fn analytic_propagator_matches_integrator_in_frobenius_norm() {
    let c = constants();
    let control = StepControl::default();
    let mut d = Draws::new(99);
    for _ in 0..20 {
        let field = d.uniform(1e-4, 0.05);
        let coil = RotatingFlipper {
            field,
            omega: d.uniform(-0.1, 0.1) * c.gyromagnetic_ratio_neutron.abs() * field,
            alpha0: d.uniform(-PI, PI),
            width: d.log_uniform(1e-3, 3e-2),
            profile: RotationProfile::Continuous,
        };
        let beam = BeamSpec::longitudinal(d.uniform(1e-10, 5e-10), &c).unwrap();
        let t_entry = d.uniform(0.0, 50.0);
        let analytic = rotating_flipper_propagator(&coil, &beam, t_entry, &c).unwrap();
        let numeric = evolve_numeric_propagator(
            lab_field(&coil, t_entry),
            0.0,
            coil.width / beam.speed,
            &control,
            &c,
        )
        .unwrap();
        assert!(analytic.frobenius_distance(&numeric) < 1e-8, "{coil:?}");
    }
}

#[test]
fn integrator_reproduces_static_flip() {
    let c = constants();
    let beam = beam(&c);
    let coil = static_flipper(&c);
    let tau = coil.width / beam.speed;
    let numeric = evolve_numeric(
        |_| [0.0, FIELD, 0.0],
        &Spinor::up(),
        0.0,
        tau,
        &StepControl::default(),
        &c,
    )
    .unwrap();
    let analytic = static_flipper_propagator(&coil, &beam, &c)
        .unwrap()
        .apply(&Spinor::up());
    assert!(numeric.spinor.distance(&analytic) < 1e-8);
}

#[test]
fn slow_swing_still_flips() {
    let c = constants();
    let beam = beam(&c);
    let mut coil = rotating(SIXTY_SECONDS, &c);
    coil.profile = RotationProfile::oscillating_default();
    for t in [0.0, 14.9, 30.0, 45.0, 59.99] {
        let u = element_propagator(&FieldElement::RotatingFlipper(coil), &beam, t, &c).unwrap();
        assert!(u.apply(&Spinor::up()).down.norm_sqr() > 0.999);
    }
}

#[test]
fn quadrature_coil_is_periodic_in_entry_time() {
    let c = constants();
    let beam = beam(&c);
    let coil = quadrature(SIXTY_SECONDS, &c);
    let a = quadrature_coil_propagator(&coil, &beam, 7.0, &c).unwrap();
    let b = quadrature_coil_propagator(&coil, &beam, 7.0 + 60.0, &c).unwrap();
    assert!(a.frobenius_distance(&b) < 1e-10);
    let still = quadrature_coil_propagator(&quadrature(0.0, &c), &beam, 7.0, &c).unwrap();
    let stat = static_flipper_propagator(&static_flipper(&c), &beam, &c).unwrap();
    assert!(still.frobenius_distance(&stat) < 1e-12);
}

/// Eigenvalues of a Hermitian 2×2 matrix by bisection on its characteristic
/// polynomial.
fn bisect_eigenvalues(m: &[[Complex64; 2]; 2]) -> [f64; 2] {
    let (a, d, off) = (m[0][0].re, m[1][1].re, m[0][1].norm_sqr());
    let charpoly = |x: f64| (a - x) * (d - x) - off;
    let centre = 0.5 * (a + d);
    let reach = a.abs() + d.abs() + 2.0 * off.sqrt() + f64::MIN_POSITIVE;
    let root = |mut lo: f64, mut hi: f64| {
        let sign_lo = charpoly(lo) > 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (charpoly(mid) > 0.0) == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    [root(centre - reach, centre), root(centre, centre + reach)]
}

#[test]
fn rotating_frame_spectrum() {
    let c = constants();
    let mut d = Draws::new(5);
    for _ in 0..200 {
        let field = d.uniform(0.0, 0.1);
        let omega = d.uniform(-1e6, 1e6);
        let coil = RotatingFlipper {
            field,
            omega,
            alpha0: 0.0,
            width: 0.01,
            profile: RotationProfile::Continuous,
        };
        let h = rotating_frame_hamiltonian(&coil, &c);
        let expected = c.hbar * (c.gyromagnetic_ratio_neutron * field).hypot(omega);
        let brute = bisect_eigenvalues(&h.matrix);
        assert!((h.splitting() - expected).abs() <= 1e-12 * expected.max(1e-300));
        assert!(((brute[1] - brute[0]) - expected).abs() <= 1e-9 * expected.max(1e-300));
        assert!((h.eigenvalues()[0] - brute[0]).abs() <= 1e-9 * expected.max(1e-300));
    }
    // no field: pure spin-rotation term, eigenvalues ∓ħΩ/2
    let coil = RotatingFlipper {
        field: 0.0,
        omega: 3.0,
        alpha0: 0.0,
        width: 0.01,
        profile: RotationProfile::Continuous,
    };
    let [lo, hi] = rotating_frame_hamiltonian(&coil, &c).eigenvalues();
    assert!(
        (lo + 1.5 * c.hbar).abs() < 1e-12 * c.hbar && (hi - 1.5 * c.hbar).abs() < 1e-12 * c.hbar
    );
}

#[test]
fn free_flight_before_coil_delays_its_phase() {
    let c = constants();
    let beam = beam(&c);
    let omega = 2.0;
    let coil = FieldElement::RotatingFlipper(rotating(omega, &c));
    let leg = FieldElement::FreeFlight { length: 0.37 };
    let before = path_propagator(
        &BeamPath::new(PathLabel::I, vec![leg, coil]),
        &beam,
        4.0,
        &c,
    )
    .unwrap();
    let after = path_propagator(
        &BeamPath::new(PathLabel::I, vec![coil, leg]),
        &beam,
        4.0,
        &c,
    )
    .unwrap();
    let shift = wrap(
        before.flip_amplitude().arg() - after.flip_amplitude().arg() - omega * 0.37 / beam.speed,
    );
    assert!(shift.abs() < 1e-12, "{shift}");
}

#[test]
fn path_bookkeeping_edge_cases() {
    let c = constants();
    let beam = beam(&c);
    let empty = path_propagator(&BeamPath::new(PathLabel::I, vec![]), &beam, 0.0, &c).unwrap();
    assert_eq!(empty, SpinPropagator::identity());
    let sf = static_flipper(&c);
    let single = path_propagator(
        &BeamPath::new(PathLabel::I, vec![FieldElement::StaticFlipper(sf)]),
        &beam,
        9.0,
        &c,
    )
    .unwrap();
    assert_eq!(single, static_flipper_propagator(&sf, &beam, &c).unwrap());

    // identical arms: constructive at χ = 0, dark at χ = π
    let mut cfg = setup(FieldElement::StaticFlipper(sf), sampling(0.0, 10.0, 11), &c);
    assert!((output_intensity(&cfg, 1.0, &c).unwrap() - 1.0).abs() < 1e-12);
    cfg.phase_shifter_chi = PI;
    assert!(output_intensity(&cfg, 1.0, &c).unwrap().abs() < 1e-12);

    // a coil that does not turn gives a flat bright trace
    let still = setup(
        FieldElement::RotatingFlipper(rotating(0.0, &c)),
        sampling(0.0, 100.0, 51),
        &c,
    );
    let trace = simulate_trace(&still, &c).unwrap();
    assert!(trace.intensity.iter().all(|&i| (i - 1.0).abs() < 1e-12));
}

#[test]
fn beat_trace_agrees_with_integrated_states() {
    let c = constants();
    let coil = rotating(SIXTY_SECONDS, &c);
    let cfg = setup(
        FieldElement::RotatingFlipper(coil),
        sampling(0.0, 180.0, 181),
        &c,
    );
    let trace = simulate_trace(&cfg, &c).unwrap();
    let beam = beam(&c);
    let tau = coil.width / beam.speed;
    let legs = LEG / beam.speed;
    let arm_ii = path_propagator(&cfg.path_ii, &beam, 0.0, &c)
        .unwrap()
        .apply(&Spinor::up());
    for k in (0..trace.len()).step_by(9) {
        let arm_i = evolve_numeric(
            lab_field(&coil, trace.times[k] + legs),
            &Spinor::up(),
            0.0,
            tau,
            &StepControl::default(),
            &c,
        )
        .unwrap()
        .spinor;
        let intensity = 0.25 * arm_i.add(&arm_ii).norm_sqr();
        assert!(
            (intensity - trace.intensity[k]).abs() < 1e-8,
            "t = {}",
            trace.times[k]
        );
    }
    // I = ½(1 + cos(Ωt + φ₀)): unit visibility at exactly Ω
    let fit = fit_intensity(&trace, None).unwrap();
    assert!((fit.angular_frequency / SIXTY_SECONDS - 1.0).abs() < 1e-9);
    assert!((fit.offset - 0.5).abs() < 1e-9 && (fit.amplitude - 0.5).abs() < 1e-9);
}

#[test]
fn maxima_are_one_rotation_period_apart() {
    let c = constants();
    let cfg = setup(
        FieldElement::RotatingFlipper(rotating(SIXTY_SECONDS, &c)),
        sampling(0.0, 180.0, 181),
        &c,
    );
    let trace = simulate_trace(&cfg, &c).unwrap();
    let intensity = |t: f64| output_intensity(&cfg, t, &c).unwrap();
    // coarse maxima on the grid, then golden-section refinement
    let mut maxima = Vec::new();
    for k in 0..trace.len() {
        let left = if k == 0 {
            f64::MIN
        } else {
            trace.intensity[k - 1]
        };
        let right = trace.intensity.get(k + 1).copied().unwrap_or(f64::MIN);
        if trace.intensity[k] >= left && trace.intensity[k] > right {
            let (mut a, mut b) = (trace.times[k] - 1.0, trace.times[k] + 1.0);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..80 {
                let (x1, x2) = (b - g * (b - a), a + g * (b - a));
                if intensity(x1) < intensity(x2) {
                    a = x1;
                } else {
                    b = x2;
                }
            }
            maxima.push(0.5 * (a + b));
        }
    }
    // both window edges are maxima: four peaks, three whole periods
    assert_eq!(maxima.len(), 4, "{maxima:?}");
    for pair in maxima.windows(2) {
        assert!((pair[1] - pair[0] - 60.0).abs() < 1e-3, "{maxima:?}");
    }
}

#[test]
fn spectrum_peaks_at_rotation_rate() {
    let c = constants();
    // three whole periods, endpoint excluded
    let cfg = setup(
        FieldElement::RotatingFlipper(rotating(SIXTY_SECONDS, &c)),
        sampling(0.0, 179.0, 180),
        &c,
    );
    let trace = simulate_trace(&cfg, &c).unwrap();
    let n = trace.len();
    let power = |k: usize| {
        let z: Complex64 = trace
            .intensity
            .iter()
            .enumerate()
            .map(|(j, &x)| x * Complex64::from_polar(1.0, -2.0 * PI * (k * j) as f64 / n as f64))
            .sum();
        z.norm_sqr()
    };
    let peak = (1..n / 2)
        .max_by(|&a, &b| power(a).total_cmp(&power(b)))
        .unwrap();
    let peak_omega = 2.0 * PI * peak as f64 / (n as f64 * trace.times[1]);
    let bin = 2.0 * PI / (n as f64 * trace.times[1]);
    assert!(
        (peak_omega - SIXTY_SECONDS).abs() <= bin,
        "peak at bin {peak}"
    );
}

#[test]
fn phase_shifter_moves_only_the_beat_phase() {
    let c = constants();
    let cfg = setup(
        FieldElement::RotatingFlipper(rotating(SIXTY_SECONDS, &c)),
        sampling(0.0, 180.0, 181),
        &c,
    );
    let base = fit_intensity(&simulate_trace(&cfg, &c).unwrap(), None).unwrap();
    for delta in [0.3, -1.1, 2.5, PI] {
        let shifted =
            fit_intensity(&simulate_trace(&cfg.with_chi(delta), &c).unwrap(), None).unwrap();
        assert!(
            wrap(shifted.phase - base.phase + delta).abs() < 1e-9,
            "δ = {delta}"
        );
        assert!((shifted.amplitude - base.amplitude).abs() < 1e-9);
        assert!(
            (shifted.angular_frequency - base.angular_frequency).abs()
                < 1e-9 * base.angular_frequency
        );
    }
}

#[test]
fn wavelength_spread_never_raises_visibility() {
    let c = constants();
    let mut cfg = setup(
        FieldElement::RotatingFlipper(rotating(SIXTY_SECONDS, &c)),
        sampling(0.0, 180.0, 181),
        &c,
    );
    let mono = fit_intensity(&simulate_trace(&cfg, &c).unwrap(), None)
        .unwrap()
        .visibility();
    let mut previous = mono;
    for spread in [0.01e-10, 0.05e-10, 0.1e-10, 0.15e-10] {
        cfg.wavelength_spread = Some(spread);
        let v = fit_intensity(&simulate_trace(&cfg, &c).unwrap(), None)
            .unwrap()
            .visibility();
        assert!(v <= mono + 1e-12, "spread {spread}: {v} > {mono}");
        assert!(v <= previous + 1e-12);
        previous = v;
    }
    assert!(
        previous < mono - 1e-3,
        "broad spread should visibly damp the beat"
    );
}

#[test]
fn rotating_coil_at_rest_is_the_static_flipper() {
    let c = constants();
    let beam = beam(&c);
    let still = rotating_flipper_propagator(&rotating(0.0, &c), &beam, 42.0, &c).unwrap();
    let stat = static_flipper_propagator(&static_flipper(&c), &beam, &c).unwrap();
    assert!(still.frobenius_distance(&stat) < 1e-12);
    // π-flip about y: (1, 0) → −i σ_y (1, 0) = (0, 1)
    let out = stat.apply(&Spinor::up());
    assert!((out.down - Complex64::new(1.0, 0.0)).norm() < 1e-12);
}
