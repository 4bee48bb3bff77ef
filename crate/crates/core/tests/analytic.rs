use std::f64::consts::PI;

use proptest::prelude::*;
use slowlight::analytic::{
    fractional_loss, min_length_for_loss, soliton_velocity, stokes_of, BackgroundField, PolarizationFrame, SolitonParams,
    SolitonSolution,
};
use slowlight::{coupling_from_atomic_data, AtomicData, DetuningDistribution, LineShape, MediumProfile, C64};

fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / (n - 1) as f64;
    let inner: f64 = (1..n - 1).map(|i| f(a + i as f64 * h)).sum();
    h * (inner + 0.5 * (f(a) + f(b)))
}

#[test]
fn gaussian_velocity_matches_direct_quadrature() {
    let p = SolitonParams::figure1();
    let (g, intensity) = (50.0, 0.25);
    for &sigma in &[0.5, 2.0, 8.0] {
        let nu = DetuningDistribution::new(LineShape::Gaussian { width: sigma }, 41).unwrap();
        let v = soliton_velocity(&p, g, &nu, intensity).unwrap();
        let density = |d: f64| (-d * d / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt());
        let integral = trapezoid(
            |d| density(d) * g / ((p.xi() - d).powi(2) + p.eta().powi(2)),
            -12.0 * sigma,
            12.0 * sigma,
            20001,
        );
        let oracle = intensity / (2.0 * p.modulus_sqr()) / integral;
        assert!(((v - oracle) / oracle).abs() < 1e-2, "sigma {sigma}: {v} vs {oracle}");
    }
}

#[test]
fn lorentzian_velocity_matches_truncated_density() {
    // The line is cut at 8 half widths and renormalized; Delta = gamma tan(u)
    // makes that density uniform in u.
    let p = SolitonParams::figure1();
    let (g, intensity, gamma) = (50.0, 0.25, 1.5);
    let nu = DetuningDistribution::new(LineShape::Lorentzian { width: gamma }, 2001).unwrap();
    let v = soliton_velocity(&p, g, &nu, intensity).unwrap();
    let um = 8.0f64.atan();
    let integral = trapezoid(
        |u| {
            let d = gamma * u.tan();
            g / ((p.xi() - d).powi(2) + p.eta().powi(2))
        },
        -um,
        um,
        200001,
    ) / (2.0 * um);
    let oracle = intensity / (2.0 * p.modulus_sqr()) / integral;
    assert!(((v - oracle) / oracle).abs() < 1e-2, "{v} vs {oracle}");

    // Untruncated, the eta and gamma lines convolve to width eta + gamma.
    let e = p.eta() + gamma;
    let full = intensity / (2.0 * p.modulus_sqr()) / (g * e / (p.eta() * (p.xi() * p.xi() + e * e)));
    assert!(((v - full) / full).abs() < 0.1);
}

#[test]
fn sharp_line_velocity() {
    let nu = DetuningDistribution::sharp_line();
    for &(om, g) in &[(0.5, 50.0), (0.5, 100.0), (0.7, 50.0)] {
        let v = soliton_velocity(&SolitonParams::figure1(), g, &nu, om * om).unwrap();
        assert!((v - om * om / (2.0 * g)).abs() < 1e-15);
    }
}

#[test]
fn coupling_formula_from_atomic_data() {
    let data = AtomicData {
        einstein_a: 6.15e7,
        density: 1e18,
        wavelength: 5.89e-7,
        cross_section: 1e-6,
    };
    let g = coupling_from_atomic_data(&data).unwrap();
    let si = 3.0 / (16.0 * PI) * 299_792_458.0 * 6.15e7 * 1e18 * 5.89e-7f64.powi(2);
    assert!(((g - si * 1e-12) / g).abs() < 1e-12);
}

#[test]
fn twist_depth_follows_two_theta() {
    let nu = DetuningDistribution::sharp_line();
    let medium = MediumProfile::uniform(50.0, 1.0).unwrap();
    for k in 1..8 {
        let theta = k as f64 * PI / 8.0;
        let p = SolitonParams::from_polar(10.0, theta, 0.0, 0.0).unwrap();
        let w = p.tau_width(0.25);
        let bg = BackgroundField::constant(C64::new(0.5, 0.0), -15.0 * w, 15.0 * w, 6001).unwrap();
        let sol = SolitonSolution::new(p, &bg, &medium, &nu);
        let min_s3 = sol
            .field_slice(0.0)
            .iter()
            .map(|f| stokes_of(f).direction()[2])
            .fold(f64::INFINITY, f64::min);
        assert!((min_s3 - (2.0 * theta).cos()).abs() < 1e-4, "theta {theta}: {min_s3}");
        // The pole is reached only at |theta| = pi/2 with eta > 0.
        assert_eq!(min_s3 < -1.0 + 1e-6, k == 4);
    }
}

fn far_field(p: SolitonParams, omega: C64, tau: f64) -> C64 {
    let nu = DetuningDistribution::sharp_line();
    let medium = MediumProfile::uniform(50.0, 1.0).unwrap();
    let bg = BackgroundField::constant(omega, -tau.abs(), tau.abs(), 3).unwrap();
    SolitonSolution::new(p, &bg, &medium, &nu).field(tau, 0.0).unwrap().p / omega
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn total_intensity_equals_background(
        mag in 2.0f64..30.0,
        theta in 0.05f64..3.09,
        q0 in -3.0f64..3.0,
        phi0 in -3.0f64..3.0,
        om in 0.1f64..1.0,
        arg in -3.0f64..3.0,
        x in -4.0f64..4.0,
    ) {
        let p = SolitonParams::from_polar(mag, theta, q0, phi0).unwrap();
        let omega = C64::from_polar(om, arg);
        let w = p.tau_width(om * om);
        let nu = DetuningDistribution::sharp_line();
        let medium = MediumProfile::uniform(50.0, 1.0).unwrap();
        let bg = BackgroundField::constant(omega, -5.0 * w, 5.0 * w, 11).unwrap();
        let sol = SolitonSolution::new(p, &bg, &medium, &nu);
        let s = sol.state(x * w, 0.3).unwrap();
        let rel = (s.field.intensity() - om * om).abs() / (om * om);
        prop_assert!(rel < 1e-12);
        let st = stokes_of(&s.field);
        prop_assert!(st.polarization_defect() < 1e-10);
        for a in &s.atoms {
            let ground = a.p.norm_sqr() + a.m.norm_sqr();
            prop_assert!((ground - 1.0).abs() < 1e-12);
            prop_assert!(a.e.norm_sqr() <= 0.25 * om * om / (mag * mag * theta.sin().powi(2)) + 1e-15);
        }
    }

    #[test]
    fn geometric_phase_is_minus_two_theta(theta in 0.1f64..3.0, q0 in -2.0f64..2.0) {
        let p = SolitonParams::from_polar(10.0, theta, q0, 0.0).unwrap();
        let omega = C64::new(0.5, 0.0);
        let span = 40.0 * p.tau_width(0.25);
        let ratio = far_field(p, omega, -span) / far_field(p, omega, span);
        let err = (ratio / C64::from_polar(1.0, -2.0 * theta)).arg().abs();
        prop_assert!(err < 1e-9, "theta {}: err {:e}", theta, err);
    }

    #[test]
    fn frames_preserve_intensity_and_norm(
        g in -3.0f64..3.0, a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, x in -3.0f64..3.0,
    ) {
        let p = SolitonParams::figure1();
        let w = p.tau_width(0.25);
        let nu = DetuningDistribution::sharp_line();
        let medium = MediumProfile::uniform(50.0, 1.0).unwrap();
        let bg = BackgroundField::constant(C64::new(0.5, 0.0), -5.0 * w, 5.0 * w, 11).unwrap();
        let s = SolitonSolution::new(p, &bg, &medium, &nu).state(x * w, 0.0).unwrap();
        let frame = PolarizationFrame::from_angles(g, a, b, c);
        let t = frame.apply(&s);
        prop_assert!((t.field.intensity() - s.field.intensity()).abs() < 1e-13);
        prop_assert!((stokes_of(&t.field).s0 - stokes_of(&s.field).s0).abs() < 1e-13);
        for (u, v) in t.atoms.iter().zip(&s.atoms) {
            prop_assert!((u.norm_sqr() - v.norm_sqr()).abs() < 1e-13);
            prop_assert!((u.e - v.e).norm() < 1e-14);
            // Dark-state condition survives the frame change.
            prop_assert!((u.bright_coupling(&t.field) - v.bright_coupling(&s.field)).norm() < 1e-12);
        }
    }

    #[test]
    fn loss_scales_as_inverse_square_length(
        n in 1e16f64..1e20, lambda in 3e-7f64..1e-6, l in 1e-3f64..1.0, ls in 1e-6f64..1e-2, k in 1.1f64..10.0,
    ) {
        let a = fractional_loss(n, lambda, l, ls);
        let b = fractional_loss(n, lambda, l, k * ls);
        prop_assert!(((a / b) / (k * k) - 1.0).abs() < 1e-12);
        let budget = a;
        let back = min_length_for_loss(n, lambda, l, budget);
        prop_assert!(((back - ls) / ls).abs() < 1e-12);
    }
}
