use proptest::prelude::*;
use slowlight::analytic::{BackgroundField, SolitonParams, SolitonSolution};
use slowlight::lax::{build_lax_pair, hamiltonian, zero_curvature_residual, AnalyticHistory};
use slowlight::modes::{all_modes, bracket_matrix, mode_field, symplectic_check_and_rescale, BracketMatrix, ModeMethod, ModeParam};
use slowlight::{DetuningDistribution, FieldPair, MediumProfile, C64};

fn figure1_bg(half_widths: f64, n: usize) -> (SolitonParams, BackgroundField) {
    let p = SolitonParams::figure1();
    let w = p.tau_width(0.25);
    let bg = BackgroundField::constant(C64::new(0.5, 0.0), -half_widths * w, half_widths * w, n).unwrap();
    (p, bg)
}

#[test]
fn zero_curvature_residual_is_second_order() {
    let (p, bg) = figure1_bg(12.0, 4001);
    let nu = DetuningDistribution::sharp_line();
    let medium = MediumProfile::uniform(50.0, 10.0).unwrap();
    let wz = p.zeta_width(50.0, &nu);
    let w = p.tau_width(0.25);
    let sol = SolitonSolution::new(p, &bg, &medium, &nu);
    let zeta = wz;
    let tc = sol.center_tau(zeta).unwrap();
    let points: Vec<(f64, f64)> = [-1.0, 0.0, 0.5, 1.0].iter().map(|k| (tc + k * w, zeta)).collect();
    let clean = AnalyticHistory::new(sol.clone(), &medium);
    let bad = AnalyticHistory::new(sol.clone(), &medium).corrupted(1.01);
    let res = |f: f64| zero_curvature_residual(&clean, 20.0, &points, f * w, f * wz).unwrap().max_residual;
    let (coarse, fine) = (res(0.2), res(0.1));
    let ratio = coarse / fine;
    assert!((3.2..4.8).contains(&ratio), "halving h gave ratio {ratio}");
    // A corrupted history plateaus instead of converging.
    let bad_res = |f: f64| zero_curvature_residual(&bad, 20.0, &points, f * w, f * wz).unwrap().max_residual;
    let (bc, bf) = (bad_res(0.1), bad_res(0.05));
    assert!(bf > 0.8 * bc, "{bc:e} -> {bf:e}");
    assert!(bf > 5.0 * res(0.05), "{bf:e} vs {:e}", res(0.05));
}

#[test]
fn lax_u_is_anti_hermitian() {
    let (p, bg) = figure1_bg(5.0, 101);
    let nu = DetuningDistribution::new(slowlight::LineShape::Gaussian { width: 1.0 }, 9).unwrap();
    let medium = MediumProfile::uniform(50.0, 1.0).unwrap();
    let sol = SolitonSolution::new(p, &bg, &medium, &nu);
    let s = sol.state(0.0, 0.2).unwrap();
    let pair = build_lax_pair(&s.field, &s.atoms, &nu, 50.0, 20.0).unwrap();
    assert!(pair.hermiticity_defect() < 1e-15);
    assert!(build_lax_pair(&s.field, &s.atoms[..3], &nu, 50.0, 20.0).is_err());
    // Exact spectral values on a node are refused.
    assert!(build_lax_pair(&s.field, &s.atoms, &nu, 50.0, nu.nodes()[4]).is_err());
}

#[test]
fn hamiltonian_couples_excited_to_both_grounds() {
    let f = FieldPair::new(C64::new(0.4, 0.1), C64::new(-0.2, 0.3));
    let h = hamiltonian(&f, 1.5);
    assert_eq!(h[(0, 0)], C64::new(-1.5, 0.0));
    assert_eq!(h[(0, 1)], h[(1, 0)].conj());
    assert_eq!(h[(0, 2)], h[(2, 0)].conj());
    assert_eq!(h[(1, 2)], C64::new(0.0, 0.0));
}

// Modes by central differences of the closed form, then the bracket by a
// plain trapezoid: an evaluation path separate from the modes module.
fn direct_bracket(p: SolitonParams, a: ModeParam, b: ModeParam, bg: &BackgroundField) -> f64 {
    let nu = DetuningDistribution::sharp_line();
    let medium = MediumProfile::uniform(50.0, 1.0).unwrap();
    let shift = |p: SolitonParams, m: ModeParam, h: f64| match m {
        ModeParam::Xi => p.with_xi(p.xi() + h).unwrap(),
        ModeParam::Eta => p.with_eta(p.eta() + h).unwrap(),
        ModeParam::Q0 => p.with_q0(p.q0() + h),
        ModeParam::Phi0 => p.with_phi0(p.phi0() + h),
    };
    let h = 1e-5;
    let deriv = |m: ModeParam| -> Vec<FieldPair> {
        let up = SolitonSolution::new(shift(p, m, h), bg, &medium, &nu).field_slice(0.0);
        let dn = SolitonSolution::new(shift(p, m, -h), bg, &medium, &nu).field_slice(0.0);
        up.iter()
            .zip(&dn)
            .map(|(u, d)| FieldPair::new((u.p - d.p) / (2.0 * h), (u.m - d.m) / (2.0 * h)))
            .collect()
    };
    let (da, db) = (deriv(a), deriv(b));
    let n = da.len();
    let term = |i: usize| (da[i].p.conj() * db[i].p).im + (da[i].m.conj() * db[i].m).im;
    let inner: f64 = (1..n - 1).map(term).sum();
    0.25 * bg.dtau() * (inner + 0.5 * (term(0) + term(n - 1)))
}

#[test]
fn canonical_pairs_from_direct_quadrature() {
    let (p, bg) = figure1_bg(20.0, 8001);
    let q_xi = direct_bracket(p, ModeParam::Q0, ModeParam::Xi, &bg);
    let phi_eta = direct_bracket(p, ModeParam::Phi0, ModeParam::Eta, &bg);
    let q_phi = direct_bracket(p, ModeParam::Q0, ModeParam::Phi0, &bg);
    assert!((q_xi - 1.0).abs() < 1e-2, "{{Q0,xi}} = {q_xi}");
    assert!((phi_eta - 1.0).abs() < 1e-2, "{{Phi0,eta}} = {phi_eta}");
    assert!(q_phi.abs() < 1e-2, "{{Q0,Phi0}} = {q_phi}");

    let nu = DetuningDistribution::sharp_line();
    let medium = MediumProfile::uniform(50.0, 1.0).unwrap();
    let m = bracket_matrix(&all_modes(&p, &bg, &medium, &nu, 0.0).unwrap()).unwrap();
    assert!((m.get(ModeParam::Q0, ModeParam::Xi) - q_xi).abs() < 1e-4);
    assert!((m.get(ModeParam::Phi0, ModeParam::Eta) - phi_eta).abs() < 1e-4);
    assert!(m.antisymmetry_defect() == 0.0);
    let report = symplectic_check_and_rescale(&m, &p, None, 1e-2);
    assert!(report.pass, "{:?}", report.failures);
}

#[test]
fn analytic_and_difference_modes_agree() {
    let (p, bg) = figure1_bg(10.0, 2001);
    let nu = DetuningDistribution::sharp_line();
    let medium = MediumProfile::uniform(50.0, 1.0).unwrap();
    for param in [ModeParam::Q0, ModeParam::Phi0] {
        let a = mode_field(&p, &bg, &medium, &nu, param, 0.0, ModeMethod::Analytic).unwrap();
        let d = mode_field(&p, &bg, &medium, &nu, param, 0.0, ModeMethod::CentralDifference).unwrap();
        let dev = (0..a.len())
            .map(|i| (a.d_plus[i] - d.d_plus[i]).norm().max((a.d_minus[i] - d.d_minus[i]).norm()))
            .fold(0.0, f64::max);
        assert!(dev < 1e-8 * a.peak().max(1.0), "{param}: {dev:e}");
    }
    assert!(mode_field(&p, &bg, &medium, &nu, ModeParam::Xi, 0.0, ModeMethod::Analytic).is_err());
}

#[test]
fn perturbed_mode_breaks_the_pattern() {
    let (p, bg) = figure1_bg(20.0, 8001);
    let nu = DetuningDistribution::sharp_line();
    let medium = MediumProfile::uniform(50.0, 1.0).unwrap();
    let mut modes = all_modes(&p, &bg, &medium, &nu, 0.0).unwrap();
    let xi = modes.iter_mut().find(|m| m.param == ModeParam::Xi).unwrap();
    for z in xi.d_plus.iter_mut().chain(xi.d_minus.iter_mut()) {
        *z *= 1.05;
    }
    let m = bracket_matrix(&modes).unwrap();
    assert!(!symplectic_check_and_rescale(&m, &p, None, 1e-2).pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bracket_set_is_antisymmetric(v in proptest::collection::vec(-5.0f64..5.0, 6)) {
        let mut m = BracketMatrix([[0.0; 4]; 4]);
        let mut k = 0;
        for r in 0..4 {
            for c in r + 1..4 {
                m.set(ModeParam::ALL[r], ModeParam::ALL[c], v[k]);
                k += 1;
            }
        }
        prop_assert_eq!(m.antisymmetry_defect(), 0.0);
        for a in ModeParam::ALL {
            prop_assert_eq!(m.get(a, a), 0.0);
        }
    }
}
