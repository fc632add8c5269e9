use epsense_core::estimation::{imprecision, sensitivity, weak_force_snr};
use epsense_core::loop_model::loop_spectrum_at;
use epsense_core::markovian::eigen::pt_matrix;
use epsense_core::markovian::spectra::pt_spectrum_at;
use epsense_core::markovian::{eigen_numeric, pt_eigenfrequencies, pt_output_spectrum_near_resonance};
use epsense_core::stochastic::{gaussian_quadrature_noise, welch, Window};
use epsense_core::{Complex64, MeanField, PtParams, Quadrature};
use proptest::prelude::*;

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn splitting_squared_is_linear_in_eps(gamma in log_uniform(0.1, 10.0), eps in log_uniform(1e-8, 1.0)) {
        let p = PtParams::new(0.0, gamma, eps, 0.0, 0.0).unwrap();
        let s = pt_eigenfrequencies(&p).unwrap().splitting();
        let expected = 4.0 * gamma * gamma * eps * (2.0 + eps);
        prop_assert!((s.norm_sqr() / expected - 1.0).abs() < 1e-10);
        prop_assert!(s.im.abs() <= 1e-12 * s.re.abs());
    }

    #[test]
    fn eigenvalues_are_real_above_the_ep(gamma in log_uniform(0.1, 10.0), eps in log_uniform(1e-6, 1.0)) {
        let e = eigen_numeric(&pt_matrix(0.0, gamma, eps));
        prop_assert!(e.omega_plus.im.abs() < 1e-8 * gamma);
        prop_assert!(e.omega_minus.im.abs() < 1e-8 * gamma);
    }

    #[test]
    fn spectrum_scales_with_thermal_factor(
        gamma in log_uniform(0.1, 10.0),
        eps in log_uniform(1e-6, 0.5),
        n in 0.0..20.0f64,
        w in -10.0..10.0f64,
    ) {
        let cold = pt_spectrum_at(gamma, eps, 0.0, 0.0, Complex64::new(w, 0.0));
        let hot = pt_spectrum_at(gamma, eps, n, n, Complex64::new(w, 0.0));
        prop_assert!((hot / cold - (1.0 + 2.0 * n)).abs() < 1e-10 * (1.0 + 2.0 * n));
    }

    #[test]
    fn spectrum_is_even_and_above_vacuum(gamma in log_uniform(0.1, 10.0), eps in log_uniform(1e-6, 0.5), w in 0.0..10.0f64) {
        let a = pt_spectrum_at(gamma, eps, 0.0, 0.0, Complex64::new(w, 0.0));
        let b = pt_spectrum_at(gamma, eps, 0.0, 0.0, Complex64::new(-w, 0.0));
        prop_assert!((a / b - 1.0).abs() < 1e-10);
        // a phase-insensitive amplifier adds noise, so the output never drops below vacuum
        prop_assert!(a >= 0.5 * (1.0 - 1e-12));
    }

    #[test]
    fn near_resonance_spectrum_is_inverse_eps(gamma in log_uniform(0.1, 10.0), eps in log_uniform(1e-6, 1e-2), dw in log_uniform(1e-6, 1e-2)) {
        let a = pt_output_spectrum_near_resonance(&PtParams::new(0.0, gamma, eps, 0.0, 0.0).unwrap(), dw).unwrap();
        let b = pt_output_spectrum_near_resonance(&PtParams::new(0.0, gamma, 2.0 * eps, 0.0, 0.0).unwrap(), dw).unwrap();
        prop_assert!((a / b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_imprecision_ignores_eps(
        gamma in log_uniform(0.1, 10.0),
        e1 in log_uniform(1e-6, 1e-1),
        e2 in log_uniform(1e-6, 1e-1),
        amp in log_uniform(0.1, 10.0),
        n in 0.0..5.0f64,
    ) {
        let report = |e: f64| {
            let p = PtParams::new(0.0, gamma, e, n, n).unwrap();
            let m = MeanField::from_carriers(gamma, e, Complex64::new(amp, 0.0), Complex64::new(0.0, amp));
            imprecision(&p, &m, 1.0).unwrap().closed_form
        };
        prop_assert!((report(e1) / report(e2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sensitivity_diverges_toward_the_ep(gamma in log_uniform(0.1, 10.0), eps in log_uniform(1e-8, 1e-2)) {
        let near = sensitivity(gamma, eps).unwrap();
        let nearer = sensitivity(gamma, eps / 4.0).unwrap();
        prop_assert!(nearer > 1.9 * near);
    }

    #[test]
    fn weak_force_snr_ignores_eps(
        e1 in log_uniform(1e-6, 1e-1),
        e2 in log_uniform(1e-6, 1e-1),
        re in -2.0..2.0f64,
        im in -2.0..2.0f64,
        s_eps in log_uniform(1e-3, 10.0),
    ) {
        prop_assume!(re.hypot(im) > 0.1);
        let snr = |e: f64| {
            let p = PtParams::new(0.0, 1.0, e, 0.0, 0.0).unwrap();
            let m = MeanField::from_carriers(1.0, e, Complex64::new(re, im), Complex64::new(0.3, -0.1));
            weak_force_snr(&p, &m, Quadrature::P, s_eps).unwrap()
        };
        prop_assert!((snr(e1) / snr(e2) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn loop_spectrum_tends_to_markov(eps in log_uniform(1e-3, 1e-1), dw in log_uniform(1e-4, 1e-3)) {
        // gamma = eta / (2 tau) = 1 throughout; the deviation shrinks roughly linearly in eta
        let dev = |eta: f64| {
            let tau = eta / 2.0;
            let s = (eps * (2.0 + eps)).sqrt();
            let th = {
                let p = epsense_core::LoopParams::new(eta, tau, eps, 0.0, 0.0).unwrap();
                p.theta()
            };
            let nm = loop_spectrum_at(eta, eps, 0.0, Complex64::from(th + dw * tau));
            let m = pt_spectrum_at(1.0, eps, 0.0, 0.0, Complex64::from(s + dw));
            (nm / m - 1.0).abs()
        };
        prop_assert!(dev(1e-4) < dev(1e-2));
        prop_assert!(dev(1e-4) < 1e-3);
    }

    #[test]
    fn rectangular_welch_obeys_parseval(seed in any::<u64>(), segments in 8usize..16) {
        let dt = 0.1;
        let y = gaussian_quadrature_noise(1.0, dt, segments * 256, seed).unwrap();
        let psd = welch(&y.field, dt, segments, Window::Rectangular).unwrap();
        let dw = psd.grid[1] - psd.grid[0];
        let integral: f64 = psd.values.iter().sum::<f64>() * dw / (2.0 * std::f64::consts::PI);
        let power = y.field.iter().map(|z| z.norm_sqr()).sum::<f64>() / y.field.len() as f64;
        prop_assert!((integral / power - 1.0).abs() < 1e-10);
    }
}
