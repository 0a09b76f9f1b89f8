//! Condensate reservoir: continuum integrals against discretized sums,
//! limiting forms and parameter symmetries.

use std::f64::consts::PI;

use qprobe::constants::{A_RB, HBAR};
use qprobe::dynamics::{gamma_bec, gamma_bec_stationary, gamma_discrete, phi_bec, phi_discrete, Frame};
use qprobe::quadrature::{integrate_oscillatory_with, single_rule, FnKernel, OscillatoryKernel};
use qprobe::{BecParameters, BecReservoirModel, QuadratureOptions};

fn tight() -> QuadratureOptions {
    QuadratureOptions::with_rel_tol(1e-11)
}

#[test]
fn shell_sum_converges_to_continuum() {
    let m = BecReservoirModel::reference();
    let t = 2e-5;
    let k_cut = 8.0 / m.ell();
    let gamma = gamma_bec(&m, t, &tight()).unwrap().value;
    let phi = phi_bec(&m, t, &tight()).unwrap().value;
    let mut errors = Vec::new();
    for shells in [500, 4000, 32_000] {
        let res = m.discretize(shells, k_cut).unwrap();
        let g = gamma_discrete(&res, t).unwrap();
        let p = phi_discrete(&res, t, 0.0, Frame::Rotating).unwrap();
        errors.push((((g - gamma) / gamma).abs(), ((p - phi) / phi).abs()));
    }
    assert!(errors.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1), "{errors:?}");
    let last = errors.last().unwrap();
    assert!(last.0 < 1e-5 && last.1 < 1e-5, "{errors:?}");
}

#[test]
fn decay_kernel_small_k_is_cubic() {
    let m = BecReservoirModel::reference();
    let (decay, _) = m.continuum_kernels();
    let t = 1e-3;
    let d = m.derived();
    let coeff = d.p * t * t * (HBAR / (4.0 * m.params().mass_b_kg * d.nu)).sqrt() / 2.0;
    for scale in [1e-6, 1e-5, 1e-3] {
        let k = scale / m.ell();
        let ratio = decay.eval(k, t) / (k * k * k) / coeff;
        assert!((ratio - 1.0).abs() < 5e-3, "k = {scale}/ell: ratio {ratio}");
    }
}

#[test]
fn decay_saturates_at_stationary_value() {
    let m = BecReservoirModel::reference();
    let stationary = gamma_bec_stationary(&m, &tight()).unwrap().value;
    let late = gamma_bec(&m, 2e-2, &QuadratureOptions::default()).unwrap().value;
    assert!(((late - stationary) / stationary).abs() < 0.01);
    let early = gamma_bec(&m, 1e-5, &QuadratureOptions::default()).unwrap().value;
    assert!(early < 0.5 * stationary);
}

#[test]
fn stationary_decay_falls_with_trap_length() {
    let values: Vec<f64> = [30e-9, 45e-9, 60e-9, 90e-9]
        .iter()
        .map(|&ell| {
            let params = BecParameters {
                ell_a_m: ell,
                ..BecParameters::na_in_rb()
            };
            let m = BecReservoirModel::new(params).unwrap();
            gamma_bec_stationary(&m, &tight()).unwrap().value
        })
        .collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
}

#[test]
fn stationary_decay_is_quadratic_in_level_splitting() {
    let base = BecReservoirModel::reference();
    let doubled = BecReservoirModel::new(BecParameters {
        a1_m: 2.0 * base.params().a1_m,
        ..*base.params()
    })
    .unwrap();
    let g1 = gamma_bec_stationary(&base, &tight()).unwrap().value;
    let g2 = gamma_bec_stationary(&doubled, &tight()).unwrap().value;
    assert!((g2 / g1 - 4.0).abs() < 1e-12);
}

#[test]
fn swapping_levels_flips_phase_only() {
    let p = BecParameters {
        a0_m: 1.0e-9,
        a1_m: 3.5e-9,
        ..BecParameters::na_in_rb()
    };
    let swapped = BecParameters {
        a0_m: p.a1_m,
        a1_m: p.a0_m,
        ..p
    };
    let m = BecReservoirModel::new(p).unwrap();
    let s = BecReservoirModel::new(swapped).unwrap();
    assert!((m.chi() + s.chi()).abs() < 1e-15);
    for t in [1e-4, 1e-3] {
        let opts = QuadratureOptions::default();
        assert_eq!(gamma_bec(&m, t, &opts).unwrap().value, gamma_bec(&s, t, &opts).unwrap().value);
        let (a, b) = (phi_bec(&m, t, &opts).unwrap().value, phi_bec(&s, t, &opts).unwrap().value);
        assert!((a + b).abs() <= 1e-14 * a.abs());
    }
}

#[test]
fn positive_chi_phase_is_negative_and_grows() {
    let m = BecReservoirModel::reference();
    let opts = QuadratureOptions::default();
    let phis: Vec<f64> = [1e-4, 1e-3, 3e-3]
        .iter()
        .map(|&t| phi_bec(&m, t, &opts).unwrap().value)
        .collect();
    assert!(phis.iter().all(|p| *p < 0.0));
    assert!(phis.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn single_rule_fails_where_panels_succeed() {
    let t: f64 = 200.0;
    let exact = (PI / 2.0).sqrt() * (-t * t / 2.0).exp();
    let f = |k: f64| (k * t).cos() * (-k * k / 2.0).exp();
    let naive = single_rule(f, 0.0, 40.0).unwrap().value;
    assert!((naive - exact).abs() > 1e-3, "naive rule happened to be accurate: {naive}");
    let kernel = FnKernel {
        kernel: |k: f64, t: f64| (k * t).cos() * (-k * k / 2.0).exp(),
        rate: |_k: f64| 1.0,
    };
    let opts = QuadratureOptions {
        abs_tol: Some(1e-13),
        ..QuadratureOptions::with_rel_tol(1e-12)
    };
    let panel = integrate_oscillatory_with(&kernel, t, 40.0, &opts).unwrap().value;
    assert!((panel - exact).abs() < 1e-10);
}

#[test]
fn reference_scattering_lengths_are_dilute() {
    for f in [0.3, 1.0, 2.5] {
        assert!(BecReservoirModel::reference().with_scattering_length(f * A_RB).is_ok());
    }
    assert!(BecReservoirModel::reference().with_scattering_length(2e-8).is_err());
}
