use std::f64::consts::FRAC_2_PI;

use proptest::prelude::*;
use wavedesal_core::geometry::build_geometry;
use wavedesal_core::hydro::{
    flat_plate_coefficients, load_coefficients, radiation_irf_with, HydroCoefficients, IrfMethod,
};
use wavedesal_core::{DesignVector, ParameterSet};

fn table(damping: Vec<f64>) -> HydroCoefficients<f64> {
    let omega = ParameterSet::default().frequency_grid();
    let n = omega.len();
    HydroCoefficients {
        omega,
        added_mass: vec![1.0e6; n],
        radiation_damping: damping,
        excitation_mag: vec![1.0e6; n],
        excitation_phase: vec![0.0; n],
        k_hs: 1.0e6,
        a_inf: None,
        surrogate: false,
        geometry_hash: None,
    }
}

const LINEAR: IrfMethod = IrfMethod::PiecewiseLinear { tail: false };

#[test]
fn zero_damping_gives_zero_kernel() {
    let c = table(vec![0.0; 21]);
    for method in [IrfMethod::Trapezoid, LINEAR, IrfMethod::default()] {
        let k = radiation_irf_with(&c, 0.1, 20.0, method);
        assert!(k.k.iter().all(|&v| v == 0.0));
        assert!(!k.decay_warning);
    }
    assert_eq!(radiation_irf_with(&c, 0.1, 20.0, IrfMethod::Trapezoid).a_inf, 1.0e6);
}

#[test]
fn constant_damping_gives_sine_kernel() {
    // B = b on [0, W] transforms to (2 b / pi) sin(W t) / t
    let b = 3.0e5;
    let c = table(vec![b; 21]);
    let top = *c.omega.last().unwrap();
    let k = radiation_irf_with(&c, 0.05, 20.0, LINEAR);
    for t in [0.35, 1.0, 2.5, 7.3, 15.0] {
        let expected = FRAC_2_PI * b * (top * t).sin() / t;
        let got = k.at(t);
        assert!((got - expected).abs() < 1e-9 * b, "t={t}: {got} vs {expected}");
    }
    assert!((k.k[0] - FRAC_2_PI * b * top).abs() < 1e-9 * b * top);
}

#[test]
fn single_node_spike_gives_modulated_cosine() {
    // a hat of height h and half-width d centred on w_i transforms to
    // (2/pi) h d cos(w_i t) sinc^2(d t / 2)
    let omega = ParameterSet::default().frequency_grid();
    let i = 9;
    let h = 1.0e6;
    let mut damping = vec![0.0; omega.len()];
    damping[i] = h;
    let c = table(damping);
    let d = omega[i + 1] - omega[i];
    let k = radiation_irf_with(&c, 0.05, 40.0, LINEAR);
    for t in [0.0, 0.8, 3.3, 9.1, 21.7] {
        let x = 0.5 * d * t;
        let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
        let expected = FRAC_2_PI * h * d * (omega[i] * t).cos() * sinc * sinc;
        assert!((k.at(t) - expected).abs() < 1e-9 * h, "t={t}");
    }
}

#[test]
fn trapezoid_spike_is_pure_cosine() {
    let omega = ParameterSet::default().frequency_grid();
    let i = 4;
    let mut damping = vec![0.0; omega.len()];
    damping[i] = 2.0;
    let c = table(damping);
    let d = omega[i + 1] - omega[i];
    let k = radiation_irf_with(&c, 0.1, 20.0, IrfMethod::Trapezoid);
    for j in [0, 13, 77, 150] {
        let t = j as f64 * 0.1;
        let expected = FRAC_2_PI * 2.0 * d * (omega[i] * t).cos();
        assert!((k.k[j] - expected).abs() < 1e-12);
    }
}

#[test]
fn file_round_trip_and_row_errors() {
    let p = ParameterSet::default();
    let geom = build_geometry(&DesignVector::nominal(), &p).unwrap();
    let c = flat_plate_coefficients(&geom, &p.frequency_grid(), 12.0, 1025.0, 9.81);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    c.save(&path).unwrap();
    let back: HydroCoefficients<f64> = load_coefficients(&path).unwrap();
    assert_eq!(back, c);

    let mut bad = c.clone();
    bad.radiation_damping[3] = -1.0;
    std::fs::write(&path, bad.to_json()).unwrap();
    let err = load_coefficients::<f64>(&path).unwrap_err().to_string();
    assert!(err.contains("radiation_damping") && err.contains('3'), "{err}");
}

fn design_strategy() -> impl Strategy<Value = DesignVector> {
    (4.0..24.0f64, 0.8..3.0f64, 50e3..500e3f64).prop_map(|(w, t, m)| DesignVector { w, t, m, ..DesignVector::nominal() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_linear_in_damping(scale in 0.01..100.0f64, seed in 0u64..1000) {
        let omega = ParameterSet::default().frequency_grid();
        let damping: Vec<f64> = (0..omega.len()).map(|i| ((i as u64 * 7919 + seed) % 101) as f64 * 1e4).collect();
        let base = table(damping.clone());
        let scaled = table(damping.iter().map(|b| b * scale).collect());
        for method in [IrfMethod::Trapezoid, IrfMethod::default()] {
            let a = radiation_irf_with(&base, 0.1, 20.0, method);
            let b = radiation_irf_with(&scaled, 0.1, 20.0, method);
            for (x, y) in a.k.iter().zip(&b.k) {
                prop_assert!((y - scale * x).abs() <= 1e-9 * (1.0 + (scale * x).abs()));
            }
        }
    }

    #[test]
    fn surrogate_damping_nonnegative(d in design_strategy()) {
        let p = ParameterSet::default();
        let geom = build_geometry(&d, &p).unwrap();
        let c = flat_plate_coefficients(&geom, &p.frequency_grid(), 12.0, 1025.0, 9.81);
        c.validate().unwrap();
        prop_assert!(c.surrogate);
        prop_assert!(c.radiation_damping.iter().all(|&b| b >= 0.0));
        prop_assert!(c.excitation_mag.iter().all(|&f| f >= 0.0 && f.is_finite()));
    }

    #[test]
    fn surrogate_scales_with_density(d in design_strategy(), factor in 0.5..3.0f64) {
        let p = ParameterSet::default();
        let geom = build_geometry(&d, &p).unwrap();
        let om = p.frequency_grid();
        let a = flat_plate_coefficients(&geom, &om, 12.0, 1025.0, 9.81);
        let b = flat_plate_coefficients(&geom, &om, 12.0, 1025.0 * factor, 9.81);
        for i in 0..om.len() {
            prop_assert!((b.added_mass[i] - factor * a.added_mass[i]).abs() <= 1e-9 * a.added_mass[i].abs());
            prop_assert!((b.radiation_damping[i] - factor * a.radiation_damping[i]).abs() <= 1e-9 * a.radiation_damping[i]);
        }
    }
}
