mod common;

use common::{design_from, harmonic_amplitude, parts};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavedesal_core::sysdyn::{simulate, SimConfig, WecSystem};
use wavedesal_core::waves::WaveRealization;
use wavedesal_core::DesignVector;

/// Steady pitch amplitude of the free flap from the tabulated coefficients.
fn frequency_domain_amplitude(p: &common::Parts, i: usize, wave_amp: f64) -> f64 {
    let c = &p.coeffs;
    let om = c.omega[i];
    let re = c.k_hs - om * om * (p.geom.i_pitch + c.added_mass[i]);
    let im = om * c.radiation_damping[i];
    wave_amp * c.excitation_mag[i] / (re * re + im * im).sqrt()
}

fn free_response(p: &common::Parts, omega: f64, wave_amp: f64) -> f64 {
    let mut cfg = SimConfig::from_params(&p.params);
    cfg.pto_connected = false;
    cfg.record_series = true;
    cfg.duration = 400.0;
    cfg.ramp_time = 20.0;
    let sys = WecSystem::new(&p.design, &p.geom, &p.coeffs, &p.kernel, p.plant_circuit(), &p.params);
    let wave = WaveRealization::regular(omega, wave_amp, cfg.dt, cfg.duration, cfg.ramp_time);
    let r = simulate(&sys, &wave, &cfg).unwrap();
    assert!(r.failure.is_none());
    let s = r.series.unwrap();
    harmonic_amplitude(&s.t, &s.theta, omega, 10)
}

#[test]
fn free_flap_matches_transfer_function() {
    let p = parts(DesignVector::nominal());
    for i in [2, 8, 17] {
        let om = p.coeffs.omega[i];
        let expected = frequency_domain_amplitude(&p, i, 0.5);
        let got = free_response(&p, om, 0.5);
        let rel = (got - expected).abs() / expected;
        assert!(rel < 0.02, "omega {om}: {got} vs {expected} ({rel})");
    }
}

#[test]
fn free_flap_response_is_linear_in_amplitude() {
    let p = parts(DesignVector::nominal());
    let om = p.coeffs.omega[5];
    let a = free_response(&p, om, 0.2);
    let b = free_response(&p, om, 0.6);
    assert!((b - 3.0 * a).abs() < 1e-6 * b, "{a} {b}");
}

/// Conservation checks shared with the acceptance run.
pub fn ledger_errors(design: DesignVector, seed: u64) -> (f64, f64, f64) {
    let p = parts(design);
    let cfg = SimConfig::from_params(&p.params);
    let ss = wavedesal_core::SeaState::new(p.params.general.significant_wave_height, p.params.general.peak_period).unwrap();
    let s = &p.params.solver;
    let wave = wavedesal_core::waves::synthesize(
        &ss,
        s.wave_components.round() as usize,
        s.sim_time,
        s.time_step,
        seed,
        s.ramp_time,
        Default::default(),
    )
    .unwrap();
    let sys = WecSystem::new(&p.design, &p.geom, &p.coeffs, &p.kernel, p.plant_circuit(), &p.params);
    let r = simulate(&sys, &wave, &cfg).unwrap();
    let l = r.ledger;
    let out = l.permeate + l.brine + l.relief + l.delta_v_liquid;
    let volume = (l.intake - out).abs() / l.intake.abs().max(1e-9);
    let sink = l.radiated_energy + l.pto_work + l.delta_kinetic + l.delta_potential;
    let energy = (l.excitation_work - sink).abs() / l.excitation_work.abs().max(1e-9);
    (volume, energy, l.min_pto_power)
}

#[test]
fn random_designs_conserve_volume_and_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..4 {
        let u: [f64; 8] = std::array::from_fn(|_| rng.random());
        let (vol, energy, min_power) = ledger_errors(design_from(u), k);
        assert!(vol < 1e-3, "design {k}: volume error {vol}");
        assert!(energy < 0.05, "design {k}: energy error {energy}");
        assert!(min_power >= 0.0, "design {k}: pto power {min_power}");
    }
}

#[test]
fn radiation_force_absorbs_damping_power() {
    // over whole periods of the steady response, the memory force dissipates B(w) <v^2>
    let p = parts(DesignVector::nominal());
    let i = 8;
    let om = p.coeffs.omega[i];
    let run = |duration: f64| {
        let mut cfg = SimConfig::from_params(&p.params);
        cfg.pto_connected = false;
        cfg.record_series = true;
        cfg.duration = duration;
        cfg.ramp_time = 20.0;
        let sys = WecSystem::new(&p.design, &p.geom, &p.coeffs, &p.kernel, p.plant_circuit(), &p.params);
        let wave = WaveRealization::regular(om, 0.5, cfg.dt, cfg.duration, cfg.ramp_time);
        simulate(&sys, &wave, &cfg).unwrap()
    };
    let period = 2.0 * std::f64::consts::PI / om;
    let (t1, t2) = (300.0, 300.0 + (20.0 * period / 0.1).round() * 0.1);
    let short = run(t1);
    let long = run(t2);
    let s = long.series.as_ref().unwrap();
    let dt = s.t[1] - s.t[0];
    let j0 = (t1 / dt).round() as usize;
    let v2: f64 = (j0..s.t.len() - 1).map(|j| 0.5 * (s.theta_dot[j].powi(2) + s.theta_dot[j + 1].powi(2)) * dt).sum();
    let radiated = long.ledger.radiated_energy - short.ledger.radiated_energy;
    let expected = p.coeffs.radiation_damping[i] * v2;
    let rel = (radiated - expected).abs() / expected;
    assert!(rel < 0.03, "{radiated} vs {expected} ({rel})");
}
