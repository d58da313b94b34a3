//! Pierson-Moskowitz spectra and seeded irregular-wave synthesis.

use std::sync::Once;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hydro::HydroCoefficients;
use crate::num::{interp_linear, Real};

/// Frequency band over which irregular seas are discretized, rad/s.
pub const WAVE_BAND: (f64, f64) = (0.2, 3.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SeaState<T: Real> {
    /// Significant wave height, m.
    pub hs: T,
    /// Peak period, s.
    pub tp: T,
}

impl<T: Real> SeaState<T> {
    pub fn new(hs: T, tp: T) -> Result<Self> {
        if !(hs > T::zero() && tp > T::zero()) || !hs.is_finite() || !tp.is_finite() {
            return Err(Error::Invalid(format!("sea state needs Hs > 0 and Tp > 0, got {hs}, {tp}")));
        }
        Ok(SeaState { hs, tp })
    }

    pub fn peak_frequency(&self) -> T {
        T::TAU() / self.tp
    }
}

/// Normalization of the spectrum formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMode {
    /// The formula exactly as printed; integrates to pi Hs^2 / 8.
    Verbatim,
    /// Verbatim divided by 2 pi; integrates to Hs^2 / 16.
    #[default]
    Standard,
}

static VERBATIM_WARNING: Once = Once::new();

pub fn pm_spectrum<T: Real>(ss: &SeaState<T>, omega: T, mode: SpectrumMode) -> T {
    if omega <= T::zero() {
        return T::zero();
    }
    let pi = T::PI();
    let pi4 = pi.powi(4);
    let tp4w4 = ss.tp.powi(4) * omega.powi(4);
    let s = T::of(10.0) * pi4 * pi * ss.hs * ss.hs / (tp4w4 * omega) * (-T::of(20.0) * pi4 / tp4w4).exp();
    match mode {
        SpectrumMode::Verbatim => {
            VERBATIM_WARNING.call_once(|| {
                log::warn!("verbatim spectrum normalization integrates to pi*Hs^2/8, 2*pi times the physical variance");
            });
            s
        }
        SpectrumMode::Standard => s / T::TAU(),
    }
}

/// Zeroth spectral moment over (0, inf).
pub fn spectral_m0<T: Real>(ss: &SeaState<T>, mode: SpectrumMode) -> T {
    let verbatim = T::PI() * ss.hs * ss.hs / T::of(8.0);
    match mode {
        SpectrumMode::Verbatim => verbatim,
        SpectrumMode::Standard => verbatim / T::TAU(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct WaveRealization<T: Real> {
    pub freqs: Vec<T>,
    pub amplitudes: Vec<T>,
    pub phases: Vec<T>,
    pub dt: T,
    pub duration: T,
    pub seed: u64,
    pub ramp_time: T,
}

/// Irregular sea from a spectrum, with equal frequency bins over [`WAVE_BAND`].
pub fn synthesize<T: Real>(
    ss: &SeaState<T>,
    n_components: usize,
    duration: T,
    dt: T,
    seed: u64,
    ramp_time: T,
    mode: SpectrumMode,
) -> Result<WaveRealization<T>> {
    if n_components < 2 {
        return Err(Error::Invalid(format!("need at least 2 wave components, got {n_components}")));
    }
    let (lo, hi) = (T::of(WAVE_BAND.0), T::of(WAVE_BAND.1));
    let dw = (hi - lo) / T::of(n_components as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut freqs = Vec::with_capacity(n_components);
    let mut amplitudes = Vec::with_capacity(n_components);
    let mut phases = Vec::with_capacity(n_components);
    for i in 0..n_components {
        let w = lo + (T::of(i as f64) + T::half()) * dw;
        freqs.push(w);
        amplitudes.push((T::two() * pm_spectrum(ss, w, mode) * dw).sqrt());
        phases.push(T::of(rng.random::<f64>() * std::f64::consts::TAU));
    }
    Ok(WaveRealization { freqs, amplitudes, phases, dt, duration, seed, ramp_time })
}

impl<T: Real> WaveRealization<T> {
    /// A single-frequency wave with zero phase.
    pub fn regular(omega: T, amplitude: T, dt: T, duration: T, ramp_time: T) -> Self {
        WaveRealization {
            freqs: vec![omega],
            amplitudes: vec![amplitude],
            phases: vec![T::zero()],
            dt,
            duration,
            seed: 0,
            ramp_time,
        }
    }

    /// Number of samples at spacing `step` covering `[0, duration]`.
    pub fn sample_count(&self, step: T) -> usize {
        (self.duration / step).round().to_usize().unwrap_or(0) + 1
    }

    pub fn ramp(&self, t: T) -> T {
        if self.ramp_time <= T::zero() || t >= self.ramp_time {
            T::one()
        } else {
            T::half() * (T::one() - (T::PI() * t / self.ramp_time).cos())
        }
    }

    /// Ramped free-surface elevation at the origin, sampled at `dt`.
    pub fn elevation(&self) -> Vec<T> {
        let gains: Vec<(T, T)> = self.amplitudes.iter().map(|&a| (a, T::zero())).collect();
        self.superpose(&gains, self.dt)
    }

    /// Sum of `g_i cos(w_i t + phi_i + psi_i)` times the ramp, where `gains`
    /// holds `(g_i, psi_i)`. Uses a rotation recurrence resynchronized
    /// periodically to keep the error at rounding level.
    fn superpose(&self, gains: &[(T, T)], step: T) -> Vec<T> {
        const RESYNC: usize = 128;
        let n = self.sample_count(step);
        let mut out = vec![T::zero(); n];
        for (i, &(g, psi)) in gains.iter().enumerate() {
            if g == T::zero() {
                continue;
            }
            let w = self.freqs[i];
            let phase = self.phases[i] + psi;
            let (sd, cd) = (w * step).sin_cos();
            let mut c = T::zero();
            let mut s = T::zero();
            for (j, o) in out.iter_mut().enumerate() {
                if j % RESYNC == 0 {
                    let arg = w * step * T::of(j as f64) + phase;
                    s = arg.sin();
                    c = arg.cos();
                }
                *o = *o + g * c;
                let c_next = c * cd - s * sd;
                s = s * cd + c * sd;
                c = c_next;
            }
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o = *o * self.ramp(step * T::of(j as f64));
        }
        out
    }
}

/// Excitation moment sampled at the realization's `dt`.
pub fn excitation_series<T: Real>(realization: &WaveRealization<T>, coeffs: &HydroCoefficients<T>) -> Result<Vec<T>> {
    excitation_samples(realization, coeffs, realization.dt)
}

/// Excitation moment sampled at an arbitrary `step` over the realization.
pub fn excitation_samples<T: Real>(
    realization: &WaveRealization<T>,
    coeffs: &HydroCoefficients<T>,
    step: T,
) -> Result<Vec<T>> {
    let gains = excitation_gains(realization, coeffs)?;
    Ok(realization.superpose(&gains, step))
}

/// Per-component `(|F_e| a_i, angle F_e)` with linear interpolation.
fn excitation_gains<T: Real>(realization: &WaveRealization<T>, coeffs: &HydroCoefficients<T>) -> Result<Vec<(T, T)>> {
    let om = &coeffs.omega;
    realization
        .freqs
        .iter()
        .zip(&realization.amplitudes)
        .map(|(&w, &a)| {
            let mag = interp_linear(om, &coeffs.excitation_mag, w);
            let phase = interp_linear(om, &coeffs.excitation_phase, w);
            match (mag, phase) {
                (Some(m), Some(p)) => Ok((m * a, p)),
                _ => Err(Error::Extrapolation {
                    omega: w.to_f64_lossy(),
                    lo: om.first().map_or(f64::NAN, |x| x.to_f64_lossy()),
                    hi: om.last().map_or(f64::NAN, |x| x.to_f64_lossy()),
                }),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nominal() -> SeaState<f64> {
        SeaState::new(2.64, 9.86).unwrap()
    }

    #[test]
    fn verbatim_peak_value() {
        let s = pm_spectrum(&nominal(), std::f64::consts::TAU / 9.86, SpectrumMode::Verbatim);
        assert!((s - 6.15).abs() < 0.01, "{s}");
    }

    #[test]
    fn modes_differ_by_two_pi() {
        let ss = nominal();
        let v = pm_spectrum(&ss, 0.8, SpectrumMode::Verbatim);
        let s = pm_spectrum(&ss, 0.8, SpectrumMode::Standard);
        assert!((v / s - std::f64::consts::TAU).abs() < 1e-12);
    }

    #[test]
    fn seeded_synthesis_is_reproducible() {
        let ss = nominal();
        let a = synthesize(&ss, 50, 100.0, 0.1, 7, 10.0, SpectrumMode::Standard).unwrap();
        let b = synthesize(&ss, 50, 100.0, 0.1, 7, 10.0, SpectrumMode::Standard).unwrap();
        let c = synthesize(&ss, 50, 100.0, 0.1, 8, 10.0, SpectrumMode::Standard).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.phases, c.phases);
        assert!(a.phases.iter().all(|&p| (0.0..std::f64::consts::TAU).contains(&p)));
    }

    #[test]
    fn too_few_components_rejected() {
        assert!(synthesize(&nominal(), 1, 10.0, 0.1, 0, 0.0, SpectrumMode::Standard).is_err());
    }

    #[test]
    fn recurrence_matches_direct_evaluation() {
        let r = WaveRealization {
            freqs: vec![0.3, 1.7],
            amplitudes: vec![1.0, 0.5],
            phases: vec![0.4, 2.0],
            dt: 0.1,
            duration: 300.0,
            seed: 0,
            ramp_time: 0.0,
        };
        let eta = r.elevation();
        for (j, &e) in eta.iter().enumerate() {
            let t = j as f64 * 0.1;
            let direct = (0.3 * t + 0.4).cos() + 0.5 * (1.7 * t + 2.0).cos();
            assert!((e - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn ramp_shape() {
        let r = WaveRealization::regular(1.0f64, 1.0, 0.1, 20.0, 10.0);
        assert_eq!(r.ramp(0.0), 0.0);
        assert!((r.ramp(5.0) - 0.5).abs() < 1e-15);
        assert_eq!(r.ramp(10.0), 1.0);
    }
}
