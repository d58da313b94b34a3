#![allow(dead_code)]

use wavedesal_core::desal::{size_plant, MembraneSpec, SeawaterSpec};
use wavedesal_core::geometry::{build_geometry, WecGeometry, VARIABLES};
use wavedesal_core::hydraulics::Circuit;
use wavedesal_core::hydro::{flat_plate_coefficients, radiation_irf, HydroCoefficients, RadiationKernel};
use wavedesal_core::{DesignVector, ParameterSet};

/// Geometry, surrogate coefficients and kernel for one design.
pub struct Parts {
    pub design: DesignVector,
    pub params: ParameterSet,
    pub geom: WecGeometry<f64>,
    pub coeffs: HydroCoefficients<f64>,
    pub kernel: RadiationKernel<f64>,
}

pub fn parts(design: DesignVector) -> Parts {
    parts_with(design, ParameterSet::default())
}

pub fn parts_with(design: DesignVector, params: ParameterSet) -> Parts {
    let geom = build_geometry(&design, &params).unwrap();
    let g = &params.general;
    let coeffs = flat_plate_coefficients(&geom, &params.frequency_grid(), g.water_depth, g.water_density, g.gravity);
    let kernel = radiation_irf(&coeffs, params.solver.time_step, params.solver.kernel_duration);
    Parts { design, params, geom, coeffs, kernel }
}

impl Parts {
    pub fn plant_circuit(&self) -> Circuit<f64> {
        let p = &self.params;
        let plant = size_plant(self.design.qpmax, &SeawaterSpec::from_params(p), &MembraneSpec::from_params(p));
        Circuit::with_plant(self.design.vacc, self.design.p0, plant, p.hydraulics.relief_conductance_factor)
    }
}

/// Amplitude of the `omega` harmonic of `x(t)` over whole periods ending at the last sample.
pub fn harmonic_amplitude(t: &[f64], x: &[f64], omega: f64, periods: usize) -> f64 {
    let dt = t[1] - t[0];
    let span = periods as f64 * 2.0 * std::f64::consts::PI / omega;
    let n = (span / dt).round() as usize;
    let start = t.len() - 1 - n;
    let (mut c, mut s) = (0.0, 0.0);
    for j in start..t.len() {
        let w = if j == start || j == t.len() - 1 { 0.5 } else { 1.0 };
        c += w * x[j] * (omega * t[j]).cos();
        s += w * x[j] * (omega * t[j]).sin();
    }
    let scale = 2.0 * dt / (n as f64 * dt);
    (c * c + s * s).sqrt() * scale
}

/// Design at fractions `u` of each variable's range.
pub fn design_from(u: [f64; 8]) -> DesignVector {
    let mut x = [0.0; 8];
    for (i, v) in VARIABLES.iter().enumerate() {
        x[i] = v.lo + u[i] * (v.hi - v.lo);
    }
    DesignVector::from_array(x)
}
