//! Single-stage SWRO plant sizing and membrane flow.

use serde::{Deserialize, Serialize};

use crate::num::Real;
use crate::params::ParameterSet;

pub const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SeawaterSpec<T: Real> {
    /// mg/L
    pub feed_tds: T,
    /// mg/L
    pub permeate_tds: T,
    /// g/mol
    pub molar_mass: T,
    pub ions_per_molecule: T,
    /// K
    pub temperature: T,
    /// J/(K mol)
    pub gas_constant: T,
}

impl<T: Real> SeawaterSpec<T> {
    pub fn from_params(p: &ParameterSet) -> Self {
        SeawaterSpec {
            feed_tds: T::of(p.swro.feed_tds),
            permeate_tds: T::of(p.swro.permeate_tds),
            molar_mass: T::of(p.swro.salt_molar_mass),
            ions_per_molecule: T::of(p.swro.ions_per_molecule),
            temperature: T::of(p.general.temperature),
            gas_constant: T::of(p.swro.gas_constant),
        }
    }

    /// Osmotic pressure difference between feed and target permeate.
    pub fn delta_pi(&self) -> T {
        osmotic_pressure(self.feed_tds, self) - osmotic_pressure(self.permeate_tds, self)
    }
}

/// Single membrane element datasheet values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MembraneSpec<T: Real> {
    /// Element permeate production, m^3/day.
    pub q0: T,
    /// Element area, m^2.
    pub a0: T,
    /// Water permeability, m^3/(N s).
    pub a_w: T,
    pub eta_ro: T,
}

impl<T: Real> MembraneSpec<T> {
    pub fn from_params(p: &ParameterSet) -> Self {
        MembraneSpec {
            q0: T::of(p.swro.element_flow * SECONDS_PER_DAY),
            a0: T::of(p.swro.element_area),
            a_w: T::of(p.swro.water_permeability),
            eta_ro: T::of(p.swro.recovery_ratio),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DesalPlant<T: Real> {
    /// Capacity, m^3/s.
    pub qpmax: T,
    pub a_m: T,
    pub a_w: T,
    pub r_m: T,
    pub delta_pi: T,
    pub p_relief: T,
    pub r_t: T,
    pub eta_ro: T,
}

/// Van 't Hoff osmotic pressure for a TDS given in mg/L (= g/m^3).
pub fn osmotic_pressure<T: Real>(tds: T, spec: &SeawaterSpec<T>) -> T {
    spec.ions_per_molecule * (tds / spec.molar_mass) * spec.gas_constant * spec.temperature
}

/// Sizes the plant for a capacity given in m^3/day.
pub fn size_plant<T: Real>(qpmax_per_day: T, spec: &SeawaterSpec<T>, membrane: &MembraneSpec<T>) -> DesalPlant<T> {
    let a_m = qpmax_per_day / membrane.q0 * membrane.a0;
    let r_m = T::one() / (membrane.a_w * a_m);
    let qpmax = qpmax_per_day / T::of(SECONDS_PER_DAY);
    let delta_pi = spec.delta_pi();
    let p_relief = qpmax * r_m + delta_pi;
    let r_t = p_relief / (qpmax * (T::one() / membrane.eta_ro - T::one()));
    DesalPlant {
        qpmax,
        a_m,
        a_w: membrane.a_w,
        r_m,
        delta_pi,
        p_relief,
        r_t,
        eta_ro: membrane.eta_ro,
    }
}

/// Permeate flow with the check valve blocking forward osmosis.
pub fn permeate_flow<T: Real>(p_feed: T, plant: &DesalPlant<T>) -> T {
    ((p_feed - plant.delta_pi) / plant.r_m).max(T::zero())
}

/// Brine flow through the throttle, driven by gauge feed pressure.
pub fn brine_flow<T: Real>(p_feed: T, plant: &DesalPlant<T>) -> T {
    p_feed.max(T::zero()) / plant.r_t
}
