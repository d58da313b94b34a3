//! Design vector and rigid-body properties of the bottom-hinged flap.
//!
//! The flap is a rectangular box of width `w` (across the wave), thickness
//! `t` (along the wave) and height `h`, hinged at its bottom edge at depth
//! `draft`. Vertical lever arms are measured upward from the hinge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::params::ParameterSet;

/// Bounds and nominal value of one design variable, in SI except `qpmax`,
/// which stays in m^3/day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariableSpec {
    pub name: &'static str,
    pub unit: &'static str,
    pub lo: f64,
    pub hi: f64,
    pub nominal: f64,
}

pub const VARIABLES: [VariableSpec; 8] = [
    VariableSpec { name: "w", unit: "m", lo: 4.0, hi: 24.0, nominal: 18.0 },
    VariableSpec { name: "t", unit: "m", lo: 0.8, hi: 3.0, nominal: 2.0 },
    VariableSpec { name: "m", unit: "kg", lo: 50e3, hi: 500e3, nominal: 127e3 },
    VariableSpec { name: "l1", unit: "m", lo: 0.1, hi: 4.0, nominal: 2.0 },
    VariableSpec { name: "ap", unit: "m^2", lo: 0.1, hi: 1.0, nominal: 0.26 },
    VariableSpec { name: "vacc", unit: "m^3", lo: 0.01, hi: 6.0, nominal: 4.0 },
    VariableSpec { name: "p0", unit: "Pa", lo: 3e6, hi: 6e6, nominal: 3e6 },
    VariableSpec { name: "qpmax", unit: "m^3/day", lo: 1000.0, hi: 10000.0, nominal: 3150.0 },
];

/// The eight optimization variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignVector {
    pub w: f64,
    pub t: f64,
    pub m: f64,
    pub l1: f64,
    pub ap: f64,
    pub vacc: f64,
    pub p0: f64,
    /// Plant capacity, m^3/day.
    pub qpmax: f64,
}

impl DesignVector {
    pub fn from_array(x: [f64; 8]) -> Self {
        let [w, t, m, l1, ap, vacc, p0, qpmax] = x;
        DesignVector { w, t, m, l1, ap, vacc, p0, qpmax }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [self.w, self.t, self.m, self.l1, self.ap, self.vacc, self.p0, self.qpmax]
    }

    /// Nominal design of the design-space table.
    pub fn nominal() -> Self {
        Self::from_array(VARIABLES.map(|v| v.nominal))
    }

    /// Literature nominal used as the reference point of the case study.
    pub fn literature_nominal() -> Self {
        DesignVector { t: 1.8, l1: 1.9, vacc: 6.0, qpmax: 3100.0, ..Self::nominal() }
    }

    /// Previously published optimum used to seed the MDO run.
    pub fn mdo_initial() -> Self {
        DesignVector {
            w: 11.3,
            t: 1.99,
            m: 396e3,
            l1: 3.25,
            ap: 0.859,
            vacc: 4.57,
            p0: 5.95e6,
            qpmax: 4882.0,
        }
    }

    pub fn check_bounds(&self) -> Result<()> {
        for (spec, value) in VARIABLES.iter().zip(self.to_array()) {
            if !(value >= spec.lo && value <= spec.hi) {
                return Err(Error::OutOfBounds {
                    name: spec.name,
                    value,
                    lo: spec.lo,
                    hi: spec.hi,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct WecGeometry<T: Real> {
    pub w: T,
    pub t: T,
    pub h: T,
    pub draft: T,
    pub mass: T,
    pub submerged_volume: T,
    /// Centre of gravity relative to the still water line (negative below).
    pub z_cg: T,
    /// Centre of buoyancy relative to the still water line.
    pub z_cb: T,
    /// Pitch moment of inertia about the hinge.
    pub i_pitch: T,
    /// Second moment of the waterplane about the axis parallel to the hinge.
    pub waterplane_moment: T,
    /// Total surface area of the box, used by the cost model.
    pub wetted_area: T,
}

pub fn build_geometry<T: Real>(design: &DesignVector, params: &ParameterSet) -> Result<WecGeometry<T>> {
    design.check_bounds()?;
    let wec = &params.wec;
    if wec.draft > params.general.water_depth {
        return Err(Error::InfeasibleGeometry(format!(
            "draft {} m exceeds water depth {} m",
            wec.draft, params.general.water_depth
        )));
    }
    if wec.draft > wec.height {
        return Err(Error::InfeasibleGeometry(format!(
            "draft {} m exceeds flap height {} m",
            wec.draft, wec.height
        )));
    }
    let (w, t, h, d) = (T::of(design.w), T::of(design.t), T::of(wec.height), T::of(wec.draft));
    let m = T::of(design.m);
    let twelve = T::of(12.0);
    Ok(WecGeometry {
        w,
        t,
        h,
        draft: d,
        mass: m,
        submerged_volume: w * t * d,
        z_cg: T::of(wec.cg_draft_factor) * d,
        z_cb: -d / T::two(),
        i_pitch: m * T::of(wec.unit_inertia),
        waterplane_moment: w * t * t * t / twelve,
        wetted_area: T::two() * (w * h + w * t + t * h),
    })
}

/// Pitch restoring stiffness about the hinge. A negative value means the
/// flap is statically unstable; see [`is_statically_unstable`].
pub fn hydrostatic_stiffness<T: Real>(geom: &WecGeometry<T>, rho: T, g: T) -> T {
    let cb_arm = geom.draft + geom.z_cb;
    let cg_arm = geom.draft + geom.z_cg;
    rho * g * (geom.waterplane_moment + geom.submerged_volume * cb_arm) - geom.mass * g * cg_arm
}

pub fn is_statically_unstable<T: Real>(k_hs: T) -> bool {
    k_hs < T::zero()
}
