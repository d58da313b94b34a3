//! Lumped hydraulic circuit between the rectifying piston and the plant.
//!
//! The piston discharges into a single feed node held at the pressure of an
//! isothermal gas accumulator. The node drains through the membrane, the
//! brine throttle and a relief valve (or, for flow-only studies, a single
//! throttle).

use serde::{Deserialize, Serialize};

use crate::desal::{brine_flow, permeate_flow, DesalPlant};
use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PistonConfig<T: Real> {
    pub ap: T,
    pub stroke_max: T,
    pub cracking_pressure: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HydraulicState<T: Real> {
    pub v_liquid: T,
    pub p_feed: T,
    pub permeate: T,
    pub brine: T,
    pub relief: T,
    pub intake: T,
}

/// What the feed node discharges into.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub enum Load<T: Real> {
    /// Membrane, brine throttle and relief valve.
    Plant { plant: DesalPlant<T>, k_relief: T },
    /// A single linear throttle of resistance `r` (Pa s/m^3).
    Throttle { r: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Circuit<T: Real> {
    pub vacc: T,
    pub p0: T,
    pub load: Load<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Flows<T: Real> {
    pub permeate: T,
    pub brine: T,
    pub relief: T,
}

impl<T: Real> Flows<T> {
    pub fn total(&self) -> T {
        self.permeate + self.brine + self.relief
    }
}

/// Node-level solution for a given liquid volume and inflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeState<T: Real> {
    pub p_feed: T,
    pub flows: Flows<T>,
    pub dv: T,
    /// The accumulator is empty and the node sits below precharge.
    pub empty: bool,
}

pub fn accumulator_pressure<T: Real>(v_liquid: T, vacc: T, p0: T) -> Result<T> {
    if v_liquid >= vacc {
        return Err(Error::AccumulatorOverfull {
            liquid: v_liquid.to_f64_lossy(),
            capacity: vacc.to_f64_lossy(),
        });
    }
    if v_liquid <= T::zero() {
        return Ok(p0);
    }
    Ok(p0 * vacc / (vacc - v_liquid))
}

/// Energy stored in the gas relative to precharge.
pub fn gas_energy<T: Real>(v_liquid: T, vacc: T, p0: T) -> T {
    if v_liquid <= T::zero() {
        return T::zero();
    }
    p0 * vacc * (vacc / (vacc - v_liquid)).ln()
}

/// Ideal double-acting piston: both strokes pump, force opposes motion.
pub fn piston_coupling<T: Real>(v_piston: T, p_feed: T, cfg: &PistonConfig<T>) -> (T, T) {
    let q = cfg.ap * v_piston.abs();
    let f = if v_piston == T::zero() {
        T::zero()
    } else {
        -v_piston.signum() * cfg.ap * (p_feed + cfg.cracking_pressure)
    };
    (q, f)
}

/// Piston with the valve switch spread over a velocity band `band`: inside
/// the band force and flow scale with `v / band`. Pumped power and
/// mechanical power stay consistent, and `f * v <= 0` holds exactly.
pub fn piston_coupling_regularized<T: Real>(v_piston: T, p_feed: T, cfg: &PistonConfig<T>, band: T) -> (T, T) {
    let open = (v_piston / band).max(-T::one()).min(T::one());
    let q = cfg.ap * v_piston * open;
    let f = -open * cfg.ap * (p_feed + cfg.cracking_pressure);
    (q, f)
}

impl<T: Real> Circuit<T> {
    pub fn with_plant(vacc: T, p0: T, plant: DesalPlant<T>, relief_factor: T) -> Self {
        Circuit {
            vacc,
            p0,
            load: Load::Plant { plant, k_relief: relief_factor / plant.r_m },
        }
    }

    pub fn with_throttle(vacc: T, p0: T, r: T) -> Self {
        Circuit { vacc, p0, load: Load::Throttle { r } }
    }

    pub fn outflows(&self, p: T) -> Flows<T> {
        match self.load {
            Load::Plant { plant, k_relief } => Flows {
                permeate: permeate_flow(p, &plant),
                brine: brine_flow(p, &plant),
                relief: k_relief * (p - plant.p_relief).max(T::zero()),
            },
            Load::Throttle { r } => Flows {
                permeate: T::zero(),
                brine: p.max(T::zero()) / r,
                relief: T::zero(),
            },
        }
    }

    /// Outflow conductance `dQ_out/dP` at pressure `p`.
    pub fn conductance(&self, p: T) -> T {
        match self.load {
            Load::Plant { plant, k_relief } => {
                let mut g = T::one() / plant.r_t;
                if p >= plant.delta_pi {
                    g = g + T::one() / plant.r_m;
                }
                if p >= plant.p_relief {
                    g = g + k_relief;
                }
                g
            }
            Load::Throttle { r } => T::one() / r,
        }
    }

    /// Pressure at which the outflow equals `q_in`.
    pub fn equilibrium_pressure(&self, q_in: T) -> T {
        if q_in <= T::zero() {
            return T::zero();
        }
        let breakpoints = match self.load {
            Load::Plant { plant, .. } => {
                let (a, b) = (plant.delta_pi, plant.p_relief);
                [a.min(b), a.max(b)]
            }
            Load::Throttle { .. } => [T::infinity(), T::infinity()],
        };
        let mut p_lo = T::zero();
        for bp in breakpoints {
            if bp.is_finite() && bp > p_lo && self.outflows(bp).total() >= q_in {
                break;
            }
            if bp.is_finite() && bp > p_lo {
                p_lo = bp;
            }
        }
        let q_lo = self.outflows(p_lo).total();
        let g = self.conductance(p_lo);
        p_lo + (q_in - q_lo) / g
    }

    /// Resolves the feed node for liquid volume `v` and inflow `q_in`.
    pub fn node(&self, v: T, q_in: T) -> NodeState<T> {
        if v <= T::zero() {
            let p_eq = self.equilibrium_pressure(q_in);
            if p_eq < self.p0 {
                let flows = self.outflows(p_eq);
                return NodeState { p_feed: p_eq, flows, dv: T::zero(), empty: true };
            }
            let flows = self.outflows(self.p0);
            return NodeState { p_feed: self.p0, flows, dv: q_in - flows.total(), empty: false };
        }
        // keep the gas law finite for stage overshoots near full
        let v = v.min(self.vacc * T::of(1.0 - 1e-9));
        let p = self.p0 * self.vacc / (self.vacc - v);
        let flows = self.outflows(p);
        NodeState { p_feed: p, flows, dv: q_in - flows.total(), empty: false }
    }

    /// Largest eigenvalue magnitude of the liquid-volume dynamics at `v`.
    pub fn stiffness(&self, v: T) -> T {
        let v = v.max(T::zero()).min(self.vacc * T::of(1.0 - 1e-9));
        let p = self.p0 * self.vacc / (self.vacc - v);
        let dp_dv = p / (self.vacc - v);
        dp_dv * self.conductance(p)
    }

    /// `dP/dV` of the gas at `v`.
    pub fn gas_stiffness(&self, v: T) -> T {
        let v = v.max(T::zero()).min(self.vacc * T::of(1.0 - 1e-9));
        self.p0 * self.vacc / (self.vacc - v).powi(2)
    }
}

/// Integration bookkeeping for one call to [`step_circuit`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport<T: Real> {
    pub substeps: usize,
    pub clamped: bool,
    pub clamped_volume: T,
}

/// Advances the circuit over `dt` with a constant piston inflow, using RK4
/// with enough substeps to resolve the node time constant.
pub fn step_circuit<T: Real>(
    state: &HydraulicState<T>,
    q_in: T,
    circuit: &Circuit<T>,
    dt: T,
) -> (HydraulicState<T>, T, Flows<T>, StepReport<T>) {
    let n = substeps_for(circuit.stiffness(state.v_liquid) * dt);
    let h = dt / T::of(n as f64);
    let mut s = *state;
    let mut report = StepReport { substeps: n, ..Default::default() };
    for _ in 0..n {
        let y = [s.v_liquid, s.permeate, s.brine, s.relief];
        let f = |y: &[T; 4]| {
            let node = circuit.node(y[0], q_in);
            [node.dv, node.flows.permeate, node.flows.brine, node.flows.relief]
        };
        let k1 = f(&y);
        let k2 = f(&axpy(&y, h * T::half(), &k1));
        let k3 = f(&axpy(&y, h * T::half(), &k2));
        let k4 = f(&axpy(&y, h, &k3));
        let mut next = y;
        for i in 0..4 {
            next[i] = y[i] + h / T::of(6.0) * (k1[i] + T::two() * (k2[i] + k3[i]) + k4[i]);
        }
        if next[0] < T::zero() {
            report.clamped = true;
            report.clamped_volume = report.clamped_volume - next[0];
            let mut out = [next[1] - y[1], next[2] - y[2], next[3] - y[3]];
            withhold_outflow(&mut next[0], &mut out);
            for i in 0..3 {
                next[i + 1] = y[i + 1] + out[i];
            }
        }
        s.v_liquid = next[0];
        s.permeate = next[1];
        s.brine = next[2];
        s.relief = next[3];
        s.intake = s.intake + q_in * h;
    }
    let node = circuit.node(s.v_liquid, q_in);
    s.p_feed = node.p_feed;
    (s, node.p_feed, node.flows, report)
}

/// Handles a substep that drains the accumulator below empty. The overshoot
/// is outflow the empty node could not have delivered, so it is taken back
/// from this substep's outflow increments `out` pro rata and `v` is set to
/// zero. Returns the factor applied to the increments.
pub fn withhold_outflow<T: Real>(v: &mut T, out: &mut [T; 3]) -> T {
    let deficit = -*v;
    *v = T::zero();
    let total = out[0] + out[1] + out[2];
    if deficit <= T::zero() || total <= T::zero() {
        return T::one();
    }
    let scale = ((total - deficit) / total).max(T::zero());
    for q in out.iter_mut() {
        *q = *q * scale;
    }
    scale
}

/// RK4 substep count for a given `lambda * dt`.
pub(crate) fn substeps_for<T: Real>(lambda_dt: T) -> usize {
    let n = (lambda_dt / T::of(1.5)).ceil().to_usize().unwrap_or(MAX_SUBSTEPS);
    n.clamp(1, MAX_SUBSTEPS)
}

pub(crate) const MAX_SUBSTEPS: usize = 400;

fn axpy<T: Real, const N: usize>(y: &[T; N], a: T, k: &[T; N]) -> [T; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + a * k[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desal::{size_plant, MembraneSpec, SeawaterSpec};
    use crate::params::ParameterSet;

    fn circuit() -> Circuit<f64> {
        let p = ParameterSet::default();
        let plant = size_plant(3150.0, &SeawaterSpec::from_params(&p), &MembraneSpec::from_params(&p));
        Circuit::with_plant(4.0, 3e6, plant, 100.0)
    }

    #[test]
    fn isothermal_law() {
        assert_eq!(accumulator_pressure(0.0, 2.0, 5e6).unwrap(), 5e6);
        assert_eq!(accumulator_pressure(1.0, 2.0, 5e6).unwrap(), 10e6);
        let p = accumulator_pressure(0.49f64, 2.45, 5.73e6).unwrap();
        assert!((p - 7.1625e6).abs() < 1e-3);
        assert!(matches!(accumulator_pressure(2.0, 2.0, 5e6), Err(Error::AccumulatorOverfull { .. })));
    }

    #[test]
    fn piston_examples() {
        let cfg = PistonConfig { ap: 0.26f64, stroke_max: 20.0, cracking_pressure: 0.05e6 };
        assert_eq!(piston_coupling(0.0, 5e6, &cfg), (0.0, 0.0));
        let (q, f) = piston_coupling(0.5, 5e6, &cfg);
        assert!((q - 0.13).abs() < 1e-15);
        assert!(f < 0.0);
        let (_, f) = piston_coupling(-0.5, 5e6, &cfg);
        assert!(f > 0.0);
    }

    #[test]
    fn idle_empty_circuit_stays_put() {
        let c = circuit();
        let s = HydraulicState::default();
        let (next, p, flows, _) = step_circuit(&s, 0.0, &c, 0.1);
        assert_eq!(next, s);
        assert_eq!(p, 0.0);
        assert_eq!(flows, Flows::default());
    }

    #[test]
    fn steady_state_at_relief_pressure() {
        let c = circuit();
        let Load::Plant { plant, .. } = c.load else { unreachable!() };
        let q_design = plant.qpmax / plant.eta_ro;
        let q_extra = 0.01;
        let p = c.equilibrium_pressure(q_design + q_extra);
        let flows = c.outflows(p);
        assert!((flows.total() - (q_design + q_extra)).abs() < 1e-12);
        // the extra flow splits between relief and a slightly higher membrane load
        assert!(flows.relief > 0.0 && flows.relief < q_extra);
        let at_relief = c.outflows(plant.p_relief);
        assert!((at_relief.permeate + at_relief.brine - q_design).abs() / q_design < 1e-12);
        assert!((at_relief.permeate / (at_relief.permeate + at_relief.brine) - plant.eta_ro).abs() < 1e-12);
    }

    #[test]
    fn impulse_conserves_volume() {
        let c = circuit();
        let mut s = HydraulicState::default();
        let q = 0.5;
        for _ in 0..10 {
            s = step_circuit(&s, q, &c, 0.1).0;
        }
        for _ in 0..50 {
            s = step_circuit(&s, 0.0, &c, 0.1).0;
        }
        let residual = s.intake - (s.permeate + s.brine + s.relief + s.v_liquid);
        assert!(residual.abs() < 1e-9, "{residual}");
        assert!((s.intake - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_node_below_precharge() {
        let c = circuit();
        let Load::Plant { plant, .. } = c.load else { unreachable!() };
        let q = 0.5 * plant.delta_pi / plant.r_t;
        let node = c.node(0.0, q);
        assert!(node.empty);
        assert_eq!(node.dv, 0.0);
        assert!((node.flows.total() - q).abs() < 1e-15);
    }
}
