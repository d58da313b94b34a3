//! Coupled pitch dynamics, piston mechanism and hydraulic circuit.
//!
//! The flap obeys the Cummins equation
//!
//! ```text
//! (I + A_inf) theta'' = f_e(t) - int_0^t K(tau) theta'(t - tau) dtau - K_hs theta - f_u
//! ```
//!
//! integrated with classical RK4 at a fixed output step. Each step is split
//! into as many RK4 substeps as the hydraulic time constants require. The
//! radiation memory is evaluated from a history of step-rate velocities,
//! with the part of the integral inside the current step handled by a
//! trapezoid on the live stage velocity.
//!
//! Mechanism layout, hinge at the origin, `x` along the wave, `z` up:
//!
//! ```text
//!        attachment (l1 sin th, l1 cos th)
//!           o
//!           |\
//!      flap | \  piston, length s(theta)
//!           |  \
//!   hinge   o---o anchor (l2, -l3)
//! ```

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DesignVector, WecGeometry};
use crate::hydraulics::{
    gas_energy, piston_coupling_regularized, substeps_for, withhold_outflow, Circuit, Load, PistonConfig, MAX_SUBSTEPS,
};
use crate::hydro::{HydroCoefficients, RadiationKernel};
use crate::num::{interp_linear, Real};
use crate::params::ParameterSet;
use crate::waves::{excitation_samples, SeaState, WaveRealization};

pub const SECONDS_PER_YEAR: f64 = 31_536_000.0;
pub const JOULES_PER_KWH: f64 = 3.6e6;

pub const TIMESERIES_HEADER: &str = "t,theta,theta_dot,s,p_feed,q_perm,q_brine,q_relief";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MechanismConfig<T: Real> {
    pub l1: T,
    pub l2: T,
    pub l3: T,
}

/// Piston length and its derivative with respect to pitch.
pub fn piston_kinematics<T: Real>(theta: T, mech: &MechanismConfig<T>) -> Result<(T, T)> {
    let MechanismConfig { l1, l2, l3 } = *mech;
    let (sin, cos) = theta.sin_cos();
    let s2 = l1 * l1 + l2 * l2 + l3 * l3 - T::two() * l1 * l2 * sin + T::two() * l1 * l3 * cos;
    let s = s2.max(T::zero()).sqrt();
    if !(s > T::of(1e-9)) {
        return Err(Error::DegenerateMechanism { theta: theta.to_f64_lossy() });
    }
    let ds = (-l1 * l2 * cos - l1 * l3 * sin) / s;
    Ok((s, ds))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ConstraintLimits<T: Real> {
    pub stroke_max: T,
    pub p_max_factor: T,
    /// Pressure the factor applies to; defaults to the plant relief setting.
    pub p_rated: Option<T>,
    /// Lowest admissible gauge pressure in the suction chamber.
    pub p_min_cyl: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SimConfig<T: Real> {
    pub dt: T,
    pub duration: T,
    pub ramp_time: T,
    pub availability: T,
    /// Piston speed over which the check valves switch, m/s.
    pub valve_band: T,
    pub pto_connected: bool,
    pub record_series: bool,
    pub limits: ConstraintLimits<T>,
}

impl<T: Real> SimConfig<T> {
    pub fn from_params(p: &ParameterSet) -> Self {
        SimConfig {
            dt: T::of(p.solver.time_step),
            duration: T::of(p.solver.sim_time),
            ramp_time: T::of(p.solver.ramp_time),
            availability: T::of(p.solver.availability),
            valve_band: T::of(0.01),
            pto_connected: true,
            record_series: false,
            limits: ConstraintLimits {
                stroke_max: T::of(p.pto.max_stroke),
                p_max_factor: T::of(p.hydraulics.max_pressure_factor),
                p_rated: None,
                p_min_cyl: T::of(p.hydraulics.vapor_pressure - p.hydraulics.atmospheric_pressure),
            },
        }
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round().to_usize().unwrap_or(0)
    }

    fn ramp_steps(&self) -> usize {
        (self.ramp_time / self.dt).round().to_usize().unwrap_or(0)
    }
}

/// Everything the integrator needs about one device.
#[derive(Debug, Clone)]
pub struct WecSystem<'a, T: Real> {
    pub inertia: T,
    pub coeffs: &'a HydroCoefficients<T>,
    pub kernel: &'a RadiationKernel<T>,
    pub mechanism: MechanismConfig<T>,
    pub piston: PistonConfig<T>,
    pub circuit: Circuit<T>,
}

impl<'a, T: Real> WecSystem<'a, T> {
    pub fn new(
        design: &DesignVector,
        geom: &WecGeometry<T>,
        coeffs: &'a HydroCoefficients<T>,
        kernel: &'a RadiationKernel<T>,
        circuit: Circuit<T>,
        params: &ParameterSet,
    ) -> Self {
        WecSystem {
            inertia: geom.i_pitch,
            coeffs,
            kernel,
            mechanism: MechanismConfig { l1: T::of(design.l1), l2: T::of(params.pto.l2), l3: T::of(params.pto.l3) },
            piston: PistonConfig {
                ap: T::of(design.ap),
                stroke_max: T::of(params.pto.max_stroke),
                cracking_pressure: T::of(params.pto.cracking_pressure),
            },
            circuit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TimeSeries<T: Real> {
    pub t: Vec<T>,
    pub theta: Vec<T>,
    pub theta_dot: Vec<T>,
    /// Piston extension relative to `theta = 0`.
    pub s: Vec<T>,
    pub p_feed: Vec<T>,
    pub q_perm: Vec<T>,
    pub q_brine: Vec<T>,
    pub q_relief: Vec<T>,
}

impl<T: Real> TimeSeries<T> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Writes the fixed-column CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{TIMESERIES_HEADER}")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.t[i],
                self.theta[i],
                self.theta_dot[i],
                self.s[i],
                self.p_feed[i],
                self.q_perm[i],
                self.q_brine[i],
                self.q_relief[i]
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ConstraintViolation<T: Real> {
    pub name: String,
    /// Largest exceedance in the constraint's own unit.
    pub magnitude: T,
    /// Exceedance divided by the limit.
    pub relative: T,
    pub first_time: T,
}

/// Integrated energy and volume accounts over the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Ledger<T: Real> {
    pub intake: T,
    pub permeate: T,
    pub brine: T,
    pub relief: T,
    pub delta_v_liquid: T,
    /// Outflow withheld because a substep drained the accumulator below empty.
    pub clamped_volume: T,
    pub excitation_work: T,
    pub radiated_energy: T,
    pub pto_work: T,
    pub delta_kinetic: T,
    pub delta_potential: T,
    pub hydraulic_in: T,
    pub hydraulic_out: T,
    pub valve_loss: T,
    pub delta_gas_energy: T,
    /// Smallest instantaneous `f_u * theta'` seen; never negative.
    pub min_pto_power: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SimulationResult<T: Real> {
    pub dt: T,
    pub duration: T,
    pub ramp_time: T,
    pub series: Option<TimeSeries<T>>,
    /// Permeate produced after the ramp, m^3.
    pub permeate_volume: T,
    /// Flow leaving the feed node after the ramp, m^3.
    pub feed_volume: T,
    /// Piston intake after the ramp, m^3.
    pub intake_volume: T,
    pub max_stroke: T,
    pub max_pressure: T,
    pub min_cyl_pressure: T,
    /// Mean of `theta'^2` after the ramp.
    pub mean_sq_velocity: T,
    pub constraint_violations: Vec<ConstraintViolation<T>>,
    pub ledger: Ledger<T>,
    pub empty_clamps: usize,
    pub substeps: usize,
    pub failure: Option<String>,
}

impl<T: Real> SimulationResult<T> {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn feasible(&self) -> bool {
        !self.failed() && self.constraint_violations.is_empty()
    }

    /// Mean of a post-ramp volume as a flow, m^3/s.
    pub fn mean_flow(&self, volume: T) -> T {
        volume / (self.duration - self.ramp_time)
    }
}

const N_STATE: usize = 14;
// state layout
const TH: usize = 0;
const OM: usize = 1;
const VL: usize = 2;
const PERM: usize = 3;
const BRINE: usize = 4;
const RELIEF: usize = 5;
const INTAKE: usize = 6;
const W_EXC: usize = 7;
const W_RAD: usize = 8;
const W_PTO: usize = 9;
const E_IN: usize = 10;
const E_OUT: usize = 11;
const E_VALVE: usize = 12;
const OM2: usize = 13;

struct Stage<T: Real> {
    deriv: [T; N_STATE],
    pto_power: T,
}

/// Runs the coupled model. Configuration mismatches are errors; numerical
/// failure is reported inside the result.
pub fn simulate<T: Real>(sys: &WecSystem<'_, T>, wave: &WaveRealization<T>, cfg: &SimConfig<T>) -> Result<SimulationResult<T>> {
    let tol = T::of(1e-9);
    if (wave.dt - cfg.dt).abs() > tol * cfg.dt || (wave.duration - cfg.duration).abs() > tol * cfg.duration {
        return Err(Error::Invalid(format!(
            "wave sampled at dt {} over {} s, simulation expects dt {} over {} s",
            wave.dt, wave.duration, cfg.dt, cfg.duration
        )));
    }
    if cfg.ramp_time >= cfg.duration {
        return Err(Error::Invalid("ramp time must be shorter than the run".into()));
    }
    let dt = cfg.dt;
    let half = dt * T::half();
    let n_steps = cfg.steps();
    let fe = excitation_samples(wave, sys.coeffs, half)?;

    let mass = sys.inertia + sys.kernel.a_inf;
    let k_hs = sys.coeffs.k_hs;
    let kernel = sys.kernel;
    let k0 = kernel.at(T::zero());
    let m_hist = (kernel.duration() / dt).floor().to_usize().unwrap_or(0);
    // kernel at offset o*dt/2 + j*dt for the three history nodes
    let k_off: [Vec<T>; 3] = std::array::from_fn(|o| {
        (0..=m_hist).map(|j| kernel.at(half * T::of(o as f64) + dt * T::of(j as f64))).collect()
    });

    let s0 = if cfg.pto_connected { piston_kinematics(T::zero(), &sys.mechanism)?.0 } else { T::zero() };
    let rated = match (cfg.limits.p_rated, sys.circuit.load) {
        (Some(p), _) => p,
        (None, Load::Plant { plant, .. }) => plant.p_relief,
        (None, Load::Throttle { .. }) => T::infinity(),
    };
    let p_max = cfg.limits.p_max_factor * rated;

    let mut y = [T::zero(); N_STATE];
    let mut v_hist: Vec<T> = Vec::with_capacity(n_steps + 1);
    let mut series = cfg.record_series.then(|| TimeSeries {
        t: Vec::with_capacity(n_steps + 1),
        ..Default::default()
    });
    let mut tracker = Tracker::new();
    let mut empty_clamps = 0usize;
    let mut clamped_volume = T::zero();
    let mut total_substeps = 0usize;
    let mut min_pto_power = T::zero();
    let mut failure: Option<String> = None;
    let mut at_ramp = [T::zero(); N_STATE];
    let ramp_steps = cfg.ramp_steps();

    let record = |y: &[T; N_STATE], t: T, series: &mut Option<TimeSeries<T>>, tracker: &mut Tracker<T>| -> Result<()> {
        let (s, ds) = if cfg.pto_connected { piston_kinematics(y[TH], &sys.mechanism)? } else { (s0, T::zero()) };
        let (p, flows, moving) = if cfg.pto_connected {
            let (q_in, _) = piston_coupling_regularized(ds * y[OM], T::zero(), &sys.piston, cfg.valve_band);
            let node = sys.circuit.node(y[VL], q_in);
            (node.p_feed, node.flows, ds * y[OM] != T::zero())
        } else {
            (T::zero(), Default::default(), false)
        };
        tracker.observe(t, s - s0, p, moving);
        if let Some(ts) = series.as_mut() {
            ts.t.push(t);
            ts.theta.push(y[TH]);
            ts.theta_dot.push(y[OM]);
            ts.s.push(s - s0);
            ts.p_feed.push(p);
            ts.q_perm.push(flows.permeate);
            ts.q_brine.push(flows.brine);
            ts.q_relief.push(flows.relief);
        }
        Ok(())
    };

    record(&y, T::zero(), &mut series, &mut tracker)?;
    v_hist.push(y[OM]);
    if ramp_steps == 0 {
        at_ramp = y;
    }

    for n in 0..n_steps {
        let t_n = dt * T::of(n as f64);
        let v_n = y[OM];
        let hist: [T; 3] = std::array::from_fn(|o| {
            let k = &k_off[o];
            let mut acc = T::half() * k[0] * v_n;
            for j in 1..=m_hist.min(n) {
                acc = acc + k[j] * v_hist[n - j];
            }
            acc * dt
        });
        let history_at = |s: T| {
            let l0 = T::two() * (s - half) * (s - dt) / (dt * dt);
            let l1 = -T::of(4.0) * s * (s - dt) / (dt * dt);
            let l2 = T::two() * s * (s - half) / (dt * dt);
            hist[0] * l0 + hist[1] * l1 + hist[2] * l2
        };

        let (n_sub, band) = substep_plan(sys, cfg, &y, mass);
        total_substeps += n_sub;
        let h = dt / T::of(n_sub as f64);

        let eval = |s: T, y: &[T; N_STATE]| -> Stage<T> {
            let x = (t_n + s) / half;
            let i = x.floor().to_usize().unwrap_or(0).min(fe.len().saturating_sub(2));
            let frac = x - T::of(i as f64);
            let f_e = fe[i] + frac * (fe[i + 1] - fe[i]);
            let conv = history_at(s) + s * T::half() * (k0 * y[OM] + kernel.at(s) * v_n);
            let mut d = [T::zero(); N_STATE];
            let mut f_u = T::zero();
            if cfg.pto_connected {
                let (_, ds) = piston_kinematics(y[TH], &sys.mechanism).unwrap_or((T::nan(), T::nan()));
                let v_p = ds * y[OM];
                let (q_in, _) = piston_coupling_regularized(v_p, T::zero(), &sys.piston, band);
                let node = sys.circuit.node(y[VL], q_in);
                let (_, f_piston) = piston_coupling_regularized(v_p, node.p_feed, &sys.piston, band);
                f_u = -f_piston * ds;
                d[VL] = node.dv;
                d[PERM] = node.flows.permeate;
                d[BRINE] = node.flows.brine;
                d[RELIEF] = node.flows.relief;
                d[INTAKE] = q_in;
                d[E_IN] = node.p_feed * q_in;
                d[E_OUT] = node.p_feed * node.flows.total();
                d[E_VALVE] = sys.piston.cracking_pressure * q_in;
            }
            d[TH] = y[OM];
            d[OM] = (f_e - conv - k_hs * y[TH] - f_u) / mass;
            d[W_EXC] = f_e * y[OM];
            d[W_RAD] = conv * y[OM];
            d[W_PTO] = f_u * y[OM];
            d[OM2] = y[OM] * y[OM];
            Stage { deriv: d, pto_power: f_u * y[OM] }
        };

        for k in 0..n_sub {
            let s = h * T::of(k as f64);
            let st1 = eval(s, &y);
            let st2 = eval(s + h * T::half(), &axpy(&y, h * T::half(), &st1.deriv));
            let st3 = eval(s + h * T::half(), &axpy(&y, h * T::half(), &st2.deriv));
            let st4 = eval(s + h, &axpy(&y, h, &st3.deriv));
            for st in [&st1, &st2, &st3, &st4] {
                min_pto_power = min_pto_power.min(st.pto_power);
            }
            let prev = y;
            for i in 0..N_STATE {
                y[i] = y[i]
                    + h / T::of(6.0) * (st1.deriv[i] + T::two() * (st2.deriv[i] + st3.deriv[i]) + st4.deriv[i]);
            }
            if y[VL] < T::zero() {
                empty_clamps += 1;
                clamped_volume = clamped_volume - y[VL];
                let mut out = [y[PERM] - prev[PERM], y[BRINE] - prev[BRINE], y[RELIEF] - prev[RELIEF]];
                let scale = withhold_outflow(&mut y[VL], &mut out);
                y[PERM] = prev[PERM] + out[0];
                y[BRINE] = prev[BRINE] + out[1];
                y[RELIEF] = prev[RELIEF] + out[2];
                y[E_OUT] = prev[E_OUT] + scale * (y[E_OUT] - prev[E_OUT]);
            }
        }

        let t_next = dt * T::of((n + 1) as f64);
        if y.iter().any(|v| !v.is_finite()) || y[TH].abs() > T::of(2.0 * std::f64::consts::TAU) {
            failure = Some(format!("state diverged at t = {t_next} s"));
            break;
        }
        if let Err(e) = record(&y, t_next, &mut series, &mut tracker) {
            failure = Some(e.to_string());
            break;
        }
        v_hist.push(y[OM]);
        if n + 1 == ramp_steps {
            at_ramp = y;
        }
    }

    let ledger = Ledger {
        intake: y[INTAKE],
        permeate: y[PERM],
        brine: y[BRINE],
        relief: y[RELIEF],
        delta_v_liquid: y[VL],
        clamped_volume,
        excitation_work: y[W_EXC],
        radiated_energy: y[W_RAD],
        pto_work: y[W_PTO],
        delta_kinetic: T::half() * mass * y[OM] * y[OM],
        delta_potential: T::half() * k_hs * y[TH] * y[TH],
        hydraulic_in: y[E_IN],
        hydraulic_out: y[E_OUT],
        valve_loss: y[E_VALVE],
        delta_gas_energy: gas_energy(y[VL], sys.circuit.vacc, sys.circuit.p0),
        min_pto_power,
    };
    let window = cfg.duration - cfg.ramp_time;
    let violations = tracker.violations(&cfg.limits, p_max, sys.piston.cracking_pressure);
    Ok(SimulationResult {
        dt,
        duration: cfg.duration,
        ramp_time: cfg.ramp_time,
        series,
        permeate_volume: (y[PERM] - at_ramp[PERM]).max(T::zero()),
        feed_volume: (y[PERM] + y[BRINE] + y[RELIEF]) - (at_ramp[PERM] + at_ramp[BRINE] + at_ramp[RELIEF]),
        intake_volume: y[INTAKE] - at_ramp[INTAKE],
        max_stroke: tracker.s_max - tracker.s_min,
        max_pressure: tracker.p_max,
        min_cyl_pressure: if tracker.moved { -sys.piston.cracking_pressure } else { T::zero() },
        mean_sq_velocity: (y[OM2] - at_ramp[OM2]) / window,
        constraint_violations: violations,
        ledger,
        empty_clamps,
        substeps: total_substeps,
        failure,
    })
}

/// Substep count and valve band for the step starting at state `y`.
fn substep_plan<T: Real>(sys: &WecSystem<'_, T>, cfg: &SimConfig<T>, y: &[T; N_STATE], mass: T) -> (usize, T) {
    if !cfg.pto_connected {
        return (1, cfg.valve_band);
    }
    let Ok((_, ds)) = piston_kinematics(y[TH], &sys.mechanism) else {
        return (1, cfg.valve_band);
    };
    let circuit = &sys.circuit;
    let v = y[VL].max(T::zero());
    let p = circuit.node(v, T::zero()).p_feed.max(circuit.p0);
    let ap = sys.piston.ap;
    let lever2 = ds * ds;
    let lambda_h = circuit.stiffness(v);
    let omega_c = (ap * ap * lever2 * circuit.gas_stiffness(v) / mass).sqrt();
    let force = ap * (p + sys.piston.cracking_pressure);
    let valve_rate = |band: T| force * lever2 / (band * mass);
    let lambda = lambda_h.max(omega_c).max(valve_rate(cfg.valve_band));
    let n = substeps_for(lambda * cfg.dt);
    let mut band = cfg.valve_band;
    if n == MAX_SUBSTEPS && valve_rate(band) * cfg.dt / T::of(MAX_SUBSTEPS as f64) > T::of(1.5) {
        // widen the band just enough to stay stable at the substep cap
        band = force * lever2 * cfg.dt / (T::of(1.5 * MAX_SUBSTEPS as f64) * mass);
    }
    (n, band)
}

/// Running extrema for the constraint checks.
struct Tracker<T: Real> {
    s_min: T,
    s_max: T,
    p_max: T,
    moved: bool,
    first_motion: T,
    stroke_history: Vec<(T, T)>,
    pressure_history: Vec<(T, T)>,
}

impl<T: Real> Tracker<T> {
    fn new() -> Self {
        Tracker {
            s_min: T::infinity(),
            s_max: T::neg_infinity(),
            p_max: T::zero(),
            moved: false,
            first_motion: T::zero(),
            stroke_history: Vec::new(),
            pressure_history: Vec::new(),
        }
    }

    fn observe(&mut self, t: T, s: T, p: T, moving: bool) {
        self.s_min = self.s_min.min(s);
        self.s_max = self.s_max.max(s);
        self.p_max = self.p_max.max(p);
        if moving && !self.moved {
            self.moved = true;
            self.first_motion = t;
        }
        self.stroke_history.push((t, self.s_max - self.s_min));
        self.pressure_history.push((t, p));
    }

    fn violations(&self, limits: &ConstraintLimits<T>, p_max: T, cracking: T) -> Vec<ConstraintViolation<T>> {
        let mut out = Vec::new();
        let first = |hist: &[(T, T)], limit: T| hist.iter().find(|(_, v)| *v > limit).map(|(t, _)| *t);
        let stroke = self.s_max - self.s_min;
        if stroke > limits.stroke_max {
            out.push(ConstraintViolation {
                name: "stroke".into(),
                magnitude: stroke - limits.stroke_max,
                relative: (stroke - limits.stroke_max) / limits.stroke_max,
                first_time: first(&self.stroke_history, limits.stroke_max).unwrap_or(T::zero()),
            });
        }
        if self.p_max > p_max {
            out.push(ConstraintViolation {
                name: "max_pressure".into(),
                magnitude: self.p_max - p_max,
                relative: (self.p_max - p_max) / p_max,
                first_time: first(&self.pressure_history, p_max).unwrap_or(T::zero()),
            });
        }
        // suction side sits at minus the cracking pressure while pumping
        if self.moved && -cracking < limits.p_min_cyl {
            let excess = limits.p_min_cyl + cracking;
            out.push(ConstraintViolation {
                name: "min_pressure".into(),
                magnitude: excess,
                relative: excess / limits.p_min_cyl.abs(),
                first_time: self.first_motion,
            });
        }
        out
    }
}

fn axpy<T: Real>(y: &[T; N_STATE], a: T, k: &[T; N_STATE]) -> [T; N_STATE] {
    let mut out = *y;
    for i in 0..N_STATE {
        out[i] = y[i] + a * k[i];
    }
    out
}

/// Scales the post-ramp permeate to a year.
pub fn annual_water_production<T: Real>(result: &SimulationResult<T>, cfg: &SimConfig<T>) -> T {
    result.permeate_volume * T::of(SECONDS_PER_YEAR) / (cfg.duration - cfg.ramp_time) * cfg.availability
}

/// Same scaling for the total flow leaving the feed node.
pub fn annual_feed_flow<T: Real>(result: &SimulationResult<T>, cfg: &SimConfig<T>) -> T {
    result.feed_volume * T::of(SECONDS_PER_YEAR) / (cfg.duration - cfg.ramp_time) * cfg.availability
}

/// Annualized mean kinetic energy of the free flap in a regular wave at the
/// peak period with amplitude `Hs / 2`, in kWh/yr.
pub fn kinetic_energy_metric<T: Real>(
    sys: &WecSystem<'_, T>,
    seastate: &SeaState<T>,
    cfg: &SimConfig<T>,
) -> Result<T> {
    let mut free = *cfg;
    free.pto_connected = false;
    free.record_series = false;
    let wp = seastate.peak_frequency();
    let wave = WaveRealization::regular(wp, seastate.hs * T::half(), cfg.dt, cfg.duration, cfg.ramp_time);
    let result = simulate(sys, &wave, &free)?;
    if let Some(f) = result.failure {
        return Err(Error::Invalid(f));
    }
    let om = &sys.coeffs.omega;
    let w_clamped = wp.max(om[0]).min(om[om.len() - 1]);
    let a_wp = interp_linear(om, &sys.coeffs.added_mass, w_clamped).expect("clamped inside grid");
    let mean_ke = T::half() * (sys.inertia + a_wp) * result.mean_sq_velocity;
    Ok(mean_ke * T::of(SECONDS_PER_YEAR / JOULES_PER_KWH))
}
