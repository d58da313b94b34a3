//! One pass from design vector to levelized cost.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::desal::{size_plant, MembraneSpec, SeawaterSpec, SECONDS_PER_DAY};
use crate::econ::{
    accumulator_cost, cylinder_cost, lcof, lcoke, lcow, swro_cost, wec_cost, CostBreakdown, SwroCurves, SwroFlows,
    SwroOptions, Usd2018, Usd2025,
};
use crate::error::{Error, Result};
use crate::geometry::{build_geometry, is_statically_unstable, DesignVector, WecGeometry};
use crate::hydraulics::Circuit;
use crate::hydro::{flat_plate_coefficients, geometry_hash, load_for_geometry, radiation_irf_with, HydroCoefficients, IrfMethod};
use crate::params::ParameterSet;
use crate::sysdyn::{
    annual_feed_flow, annual_water_production, kinetic_energy_metric, simulate, ConstraintViolation, Ledger, SimConfig,
    SimulationResult, TimeSeries, WecSystem,
};
use crate::waves::{synthesize, SeaState, SpectrumMode, WaveRealization};

/// Objective value returned for failed or unusable evaluations.
pub const SENTINEL: f64 = 1e6;
/// Weight on each relative constraint violation.
pub const PENALTY_WEIGHT: f64 = 10.0;

/// Where hydrodynamic coefficients come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HydroSource {
    /// Analytical flat-plate model; always available.
    Surrogate,
    /// Files named `<geometry hash>.json` in `dir`. Designs without a file
    /// fail to evaluate.
    Directory { dir: PathBuf },
}

/// Levelized figure being minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Lcow,
    /// Flap alone, PTO disconnected, per kWh of kinetic energy.
    Lcoke,
    /// Flap and PTO pumping through a throttle, per m^3 of feed.
    Lcof,
}

/// Everything an evaluation needs besides the design.
#[derive(Debug, Clone)]
pub struct EvaluationContext {
    pub params: ParameterSet,
    pub seastate: SeaState<f64>,
    pub seed: u64,
    pub spectrum: SpectrumMode,
    pub hydro: HydroSource,
    pub irf: IrfMethod,
    pub swro: SwroOptions,
    pub curves: Arc<SwroCurves>,
    wave: Arc<WaveRealization<f64>>,
}

impl EvaluationContext {
    pub fn new(params: ParameterSet, seastate: SeaState<f64>, seed: u64) -> Result<Self> {
        Self::with_spectrum(params, seastate, seed, SpectrumMode::default())
    }

    pub fn with_spectrum(params: ParameterSet, seastate: SeaState<f64>, seed: u64, spectrum: SpectrumMode) -> Result<Self> {
        params.validate()?;
        let s = &params.solver;
        let wave = synthesize(
            &seastate,
            s.wave_components.round() as usize,
            s.sim_time,
            s.time_step,
            seed,
            s.ramp_time,
            spectrum,
        )?;
        Ok(EvaluationContext {
            params,
            seastate,
            seed,
            spectrum,
            hydro: HydroSource::Surrogate,
            irf: IrfMethod::default(),
            swro: SwroOptions::default(),
            curves: Arc::new(SwroCurves::bundled()),
            wave: Arc::new(wave),
        })
    }

    /// Sea state from the parameter set.
    pub fn nominal(params: ParameterSet, seed: u64) -> Result<Self> {
        let ss = SeaState::new(params.general.significant_wave_height, params.general.peak_period)?;
        Self::new(params, ss, seed)
    }

    pub fn wave(&self) -> &WaveRealization<f64> {
        &self.wave
    }

    pub fn coefficients(&self, geom: &WecGeometry<f64>) -> Result<HydroCoefficients<f64>> {
        let g = &self.params.general;
        match &self.hydro {
            HydroSource::Surrogate => Ok(flat_plate_coefficients(
                geom,
                &self.params.frequency_grid(),
                g.water_depth,
                g.water_density,
                g.gravity,
            )),
            HydroSource::Directory { dir } => {
                let path = dir.join(format!("{}.json", geometry_hash(geom, g.water_depth)));
                if !path.exists() {
                    return Err(Error::Invalid(format!("no coefficient file {}", path.display())));
                }
                load_for_geometry(&path, geom, g.water_depth)
            }
        }
    }

    fn sim_config(&self) -> SimConfig<f64> {
        SimConfig::from_params(&self.params)
    }
}

/// Report of one design evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub design: DesignVector,
    pub objective: Objective,
    /// Levelized cost for `objective`, `inf` when nothing is produced.
    pub levelized_cost: f64,
    /// Value seen by the optimizer: cost plus penalties, capped at the sentinel.
    pub penalized: f64,
    pub penalty: f64,
    pub feasible: bool,
    pub failure: Option<String>,
    pub costs: Option<CostBreakdown>,
    pub swro_items: Vec<(String, Usd2018, Usd2018)>,
    /// Annual permeate, m^3/yr.
    pub awp: f64,
    /// Annual feed through the throttle or plant, m^3/yr.
    pub annual_feed: f64,
    /// Flap kinetic energy, kWh/yr.
    pub annual_kinetic_energy: f64,
    pub k_hs: f64,
    pub statically_unstable: bool,
    pub max_stroke: f64,
    pub max_pressure: f64,
    pub constraints: Vec<ConstraintViolation<f64>>,
    pub ledger: Option<Ledger<f64>>,
    #[serde(skip)]
    pub series: Option<TimeSeries<f64>>,
}

impl Evaluation {
    fn failed(design: &DesignVector, objective: Objective, reason: String) -> Self {
        Evaluation {
            design: *design,
            objective,
            levelized_cost: f64::INFINITY,
            penalized: SENTINEL,
            penalty: 0.0,
            feasible: false,
            failure: Some(reason),
            costs: None,
            swro_items: Vec::new(),
            awp: 0.0,
            annual_feed: 0.0,
            annual_kinetic_energy: 0.0,
            k_hs: f64::NAN,
            statically_unstable: false,
            max_stroke: f64::NAN,
            max_pressure: f64::NAN,
            constraints: Vec::new(),
            ledger: None,
            series: None,
        }
    }
}

/// `cost + weight * sum(relative)`, with non-finite values mapped to the sentinel.
pub fn penalize(cost: f64, violations: &[ConstraintViolation<f64>]) -> (f64, f64) {
    let penalty = PENALTY_WEIGHT * violations.iter().map(|v| v.relative.max(0.0)).sum::<f64>();
    let total = cost + penalty;
    let value = if total.is_finite() { total.min(SENTINEL) } else { SENTINEL };
    (value, penalty)
}

/// Full LCOW evaluation.
pub fn evaluate(design: &DesignVector, ctx: &EvaluationContext) -> Evaluation {
    evaluate_for(design, ctx, Objective::Lcow, false)
}

/// Evaluates `objective`; `record` keeps the time series.
pub fn evaluate_for(design: &DesignVector, ctx: &EvaluationContext, objective: Objective, record: bool) -> Evaluation {
    match run(design, ctx, objective, record) {
        Ok(e) => e,
        Err(err) => Evaluation::failed(design, objective, err.to_string()),
    }
}

/// Scalar objective for the optimizer.
pub fn penalized_objective(design: &DesignVector, ctx: &EvaluationContext, objective: Objective) -> f64 {
    evaluate_for(design, ctx, objective, false).penalized
}

fn run(design: &DesignVector, ctx: &EvaluationContext, objective: Objective, record: bool) -> Result<Evaluation> {
    let p = &ctx.params;
    let fcr = p.general.fixed_charge_rate;
    let geom: WecGeometry<f64> = build_geometry(design, p)?;
    let coeffs = ctx.coefficients(&geom)?;
    coeffs.validate()?;
    let kernel = radiation_irf_with(&coeffs, p.solver.time_step, p.solver.kernel_duration, ctx.irf);
    let (wec_capex, wec_opex) = wec_cost(&geom, p);

    let seawater = SeawaterSpec::from_params(p);
    let membrane = MembraneSpec::from_params(p);
    let mut cfg = ctx.sim_config();
    cfg.record_series = record;

    let mut eval = Evaluation::failed(design, objective, String::new());
    eval.failure = None;
    eval.k_hs = coeffs.k_hs;
    eval.statically_unstable = is_statically_unstable(coeffs.k_hs);

    if objective == Objective::Lcoke {
        let circuit = Circuit::with_throttle(design.vacc, design.p0, 1.0);
        let sys = WecSystem::new(design, &geom, &coeffs, &kernel, circuit, p);
        let ke = kinetic_energy_metric(&sys, &ctx.seastate, &cfg)?;
        let costs = CostBreakdown { capex_wec: wec_capex, opex_wec: wec_opex, ..Default::default() };
        eval.annual_kinetic_energy = ke;
        eval.levelized_cost = lcoke(&costs, ke, fcr);
        eval.costs = Some(costs);
        let (value, penalty) = penalize(eval.levelized_cost, &[]);
        eval.penalized = value;
        eval.penalty = penalty;
        eval.feasible = true;
        return Ok(eval);
    }

    let plant = size_plant(design.qpmax, &seawater, &membrane);
    let circuit = match objective {
        Objective::Lcof => {
            let nominal = size_plant(DesignVector::nominal().qpmax, &seawater, &membrane);
            cfg.limits.p_rated = Some(nominal.p_relief);
            Circuit::with_throttle(design.vacc, design.p0, throttle_resistance(&nominal))
        }
        _ => Circuit::with_plant(design.vacc, design.p0, plant, p.hydraulics.relief_conductance_factor),
    };
    let p_design = match objective {
        Objective::Lcof => cfg.limits.p_rated.unwrap_or(plant.p_relief),
        _ => plant.p_relief,
    };
    let sys = WecSystem::new(design, &geom, &coeffs, &kernel, circuit, p);
    let result: SimulationResult<f64> = simulate(&sys, ctx.wave(), &cfg)?;
    if let Some(f) = &result.failure {
        return Err(Error::Invalid(f.clone()));
    }

    let stroke_req = p.pto.stroke_margin * result.max_stroke;
    let pto_capex = cylinder_cost(design.ap, stroke_req, p_design, p)? + accumulator_cost(design.vacc, p);
    let mut costs = CostBreakdown {
        capex_wec: wec_capex,
        capex_pto: pto_capex,
        opex_wec: wec_opex,
        ..Default::default()
    };

    eval.max_stroke = result.max_stroke;
    eval.max_pressure = result.max_pressure;
    eval.constraints = result.constraint_violations.clone();
    eval.ledger = Some(result.ledger);
    eval.annual_feed = annual_feed_flow(&result, &cfg);
    eval.awp = annual_water_production(&result, &cfg);

    eval.levelized_cost = match objective {
        Objective::Lcof => lcof(&costs, eval.annual_feed, fcr),
        _ => {
            let per_day = SECONDS_PER_DAY / (cfg.duration - cfg.ramp_time);
            let flows = SwroFlows::new(&plant, result.feed_volume * per_day, result.permeate_volume * per_day);
            let swro = swro_cost(&flows, p, &ctx.curves, &ctx.swro)?;
            costs.capex_swro = swro.capex;
            costs.opex_swro = swro.opex;
            costs.opex_pto = Usd2025(0.0);
            eval.swro_items = swro.items.into_iter().map(|(k, (c, o))| (k, c, o)).collect();
            lcow(&costs, eval.awp, fcr)
        }
    };
    eval.costs = Some(costs);
    let (value, penalty) = penalize(eval.levelized_cost, &eval.constraints);
    eval.penalized = value;
    eval.penalty = penalty;
    eval.feasible = eval.constraints.is_empty() && eval.levelized_cost.is_finite();
    eval.series = result.series;
    Ok(eval)
}

/// Throttle passing the plant's full feed flow at its relief pressure.
pub fn throttle_resistance(plant: &crate::desal::DesalPlant<f64>) -> f64 {
    plant.p_relief * plant.eta_ro / plant.qpmax
}

#[cfg(test)]
mod tests {
    use super::*;

    fn violation(relative: f64) -> ConstraintViolation<f64> {
        ConstraintViolation { name: "stroke".into(), magnitude: 2.0, relative, first_time: 0.0 }
    }

    #[test]
    fn penalty_formula() {
        assert_eq!(penalize(3.0, &[]), (3.0, 0.0));
        let (v, pen) = penalize(3.0, &[violation(0.1)]);
        assert!((v - 4.0).abs() < 1e-12 && (pen - 1.0).abs() < 1e-12);
        assert_eq!(penalize(f64::NAN, &[]).0, SENTINEL);
        assert_eq!(penalize(f64::INFINITY, &[]).0, SENTINEL);
    }

    #[test]
    fn throttle_matches_plant_at_relief() {
        let p = ParameterSet::default();
        let plant = size_plant(3150.0, &SeawaterSpec::from_params(&p), &MembraneSpec::from_params(&p));
        let r = throttle_resistance(&plant);
        let q_plant = crate::desal::permeate_flow(plant.p_relief, &plant) + crate::desal::brine_flow(plant.p_relief, &plant);
        assert!((plant.p_relief / r - q_plant).abs() / q_plant < 1e-12);
    }
}
