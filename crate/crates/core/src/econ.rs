//! Cost models and levelized objectives.
//!
//! SWRO curve outputs are in 2018 dollars and carry the [`Usd2018`] type
//! until inflated; everything that reaches a levelized cost is [`Usd2025`].

use std::collections::BTreeMap;
use std::ops::{Add, Mul};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::desal::{DesalPlant, SECONDS_PER_DAY};
use crate::error::{Error, Result};
use crate::geometry::WecGeometry;
use crate::params::ParameterSet;

pub const CURVES_SCHEMA: &str = "wavedesal.swro-curves/1";
const BUNDLED_CURVES: &str = include_str!("../data/swro_cost_curves.json");
const CUBIC_INCHES_PER_M3: f64 = 61_023.744;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Usd2018(pub f64);

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Usd2025(pub f64);

impl Usd2018 {
    pub fn inflate(self, factor: f64) -> Usd2025 {
        Usd2025(self.0 * factor)
    }
}

macro_rules! money_ops {
    ($t:ident) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                $t(self.0 + o.0)
            }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, k: f64) -> $t {
                $t(self.0 * k)
            }
        }
        impl std::iter::Sum for $t {
            fn sum<I: Iterator<Item = $t>>(it: I) -> $t {
                $t(it.map(|x| x.0).sum())
            }
        }
    };
}
money_ops!(Usd2018);
money_ops!(Usd2025);

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub capex_wec: Usd2025,
    pub capex_pto: Usd2025,
    pub capex_swro: Usd2025,
    /// Per year.
    pub opex_wec: Usd2025,
    pub opex_pto: Usd2025,
    pub opex_swro: Usd2025,
}

impl CostBreakdown {
    pub fn capex(&self) -> Usd2025 {
        self.capex_wec + self.capex_pto + self.capex_swro
    }

    pub fn opex(&self) -> Usd2025 {
        self.opex_wec + self.opex_pto + self.opex_swro
    }

    pub fn wec_only(&self) -> Self {
        CostBreakdown { capex_wec: self.capex_wec, opex_wec: self.opex_wec, ..Default::default() }
    }

    pub fn without_swro(&self) -> Self {
        CostBreakdown { capex_swro: Usd2025(0.0), opex_swro: Usd2025(0.0), ..*self }
    }
}

/// Levelized cost: `(FCR * CAPEX + OPEX) / annual output`. A nonpositive
/// output gives `+inf`.
pub fn levelized(cost: &CostBreakdown, annual_output: f64, fcr: f64) -> f64 {
    if !(annual_output > 0.0) || !annual_output.is_finite() {
        return f64::INFINITY;
    }
    (fcr * cost.capex().0 + cost.opex().0) / annual_output
}

/// USD per m^3 of permeate.
pub fn lcow(cost: &CostBreakdown, awp: f64, fcr: f64) -> f64 {
    levelized(cost, awp, fcr)
}

/// USD per kWh of flap kinetic energy, WEC costs only.
pub fn lcoke(cost: &CostBreakdown, annual_ke_kwh: f64, fcr: f64) -> f64 {
    levelized(&cost.wec_only(), annual_ke_kwh, fcr)
}

/// USD per m^3 of pumped feed, excluding the SWRO plant.
pub fn lcof(cost: &CostBreakdown, annual_feed: f64, fcr: f64) -> f64 {
    levelized(&cost.without_swro(), annual_feed, fcr)
}

/// Reference flap costs split into the linear and logarithmic terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WecReferenceCosts {
    pub area: f64,
    pub capex_c1: f64,
    pub capex_c2: f64,
    pub opex_c1: f64,
    pub opex_c2: f64,
}

impl WecReferenceCosts {
    pub fn from_params(p: &ParameterSet) -> Self {
        let w = &p.wec;
        let capex_c1 = w.rm5_flap_cost + w.rm5_base_cost;
        let capex_c2 = w.rm5_bearings_cost + w.rm5_mooring_cost;
        let insurance = w.rm5_insurance_rate * (capex_c1 + capex_c2);
        WecReferenceCosts {
            area: w.rm5_surface_area,
            capex_c1,
            capex_c2,
            opex_c1: w.rm5_parts_cost + w.rm5_consumables_cost + insurance,
            opex_c2: w.rm5_monitoring_cost + w.rm5_marine_operations_cost + w.rm5_shore_operations_cost,
        }
    }
}

/// `C1 r + max(0, C2 (1 + log10 r))` with `r` the area ratio.
pub fn area_scaled_cost(c1: f64, c2: f64, ratio: f64) -> f64 {
    c1 * ratio + (c2 * (1.0 + ratio.log10())).max(0.0)
}

/// Returns `(capex, opex per year)`.
pub fn wec_cost(geom: &WecGeometry<f64>, params: &ParameterSet) -> (Usd2025, Usd2025) {
    let r = WecReferenceCosts::from_params(params);
    let ratio = geom.wetted_area / r.area;
    (
        Usd2025(area_scaled_cost(r.capex_c1, r.capex_c2, ratio)),
        Usd2025(area_scaled_cost(r.opex_c1, r.opex_c2, ratio)),
    )
}

pub fn accumulator_cost(vacc: f64, params: &ParameterSet) -> Usd2025 {
    Usd2025(params.pto.accumulator_cost_coefficient * vacc.powf(params.pto.accumulator_cost_exponent))
}

/// Steel dimensions of the cylinder, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderSizing {
    pub bore: f64,
    pub wall: f64,
    pub cap: f64,
    pub rod: f64,
    pub barrel_length: f64,
    /// m^3
    pub steel_volume: f64,
}

pub fn size_cylinder(ap: f64, stroke_req: f64, p_design: f64, params: &ParameterSet) -> Result<CylinderSizing> {
    if !(ap > 0.0) || !(stroke_req >= 0.0) || !(p_design >= 0.0) {
        return Err(Error::InfeasibleCost(format!(
            "cylinder needs Ap > 0, stroke >= 0, P >= 0 (got {ap}, {stroke_req}, {p_design})"
        )));
    }
    let pto = &params.pto;
    let allowable = pto.ss316_yield_strength / pto.cylinder_factor_of_safety;
    let se = allowable * pto.joint_efficiency;
    let denom = se - 0.6 * p_design;
    if denom <= 0.0 {
        return Err(Error::InfeasibleCost(format!(
            "design pressure {p_design} Pa too high for allowable stress {allowable} Pa"
        )));
    }
    let bore = (4.0 * ap / std::f64::consts::PI).sqrt();
    let r = bore / 2.0;
    let wall = p_design * r / denom;
    let cap = bore * (pto.end_cap_attachment_factor * p_design / se).sqrt();

    let force = p_design * ap;
    let pi = std::f64::consts::PI;
    let d_tensile = (4.0 * force * pto.rod_factor_of_safety / (pi * pto.ss316_yield_strength)).sqrt();
    let d_buckling = (64.0 * pto.rod_factor_of_safety * force * stroke_req * stroke_req
        / (pi.powi(3) * pto.ss316_youngs_modulus))
        .powf(0.25);
    let rod = d_tensile.max(d_buckling);

    let barrel_length = stroke_req + cap;
    let r_out = r + wall;
    let v_barrel = pi * (r_out * r_out - r * r) * barrel_length;
    let v_cap = pi * r_out * r_out * cap;
    let v_piston = pi * r * r * cap;
    let v_rod = pi * rod * rod / 4.0 * stroke_req;
    Ok(CylinderSizing {
        bore,
        wall,
        cap,
        rod,
        barrel_length,
        steel_volume: v_barrel + 2.0 * v_cap + v_piston + v_rod,
    })
}

/// Steel cost with labor, using the per-cubic-inch steel price.
pub fn cylinder_cost(ap: f64, stroke_req: f64, p_design: f64, params: &ParameterSet) -> Result<Usd2025> {
    let sizing = size_cylinder(ap, stroke_req, p_design, params)?;
    let v_in3 = sizing.steel_volume * CUBIC_INCHES_PER_M3;
    Ok(Usd2025(params.pto.ss316_cost * v_in3 * (1.0 + params.pto.labor_factor)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveInput {
    Feed,
    Permeate,
    /// Permeate capacity, used by some OPEX curves.
    Capacity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveOutput {
    Kusd,
    KusdPerM,
    UsdPerM,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostCurve {
    pub id: String,
    pub figure: String,
    pub curve: String,
    pub a: f64,
    pub b: f64,
    pub x: CurveInput,
    pub y: CurveOutput,
}

impl CostCurve {
    /// Raw curve value `A X^B` in the table's own units.
    pub fn eval(&self, x: f64) -> f64 {
        self.a * x.powf(self.b)
    }

    /// Dollars, with per-metre curves multiplied by `length`.
    fn dollars(&self, x: f64, length: f64) -> Usd2018 {
        let y = self.eval(x);
        Usd2018(match self.y {
            CurveOutput::Kusd => 1e3 * y,
            CurveOutput::KusdPerM => 1e3 * y * length,
            CurveOutput::UsdPerM => y * length,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwroCurves {
    pub schema: String,
    pub currency_year: u32,
    pub capex: Vec<CostCurve>,
    pub opex: Vec<CostCurve>,
}

const REQUIRED_CAPEX: [&str; 11] = [
    "hdpe_intake",
    "band_screens",
    "wedgewire_screens",
    "microscreens",
    "pretreatment_upper",
    "pretreatment_lower",
    "swro_high_tds",
    "swro_low_tds",
    "lime_co2",
    "hypochlorite",
    "calcite_co2",
];
const REQUIRED_OPEX_EXTRA: [&str; 4] = ["other_direct_upper", "other_direct_lower", "indirect_upper", "indirect_lower"];

impl SwroCurves {
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_CURVES).expect("bundled cost curves are valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let curves: SwroCurves = serde_json::from_str(text)?;
        curves.validate()?;
        Ok(curves)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invalid(format!("cost curves: {m}")));
        if self.schema != CURVES_SCHEMA {
            return bad(format!("schema `{}`, expected `{CURVES_SCHEMA}`", self.schema));
        }
        if self.currency_year != 2018 {
            return bad(format!("currency year {} is not 2018", self.currency_year));
        }
        for c in self.capex.iter().chain(&self.opex) {
            if !(c.a > 0.0 && c.b > 0.0 && c.a.is_finite() && c.b.is_finite()) {
                return bad(format!("curve `{}` needs positive finite A and B", c.id));
            }
        }
        for id in REQUIRED_CAPEX {
            if self.find(&self.capex, id).is_none() {
                return bad(format!("missing CAPEX curve `{id}`"));
            }
        }
        for id in REQUIRED_CAPEX.iter().chain(&REQUIRED_OPEX_EXTRA) {
            if self.find(&self.opex, id).is_none() {
                return bad(format!("missing OPEX curve `{id}`"));
            }
        }
        Ok(())
    }

    fn find<'a>(&self, table: &'a [CostCurve], id: &str) -> Option<&'a CostCurve> {
        table.iter().find(|c| c.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntakeScreen {
    Band,
    #[default]
    Wedgewire,
    Microscreen,
}

impl IntakeScreen {
    fn curve_id(self) -> &'static str {
        match self {
            IntakeScreen::Band => "band_screens",
            IntakeScreen::Wedgewire => "wedgewire_screens",
            IntakeScreen::Microscreen => "microscreens",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stabilization {
    #[default]
    Lime,
    Calcite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SwroOptions {
    #[serde(default)]
    pub intake_screen: IntakeScreen,
    #[serde(default)]
    pub stabilization: Stabilization,
}

/// Flow arguments for the curves, all in m^3/day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwroFlows {
    pub feed_capacity: f64,
    pub permeate_capacity: f64,
    pub avg_feed: f64,
    pub avg_permeate: f64,
}

impl SwroFlows {
    pub fn new(plant: &DesalPlant<f64>, avg_feed: f64, avg_permeate: f64) -> Self {
        let permeate_capacity = plant.qpmax * SECONDS_PER_DAY;
        SwroFlows {
            feed_capacity: permeate_capacity / plant.eta_ro,
            permeate_capacity,
            avg_feed,
            avg_permeate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwroCost {
    pub capex: Usd2025,
    pub opex: Usd2025,
    /// Line items before inflation, `(capex, opex per year)`.
    pub items: BTreeMap<String, (Usd2018, Usd2018)>,
}

/// Sums the selected curves. Feed and permeate CAPEX curves are evaluated
/// at capacity; OPEX curves at the average flows or capacity as tabulated.
pub fn swro_cost(flows: &SwroFlows, params: &ParameterSet, curves: &SwroCurves, options: &SwroOptions) -> Result<SwroCost> {
    if !(flows.permeate_capacity > 0.0 && flows.feed_capacity > 0.0) {
        return Err(Error::InfeasibleCost(format!(
            "SWRO capacity must be positive (permeate {} m3/day)",
            flows.permeate_capacity
        )));
    }
    let length = params.general.distance_to_shore;
    let e = &params.economics;
    let alpha = (params.swro.feed_tds - e.tds_curve_low) / (e.tds_curve_high - e.tds_curve_low);
    let stabilization = match options.stabilization {
        Stabilization::Lime => "lime_co2",
        Stabilization::Calcite => "calcite_co2",
    };

    let eval = |table: &[CostCurve], id: &str, capex: bool| -> Usd2018 {
        let c = curves.find(table, id).expect("validated curve set");
        let x = match (c.x, capex) {
            (CurveInput::Feed, true) => flows.feed_capacity,
            (CurveInput::Permeate, true) | (CurveInput::Capacity, _) => flows.permeate_capacity,
            (CurveInput::Feed, false) => flows.avg_feed,
            (CurveInput::Permeate, false) => flows.avg_permeate,
        };
        c.dollars(x.max(0.0), length)
    };
    let average = |table: &[CostCurve], stem: &str, capex: bool| {
        (eval(table, &format!("{stem}_upper"), capex) + eval(table, &format!("{stem}_lower"), capex)) * 0.5
    };
    let tds = |table: &[CostCurve], capex: bool| {
        eval(table, "swro_low_tds", capex) * (1.0 - alpha) + eval(table, "swro_high_tds", capex) * alpha
    };

    let mut items: BTreeMap<String, (Usd2018, Usd2018)> = BTreeMap::new();
    let mut put = |name: &str, capex: Usd2018, opex: Usd2018| {
        items.insert(name.to_owned(), (capex, opex));
    };
    let (cx, ox) = (&curves.capex[..], &curves.opex[..]);
    put("intake_pipe", eval(cx, "hdpe_intake", true), eval(ox, "hdpe_intake", false));
    let screen = options.intake_screen.curve_id();
    put("intake_screens", eval(cx, screen, true), eval(ox, screen, false));
    put("pretreatment", average(cx, "pretreatment", true), average(ox, "pretreatment", false));
    put("swro_system", tds(cx, true), tds(ox, false));
    put("stabilization", eval(cx, stabilization, true), eval(ox, stabilization, false));
    put("disinfection", eval(cx, "hypochlorite", true), eval(ox, "hypochlorite", false));
    put("other_direct", Usd2018(0.0), average(ox, "other_direct", false));
    put("indirect", Usd2018(0.0), average(ox, "indirect", false));

    let capex: Usd2018 = items.values().map(|v| v.0).sum();
    let opex: Usd2018 = items.values().map(|v| v.1).sum();
    Ok(SwroCost {
        capex: capex.inflate(e.inflation_factor),
        opex: opex.inflate(e.inflation_factor),
        items,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ParameterSet {
        ParameterSet::default()
    }

    #[test]
    fn reference_splits() {
        let r = WecReferenceCosts::from_params(&p());
        assert!((r.capex_c1 - 5_071_063.90).abs() < 0.01);
        assert!((r.capex_c2 - 1_015_239.54).abs() < 0.01);
        assert!((r.opex_c1 - 225_443.4561).abs() < 0.01);
        assert!((r.opex_c2 - 1_065_147.79).abs() < 0.01);
    }

    #[test]
    fn area_scaling_floor() {
        assert_eq!(area_scaled_cost(3.0, 5.0, 1.0), 8.0);
        assert!((area_scaled_cost(3.0, 5.0, 0.1) - 0.3).abs() < 1e-12);
        assert!((area_scaled_cost(3.0, 5.0, 0.01) - 0.03).abs() < 1e-12);
    }

    #[test]
    fn accumulator_examples() {
        assert!((accumulator_cost(1.0, &p()).0 - 162_100.0).abs() < 1e-6);
        let c4 = 1.621e5 * 4f64.powf(0.986);
        assert!((accumulator_cost(4.0, &p()).0 - c4).abs() < 1e-6);
        assert!((c4 - 636_000.0).abs() < 100.0, "{c4}");
    }

    #[test]
    fn nominal_wall_thickness() {
        let s = size_cylinder(0.26, 10.0, 6.20e6, &p()).unwrap();
        assert!((s.wall - 0.0751).abs() < 1e-4, "{}", s.wall);
    }

    #[test]
    fn overpressure_is_infeasible() {
        assert!(matches!(cylinder_cost(0.26, 10.0, 1e9, &p()), Err(Error::InfeasibleCost(_))));
    }

    #[test]
    fn bundled_curves_load() {
        let c = SwroCurves::bundled();
        assert_eq!(c.capex.len(), 11);
        assert_eq!(c.opex.len(), 15);
        let unity = &c.capex[0];
        assert_eq!(unity.eval(1.0), unity.a);
    }

    #[test]
    fn missing_curve_rejected() {
        let mut doc: serde_json::Value = serde_json::from_str(BUNDLED_CURVES).unwrap();
        doc["opex"].as_array_mut().unwrap().pop();
        assert!(SwroCurves::from_json(&doc.to_string()).is_err());
    }

    #[test]
    fn levelized_examples() {
        let mut c = CostBreakdown::default();
        c.opex_swro = Usd2025(1234.5);
        assert!((lcow(&c, 1234.5, 0.108) - 1.0).abs() < 1e-15);
        let c = CostBreakdown { capex_wec: Usd2025(1e6), ..Default::default() };
        assert!((lcow(&c, 1e5, 0.108) - 1.08).abs() < 1e-12);
        assert_eq!(lcow(&c, 0.0, 0.108), f64::INFINITY);
        assert_eq!(lcoke(&CostBreakdown::default(), 10.0, 0.108), 0.0);
    }

    #[test]
    fn subsystem_restrictions() {
        let c = CostBreakdown {
            capex_wec: Usd2025(1.0),
            capex_pto: Usd2025(2.0),
            capex_swro: Usd2025(4.0),
            opex_wec: Usd2025(8.0),
            opex_pto: Usd2025(16.0),
            opex_swro: Usd2025(32.0),
        };
        assert_eq!(lcoke(&c, 1.0, 1.0), 9.0);
        assert_eq!(lcof(&c, 1.0, 1.0), 27.0);
        assert_eq!(lcow(&c, 1.0, 1.0), 63.0);
    }
}
