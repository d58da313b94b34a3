//! Typed parameter registry.
//!
//! Every fixed model symbol lives in one table with its dimension, the unit
//! it is written in on disk, a default, and an admissible range. Values are
//! held in SI inside [`ParameterSet`]; files carry `{"value", "unit"}` pairs
//! so unit mistakes are caught at load time.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const PARAMS_SCHEMA: &str = "wavedesal.params/1";

/// Physical dimension of a parameter, used to validate and convert units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Length,
    Area,
    Volume,
    Mass,
    Pressure,
    FlowRate,
    Time,
    AngularFrequency,
    Temperature,
    Density,
    Acceleration,
    Fraction,
    Money,
    MoneyPerYear,
    Concentration,
    MolarMass,
    GasConstant,
    Permeability,
    Angle,
    Dimensionless,
    MassPerCubicInch,
    MoneyPerCubicInch,
}

impl Dim {
    /// Accepted unit spellings and their factor to the canonical unit.
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dim::Length => &[("m", 1.0), ("mm", 1e-3), ("km", 1e3)],
            Dim::Area => &[("m^2", 1.0), ("m2", 1.0)],
            Dim::Volume => &[("m^3", 1.0), ("m3", 1.0), ("L", 1e-3)],
            Dim::Mass => &[("kg", 1.0), ("t", 1e3)],
            Dim::Pressure => &[("Pa", 1.0), ("kPa", 1e3), ("MPa", 1e6), ("GPa", 1e9)],
            Dim::FlowRate => &[
                ("m^3/s", 1.0),
                ("m3/s", 1.0),
                ("m^3/day", 1.0 / 86_400.0),
                ("m3/day", 1.0 / 86_400.0),
            ],
            Dim::Time => &[("s", 1.0), ("h", 3600.0)],
            Dim::AngularFrequency => &[("rad/s", 1.0)],
            Dim::Temperature => &[("K", 1.0)],
            Dim::Density => &[("kg/m^3", 1.0), ("kg/m3", 1.0)],
            Dim::Acceleration => &[("m/s^2", 1.0), ("m/s2", 1.0)],
            Dim::Fraction => &[("-", 1.0), ("%", 0.01)],
            Dim::Money => &[("USD", 1.0)],
            Dim::MoneyPerYear => &[("USD/yr", 1.0)],
            // mg/L == g/m^3, which pairs with g/mol to give mol/m^3
            Dim::Concentration => &[("mg/L", 1.0), ("g/m^3", 1.0)],
            Dim::MolarMass => &[("g/mol", 1.0)],
            Dim::GasConstant => &[("J/(K*mol)", 1.0)],
            Dim::Permeability => &[("m^3/(N*s)", 1.0), ("m/(Pa*s)", 1.0)],
            Dim::Angle => &[("deg", 1.0)],
            Dim::Dimensionless => &[("-", 1.0)],
            Dim::MassPerCubicInch => &[("lb/in^3", 1.0)],
            Dim::MoneyPerCubicInch => &[("USD/in^3", 1.0)],
        }
    }

    fn factor(self, unit: &str) -> Option<f64> {
        self.units()
            .iter()
            .find(|(u, _)| *u == unit)
            .map(|&(_, f)| f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct General {
    pub gravity: f64,
    pub water_density: f64,
    pub distance_to_shore: f64,
    pub temperature: f64,
    pub water_depth: f64,
    pub wave_direction: f64,
    pub significant_wave_height: f64,
    pub peak_period: f64,
    pub fixed_charge_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Swro {
    pub feed_tds: f64,
    pub permeate_tds: f64,
    pub salt_molar_mass: f64,
    pub ions_per_molecule: f64,
    pub gas_constant: f64,
    pub water_permeability: f64,
    pub recovery_ratio: f64,
    pub element_area: f64,
    /// Single-element permeate production, m^3/s.
    pub element_flow: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wec {
    pub height: f64,
    pub draft: f64,
    pub cg_draft_factor: f64,
    pub unit_inertia: f64,
    pub rm5_surface_area: f64,
    pub rm5_flap_cost: f64,
    pub rm5_base_cost: f64,
    pub rm5_bearings_cost: f64,
    pub rm5_mooring_cost: f64,
    pub rm5_monitoring_cost: f64,
    pub rm5_marine_operations_cost: f64,
    pub rm5_shore_operations_cost: f64,
    pub rm5_parts_cost: f64,
    pub rm5_consumables_cost: f64,
    pub rm5_insurance_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pto {
    pub l2: f64,
    pub l3: f64,
    pub max_stroke: f64,
    pub ss316_cost: f64,
    pub ss316_density: f64,
    pub ss316_yield_strength: f64,
    pub ss316_youngs_modulus: f64,
    pub cylinder_factor_of_safety: f64,
    pub rod_factor_of_safety: f64,
    pub labor_factor: f64,
    pub end_cap_attachment_factor: f64,
    pub joint_efficiency: f64,
    pub accumulator_cost_coefficient: f64,
    pub accumulator_cost_exponent: f64,
    pub cracking_pressure: f64,
    pub stroke_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hydraulics {
    /// Relief conductance as a multiple of the membrane conductance `1/R_m`.
    pub relief_conductance_factor: f64,
    /// Maximum circuit pressure as a multiple of the relief set point.
    pub max_pressure_factor: f64,
    pub atmospheric_pressure: f64,
    pub vapor_pressure: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Solver {
    pub omega_min: f64,
    pub omega_step: f64,
    pub omega_max: f64,
    pub time_step: f64,
    pub sim_time: f64,
    pub ramp_time: f64,
    pub wave_components: f64,
    pub kernel_duration: f64,
    pub availability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Economics {
    pub inflation_factor: f64,
    pub tds_curve_low: f64,
    pub tds_curve_high: f64,
}

/// Every fixed symbol of the model, in SI (plus the two imperial steel
/// constants, which the cylinder cost model consumes in inches).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub general: General,
    pub swro: Swro,
    pub wec: Wec,
    pub pto: Pto,
    pub hydraulics: Hydraulics,
    pub solver: Solver,
    pub economics: Economics,
}

/// One row of the registry.
pub struct ParamSpec {
    pub key: &'static str,
    pub dim: Dim,
    /// Unit used when writing files and echoing values in reports.
    pub unit: &'static str,
    /// Default in `unit`.
    pub default: f64,
    /// Admissible closed range in canonical units.
    pub range: (f64, f64),
    get: fn(&ParameterSet) -> f64,
    set: fn(&mut ParameterSet, f64),
}

macro_rules! registry {
    ($( $sec:ident . $field:ident : $dim:ident, $unit:literal, $default:expr, [$lo:expr, $hi:expr]; )*) => {
        pub static REGISTRY: &[ParamSpec] = &[
            $(ParamSpec {
                key: concat!(stringify!($sec), ".", stringify!($field)),
                dim: Dim::$dim,
                unit: $unit,
                default: $default,
                range: ($lo, $hi),
                get: |p| p.$sec.$field,
                set: |p, v| p.$sec.$field = v,
            },)*
        ];
    };
}

const INF: f64 = f64::INFINITY;
const TINY: f64 = f64::MIN_POSITIVE;

registry! {
    general.gravity: Acceleration, "m/s^2", 9.81, [TINY, INF];
    general.water_density: Density, "kg/m^3", 1025.0, [TINY, INF];
    general.distance_to_shore: Length, "m", 500.0, [0.0, INF];
    general.temperature: Temperature, "K", 298.15, [TINY, INF];
    general.water_depth: Length, "m", 12.0, [TINY, INF];
    general.wave_direction: Angle, "deg", 0.0, [-360.0, 360.0];
    general.significant_wave_height: Length, "m", 2.64, [TINY, INF];
    general.peak_period: Time, "s", 9.86, [TINY, INF];
    general.fixed_charge_rate: Fraction, "%", 10.8, [0.0, 1.0];

    swro.feed_tds: Concentration, "mg/L", 35946.0, [0.0, INF];
    swro.permeate_tds: Concentration, "mg/L", 150.0, [0.0, INF];
    swro.salt_molar_mass: MolarMass, "g/mol", 58.44, [TINY, INF];
    swro.ions_per_molecule: Dimensionless, "-", 2.0, [1.0, INF];
    swro.gas_constant: GasConstant, "J/(K*mol)", 8.314, [TINY, INF];
    swro.water_permeability: Permeability, "m^3/(N*s)", 2.57e-12, [TINY, INF];
    swro.recovery_ratio: Fraction, "%", 44.2, [TINY, 0.999_999];
    swro.element_area: Area, "m^2", 35.0, [TINY, INF];
    swro.element_flow: FlowRate, "m^3/day", 24.6, [TINY, INF];

    wec.height: Length, "m", 9.1, [TINY, INF];
    wec.draft: Length, "m", 9.0, [TINY, INF];
    wec.cg_draft_factor: Dimensionless, "-", -0.7778, [-1.0, 0.0];
    wec.unit_inertia: Area, "m^2", 14.57, [0.0, INF];
    wec.rm5_surface_area: Area, "m^2", 1214.0, [TINY, INF];
    wec.rm5_flap_cost: Money, "USD", 3_364_648.63, [0.0, INF];
    wec.rm5_base_cost: Money, "USD", 1_706_415.27, [0.0, INF];
    wec.rm5_bearings_cost: Money, "USD", 17_420.34, [0.0, INF];
    wec.rm5_mooring_cost: Money, "USD", 997_819.2, [0.0, INF];
    wec.rm5_monitoring_cost: MoneyPerYear, "USD/yr", 616_480.27, [0.0, INF];
    wec.rm5_marine_operations_cost: MoneyPerYear, "USD/yr", 101_387.23, [0.0, INF];
    wec.rm5_shore_operations_cost: MoneyPerYear, "USD/yr", 347_280.29, [0.0, INF];
    wec.rm5_parts_cost: MoneyPerYear, "USD/yr", 86_237.2, [0.0, INF];
    wec.rm5_consumables_cost: MoneyPerYear, "USD/yr", 17_480.19, [0.0, INF];
    wec.rm5_insurance_rate: Fraction, "%", 2.0, [0.0, 1.0];

    pto.l2: Length, "m", 4.7, [0.0, INF];
    pto.l3: Length, "m", 0.0, [-INF, INF];
    pto.max_stroke: Length, "m", 20.0, [TINY, INF];
    pto.ss316_cost: MoneyPerCubicInch, "USD/in^3", 2.00, [0.0, INF];
    pto.ss316_density: MassPerCubicInch, "lb/in^3", 0.29, [TINY, INF];
    pto.ss316_yield_strength: Pressure, "MPa", 206.0, [TINY, INF];
    pto.ss316_youngs_modulus: Pressure, "GPa", 164.0, [TINY, INF];
    pto.cylinder_factor_of_safety: Dimensionless, "-", 6.0, [1.0, INF];
    pto.rod_factor_of_safety: Dimensionless, "-", 1.5, [1.0, INF];
    pto.labor_factor: Dimensionless, "-", 0.7, [0.0, INF];
    pto.end_cap_attachment_factor: Dimensionless, "-", 0.3, [TINY, INF];
    pto.joint_efficiency: Dimensionless, "-", 0.8, [TINY, 1.0];
    pto.accumulator_cost_coefficient: Money, "USD", 1.621e5, [0.0, INF];
    pto.accumulator_cost_exponent: Dimensionless, "-", 0.986, [0.0, INF];
    pto.cracking_pressure: Pressure, "MPa", 0.05, [0.0, INF];
    pto.stroke_margin: Dimensionless, "-", 1.1, [1.0, INF];

    hydraulics.relief_conductance_factor: Dimensionless, "-", 100.0, [TINY, INF];
    hydraulics.max_pressure_factor: Dimensionless, "-", 1.5, [1.0, INF];
    hydraulics.atmospheric_pressure: Pressure, "kPa", 101.325, [0.0, INF];
    hydraulics.vapor_pressure: Pressure, "kPa", 3.17, [0.0, INF];

    solver.omega_min: AngularFrequency, "rad/s", 0.2, [TINY, INF];
    solver.omega_step: AngularFrequency, "rad/s", 0.14, [TINY, INF];
    solver.omega_max: AngularFrequency, "rad/s", 3.0, [TINY, INF];
    solver.time_step: Time, "s", 0.1, [TINY, INF];
    solver.sim_time: Time, "s", 300.0, [TINY, INF];
    solver.ramp_time: Time, "s", 10.0, [0.0, INF];
    solver.wave_components: Dimensionless, "-", 200.0, [2.0, 100_000.0];
    solver.kernel_duration: Time, "s", 20.0, [TINY, INF];
    solver.availability: Fraction, "-", 1.0, [0.0, 1.0];

    economics.inflation_factor: Dimensionless, "-", 1.26, [TINY, INF];
    economics.tds_curve_low: Concentration, "mg/L", 35000.0, [0.0, INF];
    economics.tds_curve_high: Concentration, "mg/L", 46000.0, [0.0, INF];
}

fn spec(key: &str) -> Option<&'static ParamSpec> {
    REGISTRY.iter().find(|s| s.key == key)
}

/// Resolves a full `section.name` key or an unambiguous bare `name`.
fn resolve(key: &str) -> Result<&'static ParamSpec> {
    if let Some(s) = spec(key) {
        return Ok(s);
    }
    let mut hits = REGISTRY
        .iter()
        .filter(|s| s.key.rsplit('.').next() == Some(key));
    match (hits.next(), hits.next()) {
        (Some(s), None) => Ok(s),
        (Some(_), Some(_)) => Err(Error::Parameter {
            key: key.to_owned(),
            reason: "ambiguous short key; use section.name".into(),
        }),
        _ => Err(Error::Parameter {
            key: key.to_owned(),
            reason: "unknown key".into(),
        }),
    }
}

/// Parses `{"value": x, "unit": "u"}` or a bare number (taken in the
/// registry unit) into a canonical value.
fn parse_entry(spec: &ParamSpec, raw: &Value) -> Result<f64> {
    let err = |reason: String| Error::Parameter {
        key: spec.key.to_owned(),
        reason,
    };
    let (value, unit) = match raw {
        Value::Number(n) => (n.as_f64(), spec.unit.to_owned()),
        Value::Object(obj) => {
            if let Some(extra) = obj.keys().find(|k| *k != "value" && *k != "unit") {
                return Err(err(format!("unexpected field `{extra}`")));
            }
            let unit = match obj.get("unit") {
                Some(Value::String(u)) => u.clone(),
                Some(_) => return Err(err("unit must be a string".into())),
                None => spec.unit.to_owned(),
            };
            (obj.get("value").and_then(Value::as_f64), unit)
        }
        _ => (None, String::new()),
    };
    let value = value.ok_or_else(|| err("expected a number or {value, unit}".into()))?;
    let factor = spec.dim.factor(&unit).ok_or_else(|| {
        let accepted: Vec<_> = spec.dim.units().iter().map(|(u, _)| *u).collect();
        err(format!("unit `{unit}` mismatch; expected one of {accepted:?}"))
    })?;
    let si = value * factor;
    let (lo, hi) = spec.range;
    if !si.is_finite() || si < lo || si > hi {
        return Err(err(format!("value {value} {unit} outside admissible range")));
    }
    Ok(si)
}

impl Default for ParameterSet {
    fn default() -> Self {
        let mut p = ParameterSet::zeroed();
        for s in REGISTRY {
            let f = s.dim.factor(s.unit).expect("registry unit is valid");
            (s.set)(&mut p, s.default * f);
        }
        p
    }
}

impl ParameterSet {
    fn zeroed() -> Self {
        // Every field is overwritten from the registry.
        serde_json::from_value(zero_tree()).expect("zero tree matches struct layout")
    }

    /// Parses a complete parameter file. Every registry key must be present.
    pub fn from_json(text: &str) -> Result<Self> {
        let entries = parse_document(text)?;
        let mut p = ParameterSet::default();
        let mut seen = std::collections::BTreeSet::new();
        for (key, raw) in &entries {
            let s = resolve(key)?;
            if !seen.insert(s.key) {
                return Err(Error::Parameter {
                    key: key.clone(),
                    reason: "duplicate key".into(),
                });
            }
            (s.set)(&mut p, parse_entry(s, raw)?);
        }
        if let Some(missing) = REGISTRY.iter().find(|s| !seen.contains(s.key)) {
            return Err(Error::Parameter {
                key: missing.key.to_owned(),
                reason: "missing key".into(),
            });
        }
        p.validate()?;
        Ok(p)
    }

    /// Applies a partial document on top of `self`, field by field.
    pub fn with_overrides(mut self, text: &str) -> Result<Self> {
        for (key, raw) in parse_document(text)? {
            let s = resolve(&key)?;
            (s.set)(&mut self, parse_entry(s, &raw)?);
        }
        self.validate()?;
        Ok(self)
    }

    /// Loads `path`, or the built-in defaults when `path` is `None` or the
    /// literal `default`.
    pub fn load(path: Option<&std::path::Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) if p.as_os_str() == "default" => Ok(Self::default()),
            Some(p) => Self::from_json(&std::fs::read_to_string(p)?),
        }
    }

    /// Cross-field checks that a single range cannot express.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: &str| {
            Err(Error::Parameter {
                key: key.to_owned(),
                reason: reason.to_owned(),
            })
        };
        if self.swro.permeate_tds >= self.swro.feed_tds {
            return bad("swro.permeate_tds", "must be below feed TDS");
        }
        if self.solver.omega_max <= self.solver.omega_min {
            return bad("solver.omega_max", "must exceed omega_min");
        }
        if self.solver.ramp_time >= self.solver.sim_time {
            return bad("solver.ramp_time", "must be shorter than sim_time");
        }
        if self.economics.tds_curve_high <= self.economics.tds_curve_low {
            return bad("economics.tds_curve_high", "must exceed tds_curve_low");
        }
        if self.wec.draft > self.general.water_depth {
            return bad("wec.draft", "exceeds water depth");
        }
        Ok(())
    }

    /// Canonical value of `key` in SI.
    pub fn get(&self, key: &str) -> Option<f64> {
        spec(key).map(|s| (s.get)(self))
    }

    /// Values echoed in their file units, keyed by registry key.
    pub fn display_entries(&self) -> BTreeMap<&'static str, (f64, &'static str)> {
        REGISTRY
            .iter()
            .map(|s| {
                let f = s.dim.factor(s.unit).expect("registry unit is valid");
                (s.key, ((s.get)(self) / f, s.unit))
            })
            .collect()
    }

    /// The file representation; `from_json(to_json(p)) == p`.
    pub fn to_json(&self) -> String {
        let mut params = Map::new();
        for (key, (value, unit)) in self.display_entries() {
            params.insert(
                key.to_owned(),
                serde_json::json!({ "value": value, "unit": unit }),
            );
        }
        let doc = serde_json::json!({ "schema": PARAMS_SCHEMA, "parameters": params });
        serde_json::to_string_pretty(&doc).expect("parameter document serializes")
    }

    /// SHA-256 over the canonical file representation.
    pub fn checksum(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// Frequencies of the hydrodynamic grid `omega_min : omega_step : omega_max`.
    pub fn frequency_grid(&self) -> Vec<f64> {
        let s = &self.solver;
        let n = ((s.omega_max - s.omega_min) / s.omega_step + 1e-9).floor() as usize;
        (0..=n).map(|i| s.omega_min + i as f64 * s.omega_step).collect()
    }
}

fn parse_document(text: &str) -> Result<Vec<(String, Value)>> {
    let doc: Value = serde_json::from_str(text)?;
    let obj = doc.as_object().ok_or_else(|| Error::Parameter {
        key: "<root>".into(),
        reason: "expected a JSON object".into(),
    })?;
    if let Some(schema) = obj.get("schema") {
        if schema.as_str() != Some(PARAMS_SCHEMA) {
            return Err(Error::Parameter {
                key: "schema".into(),
                reason: format!("unsupported schema {schema}"),
            });
        }
    }
    let table = match obj.get("parameters") {
        Some(Value::Object(t)) => t,
        Some(_) => {
            return Err(Error::Parameter {
                key: "parameters".into(),
                reason: "expected an object".into(),
            })
        }
        // bare override documents: {"depth": 3}
        None => obj,
    };
    Ok(table
        .iter()
        .filter(|(k, _)| k.as_str() != "schema")
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect())
}

fn zero_tree() -> Value {
    let mut root = Map::new();
    for s in REGISTRY {
        let (sec, field) = s.key.split_once('.').expect("registry keys are dotted");
        root.entry(sec.to_owned())
            .or_insert_with(|| Value::Object(Map::new()))
            .as_object_mut()
            .expect("section is an object")
            .insert(field.to_owned(), Value::from(0.0));
    }
    Value::Object(root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_tables() {
        let p = ParameterSet::default();
        assert!((p.general.fixed_charge_rate - 0.108).abs() < 1e-15);
        assert_eq!(p.pto.l2, 4.7);
        assert_eq!(p.pto.l3, 0.0);
        assert_eq!(p.general.water_depth, 12.0);
        assert!((p.swro.recovery_ratio - 0.442).abs() < 1e-15);
        assert!((p.swro.element_flow - 24.6 / 86_400.0).abs() < 1e-18);
        assert_eq!(p.pto.ss316_yield_strength, 206e6);
        assert_eq!(p.pto.ss316_youngs_modulus, 164e9);
        assert_eq!(p.pto.cracking_pressure, 0.05e6);
    }

    #[test]
    fn frequency_grid_spans_table() {
        let w = ParameterSet::default().frequency_grid();
        assert_eq!(w.len(), 21);
        assert!((w[0] - 0.2).abs() < 1e-12);
        assert!((w[1] - 0.34).abs() < 1e-12);
        assert!((w[20] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn negative_depth_rejected() {
        let err = ParameterSet::default()
            .with_overrides(r#"{"water_depth": -1}"#)
            .unwrap_err();
        assert!(err.to_string().contains("general.water_depth"), "{err}");
    }

    #[test]
    fn unit_mismatch_names_key() {
        let err = ParameterSet::default()
            .with_overrides(r#"{"parameters": {"pto.cracking_pressure": {"value": 1, "unit": "m"}}}"#)
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("pto.cracking_pressure") && msg.contains("mismatch"), "{msg}");
    }

    #[test]
    fn unit_conversion_on_override() {
        let p = ParameterSet::default()
            .with_overrides(r#"{"pto.cracking_pressure": {"value": 75, "unit": "kPa"}}"#)
            .unwrap();
        assert_eq!(p.pto.cracking_pressure, 75e3);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = ParameterSet::default()
            .with_overrides(r#"{"general.flux_capacitor": 1}"#)
            .unwrap_err();
        assert!(err.to_string().contains("flux_capacitor"));
    }

    #[test]
    fn partial_file_rejected() {
        let err = ParameterSet::from_json(
            r#"{"schema": "wavedesal.params/1", "parameters": {"general.gravity": 9.81}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("missing key"));
    }

    #[test]
    fn round_trip_identity() {
        let p = ParameterSet::default()
            .with_overrides(r#"{"wec.height": 10.5, "solver.sim_time": 120}"#)
            .unwrap();
        let q = ParameterSet::from_json(&p.to_json()).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.checksum(), q.checksum());
    }

    #[test]
    fn short_keys_must_be_unambiguous() {
        // `l2` is unique; every section key is fully qualified otherwise.
        assert!(ParameterSet::default().with_overrides(r#"{"l2": 5.0}"#).is_ok());
    }
}
