use proptest::prelude::*;
use wavedesal_core::desal::{size_plant, MembraneSpec, SeawaterSpec};
use wavedesal_core::econ::{
    accumulator_cost, area_scaled_cost, cylinder_cost, size_cylinder, swro_cost, wec_cost, Stabilization, SwroCurves,
    SwroFlows, SwroOptions, WecReferenceCosts,
};
use wavedesal_core::geometry::build_geometry;
use wavedesal_core::{DesignVector, ParameterSet};

#[test]
fn wec_cost_at_reference_area_is_reference_total() {
    let p = ParameterSet::default();
    let mut geom = build_geometry(&DesignVector::nominal(), &p).unwrap();
    geom.wetted_area = p.wec.rm5_surface_area;
    let (capex, opex) = wec_cost(&geom, &p);
    let w = &p.wec;
    let capex_ref = w.rm5_flap_cost + w.rm5_base_cost + w.rm5_bearings_cost + w.rm5_mooring_cost;
    assert_eq!(capex.0, capex_ref);
    let r = WecReferenceCosts::from_params(&p);
    assert_eq!(opex.0, r.opex_c1 + r.opex_c2);
}

#[test]
fn accumulator_pin() {
    let c = accumulator_cost(4.0, &ParameterSet::default()).0;
    assert!((c - 636_000.0).abs() <= 100.0, "{c}");
}

#[test]
fn every_curve_returns_its_coefficient_at_unity() {
    let curves = SwroCurves::bundled();
    for c in curves.capex.iter().chain(&curves.opex) {
        assert_eq!(c.eval(1.0), c.a, "{}", c.id);
    }
}

#[test]
fn cylinder_matches_hand_sizing() {
    // ASME thin-wall shell and flat head, evaluated independently
    let p = ParameterSet::default();
    let (ap, stroke, pd) = (0.26, 10.0, 6.20e6);
    let s = size_cylinder(ap, stroke, pd, &p).unwrap();
    let sy = p.pto.ss316_yield_strength / p.pto.cylinder_factor_of_safety * p.pto.joint_efficiency;
    let radius = (ap / std::f64::consts::PI).sqrt();
    assert!((s.wall - pd * radius / (sy - 0.6 * pd)).abs() < 1e-12);
    assert!((s.wall * 1e3 - 75.1).abs() <= 0.1, "{}", s.wall * 1e3);
    assert!((s.cap - 2.0 * radius * (0.3 * pd / sy).sqrt()).abs() < 1e-12);
    let cost = cylinder_cost(ap, stroke, pd, &p).unwrap().0;
    let expected = p.pto.ss316_cost * s.steel_volume / 0.0254f64.powi(3) * (1.0 + p.pto.labor_factor);
    assert!((cost - expected).abs() < 1e-6 * expected);
}

#[test]
fn calcite_option_changes_stabilization_only() {
    let p = ParameterSet::default();
    let plant = size_plant(3150.0, &SeawaterSpec::from_params(&p), &MembraneSpec::from_params(&p));
    let flows = SwroFlows::new(&plant, 5000.0, 2000.0);
    let curves = SwroCurves::bundled();
    let lime = swro_cost(&flows, &p, &curves, &SwroOptions::default()).unwrap();
    let options = SwroOptions { stabilization: Stabilization::Calcite, ..SwroOptions::default() };
    let calcite = swro_cost(&flows, &p, &curves, &options).unwrap();
    for (k, v) in &lime.items {
        if k != "stabilization" {
            assert_eq!(calcite.items[k], *v, "{k}");
        }
    }
    assert_ne!(calcite.items["stabilization"], lime.items["stabilization"]);
}

proptest! {
    #[test]
    fn area_scaling_is_nondecreasing(r in 0.001..20.0f64, dr in 0.0..5.0f64) {
        let p = ParameterSet::default();
        let c = WecReferenceCosts::from_params(&p);
        prop_assert!(area_scaled_cost(c.capex_c1, c.capex_c2, r + dr) >= area_scaled_cost(c.capex_c1, c.capex_c2, r));
        prop_assert!(area_scaled_cost(c.opex_c1, c.opex_c2, r + dr) >= area_scaled_cost(c.opex_c1, c.opex_c2, r));
    }

    #[test]
    fn pto_costs_increase_with_size(v in 0.01..6.0f64, ap in 0.1..1.0f64, stroke in 0.1..20.0f64, pd in 1e6..2e7f64, k in 1.01..2.0f64) {
        let p = ParameterSet::default();
        prop_assert!(accumulator_cost(v * k, &p).0 > accumulator_cost(v, &p).0);
        let base = cylinder_cost(ap, stroke, pd, &p).unwrap().0;
        prop_assert!(cylinder_cost(ap * k, stroke, pd, &p).unwrap().0 > base);
        prop_assert!(cylinder_cost(ap, stroke * k, pd, &p).unwrap().0 > base);
        prop_assert!(cylinder_cost(ap, stroke, pd * k, &p).unwrap().0 > base);
    }

    #[test]
    fn swro_costs_increase_with_capacity(q in 1000.0..9000.0f64, k in 1.01..1.1f64, util in 0.1..1.0f64) {
        let p = ParameterSet::default();
        let (sw, mem) = (SeawaterSpec::from_params(&p), MembraneSpec::from_params(&p));
        let curves = SwroCurves::bundled();
        let cost = |q: f64| {
            let plant = size_plant(q, &sw, &mem);
            let perm = util * plant.qpmax * 86_400.0;
            swro_cost(&SwroFlows::new(&plant, perm / plant.eta_ro, perm), &p, &curves, &SwroOptions::default()).unwrap()
        };
        let (a, b) = (cost(q), cost(q * k));
        prop_assert!(b.capex.0 > a.capex.0);
        prop_assert!(b.opex.0 > a.opex.0);
    }
}
