//! Co-design models for wave-driven reverse-osmosis desalination.
//!
//! A bottom-hinged surge flap drives a hydraulic piston that feeds a
//! single-stage seawater RO plant. The crate provides the disciplinary
//! models (geometry, hydrodynamics, waves, desalination, hydraulics, coupled
//! time-domain dynamics, economics), a binary genetic algorithm with the
//! multidisciplinary and sequential workflows built on it, and sea-state
//! clustering of buoy records.
//!
//! The physics is generic over the scalar type through [`Real`]; the
//! aliases below fix it to `f64` (or `f32` where noted) for everyday use.

pub mod desal;
pub mod econ;
pub mod error;
pub mod geometry;
pub mod hydraulics;
pub mod hydro;
pub mod num;
pub mod optimizer;
pub mod params;
pub mod pipeline;
pub mod seastates;
pub mod sysdyn;
pub mod waves;

pub use error::{Error, Result};
pub use geometry::DesignVector;
pub use num::Real;
pub use params::ParameterSet;

pub type WecGeometry = geometry::WecGeometry<f64>;
pub type HydroCoefficients = hydro::HydroCoefficients<f64>;
pub type RadiationKernel = hydro::RadiationKernel<f64>;
pub type SeaState = waves::SeaState<f64>;
pub type WaveRealization = waves::WaveRealization<f64>;
pub type SeawaterSpec = desal::SeawaterSpec<f64>;
pub type MembraneSpec = desal::MembraneSpec<f64>;
pub type DesalPlant = desal::DesalPlant<f64>;
pub type HydraulicState = hydraulics::HydraulicState<f64>;
pub type PistonConfig = hydraulics::PistonConfig<f64>;
pub type MechanismConfig = sysdyn::MechanismConfig<f64>;
pub type SimConfig = sysdyn::SimConfig<f64>;
pub type SimulationResult = sysdyn::SimulationResult<f64>;

pub type WecGeometryF32 = geometry::WecGeometry<f32>;
pub type HydroCoefficientsF32 = hydro::HydroCoefficients<f32>;
pub type RadiationKernelF32 = hydro::RadiationKernel<f32>;
pub type SimulationResultF32 = sysdyn::SimulationResult<f32>;
