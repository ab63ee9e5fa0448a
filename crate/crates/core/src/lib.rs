//! Finite-volume simulation of a two-dimensional heating plate.
//!
//! The plate `(0, L) × (0, H)` conducts heat with temperature-dependent
//! capacity and conductivity. Heating elements on the underside inject flux
//! through spatially shaped supports, sensors on the topside report weighted
//! averages, and every other face loses heat by convection and radiation.
//! A one-sided proportional controller closes the loop.

pub mod actuation;
pub mod config;
pub mod control;
pub mod error;
pub mod grid;
pub mod io;
pub mod material;
pub mod scenario;
pub mod solver;

pub use actuation::{
    characterization_value, uniform_partitions, ActuatorBank, BankSpec, BoundaryPartition, Characterization, Device,
    SensorBank,
};
pub use config::{scenario_preset, InitialCondition, Model, Scenario, SimulationConfig};
pub use control::{ControllerConfig, Gains};
pub use error::{ConfigError, Divergence, ModelError};
pub use grid::{Boundary, CellIndex, Grid, PlateGeometry};
pub use io::{config_to_json, load_config, render_heatmap, write_field_csv, write_signals_csv};
pub use material::{SurfaceExchange, ThermalMaterial};
pub use scenario::{
    averaged_signals, initial_field, row_statistics, run_simulation, topside_statistics, AveragedSignals,
    DivergenceInfo, SignalLog, Simulation, SimulationResult, TopsideStatistics,
};
pub use solver::{
    assemble_rhs, boundary_fluxes, step_forward_euler, weighted_rhs_sum, BoundaryFluxes, RhsVector, TemperatureField,
};
