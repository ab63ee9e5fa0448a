//! Simulation configuration, reference presets and validation.

use serde::{Deserialize, Serialize};

use crate::actuation::{ActuatorBank, BankSpec, SensorBank};
use crate::control::{ControllerConfig, Gains};
use crate::error::ModelError;
use crate::grid::{Grid, PlateGeometry};
use crate::material::{SurfaceExchange, ThermalMaterial, DEFAULT_THETA_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "H")]
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "J")]
    pub cols: usize,
    #[serde(rename = "K")]
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    pub kp: Gains,
    pub y_ref: f64,
    pub u_min: f64,
    /// `null` means unbounded.
    pub u_max: Option<f64>,
}

/// `θ(0, x) = base + a0·cos(2π·a1·x1/L)·cos(2π·a2·x2/H)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    pub base: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_stride: usize,
    pub signal_stride: usize,
}

impl TimeSpec {
    /// `round(t_final / dt)`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelOptions {
    /// Add convection/radiation losses on the underside as well.
    pub underside_emission: bool,
    /// Upper end of the temperature range on which the material laws must stay positive.
    pub theta_cap: f64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            underside_emission: false,
            theta_cap: DEFAULT_THETA_CAP,
        }
    }
}

/// Everything needed to run one closed-loop simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub geometry: GeometrySpec,
    pub grid: GridSpec,
    pub material: ThermalMaterial,
    pub exchange: SurfaceExchange,
    pub actuators: BankSpec,
    pub sensors: BankSpec,
    pub controller: ControllerSpec,
    pub initial: InitialCondition,
    pub time: TimeSpec,
    pub options: ModelOptions,
}

/// The two reference scenarios: indicator-shaped or peaked heating elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Nominal = 1,
    Realistic = 2,
}

impl Scenario {
    pub fn from_number(which: u32) -> Option<Self> {
        match which {
            1 => Some(Scenario::Nominal),
            2 => Some(Scenario::Realistic),
            _ => None,
        }
    }
}

/// Preset for one of the reference scenarios. Both share the plate, grid,
/// timing, sensors and controller; they differ only in actuator shape.
pub fn scenario_preset(which: Scenario) -> SimulationConfig {
    let actuators = match which {
        Scenario::Nominal => BankSpec::nominal_actuators(),
        Scenario::Realistic => BankSpec::realistic_actuators(),
    };
    SimulationConfig {
        geometry: GeometrySpec {
            length: 0.30,
            height: 0.01,
        },
        grid: GridSpec { cols: 100, rows: 40 },
        material: ThermalMaterial::steel_plate(),
        exchange: SurfaceExchange::ambient_air(),
        actuators,
        sensors: BankSpec::reference_sensors(),
        controller: ControllerSpec {
            kp: Gains::Uniform(1e4),
            y_ref: 400.0,
            u_min: 0.0,
            u_max: None,
        },
        initial: InitialCondition {
            base: 300.0,
            a0: 3.0,
            a1: 10.0,
            a2: 5.0,
        },
        time: TimeSpec {
            dt: 1e-3,
            t_final: 10.0,
            snapshot_stride: 1000,
            signal_stride: 1,
        },
        options: ModelOptions::default(),
    }
}

impl Default for SimulationConfig {
    fn default() -> Self {
        scenario_preset(Scenario::Nominal)
    }
}

/// Validated, ready-to-run model derived from a [`SimulationConfig`].
#[derive(Debug, Clone)]
pub struct Model {
    pub grid: Grid,
    pub material: ThermalMaterial,
    pub exchange: SurfaceExchange,
    pub actuators: ActuatorBank,
    pub sensors: SensorBank,
    pub controller: ControllerConfig,
    pub underside_emission: bool,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.build().map(|_| ())
    }

    /// Checks every section and builds the grid, banks and controller.
    /// Error paths name the offending field, e.g. `grid.J`.
    pub fn build(&self) -> Result<Model, ModelError> {
        let geometry = PlateGeometry::new(self.geometry.length, self.geometry.height)?;
        let grid = Grid::new(geometry, self.grid.cols, self.grid.rows)?;

        let cap = self.options.theta_cap;
        if !(cap.is_finite() && cap > 0.0) {
            return Err(ModelError::invalid("options.theta_cap", "must be > 0"));
        }
        self.material.validate(cap)?;
        self.exchange.validate()?;

        let actuators = ActuatorBank::from_spec(&grid, &self.actuators).map_err(|e| e.within("actuators"))?;
        let sensors = SensorBank::from_spec(&grid, &self.sensors).map_err(|e| e.within("sensors"))?;
        if actuators.len() != sensors.len() {
            return Err(ModelError::invalid(
                "sensors.count",
                format!("must equal actuators.count ({})", actuators.len()),
            ));
        }
        let kp = self.controller.kp.expand(actuators.len())?;
        let controller =
            ControllerConfig::new(kp, self.controller.y_ref, self.controller.u_min, self.controller.u_max)?;

        let ic = &self.initial;
        for (name, v) in [("base", ic.base), ("a0", ic.a0), ("a1", ic.a1), ("a2", ic.a2)] {
            if !v.is_finite() {
                return Err(ModelError::invalid(format!("initial.{name}"), "must be finite"));
            }
        }
        if ic.base - ic.a0.abs() < 0.0 {
            return Err(ModelError::invalid("initial.a0", "base - |a0| must be >= 0"));
        }

        let t = &self.time;
        if !(t.dt.is_finite() && t.dt > 0.0) {
            return Err(ModelError::invalid("time.dt", "must be > 0"));
        }
        if !(t.t_final.is_finite() && t.t_final > 0.0) {
            return Err(ModelError::invalid("time.t_final", "must be > 0"));
        }
        if t.steps() == 0 {
            return Err(ModelError::invalid("time.t_final", "must span at least one step"));
        }
        if t.snapshot_stride == 0 {
            return Err(ModelError::invalid("time.snapshot_stride", "must be >= 1"));
        }
        if t.signal_stride == 0 {
            return Err(ModelError::invalid("time.signal_stride", "must be >= 1"));
        }

        Ok(Model {
            grid,
            material: self.material,
            exchange: self.exchange,
            actuators,
            sensors,
            controller,
            underside_emission: self.options.underside_emission,
        })
    }
}

impl ModelError {
    pub(crate) fn within(self, section: &str) -> ModelError {
        match self {
            ModelError::Invalid { path, constraint } => ModelError::Invalid {
                path: format!("{section}.{path}"),
                constraint,
            },
            other => ModelError::Invalid {
                path: section.to_string(),
                constraint: other.to_string(),
            },
        }
    }
}
