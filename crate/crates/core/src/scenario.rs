//! Closed-loop simulation: measure, control, apply fluxes, step.

use std::f64::consts::PI;

use log::warn;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::config::{InitialCondition, Model, SimulationConfig};
use crate::error::{Divergence, ModelError};
use crate::grid::{CellIndex, Grid};
use crate::solver::{
    assemble_rhs_into, step_forward_euler_in_place, update_boundary_fluxes, AssembleError, BoundaryFluxes,
    TemperatureField,
};

/// Samples the initial condition at every cell center.
pub fn initial_field(grid: &Grid, ic: &InitialCondition) -> TemperatureField {
    let geom = grid.geometry();
    let values = grid
        .cells()
        .map(|idx| {
            let (x1, x2) = grid.cell_center(idx);
            ic.base + ic.a0 * (2.0 * PI * ic.a1 * x1 / geom.length).cos() * (2.0 * PI * ic.a2 * x2 / geom.height).cos()
        })
        .collect();
    TemperatureField::new(values)
}

/// Sensor outputs and actuator inputs at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSample {
    pub outputs: Vec<f64>,
    pub inputs: Vec<f64>,
}

/// Stepwise driver around a validated [`Model`].
#[derive(Debug, Clone)]
pub struct Simulation {
    model: Model,
    field: TemperatureField,
    dt: f64,
    step: usize,
    fluxes: BoundaryFluxes,
    rates: Vec<f64>,
}

impl Simulation {
    pub fn new(model: Model, field: TemperatureField, dt: f64) -> Self {
        assert_eq!(field.len(), model.grid.len());
        assert!(dt > 0.0);
        let fluxes = BoundaryFluxes::zeros(&model.grid);
        let rates = vec![0.0; model.grid.len()];
        Simulation {
            model,
            field,
            dt,
            step: 0,
            fluxes,
            rates,
        }
    }

    pub fn from_config(cfg: &SimulationConfig) -> Result<Self, ModelError> {
        let model = cfg.build()?;
        let field = initial_field(&model.grid, &cfg.initial);
        Ok(Self::new(model, field, cfg.time.dt))
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn field(&self) -> &TemperatureField {
        &self.field
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    /// Current sensor outputs and the inputs the controller derives from them.
    pub fn sample(&self) -> LoopSample {
        let outputs = self.model.sensors.measure(&self.model.grid, self.field.as_slice());
        let inputs = self.model.controller.inputs(&outputs);
        LoopSample { outputs, inputs }
    }

    /// Advances one step holding `inputs` constant over it.
    pub fn advance_with(&mut self, inputs: &[f64]) -> Result<(), Divergence> {
        let m = &self.model;
        update_boundary_fluxes(
            &self.field,
            &m.grid,
            &m.exchange,
            &m.actuators,
            inputs,
            m.underside_emission,
            &mut self.fluxes,
        )
        .expect("dimensions fixed at construction");
        match assemble_rhs_into(&self.field, &m.grid, &m.material, &self.fluxes, &mut self.rates) {
            Ok(()) => {}
            Err(AssembleError::Divergence(d)) => return Err(d),
            Err(AssembleError::Model(e)) => unreachable!("dimensions fixed at construction: {e}"),
        }
        step_forward_euler_in_place(&mut self.field, &self.rates, self.dt, &m.grid)?;
        self.step += 1;
        Ok(())
    }

    /// Samples, applies the controller output for one step, and returns the sample.
    pub fn advance(&mut self) -> Result<LoopSample, Divergence> {
        let sample = self.sample();
        self.advance_with(&sample.inputs)?;
        Ok(sample)
    }

    /// Rates and fluxes used by the most recent step.
    pub fn last_rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn last_fluxes(&self) -> &BoundaryFluxes {
        &self.fluxes
    }
}

/// Per-channel input and output history.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SignalLog {
    pub times: Vec<f64>,
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
}

impl SignalLog {
    fn push(&mut self, t: f64, sample: &LoopSample) {
        self.times.push(t);
        self.inputs.push(sample.inputs.clone());
        self.outputs.push(sample.outputs.clone());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Where and when a run blew up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceInfo {
    /// Index of the step whose result was invalid (1-based count of attempted steps).
    pub step: usize,
    pub time: f64,
    pub cell: CellIndex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub grid: Grid,
    /// Last valid field; on divergence, the field before the failing step.
    pub final_field: TemperatureField,
    pub snapshots: Vec<(f64, TemperatureField)>,
    pub signals: SignalLog,
    pub divergence: Option<DivergenceInfo>,
}

impl SimulationResult {
    pub fn diverged(&self) -> bool {
        self.divergence.is_some()
    }
}

/// Runs the closed loop for `round(t_final / dt)` steps.
///
/// Signals are logged every `signal_stride` steps and at the final instant;
/// snapshots every `snapshot_stride` steps starting at `t = 0`. A divergence
/// stops the loop and returns the partial logs.
pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationResult, ModelError> {
    let mut sim = Simulation::from_config(cfg)?;
    let grid = sim.model().grid;
    let material = sim.model().material;

    let limit = grid.stability_limit(&material, cfg.initial.base);
    if cfg.time.dt > limit {
        warn!(
            "dt = {} exceeds the explicit stability estimate {:.4e} s at {} K",
            cfg.time.dt, limit, cfg.initial.base
        );
    }
    let steps = cfg.time.steps();
    if ((steps as f64) * cfg.time.dt - cfg.time.t_final).abs() > 1e-9 * cfg.time.t_final {
        warn!(
            "t_final = {} is not a multiple of dt = {}; running {steps} steps",
            cfg.time.t_final, cfg.time.dt
        );
    }

    let mut signals = SignalLog::default();
    let mut snapshots = Vec::new();
    let mut divergence = None;

    for n in 0..=steps {
        let t = sim.time();
        if n % cfg.time.snapshot_stride == 0 {
            snapshots.push((t, sim.field().clone()));
        }
        let sample = sim.sample();
        if n % cfg.time.signal_stride == 0 || n == steps {
            signals.push(t, &sample);
        }
        if n == steps {
            break;
        }
        let before = sim.field().clone();
        if let Err(d) = sim.advance_with(&sample.inputs) {
            divergence = Some(DivergenceInfo {
                step: n + 1,
                time: (n + 1) as f64 * cfg.time.dt,
                cell: d.cell,
            });
            return Ok(SimulationResult {
                grid,
                final_field: before,
                snapshots,
                signals,
                divergence,
            });
        }
    }

    Ok(SimulationResult {
        grid,
        final_field: sim.field().clone(),
        snapshots,
        signals,
        divergence,
    })
}

/// Channel means `ū(t)` and `ȳ(t)` at every logged instant.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedSignals {
    pub times: Vec<f64>,
    pub input_mean: Vec<f64>,
    pub output_mean: Vec<f64>,
}

pub fn averaged_signals(log: &SignalLog) -> AveragedSignals {
    let mean = |row: &Vec<f64>| row.iter().sum::<f64>() / row.len() as f64;
    AveragedSignals {
        times: log.times.clone(),
        input_mean: log.inputs.iter().map(mean).collect(),
        output_mean: log.outputs.iter().map(mean).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopsideStatistics {
    pub mean: f64,
    pub peak_to_peak: f64,
    /// Strongest non-zero spatial frequency, in cycles per plate length;
    /// `None` for a constant row.
    pub dominant_mode: Option<usize>,
}

pub fn topside_statistics(result: &SimulationResult) -> TopsideStatistics {
    row_statistics(result.final_field.topside(&result.grid))
}

/// Mean, range and dominant DFT mode of one row of samples.
pub fn row_statistics(row: &[f64]) -> TopsideStatistics {
    let n = row.len();
    let mean = row.iter().sum::<f64>() / n as f64;
    let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    TopsideStatistics {
        mean,
        peak_to_peak: hi - lo,
        dominant_mode: if hi > lo { dominant_mode(row, mean) } else { None },
    }
}

fn dominant_mode(row: &[f64], mean: f64) -> Option<usize> {
    let n = row.len();
    let mut buf: Vec<Complex<f64>> = row.iter().map(|&v| Complex::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    // magnitudes within a relative 1e-9 count as a tie and keep the lower mode
    let mut best: Option<(usize, f64)> = None;
    for (mode, c) in buf.iter().enumerate().take(n / 2 + 1).skip(1) {
        let mag = c.norm();
        if mag > best.map_or(0.0, |(_, m)| m * (1.0 + 1e-9)) {
            best = Some((mode, mag));
        }
    }
    best.map(|(mode, _)| mode)
}
