//! Spatially characterized actuators on the underside and sensors on the topside.
//!
//! Each device owns a half-open interval `[lo, hi)` of the boundary coordinate
//! `x1` and weights it with `m·exp(-|M·(x - x_c)|^ν)`. With `m = 1, M = 0` the
//! weight is the indicator function of the partition. Weights are tabulated
//! once at the boundary cell centers.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Characterization {
    /// Peak magnitude `m` in `[0, 1]`.
    pub magnitude: f64,
    /// Shape scale `M` in 1/m.
    pub scale: f64,
    /// Exponent `ν`.
    pub exponent: f64,
    /// Central point `x_c` in m.
    pub center: f64,
}

impl Characterization {
    pub fn new(magnitude: f64, scale: f64, exponent: f64, center: f64) -> Result<Self, ModelError> {
        let ch = Characterization {
            magnitude,
            scale,
            exponent,
            center,
        };
        ch.validate()?;
        Ok(ch)
    }

    pub fn indicator(center: f64) -> Self {
        Characterization {
            magnitude: 1.0,
            scale: 0.0,
            exponent: 4.0,
            center,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.magnitude) {
            return Err(ModelError::invalid("m", "must lie in [0, 1]"));
        }
        if !(self.scale.is_finite() && self.scale >= 0.0) {
            return Err(ModelError::invalid("M", "must be >= 0"));
        }
        if !(self.exponent.is_finite() && self.exponent >= 0.0) {
            return Err(ModelError::invalid("nu", "must be >= 0"));
        }
        if self.exponent == 0.0 && self.scale == 0.0 {
            return Err(ModelError::invalid("nu", "nu = 0 requires M > 0"));
        }
        if !self.center.is_finite() {
            return Err(ModelError::invalid("x_center", "must be finite"));
        }
        Ok(())
    }

    /// The prototype shape without the partition cut-off.
    #[inline]
    pub fn shape(&self, x: f64) -> f64 {
        let r = (self.scale * (x - self.center)).abs();
        self.magnitude * (-r.powf(self.exponent)).exp()
    }
}

/// Half-open interval `[lo, hi)` along the boundary coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPartition {
    pub lo: f64,
    pub hi: f64,
}

impl BoundaryPartition {
    pub fn new(lo: f64, hi: f64) -> Result<Self, ModelError> {
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
            return Err(ModelError::invalid(
                "partition",
                format!("[{lo}, {hi}) is not a valid interval"),
            ));
        }
        Ok(BoundaryPartition { lo, hi })
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Weight of a device at boundary coordinate `x`; zero outside its partition.
#[inline]
pub fn characterization_value(ch: &Characterization, part: &BoundaryPartition, x: f64) -> f64 {
    if part.contains(x) {
        ch.shape(x)
    } else {
        0.0
    }
}

/// Splits `[0, length)` into `count` equal partitions `[n·L/N, (n+1)·L/N)`.
pub fn uniform_partitions(length: f64, count: usize) -> Vec<BoundaryPartition> {
    assert!(count >= 1, "at least one partition is required");
    let width = length / count as f64;
    (0..count)
        .map(|n| BoundaryPartition {
            lo: n as f64 * width,
            hi: if n + 1 == count { length } else { (n + 1) as f64 * width },
        })
        .collect()
}

/// One actuator or sensor: its support and its characterization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Device {
    pub partition: BoundaryPartition,
    pub characterization: Characterization,
}

/// Shape parameters shared by every device of a uniformly partitioned bank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankSpec {
    pub count: usize,
    pub m: f64,
    #[serde(rename = "M")]
    pub scale: f64,
    pub nu: f64,
}

impl BankSpec {
    pub fn nominal_actuators() -> Self {
        BankSpec {
            count: 5,
            m: 1.0,
            scale: 0.0,
            nu: 4.0,
        }
    }

    pub fn realistic_actuators() -> Self {
        BankSpec {
            count: 5,
            m: 1.0,
            scale: 30.0,
            nu: 4.0,
        }
    }

    pub fn reference_sensors() -> Self {
        BankSpec {
            count: 5,
            m: 1.0,
            scale: 10.0,
            nu: 4.0,
        }
    }

    /// Equal partitions of `[0, length)`, each centered on its midpoint.
    pub fn layout(&self, length: f64) -> Result<Vec<Device>, ModelError> {
        if self.count == 0 {
            return Err(ModelError::invalid("count", "must be >= 1"));
        }
        uniform_partitions(length, self.count)
            .into_iter()
            .map(|partition| {
                Characterization::new(self.m, self.scale, self.nu, partition.midpoint()).map(|characterization| {
                    Device {
                        partition,
                        characterization,
                    }
                })
            })
            .collect()
    }
}

/// Tabulates device weights over boundary cell centers, `count × J` row-major.
fn tabulate(grid: &Grid, devices: &[Device]) -> Result<Vec<f64>, ModelError> {
    let length = grid.geometry().length;
    for (n, dev) in devices.iter().enumerate() {
        dev.characterization.validate()?;
        let p = dev.partition;
        if !(0.0 <= p.lo && p.lo < p.hi && p.hi <= length) {
            return Err(ModelError::invalid(
                format!("partition[{n}]"),
                format!("[{}, {}) must lie within [0, {length}]", p.lo, p.hi),
            ));
        }
    }
    let mut order: Vec<usize> = (0..devices.len()).collect();
    order.sort_by(|&a, &b| devices[a].partition.lo.total_cmp(&devices[b].partition.lo));
    for pair in order.windows(2) {
        if devices[pair[0]].partition.hi > devices[pair[1]].partition.lo {
            return Err(ModelError::OverlappingPartitions {
                first: pair[0].min(pair[1]),
                second: pair[0].max(pair[1]),
            });
        }
    }

    let cols = grid.cols();
    let mut weights = vec![0.0; devices.len() * cols];
    for (n, dev) in devices.iter().enumerate() {
        let row = &mut weights[n * cols..(n + 1) * cols];
        let mut owned = 0;
        for (j, w) in row.iter_mut().enumerate() {
            let x = grid.center_x1(j);
            if dev.partition.contains(x) {
                owned += 1;
                *w = dev.characterization.shape(x);
            }
        }
        if owned == 0 {
            return Err(ModelError::EmptyPartition { index: n });
        }
    }
    Ok(weights)
}

/// Heating elements on the underside `x2 = 0`.
#[derive(Debug, Clone)]
pub struct ActuatorBank {
    devices: Vec<Device>,
    cols: usize,
    weights: Vec<f64>,
}

impl ActuatorBank {
    /// Partitions must be disjoint and together cover `[0, L)`.
    pub fn new(grid: &Grid, devices: Vec<Device>) -> Result<Self, ModelError> {
        if devices.is_empty() {
            return Err(ModelError::invalid("actuators.count", "must be >= 1"));
        }
        let weights = tabulate(grid, &devices)?;

        let length = grid.geometry().length;
        let tol = 1e-12 * length;
        let mut parts: Vec<BoundaryPartition> = devices.iter().map(|d| d.partition).collect();
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut reach = 0.0;
        for p in &parts {
            if p.lo > reach + tol {
                return Err(ModelError::UncoveredBoundary { at: reach });
            }
            reach = p.hi;
        }
        if reach < length - tol {
            return Err(ModelError::UncoveredBoundary { at: reach });
        }

        Ok(ActuatorBank {
            devices,
            cols: grid.cols(),
            weights,
        })
    }

    pub fn from_spec(grid: &Grid, spec: &BankSpec) -> Result<Self, ModelError> {
        Self::new(grid, spec.layout(grid.geometry().length)?)
    }

    pub fn len(&self) -> usize {
        self.devices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.devices.is_empty()
    }

    pub fn devices(&self) -> &[Device] {
        &self.devices
    }

    /// Weights of actuator `n` at the `J` underside cell centers.
    pub fn weights(&self, n: usize) -> &[f64] {
        &self.weights[n * self.cols..(n + 1) * self.cols]
    }

    /// Heat flux `bᵀu` injected into each underside cell, in W/m².
    pub fn induced_flux(&self, inputs: &[f64]) -> Result<Vec<f64>, ModelError> {
        let mut flux = vec![0.0; self.cols];
        self.induced_flux_into(inputs, &mut flux)?;
        Ok(flux)
    }

    pub fn induced_flux_into(&self, inputs: &[f64], flux: &mut [f64]) -> Result<(), ModelError> {
        if inputs.len() != self.len() {
            return Err(ModelError::LengthMismatch {
                expected: self.len(),
                actual: inputs.len(),
            });
        }
        if flux.len() != self.cols {
            return Err(ModelError::LengthMismatch {
                expected: self.cols,
                actual: flux.len(),
            });
        }
        flux.fill(0.0);
        for (n, &u) in inputs.iter().enumerate() {
            for (phi, &w) in flux.iter_mut().zip(self.weights(n)) {
                *phi += w * u;
            }
        }
        Ok(())
    }
}

/// Temperature sensors on the topside `x2 = H`.
#[derive(Debug, Clone)]
pub struct SensorBank {
    devices: Vec<Device>,
    cols: usize,
    weights: Vec<f64>,
    normalizers: Vec<f64>,
}

impl SensorBank {
    /// Partitions must be disjoint; each sensor needs positive quadrature mass.
    pub fn new(grid: &Grid, devices: Vec<Device>) -> Result<Self, ModelError> {
        if devices.is_empty() {
            return Err(ModelError::invalid("sensors.count", "must be >= 1"));
        }
        let weights = tabulate(grid, &devices)?;
        let cols = grid.cols();
        let dx1 = grid.dx1();
        let normalizers: Vec<f64> = (0..devices.len())
            .map(|n| weights[n * cols..(n + 1) * cols].iter().sum::<f64>() * dx1)
            .collect();
        if let Some(index) = normalizers.iter().position(|&w| w <= 0.0) {
            return Err(ModelError::ZeroSensorMass { index });
        }
        Ok(SensorBank {
            devices,
            cols,
            weights,
            normalizers,
        })
    }

    pub fn from_spec(grid: &Grid, spec: &BankSpec) -> Result<Self, ModelError> {
        Self::new(grid, spec.layout(grid.geometry().length)?)
    }

    pub fn len(&self) -> usize {
        self.devices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.devices.is_empty()
    }

    pub fn devices(&self) -> &[Device] {
        &self.devices
    }

    /// Weights of sensor `n` at the `J` topside cell centers.
    pub fn weights(&self, n: usize) -> &[f64] {
        &self.weights[n * self.cols..(n + 1) * self.cols]
    }

    /// Midpoint-quadrature mass `Σ_j g_n(x_j)·dx1` of sensor `n`.
    pub fn normalizer(&self, n: usize) -> f64 {
        self.normalizers[n]
    }

    /// Weighted averages of the topside row. `field` is the full `J·K` vector.
    pub fn measure(&self, grid: &Grid, field: &[f64]) -> Vec<f64> {
        assert_eq!(field.len(), grid.len(), "field length must equal J*K");
        let cols = grid.cols();
        let top = &field[(grid.rows() - 1) * cols..];
        self.measure_row(top, grid.dx1())
    }

    /// Same as [`measure`](Self::measure) on an extracted topside row.
    pub fn measure_row(&self, top: &[f64], dx1: f64) -> Vec<f64> {
        assert_eq!(top.len(), self.cols);
        let lo = top.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = top.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..self.len())
            .map(|n| {
                let weighted: f64 = self.weights(n).iter().zip(top).map(|(g, t)| g * t * dx1).sum();
                let y = weighted / self.normalizers[n];
                // rounding can push a convex combination an ulp past the row's range
                if y.is_finite() {
                    y.clamp(lo, hi)
                } else {
                    y
                }
            })
            .collect()
    }
}
