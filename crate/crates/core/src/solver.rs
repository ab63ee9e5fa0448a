//! Semi-discrete finite-volume heat equation and forward-Euler stepping.
//!
//! Each cell balances the fluxes through its four faces. Interior faces use
//! the conductivity at the mean temperature of the two adjacent cells; both
//! cells see the same face flux with opposite sign, so interior exchange
//! conserves energy exactly up to rounding. Boundary faces carry the
//! prescribed flux `φ` directly: eliminating the ghost cell from the
//! boundary relation `λ_g·(θ_ghost - θ)/Δx = φ` cancels the unknown ghost
//! conductivity, leaving `φ/Δx` in the cell balance.
//!
//! Flux sign convention: positive means heat enters the plate.

use rayon::prelude::*;

use crate::actuation::ActuatorBank;
use crate::error::{Divergence, ModelError};
use crate::grid::Grid;
use crate::material::{SurfaceExchange, ThermalMaterial};

/// Cell-average temperatures in K, ordered by [`Grid::flat_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureField(Vec<f64>);

impl TemperatureField {
    pub fn new(values: Vec<f64>) -> Self {
        TemperatureField(values)
    }

    pub fn uniform(grid: &Grid, theta: f64) -> Self {
        TemperatureField(vec![theta; grid.len()])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Row `k` (constant `x2`) of the field.
    pub fn row(&self, grid: &Grid, k: usize) -> &[f64] {
        let cols = grid.cols();
        &self.0[k * cols..(k + 1) * cols]
    }

    pub fn topside(&self, grid: &Grid) -> &[f64] {
        self.row(grid, grid.rows() - 1)
    }

    /// First cell that is non-finite or negative.
    pub fn check(&self, grid: &Grid) -> Result<(), Divergence> {
        match self.0.iter().position(|t| !(t.is_finite() && *t >= 0.0)) {
            Some(offset) => Err(Divergence {
                cell: grid.cell_index(offset),
            }),
            None => Ok(()),
        }
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl std::ops::Index<usize> for TemperatureField {
    type Output = f64;

    fn index(&self, offset: usize) -> &f64 {
        &self.0[offset]
    }
}

/// Prescribed face fluxes along the four boundaries, in W/m².
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFluxes {
    /// Actuator flux on the underside, one entry per column.
    pub phi_in: Vec<f64>,
    /// Emission on the underside; all zero unless underside emission is enabled.
    pub phi_out_bottom: Vec<f64>,
    /// One entry per row.
    pub phi_out_left: Vec<f64>,
    /// One entry per row.
    pub phi_out_right: Vec<f64>,
    /// One entry per column.
    pub phi_out_top: Vec<f64>,
}

impl BoundaryFluxes {
    pub fn zeros(grid: &Grid) -> Self {
        BoundaryFluxes {
            phi_in: vec![0.0; grid.cols()],
            phi_out_bottom: vec![0.0; grid.cols()],
            phi_out_left: vec![0.0; grid.rows()],
            phi_out_right: vec![0.0; grid.rows()],
            phi_out_top: vec![0.0; grid.cols()],
        }
    }

    fn check_dims(&self, grid: &Grid) -> Result<(), ModelError> {
        let (cols, rows) = (grid.cols(), grid.rows());
        for (len, expected) in [
            (self.phi_in.len(), cols),
            (self.phi_out_bottom.len(), cols),
            (self.phi_out_left.len(), rows),
            (self.phi_out_right.len(), rows),
            (self.phi_out_top.len(), cols),
        ] {
            if len != expected {
                return Err(ModelError::LengthMismatch { expected, actual: len });
            }
        }
        Ok(())
    }

    /// Total heat entering the plate per unit depth, in W/m.
    ///
    /// Sums in a fixed order: left, right, top, underside.
    pub fn total(&self, grid: &Grid) -> f64 {
        let side: f64 = self.phi_out_left.iter().sum::<f64>() + self.phi_out_right.iter().sum::<f64>();
        let horizontal: f64 = self.phi_out_top.iter().sum::<f64>()
            + self.phi_in.iter().sum::<f64>()
            + self.phi_out_bottom.iter().sum::<f64>();
        grid.dx2() * side + grid.dx1() * horizontal
    }
}

/// Temperature rates `dθ/dt` in K/s.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsVector(Vec<f64>);

impl RhsVector {
    pub fn new(values: Vec<f64>) -> Self {
        RhsVector(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Evaluates boundary fluxes for the current field and actuator inputs.
///
/// Emission on each exposed face uses the temperature of the adjacent cell
/// center. The underside receives only the actuator flux unless
/// `underside_emission` is set.
pub fn boundary_fluxes(
    field: &TemperatureField,
    grid: &Grid,
    exchange: &SurfaceExchange,
    bank: &ActuatorBank,
    inputs: &[f64],
    underside_emission: bool,
) -> Result<BoundaryFluxes, ModelError> {
    let mut fluxes = BoundaryFluxes::zeros(grid);
    update_boundary_fluxes(field, grid, exchange, bank, inputs, underside_emission, &mut fluxes)?;
    Ok(fluxes)
}

/// In-place form of [`boundary_fluxes`] for the time loop.
pub fn update_boundary_fluxes(
    field: &TemperatureField,
    grid: &Grid,
    exchange: &SurfaceExchange,
    bank: &ActuatorBank,
    inputs: &[f64],
    underside_emission: bool,
    fluxes: &mut BoundaryFluxes,
) -> Result<(), ModelError> {
    check_field_len(field, grid)?;
    fluxes.check_dims(grid)?;
    bank.induced_flux_into(inputs, &mut fluxes.phi_in)?;

    let (cols, rows) = (grid.cols(), grid.rows());
    let theta = field.as_slice();
    for k in 0..rows {
        fluxes.phi_out_left[k] = exchange.emitted_flux(theta[k * cols]);
        fluxes.phi_out_right[k] = exchange.emitted_flux(theta[k * cols + cols - 1]);
    }
    let top = field.topside(grid);
    for (phi, &t) in fluxes.phi_out_top.iter_mut().zip(top) {
        *phi = exchange.emitted_flux(t);
    }
    if underside_emission {
        for (phi, &t) in fluxes.phi_out_bottom.iter_mut().zip(field.row(grid, 0)) {
            *phi = exchange.emitted_flux(t);
        }
    } else {
        fluxes.phi_out_bottom.fill(0.0);
    }
    Ok(())
}

fn check_field_len(field: &TemperatureField, grid: &Grid) -> Result<(), ModelError> {
    if field.len() != grid.len() {
        return Err(ModelError::LengthMismatch {
            expected: grid.len(),
            actual: field.len(),
        });
    }
    Ok(())
}

/// Net heat flow density into cell `(j, k)`, before division by `ρc`.
#[inline]
fn cell_balance(theta: &[f64], grid: &Grid, mat: &ThermalMaterial, fluxes: &BoundaryFluxes, j: usize, k: usize) -> f64 {
    let cols = grid.cols();
    let rows = grid.rows();
    let inv_dx1 = 1.0 / grid.dx1();
    let inv_dx2 = 1.0 / grid.dx2();
    let inv_dx1_sq = inv_dx1 * inv_dx1;
    let inv_dx2_sq = inv_dx2 * inv_dx2;

    let c = k * cols + j;
    let tc = theta[c];
    let mut net = 0.0;

    if j > 0 {
        let tw = theta[c - 1];
        net += mat.face_conductivity(tc, tw) * (tw - tc) * inv_dx1_sq;
    } else {
        net += fluxes.phi_out_left[k] * inv_dx1;
    }
    if j + 1 < cols {
        let te = theta[c + 1];
        net += mat.face_conductivity(tc, te) * (te - tc) * inv_dx1_sq;
    } else {
        net += fluxes.phi_out_right[k] * inv_dx1;
    }
    if k > 0 {
        let ts = theta[c - cols];
        net += mat.face_conductivity(tc, ts) * (ts - tc) * inv_dx2_sq;
    } else {
        net += (fluxes.phi_in[j] + fluxes.phi_out_bottom[j]) * inv_dx2;
    }
    if k + 1 < rows {
        let tn = theta[c + cols];
        net += mat.face_conductivity(tc, tn) * (tn - tc) * inv_dx2_sq;
    } else {
        net += fluxes.phi_out_top[j] * inv_dx2;
    }
    net
}

/// Assembles `dθ/dt` for every cell.
///
/// Rows are evaluated in parallel; each entry depends only on the input
/// field, so the result does not depend on the thread count.
pub fn assemble_rhs(
    field: &TemperatureField,
    grid: &Grid,
    mat: &ThermalMaterial,
    fluxes: &BoundaryFluxes,
) -> Result<RhsVector, AssembleError> {
    let mut out = vec![0.0; grid.len()];
    assemble_rhs_into(field, grid, mat, fluxes, &mut out)?;
    Ok(RhsVector(out))
}

/// In-place form of [`assemble_rhs`].
pub fn assemble_rhs_into(
    field: &TemperatureField,
    grid: &Grid,
    mat: &ThermalMaterial,
    fluxes: &BoundaryFluxes,
    out: &mut [f64],
) -> Result<(), AssembleError> {
    check_field_len(field, grid)?;
    fluxes.check_dims(grid)?;
    if out.len() != grid.len() {
        return Err(ModelError::LengthMismatch {
            expected: grid.len(),
            actual: out.len(),
        }
        .into());
    }
    let theta = field.as_slice();
    let cols = grid.cols();
    out.par_chunks_mut(cols).enumerate().for_each(|(k, row)| {
        for (j, rate) in row.iter_mut().enumerate() {
            let tc = theta[k * cols + j];
            *rate = cell_balance(theta, grid, mat, fluxes, j, k) / mat.volumetric_heat_coefficient(tc);
        }
    });
    if let Some(offset) = out.iter().position(|r| !r.is_finite()) {
        return Err(Divergence {
            cell: grid.cell_index(offset),
        }
        .into());
    }
    Ok(())
}

/// Failure modes of RHS assembly.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssembleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Divergence(#[from] Divergence),
}

/// One explicit Euler step `θ + dt·dθ/dt`.
pub fn step_forward_euler(
    field: &TemperatureField,
    rhs: &RhsVector,
    dt: f64,
    grid: &Grid,
) -> Result<TemperatureField, Divergence> {
    let mut next = field.clone();
    step_forward_euler_in_place(&mut next, rhs.as_slice(), dt, grid)?;
    Ok(next)
}

/// Updates `field` in place. The field is left updated even on divergence.
pub fn step_forward_euler_in_place(
    field: &mut TemperatureField,
    rates: &[f64],
    dt: f64,
    grid: &Grid,
) -> Result<(), Divergence> {
    assert!(dt > 0.0, "time step must be positive");
    assert_eq!(field.len(), rates.len());
    field
        .0
        .par_iter_mut()
        .zip(rates.par_iter())
        .for_each(|(t, r)| *t += dt * r);
    field.check(grid)
}

/// `Σ ρ·c(θ)·(dθ/dt)·Δx1·Δx2`, summed in flat-index order.
///
/// For a consistent assembly this equals [`BoundaryFluxes::total`], since the
/// interior face fluxes telescope.
pub fn weighted_rhs_sum(field: &TemperatureField, rhs: &RhsVector, grid: &Grid, mat: &ThermalMaterial) -> f64 {
    let area = grid.cell_area();
    field
        .as_slice()
        .iter()
        .zip(rhs.as_slice())
        .map(|(&t, &r)| mat.volumetric_heat_coefficient(t) * r * area)
        .sum()
}
