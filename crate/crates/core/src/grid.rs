//! Plate geometry and the uniform finite-volume grid over `(0, L) × (0, H)`.
//!
//! Cells are stored row-major over `x1`: offset `k·J + j`, so one row of
//! constant `k` is contiguous. Row `k = 0` touches the underside, row
//! `k = K - 1` the topside.

use bitflags::bitflags;

use crate::error::ModelError;
use crate::material::ThermalMaterial;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateGeometry {
    /// Horizontal extent `L` in m.
    pub length: f64,
    /// Vertical extent `H` in m.
    pub height: f64,
}

impl PlateGeometry {
    pub fn new(length: f64, height: f64) -> Result<Self, ModelError> {
        if !(length.is_finite() && length > 0.0) {
            return Err(ModelError::invalid("geometry.L", "must be > 0"));
        }
        if !(height.is_finite() && height > 0.0) {
            return Err(ModelError::invalid("geometry.H", "must be > 0"));
        }
        Ok(PlateGeometry { length, height })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex {
    /// Column along `x1`.
    pub j: usize,
    /// Row along `x2`.
    pub k: usize,
}

impl CellIndex {
    pub const fn new(j: usize, k: usize) -> Self {
        CellIndex { j, k }
    }
}

bitflags! {
    /// Which domain boundaries a cell touches.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
    pub struct Boundary: u8 {
        const LEFT = 0b0001;
        const RIGHT = 0b0010;
        /// Underside, where the actuators act.
        const BOTTOM = 0b0100;
        /// Topside, where the sensors measure.
        const TOP = 0b1000;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    geometry: PlateGeometry,
    cols: usize,
    rows: usize,
    dx1: f64,
    dx2: f64,
}

impl Grid {
    /// Builds a `cols × rows` (`J × K`) grid. Both counts must be at least 2.
    pub fn new(geometry: PlateGeometry, cols: usize, rows: usize) -> Result<Self, ModelError> {
        if cols < 2 {
            return Err(ModelError::invalid("grid.J", "must be >= 2"));
        }
        if rows < 2 {
            return Err(ModelError::invalid("grid.K", "must be >= 2"));
        }
        Ok(Grid {
            geometry,
            cols,
            rows,
            dx1: geometry.length / cols as f64,
            dx2: geometry.height / rows as f64,
        })
    }

    pub fn geometry(&self) -> PlateGeometry {
        self.geometry
    }

    /// Number of cells along `x1` (`J`).
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of cells along `x2` (`K`).
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx1(&self) -> f64 {
        self.dx1
    }

    pub fn dx2(&self) -> f64 {
        self.dx2
    }

    pub fn cell_area(&self) -> f64 {
        self.dx1 * self.dx2
    }

    #[inline]
    pub fn flat_index(&self, idx: CellIndex) -> usize {
        debug_assert!(idx.j < self.cols && idx.k < self.rows);
        idx.k * self.cols + idx.j
    }

    #[inline]
    pub fn cell_index(&self, offset: usize) -> CellIndex {
        debug_assert!(offset < self.len());
        CellIndex::new(offset % self.cols, offset / self.cols)
    }

    /// Center of a cell as `(x1, x2)`.
    pub fn cell_center(&self, idx: CellIndex) -> (f64, f64) {
        (self.center_x1(idx.j), self.center_x2(idx.k))
    }

    #[inline]
    pub fn center_x1(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dx1
    }

    #[inline]
    pub fn center_x2(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dx2
    }

    pub fn boundary_membership(&self, idx: CellIndex) -> Boundary {
        let mut set = Boundary::empty();
        set.set(Boundary::LEFT, idx.j == 0);
        set.set(Boundary::RIGHT, idx.j + 1 == self.cols);
        set.set(Boundary::BOTTOM, idx.k == 0);
        set.set(Boundary::TOP, idx.k + 1 == self.rows);
        set
    }

    pub fn cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.len()).map(move |offset| self.cell_index(offset))
    }

    /// Advisory forward-Euler step bound `1 / (2α(1/dx1² + 1/dx2²))` with the
    /// diffusivity `α` taken at `theta_ref`.
    pub fn stability_limit(&self, mat: &ThermalMaterial, theta_ref: f64) -> f64 {
        let alpha = mat.diffusivity(theta_ref);
        let inv = 1.0 / (self.dx1 * self.dx1) + 1.0 / (self.dx2 * self.dx2);
        1.0 / (2.0 * alpha * inv)
    }
}
