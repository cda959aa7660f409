//! Uniform rectangular meshes in one or two spatial dimensions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub dx: f64,
    pub dy: f64,
}

impl Mesh {
    pub fn line(nx: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if nx == 0 || !(x_max > x_min) {
            return Err(Error::Scenario(format!(
                "invalid 1D mesh: {nx} cells on [{x_min}, {x_max}]"
            )));
        }
        Ok(Self {
            dim: 1,
            nx,
            ny: 1,
            x_min,
            x_max,
            y_min: 0.0,
            y_max: 0.0,
            dx: (x_max - x_min) / nx as f64,
            dy: 1.0,
        })
    }

    pub fn rectangle(
        nx: usize,
        ny: usize,
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    ) -> Result<Self> {
        if nx == 0 || ny == 0 || !(x_max > x_min) || !(y_max > y_min) {
            return Err(Error::Scenario(format!(
                "invalid 2D mesh: {nx} x {ny} cells on [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(Self {
            dim: 2,
            nx,
            ny,
            x_min,
            x_max,
            y_min,
            y_max,
            dx: (x_max - x_min) / nx as f64,
            dy: (y_max - y_min) / ny as f64,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Flat index of cell (i, j); the x index varies fastest.
    pub fn cell_id(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn cell_coords(&self, id: usize) -> (usize, usize) {
        (id % self.nx, id / self.nx)
    }

    /// Lower corner of cell (i, j).
    pub fn cell_origin(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x_min + i as f64 * self.dx,
            self.y_min + j as f64 * self.dy,
        )
    }

    /// Physical coordinates of reference point (rx, ry) in cell (i, j).
    pub fn to_physical(&self, i: usize, j: usize, rx: f64, ry: f64) -> (f64, f64) {
        let (x0, y0) = self.cell_origin(i, j);
        (x0 + rx * self.dx, y0 + ry * self.dy)
    }

    pub fn cell_volume(&self) -> f64 {
        if self.dim == 1 {
            self.dx
        } else {
            self.dx * self.dy
        }
    }

    pub fn domain_volume(&self) -> f64 {
        if self.dim == 1 {
            self.x_max - self.x_min
        } else {
            (self.x_max - self.x_min) * (self.y_max - self.y_min)
        }
    }
}
