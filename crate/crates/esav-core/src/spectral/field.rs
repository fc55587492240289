use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::spectral::Grid;

/// Real-valued samples on a periodic grid, row-major (`i * ny + j`).
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    data: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            data: vec![c; grid.len()],
        }
    }

    /// Build from a function of the sample coordinates.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..grid.nx() {
            let x = grid.x(i);
            for j in 0..grid.ny() {
                data.push(f(x, grid.y(j)));
            }
        }
        Self { grid, data }
    }

    pub fn from_values(grid: Grid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "value count {} does not match grid {}x{}",
                data.len(),
                grid.nx(),
                grid.ny()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[self.grid.idx(i, j)]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
    }

    pub fn check_same_grid(&self, other: &RealField, what: &str) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.grid.nx(),
                self.grid.ny(),
                other.grid.nx(),
                other.grid.ny()
            )));
        }
        Ok(())
    }
}

/// Complex Fourier coefficients of a real field, stored as the r2c
/// half-spectrum in transposed layout: entry `(jc, i)` at `jc * nx + i`
/// holds the mode `(kx[i], ky[jc])` with `jc = 0 ..= ny/2`.
///
/// The missing `ky < 0` half is implied by conjugate symmetry of real data.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    data: Vec<Complex<f64>>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            data: vec![Complex::new(0.0, 0.0); grid.nyc() * grid.nx()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn data(&self) -> &[Complex<f64>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<f64>] {
        &mut self.data
    }

    /// Coefficient of the mode `(kx[i], ky[jc])`.
    pub fn mode(&self, i: usize, jc: usize) -> Complex<f64> {
        self.data[jc * self.grid.nx() + i]
    }

    pub fn check_same_grid(&self, other: &SpectralField, what: &str) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.grid.nx(),
                self.grid.ny(),
                other.grid.nx(),
                other.grid.ny()
            )));
        }
        Ok(())
    }
}
