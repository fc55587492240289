use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic 2D grid: `nx x ny` samples on `[0, lx) x [0, ly)`.
///
/// Wavenumbers follow the standard FFT ordering with the index wrapped to the
/// signed frequency in `(-n/2, n/2]`, so `kx[0] = 0` and the Nyquist mode
/// carries the positive sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 4 || ny < 4 || !nx.is_multiple_of(2) || !ny.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "grid sizes must be even and >= 4, got {nx} x {ny}"
            )));
        }
        if !(lx.is_finite() && ly.is_finite()) || lx <= 0.0 || ly <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "domain extents must be finite and positive, got {lx} x {ly}"
            )));
        }
        Ok(Self { nx, ny, lx, ly })
    }

    /// Square grid on `[0, l)^2`.
    pub fn square(n: usize, l: f64) -> Result<Self> {
        Self::new(n, n, l, l)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of retained complex columns in the half-spectrum: `ny/2 + 1`.
    pub fn nyc(&self) -> usize {
        self.ny / 2 + 1
    }

    /// Sample coordinate along x.
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.hx()
    }

    /// Sample coordinate along y.
    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.hy()
    }

    /// Signed integer frequency for index `i` of an `n`-point transform,
    /// wrapped into `(-n/2, n/2]`.
    fn wrap(i: usize, n: usize) -> i64 {
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Wavenumber along x for spectral index `i`.
    pub fn kx(&self, i: usize) -> f64 {
        2.0 * PI * Self::wrap(i, self.nx) as f64 / self.lx
    }

    /// Wavenumber along y for spectral index `j` (full-range index).
    pub fn ky(&self, j: usize) -> f64 {
        2.0 * PI * Self::wrap(j, self.ny) as f64 / self.ly
    }

    /// Flat row-major index of the physical sample `(i, j)`.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }
}
