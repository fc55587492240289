use crate::error::{Error, Result};
use crate::spectral::Grid;

/// A Fourier multiplier: a linear operator diagonal in the trigonometric
/// basis, represented by one real coefficient per wavenumber pair.
///
/// The symbol must be even under `k -> -k` (all symbols here are functions of
/// `kx^2` and `ky^2`), otherwise the operator would not map real fields to
/// real fields. Coefficients are stored in the half-spectrum layout.
#[derive(Debug, Clone)]
pub struct Multiplier {
    grid: Grid,
    symbol: Vec<f64>,
}

impl Multiplier {
    /// Build a multiplier by evaluating `f(kx, ky)` at every retained mode.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let mut symbol = Vec::with_capacity(grid.nyc() * grid.nx());
        for jc in 0..grid.nyc() {
            let ky = grid.ky(jc);
            for i in 0..grid.nx() {
                let v = f(grid.kx(i), ky);
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "multiplier symbol at (kx={}, ky={})",
                        grid.kx(i),
                        ky
                    )));
                }
                symbol.push(v);
            }
        }
        Ok(Self { grid, symbol })
    }

    pub fn identity(grid: Grid) -> Self {
        Self::from_fn(grid, |_, _| 1.0).expect("constant symbol is finite")
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// Symbol value at the mode `(kx[i], ky[jc])`.
    pub fn at(&self, i: usize, jc: usize) -> f64 {
        self.symbol[jc * self.grid.nx() + i]
    }

    pub fn min(&self) -> f64 {
        self.symbol.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }

    pub fn max(&self) -> f64 {
        self.symbol.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
    }
}

/// Wavenumber of the entry at flat half-spectrum position `pos`.
pub(crate) fn mode_of(grid: Grid, pos: usize) -> (f64, f64) {
    let i = pos % grid.nx();
    let jc = pos / grid.nx();
    (grid.kx(i), grid.ky(jc))
}
