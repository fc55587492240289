use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::spectral::multiplier::mode_of;
use crate::spectral::{Fft2d, Grid, Multiplier, RealField, SpectralField};

impl Fft2d {
    /// Apply a Fourier multiplier: `backward(symbol .* forward(f))`.
    pub fn apply_multiplier(&mut self, m: &Multiplier, f: &RealField) -> Result<RealField> {
        if m.grid() != f.grid() {
            return Err(Error::GridMismatch(
                "apply_multiplier: symbol and field grids differ".into(),
            ));
        }
        let mut out = RealField::zeros(self.grid());
        self.filter_into(f, m.symbol(), &mut out)?;
        Ok(out)
    }

    /// Solve `(a I + b Op(m)) u = rhs` by pointwise division in coefficient
    /// space. Errors if the shifted symbol vanishes at any mode.
    pub fn solve_shifted(
        &mut self,
        m: &Multiplier,
        a: f64,
        b: f64,
        rhs: &RealField,
    ) -> Result<RealField> {
        if m.grid() != rhs.grid() {
            return Err(Error::GridMismatch(
                "solve_shifted: symbol and field grids differ".into(),
            ));
        }
        let inv = shifted_inverse_symbol(self.grid(), m.symbol(), a, b)?;
        let mut out = RealField::zeros(self.grid());
        self.filter_into(rhs, &inv, &mut out)?;
        Ok(out)
    }

    /// Spectral gradient `(df/dx, df/dy)`. Odd-derivative symbols zero the
    /// Nyquist mode so the result stays real-symmetric.
    pub fn gradient(&mut self, f: &RealField) -> Result<(RealField, RealField)> {
        let spec = self.forward(f)?;
        let gx = self.gradient_x_from_spec(&spec)?;
        let gy = self.gradient_y_from_spec(&spec)?;
        Ok((gx, gy))
    }

    pub(crate) fn gradient_x_from_spec(&mut self, spec: &SpectralField) -> Result<RealField> {
        let grid = self.grid();
        let mut d = SpectralField::zeros(grid);
        derivative_x(grid, spec, &mut d);
        self.backward(&d)
    }

    pub(crate) fn gradient_y_from_spec(&mut self, spec: &SpectralField) -> Result<RealField> {
        let grid = self.grid();
        let mut d = SpectralField::zeros(grid);
        derivative_y(grid, spec, &mut d);
        self.backward(&d)
    }

    /// Spectral divergence of a vector field `(fx, fy)`.
    pub fn divergence(&mut self, fx: &RealField, fy: &RealField) -> Result<RealField> {
        fx.check_same_grid(fy, "divergence")?;
        let grid = self.grid();
        let sx = self.forward(fx)?;
        let sy = self.forward(fy)?;
        let mut d = SpectralField::zeros(grid);
        divergence_spec(grid, &sx, &sy, &mut d);
        self.backward(&d)
    }

    /// Variable-coefficient operator `div(rho * grad(f))`: gradient spectrally,
    /// pointwise product with `rho` in physical space, divergence spectrally.
    pub fn var_coeff_div_grad(&mut self, rho: &RealField, f: &RealField) -> Result<RealField> {
        rho.check_same_grid(f, "var_coeff_div_grad")?;
        let (mut gx, mut gy) = self.gradient(f)?;
        for (g, r) in gx.values_mut().iter_mut().zip(rho.values()) {
            *g *= *r;
        }
        for (g, r) in gy.values_mut().iter_mut().zip(rho.values()) {
            *g *= *r;
        }
        self.divergence(&gx, &gy)
    }
}

/// Precompute `1 / (a + b*s(k))`, rejecting vanishing denominators.
pub(crate) fn shifted_inverse_symbol(
    grid: Grid,
    symbol: &[f64],
    a: f64,
    b: f64,
) -> Result<Vec<f64>> {
    let mut inv = Vec::with_capacity(symbol.len());
    for (pos, s) in symbol.iter().enumerate() {
        let den = a + b * s;
        if !den.is_finite() || den.abs() < f64::MIN_POSITIVE {
            let (kx, ky) = mode_of(grid, pos);
            return Err(Error::SingularOperator { kx, ky });
        }
        inv.push(1.0 / den);
    }
    Ok(inv)
}

/// `out = i*kx .* spec`, with the Nyquist column in x zeroed.
pub(crate) fn derivative_x(grid: Grid, spec: &SpectralField, out: &mut SpectralField) {
    let nx = grid.nx();
    for jc in 0..grid.nyc() {
        let src = &spec.data()[jc * nx..(jc + 1) * nx];
        let dst = &mut out.data_mut()[jc * nx..(jc + 1) * nx];
        for i in 0..nx {
            let kx = if i == nx / 2 { 0.0 } else { grid.kx(i) };
            let v = src[i];
            dst[i] = Complex::new(-v.im * kx, v.re * kx);
        }
    }
}

/// `out = i*ky .* spec`, with the Nyquist row in y zeroed.
pub(crate) fn derivative_y(grid: Grid, spec: &SpectralField, out: &mut SpectralField) {
    let nx = grid.nx();
    for jc in 0..grid.nyc() {
        let ky = if jc == grid.nyc() - 1 { 0.0 } else { grid.ky(jc) };
        let src = &spec.data()[jc * nx..(jc + 1) * nx];
        let dst = &mut out.data_mut()[jc * nx..(jc + 1) * nx];
        for i in 0..nx {
            let v = src[i];
            dst[i] = Complex::new(-v.im * ky, v.re * ky);
        }
    }
}

/// `out = i*kx .* sx + i*ky .* sy` with Nyquist zeroing as above.
pub(crate) fn divergence_spec(
    grid: Grid,
    sx: &SpectralField,
    sy: &SpectralField,
    out: &mut SpectralField,
) {
    let nx = grid.nx();
    for jc in 0..grid.nyc() {
        let ky = if jc == grid.nyc() - 1 { 0.0 } else { grid.ky(jc) };
        let rx = &sx.data()[jc * nx..(jc + 1) * nx];
        let ry = &sy.data()[jc * nx..(jc + 1) * nx];
        let dst = &mut out.data_mut()[jc * nx..(jc + 1) * nx];
        for i in 0..nx {
            let kx = if i == nx / 2 { 0.0 } else { grid.kx(i) };
            let vx = rx[i];
            let vy = ry[i];
            dst[i] = Complex::new(-vx.im * kx - vy.im * ky, vx.re * kx + vy.re * ky);
        }
    }
}
