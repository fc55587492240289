use std::sync::Arc;

use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::spectral::{Grid, RealField, SpectralField};

/// Planned 2D transforms between a real field and its half-spectrum.
///
/// Convention: the forward transform is the unnormalized DFT sum; the
/// backward transform carries the full `1/(nx*ny)` factor, so
/// `backward(forward(f)) = f` up to roundoff.
///
/// One `Fft2d` owns its work buffers and is therefore `&mut self` per call;
/// independent simulations each build their own.
pub struct Fft2d {
    grid: Grid,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    row_re: Vec<f64>,
    row_spec: Vec<Complex<f64>>,
    work: Vec<Complex<f64>>,
    scratch_r2c: Vec<Complex<f64>>,
    scratch_c2r: Vec<Complex<f64>>,
    scratch_col: Vec<Complex<f64>>,
}

impl Fft2d {
    pub fn new(grid: Grid) -> Self {
        let mut rp = RealFftPlanner::<f64>::new();
        let r2c = rp.plan_fft_forward(grid.ny());
        let c2r = rp.plan_fft_inverse(grid.ny());
        let mut cp = FftPlanner::<f64>::new();
        let col_fwd = cp.plan_fft_forward(grid.nx());
        let col_inv = cp.plan_fft_inverse(grid.nx());
        let scratch_r2c = vec![Complex::default(); r2c.get_scratch_len()];
        let scratch_c2r = vec![Complex::default(); c2r.get_scratch_len()];
        let scratch_col = vec![
            Complex::default();
            col_fwd
                .get_inplace_scratch_len()
                .max(col_inv.get_inplace_scratch_len())
        ];
        Fft2d {
            grid,
            r2c,
            c2r,
            col_fwd,
            col_inv,
            row_re: vec![0.0; grid.ny()],
            row_spec: vec![Complex::default(); grid.nyc()],
            work: vec![Complex::default(); grid.nyc() * grid.nx()],
            scratch_r2c,
            scratch_c2r,
            scratch_col,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    fn check_grid(&self, other: Grid, what: &str) -> Result<()> {
        if self.grid != other {
            return Err(Error::GridMismatch(format!(
                "{what}: transform planned for {}x{}, field is {}x{}",
                self.grid.nx(),
                self.grid.ny(),
                other.nx(),
                other.ny()
            )));
        }
        Ok(())
    }

    /// Forward transform into an existing half-spectrum buffer.
    pub fn forward_into(&mut self, f: &RealField, out: &mut SpectralField) -> Result<()> {
        self.check_grid(f.grid(), "forward")?;
        self.check_grid(out.grid(), "forward output")?;
        let (nx, ny, nyc) = (self.grid.nx(), self.grid.ny(), self.grid.nyc());
        let vals = f.values();
        let spec = out.data_mut();
        // r2c along y, scattering each output row into the transposed layout
        for i in 0..nx {
            self.row_re.copy_from_slice(&vals[i * ny..(i + 1) * ny]);
            self.r2c
                .process_with_scratch(&mut self.row_re, &mut self.row_spec, &mut self.scratch_r2c)
                .expect("r2c buffer sizes are planned");
            for (jc, v) in self.row_spec.iter().enumerate() {
                spec[jc * nx + i] = *v;
            }
        }
        // complex FFT along x, one contiguous row per retained ky
        for jc in 0..nyc {
            self.col_fwd
                .process_with_scratch(&mut spec[jc * nx..(jc + 1) * nx], &mut self.scratch_col);
        }
        Ok(())
    }

    pub fn forward(&mut self, f: &RealField) -> Result<SpectralField> {
        let mut out = SpectralField::zeros(self.grid);
        self.forward_into(f, &mut out)?;
        Ok(out)
    }

    /// Backward transform into an existing real buffer. The spectrum is left
    /// untouched.
    pub fn backward_into(&mut self, spec: &SpectralField, out: &mut RealField) -> Result<()> {
        self.check_grid(spec.grid(), "backward")?;
        self.check_grid(out.grid(), "backward output")?;
        self.work.copy_from_slice(spec.data());
        self.backward_work_into(out);
        Ok(())
    }

    pub fn backward(&mut self, spec: &SpectralField) -> Result<RealField> {
        let mut out = RealField::zeros(self.grid);
        self.backward_into(spec, &mut out)?;
        Ok(out)
    }

    /// Backward transform of `self.work` (clobbers it).
    fn backward_work_into(&mut self, out: &mut RealField) {
        let (nx, ny, nyc) = (self.grid.nx(), self.grid.ny(), self.grid.nyc());
        for jc in 0..nyc {
            self.col_inv.process_with_scratch(
                &mut self.work[jc * nx..(jc + 1) * nx],
                &mut self.scratch_col,
            );
        }
        let scale = 1.0 / (nx * ny) as f64;
        let vals = out.values_mut();
        for i in 0..nx {
            for (jc, v) in self.row_spec.iter_mut().enumerate() {
                *v = self.work[jc * nx + i];
            }
            // conjugate symmetry makes these bins real; drop the roundoff residue
            self.row_spec[0].im = 0.0;
            self.row_spec[nyc - 1].im = 0.0;
            self.c2r
                .process_with_scratch(&mut self.row_spec, &mut self.row_re, &mut self.scratch_c2r)
                .expect("c2r buffer sizes are planned");
            for (j, v) in self.row_re.iter().enumerate() {
                vals[i * ny + j] = v * scale;
            }
        }
    }

    /// `backward(symbol .* forward(f))` fused; the symbol is given in the
    /// half-spectrum layout.
    pub(crate) fn filter_into(
        &mut self,
        f: &RealField,
        symbol: &[f64],
        out: &mut RealField,
    ) -> Result<()> {
        let mut spec = SpectralField::zeros(self.grid);
        self.forward_into(f, &mut spec)?;
        for (v, s) in spec.data_mut().iter_mut().zip(symbol) {
            *v *= *s;
        }
        self.backward_into(&spec, out)
    }
}
