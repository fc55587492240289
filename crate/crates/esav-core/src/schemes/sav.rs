use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::schemes::{implicit_inverse, StepDiagnostics};
use crate::spectral::quadrature::{integral, quadratic_form, row_weight};
use crate::spectral::{Fft2d, Grid, RealField, SpectralField};

/// State of a classical SAV integration with `r = sqrt(E1 + C)`.
#[derive(Debug, Clone)]
pub struct SavState {
    pub(crate) phi: RealField,
    pub(crate) phi_hat: SpectralField,
    pub(crate) r: f64,
    pub(crate) phi_prev: Option<RealField>,
    pub(crate) r_prev: Option<f64>,
    pub(crate) step_index: usize,
    pub(crate) c_shift: f64,
    pub(crate) e1: f64,
}

impl SavState {
    /// Initialize with `r^0 = sqrt(E1(phi^0) + C)`. The default shift `C = 1`
    /// suits the double well, whose `E1` is already non-negative.
    pub fn new(fft: &mut Fft2d, model: &ModelSpec, phi: RealField, c: Option<f64>) -> Result<Self> {
        model.validate()?;
        if !phi.is_finite() {
            return Err(Error::NonFinite("initial field".into()));
        }
        let c_shift = c.unwrap_or(1.0);
        if !c_shift.is_finite() || c_shift < 0.0 {
            return Err(Error::Validation(format!(
                "c_shift must be non-negative, got {c_shift}"
            )));
        }
        let e1 = model.e1(&phi);
        let radicand = e1 + c_shift;
        if radicand <= 0.0 {
            return Err(Error::InvalidC { value: radicand });
        }
        let phi_hat = fft.forward(&phi)?;
        Ok(SavState {
            phi,
            phi_hat,
            r: radicand.sqrt(),
            phi_prev: None,
            r_prev: None,
            step_index: 0,
            c_shift,
            e1,
        })
    }

    pub fn phi(&self) -> &RealField {
        &self.phi
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn c_shift(&self) -> f64 {
        self.c_shift
    }
}

/// Modified discrete energy `1/2 (phi, L phi) + r^2`; exceeds the original
/// energy by the constant shift `C`.
pub fn modified_energy(model: &ModelSpec, state: &SavState) -> f64 {
    let l = model.l_symbol(state.phi.grid());
    0.5 * quadratic_form(l.symbol(), &state.phi_hat) + state.r * state.r
}

struct SavCore {
    model: ModelSpec,
    grid: Grid,
    dt: f64,
    fft: Fft2d,
    l_sym: Vec<f64>,
    g_sym: Vec<f64>,
    inv_denom: Vec<f64>,
    b: RealField,
    b_hat: SpectralField,
    phi1_hat: SpectralField,
    phi2_hat: SpectralField,
    next_phi: RealField,
    next_hat: SpectralField,
    lean: bool,
}

impl SavCore {
    fn new(model: ModelSpec, grid: Grid, dt: f64, implicit_coef: f64) -> Result<Self> {
        model.validate()?;
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::Validation(format!("dt must be positive, got {dt}")));
        }
        let l_sym = model.l_symbol(grid).symbol().to_vec();
        let g_sym = model.g_symbol(grid).symbol().to_vec();
        let inv_denom = implicit_inverse(grid, &g_sym, &l_sym, implicit_coef * dt)?;
        Ok(SavCore {
            model,
            grid,
            dt,
            fft: Fft2d::new(grid),
            l_sym,
            g_sym,
            inv_denom,
            b: RealField::zeros(grid),
            b_hat: SpectralField::zeros(grid),
            phi1_hat: SpectralField::zeros(grid),
            phi2_hat: SpectralField::zeros(grid),
            next_phi: RealField::zeros(grid),
            next_hat: SpectralField::zeros(grid),
            lean: false,
        })
    }

    /// `b = lambda F'(source) / sqrt(E1(source) + C)`, transformed.
    fn load_b(&mut self, source: &RealField, e1: f64, c_shift: f64) -> Result<f64> {
        let radicand = e1 + c_shift;
        if radicand <= 0.0 {
            return Err(Error::InvalidC { value: radicand });
        }
        let scale = self.model.lambda() / radicand.sqrt();
        for (b, v) in self.b.values_mut().iter_mut().zip(source.values()) {
            *b = scale * self.model.f_prime_scalar(*v);
        }
        self.fft.forward_into(&self.b, &mut self.b_hat)?;
        Ok(radicand)
    }

    /// `phi2 = dt * (I - c dt G L)^{-1} G b` in coefficient space.
    fn solve_phi2(&mut self) {
        for ((p2, b), (g, inv)) in self
            .phi2_hat
            .data_mut()
            .iter_mut()
            .zip(self.b_hat.data())
            .zip(self.g_sym.iter().zip(&self.inv_denom))
        {
            *p2 = b * (self.dt * g * inv);
        }
    }

    /// Parseval inner products `(b, phi1 - phi_n)` and `(b, phi2)` resolved
    /// before the field is assembled, as the scheme requires.
    fn reduction_inners(&self, phi_n: &SpectralField) -> (f64, f64) {
        let nx = self.grid.nx();
        let norm = self.grid.cell_area() / self.grid.len() as f64;
        let mut p1 = 0.0;
        let mut p2 = 0.0;
        for jc in 0..self.grid.nyc() {
            let w = row_weight(self.grid, jc);
            let rb = &self.b_hat.data()[jc * nx..(jc + 1) * nx];
            let r1 = &self.phi1_hat.data()[jc * nx..(jc + 1) * nx];
            let r2 = &self.phi2_hat.data()[jc * nx..(jc + 1) * nx];
            let rn = &phi_n.data()[jc * nx..(jc + 1) * nx];
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for i in 0..nx {
                let b = rb[i];
                let d1 = r1[i] - rn[i];
                s1 += b.re * d1.re + b.im * d1.im;
                s2 += b.re * r2[i].re + b.im * r2[i].im;
            }
            p1 += w * s1;
            p2 += w * s2;
        }
        (p1 * norm, p2 * norm)
    }

    fn assemble_next(&mut self, coef: f64) -> Result<()> {
        for ((n, p1), p2) in self
            .next_hat
            .data_mut()
            .iter_mut()
            .zip(self.phi1_hat.data())
            .zip(self.phi2_hat.data())
        {
            *n = p1 + p2 * coef;
        }
        let (next_hat, next_phi) = (&self.next_hat, &mut self.next_phi);
        self.fft.backward_into(next_hat, next_phi)
    }

    fn diagnostics(&self, state: &SavState, solves: usize) -> StepDiagnostics {
        let mut d = if self.lean {
            StepDiagnostics::scalar(f64::NAN, f64::NAN, f64::NAN)
        } else {
            let quad = 0.5 * quadratic_form(&self.l_sym, &state.phi_hat);
            StepDiagnostics::scalar(
                quad + state.r * state.r,
                quad + state.e1,
                integral(&state.phi),
            )
        };
        d.linear_solves_performed = solves;
        d.aux_primary = state.r;
        d
    }
}

/// First-order SAV baseline. The implicit coupling between `phi^{n+1}` and
/// `r^{n+1}` is reduced to two constant-coefficient solves plus one scalar
/// equation, so the inner product `(b, phi^{n+1})` must be resolved before
/// the new field exists.
pub struct SavFirstOrder {
    core: SavCore,
}

impl SavFirstOrder {
    pub fn new(model: ModelSpec, grid: Grid, dt: f64) -> Result<Self> {
        Ok(SavFirstOrder {
            core: SavCore::new(model, grid, dt, 1.0)?,
        })
    }

    pub fn fft(&mut self) -> &mut Fft2d {
        &mut self.core.fft
    }

    pub fn modified_energy(&self, state: &SavState) -> f64 {
        0.5 * quadratic_form(&self.core.l_sym, &state.phi_hat) + state.r * state.r
    }

    pub fn set_lean_diagnostics(&mut self, on: bool) {
        self.core.lean = on;
    }

    pub fn step(&mut self, mut state: SavState) -> Result<(SavState, StepDiagnostics)> {
        let core = &mut self.core;
        core.load_b(&state.phi, state.e1, state.c_shift)?;

        // solve 1: phi1 = (I - dt G L)^{-1} phi^n
        for ((p1, p), inv) in core
            .phi1_hat
            .data_mut()
            .iter_mut()
            .zip(state.phi_hat.data())
            .zip(&core.inv_denom)
        {
            *p1 = p * *inv;
        }
        // solve 2: phi2 = dt (I - dt G L)^{-1} G b
        core.solve_phi2();

        // r^{n+1} (1 - (b,phi2)/2) = r^n + (b, phi1 - phi^n)/2
        let (p1, p2) = core.reduction_inners(&state.phi_hat);
        let pivot = 1.0 - 0.5 * p2;
        if pivot.abs() < 1e-14 {
            return Err(Error::DegenerateReduction { pivot });
        }
        let r_new = (state.r + 0.5 * p1) / pivot;

        core.assemble_next(r_new)?;
        state.r_prev = Some(state.r);
        state.r = r_new;
        state.e1 = core.model.e1(&core.next_phi);
        std::mem::swap(&mut state.phi, &mut core.next_phi);
        std::mem::swap(&mut state.phi_hat, &mut core.next_hat);
        state.step_index += 1;

        let diag = core.diagnostics(&state, 2);
        Ok((state, diag))
    }
}

/// Second-order Crank-Nicolson SAV baseline (two solves per step), with the
/// same semi-implicit bootstrap predictor as the E-SAV CN scheme.
pub struct SavCn {
    core: SavCore,
    plus_sym: Vec<f64>,
    tilde: RealField,
}

impl SavCn {
    pub fn new(model: ModelSpec, grid: Grid, dt: f64) -> Result<Self> {
        let core = SavCore::new(model, grid, dt, 0.5)?;
        let plus_sym = core
            .g_sym
            .iter()
            .zip(&core.l_sym)
            .map(|(g, l)| 1.0 + 0.5 * core.dt * g * l)
            .collect();
        Ok(SavCn {
            core,
            plus_sym,
            tilde: RealField::zeros(grid),
        })
    }

    pub fn fft(&mut self) -> &mut Fft2d {
        &mut self.core.fft
    }

    pub fn modified_energy(&self, state: &SavState) -> f64 {
        0.5 * quadratic_form(&self.core.l_sym, &state.phi_hat) + state.r * state.r
    }

    pub fn set_lean_diagnostics(&mut self, on: bool) {
        self.core.lean = on;
    }

    /// Semi-implicit half-step predictor, shared with the E-SAV CN scheme.
    fn bootstrap_tilde(&mut self, state: &SavState) -> Result<()> {
        let core = &mut self.core;
        let lambda = core.model.lambda();
        for (b, v) in core.b.values_mut().iter_mut().zip(state.phi.values()) {
            *b = lambda * core.model.f_prime_scalar(*v);
        }
        core.fft.forward_into(&core.b, &mut core.b_hat)?;
        crate::schemes::fused_solve(
            state.phi_hat.data(),
            &core.g_sym,
            core.b_hat.data(),
            0.5 * core.dt,
            &core.inv_denom,
            core.next_hat.data_mut(),
        );
        core.fft.backward_into(&core.next_hat, &mut core.next_phi)?;
        std::mem::swap(&mut self.tilde, &mut core.next_phi);
        Ok(())
    }

    pub fn step(&mut self, mut state: SavState) -> Result<(SavState, StepDiagnostics)> {
        let mut bootstrap_solves = 0;
        if let Some(prev) = state.phi_prev.as_ref() {
            for ((t, a), b) in self
                .tilde
                .values_mut()
                .iter_mut()
                .zip(state.phi.values())
                .zip(prev.values())
            {
                *t = 1.5 * a - 0.5 * b;
            }
        } else {
            self.bootstrap_tilde(&state)?;
            bootstrap_solves = 1;
        }
        let core = &mut self.core;
        let e1_tilde = core.model.e1(&self.tilde);
        core.load_b(&self.tilde, e1_tilde, state.c_shift)?;

        // solve 1: phi1 = (I - dt/2 G L)^{-1} (I + dt/2 G L) phi^n
        for (((p1, p), ps), inv) in core
            .phi1_hat
            .data_mut()
            .iter_mut()
            .zip(state.phi_hat.data())
            .zip(&self.plus_sym)
            .zip(&core.inv_denom)
        {
            *p1 = p * (ps * inv);
        }
        // solve 2: phi2 = dt (I - dt/2 G L)^{-1} G b
        core.solve_phi2();

        // r^{n+1} = r^n + (b, phi1 - phi^n)/2 + (r^{n+1}+r^n)/4 (b, phi2)
        let (p1, p2) = core.reduction_inners(&state.phi_hat);
        let pivot = 1.0 - 0.25 * p2;
        if pivot.abs() < 1e-14 {
            return Err(Error::DegenerateReduction { pivot });
        }
        let r_new = (state.r * (1.0 + 0.25 * p2) + 0.5 * p1) / pivot;

        core.assemble_next(0.5 * (r_new + state.r))?;
        match state.phi_prev.as_mut() {
            Some(prev) => std::mem::swap(prev, &mut state.phi),
            None => state.phi_prev = Some(state.phi.clone()),
        }
        state.r_prev = Some(state.r);
        state.r = r_new;
        state.e1 = core.model.e1(&core.next_phi);
        std::mem::swap(&mut state.phi, &mut core.next_phi);
        std::mem::swap(&mut state.phi_hat, &mut core.next_hat);
        state.step_index += 1;

        let diag = core.diagnostics(&state, 2 + bootstrap_solves);
        Ok((state, diag))
    }
}
