use crate::error::{Error, Result};
use crate::models::SurfactantSpec;
use crate::schemes::{
    fused_solve, guarded_exp, implicit_inverse, spectral_rel_update, StepDiagnostics,
};
use crate::spectral::ops::{derivative_x, derivative_y, divergence_spec};
use crate::spectral::quadrature::{inner, integral, quadratic_form, sum_zip3_map};
use crate::spectral::{Fft2d, Grid, RealField, SpectralField};

/// Inner fixed-point solver settings for the variable-coefficient phi step.
#[derive(Debug, Clone, Copy)]
pub struct SurfactantSolverCfg {
    /// Relative-update stopping tolerance.
    pub tol: f64,
    /// Iteration cap before the step errors out.
    pub max_iters: usize,
}

impl Default for SurfactantSolverCfg {
    fn default() -> Self {
        SurfactantSolverCfg {
            tol: 1e-11,
            max_iters: 200,
        }
    }
}

/// State of the two-step decoupled scheme for the coupled fluid-surfactant
/// system: two fields and two log-space auxiliary variables
/// `s_r = ln r` (for `E_F`) and `s_q = ln q` (for `E_G`).
#[derive(Debug, Clone)]
pub struct SurfactantState {
    pub(crate) phi: RealField,
    pub(crate) rho: RealField,
    pub(crate) phi_hat: SpectralField,
    pub(crate) rho_hat: SpectralField,
    pub(crate) s_r: f64,
    pub(crate) s_q: f64,
    pub(crate) step_index: usize,
    pub(crate) e_f: f64,
    pub(crate) e_g: f64,
    /// Cached gradient of the current phi, reused across substeps.
    pub(crate) grad_x: RealField,
    pub(crate) grad_y: RealField,
}

impl SurfactantState {
    /// Initialize with `s_r = E_F(phi^0)` and `s_q = E_G(rho^0)`, the log
    /// forms of `r|0 = exp(E_F)`, `q|0 = exp(E_G)`.
    pub fn new(
        fft: &mut Fft2d,
        spec: &SurfactantSpec,
        phi: RealField,
        rho: RealField,
    ) -> Result<Self> {
        spec.validate()?;
        phi.check_same_grid(&rho, "surfactant state")?;
        if !phi.is_finite() || !rho.is_finite() {
            return Err(Error::NonFinite("initial fields".into()));
        }
        let e_f = spec.e_f(&phi);
        let e_g = spec.e_g(&rho);
        let phi_hat = fft.forward(&phi)?;
        let rho_hat = fft.forward(&rho)?;
        let grad_x = fft.gradient_x_from_spec(&phi_hat)?;
        let grad_y = fft.gradient_y_from_spec(&phi_hat)?;
        Ok(SurfactantState {
            phi,
            rho,
            phi_hat,
            rho_hat,
            s_r: e_f,
            s_q: e_g,
            step_index: 0,
            e_f,
            e_g,
            grad_x,
            grad_y,
        })
    }

    pub fn phi(&self) -> &RealField {
        &self.phi
    }

    pub fn rho(&self) -> &RealField {
        &self.rho
    }

    pub fn s_r(&self) -> f64 {
        self.s_r
    }

    pub fn s_q(&self) -> f64 {
        self.s_q
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }
}

/// First-order two-step decoupled scheme: a constant-coefficient solve for
/// `rho^{n+1}`, then a spectrally preconditioned fixed-point iteration for
/// the variable-coefficient `phi^{n+1}` system.
///
/// The `theta |grad phi|^2` term enters `mu_rho` with the minus sign of the
/// energy's variational derivative; the modified energy below is then
/// provably non-increasing (the published statement carries a sign typo).
pub struct SurfactantScheme {
    spec: SurfactantSpec,
    grid: Grid,
    dt: f64,
    solver: SurfactantSolverCfg,
    fft: Fft2d,
    l_phi: Vec<f64>,
    g_phi: Vec<f64>,
    l_rho: Vec<f64>,
    g_rho: Vec<f64>,
    inv_phi: Vec<f64>,
    inv_rho: Vec<f64>,
    // work areas
    work: RealField,
    work_hat: SpectralField,
    b: RealField,
    rhs_hat: SpectralField,
    iter_hat: SpectralField,
    iter_prev_hat: SpectralField,
    wx: RealField,
    wy: RealField,
    wx_hat: SpectralField,
    wy_hat: SpectralField,
    div_hat: SpectralField,
    next_rho: RealField,
    next_rho_hat: SpectralField,
    next_phi: RealField,
    gx_new: RealField,
    gy_new: RealField,
}

impl SurfactantScheme {
    pub fn new(
        spec: SurfactantSpec,
        grid: Grid,
        dt: f64,
        solver: SurfactantSolverCfg,
    ) -> Result<Self> {
        spec.validate()?;
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::Validation(format!("dt must be positive, got {dt}")));
        }
        if solver.tol <= 0.0 || solver.tol.is_nan() || solver.max_iters == 0 {
            return Err(Error::Validation(
                "inner solver needs tol > 0 and max_iters > 0".into(),
            ));
        }
        let l_phi = spec.phi_l_symbol(grid).symbol().to_vec();
        let g_phi = spec.phi_g_symbol(grid).symbol().to_vec();
        let l_rho = spec.rho_l_symbol(grid).symbol().to_vec();
        let g_rho = spec.rho_g_symbol(grid).symbol().to_vec();
        let inv_phi = implicit_inverse(grid, &g_phi, &l_phi, dt)?;
        let inv_rho = implicit_inverse(grid, &g_rho, &l_rho, dt)?;
        Ok(SurfactantScheme {
            spec,
            grid,
            dt,
            solver,
            fft: Fft2d::new(grid),
            l_phi,
            g_phi,
            l_rho,
            g_rho,
            inv_phi,
            inv_rho,
            work: RealField::zeros(grid),
            work_hat: SpectralField::zeros(grid),
            b: RealField::zeros(grid),
            rhs_hat: SpectralField::zeros(grid),
            iter_hat: SpectralField::zeros(grid),
            iter_prev_hat: SpectralField::zeros(grid),
            wx: RealField::zeros(grid),
            wy: RealField::zeros(grid),
            wx_hat: SpectralField::zeros(grid),
            wy_hat: SpectralField::zeros(grid),
            div_hat: SpectralField::zeros(grid),
            next_rho: RealField::zeros(grid),
            next_rho_hat: SpectralField::zeros(grid),
            next_phi: RealField::zeros(grid),
            gx_new: RealField::zeros(grid),
            gy_new: RealField::zeros(grid),
        })
    }

    pub fn fft(&mut self) -> &mut Fft2d {
        &mut self.fft
    }

    pub fn spec(&self) -> &SurfactantSpec {
        &self.spec
    }

    /// Modified discrete energy of the scheme:
    /// `|grad phi|^2/2 + alpha (lap phi)^2/2 + beta |grad rho|^2/2
    ///  - theta (|grad phi|^2, rho) + s_r/(4 eps^2) + s_q/(4 eta^2)`.
    pub fn modified_energy(&self, state: &SurfactantState) -> f64 {
        let quad = 0.5 * quadratic_form(&self.l_phi, &state.phi_hat)
            + 0.5 * quadratic_form(&self.l_rho, &state.rho_hat);
        let coupling = state.grid_coupling();
        quad - self.spec.theta * coupling
            + state.s_r / (4.0 * self.spec.epsilon * self.spec.epsilon)
            + state.s_q / (4.0 * self.spec.eta * self.spec.eta)
    }

    /// Original free energy of the state (replaces the log variables by the
    /// potential integrals themselves).
    pub fn original_energy(&self, state: &SurfactantState) -> f64 {
        let quad = 0.5 * quadratic_form(&self.l_phi, &state.phi_hat)
            + 0.5 * quadratic_form(&self.l_rho, &state.rho_hat);
        quad - self.spec.theta * state.grid_coupling()
            + state.e_f / (4.0 * self.spec.epsilon * self.spec.epsilon)
            + state.e_g / (4.0 * self.spec.eta * self.spec.eta)
    }

    pub fn step(&mut self, mut state: SurfactantState) -> Result<(SurfactantState, StepDiagnostics)> {
        if state.phi.grid() != self.grid {
            return Err(Error::GridMismatch("state grid vs scheme grid".into()));
        }
        let four_eta2 = 4.0 * self.spec.eta * self.spec.eta;
        let four_eps2 = 4.0 * self.spec.epsilon * self.spec.epsilon;

        // ---- Step I: rho, constant-coefficient implicit solve ----
        let arg_q = state.s_q - state.e_g;
        let ratio_q = guarded_exp(arg_q)?;
        // d = ratio_q * G'(rho^n); w = d/(4 eta^2) - theta |grad phi^n|^2
        let theta = self.spec.theta;
        {
            let d_vals = self.b.values_mut();
            for (d, r) in d_vals.iter_mut().zip(state.rho.values()) {
                *d = ratio_q * self.spec.g_prime_scalar(*r);
            }
            let w = self.work.values_mut();
            for (((w, d), gx), gy) in w
                .iter_mut()
                .zip(self.b.values())
                .zip(state.grad_x.values())
                .zip(state.grad_y.values())
            {
                *w = *d / four_eta2 - theta * (gx * gx + gy * gy);
            }
        }
        self.fft.forward_into(&self.work, &mut self.work_hat)?;
        fused_solve(
            state.rho_hat.data(),
            &self.g_rho,
            self.work_hat.data(),
            self.dt,
            &self.inv_rho,
            self.next_rho_hat.data_mut(),
        );
        self.fft.backward_into(&self.next_rho_hat, &mut self.next_rho)?;
        let ds_q = self.grid.cell_area()
            * sum_zip3_map(
                self.b.values(),
                self.next_rho.values(),
                state.rho.values(),
                |d, new, old| d * (new - old),
            );

        // ---- Step II: phi, fixed-point on the theta coupling ----
        let arg_r = state.s_r - state.e_f;
        let ratio_r = guarded_exp(arg_r)?;
        for (b, v) in self.b.values_mut().iter_mut().zip(state.phi.values()) {
            *b = ratio_r * self.spec.f_prime_scalar(*v);
        }
        self.fft.forward_into(&self.b, &mut self.work_hat)?;
        // rhs_hat = phi_hat + dt g_phi (b/(4 eps^2))^
        fused_solve_identityless(
            state.phi_hat.data(),
            &self.g_phi,
            self.work_hat.data(),
            self.dt / four_eps2,
            self.rhs_hat.data_mut(),
        );

        self.iter_hat.data_mut().copy_from_slice(state.phi_hat.data());
        let mut iters = 0;
        let update;
        let two_theta = 2.0 * theta;
        loop {
            // grad of the current iterate; first pass reuses the cached
            // gradient of phi^n
            if iters == 0 {
                self.gx_new.values_mut().copy_from_slice(state.grad_x.values());
                self.gy_new.values_mut().copy_from_slice(state.grad_y.values());
            } else {
                derivative_x(self.grid, &self.iter_hat, &mut self.wx_hat);
                derivative_y(self.grid, &self.iter_hat, &mut self.wy_hat);
                self.fft.backward_into(&self.wx_hat, &mut self.gx_new)?;
                self.fft.backward_into(&self.wy_hat, &mut self.gy_new)?;
            }
            // w = rho^{n+1} * grad((phi_m + phi^n)/2)
            for (((w, gm), gn), r) in self
                .wx
                .values_mut()
                .iter_mut()
                .zip(self.gx_new.values())
                .zip(state.grad_x.values())
                .zip(self.next_rho.values())
            {
                *w = 0.5 * (gm + gn) * r;
            }
            for (((w, gm), gn), r) in self
                .wy
                .values_mut()
                .iter_mut()
                .zip(self.gy_new.values())
                .zip(state.grad_y.values())
                .zip(self.next_rho.values())
            {
                *w = 0.5 * (gm + gn) * r;
            }
            self.fft.forward_into(&self.wx, &mut self.wx_hat)?;
            self.fft.forward_into(&self.wy, &mut self.wy_hat)?;
            divergence_spec(self.grid, &self.wx_hat, &self.wy_hat, &mut self.div_hat);

            std::mem::swap(&mut self.iter_hat, &mut self.iter_prev_hat);
            fused_solve(
                self.rhs_hat.data(),
                &self.g_phi,
                self.div_hat.data(),
                self.dt * two_theta,
                &self.inv_phi,
                self.iter_hat.data_mut(),
            );
            iters += 1;
            let rel = spectral_rel_update(self.grid, self.iter_hat.data(), self.iter_prev_hat.data());
            if rel <= self.solver.tol {
                update = rel;
                break;
            }
            if iters >= self.solver.max_iters {
                return Err(Error::IterationLimit {
                    iters,
                    residual: rel,
                });
            }
        }
        self.fft.backward_into(&self.iter_hat, &mut self.next_phi)?;
        let ds_r = self.grid.cell_area()
            * sum_zip3_map(
                self.b.values(),
                self.next_phi.values(),
                state.phi.values(),
                |b, new, old| b * (new - old),
            );

        // fresh gradient of phi^{n+1}, cached for the next step
        derivative_x(self.grid, &self.iter_hat, &mut self.wx_hat);
        derivative_y(self.grid, &self.iter_hat, &mut self.wy_hat);
        self.fft.backward_into(&self.wx_hat, &mut self.gx_new)?;
        self.fft.backward_into(&self.wy_hat, &mut self.gy_new)?;

        // coupling-term ledger identity, evaluated with independent inner
        // products:
        //   (g_n, rho^{n+1} - rho^n) + (g_{n+1} - g_n, rho^{n+1})
        //   = (g_{n+1}, rho^{n+1}) - (g_n, rho^n)
        let gsq_old = |gx: &RealField, gy: &RealField, out: &mut RealField| {
            for ((o, x), y) in out.values_mut().iter_mut().zip(gx.values()).zip(gy.values()) {
                *o = x * x + y * y;
            }
        };
        gsq_old(&state.grad_x, &state.grad_y, &mut self.work);
        let gn_rho_new = inner(&self.work, &self.next_rho)?;
        let gn_rho_old = inner(&self.work, &state.rho)?;
        gsq_old(&self.gx_new, &self.gy_new, &mut self.work);
        let gnew_rho_new = inner(&self.work, &self.next_rho)?;
        let lhs = (gn_rho_new - gn_rho_old) + (gnew_rho_new - gn_rho_new);
        let rhs = gnew_rho_new - gn_rho_old;
        let ledger_residual = (lhs - rhs).abs() / rhs.abs().max(1.0);

        // commit the new state
        state.s_q += ds_q;
        state.s_r += ds_r;
        std::mem::swap(&mut state.rho, &mut self.next_rho);
        std::mem::swap(&mut state.rho_hat, &mut self.next_rho_hat);
        std::mem::swap(&mut state.phi, &mut self.next_phi);
        std::mem::swap(&mut state.phi_hat, &mut self.iter_hat);
        std::mem::swap(&mut state.grad_x, &mut self.gx_new);
        std::mem::swap(&mut state.grad_y, &mut self.gy_new);
        state.e_f = self.spec.e_f(&state.phi);
        state.e_g = self.spec.e_g(&state.rho);
        state.step_index += 1;

        let diag = StepDiagnostics {
            original_energy: self.original_energy(&state),
            modified_energy: self.modified_energy(&state),
            mass: integral(&state.phi),
            mass_rho: Some(integral(&state.rho)),
            inner_solver_iterations: iters,
            inner_final_update: update,
            linear_solves_performed: 1 + iters,
            max_exponent_arg: arg_q.abs().max(arg_r.abs()),
            aux_primary: state.s_r,
            aux_secondary: Some(state.s_q),
            ledger_residual: Some(ledger_residual),
        };
        Ok((state, diag))
    }
}

impl SurfactantState {
    /// `(|grad phi|^2, rho)` from the cached gradient.
    fn grid_coupling(&self) -> f64 {
        self.phi.grid().cell_area()
            * crate::spectral::quadrature::sum_zip3_map(
                self.grad_x.values(),
                self.grad_y.values(),
                self.rho.values(),
                |gx, gy, r| (gx * gx + gy * gy) * r,
            )
    }
}

/// `out = phi + coef * g .* rhs` (no inverse), building the fixed right side
/// of the phi solve.
fn fused_solve_identityless(
    phi: &[rustfft::num_complex::Complex<f64>],
    g: &[f64],
    rhs: &[rustfft::num_complex::Complex<f64>],
    coef: f64,
    out: &mut [rustfft::num_complex::Complex<f64>],
) {
    for i in 0..out.len() {
        out[i] = phi[i] + rhs[i] * (coef * g[i]);
    }
}
