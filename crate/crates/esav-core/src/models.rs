//! Phase-field model catalog: nonlinear potentials, their derivatives,
//! the linear-operator and metric symbols, and the energy functionals.

use crate::error::{Error, Result};
use crate::spectral::quadrature::{self, quadratic_form, sum_map};
use crate::spectral::{Fft2d, Grid, Multiplier, RealField};

/// A scalar phase-field model. `lambda` is the coefficient multiplying the
/// potential integral in the nonlinear energy `E1 = lambda * int F(phi)`.
///
/// The gradient flow is `phi_t = G (L phi + lambda F'(phi))` with `L >= 0`
/// and `G <= 0` diagonal in Fourier space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    /// `F = (phi^2-1)^2/4`, `L = |k|^2`, `G = -M`, `lambda = 1/eps^2`.
    AllenCahn { mobility: f64, epsilon: f64 },
    /// `F = (phi^2-1)^2/4`, `L = eps |k|^2`, `G = -M |k|^2`, `lambda = 1/eps`.
    CahnHilliard { mobility: f64, epsilon: f64 },
    /// Swift-Hohenberg energy split as `L = (1 - |k|^2)^2`,
    /// `F = phi^4/4 - (eps/2) phi^2`, `G = -|k|^2`, `lambda = 1`.
    ///
    /// The concave `-eps/2 phi^2` part rides on the nonlinear side so the
    /// quadratic operator stays non-negative.
    PhaseFieldCrystal { eps_pfc: f64 },
    /// `F = 0`: pure heat-type decay with closed-form amplification factors.
    LinearTest { mobility: f64 },
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ModelSpec::AllenCahn { mobility, epsilon }
            | ModelSpec::CahnHilliard { mobility, epsilon } => {
                mobility.is_finite() && mobility > 0.0 && epsilon.is_finite() && epsilon > 0.0
            }
            ModelSpec::PhaseFieldCrystal { eps_pfc } => eps_pfc.is_finite() && eps_pfc > 0.0,
            ModelSpec::LinearTest { mobility } => mobility.is_finite() && mobility > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!("bad model parameters: {self:?}")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::AllenCahn { .. } => "allen-cahn",
            ModelSpec::CahnHilliard { .. } => "cahn-hilliard",
            ModelSpec::PhaseFieldCrystal { .. } => "pfc",
            ModelSpec::LinearTest { .. } => "linear-test",
        }
    }

    /// Scale of the nonlinear energy `E1 = lambda * int F`.
    pub fn lambda(&self) -> f64 {
        match *self {
            ModelSpec::AllenCahn { epsilon, .. } => 1.0 / (epsilon * epsilon),
            ModelSpec::CahnHilliard { epsilon, .. } => 1.0 / epsilon,
            ModelSpec::PhaseFieldCrystal { .. } => 1.0,
            ModelSpec::LinearTest { .. } => 0.0,
        }
    }

    /// Whether the metric operator vanishes at the zero mode (conserved flow).
    pub fn is_conservative(&self) -> bool {
        !matches!(
            self,
            ModelSpec::AllenCahn { .. } | ModelSpec::LinearTest { .. }
        )
    }

    #[inline]
    pub(crate) fn f_scalar(&self, v: f64) -> f64 {
        match *self {
            ModelSpec::AllenCahn { .. } | ModelSpec::CahnHilliard { .. } => {
                let w = v * v - 1.0;
                0.25 * w * w
            }
            ModelSpec::PhaseFieldCrystal { eps_pfc } => {
                0.25 * v * v * v * v - 0.5 * eps_pfc * v * v
            }
            ModelSpec::LinearTest { .. } => 0.0,
        }
    }

    #[inline]
    pub(crate) fn f_prime_scalar(&self, v: f64) -> f64 {
        match *self {
            ModelSpec::AllenCahn { .. } | ModelSpec::CahnHilliard { .. } => v * (v * v - 1.0),
            ModelSpec::PhaseFieldCrystal { eps_pfc } => v * v * v - eps_pfc * v,
            ModelSpec::LinearTest { .. } => 0.0,
        }
    }

    /// Pointwise potential density `F(phi)`.
    pub fn f_value(&self, phi: &RealField) -> RealField {
        let mut out = phi.clone();
        for v in out.values_mut() {
            *v = self.f_scalar(*v);
        }
        out
    }

    /// Pointwise potential derivative `F'(phi)`.
    pub fn f_prime(&self, phi: &RealField) -> RealField {
        let mut out = phi.clone();
        for v in out.values_mut() {
            *v = self.f_prime_scalar(*v);
        }
        out
    }

    /// Scaled nonlinear energy `E1(phi) = lambda * int F(phi)`.
    pub fn e1(&self, phi: &RealField) -> f64 {
        if matches!(self, ModelSpec::LinearTest { .. }) {
            return 0.0;
        }
        self.lambda() * phi.grid().cell_area() * sum_map(phi.values(), |v| self.f_scalar(v))
    }

    /// Symbol of the non-negative linear operator `L`.
    pub fn l_symbol(&self, grid: Grid) -> Multiplier {
        let m = match *self {
            ModelSpec::AllenCahn { .. } | ModelSpec::LinearTest { .. } => {
                Multiplier::from_fn(grid, |kx, ky| kx * kx + ky * ky)
            }
            ModelSpec::CahnHilliard { epsilon, .. } => {
                Multiplier::from_fn(grid, move |kx, ky| epsilon * (kx * kx + ky * ky))
            }
            ModelSpec::PhaseFieldCrystal { .. } => Multiplier::from_fn(grid, |kx, ky| {
                let w = 1.0 - (kx * kx + ky * ky);
                w * w
            }),
        };
        m.expect("polynomial symbols are finite")
    }

    /// Symbol of the non-positive metric operator `G`.
    pub fn g_symbol(&self, grid: Grid) -> Multiplier {
        let m = match *self {
            ModelSpec::AllenCahn { mobility, .. } | ModelSpec::LinearTest { mobility } => {
                Multiplier::from_fn(grid, move |_, _| -mobility)
            }
            ModelSpec::CahnHilliard { mobility, .. } => {
                Multiplier::from_fn(grid, move |kx, ky| -mobility * (kx * kx + ky * ky))
            }
            ModelSpec::PhaseFieldCrystal { .. } => {
                Multiplier::from_fn(grid, |kx, ky| -(kx * kx + ky * ky))
            }
        };
        m.expect("polynomial symbols are finite")
    }

    /// Original free energy `E(phi) = 1/2 (phi, L phi) + E1(phi)`.
    pub fn original_energy(&self, fft: &mut Fft2d, phi: &RealField) -> Result<f64> {
        let spec = fft.forward(phi)?;
        let l = self.l_symbol(phi.grid());
        Ok(0.5 * quadratic_form(l.symbol(), &spec) + self.e1(phi))
    }
}

/// Parameters of the binary fluid-surfactant system (two coupled
/// Cahn-Hilliard equations).
///
/// Potentials: `F(phi) = (phi^2-1)^2`, `G(rho) = rho^2 (rho - rho_s)^2`,
/// entering the energy with weights `1/(4 eps^2)` and `1/(4 eta^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfactantSpec {
    pub m_phi: f64,
    pub m_rho: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub rho_s: f64,
}

impl Default for SurfactantSpec {
    fn default() -> Self {
        SurfactantSpec {
            m_phi: 2.5e-4,
            m_rho: 2.5e-4,
            alpha: 2.5e-4,
            beta: 1.0,
            theta: 0.3,
            epsilon: 0.05,
            eta: 0.08,
            rho_s: 1.0,
        }
    }
}

impl SurfactantSpec {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.m_phi,
            self.m_rho,
            self.alpha,
            self.beta,
            self.theta,
            self.epsilon,
            self.eta,
            self.rho_s,
        ];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "surfactant parameters must be finite and positive: {self:?}"
            )))
        }
    }

    #[inline]
    pub(crate) fn f_scalar(&self, v: f64) -> f64 {
        let w = v * v - 1.0;
        w * w
    }

    #[inline]
    pub(crate) fn f_prime_scalar(&self, v: f64) -> f64 {
        4.0 * v * (v * v - 1.0)
    }

    #[inline]
    pub(crate) fn g_scalar(&self, v: f64) -> f64 {
        let w = v - self.rho_s;
        v * v * w * w
    }

    #[inline]
    pub(crate) fn g_prime_scalar(&self, v: f64) -> f64 {
        let w = v - self.rho_s;
        2.0 * v * w * w + 2.0 * v * v * w
    }

    pub fn f_prime(&self, phi: &RealField) -> RealField {
        let mut out = phi.clone();
        for v in out.values_mut() {
            *v = self.f_prime_scalar(*v);
        }
        out
    }

    pub fn g_prime(&self, rho: &RealField) -> RealField {
        let mut out = rho.clone();
        for v in out.values_mut() {
            *v = self.g_prime_scalar(*v);
        }
        out
    }

    /// Unscaled `E_F = int F(phi)`.
    pub fn e_f(&self, phi: &RealField) -> f64 {
        phi.grid().cell_area() * sum_map(phi.values(), |v| self.f_scalar(v))
    }

    /// Unscaled `E_G = int G(rho)`.
    pub fn e_g(&self, rho: &RealField) -> f64 {
        rho.grid().cell_area() * sum_map(rho.values(), |v| self.g_scalar(v))
    }

    /// `L_phi = |k|^2 + alpha |k|^4`.
    pub fn phi_l_symbol(&self, grid: Grid) -> Multiplier {
        let alpha = self.alpha;
        Multiplier::from_fn(grid, move |kx, ky| {
            let k2 = kx * kx + ky * ky;
            k2 + alpha * k2 * k2
        })
        .expect("polynomial symbols are finite")
    }

    /// `G_phi = -M_phi |k|^2`.
    pub fn phi_g_symbol(&self, grid: Grid) -> Multiplier {
        let m = self.m_phi;
        Multiplier::from_fn(grid, move |kx, ky| -m * (kx * kx + ky * ky))
            .expect("polynomial symbols are finite")
    }

    /// `L_rho = beta |k|^2`.
    pub fn rho_l_symbol(&self, grid: Grid) -> Multiplier {
        let beta = self.beta;
        Multiplier::from_fn(grid, move |kx, ky| beta * (kx * kx + ky * ky))
            .expect("polynomial symbols are finite")
    }

    /// `G_rho = -M_rho |k|^2`.
    pub fn rho_g_symbol(&self, grid: Grid) -> Multiplier {
        let m = self.m_rho;
        Multiplier::from_fn(grid, move |kx, ky| -m * (kx * kx + ky * ky))
            .expect("polynomial symbols are finite")
    }

    /// Full free energy of the coupled system, all derivatives spectral:
    /// `int( |grad phi|^2/2 + alpha (lap phi)^2/2 + beta |grad rho|^2/2
    ///       - theta rho |grad phi|^2 ) + E_F/(4 eps^2) + E_G/(4 eta^2)`.
    pub fn original_energy(
        &self,
        fft: &mut Fft2d,
        phi: &RealField,
        rho: &RealField,
    ) -> Result<f64> {
        phi.check_same_grid(rho, "surfactant energy")?;
        let grid = phi.grid();
        let phi_hat = fft.forward(phi)?;
        let rho_hat = fft.forward(rho)?;
        let quad = 0.5 * quadratic_form(self.phi_l_symbol(grid).symbol(), &phi_hat)
            + 0.5 * quadratic_form(self.rho_l_symbol(grid).symbol(), &rho_hat);
        let gx = fft.gradient_x_from_spec(&phi_hat)?;
        let gy = fft.gradient_y_from_spec(&phi_hat)?;
        let mut grad_sq = gx;
        for (g, h) in grad_sq.values_mut().iter_mut().zip(gy.values()) {
            *g = *g * *g + *h * *h;
        }
        let coupling = quadrature::inner(&grad_sq, rho)?;
        Ok(quad - self.theta * coupling
            + self.e_f(phi) / (4.0 * self.epsilon * self.epsilon)
            + self.e_g(rho) / (4.0 * self.eta * self.eta))
    }
}
