use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::models::{ModelSpec, SurfactantSpec};
use crate::spectral::Grid;

/// Time integrator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeId {
    Esav1,
    EsavCn,
    Sav1,
    SavCn,
    Mesav1,
}

impl SchemeId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "esav1" => Ok(SchemeId::Esav1),
            "esav-cn" => Ok(SchemeId::EsavCn),
            "sav1" => Ok(SchemeId::Sav1),
            "sav-cn" => Ok(SchemeId::SavCn),
            "mesav1" => Ok(SchemeId::Mesav1),
            other => Err(Error::Validation(format!(
                "unknown scheme `{other}` (expected esav1 | esav-cn | sav1 | sav-cn | mesav1)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeId::Esav1 => "esav1",
            SchemeId::EsavCn => "esav-cn",
            SchemeId::Sav1 => "sav1",
            SchemeId::SavCn => "sav-cn",
            SchemeId::Mesav1 => "mesav1",
        }
    }

    /// The baseline this scheme is compared against (and vice versa).
    pub fn comparison_partner(&self) -> Option<SchemeId> {
        match self {
            SchemeId::Esav1 => Some(SchemeId::Sav1),
            SchemeId::EsavCn => Some(SchemeId::SavCn),
            SchemeId::Sav1 => Some(SchemeId::Esav1),
            SchemeId::SavCn => Some(SchemeId::EsavCn),
            SchemeId::Mesav1 => None,
        }
    }

    pub fn formal_order(&self) -> f64 {
        match self {
            SchemeId::Esav1 | SchemeId::Sav1 | SchemeId::Mesav1 => 1.0,
            SchemeId::EsavCn | SchemeId::SavCn => 2.0,
        }
    }
}

/// Either a scalar phase-field model or the coupled surfactant system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelChoice {
    Scalar(ModelSpec),
    Surfactant(SurfactantSpec),
}

impl ModelChoice {
    pub fn name(&self) -> &'static str {
        match self {
            ModelChoice::Scalar(m) => m.name(),
            ModelChoice::Surfactant(_) => "surfactant",
        }
    }
}

/// A fully deterministic experiment description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Preset this config was derived from, if any.
    pub example: Option<String>,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub model: ModelChoice,
    pub scheme: SchemeId,
    pub dt: f64,
    pub t_final: f64,
    /// E-SAV scaling constant; `None` means `max(1, |E1(phi^0)|)`.
    pub c_scale: Option<f64>,
    /// SAV shift constant under the square root.
    pub c_shift: f64,
    pub seed: u64,
    pub ic: String,
    pub out_dir: Option<PathBuf>,
    pub snapshot_times: Vec<f64>,
    /// Trace row every `trace_cadence` steps; 0 means auto (~1000 rows).
    pub trace_cadence: usize,
    /// Run the in-loop invariant monitors (energy monotonicity, mass).
    pub checks: bool,
    pub solver_tol: f64,
    pub solver_max_iters: usize,
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.nx, self.ny, self.lx, self.ly)
    }

    /// Number of uniform steps; `dt` must divide `t_final` to within 1e-6
    /// relative.
    pub fn n_steps(&self) -> Result<usize> {
        let n = (self.t_final / self.dt).round();
        if n < 1.0 {
            return Err(Error::Validation(format!(
                "dt = {} exceeds t_final = {}",
                self.dt, self.t_final
            )));
        }
        if (n * self.dt - self.t_final).abs() > 1e-6 * self.t_final.max(self.dt) {
            return Err(Error::Validation(format!(
                "dt = {} does not divide t_final = {}",
                self.dt, self.t_final
            )));
        }
        Ok(n as usize)
    }

    /// Effective trace cadence (auto mode caps the file near 1000 rows).
    pub fn effective_cadence(&self) -> Result<usize> {
        if self.trace_cadence > 0 {
            return Ok(self.trace_cadence);
        }
        Ok((self.n_steps()? / 1000).max(1))
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        match &self.model {
            ModelChoice::Scalar(m) => m.validate()?,
            ModelChoice::Surfactant(s) => s.validate()?,
        }
        let surfactant = matches!(self.model, ModelChoice::Surfactant(_));
        let mesav = self.scheme == SchemeId::Mesav1;
        if surfactant != mesav {
            return Err(Error::Validation(format!(
                "scheme `{}` does not integrate model `{}`",
                self.scheme.as_str(),
                self.model.name()
            )));
        }
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::Validation(format!("dt must be positive: {}", self.dt)));
        }
        if !self.t_final.is_finite() || self.t_final < self.dt {
            return Err(Error::Validation(format!(
                "t_final = {} must be at least dt = {}",
                self.t_final, self.dt
            )));
        }
        self.n_steps()?;
        for &t in &self.snapshot_times {
            if !(0.0..=self.t_final).contains(&t) {
                return Err(Error::Validation(format!(
                    "snapshot time {t} outside [0, {}]",
                    self.t_final
                )));
            }
        }
        if let Some(c) = self.c_scale {
            if !c.is_finite() || c <= 0.0 {
                return Err(Error::Validation(format!("c_scale must be positive: {c}")));
            }
        }
        if !self.c_shift.is_finite() || self.c_shift < 0.0 {
            return Err(Error::Validation(format!(
                "c_shift must be non-negative: {}",
                self.c_shift
            )));
        }
        if self.solver_tol <= 0.0 || self.solver_tol.is_nan() || self.solver_max_iters == 0 {
            return Err(Error::Validation(
                "solver_tol must be positive and solver_max_iters nonzero".into(),
            ));
        }
        Ok(())
    }

    /// Serialize as the `key = value` config format; parsing this back
    /// reproduces the run.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        if let Some(ex) = &self.example {
            s.push_str(&format!("example = {ex}\n"));
        }
        s.push_str(&format!("scheme = {}\n", self.scheme.as_str()));
        s.push_str(&format!("nx = {}\nny = {}\n", self.nx, self.ny));
        s.push_str(&format!("lx = {:.17e}\nly = {:.17e}\n", self.lx, self.ly));
        match &self.model {
            ModelChoice::Scalar(m) => {
                s.push_str(&format!("model = {}\n", m.name()));
                match *m {
                    ModelSpec::AllenCahn { mobility, epsilon }
                    | ModelSpec::CahnHilliard { mobility, epsilon } => {
                        s.push_str(&format!("mobility = {mobility:.17e}\n"));
                        s.push_str(&format!("epsilon = {epsilon:.17e}\n"));
                    }
                    ModelSpec::PhaseFieldCrystal { eps_pfc } => {
                        s.push_str(&format!("eps_pfc = {eps_pfc:.17e}\n"));
                    }
                    ModelSpec::LinearTest { mobility } => {
                        s.push_str(&format!("mobility = {mobility:.17e}\n"));
                    }
                }
            }
            ModelChoice::Surfactant(sp) => {
                s.push_str("model = surfactant\n");
                s.push_str(&format!("m_phi = {:.17e}\n", sp.m_phi));
                s.push_str(&format!("m_rho = {:.17e}\n", sp.m_rho));
                s.push_str(&format!("alpha = {:.17e}\n", sp.alpha));
                s.push_str(&format!("beta = {:.17e}\n", sp.beta));
                s.push_str(&format!("theta = {:.17e}\n", sp.theta));
                s.push_str(&format!("epsilon = {:.17e}\n", sp.epsilon));
                s.push_str(&format!("eta = {:.17e}\n", sp.eta));
                s.push_str(&format!("rho_s = {:.17e}\n", sp.rho_s));
            }
        }
        s.push_str(&format!("dt = {:.17e}\n", self.dt));
        s.push_str(&format!("t_final = {:.17e}\n", self.t_final));
        if let Some(c) = self.c_scale {
            s.push_str(&format!("c_scale = {c:.17e}\n"));
        }
        s.push_str(&format!("c_shift = {:.17e}\n", self.c_shift));
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str(&format!("ic = {}\n", self.ic));
        if !self.snapshot_times.is_empty() {
            let times: Vec<String> = self
                .snapshot_times
                .iter()
                .map(|t| format!("{t:.17e}"))
                .collect();
            s.push_str(&format!("snapshot_times = {}\n", times.join(",")));
        }
        s.push_str(&format!("trace_cadence = {}\n", self.trace_cadence));
        s.push_str(&format!("checks = {}\n", self.checks));
        s.push_str(&format!("solver_tol = {:.17e}\n", self.solver_tol));
        s.push_str(&format!("solver_max_iters = {}\n", self.solver_max_iters));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::examples::preset;

    #[test]
    fn dt_longer_than_t_final_is_rejected() {
        let mut cfg = preset("example1").unwrap();
        cfg.dt = 1.0;
        cfg.t_final = 0.5;
        assert!(matches!(cfg.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn snapshot_outside_horizon_is_rejected() {
        let mut cfg = preset("example1").unwrap();
        cfg.snapshot_times = vec![1e9];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn scheme_model_mismatch_is_rejected() {
        let mut cfg = preset("example1").unwrap();
        cfg.scheme = SchemeId::Mesav1;
        assert!(cfg.validate().is_err());
        let mut cfg = preset("example6").unwrap();
        cfg.scheme = SchemeId::Esav1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn nonuniform_dt_is_rejected() {
        let mut cfg = preset("example1").unwrap();
        cfg.dt = 0.4;
        cfg.t_final = 1.0;
        assert!(cfg.validate().is_err());
    }
}
