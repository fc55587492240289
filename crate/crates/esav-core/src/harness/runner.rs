use std::path::PathBuf;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::harness::config::{ModelChoice, RunConfig, SchemeId};
use crate::harness::ic::{initial_condition, IcFields};
use crate::harness::trace::{write_snapshot, TraceWriter};
use crate::models::ModelSpec;
use crate::schemes::{
    EsavCn, EsavFirstOrder, EsavState, SavCn, SavFirstOrder, SavState, StepDiagnostics,
    SurfactantScheme, SurfactantSolverCfg, SurfactantState,
};
use crate::spectral::quadrature::integral;
use crate::spectral::{Fft2d, RealField};

/// How a simulation is executed; `run_simulation` derives this from the
/// config, internal callers (reference runs) tune it.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Write trace/snapshot/config files when the config names an out_dir.
    pub write_output: bool,
    /// Enforce the in-loop invariant monitors.
    pub checks: bool,
    /// Skip per-step energy/mass evaluation entirely (implies no checks,
    /// no trace). Reference runs only need the final field.
    pub lean: bool,
}

impl RunOptions {
    pub fn from_config(cfg: &RunConfig) -> Self {
        RunOptions {
            write_output: cfg.out_dir.is_some(),
            checks: cfg.checks,
            lean: false,
        }
    }

    pub(crate) fn lean_reference() -> Self {
        RunOptions {
            write_output: false,
            checks: false,
            lean: true,
        }
    }
}

/// Everything a finished run reports back.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub steps: usize,
    pub final_phi: RealField,
    pub final_rho: Option<RealField>,
    pub final_original_energy: f64,
    pub final_modified_energy: f64,
    /// Auxiliary scalar at the end (`s`, `r`, or `s_r`).
    pub final_aux: f64,
    /// E-SAV scaling constant actually used (1.0 for other schemes).
    pub c_scale_used: f64,
    pub initial_mass: f64,
    pub max_mass_drift: f64,
    pub total_solves: u64,
    pub max_inner_iters: usize,
    pub max_ledger_residual: f64,
    pub wall_seconds: f64,
    pub trace_path: Option<PathBuf>,
    pub snapshot_paths: Vec<PathBuf>,
}

enum Driver {
    Esav1(Box<EsavFirstOrder>, Option<EsavState>),
    EsavCn(Box<EsavCn>, Option<EsavState>),
    Sav1(Box<SavFirstOrder>, Option<SavState>),
    SavCn(Box<SavCn>, Option<SavState>),
    Mesav1(Box<SurfactantScheme>, Option<SurfactantState>),
}

impl Driver {
    fn build(cfg: &RunConfig, ic: IcFields) -> Result<Driver> {
        let grid = cfg.grid()?;
        let mut fft = Fft2d::new(grid);
        match (&cfg.model, cfg.scheme) {
            (ModelChoice::Scalar(model), SchemeId::Esav1) => {
                let state = EsavState::new(&mut fft, model, take_scalar(ic)?, cfg.c_scale)?;
                let scheme = EsavFirstOrder::new(*model, grid, cfg.dt)?;
                Ok(Driver::Esav1(Box::new(scheme), Some(state)))
            }
            (ModelChoice::Scalar(model), SchemeId::EsavCn) => {
                let state = EsavState::new(&mut fft, model, take_scalar(ic)?, cfg.c_scale)?;
                let scheme = EsavCn::new(*model, grid, cfg.dt)?;
                Ok(Driver::EsavCn(Box::new(scheme), Some(state)))
            }
            (ModelChoice::Scalar(model), SchemeId::Sav1) => {
                let state = SavState::new(&mut fft, model, take_scalar(ic)?, Some(cfg.c_shift))?;
                let scheme = SavFirstOrder::new(*model, grid, cfg.dt)?;
                Ok(Driver::Sav1(Box::new(scheme), Some(state)))
            }
            (ModelChoice::Scalar(model), SchemeId::SavCn) => {
                let state = SavState::new(&mut fft, model, take_scalar(ic)?, Some(cfg.c_shift))?;
                let scheme = SavCn::new(*model, grid, cfg.dt)?;
                Ok(Driver::SavCn(Box::new(scheme), Some(state)))
            }
            (ModelChoice::Surfactant(spec), SchemeId::Mesav1) => {
                let (phi, rho) = match ic {
                    IcFields::Pair(p, r) => (p, r),
                    IcFields::Scalar(_) => {
                        return Err(Error::Validation(
                            "surfactant run needs a two-field initial condition".into(),
                        ))
                    }
                };
                let state = SurfactantState::new(&mut fft, spec, phi, rho)?;
                let solver = SurfactantSolverCfg {
                    tol: cfg.solver_tol,
                    max_iters: cfg.solver_max_iters,
                };
                let scheme = SurfactantScheme::new(*spec, grid, cfg.dt, solver)?;
                Ok(Driver::Mesav1(Box::new(scheme), Some(state)))
            }
            (model, scheme) => Err(Error::Validation(format!(
                "scheme `{}` does not integrate model `{}`",
                scheme.as_str(),
                model.name()
            ))),
        }
    }

    fn set_lean(&mut self, on: bool) {
        match self {
            Driver::Esav1(s, _) => s.set_lean_diagnostics(on),
            Driver::EsavCn(s, _) => s.set_lean_diagnostics(on),
            Driver::Sav1(s, _) => s.set_lean_diagnostics(on),
            Driver::SavCn(s, _) => s.set_lean_diagnostics(on),
            Driver::Mesav1(..) => {}
        }
    }

    fn step(&mut self) -> Result<StepDiagnostics> {
        macro_rules! advance {
            ($scheme:expr, $slot:expr) => {{
                let state = $slot.take().expect("state present between steps");
                let (next, diag) = $scheme.step(state)?;
                *$slot = Some(next);
                Ok(diag)
            }};
        }
        match self {
            Driver::Esav1(s, slot) => advance!(s, slot),
            Driver::EsavCn(s, slot) => advance!(s, slot),
            Driver::Sav1(s, slot) => advance!(s, slot),
            Driver::SavCn(s, slot) => advance!(s, slot),
            Driver::Mesav1(s, slot) => advance!(s, slot),
        }
    }

    fn modified_energy(&self) -> f64 {
        match self {
            Driver::Esav1(s, slot) => s.modified_energy(slot.as_ref().expect("state")),
            Driver::EsavCn(s, slot) => s.modified_energy(slot.as_ref().expect("state")),
            Driver::Sav1(s, slot) => s.modified_energy(slot.as_ref().expect("state")),
            Driver::SavCn(s, slot) => s.modified_energy(slot.as_ref().expect("state")),
            Driver::Mesav1(s, slot) => s.modified_energy(slot.as_ref().expect("state")),
        }
    }

    fn original_energy(&self) -> f64 {
        match self {
            Driver::Esav1(s, slot) => s.original_energy(slot.as_ref().expect("state")),
            Driver::EsavCn(s, slot) => s.original_energy(slot.as_ref().expect("state")),
            Driver::Sav1(s, slot) => {
                let st = slot.as_ref().expect("state");
                s.modified_energy(st) - (st.r() * st.r() - st.e1)
            }
            Driver::SavCn(s, slot) => {
                let st = slot.as_ref().expect("state");
                s.modified_energy(st) - (st.r() * st.r() - st.e1)
            }
            Driver::Mesav1(s, slot) => s.original_energy(slot.as_ref().expect("state")),
        }
    }

    fn phi(&self) -> &RealField {
        match self {
            Driver::Esav1(_, slot) | Driver::EsavCn(_, slot) => {
                slot.as_ref().expect("state").phi()
            }
            Driver::Sav1(_, slot) | Driver::SavCn(_, slot) => slot.as_ref().expect("state").phi(),
            Driver::Mesav1(_, slot) => slot.as_ref().expect("state").phi(),
        }
    }

    fn rho(&self) -> Option<&RealField> {
        match self {
            Driver::Mesav1(_, slot) => Some(slot.as_ref().expect("state").rho()),
            _ => None,
        }
    }

    fn aux(&self) -> (f64, Option<f64>) {
        match self {
            Driver::Esav1(_, slot) | Driver::EsavCn(_, slot) => {
                (slot.as_ref().expect("state").s(), None)
            }
            Driver::Sav1(_, slot) | Driver::SavCn(_, slot) => {
                (slot.as_ref().expect("state").r(), None)
            }
            Driver::Mesav1(_, slot) => {
                let st = slot.as_ref().expect("state");
                (st.s_r(), Some(st.s_q()))
            }
        }
    }

    fn c_scale(&self) -> f64 {
        match self {
            Driver::Esav1(_, slot) | Driver::EsavCn(_, slot) => {
                slot.as_ref().expect("state").c_scale()
            }
            _ => 1.0,
        }
    }
}

fn take_scalar(ic: IcFields) -> Result<RealField> {
    match ic {
        IcFields::Scalar(f) => Ok(f),
        IcFields::Pair(..) => Err(Error::Validation(
            "scalar scheme got a two-field initial condition".into(),
        )),
    }
}

fn ic_epsilon(model: &ModelChoice) -> f64 {
    match model {
        ModelChoice::Scalar(ModelSpec::AllenCahn { epsilon, .. })
        | ModelChoice::Scalar(ModelSpec::CahnHilliard { epsilon, .. }) => *epsilon,
        ModelChoice::Surfactant(s) => s.epsilon,
        _ => 0.01,
    }
}

/// Run a configured simulation from `t = 0` to `t_final`.
///
/// Every step the invariant monitors (when enabled) verify that the modified
/// energy is non-increasing to relative slack 1e-8, that conserved masses
/// stay within 1e-12, and that the auxiliary variables remain finite.
pub fn run_simulation(cfg: &RunConfig) -> Result<RunOutcome> {
    run_with(cfg, RunOptions::from_config(cfg))
}

pub fn run_with(cfg: &RunConfig, opts: RunOptions) -> Result<RunOutcome> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let n_steps = cfg.n_steps()?;
    let cadence = cfg.effective_cadence()?;
    let conservative = match &cfg.model {
        ModelChoice::Scalar(m) => m.is_conservative(),
        ModelChoice::Surfactant(_) => true,
    };

    let ic = initial_condition(&cfg.ic, grid, cfg.seed, ic_epsilon(&cfg.model))?;
    let initial_mass = integral(ic.phi());
    let initial_mass_rho = ic.rho().map(integral);
    let mut driver = Driver::build(cfg, ic)?;
    driver.set_lean(opts.lean);

    // output files
    let pair = matches!(cfg.model, ModelChoice::Surfactant(_));
    let mut trace = None;
    let mut snapshot_paths = Vec::new();
    let mut snapshot_steps: Vec<(usize, f64)> = Vec::new();
    if opts.write_output {
        if let Some(dir) = &cfg.out_dir {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("effective.cfg"), cfg.to_config_text())?;
            trace = Some(TraceWriter::create(&dir.join("trace.csv"), pair)?);
            snapshot_steps = cfg
                .snapshot_times
                .iter()
                .map(|&t| ((t / cfg.dt).round() as usize).min(n_steps))
                .zip(cfg.snapshot_times.iter().copied())
                .collect();
        }
    }

    let write_snaps = |step: usize,
                           driver: &Driver,
                           paths: &mut Vec<PathBuf>|
     -> Result<()> {
        if let Some(dir) = &cfg.out_dir {
            let t = step as f64 * cfg.dt;
            for (snap_step, _) in snapshot_steps.iter().filter(|(s, _)| *s == step) {
                let p = dir.join(format!("snap_phi_{snap_step:08}.bin"));
                write_snapshot(&p, driver.phi(), t)?;
                paths.push(p);
                if let Some(rho) = driver.rho() {
                    let p = dir.join(format!("snap_rho_{snap_step:08}.bin"));
                    write_snapshot(&p, rho, t)?;
                    paths.push(p);
                }
            }
        }
        Ok(())
    };

    let mut prev_modified = if opts.lean {
        f64::NAN
    } else {
        driver.modified_energy()
    };
    if let Some(tw) = trace.as_mut() {
        let (s_r, s_q) = driver.aux();
        tw.row(
            0.0,
            driver.original_energy(),
            prev_modified,
            s_r,
            s_q,
            initial_mass,
            initial_mass_rho,
            0,
            0,
        )?;
    }
    write_snaps(0, &driver, &mut snapshot_paths)?;

    let mut total_solves: u64 = 0;
    let mut max_inner = 0usize;
    let mut max_drift = 0.0f64;
    let mut max_ledger = 0.0f64;
    let started = Instant::now();

    for step in 1..=n_steps {
        let diag = driver.step()?;
        total_solves += diag.linear_solves_performed as u64;
        max_inner = max_inner.max(diag.inner_solver_iterations);
        if let Some(res) = diag.ledger_residual {
            max_ledger = max_ledger.max(res);
        }

        if !opts.lean {
            if !diag.aux_primary.is_finite() {
                return Err(Error::InvariantViolation(format!(
                    "auxiliary variable became non-finite at step {step}"
                )));
            }
            if opts.checks {
                let slack = 1e-8 * (1.0 + prev_modified.abs());
                if diag.modified_energy > prev_modified + slack {
                    return Err(Error::InvariantViolation(format!(
                        "modified energy increased at step {step}: {:.17e} -> {:.17e} (dt = {})",
                        prev_modified, diag.modified_energy, cfg.dt
                    )));
                }
                if conservative {
                    let drift = (diag.mass - initial_mass).abs();
                    max_drift = max_drift.max(drift);
                    if drift > 1e-12 * (1.0 + initial_mass.abs()) {
                        return Err(Error::InvariantViolation(format!(
                            "mass drifted by {drift:.3e} at step {step}"
                        )));
                    }
                    if let (Some(m0), Some(m)) = (initial_mass_rho, diag.mass_rho) {
                        let drift = (m - m0).abs();
                        if drift > 1e-12 * (1.0 + m0.abs()) {
                            return Err(Error::InvariantViolation(format!(
                                "surfactant mass drifted by {drift:.3e} at step {step}"
                            )));
                        }
                    }
                }
                if let Some(res) = diag.ledger_residual {
                    if res > 1e-11 {
                        return Err(Error::InvariantViolation(format!(
                            "coupling-term ledger identity residual {res:.3e} at step {step}"
                        )));
                    }
                }
            }
            prev_modified = diag.modified_energy;

            if let Some(tw) = trace.as_mut() {
                if step % cadence == 0 || step == n_steps {
                    tw.row(
                        step as f64 * cfg.dt,
                        diag.original_energy,
                        diag.modified_energy,
                        diag.aux_primary,
                        diag.aux_secondary,
                        diag.mass,
                        diag.mass_rho,
                        diag.inner_solver_iterations,
                        diag.linear_solves_performed,
                    )?;
                }
            }
        }
        write_snaps(step, &driver, &mut snapshot_paths)?;
    }
    let wall_seconds = started.elapsed().as_secs_f64();

    let trace_path = cfg
        .out_dir
        .as_ref()
        .filter(|_| trace.is_some())
        .map(|d| d.join("trace.csv"));
    if let Some(tw) = trace {
        tw.finish()?;
    }

    let (final_aux, _) = driver.aux();
    Ok(RunOutcome {
        steps: n_steps,
        final_original_energy: if opts.lean { f64::NAN } else { driver.original_energy() },
        final_modified_energy: if opts.lean { f64::NAN } else { driver.modified_energy() },
        final_aux,
        c_scale_used: driver.c_scale(),
        initial_mass,
        max_mass_drift: max_drift,
        total_solves,
        max_inner_iters: max_inner,
        max_ledger_residual: max_ledger,
        wall_seconds,
        trace_path,
        snapshot_paths,
        final_rho: driver.rho().cloned(),
        final_phi: driver.phi().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::examples::preset;

    #[test]
    fn tiny_run_produces_trace_and_snapshots() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = preset("example1").unwrap();
        cfg.nx = 32;
        cfg.ny = 32;
        cfg.dt = 1e-3;
        cfg.t_final = 0.01;
        cfg.trace_cadence = 2;
        cfg.snapshot_times = vec![0.0, 0.005, 0.01];
        cfg.out_dir = Some(dir.path().to_path_buf());
        let out = run_simulation(&cfg).unwrap();
        assert_eq!(out.steps, 10);
        assert_eq!(out.total_solves, 10);
        assert!(out.trace_path.as_ref().unwrap().exists());
        assert_eq!(out.snapshot_paths.len(), 3);
        let text = std::fs::read_to_string(out.trace_path.unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,E_original,E_modified,s_r,mass,inner_iters,solves"
        );
        // t=0 row + steps 2,4,6,8,10
        assert_eq!(lines.count(), 6);
        assert!(dir.path().join("effective.cfg").exists());
    }

    #[test]
    fn runs_are_bitwise_deterministic() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let mut cfg = preset("example3").unwrap();
        cfg.nx = 32;
        cfg.ny = 32;
        cfg.dt = 0.01;
        cfg.t_final = 0.1;
        cfg.trace_cadence = 1;
        cfg.snapshot_times = vec![0.1];
        let mut cfg_a = cfg.clone();
        cfg_a.out_dir = Some(dir_a.path().to_path_buf());
        let mut cfg_b = cfg;
        cfg_b.out_dir = Some(dir_b.path().to_path_buf());
        let out_a = run_simulation(&cfg_a).unwrap();
        let out_b = run_simulation(&cfg_b).unwrap();
        let ta = std::fs::read(out_a.trace_path.unwrap()).unwrap();
        let tb = std::fs::read(out_b.trace_path.unwrap()).unwrap();
        assert_eq!(ta, tb);
        let sa = std::fs::read(&out_a.snapshot_paths[0]).unwrap();
        let sb = std::fs::read(&out_b.snapshot_paths[0]).unwrap();
        assert_eq!(sa, sb);
    }

    #[test]
    fn surfactant_run_has_pair_columns() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = preset("example6").unwrap();
        cfg.nx = 32;
        cfg.ny = 32;
        cfg.t_final = 0.05;
        cfg.out_dir = Some(dir.path().to_path_buf());
        cfg.trace_cadence = 1;
        let out = run_simulation(&cfg).unwrap();
        let text = std::fs::read_to_string(out.trace_path.unwrap()).unwrap();
        assert!(text.starts_with("t,E_original,E_modified,s_r,s_q,mass,mass_rho,inner_iters,solves"));
        assert!(out.final_rho.is_some());
        assert!(out.max_ledger_residual <= 1e-11);
    }
}
