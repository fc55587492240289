use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::config::{RunConfig, SchemeId};
use crate::harness::runner::{run_with, RunOptions, RunOutcome};
use crate::spectral::quadrature::l2_diff;

/// One row of an accuracy table.
#[derive(Debug, Clone)]
pub struct ConvRow {
    pub dt: f64,
    pub error_phi: f64,
    pub error_rho: Option<f64>,
    pub rate_phi: Option<f64>,
    pub rate_rho: Option<f64>,
}

/// Accuracy table against a small-step reference run of the same scheme.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub scheme: SchemeId,
    pub ref_dt: f64,
    pub rows: Vec<ConvRow>,
    /// Total constant-coefficient solves over the ladder runs (reference
    /// excluded).
    pub ladder_solves: u64,
    /// Total ladder steps, for the solves-per-step ratio.
    pub ladder_steps: u64,
    /// Wall-clock of the ladder runs, seconds.
    pub ladder_wall: f64,
}

impl ConvergenceReport {
    /// `dt,error_phi[,error_rho],rate_phi[,rate_rho]`; the first row has no
    /// rate.
    pub fn to_csv(&self) -> String {
        let pair = self.rows.iter().any(|r| r.error_rho.is_some());
        let mut s = String::from(if pair {
            "dt,error_phi,error_rho,rate_phi,rate_rho\n"
        } else {
            "dt,error_phi,rate_phi\n"
        });
        for row in &self.rows {
            let rate = |r: Option<f64>| r.map(|v| format!("{v:.6}")).unwrap_or_default();
            if pair {
                s.push_str(&format!(
                    "{:.10e},{:.10e},{:.10e},{},{}\n",
                    row.dt,
                    row.error_phi,
                    row.error_rho.unwrap_or(f64::NAN),
                    rate(row.rate_phi),
                    rate(row.rate_rho),
                ));
            } else {
                s.push_str(&format!(
                    "{:.10e},{:.10e},{}\n",
                    row.dt,
                    row.error_phi,
                    rate(row.rate_phi)
                ));
            }
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

fn observed_rate(e_coarse: f64, e_fine: f64, dt_coarse: f64, dt_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (dt_coarse / dt_fine).ln()
}

fn ladder_config(template: &RunConfig, dt: f64) -> RunConfig {
    let mut cfg = template.clone();
    cfg.dt = dt;
    cfg.out_dir = None;
    cfg
}

/// Run the reference once (lean instrumentation, same scheme), then each
/// ladder step size, and report discrete-L2 errors at `t_final` with
/// successive-pair rates.
pub fn convergence_study(
    template: &RunConfig,
    ladder: &[f64],
    ref_dt: f64,
) -> Result<ConvergenceReport> {
    template.validate()?;
    if ladder.is_empty() {
        return Err(Error::Validation("empty time-step ladder".into()));
    }
    let reference = run_with(&ladder_config(template, ref_dt), RunOptions::lean_reference())?;
    convergence_against(template, ladder, ref_dt, &reference)
}

/// Ladder half of [`convergence_study`], reusing an existing reference run.
fn convergence_against(
    template: &RunConfig,
    ladder: &[f64],
    ref_dt: f64,
    reference: &RunOutcome,
) -> Result<ConvergenceReport> {
    let mut errors: Vec<(f64, f64, Option<f64>)> = Vec::with_capacity(ladder.len());
    let mut ladder_solves = 0u64;
    let mut ladder_steps = 0u64;
    let mut ladder_wall = 0.0;
    for &dt in ladder {
        let cfg = ladder_config(template, dt);
        let out = run_with(&cfg, RunOptions { write_output: false, ..RunOptions::from_config(&cfg) })?;
        let e_phi = l2_diff(&out.final_phi, &reference.final_phi)?;
        let e_rho = match (&out.final_rho, &reference.final_rho) {
            (Some(a), Some(b)) => Some(l2_diff(a, b)?),
            _ => None,
        };
        ladder_solves += out.total_solves;
        ladder_steps += out.steps as u64;
        ladder_wall += out.wall_seconds;
        errors.push((dt, e_phi, e_rho));
    }
    let mut rows = Vec::with_capacity(errors.len());
    for (i, &(dt, e_phi, e_rho)) in errors.iter().enumerate() {
        let (rate_phi, rate_rho) = if i == 0 {
            (None, None)
        } else {
            let (pdt, pe_phi, pe_rho) = errors[i - 1];
            let rp = Some(observed_rate(pe_phi, e_phi, pdt, dt));
            let rr = match (pe_rho, e_rho) {
                (Some(a), Some(b)) => Some(observed_rate(a, b, pdt, dt)),
                _ => None,
            };
            (rp, rr)
        };
        rows.push(ConvRow {
            dt,
            error_phi: e_phi,
            error_rho: e_rho,
            rate_phi,
            rate_rho,
        });
    }
    Ok(ConvergenceReport {
        scheme: template.scheme,
        ref_dt,
        rows,
        ladder_solves,
        ladder_steps,
        ladder_wall,
    })
}

/// Side-by-side accuracy and cost comparison of an E-SAV scheme and its SAV
/// baseline on the same experiment. The two reference runs execute
/// concurrently (they are independent); ladder runs execute sequentially so
/// the wall-clock columns are a fair one-core comparison.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub esav: ConvergenceReport,
    pub sav: ConvergenceReport,
}

impl CompareReport {
    /// Combined CSV with per-dt errors and the cost columns.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "dt,error_esav,rate_esav,error_sav,rate_sav\n",
        );
        for (a, b) in self.esav.rows.iter().zip(&self.sav.rows) {
            let rate = |r: Option<f64>| r.map(|v| format!("{v:.6}")).unwrap_or_default();
            s.push_str(&format!(
                "{:.10e},{:.10e},{},{:.10e},{}\n",
                a.dt,
                a.error_phi,
                rate(a.rate_phi),
                b.error_phi,
                rate(b.rate_phi)
            ));
        }
        s.push_str(&format!(
            "# solves_per_step: esav {:.3}, sav {:.3}; wall_seconds: esav {:.3}, sav {:.3}\n",
            self.esav.ladder_solves as f64 / self.esav.ladder_steps as f64,
            self.sav.ladder_solves as f64 / self.sav.ladder_steps as f64,
            self.esav.ladder_wall,
            self.sav.ladder_wall,
        ));
        s
    }
}

pub fn compare_sav_esav(template: &RunConfig, ladder: &[f64], ref_dt: f64) -> Result<CompareReport> {
    template.validate()?;
    let esav_scheme = match template.scheme {
        SchemeId::Esav1 | SchemeId::Sav1 => SchemeId::Esav1,
        SchemeId::EsavCn | SchemeId::SavCn => SchemeId::EsavCn,
        SchemeId::Mesav1 => {
            return Err(Error::Validation(
                "compare runs the scalar E-SAV/SAV pairs; the surfactant scheme has no baseline"
                    .into(),
            ))
        }
    };
    let sav_scheme = esav_scheme.comparison_partner().expect("scalar scheme");

    let mut esav_cfg = template.clone();
    esav_cfg.scheme = esav_scheme;
    let mut sav_cfg = template.clone();
    sav_cfg.scheme = sav_scheme;

    // the references are untimed and independent; run them on two workers
    let (esav_ref, sav_ref) = if crate::harness::worker_cap(2) >= 2 {
        std::thread::scope(|scope| {
            let ecfg = ladder_config(&esav_cfg, ref_dt);
            let scfg = ladder_config(&sav_cfg, ref_dt);
            let eh = scope.spawn(move || run_with(&ecfg, RunOptions::lean_reference()));
            let sh = scope.spawn(move || run_with(&scfg, RunOptions::lean_reference()));
            let e = eh.join().expect("reference worker panicked");
            let s = sh.join().expect("reference worker panicked");
            (e, s)
        })
    } else {
        (
            run_with(&ladder_config(&esav_cfg, ref_dt), RunOptions::lean_reference()),
            run_with(&ladder_config(&sav_cfg, ref_dt), RunOptions::lean_reference()),
        )
    };

    let esav = convergence_against(&esav_cfg, ladder, ref_dt, &esav_ref?)?;
    let sav = convergence_against(&sav_cfg, ladder, ref_dt, &sav_ref?)?;

    // the structural cost claim: strictly fewer solves for E-SAV
    if esav.ladder_solves >= sav.ladder_solves {
        return Err(Error::InvariantViolation(format!(
            "expected fewer E-SAV solves, got {} vs {}",
            esav.ladder_solves, sav.ladder_solves
        )));
    }
    Ok(CompareReport { esav, sav })
}

/// Per-dt energy-decay traces. Each entry runs to `t_final` with the
/// monotonicity monitor armed; a violation aborts with the offending step.
#[derive(Debug, Clone)]
pub struct LadderEntry {
    pub dt: f64,
    pub steps: usize,
    pub final_modified_energy: f64,
    pub trace_path: Option<std::path::PathBuf>,
}

pub fn energy_ladder(template: &RunConfig, dts: &[f64]) -> Result<Vec<LadderEntry>> {
    template.validate()?;
    if dts.is_empty() {
        return Err(Error::Validation("empty dt set".into()));
    }
    let workers = crate::harness::worker_cap(dts.len());
    let mut results: Vec<Option<Result<LadderEntry>>> = (0..dts.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (chunk_idx, chunk) in dts.chunks(workers.max(1)).enumerate() {
            let mut handles = Vec::new();
            for (k, &dt) in chunk.iter().enumerate() {
                let mut cfg = template.clone();
                cfg.dt = dt;
                cfg.checks = true;
                if let Some(dir) = &template.out_dir {
                    cfg.out_dir = Some(dir.join(format!("dt_{dt:e}")));
                }
                handles.push((
                    chunk_idx * workers + k,
                    scope.spawn(move || {
                        let opts = RunOptions::from_config(&cfg);
                        run_with(&cfg, opts).map(|out| LadderEntry {
                            dt: cfg.dt,
                            steps: out.steps,
                            final_modified_energy: out.final_modified_energy,
                            trace_path: out.trace_path,
                        })
                    }),
                ));
            }
            for (idx, h) in handles {
                results[idx] = Some(h.join().expect("ladder worker panicked"));
            }
        }
    });
    results
        .into_iter()
        .map(|r| r.expect("all entries scheduled"))
        .collect()
}
