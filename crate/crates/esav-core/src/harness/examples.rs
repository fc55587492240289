use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::harness::config::{ModelChoice, RunConfig, SchemeId};
use crate::models::{ModelSpec, SurfactantSpec};

/// The benchmark catalog: every named experiment with its published (or
/// documented default) parameters.
pub fn list() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "example1",
            "Allen-Cahn accuracy benchmark (eps=0.1, M=1, 128^2, T=0.032, smooth sine datum)",
        ),
        (
            "example1-ch",
            "Cahn-Hilliard accuracy benchmark (eps=0.1, M=0.1, CN schemes, same datum)",
        ),
        (
            "example2",
            "Allen-Cahn two-bubble coalescence on [0,1]^2 (eps=0.01, 256^2, dt=1e-3)",
        ),
        (
            "example3",
            "Cahn-Hilliard spinodal decomposition on [0,2pi)^2 (eps=0.02, M=0.1, 256^2)",
        ),
        (
            "example4",
            "Crystal growth, reduced scale [0,400]^2, 256^2, T=300 (eps=0.25)",
        ),
        (
            "example4-full",
            "Crystal growth at full published scale [0,800]^2, 512^2, T=1200 (long)",
        ),
        (
            "example5",
            "Crystallization from a zero-mean random state on [0,128]^2 (eps=0.025, 256^2)",
        ),
        (
            "example6",
            "Surfactant accuracy benchmark (128^2, T=0.1, smooth cosine data)",
        ),
        (
            "example7",
            "Surfactant spinodal decomposition, desk scale T=1 (eps=0.02, eta=0.005)",
        ),
        (
            "example7-full",
            "Surfactant spinodal decomposition at the published horizon T=2000 (opt-in, hours)",
        ),
        (
            "linear",
            "Heat-mode decay with closed-form solution (oracle runs)",
        ),
    ]
}

/// Build the default configuration of a named experiment.
pub fn preset(id: &str) -> Result<RunConfig> {
    let two_pi = 2.0 * PI;
    let base = |model, scheme, nx, l: f64, dt, t_final, ic: &str| RunConfig {
        example: Some(id.to_string()),
        nx,
        ny: nx,
        lx: l,
        ly: l,
        model,
        scheme,
        dt,
        t_final,
        c_scale: None,
        c_shift: 1.0,
        seed: 1,
        ic: ic.to_string(),
        out_dir: None,
        snapshot_times: Vec::new(),
        trace_cadence: 0,
        checks: true,
        solver_tol: 1e-11,
        solver_max_iters: 200,
    };
    let cfg = match id {
        "example1" => base(
            ModelChoice::Scalar(ModelSpec::AllenCahn {
                mobility: 1.0,
                epsilon: 0.1,
            }),
            SchemeId::Esav1,
            128,
            two_pi,
            1.6e-4,
            0.032,
            "example1",
        ),
        "example1-ch" => base(
            ModelChoice::Scalar(ModelSpec::CahnHilliard {
                mobility: 0.1,
                epsilon: 0.1,
            }),
            SchemeId::EsavCn,
            128,
            two_pi,
            1.6e-4,
            0.032,
            "example1",
        ),
        "example2" => {
            let mut c = base(
                ModelChoice::Scalar(ModelSpec::AllenCahn {
                    mobility: 1.0,
                    epsilon: 0.01,
                }),
                SchemeId::Esav1,
                256,
                1.0,
                1e-3,
                6.0,
                "example2",
            );
            c.snapshot_times = vec![0.0, 0.02, 0.5, 1.5, 4.0, 5.6];
            c
        }
        "example3" => {
            let mut c = base(
                ModelChoice::Scalar(ModelSpec::CahnHilliard {
                    mobility: 0.1,
                    epsilon: 0.02,
                }),
                SchemeId::Esav1,
                256,
                two_pi,
                0.01,
                20.0,
                "example3",
            );
            c.snapshot_times = vec![0.02, 0.5, 3.0, 20.0];
            c.seed = 42;
            c
        }
        "example4" => {
            let mut c = base(
                ModelChoice::Scalar(ModelSpec::PhaseFieldCrystal { eps_pfc: 0.25 }),
                SchemeId::Esav1,
                256,
                400.0,
                0.1,
                300.0,
                "example4",
            );
            c.snapshot_times = vec![0.0, 150.0, 300.0];
            c
        }
        "example4-full" => {
            let mut c = base(
                ModelChoice::Scalar(ModelSpec::PhaseFieldCrystal { eps_pfc: 0.25 }),
                SchemeId::Esav1,
                512,
                800.0,
                1.0,
                1200.0,
                "example4",
            );
            c.snapshot_times = vec![0.0, 150.0, 400.0, 600.0, 900.0, 1200.0];
            c
        }
        "example5" => {
            let mut c = base(
                ModelChoice::Scalar(ModelSpec::PhaseFieldCrystal { eps_pfc: 0.025 }),
                SchemeId::Esav1,
                256,
                128.0,
                0.1,
                6000.0,
                "example5",
            );
            c.snapshot_times = vec![200.0, 500.0, 1200.0, 6000.0];
            c.seed = 5;
            c
        }
        "example6" => base(
            ModelChoice::Surfactant(SurfactantSpec::default()),
            SchemeId::Mesav1,
            128,
            two_pi,
            1e-2,
            0.1,
            "example6",
        ),
        "example7" | "example7-full" => {
            // the sharp surfactant potential (eta = 0.005) drives a spinodal
            // transient with growth rates near 3e2; dt = 1e-4 resolves it,
            // larger steps throttle the auxiliary ratio and stall the run
            let mut c = base(
                ModelChoice::Surfactant(SurfactantSpec {
                    epsilon: 0.02,
                    eta: 0.005,
                    ..SurfactantSpec::default()
                }),
                SchemeId::Mesav1,
                128,
                two_pi,
                1e-4,
                if id == "example7" { 1.0 } else { 2000.0 },
                "example7",
            );
            c.seed = 7;
            c
        }
        "linear" => base(
            ModelChoice::Scalar(ModelSpec::LinearTest { mobility: 1.0 }),
            SchemeId::Esav1,
            64,
            two_pi,
            0.01,
            1.0,
            "sine",
        ),
        other => {
            return Err(Error::Validation(format!(
                "unknown example `{other}`; see `list-examples`"
            )))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

/// The published time-step ladder of the accuracy tables.
pub fn accuracy_ladder(id: &str) -> Vec<f64> {
    match id {
        "example6" => vec![1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4],
        _ => vec![1.6e-4, 8e-5, 4e-5, 2e-5, 1e-5],
    }
}

/// The published reference time step for accuracy studies.
pub fn reference_dt(id: &str) -> f64 {
    match id {
        "example6" => 1e-5,
        _ => 1e-8,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_listed_presets_validate() {
        for (id, _) in list() {
            let cfg = preset(id).unwrap();
            cfg.validate().unwrap();
            assert_eq!(cfg.example.as_deref(), Some(id));
        }
    }

    #[test]
    fn example1_defaults_match_the_benchmark() {
        let cfg = preset("example1").unwrap();
        assert_eq!(cfg.nx, 128);
        assert_eq!(cfg.t_final, 0.032);
        match cfg.model {
            ModelChoice::Scalar(ModelSpec::AllenCahn { mobility, epsilon }) => {
                assert_eq!(mobility, 1.0);
                assert_eq!(epsilon, 0.1);
            }
            other => panic!("wrong model {other:?}"),
        }
    }

    #[test]
    fn unknown_preset_errors() {
        assert!(preset("example0").is_err());
    }
}
