//! Command-line front end: config parsing, verb dispatch, exit-status
//! mapping.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::{
    compare_sav_esav, convergence_study, energy_ladder, examples, run_simulation, ModelChoice,
    RunConfig, SchemeId,
};
use crate::models::{ModelSpec, SurfactantSpec};

#[derive(Parser, Debug)]
#[command(
    name = "esav",
    about = "Energy-stable E-SAV/SAV phase-field solvers and benchmarks on periodic grids"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one simulation described by a config file and/or flags.
    Run {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Time-step convergence study against a small-step reference run.
    Convergence {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated time-step ladder (defaults to the published one).
        #[arg(long)]
        ladder: Option<String>,
        /// Reference time step (defaults to the published one).
        #[arg(long)]
        ref_dt: Option<f64>,
    },
    /// Side-by-side E-SAV vs SAV accuracy and cost comparison.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        ladder: Option<String>,
        #[arg(long)]
        ref_dt: Option<f64>,
    },
    /// Energy-decay traces over a set of time steps.
    EnergyLadder {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated time steps.
        #[arg(long)]
        dts: Option<String>,
    },
    /// List the built-in experiment presets.
    ListExamples,
}

#[derive(clap::Args, Debug)]
pub struct CommonArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Experiment preset id (see list-examples).
    #[arg(long)]
    pub example: Option<String>,
    /// Scheme id: esav1 | esav-cn | sav1 | sav-cn | mesav1.
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for traces, snapshots and reports.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Disable the in-run invariant monitors.
    #[arg(long)]
    pub no_checks: bool,
    /// Trailing `key=value` overrides, applied after the config file.
    #[arg(value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

/// All model parameters a config can mention, seeded from the preset.
#[derive(Debug, Clone)]
struct ModelBag {
    kind: String,
    mobility: f64,
    epsilon: f64,
    eps_pfc: f64,
    surfactant: SurfactantSpec,
}

impl ModelBag {
    fn from_choice(choice: &ModelChoice) -> Self {
        let mut bag = ModelBag {
            kind: choice.name().to_string(),
            mobility: 1.0,
            epsilon: 0.1,
            eps_pfc: 0.25,
            surfactant: SurfactantSpec::default(),
        };
        match choice {
            ModelChoice::Scalar(ModelSpec::AllenCahn { mobility, epsilon })
            | ModelChoice::Scalar(ModelSpec::CahnHilliard { mobility, epsilon }) => {
                bag.mobility = *mobility;
                bag.epsilon = *epsilon;
            }
            ModelChoice::Scalar(ModelSpec::PhaseFieldCrystal { eps_pfc }) => {
                bag.eps_pfc = *eps_pfc;
            }
            ModelChoice::Scalar(ModelSpec::LinearTest { mobility }) => {
                bag.mobility = *mobility;
            }
            ModelChoice::Surfactant(s) => bag.surfactant = *s,
        }
        bag
    }

    fn build(&self) -> Result<ModelChoice> {
        match self.kind.as_str() {
            "allen-cahn" => Ok(ModelChoice::Scalar(ModelSpec::AllenCahn {
                mobility: self.mobility,
                epsilon: self.epsilon,
            })),
            "cahn-hilliard" => Ok(ModelChoice::Scalar(ModelSpec::CahnHilliard {
                mobility: self.mobility,
                epsilon: self.epsilon,
            })),
            "pfc" => Ok(ModelChoice::Scalar(ModelSpec::PhaseFieldCrystal {
                eps_pfc: self.eps_pfc,
            })),
            "linear-test" => Ok(ModelChoice::Scalar(ModelSpec::LinearTest {
                mobility: self.mobility,
            })),
            "surfactant" => {
                let mut s = self.surfactant;
                s.epsilon = if s.epsilon > 0.0 { s.epsilon } else { 0.05 };
                Ok(ModelChoice::Surfactant(s))
            }
            other => Err(Error::Validation(format!("unknown model `{other}`"))),
        }
    }
}

/// Parse a config file plus `key=value` overrides into a validated run
/// configuration. Unknown keys are errors; parse errors carry line numbers.
pub fn parse_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut entries: Vec<(String, String, usize)> = Vec::new();
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            // section headers only group visually; keys are one namespace
            if line.starts_with('[') && line.ends_with(']') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::ConfigParse {
                    line: lineno + 1,
                    msg: format!("expected `key = value`, got `{raw}`"),
                });
            };
            entries.push((
                key.trim().to_string(),
                value.trim().to_string(),
                lineno + 1,
            ));
        }
    }
    for (k, v) in overrides {
        entries.push((k.clone(), v.clone(), 0));
    }

    // the preset (or the documented defaults) seeds everything
    let example = entries
        .iter()
        .rev()
        .find(|(k, _, _)| k == "example")
        .map(|(_, v, _)| v.clone());
    let mut cfg = match &example {
        Some(id) => examples::preset(id)?,
        None => {
            let mut c = examples::preset("example1")?;
            c.example = None;
            c
        }
    };
    let mut bag = ModelBag::from_choice(&cfg.model);

    let parse_f64 = |v: &str, key: &str, line: usize| -> Result<f64> {
        v.parse::<f64>().map_err(|_| Error::ConfigParse {
            line,
            msg: format!("key `{key}`: `{v}` is not a number"),
        })
    };
    let parse_usize = |v: &str, key: &str, line: usize| -> Result<usize> {
        v.parse::<usize>().map_err(|_| Error::ConfigParse {
            line,
            msg: format!("key `{key}`: `{v}` is not a non-negative integer"),
        })
    };

    for (key, value, line) in &entries {
        let (key, value, line) = (key.as_str(), value.as_str(), *line);
        match key {
            "example" => {} // handled above
            "scheme" => cfg.scheme = SchemeId::parse(value)?,
            "model" => bag.kind = value.to_string(),
            "nx" => cfg.nx = parse_usize(value, key, line)?,
            "ny" => cfg.ny = parse_usize(value, key, line)?,
            "lx" => cfg.lx = parse_f64(value, key, line)?,
            "ly" => cfg.ly = parse_f64(value, key, line)?,
            "mobility" => bag.mobility = parse_f64(value, key, line)?,
            "epsilon" => {
                let v = parse_f64(value, key, line)?;
                bag.epsilon = v;
                bag.surfactant.epsilon = v;
            }
            "eps_pfc" => bag.eps_pfc = parse_f64(value, key, line)?,
            "m_phi" => bag.surfactant.m_phi = parse_f64(value, key, line)?,
            "m_rho" => bag.surfactant.m_rho = parse_f64(value, key, line)?,
            "alpha" => bag.surfactant.alpha = parse_f64(value, key, line)?,
            "beta" => bag.surfactant.beta = parse_f64(value, key, line)?,
            "theta" => bag.surfactant.theta = parse_f64(value, key, line)?,
            "eta" => bag.surfactant.eta = parse_f64(value, key, line)?,
            "rho_s" => bag.surfactant.rho_s = parse_f64(value, key, line)?,
            "dt" => cfg.dt = parse_f64(value, key, line)?,
            "t_final" => cfg.t_final = parse_f64(value, key, line)?,
            "c_scale" => {
                cfg.c_scale = if value == "auto" {
                    None
                } else {
                    Some(parse_f64(value, key, line)?)
                }
            }
            "c_shift" => cfg.c_shift = parse_f64(value, key, line)?,
            "seed" => {
                cfg.seed = value.parse::<u64>().map_err(|_| Error::ConfigParse {
                    line,
                    msg: format!("key `seed`: `{value}` is not a u64"),
                })?
            }
            "ic" => cfg.ic = value.to_string(),
            "out_dir" => cfg.out_dir = Some(PathBuf::from(value)),
            "snapshot_times" => {
                let mut times = Vec::new();
                for part in value.split(',').filter(|p| !p.trim().is_empty()) {
                    times.push(parse_f64(part.trim(), key, line)?);
                }
                cfg.snapshot_times = times;
            }
            "trace_cadence" => cfg.trace_cadence = parse_usize(value, key, line)?,
            "checks" => {
                cfg.checks = match value {
                    "true" | "on" | "1" => true,
                    "false" | "off" | "0" => false,
                    _ => {
                        return Err(Error::ConfigParse {
                            line,
                            msg: format!("key `checks`: `{value}` is not a boolean"),
                        })
                    }
                }
            }
            "solver_tol" => cfg.solver_tol = parse_f64(value, key, line)?,
            "solver_max_iters" => cfg.solver_max_iters = parse_usize(value, key, line)?,
            other => {
                return Err(Error::UnknownKey {
                    key: other.to_string(),
                })
            }
        }
    }

    cfg.model = bag.build()?;
    cfg.validate()?;
    Ok(cfg)
}

fn split_overrides(raw: &[String]) -> Result<Vec<(String, String)>> {
    raw.iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Validation(format!("override `{s}` is not KEY=VALUE")))
        })
        .collect()
}

fn effective_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut overrides = Vec::new();
    if let Some(e) = &common.example {
        overrides.push(("example".to_string(), e.clone()));
    }
    overrides.extend(split_overrides(&common.overrides)?);
    if let Some(s) = &common.scheme {
        overrides.push(("scheme".to_string(), s.clone()));
    }
    if let Some(dt) = common.dt {
        overrides.push(("dt".to_string(), format!("{dt:e}")));
    }
    if let Some(t) = common.t_final {
        overrides.push(("t_final".to_string(), format!("{t:e}")));
    }
    if let Some(seed) = common.seed {
        overrides.push(("seed".to_string(), seed.to_string()));
    }
    if let Some(out) = &common.out {
        overrides.push(("out_dir".to_string(), out.display().to_string()));
    }
    if common.no_checks {
        overrides.push(("checks".to_string(), "false".to_string()));
    }
    parse_config(common.config.as_deref(), &overrides)
}

fn parse_float_list(raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Validation(format!("`{p}` is not a number")))
        })
        .collect()
}

/// Execute a parsed command. `Ok(())` means the run completed and every
/// enabled invariant monitor passed.
pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common } => {
            let cfg = effective_config(&common)?;
            let out = run_simulation(&cfg)?;
            println!(
                "run complete: {} steps, E_original {:.10e}, E_modified {:.10e}",
                out.steps, out.final_original_energy, out.final_modified_energy
            );
            println!(
                "mass drift {:.3e}, solves {}, wall {:.3}s",
                out.max_mass_drift, out.total_solves, out.wall_seconds
            );
            if let Some(p) = &out.trace_path {
                println!("trace: {}", p.display());
            }
            for p in &out.snapshot_paths {
                println!("snapshot: {}", p.display());
            }
            Ok(())
        }
        Command::Convergence {
            common,
            ladder,
            ref_dt,
        } => {
            let cfg = effective_config(&common)?;
            let id = cfg.example.as_deref().unwrap_or("example1").to_string();
            let ladder = match ladder {
                Some(l) => parse_float_list(&l)?,
                None => examples::accuracy_ladder(&id),
            };
            let ref_dt = ref_dt.unwrap_or_else(|| examples::reference_dt(&id));
            let report = convergence_study(&cfg, &ladder, ref_dt)?;
            print!("{}", report.to_csv());
            if let Some(dir) = &cfg.out_dir {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("convergence_{}.csv", cfg.scheme.as_str()));
                report.write_csv(&path)?;
                println!("# written: {}", path.display());
            }
            Ok(())
        }
        Command::Compare {
            common,
            ladder,
            ref_dt,
        } => {
            let cfg = effective_config(&common)?;
            let id = cfg.example.as_deref().unwrap_or("example1").to_string();
            let ladder = match ladder {
                Some(l) => parse_float_list(&l)?,
                None => examples::accuracy_ladder(&id),
            };
            let ref_dt = ref_dt.unwrap_or_else(|| examples::reference_dt(&id));
            let report = compare_sav_esav(&cfg, &ladder, ref_dt)?;
            print!("{}", report.to_csv());
            if let Some(dir) = &cfg.out_dir {
                std::fs::create_dir_all(dir)?;
                let path = dir.join("compare.csv");
                std::fs::write(&path, report.to_csv())?;
                println!("# written: {}", path.display());
            }
            Ok(())
        }
        Command::EnergyLadder { common, dts } => {
            let cfg = effective_config(&common)?;
            let dts = match dts {
                Some(l) => parse_float_list(&l)?,
                None => vec![1e-3, 1e-2, 0.1, 1.0, 2.0],
            };
            let entries = energy_ladder(&cfg, &dts)?;
            for e in entries {
                println!(
                    "dt {:.6e}: {} steps, final modified energy {:.10e}, monotone",
                    e.dt, e.steps, e.final_modified_energy
                );
                if let Some(p) = e.trace_path {
                    println!("  trace: {}", p.display());
                }
            }
            Ok(())
        }
        Command::ListExamples => {
            for (id, desc) in examples::list() {
                println!("{id:<14} {desc}");
            }
            Ok(())
        }
    }
}

/// Exit status classes: 2 config/usage, 3 numerical failure, 4 invariant
/// violation, 5 I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ConfigParse { .. }
        | Error::UnknownKey { .. }
        | Error::Validation(_)
        | Error::InvalidArgument(_) => 2,
        Error::SingularOperator { .. }
        | Error::ExponentOverflow { .. }
        | Error::ExtrapolationDegenerate { .. }
        | Error::InvalidC { .. }
        | Error::DegenerateReduction { .. }
        | Error::IterationLimit { .. }
        | Error::NonFinite(_)
        | Error::GridMismatch(_) => 3,
        Error::InvariantViolation(_) => 4,
        Error::Io(_) => 5,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_cfg(dir: &Path, text: &str) -> PathBuf {
        let path = dir.join("run.cfg");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(text.as_bytes()).unwrap();
        path
    }

    #[test]
    fn example_preset_via_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_cfg(dir.path(), "example = example1\n");
        let cfg = parse_config(Some(&path), &[]).unwrap();
        assert_eq!(cfg.nx, 128);
        assert_eq!(cfg.t_final, 0.032);
        match cfg.model {
            ModelChoice::Scalar(ModelSpec::AllenCahn { mobility, epsilon }) => {
                assert_eq!(mobility, 1.0);
                assert_eq!(epsilon, 0.1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn override_replaces_file_value() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_cfg(dir.path(), "example = example1\ndt = 1.6e-4\n");
        let cfg = parse_config(
            Some(&path),
            &[("dt".to_string(), "1e-5".to_string())],
        )
        .unwrap();
        assert_eq!(cfg.dt, 1e-5);
    }

    #[test]
    fn unknown_key_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_cfg(dir.path(), "example = example1\nepsilonn = 0.2\n");
        let err = parse_config(Some(&path), &[]).unwrap_err();
        match err {
            Error::UnknownKey { key } => assert_eq!(key, "epsilonn"),
            other => panic!("expected UnknownKey, got {other}"),
        }
    }

    #[test]
    fn parse_error_carries_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_cfg(dir.path(), "example = example1\n\nthis is not a pair\n");
        let err = parse_config(Some(&path), &[]).unwrap_err();
        match err {
            Error::ConfigParse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected ConfigParse, got {other}"),
        }
    }

    #[test]
    fn comments_sections_and_model_switch() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_cfg(
            dir.path(),
            "# accuracy run\n[model]\nexample = example1\nmodel = cahn-hilliard\nmobility = 0.1\n",
        );
        let cfg = parse_config(Some(&path), &[]).unwrap();
        match cfg.model {
            ModelChoice::Scalar(ModelSpec::CahnHilliard { mobility, .. }) => {
                assert_eq!(mobility, 0.1)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_roundtrip_is_replayable() {
        let cfg = examples::preset("example6").unwrap();
        let text = cfg.to_config_text();
        let dir = tempfile::tempdir().unwrap();
        let path = write_cfg(dir.path(), &text);
        let back = parse_config(Some(&path), &[]).unwrap();
        assert_eq!(back.dt, cfg.dt);
        assert_eq!(back.scheme, cfg.scheme);
        assert_eq!(back.model, cfg.model);
        assert_eq!(back.seed, cfg.seed);
    }

    #[test]
    fn exit_codes_are_distinct_by_class() {
        assert_eq!(
            exit_code(&Error::UnknownKey {
                key: "zz".to_string()
            }),
            2
        );
        assert_eq!(
            exit_code(&Error::ExponentOverflow {
                arg: 1e9,
                limit: 700.0
            }),
            3
        );
        assert_eq!(exit_code(&Error::InvariantViolation("x".into())), 4);
        assert_eq!(
            exit_code(&Error::Io(std::io::Error::other("x"))),
            5
        );
    }
}
