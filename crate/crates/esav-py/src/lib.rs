//! Python bindings: grids, fields, models, single-step integrators and the
//! benchmark harness entry points.

// the pyo3 0.22 macros emit identity `Into` calls that clippy flags
#![allow(clippy::useless_conversion)]

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use esav_core::error::Error;
use esav_core::harness::{self, convergence_study, run_simulation, SchemeId};
use esav_core::models::ModelSpec;
use esav_core::schemes::{
    modified_esav_energy, EsavCn, EsavFirstOrder, EsavState as CoreEsavState,
};
use esav_core::spectral::{quadrature, Fft2d, Grid as CoreGrid, Multiplier, RealField};

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::InvalidArgument(_)
        | Error::Validation(_)
        | Error::UnknownKey { .. }
        | Error::ConfigParse { .. } => PyValueError::new_err(err.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Uniform periodic 2D grid.
#[pyclass(name = "Grid")]
#[derive(Clone)]
struct PyGrid {
    inner: CoreGrid,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> PyResult<Self> {
        Ok(PyGrid {
            inner: CoreGrid::new(nx, ny, lx, ly).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn nx(&self) -> usize {
        self.inner.nx()
    }

    #[getter]
    fn ny(&self) -> usize {
        self.inner.ny()
    }

    #[getter]
    fn lx(&self) -> f64 {
        self.inner.lx()
    }

    #[getter]
    fn ly(&self) -> f64 {
        self.inner.ly()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(nx={}, ny={}, lx={}, ly={})",
            self.inner.nx(),
            self.inner.ny(),
            self.inner.lx(),
            self.inner.ly()
        )
    }
}

/// Real samples on a periodic grid, row-major.
#[pyclass(name = "Field")]
#[derive(Clone)]
struct PyField {
    inner: RealField,
}

#[pymethods]
impl PyField {
    #[new]
    fn new(grid: PyGrid, values: Vec<f64>) -> PyResult<Self> {
        Ok(PyField {
            inner: RealField::from_values(grid.inner, values).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn constant(grid: PyGrid, value: f64) -> Self {
        PyField {
            inner: RealField::constant(grid.inner, value),
        }
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid {
            inner: self.inner.grid(),
        }
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.inner.at(i, j)
    }

    fn max(&self) -> f64 {
        self.inner.max()
    }

    fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    /// Rectangle-rule integral over the domain.
    fn integral(&self) -> f64 {
        quadrature::integral(&self.inner)
    }

    /// Discrete L2 norm `sqrt(hx hy sum f^2)`.
    fn l2_norm(&self) -> f64 {
        quadrature::l2_norm(&self.inner)
    }

    /// Discrete L2 distance to another field on the same grid.
    fn l2_diff(&self, other: &PyField) -> PyResult<f64> {
        quadrature::l2_diff(&self.inner, &other.inner).map_err(to_py_err)
    }
}

fn model_from_args(name: &str, mobility: f64, epsilon: f64, eps_pfc: f64) -> PyResult<ModelSpec> {
    let model = match name {
        "allen-cahn" => ModelSpec::AllenCahn { mobility, epsilon },
        "cahn-hilliard" => ModelSpec::CahnHilliard { mobility, epsilon },
        "pfc" => ModelSpec::PhaseFieldCrystal { eps_pfc },
        "linear-test" => ModelSpec::LinearTest { mobility },
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown model `{other}` (allen-cahn | cahn-hilliard | pfc | linear-test)"
            )))
        }
    };
    model.validate().map_err(to_py_err)?;
    Ok(model)
}

/// First-order or Crank-Nicolson E-SAV integrator bound to one model and
/// grid; owns its transform plans and evolving state.
#[pyclass(name = "EsavIntegrator", unsendable)]
struct PyEsavIntegrator {
    first: Option<EsavFirstOrder>,
    cn: Option<EsavCn>,
    model: ModelSpec,
    state: Option<CoreEsavState>,
}

#[pymethods]
impl PyEsavIntegrator {
    #[new]
    #[pyo3(signature = (model, grid, phi0, dt, order=1, mobility=1.0, epsilon=0.1, eps_pfc=0.25, c_scale=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        model: &str,
        grid: PyGrid,
        phi0: PyField,
        dt: f64,
        order: usize,
        mobility: f64,
        epsilon: f64,
        eps_pfc: f64,
        c_scale: Option<f64>,
    ) -> PyResult<Self> {
        let model = model_from_args(model, mobility, epsilon, eps_pfc)?;
        let g = grid.inner;
        let mut fft = Fft2d::new(g);
        let state = CoreEsavState::new(&mut fft, &model, phi0.inner, c_scale).map_err(to_py_err)?;
        let (first, cn) = match order {
            1 => (
                Some(EsavFirstOrder::new(model, g, dt).map_err(to_py_err)?),
                None,
            ),
            2 => (None, Some(EsavCn::new(model, g, dt).map_err(to_py_err)?)),
            other => {
                return Err(PyValueError::new_err(format!(
                    "order must be 1 or 2, got {other}"
                )))
            }
        };
        Ok(PyEsavIntegrator {
            first,
            cn,
            model,
            state: Some(state),
        })
    }

    /// Advance `n` steps; returns a per-step list of
    /// `(modified_energy, original_energy, mass, solves)`.
    fn advance(&mut self, n: usize) -> PyResult<Vec<(f64, f64, f64, usize)>> {
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let state = self.state.take().expect("state present");
            let step = match (&mut self.first, &mut self.cn) {
                (Some(s), None) => s.step(state),
                (None, Some(s)) => s.step(state),
                _ => unreachable!("exactly one order is configured"),
            };
            let (next, diag) = step.map_err(to_py_err)?;
            self.state = Some(next);
            rows.push((
                diag.modified_energy,
                diag.original_energy,
                diag.mass,
                diag.linear_solves_performed,
            ));
        }
        Ok(rows)
    }

    fn phi(&self) -> PyField {
        PyField {
            inner: self.state.as_ref().expect("state present").phi().clone(),
        }
    }

    /// Log-space auxiliary variable `s = ln r`.
    fn s(&self) -> f64 {
        self.state.as_ref().expect("state present").s()
    }

    fn modified_energy(&self) -> f64 {
        modified_esav_energy(&self.model, self.state.as_ref().expect("state present"))
    }
}

/// Apply a named Fourier multiplier (`laplacian`, `identity`, `pfc-kernel`)
/// to a field.
#[pyfunction]
fn apply_multiplier(name: &str, field: &PyField) -> PyResult<PyField> {
    let grid = field.inner.grid();
    let m = match name {
        "laplacian" => Multiplier::from_fn(grid, |kx, ky| -(kx * kx + ky * ky)),
        "identity" => Ok(Multiplier::identity(grid)),
        "pfc-kernel" => Multiplier::from_fn(grid, |kx, ky| {
            let w = 1.0 - (kx * kx + ky * ky);
            w * w
        }),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown multiplier `{other}`"
            )))
        }
    }
    .map_err(to_py_err)?;
    let mut fft = Fft2d::new(grid);
    Ok(PyField {
        inner: fft.apply_multiplier(&m, &field.inner).map_err(to_py_err)?,
    })
}

/// Roundtrip a field through the spectral transform (plumbing check).
#[pyfunction]
fn transform_roundtrip(field: &PyField) -> PyResult<PyField> {
    let mut fft = Fft2d::new(field.inner.grid());
    let spec = fft.forward(&field.inner).map_err(to_py_err)?;
    Ok(PyField {
        inner: fft.backward(&spec).map_err(to_py_err)?,
    })
}

/// Deterministic initial condition of a named experiment.
#[pyfunction]
#[pyo3(signature = (id, grid, seed=1, epsilon=0.01))]
fn initial_condition(id: &str, grid: PyGrid, seed: u64, epsilon: f64) -> PyResult<Vec<PyField>> {
    let ic = harness::initial_condition(id, grid.inner, seed, epsilon).map_err(to_py_err)?;
    Ok(match ic {
        harness::IcFields::Scalar(f) => vec![PyField { inner: f }],
        harness::IcFields::Pair(a, b) => {
            vec![PyField { inner: a }, PyField { inner: b }]
        }
    })
}

fn preset_with_overrides(
    example: &str,
    scheme: Option<&str>,
    dt: Option<f64>,
    t_final: Option<f64>,
    seed: Option<u64>,
    out_dir: Option<&str>,
) -> PyResult<harness::RunConfig> {
    let mut cfg = harness::examples::preset(example).map_err(to_py_err)?;
    if let Some(s) = scheme {
        cfg.scheme = SchemeId::parse(s).map_err(to_py_err)?;
    }
    if let Some(dt) = dt {
        cfg.dt = dt;
    }
    if let Some(t) = t_final {
        cfg.t_final = t;
        cfg.snapshot_times.retain(|&s| s <= t);
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.out_dir = out_dir.map(std::path::PathBuf::from);
    Ok(cfg)
}

/// Run one named experiment; returns a dict of summary scalars.
#[pyfunction]
#[pyo3(signature = (example, scheme=None, dt=None, t_final=None, seed=None, out_dir=None))]
fn run_example(
    py: Python<'_>,
    example: &str,
    scheme: Option<&str>,
    dt: Option<f64>,
    t_final: Option<f64>,
    seed: Option<u64>,
    out_dir: Option<&str>,
) -> PyResult<Py<PyDict>> {
    let cfg = preset_with_overrides(example, scheme, dt, t_final, seed, out_dir)?;
    let out = run_simulation(&cfg).map_err(to_py_err)?;
    let d = PyDict::new_bound(py);
    d.set_item("steps", out.steps)?;
    d.set_item("final_original_energy", out.final_original_energy)?;
    d.set_item("final_modified_energy", out.final_modified_energy)?;
    d.set_item("initial_mass", out.initial_mass)?;
    d.set_item("max_mass_drift", out.max_mass_drift)?;
    d.set_item("total_solves", out.total_solves)?;
    d.set_item("max_inner_iters", out.max_inner_iters)?;
    d.set_item("wall_seconds", out.wall_seconds)?;
    d.set_item("trace_path", out.trace_path.map(|p| p.display().to_string()))?;
    d.set_item(
        "final_phi",
        PyField {
            inner: out.final_phi,
        }
        .into_py(py),
    )?;
    if let Some(rho) = out.final_rho {
        d.set_item("final_rho", PyField { inner: rho }.into_py(py))?;
    }
    Ok(d.into())
}

/// `(dt, error_phi, error_rho, rate_phi, rate_rho)` rows.
type ConvRows = Vec<(f64, f64, Option<f64>, Option<f64>, Option<f64>)>;

/// Time-step convergence study on a named experiment.
#[pyfunction]
#[pyo3(signature = (example, ladder, ref_dt, scheme=None))]
fn convergence(
    example: &str,
    ladder: Vec<f64>,
    ref_dt: f64,
    scheme: Option<&str>,
) -> PyResult<ConvRows> {
    let cfg = preset_with_overrides(example, scheme, None, None, None, None)?;
    let report = convergence_study(&cfg, &ladder, ref_dt).map_err(to_py_err)?;
    Ok(report
        .rows
        .iter()
        .map(|r| (r.dt, r.error_phi, r.error_rho, r.rate_phi, r.rate_rho))
        .collect())
}

/// List the built-in experiment presets as `(id, description)` pairs.
#[pyfunction]
fn list_examples() -> Vec<(String, String)> {
    harness::examples::list()
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

#[pymodule]
fn esav_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyEsavIntegrator>()?;
    m.add_function(wrap_pyfunction!(apply_multiplier, m)?)?;
    m.add_function(wrap_pyfunction!(transform_roundtrip, m)?)?;
    m.add_function(wrap_pyfunction!(initial_condition, m)?)?;
    m.add_function(wrap_pyfunction!(run_example, m)?)?;
    m.add_function(wrap_pyfunction!(convergence, m)?)?;
    m.add_function(wrap_pyfunction!(list_examples, m)?)?;
    Ok(())
}
