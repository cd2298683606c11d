//! Python bindings for `rmtwork`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rmtwork::analytic::{self, PeakRegime};
use rmtwork::ensembles::{self, SymmetryClass};
use rmtwork::{quench, spectra, validate, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidSpec(_) | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } | Error::Domain(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Round-trips a serializable report through `json.loads`.
fn to_python<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Gaussian ensemble with `n_levels` distinct levels, class "goe", "gue"
/// or "gse", center `mean_energy` and central spacing `mean_spacing`.
#[pyclass(name = "EnsembleSpec", module = "rmtwork_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEnsembleSpec(ensembles::EnsembleSpec);

#[pymethods]
impl PyEnsembleSpec {
    #[new]
    #[pyo3(signature = (n_levels, cls = "goe", mean_energy = 0.0, mean_spacing = 1.0))]
    fn new(n_levels: usize, cls: &str, mean_energy: f64, mean_spacing: f64) -> PyResult<Self> {
        let class: SymmetryClass = cls.parse().map_err(py_err)?;
        ensembles::EnsembleSpec::new(n_levels, class, mean_energy, mean_spacing).map(Self).map_err(py_err)
    }

    #[getter]
    fn n_levels(&self) -> usize {
        self.0.n_levels
    }

    #[getter]
    fn cls(&self) -> String {
        self.0.class.to_string()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.0.sigma()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.0.radius()
    }

    /// Sorted distinct levels of one sampled matrix.
    #[pyo3(signature = (seed, stream = 0))]
    fn sample_levels(&self, seed: u64, stream: u64) -> PyResult<Vec<f64>> {
        let h = ensembles::sample_matrix_stream(&self.0, seed, stream).map_err(py_err)?;
        Ok(spectra::eigendecompose(&h).map_err(py_err)?.levels().to_vec())
    }

    fn __repr__(&self) -> String {
        format!(
            "EnsembleSpec(n_levels={}, cls='{}', mean_energy={}, mean_spacing={})",
            self.0.n_levels, self.0.class, self.0.mean_energy, self.0.mean_spacing
        )
    }
}

/// Parameters of the averaged characteristic function and work density.
#[pyclass(name = "QuenchParams", module = "rmtwork_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyQuenchParams(analytic::QuenchParams);

#[pymethods]
impl PyQuenchParams {
    #[new]
    #[pyo3(signature = (n_levels, s_init, s_final, e_init = 0.0, e_final = 0.0, beta = 0.0, ground_energy = None))]
    fn new(
        n_levels: usize,
        s_init: f64,
        s_final: f64,
        e_init: f64,
        e_final: f64,
        beta: f64,
        ground_energy: Option<f64>,
    ) -> PyResult<Self> {
        let mut p = analytic::QuenchParams::new(n_levels, s_init, s_final, e_init, e_final, beta).map_err(py_err)?;
        if let Some(e1) = ground_energy {
            p = p.with_ground_energy(e1);
            p.validate().map_err(py_err)?;
        }
        Ok(Self(p))
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta
    }

    #[getter]
    fn radius_init(&self) -> f64 {
        self.0.radius_init()
    }

    #[getter]
    fn radius_final(&self) -> f64 {
        self.0.radius_final()
    }

    fn g(&self, u: f64) -> Complex64 {
        analytic::g_ensemble(&self.0, u)
    }

    fn g_curve(&self, u: Vec<f64>) -> Vec<Complex64> {
        analytic::curve(&u, |x| analytic::g_ensemble(&self.0, x))
    }

    fn g_beta0(&self, u: f64) -> Complex64 {
        analytic::g_beta0(&self.0, u)
    }

    fn g_betainf(&self, u: f64) -> Complex64 {
        analytic::g_betainf(&self.0, u)
    }

    /// Predicted work density on the given grid.
    fn p_w(&self, w: Vec<f64>) -> PyResult<Vec<f64>> {
        analytic::p_w_predicted(&self.0, &w).map_err(py_err)
    }

    /// `(w_star, delta_w)` for regime "beta0" or "betainf".
    fn peak_width(&self, regime: &str) -> PyResult<(f64, f64)> {
        let regime = match regime {
            "beta0" => PeakRegime::Beta0,
            "betainf" => PeakRegime::BetaInf,
            other => return Err(PyValueError::new_err(format!("unknown regime '{other}'"))),
        };
        Ok(analytic::peak_width(&self.0, regime))
    }

    fn n_eff(&self) -> PyResult<f64> {
        analytic::n_eff(self.0.beta, self.0.s_init).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "QuenchParams(n_levels={}, s_init={}, s_final={}, e_init={}, e_final={}, beta={})",
            p.n_levels, p.s_init, p.s_final, p.e_init, p.e_final, p.beta
        )
    }
}

/// A quench between two ensembles at inverse temperature `beta`.
#[pyclass(name = "QuenchExperiment", module = "rmtwork_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyQuenchExperiment(quench::QuenchExperiment);

#[pymethods]
impl PyQuenchExperiment {
    #[new]
    #[pyo3(signature = (initial, final_, beta, n_draws = 1, master_seed = 0, u_max = 3.0, u_points = 512))]
    fn new(
        initial: &PyEnsembleSpec,
        final_: &PyEnsembleSpec,
        beta: f64,
        n_draws: usize,
        master_seed: u64,
        u_max: f64,
        u_points: usize,
    ) -> PyResult<Self> {
        let mut exp = quench::QuenchExperiment::new(initial.0, final_.0, beta).map_err(py_err)?;
        exp.n_draws = n_draws;
        exp.master_seed = master_seed;
        exp.u_grid.max = u_max;
        exp.u_grid.count = u_points;
        exp.validate().map_err(py_err)?;
        Ok(Self(exp))
    }

    /// Preset for figure 1, 2 or 3.
    #[staticmethod]
    fn figure(id: u8) -> PyResult<Self> {
        let cfg = rmtwork::config::RunConfig::preset(Some(id)).map_err(py_err)?;
        cfg.experiment().map(Self).map_err(py_err)
    }

    fn params(&self) -> PyResult<PyQuenchParams> {
        self.0.params().map(PyQuenchParams).map_err(py_err)
    }

    fn u_grid(&self) -> Vec<f64> {
        self.0.u_grid.points()
    }

    /// Report of draw `draw_index` as a dict.
    #[pyo3(signature = (draw_index = 0))]
    fn run_single_draw<'py>(&self, py: Python<'py>, draw_index: usize) -> PyResult<Bound<'py, PyAny>> {
        let exp = self.0;
        let report = py.detach(|| quench::run_single_draw(&exp, draw_index)).map_err(py_err)?;
        to_python(py, &report)
    }

    fn run_ensemble<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let exp = self.0;
        let report = py.detach(|| quench::run_ensemble(&exp)).map_err(py_err)?;
        to_python(py, &report)
    }

    fn __repr__(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
}

/// Built-in consistency checks; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (seed = 0))]
fn run_validation(py: Python<'_>, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let opts = validate::ValidationOptions { seed, ..Default::default() };
    let report = py.detach(|| validate::run_validation(&opts)).map_err(py_err)?;
    to_python(py, &report)
}

#[pyfunction]
fn semicircle_density(radius: f64, x: f64) -> f64 {
    analytic::semicircle_density(radius, x)
}

#[pymodule]
pub fn rmtwork_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEnsembleSpec>()?;
    m.add_class::<PyQuenchParams>()?;
    m.add_class::<PyQuenchExperiment>()?;
    m.add_function(wrap_pyfunction!(run_validation, m)?)?;
    m.add_function(wrap_pyfunction!(semicircle_density, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
