//! Python bindings: database access, single runs, sweeps, tables and the
//! scalar physics helpers.
//!
//! Structured results (summaries, reports, sweep grids) come back as plain
//! dicts built from the same JSON the command-line tool writes.

use std::path::PathBuf;

use niqb_core::dynamics::{DensityMatrix, SnapshotGrid, Tolerances};
use niqb_core::experiments::{self, RunOptions};
use niqb_core::metrics;
use niqb_core::nuclide_db::NuclideDb;
use niqb_core::pulse::{self, PulseRole, PulseSpec, ScheduleOverrides};
use num_complex::Complex64;
use pyo3::exceptions::{PyKeyError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py_err(e: niqb_core::Error) -> PyErr {
    use niqb_core::Error as E;
    match e {
        E::UnknownNuclide(id) => PyKeyError::new_err(format!("unknown nuclide `{id}`")),
        E::Io { .. } => PyOSError::new_err(e.to_string()),
        E::Integration { .. } | E::Numerical(_) | E::AtSnapshot { .. } | E::Invariant { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = niqb_core::io::to_json_string(value).map_err(to_py_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn overrides_from(py: Python<'_>, d: Option<&Bound<'_, PyDict>>) -> PyResult<ScheduleOverrides> {
    let Some(d) = d else { return Ok(ScheduleOverrides::default()) };
    let text: String = py.import("json")?.call_method1("dumps", (d,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(format!("bad overrides: {e}")))
}

fn run_options(snapshots: usize, rtol: f64, atol: f64) -> RunOptions {
    RunOptions { tol: Tolerances { rtol, atol }, grid: SnapshotGrid::Uniform(snapshots) }
}

/// A loaded parameter database.
#[pyclass(module = "niqb", frozen)]
struct Database {
    inner: NuclideDb,
}

#[pymethods]
impl Database {
    /// Loads `path` (JSON or CSV); without a path, `$NIQB_DB` or the bundled tables.
    #[new]
    #[pyo3(signature = (path=None))]
    fn new(path: Option<PathBuf>) -> PyResult<Self> {
        Ok(Database { inner: NuclideDb::resolve(path.as_deref()).map_err(to_py_err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn ids(&self) -> Vec<String> {
        self.inner.records().map(|r| r.id.clone()).collect()
    }

    fn record<'py>(&self, py: Python<'py>, id: &str) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, self.inner.require(id).map_err(to_py_err)?)
    }

    /// Charges one cell; returns a `ChargingResult`.
    #[pyo3(signature = (id, overrides=None, snapshots=2001, rtol=1e-10, atol=1e-12))]
    fn simulate(
        &self,
        py: Python<'_>,
        id: &str,
        overrides: Option<&Bound<'_, PyDict>>,
        snapshots: usize,
        rtol: f64,
        atol: f64,
    ) -> PyResult<ChargingResult> {
        let rec = self.inner.require(id).map_err(to_py_err)?;
        let o = overrides_from(py, overrides)?;
        let opts = run_options(snapshots, rtol, atol);
        let run = py.detach(|| experiments::run_charging_scenario(rec, &o, &opts)).map_err(to_py_err)?;
        let summary = niqb_core::io::to_json_string(&run.summary).map_err(to_py_err)?;
        let s = run.series;
        Ok(ChargingResult {
            summary_json: summary,
            times: s.times,
            populations: s.populations,
            energy: s.energy,
            power: s.power,
            ergotropy: s.ergotropy,
            ratio: s.ratio,
            purity: s.purity,
        })
    }

    /// Pump × Stokes intensity grid (W/cm²) for a three-level cell.
    #[pyo3(signature = (id, ip, is_, jobs=None))]
    fn sweep<'py>(
        &self,
        py: Python<'py>,
        id: &str,
        ip: Vec<f64>,
        is_: Vec<f64>,
        jobs: Option<usize>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let rec = self.inner.require(id).map_err(to_py_err)?;
        let grid = py
            .detach(|| {
                experiments::robustness_sweep(rec, &ip, &is_, &ScheduleOverrides::default(), &RunOptions::default(), jobs)
            })
            .map_err(to_py_err)?;
        json_to_py(py, &grid)
    }

    #[pyo3(signature = (jobs=None))]
    fn tables<'py>(&self, py: Python<'py>, jobs: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let report = py
            .detach(|| experiments::reproduce_performance_tables(&self.inner, &RunOptions::default(), jobs))
            .map_err(to_py_err)?;
        json_to_py(py, &report)
    }

    #[pyo3(signature = (jobs=None))]
    fn compare<'py>(&self, py: Python<'py>, jobs: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let cmp = py
            .detach(|| experiments::compare_nuclear_vs_atomic(&self.inner, &RunOptions::default(), jobs))
            .map_err(to_py_err)?;
        json_to_py(py, &cmp)
    }
}

/// Snapshots and metrics of one charging run.
#[pyclass(module = "niqb", frozen)]
struct ChargingResult {
    summary_json: String,
    #[pyo3(get)]
    times: Vec<f64>,
    /// populations[level][snapshot]
    #[pyo3(get)]
    populations: Vec<Vec<f64>>,
    #[pyo3(get)]
    energy: Vec<f64>,
    #[pyo3(get)]
    power: Vec<f64>,
    #[pyo3(get)]
    ergotropy: Vec<f64>,
    #[pyo3(get)]
    ratio: Vec<f64>,
    #[pyo3(get)]
    purity: Vec<f64>,
}

#[pymethods]
impl ChargingResult {
    #[getter]
    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        py.import("json")?.call_method1("loads", (self.summary_json.as_str(),))
    }

    fn __len__(&self) -> usize {
        self.times.len()
    }
}

/// (β, γ, x) for a transition of `transition_energy` eV hit by photons of `photon_energy` eV.
#[pyfunction]
fn solve_resonance(transition_energy: f64, photon_energy: f64) -> PyResult<(f64, f64, f64)> {
    let k = pulse::solve_resonance(transition_energy, photon_energy).map_err(to_py_err)?;
    Ok((k.beta, k.gamma, k.doppler))
}

/// ∫Ω dt of a Gaussian pulse; `omega0` in s⁻¹·(W/cm²)^(-1/2), intensity in W/cm².
#[pyfunction]
#[pyo3(signature = (omega0, intensity, duration_ps, doppler=1.0))]
fn pulse_area(omega0: f64, intensity: f64, duration_ps: f64, doppler: f64) -> f64 {
    pulse::pulse_area(&PulseSpec {
        omega0,
        intensity,
        center_ps: 0.0,
        duration_ps,
        doppler,
        role: PulseRole::Pump,
    })
}

#[pyfunction]
#[pyo3(signature = (omega0, duration_ps, doppler=1.0))]
fn calibrate_pi_pulse(omega0: f64, duration_ps: f64, doppler: f64) -> PyResult<f64> {
    pulse::calibrate_pi_pulse(omega0, duration_ps, doppler).map_err(to_py_err)
}

fn density(rho: Vec<Vec<Complex64>>) -> PyResult<DensityMatrix> {
    let d = rho.len();
    if rho.iter().any(|r| r.len() != d) {
        return Err(PyValueError::new_err("density matrix must be square"));
    }
    let m = nalgebra::DMatrix::from_fn(d, d, |i, j| rho[i][j]);
    DensityMatrix::from_matrix(m).map_err(to_py_err)
}

/// Energy above the ground level, eV.
#[pyfunction]
fn stored_energy(rho: Vec<Vec<Complex64>>, levels: Vec<f64>) -> PyResult<f64> {
    metrics::stored_energy(&density(rho)?, &levels).map_err(to_py_err)
}

/// Maximum work extractable by a unitary, eV.
#[pyfunction]
fn ergotropy(rho: Vec<Vec<Complex64>>, levels: Vec<f64>) -> PyResult<f64> {
    metrics::ergotropy(&density(rho)?, &levels).map_err(to_py_err)
}

#[pyfunction]
fn purity(rho: Vec<Vec<Complex64>>) -> PyResult<f64> {
    Ok(metrics::purity(&density(rho)?))
}

#[pymodule]
fn niqb(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Database>()?;
    m.add_class::<ChargingResult>()?;
    m.add_function(wrap_pyfunction!(solve_resonance, m)?)?;
    m.add_function(wrap_pyfunction!(pulse_area, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_pi_pulse, m)?)?;
    m.add_function(wrap_pyfunction!(stored_energy, m)?)?;
    m.add_function(wrap_pyfunction!(ergotropy, m)?)?;
    m.add_function(wrap_pyfunction!(purity, m)?)?;
    Ok(())
}
