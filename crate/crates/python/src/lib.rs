//! Python bindings for `scarf_hierarchy`.
//!
//! Complex values cross the boundary as Python `complex`; sampled
//! functions come back as `(x, values)` list pairs.

use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use scarf_hierarchy::model::{self, BaseParams, LatticeLabel};
use scarf_hierarchy::numerics::{Grid, GridFunction};
use scarf_hierarchy::spectra;
use scarf_hierarchy::states::{self, WaveFunction, ZeroModeKind};
use scarf_hierarchy::verify::{self, CheckStatus, VerifyConfig};
use scarf_hierarchy::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::LevelOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn sampled(f: &GridFunction) -> (Vec<f64>, Vec<C64>) {
    (f.grid().nodes(), f.values().to_vec())
}

/// One node `(α + iγk, β + γm)` of the Hamiltonian lattice.
#[pyclass(name = "Lattice", frozen)]
struct PyLattice {
    label: LatticeLabel,
}

#[pymethods]
impl PyLattice {
    #[new]
    #[pyo3(signature = (alpha, beta, gamma = model::DEFAULT_GAMMA, k = 0, m = 0))]
    fn new(alpha: f64, beta: f64, gamma: f64, k: i64, m: i64) -> PyResult<Self> {
        let base = BaseParams::with_gamma(alpha, beta, gamma).map_err(to_py)?;
        Ok(PyLattice { label: base.label(k, m) })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.label.base.alpha
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.label.base.beta
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.label.base.gamma
    }

    #[getter]
    fn k(&self) -> i64 {
        self.label.k
    }

    #[getter]
    fn m(&self) -> i64 {
        self.label.m
    }

    #[getter]
    fn alpha_eff(&self) -> C64 {
        self.label.alpha_eff()
    }

    #[getter]
    fn beta_eff(&self) -> f64 {
        self.label.beta_eff()
    }

    fn shifted(&self, dk: i64, dm: i64) -> Self {
        PyLattice { label: self.label.shifted(dk, dm) }
    }

    fn potential(&self, x: f64) -> C64 {
        model::potential_value(&self.label, x)
    }

    /// `n_max`, or `None` when the real member has no bound states.
    fn n_max(&self) -> Option<usize> {
        model::n_max(self.label.beta_eff(), self.label.gamma())
    }

    /// Closed-form bound energies (identical along every k-column).
    fn spectrum(&self) -> Vec<f64> {
        model::closed_form_spectrum(&self.label).iter().map(|l| l.energy).collect()
    }

    /// Lowest `count` finite-difference eigenvalues; `k` must be 0.
    #[pyo3(signature = (count, x_max = 8.0, n_points = 8001, richardson = false))]
    fn spectrum_fd(&self, count: usize, x_max: f64, n_points: usize, richardson: bool) -> PyResult<Vec<f64>> {
        let grid = Grid::symmetric(x_max, n_points).map_err(to_py)?;
        let r = if richardson {
            spectra::bound_spectrum_richardson(&self.label, &grid, count)
        } else {
            spectra::bound_spectrum_fd(&self.label, &grid, count)
        }
        .map_err(to_py)?;
        Ok(r.energies().iter().map(|e| e.re).collect())
    }

    /// Normalized level-`n` state of this node's column, sampled on a grid.
    #[pyo3(signature = (n, x_max = 8.0, n_points = 4001))]
    fn state(&self, n: usize, x_max: f64, n_points: usize) -> PyResult<(Vec<f64>, Vec<C64>)> {
        let grid = Grid::symmetric(x_max, n_points).map_err(to_py)?;
        let base = BaseParams { beta: self.label.beta_eff(), ..self.label.base };
        let w: WaveFunction = states::complex_state(&base, self.label.k, n, &grid).map_err(to_py)?;
        Ok(sampled(&w.f))
    }

    /// Kernel of `C⁻` (`minus = true`) or `C⁺`, never square integrable.
    #[pyo3(signature = (minus = true, x_max = 8.0, n_points = 4001))]
    fn zero_mode(&self, minus: bool, x_max: f64, n_points: usize) -> PyResult<(Vec<f64>, Vec<C64>)> {
        let grid = Grid::symmetric(x_max, n_points).map_err(to_py)?;
        let which = if minus { ZeroModeKind::CMinusKernel } else { ZeroModeKind::CPlusKernel };
        Ok(sampled(&states::zero_mode(&self.label, which, &grid).f))
    }

    /// Runs the verification suite; returns `(passed, [(name, status, value, tolerance)])`.
    #[pyo3(signature = (x_max = 8.0, n_points = 4001, seed = 42, test_functions = 4))]
    #[allow(clippy::type_complexity)]
    fn verify(
        &self,
        py: Python<'_>,
        x_max: f64,
        n_points: usize,
        seed: u64,
        test_functions: usize,
    ) -> PyResult<(bool, Vec<(String, &'static str, Option<f64>, f64)>)> {
        let grid = Grid::symmetric(x_max, n_points).map_err(to_py)?;
        let mut cfg = VerifyConfig::new(self.label.base, grid);
        cfg.k = self.label.k;
        cfg.m = self.label.m;
        cfg.seed = seed;
        cfg.n_test_functions = test_functions;
        let report = py.detach(|| verify::run_verification(&cfg)).map_err(to_py)?;
        let rows = report
            .checks
            .iter()
            .map(|c| {
                let status = match c.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "fail",
                    CheckStatus::Skipped => "skipped",
                };
                (c.name.clone(), status, c.value, c.tolerance)
            })
            .collect();
        Ok((report.pass, rows))
    }

    fn __repr__(&self) -> String {
        let b = self.label.base;
        format!("Lattice(alpha={}, beta={}, gamma={}, k={}, m={})", b.alpha, b.beta, b.gamma, self.label.k, self.label.m)
    }
}

#[pyfunction]
fn gudermannian(x: f64) -> f64 {
    states::gudermannian(x)
}

#[pyfunction]
fn jacobi(n: usize, a: C64, b: C64, z: C64) -> PyResult<C64> {
    states::jacobi_polynomial(n, a, b, z).map_err(to_py)
}

#[pymodule]
fn scarf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_function(wrap_pyfunction!(gudermannian, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi, m)?)?;
    Ok(())
}
