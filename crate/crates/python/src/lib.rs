//! Python bindings for `generic_integrators`.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use generic_integrators::cli::PotentialKind;
use generic_integrators::diagnostics::{self, Observable};
use generic_integrators::integrators::{self, Method, Stepper};
use generic_integrators::reference::{self, HarmonicAnalytic};
use generic_integrators::system;
use generic_integrators::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonFinite { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

#[pyclass(name = "State", module = "generic_integrators_py", from_py_object)]
#[derive(Clone, Copy)]
pub struct PyState {
    #[pyo3(get, set)]
    q: f64,
    #[pyo3(get, set)]
    p: f64,
    #[pyo3(get, set)]
    s: f64,
}

impl From<system::State> for PyState {
    fn from(x: system::State) -> Self {
        PyState {
            q: x.q,
            p: x.p,
            s: x.s,
        }
    }
}

impl From<PyState> for system::State {
    fn from(x: PyState) -> Self {
        system::State::new(x.q, x.p, x.s)
    }
}

#[pymethods]
#[allow(clippy::wrong_self_convention)]
impl PyState {
    #[new]
    #[pyo3(signature = (q, p, s = 0.0))]
    fn new(q: f64, p: f64, s: f64) -> Self {
        PyState { q, p, s }
    }

    fn to_tuple(&self) -> (f64, f64, f64) {
        (self.q, self.p, self.s)
    }

    fn __eq__(&self, other: &PyState) -> bool {
        self.to_tuple() == other.to_tuple()
    }

    fn __repr__(&self) -> String {
        format!("State(q={:?}, p={:?}, s={:?})", self.q, self.p, self.s)
    }
}

#[pyclass(
    name = "SystemParams",
    module = "generic_integrators_py",
    from_py_object
)]
#[derive(Clone, Copy)]
pub struct PyParams(system::SystemParams);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (mass = 1.0, gamma = 0.01, temperature = 1.0))]
    fn new(mass: f64, gamma: f64, temperature: f64) -> PyResult<Self> {
        system::SystemParams::new(mass, gamma, temperature)
            .map(PyParams)
            .map_err(to_py)
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }

    #[getter]
    fn temperature(&self) -> f64 {
        self.0.temperature
    }

    fn __repr__(&self) -> String {
        format!(
            "SystemParams(mass={:?}, gamma={:?}, temperature={:?})",
            self.0.mass, self.0.gamma, self.0.temperature
        )
    }
}

/// `harmonic` (U = k q²/2) or `cosine` (U = -k cos q).
#[pyclass(name = "Potential", module = "generic_integrators_py", from_py_object)]
#[derive(Clone, Copy)]
pub struct PyPotential {
    kind: PotentialKind,
    #[pyo3(get)]
    k: f64,
}

impl PyPotential {
    fn build(&self) -> Box<dyn system::Potential> {
        self.kind.build(self.k)
    }
}

#[pymethods]
impl PyPotential {
    #[new]
    #[pyo3(signature = (name, k = 1.0))]
    fn new(name: &str, k: f64) -> PyResult<Self> {
        Ok(PyPotential {
            kind: parse(name)?,
            k,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (k = 1.0))]
    fn harmonic(k: f64) -> Self {
        PyPotential {
            kind: PotentialKind::Harmonic,
            k,
        }
    }

    #[staticmethod]
    #[pyo3(signature = (k = 1.0))]
    fn cosine(k: f64) -> Self {
        PyPotential {
            kind: PotentialKind::Cosine,
            k,
        }
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.kind.as_str()
    }

    fn value(&self, q: f64) -> f64 {
        self.build().value(q)
    }

    fn force(&self, q: f64) -> f64 {
        self.build().force(q)
    }

    fn second_derivative(&self, q: f64) -> f64 {
        self.build().second_derivative(q)
    }

    fn __repr__(&self) -> String {
        format!("Potential({:?}, k={:?})", self.kind.as_str(), self.k)
    }
}

#[pyclass(name = "Trajectory", module = "generic_integrators_py")]
pub struct PyTrajectory(integrators::Trajectory);

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn h(&self) -> f64 {
        self.0.h
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __getitem__(&self, i: isize) -> PyResult<PyState> {
        let n = self.0.len() as isize;
        let idx = if i < 0 { i + n } else { i };
        if !(0..n).contains(&idx) {
            return Err(pyo3::exceptions::PyIndexError::new_err(
                "trajectory index out of range",
            ));
        }
        Ok(self.0.states[idx as usize].into())
    }

    fn times(&self) -> Vec<f64> {
        self.0.times()
    }

    fn positions(&self) -> Vec<f64> {
        self.0.positions()
    }

    fn momenta(&self) -> Vec<f64> {
        self.0.momenta()
    }

    fn entropies(&self) -> Vec<f64> {
        self.0.entropies()
    }

    fn energies(&self, params: PyParams, potential: PyPotential) -> Vec<f64> {
        self.0.energies(&params.0, potential.build().as_ref())
    }

    fn modified_energies(&self, params: PyParams, potential: PyPotential) -> Vec<f64> {
        self.0
            .modified_energies(&params.0, potential.build().as_ref())
    }

    fn entropy_decreases(&self) -> usize {
        self.0.entropy_decreases()
    }

    /// Fitted slope of the logarithm of successive local maxima of `q` or `p`.
    #[pyo3(signature = (observable = "q"))]
    fn dissipation_slope(&self, observable: &str) -> PyResult<f64> {
        let obs: Observable = parse(observable)?;
        let series = diagnostics::dissipation_rate_series(&self.0, obs).map_err(to_py)?;
        diagnostics::dissipation_slope(&series).map_err(to_py)
    }
}

#[pyfunction]
fn total_energy(state: PyState, params: PyParams, potential: PyPotential) -> f64 {
    system::total_energy(&state.into(), &params.0, potential.build().as_ref())
}

#[pyfunction]
fn modified_energy(state: PyState, h: f64, params: PyParams, potential: PyPotential) -> f64 {
    system::modified_energy(&state.into(), h, &params.0, potential.build().as_ref())
}

#[pyfunction]
fn generic_rhs(state: PyState, params: PyParams, potential: PyPotential) -> [f64; 3] {
    system::generic_rhs(&state.into(), &params.0, potential.build().as_ref())
}

/// Method tags: verlet, ybaby, mybaby, rk3, adg.
#[pyfunction]
fn methods() -> Vec<&'static str> {
    Method::ALL.iter().map(Method::as_str).collect()
}

#[pyfunction]
fn step(
    method: &str,
    state: PyState,
    h: f64,
    params: PyParams,
    potential: PyPotential,
) -> PyResult<PyState> {
    let m: Method = parse(method)?;
    m.step(&state.into(), h, &params.0, potential.build().as_ref())
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn integrate(
    py: Python<'_>,
    method: &str,
    state: PyState,
    h: f64,
    n_steps: usize,
    params: PyParams,
    potential: PyPotential,
) -> PyResult<PyTrajectory> {
    let m: Method = parse(method)?;
    let pot = potential.build();
    py.detach(|| integrators::integrate(&m, state.into(), h, n_steps, &params.0, pot.as_ref()))
        .map(PyTrajectory)
        .map_err(to_py)
}

#[pyfunction]
fn expected_decay_rate(
    method: &str,
    h: f64,
    params: PyParams,
    potential: PyPotential,
) -> PyResult<Option<f64>> {
    let m: Method = parse(method)?;
    Ok(m.expected_decay_rate(h, &params.0, potential.build().as_ref()))
}

#[pyfunction]
fn rmse(approx: Vec<f64>, exact: Vec<f64>) -> PyResult<f64> {
    diagnostics::rmse(&approx, &exact).map_err(to_py)
}

#[pyfunction]
fn convergence_order(points: Vec<(f64, f64)>) -> PyResult<f64> {
    diagnostics::convergence_order(&points).map_err(to_py)
}

/// Central-difference Jacobian of one step, as rows.
#[pyfunction]
fn one_step_jacobian(
    method: &str,
    state: PyState,
    h: f64,
    params: PyParams,
    potential: PyPotential,
) -> PyResult<[[f64; 3]; 3]> {
    let m: Method = parse(method)?;
    diagnostics::one_step_jacobian(&m, &state.into(), h, &params.0, potential.build().as_ref())
        .map_err(to_py)
}

/// Closed-form damped harmonic oscillator state at time `t`.
#[pyfunction]
#[pyo3(signature = (t, initial, params, k = 1.0))]
fn dho_exact(t: f64, initial: PyState, params: PyParams, k: f64) -> PyResult<PyState> {
    let r = HarmonicAnalytic::new(params.0, k, initial.into()).map_err(to_py)?;
    Ok(reference::dho_exact(t, &r).into())
}

#[pymodule]
fn generic_integrators_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyPotential>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(total_energy, m)?)?;
    m.add_function(wrap_pyfunction!(modified_energy, m)?)?;
    m.add_function(wrap_pyfunction!(generic_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(methods, m)?)?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(expected_decay_rate, m)?)?;
    m.add_function(wrap_pyfunction!(rmse, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_order, m)?)?;
    m.add_function(wrap_pyfunction!(one_step_jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(dho_exact, m)?)?;
    m.add("REFERENCE_STEP", reference::REFERENCE_STEP)?;
    Ok(())
}
