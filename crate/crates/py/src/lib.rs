//! Python bindings for `ctxhist`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use ctxhist::ensemble::EnsembleDump;
use ctxhist::io::{frame_from_json, frame_to_json};
use ctxhist::linalg::DEFAULT_GROUP_TOL;
use ctxhist::scenarios::checks::{run_suite, Suite};
use ctxhist::scenarios::peres::{peres_contexts, run_peres};
use ctxhist::scenarios::remark::run_remark;
use ctxhist::scenarios::ScenarioConfig;
use ctxhist::{CMatrix, CVector, Context, Frame, LabeledEnsemble, ModelConfig, Observable, C64};

create_exception!(ctxhist, ModelViolation, PyException, "A model invariant failed at runtime.");

fn to_py(e: ctxhist::Error) -> PyErr {
    if e.is_violation() {
        ModelViolation::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn matrix(rows: Vec<Vec<C64>>) -> PyResult<CMatrix> {
    CMatrix::from_rows(rows).map_err(to_py)
}

fn scenario(epsilon: f64, n_samples: usize, seed: u64) -> PyResult<ScenarioConfig> {
    let cfg = ScenarioConfig {
        epsilon,
        seed,
        n_samples,
        per_sample: false,
    };
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

type Blocks = Vec<Vec<usize>>;

fn json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// An orthonormal frame taken up to reordering and phases.
#[pyclass(name = "Context", frozen, skip_from_py_object, module = "ctxhist")]
#[derive(Clone)]
struct PyContext(Context);

#[pymethods]
impl PyContext {
    #[new]
    #[pyo3(signature = (vectors, name=None))]
    fn new(vectors: Vec<Vec<C64>>, name: Option<String>) -> PyResult<Self> {
        let frame = Frame::new(vectors.into_iter().map(CVector::new).collect()).map_err(to_py)?;
        Ok(PyContext(match name {
            Some(n) => Context::named(frame, n),
            None => Context::new(frame),
        }))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        frame_from_json(text).map(PyContext).map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        frame_to_json(&self.0).map_err(to_py)
    }

    #[getter]
    fn id(&self) -> String {
        self.0.id().as_str().to_owned()
    }

    #[getter]
    fn name(&self) -> Option<String> {
        self.0.name().map(str::to_owned)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn vectors(&self) -> Vec<Vec<C64>> {
        self.0.frame().vectors().iter().map(|v| v.entries().to_vec()).collect()
    }

    fn is_equivalent(&self, other: &PyContext) -> PyResult<bool> {
        self.0.is_equivalent(&other.0).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Context({}, dim={})", self.0.label(), self.0.dim())
    }
}

/// A Hermitian matrix with its exact spectrum.
#[pyclass(name = "Observable", frozen, skip_from_py_object, module = "ctxhist")]
#[derive(Clone)]
struct PyObservable(Observable);

#[pymethods]
impl PyObservable {
    #[new]
    #[pyo3(signature = (rows, eigenvalues=None))]
    fn new(rows: Vec<Vec<C64>>, eigenvalues: Option<Vec<f64>>) -> PyResult<Self> {
        let m = matrix(rows)?;
        let o = match eigenvalues {
            Some(values) => Observable::with_spectrum(m, &values),
            None => Observable::new(m),
        };
        o.map(PyObservable).map_err(to_py)
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.0.spectrum().to_vec()
    }

    fn is_stable_in(&self, context: &PyContext) -> PyResult<bool> {
        ctxhist::is_stable(self.0.matrix(), &context.0).map_err(to_py)
    }
}

/// Labeled ensemble of hidden samples after a history of contexts.
#[pyclass(name = "Ensemble", frozen, skip_from_py_object, module = "ctxhist")]
struct PyEnsemble(LabeledEnsemble);

#[pymethods]
impl PyEnsemble {
    #[new]
    #[pyo3(signature = (state, base, epsilon=0.3, seed=42, n_samples=10_000))]
    fn new(state: Vec<C64>, base: &PyContext, epsilon: f64, seed: u64, n_samples: usize) -> PyResult<Self> {
        let config = ModelConfig::new(CVector::new(state), epsilon, base.0.clone(), seed, n_samples).map_err(to_py)?;
        ctxhist::prepare(&config).map(PyEnsemble).map_err(to_py)
    }

    /// New ensemble after moving to `context`; the samples are shared.
    fn extend(&self, context: &PyContext) -> PyResult<Self> {
        ctxhist::extend_history(&self.0, context.0.clone()).map(PyEnsemble).map_err(to_py)
    }

    #[getter]
    fn history(&self) -> Vec<String> {
        self.0.history().contexts().iter().map(Context::label).collect()
    }

    #[getter]
    fn current(&self) -> PyContext {
        PyContext(self.0.current().clone())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn masses(&self) -> Vec<f64> {
        self.0.split().masses()
    }

    fn labels(&self) -> PyResult<Vec<usize>> {
        (0..self.0.len()).map(|s| ctxhist::label_of(&self.0, s)).collect::<Result<_, _>>().map_err(to_py)
    }

    fn position(&self, sample: usize) -> PyResult<Vec<f64>> {
        if sample >= self.0.len() {
            return Err(PyValueError::new_err(format!("sample {sample} out of range")));
        }
        ctxhist::position_of(&self.0, sample).map(|p| p.0).map_err(to_py)
    }

    fn values(&self, observable: &PyObservable) -> PyResult<Vec<f64>> {
        ctxhist::assign_value(&self.0, &observable.0).map_err(to_py)
    }

    fn values_pullback(&self, observable: &PyObservable) -> PyResult<Vec<f64>> {
        ctxhist::assign_value_pullback(&self.0, &observable.0).map_err(to_py)
    }

    fn expectation(&self, observable: &PyObservable) -> PyResult<f64> {
        ctxhist::expectation_exact(&self.0, &observable.0).map_err(to_py)
    }

    /// Sample mean and standard error.
    fn expectation_mc(&self, observable: &PyObservable) -> PyResult<(f64, f64)> {
        ctxhist::expectation_mc(&self.0, &observable.0).map_err(to_py)
    }

    fn dump_json(&self) -> PyResult<String> {
        json(&EnsembleDump::of(&self.0))
    }
}

/// Finest common partitions of two frames as 0-based index blocks.
#[pyfunction]
fn finest_partitions(a: &PyContext, b: &PyContext) -> PyResult<(Blocks, Blocks)> {
    let p = ctxhist::finest_partitions(&a.0, &b.0).map_err(to_py)?;
    Ok((p.i_blocks, p.j_blocks))
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
#[pyfunction]
fn jacobi_eigh(rows: Vec<Vec<C64>>) -> PyResult<(Vec<f64>, Vec<Vec<C64>>)> {
    let (frame, spectral) = ctxhist::jacobi_eigh(&matrix(rows)?, DEFAULT_GROUP_TOL).map_err(to_py)?;
    let mut values = vec![0.0; frame.dim()];
    for block in &spectral.blocks {
        for &i in &block.indices {
            values[i] = block.eigenvalue;
        }
    }
    let vectors = frame.vectors().iter().map(|v| v.entries().to_vec()).collect();
    Ok((values, vectors))
}

/// `(max |MᵀJM - J|, det M)` for the realification of a unitary.
#[pyfunction]
fn symplectic_volume_check(rows: Vec<Vec<C64>>) -> PyResult<(f64, f64)> {
    let r = ctxhist::symplectic_volume_check(&matrix(rows)?).map_err(to_py)?;
    Ok((r.symplectic_residual, r.det))
}

/// The six two-qubit contexts and the singlet state.
#[pyfunction]
fn peres_setup() -> (Vec<PyContext>, Vec<C64>) {
    let ctx = peres_contexts();
    let contexts = ctx.all().into_iter().cloned().map(PyContext).collect();
    (contexts, ctx.singlet.entries().to_vec())
}

#[pyfunction]
#[pyo3(signature = (epsilon=0.3, n_samples=100_000, seed=42))]
fn peres_report(epsilon: f64, n_samples: usize, seed: u64) -> PyResult<String> {
    json(&run_peres(&scenario(epsilon, n_samples, seed)?).map_err(to_py)?)
}

#[pyfunction]
#[pyo3(signature = (epsilon=0.3, n_samples=100_000, seed=42))]
fn remark_report(epsilon: f64, n_samples: usize, seed: u64) -> PyResult<String> {
    json(&run_remark(&scenario(epsilon, n_samples, seed)?).map_err(to_py)?)
}

#[pyfunction]
#[pyo3(signature = (suite, trials=20, seed=42))]
fn check_suite(suite: &str, trials: usize, seed: u64) -> PyResult<String> {
    let suite = match suite {
        "gfunc" => Suite::GFunc,
        "ntrns" => Suite::NTrns,
        "symplectic" => Suite::Symplectic,
        other => return Err(PyValueError::new_err(format!("unknown suite {other:?}"))),
    };
    json(&run_suite(suite, trials, seed).map_err(to_py)?)
}

#[pymodule]
#[pyo3(name = "ctxhist")]
fn ctxhist_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ModelViolation", m.py().get_type::<ModelViolation>())?;
    m.add_class::<PyContext>()?;
    m.add_class::<PyObservable>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_function(wrap_pyfunction!(finest_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi_eigh, m)?)?;
    m.add_function(wrap_pyfunction!(symplectic_volume_check, m)?)?;
    m.add_function(wrap_pyfunction!(peres_setup, m)?)?;
    m.add_function(wrap_pyfunction!(peres_report, m)?)?;
    m.add_function(wrap_pyfunction!(remark_report, m)?)?;
    m.add_function(wrap_pyfunction!(check_suite, m)?)?;
    Ok(())
}
