//! Python bindings: the transform and sample-set types plus the
//! learning, verification, and simulation entry points.

use num_complex::Complex;
use pyo3::conversion::IntoPyObjectExt;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use beamsparse_core::analysis::{self, DftMspMode};
use beamsparse_core::learn::{self, CaConfig, MspConfig, SweepOrder};
use beamsparse_core::matkit::{self, CMatrix};
use beamsparse_core::models::{self, MultipathModel, MuMimoScene, SinusoidModel};
use beamsparse_core::objective::{self, StochasticModel};
use beamsparse_core::simulate::{self, Constellation, DetectorKind, UplinkConfig};
use beamsparse_core::Complex64;

fn err(e: beamsparse_core::Error) -> PyErr {
    match e {
        beamsparse_core::Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> Py<PyAny> {
    match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_py_any(py).unwrap(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py).unwrap()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py).unwrap()
            }
        }
        serde_json::Value::String(s) => s.into_py_any(py).unwrap(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)).unwrap();
            }
            list.into_py_any(py).unwrap()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)).unwrap();
            }
            dict.into_py_any(py).unwrap()
        }
    }
}

/// Square complex matrix certified unitary at construction.
#[pyclass(name = "UnitaryMatrix", frozen, from_py_object)]
#[derive(Clone)]
struct PyUnitary {
    inner: beamsparse_core::UnitaryMatrix,
}

#[pymethods]
impl PyUnitary {
    /// Build from a square list of rows of complex numbers.
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let m = matrix_from_rows(&rows)?;
        Ok(Self {
            inner: beamsparse_core::UnitaryMatrix::new(m).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Frobenius norm of AᴴA − I measured at construction.
    #[getter]
    fn defect(&self) -> f64 {
        self.inner.defect()
    }

    fn l4_norm4(&self) -> f64 {
        matkit::l4_norm4(self.inner.matrix())
    }

    fn entry(&self, i: usize, k: usize) -> PyResult<Complex64> {
        if i >= self.inner.dim() || k >= self.inner.dim() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.matrix()[(i, k)])
    }

    fn to_list(&self) -> Vec<Vec<Complex64>> {
        let m = self.inner.matrix();
        (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
    }

    /// Projection onto the nearest phased-basis columns:
    /// dict with perm, phases, distance_sq, is_permutation.
    fn nearest_cp(&self, py: Python<'_>) -> Py<PyAny> {
        let p = matkit::nearest_cp(&self.inner);
        let dict = PyDict::new(py);
        dict.set_item("perm", p.perm).unwrap();
        dict.set_item("phases", p.phases).unwrap();
        dict.set_item("distance_sq", p.distance_sq).unwrap();
        dict.set_item("is_permutation", p.is_permutation).unwrap();
        dict.into_py_any(py).unwrap()
    }

    /// Re-project onto the unitary group, shedding accumulated drift.
    fn renormalize(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.renormalize().map_err(err)?,
        })
    }

    fn save(&self, path: String) -> PyResult<()> {
        matkit::write_cmatrix(self.inner.matrix(), path).map_err(err)
    }

    #[staticmethod]
    fn load(path: String) -> PyResult<Self> {
        let m = matkit::read_cmatrix(path).map_err(err)?;
        Ok(Self {
            inner: beamsparse_core::UnitaryMatrix::new(m).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "UnitaryMatrix(dim={}, l4={:.6})",
            self.inner.dim(),
            matkit::l4_norm4(self.inner.matrix())
        )
    }
}

fn matrix_from_rows(rows: &[Vec<Complex64>]) -> PyResult<CMatrix> {
    if rows.is_empty() {
        return Err(PyValueError::new_err("matrix needs at least one row"));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("ragged rows"));
    }
    CMatrix::new(rows.len(), cols, rows.concat()).map_err(err)
}

/// Finite collection of complex column samples.
#[pyclass(name = "SampleSet", frozen, from_py_object)]
#[derive(Clone)]
struct PySampleSet {
    inner: models::SampleSet,
}

#[pymethods]
impl PySampleSet {
    /// Build from a list of columns (each a list of complex numbers).
    #[new]
    fn new(columns: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(Self {
            inner: models::SampleSet::from_columns(&columns).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn count(&self) -> usize {
        self.inner.len()
    }

    fn column(&self, m: usize) -> PyResult<Vec<Complex64>> {
        if m >= self.inner.len() {
            return Err(PyValueError::new_err("column out of range"));
        }
        Ok(self.inner.column(m))
    }

    fn save(&self, path: String) -> PyResult<()> {
        self.inner.save(path).map_err(err)
    }

    #[staticmethod]
    fn load(path: String) -> PyResult<Self> {
        Ok(Self {
            inner: models::SampleSet::load(path).map_err(err)?,
        })
    }

    /// Deterministic shuffle-split into (train, test).
    fn split(&self, train_frac: f64, seed: u64) -> PyResult<(Self, Self)> {
        let (tr, te) = self.inner.split(train_frac, seed).map_err(err)?;
        Ok((Self { inner: tr }, Self { inner: te }))
    }

    fn __repr__(&self) -> String {
        format!("SampleSet(dim={}, count={})", self.inner.dim(), self.inner.len())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Expectation backend for the l4 objective.
#[pyclass(name = "ObjectiveSpec", frozen, from_py_object)]
#[derive(Clone)]
struct PyObjectiveSpec {
    inner: objective::ObjectiveSpec,
}

#[pymethods]
impl PyObjectiveSpec {
    /// Finite dataset; the objective sums over columns.
    #[staticmethod]
    fn dataset(samples: PySampleSet) -> Self {
        Self {
            inner: objective::ObjectiveSpec::Dataset(samples.inner),
        }
    }

    /// Monte-Carlo mean over draws from the multipath model.
    #[staticmethod]
    fn multipath_mc(b: usize, gains: Vec<Complex64>, samples: usize, seed: u64) -> PyResult<Self> {
        let model = MultipathModel::new(b, gains, seed).map_err(err)?;
        Ok(Self {
            inner: objective::ObjectiveSpec::MonteCarlo {
                model: StochasticModel::Multipath(model),
                samples,
                seed,
            },
        })
    }

    /// Monte-Carlo mean over draws from the real sinusoid model.
    #[staticmethod]
    fn sinusoid_mc(b: usize, samples: usize, seed: u64) -> PyResult<Self> {
        let model = SinusoidModel::new(b, seed).map_err(err)?;
        Ok(Self {
            inner: objective::ObjectiveSpec::MonteCarlo {
                model: StochasticModel::Sinusoid(model),
                samples,
                seed,
            },
        })
    }

    /// Exact expectation under the single-path model.
    #[staticmethod]
    #[pyo3(signature = (b, c_mag = 1.0))]
    fn analytic_l1(b: usize, c_mag: f64) -> Self {
        Self {
            inner: objective::ObjectiveSpec::AnalyticL1 {
                dim: b,
                gain_mag: c_mag,
            },
        }
    }
}

#[pyfunction]
fn dft(n: usize) -> PyResult<PyUnitary> {
    Ok(PyUnitary {
        inner: matkit::dft_matrix(n).map_err(err)?,
    })
}

#[pyfunction]
fn dct2(n: usize) -> PyResult<PyUnitary> {
    Ok(PyUnitary {
        inner: matkit::dct2_matrix(n).map_err(err)?,
    })
}

#[pyfunction]
fn identity(n: usize) -> PyResult<PyUnitary> {
    beamsparse_core::UnitaryMatrix::new(CMatrix::identity(n))
        .map(|inner| PyUnitary { inner })
        .map_err(err)
}

#[pyfunction]
fn random_unitary(n: usize, seed: u64) -> PyResult<PyUnitary> {
    Ok(PyUnitary {
        inner: matkit::random_unitary(n, seed).map_err(err)?,
    })
}

#[pyfunction]
fn random_cp(n: usize, seed: u64) -> PyResult<PyUnitary> {
    Ok(PyUnitary {
        inner: matkit::random_cp(n, seed).map_err(err)?,
    })
}

/// Nearest unitary matrix (Frobenius) to an arbitrary square matrix.
#[pyfunction]
fn project_unitary(rows: Vec<Vec<Complex64>>) -> PyResult<PyUnitary> {
    let m = matrix_from_rows(&rows)?;
    Ok(PyUnitary {
        inner: matkit::project_unitary(&m).map_err(err)?,
    })
}

#[pyfunction]
fn sample_multipath(b: usize, gains: Vec<Complex64>, n: usize, seed: u64) -> PyResult<PySampleSet> {
    let model = MultipathModel::new(b, gains, seed).map_err(err)?;
    Ok(PySampleSet {
        inner: models::sample_multipath(&model, n).map_err(err)?,
    })
}

#[pyfunction]
fn sample_sinusoid(b: usize, n: usize, seed: u64) -> PyResult<PySampleSet> {
    let model = SinusoidModel::new(b, seed).map_err(err)?;
    Ok(PySampleSet {
        inner: models::sample_sinusoid(&model, n).map_err(err)?,
    })
}

/// Dataset objective Σ_m ‖A·y_m‖₄⁴.
#[pyfunction]
fn g_det(a: &PyUnitary, y: &PySampleSet) -> PyResult<f64> {
    objective::g_det(&a.inner, &y.inner).map_err(err)
}

/// Exact expected objective under the single-path model.
#[pyfunction]
#[pyo3(signature = (a, c_mag = 1.0))]
fn g_analytic_l1(a: &PyUnitary, c_mag: f64) -> f64 {
    objective::g_analytic_l1(&a.inner, c_mag)
}

/// Closed-form second derivative at the DFT (unit gain), zero-based
/// indices with i > k.
#[pyfunction]
fn d1_closed_form(b: usize, i: usize, k: usize) -> PyResult<f64> {
    objective::d1_closed_form(b, i, k).map_err(err)
}

/// Closed-form first derivative at the DCT-II under the sinusoid model.
#[pyfunction]
fn dct_first_derivative(b: usize, i: usize, k: usize) -> PyResult<f64> {
    objective::dct_first_derivative(b, i, k).map_err(err)
}

/// First/second coordinate-ascent derivatives for every pair, as a dict.
#[pyfunction]
fn ca_derivatives(py: Python<'_>, a: &PyUnitary, spec: &PyObjectiveSpec) -> PyResult<Py<PyAny>> {
    let report = objective::ca_derivatives(&a.inner, &spec.inner).map_err(err)?;
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).expect("report json");
    Ok(json_to_py(py, &v))
}

fn trace_to_py(py: Python<'_>, trace: &learn::LearnTrace) -> Py<PyAny> {
    let v: serde_json::Value = serde_json::from_str(&trace.to_json()).expect("trace json");
    json_to_py(py, &v)
}

/// Matching–stretching–projection learner.
#[pyfunction]
#[pyo3(signature = (spec, init, max_iters = 500, step_tol = 1e-10, obj_tol = 1e-12))]
fn msp_run(
    py: Python<'_>,
    spec: &PyObjectiveSpec,
    init: &PyUnitary,
    max_iters: usize,
    step_tol: f64,
    obj_tol: f64,
) -> PyResult<(PyUnitary, Py<PyAny>)> {
    let mut cfg = MspConfig::new(init.inner.clone());
    cfg.max_iters = max_iters;
    cfg.step_tol = step_tol;
    cfg.obj_tol = obj_tol;
    let (a, trace) = learn::msp_run(&cfg, &spec.inner).map_err(err)?;
    Ok((PyUnitary { inner: a }, trace_to_py(py, &trace)))
}

/// Coordinate-ascent learner over Givens planes and relative phases.
#[pyfunction]
#[pyo3(signature = (spec, init, max_sweeps = 30, inner_tol = 1e-10,
                    improvement_tol = 1e-9, random_order_seed = None))]
fn ca_run(
    py: Python<'_>,
    spec: &PyObjectiveSpec,
    init: &PyUnitary,
    max_sweeps: usize,
    inner_tol: f64,
    improvement_tol: f64,
    random_order_seed: Option<u64>,
) -> PyResult<(PyUnitary, Py<PyAny>)> {
    let mut cfg = CaConfig::new(init.inner.clone());
    cfg.max_sweeps = max_sweeps;
    cfg.inner_tol = inner_tol;
    cfg.improvement_tol = improvement_tol;
    cfg.sweep_order = match random_order_seed {
        Some(seed) => SweepOrder::SeededRandom(seed),
        None => SweepOrder::Lexicographic,
    };
    let (a, trace) = learn::ca_run(&cfg, &spec.inner).map_err(err)?;
    Ok((PyUnitary { inner: a }, trace_to_py(py, &trace)))
}

/// Verifies the DFT fixed-point claim; dict report.
#[pyfunction]
#[pyo3(signature = (b_list, gains = None, mc_samples = None, seed = 0))]
fn verify_dft_msp(
    py: Python<'_>,
    b_list: Vec<usize>,
    gains: Option<Vec<Complex64>>,
    mc_samples: Option<usize>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let gains = gains.unwrap_or_else(|| vec![Complex::ONE]);
    let mode = match mc_samples {
        Some(samples) => DftMspMode::MonteCarlo { samples, seed },
        None => DftMspMode::Analytic,
    };
    let report = analysis::verify_dft_msp(&b_list, &gains, mode).map_err(err)?;
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).expect("report json");
    Ok(json_to_py(py, &v))
}

/// Verifies local optimality of the DFT along Givens planes.
#[pyfunction]
fn verify_dft_ca(py: Python<'_>, b_list: Vec<usize>) -> PyResult<Py<PyAny>> {
    let report = analysis::verify_dft_ca(&b_list).map_err(err)?;
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).expect("report json");
    Ok(json_to_py(py, &v))
}

/// Scans the DCT-II for nonzero first derivatives.
#[pyfunction]
fn scan_dct(py: Python<'_>, b_list: Vec<usize>) -> PyResult<Py<PyAny>> {
    let report = analysis::scan_dct(&b_list).map_err(err)?;
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).expect("report json");
    Ok(json_to_py(py, &v))
}

/// l4 ratio g(a2)/g(a1) on a test set, with per-sample values.
#[pyfunction]
fn compare_transforms(
    py: Python<'_>,
    a1: &PyUnitary,
    a2: &PyUnitary,
    test: &PySampleSet,
) -> PyResult<Py<PyAny>> {
    let cmp = analysis::compare_transforms(&a1.inner, &a2.inner, &test.inner).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("ratio", cmp.ratio)?;
    let per: Vec<(f64, f64)> = cmp.per_sample.iter().map(|p| (p.a1, p.a2)).collect();
    dict.set_item("per_sample", per)?;
    dict.into_py_any(py)
}

/// Uncoded BER over an SNR grid on synthetic scene channels.
#[pyfunction]
#[pyo3(signature = (b, u, snr_db, trials, seed, scenes = 16, paths = 1, channel_seed = 1,
                    detector = "lmmse", density = 0.125, transform = None,
                    constellation = "qpsk"))]
#[allow(clippy::too_many_arguments)]
fn ber_sweep(
    py: Python<'_>,
    b: usize,
    u: usize,
    snr_db: Vec<f64>,
    trials: usize,
    seed: u64,
    scenes: usize,
    paths: usize,
    channel_seed: u64,
    detector: &str,
    density: f64,
    transform: Option<PyUnitary>,
    constellation: &str,
) -> PyResult<Py<PyAny>> {
    let constellation = match constellation {
        "qpsk" => Constellation::Qpsk,
        "16qam" => Constellation::Qam16,
        other => return Err(PyValueError::new_err(format!("unknown constellation {other:?}"))),
    };
    let scene = MuMimoScene::with_defaults(b, u, paths, channel_seed).map_err(err)?;
    let channels = models::synth_scene_channels(&scene, scenes).map_err(err)?;
    let det = match detector {
        "lmmse" => DetectorKind::LmmseAntenna,
        "le" => DetectorKind::LeBeamspace {
            density,
            transform: match transform {
                Some(t) => t.inner,
                None => matkit::dft_matrix(b).map_err(err)?,
            },
        },
        other => return Err(PyValueError::new_err(format!("unknown detector {other:?}"))),
    };
    let cfg = UplinkConfig {
        b,
        u,
        constellation,
        snr_db_grid: snr_db,
        trials_per_point: trials,
        seed,
    };
    let curve = simulate::ber_sweep(&cfg, &det, &channels).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("snr_db", curve.snr_db)?;
    dict.set_item("ber", curve.ber)?;
    dict.set_item("bits", curve.bit_count)?;
    dict.into_py_any(py)
}

#[pymodule]
fn beamsparse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyUnitary>()?;
    m.add_class::<PySampleSet>()?;
    m.add_class::<PyObjectiveSpec>()?;
    m.add_function(wrap_pyfunction!(dft, m)?)?;
    m.add_function(wrap_pyfunction!(dct2, m)?)?;
    m.add_function(wrap_pyfunction!(identity, m)?)?;
    m.add_function(wrap_pyfunction!(random_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(random_cp, m)?)?;
    m.add_function(wrap_pyfunction!(project_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(sample_multipath, m)?)?;
    m.add_function(wrap_pyfunction!(sample_sinusoid, m)?)?;
    m.add_function(wrap_pyfunction!(g_det, m)?)?;
    m.add_function(wrap_pyfunction!(g_analytic_l1, m)?)?;
    m.add_function(wrap_pyfunction!(d1_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(dct_first_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(ca_derivatives, m)?)?;
    m.add_function(wrap_pyfunction!(msp_run, m)?)?;
    m.add_function(wrap_pyfunction!(ca_run, m)?)?;
    m.add_function(wrap_pyfunction!(verify_dft_msp, m)?)?;
    m.add_function(wrap_pyfunction!(verify_dft_ca, m)?)?;
    m.add_function(wrap_pyfunction!(scan_dct, m)?)?;
    m.add_function(wrap_pyfunction!(compare_transforms, m)?)?;
    m.add_function(wrap_pyfunction!(ber_sweep, m)?)?;
    Ok(())
}
