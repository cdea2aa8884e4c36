//! Python bindings. Complex results (reports, breakdowns) cross the
//! boundary as JSON text.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use behavesim_core::baselines;
use behavesim_core::behave::{self, FingerprintSet};
use behavesim_core::cluster::{self, Linkage, RankMethod};
use behavesim_core::expr::parse_sexpr;
use behavesim_core::search::{self, GenError, SearchConfig, SearchError, SearchMode};
use behavesim_core::soldist::SolutionMetric;
use behavesim_core::trajsim::{self, Measure, TrajSimConfig};
use behavesim_core::types::{AlgorithmSpec, PsTraj, Solution, Task};
use behavesim_core::zoo::{self, fixtures};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn measure(name: &str) -> PyResult<Measure> {
    Ok(match name {
        "dtw" => Measure::Dtw,
        "mean" => Measure::MeanPairwise,
        "erp" => Measure::erp(),
        "cosine" => Measure::SegmentCosine,
        other => return Err(PyValueError::new_err(format!("unknown measure `{other}`"))),
    })
}

/// A zoo algorithm or a TSP scoring expression.
#[pyclass(name = "Algorithm", module = "behavesim", frozen, from_py_object)]
#[derive(Clone)]
struct PyAlgorithm {
    spec: AlgorithmSpec,
}

impl PyAlgorithm {
    fn task(&self) -> Task {
        match self.spec.expr() {
            Some(_) => Task::Tsp,
            None => zoo::lookup(&self.spec.id()).expect("resolved zoo id").task,
        }
    }

    fn fingerprint(&self, measure_name: &str) -> PyResult<FingerprintSet> {
        let cfg = TrajSimConfig::with_measure(measure(measure_name)?);
        Ok(match self.spec.expr() {
            Some(_) => FingerprintSet::over_instances(fixtures::registry(), &fixtures::tsp12_ids(), cfg).map_err(value_err)?,
            None => FingerprintSet::for_task(self.task(), cfg),
        })
    }
}

#[pymethods]
impl PyAlgorithm {
    /// Resolves a zoo id, or parses an S-expression when `text` starts with `(`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let spec = if text.trim_start().starts_with('(') {
            AlgorithmSpec::dsl(parse_sexpr(text).map_err(value_err)?)
        } else {
            AlgorithmSpec::zoo(text).map_err(value_err)?
        };
        Ok(PyAlgorithm { spec })
    }

    #[getter]
    fn id(&self) -> String {
        self.spec.id()
    }

    #[getter]
    fn text(&self) -> String {
        self.spec.display_text.clone()
    }

    #[getter(task)]
    fn task_name(&self) -> String {
        self.task().to_string()
    }

    /// Trajectory on a fixture instance from one of its start points.
    #[pyo3(signature = (instance, start, seed = 0))]
    fn record(&self, instance: &str, start: &str, seed: u64) -> PyResult<PyTrajectory> {
        let inst = fixtures::registry()
            .get(instance)
            .ok_or_else(|| PyValueError::new_err(format!("unknown instance `{instance}`")))?;
        let sp = inst
            .start(start)
            .ok_or_else(|| PyValueError::new_err(format!("instance {instance} has no start `{start}`")))?;
        let traj = zoo::run_algorithm(&self.spec, inst, sp, seed).map_err(value_err)?;
        Ok(PyTrajectory { traj })
    }

    fn __repr__(&self) -> String {
        format!("Algorithm({:?})", self.spec.id())
    }
}

/// A recorded problem-solving trajectory.
#[pyclass(name = "Trajectory", module = "behavesim", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTrajectory {
    traj: PsTraj,
}

#[pymethods]
impl PyTrajectory {
    fn __len__(&self) -> usize {
        self.traj.len()
    }

    /// Steps as JSON, one object per solution.
    fn steps_json(&self) -> String {
        serde_json::to_string(&self.traj.steps).expect("steps serialize")
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.traj).expect("trajectory serializes")
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let traj: PsTraj = serde_json::from_str(text).map_err(value_err)?;
        traj.validate().map_err(value_err)?;
        Ok(PyTrajectory { traj })
    }

    /// Similarity to another trajectory under the default distance settings.
    #[pyo3(signature = (other, measure = "dtw"))]
    fn sim(&self, other: &PyTrajectory, measure: &str) -> PyResult<f64> {
        let cfg = TrajSimConfig::with_measure(self::measure(measure)?);
        trajsim::sim_pstraj(&self.traj, &other.traj, &cfg, &SolutionMetric::default()).map_err(value_err)
    }
}

/// Behavioral similarity of two algorithms on the default fingerprint of their task.
#[pyfunction]
#[pyo3(signature = (a, b, measure = "dtw"))]
fn behave_sim(a: &PyAlgorithm, b: &PyAlgorithm, measure: &str) -> PyResult<f64> {
    if a.task() != b.task() {
        return Err(PyValueError::new_err("algorithms solve different tasks"));
    }
    let fp = a.fingerprint(measure)?;
    behave::behave_sim(&a.spec, &b.spec, &fp, fixtures::registry()).map_err(value_err)
}

/// Per-(instance, start) similarities as JSON.
#[pyfunction]
#[pyo3(signature = (a, b, measure = "dtw"))]
fn breakdown_json(a: &PyAlgorithm, b: &PyAlgorithm, measure: &str) -> PyResult<String> {
    let fp = a.fingerprint(measure)?;
    let br = behave::breakdown(&a.spec, &b.spec, &fp, fixtures::registry()).map_err(value_err)?;
    Ok(serde_json::to_string(&br).expect("breakdown serializes"))
}

/// DTW distance between two lists of real vectors.
#[pyfunction]
fn dtw_distance(x: Vec<Vec<f64>>, y: Vec<Vec<f64>>) -> PyResult<f64> {
    let conv = |v: Vec<Vec<f64>>| v.into_iter().map(Solution::real).collect::<Result<Vec<_>, _>>();
    let x = conv(x).map_err(value_err)?;
    let y = conv(y).map_err(value_err)?;
    trajsim::dtw_distance(&x, &y, &SolutionMetric::default()).map_err(value_err)
}

#[pyfunction]
fn edit_distance(a: Vec<i64>, b: Vec<i64>) -> usize {
    behavesim_core::soldist::edit_distance(&a, &b)
}

/// Token n-gram similarity of two texts.
#[pyfunction]
fn ngram_sim(a: &str, b: &str) -> PyResult<f64> {
    baselines::text_sim(a, b).map_err(value_err)
}

/// Newick tree of the algorithms clustered on `1 - behave_sim`.
#[pyfunction]
#[pyo3(signature = (algos, linkage = "average", measure = "dtw"))]
fn cluster_newick(algos: Vec<PyAlgorithm>, linkage: &str, measure: &str) -> PyResult<String> {
    let linkage = match linkage {
        "average" => Linkage::Average,
        "complete" => Linkage::Complete,
        "single" => Linkage::Single,
        other => return Err(PyValueError::new_err(format!("unknown linkage `{other}`"))),
    };
    let first = algos.first().ok_or_else(|| PyValueError::new_err("no algorithms"))?;
    if algos.iter().any(|a| a.task() != first.task()) {
        return Err(PyValueError::new_err("algorithms solve different tasks"));
    }
    let fp = first.fingerprint(measure)?;
    let reg = fixtures::registry();
    let specs: Vec<_> = algos.iter().map(|a| a.spec.clone()).collect();
    let trajs = specs
        .iter()
        .map(|s| behave::record_fingerprint(s, &fp, reg))
        .collect::<Result<Vec<_>, _>>()
        .map_err(value_err)?;
    let cmp = behave::TrajComparator::for_fingerprint(&fp, reg).map_err(value_err)?;
    let views: Vec<&[PsTraj]> = trajs.iter().map(Vec::as_slice).collect();
    let m = behave::sim_matrix_trajs(&views, &cmp).map_err(value_err)?;
    let labels: Vec<String> = specs.iter().map(AlgorithmSpec::id).collect();
    let d = cluster::agglomerate(&m, linkage, &labels).map_err(value_err)?;
    Ok(d.to_newick())
}

#[pyfunction]
#[pyo3(signature = (a, b, method = "kendall"))]
fn rank_correlation(a: Vec<f64>, b: Vec<f64>, method: &str) -> PyResult<f64> {
    let method = match method {
        "kendall" => RankMethod::KendallTau,
        "spearman" => RankMethod::Spearman,
        other => return Err(PyValueError::new_err(format!("unknown method `{other}`"))),
    };
    cluster::rank_correlation(&a, &b, method).map_err(value_err)
}

/// Runs a search from a JSON config (empty object for defaults) and returns
/// the report as JSON. The GIL is released while the search runs.
#[pyfunction]
#[pyo3(signature = (config_json = "{}", mode = "funsearch", workers = 1))]
fn run_search(py: Python<'_>, config_json: &str, mode: &str, workers: usize) -> PyResult<String> {
    let cfg: SearchConfig = serde_json::from_str(config_json).map_err(value_err)?;
    let mode = match mode {
        "funsearch" => SearchMode::Funsearch,
        "eoh" => SearchMode::Eoh,
        other => return Err(PyValueError::new_err(format!("unknown mode `{other}`"))),
    };
    let report = py.detach(|| search::run_search(&cfg, mode, workers)).map_err(|e| match e {
        SearchError::Generator(GenError::Unavailable(_)) => PyRuntimeError::new_err(e.to_string()),
        other => value_err(other),
    })?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

#[pyfunction]
fn zoo_ids() -> Vec<String> {
    zoo::ids().map(str::to_string).collect()
}

/// Benchmark pairs as `(type, left, right)`.
#[pyfunction]
fn dataset_pairs() -> Vec<(String, String, String)> {
    zoo::dataset_pairs()
        .into_iter()
        .map(|p| (p.type_tag.to_string(), p.left, p.right))
        .collect()
}

#[pymodule]
fn behavesim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgorithm>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(behave_sim, m)?)?;
    m.add_function(wrap_pyfunction!(breakdown_json, m)?)?;
    m.add_function(wrap_pyfunction!(dtw_distance, m)?)?;
    m.add_function(wrap_pyfunction!(edit_distance, m)?)?;
    m.add_function(wrap_pyfunction!(ngram_sim, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_newick, m)?)?;
    m.add_function(wrap_pyfunction!(rank_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(run_search, m)?)?;
    m.add_function(wrap_pyfunction!(zoo_ids, m)?)?;
    m.add_function(wrap_pyfunction!(dataset_pairs, m)?)?;
    Ok(())
}
