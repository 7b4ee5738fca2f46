//! Python bindings: `import slm`.
//!
//! Objectives are given either by builtin name (`"sphere_min"`) or as a
//! Python callable taking a list of floats, together with `lo`/`hi` bounds.

use std::sync::{Arc, Mutex};

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use slm_core::baselines::{self, BaselineConfig, OptimRunResult};
use slm_core::bench::{self, Algorithm, AlgorithmSpec, BenchSpec, OutputFormat, SlmSettings};
use slm_core::engine::{self, GenerationRecord, SlmConfig};
use slm_core::labeling::{self, Sense};
use slm_core::objectives::{registry, ObjectiveSpec};
use slm_core::trace::{self, SvgStyle, TraceDocument};
use slm_core::{Point, SearchBox, Spacing};

create_exception!(slm, SlmError, PyException);

fn to_py(e: slm_core::SlmError) -> PyErr {
    match e {
        slm_core::SlmError::UnknownObjective { .. } => PyKeyError::new_err(e.to_string()),
        e => SlmError::new_err(e.to_string()),
    }
}

fn parse_sense(s: &str) -> PyResult<Sense> {
    s.parse()
        .map_err(|e: slm_core::SlmError| PyValueError::new_err(e.to_string()))
}

/// First Python exception raised by a callable objective during a run.
#[derive(Clone, Default)]
struct ErrSlot(Arc<Mutex<Option<PyErr>>>);

impl ErrSlot {
    fn take(&self) -> Option<PyErr> {
        self.0.lock().unwrap().take()
    }

    /// The stored Python exception if there is one, else the engine error.
    fn or(&self, e: slm_core::SlmError) -> PyErr {
        self.take().unwrap_or_else(|| to_py(e))
    }
}

struct Resolved {
    spec: ObjectiveSpec,
    errors: ErrSlot,
}

impl Resolved {
    fn check<T>(&self, r: slm_core::Result<T>) -> PyResult<T> {
        r.map_err(|e| self.errors.or(e))
    }
}

fn resolve(
    objective: &Bound<'_, PyAny>,
    lo: Option<Vec<f64>>,
    hi: Option<Vec<f64>>,
    sense: Option<&str>,
) -> PyResult<Resolved> {
    let errors = ErrSlot::default();
    if let Ok(name) = objective.extract::<String>() {
        let mut spec = registry().lookup(&name).map_err(to_py)?.clone();
        if let Some(s) = sense {
            spec.sense = parse_sense(s)?;
        }
        if lo.is_some() || hi.is_some() {
            let lo = lo.unwrap_or_else(|| spec.domain.lo().to_vec());
            let hi = hi.unwrap_or_else(|| spec.domain.hi().to_vec());
            spec.domain = SearchBox::new(lo, hi).map_err(to_py)?;
            spec.known_optima.retain(|(p, _)| spec.domain.contains(p));
        }
        return Ok(Resolved { spec, errors });
    }
    if !objective.is_callable() {
        return Err(PyValueError::new_err("objective must be a builtin name or a callable"));
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(PyValueError::new_err("a callable objective needs lo and hi bounds"));
    };
    let domain = SearchBox::new(lo, hi).map_err(to_py)?;
    let func: Py<PyAny> = objective.clone().unbind();
    let slot = errors.clone();
    let evaluator = Arc::new(move |x: &[f64]| -> f64 {
        Python::attach(
            |py| match func.call1(py, (x.to_vec(),)).and_then(|r| r.extract::<f64>(py)) {
                Ok(v) => v,
                Err(e) => {
                    slot.0.lock().unwrap().get_or_insert(e);
                    f64::NAN
                }
            },
        )
    });
    let sense = parse_sense(sense.unwrap_or("minimize"))?;
    let spec = ObjectiveSpec::new("callable", domain, sense, Vec::new(), evaluator).map_err(to_py)?;
    Ok(Resolved { spec, errors })
}

/// Axis-aligned box `[lo_i, hi_i]`.
#[pyclass(name = "SearchBox", module = "slm", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PySearchBox(SearchBox);

#[pymethods]
impl PySearchBox {
    #[new]
    fn new(lo: Vec<f64>, hi: Vec<f64>) -> PyResult<Self> {
        SearchBox::new(lo, hi).map(PySearchBox).map_err(to_py)
    }

    #[getter]
    fn lo(&self) -> Vec<f64> {
        self.0.lo().to_vec()
    }

    #[getter]
    fn hi(&self) -> Vec<f64> {
        self.0.hi().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn widths(&self) -> Vec<f64> {
        self.0.widths()
    }

    fn center(&self) -> Vec<f64> {
        self.0.center().0
    }

    fn contains(&self, point: Vec<f64>) -> bool {
        self.0.contains(&point)
    }

    fn corners(&self) -> Vec<Vec<f64>> {
        self.0.corners().into_iter().map(|p| p.0).collect()
    }

    /// `(grid, cells)`: the 3^n midpoint grid and the 2^n half-width cells.
    fn subdivide(&self) -> (Vec<Vec<f64>>, Vec<PySearchBox>) {
        let s = self.0.subdivide();
        (
            s.grid.into_iter().map(|p| p.0).collect(),
            s.cells.into_iter().map(|c| PySearchBox(c.bounds)).collect(),
        )
    }

    fn __repr__(&self) -> String {
        format!("SearchBox({:?}, {:?})", self.0.lo(), self.0.hi())
    }
}

/// One labelled box of one generation.
#[pyclass(name = "Generation", module = "slm", frozen)]
struct PyGeneration(GenerationRecord);

#[pymethods]
impl PyGeneration {
    #[getter]
    fn index(&self) -> usize {
        self.0.index
    }

    #[getter]
    fn bounds(&self) -> PySearchBox {
        PySearchBox(self.0.bounds.clone())
    }

    #[getter]
    fn spacing(&self) -> Vec<f64> {
        self.0.spacing.to_vec()
    }

    /// One dict per grid vertex: point, probe_target, displacement, label,
    /// value, target_value.
    #[getter]
    fn vertices<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.0
            .vertices
            .iter()
            .map(|v| {
                let d = PyDict::new(py);
                d.set_item("point", v.point.0.clone())?;
                d.set_item("probe_target", v.probe_target.0.clone())?;
                d.set_item("displacement", v.displacement.clone())?;
                d.set_item("label", v.label)?;
                d.set_item("value", v.value)?;
                d.set_item("target_value", v.target_value)?;
                Ok(d)
            })
            .collect()
    }

    #[getter]
    fn complete_cells(&self) -> Vec<PySearchBox> {
        self.0
            .complete_cells
            .iter()
            .map(|c| PySearchBox(c.bounds.clone()))
            .collect()
    }

    #[getter]
    fn chosen(&self) -> Option<PySearchBox> {
        self.0.chosen.as_ref().map(|c| PySearchBox(c.bounds.clone()))
    }

    #[getter]
    fn fallback_used(&self) -> bool {
        self.0.fallback_used
    }

    #[getter]
    fn evaluations(&self) -> usize {
        self.0.evaluations
    }

    #[getter]
    fn best_so_far(&self) -> f64 {
        self.0.best_so_far
    }

    fn table(&self) -> String {
        trace::render_generation_table(&self.0)
    }

    /// SVG drawing; 2-D generations only.
    fn svg(&self) -> PyResult<String> {
        trace::render_generation_svg(&self.0, &SvgStyle::default()).map_err(to_py)
    }
}

#[pyclass(name = "RunResult", module = "slm", frozen)]
struct PyRunResult {
    objective: String,
    config: SlmConfig,
    run: engine::RunResult,
}

#[pymethods]
impl PyRunResult {
    #[getter]
    fn best_point(&self) -> Vec<f64> {
        self.run.best_point.0.clone()
    }

    #[getter]
    fn best_value(&self) -> f64 {
        self.run.best_value
    }

    /// `(point, value)` per surviving cell; only filled in explore-all runs.
    #[getter]
    fn candidates(&self) -> Vec<(Vec<f64>, f64)> {
        self.run.candidates.iter().map(|(p, v)| (p.0.clone(), *v)).collect()
    }

    #[getter]
    fn generations(&self) -> Vec<PyGeneration> {
        self.run.generations.iter().cloned().map(PyGeneration).collect()
    }

    #[getter]
    fn generation_count(&self) -> usize {
        self.run.generation_count()
    }

    #[getter]
    fn evaluations(&self) -> usize {
        self.run.evaluations
    }

    #[getter]
    fn termination(&self) -> &'static str {
        self.run.termination.as_str()
    }

    #[getter]
    fn tolerance(&self) -> f64 {
        self.config.tolerance
    }

    fn chosen_boxes(&self) -> Vec<PySearchBox> {
        self.run.chosen_boxes().into_iter().map(PySearchBox).collect()
    }

    /// `(trace_text, {file_name: svg})` as written by `slm trace`.
    fn trace(&self) -> (String, Vec<(String, String)>) {
        let doc = TraceDocument::build(&self.objective, &self.config, &self.run, &SvgStyle::default());
        (doc.text(), doc.svg_files())
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(best_point={:?}, best_value={}, generations={}, evaluations={})",
            self.run.best_point.0,
            self.run.best_value,
            self.run.generation_count(),
            self.run.evaluations
        )
    }
}

#[pyclass(name = "BaselineResult", module = "slm", frozen)]
struct PyBaselineResult(OptimRunResult);

#[pymethods]
impl PyBaselineResult {
    #[getter]
    fn best_point(&self) -> Vec<f64> {
        self.0.best_point.0.clone()
    }

    #[getter]
    fn best_value(&self) -> f64 {
        self.0.best_value
    }

    #[getter]
    fn evaluations(&self) -> usize {
        self.0.evaluations
    }

    #[getter]
    fn start(&self) -> Option<Vec<f64>> {
        self.0.start.as_ref().map(|p| p.0.clone())
    }

    #[getter]
    fn start_clamped(&self) -> bool {
        self.0.start_clamped
    }

    #[getter]
    fn accepted_worse(&self) -> usize {
        self.0.accepted_worse
    }

    /// Best value so far after each iteration.
    #[getter]
    fn trajectory(&self) -> Vec<f64> {
        self.0.trajectory.iter().flatten().map(|(_, v)| *v).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "BaselineResult(best_point={:?}, best_value={}, evaluations={})",
            self.0.best_point.0, self.0.best_value, self.0.evaluations
        )
    }
}

#[pyclass(name = "BenchRow", module = "slm", frozen, from_py_object)]
#[derive(Clone)]
struct PyBenchRow(bench::BenchRow);

#[pymethods]
impl PyBenchRow {
    #[getter]
    fn algorithm(&self) -> &str {
        &self.0.algorithm
    }

    #[getter]
    fn objective(&self) -> &str {
        &self.0.objective
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }

    #[getter]
    fn found_point(&self) -> Vec<f64> {
        self.0.found_point.0.clone()
    }

    #[getter]
    fn found_value(&self) -> f64 {
        self.0.found_value
    }

    #[getter]
    fn deviation(&self) -> Vec<f64> {
        self.0.deviation.clone()
    }

    #[getter]
    fn wall_time_ms(&self) -> f64 {
        self.0.wall_time.as_secs_f64() * 1e3
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    fn __repr__(&self) -> String {
        format!(
            "BenchRow({}, {}, seed={}, found_point={:?})",
            self.0.algorithm, self.0.objective, self.0.seed, self.0.found_point.0
        )
    }
}

/// Names, domains and known optima of the builtin objectives.
#[pyfunction]
fn list_functions(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyDict>>> {
    registry()
        .iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("name", &s.name)?;
            d.set_item("dimension", s.dimension)?;
            d.set_item("lo", s.domain.lo().to_vec())?;
            d.set_item("hi", s.domain.hi().to_vec())?;
            d.set_item("sense", s.sense.as_str())?;
            let optima: Vec<(Vec<f64>, f64)> = s.known_optima.iter().map(|(p, v)| (p.0.clone(), *v)).collect();
            d.set_item("optima", optima)?;
            d.set_item("description", &s.optima_description)?;
            Ok(d)
        })
        .collect()
}

/// Value of a builtin objective at `point`.
#[pyfunction]
fn evaluate(name: &str, point: Vec<f64>) -> PyResult<f64> {
    let reg = registry();
    let spec = reg.lookup(name).map_err(to_py)?;
    if point.len() != spec.dimension {
        return Err(to_py(slm_core::SlmError::DimensionMismatch {
            expected: spec.dimension,
            got: point.len(),
        }));
    }
    Ok(spec.eval(&point))
}

#[pyfunction]
fn label_of(displacement: Vec<f64>) -> usize {
    labeling::label_of(&displacement)
}

/// Best point among `point` and its in-domain neighbours at offsets
/// `spacing`; returns a dict with target, target_value, origin_value,
/// evaluations and label.
#[pyfunction]
#[pyo3(signature = (objective, point, spacing, lo=None, hi=None, sense=None))]
fn probe<'py>(
    py: Python<'py>,
    objective: &Bound<'py, PyAny>,
    point: Vec<f64>,
    spacing: Vec<f64>,
    lo: Option<Vec<f64>>,
    hi: Option<Vec<f64>>,
    sense: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let r = resolve(objective, lo, hi, sense)?;
    let s = Spacing::new(spacing).map_err(to_py)?;
    let p = Point(point);
    let pr = r.check(labeling::probe(
        &*r.spec.evaluator,
        &p,
        &s,
        &r.spec.domain,
        r.spec.sense,
    ))?;
    let d = PyDict::new(py);
    d.set_item("label", labeling::label_of(&pr.target.minus(&p)))?;
    d.set_item("target", pr.target.0)?;
    d.set_item("target_value", pr.target_value)?;
    d.set_item("origin_value", pr.origin_value)?;
    d.set_item("evaluations", pr.evaluations)?;
    Ok(d)
}

/// Runs the subdividing labeling method. `tolerance` defaults to the widest
/// side of the domain over 2^10.
#[pyfunction]
#[pyo3(signature = (objective, lo=None, hi=None, *, tolerance=None, sense=None, max_generations=engine::DEFAULT_MAX_GENERATIONS, explore_all=false, cell_budget=engine::DEFAULT_CELL_BUDGET))]
#[allow(clippy::too_many_arguments)]
fn run_slm(
    objective: &Bound<'_, PyAny>,
    lo: Option<Vec<f64>>,
    hi: Option<Vec<f64>>,
    tolerance: Option<f64>,
    sense: Option<&str>,
    max_generations: usize,
    explore_all: bool,
    cell_budget: usize,
) -> PyResult<PyRunResult> {
    let r = resolve(objective, lo, hi, sense)?;
    let settings = SlmSettings {
        tolerance,
        max_generations,
        explore_all,
        cell_budget,
    };
    let config = settings.config_for(&r.spec);
    let run = r.check(engine::run_slm(&*r.spec.evaluator, &r.spec.domain, &config))?;
    Ok(PyRunResult {
        objective: r.spec.name.clone(),
        config,
        run,
    })
}

fn baseline(
    objective: &Bound<'_, PyAny>,
    lo: Option<Vec<f64>>,
    hi: Option<Vec<f64>>,
    cfg: BaselineConfig,
    f: fn(&ObjectiveSpec, &BaselineConfig) -> slm_core::Result<OptimRunResult>,
) -> PyResult<PyBaselineResult> {
    let r = resolve(objective, lo, hi, None)?;
    r.check(f(&r.spec, &cfg)).map(PyBaselineResult)
}

/// Uniform random sampling over the domain.
#[pyfunction]
#[pyo3(signature = (objective, iterations=bench::RS_ITERATIONS, seed=0, lo=None, hi=None))]
fn random_search(
    objective: &Bound<'_, PyAny>,
    iterations: usize,
    seed: u64,
    lo: Option<Vec<f64>>,
    hi: Option<Vec<f64>>,
) -> PyResult<PyBaselineResult> {
    baseline(
        objective,
        lo,
        hi,
        BaselineConfig::new(iterations, seed),
        baselines::random_search,
    )
}

/// Greedy random walk with a shrinking step; `initial` defaults to the
/// domain centre and is clamped into the domain.
#[pyfunction]
#[pyo3(signature = (objective, iterations=bench::RSW_ITERATIONS, seed=0, initial=None, lo=None, hi=None))]
fn random_search_walk(
    objective: &Bound<'_, PyAny>,
    iterations: usize,
    seed: u64,
    initial: Option<Vec<f64>>,
    lo: Option<Vec<f64>>,
    hi: Option<Vec<f64>>,
) -> PyResult<PyBaselineResult> {
    let mut cfg = BaselineConfig::new(iterations, seed);
    cfg.initial_point = initial.map(Point);
    baseline(objective, lo, hi, cfg, baselines::random_search_walk)
}

/// Simulated annealing with Metropolis acceptance and geometric cooling.
#[pyfunction]
#[pyo3(signature = (objective, iterations=bench::SA_ITERATIONS, seed=0, initial=None, temperature=None, cooling=0.95, lo=None, hi=None))]
#[allow(clippy::too_many_arguments)]
fn simulated_annealing(
    objective: &Bound<'_, PyAny>,
    iterations: usize,
    seed: u64,
    initial: Option<Vec<f64>>,
    temperature: Option<f64>,
    cooling: f64,
    lo: Option<Vec<f64>>,
    hi: Option<Vec<f64>>,
) -> PyResult<PyBaselineResult> {
    let mut cfg = BaselineConfig::new(iterations, seed);
    cfg.initial_point = initial.map(Point);
    cfg.temperature_initial = temperature;
    cfg.cooling_ratio = cooling;
    baseline(objective, lo, hi, cfg, baselines::simulated_annealing)
}

/// Runs every listed method on every listed builtin objective for seeds
/// `0..repeats`. Defaults: all objectives, all methods.
#[pyfunction]
#[pyo3(signature = (objectives=None, methods=None, repeats=1, tolerance=None))]
fn run_bench(
    py: Python<'_>,
    objectives: Option<Vec<String>>,
    methods: Option<Vec<String>>,
    repeats: u64,
    tolerance: Option<f64>,
) -> PyResult<Vec<PyBenchRow>> {
    let reg = registry();
    let methods = match methods {
        Some(m) => m
            .iter()
            .map(|s| s.parse::<Algorithm>())
            .collect::<slm_core::Result<Vec<_>>>()
            .map_err(|e| PyValueError::new_err(e.to_string()))?,
        None => Algorithm::ALL.to_vec(),
    };
    let algorithms = methods
        .into_iter()
        .map(|a| match AlgorithmSpec::default_for(a) {
            AlgorithmSpec::Slm(s) => AlgorithmSpec::Slm(SlmSettings { tolerance, ..s }),
            other => other,
        })
        .collect();
    let spec = BenchSpec {
        objectives: objectives.unwrap_or_else(|| reg.names()),
        algorithms,
        repeats,
        output_format: OutputFormat::Markdown,
    };
    let rows = py.detach(|| bench::run_bench(&spec, &reg)).map_err(to_py)?;
    Ok(rows.into_iter().map(PyBenchRow).collect())
}

/// Renders bench rows as `markdown`, `csv` or `json-lines`.
#[pyfunction]
#[pyo3(signature = (rows, format="markdown"))]
fn emit_table(rows: Vec<PyBenchRow>, format: &str) -> PyResult<String> {
    let format: OutputFormat = format
        .parse()
        .map_err(|e: slm_core::SlmError| PyValueError::new_err(e.to_string()))?;
    let rows: Vec<bench::BenchRow> = rows.into_iter().map(|r| r.0).collect();
    Ok(bench::emit_table(&rows, format))
}

/// Parses CSV produced by `emit_table(rows, "csv")`.
#[pyfunction]
fn rows_from_csv(text: &str) -> PyResult<Vec<PyBenchRow>> {
    Ok(bench::rows_from_csv(text)
        .map_err(to_py)?
        .into_iter()
        .map(PyBenchRow)
        .collect())
}

/// Componentwise distance to the nearest of `optima`.
#[pyfunction]
fn deviation(found: Vec<f64>, optima: Vec<Vec<f64>>) -> Vec<f64> {
    let optima: Vec<Point> = optima.into_iter().map(Point).collect();
    bench::deviation(&found, &optima)
}

#[pymodule]
#[pyo3(name = "slm")]
fn slm_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SlmError", m.py().get_type::<SlmError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySearchBox>()?;
    m.add_class::<PyGeneration>()?;
    m.add_class::<PyRunResult>()?;
    m.add_class::<PyBaselineResult>()?;
    m.add_class::<PyBenchRow>()?;
    m.add_function(wrap_pyfunction!(list_functions, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(label_of, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    m.add_function(wrap_pyfunction!(run_slm, m)?)?;
    m.add_function(wrap_pyfunction!(random_search, m)?)?;
    m.add_function(wrap_pyfunction!(random_search_walk, m)?)?;
    m.add_function(wrap_pyfunction!(simulated_annealing, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    m.add_function(wrap_pyfunction!(emit_table, m)?)?;
    m.add_function(wrap_pyfunction!(rows_from_csv, m)?)?;
    m.add_function(wrap_pyfunction!(deviation, m)?)?;
    Ok(())
}
