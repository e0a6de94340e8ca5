//! Python bindings: `import affineflow`.
//!
//! Bodies, linear maps and controllers are wrapped as classes; runs return
//! plain dictionaries with the trajectory stored column-wise so it drops
//! straight into numpy or pandas.

use affine_flow::diagnostics::{self, monotone_monitors, MonitorReport, PointwiseMonitor, Verdict};
use affine_flow::record::CSV_COLUMNS;
use affine_flow::suite::{Suite, Target};
use affine_flow::{flow, FlowStatus, FunctionalRecord, RunOptions};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

create_exception!(affineflow, AffineFlowError, PyValueError);

fn err(e: affine_flow::Error) -> PyErr {
    AffineFlowError::new_err(e.to_string())
}

#[pyclass(name = "ConvexBody", module = "affineflow", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyConvexBody {
    inner: affine_flow::ConvexBody,
}

fn wrap(inner: affine_flow::ConvexBody) -> PyConvexBody {
    PyConvexBody { inner }
}

#[pymethods]
impl PyConvexBody {
    /// Body from support-function samples on the uniform angle grid.
    #[new]
    fn new(samples: Vec<f64>) -> PyResult<Self> {
        affine_flow::ConvexBody::from_samples(samples).map(wrap).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (radius, n = 256))]
    fn disk(radius: f64, n: usize) -> PyResult<Self> {
        affine_flow::make_disk(radius, n).map(wrap).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (a, b, rotation = 0.0, n = 256))]
    fn ellipse(a: f64, b: f64, rotation: f64, n: usize) -> PyResult<Self> {
        affine_flow::make_ellipse(a, b, rotation, n).map(wrap).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (seed, max_harmonic = 8, decay = 2.0, amplitude = 0.2, halving = true, n = 256))]
    fn random(
        seed: u64,
        max_harmonic: usize,
        decay: f64,
        amplitude: f64,
        halving: bool,
        n: usize,
    ) -> PyResult<Self> {
        let spec = affine_flow::RandomBodySpec {
            seed,
            max_harmonic,
            decay,
            amplitude,
            halving,
        };
        affine_flow::make_random_body(&spec, n).map(wrap).map_err(err)
    }

    /// Read a support function saved as `.json` or in the binary format.
    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let s = affine_flow::SupportFunction::load(&path).map_err(err)?;
        affine_flow::ConvexBody::new(s).map(wrap).map_err(err)
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        self.inner.support().save(&path).map_err(err)
    }

    #[getter]
    fn grid_size(&self) -> usize {
        self.inner.grid_size()
    }

    #[getter]
    fn samples(&self) -> Vec<f64> {
        self.inner.samples().to_vec()
    }

    #[getter]
    fn radius(&self) -> Vec<f64> {
        self.inner.radius().to_vec()
    }

    #[getter]
    fn affine_support(&self) -> Vec<f64> {
        self.inner.affine_support().to_vec()
    }

    #[getter]
    fn area(&self) -> f64 {
        self.inner.area()
    }

    #[getter]
    fn polar_area(&self) -> f64 {
        self.inner.polar_area()
    }

    #[getter]
    fn omega1(&self) -> f64 {
        self.inner.omega1()
    }

    #[getter]
    fn omega2(&self) -> f64 {
        self.inner.omega2()
    }

    #[getter]
    fn santalo(&self) -> f64 {
        self.inner.santalo()
    }

    #[getter]
    fn aff_iso(&self) -> f64 {
        self.inner.normalized_affine_iso()
    }

    fn p_affine_perimeter(&self, p: f64) -> PyResult<f64> {
        self.inner.p_affine_perimeter(p).map_err(err)
    }

    fn scaled(&self, factor: f64) -> PyResult<Self> {
        self.inner.scaled(factor).map(wrap).map_err(err)
    }

    fn translated(&self, dx: f64, dy: f64) -> PyResult<Self> {
        self.inner.translated([dx, dy]).map(wrap).map_err(err)
    }

    fn transformed(&self, phi: &PyLinearMap) -> PyResult<Self> {
        self.inner.transformed(&phi.inner).map(wrap).map_err(err)
    }

    fn steiner_point(&self) -> (f64, f64) {
        let p = self.inner.steiner_point();
        (p[0], p[1])
    }

    fn entropy(&self) -> f64 {
        diagnostics::entropy_functional(&self.inner)
    }

    fn ellipticity(&self) -> f64 {
        diagnostics::ellipticity(&self.inner)
    }

    #[pyo3(signature = (zeta = None))]
    fn monge_ampere_residual(&self, zeta: Option<f64>) -> f64 {
        diagnostics::monge_ampere_residual(&self.inner, zeta)
    }

    /// SL(2) map sending the body's moment ellipse to a disk.
    fn sl2_frame(&self) -> PyResult<PyLinearMap> {
        diagnostics::sl2_frame(&self.inner)
            .map(|f| PyLinearMap { inner: f.phi })
            .map_err(err)
    }

    /// `(area, polar_area)` of the inscribed polygon with `m` vertices.
    fn polygon_oracle(&self, m: usize) -> PyResult<(f64, f64)> {
        let p = affine_flow::polygon_oracle(&self.inner, m).map_err(err)?;
        Ok((p.area, p.polar_area))
    }

    /// The record written to trajectory CSVs, evaluated at `t = 0`.
    fn functionals<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        record_dict(py, &FunctionalRecord::from_body(0.0, &self.inner, 0.0, 0.0))
    }

    fn __repr__(&self) -> String {
        format!(
            "ConvexBody(n={}, area={:.6}, aff_iso={:.6})",
            self.inner.grid_size(),
            self.inner.area(),
            self.inner.normalized_affine_iso()
        )
    }
}

#[pyclass(name = "LinearMap", module = "affineflow", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLinearMap {
    inner: affine_flow::LinearMap,
}

#[pymethods]
impl PyLinearMap {
    #[new]
    fn new(entries: [[f64; 2]; 2]) -> PyResult<Self> {
        affine_flow::LinearMap::new(entries)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    /// Rescale `entries` to determinant one.
    #[staticmethod]
    fn special(entries: [[f64; 2]; 2]) -> PyResult<Self> {
        affine_flow::LinearMap::special(entries)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (seed, max_log_stretch = 0.5))]
    fn random_special(seed: u64, max_log_stretch: f64) -> Self {
        Self {
            inner: affine_flow::LinearMap::random_special(seed, max_log_stretch),
        }
    }

    #[staticmethod]
    fn rotation(angle: f64) -> Self {
        Self {
            inner: affine_flow::LinearMap::rotation(angle),
        }
    }

    #[getter]
    fn entries(&self) -> [[f64; 2]; 2] {
        self.inner.entries()
    }

    #[getter]
    fn det(&self) -> f64 {
        self.inner.det()
    }

    fn compose(&self, other: &PyLinearMap) -> Self {
        Self {
            inner: self.inner.compose(&other.inner),
        }
    }

    fn inverse(&self) -> Self {
        Self {
            inner: self.inner.inverse(),
        }
    }

    fn __repr__(&self) -> String {
        format!("LinearMap({:?})", self.inner.entries())
    }
}

#[pyclass(name = "StepController", module = "affineflow", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyStepController {
    inner: affine_flow::StepController,
}

#[pymethods]
impl PyStepController {
    #[new]
    #[pyo3(signature = (safety = 0.5, dt_max = 1e-2, area_floor = 1e-4))]
    fn new(safety: f64, dt_max: f64, area_floor: f64) -> PyResult<Self> {
        let inner = affine_flow::StepController {
            safety,
            dt_max,
            area_floor,
        };
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn safety(&self) -> f64 {
        self.inner.safety
    }

    #[getter]
    fn dt_max(&self) -> f64 {
        self.inner.dt_max
    }

    #[getter]
    fn area_floor(&self) -> f64 {
        self.inner.area_floor
    }
}

fn record_dict<'py>(py: Python<'py>, r: &FunctionalRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (name, v) in CSV_COLUMNS.iter().zip(r.values()) {
        d.set_item(*name, v)?;
    }
    Ok(d)
}

fn verdict_dict<'py>(py: Python<'py>, v: &Verdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    match *v {
        Verdict::MonotoneIncreasing => d.set_item("kind", "monotone_increasing")?,
        Verdict::MonotoneDecreasing => d.set_item("kind", "monotone_decreasing")?,
        Verdict::Bounded { sup } => {
            d.set_item("kind", "bounded")?;
            d.set_item("sup", sup)?;
        }
        Verdict::Satisfied => d.set_item("kind", "satisfied")?,
        Verdict::Violated { t, magnitude } => {
            d.set_item("kind", "violated")?;
            d.set_item("t", t)?;
            d.set_item("magnitude", magnitude)?;
        }
    }
    Ok(d)
}

fn monitor_dict<'py>(py: Python<'py>, m: &MonitorReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("name", &m.name)?;
    d.set_item("tolerance", m.tolerance)?;
    d.set_item("verdict", verdict_dict(py, &m.verdict)?)?;
    let violations: Vec<(f64, f64)> = m.violations.iter().map(|v| (v.t, v.magnitude)).collect();
    d.set_item("violations", violations)?;
    d.set_item("samples_ref", &m.samples_ref)?;
    Ok(d)
}

fn parse_monitor(name: &str) -> PyResult<PointwiseMonitor> {
    [
        PointwiseMonitor::Harnack,
        PointwiseMonitor::AncientHarnack,
        PointwiseMonitor::SigmaNonIncreasing,
    ]
    .into_iter()
    .find(|m| m.name() == name)
    .ok_or_else(|| AffineFlowError::new_err(format!("unknown monitor {name:?}")))
}

/// Flow `body` to extinction.
///
/// Returns a dict with `status`, `t_est`, `final_body`, `shift` (set when
/// `recenter` translated the body onto its extinction point), `trajectory`
/// (column name -> list) and `monitors`.
#[pyfunction]
#[pyo3(signature = (body, controller = None, record_every = 100, monitors = Vec::new(), recenter = false, monitor_tolerance = 1e-7))]
fn run<'py>(
    py: Python<'py>,
    body: &PyConvexBody,
    controller: Option<&PyStepController>,
    record_every: usize,
    monitors: Vec<String>,
    recenter: bool,
    monitor_tolerance: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let ctrl = controller.map(|c| c.inner).unwrap_or_default();
    let opts = RunOptions {
        record_every,
        monitors: monitors.iter().map(|m| parse_monitor(m)).collect::<PyResult<_>>()?,
        ..RunOptions::default()
    };
    let start = body.inner.clone();
    let (out, shift) = py
        .detach(move || -> affine_flow::Result<_> {
            let (start, shift) = if recenter {
                let (b, p) = flow::center_on_extinction_point(&start, &ctrl)?;
                (b, Some((-p[0], -p[1])))
            } else {
                (start, None)
            };
            Ok((affine_flow::run(start, &ctrl, &opts)?, shift))
        })
        .map_err(err)?;

    let d = PyDict::new(py);
    let status = match out.final_state.status {
        FlowStatus::Extinct { .. } => "extinct".to_string(),
        FlowStatus::Failed(reason) => format!("failed: {reason:?}"),
        FlowStatus::Running => "running".to_string(),
    };
    d.set_item("status", status)?;
    d.set_item("t_est", out.extinction_time())?;
    d.set_item("steps", out.final_state.steps)?;
    d.set_item("shift", shift)?;

    let columns = PyDict::new(py);
    for (k, name) in CSV_COLUMNS.iter().enumerate() {
        let col: Vec<f64> = out.trajectory.iter().map(|r| r.values()[k]).collect();
        columns.set_item(*name, col)?;
    }
    d.set_item("trajectory", columns)?;

    let reports = PyList::empty(py);
    if out.trajectory.len() >= 2 {
        for m in monotone_monitors(&out.trajectory, monitor_tolerance).map_err(err)? {
            reports.append(monitor_dict(py, &m)?)?;
        }
    }
    for m in &out.pointwise {
        reports.append(monitor_dict(py, m)?)?;
    }
    d.set_item("monitors", reports)?;
    d.set_item("final_body", wrap(out.final_state.body))?;
    Ok(d)
}

/// Run an acceptance suite; one dict per criterion.
#[pyfunction]
fn verify<'py>(py: Python<'py>, suite: &str) -> PyResult<Bound<'py, PyList>> {
    let suite: Suite = suite.parse().map_err(err)?;
    let reports = py.detach(move || suite.run());
    let rows = PyList::empty(py);
    for r in &reports {
        let d = PyDict::new(py);
        d.set_item("id", r.id)?;
        d.set_item("title", r.title)?;
        d.set_item("passed", r.passed())?;
        d.set_item("error", r.error.clone())?;
        let ms = PyList::empty(py);
        for m in &r.measurements {
            let md = PyDict::new(py);
            md.set_item("label", &m.label)?;
            md.set_item("measured", m.measured)?;
            md.set_item("passed", m.passed())?;
            match m.target {
                Target::Within {
                    expected,
                    tolerance,
                } => {
                    md.set_item("expected", expected)?;
                    md.set_item("tolerance", tolerance)?;
                }
                Target::AtMost { limit } => md.set_item("at_most", limit)?,
                Target::AtLeast { limit } => md.set_item("at_least", limit)?,
            }
            ms.append(md)?;
        }
        d.set_item("measurements", ms)?;
        rows.append(d)?;
    }
    Ok(rows)
}

#[pymodule]
fn affineflow(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConvexBody>()?;
    m.add_class::<PyLinearMap>()?;
    m.add_class::<PyStepController>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("AffineFlowError", m.py().get_type::<AffineFlowError>())?;
    Ok(())
}
