//! Python bindings for rckit.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use rckit::field::parse_field;
use rckit::opspace::{build, SpaceFamily, SpaceJson};
use rckit::rcmaps::{
    is_linear, is_local, is_range_compatible, is_standard, local_space, rc_solution_space,
    AdditiveMap, MapJson,
};
use rckit::verify::{classify, run_suite as run, SuiteId, SuiteSpec};
use rckit::Caps;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn loads(py: Python<'_>, s: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

fn caps() -> Caps {
    Caps::from_env()
}

#[pyclass(name = "Field", frozen)]
struct PyField(rckit::Field);

#[pymethods]
impl PyField {
    /// `Field("2^2")` or `Field("3")`.
    #[new]
    fn new(designator: &str) -> PyResult<Self> {
        parse_field(designator, caps().field_order).map(PyField).map_err(err)
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    #[getter]
    fn characteristic(&self) -> u8 {
        self.0.characteristic()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    fn add(&self, a: u64, b: u64) -> PyResult<u8> {
        Ok(self.0.add(self.0.check_elem(a).map_err(err)?, self.0.check_elem(b).map_err(err)?))
    }

    fn mul(&self, a: u64, b: u64) -> PyResult<u8> {
        Ok(self.0.mul(self.0.check_elem(a).map_err(err)?, self.0.check_elem(b).map_err(err)?))
    }

    fn inv(&self, a: u64) -> PyResult<u8> {
        self.0
            .inv(self.0.check_elem(a).map_err(err)?)
            .ok_or_else(|| err("division by zero"))
    }

    fn __repr__(&self) -> String {
        format!("Field('{}')", self.0.designator())
    }
}

#[pyclass(name = "Space", frozen)]
struct PySpace(rckit::OperatorSpace);

#[pymethods]
impl PySpace {
    /// Build from a designator such as `"full-sym:3"` or `"sym-block:3"`.
    #[staticmethod]
    fn build(designator: &str, field: &PyField) -> PyResult<Self> {
        let fam: SpaceFamily = designator.parse().map_err(err)?;
        build(&fam, &field.0).map(PySpace).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j: SpaceJson = serde_json::from_str(text).map_err(err)?;
        rckit::OperatorSpace::from_json(&j).map(PySpace).map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0.to_json()).unwrap()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn codim(&self) -> usize {
        self.0.codim()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.rows(), self.0.cols())
    }

    fn rc_dim(&self) -> PyResult<usize> {
        Ok(rc_solution_space(&self.0, &caps()).map_err(err)?.dim())
    }

    fn local_dim(&self) -> usize {
        local_space(&self.0).dim()
    }

    /// RC, local, standard and exotic dimensions as a dict.
    fn classify(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let c = classify(&self.0, &caps()).map_err(err)?;
        loads(py, &serde_json::to_string(&c).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("Space({}, dim={})", self.0.ambient().describe(), self.0.dim())
    }
}

#[pyclass(name = "Map", frozen)]
struct PyMap(AdditiveMap);

#[pymethods]
impl PyMap {
    /// Parse map JSON: `{"field", "space", "values"}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j: MapJson = serde_json::from_str(text).map_err(err)?;
        AdditiveMap::from_json(&j).map(PyMap).map_err(err)
    }

    /// Map from values on the basis of `space`.
    #[staticmethod]
    fn on(space: &PySpace, values: Vec<Vec<u64>>) -> PyResult<Self> {
        let j = MapJson {
            field: None,
            space: serde_json::to_value(space.0.to_json()).map_err(err)?,
            values,
        };
        AdditiveMap::from_json(&j).map(PyMap).map_err(err)
    }

    fn is_range_compatible(&self) -> PyResult<bool> {
        is_range_compatible(&self.0, &caps()).map_err(err)
    }

    fn is_linear(&self) -> bool {
        is_linear(&self.0)
    }

    /// The vector `x` with `F(s) = s x`, or None.
    fn local_witness(&self) -> Option<Vec<u64>> {
        is_local(&self.0).map(|x| x.into_iter().map(u64::from).collect())
    }

    fn is_standard(&self) -> PyResult<bool> {
        is_standard(&self.0).map_err(err)
    }
}

/// Run a verification suite and return its report as a dict.
#[pyfunction]
#[pyo3(signature = (suite, field="2", n=3, m=0, codim=0, p=2, r=1, samples=None, seed=None, jobs=1))]
#[allow(clippy::too_many_arguments)]
fn run_suite(
    py: Python<'_>,
    suite: &str,
    field: &str,
    n: usize,
    m: usize,
    codim: usize,
    p: usize,
    r: usize,
    samples: Option<usize>,
    seed: Option<u64>,
    jobs: usize,
) -> PyResult<Py<PyAny>> {
    let id: SuiteId = suite.parse().map_err(err)?;
    let mut spec = SuiteSpec::new(id, field).n(n).m(m).codim(codim).p(p).r(r).caps(caps());
    if let Some(s) = samples {
        spec = spec.samples(s);
    }
    if let Some(s) = seed {
        spec = spec.seed(s);
    }
    let report = py.detach(|| run(&spec, jobs)).map_err(err)?;
    loads(py, &report.to_json())
}

#[pymodule]
fn rckit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PySpace>()?;
    m.add_class::<PyMap>()?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
