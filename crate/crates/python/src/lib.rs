//! Python bindings: finite groups, extensions, sections, cohomology and the
//! scheme pipeline. Reports come back as plain dicts.

use std::path::PathBuf;

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use hfp_core::catalog;
use hfp_core::cohomology::{group_cohomology_with_budget, GModule};
use hfp_core::group::{Extension as CoreExtension, FiniteGroup, GroupHom};
use hfp_core::pipeline::run_pipeline;
use hfp_core::sections::{enumerate_sections, verify_profinsection};
use hfp_core::workspace::Workspace as CoreWorkspace;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Group", module = "hfp", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyGroup {
    inner: FiniteGroup,
}

#[pymethods]
impl PyGroup {
    /// Multiplication table with the identity at index 0.
    #[new]
    fn new(table: Vec<Vec<usize>>) -> PyResult<Self> {
        FiniteGroup::from_table(table).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn cyclic(n: usize) -> PyResult<Self> {
        if n == 0 {
            return Err(PyValueError::new_err("order must be positive"));
        }
        Ok(Self { inner: FiniteGroup::cyclic(n) })
    }

    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        catalog::builtin(name).map(|inner| Self { inner }).ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }

    fn order(&self) -> usize {
        self.inner.order()
    }

    fn mul(&self, a: usize, b: usize) -> PyResult<usize> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.inner.mul(a, b))
    }

    fn inv(&self, a: usize) -> PyResult<usize> {
        self.check(a)?;
        Ok(self.inner.inv(a))
    }

    fn is_abelian(&self) -> bool {
        self.inner.is_abelian()
    }

    fn table(&self) -> Vec<Vec<usize>> {
        self.inner.table().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.order()
    }

    fn __repr__(&self) -> String {
        format!("Group(order={})", self.inner.order())
    }
}

impl PyGroup {
    fn check(&self, a: usize) -> PyResult<()> {
        if a < self.inner.order() {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("element {a} out of range")))
        }
    }
}

#[pyclass(name = "Extension", module = "hfp", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyExtension {
    inner: CoreExtension,
}

#[pymethods]
impl PyExtension {
    /// Extension `1 → ker p → total → quotient → 1` of a surjection `p`,
    /// given by the image of each element of `total`.
    #[new]
    fn new(total: &PyGroup, quotient: &PyGroup, projection: Vec<usize>) -> PyResult<Self> {
        let p = GroupHom::new(total.inner.clone(), quotient.inner.clone(), projection).map_err(err)?;
        CoreExtension::from_projection(p).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        catalog::corpus_extension(name).map(|inner| Self { inner }).ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }

    #[getter]
    fn kernel(&self) -> PyGroup {
        PyGroup { inner: self.inner.kernel().clone() }
    }

    #[getter]
    fn total(&self) -> PyGroup {
        PyGroup { inner: self.inner.total().clone() }
    }

    #[getter]
    fn quotient(&self) -> PyGroup {
        PyGroup { inner: self.inner.quotient().clone() }
    }

    /// Section counts and the class representatives as image lists.
    fn sections<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let s = enumerate_sections(&self.inner);
        let reps: Vec<Vec<usize>> = s.representatives().iter().map(|h| h.images().to_vec()).collect();
        let report = serde_json::json!({
            "total_sections": s.total_section_count(),
            "class_count": s.class_count(),
            "class_sizes": s.class_sizes(),
            "representatives": reps,
        });
        to_py(py, &report)
    }

    #[pyo3(signature = (trunc_dim = 3))]
    fn verify_bijection<'py>(&self, py: Python<'py>, trunc_dim: usize) -> PyResult<Bound<'py, PyAny>> {
        let r = py.detach(|| verify_profinsection(&self.inner, trunc_dim)).map_err(err)?;
        to_py(py, &r)
    }

    /// Invariant factors of `H^s` of the quotient with coefficients in the
    /// abelian kernel.
    #[pyo3(signature = (degree, budget = 20000))]
    fn kernel_cohomology(&self, degree: usize, budget: usize) -> PyResult<Vec<usize>> {
        let m = GModule::from_extension(&self.inner).map_err(err)?;
        group_cohomology_with_budget(&m, degree, budget).map(|h| h.invariant_factors).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Extension(kernel={}, total={}, quotient={})",
            self.inner.kernel().order(),
            self.inner.total().order(),
            self.inner.quotient().order()
        )
    }
}

#[pyclass(name = "Workspace", module = "hfp", frozen)]
pub struct PyWorkspace {
    inner: CoreWorkspace,
}

#[pymethods]
impl PyWorkspace {
    /// Loads TOML files or directories of them.
    #[new]
    fn new(paths: Vec<PathBuf>) -> PyResult<Self> {
        CoreWorkspace::load(&paths).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn from_str(text: &str) -> PyResult<Self> {
        CoreWorkspace::from_str("<string>", text).map(|inner| Self { inner }).map_err(err)
    }

    fn schemes(&self) -> Vec<String> {
        self.inner.schemes.keys().cloned().collect()
    }

    fn extensions(&self) -> Vec<String> {
        self.inner.extensions.keys().cloned().collect()
    }

    fn modules(&self) -> Vec<String> {
        self.inner.modules.keys().cloned().collect()
    }

    fn group(&self, id: &str) -> PyResult<PyGroup> {
        self.inner.groups.get(id).map(|g| PyGroup { inner: g.clone() }).ok_or_else(|| PyKeyError::new_err(id.to_string()))
    }

    fn extension(&self, id: &str) -> PyResult<PyExtension> {
        self.inner
            .extensions
            .get(id)
            .map(|e| PyExtension { inner: e.clone() })
            .ok_or_else(|| PyKeyError::new_err(id.to_string()))
    }

    #[pyo3(signature = (module_id, degree, budget = 20000))]
    fn cohomology(&self, module_id: &str, degree: usize, budget: usize) -> PyResult<Vec<usize>> {
        let m = self.inner.modules.get(module_id).ok_or_else(|| PyKeyError::new_err(module_id.to_string()))?;
        group_cohomology_with_budget(m, degree, budget).map(|h| h.invariant_factors).map_err(err)
    }

    #[pyo3(signature = (scheme, depth = None, trunc_dim = 3))]
    fn pipeline<'py>(&self, py: Python<'py>, scheme: &str, depth: Option<usize>, trunc_dim: usize) -> PyResult<Bound<'py, PyAny>> {
        let x = self.inner.schemes.get(scheme).ok_or_else(|| PyKeyError::new_err(scheme.to_string()))?;
        let r = py.detach(|| run_pipeline(scheme, x, depth, trunc_dim)).map_err(err)?;
        to_py(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("Workspace(entities={})", self.inner.entity_count())
    }
}

/// Names of the built-in extensions.
#[pyfunction]
fn builtin_extensions() -> Vec<String> {
    catalog::extension_corpus().into_iter().map(|(n, _)| n).collect()
}

#[pymodule]
fn hfp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", hfp_core::pipeline::TOOL_VERSION)?;
    m.add_class::<PyGroup>()?;
    m.add_class::<PyExtension>()?;
    m.add_class::<PyWorkspace>()?;
    m.add_function(wrap_pyfunction!(builtin_extensions, m)?)?;
    Ok(())
}
