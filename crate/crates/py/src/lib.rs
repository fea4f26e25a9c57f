use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ::quadlat as core;
use core::enumerate::{self, GenusOptions, GenusReport};
use core::{isometry, mass, padic, spinor, watson, GramLattice};

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Positive definite integral lattice given by its Gram matrix.
#[pyclass(name = "Lattice", module = "quadlat", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyLattice {
    inner: GramLattice,
}

impl From<GramLattice> for PyLattice {
    fn from(inner: GramLattice) -> Self {
        PyLattice { inner }
    }
}

#[pymethods]
impl PyLattice {
    #[new]
    fn new(gram: Vec<Vec<BigInt>>) -> PyResult<Self> {
        GramLattice::new(gram).map(Into::into).map_err(err)
    }

    /// Parses `fixture:NAME`, `R:[coeffs]` or a Gram matrix.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        core::input::parse_lattice(text).map(Into::into).map_err(err)
    }

    #[staticmethod]
    fn from_form(rank: usize, coeffs: Vec<BigInt>) -> PyResult<Self> {
        let f = core::ClassicalForm::new(rank, &coeffs).map_err(err)?;
        core::form_to_lattice(&f).map(Into::into).map_err(err)
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn gram(&self) -> Vec<Vec<BigInt>> {
        self.inner.gram().clone()
    }

    #[getter]
    fn discriminant(&self) -> BigInt {
        self.inner.discriminant()
    }

    fn genus_symbol(&self) -> PyResult<String> {
        padic::genus_symbol(&self.inner).map(|s| s.to_string()).map_err(err)
    }

    /// Jordan scale exponents at p, sorted.
    fn profile(&self, p: u64) -> PyResult<Vec<u32>> {
        padic::p_profile(&self.inner, p).map(|p| p.exps).map_err(err)
    }

    fn jordan(&self, p: u64) -> PyResult<String> {
        padic::local_symbol(&self.inner, p).map(|s| s.to_string()).map_err(err)
    }

    /// Square-class representatives of the spinor norm group at p.
    fn theta(&self, p: u64) -> PyResult<Vec<u64>> {
        spinor::theta_group(&self.inner, p).map(|t| t.representatives()).map_err(err)
    }

    fn g_plus(&self) -> PyResult<u64> {
        spinor::g_plus(&self.inner).map_err(err)
    }

    fn g(&self) -> PyResult<u64> {
        spinor::g(&self.inner).map_err(err)
    }

    fn mass(&self) -> PyResult<String> {
        mass::total_mass(&self.inner).map(|m| m.to_string()).map_err(err)
    }

    fn local_mass(&self, p: u64) -> PyResult<String> {
        mass::local_mass(&self.inner, p).map(|m| m.to_string()).map_err(err)
    }

    fn canonical(&self) -> PyResult<Self> {
        isometry::canonical(&self.inner).map(|c| c.gram.into()).map_err(err)
    }

    fn aut_order(&self) -> PyResult<u64> {
        isometry::aut_order(&self.inner).map_err(err)
    }

    fn is_isometric(&self, other: &PyLattice) -> PyResult<bool> {
        isometry::isometric(&self.inner, &other.inner).map(|t| t.is_some()).map_err(err)
    }

    fn mu(&self, p: u64) -> PyResult<Self> {
        watson::mu_p(&self.inner, p).map(Into::into).map_err(err)
    }

    fn mu_hat(&self) -> PyResult<Self> {
        watson::mu_hat(&self.inner).map(|r| r.lattice.into()).map_err(err)
    }

    fn genus(&self) -> PyResult<PyGenus> {
        enumerate::enumerate_genus(&self.inner, &GenusOptions::default()).map(Into::into).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Lattice({})", self.inner)
    }
}

/// All classes of a genus with their spinor genus labels.
#[pyclass(name = "Genus", module = "quadlat", frozen)]
struct PyGenus {
    inner: GenusReport,
}

impl From<GenusReport> for PyGenus {
    fn from(inner: GenusReport) -> Self {
        PyGenus { inner }
    }
}

#[pymethods]
impl PyGenus {
    #[getter]
    fn symbol(&self) -> String {
        self.inner.symbol.to_string()
    }

    #[getter]
    fn classes(&self) -> Vec<PyLattice> {
        self.inner.classes.iter().map(|c| c.lattice.clone().into()).collect()
    }

    #[getter]
    fn aut_orders(&self) -> Vec<u64> {
        self.inner.classes.iter().map(|c| c.aut_order).collect()
    }

    /// Class indices of each spinor genus.
    #[getter]
    fn spinor_genera(&self) -> Vec<Vec<usize>> {
        self.inner.spinor_genera.clone()
    }

    #[getter]
    fn g_plus(&self) -> u64 {
        self.inner.g_plus
    }

    #[getter]
    fn g(&self) -> u64 {
        self.inner.g
    }

    #[getter]
    fn mass(&self) -> String {
        self.inner.mass.to_string()
    }

    #[getter]
    fn class_number(&self) -> usize {
        self.inner.class_number()
    }

    fn spinor_class_number(&self, i: usize) -> PyResult<usize> {
        if i >= self.inner.class_number() {
            return Err(PyValueError::new_err(format!("class index {i} out of range")));
        }
        Ok(self.inner.spinor_class_number(i))
    }

    fn one_class_spinor_genera(&self) -> Vec<usize> {
        self.inner.one_class_spinor_genera()
    }

    fn __len__(&self) -> usize {
        self.inner.class_number()
    }

    fn __repr__(&self) -> String {
        format!("Genus({}, h={}, g={})", self.inner.symbol, self.inner.class_number(), self.inner.g)
    }
}

/// Genera of all primitive forms of discriminant `disc`.
#[pyfunction]
#[pyo3(signature = (disc, rank=4))]
fn classify(py: Python<'_>, disc: u64, rank: usize) -> PyResult<Vec<PyGenus>> {
    let r = py.detach(|| enumerate::classify(disc, rank, &GenusOptions::default())).map_err(err)?;
    Ok(r.genera.into_iter().map(Into::into).collect())
}

/// Classes alone in their spinor genus but not in their genus.
#[pyfunction]
#[pyo3(signature = (disc, rank=4))]
fn find_one_class_spinor(py: Python<'_>, disc: u64, rank: usize) -> PyResult<Vec<PyLattice>> {
    let r = py.detach(|| enumerate::classify(disc, rank, &GenusOptions::default())).map_err(err)?;
    Ok(r.find_one_class_spinor().into_iter().map(|f| f.lattice.into()).collect())
}

#[pyfunction]
fn fixture(name: &str) -> PyResult<PyLattice> {
    core::data::fixture(name).map(Into::into).map_err(err)
}

#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    core::data::fixture_names()
}

/// (discriminant, coefficients, regular) for each ternary table entry.
#[pyfunction]
fn ternary_table() -> Vec<(u64, Vec<i64>, bool)> {
    core::data::ternary_table().into_iter().map(|e| (e.discriminant, e.coefficients.to_vec(), e.regular)).collect()
}

/// Runs the reference checks; `scope` is "quick" or "full".
#[pyfunction]
#[pyo3(signature = (scope="quick"))]
fn verify<'py>(py: Python<'py>, scope: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let scope = match scope {
        "quick" => core::verify::Scope::Quick,
        "full" => core::verify::Scope::Full,
        s => return Err(PyValueError::new_err(format!("unknown scope {s:?}"))),
    };
    let verdicts = py.detach(|| core::verify::Verifier::new(GenusOptions::default()).run(scope));
    verdicts
        .into_iter()
        .map(|v| {
            let d = PyDict::new(py);
            d.set_item("id", v.id)?;
            d.set_item("pass", v.pass)?;
            d.set_item("detail", v.detail)?;
            d.set_item("seconds", v.seconds)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn quadlat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PyGenus>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(find_one_class_spinor, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add_function(wrap_pyfunction!(ternary_table, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
