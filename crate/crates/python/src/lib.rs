//! Python bindings: `gdsum.Context`, `gdsum.CycElem`, `gdsum.naive_sum`
//! and `gdsum.ts_decompose`.

use gdsum_core::characters::{CharacterSpec, DirichletCharacter};
use gdsum_core::dedekind::{self, Context, PrecomputeOptions, DEFAULT_MAX_LEVEL};
use gdsum_core::exactnum::CycElem;
use gdsum_core::modgroup::{self, Mat2, Quotient};
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyComplex;

fn py_err(e: gdsum_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn character(spec: &str) -> PyResult<DirichletCharacter> {
    CharacterSpec::parse(spec)
        .and_then(|s| s.resolve())
        .map_err(py_err)
}

/// Accepts "a,b;c,d" or a 4-tuple of integers.
fn matrix(obj: &Bound<'_, PyAny>) -> PyResult<Mat2> {
    if let Ok(s) = obj.extract::<String>() {
        return s.parse().map_err(py_err);
    }
    let (a, b, c, d) = obj.extract::<(BigInt, BigInt, BigInt, BigInt)>()?;
    Mat2::new(a, b, c, d).map_err(py_err)
}

fn quotient(name: &str) -> PyResult<Quotient> {
    match name {
        "nearest" => Ok(Quotient::Nearest),
        "floor" => Ok(Quotient::Floor),
        _ => Err(PyValueError::new_err(format!("unknown quotient {name:?}"))),
    }
}

/// Element of a cyclotomic field `Q(ζ_L)` with exact rational coordinates.
#[pyclass(name = "CycElem", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyCycElem {
    inner: CycElem,
}

#[pymethods]
impl PyCycElem {
    /// Cyclotomic order `L`.
    #[getter]
    fn order(&self) -> u32 {
        self.inner.order()
    }

    /// Coordinates in the power basis as `(numerator, denominator)` pairs.
    #[getter]
    fn coeffs(&self) -> Vec<(BigInt, BigInt)> {
        self.inner
            .coeffs()
            .iter()
            .map(|r| (r.numer().clone(), r.denom().clone()))
            .collect()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __complex__<'py>(&self, py: Python<'py>) -> Bound<'py, PyComplex> {
        let (re, im) = self.inner.to_complex_approx();
        PyComplex::from_doubles(py, re, im)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(PyCycElem {
            inner: self.inner.try_add(&other.inner).map_err(py_err)?,
        })
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        Ok(PyCycElem {
            inner: self.inner.try_sub(&other.inner).map_err(py_err)?,
        })
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        Ok(PyCycElem {
            inner: self.inner.try_mul(&other.inner).map_err(py_err)?,
        })
    }

    fn __neg__(&self) -> Self {
        PyCycElem {
            inner: -&self.inner,
        }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("CycElem(L={}, {})", self.inner.order(), self.inner)
    }
}

/// Precomputed tables for one character pair.
#[pyclass(name = "Context", frozen)]
struct PyContext {
    inner: Context,
}

#[pymethods]
impl PyContext {
    #[new]
    #[pyo3(signature = (chi1, chi2, max_level = DEFAULT_MAX_LEVEL))]
    fn new(chi1: &str, chi2: &str, max_level: u32) -> PyResult<Self> {
        let opts = PrecomputeOptions {
            max_level,
            ..Default::default()
        };
        let inner = Context::precompute_with(&character(chi1)?, &character(chi2)?, &opts)
            .map_err(py_err)?;
        Ok(PyContext { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyContext {
            inner: Context::from_json(text).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn level(&self) -> u32 {
        self.inner.level()
    }

    #[getter]
    fn order(&self) -> u32 {
        self.inner.order()
    }

    /// `(|Γ0 transversal|, |SL2 transversal|, |alphabet|)`.
    fn sizes(&self) -> (usize, usize, usize) {
        (
            self.inner.t_g0().len(),
            self.inner.t_sl2().len(),
            self.inner.alphabet().len(),
        )
    }

    #[pyo3(signature = (m, quotient = "nearest"))]
    fn fast_sum(&self, m: &Bound<'_, PyAny>, quotient: &str) -> PyResult<PyCycElem> {
        let q = self::quotient(quotient)?;
        Ok(PyCycElem {
            inner: self.inner.fast_sum_with(&matrix(m)?, q).map_err(py_err)?,
        })
    }

    fn naive_sum(&self, m: &Bound<'_, PyAny>) -> PyResult<PyCycElem> {
        Ok(PyCycElem {
            inner: self.inner.naive_sum(&matrix(m)?).map_err(py_err)?,
        })
    }
}

/// The defining double sum for a character pair.
#[pyfunction]
fn naive_sum(chi1: &str, chi2: &str, m: &Bound<'_, PyAny>) -> PyResult<PyCycElem> {
    let inner =
        dedekind::naive_sum(&character(chi1)?, &character(chi2)?, &matrix(m)?).map_err(py_err)?;
    Ok(PyCycElem { inner })
}

/// `(negate, exponents)` with `m = ±T^{e1} S T^{e2} … S T^{er}`.
#[pyfunction]
#[pyo3(signature = (m, quotient = "nearest"))]
fn ts_decompose(m: &Bound<'_, PyAny>, quotient: &str) -> PyResult<(bool, Vec<BigInt>)> {
    let w = modgroup::ts_decompose(&matrix(m)?, self::quotient(quotient)?);
    Ok((w.negate, w.exponents))
}

#[pymodule]
fn gdsum(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCycElem>()?;
    m.add_class::<PyContext>()?;
    m.add_function(wrap_pyfunction!(naive_sum, m)?)?;
    m.add_function(wrap_pyfunction!(ts_decompose, m)?)?;
    Ok(())
}
