//! Python bindings: rules, elements of the free vector space, tensors and the
//! axiom checker.
//!
//! Objects cross the boundary as canonical key strings (the neutral object is
//! `""`), coefficients as `fractions.Fraction` and multiplicities as `int`.

use std::sync::Arc;

use hopf_forge_core::axioms::{check_condition, check_hopf, Domain, Report};
use hopf_forge_core::cli::expr::{evaluate, EvalOptions, Value};
use hopf_forge_core::cli::{default_bound, parse_conditions, CheckItem};
use hopf_forge_core::hopf::{self, AntipodeAlgorithm, DEFAULT_BUDGET};
use hopf_forge_core::vector::{format_rational, parse_rational, tensor};
use hopf_forge_core::{make_rule, Condition, Element, HopfError, Multiset, ObjectKey, Rational, Rule, TensorElement};
use pyo3::create_exception;
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

create_exception!(hopf_forge, HopfForgeError, PyValueError);

fn py_err(e: HopfError) -> PyErr {
    HopfForgeError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((format_rational(q),))
}

fn big_int<'py>(py: Python<'py>, n: &impl ToString) -> PyResult<Bound<'py, PyAny>> {
    py.import("builtins")?.getattr("int")?.call1((n.to_string(),))
}

/// Accepts `int`, `fractions.Fraction` or a `"p/q"` string.
fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if obj.is_instance_of::<pyo3::types::PyBool>() || obj.is_instance_of::<pyo3::types::PyFloat>() {
        return Err(PyTypeError::new_err("coefficients must be int, Fraction or a 'p/q' string"));
    }
    let text = obj.str()?.to_string();
    parse_rational(&text).map_err(|_| PyTypeError::new_err(format!("not an exact rational: {text}")))
}

fn key(s: &str) -> ObjectKey {
    ObjectKey::new(s)
}

fn parse_algorithm(name: &str) -> PyResult<AntipodeAlgorithm> {
    match name {
        "sum" => Ok(AntipodeAlgorithm::AlternatingSum),
        "recursive" => Ok(AntipodeAlgorithm::Recursive),
        _ => Err(PyValueError::new_err(format!("unknown antipode algorithm `{name}` (use 'sum' or 'recursive')"))),
    }
}

/// Calls back into Python from inside a rule; failures become rule errors.
fn call_py<T>(what: &str, call: impl FnOnce(Python<'_>) -> PyResult<T>) -> hopf_forge_core::Result<T> {
    Python::attach(call).map_err(|e| HopfError::InvalidRule(format!("{what} callback failed: {e}")))
}

/// A composition/decomposition rule.
#[pyclass(name = "Rule", module = "hopf_forge", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRule {
    rule: Rule,
    instance: Option<String>,
}

#[pymethods]
impl PyRule {
    /// Builds one of the built-in instances: free, symmetric, shuffle,
    /// polynomial, graph, forest.
    #[new]
    #[pyo3(signature = (instance, alphabet=None))]
    fn new(instance: &str, alphabet: Option<&str>) -> PyResult<Self> {
        Ok(PyRule {
            rule: make_rule(instance, alphabet).map_err(py_err)?,
            instance: Some(instance.to_string()),
        })
    }

    /// A rule backed by Python callables on key strings:
    /// `compose(a, b) -> list[str]`, `decompose(g) -> list[tuple[str, str]]`,
    /// `size(g) -> int` and optionally `basis(bound) -> list[str]`. Lists are
    /// read as multisets.
    #[staticmethod]
    #[pyo3(signature = (name, compose, decompose, size, declared=None, basis=None))]
    fn custom(
        name: &str,
        compose: Py<PyAny>,
        decompose: Py<PyAny>,
        size: Py<PyAny>,
        declared: Option<Vec<String>>,
        basis: Option<Py<PyAny>>,
    ) -> PyResult<Self> {
        let declared = declared
            .unwrap_or_default()
            .iter()
            .map(|c| c.parse::<Condition>())
            .collect::<hopf_forge_core::Result<Vec<_>>>()
            .map_err(py_err)?;
        let mut builder = Rule::builder(name)
            .compose(move |a, b| {
                call_py("compose", |py| {
                    let out = compose.bind(py).call1((a.as_str(), b.as_str()))?;
                    let mut m = Multiset::new();
                    for k in out.extract::<Vec<String>>()? {
                        m.insert(key(&k));
                    }
                    Ok(m)
                })
            })
            .decompose(move |g| {
                call_py("decompose", |py| {
                    let out = decompose.bind(py).call1((g.as_str(),))?;
                    let mut m = Multiset::new();
                    for (l, r) in out.extract::<Vec<(String, String)>>()? {
                        m.insert((key(&l), key(&r)));
                    }
                    Ok(m)
                })
            })
            .size(move |g| call_py("size", |py| size.bind(py).call1((g.as_str(),))?.extract::<usize>()))
            .declare(declared);
        if let Some(basis) = basis {
            builder = builder.basis(move |bound| {
                call_py("basis", |py| {
                    let out = basis.bind(py).call1((bound,))?.extract::<Vec<String>>()?;
                    Ok(out.iter().map(|k| key(k)).collect())
                })
                .unwrap_or_default()
            });
        }
        Ok(PyRule {
            rule: builder.build().map_err(py_err)?,
            instance: None,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.rule.name().to_string()
    }

    #[getter]
    fn declared(&self) -> Vec<String> {
        self.rule.declared().iter().map(|c| c.to_string()).collect()
    }

    /// Canonical key of an object literal such as `w"ab"` or `t(t())`.
    fn parse(&self, text: &str) -> PyResult<String> {
        Ok(self.rule.parse_object(text).map_err(py_err)?.as_str().to_string())
    }

    /// Literal form of a key.
    fn format(&self, key_str: &str) -> String {
        self.rule.format_object(&key(key_str))
    }

    fn size(&self, key_str: &str) -> PyResult<usize> {
        self.rule.size(&key(key_str)).map_err(py_err)
    }

    /// `{key: multiplicity}` of `g2 ◁ g1`.
    fn compose<'py>(&self, py: Python<'py>, g2: &str, g1: &str) -> PyResult<Bound<'py, PyDict>> {
        let m = self.rule.compose(&key(g2), &key(g1)).map_err(py_err)?;
        let out = PyDict::new(py);
        for (k, n) in m.iter() {
            out.set_item(k.as_str(), big_int(py, n)?)?;
        }
        Ok(out)
    }

    /// `{(left, right): multiplicity}`.
    fn decompose<'py>(&self, py: Python<'py>, g: &str) -> PyResult<Bound<'py, PyDict>> {
        let m = self.rule.decompose(&key(g)).map_err(py_err)?;
        let out = PyDict::new(py);
        for ((l, r), n) in m.iter() {
            out.set_item((l.as_str(), r.as_str()), big_int(py, n)?)?;
        }
        Ok(out)
    }

    /// `{(g_0, ..., g_n): multiplicity}` of the n-fold decomposition.
    fn iterated_decompose<'py>(&self, py: Python<'py>, g: &str, n: usize) -> PyResult<Bound<'py, PyDict>> {
        let m = self.rule.iterated_decompose(&key(g), n).map_err(py_err)?;
        let out = PyDict::new(py);
        for (parts, c) in m.iter() {
            let parts = PyTuple::new(py, parts.iter().map(|k| k.as_str()))?;
            out.set_item(parts, big_int(py, c)?)?;
        }
        Ok(out)
    }

    /// Canonical keys of every object of size at most `bound`.
    fn basis(&self, bound: usize) -> PyResult<Vec<String>> {
        let objects = hopf_forge_core::instances::enumerate_basis(&self.rule, bound).map_err(py_err)?;
        Ok(objects.iter().map(|k| k.as_str().to_string()).collect())
    }

    /// The basis element of an object literal.
    fn element(&self, text: &str) -> PyResult<PyElement> {
        let k = self.rule.parse_object(text).map_err(py_err)?;
        Ok(PyElement::new(&self.rule, Element::basis(k)))
    }

    /// Basis element of a canonical key.
    fn basis_element(&self, key_str: &str) -> PyElement {
        PyElement::new(&self.rule, Element::basis(key(key_str)))
    }

    /// Evaluates an expression; returns an Element, a Tensor or a Fraction.
    #[pyo3(signature = (expression, budget=None))]
    fn eval<'py>(&self, py: Python<'py>, expression: &str, budget: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        let opts = EvalOptions { budget: budget.unwrap_or(DEFAULT_BUDGET) };
        match evaluate(expression, &self.rule, opts).map_err(py_err)? {
            Value::Scalar(c) => fraction(py, &c),
            Value::Element(e) => Ok(Bound::new(py, PyElement::new(&self.rule, e))?.into_any()),
            Value::Tensor(t) => Ok(Bound::new(py, PyTensor::new(&self.rule, t))?.into_any()),
        }
    }

    fn mul(&self, x: &PyElement, y: &PyElement) -> PyResult<PyElement> {
        x.mul_elements(y)
    }

    fn coproduct(&self, x: &PyElement) -> PyResult<PyTensor> {
        x.coproduct()
    }

    fn counit<'py>(&self, py: Python<'py>, x: &PyElement) -> PyResult<Bound<'py, PyAny>> {
        x.counit(py)
    }

    #[pyo3(signature = (x, algorithm="sum"))]
    fn antipode(&self, x: &PyElement, algorithm: &str) -> PyResult<PyElement> {
        x.antipode(algorithm)
    }

    /// Runs the axiom lab and returns the reports as dictionaries.
    ///
    /// `conditions` is a comma list like `"C1,D4,hopf"` or `"all"`. Without
    /// `objects` the domain is the basis up to `bound`.
    #[pyo3(signature = (conditions="all", bound=None, budget=None, objects=None))]
    fn check<'py>(
        &self,
        py: Python<'py>,
        conditions: &str,
        bound: Option<usize>,
        budget: Option<u64>,
        objects: Option<Vec<String>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let json = self.check_json(conditions, bound, budget, objects)?;
        py.import("json")?.getattr("loads")?.call1((json,))
    }

    /// Same as `check`, as a JSON string.
    #[pyo3(signature = (conditions="all", bound=None, budget=None, objects=None))]
    fn check_json(
        &self,
        conditions: &str,
        bound: Option<usize>,
        budget: Option<u64>,
        objects: Option<Vec<String>>,
    ) -> PyResult<String> {
        let items = parse_conditions(conditions).map_err(py_err)?;
        let bound = bound.unwrap_or_else(|| default_bound(self.instance.as_deref().unwrap_or("")));
        let dom = match objects {
            Some(objs) => Domain::from_objects(&self.rule, objs.iter().map(|k| key(k)).collect(), bound),
            None => Domain::new(&self.rule, bound),
        }
        .map_err(py_err)?
        .with_budget(budget.unwrap_or(DEFAULT_BUDGET));
        let reports = items
            .into_iter()
            .map(|item| match item {
                CheckItem::Condition(c) => check_condition(&self.rule, c, &dom),
                CheckItem::Hopf => check_hopf(&self.rule, &dom),
            })
            .collect::<hopf_forge_core::Result<Vec<Report>>>()
            .map_err(py_err)?;
        serde_json::to_string(&reports).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Rule({:?})", self.rule.name())
    }
}

/// A finite rational combination of objects.
#[pyclass(name = "Element", module = "hopf_forge", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyElement {
    rule: Rule,
    inner: Arc<Element>,
}

impl PyElement {
    fn new(rule: &Rule, e: Element) -> Self {
        PyElement {
            rule: rule.clone(),
            inner: Arc::new(e),
        }
    }

    fn same_rule(&self, other: &PyElement) -> PyResult<()> {
        if self.rule.name() != other.rule.name() {
            return Err(PyTypeError::new_err(format!(
                "elements belong to different rules ({} and {})",
                self.rule.name(),
                other.rule.name()
            )));
        }
        Ok(())
    }

    fn mul_elements(&self, other: &PyElement) -> PyResult<PyElement> {
        self.same_rule(other)?;
        let e = hopf::mul(&self.rule, &self.inner, &other.inner).map_err(py_err)?;
        Ok(PyElement::new(&self.rule, e))
    }

    fn combine(&self, other: &Bound<'_, PyAny>, sign: i64) -> PyResult<PyElement> {
        let other = match other.cast::<PyElement>() {
            Ok(e) => e.get().clone(),
            Err(_) => PyElement::new(&self.rule, Element::term(to_rational(other)?, self.rule.neutral().clone())),
        };
        self.same_rule(&other)?;
        let mut e = (*self.inner).clone();
        e.add_assign_scaled(&other.inner, &Rational::from_integer(sign.into()));
        Ok(PyElement::new(&self.rule, e))
    }
}

#[pymethods]
impl PyElement {
    /// `{key: Fraction}` for the nonzero terms.
    fn terms<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        for (k, c) in self.inner.terms() {
            out.set_item(k.as_str(), fraction(py, c)?)?;
        }
        Ok(out)
    }

    fn coeff<'py>(&self, py: Python<'py>, key_str: &str) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.coeff(&key(key_str)))
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn coproduct(&self) -> PyResult<PyTensor> {
        let t = hopf::coproduct(&self.rule, &self.inner).map_err(py_err)?;
        Ok(PyTensor::new(&self.rule, t))
    }

    fn counit<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &hopf::counit(&self.rule, &self.inner).map_err(py_err)?)
    }

    /// `algorithm` is `"sum"` (alternating sum) or `"recursive"`.
    #[pyo3(signature = (algorithm="sum"))]
    fn antipode(&self, algorithm: &str) -> PyResult<PyElement> {
        let e = hopf::antipode(&self.rule, &self.inner, parse_algorithm(algorithm)?).map_err(py_err)?;
        Ok(PyElement::new(&self.rule, e))
    }

    /// Homogeneous component of size `n`.
    fn grade(&self, n: usize) -> PyResult<PyElement> {
        let e = hopf::project_grade(&self.rule, &self.inner, n).map_err(py_err)?;
        Ok(PyElement::new(&self.rule, e))
    }

    /// `self ⊗ other`.
    fn tensor(&self, other: &PyElement) -> PyResult<PyTensor> {
        self.same_rule(other)?;
        Ok(PyTensor::new(&self.rule, tensor(&self.inner, &other.inner)))
    }

    fn __add__(&self, other: &Bound<'_, PyAny>) -> PyResult<PyElement> {
        self.combine(other, 1)
    }

    fn __radd__(&self, other: &Bound<'_, PyAny>) -> PyResult<PyElement> {
        self.combine(other, 1)
    }

    fn __sub__(&self, other: &Bound<'_, PyAny>) -> PyResult<PyElement> {
        self.combine(other, -1)
    }

    fn __rsub__(&self, other: &Bound<'_, PyAny>) -> PyResult<PyElement> {
        self.__neg__().combine(other, 1)
    }

    fn __neg__(&self) -> PyElement {
        PyElement::new(&self.rule, self.inner.scale(&-Rational::from_integer(1.into())))
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<PyElement> {
        match other.cast::<PyElement>() {
            Ok(e) => self.mul_elements(e.get()),
            Err(_) => Ok(PyElement::new(&self.rule, self.inner.scale(&to_rational(other)?))),
        }
    }

    fn __rmul__(&self, other: &Bound<'_, PyAny>) -> PyResult<PyElement> {
        Ok(PyElement::new(&self.rule, self.inner.scale(&to_rational(other)?)))
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        match other.cast::<PyElement>() {
            Ok(e) => self.rule.name() == e.get().rule.name() && self.inner == e.get().inner,
            Err(_) => false,
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.display_with(|k| self.rule.format_object(k)).to_string()
    }

    fn __repr__(&self) -> String {
        format!("Element({})", self.__str__())
    }
}

/// A finite rational combination of pairs of objects.
#[pyclass(name = "Tensor", module = "hopf_forge", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTensor {
    rule: Rule,
    inner: Arc<TensorElement>,
}

impl PyTensor {
    fn new(rule: &Rule, t: TensorElement) -> Self {
        PyTensor {
            rule: rule.clone(),
            inner: Arc::new(t),
        }
    }
}

#[pymethods]
impl PyTensor {
    /// `{(left, right): Fraction}` for the nonzero terms.
    fn terms<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        for ((l, r), c) in self.inner.terms() {
            out.set_item((l.as_str(), r.as_str()), fraction(py, c)?)?;
        }
        Ok(out)
    }

    fn coeff<'py>(&self, py: Python<'py>, left: &str, right: &str) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.coeff(&key(left), &key(right)))
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Exchanges the two factors.
    fn swap(&self) -> PyTensor {
        PyTensor::new(&self.rule, self.inner.swap())
    }

    /// Multiplies the two factors together.
    fn mu(&self) -> PyResult<PyElement> {
        Ok(PyElement::new(&self.rule, hopf::mu(&self.rule, &self.inner).map_err(py_err)?))
    }

    fn __add__(&self, other: &PyTensor) -> PyTensor {
        PyTensor::new(&self.rule, self.inner.add(&other.inner))
    }

    fn __sub__(&self, other: &PyTensor) -> PyTensor {
        let mut t = (*self.inner).clone();
        t.add_assign_scaled(&other.inner, &-Rational::from_integer(1.into()));
        PyTensor::new(&self.rule, t)
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<PyTensor> {
        match other.cast::<PyTensor>() {
            Ok(t) => {
                let t = hopf::tensor_mul(&self.rule, &self.inner, &t.get().inner).map_err(py_err)?;
                Ok(PyTensor::new(&self.rule, t))
            }
            Err(_) => Ok(PyTensor::new(&self.rule, self.inner.scale(&to_rational(other)?))),
        }
    }

    fn __rmul__(&self, other: &Bound<'_, PyAny>) -> PyResult<PyTensor> {
        Ok(PyTensor::new(&self.rule, self.inner.scale(&to_rational(other)?)))
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        match other.cast::<PyTensor>() {
            Ok(t) => self.rule.name() == t.get().rule.name() && self.inner == t.get().inner,
            Err(_) => false,
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.display_with(|k| self.rule.format_object(k)).to_string()
    }

    fn __repr__(&self) -> String {
        format!("Tensor({})", self.__str__())
    }
}

/// Names of the built-in instances.
#[pyfunction]
fn instances() -> Vec<&'static str> {
    hopf_forge_core::instances::INSTANCES.to_vec()
}

#[pymodule]
fn hopf_forge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRule>()?;
    m.add_class::<PyElement>()?;
    m.add_class::<PyTensor>()?;
    m.add_function(wrap_pyfunction!(instances, m)?)?;
    m.add("HopfForgeError", m.py().get_type::<HopfForgeError>())?;
    Ok(())
}
