//! Python bindings: systems, points, elements, representation matrices,
//! certified norm brackets and the numerical checks.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use semicrossed::cli::{parse_chooser, parse_element, parse_point, parse_rep_spec};
use semicrossed::dynsys::{Classification, DynamicalSystem};
use semicrossed::element::Element;
use semicrossed::extension::{classify_ext, lift_point, verify_transfer, Property};
use semicrossed::norms::{semicrossed_norm, theorem3_check, witness_family, Budget};
use semicrossed::repr::rep_matrix;
use semicrossed::verify::{run as run_check, Check, Corpus};

fn err(e: semicrossed::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn budget(nmax: Option<usize>, grid: Option<usize>, window: Option<usize>, seed: Option<u64>) -> Budget {
    let mut b = Budget::default();
    b.n_max = nmax.unwrap_or(b.n_max);
    b.grid = grid.unwrap_or(b.grid);
    b.window = window.unwrap_or(b.window);
    b.seed = seed.unwrap_or(b.seed);
    b
}

fn class_tuple(c: Classification) -> (String, Option<usize>, Option<usize>) {
    match c {
        Classification::Periodic { period } => ("periodic".into(), Some(period), Some(0)),
        Classification::EventuallyPeriodic { preperiod, period } => {
            ("eventually_periodic".into(), Some(period), Some(preperiod))
        }
        Classification::Unresolved { .. } => ("unresolved".into(), None, None),
    }
}

/// A base dynamical system: `x ↦ kx` on the circle, a one-sided subshift of
/// finite type, or a permutation of a finite set.
#[pyclass(name = "System", module = "semicrossed_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySystem {
    sys: DynamicalSystem,
}

#[pymethods]
impl PySystem {
    #[staticmethod]
    fn circle(k: u32) -> PyResult<Self> {
        Ok(Self { sys: DynamicalSystem::circle(k).map_err(err)? })
    }

    #[staticmethod]
    fn sft(matrix: Vec<Vec<u8>>) -> PyResult<Self> {
        let rows = matrix.iter().map(|r| r.iter().map(|&b| b != 0).collect()).collect();
        Ok(Self { sys: DynamicalSystem::sft(rows).map_err(err)? })
    }

    #[staticmethod]
    fn permutation(perm: Vec<usize>) -> PyResult<Self> {
        Ok(Self { sys: DynamicalSystem::permutation(perm).map_err(err)? })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.sys.kind_name()
    }

    /// Image of a point under the map.
    fn apply(&self, point: &str) -> PyResult<String> {
        let x = parse_point(&self.sys, point).map_err(err)?;
        Ok(self.sys.apply(&x).map_err(err)?.to_string())
    }

    fn preimages(&self, point: &str) -> PyResult<Vec<String>> {
        let x = parse_point(&self.sys, point).map_err(err)?;
        Ok(self.sys.preimages(&x).map_err(err)?.iter().map(|p| p.to_string()).collect())
    }

    /// `(class, period, preperiod)`; period and preperiod are `None` when
    /// unresolved.
    #[pyo3(signature = (point, max_steps = 4096))]
    fn classify(&self, point: &str, max_steps: usize) -> PyResult<(String, Option<usize>, Option<usize>)> {
        let x = parse_point(&self.sys, point).map_err(err)?;
        Ok(class_tuple(self.sys.classify(&x, max_steps).map_err(err)?))
    }

    fn periodic_points(&self, max_period: usize) -> Vec<String> {
        self.sys.periodic_points(max_period).iter().map(|p| p.to_string()).collect()
    }

    /// Lift to the natural extension; returns `(description, class, period)`.
    #[pyo3(signature = (point, chooser = "min", depth = 128))]
    fn lift(&self, point: &str, chooser: &str, depth: usize) -> PyResult<(String, String, Option<usize>)> {
        let x = parse_point(&self.sys, point).map_err(err)?;
        let lift = lift_point(&self.sys, &x, parse_chooser(chooser).map_err(err)?).map_err(err)?;
        let (class, period, _) = class_tuple(classify_ext(&self.sys, &lift, depth).map_err(err)?);
        Ok((lift.describe(&self.sys, 8).map_err(err)?, class, period))
    }

    /// `(name, base, extension)` rows for a subshift of finite type.
    fn properties(&self) -> PyResult<Vec<(String, bool, bool)>> {
        Property::ALL
            .iter()
            .map(|p| {
                let (b, e) = verify_transfer(&self.sys, *p).map_err(err)?;
                Ok((p.name().to_string(), b, e))
            })
            .collect()
    }

    /// Parse an element such as `1 + U*cos(1)`.
    fn element(&self, expr: &str) -> PyResult<PyElement> {
        Ok(PyElement { sys: self.sys.clone(), el: parse_element(&self.sys, expr).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        match &self.sys {
            DynamicalSystem::CircleTimesK { k } => format!("System.circle({k})"),
            DynamicalSystem::Sft(m) => {
                let rows: Vec<Vec<u8>> = m.rows().iter().map(|r| r.iter().map(|&b| b as u8).collect()).collect();
                format!("System.sft({rows:?})")
            }
            DynamicalSystem::Permutation(p) => format!("System.permutation({p:?})"),
        }
    }
}

/// A finite sum `Σ Uⁿ fₙ` over a fixed system.
#[pyclass(name = "Element", module = "semicrossed_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyElement {
    sys: DynamicalSystem,
    el: Element,
}

impl PyElement {
    fn wrap(&self, el: semicrossed::Result<Element>) -> PyResult<Self> {
        Ok(Self { sys: self.sys.clone(), el: el.map_err(err)? })
    }

    fn same_system(&self, other: &Self) -> PyResult<()> {
        if self.sys != other.sys {
            return Err(PyValueError::new_err("elements belong to different systems"));
        }
        Ok(())
    }
}

#[pymethods]
impl PyElement {
    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.same_system(other)?;
        self.wrap(self.el.add(&self.sys, &other.el))
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.same_system(other)?;
        self.wrap(self.el.sub(&self.sys, &other.el))
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.same_system(other)?;
        self.wrap(self.el.multiply(&self.sys, &other.el))
    }

    fn __neg__(&self) -> Self {
        Self { sys: self.sys.clone(), el: self.el.neg() }
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.sys == other.sys && self.el == other.el
    }

    fn scale(&self, s: Complex64) -> Self {
        Self { sys: self.sys.clone(), el: self.el.scale(s) }
    }

    fn adjoint(&self) -> PyResult<Self> {
        self.wrap(self.el.adjoint(&self.sys))
    }

    /// `U* F U`.
    fn alpha(&self) -> PyResult<Self> {
        self.wrap(self.el.alpha(&self.sys))
    }

    /// `F Uᵐ`, semicrossed once `m` is at least every coefficient depth minus one.
    fn pushdown(&self, m: usize) -> PyResult<Self> {
        self.wrap(self.el.pushdown(&self.sys, m))
    }

    #[getter]
    fn is_semicrossed(&self) -> bool {
        self.el.is_semicrossed()
    }

    #[getter]
    fn powers(&self) -> Vec<i64> {
        self.el.coeffs().keys().copied().collect()
    }

    fn ell1_upper(&self) -> f64 {
        self.el.ell1_upper()
    }

    /// Matrix of the element under a representation spec such as
    /// `orbit:1/3:8` or `periodic:1/3:(0,1)`.
    fn rep_matrix(&self, spec: &str) -> PyResult<Vec<Vec<Complex64>>> {
        let spec = parse_rep_spec(&self.sys, spec).map_err(err)?;
        let m = rep_matrix(&self.sys, &spec, &self.el).map_err(err)?;
        let n = m.dim();
        Ok((0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect())
    }

    /// Certified bracket `(lower, upper, witness)` for the semicrossed norm.
    #[pyo3(signature = (nmax = None, grid = None, seed = None))]
    fn norm(&self, nmax: Option<usize>, grid: Option<usize>, seed: Option<u64>) -> PyResult<(f64, f64, String)> {
        let est = semicrossed_norm(&self.sys, &self.el, &budget(nmax, grid, None, seed)).map_err(err)?;
        Ok((est.bracket.lower, est.bracket.upper, witness_family(&est).to_string()))
    }

    /// Semicrossed and crossed-product brackets as two `(lower, upper)` pairs.
    #[pyo3(signature = (nmax = None, grid = None, window = None, seed = None))]
    fn compare_norms(
        &self,
        nmax: Option<usize>,
        grid: Option<usize>,
        window: Option<usize>,
        seed: Option<u64>,
    ) -> PyResult<((f64, f64), (f64, f64))> {
        let (a, b) = theorem3_check(&self.sys, &self.el, &budget(nmax, grid, window, seed)).map_err(err)?;
        Ok(((a.lower, a.upper), (b.lower, b.upper)))
    }

    fn __repr__(&self) -> String {
        self.el.to_string()
    }
}

/// Run a named check (or `all`) and return `(check, case, measured, bound, passed)` rows.
#[pyfunction]
#[pyo3(signature = (check, system = None, cases = 20, seed = 0))]
fn verify(check: &str, system: Option<&PySystem>, cases: usize, seed: u64) -> PyResult<Vec<(String, String, String, String, bool)>> {
    let checks = Check::parse(check).ok_or_else(|| PyValueError::new_err(format!("unknown check {check:?}")))?;
    let sys = match system {
        Some(s) => s.sys.clone(),
        None => DynamicalSystem::circle(2).map_err(err)?,
    };
    let mut corpus = Corpus::new(sys, budget(None, None, None, Some(seed))).map_err(err)?;
    corpus.cases = cases;
    let mut rows = Vec::new();
    for c in checks {
        for r in run_check(c, &corpus).map_err(err)? {
            rows.push((r.check.to_string(), r.case, r.measured, r.bound, r.pass));
        }
    }
    Ok(rows)
}

#[pymodule]
fn semicrossed_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PyElement>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
