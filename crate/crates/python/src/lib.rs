//! Python bindings. Vectors cross the boundary as lists of floats and
//! matrices as lists of rows.

use proxkit::functionals::ProxFunctional;
use proxkit::linalg::{LinearOperator, Matrix, Vector};
use proxkit::newton::{control_ssn, l1_ssn, superlinear_diagnostic, L1_SSN_STEP_FACTOR};
use proxkit::problems::{gen, kkt_residual, oracle_boxqp, oracle_lasso, GenParams, ProblemSpec, ORACLE_MAX_DIM};
use proxkit::splitting::{
    check_step_condition, douglas_rachford, fista, primal_dual, prox_gradient, CompositeProblem, LeastSquaresTerm,
    SolverConfig,
};
use proxkit::trace::IterTrace;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(
    proxkit,
    ProxkitError,
    PyValueError,
    "Raised for invalid input or failed solves."
);

fn err(e: proxkit::Error) -> PyErr {
    ProxkitError::new_err(e.to_string())
}

fn vector(x: Vec<f64>) -> PyResult<Vector> {
    Vector::new(x).map_err(err)
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<Matrix> {
    Matrix::from_rows(rows).map_err(err)
}

/// A convex functional from the catalog, with its prox and conjugate.
#[pyclass(name = "Functional", module = "proxkit", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFunctional(ProxFunctional);

#[pymethods]
impl PyFunctional {
    #[staticmethod]
    fn zero() -> Self {
        Self(ProxFunctional::Zero)
    }

    #[staticmethod]
    fn squared_l2() -> Self {
        Self(ProxFunctional::SquaredL2)
    }

    #[staticmethod]
    #[pyo3(signature = (weight = 1.0))]
    fn l1(weight: f64) -> PyResult<Self> {
        checked(ProxFunctional::L1 { weight })
    }

    #[staticmethod]
    #[pyo3(signature = (weight = 1.0))]
    fn l2_norm(weight: f64) -> PyResult<Self> {
        checked(ProxFunctional::L2Norm { weight })
    }

    /// Indicator of `lower <= x <= upper`; use `float("inf")` for open sides.
    #[staticmethod]
    #[pyo3(name = "box")]
    fn box_indicator(lower: Vec<f64>, upper: Vec<f64>) -> PyResult<Self> {
        checked(ProxFunctional::BoxIndicator { lower, upper })
    }

    #[staticmethod]
    fn box_support(lower: Vec<f64>, upper: Vec<f64>) -> PyResult<Self> {
        checked(ProxFunctional::BoxSupport { lower, upper })
    }

    #[staticmethod]
    fn inf_ball(radius: f64) -> PyResult<Self> {
        checked(ProxFunctional::InfBallIndicator { radius })
    }

    #[staticmethod]
    fn l2_ball(radius: f64) -> PyResult<Self> {
        checked(ProxFunctional::L2BallIndicator { radius })
    }

    /// `alpha * f(x)`
    #[staticmethod]
    fn scaled(alpha: f64, f: &PyFunctional) -> PyResult<Self> {
        checked(ProxFunctional::scaled(alpha, f.0.clone()))
    }

    /// `alpha * f(x / alpha)`
    #[staticmethod]
    fn epi_scaled(alpha: f64, f: &PyFunctional) -> PyResult<Self> {
        checked(ProxFunctional::EpiScaled {
            alpha,
            inner: Box::new(f.0.clone()),
        })
    }

    /// `f(x - shift)`
    #[staticmethod]
    fn shifted(shift: Vec<f64>, f: &PyFunctional) -> PyResult<Self> {
        checked(ProxFunctional::shifted(vector(shift)?, f.0.clone()))
    }

    /// `f(x) + <slope, x>`
    #[staticmethod]
    fn tilted(slope: Vec<f64>, f: &PyFunctional) -> PyResult<Self> {
        checked(ProxFunctional::tilted(vector(slope)?, f.0.clone()))
    }

    /// `sum_i f_i(x_i)` with one scalar functional per coordinate.
    #[staticmethod]
    fn separable(terms: Vec<PyRef<'_, PyFunctional>>) -> PyResult<Self> {
        checked(ProxFunctional::SeparableSum {
            terms: terms.iter().map(|t| t.0.clone()).collect(),
        })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        let f: ProxFunctional = serde_json::from_str(s).map_err(|e| err(e.into()))?;
        checked(f)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| err(e.into()))
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind_name()
    }

    /// Value in the extended reals; `inf` outside the domain.
    fn value(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.value(&vector(x)?).map_err(err)
    }

    #[pyo3(signature = (x, gamma = 1.0))]
    fn prox(&self, x: Vec<f64>, gamma: f64) -> PyResult<Vec<f64>> {
        Ok(self.0.prox(gamma, &vector(x)?).map_err(err)?.into_vec())
    }

    /// `prox_{gamma f*}(x)`, computed through the Moreau identity.
    #[pyo3(signature = (x, gamma = 1.0))]
    fn prox_conjugate(&self, x: Vec<f64>, gamma: f64) -> PyResult<Vec<f64>> {
        Ok(self.0.prox_conjugate(gamma, &vector(x)?).map_err(err)?.into_vec())
    }

    fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }

    fn moreau_envelope(&self, x: Vec<f64>, gamma: f64) -> PyResult<f64> {
        self.0.moreau_envelope(gamma, &vector(x)?).map_err(err)
    }

    /// Gradient of the Moreau envelope, `(x - prox_{gamma f}(x)) / gamma`.
    fn yosida(&self, x: Vec<f64>, gamma: f64) -> PyResult<Vec<f64>> {
        Ok(self.0.yosida(gamma, &vector(x)?).map_err(err)?.into_vec())
    }

    fn fenchel_young_gap(&self, x: Vec<f64>, xstar: Vec<f64>) -> PyResult<f64> {
        self.0.fenchel_young_gap(&vector(x)?, &vector(xstar)?).map_err(err)
    }

    fn __eq__(&self, other: &PyFunctional) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!(
            "Functional({})",
            serde_json::to_string(&self.0).unwrap_or_else(|_| self.0.kind_name().into())
        )
    }
}

fn checked(f: ProxFunctional) -> PyResult<PyFunctional> {
    f.validate().map_err(err)?;
    Ok(PyFunctional(f))
}

/// Outcome of a solve: the iterate returned, its status, and the trace.
#[pyclass(name = "SolveResult", module = "proxkit", frozen, get_all)]
struct PySolveResult {
    x: Vec<f64>,
    dual: Option<Vec<f64>>,
    status: String,
    iterations: usize,
    objective: f64,
    kkt_residual: f64,
    objectives: Vec<f64>,
    residuals: Vec<f64>,
    trace_csv: String,
    /// `|x^{k+1} - x*| / |x^k - x*|` against the re-solved active set, for Newton runs.
    error_ratios: Option<Vec<f64>>,
}

#[pymethods]
impl PySolveResult {
    #[getter]
    fn converged(&self) -> bool {
        self.status == "converged"
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveResult(status={:?}, iterations={}, objective={:e}, kkt_residual={:e})",
            self.status, self.iterations, self.objective, self.kkt_residual
        )
    }
}

/// A benchmark problem: lasso, box-constrained QP, Huber denoising or
/// box-constrained linear-quadratic control.
#[pyclass(name = "Problem", module = "proxkit", frozen)]
struct PyProblem(ProblemSpec);

#[pymethods]
impl PyProblem {
    /// Seeded instance. `kind` is one of "lasso", "box_qp", "huber", "control".
    #[staticmethod]
    #[pyo3(signature = (kind, n, m = None, alpha = 1.0, gamma = 0.5, lower = -1.0, upper = 1.0, seed = 0))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        kind: &str,
        n: usize,
        m: Option<usize>,
        alpha: f64,
        gamma: f64,
        lower: f64,
        upper: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let m = m.unwrap_or(n);
        let params = match kind {
            "lasso" => GenParams::Lasso { n, m, alpha },
            "box_qp" => GenParams::BoxQp { n },
            "huber" => GenParams::HuberDenoise { n, gamma, alpha },
            "control" => GenParams::Control {
                n,
                m,
                alpha,
                lower,
                upper,
            },
            other => return Err(ProxkitError::new_err(format!("unknown problem kind {other:?}"))),
        };
        Ok(Self(gen(&params, seed).map_err(err)?))
    }

    /// `min 0.5 |Ax - b|^2 + alpha |x|_1`
    #[staticmethod]
    fn lasso(a: Vec<Vec<f64>>, b: Vec<f64>, alpha: f64) -> PyResult<Self> {
        Ok(Self(ProblemSpec::lasso(matrix(a)?, vector(b)?, alpha).map_err(err)?))
    }

    /// `min 0.5 x'Qx + c'x` subject to `lower <= x <= upper`
    #[staticmethod]
    fn box_qp(q: Vec<Vec<f64>>, c: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> PyResult<Self> {
        Ok(Self(
            ProblemSpec::box_qp(matrix(q)?, vector(c)?, vector(lower)?, vector(upper)?).map_err(err)?,
        ))
    }

    /// `min 0.5 |Su - z|^2 + (alpha/2) |u|^2` subject to `lower <= u <= upper`
    #[staticmethod]
    fn control(s: Vec<Vec<f64>>, z: Vec<f64>, alpha: f64, lower: f64, upper: f64) -> PyResult<Self> {
        Ok(Self(
            ProblemSpec::control(matrix(s)?, vector(z)?, alpha, lower, upper).map_err(err)?,
        ))
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        let spec = ProblemSpec::from_json(s).map_err(err)?;
        spec.validate().map_err(err)?;
        Ok(Self(spec))
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind_name()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn objective(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.objective(&vector(x)?).map_err(err)
    }

    /// Optimality residual at `x`; zero exactly at minimizers.
    #[pyo3(signature = (x, dual = None))]
    fn kkt_residual(&self, x: Vec<f64>, dual: Option<Vec<f64>>) -> PyResult<f64> {
        let dual = dual.map(vector).transpose()?;
        kkt_residual(&self.0, &vector(x)?, dual.as_ref()).map_err(err)
    }

    fn condition_estimate(&self) -> PyResult<f64> {
        self.0.condition_estimate().map_err(err)
    }

    /// Exact minimizer by enumerating all 3^n active-set patterns
    /// (lasso, box QP and control problems with n <= 12).
    fn oracle<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let sol = match &self.0 {
            ProblemSpec::Lasso { .. } => oracle_lasso(&self.0, ORACLE_MAX_DIM),
            _ => oracle_boxqp(&self.0, ORACLE_MAX_DIM),
        }
        .map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("x", sol.x_opt.into_vec())?;
        d.set_item("objective", sol.objective)?;
        d.set_item("kkt_residual", sol.kkt_residual)?;
        d.set_item("pattern", sol.pattern)?;
        d.set_item("patterns_checked", sol.patterns_checked)?;
        Ok(d)
    }

    /// Runs `solver` ("prox_gradient", "fista", "dr", "pdhg" or "ssn") from
    /// the origin. Not converging is reported through `status`, not raised.
    #[pyo3(signature = (solver, tol = 1e-8, max_iter = 10_000, step = None, tau = None, sigma = None, gamma = None))]
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        py: Python<'_>,
        solver: &str,
        tol: f64,
        max_iter: usize,
        step: Option<f64>,
        tau: Option<f64>,
        sigma: Option<f64>,
        gamma: Option<f64>,
    ) -> PyResult<PySolveResult> {
        let mut cfg = SolverConfig::new(max_iter, tol);
        cfg.step = step;
        cfg.tau = tau;
        cfg.sigma = sigma;
        let spec = &self.0;
        let solver = solver.to_owned();
        py.detach(move || run(spec, &solver, &cfg, gamma))
    }
}

fn lasso_data(spec: &ProblemSpec) -> Option<(&Matrix, &Vector, f64)> {
    match spec {
        ProblemSpec::Lasso { a, b, alpha, .. } => Some((a, b, *alpha)),
        _ => None,
    }
}

fn unsupported(solver: &str, spec: &ProblemSpec) -> PyErr {
    ProxkitError::new_err(format!(
        "solver {solver:?} does not apply to {} problems",
        spec.kind_name()
    ))
}

fn run(spec: &ProblemSpec, solver: &str, cfg: &SolverConfig, gamma: Option<f64>) -> PyResult<PySolveResult> {
    let x0 = Vector::zeros(spec.dim());
    let (x, dual, trace): (Vector, Option<Vector>, IterTrace) = match solver {
        "prox_gradient" | "fista" => {
            let p = spec.composite().map_err(err)?;
            let (x, t) = if solver == "fista" {
                fista(&p, &x0, cfg)
            } else {
                prox_gradient(&p, &x0, cfg)
            }
            .map_err(err)?;
            (x, None, t)
        }
        "dr" => {
            let (a, b, alpha) = lasso_data(spec).ok_or_else(|| unsupported(solver, spec))?;
            let op = LinearOperator::new(a.clone());
            let mut cfg = cfg.clone();
            if cfg.step.is_none() {
                cfg.step = Some(1.0 / spec.smooth_part().map_err(err)?.lipschitz().unwrap_or(1.0));
            }
            let f = LeastSquaresTerm::new(op, b.clone()).map_err(err)?;
            let (x, t) = douglas_rachford(&f, &ProxFunctional::L1 { weight: alpha }, &x0, &cfg).map_err(err)?;
            (x, None, t)
        }
        "pdhg" => {
            let (a, b, alpha) = lasso_data(spec).ok_or_else(|| unsupported(solver, spec))?;
            let p = CompositeProblem::split(
                ProxFunctional::L1 { weight: alpha },
                ProxFunctional::squared_distance(b.clone()),
                LinearOperator::new(a.clone()),
            );
            let (x, y, t) = primal_dual(&p, &x0, &Vector::zeros(b.len()), cfg).map_err(err)?;
            (x, Some(y), t)
        }
        "ssn" => match spec {
            ProblemSpec::Lasso { alpha, .. } => {
                let f = spec.smooth_part().map_err(err)?;
                let gamma = match gamma {
                    Some(g) => g,
                    None => L1_SSN_STEP_FACTOR / f.lipschitz().unwrap_or(1.0),
                };
                let (x, t) = l1_ssn(&f, *alpha, gamma, &x0, cfg).map_err(err)?;
                (x, None, t)
            }
            ProblemSpec::Control {
                s,
                z,
                alpha,
                lower,
                upper,
                ..
            } => {
                let op = LinearOperator::new(s.clone());
                let (x, t) = control_ssn(&op, z, *alpha, (*lower, *upper), &x0, cfg).map_err(err)?;
                (x, None, t)
            }
            _ => return Err(unsupported(solver, spec)),
        },
        other => return Err(ProxkitError::new_err(format!("unknown solver {other:?}"))),
    };
    let error_ratios = if solver == "ssn" {
        newton_ratios(spec, &x, &trace)
    } else {
        None
    };
    Ok(PySolveResult {
        status: serde_json::to_value(trace.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default(),
        iterations: trace.iterations(),
        objective: spec.objective(&x).map_err(err)?,
        kkt_residual: kkt_residual(spec, &x, dual.as_ref()).map_err(err)?,
        objectives: trace.objectives(),
        residuals: trace.residuals(),
        trace_csv: trace.to_csv(),
        x: x.into_vec(),
        dual: dual.map(Vector::into_vec),
        error_ratios,
    })
}

/// Error ratios against the exact solution of the final active set, when
/// that set verifies.
fn newton_ratios(spec: &ProblemSpec, x: &Vector, trace: &IterTrace) -> Option<Vec<f64>> {
    let x_ref = match spec {
        ProblemSpec::Lasso { .. } => {
            let signs: Vec<i8> = x.iter().map(|&v| (v > 0.0) as i8 - (v < 0.0) as i8).collect();
            proxkit::problems::lasso_pattern_solution(spec, &signs).ok()??
        }
        ProblemSpec::Control { lower, upper, .. } => {
            let pattern: Vec<i8> = x.iter().map(|&u| (u == *upper) as i8 - (u == *lower) as i8).collect();
            proxkit::problems::boxqp_pattern_solution(spec, &pattern).ok()??
        }
        _ => return None,
    };
    superlinear_diagnostic(trace, &x_ref).ok()
}

/// `sigma * tau * |A|^2`; raises if it is not below 1.
#[pyfunction]
fn step_condition(a: Vec<Vec<f64>>, tau: f64, sigma: f64) -> PyResult<f64> {
    check_step_condition(Some(&LinearOperator::new(matrix(a)?)), tau, sigma).map_err(err)
}

/// Largest singular value by power iteration.
#[pyfunction]
#[pyo3(signature = (a, tol = 1e-12, max_iter = 10_000))]
fn operator_norm(a: Vec<Vec<f64>>, tol: f64, max_iter: usize) -> PyResult<f64> {
    Ok(LinearOperator::new(matrix(a)?).op_norm(tol, max_iter).value)
}

#[pymodule(name = "proxkit")]
fn proxkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFunctional>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(step_condition, m)?)?;
    m.add_function(wrap_pyfunction!(operator_norm, m)?)?;
    m.add("ProxkitError", m.py().get_type::<ProxkitError>())?;
    Ok(())
}
