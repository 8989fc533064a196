//! Python bindings: `import unicrit`.
//!
//! Parameters and roots cross the boundary as Python `complex`, exact
//! coefficients as Python `int` (constant term first).

use num_bigint::BigInt;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use unicrit_core::dynamics::{self, ExtComplex, DEFAULT_ITERATIONS};
use unicrit_core::experiments::{self, BoundReport, Constants, ExperimentConfig, Report};
use unicrit_core::measures::{self, SphereGrid, TestFunction, BUILTIN_FAMILY};
use unicrit_core::rootfind::{self, AberthConfig};
use unicrit_core::{exactpoly, ntheory, Error};

pub fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_)
        | Error::DegreeCapExceeded { .. }
        | Error::CapExceeded { .. }
        | Error::NotInH1(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn grid_from(shape: (usize, usize)) -> PyResult<SphereGrid> {
    SphereGrid::new(shape.0, shape.1).map_err(to_py_err)
}

/// Midpoint grid on the sphere in `(u, θ)`, `u = r²/(1+r²)`.
#[pyclass(name = "SphereGrid", skip_from_py_object, frozen, module = "unicrit")]
#[derive(Clone)]
pub struct PySphereGrid {
    pub inner: SphereGrid,
}

#[pymethods]
impl PySphereGrid {
    #[new]
    fn new(n_u: usize, n_theta: usize) -> PyResult<Self> {
        Ok(Self {
            inner: grid_from((n_u, n_theta))?,
        })
    }

    #[getter]
    fn n_u(&self) -> usize {
        self.inner.n_u
    }

    #[getter]
    fn n_theta(&self) -> usize {
        self.inner.n_theta
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Node positions in the plane, row by row.
    fn points(&self) -> Vec<Complex64> {
        self.inner.points()
    }

    /// `∫ v dω` for values given at the nodes.
    fn integrate(&self, values: Vec<f64>) -> PyResult<f64> {
        self.inner.integrate(&values).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!("SphereGrid({}, {})", self.inner.n_u, self.inner.n_theta)
    }
}

/// A smooth test function given by its identifier, e.g. `bump(-1,0.4)`.
#[pyclass(name = "TestFunction", skip_from_py_object, frozen, module = "unicrit")]
#[derive(Clone)]
pub struct PyTestFunction {
    pub inner: TestFunction,
}

#[pymethods]
impl PyTestFunction {
    #[new]
    fn new(id: &str) -> PyResult<Self> {
        Ok(Self {
            inner: TestFunction::parse(id).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id.clone()
    }

    /// Value at a finite point, or at ∞ when `z` is `None`.
    #[pyo3(signature = (z=None))]
    fn __call__(&self, z: Option<Complex64>) -> f64 {
        self.inner.eval(z.map_or(ExtComplex::Infinity, ExtComplex::Finite))
    }

    /// `sup |dd^c φ / ω|` over the nodes of `grid`.
    #[pyo3(signature = (grid=(256, 256)))]
    fn sup_ddc(&self, grid: (usize, usize)) -> PyResult<f64> {
        let g = grid_from(grid)?;
        let t = measures::TabulatedTest::new(self.inner.clone(), &g, measures::DEFAULT_DDC_STEP).map_err(to_py_err)?;
        Ok(t.sup_ddc)
    }

    #[staticmethod]
    fn builtin_family() -> Vec<&'static str> {
        BUILTIN_FAMILY.to_vec()
    }

    fn __repr__(&self) -> String {
        format!("TestFunction({:?})", self.inner.id)
    }
}

/// One row of a bound table.
#[pyclass(name = "BoundReport", skip_from_py_object, get_all, frozen, module = "unicrit")]
#[derive(Clone)]
pub struct PyBoundReport {
    pub d: u32,
    pub n: u32,
    pub phi: String,
    pub discrepancy: f64,
    pub bound: f64,
    pub sup_ddc: f64,
    pub c_bf: f64,
    pub c0: f64,
    pub c0_star: f64,
    pub t_n: f64,
    pub t_n_star: f64,
    pub margin: f64,
    pub status: String,
    pub runtime_ms: u64,
}

impl From<&BoundReport> for PyBoundReport {
    fn from(r: &BoundReport) -> Self {
        Self {
            d: r.d,
            n: r.n,
            phi: r.phi.clone(),
            discrepancy: r.discrepancy,
            bound: r.bound,
            sup_ddc: r.sup_ddc,
            c_bf: r.c_bf,
            c0: r.c0,
            c0_star: r.c0_star,
            t_n: r.t_n,
            t_n_star: r.t_n_star,
            margin: r.margin,
            status: r.status.clone(),
            runtime_ms: r.runtime_ms,
        }
    }
}

#[pymethods]
impl PyBoundReport {
    fn __repr__(&self) -> String {
        format!(
            "BoundReport(d={}, n={}, phi={:?}, discrepancy={}, bound={}, margin={}, status={:?})",
            self.d, self.n, self.phi, self.discrepancy, self.bound, self.margin, self.status
        )
    }
}

/// Measured constants for one degree.
#[pyclass(name = "Constants", skip_from_py_object, get_all, frozen, module = "unicrit")]
#[derive(Clone)]
pub struct PyConstants {
    pub d: u32,
    pub c_bf_lower: f64,
    pub safety_factor: f64,
    pub c_bf_used: f64,
    pub c0: f64,
    pub c0_star: f64,
    pub h1_inradius: f64,
    pub h1_green_integral: f64,
    pub c0_error_bar: f64,
    pub grid: String,
    pub cbf_samples: usize,
    pub cbf_sphere_nodes: usize,
    pub seed: u64,
}

impl From<&Constants> for PyConstants {
    fn from(c: &Constants) -> Self {
        Self {
            d: c.d,
            c_bf_lower: c.c_bf_lower,
            safety_factor: c.safety_factor,
            c_bf_used: c.c_bf_used,
            c0: c.c0,
            c0_star: c.c0_star,
            h1_inradius: c.h1_inradius,
            h1_green_integral: c.h1_green_integral,
            c0_error_bar: c.c0_error_bar,
            grid: c.grid.clone(),
            cbf_samples: c.cbf_samples,
            cbf_sphere_nodes: c.cbf_sphere_nodes,
            seed: c.seed,
        }
    }
}

#[pymethods]
impl PyConstants {
    fn __repr__(&self) -> String {
        format!(
            "Constants(d={}, c_bf_used={}, c0={}, c0_star={}, grid={:?})",
            self.d, self.c_bf_used, self.c0, self.c0_star, self.grid
        )
    }
}

/// A bound table with its constants.
#[pyclass(name = "Report", frozen, module = "unicrit")]
pub struct PyReport {
    pub inner: Report,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn constants(&self) -> PyConstants {
        PyConstants::from(&self.inner.constants)
    }

    #[getter]
    fn rows(&self) -> Vec<PyBoundReport> {
        self.inner.rows.iter().map(PyBoundReport::from).collect()
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut out = Vec::new();
        self.inner.write_csv(&mut out).map_err(to_py_err)?;
        String::from_utf8(out).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.rows.len()
    }
}

pub fn config(
    grid: (usize, usize),
    seed: u64,
    safety: f64,
    cbf_samples: usize,
    cbf_sphere_nodes: usize,
) -> PyResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig {
        grid: grid_from(grid)?,
        seed,
        safety,
        cbf_samples,
        cbf_sphere_nodes,
        ..ExperimentConfig::default()
    };
    cfg.aberth.seed = seed;
    Ok(cfg)
}

fn phis_from(ids: Option<Vec<String>>) -> PyResult<Vec<TestFunction>> {
    let ids: Vec<String> = ids.unwrap_or_else(|| BUILTIN_FAMILY.iter().map(|s| s.to_string()).collect());
    ids.iter().map(|id| TestFunction::parse(id).map_err(to_py_err)).collect()
}

// ---- number theory

/// `ν(d, n)`, the number of points of formally exact period `n`.
#[pyfunction]
pub fn nu(d: u32, n: u64) -> PyResult<BigInt> {
    ntheory::nu(d, n).map_err(to_py_err)
}

#[pyfunction]
pub fn mobius(n: u64) -> PyResult<i32> {
    ntheory::mobius(n).map_err(to_py_err)
}

#[pyfunction]
pub fn t_n(d: u32, n: u64, c_bf: f64) -> PyResult<f64> {
    ntheory::t_n(d, n, c_bf).map_err(to_py_err)
}

#[pyfunction]
pub fn t_n_star(d: u32, n: u64, c_bf: f64) -> PyResult<f64> {
    ntheory::t_n_star(d, n, c_bf).map_err(to_py_err)
}

// ---- exact polynomials

/// Coefficients of `F_n(λ) = f_λ^n(0)`.
#[pyfunction]
pub fn critical_orbit_poly(d: u32, n: u32) -> PyResult<Vec<BigInt>> {
    Ok(exactpoly::critical_orbit_poly(d, n).map_err(to_py_err)?.into_coeffs())
}

/// Coefficients of `Φ*_n(λ, 0)`.
#[pyfunction]
pub fn dynatomic_at_zero(d: u32, n: u32) -> PyResult<Vec<BigInt>> {
    Ok(exactpoly::dynatomic_at_zero(d, n).map_err(to_py_err)?.into_coeffs())
}

/// Coefficients of `P*_n(λ, 0)`.
#[pyfunction]
pub fn pstar_at_zero(d: u32, n: u32) -> PyResult<Vec<BigInt>> {
    Ok(exactpoly::pstar_at_zero(d, n).map_err(to_py_err)?.into_coeffs())
}

#[pyfunction]
pub fn fn_is_squarefree(d: u32, n: u32) -> PyResult<bool> {
    exactpoly::fn_is_squarefree(d, n).map_err(to_py_err)
}

// ---- roots

/// Roots of `F_n`, the centers of the period-`n` hyperbolic components.
#[pyfunction]
#[pyo3(signature = (d, n, seed=1))]
pub fn superattracting_parameters(d: u32, n: u32, seed: u64) -> PyResult<Vec<Complex64>> {
    let cfg = AberthConfig {
        seed,
        ..AberthConfig::default()
    };
    Ok(rootfind::superattracting_parameters(d, n, &cfg).map_err(to_py_err)?.expanded())
}

/// Roots of `P*_n(·, 0)`, with multiplicity.
#[pyfunction]
pub fn pstar_zero_roots(d: u32, n: u32) -> PyResult<Vec<Complex64>> {
    experiments::pstar_zero_roots(d, n, &AberthConfig::default()).map_err(to_py_err)
}

// ---- dynamics

/// `g(λ)`, the Green function of the connectedness locus.
#[pyfunction]
#[pyo3(signature = (d, lam, iterations=DEFAULT_ITERATIONS))]
pub fn green_parameter(d: u32, lam: Complex64, iterations: usize) -> f64 {
    dynamics::green_parameter(d, lam, iterations, dynamics::escape_radius(d, lam))
}

/// `g_{f_λ}(z)`.
#[pyfunction]
#[pyo3(signature = (d, lam, z, iterations=DEFAULT_ITERATIONS))]
pub fn green_dynamical(d: u32, lam: Complex64, z: Complex64, iterations: usize) -> f64 {
    dynamics::green_dynamical(d, lam, z, iterations, dynamics::escape_radius(d, lam))
}

/// `h = g + log[·, ∞]`; `lam=None` is the point at infinity.
#[pyfunction]
#[pyo3(signature = (d, lam=None, iterations=DEFAULT_ITERATIONS))]
pub fn h_parameter(d: u32, lam: Option<Complex64>, iterations: usize) -> f64 {
    dynamics::h_parameter(d, lam.map_or(ExtComplex::Infinity, ExtComplex::Finite), iterations)
}

#[pyfunction]
pub fn lyapunov(d: u32, lam: Complex64) -> f64 {
    dynamics::lyapunov(d, lam)
}

/// `log|F_m(λ)| − d^{m−1} g(λ)` for `m = 1..=n`.
#[pyfunction]
#[pyo3(signature = (d, lam, n, iterations=DEFAULT_ITERATIONS))]
pub fn critical_defects(d: u32, lam: Complex64, n: usize, iterations: usize) -> Vec<f64> {
    dynamics::critical_defects(d, lam, n, iterations)
}

/// `log|P*_n(λ, w)|` through the periodic points of `f_λ`.
#[pyfunction]
pub fn log_pstar(d: u32, lam: Complex64, n: u32, w: Complex64) -> PyResult<f64> {
    dynamics::log_pstar(d, lam, n, w).map_err(to_py_err)
}

/// `(1/2π) ∫ log|P*_n(λ, r e^{iθ})| dθ` in closed form.
#[pyfunction]
pub fn averaged_log_pstar(d: u32, lam: Complex64, n: u32, r: f64) -> PyResult<f64> {
    dynamics::averaged_log_pstar(d, lam, n, r).map_err(to_py_err)
}

/// Multipliers of the cycles of exact period dividing `n`, one per point.
#[pyfunction]
pub fn periodic_multipliers(d: u32, lam: Complex64, n: u32) -> PyResult<Vec<Complex64>> {
    let cls = dynamics::classify_periodic(d, lam, n, 1e-8).map_err(to_py_err)?;
    Ok((0..cls.points.roots.len()).map(|i| cls.point_multiplier(i)).collect())
}

#[pyfunction]
pub fn in_h1(d: u32, lam: Complex64) -> bool {
    dynamics::in_h1(d, lam)
}

#[pyfunction]
pub fn h1_inradius(d: u32) -> PyResult<f64> {
    dynamics::h1_inradius(d).map_err(to_py_err)
}

/// Points of the boundary of the connectedness locus.
#[pyfunction]
#[pyo3(signature = (d, count, seed=1))]
pub fn boundary_sample(d: u32, count: usize, seed: u64) -> PyResult<Vec<Complex64>> {
    dynamics::boundary_sample(d, count, seed).map_err(to_py_err)
}

// ---- measures and experiments

/// Sampled lower estimate of `C_{B_f}` as `(value, argmax λ)`.
#[pyfunction]
#[pyo3(signature = (d, samples=1000, sphere_nodes=2048, seed=1))]
pub fn c_bf_estimate(d: u32, samples: usize, sphere_nodes: usize, seed: u64) -> PyResult<(f64, Complex64)> {
    let e = measures::c_bf_estimate(d, samples, sphere_nodes, seed).map_err(to_py_err)?;
    Ok((e.value, Complex64::new(e.argmax_lambda.0, e.argmax_lambda.1)))
}

#[pyfunction]
#[pyo3(signature = (d, grid=(1024, 1024), seed=1, safety=1.5, cbf_samples=1000, cbf_sphere_nodes=2048))]
pub fn constants(
    d: u32,
    grid: (usize, usize),
    seed: u64,
    safety: f64,
    cbf_samples: usize,
    cbf_sphere_nodes: usize,
) -> PyResult<PyConstants> {
    let cfg = config(grid, seed, safety, cbf_samples, cbf_sphere_nodes)?;
    Ok(PyConstants::from(&Constants::measure(d, &cfg).map_err(to_py_err)?))
}

/// Bound table for the critical-orbit divisors, `n = 1..=n_max`.
#[pyfunction]
#[pyo3(signature = (d, n_max, phis=None, grid=(1024, 1024), seed=1, safety=1.5, cbf_samples=1000, cbf_sphere_nodes=2048))]
#[allow(clippy::too_many_arguments)]
pub fn theorem1(
    py: Python<'_>,
    d: u32,
    n_max: u32,
    phis: Option<Vec<String>>,
    grid: (usize, usize),
    seed: u64,
    safety: f64,
    cbf_samples: usize,
    cbf_sphere_nodes: usize,
) -> PyResult<PyReport> {
    let cfg = config(grid, seed, safety, cbf_samples, cbf_sphere_nodes)?;
    let phis = phis_from(phis)?;
    let inner = py
        .detach(|| experiments::theorem1(d, n_max, &phis, &cfg))
        .map_err(to_py_err)?;
    Ok(PyReport { inner })
}

/// Bound table for the multiplier divisors and their circle averages.
#[pyfunction]
#[pyo3(signature = (d, periods, radii=vec![0.5, 1.0], phis=None, grid=(1024, 1024), seed=1, safety=1.5, cbf_samples=1000, cbf_sphere_nodes=2048))]
#[allow(clippy::too_many_arguments)]
pub fn theorem2(
    py: Python<'_>,
    d: u32,
    periods: Vec<u32>,
    radii: Vec<f64>,
    phis: Option<Vec<String>>,
    grid: (usize, usize),
    seed: u64,
    safety: f64,
    cbf_samples: usize,
    cbf_sphere_nodes: usize,
) -> PyResult<PyReport> {
    let cfg = config(grid, seed, safety, cbf_samples, cbf_sphere_nodes)?;
    let phis = phis_from(phis)?;
    let inner = py
        .detach(|| experiments::theorem2(d, &periods, &radii, &phis, &cfg))
        .map_err(to_py_err)?;
    Ok(PyReport { inner })
}

/// Critical orbits, dynatomic and multiplier polynomials of `z^d + λ`.
#[pymodule]
pub mod unicrit {
    #[pymodule_export]
    use super::{
        averaged_log_pstar, boundary_sample, c_bf_estimate, constants, critical_defects, critical_orbit_poly,
        dynatomic_at_zero, fn_is_squarefree, green_dynamical, green_parameter, h1_inradius, h_parameter, in_h1,
        log_pstar, lyapunov, mobius, nu, periodic_multipliers, pstar_at_zero, pstar_zero_roots,
        superattracting_parameters, t_n, t_n_star, theorem1, theorem2, PyBoundReport, PyConstants, PyReport,
        PySphereGrid, PyTestFunction,
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_python_classes() {
        Python::initialize();
        Python::attach(|py| {
            let e = to_py_err(Error::InvalidArgument("x".into()));
            assert!(e.is_instance_of::<PyValueError>(py));
            let e = to_py_err(Error::BisectionFailed("x".into()));
            assert!(e.is_instance_of::<PyRuntimeError>(py));
        });
    }

    #[test]
    fn config_carries_seed_to_solver() {
        let cfg = config((8, 16), 7, 2.0, 3, 4).unwrap();
        assert_eq!((cfg.grid.n_u, cfg.grid.n_theta), (8, 16));
        assert_eq!(cfg.aberth.seed, 7);
        assert!(config((0, 16), 7, 2.0, 3, 4).is_err());
    }

    #[test]
    fn bound_report_copy_is_faithful() {
        let r = BoundReport {
            d: 2,
            n: 3,
            phi: "sz".into(),
            discrepancy: 0.5,
            bound: 2.0,
            sup_ddc: 4.0,
            c_bf: 1.0,
            c0: 4.5,
            c0_star: 4.4,
            t_n: 9.0,
            t_n_star: 9.0,
            margin: 1.5,
            status: "ok".into(),
            runtime_ms: 3,
        };
        let p = PyBoundReport::from(&r);
        assert_eq!((p.d, p.n, p.phi.as_str(), p.margin, p.status.as_str()), (2, 3, "sz", 1.5, "ok"));
    }

    #[test]
    fn exact_coefficients_as_integers() {
        assert_eq!(critical_orbit_poly(2, 2).unwrap(), [0, 1, 1].map(BigInt::from));
        assert_eq!(nu(2, 4).unwrap(), BigInt::from(12));
    }
}
