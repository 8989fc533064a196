//! Experiment drivers: the two equidistribution inequalities and their
//! `L¹(ω)` forms evaluated as tables of [`BoundReport`] rows.
//!
//! Every row carries the constants it was measured against. `C_{B_f}` is
//! only ever estimated from below by sampling, so the value used in bounds
//! is that estimate times a declared safety factor.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{averaged_pstar_defect, critical_defects, GreenField, GreenKind, DEFAULT_ITERATIONS};
use crate::exactpoly::pstar_at_zero;
use crate::measures::{
    c0_constants, c_bf_estimate, pair_atomic, pair_muf, AtomicMeasure, SphereGrid, TabulatedTest, TestFunction,
    DEFAULT_DDC_STEP,
};
use crate::ntheory::{check_degree, divisors, mobius, nu_usize, t_n, t_n_star};
use crate::rootfind::{csv_error, roots_of_exactpoly, superattracting_parameters, AberthConfig};
use crate::{Error, Result};

/// Settings shared by all drivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grid: SphereGrid,
    pub seed: u64,
    /// Factor applied to the sampled lower estimate of `C_{B_f}`.
    pub safety: f64,
    pub cbf_samples: usize,
    pub cbf_sphere_nodes: usize,
    /// Iteration budget of the escape tests.
    pub iterations: usize,
    pub ddc_step: f64,
    pub aberth: AberthConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid: SphereGrid {
                n_u: 1024,
                n_theta: 1024,
            },
            seed: 1,
            safety: 1.5,
            cbf_samples: 1000,
            cbf_sphere_nodes: 2048,
            iterations: DEFAULT_ITERATIONS,
            ddc_step: DEFAULT_DDC_STEP,
            aberth: AberthConfig::default(),
        }
    }
}

/// Measured constants for one degree, with the resolutions behind them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Constants {
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

impl Constants {
    pub fn measure(d: u32, cfg: &ExperimentConfig) -> Result<Self> {
        check_degree(d)?;
        if !(cfg.safety >= 1.0) {
            return Err(Error::InvalidArgument(format!("safety factor {} must be at least 1", cfg.safety)));
        }
        let cbf = c_bf_estimate(d, cfg.cbf_samples, cfg.cbf_sphere_nodes, cfg.seed)?;
        let c0 = c0_constants(d, &cfg.grid)?;
        Ok(Self {
            d,
            c_bf_lower: cbf.value,
            safety_factor: cfg.safety,
            c_bf_used: cbf.value * cfg.safety,
            c0: c0.c0,
            c0_star: c0.c0_star,
            h1_inradius: c0.h1_inradius,
            h1_green_integral: c0.green_integral,
            c0_error_bar: c0.error_bar,
            grid: grid_label(&cfg.grid),
            cbf_samples: cbf.samples,
            cbf_sphere_nodes: cbf.sphere_nodes,
            seed: cfg.seed,
        })
    }

    /// One-line provenance written above CSV tables.
    pub fn provenance(&self) -> String {
        format!(
            "# d={} grid={} seed={} c_bf_lower={} safety={} c_bf_used={} c0={} c0_star={} h1_inradius={} cbf_samples={} cbf_sphere_nodes={}",
            self.d,
            self.grid,
            self.seed,
            self.c_bf_lower,
            self.safety_factor,
            self.c_bf_used,
            self.c0,
            self.c0_star,
            self.h1_inradius,
            self.cbf_samples,
            self.cbf_sphere_nodes
        )
    }
}

pub fn grid_label(grid: &SphereGrid) -> String {
    format!("{}x{}", grid.n_u, grid.n_theta)
}

/// Output of the constants driver.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantsTable {
    #[serde(flatten)]
    pub constants: Constants,
    /// `t_n` for `n = 1..=n_max`, with the `C_{B_f}` actually used.
    pub t_n: Vec<f64>,
    pub t_n_star: Vec<f64>,
}

pub fn constants_table(d: u32, n_max: u32, cfg: &ExperimentConfig) -> Result<ConstantsTable> {
    let constants = Constants::measure(d, cfg)?;
    let t: Vec<f64> = (1..=n_max as u64)
        .map(|n| t_n(d, n, constants.c_bf_used))
        .collect::<Result<_>>()?;
    let ts: Vec<f64> = (1..=n_max as u64)
        .map(|n| t_n_star(d, n, constants.c_bf_used))
        .collect::<Result<_>>()?;
    Ok(ConstantsTable {
        constants,
        t_n: t,
        t_n_star: ts,
    })
}

/// One line of a bound table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
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

pub const CSV_HEADER: [&str; 14] = [
    "d",
    "n",
    "phi",
    "discrepancy",
    "bound",
    "sup_ddc",
    "c_bf",
    "c0",
    "c0_star",
    "t_n",
    "t_n_star",
    "margin",
    "status",
    "runtime_ms",
];

pub const STATUS_OK: &str = "ok";
pub const STATUS_NEGATIVE: &str = "NEGATIVE_MARGIN";

impl BoundReport {
    #[allow(clippy::too_many_arguments)]
    fn new(
        d: u32,
        n: u32,
        phi: String,
        discrepancy: f64,
        bound: f64,
        sup_ddc: f64,
        c: &Constants,
        started: Instant,
    ) -> Result<Self> {
        let margin = bound - discrepancy;
        Ok(Self {
            d,
            n,
            phi,
            discrepancy,
            bound,
            sup_ddc,
            c_bf: c.c_bf_used,
            c0: c.c0,
            c0_star: c.c0_star,
            t_n: t_n(d, n as u64, c.c_bf_used)?,
            t_n_star: t_n_star(d, n as u64, c.c_bf_used)?,
            margin,
            status: if margin >= 0.0 { STATUS_OK } else { STATUS_NEGATIVE }.to_string(),
            runtime_ms: started.elapsed().as_millis() as u64,
        })
    }

    fn failed(d: u32, n: u32, phi: String, err: &Error, c: &Constants, started: Instant) -> Self {
        Self {
            d,
            n,
            phi,
            discrepancy: f64::NAN,
            bound: f64::NAN,
            sup_ddc: f64::NAN,
            c_bf: c.c_bf_used,
            c0: c.c0,
            c0_star: c.c0_star,
            t_n: f64::NAN,
            t_n_star: f64::NAN,
            margin: f64::NAN,
            status: format!("FAILED: {err}"),
            runtime_ms: started.elapsed().as_millis() as u64,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }
}

/// A table with the constants it was computed against.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub constants: Constants,
    pub rows: Vec<BoundReport>,
}

impl Report {
    /// CSV with a `#` provenance line followed by the fixed header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.constants.provenance())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER).map_err(csv_error)?;
        for r in &self.rows {
            w.write_record([
                r.d.to_string(),
                r.n.to_string(),
                r.phi.clone(),
                r.discrepancy.to_string(),
                r.bound.to_string(),
                r.sup_ddc.to_string(),
                r.c_bf.to_string(),
                r.c0.to_string(),
                r.c0_star.to_string(),
                r.t_n.to_string(),
                r.t_n_star.to_string(),
                r.margin.to_string(),
                r.status.clone(),
                r.runtime_ms.to_string(),
            ])
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn negative_rows(&self) -> impl Iterator<Item = &BoundReport> {
        self.rows.iter().filter(|r| r.status == STATUS_NEGATIVE)
    }
}

/// Potentials and tabulated test functions shared by both drivers.
struct Workspace {
    h: GreenField,
    tests: Vec<TabulatedTest>,
    muf: Vec<f64>,
}

impl Workspace {
    fn new(d: u32, phis: &[TestFunction], cfg: &ExperimentConfig) -> Result<Self> {
        let h = GreenField::compute(d, GreenKind::H, cfg.grid, cfg.iterations)?;
        let mut tests = Vec::with_capacity(phis.len());
        let mut muf = Vec::with_capacity(phis.len());
        for phi in phis {
            let t = TabulatedTest::new(phi.clone(), &cfg.grid, cfg.ddc_step)?;
            muf.push(pair_muf(&t, &h.values, &cfg.grid)?);
            tests.push(t);
        }
        Ok(Self { h, tests, muf })
    }
}

/// `∫ |log|F_n| − d^{n−1} g| ω` for `n = 1..=n_max`.
pub fn l1_critical(d: u32, n_max: u32, grid: &SphereGrid, iterations: usize) -> Result<Vec<f64>> {
    check_degree(d)?;
    grid.integrate_many(n_max as usize, |z| {
        critical_defects(d, z, n_max as usize, iterations)
            .into_iter()
            .map(f64::abs)
            .collect()
    })
}

/// Rows for `|∫ φ d((d−1) F_n^* δ_0 − d^n T_f)| ≤ sup|dd^c φ/ω| (d−1)(t_n + C_0)`
/// for `n = 1..=n_max`, plus one `L1` row per `n` comparing
/// `∫ |log|F_n| − d^{n−1} g| ω` with `t_n + C_0`.
pub fn theorem1(d: u32, n_max: u32, phis: &[TestFunction], cfg: &ExperimentConfig) -> Result<Report> {
    let constants = Constants::measure(d, cfg)?;
    theorem1_with(d, n_max, phis, cfg, constants)
}

/// [`theorem1`] with constants measured beforehand.
pub fn theorem1_with(
    d: u32,
    n_max: u32,
    phis: &[TestFunction],
    cfg: &ExperimentConfig,
    constants: Constants,
) -> Result<Report> {
    check_degree(d)?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let ws = Workspace::new(d, phis, cfg)?;
    let df = d as f64;
    let mut rows = Vec::new();
    let started = Instant::now();
    let l1 = l1_critical(d, n_max, &cfg.grid, cfg.iterations)?;
    let l1_ms = started.elapsed().as_millis() as u64;
    for n in 1..=n_max {
        let started = Instant::now();
        let tn = t_n(d, n as u64, constants.c_bf_used)?;
        match superattracting_parameters(d, n, &cfg.aberth) {
            Ok(roots) => {
                let centers = AtomicMeasure::uniform(roots.expanded(), 1.0)?;
                for (t, muf) in ws.tests.iter().zip(&ws.muf) {
                    let atoms = (df - 1.0) * pair_atomic(&t.phi, &centers);
                    let limit = df.powi(n as i32) * (df - 1.0) / df * muf;
                    let bound = t.sup_ddc * (df - 1.0) * (tn + constants.c0);
                    rows.push(BoundReport::new(
                        d,
                        n,
                        t.phi.id.clone(),
                        (atoms - limit).abs(),
                        bound,
                        t.sup_ddc,
                        &constants,
                        started,
                    )?);
                }
            }
            Err(e) => {
                for t in &ws.tests {
                    rows.push(BoundReport::failed(d, n, t.phi.id.clone(), &e, &constants, started));
                }
            }
        }
        let mut row = BoundReport::new(d, n, "L1".into(), l1[n as usize - 1], tn + constants.c0, 1.0, &constants, started)?;
        row.runtime_ms += l1_ms;
        rows.push(row);
    }
    Ok(Report { constants, rows })
}

/// Roots of `P*_n(·, 0)`, i.e. of `Φ*_n(λ, 0)`, each once.
pub fn pstar_zero_roots(d: u32, n: u32, cfg: &AberthConfig) -> Result<Vec<Complex64>> {
    let p = pstar_at_zero(d, n)?;
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    Ok(roots_of_exactpoly(&p, cfg)?.expanded())
}

/// `log|P*_n(λ, 0)| − (d−1) ν(n) g(λ)/d = (d−1) Σ_{m|n} μ(n/m) (log|F_m| − d^{m−1} g)`.
pub fn pstar_zero_defect(d: u32, lambda: Complex64, n: u32, iterations: usize) -> f64 {
    let defects = critical_defects(d, lambda, n as usize, iterations);
    let mut sum = 0.0;
    for m in divisors(n as u64).unwrap_or_default() {
        let mu = mobius(n as u64 / m).unwrap_or(0);
        if mu != 0 {
            sum += mu as f64 * defects[m as usize - 1];
        }
    }
    (d as f64 - 1.0) * sum
}

/// Rows for the multiplier-polynomial inequalities, `n ≥ 2`:
///
/// * `φ;w=0`: `|∫ φ d(Per*(n,0) − ν(n) T_f)| ≤ sup|dd^c φ/ω| (t_n* + (d−1) C_0*)`,
///   with `Per*(n,0)` given by its atoms;
/// * `φ;r=…`: the circle-averaged divisor, paired through its potential,
///   against `sup|dd^c φ/ω| (t_n* + 2(d−1) C_0*)`;
/// * `L1;w=0` and `L1;r=…`: the corresponding `L¹(ω)` estimates.
pub fn theorem2(d: u32, ns: &[u32], rs: &[f64], phis: &[TestFunction], cfg: &ExperimentConfig) -> Result<Report> {
    let constants = Constants::measure(d, cfg)?;
    theorem2_with(d, ns, rs, phis, cfg, constants)
}

/// [`theorem2`] with constants measured beforehand.
pub fn theorem2_with(
    d: u32,
    ns: &[u32],
    rs: &[f64],
    phis: &[TestFunction],
    cfg: &ExperimentConfig,
    constants: Constants,
) -> Result<Report> {
    check_degree(d)?;
    if let Some(n) = ns.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidArgument(format!("period {n}: these bounds are stated for n ≥ 2")));
    }
    if let Some(r) = rs.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::InvalidArgument(format!("radius {r} must lie in (0, 1]")));
    }
    let ws = Workspace::new(d, phis, cfg)?;
    let df = d as f64;
    let grid = cfg.grid;
    let mut rows = Vec::new();
    for &n in ns {
        let started = Instant::now();
        let nu = nu_usize(d, n as u64)? as f64;
        let mass = (df - 1.0) * nu / df;
        let tns = t_n_star(d, n as u64, constants.c_bf_used)?;
        let bound0 = tns + (df - 1.0) * constants.c0_star;
        let bound_r = tns + 2.0 * (df - 1.0) * constants.c0_star;

        match pstar_zero_roots(d, n, &cfg.aberth) {
            Ok(roots) => {
                let per = AtomicMeasure::uniform(roots, df - 1.0)?;
                for (t, muf) in ws.tests.iter().zip(&ws.muf) {
                    let disc = (pair_atomic(&t.phi, &per) - mass * muf).abs();
                    rows.push(BoundReport::new(
                        d,
                        n,
                        format!("{};w=0", t.phi.id),
                        disc,
                        t.sup_ddc * bound0,
                        t.sup_ddc,
                        &constants,
                        started,
                    )?);
                }
            }
            Err(e) => {
                for t in &ws.tests {
                    rows.push(BoundReport::failed(d, n, format!("{};w=0", t.phi.id), &e, &constants, started));
                }
            }
        }
        let l1_zero = grid.integrate_fn(|z| pstar_zero_defect(d, z, n, cfg.iterations).abs())?;
        rows.push(BoundReport::new(d, n, "L1;w=0".into(), l1_zero, bound0, 1.0, &constants, started)?);

        for &r in rs {
            let started = Instant::now();
            // A_r − (d−1)ν g/d on the grid
            let defect = grid.map_nodes(|z| averaged_pstar_defect(d, z, n, r, cfg.iterations));
            let l1 = grid.integrate(&defect.iter().map(|v| v.abs()).collect::<Vec<_>>())?;
            // potential of the averaged divisor plus mass · log[·,∞]
            let potential: Vec<f64> = defect.iter().zip(&ws.h.values).map(|(a, h)| a + mass * h).collect();
            for (t, muf) in ws.tests.iter().zip(&ws.muf) {
                let prod: Vec<f64> = potential.iter().zip(&t.ddc).map(|(p, l)| p * l).collect();
                let pairing = mass * t.mass + grid.integrate(&prod)?;
                let disc = (pairing - mass * muf).abs();
                rows.push(BoundReport::new(
                    d,
                    n,
                    format!("{};r={r}", t.phi.id),
                    disc,
                    t.sup_ddc * bound_r,
                    t.sup_ddc,
                    &constants,
                    started,
                )?);
            }
            rows.push(BoundReport::new(d, n, format!("L1;r={r}"), l1, bound_r, 1.0, &constants, started)?);
        }
    }
    Ok(Report { constants, rows })
}
