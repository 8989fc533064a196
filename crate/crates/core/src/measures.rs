//! Quadrature on the Riemann sphere and pairings of test functions with
//! measures.
//!
//! The sphere carries the Fubini–Study area `ω` normalized to mass 1. In the
//! coordinates `u = r²/(1+r²)`, `θ = arg z` it is the uniform measure
//! `du dθ/2π` on `[0,1) × [0,2π)`, so a uniform midpoint grid integrates
//! against `ω` by plain averaging.

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{boundary_axis_points, boundary_sample, chordal, h1_green, h1_inradius, in_h1, ExtComplex};
use crate::ntheory::check_degree;
use crate::rootfind::rng_for;
use crate::{Error, Result};

/// Default step of the discrete Laplacian, in chart coordinates.
pub const DEFAULT_DDC_STEP: f64 = 2e-4;

/// Midpoint product grid in `(u, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereGrid {
    pub n_u: usize,
    pub n_theta: usize,
}

impl SphereGrid {
    pub fn new(n_u: usize, n_theta: usize) -> Result<Self> {
        if n_u == 0 || n_theta == 0 {
            return Err(Error::InvalidArgument("grid dimensions must be positive".into()));
        }
        Ok(Self { n_u, n_theta })
    }

    pub fn len(&self) -> usize {
        self.n_u * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// `(u, θ)` of node `index` (row-major, rows indexed by `u`).
    pub fn node(&self, index: usize) -> (f64, f64) {
        let i = index / self.n_theta;
        let j = index % self.n_theta;
        (
            (i as f64 + 0.5) / self.n_u as f64,
            TAU * (j as f64 + 0.5) / self.n_theta as f64,
        )
    }

    pub fn point(&self, index: usize) -> Complex64 {
        let (u, theta) = self.node(index);
        Complex64::from_polar((u / (1.0 - u)).sqrt(), theta)
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// `f` at every node, in node order.
    pub fn map_nodes<F: Fn(Complex64) -> f64 + Sync>(&self, f: F) -> Vec<f64> {
        (0..self.len()).into_par_iter().map(|i| f(self.point(i))).collect()
    }

    /// `∫ v dω` for per-node values `v`.
    ///
    /// Pairwise summation in a fixed order, so the result does not depend on
    /// thread scheduling.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                self.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteNode { index });
        }
        Ok(pairwise_sum(values) / self.len() as f64)
    }

    /// `∫ f dω` for several integrands at once: `f` returns `k` values per node.
    ///
    /// Rows of the grid are summed independently and then combined
    /// pairwise, which keeps memory at `k` values per row.
    pub fn integrate_many<F: Fn(Complex64) -> Vec<f64> + Sync>(&self, k: usize, f: F) -> Result<Vec<f64>> {
        let rows: Vec<std::result::Result<Vec<f64>, usize>> = (0..self.n_u)
            .into_par_iter()
            .map(|i| {
                let mut cols = vec![Vec::with_capacity(self.n_theta); k];
                for j in 0..self.n_theta {
                    let index = i * self.n_theta + j;
                    let v = f(self.point(index));
                    for (c, x) in cols.iter_mut().zip(v) {
                        if !x.is_finite() {
                            return Err(index);
                        }
                        c.push(x);
                    }
                }
                Ok(cols.iter().map(|c| pairwise_sum(c)).collect())
            })
            .collect();
        let mut per_k = vec![Vec::with_capacity(self.n_u); k];
        for row in rows {
            let row = row.map_err(|index| Error::NonFiniteNode { index })?;
            for (c, x) in per_k.iter_mut().zip(row) {
                c.push(x);
            }
        }
        Ok(per_k.iter().map(|c| pairwise_sum(c) / self.len() as f64).collect())
    }

    /// `∫ f dω` for a function given pointwise.
    pub fn integrate_fn<F: Fn(Complex64) -> f64 + Sync>(&self, f: F) -> Result<f64> {
        Ok(self.integrate_many(1, |z| vec![f(z)])?[0])
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// The shapes of built-in test functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestKind {
    Constant(f64),
    /// `exp(−[z, a]² / s²)`.
    Bump { center: ExtComplex, width: f64 },
    /// Coordinates of the unit sphere under stereographic projection.
    SphereX,
    SphereY,
    SphereZ,
}

/// A `C²` function on the sphere with a textual identifier.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub id: String,
    pub kind: TestKind,
}

/// Identifiers of the default family.
pub const BUILTIN_FAMILY: [&str; 8] = [
    "one",
    "bump(0,0.5)",
    "bump(-1,0.4)",
    "bump(-0.5+0.6i,0.3)",
    "bump(inf,0.7)",
    "sx",
    "sy",
    "sz",
];

impl TestFunction {
    /// Parses `one`, `const(c)`, `bump(a,s)` (with `a` a complex literal
    /// such as `-0.5+0.6i` or `inf`, and `s ≥ 0.2`), `sx`, `sy` or `sz`.
    pub fn parse(id: &str) -> Result<Self> {
        let id = id.trim();
        let bad = || Error::InvalidArgument(format!("unknown test function `{id}`"));
        let kind = match id {
            "one" => TestKind::Constant(1.0),
            "sx" => TestKind::SphereX,
            "sy" => TestKind::SphereY,
            "sz" => TestKind::SphereZ,
            _ => {
                let (name, args) = id.split_once('(').ok_or_else(bad)?;
                let args = args.strip_suffix(')').ok_or_else(bad)?;
                match name {
                    "const" => TestKind::Constant(args.trim().parse().map_err(|_| bad())?),
                    "bump" => {
                        let (a, s) = args.rsplit_once(',').ok_or_else(bad)?;
                        let center = parse_point(a).ok_or_else(bad)?;
                        let width: f64 = s.trim().parse().map_err(|_| bad())?;
                        if !(width >= 0.2) {
                            return Err(Error::InvalidArgument(format!(
                                "bump width {width} is below the minimum 0.2"
                            )));
                        }
                        TestKind::Bump { center, width }
                    }
                    _ => return Err(bad()),
                }
            }
        };
        Ok(Self { id: id.to_string(), kind })
    }

    pub fn builtin_family() -> Vec<Self> {
        BUILTIN_FAMILY.iter().map(|id| Self::parse(id).expect("built-in id")).collect()
    }

    pub fn eval(&self, z: ExtComplex) -> f64 {
        match self.kind {
            TestKind::Constant(c) => c,
            TestKind::Bump { center, width } => {
                let t = chordal(z, center) / width;
                (-t * t).exp()
            }
            TestKind::SphereX | TestKind::SphereY | TestKind::SphereZ => {
                let (x, y, zc) = match z {
                    ExtComplex::Infinity => (0.0, 0.0, 1.0),
                    ExtComplex::Finite(w) => {
                        let q = 1.0 + w.norm_sqr();
                        if q.is_finite() {
                            (2.0 * w.re / q, 2.0 * w.im / q, (w.norm_sqr() - 1.0) / q)
                        } else {
                            (0.0, 0.0, 1.0)
                        }
                    }
                };
                match self.kind {
                    TestKind::SphereX => x,
                    TestKind::SphereY => y,
                    _ => zc,
                }
            }
        }
    }

    pub fn eval_at(&self, z: Complex64) -> f64 {
        self.eval(ExtComplex::Finite(z))
    }
}

fn parse_point(s: &str) -> Option<ExtComplex> {
    let s = s.trim();
    if s == "inf" || s == "∞" {
        return Some(ExtComplex::Infinity);
    }
    Some(ExtComplex::Finite(parse_complex(s)?))
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(body) = s.strip_suffix('i') {
        // split at the last sign that is not the leading one or part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'e' && bytes[k - 1] != b'E' {
                split = Some(k);
                break;
            }
        }
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            t => t.parse().ok()?,
        };
        return Some(Complex64::new(re.parse().ok()?, im));
    }
    Some(Complex64::new(s.parse().ok()?, 0.0))
}

/// `(dd^c φ)/ω` at every grid node by the five-point Laplacian.
///
/// Nodes with `|z| ≤ 1` use the chart `ζ = z`, the others `ζ = 1/z`; in
/// either chart `ω = dx dy / (π (1+|ζ|²)²)` and `dd^c = Δ dx dy / 2π`, so the
/// density is `(1+|ζ|²)² Δφ / 2`.
pub fn ddc_density<F: Fn(ExtComplex) -> f64 + Sync>(phi: F, grid: &SphereGrid, h: f64) -> Result<Vec<f64>> {
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|index| ddc_at(&phi, grid.point(index), h))
        .collect();
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteStencil { index });
    }
    Ok(values)
}

/// `(dd^c φ)/ω` at one point.
pub fn ddc_at<F: Fn(ExtComplex) -> f64>(phi: &F, z: Complex64, h: f64) -> f64 {
    let inverted = z.norm() > 1.0;
    let zeta = if inverted { z.inv() } else { z };
    let at = |w: Complex64| -> f64 {
        if inverted {
            phi(ExtComplex::Finite(w).recip())
        } else {
            phi(ExtComplex::Finite(w))
        }
    };
    let centre = at(zeta);
    let lap = (at(zeta + h) + at(zeta - h) + at(zeta + Complex64::new(0.0, h)) + at(zeta - Complex64::new(0.0, h))
        - 4.0 * centre)
        / (h * h);
    let q = 1.0 + zeta.norm_sqr();
    0.5 * q * q * lap
}

pub fn sup_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// A test function tabulated on a grid together with its `dd^c` density.
#[derive(Debug, Clone)]
pub struct TabulatedTest {
    pub phi: TestFunction,
    pub values: Vec<f64>,
    pub ddc: Vec<f64>,
    pub sup_ddc: f64,
    /// `∫ φ dω`.
    pub mass: f64,
}

impl TabulatedTest {
    pub fn new(phi: TestFunction, grid: &SphereGrid, h: f64) -> Result<Self> {
        let values = grid.map_nodes(|z| phi.eval_at(z));
        let ddc = ddc_density(|z| phi.eval(z), grid, h)?;
        let mass = grid.integrate(&values)?;
        let sup_ddc = sup_abs(&ddc);
        Ok(Self {
            phi,
            values,
            ddc,
            sup_ddc,
            mass,
        })
    }
}

/// Finitely many weighted points.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    pub atoms: Vec<Complex64>,
    pub weights: Vec<f64>,
    /// Declared total mass.
    pub normalization: f64,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Complex64>, weights: Vec<f64>, normalization: f64) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::InvalidArgument("atoms and weights differ in length".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - normalization).abs() > 1e-9 * normalization.abs().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "total mass {total} differs from the declared normalization {normalization}"
            )));
        }
        Ok(Self {
            atoms,
            weights,
            normalization,
        })
    }

    /// Equal weights `weight` on each point.
    pub fn uniform(atoms: Vec<Complex64>, weight: f64) -> Result<Self> {
        let total = weight * atoms.len() as f64;
        let weights = vec![weight; atoms.len()];
        Self::new(atoms, weights, total)
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `Σ w_i φ(a_i)`.
pub fn pair_atomic(phi: &TestFunction, m: &AtomicMeasure) -> f64 {
    m.atoms.iter().zip(&m.weights).map(|(&a, w)| w * phi.eval_at(a)).sum()
}

/// `∫ φ dμ_f = ∫ φ dω + ∫ h (dd^c φ/ω) dω`, with `h` tabulated on the same grid.
pub fn pair_muf(test: &TabulatedTest, h_values: &[f64], grid: &SphereGrid) -> Result<f64> {
    if h_values.len() != grid.len() {
        return Err(Error::InvalidArgument("potential and grid sizes differ".into()));
    }
    let prod: Vec<f64> = h_values.iter().zip(&test.ddc).map(|(h, l)| h * l).collect();
    Ok(test.mass + grid.integrate(&prod)?)
}

/// Sampled lower estimate of `C_{B_f}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CbfEstimate {
    pub value: f64,
    pub samples: usize,
    pub sphere_nodes: usize,
    pub argmax_lambda: (f64, f64),
    /// `(α, β)` with `p = (cos α, sin α · e^{iβ})`.
    pub argmax_sphere: (f64, f64),
}

/// `|log ‖f̃_λ(p)‖|` for `p = (cos α, sin α e^{iβ})` and `f̃(p) = (p₀^d, p₁^d + λ p₀^d)`.
pub fn lift_log_norm(d: u32, lambda: Complex64, alpha: f64, beta: f64) -> f64 {
    let p0 = alpha.cos();
    let p1 = Complex64::from_polar(alpha.sin(), beta);
    let a = p0.powi(d as i32);
    let b = p1.powu(d) + lambda * a;
    (a * a + b.norm_sqr()).sqrt().ln().abs()
}

/// `sup_{λ ∈ ∂M, p ∈ S³} |log ‖f̃_λ(p)‖|`, estimated from below.
///
/// For each sampled boundary parameter the function is scanned on an
/// `(α, β)` grid of about `sphere_nodes` points and the best node is
/// refined by a compass search. The estimate is a running maximum, so it
/// never decreases when samples are added. The boundary points on the
/// symmetry axes of `M` are always included besides the random ones.
pub fn c_bf_estimate(d: u32, samples: usize, sphere_nodes: usize, seed: u64) -> Result<CbfEstimate> {
    check_degree(d)?;
    let mut lambdas = boundary_axis_points(d)?;
    lambdas.extend(boundary_sample(d, samples, seed)?);
    let n_alpha = ((sphere_nodes as f64 / 2.0).sqrt().ceil() as usize).max(2);
    let n_beta = 2 * n_alpha;
    let per_sample: Vec<(f64, (f64, f64))> = lambdas
        .par_iter()
        .map(|&lambda| {
            let f = |a: f64, b: f64| lift_log_norm(d, lambda, a, b);
            let mut best = (f64::NEG_INFINITY, (0.0, 0.0));
            for i in 0..n_alpha {
                let a = 0.5 * PI * i as f64 / (n_alpha - 1) as f64;
                for j in 0..n_beta {
                    let b = TAU * j as f64 / n_beta as f64;
                    let v = f(a, b);
                    if v > best.0 {
                        best = (v, (a, b));
                    }
                }
            }
            let (mut a, mut b) = best.1;
            let mut value = best.0;
            let mut step = 0.5 * PI / (n_alpha - 1) as f64;
            while step > 1e-10 {
                let mut moved = false;
                for (da, db) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                    let na = (a + da).clamp(0.0, 0.5 * PI);
                    let v = f(na, b + db);
                    if v > value {
                        value = v;
                        a = na;
                        b += db;
                        moved = true;
                    }
                }
                if !moved {
                    step *= 0.5;
                }
            }
            (value, (a, b))
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize, (0.0, 0.0));
    for (k, (v, p)) in per_sample.iter().enumerate() {
        if *v > best.0 {
            best = (*v, k, *p);
        }
    }
    let l = lambdas[best.1];
    Ok(CbfEstimate {
        value: best.0,
        samples,
        sphere_nodes: n_alpha * n_beta,
        argmax_lambda: (l.re, l.im),
        argmax_sphere: best.2,
    })
}

/// The constants `C_0` and `C_0*` with the ingredients that produced them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct C0Report {
    pub c0: f64,
    pub c0_star: f64,
    pub h1_inradius: f64,
    /// `∫_{H_1} G_{H_1}(·,0) dω` over the grid nodes.
    pub green_integral: f64,
    /// Analytic bound for the part of the pole not captured by the grid;
    /// already added into `c0`.
    pub error_bar: f64,
    pub nodes_in_h1: usize,
    pub excluded_nodes: usize,
    pub grid: SphereGrid,
}

/// Nodes closer than this (chordally) to the pole of `G_{H_1}` are skipped.
const POLE_EXCLUSION: f64 = 1e-3;

/// `∫₀^∞ 2r/(1+r²)² log⁺(r/ρ) dr`, by composite Simpson in `s = log(r/ρ)`.
///
/// In that variable the integrand `2r²/(1+r²)² · s` is smooth and decays like
/// `s e^{−2s}`, so no singular endpoint remains.
pub fn log_plus_integral(rho: f64) -> f64 {
    let upper = 40.0 + (1.0 / rho).ln().max(0.0);
    let panels = 40_000;
    let h = upper / panels as f64;
    let f = |s: f64| {
        let r = rho * s.exp();
        let q = 1.0 + r * r;
        2.0 * r * r / (q * q) * s
    };
    let mut sum = f(0.0) + f(upper);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(k as f64 * h);
    }
    sum * h / 3.0
}

/// `C_0* = π + ∫₀^∞ 2r/(1+r²)² log⁺(r/ρ) dr` with `ρ` the inradius of `H_1`,
/// and `C_0 = C_0* + ∫_{H_1} G_{H_1}(·,0) ω` by quadrature on `grid`.
pub fn c0_constants(d: u32, grid: &SphereGrid) -> Result<C0Report> {
    check_degree(d)?;
    let rho = h1_inradius(d)?;
    let c0_star = PI + log_plus_integral(rho);
    let df = d as f64;
    // H_1 lies in the disc of radius d^{-1/(d-1)} (1 + 1/d)
    let outer = df.powf(-1.0 / (df - 1.0)) * (1.0 + 1.0 / df) + 1e-9;
    let u_max = outer * outer / (1.0 + outer * outer);
    let rows = ((u_max * grid.n_u as f64).ceil() as usize).min(grid.n_u);
    let per_row: Vec<(f64, usize, usize)> = (0..rows)
        .into_par_iter()
        .map(|i| {
            let mut vals = Vec::new();
            let mut excluded = 0;
            for j in 0..grid.n_theta {
                let z = grid.point(i * grid.n_theta + j);
                if chordal(z.into(), ExtComplex::Finite(Complex64::new(0.0, 0.0))) < POLE_EXCLUSION {
                    excluded += 1;
                    continue;
                }
                if in_h1(d, z) {
                    if let Ok(g) = h1_green(d, z) {
                        vals.push(g);
                    }
                }
            }
            let count = vals.len();
            (pairwise_sum(&vals), count, excluded)
        })
        .collect();
    let sums: Vec<f64> = per_row.iter().map(|r| r.0).collect();
    let green_integral = pairwise_sum(&sums) / grid.len() as f64;
    let nodes_in_h1 = per_row.iter().map(|r| r.1).sum();
    let excluded_nodes = per_row.iter().map(|r| r.2).sum();
    // Near 0, G ≤ −log|λ| and ω ≤ 2r dr dθ/2π. The excluded disc has radius
    // ε' = ε/√(1−ε²) and carries at most ε'²(1/2 − log ε'). The first grid
    // row sees G ≈ −½ log u, whose midpoint rule misses (1 − log 2)/(2 N_u).
    let eps = POLE_EXCLUSION / (1.0 - POLE_EXCLUSION * POLE_EXCLUSION).sqrt();
    let excluded_bound = eps * eps * (0.5 - eps.ln());
    let first_row = (1.0 - LN_2) / (2.0 * grid.n_u as f64);
    let error_bar = excluded_bound + first_row;
    Ok(C0Report {
        c0: c0_star + green_integral + error_bar,
        c0_star,
        h1_inradius: rho,
        green_integral,
        error_bar,
        nodes_in_h1,
        excluded_nodes,
        grid: *grid,
    })
}

/// Uniformly random points of the disc `D(radius)`, for property checks.
pub fn random_disc_points(count: usize, radius: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = rng_for(seed, &[0xd15c]);
    (0..count)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            Complex64::from_polar(r, rng.gen::<f64>() * TAU)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::neg_log_chordal_infinity;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn weights_sum_to_one() {
        for (a, b) in [(1, 1), (3, 7), (100, 33), (1024, 1024)] {
            let g = SphereGrid::new(a, b).unwrap();
            assert_eq!(g.integrate(&vec![1.0; g.len()]).unwrap(), 1.0);
            assert_eq!(g.integrate_fn(|_| 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn integrate_examples() {
        let g = SphereGrid::new(1024, 64).unwrap();
        let half = g.integrate_fn(|z| 1.0 / (1.0 + z.norm_sqr())).unwrap();
        assert!((half - 0.5).abs() < 1e-12);
        // smoothed indicator of D(1)
        let g = SphereGrid::new(1024, 1024).unwrap();
        let disc = g.integrate_fn(|z| 1.0 / (1.0 + ((z.norm() - 1.0) * 200.0).exp())).unwrap();
        assert!((disc - 0.5).abs() < 1e-3, "{disc}");
    }

    #[test]
    fn nonfinite_nodes_are_reported() {
        let g = SphereGrid::new(4, 4).unwrap();
        let mut v = vec![0.0; 16];
        v[5] = f64::NAN;
        assert!(matches!(g.integrate(&v), Err(Error::NonFiniteNode { index: 5 })));
    }

    #[test]
    fn quadrature_converges_at_first_order_or_better() {
        let phi = TestFunction::parse("bump(-0.5+0.6i,0.3)").unwrap();
        let errs: Vec<f64> = [64usize, 128, 256]
            .iter()
            .map(|&n| {
                let a = SphereGrid::new(n, n).unwrap().integrate_fn(|z| phi.eval_at(z)).unwrap();
                let b = SphereGrid::new(2 * n, 2 * n).unwrap().integrate_fn(|z| phi.eval_at(z)).unwrap();
                (a - b).abs()
            })
            .collect();
        assert!(errs[1] <= 0.5 * errs[0] + 1e-14 && errs[2] <= 0.5 * errs[1] + 1e-14, "{errs:?}");
    }

    #[test]
    fn parse_identifiers() {
        assert_eq!(parse_complex("-0.5+0.6i"), Some(c(-0.5, 0.6)));
        assert_eq!(parse_complex("i"), Some(c(0.0, 1.0)));
        assert_eq!(parse_complex("-i"), Some(c(0.0, -1.0)));
        assert_eq!(parse_complex("2.5"), Some(c(2.5, 0.0)));
        assert_eq!(parse_complex("1e-3-2i"), Some(c(1e-3, -2.0)));
        assert_eq!(parse_complex("-3i"), Some(c(0.0, -3.0)));
        assert!(TestFunction::parse("bump(0,0.1)").is_err());
        assert!(TestFunction::parse("wave").is_err());
        assert_eq!(TestFunction::builtin_family().len(), BUILTIN_FAMILY.len());
        let b = TestFunction::parse("bump(inf,0.7)").unwrap();
        assert_eq!(b.eval(ExtComplex::Infinity), 1.0);
    }

    #[test]
    fn ddc_of_constants_vanishes() {
        let g = SphereGrid::new(16, 16).unwrap();
        let v = ddc_density(|_| 3.5, &g, DEFAULT_DDC_STEP).unwrap();
        assert!(v.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn ddc_calibration() {
        // dd^c(−log[·,∞]) = ω away from ∞, checked on |z| ≤ 1
        let g = SphereGrid::new(128, 128).unwrap();
        let v = ddc_density(
            |z| match z {
                ExtComplex::Finite(w) => neg_log_chordal_infinity(w),
                ExtComplex::Infinity => f64::INFINITY,
            },
            &g,
            DEFAULT_DDC_STEP,
        )
        .unwrap();
        let worst = v[..g.len() / 2].iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-4, "{worst}");
    }

    #[test]
    fn ddc_of_sphere_coordinates() {
        // coordinate functions are eigenfunctions: dd^c X / ω = −4 X
        let g = SphereGrid::new(32, 32).unwrap();
        for id in ["sx", "sy", "sz"] {
            let phi = TestFunction::parse(id).unwrap();
            let v = ddc_density(|z| phi.eval(z), &g, DEFAULT_DDC_STEP).unwrap();
            for (k, x) in v.iter().enumerate() {
                let expected = -4.0 * phi.eval_at(g.point(k));
                assert!((x - expected).abs() < 1e-5, "{id} node {k}: {x} vs {expected}");
            }
        }
    }

    #[test]
    fn ddc_has_zero_mean() {
        // the residual mean is the O(N^-2) midpoint error in u
        let g = SphereGrid::new(512, 512).unwrap();
        for phi in TestFunction::builtin_family() {
            let t = TabulatedTest::new(phi, &g, DEFAULT_DDC_STEP).unwrap();
            let mean = g.integrate(&t.ddc).unwrap();
            assert!(mean.abs() < 2e-5, "{}: {mean}", t.phi.id);
        }
    }

    #[test]
    fn atomic_pairings() {
        let one = TestFunction::parse("one").unwrap();
        let m = AtomicMeasure::uniform(vec![c(0.3, 0.1), c(-1.0, 0.0)], 0.5).unwrap();
        assert_eq!(pair_atomic(&one, &m), 1.0);
        let bump = TestFunction::parse("bump(-1,0.4)").unwrap();
        let delta = AtomicMeasure::uniform(vec![c(-1.0, 0.0)], 1.0).unwrap();
        assert_eq!(pair_atomic(&bump, &delta), bump.eval_at(c(-1.0, 0.0)));
        assert!(AtomicMeasure::new(vec![c(0.0, 0.0)], vec![1.0], 2.0).is_err());
    }

    proptest! {
        #[test]
        fn pair_atomic_is_linear(w1 in 0.1..3.0f64, w2 in 0.1..3.0f64, x in -2.0..2.0f64, y in -2.0..2.0f64) {
            let phi = TestFunction::parse("bump(0.2+0.1i,0.5)").unwrap();
            let a = AtomicMeasure::new(vec![c(x, y), c(y, x)], vec![w1, w2], w1 + w2).unwrap();
            let direct = w1 * phi.eval_at(c(x, y)) + w2 * phi.eval_at(c(y, x));
            prop_assert!((pair_atomic(&phi, &a) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn log_plus_integral_closed_form() {
        // ∫_ρ^∞ 2r/(1+r²)² log(r/ρ) dr = ½ log(1 + 1/ρ²)
        for rho in [0.25, 0.1, 0.5, 1.0, 3.0] {
            let got = log_plus_integral(rho);
            let exact = 0.5 * (1.0 + 1.0 / (rho * rho)).ln();
            assert!((got - exact).abs() < 1e-10, "ρ={rho}: {got} vs {exact}");
        }
    }

    #[test]
    fn lift_norm_hand_value() {
        // λ = −2, p = (1, 0): ‖(1, −2)‖ = √5
        assert!((lift_log_norm(2, c(-2.0, 0.0), 0.0, 0.0) - 5f64.sqrt().ln()).abs() < 1e-15);
    }

    #[test]
    fn cbf_estimate_is_monotone_in_samples() {
        let a = c_bf_estimate(2, 8, 400, 1).unwrap();
        let b = c_bf_estimate(2, 16, 400, 1).unwrap();
        assert!(b.value >= a.value);
        assert!(a.value >= 5f64.sqrt().ln() - 0.05);
    }

    #[test]
    fn cbf_estimate_sees_the_tip() {
        // at λ = −2, p ∝ (1, √2) is sent to (1/3, 0), so the sup is at least log 3
        let e = c_bf_estimate(2, 1, 400, 1).unwrap();
        assert!(e.value >= 3f64.ln() - 1e-9, "{e:?}");
    }

    #[test]
    fn c0_ordering() {
        let g = SphereGrid::new(256, 256).unwrap();
        let r = c0_constants(2, &g).unwrap();
        assert!(r.c0_star > PI);
        assert!(r.c0 >= r.c0_star);
        assert!((r.h1_inradius - 0.25).abs() < 1e-10);
        assert!((r.c0_star - PI - 0.5 * 17f64.ln()).abs() < 1e-9);
        assert!(r.nodes_in_h1 > 0);
    }
}
