//! Simultaneous root finding (Aberth–Ehrlich) for polynomials given either
//! as black-box `(p, p')` evaluators or as exact coefficient lists.
//!
//! The critical-orbit polynomials `F_n` are never expanded here: they are
//! evaluated by the recursion `F_{k+1} = F_k^d + λ`, which is well
//! conditioned near the connectedness locus. Far from it the values
//! overflow long before the Newton ratio does, so the evaluators switch to
//! tracking `1/F` and `F'/F` once `|F|` is large.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactpoly::{self, eval_complex_f64, eval_complex_with_derivative_scaled, ExactPoly};
use crate::ntheory::{check_degree, checked_pow};

/// Magnitude at which [`eval_fn_and_derivative`] reports overflow.
pub const OVERFLOW_THRESHOLD: f64 = 1e150;

/// Above this magnitude the iterate evaluators switch to ratio mode.
const RATIO_SWITCH: f64 = 1e60;

/// Tolerances and limits for the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AberthConfig {
    /// A root is frozen once its correction is below this (relative to `max(1, |z|)`).
    pub step_tolerance: f64,
    /// `|p(z)| ≤ residual_tolerance · max(1, |z p'(z)|)` is required of every root.
    pub residual_tolerance: f64,
    /// Minimum distance between distinct simple roots.
    pub separation_tolerance: f64,
    pub max_iterations: usize,
    /// Largest degree accepted by the parameter-space and periodic-point solvers.
    pub root_cap: usize,
    pub polish_steps: usize,
    /// Seed mixed into the initialization jitter.
    pub seed: u64,
}

impl Default for AberthConfig {
    fn default() -> Self {
        Self {
            step_tolerance: 1e-13,
            residual_tolerance: 1e-10,
            separation_tolerance: 1e-8,
            max_iterations: 2000,
            root_cap: 8192,
            polish_steps: 6,
            seed: 1,
        }
    }
}

/// Approximate roots with residuals and claimed multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub multiplicity: Vec<u32>,
    /// Expected count with multiplicity.
    pub degree: usize,
}

#[derive(Serialize, Deserialize)]
struct RootRecord {
    re: f64,
    im: f64,
    residual: f64,
    multiplicity: u32,
}

#[derive(Serialize, Deserialize)]
struct RootSetJson {
    degree: usize,
    roots: Vec<RootRecord>,
}

#[derive(Serialize)]
struct RootCsvRow {
    re: f64,
    im: f64,
    residual: f64,
    mult: u32,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.multiplicity.iter().map(|&m| m as usize).sum()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest pairwise distance between listed roots (`+∞` for fewer than two).
    pub fn min_separation(&self) -> f64 {
        min_separation(&self.roots)
    }

    /// Roots repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .zip(&self.multiplicity)
            .flat_map(|(&z, &m)| std::iter::repeat(z).take(m as usize))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let doc = RootSetJson {
            degree: self.degree,
            roots: self
                .roots
                .iter()
                .zip(&self.residuals)
                .zip(&self.multiplicity)
                .map(|((z, &residual), &multiplicity)| RootRecord {
                    re: z.re,
                    im: z.im,
                    residual,
                    multiplicity,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("finite floats serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: RootSetJson = serde_json::from_str(s)?;
        Ok(Self {
            degree: doc.degree,
            roots: doc.roots.iter().map(|r| Complex64::new(r.re, r.im)).collect(),
            residuals: doc.roots.iter().map(|r| r.residual).collect(),
            multiplicity: doc.roots.iter().map(|r| r.multiplicity).collect(),
        })
    }

    /// CSV with header `re,im,residual,mult`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for ((z, &residual), &mult) in self.roots.iter().zip(&self.residuals).zip(&self.multiplicity) {
            w.serialize(RootCsvRow {
                re: z.re,
                im: z.im,
                residual,
                mult,
            })
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Smallest pairwise distance, by a sweep over points sorted by real part.
pub fn min_separation(points: &[Complex64]) -> f64 {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut best = f64::INFINITY;
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            if sorted[j].re - sorted[i].re >= best {
                break;
            }
            best = best.min((sorted[j] - sorted[i]).norm());
        }
    }
    best
}

/// Largest distance in a greedy nearest-unused-neighbour bijection between
/// two multisets; `None` when the sizes differ.
///
/// When every point of `a` lies within half the minimum separation of a
/// distinct point of `b`, this is the optimal (bottleneck) matching
/// distance.
pub fn matching_distance(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    let mut order: Vec<usize> = (0..b.len()).collect();
    order.sort_by(|&i, &j| b[i].re.total_cmp(&b[j].re));
    let sorted: Vec<Complex64> = order.iter().map(|&i| b[i]).collect();
    for &z in a {
        // nearest unused point, searching outward in real part
        let start = sorted.partition_point(|w| w.re < z.re);
        let mut best = (f64::INFINITY, usize::MAX);
        let mut lo = start;
        let mut hi = start;
        loop {
            let mut progressed = false;
            if hi < sorted.len() && sorted[hi].re - z.re < best.0 {
                let k = order[hi];
                if !used[k] {
                    let dist = (sorted[hi] - z).norm();
                    if dist < best.0 {
                        best = (dist, k);
                    }
                }
                hi += 1;
                progressed = true;
            }
            if lo > 0 && z.re - sorted[lo - 1].re < best.0 {
                lo -= 1;
                let k = order[lo];
                if !used[k] {
                    let dist = (sorted[lo] - z).norm();
                    if dist < best.0 {
                        best = (dist, k);
                    }
                }
                progressed = true;
            }
            if !progressed {
                break;
            }
        }
        if best.1 == usize::MAX {
            return None;
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    Some(worst)
}

/// Largest distance from `conj(z)` to the nearest root, over all roots.
pub fn conjugation_defect(points: &[Complex64]) -> f64 {
    let conj: Vec<Complex64> = points.iter().map(|z| z.conj()).collect();
    matching_distance(points, &conj).unwrap_or(f64::INFINITY)
}

/// Largest distance from `-z` to the nearest root, over all roots.
pub fn negation_defect(points: &[Complex64]) -> f64 {
    let neg: Vec<Complex64> = points.iter().map(|z| -z).collect();
    matching_distance(points, &neg).unwrap_or(f64::INFINITY)
}

/// One Newton evaluation: the ratio `p/p'` and `log|p|`.
#[derive(Debug, Clone, Copy)]
pub struct NewtonData {
    pub ratio: Complex64,
    pub log_abs: f64,
}

/// A polynomial known through its values and derivatives.
pub trait Evaluator: Sync {
    fn degree(&self) -> usize;

    /// `p/p'` and `log|p|` at `z`; must stay finite for large `|p|`.
    fn newton(&self, z: Complex64) -> Result<NewtonData>;

    /// `(|p(z)|, max(1, |z p'(z)|))`: the residual and its local scale.
    fn residual(&self, z: Complex64) -> Result<(f64, f64)>;
}

/// `(F_n(λ), F_n'(λ))` in double precision by the forward recursion
/// `F_{k+1} = F_k^d + λ`, `F'_{k+1} = d F_k^{d-1} F'_k + 1`.
pub fn eval_fn_and_derivative(d: u32, n: u32, lambda: Complex64) -> Result<(Complex64, Complex64)> {
    check_degree(d)?;
    if n == 0 {
        return Err(Error::InvalidArgument("period n must be at least 1".into()));
    }
    let mut f = lambda;
    let mut df = Complex64::new(1.0, 0.0);
    for _ in 1..n {
        let fd1 = f.powu(d - 1);
        df = fd1 * df * d as f64 + 1.0;
        f = fd1 * f + lambda;
        let magnitude = f.norm().max(df.norm());
        if !(magnitude <= OVERFLOW_THRESHOLD) {
            return Err(Error::Overflow { magnitude });
        }
    }
    Ok((f, df))
}

/// Iterates `x_{k+1} = x_k^d + c` with derivative in either the parameter
/// (`x_0 = 0`, variable `c`) or the dynamical variable (`x_0 = z`, fixed `c`).
#[derive(Debug, Clone, Copy)]
enum Orbit {
    Parameter,
    Dynamical { c: Complex64 },
}

/// State after `n` steps: either direct values or, once large, `1/x` and `x'/x`.
struct OrbitState {
    value: Complex64,
    deriv: Complex64,
    inv: Complex64,
    ratio: Complex64,
    log_abs: f64,
    large: bool,
}

fn run_orbit(d: u32, n: u32, kind: Orbit, var: Complex64) -> OrbitState {
    let (c, mut x, mut dx, delta) = match kind {
        Orbit::Parameter => (var, var, Complex64::new(1.0, 0.0), 1.0),
        Orbit::Dynamical { c } => (c, var, Complex64::new(1.0, 0.0), 0.0),
    };
    let steps = match kind {
        Orbit::Parameter => n - 1,
        Orbit::Dynamical { .. } => n,
    };
    let df = d as f64;
    let mut k = 0;
    while k < steps {
        if x.norm() > RATIO_SWITCH || dx.norm() > RATIO_SWITCH * RATIO_SWITCH {
            break;
        }
        let xd1 = x.powu(d - 1);
        dx = xd1 * dx * df + delta;
        x = xd1 * x + c;
        k += 1;
    }
    if k == steps && x.norm() <= RATIO_SWITCH && dx.norm() <= RATIO_SWITCH * RATIO_SWITCH {
        return OrbitState {
            value: x,
            deriv: dx,
            inv: Complex64::new(0.0, 0.0),
            ratio: Complex64::new(0.0, 0.0),
            log_abs: x.norm().ln(),
            large: false,
        };
    }
    let mut inv = safe_inv(x);
    let mut ratio = dx * inv;
    let mut log_abs = x.norm().ln();
    while k < steps {
        let invd = inv.powu(d);
        let denom = c * invd + 1.0;
        ratio = (ratio * df + invd * delta) / denom;
        inv = invd / denom;
        log_abs = df * log_abs + denom.norm().ln();
        k += 1;
    }
    OrbitState {
        value: Complex64::new(f64::INFINITY, 0.0),
        deriv: Complex64::new(f64::INFINITY, 0.0),
        inv,
        ratio,
        log_abs,
        large: true,
    }
}

/// `1/z` without squaring `|z|`, which would overflow for `|z| > 1e154`.
fn safe_inv(z: Complex64) -> Complex64 {
    let r = z.norm();
    (z / r).conj() / r
}

/// Black-box evaluator of `F_n(λ)`.
#[derive(Debug, Clone, Copy)]
pub struct CriticalOrbit {
    pub d: u32,
    pub n: u32,
}

impl Evaluator for CriticalOrbit {
    fn degree(&self) -> usize {
        checked_pow(self.d, self.n - 1).map_or(usize::MAX, |v| v as usize)
    }

    fn newton(&self, z: Complex64) -> Result<NewtonData> {
        let s = run_orbit(self.d, self.n, Orbit::Parameter, z);
        if s.large {
            return Ok(NewtonData {
                ratio: s.ratio.inv(),
                log_abs: s.log_abs,
            });
        }
        Ok(NewtonData {
            ratio: s.value / s.deriv,
            log_abs: s.log_abs,
        })
    }

    fn residual(&self, z: Complex64) -> Result<(f64, f64)> {
        let (f, df) = eval_fn_and_derivative(self.d, self.n, z)?;
        Ok((f.norm(), (z * df).norm().max(1.0)))
    }
}

/// Black-box evaluator of `f_λ^n(z) - z` as a polynomial in `z`.
#[derive(Debug, Clone, Copy)]
pub struct PeriodicPoints {
    pub d: u32,
    pub n: u32,
    pub lambda: Complex64,
}

impl Evaluator for PeriodicPoints {
    fn degree(&self) -> usize {
        checked_pow(self.d, self.n).map_or(usize::MAX, |v| v as usize)
    }

    fn newton(&self, z: Complex64) -> Result<NewtonData> {
        let s = run_orbit(self.d, self.n, Orbit::Dynamical { c: self.lambda }, z);
        if s.large {
            // (x - z)/(x' - 1) = (1 - z/x)/(x'/x - 1/x)
            let num = Complex64::new(1.0, 0.0) - z * s.inv;
            return Ok(NewtonData {
                ratio: num / (s.ratio - s.inv),
                log_abs: s.log_abs + num.norm().ln(),
            });
        }
        let p = s.value - z;
        Ok(NewtonData {
            ratio: p / (s.deriv - 1.0),
            log_abs: p.norm().ln(),
        })
    }

    fn residual(&self, z: Complex64) -> Result<(f64, f64)> {
        let s = run_orbit(self.d, self.n, Orbit::Dynamical { c: self.lambda }, z);
        if s.large {
            return Err(Error::Overflow {
                magnitude: s.log_abs.exp(),
            });
        }
        Ok(((s.value - z).norm(), (z * (s.deriv - 1.0)).norm().max(1.0)))
    }
}

/// Evaluator for an expanded integer polynomial.
///
/// Double-precision Horner is used when its running error bound certifies
/// the value; otherwise fixed-point big-integer Horner takes over, with a
/// shared exponent so that the Newton ratio stays finite where `p(z)`
/// leaves double range.
#[derive(Debug, Clone)]
pub struct CoefficientPoly {
    poly: ExactPoly,
    derivative: ExactPoly,
}

impl CoefficientPoly {
    pub fn new(poly: ExactPoly) -> Self {
        let derivative = poly.derivative();
        Self { poly, derivative }
    }

    /// `(p, p', e)` with the true values `p · 2^e` and `p' · 2^e`.
    fn values(&self, z: Complex64) -> (Complex64, Complex64, i32) {
        let (p, ep) = eval_complex_f64(&self.poly, z);
        let (dp, edp) = eval_complex_f64(&self.derivative, z);
        if ep.is_finite() && edp.is_finite() && ep <= 1e-8 * p.norm() && edp <= 1e-8 * dp.norm() {
            return (p, dp, 0);
        }
        eval_complex_with_derivative_scaled(&self.poly, z)
    }
}

impl Evaluator for CoefficientPoly {
    fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    fn newton(&self, z: Complex64) -> Result<NewtonData> {
        let (p, dp, e) = self.values(z);
        // complex division squares |p'|, so divide by its modulus first
        let m = dp.norm();
        Ok(NewtonData {
            ratio: (p / m) / (dp / m),
            log_abs: p.norm().ln() + e as f64 * std::f64::consts::LN_2,
        })
    }

    fn residual(&self, z: Complex64) -> Result<(f64, f64)> {
        let (p, dp, e) = self.values(z);
        let (f1, f2) = (2f64.powi(e / 2), 2f64.powi(e - e / 2));
        Ok((p.norm() * f1 * f2, ((z * dp).norm() * f1 * f2).max(1.0)))
    }
}

/// Aberth–Ehrlich iteration from the given starting points, followed by
/// Newton polishing.
///
/// Updates are applied in place (Gauss–Seidel order) and a root whose
/// correction falls below the step tolerance is frozen; frozen roots still
/// repel the others.
pub fn aberth_solve<E: Evaluator + ?Sized>(eval: &E, init: Vec<Complex64>, cfg: &AberthConfig) -> Result<RootSet> {
    let degree = eval.degree();
    if init.len() != degree {
        return Err(Error::InvalidArgument(format!(
            "{} starting points for a degree-{degree} polynomial",
            init.len()
        )));
    }
    if degree == 0 {
        return Ok(RootSet {
            roots: Vec::new(),
            residuals: Vec::new(),
            multiplicity: Vec::new(),
            degree,
        });
    }
    if min_separation(&init) == 0.0 {
        return Err(Error::InvalidArgument("starting points must be pairwise distinct".into()));
    }
    let mut re: Vec<f64> = init.iter().map(|z| z.re).collect();
    let mut im: Vec<f64> = init.iter().map(|z| z.im).collect();
    let mut active: Vec<usize> = (0..degree).collect();
    let mut worst = f64::INFINITY;
    let mut iterations = 0;
    while !active.is_empty() {
        if iterations == cfg.max_iterations {
            return Err(Error::NoConvergence {
                iterations,
                worst_correction: worst,
            });
        }
        iterations += 1;
        worst = 0.0;
        let mut still = Vec::with_capacity(active.len());
        for &i in &active {
            let z = Complex64::new(re[i], im[i]);
            let nd = eval.newton(z)?;
            let (mut sr, mut si) = (0.0f64, 0.0f64);
            for j in 0..degree {
                if j == i {
                    continue;
                }
                let dr = re[i] - re[j];
                let di = im[i] - im[j];
                let q = 1.0 / (dr * dr + di * di);
                sr += dr * q;
                si -= di * q;
            }
            let s = Complex64::new(sr, si);
            let step = if nd.ratio.is_finite() {
                if nd.ratio == Complex64::new(0.0, 0.0) {
                    nd.ratio
                } else {
                    nd.ratio / (Complex64::new(1.0, 0.0) - nd.ratio * s)
                }
            } else {
                -s.inv()
            };
            if !step.is_finite() {
                return Err(Error::NoConvergence {
                    iterations,
                    worst_correction: f64::INFINITY,
                });
            }
            let nz = z - step;
            re[i] = nz.re;
            im[i] = nz.im;
            let size = step.norm() / nz.norm().max(1.0);
            worst = worst.max(size);
            if size > cfg.step_tolerance {
                still.push(i);
            }
        }
        active = still;
    }
    let mut roots: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
    let mut residuals = Vec::with_capacity(degree);
    for z in roots.iter_mut() {
        polish(eval, z, cfg.polish_steps)?;
        let (res, scale) = eval.residual(*z)?;
        if !(res <= cfg.residual_tolerance * scale) {
            return Err(Error::NoConvergence {
                iterations,
                worst_correction: res / scale,
            });
        }
        residuals.push(res);
    }
    Ok(RootSet {
        multiplicity: vec![1; roots.len()],
        roots,
        residuals,
        degree,
    })
}

fn polish<E: Evaluator + ?Sized>(eval: &E, z: &mut Complex64, steps: usize) -> Result<()> {
    let mut last = f64::INFINITY;
    for _ in 0..steps {
        let nd = eval.newton(*z)?;
        let size = nd.ratio.norm();
        if !size.is_finite() || size >= last || size == 0.0 {
            break;
        }
        *z -= nd.ratio;
        last = size;
    }
    Ok(())
}

/// Seeded generator for the jitter of a given problem.
pub(crate) fn rng_for(seed: u64, tag: &[u64]) -> ChaCha8Rng {
    let mut s = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &t in tag {
        s = s.rotate_left(17) ^ t.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    }
    ChaCha8Rng::seed_from_u64(s)
}

/// `count` points on the circle of the given radius, equally spaced in
/// angle with a random offset and small angular jitter.
pub fn jittered_circle(count: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let offset: f64 = rng.gen::<f64>() * TAU;
    (0..count)
        .map(|k| {
            let jitter: f64 = (rng.gen::<f64>() - 0.5) * 0.25;
            let theta = offset + (k as f64 + jitter) * TAU / count as f64;
            Complex64::from_polar(radius, theta)
        })
        .collect()
}

/// Moves points inward along the gradient of `log|p|` until `log|p|`
/// reaches `target`.
///
/// Each step is a Newton step on `log p` with the argument of `p` held
/// fixed, so points follow gradient lines and keep their angular order.
/// Starting Aberth from a low equipotential instead of a far circle cuts
/// the iteration count from about `degree/2` to a few dozen.
pub fn push_to_equipotential<E: Evaluator + ?Sized>(eval: &E, points: &mut [Complex64], target: f64) -> Result<()> {
    for z in points.iter_mut() {
        let mut nd = eval.newton(*z)?;
        for _ in 0..200 {
            if nd.log_abs <= target + 0.25 {
                break;
            }
            let goal = target.max(0.5 * nd.log_abs);
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let step = nd.ratio * ((nd.log_abs - goal) * scale);
                let cand = *z - step;
                let next = eval.newton(cand)?;
                if next.log_abs.is_finite() && next.log_abs >= target - 0.5 && next.log_abs < nd.log_abs {
                    *z = cand;
                    nd = next;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted {
                break;
            }
        }
    }
    Ok(())
}

/// All `d^{n-1}` zeros of `F_n`, by black-box Aberth.
///
/// Starting points sit on the circle of radius `1.3 · 2^{1/(d-1)}` (outside
/// the connectedness locus) with jitter seeded by `(seed, d, n)`, and are
/// pushed down to a low equipotential first.
pub fn superattracting_parameters(d: u32, n: u32, cfg: &AberthConfig) -> Result<RootSet> {
    check_degree(d)?;
    if n == 0 {
        return Err(Error::InvalidArgument("period n must be at least 1".into()));
    }
    let degree = checked_pow(d, n - 1).unwrap_or(u128::MAX);
    if degree > cfg.root_cap as u128 {
        return Err(Error::CapExceeded {
            what: "d^(n-1)",
            value: degree,
            cap: cfg.root_cap as u128,
        });
    }
    let eval = CriticalOrbit { d, n };
    let degree = degree as usize;
    if degree == 1 {
        return aberth_solve(&eval, vec![Complex64::new(0.5, 0.25)], cfg);
    }
    let radius = 1.3 * 2f64.powf(1.0 / (d as f64 - 1.0));
    let mut rng = rng_for(cfg.seed, &[d as u64, n as u64]);
    let mut init = jittered_circle(degree, radius, &mut rng);
    push_to_equipotential(&eval, &mut init, 1.0)?;
    aberth_solve(&eval, init, cfg)
}

/// Initial radii from the upper convex hull of `(k, log|a_k|)`.
fn newton_polygon_init(p: &ExactPoly, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let logs: Vec<(usize, f64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.bits() > 0)
        .map(|(k, c)| (k, log_abs_big(c)))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &logs {
        while hull.len() >= 2 {
            let (k1, l1) = hull[hull.len() - 2];
            let (k2, l2) = hull[hull.len() - 1];
            // drop the middle point if it lies on or below the chord
            if (l2 - l1) * (pt.0 - k1) as f64 <= (pt.1 - l1) * (k2 - k1) as f64 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::with_capacity(p.degree().unwrap_or(0));
    let low = logs.first().map_or(0, |&(k, _)| k);
    // zeros at the origin, if any, get tiny starting radii
    for j in 0..low {
        out.push(Complex64::from_polar(1e-3, TAU * (j as f64 + 0.3) / low.max(1) as f64));
    }
    for w in hull.windows(2) {
        let (k1, l1) = w[0];
        let (k2, l2) = w[1];
        let count = k2 - k1;
        let radius = ((l1 - l2) / count as f64).exp();
        out.extend(jittered_circle(count, radius, rng));
    }
    out
}

fn log_abs_big(c: &num_bigint::BigInt) -> f64 {
    let bits = c.bits();
    let shift = bits.saturating_sub(60);
    let head = num_traits::ToPrimitive::to_f64(&(c >> shift as usize)).unwrap_or(0.0).abs();
    head.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Roots of an integer polynomial from its coefficients.
///
/// The polynomial is split into squarefree factors (Yun), each factor is
/// solved by Aberth from Newton-polygon starting radii, and every root is
/// tagged with the multiplicity of its factor.
pub fn roots_of_exactpoly(p: &ExactPoly, cfg: &AberthConfig) -> Result<RootSet> {
    let Some(degree) = p.degree() else {
        return Err(Error::InvalidArgument("the zero polynomial has no root set".into()));
    };
    if degree == 0 {
        return Err(Error::InvalidArgument("a constant polynomial has no roots".into()));
    }
    let mut out = RootSet {
        roots: Vec::new(),
        residuals: Vec::new(),
        multiplicity: Vec::new(),
        degree,
    };
    for (mult, factor) in squarefree_factors(p)?.into_iter().enumerate() {
        if factor.degree().unwrap_or(0) == 0 {
            continue;
        }
        let mut rng = rng_for(cfg.seed, &[factor.degree().unwrap() as u64, mult as u64]);
        let eval = CoefficientPoly::new(factor.clone());
        let init = newton_polygon_init(&factor, &mut rng);
        let set = aberth_solve(&eval, init, cfg)?;
        out.roots.extend(set.roots);
        out.residuals.extend(set.residuals);
        out.multiplicity
            .extend(std::iter::repeat(mult as u32 + 1).take(factor.degree().unwrap()));
    }
    Ok(out)
}

/// Yun's squarefree decomposition: `p = c · Π_i q_i^{i+1}` with pairwise
/// coprime squarefree `q_i` (entry `i` of the result).
pub fn squarefree_factors(p: &ExactPoly) -> Result<Vec<ExactPoly>> {
    let p = p.primitive_part();
    let dp = p.derivative();
    let a0 = exactpoly::gcd(&p, &dp).primitive_part();
    if a0.degree() == Some(0) {
        return Ok(vec![p]);
    }
    let mut b = p.exact_div(&a0)?;
    let c = dp.exact_div(&a0)?;
    let mut dd = &c - &b.derivative();
    let mut out = Vec::new();
    while b.degree().unwrap_or(0) > 0 {
        let a = exactpoly::gcd(&b, &dd).primitive_part();
        let next_b = b.exact_div(&a)?;
        let cc = dd.exact_div(&a)?;
        dd = &cc - &next_b.derivative();
        out.push(a);
        b = next_b;
    }
    Ok(out)
}
