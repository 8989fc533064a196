//! Dynamics of `f_λ(z) = z^d + λ` on the Riemann sphere.
//!
//! Chordal geometry, dynamical and parameter Green functions, the bisection
//! sampler for the bifurcation locus, classification of periodic points by
//! exact and formally exact period, and the multiplier-polynomial
//! evaluations `log|P*_n(λ, w)|` computed from periodic points.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::measures::SphereGrid;
use crate::ntheory::{check_degree, checked_pow, divisors, mobius, nu_usize};
use crate::rootfind::{
    aberth_solve, jittered_circle, min_separation, push_to_equipotential, rng_for, AberthConfig, PeriodicPoints,
    RootSet,
};
use crate::{Error, Result};

/// Iterates beyond this modulus are treated as escaped for good: the
/// remaining tail of the Green series is below `|λ| / BIG^d`.
const BIG: f64 = 1e30;

/// Default iteration budget before an orbit is declared bounded.
pub const DEFAULT_ITERATIONS: usize = 2000;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

impl ExtComplex {
    /// `1/z` with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(self) -> Self {
        match self {
            ExtComplex::Infinity => ExtComplex::Finite(Complex64::new(0.0, 0.0)),
            ExtComplex::Finite(z) if z == Complex64::new(0.0, 0.0) => ExtComplex::Infinity,
            ExtComplex::Finite(z) => ExtComplex::Finite(z.inv()),
        }
    }
}

/// The chordal distance `[z, w]`, normalized so that `[z, ∞] = 1/√(1+|z|²)`.
pub fn chordal(z: ExtComplex, w: ExtComplex) -> f64 {
    match (z, w) {
        (ExtComplex::Infinity, ExtComplex::Infinity) => 0.0,
        (ExtComplex::Finite(a), ExtComplex::Infinity) | (ExtComplex::Infinity, ExtComplex::Finite(a)) => {
            chordal_to_infinity(a)
        }
        (ExtComplex::Finite(a), ExtComplex::Finite(b)) => {
            // written with hypot so that large moduli do not overflow
            let na = 1f64.hypot(a.norm());
            let nb = 1f64.hypot(b.norm());
            ((a - b).norm() / na / nb).min(1.0)
        }
    }
}

/// `[z, ∞] = 1/√(1+|z|²)`.
pub fn chordal_to_infinity(z: Complex64) -> f64 {
    1.0 / 1f64.hypot(z.norm())
}

/// `−log[z, ∞] = ½ log(1+|z|²)`, accurate for both small and huge `|z|`.
pub fn neg_log_chordal_infinity(z: Complex64) -> f64 {
    let r = z.norm();
    if r > 1.0 {
        r.ln() + 0.5 * (1.0 / (r * r)).ln_1p()
    } else {
        0.5 * (r * r).ln_1p()
    }
}

/// Escape radius for `f_λ`: outside it every orbit increases monotonically to ∞.
pub fn escape_radius(d: u32, lambda: Complex64) -> f64 {
    4f64.max(2f64.powf(1.0 / (d as f64 - 1.0)) + lambda.norm() + 1.0)
}

/// The chordal derivative `(f_λ^n)^#(z) = |(f_λ^n)'(z)| [f_λ^n(z),∞]² / [z,∞]²`.
///
/// At `z = ∞` the local degree is `d^n > 1`, so the value there is 0.
pub fn chordal_derivative(d: u32, lambda: Complex64, n: u32, z: ExtComplex) -> Result<f64> {
    check_degree(d)?;
    let ExtComplex::Finite(z0) = z else {
        return Ok(0.0);
    };
    let mut x = z0;
    let mut dx = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        let xd1 = x.powu(d - 1);
        dx = dx * xd1 * d as f64;
        x = xd1 * x + lambda;
        let magnitude = x.norm().max(dx.norm());
        if !(magnitude <= crate::rootfind::OVERFLOW_THRESHOLD) {
            return Err(Error::Overflow { magnitude });
        }
    }
    let ratio = (1.0 + z0.norm_sqr()) / (1.0 + x.norm_sqr());
    Ok(dx.norm() * ratio)
}

/// Dynamical Green function `g_{f_λ}(z) = lim −log[f_λ^N(z), ∞] / d^N`.
///
/// The orbit is followed until it passes `escape_radius` and then until it
/// passes `1e30`, where the tail of the series is negligible. An orbit that
/// stays within `escape_radius` for `n_max` steps is declared bounded and
/// gets the value 0.
pub fn green_dynamical(d: u32, lambda: Complex64, z: Complex64, n_max: usize, escape_radius: f64) -> f64 {
    let df = d as f64;
    let mut x = z;
    let mut scale = 1.0;
    let mut k = 0;
    loop {
        let r = x.norm();
        if r > BIG || !r.is_finite() {
            break;
        }
        if (r <= escape_radius && k >= n_max) || k > n_max + 10_000 {
            return 0.0;
        }
        x = x.powu(d) + lambda;
        scale /= df;
        k += 1;
    }
    neg_log_chordal_infinity(x) * scale
}

/// Green function of the connectedness locus, `g(λ) = d · g_{f_λ}(0) = g_{f_λ}(λ)`.
pub fn green_parameter(d: u32, lambda: Complex64, n_max: usize, escape_radius: f64) -> f64 {
    green_dynamical(d, lambda, lambda, n_max, escape_radius)
}

/// `h(λ) = g(λ) + log[λ, ∞]`, continuous on the sphere with `h(∞) = 0`.
pub fn h_parameter(d: u32, lambda: ExtComplex, n_max: usize) -> f64 {
    match lambda {
        ExtComplex::Infinity => 0.0,
        ExtComplex::Finite(l) => {
            green_parameter(d, l, n_max, escape_radius(d, l)) - neg_log_chordal_infinity(l)
        }
    }
}

/// Lyapunov exponent `L(f_λ) = log d + (d−1) g(λ)/d`.
pub fn lyapunov(d: u32, lambda: Complex64) -> f64 {
    let g = green_parameter(d, lambda, DEFAULT_ITERATIONS, escape_radius(d, lambda));
    (d as f64).ln() + (d as f64 - 1.0) * g / d as f64
}

/// `log|F_m(λ)| − d^{m−1} g(λ)` for `m = 1..=n`.
///
/// Both terms grow like `d^{m−1} log|λ|`; the difference is formed from the
/// orbit without ever evaluating the large terms separately. Zeros of `F_m`
/// give `−∞`.
pub fn critical_defects(d: u32, lambda: Complex64, n: usize, n_max: usize) -> Vec<f64> {
    let df = d as f64;
    let radius = escape_radius(d, lambda);
    let mut logs = Vec::with_capacity(n);
    let mut x = lambda;
    let mut k = 1;
    let mut outside = false;
    let (big_k, log_big) = loop {
        let r = x.norm();
        if k <= n {
            logs.push(r.ln());
        }
        if r > BIG || !r.is_finite() {
            break (k, r.ln());
        }
        outside |= r > radius;
        if k >= n && k >= n_max && !outside {
            // bounded orbit: g = 0
            return logs;
        }
        x = x.powu(d) + lambda;
        k += 1;
    };
    // d^{K-1} g = log|F_K| up to a tail below |λ| / 1e30^d
    (1..=n)
        .map(|m| if m < big_k { logs[m - 1] - log_big / df.powi((big_k - m) as i32) } else { 0.0 })
        .collect()
}

/// `λ` has a bounded critical orbit for `n_max` steps.
fn critical_orbit_bounded(d: u32, lambda: Complex64, n_max: usize) -> bool {
    let radius = escape_radius(d, lambda);
    let mut x = lambda;
    for _ in 0..n_max {
        if x.norm() > radius {
            return false;
        }
        x = x.powu(d) + lambda;
    }
    x.norm() <= radius
}

/// Iteration budget of the bounded-orbit test used by [`boundary_sample`].
const BOUNDARY_ITERATIONS: usize = 4000;

/// `count` points of the bifurcation locus `∂M`, one per random direction.
///
/// Each point is found by bisection on a radial segment from `0` (in `M`) to
/// a point beyond the escape radius, down to a gap below `1e-13`. The
/// returned point is the bounded end of the final bracket.
pub fn boundary_sample(d: u32, count: usize, seed: u64) -> Result<Vec<Complex64>> {
    Ok(boundary_brackets(d, count, seed)?.into_iter().map(|(inside, _)| inside).collect())
}

/// The final brackets of [`boundary_sample`]: `(bounded, escaping)` pairs on
/// the same ray, less than `1e-13` apart.
pub fn boundary_brackets(d: u32, count: usize, seed: u64) -> Result<Vec<(Complex64, Complex64)>> {
    check_degree(d)?;
    if count == 0 {
        return Err(Error::InvalidArgument("boundary_sample needs count ≥ 1".into()));
    }
    let outer = 2f64.powf(1.0 / (d as f64 - 1.0)) + 1.0;
    let mut rng = rng_for(seed, &[d as u64, 0xb0]);
    let mut out = Vec::with_capacity(count);
    let mut failures = 0;
    while out.len() < count {
        let theta: f64 = rng.gen::<f64>() * TAU;
        let dir = Complex64::from_polar(1.0, theta);
        match bisect_ray(d, dir, outer) {
            Ok(pair) => out.push(pair),
            Err(e) => {
                failures += 1;
                if failures > 10 * count {
                    return Err(e);
                }
            }
        }
    }
    Ok(out)
}

/// Boundary points on the `2(d−1)` rays `arg λ = kπ/(d−1)`, the symmetry
/// axes of `M`; for `d = 2` these are the tip `−2` and the cusp side `1/4`.
pub fn boundary_axis_points(d: u32) -> Result<Vec<Complex64>> {
    check_degree(d)?;
    let outer = 2f64.powf(1.0 / (d as f64 - 1.0)) + 1.0;
    let k = 2 * (d as usize - 1);
    (0..k)
        .map(|j| {
            let dir = Complex64::from_polar(1.0, PI * j as f64 / (d as f64 - 1.0));
            // exact axes: a 1e-16 imaginary part escapes on the real chaotic parameters
            let snap = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
            let dir = Complex64::new(snap(dir.re), snap(dir.im));
            bisect_ray(d, dir, outer).map(|(inside, _)| inside)
        })
        .collect()
}

fn bisect_ray(d: u32, dir: Complex64, outer: f64) -> Result<(Complex64, Complex64)> {
    let (mut lo, mut hi) = (0.0, outer);
    if !critical_orbit_bounded(d, dir * lo, BOUNDARY_ITERATIONS)
        || critical_orbit_bounded(d, dir * hi, BOUNDARY_ITERATIONS)
    {
        return Err(Error::BisectionFailed(format!("no sign change along direction {dir}")));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if critical_orbit_bounded(d, dir * mid, BOUNDARY_ITERATIONS) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((dir * lo, dir * hi))
}

/// Periodic points of period dividing `n`, grouped into cycles.
#[derive(Debug, Clone)]
pub struct OrbitClassification {
    pub d: u32,
    pub n: u32,
    pub lambda: Complex64,
    /// All solutions of `f_λ^n(z) = z`.
    pub points: RootSet,
    /// Indices into `points`, each listed in orbit order.
    pub cycles: Vec<Vec<usize>>,
    pub exact_period: Vec<u32>,
    /// `(f_λ^m)'` along each cycle, `m` its exact period.
    pub multiplier: Vec<Complex64>,
    /// Membership of each point in `Fix**(λ, n)`.
    pub formally_exact_n: Vec<bool>,
    /// Cycle index of each point.
    pub cycle_of: Vec<usize>,
}

impl OrbitClassification {
    /// `(f_λ^n)'(z)` at point `i`.
    pub fn point_multiplier(&self, i: usize) -> Complex64 {
        let c = self.cycle_of[i];
        let k = self.n / self.exact_period[c];
        self.multiplier[c].powu(k)
    }

    /// Number of points of `Fix**(λ, n)` with multiplicity.
    pub fn formally_exact_count(&self) -> usize {
        self.formally_exact_n
            .iter()
            .zip(&self.points.multiplicity)
            .filter(|(f, _)| **f)
            .map(|(_, &m)| m as usize)
            .sum()
    }

    /// `(f_λ^n)'(z)` for every `z ∈ Fix**(λ, n)`, repeated by multiplicity.
    pub fn fix_star_multipliers(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for i in 0..self.points.len() {
            if self.formally_exact_n[i] {
                for _ in 0..self.points.multiplicity[i] {
                    out.push(self.point_multiplier(i));
                }
            }
        }
        out
    }
}

/// Attracting cycles closer than this to a primitive root of unity are
/// refused instead of guessed, as are orbit matches this ambiguous.
const AMBIGUITY_FACTOR: f64 = 10.0;

/// Solves `f_λ^n(z) = z` by Aberth and partitions the solutions into cycles.
///
/// Cycles are found by mapping each root forward and matching the image to
/// the nearest root. A point of exact period `m < n` belongs to
/// `Fix**(λ, n)` when its cycle multiplier is within `tolerance` of a
/// primitive `(n/m)`-th root of unity. Parameters where a match or that
/// test is ambiguous, or where the solver cannot separate the roots, are
/// reported as [`Error::DegenerateParameter`].
pub fn classify_periodic(d: u32, lambda: Complex64, n: u32, tolerance: f64) -> Result<OrbitClassification> {
    classify_periodic_with(d, lambda, n, tolerance, &AberthConfig::default())
}

pub fn classify_periodic_with(
    d: u32,
    lambda: Complex64,
    n: u32,
    tolerance: f64,
    cfg: &AberthConfig,
) -> Result<OrbitClassification> {
    check_degree(d)?;
    if n == 0 {
        return Err(Error::InvalidArgument("period n must be at least 1".into()));
    }
    let degree = checked_pow(d, n).unwrap_or(u128::MAX);
    if degree > cfg.root_cap as u128 {
        return Err(Error::CapExceeded {
            what: "d^n",
            value: degree,
            cap: cfg.root_cap as u128,
        });
    }
    let degree = degree as usize;
    let eval = PeriodicPoints { d, n, lambda };
    let bound = 2f64.powf(1.0 / (d as f64 - 1.0)).max((2.0 * lambda.norm()).powf(1.0 / d as f64));
    let mut rng = rng_for(cfg.seed, &[d as u64, n as u64, lambda.re.to_bits(), lambda.im.to_bits()]);
    let mut init = jittered_circle(degree, 1.3 * bound + 0.1, &mut rng);
    push_to_equipotential(&eval, &mut init, 1.0)?;
    let points = match aberth_solve(&eval, init, cfg) {
        Ok(p) => p,
        Err(Error::NoConvergence { .. }) => {
            return Err(Error::DegenerateParameter(format!(
                "periodic points of period {n} at λ = {lambda} did not separate"
            )))
        }
        Err(e) => return Err(e),
    };
    let roots = &points.roots;
    if min_separation(roots) < AMBIGUITY_FACTOR * tolerance {
        return Err(Error::DegenerateParameter(format!(
            "periodic points of period {n} at λ = {lambda} are closer than the tolerance band"
        )));
    }

    let image: Vec<usize> = roots
        .iter()
        .map(|&z| match_root(roots, z.powu(d) + lambda, tolerance))
        .collect::<Result<_>>()?;

    let mut cycle_of = vec![usize::MAX; roots.len()];
    let mut cycles = Vec::new();
    let mut exact_period = Vec::new();
    let mut multiplier = Vec::new();
    for start in 0..roots.len() {
        if cycle_of[start] != usize::MAX {
            continue;
        }
        let mut cycle = vec![start];
        let mut j = image[start];
        while j != start {
            if cycle_of[j] != usize::MAX || cycle.len() > n as usize {
                return Err(Error::DegenerateParameter(format!(
                    "orbit matching at λ = {lambda} is not a permutation"
                )));
            }
            cycle.push(j);
            j = image[j];
        }
        let m = cycle.len() as u32;
        if n % m != 0 {
            return Err(Error::DegenerateParameter(format!(
                "cycle of length {m} does not divide {n} at λ = {lambda}"
            )));
        }
        let c = cycles.len();
        let mut mu = Complex64::new(1.0, 0.0);
        for &i in &cycle {
            cycle_of[i] = c;
            mu *= roots[i].powu(d - 1) * d as f64;
        }
        cycles.push(cycle);
        exact_period.push(m);
        multiplier.push(mu);
    }

    let mut formally_exact_n = vec![false; roots.len()];
    for (c, cycle) in cycles.iter().enumerate() {
        let m = exact_period[c];
        let flag = if m == n {
            true
        } else {
            let dist = distance_to_primitive_root(multiplier[c], n / m);
            if dist > tolerance && dist <= AMBIGUITY_FACTOR * tolerance {
                return Err(Error::DegenerateParameter(format!(
                    "multiplier of a {m}-cycle at λ = {lambda} is ambiguously close to a root of unity"
                )));
            }
            dist <= tolerance
        };
        for &i in cycle {
            formally_exact_n[i] = flag;
        }
    }

    let out = OrbitClassification {
        d,
        n,
        lambda,
        points,
        cycles,
        exact_period,
        multiplier,
        formally_exact_n,
        cycle_of,
    };
    let expected = nu_usize(d, n as u64)?;
    if out.formally_exact_count() != expected {
        return Err(Error::DegenerateParameter(format!(
            "{} formally exact points of period {n} at λ = {lambda}, expected {expected}",
            out.formally_exact_count()
        )));
    }
    Ok(out)
}

fn match_root(roots: &[Complex64], w: Complex64, tolerance: f64) -> Result<usize> {
    let mut best = (f64::INFINITY, usize::MAX);
    let mut second = f64::INFINITY;
    for (j, r) in roots.iter().enumerate() {
        let dist = (r - w).norm();
        if dist < best.0 {
            second = best.0;
            best = (dist, j);
        } else if dist < second {
            second = dist;
        }
    }
    let scale = w.norm().max(1.0);
    if best.0 > tolerance * scale || second <= AMBIGUITY_FACTOR * tolerance * scale {
        return Err(Error::DegenerateParameter(format!(
            "image {w} matches no periodic point unambiguously (nearest {:.3e}, next {:.3e})",
            best.0, second
        )));
    }
    Ok(best.1)
}

fn distance_to_primitive_root(mu: Complex64, k: u32) -> f64 {
    (1..=k)
        .filter(|&j| num_integer::gcd(j, k) == 1)
        .map(|j| (mu - Complex64::from_polar(1.0, TAU * j as f64 / k as f64)).norm())
        .fold(f64::INFINITY, f64::min)
}

/// `log|P*_n(λ, w)| = (1/n) Σ_{z ∈ Fix**} log|(f_λ^n)'(z) − w| − ν(n) log d`.
pub fn log_pstar(d: u32, lambda: Complex64, n: u32, w: Complex64) -> Result<f64> {
    let cls = classify_periodic(d, lambda, n, 1e-6)?;
    Ok(log_pstar_from(&cls, w))
}

/// [`log_pstar`] on an existing classification.
pub fn log_pstar_from(cls: &OrbitClassification, w: Complex64) -> f64 {
    let sum: f64 = cls.fix_star_multipliers().iter().map(|m| (m - w).norm().ln()).sum();
    sum / cls.n as f64 - cls.formally_exact_count() as f64 * (cls.d as f64).ln()
}

/// Circle average `∫ log|P*_n(λ, r e^{iθ})| dθ/2π`, in closed form
/// `(1/n) Σ_{z ∈ Fix**} log max{r, |(f_λ^n)'(z)|} − ν(n) log d`.
pub fn averaged_log_pstar(d: u32, lambda: Complex64, n: u32, r: f64) -> Result<f64> {
    check_radius(r)?;
    let cls = classify_periodic(d, lambda, n, 1e-6)?;
    Ok(averaged_log_pstar_from(&cls, r))
}

/// [`averaged_log_pstar`] on an existing classification.
pub fn averaged_log_pstar_from(cls: &OrbitClassification, r: f64) -> f64 {
    let sum: f64 = cls.fix_star_multipliers().iter().map(|m| m.norm().max(r).ln()).sum();
    sum / cls.n as f64 - cls.formally_exact_count() as f64 * (cls.d as f64).ln()
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidArgument(format!("radius r = {r} must lie in (0, 1]")));
    }
    Ok(())
}

/// The attracting cycle of `f_λ` if it has exact period `n`: its multiplier.
///
/// The critical orbit is iterated into the immediate basin and the cycle
/// point is refined by Newton on `f^n(z) − z`.
pub fn attracting_cycle_multiplier(d: u32, lambda: Complex64, n: u32) -> Option<Complex64> {
    let radius = escape_radius(d, lambda);
    let mut z = lambda;
    for _ in 0..(200 + 40 * n as usize) {
        if z.norm() > radius {
            return None;
        }
        z = z.powu(d) + lambda;
    }
    for _ in 0..60 {
        let mut x = z;
        let mut dx = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            let xd1 = x.powu(d - 1);
            dx = dx * xd1 * d as f64;
            x = xd1 * x + lambda;
        }
        let step = (x - z) / (dx - 1.0);
        if !step.norm().is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    // exact period and multiplier along the cycle
    let mut x = z;
    let mut mu = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        mu *= x.powu(d - 1) * d as f64;
        x = x.powu(d) + lambda;
        if k < n && (x - z).norm() <= 1e-9 * z.norm().max(1.0) {
            return None;
        }
    }
    if (x - z).norm() > 1e-8 * z.norm().max(1.0) || !(mu.norm() < 1.0) {
        return None;
    }
    Some(mu)
}

/// `∫ log|P*_n(λ, r e^{iθ})| dθ/2π − (d−1)ν(n) g(λ)/d`, from the critical orbit.
///
/// Uses `log|P*_n(λ,0)| = (d−1) Σ_{m|n} μ(n/m) log|F_m(λ)|` and the fact
/// that only an attracting cycle of exact period `n` with multiplier inside
/// `D(r)` changes the circle average.
pub fn averaged_pstar_defect(d: u32, lambda: Complex64, n: u32, r: f64, n_max: usize) -> f64 {
    let defects = critical_defects(d, lambda, n as usize, n_max);
    let mut sum = 0.0;
    for m in divisors(n as u64).unwrap_or_default() {
        let mu = mobius(n as u64 / m).unwrap_or(0);
        if mu != 0 {
            sum += mu as f64 * defects[m as usize - 1];
        }
    }
    let base = (d as f64 - 1.0) * sum;
    let correction = if defects.iter().all(|v| v.is_finite()) && green_is_zero(d, lambda, n_max) {
        attracting_cycle_multiplier(d, lambda, n).map_or(0.0, |mu| (r / mu.norm()).ln().max(0.0))
    } else {
        0.0
    };
    base + correction
}

fn green_is_zero(d: u32, lambda: Complex64, n_max: usize) -> bool {
    critical_orbit_bounded(d, lambda, n_max)
}

/// [`averaged_log_pstar`] by the critical-orbit route of [`averaged_pstar_defect`].
pub fn averaged_log_pstar_fast(d: u32, lambda: Complex64, n: u32, r: f64) -> Result<f64> {
    check_degree(d)?;
    check_radius(r)?;
    let g = green_parameter(d, lambda, DEFAULT_ITERATIONS, escape_radius(d, lambda));
    let big_d = (d as f64 - 1.0) * nu_usize(d, n as u64)? as f64 / d as f64;
    Ok(averaged_pstar_defect(d, lambda, n, r, DEFAULT_ITERATIONS) + big_d * g)
}

/// The fixed points of `f_λ`, i.e. the roots of `z^d − z + λ`.
pub fn fixed_points(d: u32, lambda: Complex64) -> Result<Vec<Complex64>> {
    check_degree(d)?;
    // Aberth with fixed starting points; degree d is small
    let radius = 1.3 * (2f64.powf(1.0 / (d as f64 - 1.0)) + lambda.norm().powf(1.0 / d as f64));
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, 0.4 + TAU * k as f64 / d as f64))
        .collect();
    let p = |x: Complex64| (x.powu(d) - x + lambda, x.powu(d - 1) * d as f64 - 1.0);
    for _ in 0..500 {
        let mut worst: f64 = 0.0;
        for i in 0..z.len() {
            let (v, dv) = p(z[i]);
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = v / dv;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..z.len() {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.norm().is_finite() {
                z[i] -= step;
                worst = worst.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if worst < 1e-15 {
            return Ok(z);
        }
    }
    // near a parabolic parameter convergence is linear; accept small residuals
    if z.iter().all(|&x| p(x).0.norm() <= 1e-10) {
        return Ok(z);
    }
    let eval = PeriodicPoints { d, n: 1, lambda };
    Ok(aberth_solve(&eval, z, &AberthConfig::default())?.roots)
}

/// The attracting fixed point of `f_λ` and its multiplier, if there is one.
pub fn attracting_fixed_point(d: u32, lambda: Complex64) -> Result<Option<(Complex64, Complex64)>> {
    let best = fixed_points(d, lambda)?
        .into_iter()
        .map(|z| (z, z.powu(d - 1) * d as f64))
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()));
    Ok(best.filter(|(_, mu)| mu.norm() < 1.0))
}

/// `λ` lies in `H_1`, the hyperbolic component containing 0.
pub fn in_h1(d: u32, lambda: Complex64) -> bool {
    matches!(attracting_fixed_point(d, lambda), Ok(Some(_)))
}

/// Green function of `H_1` with pole at 0: `G_{H_1}(λ, 0) = −log|μ_fix(λ)|/(d−1)`.
///
/// Returns `+∞` at the pole.
pub fn h1_green(d: u32, lambda: Complex64) -> Result<f64> {
    match attracting_fixed_point(d, lambda)? {
        Some((_, mu)) => {
            if mu.norm() == 0.0 {
                Ok(f64::INFINITY)
            } else {
                Ok(-mu.norm().ln() / (d as f64 - 1.0))
            }
        }
        None => Err(Error::NotInH1(lambda)),
    }
}

/// `sup{t : D(t) ⊂ H_1}`, by a radial scan and bisection over directions.
pub fn h1_inradius(d: u32) -> Result<f64> {
    check_degree(d)?;
    let exit = |theta: f64| -> f64 {
        let dir = Complex64::from_polar(1.0, theta);
        let step = 1.0 / 256.0;
        let mut lo = 0.0;
        while in_h1(d, dir * (lo + step)) && lo < 2.0 {
            lo += step;
        }
        let mut hi = lo + step;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if in_h1(d, dir * mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let directions = 720;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..directions {
        let theta = TAU * k as f64 / directions as f64;
        let t = exit(theta);
        if t < best.0 {
            best = (t, theta);
        }
    }
    // golden-section refinement around the best direction
    let h = TAU / directions as f64;
    let (mut a, mut b) = (best.1 - h, best.1 + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (exit(c), exit(e));
    for _ in 0..40 {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = exit(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = exit(e);
        }
    }
    Ok(best.0.min(fc).min(fe))
}

/// Which potential a [`GreenField`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GreenKind {
    /// `g_{f_λ}` for a fixed parameter.
    Dynamical { re: f64, im: f64 },
    /// `g` of the connectedness locus.
    Parameter,
    /// `h = g + log[·, ∞]`.
    H,
}

/// A potential sampled on the nodes of a [`SphereGrid`].
#[derive(Debug, Clone)]
pub struct GreenField {
    pub d: u32,
    pub kind: GreenKind,
    pub grid: SphereGrid,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PgmSidecar {
    pub d: u32,
    pub kind: GreenKind,
    pub width: usize,
    pub height: usize,
    pub rows: String,
    pub columns: String,
    pub maxval: u32,
    /// value = offset + scale · pixel
    pub offset: f64,
    pub scale: f64,
    pub min: f64,
    pub max: f64,
}

impl GreenField {
    pub fn compute(d: u32, kind: GreenKind, grid: SphereGrid, n_max: usize) -> Result<Self> {
        check_degree(d)?;
        let values = grid.map_nodes(|z| match kind {
            GreenKind::Dynamical { re, im } => {
                let l = Complex64::new(re, im);
                green_dynamical(d, l, z, n_max, escape_radius(d, l))
            }
            GreenKind::Parameter => green_parameter(d, z, n_max, escape_radius(d, z)),
            GreenKind::H => h_parameter(d, ExtComplex::Finite(z), n_max),
        });
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteNode { index });
        }
        Ok(Self { d, kind, grid, values })
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// 16-bit binary PGM, one row per `u` node and one column per `θ` node,
    /// affinely scaled to `[0, 65535]`.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<PgmSidecar> {
        let (min, max) = self.min_max();
        let span = if max > min { max - min } else { 1.0 };
        let maxval = 65535u32;
        write!(out, "P5\n{} {}\n{}\n", self.grid.n_theta, self.grid.n_u, maxval)?;
        let mut bytes = Vec::with_capacity(2 * self.values.len());
        for v in &self.values {
            let p = (((v - min) / span) * maxval as f64).round().clamp(0.0, maxval as f64) as u16;
            bytes.extend_from_slice(&p.to_be_bytes());
        }
        out.write_all(&bytes)?;
        Ok(PgmSidecar {
            d: self.d,
            kind: self.kind,
            width: self.grid.n_theta,
            height: self.grid.n_u,
            rows: "u = r^2/(1+r^2), ascending".into(),
            columns: "theta, ascending".into(),
            maxval,
            offset: min,
            scale: span / maxval as f64,
            min,
            max,
        })
    }

    /// CSV with header `u,theta,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "theta", "value"]).map_err(crate::rootfind::csv_error)?;
        for (index, v) in self.values.iter().enumerate() {
            let (u, theta) = self.grid.node(index);
            w.write_record([u.to_string(), theta.to_string(), v.to_string()])
                .map_err(crate::rootfind::csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}
