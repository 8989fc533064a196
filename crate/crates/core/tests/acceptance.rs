//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines always reach the
//! terminal. Exits non-zero when any criterion fails.

use std::f64::consts::{LN_2, TAU};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unicrit_core::dynamics::{
    boundary_sample, classify_periodic, escape_radius, green_dynamical, lyapunov,
    neg_log_chordal_infinity, ExtComplex, DEFAULT_ITERATIONS,
};
use unicrit_core::exactpoly::{
    critical_orbit_poly, dynatomic_at_zero, eval_complex, fn_is_squarefree, multiplier_leading, pstar_at_zero,
    ExactConfig,
};
use unicrit_core::experiments::{l1_critical, pstar_zero_roots, theorem1_with, theorem2_with, Constants, ExperimentConfig};
use unicrit_core::measures::{
    c_bf_estimate, ddc_density, pair_muf, SphereGrid, TabulatedTest, TestFunction, BUILTIN_FAMILY, DEFAULT_DDC_STEP,
};
use unicrit_core::ntheory::{divisors, nu_usize, t_n};
use unicrit_core::rootfind::{matching_distance, roots_of_exactpoly, superattracting_parameters, AberthConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn checked(bad: &[String], detail: String) -> Outcome {
    if bad.is_empty() {
        outcome(true, detail)
    } else {
        outcome(false, format!("{detail}; failures: {}", bad.join("; ")))
    }
}

fn grid(n: usize) -> SphereGrid {
    SphereGrid::new(n, n).unwrap()
}

fn config(n: usize) -> ExperimentConfig {
    ExperimentConfig {
        grid: grid(n),
        ..ExperimentConfig::default()
    }
}

/// Exact-algebra identities, zero tolerance.
fn criterion_1() -> Outcome {
    let cfg = ExactConfig {
        nu_cap: 256,
        ..ExactConfig::default()
    };
    let mut failures = Vec::new();
    let mut pairs = 0;
    for (d, n_max) in [(2u32, 5u32), (3, 5)] {
        for n in 1..=n_max {
            let nu = nu_usize(d, n as u64).unwrap();
            let lead = multiplier_leading(d, n).unwrap();
            let degree = n as usize * (d as usize - 1) * nu / d as usize;
            let pstar = pstar_at_zero(d, n).unwrap();
            let expected_at_zero = pstar.pow(n).scale(&lead);
            // the full bivariate objects up to ν = 72; (3, 5) has ν = 240
            if nu <= 72 {
                let phi = match cfg.dynatomic_bivariate(d, n) {
                    Ok(p) => p,
                    Err(e) => {
                        failures.push(format!("Φ*({d},{n}): {e}"));
                        continue;
                    }
                };
                if phi.degree_y() != Some(nu) {
                    failures.push(format!("z-degree of Φ*({d},{n}) is {:?}, ν = {nu}", phi.degree_y()));
                }
                let p = cfg.multiplier_poly_power(d, n).unwrap();
                if p.at_y_zero() != expected_at_zero {
                    failures.push(format!("p*^n({d},{n}) at w = 0"));
                }
                for w in [0i64, 1, -1, 2] {
                    let at = p.eval_y(&BigInt::from(w));
                    if at.degree() != Some(degree) || at.leading() != Some(&lead) {
                        failures.push(format!("λ-degree/leading of p*^n({d},{n}) at w = {w}"));
                    }
                }
            } else {
                // exact division succeeded; P*(·,0) = ±Φ*(·,0)^{d−1} has degree (d−1)ν/d
                let phi0 = dynatomic_at_zero(d, n).unwrap();
                if phi0.degree() != Some(nu / d as usize) {
                    failures.push(format!("λ-degree of Φ*({d},{n})(·,0) is {:?}", phi0.degree()));
                }
                let at = cfg.multiplier_poly_power_at(d, n, 0).unwrap();
                if at != expected_at_zero {
                    failures.push(format!("p*^n({d},{n}) at w = 0"));
                }
                if at.degree() != Some(degree) || at.leading() != Some(&lead) {
                    failures.push(format!("λ-degree/leading of p*^n({d},{n}) at w = 0"));
                }
            }
            pairs += 1;
        }
    }
    checked(&failures, format!("{pairs} (d, n) pairs exact"))
}

/// Simple zeros: exact gcd and numeric separation.
fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    for d in [2u32, 3] {
        for n in 1..=7 {
            if !fn_is_squarefree(d, n).unwrap() {
                bad.push(format!("gcd(F_{n}, F_{n}') non-constant for d = {d}"));
            }
        }
    }
    let mut worst = f64::INFINITY;
    for n in 2..=11 {
        let roots = superattracting_parameters(2, n, &AberthConfig::default()).unwrap();
        let sep = roots.min_separation();
        worst = worst.min(sep);
        if !(sep > 1e-8) {
            bad.push(format!("separation {sep:e} at n = {n}"));
        }
    }
    checked(&bad, format!("gcd constant for d ∈ {{2,3}}, n ≤ 7; min separation d=2, n ≤ 11: {worst:.3e}"))
}

/// Black-box roots against roots of the expanded coefficients.
fn criterion_3() -> Outcome {
    let cfg = AberthConfig::default();
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for d in [2u32, 3] {
        for n in 1..=6 {
            let black = superattracting_parameters(d, n, &cfg).unwrap().expanded();
            let coeff = roots_of_exactpoly(&critical_orbit_poly(d, n).unwrap(), &cfg).unwrap().expanded();
            match matching_distance(&black, &coeff) {
                Some(m) => {
                    worst = worst.max(m);
                    if !(m <= 1e-9) {
                        bad.push(format!("d={d} n={n}: {m:e}"));
                    }
                }
                None => bad.push(format!("d={d} n={n}: sizes {} vs {}", black.len(), coeff.len())),
            }
        }
    }
    checked(&bad, format!("max matching distance {worst:.3e} (tol 1e-9)"))
}

fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// L¹ estimate on a 2048² grid and its growth rate.
fn criterion_4() -> Outcome {
    let cfg = config(2048);
    let c = Constants::measure(2, &cfg).unwrap();
    let l1 = l1_critical(2, 8, &cfg.grid, DEFAULT_ITERATIONS).unwrap();
    let mut bad = Vec::new();
    for (i, v) in l1.iter().enumerate() {
        let bound = t_n(2, i as u64 + 1, c.c_bf_used).unwrap() + c.c0;
        if !(*v <= bound) {
            bad.push(format!("n={}: {v} > {bound}", i + 1));
        }
    }
    let ns: Vec<f64> = (1..=8).map(|n| n as f64).collect();
    let slope = ls_slope(&ns, &l1);
    let cap = 1.1 * 2.0 * LN_2;
    if !(slope <= cap) {
        bad.push(format!("slope {slope} > {cap}"));
    }
    checked(&bad,
        format!(
            "L1 = [{}], fitted slope {slope:.4} ≤ {cap:.4}",
            l1.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

/// Critical-orbit equidistribution bound and normalized discrepancy decay.
fn criterion_5() -> Outcome {
    let mut cfg = config(1024);
    // d = 3, n = 10 has 3^9 = 19683 centers, above the default cap
    cfg.aberth.root_cap = 19683;
    let phis = TestFunction::builtin_family();
    let mut bad = Vec::new();
    let mut rows = 0;
    for d in [2u32, 3] {
        let c = Constants::measure(d, &cfg).unwrap();
        let report = theorem1_with(d, 10, &phis, &cfg, c).unwrap();
        rows += report.rows.len();
        for r in &report.rows {
            if !r.is_ok() {
                bad.push(format!("d={d} n={} {}: margin {} ({})", r.n, r.phi, r.margin, r.status));
            }
        }
        for phi in BUILTIN_FAMILY.iter().filter(|&&id| id != "one") {
            let norm: Vec<(u32, f64)> = report
                .rows
                .iter()
                .filter(|r| r.phi == *phi && r.n >= 4)
                .map(|r| (r.n, r.discrepancy / (d as f64).powi(r.n as i32)))
                .collect();
            for w in norm.windows(2) {
                if w[1].1 > w[0].1 + 1e-3 {
                    bad.push(format!("d={d} {phi}: normalized {:.3e} (n={}) → {:.3e} (n={})", w[0].1, w[0].0, w[1].1, w[1].0));
                }
            }
        }
    }
    checked(&bad, format!("{rows} rows, d ∈ {{2,3}}, n ≤ 10, {} test functions", phis.len()))
}

/// Zeros of P*_n(·,0) are the new centers of period n, each with multiplicity d − 1.
fn criterion_6() -> Outcome {
    let cfg = AberthConfig::default();
    let d = 2u32;
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for n in 1..=8u32 {
        let centers = superattracting_parameters(d, n, &cfg).unwrap().expanded();
        let mut old = Vec::new();
        for m in divisors(n as u64).unwrap().into_iter().filter(|&m| m < n as u64) {
            old.extend(superattracting_parameters(d, m as u32, &cfg).unwrap().expanded());
        }
        let mut expected = Vec::new();
        for z in centers {
            if !old.iter().any(|w| (z - w).norm() < 1e-8) {
                expected.extend(std::iter::repeat(z).take(d as usize - 1));
            }
        }
        let zeros = pstar_zero_roots(d, n, &cfg).unwrap();
        match matching_distance(&zeros, &expected) {
            Some(m) => {
                worst = worst.max(m);
                if !(m <= 1e-8) {
                    bad.push(format!("n={n}: {m:e}"));
                }
            }
            None => bad.push(format!("n={n}: {} zeros vs {} new centers", zeros.len(), expected.len())),
        }
    }
    checked(&bad, format!("d=2, n ≤ 8, max matching distance {worst:.3e}"))
}

/// Trapezoid circle averages of the exact multiplier polynomial against the closed form.
fn criterion_7() -> Outcome {
    let d = 2u32;
    let nodes = 1usize << 14;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    let mut skipped = 0;
    for n in 1..=3u32 {
        let nu = nu_usize(d, n as u64).unwrap();
        let p = ExactConfig::default().multiplier_poly_power(d, n).unwrap();
        let mut accepted = 0;
        while accepted < 20 {
            let lam = Complex64::from_polar(2.0 * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
            let cls = match classify_periodic(d, lam, n, 1e-8) {
                Ok(c) => c,
                Err(_) => {
                    skipped += 1;
                    continue;
                }
            };
            let mults = cls.fix_star_multipliers();
            // a multiplier on the circle puts a log singularity on the nodes
            if mults.iter().any(|m| [0.5, 1.0].iter().any(|r| (m.norm() - r).abs() < 1e-2)) {
                skipped += 1;
                continue;
            }
            accepted += 1;
            let rows: Vec<Complex64> = p.rows().iter().map(|row| eval_complex(row, lam)).collect();
            for r in [0.5, 1.0] {
                let mut sum = 0.0;
                for k in 0..nodes {
                    let w = Complex64::from_polar(r, TAU * k as f64 / nodes as f64);
                    let v = rows.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c);
                    sum += v.norm().ln();
                }
                let trapezoid = sum / nodes as f64 / n as f64 - nu as f64 * (d as f64).ln();
                let closed = mults.iter().map(|m| m.norm().max(r).ln()).sum::<f64>() / n as f64
                    - nu as f64 * (d as f64).ln();
                let err = (trapezoid - closed).abs();
                worst = worst.max(err);
                if !(err <= 1e-8) {
                    bad.push(format!("n={n} λ={lam} r={r}: {err:e}"));
                }
            }
        }
    }
    checked(&bad,
        format!("60 λ (20 per n ≤ 3), r ∈ {{0.5, 1}}, 2^14 nodes, max error {worst:.3e}, {skipped} draws skipped as degenerate"),
    )
}

/// Multiplier equidistribution bounds, point and circle-averaged.
fn criterion_8() -> Outcome {
    let cfg = config(1024);
    let phis = TestFunction::builtin_family();
    let c = Constants::measure(2, &cfg).unwrap();
    let report = theorem2_with(2, &[2, 3, 4, 6], &[0.5, 1.0], &phis, &cfg, c).unwrap();
    let bad: Vec<String> = report
        .rows
        .iter()
        .filter(|r| !r.is_ok())
        .map(|r| format!("n={} {}: margin {} ({})", r.n, r.phi, r.margin, r.status))
        .collect();
    let tightest = report
        .rows
        .iter()
        .filter(|r| r.bound > 0.0)
        .map(|r| r.discrepancy / r.bound)
        .fold(0.0, f64::max);
    checked(&bad,
        format!("{} rows, largest discrepancy/bound {tightest:.3e}", report.rows.len()),
    )
}

/// Lower bound for |F_n| on the bifurcation locus.
fn criterion_9() -> Outcome {
    let d = 2u32;
    let est = c_bf_estimate(d, 1000, 2048, 1).unwrap();
    let c_bf = 1.5 * est.value;
    let samples = boundary_sample(d, 1000, 2).unwrap();
    let mut bad = Vec::new();
    let mut slack = f64::INFINITY;
    for n in 1..=10u32 {
        let min = samples
            .iter()
            .map(|&l| {
                let mut x = l;
                for _ in 1..n {
                    x = x * x + l;
                }
                x.norm()
            })
            .fold(f64::INFINITY, f64::min);
        let floor = (-t_n(d, n as u64, c_bf).unwrap()).exp();
        slack = slack.min(min / floor);
        if !(min >= floor) {
            bad.push(format!("n={n}: {min:e} < {floor:e}"));
        }
    }
    checked(&bad,
        format!("10³ boundary samples, C_Bf = 1.5 × {:.4}, smallest min|F_n|/e^(-t_n) = {slack:.3e}", est.value),
    )
}

/// Quadrature and potential-theory infrastructure.
fn criterion_10() -> Outcome {
    let g = grid(2048);
    let mut bad = Vec::new();

    let calib = ddc_density(
        |z| match z {
            ExtComplex::Finite(w) => neg_log_chordal_infinity(w),
            ExtComplex::Infinity => f64::INFINITY,
        },
        &g,
        DEFAULT_DDC_STEP,
    )
    .unwrap();
    let calib_err = (0..g.len())
        .filter(|&i| g.point(i).norm() <= 1.0)
        .map(|i| (calib[i] - 1.0).abs())
        .fold(0.0, f64::max);
    if !(calib_err <= 1e-4) {
        bad.push(format!("calibration {calib_err:e}"));
    }

    let mut mean_err = 0.0f64;
    for id in BUILTIN_FAMILY {
        let phi = TestFunction::parse(id).unwrap();
        let t = TabulatedTest::new(phi, &g, DEFAULT_DDC_STEP).unwrap();
        let m = g.integrate(&t.ddc).unwrap().abs();
        mean_err = mean_err.max(m);
        if !(m <= 1e-6) {
            bad.push(format!("∫dd^c {id} = {m:e}"));
        }
        if id == "one" {
            let h = vec![0.25; g.len()];
            let p = pair_muf(&t, &h, &g).unwrap();
            if p != 1.0 {
                bad.push(format!("pair_muf(1) = {p}"));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut fe_err = 0.0f64;
    for d in [2u32, 3] {
        for _ in 0..1000 {
            let l = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let r = escape_radius(d, l);
            let lhs = green_dynamical(d, l, z.powu(d) + l, DEFAULT_ITERATIONS, r);
            let rhs = d as f64 * green_dynamical(d, l, z, DEFAULT_ITERATIONS, r);
            fe_err = fe_err.max((lhs - rhs).abs());
        }
    }
    if !(fe_err <= 1e-9) {
        bad.push(format!("functional equation {fe_err:e}"));
    }

    let mut lyap_min = f64::INFINITY;
    for d in [2u32, 3] {
        for _ in 0..1000 {
            let l = Complex64::from_polar(3.0 * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
            let gap = lyapunov(d, l) - (d as f64).ln();
            lyap_min = lyap_min.min(gap);
        }
    }
    if !(lyap_min >= 0.0) {
        bad.push(format!("Lyapunov below log d by {lyap_min:e}"));
    }

    checked(&bad,
        format!(
            "calibration {calib_err:.2e} and max |∫dd^cφ ω| {mean_err:.2e} at 2048², pair_muf(1) = 1, functional equation {fe_err:.2e}, min L − log d {lyap_min:.3e}"
        ),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Option<Duration>); 10] = [
        (1, "exact-algebra identities", criterion_1, Some(Duration::from_secs(60))),
        (2, "simplicity of zeros", criterion_2, Some(Duration::from_secs(300))),
        (3, "root-set oracle equivalence", criterion_3, None),
        (4, "L1 estimate", criterion_4, None),
        (5, "critical-orbit equidistribution bound", criterion_5, Some(Duration::from_secs(900))),
        (6, "factorization of P*(·,0)", criterion_6, None),
        (7, "averaged identity", criterion_7, None),
        (8, "multiplier equidistribution bounds", criterion_8, None),
        (9, "lower bound on the bifurcation locus", criterion_9, None),
        (10, "infrastructure properties", criterion_10, None),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (k, name, run, budget) in criteria {
        if !filter.is_empty() && !filter.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let mut o = run();
        let elapsed = start.elapsed();
        if let Some(b) = budget {
            if elapsed > b {
                o.pass = false;
                o.detail.push_str(&format!(" runtime over budget {:.0} s", b.as_secs_f64()));
            }
        }
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {k:>2} {} {name} ({:.1} s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
