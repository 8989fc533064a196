//! Cross-checks between independent routes to the same quantity.

use num_complex::Complex64;
use unicrit_core::dynamics::{
    averaged_log_pstar, averaged_log_pstar_fast, critical_defects, escape_radius, green_parameter, log_pstar,
    GreenField, GreenKind, DEFAULT_ITERATIONS,
};
use unicrit_core::error::Error;
use unicrit_core::exactpoly::{eval_complex, multiplier_poly_power, pstar_at_zero};
use unicrit_core::experiments::pstar_zero_defect;
use unicrit_core::measures::{
    pair_atomic, pair_muf, random_disc_points, AtomicMeasure, SphereGrid, TabulatedTest, TestFunction,
    DEFAULT_DDC_STEP,
};
use unicrit_core::ntheory::nu_usize;
use unicrit_core::rootfind::{superattracting_parameters, AberthConfig};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `∫ φ d([F_n = 0] − d^{n−1} μ_f)` from the atoms and from the potential
/// `log|F_n| − d^{n−1} g` paired with `dd^c φ`.
#[test]
fn green_jensen_two_routes() {
    let d = 2;
    let grid = SphereGrid::new(512, 512).unwrap();
    let h = GreenField::compute(d, GreenKind::H, grid, DEFAULT_ITERATIONS).unwrap();
    for n in [2u32, 4] {
        let roots = superattracting_parameters(d, n, &AberthConfig::default()).unwrap();
        let centers = AtomicMeasure::uniform(roots.expanded(), 1.0).unwrap();
        let scale = (d as f64).powi(n as i32 - 1);
        for id in ["bump(-1,0.5)", "bump(0.3+0.6i,0.4)", "bump(0,0.5)"] {
            let t = TabulatedTest::new(TestFunction::parse(id).unwrap(), &grid, DEFAULT_DDC_STEP).unwrap();
            let atoms = pair_atomic(&t.phi, &centers) - scale * pair_muf(&t, &h.values, &grid).unwrap();
            let defect: Vec<f64> = grid
                .points()
                .iter()
                .map(|&z| critical_defects(d, z, n as usize, DEFAULT_ITERATIONS)[n as usize - 1])
                .collect();
            let prod: Vec<f64> = defect
                .iter()
                .zip(&t.ddc)
                .map(|(u, l)| if u.is_finite() { u * l } else { 0.0 })
                .collect();
            let potential = grid.integrate(&prod).unwrap();
            // the potential has log poles at the centers; at 512² the
            // quadrature error is a few 1e-3
            assert!(
                (atoms - potential).abs() < 5e-3,
                "n={n} {id}: atoms {atoms} potential {potential}"
            );
        }
    }
}

/// `log|P*_n(λ,0)| − (d−1)ν g/d` from the exact polynomial and from the
/// critical orbit.
#[test]
fn pstar_zero_defect_matches_exact_polynomial() {
    for d in [2u32, 3] {
        for n in 2..=4u32 {
            let p = pstar_at_zero(d, n).unwrap();
            let big_d = (d as f64 - 1.0) * nu_usize(d, n as u64).unwrap() as f64 / d as f64;
            for lambda in random_disc_points(20, 2.5, 11 + n as u64) {
                let exact = eval_complex(&p, lambda).norm().ln();
                let g = green_parameter(d, lambda, DEFAULT_ITERATIONS, escape_radius(d, lambda));
                let orbit = pstar_zero_defect(d, lambda, n, DEFAULT_ITERATIONS) + big_d * g;
                assert!((exact - orbit).abs() < 1e-8, "d={d} n={n} λ={lambda}: {exact} vs {orbit}");
            }
        }
    }
}

/// `log|P*_n(λ,w)|` from the periodic-point classification and from the
/// exact resultant `p*^n`.
#[test]
fn log_pstar_matches_resultant() {
    let d = 2;
    for n in 1..=3u32 {
        let p = multiplier_poly_power(d, n).unwrap();
        let nu = nu_usize(d, n as u64).unwrap() as f64;
        for (k, lambda) in random_disc_points(10, 2.0, 5 + n as u64).into_iter().enumerate() {
            let w = c(0.3 * k as f64 - 1.0, 0.7);
            let mut value = c(0.0, 0.0);
            for (j, row) in p.rows().iter().enumerate() {
                value += eval_complex(row, lambda) * w.powu(j as u32);
            }
            let exact = value.norm().ln() / n as f64 - nu * (d as f64).ln();
            match log_pstar(d, lambda, n, w) {
                Ok(v) => assert!((v - exact).abs() < 1e-8, "n={n} λ={lambda}: {v} vs {exact}"),
                Err(Error::DegenerateParameter(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}

/// Circle averages from the multipliers and from the critical orbit.
#[test]
fn averaged_pstar_two_routes() {
    for d in [2u32, 3] {
        for n in 1..=4u32 {
            for lambda in random_disc_points(25, 1.8, 100 + n as u64) {
                for r in [0.5, 1.0] {
                    let slow = match averaged_log_pstar(d, lambda, n, r) {
                        Ok(v) => v,
                        Err(Error::DegenerateParameter(_)) => continue,
                        Err(e) => panic!("{e}"),
                    };
                    let fast = averaged_log_pstar_fast(d, lambda, n, r).unwrap();
                    assert!((slow - fast).abs() < 1e-10, "d={d} n={n} λ={lambda} r={r}: {slow} vs {fast}");
                }
            }
        }
    }
}
