//! Complex evaluation of integer polynomials.
//!
//! Expanded dynatomic and critical-orbit polynomials have coefficients far
//! beyond double range in relative terms: near a root the terms cancel by
//! many orders of magnitude. [`eval_complex`] therefore runs Horner's rule
//! in binary fixed point on big integers, with enough fractional bits that
//! the absolute error stays near `2^-120` on the evaluation disc.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::ExactPoly;

const GUARD_BITS: u64 = 120;

/// Fractional bits for evaluating a degree-`degree` polynomial at `|z| = r`.
fn precision_bits(degree: usize, r: f64) -> u64 {
    let growth = if r > 1.0 { (degree as f64 * r.log2()).ceil() as u64 } else { 0 };
    GUARD_BITS + growth + (usize::BITS - degree.leading_zeros()) as u64
}

fn to_fixed(x: f64, bits: u64) -> BigInt {
    if x == 0.0 || !x.is_finite() {
        return BigInt::zero();
    }
    // x = m · 2^e exactly with an integer mantissa
    let (m, e) = decompose(x);
    let shift = e + bits as i64;
    let m = BigInt::from(m);
    if shift >= 0 {
        m << shift as usize
    } else {
        m >> (-shift) as usize
    }
}

fn decompose(x: f64) -> (i64, i64) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = if exponent == 0 {
        (bits & 0xfffffffffffff) << 1
    } else {
        (bits & 0xfffffffffffff) | 0x10000000000000
    };
    (sign * mantissa as i64, exponent - 1075)
}

fn from_fixed(x: &BigInt, bits: u64) -> f64 {
    let excess = x.bits().saturating_sub(60);
    let head = (x >> excess as usize).to_f64().unwrap_or(0.0);
    head * 2f64.powi(excess as i32 - bits as i32)
}

/// `p(z)` and `p'(z)` by fixed-point Horner.
pub fn eval_complex_with_derivative(p: &ExactPoly, z: Complex64) -> (Complex64, Complex64) {
    let (v, dv, scale) = eval_complex_with_derivative_scaled(p, z);
    // two factors so that neither underflows on its own
    let (f1, f2) = (2f64.powi(scale / 2), 2f64.powi(scale - scale / 2));
    (v * f1 * f2, dv * f1 * f2)
}

/// `p(z)` and `p'(z)` as `(v, dv, e)` with `p(z) = v · 2^e`, `p'(z) = dv · 2^e`.
///
/// The common exponent keeps both parts finite where the values themselves
/// leave double range.
pub fn eval_complex_with_derivative_scaled(p: &ExactPoly, z: Complex64) -> (Complex64, Complex64, i32) {
    let Some(degree) = p.degree() else {
        return (Complex64::zero(), Complex64::zero(), 0);
    };
    let bits = precision_bits(degree, z.norm());
    let zr = to_fixed(z.re, bits);
    let zi = to_fixed(z.im, bits);
    let mut vr = BigInt::zero();
    let mut vi = BigInt::zero();
    let mut dr = BigInt::zero();
    let mut di = BigInt::zero();
    for c in p.coeffs().iter().rev() {
        // derivative first: d <- d z + v
        let ndr = ((&dr * &zr - &di * &zi) >> bits as usize) + &vr;
        let ndi = ((&dr * &zi + &di * &zr) >> bits as usize) + &vi;
        dr = ndr;
        di = ndi;
        let nvr = ((&vr * &zr - &vi * &zi) >> bits as usize) + (c << bits as usize);
        let nvi = (&vr * &zi + &vi * &zr) >> bits as usize;
        vr = nvr;
        vi = nvi;
    }
    let top = [&vr, &vi, &dr, &di].iter().map(|x| x.bits()).max().unwrap_or(0);
    let excess = top.saturating_sub(400);
    let scale = excess as i32 - bits as i32;
    let part = |x: &BigInt| from_fixed(&(x >> excess as usize), 0);
    (
        Complex64::new(part(&vr), part(&vi)),
        Complex64::new(part(&dr), part(&di)),
        scale,
    )
}

/// `p(z)` by fixed-point Horner.
pub fn eval_complex(p: &ExactPoly, z: Complex64) -> Complex64 {
    eval_complex_with_derivative(p, z).0
}

/// `p(z)` in double precision together with a running rounding-error bound.
///
/// The bound is infinite when a coefficient does not fit in a double.
pub fn eval_complex_f64(p: &ExactPoly, z: Complex64) -> (Complex64, f64) {
    let r = z.norm();
    let mut v = Complex64::zero();
    let mut scale = 0.0f64;
    for c in p.coeffs().iter().rev() {
        let cf = c.to_f64().unwrap_or(f64::INFINITY);
        v = v * z + cf;
        scale = scale * r + cf.abs();
    }
    let degree = p.degree().unwrap_or(0) as f64;
    let bound = 4.0 * (degree + 1.0) * f64::EPSILON * scale;
    (v, if bound.is_finite() { bound } else { f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::super::Var;
    use super::*;

    #[test]
    fn fixed_point_conversion_round_trips() {
        for x in [0.0, 1.0, -2.5, 1e-20, 3.141592653589793, -123456.789] {
            assert_eq!(from_fixed(&to_fixed(x, 200), 200), x);
        }
    }

    #[test]
    fn small_polynomial_values() {
        let p = ExactPoly::from_i64(&[0, 1, 1], Var::Lambda);
        let (v, dv) = eval_complex_with_derivative(&p, Complex64::new(-1.0, 0.0));
        assert_eq!(v, Complex64::new(0.0, 0.0));
        assert_eq!(dv, Complex64::new(-1.0, 0.0));
        let z = Complex64::new(0.3, -0.7);
        let (f, bound) = eval_complex_f64(&p, z);
        assert!((f - (z * z + z)).norm() <= bound + 1e-300);
        assert!((eval_complex(&p, z) - (z * z + z)).norm() < 1e-15);
    }

    #[test]
    fn scaled_values_beyond_double_range() {
        let p = ExactPoly::from_i64(&[1, 1], Var::Lambda).pow(400);
        let z = Complex64::new(30.0, 0.0);
        let (v, dv, e) = eval_complex_with_derivative_scaled(&p, z);
        let log = v.norm().ln() + e as f64 * std::f64::consts::LN_2;
        assert!((log - 400.0 * 31f64.ln()).abs() < 1e-9);
        assert!((v / dv - z / 400.0 - 1.0 / 400.0).norm() < 1e-12);
        assert!(eval_complex(&p, z).re.is_infinite());
    }

    #[test]
    fn cancellation_is_resolved() {
        // (λ + 1)^12 near λ = -1: double Horner loses every digit
        let base = ExactPoly::from_i64(&[1, 1], Var::Lambda);
        let p = base.pow(12);
        let z = Complex64::new(-1.0 + 1.0 / 128.0, 0.0);
        let exact = Complex64::new((1.0f64 / 128.0).powi(12), 0.0);
        let got = eval_complex(&p, z);
        assert!((got - exact).norm() <= 1e-12 * exact.norm(), "{got} vs {exact}");
        let (_, bound) = eval_complex_f64(&p, z);
        assert!(bound > exact.norm());
    }
}
