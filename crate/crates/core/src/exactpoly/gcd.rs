use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ExactPoly;

/// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) · a = q·b + r`, `deg r < deg b`.
pub fn pseudo_remainder(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
    let (Some(da), Some(db)) = (a.degree(), b.degree()) else {
        return a.clone();
    };
    if da < db {
        return a.clone();
    }
    let lead = b.leading().unwrap().clone();
    let mut rem = a.coeffs().to_vec();
    let mut top = da;
    let mut steps = da - db + 1;
    loop {
        // rem has degree <= top; eliminate the x^top term.
        let t = rem[top].clone();
        for c in rem.iter_mut() {
            *c *= &lead;
        }
        if !t.is_zero() {
            let shift = top - db;
            for (j, bc) in b.coeffs().iter().enumerate() {
                rem[shift + j] -= &t * bc;
            }
        }
        rem.pop();
        steps -= 1;
        if top == db {
            break;
        }
        top -= 1;
    }
    debug_assert_eq!(steps, 0);
    ExactPoly::new(rem, a.var())
}

/// Greatest common divisor in `Z[x]` by the subresultant remainder sequence.
///
/// The result is primitive up to the content gcd and has a positive leading
/// coefficient. `gcd(0, 0) = 0`.
pub fn gcd(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
    if a.is_zero() {
        return normalize_sign(b.clone());
    }
    if b.is_zero() {
        return normalize_sign(a.clone());
    }
    let (mut a, mut b) = if a.degree() >= b.degree() {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    let content = a.content().gcd(&b.content());
    a = a.primitive_part();
    b = b.primitive_part();

    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let delta = a.degree().unwrap() - b.degree().unwrap();
        let r = pseudo_remainder(&a, &b);
        if r.is_zero() {
            return b.primitive_part().scale(&content);
        }
        if r.degree() == Some(0) {
            return ExactPoly::constant(content, a.var());
        }
        // divisor = g · h^delta
        let divisor = &g * num_traits::pow(h.clone(), delta);
        a = b;
        b = r
            .exact_div_scalar(&divisor)
            .expect("subresultant division is exact");
        g = a.leading().unwrap().clone();
        // h <- g^delta / h^(delta - 1)
        h = if delta == 0 {
            h
        } else {
            let num = num_traits::pow(g.clone(), delta);
            let den = num_traits::pow(h, delta - 1);
            num / den
        };
    }
}

fn normalize_sign(p: ExactPoly) -> ExactPoly {
    if p.leading().is_some_and(|c| c.is_negative()) {
        -p
    } else {
        p
    }
}
