//! Dense polynomials with arbitrary-precision integer coefficients.
//!
//! [`ExactPoly`] is univariate, ascending degree. [`ExactPoly2`] is a
//! polynomial in a second variable whose coefficients are [`ExactPoly`]s,
//! which is the natural shape for `Z[λ][z]` (dynatomic polynomials) and
//! `Z[λ][w]` (multiplier polynomials).

mod bivariate;
mod dynatomic;
mod gcd;
mod horner;
pub mod modular;
mod resultant;

pub use bivariate::ExactPoly2;
pub use dynatomic::{
    critical_orbit_poly, dynatomic_at_zero, dynatomic_bivariate, fn_is_squarefree,
    iterate_minus_identity, multiplier_derivative, multiplier_poly_power,
    multiplier_leading, multiplier_poly_power_at, pstar_at_zero, ExactConfig,
};
pub use gcd::{gcd, pseudo_remainder};
pub use horner::{eval_complex, eval_complex_f64, eval_complex_with_derivative, eval_complex_with_derivative_scaled};
pub use resultant::{bareiss_determinant, sylvester_resultant};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Display-only tag for the variable of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Var {
    #[default]
    Lambda,
    Z,
    W,
}

impl Var {
    fn symbol(self) -> &'static str {
        match self {
            Var::Lambda => "λ",
            Var::Z => "z",
            Var::W => "w",
        }
    }
}

/// Dense univariate polynomial over `Z`, ascending degree, no trailing zeros.
///
/// The zero polynomial has an empty coefficient list.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactPoly {
    coeffs: Vec<BigInt>,
    var: Var,
}

impl ExactPoly {
    pub fn new(coeffs: Vec<BigInt>, var: Var) -> Self {
        let mut p = Self { coeffs, var };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64], var: Var) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect(), var)
    }

    pub fn zero(var: Var) -> Self {
        Self { coeffs: Vec::new(), var }
    }

    pub fn one(var: Var) -> Self {
        Self::constant(BigInt::one(), var)
    }

    pub fn constant(c: BigInt, var: Var) -> Self {
        Self::new(vec![c], var)
    }

    /// The monomial `x`.
    pub fn x(var: Var) -> Self {
        Self::from_i64(&[0, 1], var)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.var);
        }
        Self::new(self.coeffs.iter().map(|a| a * c).collect(), self.var)
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs, var: self.var }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
            self.var,
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.var);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// gcd of the coefficients (nonnegative); zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading().is_some_and(|l| l.is_negative()) {
            c = -c;
        }
        Self::new(self.coeffs.iter().map(|a| a / &c).collect(), self.var)
    }

    /// Divide every coefficient by `c`, failing if any division is inexact.
    pub fn exact_div_scalar(&self, c: &BigInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::InvalidArgument("division by zero scalar".into()));
        }
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (i, a) in self.coeffs.iter().enumerate() {
            let (q, r) = a.div_rem(c);
            if !r.is_zero() {
                return Err(Error::NonDivisible { index: i });
            }
            out.push(q);
        }
        Ok(Self::new(out, self.var))
    }

    /// Exact quotient `a / b` in `Z[x]`.
    ///
    /// Fails with [`Error::NonDivisible`] when `b` does not divide `self`;
    /// the index is the first coefficient where a remainder (or a
    /// non-integral quotient step) appears.
    pub fn exact_div(&self, b: &ExactPoly) -> Result<Self> {
        let Some(db) = b.degree() else {
            return Err(Error::InvalidArgument("division by the zero polynomial".into()));
        };
        let Some(da) = self.degree() else {
            return Ok(Self::zero(self.var));
        };
        if da < db {
            return Err(Error::NonDivisible { index: 0 });
        }
        let lead = b.leading().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); da - db + 1];
        for k in (0..=da - db).rev() {
            let top = &rem[k + db];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lead);
            if !r.is_zero() {
                return Err(Error::NonDivisible { index: k + db });
            }
            for (j, bc) in b.coeffs.iter().enumerate() {
                if !bc.is_zero() {
                    rem[k + j] -= &q * bc;
                }
            }
            quot[k] = q;
        }
        if let Some(index) = rem.iter().position(|c| !c.is_zero()) {
            return Err(Error::NonDivisible { index });
        }
        Ok(Self::new(quot, self.var))
    }

    /// Compose `self(x^k)`.
    pub fn inflate(&self, k: usize) -> Self {
        if self.is_zero() || k == 1 {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        Self { coeffs, var: self.var }
    }

    /// Largest coefficient bit length.
    pub fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// Coefficients as decimal strings, ascending degree.
    pub fn to_decimal_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_str_radix(10)).collect()
    }

    /// JSON array of decimal strings, ascending degree.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_decimal_strings()).expect("strings always serialize")
    }

    pub fn from_json(s: &str, var: Var) -> Result<Self> {
        let raw: Vec<String> = serde_json::from_str(s)?;
        let coeffs = raw
            .iter()
            .map(|t| {
                t.parse::<BigInt>()
                    .map_err(|e| Error::InvalidArgument(format!("bad coefficient {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs, var))
    }
}

impl fmt::Debug for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactPoly({self})")
    }
}

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let x = self.var.symbol();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = i == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{x}")?,
                _ => write!(f, "{x}^{i}")?,
            }
        }
        Ok(())
    }
}

fn add_coeffs(a: &[BigInt], b: &[BigInt], negate_b: bool) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            match b.get(i) {
                Some(y) if negate_b => x - y,
                Some(y) => x + y,
                None => x,
            }
        })
        .collect()
}

pub(crate) fn mul_coeffs(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

impl<'a> Add<&'a ExactPoly> for &'a ExactPoly {
    type Output = ExactPoly;
    fn add(self, rhs: &ExactPoly) -> ExactPoly {
        ExactPoly::new(add_coeffs(&self.coeffs, &rhs.coeffs, false), self.var)
    }
}

impl<'a> Sub<&'a ExactPoly> for &'a ExactPoly {
    type Output = ExactPoly;
    fn sub(self, rhs: &ExactPoly) -> ExactPoly {
        ExactPoly::new(add_coeffs(&self.coeffs, &rhs.coeffs, true), self.var)
    }
}

impl<'a> Mul<&'a ExactPoly> for &'a ExactPoly {
    type Output = ExactPoly;
    fn mul(self, rhs: &ExactPoly) -> ExactPoly {
        ExactPoly::new(mul_coeffs(&self.coeffs, &rhs.coeffs), self.var)
    }
}

impl Neg for &ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        ExactPoly::new(self.coeffs.iter().map(|c| -c).collect(), self.var)
    }
}

impl Add for ExactPoly {
    type Output = ExactPoly;
    fn add(self, rhs: ExactPoly) -> ExactPoly {
        &self + &rhs
    }
}

impl Sub for ExactPoly {
    type Output = ExactPoly;
    fn sub(self, rhs: ExactPoly) -> ExactPoly {
        &self - &rhs
    }
}

impl Mul for ExactPoly {
    type Output = ExactPoly;
    fn mul(self, rhs: ExactPoly) -> ExactPoly {
        &self * &rhs
    }
}

impl Neg for ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        -&self
    }
}

/// Free-function spelling of the ring operations.
pub fn poly_mul(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
    a * b
}

pub fn poly_pow(a: &ExactPoly, k: u32) -> ExactPoly {
    a.pow(k)
}

pub fn poly_derivative(a: &ExactPoly) -> ExactPoly {
    a.derivative()
}

pub fn poly_exact_div(a: &ExactPoly, b: &ExactPoly) -> Result<ExactPoly> {
    a.exact_div(b)
}
