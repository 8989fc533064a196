//! Divisor sums, the Möbius function and the closed-form bound sequences.
//!
//! Everything here is exact integer arithmetic except the two bound
//! sequences [`t_n`] and [`t_n_star`], which are real-valued by nature.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Degree `d` of the family `z^d + λ` together with a period index `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FamilyParams {
    pub d: u32,
    pub n: u32,
}

impl FamilyParams {
    pub fn new(d: u32, n: u32) -> Result<Self> {
        check_degree(d)?;
        if n == 0 {
            return Err(Error::InvalidArgument("period n must be at least 1".into()));
        }
        Ok(Self { d, n })
    }
}

pub(crate) fn check_degree(d: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "family degree d must be at least 2, got {d}"
        )));
    }
    Ok(())
}

fn check_positive(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("expected a positive integer, got 0".into()));
    }
    Ok(())
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    check_positive(n)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut m = 1u64;
    while m * m <= n {
        if n % m == 0 {
            small.push(m);
            if m * m != n {
                large.push(n / m);
            }
        }
        m += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

/// The Möbius function, by trial-division factorization.
pub fn mobius(n: u64) -> Result<i32> {
    check_positive(n)?;
    let mut rest = n;
    let mut sign = 1i32;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            rest /= p;
            if rest % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// Number of positive divisors.
pub fn sigma0(n: u64) -> Result<u64> {
    Ok(divisors(n)?.len() as u64)
}

/// Sum of positive divisors.
pub fn sigma1(n: u64) -> Result<u64> {
    Ok(divisors(n)?.iter().sum())
}

/// `ν_d(n) = Σ_{m | n} μ(n/m) d^m`: the number of points of formally exact
/// period `n`, i.e. the z-degree of the `n`-th dynatomic polynomial.
pub fn nu(d: u32, n: u64) -> Result<BigInt> {
    check_degree(d)?;
    let mut total = BigInt::zero();
    for m in divisors(n)? {
        let sign = mobius(n / m)?;
        if sign == 0 {
            continue;
        }
        let exp = u32::try_from(m)
            .map_err(|_| Error::InvalidArgument(format!("period {m} too large")))?;
        let term = num_traits::pow(BigInt::from(d), exp as usize);
        if sign > 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

/// [`nu`] narrowed to `usize`, for use as a degree or a buffer length.
pub fn nu_usize(d: u32, n: u64) -> Result<usize> {
    nu(d, n)?.to_usize().ok_or(Error::CapExceeded {
        what: "nu(d, n)",
        value: u128::MAX,
        cap: usize::MAX as u128,
    })
}

/// `d^k` as a `u128`, or `None` on overflow.
pub fn checked_pow(d: u32, k: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(d as u128)?;
    }
    Some(acc)
}

/// Divisors of `n` split by the sign of `μ(n/m)`; divisors with `μ(n/m) = 0`
/// are dropped.
pub fn signed_divisors(n: u64) -> Result<(Vec<u64>, Vec<u64>)> {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for m in divisors(n)? {
        match mobius(n / m)? {
            1 => plus.push(m),
            -1 => minus.push(m),
            _ => {}
        }
    }
    Ok((plus, minus))
}

/// The uniform bound `t_n` on `|log|F_n||` over the bifurcation locus:
///
/// `t_n = [(d+1) log 2 + 2 (n-1) log d + 4 C/(d-1) + (d-1) log(√2+1)] / (d-1)`
///
/// where `C` is the constant `C_{B_f}` (or an upper estimate of it).
pub fn t_n(d: u32, n: u64, c_bf: f64) -> Result<f64> {
    check_degree(d)?;
    check_positive(n)?;
    check_constant(c_bf)?;
    let df = d as f64;
    let ln2 = std::f64::consts::LN_2;
    let body = (df + 1.0) * ln2
        + 2.0 * df.ln() * (n as f64 - 1.0)
        + 4.0 * c_bf / (df - 1.0)
        + (df - 1.0) * (2f64.sqrt() + 1.0).ln();
    Ok(body / (df - 1.0))
}

/// `t*_n = (d-1) Σ_{m | n} t_m`, the primitive-period counterpart of [`t_n`].
pub fn t_n_star(d: u32, n: u64, c_bf: f64) -> Result<f64> {
    check_degree(d)?;
    let mut sum = 0.0;
    for m in divisors(n)? {
        sum += t_n(d, m, c_bf)?;
    }
    Ok((d as f64 - 1.0) * sum)
}

/// Closed form of [`t_n_star`] through `σ_0` and `σ_1`.
pub fn t_n_star_closed_form(d: u32, n: u64, c_bf: f64) -> Result<f64> {
    check_degree(d)?;
    check_constant(c_bf)?;
    let df = d as f64;
    let ln2 = std::f64::consts::LN_2;
    let per_divisor = (df + 1.0) * ln2 - 2.0 * df.ln()
        + 4.0 * c_bf / (df - 1.0)
        + (df - 1.0) * (2f64.sqrt() + 1.0).ln();
    Ok(2.0 * df.ln() * sigma1(n)? as f64 + per_divisor * sigma0(n)? as f64)
}

fn check_constant(c: f64) -> Result<()> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "constant must be finite and nonnegative, got {c}"
        )));
    }
    Ok(())
}

/// `Σ_{m | n} μ(n/m) a(m)` for an integer sequence `a`.
pub fn mobius_transform(n: u64, a: impl Fn(u64) -> i64) -> Result<i64> {
    let mut s = 0i64;
    for m in divisors(n)? {
        s += mobius(n / m)? as i64 * a(m);
    }
    Ok(s)
}

pub(crate) fn big_pow(d: u32, k: usize) -> BigInt {
    if k == 0 {
        return BigInt::one();
    }
    num_traits::pow(BigInt::from(d), k)
}
