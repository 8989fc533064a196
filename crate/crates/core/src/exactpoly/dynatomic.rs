//! Critical-orbit, dynatomic and multiplier polynomials of `z^d + λ`.

use num_bigint::BigInt;

use super::modular::{self, Crt, Field};
use super::{gcd, ExactPoly, ExactPoly2, Var};
use crate::error::{Error, Result};
use crate::ntheory::{self, big_pow, check_degree, checked_pow, nu_usize, signed_divisors};

/// Size limits for the exact constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConfig {
    /// Largest λ-degree of `F_n` that will be expanded.
    pub degree_cap: u128,
    /// Largest `ν(d, n)` for the bivariate constructions.
    pub nu_cap: usize,
    /// Above this degree, squarefreeness is first decided by a modular
    /// certificate; the subresultant gcd remains the fallback.
    pub exact_gcd_max_degree: usize,
    /// Extra interpolation nodes used to confirm degree bounds.
    pub interpolation_slack: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            degree_cap: 4096,
            nu_cap: 64,
            exact_gcd_max_degree: 1024,
            interpolation_slack: 2,
        }
    }
}

impl ExactConfig {
    fn check_fn_degree(&self, d: u32, n: u32) -> Result<()> {
        check_degree(d)?;
        if n == 0 {
            return Err(Error::InvalidArgument("period n must be at least 1".into()));
        }
        let degree = checked_pow(d, n - 1).unwrap_or(u128::MAX);
        if degree > self.degree_cap {
            return Err(Error::DegreeCapExceeded {
                degree,
                cap: self.degree_cap,
            });
        }
        Ok(())
    }

    fn check_nu(&self, d: u32, n: u32) -> Result<usize> {
        check_degree(d)?;
        if n == 0 {
            return Err(Error::InvalidArgument("period n must be at least 1".into()));
        }
        let nu = nu_usize(d, n as u64)?;
        if nu > self.nu_cap {
            return Err(Error::CapExceeded {
                what: "nu(d, n)",
                value: nu as u128,
                cap: self.nu_cap as u128,
            });
        }
        Ok(nu)
    }

    /// `F_n(λ) = f_λ^n(0)`: `F_1 = λ`, `F_{k+1} = F_k^d + λ`.
    pub fn critical_orbit_poly(&self, d: u32, n: u32) -> Result<ExactPoly> {
        self.check_fn_degree(d, n)?;
        let lam = ExactPoly::x(Var::Lambda);
        let mut f = lam.clone();
        for _ in 1..n {
            f = &f.pow(d) + &lam;
        }
        Ok(f)
    }

    /// Whether `gcd(F_n, F_n')` is constant.
    ///
    /// Large degrees first try a certificate modulo a few primes: `F_n` is
    /// monic, so a unit gcd modulo any prime proves a unit gcd over `Q`.
    pub fn fn_is_squarefree(&self, d: u32, n: u32) -> Result<bool> {
        let f = self.critical_orbit_poly(d, n)?;
        let df = f.derivative();
        let degree = f.degree().unwrap_or(0);
        if degree > self.exact_gcd_max_degree {
            for p in modular::primes_below_2_62(3) {
                let field = Field::new(p);
                let a: Vec<u64> = f.coeffs().iter().map(|c| field.from_bigint(c)).collect();
                let b = modular::derivative(&field, &a);
                if modular::gcd_degree(&field, &a, &b) == Some(0) {
                    return Ok(true);
                }
            }
        }
        Ok(gcd(&f, &df).degree() == Some(0))
    }

    /// `Φ*_n(λ, 0) = Π_{m | n} F_m^{μ(n/m)}`, by exact division of the
    /// positive-sign product by the negative-sign one.
    pub fn dynatomic_at_zero(&self, d: u32, n: u32) -> Result<ExactPoly> {
        self.check_fn_degree(d, n)?;
        let (plus, minus) = signed_divisors(n as u64)?;
        let mut cache: Vec<Option<ExactPoly>> = vec![None; n as usize + 1];
        let mut orbit = |m: u64| -> Result<ExactPoly> {
            let slot = &mut cache[m as usize];
            if slot.is_none() {
                *slot = Some(self.critical_orbit_poly(d, m as u32)?);
            }
            Ok(slot.clone().unwrap())
        };
        let mut num = ExactPoly::one(Var::Lambda);
        for m in plus {
            num = &num * &orbit(m)?;
        }
        let mut den = ExactPoly::one(Var::Lambda);
        for m in minus {
            den = &den * &orbit(m)?;
        }
        num.exact_div(&den)
    }

    /// `P*_n(λ, 0) = ((-1)^ν Φ*_n(λ, 0))^{d-1}`, monic.
    pub fn pstar_at_zero(&self, d: u32, n: u32) -> Result<ExactPoly> {
        let phi = self.dynatomic_at_zero(d, n)?;
        let nu = nu_usize(d, n as u64)?;
        let signed = if nu % 2 == 1 { -phi } else { phi };
        Ok(signed.pow(d - 1))
    }

    /// `Φ*_n(λ, z) = Π_{m | n} (f_λ^m(z) - z)^{μ(n/m)}` in `Z[λ][z]`.
    pub fn dynatomic_bivariate(&self, d: u32, n: u32) -> Result<ExactPoly2> {
        self.check_nu(d, n)?;
        let (plus, minus) = signed_divisors(n as u64)?;
        let iterates = iterates_bivariate(d, n);
        let z = ExactPoly2::y_monomial(Var::Lambda, Var::Z);
        let factor = |m: u64| iterates[m as usize].sub(&z);
        let mut num = ExactPoly2::new(vec![ExactPoly::one(Var::Lambda)], Var::Lambda, Var::Z);
        for m in plus {
            num = num.mul(&factor(m));
        }
        let mut den = ExactPoly2::new(vec![ExactPoly::one(Var::Lambda)], Var::Lambda, Var::Z);
        for m in minus {
            den = den.mul(&factor(m));
        }
        num.exact_div_monic(&den)
    }

    /// `p*_n(λ, w)^n = Res_z(Φ*_n(λ, z), (f_λ^n)'(z) - w)` in `Z[λ][w]`.
    ///
    /// Computed by evaluation at integer points modulo word-size primes,
    /// interpolation, and Chinese remaindering. The prime count comes from
    /// a coefficient bound valid on the bidisc `|λ|, |w| ≤ 1`, and extra
    /// interpolation nodes confirm the degree bounds modulo every prime.
    pub fn multiplier_poly_power(&self, d: u32, n: u32) -> Result<ExactPoly2> {
        let nu = self.check_nu(d, n)?;
        let engine = MultiplierEngine::new(d, n, self.interpolation_slack)?;
        let w_nodes = nu + 1 + self.interpolation_slack;
        let bound = engine.coefficient_bound(1);
        let primes = modular::primes_for_bound(&bound);
        let crt = Crt::new(&primes);

        // residues[p][k][i]: coefficient of λ^i w^k modulo primes[p]
        let mut residues: Vec<Vec<Vec<u64>>> = Vec::with_capacity(primes.len());
        for &p in &primes {
            let field = Field::new(p);
            let mut by_lambda: Vec<Vec<u64>> = Vec::with_capacity(engine.lambda_nodes);
            for a in 0..engine.lambda_nodes {
                let (phi, g) = engine.eval_point(&field, a as u64)?;
                let values: Vec<u64> = (0..w_nodes)
                    .map(|w| {
                        let wv = field.from_u64(w as u64);
                        let mut b = g.clone();
                        sub_constant(&field, &mut b, wv);
                        modular::resultant(&field, &phi, &b)
                    })
                    .collect();
                let coeffs = modular::interpolate_consecutive(&field, &values);
                if coeffs[nu + 1..].iter().any(|&c| c != 0) {
                    return Err(Error::BoundViolated(format!(
                        "w-degree exceeds {nu} at λ = {a}"
                    )));
                }
                by_lambda.push(coeffs);
            }
            let mut per_w = Vec::with_capacity(nu + 1);
            for k in 0..=nu {
                let column: Vec<u64> = by_lambda.iter().map(|row| row[k]).collect();
                let coeffs = modular::interpolate_consecutive(&field, &column);
                engine.check_lambda_degree(&coeffs)?;
                per_w.push(coeffs.into_iter().map(|c| field.to_u64(c)).collect());
            }
            residues.push(per_w);
        }
        let rows = (0..=nu)
            .map(|k| {
                let coeffs = (0..=engine.lambda_degree)
                    .map(|i| {
                        let r: Vec<u64> = residues.iter().map(|per| per[k][i]).collect();
                        crt.reconstruct(&r)
                    })
                    .collect();
                ExactPoly::new(coeffs, Var::Lambda)
            })
            .collect();
        Ok(ExactPoly2::new(rows, Var::Lambda, Var::W))
    }

    /// The specialization `p*_n(λ, w0)^n` for an integer `w0`, without
    /// building the bivariate polynomial. Only the λ-degree bound
    /// `n (d-1) ν / d` is needed, so this reaches cases where the full
    /// bivariate interpolation would be too large.
    pub fn multiplier_poly_power_at(&self, d: u32, n: u32, w0: i64) -> Result<ExactPoly> {
        self.check_fn_degree(d, n)?;
        let engine = MultiplierEngine::new(d, n, self.interpolation_slack)?;
        if engine.lambda_degree as u128 > self.degree_cap {
            return Err(Error::DegreeCapExceeded {
                degree: engine.lambda_degree as u128,
                cap: self.degree_cap,
            });
        }
        let bound = engine.coefficient_bound(w0.unsigned_abs());
        let primes = modular::primes_for_bound(&bound);
        let crt = Crt::new(&primes);
        let mut residues: Vec<Vec<u64>> = Vec::with_capacity(primes.len());
        for &p in &primes {
            let field = Field::new(p);
            let wv = field.from_i64(w0);
            let mut values = Vec::with_capacity(engine.lambda_nodes);
            for a in 0..engine.lambda_nodes {
                let (phi, mut g) = engine.eval_point(&field, a as u64)?;
                sub_constant(&field, &mut g, wv);
                values.push(modular::resultant(&field, &phi, &g));
            }
            let coeffs = modular::interpolate_consecutive(&field, &values);
            engine.check_lambda_degree(&coeffs)?;
            residues.push(coeffs.into_iter().map(|c| field.to_u64(c)).collect());
        }
        let coeffs = (0..=engine.lambda_degree)
            .map(|i| {
                let r: Vec<u64> = residues.iter().map(|per| per[i]).collect();
                crt.reconstruct(&r)
            })
            .collect();
        Ok(ExactPoly::new(coeffs, Var::Lambda))
    }
}

fn sub_constant(field: &Field, b: &mut Vec<u64>, c: u64) {
    if b.is_empty() {
        b.push(0);
    }
    b[0] = field.sub(b[0], c);
    modular::trim(b);
}

/// Iterates `f_λ^j(z)` for `j = 0..=n` in `Z[λ][z]`.
fn iterates_bivariate(d: u32, n: u32) -> Vec<ExactPoly2> {
    let lam = ExactPoly2::from_x(ExactPoly::x(Var::Lambda), Var::Z);
    let mut out = vec![ExactPoly2::y_monomial(Var::Lambda, Var::Z)];
    for j in 0..n as usize {
        let next = out[j].pow(d).add(&lam);
        out.push(next);
    }
    out
}

/// `f_λ^m(z) - z` in `Z[λ][z]`.
pub fn iterate_minus_identity(d: u32, m: u32) -> Result<ExactPoly2> {
    check_degree(d)?;
    if m == 0 {
        return Err(Error::InvalidArgument("iterate index must be at least 1".into()));
    }
    let iterates = iterates_bivariate(d, m);
    Ok(iterates[m as usize].sub(&ExactPoly2::y_monomial(Var::Lambda, Var::Z)))
}

/// `(f_λ^n)'(z) = d^n Π_{j<n} f_λ^j(z)^{d-1}` in `Z[λ][z]`.
pub fn multiplier_derivative(d: u32, n: u32) -> Result<ExactPoly2> {
    check_degree(d)?;
    if n == 0 {
        return Err(Error::InvalidArgument("period n must be at least 1".into()));
    }
    let iterates = iterates_bivariate(d, n - 1);
    let mut g = ExactPoly2::new(vec![ExactPoly::constant(big_pow(d, n as usize), Var::Lambda)], Var::Lambda, Var::Z);
    for it in &iterates {
        g = g.mul(&it.pow(d - 1));
    }
    Ok(g)
}

/// Per-prime evaluation of `Φ*_n(a, ·)` and `(f_a^n)' mod Φ*_n(a, ·)`.
struct MultiplierEngine {
    d: u32,
    n: u32,
    nu: usize,
    plus: Vec<u64>,
    minus: Vec<u64>,
    lambda_degree: usize,
    lambda_nodes: usize,
}

impl MultiplierEngine {
    fn new(d: u32, n: u32, slack: usize) -> Result<Self> {
        check_degree(d)?;
        let nu = nu_usize(d, n as u64)?;
        let (plus, minus) = signed_divisors(n as u64)?;
        let lambda_degree = n as usize * (d as usize - 1) * nu / d as usize;
        Ok(Self {
            d,
            n,
            nu,
            plus,
            minus,
            lambda_degree,
            lambda_nodes: lambda_degree + 1 + slack,
        })
    }

    /// Periodic points satisfy `|z| ≤ 2^{1/(d-1)}` when `|λ| ≤ 1`, so every
    /// multiplier has modulus at most `(2d)^n`; the resultant is a product
    /// of `ν` factors `μ_i - w`.
    fn coefficient_bound(&self, w_max: u64) -> BigInt {
        let base = big_pow(2 * self.d, self.n as usize) + BigInt::from(w_max);
        num_traits::pow(base, self.nu)
    }

    fn check_lambda_degree(&self, coeffs: &[u64]) -> Result<()> {
        if coeffs[self.lambda_degree + 1..].iter().any(|&c| c != 0) {
            return Err(Error::BoundViolated(format!(
                "λ-degree exceeds {}",
                self.lambda_degree
            )));
        }
        Ok(())
    }

    fn eval_point(&self, field: &Field, a: u64) -> Result<(Vec<u64>, Vec<u64>)> {
        let am = field.from_u64(a);
        let z = vec![0, field.one()];
        let mut iterates = vec![z.clone()];
        for j in 0..self.n as usize {
            let mut next = modular::pow(field, &iterates[j], self.d);
            next[0] = field.add(next[0], am);
            iterates.push(next);
        }
        let factor = |m: u64| {
            let mut f = iterates[m as usize].clone();
            f[1] = field.sub(f[1], field.one());
            modular::trim(&mut f);
            f
        };
        let mut num = vec![field.one()];
        for &m in &self.plus {
            num = modular::mul(field, &num, &factor(m));
        }
        let mut den = vec![field.one()];
        for &m in &self.minus {
            den = modular::mul(field, &den, &factor(m));
        }
        let phi = modular::div_monic_exact(field, &num, &den).ok_or(Error::NonDivisible { index: 0 })?;
        debug_assert_eq!(phi.len(), self.nu + 1);

        let mut g = vec![field.from_u64(ntheory::checked_pow(self.d, self.n).unwrap() as u64)];
        for it in &iterates[..self.n as usize] {
            g = modular::mul(field, &g, &modular::pow(field, it, self.d - 1));
            if g.len() > 2 * phi.len() {
                g = modular::rem_monic(field, &g, &phi);
            }
        }
        Ok((phi.clone(), modular::rem_monic(field, &g, &phi)))
    }
}

/// [`ExactConfig::critical_orbit_poly`] with default limits.
pub fn critical_orbit_poly(d: u32, n: u32) -> Result<ExactPoly> {
    ExactConfig::default().critical_orbit_poly(d, n)
}

/// [`ExactConfig::fn_is_squarefree`] with default limits.
pub fn fn_is_squarefree(d: u32, n: u32) -> Result<bool> {
    ExactConfig::default().fn_is_squarefree(d, n)
}

/// [`ExactConfig::dynatomic_at_zero`] with default limits.
pub fn dynatomic_at_zero(d: u32, n: u32) -> Result<ExactPoly> {
    ExactConfig::default().dynatomic_at_zero(d, n)
}

/// [`ExactConfig::pstar_at_zero`] with default limits.
pub fn pstar_at_zero(d: u32, n: u32) -> Result<ExactPoly> {
    ExactConfig::default().pstar_at_zero(d, n)
}

/// [`ExactConfig::dynatomic_bivariate`] with default limits.
pub fn dynatomic_bivariate(d: u32, n: u32) -> Result<ExactPoly2> {
    ExactConfig::default().dynatomic_bivariate(d, n)
}

/// [`ExactConfig::multiplier_poly_power`] with default limits.
pub fn multiplier_poly_power(d: u32, n: u32) -> Result<ExactPoly2> {
    ExactConfig::default().multiplier_poly_power(d, n)
}

/// [`ExactConfig::multiplier_poly_power_at`] with default limits.
pub fn multiplier_poly_power_at(d: u32, n: u32, w0: i64) -> Result<ExactPoly> {
    ExactConfig::default().multiplier_poly_power_at(d, n, w0)
}

/// `d^{nν}`, the leading λ-coefficient of `p*_n(λ, w)^n`.
pub fn multiplier_leading(d: u32, n: u32) -> Result<BigInt> {
    let nu = nu_usize(d, n as u64)?;
    Ok(big_pow(d, n as usize * nu))
}
