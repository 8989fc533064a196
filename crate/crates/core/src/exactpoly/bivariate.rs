use num_bigint::BigInt;
use num_traits::Zero;

use super::{ExactPoly, Var};
use crate::error::{Error, Result};

/// Polynomial in `(x, y)` over `Z`, stored as a list of `x`-polynomials
/// indexed by the power of `y`.
///
/// `coeff(i, j)` is the coefficient of `x^i y^j`. For dynatomic polynomials
/// `x = λ, y = z`; for multiplier polynomials `x = λ, y = w`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactPoly2 {
    rows: Vec<ExactPoly>,
    x: Var,
    y: Var,
}

impl ExactPoly2 {
    pub fn new(rows: Vec<ExactPoly>, x: Var, y: Var) -> Self {
        let mut p = Self {
            rows: rows.into_iter().map(|r| r.with_var(x)).collect(),
            x,
            y,
        };
        p.trim();
        p
    }

    pub fn zero(x: Var, y: Var) -> Self {
        Self { rows: Vec::new(), x, y }
    }

    /// The polynomial `y`.
    pub fn y_monomial(x: Var, y: Var) -> Self {
        Self::new(vec![ExactPoly::zero(x), ExactPoly::one(x)], x, y)
    }

    /// A polynomial in `x` alone.
    pub fn from_x(p: ExactPoly, y: Var) -> Self {
        let x = p.var();
        Self::new(vec![p], x, y)
    }

    fn trim(&mut self) {
        while self.rows.last().is_some_and(|r| r.is_zero()) {
            self.rows.pop();
        }
    }

    pub fn x_var(&self) -> Var {
        self.x
    }

    pub fn y_var(&self) -> Var {
        self.y
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Coefficients of `y^j` as polynomials in `x`.
    pub fn rows(&self) -> &[ExactPoly] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> ExactPoly {
        self.rows.get(j).cloned().unwrap_or_else(|| ExactPoly::zero(self.x))
    }

    pub fn coeff(&self, i: usize, j: usize) -> BigInt {
        self.rows.get(j).map(|r| r.coeff(i)).unwrap_or_default()
    }

    pub fn degree_y(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn degree_x(&self) -> Option<usize> {
        self.rows.iter().filter_map(|r| r.degree()).max()
    }

    /// Monic as a polynomial in `y`.
    pub fn is_monic_in_y(&self) -> bool {
        self.rows.last().is_some_and(|r| r.degree() == Some(0) && r.is_monic())
    }

    /// Substitute `y = 0`.
    pub fn at_y_zero(&self) -> ExactPoly {
        self.row(0)
    }

    /// Substitute an integer value for `y`, giving a polynomial in `x`.
    pub fn eval_y(&self, y: &BigInt) -> ExactPoly {
        let mut acc = ExactPoly::zero(self.x);
        for r in self.rows.iter().rev() {
            acc = &acc.scale(y) + r;
        }
        acc
    }

    /// Substitute an integer value for `x`, giving a polynomial in `y`.
    pub fn eval_x(&self, x: &BigInt) -> ExactPoly {
        ExactPoly::new(self.rows.iter().map(|r| r.eval(x)).collect(), self.y)
    }

    /// Matrix view: entry `[i][j]` is the coefficient of `x^i y^j`.
    pub fn coefficient_matrix(&self) -> Vec<Vec<BigInt>> {
        let nx = self.degree_x().map_or(0, |d| d + 1);
        let ny = self.rows.len();
        (0..nx)
            .map(|i| (0..ny).map(|j| self.coeff(i, j)).collect())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.rows.len().max(other.rows.len());
        let rows = (0..n).map(|j| &self.row(j) + &other.row(j)).collect();
        Self::new(rows, self.x, self.y)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.rows.len().max(other.rows.len());
        let rows = (0..n).map(|j| &self.row(j) - &other.row(j)).collect();
        Self::new(rows, self.x, self.y)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.x, self.y);
        }
        let mut rows = vec![ExactPoly::zero(self.x); self.rows.len() + other.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.rows.iter().enumerate() {
                if !b.is_zero() {
                    rows[i + j] = &rows[i + j] + &(a * b);
                }
            }
        }
        Self::new(rows, self.x, self.y)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::new(vec![ExactPoly::one(self.x)], self.x, self.y);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.rows.iter().map(|r| r.scale(c)).collect(), self.x, self.y)
    }

    /// Partial derivative in `y`.
    pub fn derivative_y(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, r)| r.scale(&BigInt::from(j)))
            .collect();
        Self::new(rows, self.x, self.y)
    }

    /// Exact quotient by a divisor that is monic in `y`.
    ///
    /// Long division in `y` needs no coefficient division because the
    /// divisor is monic. A nonzero remainder is reported as
    /// [`Error::NonDivisible`] with its lowest `y`-index.
    pub fn exact_div_monic(&self, divisor: &Self) -> Result<Self> {
        if !divisor.is_monic_in_y() {
            return Err(Error::InvalidArgument("divisor must be monic in y".into()));
        }
        let db = divisor.degree_y().unwrap();
        let Some(da) = self.degree_y() else {
            return Ok(Self::zero(self.x, self.y));
        };
        if da < db {
            return Err(Error::NonDivisible { index: 0 });
        }
        let mut rem = self.rows.clone();
        let mut quot = vec![ExactPoly::zero(self.x); da - db + 1];
        for k in (0..=da - db).rev() {
            let q = rem[k + db].clone();
            if q.is_zero() {
                continue;
            }
            for (j, b) in divisor.rows.iter().enumerate() {
                if !b.is_zero() {
                    rem[k + j] = &rem[k + j] - &(&q * b);
                }
            }
            quot[k] = q;
        }
        if let Some(index) = rem.iter().position(|r| !r.is_zero()) {
            return Err(Error::NonDivisible { index });
        }
        Ok(Self::new(quot, self.x, self.y))
    }

    /// Largest coefficient bit length.
    pub fn max_bits(&self) -> u64 {
        self.rows.iter().map(|r| r.max_bits()).max().unwrap_or(0)
    }

    /// Sum of absolute values of all coefficients.
    pub fn l1_norm(&self) -> BigInt {
        let mut s = BigInt::zero();
        for r in &self.rows {
            for c in r.coeffs() {
                s += num_traits::Signed::abs(c);
            }
        }
        s
    }

    /// Rows as JSON: an array (indexed by the power of `y`) of arrays of
    /// decimal strings (ascending power of `x`).
    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<String>> = self.rows.iter().map(|r| r.to_decimal_strings()).collect();
        serde_json::to_string(&rows).expect("strings always serialize")
    }
}

impl Default for ExactPoly2 {
    fn default() -> Self {
        Self::zero(Var::Lambda, Var::Z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(c: &[i64]) -> ExactPoly {
        ExactPoly::from_i64(c, Var::Lambda)
    }

    #[test]
    fn product_and_monic_division() {
        // (z - λ)(z + 1) / (z + 1)
        let a = ExactPoly2::new(vec![lam(&[0, -1]), lam(&[1])], Var::Lambda, Var::Z);
        let b = ExactPoly2::new(vec![lam(&[1]), lam(&[1])], Var::Lambda, Var::Z);
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div_monic(&b).unwrap(), a);
        assert_eq!(prod.coeff(1, 0), BigInt::from(-1));
        assert_eq!(prod.coeff(1, 1), BigInt::from(-1));
        assert_eq!(prod.coeff(0, 2), BigInt::from(1));
    }

    #[test]
    fn non_divisible_remainder() {
        // z^2 + λ is not divisible by z + 1 (remainder λ + 1)
        let a = ExactPoly2::new(vec![lam(&[0, 1]), lam(&[]), lam(&[1])], Var::Lambda, Var::Z);
        let b = ExactPoly2::new(vec![lam(&[1]), lam(&[1])], Var::Lambda, Var::Z);
        assert!(matches!(a.exact_div_monic(&b), Err(Error::NonDivisible { index: 0 })));
    }

    #[test]
    fn evaluation() {
        let a = ExactPoly2::new(vec![lam(&[0, 1]), lam(&[-1]), lam(&[1])], Var::Lambda, Var::Z);
        assert_eq!(a.eval_y(&BigInt::from(2)), lam(&[2, 1]));
        assert_eq!(a.eval_x(&BigInt::from(3)).coeffs(), lam(&[3, -1, 1]).coeffs());
        assert_eq!(a.derivative_y().row(0), lam(&[-1]));
    }
}
