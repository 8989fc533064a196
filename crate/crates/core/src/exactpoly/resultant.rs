use super::{ExactPoly, ExactPoly2};
use crate::error::{Error, Result};

/// Determinant of a square matrix over `Z[x]` by fraction-free (Bareiss)
/// elimination. Every division is exact.
pub fn bareiss_determinant(mut m: Vec<Vec<ExactPoly>>) -> Result<ExactPoly> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument("matrix must be square".into()));
    }
    let var = m
        .iter()
        .flatten()
        .next()
        .map(|e| e.var())
        .unwrap_or_default();
    if n == 0 {
        return Ok(ExactPoly::one(var));
    }
    let mut negate = false;
    let mut prev = ExactPoly::one(var);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(pivot) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(ExactPoly::zero(var));
            };
            m.swap(k, pivot);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.exact_div(&prev)?;
            }
            m[i][k] = ExactPoly::zero(var);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Resultant in `y` of two polynomials in `Z[x][y]`, as the Sylvester
/// determinant. The convention is `Res(a, b) = lc(a)^deg b · Π b(α)` over
/// the roots `α` of `a`.
pub fn sylvester_resultant(a: &ExactPoly2, b: &ExactPoly2) -> Result<ExactPoly> {
    let (Some(m), Some(n)) = (a.degree_y(), b.degree_y()) else {
        return Err(Error::InvalidArgument("resultant of a zero polynomial".into()));
    };
    let var = a.x_var();
    let size = m + n;
    if size == 0 {
        return Ok(ExactPoly::one(var));
    }
    let zero = ExactPoly::zero(var);
    let mut mat = vec![vec![zero.clone(); size]; size];
    for r in 0..n {
        for k in 0..=m {
            mat[r][r + k] = a.row(m - k);
        }
    }
    for r in 0..m {
        for k in 0..=n {
            mat[n + r][r + k] = b.row(n - k);
        }
    }
    bareiss_determinant(mat)
}
