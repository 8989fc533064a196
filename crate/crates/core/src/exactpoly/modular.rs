//! Prime-field kernels used to compute large resultants by evaluation,
//! interpolation and Chinese remaindering.
//!
//! Primes are below 2^62 and arithmetic is in Montgomery form, so a
//! multiplication is one 64x64->128 product plus a reduction.

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};

/// Arithmetic modulo an odd prime `p < 2^62`, values in Montgomery form.
#[derive(Debug, Clone, Copy)]
pub struct Field {
    p: u64,
    /// `-p^{-1} mod 2^64`
    neg_inv: u64,
    /// `2^128 mod p`
    r2: u64,
}

impl Field {
    pub fn new(p: u64) -> Self {
        assert!(p % 2 == 1 && p < (1 << 62), "modulus must be odd and below 2^62");
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        Self {
            p,
            neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// Into Montgomery form.
    #[inline]
    pub fn from_u64(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    /// Out of Montgomery form.
    #[inline]
    pub fn to_u64(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    pub fn from_bigint(&self, a: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        let mut r = a % &m;
        if r.is_negative() {
            r += &m;
        }
        let (_, digits) = r.to_u64_digits();
        self.from_u64(digits.first().copied().unwrap_or(0))
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        if a >= 0 {
            self.from_u64(a as u64)
        } else {
            self.neg(self.from_u64(a.unsigned_abs()))
        }
    }

    pub fn one(&self) -> u64 {
        self.from_u64(1)
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `count` largest primes below `2^62`, descending.
pub fn primes_below_2_62(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = (1u64 << 62) - 1;
    while out.len() < count {
        if is_prime_u64(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

/// Primes (descending from `2^62`) whose product exceeds `2·bound + 1`,
/// enough to recover any integer of absolute value at most `bound` from
/// its symmetric residues.
pub fn primes_for_bound(bound: &BigInt) -> Vec<u64> {
    let needed_bits = (bound.bits() + 2) as usize;
    let count = needed_bits.div_ceil(61).max(1);
    primes_below_2_62(count)
}

/// Strip trailing zeros of a coefficient vector.
#[inline]
pub fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Remainder of `a` modulo a monic `m` (both ascending, Montgomery form).
pub fn rem_monic(f: &Field, a: &[u64], m: &[u64]) -> Vec<u64> {
    let dm = m.len() - 1;
    if a.len() <= dm {
        let mut r = a.to_vec();
        trim(&mut r);
        return r;
    }
    let mut r = a.to_vec();
    for k in (dm..r.len()).rev() {
        let q = r[k];
        if q == 0 {
            continue;
        }
        let base = k - dm;
        for j in 0..dm {
            r[base + j] = f.sub(r[base + j], f.mul(q, m[j]));
        }
        r[k] = 0;
    }
    r.truncate(dm);
    trim(&mut r);
    r
}

/// Resultant of two polynomials over the field (ascending coefficient
/// vectors, trimmed, Montgomery form), with the Sylvester convention
/// `Res(a, b) = lc(a)^deg b · Π b(α)`.
pub fn resultant(f: &Field, a: &[u64], b: &[u64]) -> u64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut acc = f.one();
    loop {
        let m = a.len() - 1;
        let n = b.len() - 1;
        let lb = *b.last().unwrap();
        if n == 0 {
            return f.mul(acc, f.pow(lb, m as u64));
        }
        // r = a mod b
        let inv_lb = f.inv(lb);
        let mut r = a;
        if r.len() > n {
            for k in (n..r.len()).rev() {
                let q = f.mul(r[k], inv_lb);
                if q == 0 {
                    continue;
                }
                let base = k - n;
                for j in 0..n {
                    r[base + j] = f.sub(r[base + j], f.mul(q, b[j]));
                }
                r[k] = 0;
            }
            r.truncate(n);
        }
        trim(&mut r);
        if r.is_empty() {
            return 0;
        }
        let s = r.len() - 1;
        if (m * n) % 2 == 1 {
            acc = f.neg(acc);
        }
        acc = f.mul(acc, f.pow(lb, (m - s) as u64));
        a = b;
        b = r;
    }
}

/// Product of two coefficient vectors over the field.
pub fn mul(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// `a^k` over the field.
pub fn pow(f: &Field, a: &[u64], k: u32) -> Vec<u64> {
    let mut acc = vec![f.one()];
    for _ in 0..k {
        acc = mul(f, &acc, a);
    }
    acc
}

/// Exact quotient by a monic divisor; `None` if the remainder is nonzero.
pub fn div_monic_exact(f: &Field, a: &[u64], m: &[u64]) -> Option<Vec<u64>> {
    let dm = m.len() - 1;
    if a.len() <= dm {
        return if a.iter().all(|&c| c == 0) { Some(Vec::new()) } else { None };
    }
    let mut r = a.to_vec();
    let mut q = vec![0u64; r.len() - dm];
    for k in (dm..r.len()).rev() {
        let c = r[k];
        if c == 0 {
            continue;
        }
        let base = k - dm;
        q[base] = c;
        for j in 0..=dm {
            r[base + j] = f.sub(r[base + j], f.mul(c, m[j]));
        }
    }
    if r.iter().any(|&c| c != 0) {
        return None;
    }
    trim(&mut q);
    Some(q)
}

/// Formal derivative over the field.
pub fn derivative(f: &Field, a: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| f.mul(c, f.from_u64(i as u64)))
        .collect();
    trim(&mut out);
    out
}

/// Degree of `gcd(a, b)` over the field (`None` if both are zero).
pub fn gcd_degree(f: &Field, a: &[u64], b: &[u64]) -> Option<usize> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = f.inv(*b.last().unwrap());
        let monic: Vec<u64> = b.iter().map(|&c| f.mul(c, inv)).collect();
        let r = rem_monic(f, &a, &monic);
        a = b;
        b = r;
    }
    a.len().checked_sub(1)
}

/// Interpolate values at the points `0, 1, ..., k-1` into ascending
/// coefficients (length `k`), by Newton divided differences.
pub fn interpolate_consecutive(f: &Field, values: &[u64]) -> Vec<u64> {
    let k = values.len();
    let mut dd = values.to_vec();
    // divided differences with nodes x_i = i
    for level in 1..k {
        let inv = f.inv(f.from_u64(level as u64));
        for i in (level..k).rev() {
            dd[i] = f.mul(f.sub(dd[i], dd[i - 1]), inv);
        }
    }
    // Horner expansion of the Newton form: p = dd0 + (x-0)(dd1 + (x-1)(dd2 + ...))
    let mut coeffs = vec![0u64; k];
    for i in (0..k).rev() {
        // coeffs <- coeffs * (x - i) + dd[i]
        let xi = f.from_u64(i as u64);
        let mut next = vec![0u64; k];
        for j in 0..k {
            if coeffs[j] == 0 {
                continue;
            }
            if j + 1 < k {
                next[j + 1] = f.add(next[j + 1], coeffs[j]);
            }
            next[j] = f.sub(next[j], f.mul(coeffs[j], xi));
        }
        next[0] = f.add(next[0], dd[i]);
        coeffs = next;
    }
    coeffs
}

/// Chinese remaindering of residues (plain, not Montgomery) into the
/// symmetric range `(-M/2, M/2]`, by Garner's mixed-radix algorithm.
pub struct Crt {
    primes: Vec<u64>,
    /// `inverse[i][j]` = `p_j^{-1} mod p_i` for `j < i`
    inverse: Vec<Vec<u64>>,
    modulus: BigInt,
    half: BigInt,
}

impl Crt {
    pub fn new(primes: &[u64]) -> Self {
        let inverse = primes
            .iter()
            .enumerate()
            .map(|(i, &pi)| {
                primes[..i]
                    .iter()
                    .map(|&pj| pow_mod(pj % pi, pi - 2, pi))
                    .collect()
            })
            .collect();
        let modulus = primes.iter().fold(BigInt::from(1), |m, &p| m * BigInt::from(p));
        let half = &modulus >> 1;
        Self {
            primes: primes.to_vec(),
            inverse,
            modulus,
            half,
        }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn reconstruct(&self, residues: &[u64]) -> BigInt {
        let k = self.primes.len();
        debug_assert_eq!(residues.len(), k);
        let mut digits = vec![0u64; k];
        for i in 0..k {
            let p = self.primes[i];
            let mut v = residues[i] % p;
            // v = (r_i - (d_0 + d_1 p_0 + ...)) / (p_0 ... p_{i-1}) mod p_i
            for j in 0..i {
                v = (v + p - digits[j] % p) % p;
                v = mul_mod(v, self.inverse[i][j], p);
            }
            digits[i] = v;
        }
        let mut x = BigInt::zero();
        for i in (0..k).rev() {
            x = x * BigInt::from(self.primes[i]) + BigInt::from(digits[i]);
        }
        if x > self.half {
            x -= &self.modulus;
        }
        x
    }
}

/// Sign-aware conversion helper for bounds.
pub fn abs_bits(x: &BigInt) -> u64 {
    if x.sign() == Sign::NoSign {
        0
    } else {
        x.bits()
    }
}
