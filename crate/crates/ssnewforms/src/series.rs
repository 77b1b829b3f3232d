//! Truncated power series over F_p: j(q) and its derivative, eta^3,
//! partial-fraction trees and composition with 1/j(q).

use crate::gf::{DensePoly, Field, PrimeFieldCtx};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series has no invertible leading coefficient within its precision")]
    NonUnit,
    #[error("level {0} is below 5")]
    LevelTooSmall(u64),
    #[error("need {need} coefficients but only {have} are known")]
    Precision { need: usize, have: usize },
}

/// `Σ coeffs[k] q^(valuation + k)`, known modulo q^(valuation + coeffs.len()).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    pub valuation: i64,
    pub coeffs: Vec<u64>,
}

impl PowerSeries {
    pub fn new(valuation: i64, coeffs: Vec<u64>) -> Self {
        Self { valuation, coeffs }
    }

    /// Exponent of the first unknown coefficient.
    pub fn precision(&self) -> i64 {
        self.valuation + self.coeffs.len() as i64
    }

    /// Coefficient of q^e (zero below the valuation).
    pub fn coeff(&self, e: i64) -> Option<u64> {
        if e < self.valuation {
            Some(0)
        } else {
            self.coeffs.get((e - self.valuation) as usize).copied()
        }
    }

    /// Drop leading zero coefficients, raising the valuation.
    pub fn normalized(&self) -> Self {
        let lead = self.coeffs.iter().position(|&c| c != 0).unwrap_or(self.coeffs.len());
        Self { valuation: self.valuation + lead as i64, coeffs: self.coeffs[lead..].to_vec() }
    }

    pub fn mul(&self, f: &PrimeFieldCtx, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        Self { valuation: self.valuation + other.valuation, coeffs: mul_trunc(f, &self.coeffs, &other.coeffs, n) }
    }

    pub fn inv(&self, f: &PrimeFieldCtx) -> Result<Self, SeriesError> {
        let s = self.normalized();
        if s.coeffs.is_empty() {
            return Err(SeriesError::NonUnit);
        }
        Ok(Self { valuation: -s.valuation, coeffs: inv_trunc(f, &s.coeffs, s.coeffs.len())? })
    }

    pub fn add(&self, f: &PrimeFieldCtx, other: &Self) -> Self {
        let v = self.valuation.min(other.valuation);
        let prec = self.precision().min(other.precision());
        let coeffs = (v..prec)
            .map(|e| f.addm(self.coeff(e).unwrap_or(0), other.coeff(e).unwrap_or(0)))
            .collect();
        Self { valuation: v, coeffs }
    }

    /// Term-wise d/dq.
    pub fn derivative(&self, f: &PrimeFieldCtx) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| f.mulm(c, f.reduce_i64(self.valuation + k as i64)))
            .collect();
        Self { valuation: self.valuation - 1, coeffs }
    }

    /// Multiply by q^k.
    pub fn shift(&self, k: i64) -> Self {
        Self { valuation: self.valuation + k, coeffs: self.coeffs.clone() }
    }
}

/// Product of two series truncated to `n` coefficients.
pub fn mul_trunc(f: &PrimeFieldCtx, a: &[u64], b: &[u64], n: usize) -> Vec<u64> {
    let a = &a[..a.len().min(n)];
    let b = &b[..b.len().min(n)];
    let mut c = f.poly_mul(a, b);
    c.resize(n, 0);
    c
}

/// Inverse of a unit series to `n` coefficients by Newton iteration.
/// Coefficients past the end of `a` are taken as zero.
pub fn inv_trunc(f: &PrimeFieldCtx, a: &[u64], n: usize) -> Result<Vec<u64>, SeriesError> {
    let a0 = *a.first().ok_or(SeriesError::NonUnit)?;
    let g0 = f.invm(a0).ok_or(SeriesError::NonUnit)?;
    let mut g = vec![g0];
    let mut k = 1;
    while k < n {
        let k2 = (2 * k).min(n);
        // g <- g (2 - a g)
        let ag = mul_trunc(f, a, &g, k2);
        let mut t: Vec<u64> = ag.iter().map(|&x| f.neg(&x)).collect();
        t[0] = f.addm(t[0], 2);
        g = mul_trunc(f, &g, &t, k2);
        k = k2;
    }
    g.truncate(n);
    Ok(g)
}

/// Σ_k (-1)^k (2k+1) q^(k(k+1)/2), truncated to `n` coefficients.
pub fn eta_cubed(f: &PrimeFieldCtx, n: usize) -> PowerSeries {
    let mut c = vec![0u64; n];
    let mut k = 0usize;
    loop {
        let e = k * (k + 1) / 2;
        if e >= n {
            break;
        }
        let v = (2 * k + 1) as i64;
        c[e] = f.reduce_i64(if k % 2 == 0 { v } else { -v });
        k += 1;
    }
    PowerSeries::new(0, c)
}

/// σ_k(m) mod p for m < n, by a divisor sieve.
fn divisor_power_sums(f: &PrimeFieldCtx, k: u64, n: usize) -> Vec<u64> {
    let mut s = vec![0u64; n];
    for d in 1..n {
        let dk = f.powm(d as u64 % f.modulus(), k);
        let mut m = d;
        while m < n {
            s[m] = f.addm(s[m], dk);
            m += d;
        }
    }
    s
}

/// Normalized Eisenstein series 1 + c Σ σ_{k-1}(m) q^m for weight k in {4, 12}.
pub fn eisenstein(f: &PrimeFieldCtx, weight: u32, n: usize) -> Option<PowerSeries> {
    let (num, den, k1) = match weight {
        4 => (240i64, 1i64, 3),
        12 => (65520, 691, 11),
        _ => return None,
    };
    let c = f.mulm(f.reduce_i64(num), f.invm(f.reduce_i64(den))?);
    let s = divisor_power_sums(f, k1, n);
    let mut coeffs: Vec<u64> = s.iter().map(|&x| f.mulm(x, c)).collect();
    if n > 0 {
        coeffs[0] = 1;
    }
    Some(PowerSeries::new(0, coeffs))
}

/// (eta^3)^8 / q = Π (1 - q^k)^24.
fn delta_over_q(f: &PrimeFieldCtx, n: usize) -> Vec<u64> {
    let t = eta_cubed(f, n).coeffs;
    let t2 = mul_trunc(f, &t, &t, n);
    let t4 = mul_trunc(f, &t2, &t2, n);
    mul_trunc(f, &t4, &t4, n)
}

/// j(q) with `n` coefficients (exponents -1 .. n-2) via E_12 / (eta^3)^8
/// plus a constant fixed by the q^0 coefficient being 744. Falls back to
/// E_4^3 / (eta^3)^8 when 691 is not invertible.
pub fn j_series(f: &PrimeFieldCtx, n: usize) -> Result<PowerSeries, SeriesError> {
    if f.modulus() < 5 {
        return Err(SeriesError::LevelTooSmall(f.modulus()));
    }
    let d_inv = inv_trunc(f, &delta_over_q(f, n), n)?;
    match eisenstein(f, 12, n) {
        Some(e12) => {
            let mut jj = mul_trunc(f, &e12.coeffs, &d_inv, n);
            if n > 1 {
                // fix the constant term
                let shift = f.subm(744 % f.modulus(), jj[1]);
                jj[1] = f.addm(jj[1], shift);
            }
            Ok(PowerSeries::new(-1, jj))
        }
        None => j_series_e4(f, n),
    }
}

/// j(q) = E_4^3 / Δ, the cross-check route.
pub fn j_series_e4(f: &PrimeFieldCtx, n: usize) -> Result<PowerSeries, SeriesError> {
    let d_inv = inv_trunc(f, &delta_over_q(f, n), n)?;
    let e4 = eisenstein(f, 4, n).expect("weight 4 is supported").coeffs;
    let e4_3 = mul_trunc(f, &mul_trunc(f, &e4, &e4, n), &e4, n);
    Ok(PowerSeries::new(-1, mul_trunc(f, &e4_3, &d_inv, n)))
}

/// j(q) and dj/dq, each with `n` coefficients.
pub fn j_and_derivative(f: &PrimeFieldCtx, n: usize) -> Result<(PowerSeries, PowerSeries), SeriesError> {
    let j = j_series(f, n)?;
    let dj = j.derivative(f);
    Ok((j, dj))
}

/// P/Q over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: DensePoly<u64>,
    pub den: DensePoly<u64>,
}

impl RationalFunction {
    /// γ / (x - j)
    pub fn simple(f: &PrimeFieldCtx, gamma: u64, j: u64) -> Self {
        Self { num: DensePoly::constant(f, gamma), den: DensePoly::linear(f, &j) }
    }

    pub fn zero(f: &PrimeFieldCtx) -> Self {
        Self { num: DensePoly::zero(), den: DensePoly::one(f) }
    }
}

/// Σ leaves by pairwise merging up a balanced tree.
pub fn partial_fraction_tree(f: &PrimeFieldCtx, leaves: &[RationalFunction]) -> RationalFunction {
    match leaves.len() {
        0 => RationalFunction::zero(f),
        1 => leaves[0].clone(),
        n => {
            let (l, r) = leaves.split_at(n / 2);
            let a = partial_fraction_tree(f, l);
            let b = partial_fraction_tree(f, r);
            RationalFunction {
                num: a.num.mul(f, &b.den).add(f, &b.num.mul(f, &a.den)),
                den: a.den.mul(f, &b.den),
            }
        }
    }
}

/// Σ γ_i / (x - j_i) for rational j_i.
pub fn partial_fraction_simple(f: &PrimeFieldCtx, terms: &[(u64, u64)]) -> RationalFunction {
    let leaves: Vec<_> = terms.iter().map(|&(g, j)| RationalFunction::simple(f, g, j)).collect();
    partial_fraction_tree(f, &leaves)
}

fn reversed(p: &DensePoly<u64>, deg: usize) -> Vec<u64> {
    let mut c = p.coeffs.clone();
    c.resize(deg + 1, 0);
    c.reverse();
    c
}

/// Coefficients a_0..a_n of R(1/y) as a series in y.
fn expand_at_infinity(f: &PrimeFieldCtx, r: &RationalFunction, n: usize) -> Result<Vec<u64>, SeriesError> {
    let mut a = vec![0u64; n + 1];
    let (Some(dp), Some(dq)) = (r.num.degree(), r.den.degree()) else {
        return Ok(a);
    };
    assert!(dp < dq, "partial fraction must be proper");
    let s = dq - dp;
    if s > n {
        return Ok(a);
    }
    let qr = reversed(&r.den, dq);
    let pr = reversed(&r.num, dp);
    let m = n + 1 - s;
    let inv = inv_trunc(f, &qr, m)?;
    let prod = mul_trunc(f, &pr, &inv, m);
    a[s..].copy_from_slice(&prod);
    Ok(a)
}

/// 1/j(q) as a plain coefficient vector for exponents 0..=n.
fn reciprocal_j(f: &PrimeFieldCtx, j: &PowerSeries, n: usize) -> Result<Vec<u64>, SeriesError> {
    if j.valuation != -1 || j.coeffs.first().copied().unwrap_or(0) == 0 {
        return Err(SeriesError::NonUnit);
    }
    if j.coeffs.len() < n {
        return Err(SeriesError::Precision { need: n, have: j.coeffs.len() });
    }
    let inv = inv_trunc(f, &j.coeffs, n)?;
    let mut u = vec![0u64; n + 1];
    u[1..].copy_from_slice(&inv[..n]);
    Ok(u)
}

/// R(j(q)) = Σ γ_i / (j(q) - j_i) modulo q^(n+1), by expanding R in 1/x and
/// composing with u = 1/j(q) using baby-step/giant-step (Brent–Kung).
pub fn compose_with_reciprocal_j(
    f: &PrimeFieldCtx,
    r: &RationalFunction,
    j: &PowerSeries,
    n: usize,
) -> Result<PowerSeries, SeriesError> {
    let a = expand_at_infinity(f, r, n)?;
    if a.iter().all(|&c| c == 0) {
        return Ok(PowerSeries::new(0, vec![0; n + 1]));
    }
    let u = reciprocal_j(f, j, n)?;
    let len = n + 1;
    let m = ((len as f64).sqrt().ceil() as usize).max(1);
    let mut baby: Vec<Vec<u64>> = Vec::with_capacity(m + 1);
    let mut one = vec![0u64; len];
    one[0] = 1;
    baby.push(one);
    for k in 1..=m {
        let next = mul_trunc(f, &baby[k - 1], &u, len);
        baby.push(next);
    }
    let giant = baby.pop().expect("m >= 1");
    let blocks = len.div_ceil(m);
    let mut res = vec![0u64; len];
    for i in (0..blocks).rev() {
        let mut block = vec![0u128; len];
        for (k, b) in baby.iter().enumerate() {
            let idx = i * m + k;
            if idx >= len || a[idx] == 0 {
                continue;
            }
            let c = a[idx];
            for (t, &x) in b.iter().enumerate() {
                block[t] += (c * x) as u128;
            }
        }
        let p = f.modulus() as u128;
        let block: Vec<u64> = block.into_iter().map(|x| (x % p) as u64).collect();
        res = mul_trunc(f, &res, &giant, len);
        for (x, y) in res.iter_mut().zip(block) {
            *x = f.addm(*x, y);
        }
    }
    Ok(PowerSeries::new(0, res))
}

/// Slow oracle: evaluate P(j) and Q(j) by Horner as Laurent series and divide.
pub fn compose_horner(
    f: &PrimeFieldCtx,
    r: &RationalFunction,
    j: &PowerSeries,
    n: usize,
) -> Result<PowerSeries, SeriesError> {
    let Some(dq) = r.den.degree() else {
        return Err(SeriesError::NonUnit);
    };
    if r.num.is_zero() {
        return Ok(PowerSeries::new(0, vec![0; n + 1]));
    }
    // relative precision needed: n + 1 coefficients after a valuation of dq
    let need = n + 2 + dq;
    if j.coeffs.len() < need {
        return Err(SeriesError::Precision { need, have: j.coeffs.len() });
    }
    let jt = PowerSeries::new(-1, j.coeffs[..need].to_vec());
    let horner = |p: &DensePoly<u64>| {
        let mut acc = PowerSeries::new(0, vec![0u64; need]);
        for &c in p.coeffs.iter().rev() {
            acc = acc.mul(f, &jt);
            let cst = PowerSeries::new(0, {
                let mut v = vec![0u64; need];
                v[0] = c;
                v
            });
            acc = acc.add(f, &cst);
            acc.coeffs.truncate(need);
        }
        acc
    };
    let pn = horner(&r.num);
    let qn = horner(&r.den);
    let res = pn.mul(f, &qn.inv(f)?);
    let coeffs = (0..=n as i64).map(|e| res.coeff(e).unwrap_or(0)).collect();
    Ok(PowerSeries::new(0, coeffs))
}
