//! Wiedemann minimal polynomials and characteristic polynomial completion.

use super::dense;
use super::sparse::{LinalgError, SparseSignedMatrix};
use crate::gf::{factor, is_prime, DensePoly, Field, PrimeFieldCtx};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// The auxiliary primes ν, largest first below 10^6.
pub fn nu_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| (2..1_000_000u64).rev().filter(|&q| is_prime(q)).take(20).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WiedemannParams {
    /// Number of unit entries in a starting vector.
    pub density: usize,
    pub shift: i64,
    /// Attempts per ν; grows by one on every ν change.
    pub budget: usize,
    pub max_nu: usize,
    pub window: usize,
}

impl Default for WiedemannParams {
    fn default() -> Self {
        Self { density: 50, shift: 4, budget: 2, max_nu: 12, window: 1000 }
    }
}

/// Scalar sequence and coordinate windows of one Krylov run on M + kI.
#[derive(Clone, Debug)]
pub struct KrylovTrace {
    pub probe: usize,
    pub shift: i64,
    pub seq: Vec<u64>,
    /// First `window` coordinates of (M + kI)^i u for i < n.
    pub windows: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharpolyRecord {
    pub nu: u64,
    pub minpoly: Vec<u64>,
    pub charpoly: Option<Vec<u64>>,
    pub notes: Vec<String>,
}

/// Output of a successful Wiedemann run.
#[derive(Clone, Debug)]
pub struct Wiedemann {
    pub nu_index: usize,
    pub field: PrimeFieldCtx,
    pub minpoly: DensePoly<u64>,
    pub traces: Vec<KrylovTrace>,
}

/// Monic minimal-length recurrence of `s`, as the polynomial
/// t^L + c_1 t^(L-1) + ... + c_L. A zero constant term (the recurrence does
/// not determine a reversible power series) is reported as singular.
pub fn berlekamp_massey(f: &PrimeFieldCtx, s: &[u64]) -> Result<DensePoly<u64>, LinalgError> {
    let mut c = vec![1u64];
    let mut b = vec![1u64];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = 1u64;
    for n in 0..s.len() {
        let mut d = s[n];
        for i in 1..=l.min(c.len() - 1) {
            d = f.addm(d, f.mulm(c[i], s[n - i]));
        }
        if d == 0 {
            m += 1;
            continue;
        }
        let coef = f.mulm(d, f.invm(bd).expect("nonzero discrepancy"));
        let old = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + m] = f.subm(c[i + m], f.mulm(coef, bi));
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = old;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    c.resize(l + 1, 0);
    if l == 0 || c[l] == 0 {
        return Err(LinalgError::Singular);
    }
    c.reverse();
    Ok(DensePoly::new(f, c))
}

/// p(t + c)
pub fn poly_translate(f: &PrimeFieldCtx, p: &DensePoly<u64>, c: u64) -> DensePoly<u64> {
    let lin = DensePoly::new(f, vec![c, 1]);
    let mut acc = DensePoly::zero();
    for a in p.coeffs.iter().rev() {
        acc = acc.mul(f, &lin).add(f, &DensePoly::constant(f, *a));
    }
    acc
}

fn random_start<R: Rng + ?Sized>(f: &PrimeFieldCtx, n: usize, density: usize, rng: &mut R) -> Vec<u64> {
    let mut u = vec![0u64; n];
    if n <= density {
        for x in u.iter_mut() {
            *x = f.random(rng);
        }
    } else {
        for i in rand::seq::index::sample(rng, n, density) {
            u[i] = 1;
        }
    }
    u
}

/// Runs `len` iterates of M + kI from `u`, keeping the probe scalars and
/// the first n windows.
pub fn krylov_trace(
    f: &PrimeFieldCtx,
    m: &SparseSignedMatrix,
    u: Vec<u64>,
    probe: usize,
    shift: i64,
    len: usize,
    window: usize,
) -> KrylovTrace {
    let n = m.dim();
    let w = window.min(n);
    let k = f.reduce_i64(shift);
    let mut seq = Vec::with_capacity(len);
    let mut windows = Vec::with_capacity(n);
    let mut v = u;
    for i in 0..len {
        seq.push(v[probe]);
        if i < n {
            windows.push(v[..w].to_vec());
        }
        if i + 1 < len {
            let mv = m.matvec_unchecked(f, &v);
            v = mv.iter().zip(&v).map(|(&a, &b)| f.addm(a, f.mulm(k, b))).collect();
        }
    }
    KrylovTrace { probe, shift, seq, windows }
}

/// q(M) w for a polynomial q, by Horner with repeated matvecs.
pub fn poly_apply(f: &PrimeFieldCtx, m: &SparseSignedMatrix, q: &DensePoly<u64>, w: &[u64]) -> Vec<u64> {
    let mut acc = vec![0u64; w.len()];
    for &c in q.coeffs.iter().rev() {
        let mut next = m.matvec_unchecked(f, &acc);
        for (x, &wi) in next.iter_mut().zip(w) {
            *x = f.addm(*x, f.mulm(c, wi));
        }
        acc = next;
    }
    acc
}

/// First window coordinates of r(M) u for the trace's starting vector u.
fn window_vector(f: &PrimeFieldCtx, t: &KrylovTrace, r: &DensePoly<u64>) -> Option<Vec<u64>> {
    // r(M) = r'(M + kI) with r'(s) = r(s - k)
    let rs = poly_translate(f, r, f.reduce_i64(-t.shift));
    if rs.coeffs.len() > t.windows.len() {
        return None;
    }
    let mut v = vec![0u64; t.windows.first()?.len()];
    for (c, win) in rs.coeffs.iter().zip(&t.windows) {
        for (x, &y) in v.iter_mut().zip(win) {
            *x = f.addm(*x, f.mulm(*c, y));
        }
    }
    Some(v)
}

/// One Wiedemann attempt under a fixed ν: minimal polynomial candidate of M
/// or a singular signal. A given start vector is probed on its support.
fn attempt<R: Rng + ?Sized>(
    f: &PrimeFieldCtx,
    m: &SparseSignedMatrix,
    params: &WiedemannParams,
    shift: i64,
    start: Option<&[u64]>,
    rng: &mut R,
) -> Result<(DensePoly<u64>, KrylovTrace), LinalgError> {
    let n = m.dim();
    let (u, probe) = match start {
        Some(v) => {
            let support: Vec<usize> = (0..n).filter(|&i| v[i] != 0).collect();
            (v.to_vec(), support[rng.gen_range(0..support.len())])
        }
        None => (random_start(f, n, params.density, rng), rng.gen_range(0..n)),
    };
    let trace = krylov_trace(f, m, u, probe, shift, 2 * n + 10, params.window);
    let shifted = berlekamp_massey(f, &trace.seq)?;
    // μ_M(t) = μ_{M+kI}(t + k)
    let mu = poly_translate(f, &shifted, f.reduce_i64(shift));
    Ok((mu, trace))
}

/// Minimal polynomial of M modulo the auxiliary primes, starting from the
/// `start`-th prime and moving on when the per-ν budget runs out.
pub fn wiedemann_minpoly<R: Rng + ?Sized>(
    m: &SparseSignedMatrix,
    params: &WiedemannParams,
    start: usize,
    rng: &mut R,
) -> Result<Wiedemann, LinalgError> {
    let n = m.dim();
    assert!(n >= 1, "empty matrix");
    let primes = nu_primes();
    let mut shift = params.shift;
    let mut budget = params.budget;
    for nu_index in start..(start + params.max_nu).min(primes.len()) {
        let f = PrimeFieldCtx::new(primes[nu_index]).expect("prime");
        let mut best: Option<DensePoly<u64>> = None;
        // μ(M)w for the last failed check: its minimal polynomial is the
        // part of μ_M that the candidate misses
        let mut residual: Option<Vec<u64>> = None;
        let mut traces = Vec::new();
        let mut tries = 0;
        while tries < budget {
            tries += 1;
            match attempt(&f, m, params, shift, residual.as_deref(), rng) {
                Ok((mu, trace)) => {
                    // completion needs windows of generic start vectors
                    if residual.is_none() {
                        traces.push(trace);
                    }
                    best = Some(match (best, &residual) {
                        (None, _) => mu,
                        // lcm(b, μ_w) = b·μ_{b(M)w}, and mu divides the latter
                        (Some(b), Some(_)) => b.mul(&f, &mu).monic(&f),
                        // a single probe can miss eigenvalues, so candidates are merged
                        (Some(b), None) => {
                            let g = b.gcd(&f, &mu);
                            b.mul(&f, &mu).div_exact(&f, &g).expect("gcd divides").monic(&f)
                        }
                    });
                    let mu = best.as_ref().expect("just set");
                    let check = random_start(&f, n, n, rng);
                    let r = poly_apply(&f, m, mu, &check);
                    if r.iter().all(|&x| x == 0) {
                        return Ok(Wiedemann { nu_index, field: f, minpoly: mu.clone(), traces });
                    }
                    residual = Some(r);
                }
                Err(LinalgError::Singular) => shift += 1,
                Err(e) => return Err(e),
            }
        }
        budget += 1;
    }
    Err(LinalgError::Exhausted(params.max_nu))
}

/// Completes the factor g = χ/μ of degree ≤ 2 from c₁ and c₂, checking that
/// every factor of g already divides μ.
fn complete_top(
    f: &PrimeFieldCtx,
    known: &DensePoly<u64>,
    n: usize,
    c1: u64,
    c2: u64,
    mu: &DensePoly<u64>,
) -> Option<DensePoly<u64>> {
    let m = known.degree()?;
    let e = n.checked_sub(m)?;
    let k1 = if m >= 1 { known.coeffs[m - 1] } else { 0 };
    let k2 = if m >= 2 { known.coeffs[m - 2] } else { 0 };
    let g = match e {
        0 => DensePoly::one(f),
        1 => DensePoly::new(f, vec![f.subm(c1, k1), 1]),
        2 => {
            let g1 = f.subm(c1, k1);
            let g2 = f.subm(f.subm(c2, k2), f.mulm(k1, g1));
            DensePoly::new(f, vec![g2, g1, 1])
        }
        _ => return None,
    };
    let chi = known.mul(f, &g);
    let top = |i: usize| if n >= i { chi.coeffs[n - i] } else { 0 };
    if top(1) != c1 || (n >= 2 && top(2) != c2) {
        return None;
    }
    mu.mul(f, mu).rem(f, &g).ok()?.is_zero().then_some(chi)
}

/// Characteristic polynomial of M mod ν from its minimal polynomial, the
/// two top coefficients from traces, and eigenspace rank bounds.
pub fn charpoly_complete<R: Rng + ?Sized>(
    w: &Wiedemann,
    m: &SparseSignedMatrix,
    params: &WiedemannParams,
    rng: &mut R,
) -> CharpolyRecord {
    let f = &w.field;
    let n = m.dim();
    let mu = &w.minpoly;
    let mut record = CharpolyRecord { nu: f.modulus(), minpoly: mu.coeffs.clone(), charpoly: None, notes: Vec::new() };
    if mu.degree() == Some(n) {
        record.charpoly = Some(mu.coeffs.clone());
        record.notes.push("minimal polynomial has full degree".into());
        return record;
    }
    let tr = i128::from(m.trace());
    let c1 = f.reduce_i128(-tr);
    let c2 = f.mulm(f.reduce_i128(tr * tr - m.trace_of_square()), f.invm(2).expect("odd"));
    if let Some(chi) = complete_top(f, mu, n, c1, c2, mu) {
        record.charpoly = Some(chi.coeffs);
        record.notes.push("completed from trace and second symmetric function".into());
        return record;
    }

    // The image of u ↦ (μ/g^m)(M) u is the generalized eigenspace of each
    // irreducible factor g^m of μ, so window ranks over random u give the
    // multiplicity of g in χ.
    let factors = match factor(f, mu, rng) {
        Ok(r) => r,
        Err(_) => return record,
    };
    let mut traces = w.traces.clone();
    let shift = traces.first().map_or(params.shift, |t| t.shift);
    let mut known = DensePoly::one(f);
    for (g, mult) in &factors {
        let dg = g.degree().expect("nonconstant factor");
        let gm = (0..*mult).fold(DensePoly::one(f), |acc, _| acc.mul(f, g));
        let cofactor = mu.div_exact(f, &gm).expect("factor divides");
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut rank = 0;
        let mut used = 0;
        loop {
            while used >= traces.len() {
                let u = random_start(f, n, n, rng);
                traces.push(krylov_trace(f, m, u, 0, shift, n, params.window));
            }
            let t = &traces[used];
            used += 1;
            let mut r = cofactor.clone();
            for _ in 0..mult * dg {
                match window_vector(f, t, &r) {
                    Some(v) => rows.push(v),
                    None => break,
                }
                r = r.shift(1, 0);
            }
            let new_rank = dense::rank(f, &rows);
            if new_rank == rank {
                break;
            }
            rank = new_rank;
        }
        for _ in 0..(rank / dg).max(*mult) {
            known = known.mul(f, g);
        }
    }
    if known.degree().unwrap_or(0) > n {
        record.notes.push("eigenspace bounds exceed the dimension".into());
        return record;
    }
    if let Some(chi) = complete_top(f, &known, n, c1, c2, mu) {
        record.charpoly = Some(chi.coeffs);
        record.notes.push("completed from generalized eigenspace ranks".into());
    } else {
        record.notes.push("incomplete".into());
    }
    record
}

/// χ(M) mod some auxiliary prime, changing ν until completion succeeds.
pub fn charpoly_mod_nu<R: Rng + ?Sized>(
    m: &SparseSignedMatrix,
    params: &WiedemannParams,
    start: usize,
    rng: &mut R,
) -> Result<(Wiedemann, CharpolyRecord), LinalgError> {
    let mut next = start;
    let end = (start + params.max_nu).min(nu_primes().len());
    while next < end {
        let sub = WiedemannParams { max_nu: end - next, ..params.clone() };
        let w = wiedemann_minpoly(m, &sub, next, rng)?;
        let rec = charpoly_complete(&w, m, params, rng);
        if rec.charpoly.is_some() {
            return Ok((w, rec));
        }
        next = w.nu_index + 1;
    }
    Err(LinalgError::Incomplete)
}
