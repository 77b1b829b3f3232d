//! Integer eigenvectors from eigenvectors mod ν.

use super::{HeckeSource, LiftError, LiftSearchConfig};
use crate::gf::{DensePoly, Field, PrimeFieldCtx};
use crate::linalg::dense;
use crate::linalg::wiedemann::poly_apply;
use crate::linalg::SparseSignedMatrix;
use crate::zpoly::{self, ZPoly};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

pub(crate) fn dense_random<R: Rng + ?Sized>(f: &PrimeFieldCtx, n: usize, rng: &mut R) -> Vec<u64> {
    (0..n).map(|_| f.random(rng)).collect()
}

pub(crate) fn matvec_i128(m: &SparseSignedMatrix, v: &[i128]) -> Vec<i128> {
    (0..m.dim()).map(|i| m.row(i).iter().map(|&(c, x)| i128::from(x) * v[c]).sum()).collect()
}

/// ρ(M) v over Z.
pub(crate) fn poly_apply_i128(m: &SparseSignedMatrix, rho: &[BigInt], v: &[i128]) -> Vec<i128> {
    let mut acc = vec![0i128; v.len()];
    for c in rho.iter().rev() {
        let c = c.to_i128().expect("small coefficient");
        let mut next = matvec_i128(m, &acc);
        for (x, &vi) in next.iter_mut().zip(v) {
            *x += c * vi;
        }
        acc = next;
    }
    acc
}

fn quotient(f: &PrimeFieldCtx, mu: &DensePoly<u64>, rho: &DensePoly<u64>) -> DensePoly<u64> {
    let mut q = mu.clone();
    while let Some(next) = q.div_exact(f, rho) {
        q = next;
    }
    q
}

/// Integer eigenvector of T_2 for a simple integer eigenvalue λ.
pub fn lift_1dim<R: Rng + ?Sized>(
    f: &PrimeFieldCtx,
    t2: &SparseSignedMatrix,
    lambda: i64,
    mu: &DensePoly<u64>,
    cfg: &LiftSearchConfig,
    rng: &mut R,
) -> Result<Vec<i64>, LiftError> {
    let n = t2.dim();
    let lin = DensePoly::new(f, vec![f.reduce_i64(-lambda), 1]);
    let q = quotient(f, mu, &lin);
    for _ in 0..cfg.refresh_tries {
        let v = poly_apply(f, t2, &q, &dense_random(f, n, rng));
        let mut counts: HashMap<u64, usize> = HashMap::new();
        for &x in v.iter().filter(|&&x| x != 0) {
            *counts.entry(x).or_default() += 1;
        }
        let Some((&alpha, _)) = counts.iter().max_by_key(|(&x, &c)| (c, Reverse(x))) else {
            continue;
        };
        let inv = f.invm(alpha).expect("nonzero");
        for c in 1..=cfg.max_1dim as i64 {
            let s = f.mulm(f.reduce_i64(c), inv);
            let w: Vec<i64> = v.iter().map(|&x| f.signed(f.mulm(s, x))).collect();
            let wi: Vec<i128> = w.iter().map(|&x| i128::from(x)).collect();
            let tw = matvec_i128(t2, &wi);
            if tw.iter().zip(&wi).all(|(a, b)| *a == i128::from(lambda) * b) {
                let g = w.iter().fold(0i64, |g, &x| g.gcd(&x));
                if g != 1 {
                    return Err(LiftError::Internal(format!("lifted eigenvector has content {g}")));
                }
                return Ok(w);
            }
        }
        return Err(LiftError::LiftFailure(format!("no lift among c = 1..{} for λ = {lambda}", cfg.max_1dim)));
    }
    Err(LiftError::LiftFailure(format!("zero eigenvector projection for λ = {lambda}")))
}

/// Result of the higher-dimensional search: the Krylov matrix mod ν, the
/// Hecke index ℓ whose iterates spanned the space, and a saturated integer
/// basis of ker ρ(T_2).
#[derive(Clone, Debug)]
pub struct HighDimLift {
    pub krylov: Vec<Vec<u64>>,
    pub ell: u64,
    pub basis: Vec<Vec<i64>>,
}

/// Columns v, Mv, ..., M^(k-1) v as an n×k matrix.
fn krylov_matrix(f: &PrimeFieldCtx, m: &SparseSignedMatrix, v: &[u64], k: usize) -> Vec<Vec<u64>> {
    let n = v.len();
    let mut cols = vec![v.to_vec()];
    for _ in 1..k {
        let next = m.matvec_unchecked(f, cols.last().expect("nonempty"));
        cols.push(next);
    }
    (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

pub fn lift_highdim<R: Rng + ?Sized>(
    f: &PrimeFieldCtx,
    t2: &SparseSignedMatrix,
    rho: &ZPoly,
    r: usize,
    mu: &DensePoly<u64>,
    hecke: &dyn HeckeSource,
    cfg: &LiftSearchConfig,
    rng: &mut R,
) -> Result<HighDimLift, LiftError> {
    let n = t2.dim();
    let d = zpoly::degree(rho);
    let dim = r * d;
    let rho_nu = zpoly::reduce(f, rho);
    let q = quotient(f, mu, &rho_nu);
    let mut u = dense_random(f, n, rng);
    let mut v = poly_apply(f, t2, &q, &u);
    let mut found: Option<(u64, Vec<Vec<u64>>)> = None;
    if r == 1 {
        for _ in 0..cfg.refresh_tries {
            let k = krylov_matrix(f, t2, &v, dim);
            if dense::rank(f, &k) == dim {
                found = Some((2, k));
                break;
            }
            u = dense_random(f, n, rng);
            v = poly_apply(f, t2, &q, &u);
        }
    }
    if found.is_none() {
        let mut tried = 0;
        for ell in crate::gf::primes_in(3, cfg.max_ell + 1) {
            if ell == hecke.level() {
                continue;
            }
            if tried > 0 && tried % cfg.refresh_every == 0 {
                u = dense_random(f, n, rng);
                v = poly_apply(f, t2, &q, &u);
            }
            tried += 1;
            let tl = hecke.block(ell)?;
            let k = krylov_matrix(f, &tl, &v, dim);
            if dense::rank(f, &k) == dim {
                found = Some((ell, k));
                break;
            }
        }
    }
    let Some((ell, krylov)) = found else {
        return Err(LiftError::LiftFailure(format!("no separating ℓ ≤ {} for dimension {dim}", cfg.max_ell)));
    };
    let basis = kernel_search(f, t2, rho, &krylov, cfg)?;
    let basis = super::orbit::saturate(basis);
    Ok(HighDimLift { krylov, ell, basis })
}

/// The small-entry search: pick `dim` frequent rows of the Krylov matrix,
/// prescribe small integer values c there, fill in the rest mod ν and test
/// the lift against ρ(T_2) over Z.
fn kernel_search(
    f: &PrimeFieldCtx,
    t2: &SparseSignedMatrix,
    rho: &ZPoly,
    krylov: &[Vec<u64>],
    cfg: &LiftSearchConfig,
) -> Result<Vec<Vec<i64>>, LiftError> {
    let n = krylov.len();
    let dim = krylov[0].len();
    // distinct rows by frequency
    let mut freq: HashMap<&[u64], (usize, usize)> = HashMap::new();
    for (i, row) in krylov.iter().enumerate() {
        if row.iter().all(|&x| x == 0) {
            continue;
        }
        freq.entry(row.as_slice()).or_insert((0, i)).0 += 1;
    }
    let mut rows: Vec<(usize, usize)> = freq.values().copied().collect();
    rows.sort_by_key(|&(c, i)| (Reverse(c), i));
    // the most frequent rows, completed by rank-increasing rows in frequency
    // order when they do not span
    let mut pool: Vec<(usize, usize)> = rows.iter().copied().take(dim + cfg.extra_rows).collect();
    let mut span: Vec<Vec<u64>> = Vec::new();
    let mut greedy: Vec<usize> = Vec::new();
    for (k, &(_, i)) in rows.iter().enumerate() {
        if greedy.len() == dim {
            break;
        }
        span.push(krylov[i].clone());
        if dense::rank(f, &span) == span.len() {
            if k >= pool.len() {
                pool.push(rows[k]);
            }
            greedy.push(pool.iter().position(|&(_, j)| j == i).expect("in pool"));
        } else {
            span.pop();
        }
    }
    let size_of = |combo: &[usize]| combo.iter().map(|&k| 1.0 / (pool[k].0 as f64).powi(2)).sum::<f64>();
    // row sets: combinations of pool rows with full rank
    let mut sets: Vec<(f64, Vec<usize>)> = Vec::new();
    if greedy.len() == dim {
        sets.push((size_of(&greedy), greedy.iter().map(|&k| pool[k].1).collect()));
    }
    for combo in itertools::Itertools::combinations(0..pool.len(), dim).take(100 * cfg.max_row_sets) {
        if combo == greedy {
            continue;
        }
        let sub: Vec<Vec<u64>> = combo.iter().map(|&k| krylov[pool[k].1].clone()).collect();
        if dense::rank(f, &sub) == dim {
            sets.push((size_of(&combo), combo.iter().map(|&k| pool[k].1).collect()));
        }
        if sets.len() >= cfg.max_row_sets {
            break;
        }
    }
    if sets.is_empty() {
        return Err(LiftError::LiftFailure("no invertible row selection".into()));
    }
    sets.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    // X = K K_I^{-1}: column k is the vector with value e_k on rows I
    let xs: Vec<Vec<Vec<u64>>> = sets
        .iter()
        .map(|(_, idx)| {
            let sub: Vec<Vec<u64>> = idx.iter().map(|&i| krylov[i].clone()).collect();
            let inv = dense::inverse(f, &sub).expect("full rank");
            dense::matmul(f, &krylov.to_vec(), &inv)
        })
        .collect();
    let nu = f.modulus();
    let mut found: Vec<Vec<i64>> = Vec::new();
    let mut found_mod: Vec<Vec<u64>> = Vec::new();
    let mut attempts = 0usize;
    let mut bound = cfg.entry_bound;
    let mut tried_cols = 0usize;
    while bound <= cfg.max_entry_bound {
        let cols = candidate_columns(dim, bound, tried_cols);
        tried_cols += cols.len();
        // merge the streams (set s, column c) by size_s · size_c
        let mut heap: BinaryHeap<Reverse<(OrdF64, usize, usize)>> = BinaryHeap::new();
        for (s, (size, _)) in sets.iter().enumerate() {
            if let Some(c) = cols.first() {
                heap.push(Reverse((OrdF64(size * c.0 as f64), s, 0)));
            }
        }
        while let Some(Reverse((_, s, ci))) = heap.pop() {
            if ci + 1 < cols.len() {
                heap.push(Reverse((OrdF64(sets[s].0 * cols[ci + 1].0 as f64), s, ci + 1)));
            }
            attempts += 1;
            if attempts > cfg.attempt_cap {
                return Err(LiftError::AttemptCap(attempts - 1));
            }
            let c = &cols[ci].1;
            let x = &xs[s];
            let cand: Vec<u64> = (0..n)
                .map(|i| {
                    let mut acc = 0u128;
                    for (k, &ck) in c.iter().enumerate() {
                        if ck != 0 {
                            acc += u128::from(x[i][k]) * u128::from(f.reduce_i64(ck));
                        }
                    }
                    (acc % u128::from(nu)) as u64
                })
                .collect();
            // cheap independence check before the exact test
            let mut trial = found_mod.clone();
            trial.push(cand.clone());
            if dense::rank(f, &trial) < trial.len() {
                continue;
            }
            let lifted: Vec<i128> = cand.iter().map(|&y| i128::from(f.signed(y))).collect();
            if poly_apply_i128(t2, rho, &lifted).iter().all(Zero::is_zero) {
                found.push(lifted.iter().map(|&y| y as i64).collect());
                found_mod.push(cand);
                if found.len() == dim {
                    return Ok(found);
                }
            }
        }
        bound += 1;
    }
    Err(LiftError::LiftFailure(format!("found {} of {dim} integer kernel vectors", found.len())))
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Primitive columns in {−b..b}^dim with positive leading entry, by
/// (Σ c², lexicographic); skips the first `skip` (already tried at smaller b)
/// by filtering to columns with max |c_i| = b when `skip > 0`.
fn candidate_columns(dim: usize, b: i64, skip: usize) -> Vec<(i64, Vec<i64>)> {
    let mut out: Vec<(i64, Vec<i64>)> = Vec::new();
    let width = (2 * b + 1) as usize;
    let total = width.checked_pow(dim as u32).expect("column box too large");
    for code in 0..total {
        let mut c = Vec::with_capacity(dim);
        let mut k = code;
        for _ in 0..dim {
            c.push((k % width) as i64 - b);
            k /= width;
        }
        let Some(&lead) = c.iter().find(|&&x| x != 0) else {
            continue;
        };
        if lead < 0 || c.iter().fold(0i64, |g, &x| g.gcd(&x)) != 1 {
            continue;
        }
        if skip > 0 && c.iter().all(|x| x.abs() < b) {
            continue;
        }
        out.push((c.iter().map(|x| x * x).sum(), c));
    }
    out.sort();
    out
}
