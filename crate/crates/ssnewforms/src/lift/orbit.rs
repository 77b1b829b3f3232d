//! Splitting the ρ-eigenspace into Galois orbits and finding a simultaneous
//! eigenvector of each over its Hecke field.

use super::search::{lift_1dim, lift_highdim, matvec_i128, HighDimLift};
use super::{HeckeSource, LiftError, LiftSearchConfig};
use crate::gf::{DensePoly, PrimeFieldCtx};
use crate::linalg::{dense, SparseSignedMatrix};
use crate::nf::{self, Elem, NumberField};
use crate::ssgraph::Block;
use crate::zpoly::{self, ZPoly};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

/// One Galois orbit of newforms in an Atkin–Lehner block.
#[derive(Clone, Debug)]
pub struct GaloisOrbit {
    pub level: u64,
    pub block: Block,
    /// Minimal polynomial of a_2.
    pub rho: ZPoly,
    /// Multiplicity of ρ in the characteristic polynomial of T_2.
    pub multiplicity: usize,
    /// Saturated integer basis of the orbit's span, block-indexed.
    pub basis: Vec<Vec<i64>>,
    /// Hecke field; its generator is a_2 when that generates, else a_ℓ.
    pub field: NumberField,
    /// Index whose eigenvalue generates `field` (2 or the separating ℓ).
    pub generator_ell: u64,
    /// Simultaneous eigenvector over `field`.
    pub eigenvector: Vec<Elem>,
}

impl GaloisOrbit {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub(crate) fn prime_ctx() -> PrimeFieldCtx {
    PrimeFieldCtx::new(crate::linalg::nu_primes()[0]).expect("prime")
}

/// Rows whose restriction of the vectors is invertible (greedy, mod a large
/// prime, which implies invertibility over Q).
fn independent_rows(vectors: &[Vec<i64>]) -> Vec<usize> {
    let f = prime_ctx();
    let n = vectors.first().map_or(0, Vec::len);
    let k = vectors.len();
    let mut chosen: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for i in 0..n {
        let row: Vec<u64> = vectors.iter().map(|v| f.reduce_i64(v[i])).collect();
        rows.push(row);
        if dense::rank(&f, &rows) > chosen.len() {
            chosen.push(i);
            if chosen.len() == k {
                break;
            }
        } else {
            rows.pop();
        }
    }
    chosen
}

fn bareiss_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Basis of (span_Q of the vectors) ∩ Z^n.
pub fn saturate(mut basis: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let k = basis.len();
    if k == 0 {
        return basis;
    }
    let n = basis[0].len();
    // the index divides every maximal minor
    let first = independent_rows(&basis);
    let mut g = BigInt::zero();
    let mut row_sets = vec![first.clone()];
    for shift in 1..4 {
        let rotated: Vec<Vec<i64>> = basis.iter().map(|v| {
            let mut w = v.clone();
            w.rotate_left((shift * n / 4).min(n - 1));
            w
        }).collect();
        let rows: Vec<usize> =
            independent_rows(&rotated).into_iter().map(|i| (i + (shift * n / 4).min(n - 1)) % n).collect();
        row_sets.push(rows);
    }
    for rows in &row_sets {
        if rows.len() < k {
            continue;
        }
        let m: Vec<Vec<BigInt>> = rows.iter().map(|&i| basis.iter().map(|v| BigInt::from(v[i])).collect()).collect();
        g = g.gcd(&bareiss_det(&m));
    }
    assert!(!g.is_zero(), "vectors are independent");
    for (q, _) in nf::factor_integer(&g) {
        let qq = q.to_u64().expect("small prime");
        loop {
            let m: Vec<Vec<u64>> = basis.iter().map(|v| v.iter().map(|&x| x.rem_euclid(qq as i64) as u64).collect()).collect();
            let ker = nf::left_kernel_mod(&m, qq);
            let Some(a) = ker.first() else {
                break;
            };
            let pivot = a.iter().rposition(|&x| x != 0).expect("nonzero kernel vector");
            let mut comb = vec![0i64; n];
            for (ai, v) in a.iter().zip(&basis) {
                for (c, &x) in comb.iter_mut().zip(v) {
                    *c += *ai as i64 * x;
                }
            }
            debug_assert!(comb.iter().all(|c| c % qq as i64 == 0));
            basis[pivot] = comb.iter().map(|c| c / qq as i64).collect();
        }
    }
    basis
}

/// Action of `t` on span(vectors): the integer matrix S with
/// t·v_k = Σ_j S[j][k] v_j, checked on every coordinate.
fn action_matrix(t: &SparseSignedMatrix, vectors: &[Vec<i64>]) -> Result<Vec<Vec<BigInt>>, LiftError> {
    let k = vectors.len();
    let rows = independent_rows(vectors);
    let sub: Vec<Vec<BigRational>> =
        rows.iter().map(|&i| vectors.iter().map(|v| BigRational::from_integer(BigInt::from(v[i]))).collect()).collect();
    let inv = nf::rational_inverse(&sub).ok_or_else(|| LiftError::Internal("dependent basis".into()))?;
    let mut s = vec![vec![BigInt::zero(); k]; k];
    for (col, v) in vectors.iter().enumerate() {
        let tv = matvec_i128(t, &v.iter().map(|&x| i128::from(x)).collect::<Vec<_>>());
        for j in 0..k {
            let c: BigRational =
                rows.iter().enumerate().map(|(r, &i)| &inv[j][r] * BigRational::from_integer(BigInt::from(tv[i]))).sum();
            if !c.is_integer() {
                return Err(LiftError::Internal("span is not Hecke-stable over Z".into()));
            }
            s[j][col] = c.to_integer();
        }
        for (i, &tvi) in tv.iter().enumerate() {
            let rhs: BigInt = (0..k).map(|j| &s[j][col] * vectors[j][i]).sum();
            if rhs != BigInt::from(tvi) {
                return Err(LiftError::Internal("span is not Hecke-stable".into()));
            }
        }
    }
    Ok(s)
}

fn int_charpoly(s: &[Vec<BigInt>]) -> ZPoly {
    let q: Vec<Vec<BigRational>> = s.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    nf::rational_charpoly(&q).into_iter().map(|c| c.to_integer()).collect()
}

fn poly_of_matrix(h: &[BigInt], s: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let k = s.len();
    let mut acc = vec![vec![BigInt::zero(); k]; k];
    for c in h.iter().rev() {
        let mut next = vec![vec![BigInt::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                let mut v = BigInt::zero();
                for t in 0..k {
                    v += &acc[i][t] * &s[t][j];
                }
                next[i][j] = v;
            }
            next[i][i] += c;
        }
        acc = next;
    }
    acc
}

/// Integer basis of {x ∈ Z^k : m x = 0}.
fn integer_kernel(m: &[Vec<BigInt>]) -> Vec<Vec<i64>> {
    let k = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigRational>> =
        m.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = BigRational::one() / &a[r][c];
        a[r].iter_mut().for_each(|x| *x *= &inv);
        let pr = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let fct = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x -= &fct * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let vecs: Vec<Vec<i64>> = (0..k)
        .filter(|c| !pivots.contains(c))
        .map(|fc| {
            let mut v = vec![BigRational::zero(); k];
            v[fc] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[i][fc].clone();
            }
            let den = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            v.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer().to_i64().expect("small")).collect()
        })
        .collect();
    saturate(vecs)
}

/// Null vector of (s − θ) over the field, normalized at its first nonzero
/// coordinate.
fn eigenvector_over(k: &NumberField, s: &[Vec<BigInt>], theta: &Elem) -> Result<Vec<Elem>, LiftError> {
    let n = s.len();
    let mut a: Vec<Vec<Elem>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = k.from_int(&s[i][j]);
                    if i == j {
                        k.sub(&e, theta)
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..n).find(|&i| !k.is_zero(&a[i][c])) else {
            continue;
        };
        a.swap(r, p);
        let inv = k.inv(&a[r][c]).expect("nonzero");
        a[r] = a[r].iter().map(|x| k.mul(x, &inv)).collect();
        let pr = a[r].clone();
        for i in 0..n {
            if i != r && !k.is_zero(&a[i][c]) {
                let fct = a[i][c].clone();
                a[i] = a[i].iter().zip(&pr).map(|(x, y)| k.sub(x, &k.mul(&fct, y))).collect();
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return Err(LiftError::Internal(format!("eigenspace of dimension {} over the Hecke field", free.len())));
    }
    let fc = free[0];
    let mut v = vec![k.zero(); n];
    v[fc] = k.from_int(&BigInt::one());
    for (i, &pc) in pivots.iter().enumerate() {
        v[pc] = k.sub(&k.zero(), &a[i][fc]);
    }
    Ok(v)
}

fn build_orbit(
    level: u64,
    block: Block,
    rho: &ZPoly,
    r: usize,
    t2: &SparseSignedMatrix,
    tl: &SparseSignedMatrix,
    ell: u64,
    h: &ZPoly,
    basis: Vec<Vec<i64>>,
) -> Result<GaloisOrbit, LiftError> {
    let dim = basis.len();
    // prefer a_2 as generator when it already has full degree
    let (gen_poly, gen_ell, t) = if zpoly::degree(rho) == dim { (rho.clone(), 2, t2) } else { (h.clone(), ell, tl) };
    let field = NumberField::new(gen_poly);
    let s = action_matrix(t, &basis)?;
    let x = eigenvector_over(&field, &s, &field.generator())?;
    let n = basis[0].len();
    let eigenvector: Vec<Elem> = (0..n)
        .map(|i| {
            let mut acc = field.zero();
            for (xj, b) in x.iter().zip(&basis) {
                if b[i] != 0 {
                    acc = field.add(&acc, &field.scale(xj, &BigRational::from_integer(BigInt::from(b[i]))));
                }
            }
            acc
        })
        .collect();
    Ok(GaloisOrbit { level, block, rho: rho.clone(), multiplicity: r, basis, field, generator_ell: gen_ell, eigenvector })
}

/// Split ker ρ(T_2) by the characteristic polynomial of T_ℓ on it.
pub fn separate_orbits(
    level: u64,
    block: Block,
    rho: &ZPoly,
    r: usize,
    lift: &HighDimLift,
    t2: &SparseSignedMatrix,
    hecke: &dyn HeckeSource,
) -> Result<Vec<GaloisOrbit>, LiftError> {
    let tl_owned;
    let tl: &SparseSignedMatrix = if lift.ell == 2 {
        t2
    } else {
        tl_owned = hecke.block(lift.ell)?;
        &*tl_owned
    };
    let s = action_matrix(tl, &lift.basis)?;
    let chi = int_charpoly(&s);
    if !zpoly::is_squarefree(&chi) {
        return Err(LiftError::Internal(format!("T_{} is not separating: χ_S = {}", lift.ell, zpoly::to_string(&chi))));
    }
    let factors = if r == 1 { vec![chi] } else { zpoly::factor_monic_squarefree(&chi) };
    let mut out = Vec::new();
    for h in factors {
        let ker = integer_kernel(&poly_of_matrix(&h, &s));
        let basis: Vec<Vec<i64>> = ker
            .iter()
            .map(|k| {
                let n = lift.basis[0].len();
                (0..n).map(|i| k.iter().zip(&lift.basis).map(|(c, b)| c * b[i]).sum()).collect()
            })
            .collect();
        out.push(build_orbit(level, block, rho, r, t2, tl, lift.ell, &h, basis)?);
    }
    Ok(out)
}

/// Lift one detected factor ρ^r to its Galois orbits.
#[allow(clippy::too_many_arguments)]
pub fn lift_factor<R: Rng + ?Sized>(
    f: &PrimeFieldCtx,
    block: Block,
    t2: &SparseSignedMatrix,
    rho: &ZPoly,
    r: usize,
    mu: &DensePoly<u64>,
    hecke: &dyn HeckeSource,
    cfg: &LiftSearchConfig,
    rng: &mut R,
) -> Result<Vec<GaloisOrbit>, LiftError> {
    let level = hecke.level();
    if zpoly::degree(rho) == 1 && r == 1 {
        let lambda = (-&rho[0]).to_i64().expect("small eigenvalue");
        let w = lift_1dim(f, t2, lambda, mu, cfg, rng)?;
        return build_orbit(level, block, rho, 1, t2, t2, 2, rho, vec![w]).map(|o| vec![o]);
    }
    let hd = lift_highdim(f, t2, rho, r, mu, hecke, cfg, rng)?;
    separate_orbits(level, block, rho, r, &hd, t2, hecke)
}

/// The eigenvalue (T v)_i / v_i, checked against every coordinate.
pub fn eigenvalue_of(k: &NumberField, v: &[Elem], t: &SparseSignedMatrix) -> Result<Elem, LiftError> {
    let i = v.iter().position(|x| !k.is_zero(x)).ok_or_else(|| LiftError::Internal("zero eigenvector".into()))?;
    let apply = |row: usize| -> Elem {
        let mut acc = k.zero();
        for &(c, m) in t.row(row) {
            acc = k.add(&acc, &k.scale(&v[c], &BigRational::from_integer(BigInt::from(m))));
        }
        acc
    };
    let a = k.div(&apply(i), &v[i]).expect("nonzero");
    for row in 0..v.len() {
        if k.sub(&apply(row), &k.mul(&a, &v[row])).iter().any(|c| !c.is_zero()) {
            return Err(LiftError::Internal(format!("inconsistent eigenvalue at coordinate {row}")));
        }
    }
    Ok(a)
}
