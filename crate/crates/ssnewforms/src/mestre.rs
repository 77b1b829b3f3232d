//! q-expansions from Mestre's identity Σ_j v_j dj/(j(q) − j) = N f(q) dq/q,
//! evaluated mod p and lifted through a few exactly known eigenvalues.

use crate::gf::{DensePoly, Field, PrimeFieldCtx, QuadExtCtx};
use crate::lift::{eigenvalue_of, GaloisOrbit, HeckeSource, LiftError};
use crate::linalg::dense;
use crate::nf::{Elem, NumberField};
use crate::series::{self, compose_with_reciprocal_j, partial_fraction_tree, PowerSeries, RationalFunction, SeriesError};
use crate::ssgraph::{Block, SupersingularSet};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MestreError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error("β system singular after {0} probe primes")]
    SingularProbes(usize),
    #[error("a_{n}: {reason}")]
    Coefficient { n: usize, reason: String },
}

/// The leaves Σ v_j/(x − j) of one orbit-indexed vector, grouped over
/// conjugate pairs so that every leaf has F_p coefficients.
///
/// Invariant block: v(j) = v(j^σ) = u at pairs, and 2u/w(j) at rational j
/// (the automorphism weight converts the orbit-sum block coordinates into
/// divisor coefficients). Anti-invariant block: v(j) = u, v(j^σ) = −u, and
/// the pair sum is divided by ξ.
pub fn unfold(set: &SupersingularSet, block: Block, index: &[usize], u: &[i64]) -> Vec<RationalFunction> {
    let k = QuadExtCtx::new(set.p).expect("level is prime");
    let f = *k.base();
    let n = k.nonresidue();
    let mut leaves = Vec::new();
    for (&i, &ui) in index.iter().zip(u) {
        if ui == 0 {
            continue;
        }
        let uu = f.reduce_i64(ui);
        let j = set.vertices[i];
        if set.is_rational(i) {
            if block == Block::Minus {
                let w = f.invm(set.weight(i)).expect("weight is a unit");
                leaves.push(RationalFunction::simple(&f, f.mulm(f.mulm(2, uu), w), j.a));
            }
            continue;
        }
        // (x − j)(x − j^σ) = x² − 2a x + (a² − n b²)
        let den = DensePoly::new(
            &f,
            vec![f.subm(f.mulm(j.a, j.a), f.mulm(n, f.mulm(j.b, j.b))), f.neg(&f.mulm(2, j.a)), 1],
        );
        let num = match block {
            Block::Minus => DensePoly::new(&f, vec![f.neg(&f.mulm(f.mulm(2, j.a), uu)), f.mulm(2, uu)]),
            Block::Plus => DensePoly::constant(&f, f.mulm(f.mulm(2, j.b), uu)),
        };
        leaves.push(RationalFunction { num, den });
    }
    leaves
}

/// j(q) and q·dj/dq with enough terms for coefficients up to q^n.
pub struct JData {
    pub j: PowerSeries,
    pub q_dj: PowerSeries,
    pub n: usize,
}

impl JData {
    pub fn new(f: &PrimeFieldCtx, n: usize) -> Result<Self, SeriesError> {
        let (j, dj) = series::j_and_derivative(f, n + 4)?;
        Ok(Self { j, q_dj: dj.shift(1), n })
    }
}

/// ψ[0..=n] with ψ(q) = q j'(q) R(j(q)) and R = Σ leaves.
pub fn mestre_rhs(f: &PrimeFieldCtx, leaves: &[RationalFunction], jd: &JData) -> Result<Vec<u64>, SeriesError> {
    let n = jd.n;
    let r = partial_fraction_tree(f, leaves);
    let rj = compose_with_reciprocal_j(f, &r, &jd.j, n + 1)?;
    Ok(mul_laurent(f, &jd.q_dj, &rj, n))
}

fn mul_laurent(f: &PrimeFieldCtx, a: &PowerSeries, b: &PowerSeries, n: usize) -> Vec<u64> {
    (0..=n as i64)
        .map(|e| {
            let mut acc = 0u64;
            for (k, &bk) in b.coeffs.iter().enumerate() {
                let eb = b.valuation + k as i64;
                if let Some(ak) = a.coeff(e - eb).filter(|_| e - eb >= a.valuation) {
                    acc = f.addm(acc, f.mulm(ak, bk));
                }
            }
            acc
        })
        .collect()
}

/// Naive oracle: Σ v_j/(j(q) − j) term by term as Laurent series.
pub fn mestre_rhs_naive(
    f: &PrimeFieldCtx,
    leaves: &[RationalFunction],
    jd: &JData,
) -> Result<Vec<u64>, SeriesError> {
    let mut total = vec![0u64; jd.n + 1];
    for leaf in leaves {
        let rj = series::compose_horner(f, leaf, &jd.j, jd.n + 1)?;
        for (t, x) in total.iter_mut().zip(mul_laurent(f, &jd.q_dj, &rj, jd.n)) {
            *t = f.addm(*t, x);
        }
    }
    Ok(total)
}

/// α_i[ℓ] = Σ_k β_{i,k} ψ_k[ℓ] mod p at the probe primes.
#[derive(Clone, Debug)]
pub struct BetaSolve {
    pub probes: Vec<u64>,
    /// Exact coordinates of a_ℓ at each probe, in the integral basis.
    pub alpha: Vec<Vec<BigInt>>,
    /// β[i][k] mod p.
    pub beta: Vec<Vec<u64>>,
}

/// Solve for β using the smallest primes ≠ p that make the ψ rows
/// independent; `exact(ℓ)` supplies a_ℓ in integral-basis coordinates.
pub fn solve_beta(
    f: &PrimeFieldCtx,
    psis: &[Vec<u64>],
    mut exact: impl FnMut(u64) -> Result<Vec<BigInt>, MestreError>,
    max_probes: usize,
) -> Result<BetaSolve, MestreError> {
    let m = psis.len();
    let nmax = psis[0].len() - 1;
    let mut probes = Vec::new();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut alpha = Vec::new();
    let mut considered = 0;
    for ell in crate::gf::primes_in(2, nmax as u64 + 1) {
        if ell == f.modulus() {
            continue;
        }
        if rows.len() == m {
            break;
        }
        considered += 1;
        if considered > max_probes {
            return Err(MestreError::SingularProbes(considered - 1));
        }
        let row: Vec<u64> = psis.iter().map(|p| p[ell as usize]).collect();
        let mut trial = rows.clone();
        trial.push(row.clone());
        if dense::rank(f, &trial) == trial.len() {
            rows = trial;
            probes.push(ell);
            alpha.push(exact(ell)?);
        }
    }
    if rows.len() < m {
        return Err(MestreError::SingularProbes(considered));
    }
    let d = alpha[0].len();
    let beta = (0..d)
        .map(|i| {
            let rhs: Vec<u64> = alpha.iter().map(|a| reduce(f, &a[i])).collect();
            dense::solve(f, &rows, &rhs).expect("independent rows")
        })
        .collect();
    Ok(BetaSolve { probes, alpha, beta })
}

fn reduce(f: &PrimeFieldCtx, x: &BigInt) -> u64 {
    x.mod_floor(&BigInt::from(f.modulus())).to_u64().expect("reduced")
}

/// Coefficients a_1..a_N in integral-basis coordinates.
#[derive(Clone, Debug)]
pub struct QExpansion {
    pub coeffs: Vec<Vec<BigInt>>,
    pub probes: Vec<u64>,
    /// Primes whose coefficient came from an exact Hecke eigenvalue because
    /// the mod-p lift was ambiguous under the Weil bound.
    pub exact_primes: Vec<u64>,
}

impl QExpansion {
    pub fn a(&self, n: usize) -> &[BigInt] {
        &self.coeffs[n - 1]
    }
}

fn smallest_prime_factor(n: usize) -> usize {
    (2..).find(|d| n % d == 0 || d * d > n).map(|d| if n % d == 0 { d } else { n }).expect("n ≥ 2")
}

struct WeilCheck<'a> {
    k: &'a NumberField,
    roots: Vec<f64>,
}

impl WeilCheck<'_> {
    fn holds(&self, a: &Elem, n: usize) -> bool {
        let bound = 2.0 * (n as f64).sqrt();
        self.k.embed(a, &self.roots).iter().all(|x| x.abs() < bound - 1e-9)
    }
}

pub struct ExpansionInputs<'a> {
    pub set: &'a SupersingularSet,
    pub index: &'a [usize],
    pub hecke: &'a dyn HeckeSource,
    pub jd: &'a JData,
    /// Coefficients to emit; at most `jd.n`.
    pub ncoeffs: usize,
    /// Largest prime at which an exact eigenvalue may replace an ambiguous
    /// lift.
    pub exact_limit: u64,
    pub max_probes: usize,
}

/// q-expansion of one orbit to `ncoeffs` coefficients.
pub fn q_expansion(orbit: &GaloisOrbit, inp: &ExpansionInputs<'_>) -> Result<QExpansion, MestreError> {
    let p = inp.set.p;
    let f = PrimeFieldCtx::new(p).expect("prime level");
    let k = &orbit.field;
    let d = k.degree();
    let nmax = inp.ncoeffs.min(inp.jd.n);
    let psis: Vec<Vec<u64>> = orbit
        .basis
        .iter()
        .map(|u| mestre_rhs(&f, &unfold(inp.set, orbit.block, inp.index, u), inp.jd))
        .collect::<Result<_, _>>()?;
    let exact_elem = |ell: u64| -> Result<Elem, MestreError> {
        let t = inp.hecke.block(ell)?;
        Ok(eigenvalue_of(k, &orbit.eigenvector, &t)?)
    };
    let coords_of = |a: &Elem, n: usize| -> Result<Vec<BigInt>, MestreError> {
        k.integral_coords(a).ok_or_else(|| MestreError::Coefficient { n, reason: "not an algebraic integer".into() })
    };
    let beta = solve_beta(&f, &psis, |ell| coords_of(&exact_elem(ell)?, ell as usize), inp.max_probes)?;
    let weil = WeilCheck { k, roots: k.embeddings() };
    let modp = BigInt::from(p);
    let mut elems: Vec<Elem> = Vec::with_capacity(nmax);
    let mut coeffs: Vec<Vec<BigInt>> = Vec::with_capacity(nmax);
    let mut exact_primes = Vec::new();
    for n in 1..=nmax {
        let residues: Vec<u64> = beta
            .beta
            .iter()
            .map(|row| row.iter().zip(&psis).fold(0u64, |acc, (&b, psi)| f.addm(acc, f.mulm(b, psi[n]))))
            .collect();
        let lifted: Vec<BigInt> = residues.iter().map(|&r| BigInt::from(f.signed(r))).collect();
        let err = |reason: String| MestreError::Coefficient { n, reason };
        let value: Vec<BigInt> = if n == 1 {
            lifted
        } else {
            let q = smallest_prime_factor(n);
            let mut m = n;
            let mut e = 0;
            while m % q == 0 {
                m /= q;
                e += 1;
            }
            if m > 1 {
                // multiplicative: a_n = a_{q^e} a_m
                coords_of(&k.mul(&elems[q.pow(e) - 1], &elems[m - 1]), n)?
            } else if e > 1 {
                let aq = &elems[q - 1];
                let prev = &elems[n / q - 1];
                if q as u64 == p {
                    coords_of(&k.mul(aq, prev), n)?
                } else {
                    let prev2 = &elems[n / (q * q) - 1];
                    let qq = BigRational::from_integer(BigInt::from(q));
                    coords_of(&k.sub(&k.mul(aq, prev), &k.scale(prev2, &qq)), n)?
                }
            } else if q as u64 == p {
                lifted
            } else {
                let a = k.from_coords(&lifted);
                let ambiguous = (0..d).any(|i| {
                    [1i64, -1].iter().any(|&s| {
                        let mut alt = lifted.clone();
                        alt[i] += &modp * s;
                        weil.holds(&k.from_coords(&alt), n)
                    })
                });
                if weil.holds(&a, n) && !ambiguous {
                    lifted
                } else if (n as u64) <= inp.exact_limit {
                    exact_primes.push(n as u64);
                    coords_of(&exact_elem(n as u64)?, n)?
                } else if !weil.holds(&a, n) {
                    return Err(err("Weil bound violated".into()));
                } else {
                    return Err(err("lift ambiguous under the Weil bound".into()));
                }
            }
        };
        // every coefficient must agree with the Mestre residues
        for (v, &r) in value.iter().zip(&residues) {
            if reduce(&f, v) != r {
                return Err(err(format!("coordinate {v} disagrees with residue {r} mod {p}")));
            }
        }
        if n == 1 && value != coords_of(&k.from_int(&BigInt::one()), 1)? {
            return Err(err("a_1 ≠ 1".into()));
        }
        let a = k.from_coords(&value);
        if n as u64 == p {
            let sign = -orbit.block.al_sign();
            if a != k.from_int(&BigInt::from(sign)) {
                return Err(err(format!("a_p is not {sign}")));
            }
        }
        if crate::gf::is_prime(n as u64) && n as u64 != p && !weil.holds(&a, n) {
            return Err(err("Weil bound violated".into()));
        }
        elems.push(a);
        coeffs.push(value);
    }
    for (ell, alpha) in beta.probes.iter().zip(&beta.alpha) {
        if *ell as usize <= nmax && &coeffs[*ell as usize - 1] != alpha {
            return Err(MestreError::Coefficient { n: *ell as usize, reason: "probe eigenvalue mismatch".into() });
        }
    }
    Ok(QExpansion { coeffs, probes: beta.probes, exact_primes })
}

/// ⌊(p + 1)/6⌋.
pub fn sturm_bound(p: u64) -> usize {
    ((p + 1) / 6) as usize
}
