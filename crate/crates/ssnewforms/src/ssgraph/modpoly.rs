//! Classical modular polynomials Φ_ℓ(X, Y).
//!
//! Tables for ℓ ≤ 13 ship as text files (`ℓ i j c` per line, i ≥ j). They
//! are produced by [`ModularPolynomial::generate`], which solves for the
//! coefficients from q-expansions modulo many primes and lifts by CRT.

use crate::gf::{is_prime, DensePoly, Field, PrimeFieldCtx, QuadExtCtx, QuadExtElement};
use crate::linalg::dense;
use crate::series::{j_series, mul_trunc};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;
use thiserror::Error;

pub const BUNDLED_LEVELS: [u64; 6] = [2, 3, 5, 7, 11, 13];

const DATA: [&str; 6] = [
    include_str!("../../data/modpoly/phi_2.txt"),
    include_str!("../../data/modpoly/phi_3.txt"),
    include_str!("../../data/modpoly/phi_5.txt"),
    include_str!("../../data/modpoly/phi_7.txt"),
    include_str!("../../data/modpoly/phi_11.txt"),
    include_str!("../../data/modpoly/phi_13.txt"),
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModPolyError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no modular polynomial table for level {0}")]
    Missing(u64),
    #[error("nullspace of the q-expansion system mod {prime} has dimension {dim}")]
    Nullspace { prime: u64, dim: usize },
}

/// Φ_ℓ with integer coefficients; `terms` holds (i, j, c) for c x^i y^j, i ≥ j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularPolynomial {
    pub ell: u64,
    pub terms: Vec<(usize, usize, BigInt)>,
}

/// Φ_ℓ reduced mod p as a full (ℓ+2) x (ℓ+2) coefficient grid.
#[derive(Clone, Debug)]
pub struct ReducedModPoly {
    pub ell: u64,
    pub coeffs: Vec<Vec<u64>>,
}

impl ModularPolynomial {
    pub fn parse(text: &str) -> Result<Self, ModPolyError> {
        let mut ell = None;
        let mut terms = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| ModPolyError::Parse { line: n + 1, msg: msg.to_string() };
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(err("expected 4 fields"));
            }
            let l: u64 = parts[0].parse().map_err(|_| err("bad level"))?;
            let i: usize = parts[1].parse().map_err(|_| err("bad exponent"))?;
            let j: usize = parts[2].parse().map_err(|_| err("bad exponent"))?;
            let c: BigInt = parts[3].parse().map_err(|_| err("bad coefficient"))?;
            if *ell.get_or_insert(l) != l {
                return Err(err("mixed levels"));
            }
            if i < j || i as u64 > l + 1 {
                return Err(err("exponent out of range"));
            }
            terms.push((i, j, c));
        }
        let ell = ell.ok_or(ModPolyError::Parse { line: 0, msg: "empty table".into() })?;
        terms.sort_by(|a, b| (b.0, b.1).cmp(&(a.0, a.1)));
        Ok(Self { ell, terms })
    }

    pub fn to_text(&self) -> String {
        self.terms.iter().map(|(i, j, c)| format!("{} {} {} {}\n", self.ell, i, j, c)).collect()
    }

    /// Coefficient of x^i y^j.
    pub fn coeff(&self, i: usize, j: usize) -> BigInt {
        let (a, b) = if i >= j { (i, j) } else { (j, i) };
        self.terms.iter().find(|t| t.0 == a && t.1 == b).map_or_else(BigInt::zero, |t| t.2.clone())
    }

    pub fn reduce(&self, p: u64) -> ReducedModPoly {
        let n = self.ell as usize + 2;
        let mut coeffs = vec![vec![0u64; n]; n];
        let pb = BigInt::from(p);
        for (i, j, c) in &self.terms {
            let r = c.mod_floor(&pb).to_u64().expect("reduced below p");
            coeffs[*i][*j] = r;
            coeffs[*j][*i] = r;
        }
        ReducedModPoly { ell: self.ell, coeffs }
    }

    /// Solve for Φ_ℓ from q-expansions. Deterministic; runs in well under a
    /// second for ℓ ≤ 13 in release builds.
    pub fn generate(ell: u64) -> Result<Self, ModPolyError> {
        let unknowns = unknown_pairs(ell);
        let mut modulus = BigInt::one();
        let mut acc: Vec<BigInt> = vec![BigInt::zero(); unknowns.len()];
        let mut last: Option<Vec<BigInt>> = None;
        let mut prime = (1u64 << 31) - 1;
        loop {
            while !is_prime(prime) {
                prime -= 2;
            }
            let sol = solve_mod(ell, &unknowns, prime)?;
            // CRT-combine
            let pb = BigInt::from(prime);
            let inv = modulus.clone().mod_floor(&pb).modpow(&(&pb - 2u32), &pb);
            for (a, &s) in acc.iter_mut().zip(&sol) {
                let t = ((BigInt::from(s) - &*a) * &inv).mod_floor(&pb);
                *a += t * &modulus;
            }
            modulus *= &pb;
            let half = &modulus >> 1u32;
            let lifted: Vec<BigInt> =
                acc.iter().map(|a| if *a > half { a - &modulus } else { a.clone() }).collect();
            if last.as_ref() == Some(&lifted) {
                let terms = unknowns
                    .iter()
                    .zip(lifted)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(&(i, j), c)| (i, j, c))
                    .collect();
                let mut out = Self { ell, terms };
                out.terms.sort_by(|a, b| (b.0, b.1).cmp(&(a.0, a.1)));
                return Ok(out);
            }
            last = Some(lifted);
            prime -= 2;
        }
    }

    /// Check Φ_ℓ(j(q), j(q^ℓ)) ≡ 0 mod p through the whole polar part and
    /// the first `extra` coefficients from q^0 on.
    pub fn verify_series(&self, p: u64, extra: usize) -> bool {
        let f = PrimeFieldCtx::new(p).expect("prime modulus");
        let red = self.reduce(p);
        let cols = monomial_series(&f, self.ell, extra);
        let len = cols[0][0].len();
        let mut total = vec![0u64; len];
        let n = self.ell as usize + 2;
        for a in 0..n {
            for b in 0..n {
                let c = red.coeffs[a][b];
                if c == 0 {
                    continue;
                }
                for (t, &x) in total.iter_mut().zip(&cols[a][b]) {
                    *t = f.addm(*t, f.mulm(c, x));
                }
            }
        }
        total.iter().all(|&x| x == 0)
    }
}

impl ReducedModPoly {
    /// Φ_ℓ(x, Y) as a polynomial in Y over F_{p²}.
    pub fn specialize(&self, k: &QuadExtCtx, x: &QuadExtElement) -> DensePoly<QuadExtElement> {
        let n = self.ell as usize + 2;
        let mut pows = vec![k.one()];
        for i in 1..n {
            pows.push(k.mul(&pows[i - 1], x));
        }
        let coeffs = (0..n)
            .map(|j| {
                (0..n).fold(k.zero(), |acc, i| {
                    let c = self.coeffs[i][j];
                    if c == 0 {
                        acc
                    } else {
                        k.add(&acc, &k.mul(&pows[i], &QuadExtElement::rational(c)))
                    }
                })
            })
            .collect();
        DensePoly::new(k, coeffs)
    }
}

/// Bundled Φ_ℓ, parsed once.
pub fn bundled(ell: u64) -> Result<&'static ModularPolynomial, ModPolyError> {
    static CELLS: [OnceLock<ModularPolynomial>; 6] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let idx = BUNDLED_LEVELS.iter().position(|&l| l == ell).ok_or(ModPolyError::Missing(ell))?;
    if let Some(m) = CELLS[idx].get() {
        return Ok(m);
    }
    let parsed = ModularPolynomial::parse(DATA[idx])?;
    if parsed.ell != ell {
        return Err(ModPolyError::Missing(ell));
    }
    Ok(CELLS[idx].get_or_init(|| parsed))
}

pub fn has_bundled(ell: u64) -> bool {
    BUNDLED_LEVELS.contains(&ell)
}

fn unknown_pairs(ell: u64) -> Vec<(usize, usize)> {
    let n = ell as usize + 2;
    (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect()
}

/// cols[a][b] = q^((ℓ+1)² - a - ℓb) J(q)^a J(q^ℓ)^b to (ℓ+1)² + extra terms,
/// where J = q j(q).
fn monomial_series(f: &PrimeFieldCtx, ell: u64, extra: usize) -> Vec<Vec<Vec<u64>>> {
    let l = ell as usize;
    let top = (l + 1) * (l + 1);
    let len = top + extra;
    let jj = j_series(f, len).expect("p >= 5").coeffs;
    let mut jl = vec![0u64; len];
    for (k, &c) in jj.iter().enumerate() {
        if k * l < len {
            jl[k * l] = c;
        }
    }
    let powers = |base: &[u64]| {
        let mut out = vec![{
            let mut one = vec![0u64; len];
            one[0] = 1;
            one
        }];
        for i in 1..=l + 1 {
            let next = mul_trunc(f, &out[i - 1], base, len);
            out.push(next);
        }
        out
    };
    let pj = powers(&jj);
    let pl = powers(&jl);
    let mut cols = vec![vec![Vec::new(); l + 2]; l + 2];
    for (a, row) in cols.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            let shift = top - a - l * b;
            let prod = mul_trunc(f, &pj[a], &pl[b], len);
            let mut s = vec![0u64; len];
            s[shift..].copy_from_slice(&prod[..len - shift]);
            *slot = s;
        }
    }
    cols
}

/// Coefficients (normalized so that x^(ℓ+1) has coefficient 1) mod `prime`.
fn solve_mod(ell: u64, unknowns: &[(usize, usize)], prime: u64) -> Result<Vec<u64>, ModPolyError> {
    let f = PrimeFieldCtx::new(prime).expect("prime modulus");
    let cols = monomial_series(&f, ell, 40);
    let len = cols[0][0].len();
    let m: dense::Matrix = (0..len)
        .map(|e| {
            unknowns
                .iter()
                .map(|&(i, j)| {
                    let x = cols[i][j][e];
                    if i == j {
                        x
                    } else {
                        f.addm(x, cols[j][i][e])
                    }
                })
                .collect()
        })
        .collect();
    let ns = dense::nullspace(&f, &m, unknowns.len());
    if ns.len() != 1 {
        return Err(ModPolyError::Nullspace { prime, dim: ns.len() });
    }
    let norm = unknowns.iter().position(|&(i, j)| i == ell as usize + 1 && j == 0).expect("present");
    let scale = f.invm(ns[0][norm]).ok_or(ModPolyError::Nullspace { prime, dim: 0 })?;
    Ok(ns[0].iter().map(|&x| f.mulm(x, scale)).collect())
}

/// Height in bits of the largest coefficient.
pub fn height_bits(m: &ModularPolynomial) -> u64 {
    m.terms.iter().map(|t| t.2.abs().to_biguint().unwrap_or_else(BigUint::zero).bits()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn classical_phi2() -> Vec<(usize, usize, i64)> {
        vec![
            (3, 0, 1),
            (2, 2, -1),
            (2, 1, 1488),
            (2, 0, -162000),
            (1, 1, 40773375),
            (1, 0, 8748000000),
            (0, 0, -157464000000000),
        ]
    }

    #[test]
    fn bundled_phi2_is_classical() {
        let m = bundled(2).unwrap();
        for (i, j, c) in classical_phi2() {
            assert_eq!(m.coeff(i, j), BigInt::from(c), "x^{i} y^{j}");
            assert_eq!(m.coeff(j, i), BigInt::from(c));
        }
        assert_eq!(m.terms.len(), classical_phi2().len());
    }

    #[test]
    fn generator_reproduces_small_tables() {
        for ell in [2u64, 3] {
            assert_eq!(&ModularPolynomial::generate(ell).unwrap(), bundled(ell).unwrap());
        }
    }

    #[test]
    fn bundled_tables_verify() {
        for ell in BUNDLED_LEVELS {
            let m = bundled(ell).unwrap();
            assert_eq!(m.coeff(ell as usize + 1, 0), BigInt::one());
            // degree exactly ℓ+1 in y, no mixed term of that degree
            for j in 1..=ell as usize + 1 {
                assert!(m.coeff(ell as usize + 1, j).is_zero());
            }
            for p in [11u64, 101, 1009] {
                assert!(m.verify_series(p, 50), "Φ_{ell} mod {p}");
            }
        }
    }

    #[test]
    fn perturbed_table_fails_verification() {
        let mut m = bundled(3).unwrap().clone();
        m.terms[3].2 += 1;
        assert!(!m.verify_series(1009, 50));
    }

    #[test]
    fn parse_roundtrip_and_errors() {
        let m = bundled(5).unwrap();
        assert_eq!(&ModularPolynomial::parse(&m.to_text()).unwrap(), m);
        assert!(ModularPolynomial::parse("2 3 0").is_err());
        assert!(ModularPolynomial::parse("2 0 3 1").is_err());
        assert!(ModularPolynomial::parse("2 3 0 1\n3 4 0 1").is_err());
    }

    #[test]
    fn phi2_at_zero_mod_11() {
        let k = QuadExtCtx::new(11).unwrap();
        let g = bundled(2).unwrap().reduce(11).specialize(&k, &k.zero());
        let want: Vec<QuadExtElement> = [-1i64, 3, -3, 1].iter().map(|&c| k.from_int(c)).collect();
        assert_eq!(g.coeffs, want);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(crate::gf::poly_roots(&k, &g, &mut rng).unwrap(), vec![k.one(); 3]);
    }

    #[test]
    fn heights_grow() {
        let h: Vec<u64> = BUNDLED_LEVELS.iter().map(|&l| height_bits(bundled(l).unwrap())).collect();
        assert!(h.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(h[0], 48); // 157464000000000 < 2^48
    }
}
